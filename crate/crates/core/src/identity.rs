//! Weighted sums over arithmetical functions and their convolution-integral
//! representations.
//!
//! Left-hand sides are exact finite sums. Right-hand sides combine the
//! closed-form convolution kernels of [`crate::stepconv`] with the
//! breakpoint-aware quadrature of [`crate::quadrature`]; every kernel kink
//! is a breakpoint, so each panel only sees a polynomial times a smooth
//! weight derivative.
//!
//! A weight derivative that jumps at the right end of the support (for
//! instance f′ for cesaro(1)) contributes a point mass when differentiated
//! once more; that boundary term is added explicitly.

use serde::Serialize;
use serde_json::Value;

use crate::arith::{rep_counts, summatory, ArithSeq};
use crate::error::{invalid, Error, Result};
use crate::quadrature::Integrator;
use crate::stepconv::ConvKernel;
use crate::sum::Compensated;
use crate::weight::Weight;

/// A quadrature-based value with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

impl QuadEstimate {
    fn zero() -> Self {
        Self {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        }
    }

    fn add(self, other: QuadEstimate) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            panels: self.panels + other.panels,
        }
    }

    fn scale(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            error_estimate: self.error_estimate * c.abs(),
            panels: self.panels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub params: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
    pub quadrature_panels: usize,
    pub notes: String,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("lambda = {lambda} must be positive and finite")))
    }
}

fn check_reach(len: usize, lambda: f64, b: f64) -> Result<()> {
    let x = lambda * b;
    if x > len as f64 {
        return Err(Error::OutOfTable { x, n: len });
    }
    Ok(())
}

/// Right end of the integration range: the support end, which must not exceed b.
fn compact_end(f: &Weight, a: f64, b: f64) -> Result<f64> {
    if !f.is_compact() {
        return Err(invalid("this identity needs a compactly supported weight"));
    }
    if !(b > a) {
        return Err(invalid(format!("need a < b, got a = {a}, b = {b}")));
    }
    let hi = f.support().1;
    if b < hi {
        return Err(invalid(format!(
            "b = {b} lies inside the support (..{hi}], so f(b-) does not vanish"
        )));
    }
    if a > hi {
        return Err(invalid(format!("a = {a} lies beyond the support end {hi}")));
    }
    Ok(hi)
}

fn integrate_against(
    f: &Weight,
    j: usize,
    lo: f64,
    hi: f64,
    h: &dyn Fn(f64) -> f64,
    interior: impl IntoIterator<Item = f64>,
    quad: &Integrator,
) -> Result<QuadEstimate> {
    let r = f.integrate_derivative(j, lo, hi, h, interior, None, quad)?;
    Ok(QuadEstimate {
        value: r.value,
        error_estimate: r.error_estimate,
        panels: r.panels,
    })
}

/// Σ_{λa<n≤λb} g₂(n) Σ_{m≤λb−n} g₁(m) f((n+m)/λ).
pub fn weighted_sum_2(g1: &ArithSeq, g2: &ArithSeq, f: &Weight, lambda: f64, a: f64, b: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if a < 0.0 || !(b > a) {
        return Err(invalid(format!("need 0 <= a < b, got a = {a}, b = {b}")));
    }
    check_reach(g1.len().min(g2.len()), lambda, b)?;
    let top = (lambda * b).floor() as usize;
    let c = lambda * a;
    let mut acc = Compensated::new();
    for n in 1..=top {
        if (n as f64) <= c {
            continue;
        }
        let v2 = g2.get(n);
        if v2 == 0.0 {
            continue;
        }
        for m in 1..=(top - n) {
            let v1 = g1.get(m);
            if v1 != 0.0 {
                acc.add(v2 * v1 * f.eval((n + m) as f64 / lambda));
            }
        }
    }
    Ok(acc.value())
}

/// Two-sequence right-hand side with boundary term at λa.
pub fn rhs_prop22(
    g1: &ArithSeq,
    g2: &ArithSeq,
    f: &Weight,
    lambda: f64,
    a: f64,
    b: f64,
    quad: &Integrator,
) -> Result<QuadEstimate> {
    check_lambda(lambda)?;
    if a < 0.0 {
        return Err(invalid(format!("a = {a} must be nonnegative")));
    }
    let end = compact_end(f, a, b)?;
    f.check_vanishing(2)?;
    let n = g1.len().min(g2.len());
    check_reach(n, lambda, b)?;
    let c = lambda * a;
    let big_g1 = summatory(g1);
    let g2_at_c = summatory(g2).eval(c)?;

    // G₂(λa)·∫_a^e G₁(λv − λa) f′(v) dv.
    let mut total = QuadEstimate::zero();
    if g2_at_c != 0.0 {
        let h = |v: f64| big_g1.eval((lambda * v - c).max(0.0)).unwrap_or(f64::NAN);
        let bps = (1..=n).filter(|&m| g1.get(m) != 0.0).map(|m| a + m as f64 / lambda);
        let t = integrate_against(f, 1, a, end, &h, bps, quad)?;
        total = total.add(t.scale(g2_at_c));
    }

    // J(x) = ∫_{c}^{x} G₂(s)G₁(x−s) ds = G₂(c)·∫₀^{x−c}G₁ + Σ_n 𝒢_c(n)(x−n).
    let primitive = ConvKernel::from_counts(2, g1.values()[..n].to_vec())?;
    let tail_values: Vec<f64> = (1..=n).map(|m| if (m as f64) > c { g2.get(m) } else { 0.0 }).collect();
    let g2_tail = ArithSeq::from_values("tail", tail_values)?;
    let g1_cut = ArithSeq::from_values("g1", g1.values()[..n].to_vec())?;
    let shifted = ConvKernel::build(&[&g1_cut, &g2_tail])?;
    let j_of = |x: f64| {
        let mut v = shifted.eval_unchecked(x);
        if g2_at_c != 0.0 && x > c {
            v += g2_at_c * primitive.eval_unchecked(x - c);
        }
        v
    };
    let h = |w: f64| j_of(lambda * w);
    let mut bps: Vec<f64> = shifted.breakpoints(lambda * end).map(|m| m as f64 / lambda).collect();
    if g2_at_c != 0.0 {
        bps.extend(primitive.breakpoints(lambda * (end - a)).map(|m| a + m as f64 / lambda));
    }
    let t = integrate_against(f, 2, a, end, &h, bps, quad)?;
    total = total.add(t.scale(1.0 / lambda));

    let jump = f.left_limit_at_right_end(1).unwrap_or(0.0);
    if jump != 0.0 {
        total.value -= jump * j_of(lambda * end) / lambda;
    }
    Ok(total)
}

/// The a = 0 form (1/λ)∫₀^b f″(w)(G₁*G₂)(λw) dw.
pub fn rhs_compact(g1: &ArithSeq, g2: &ArithSeq, f: &Weight, lambda: f64, b: f64, quad: &Integrator) -> Result<QuadEstimate> {
    rhs_nested(&[g1, g2], f, lambda, b, quad)
}

/// Σ_{n₁+⋯+n_d ≤ λb} g₁(n₁)⋯g_d(n_d) f((n₁+⋯+n_d)/λ).
pub fn weighted_sum_d(seqs: &[&ArithSeq], f: &Weight, lambda: f64, b: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(b > 0.0) {
        return Err(invalid(format!("b = {b} must be positive")));
    }
    let counts = rep_counts(seqs)?;
    check_reach(counts.len(), lambda, b)?;
    let top = (lambda * b).floor() as usize;
    let mut acc = Compensated::new();
    for (i, &c) in counts[..top].iter().enumerate() {
        if c != 0.0 {
            acc.add(c * f.eval((i + 1) as f64 / lambda));
        }
    }
    Ok(acc.value())
}

/// ((−1)^d/λ^{d−1}) ∫₀^b f^{(d)}(w)·(G₁*(⋯*G_d))(λw) dw.
pub fn rhs_cor24(seqs: &[&ArithSeq], f: &Weight, lambda: f64, b: f64, quad: &Integrator) -> Result<QuadEstimate> {
    rhs_nested(seqs, f, lambda, b, quad)
}

fn rhs_nested(seqs: &[&ArithSeq], f: &Weight, lambda: f64, b: f64, quad: &Integrator) -> Result<QuadEstimate> {
    check_lambda(lambda)?;
    let d = seqs.len();
    let end = compact_end(f, 0.0, b)?;
    f.check_vanishing(d)?;
    let kernel = ConvKernel::build(seqs)?;
    check_reach(kernel.len(), lambda, b)?;
    let h = |w: f64| kernel.eval_unchecked(lambda * w);
    let bps: Vec<f64> = kernel.breakpoints(lambda * end).map(|m| m as f64 / lambda).collect();
    let mut total = integrate_against(f, d, 0.0, end, &h, bps, quad)?;
    let jump = f.left_limit_at_right_end(d - 1).unwrap_or(0.0);
    if jump != 0.0 {
        total.value -= jump * h(end);
    }
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    Ok(total.scale(sign / lambda.powi(d as i32 - 1)))
}

/// Compares two already computed sides.
pub fn verify_identity(
    identity: &str,
    params: Value,
    lhs: f64,
    rhs: QuadEstimate,
    tol: f64,
) -> Result<VerificationReport> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance {tol} must be positive")));
    }
    let abs_err = (lhs - rhs.value).abs();
    let rel_err = abs_err / lhs.abs().max(rhs.value.abs()).max(1.0);
    let pass = rel_err <= tol;
    Ok(VerificationReport {
        identity: identity.to_string(),
        params,
        lhs,
        rhs: rhs.value,
        abs_err,
        rel_err,
        pass,
        quadrature_panels: rhs.panels,
        notes: format!("quadrature error estimate {:.3e}", rhs.error_estimate),
    })
}

/// Two-sequence identity check.
#[allow(clippy::too_many_arguments)]
pub fn verify_prop22(
    g1: &ArithSeq,
    g2: &ArithSeq,
    f: &Weight,
    lambda: f64,
    a: f64,
    b: f64,
    tol: f64,
    quad: &Integrator,
) -> Result<VerificationReport> {
    let lhs = weighted_sum_2(g1, g2, f, lambda, a, b)?;
    let rhs = rhs_prop22(g1, g2, f, lambda, a, b, quad)?;
    let params = serde_json::json!({
        "g1": g1.name(), "g2": g2.name(), "N": g1.len(), "weight": f,
        "lambda": lambda, "a": a, "b": b, "tol": tol,
    });
    verify_identity("prop22", params, lhs, rhs, tol)
}

/// d-fold identity check.
pub fn verify_cor24(seqs: &[&ArithSeq], f: &Weight, lambda: f64, b: f64, tol: f64, quad: &Integrator) -> Result<VerificationReport> {
    let lhs = weighted_sum_d(seqs, f, lambda, b)?;
    let rhs = rhs_cor24(seqs, f, lambda, b, quad)?;
    let names: Vec<&str> = seqs.iter().map(|s| s.name()).collect();
    let params = serde_json::json!({
        "seqs": names, "d": seqs.len(), "N": seqs.first().map(|s| s.len()), "weight": f,
        "lambda": lambda, "b": b, "tol": tol,
    });
    verify_identity("cor24", params, lhs, rhs, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy {
    /// Largest acceptable tail estimate.
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImproperSum {
    pub value: f64,
    pub tail_estimate: f64,
    /// Largest n = n₁+n₂ included.
    pub cutoff: usize,
}

/// Σ_{n,m≥1} g₁(m)g₂(n) f((n+m)/λ) truncated at n+m ≤ N.
///
/// The tail assumes |𝒢(n)| ≤ M·n beyond the table, with M the largest
/// |𝒢(n)|/n seen inside it.
pub fn improper_weighted_sum(
    g1: &ArithSeq,
    g2: &ArithSeq,
    f: &Weight,
    lambda: f64,
    policy: CutoffPolicy,
) -> Result<ImproperSum> {
    check_lambda(lambda)?;
    if f.is_compact() {
        return Err(invalid("improper sums need a weight with unbounded support"));
    }
    let counts = rep_counts(&[g1, g2])?;
    let n = counts.len();
    let mut acc = Compensated::new();
    let mut growth: f64 = 0.0;
    for (i, &c) in counts.iter().enumerate() {
        if c != 0.0 {
            acc.add(c * f.eval((i + 1) as f64 / lambda));
            growth = growth.max(c.abs() / (i + 1) as f64);
        }
    }
    let nf = n as f64;
    let tail = growth * f.scale().abs() * match f.kind() {
        crate::weight::WeightKind::Exponential { rate } => exp_linear_tail(rate / lambda, nf),
        crate::weight::WeightKind::Damped { rate, amplitude, .. } => {
            (1.0 + amplitude.abs()) * exp_linear_tail(rate / lambda, nf)
        }
        crate::weight::WeightKind::Power { s, .. } => lambda.powf(s) * nf.powf(2.0 - s) / (s - 2.0),
        crate::weight::WeightKind::Cesaro { .. } => 0.0,
    };
    if tail > policy.tol {
        return Err(Error::TruncationInsufficient { tail, tol: policy.tol });
    }
    Ok(ImproperSum {
        value: acc.value(),
        tail_estimate: tail,
        cutoff: n,
    })
}

/// Σ_{n>N} n·e^{−cn} ≤ e^{−cN}((N+1)/c + 1/c²).
fn exp_linear_tail(c: f64, n: f64) -> f64 {
    (-c * n).exp() * ((n + 1.0) / c + 1.0 / (c * c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_von_mangoldt;

    fn quad() -> Integrator {
        Integrator::default()
    }

    #[test]
    fn single_term_examples() {
        let d1 = ArithSeq::kronecker(20, 1).unwrap();
        let f = Weight::cesaro(1.0).unwrap();
        assert!((weighted_sum_2(&d1, &d1, &f, 10.0, 0.0, 1.0).unwrap() - 0.8).abs() < 1e-15);
        let r = rhs_prop22(&d1, &d1, &f, 10.0, 0.0, 1.0, &quad()).unwrap();
        assert!((r.value - 0.8).abs() < 1e-14, "{}", r.value);
        let f2 = Weight::cesaro(2.0).unwrap();
        let v = weighted_sum_d(&[&d1, &d1, &d1], &f2, 10.0, 1.0).unwrap();
        assert!((v - 0.245).abs() < 1e-15);
        let r = rhs_cor24(&[&d1, &d1, &d1], &f2, 10.0, 1.0, &quad()).unwrap();
        assert!((r.value - 0.245).abs() < 1e-14, "{}", r.value);
    }

    #[test]
    fn goldbach_lhs_small_lambda() {
        let lam = sieve_von_mangoldt(100).unwrap();
        let f = Weight::cesaro(1.0).unwrap();
        assert_eq!(weighted_sum_2(&lam, &lam, &f, 4.0, 0.0, 1.0).unwrap(), 0.0);
        let f2 = Weight::cesaro(2.0).unwrap();
        let counts = rep_counts(&[&lam, &lam]).unwrap();
        let direct: f64 = (1..20).map(|n| counts[n - 1] * (1.0 - n as f64 / 20.0).powi(2) / 2.0).sum();
        let v = weighted_sum_2(&lam, &lam, &f2, 20.0, 0.0, 1.0).unwrap();
        assert!((v - direct).abs() < 1e-13 * direct);
    }

    #[test]
    fn identity_holds_with_boundary_term() {
        let lam = sieve_von_mangoldt(200).unwrap();
        for k in [1.5, 3.0] {
            let f = Weight::cesaro(k).unwrap();
            for a in [0.0, 0.1] {
                let rep = verify_prop22(&lam, &lam, &f, 50.0, a, 1.0, 1e-8, &quad()).unwrap();
                assert!(rep.pass, "{rep:?}");
            }
        }
    }

    #[test]
    fn compact_form_agrees_with_general_path() {
        let lam = sieve_von_mangoldt(200).unwrap();
        let f = Weight::cesaro(2.5).unwrap();
        let g = rhs_prop22(&lam, &lam, &f, 80.0, 0.0, 1.0, &quad()).unwrap();
        let c = rhs_compact(&lam, &lam, &f, 80.0, 1.0, &quad()).unwrap();
        assert!((g.value - c.value).abs() <= 1e-12 * g.value.abs());
    }

    #[test]
    fn zero_weight_and_preconditions() {
        let lam = sieve_von_mangoldt(50).unwrap();
        let f = Weight::cesaro(3.0).unwrap().scaled(0.0);
        assert_eq!(rhs_prop22(&lam, &lam, &f, 40.0, 0.0, 1.0, &quad()).unwrap().value, 0.0);
        let f = Weight::cesaro(3.0).unwrap();
        assert!(matches!(
            weighted_sum_2(&lam, &lam, &f, 60.0, 0.0, 1.0),
            Err(Error::OutOfTable { .. })
        ));
        assert!(rhs_prop22(&lam, &lam, &f, 40.0, 0.0, 0.5, &quad()).is_err());
        let rough = Weight::cesaro(0.5).unwrap();
        assert!(rhs_prop22(&lam, &lam, &rough, 40.0, 0.0, 1.0, &quad()).is_err());
        assert!(verify_identity("x", Value::Null, 1.0, QuadEstimate::zero(), 0.0).is_err());
    }

    #[test]
    fn improper_exponential_factorizes() {
        let n = 3000;
        let lam = sieve_von_mangoldt(n).unwrap();
        let y = 0.02;
        let f = Weight::exponential(1.0).unwrap();
        let r = improper_weighted_sum(&lam, &lam, &f, 1.0 / y, CutoffPolicy { tol: 1e-10 }).unwrap();
        let single: f64 = (1..=n).map(|m| lam.get(m) * (-(m as f64) * y).exp()).sum();
        assert!((r.value - single * single).abs() < 1e-6 * r.value, "{} {}", r.value, single * single);
        let zero = ArithSeq::from_values("zero", vec![0.0; 100]).unwrap();
        let z = improper_weighted_sum(&zero, &zero, &f, 10.0, CutoffPolicy { tol: 1e-12 }).unwrap();
        assert_eq!(z.value, 0.0);
        let p = Weight::power(3.0, 1.0).unwrap();
        let small = sieve_von_mangoldt(100).unwrap();
        assert!(matches!(
            improper_weighted_sum(&small, &small, &p, 1.0, CutoffPolicy { tol: 1e-9 }),
            Err(Error::TruncationInsufficient { .. })
        ));
    }
}
