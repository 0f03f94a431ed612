//! Power series, Dirichlet series, and asymptotic ratios of Goldbach counts.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{rep_counts, sieve_von_mangoldt, ArithSeq};
use crate::error::{invalid, Error, Result};
use crate::explicit::{Cx, Zeros};
use crate::special::{expm1_complex, ln_gamma};
use crate::stepconv::ConvKernel;
use crate::sum::{Compensated, CompensatedComplex};
use crate::zeros::ZeroTable;

/// ψ(x) < 1.03883·x for all x > 0.
const PSI_RATIO_BOUND: f64 = 1.03883;

/// Distance from a pole below which a warning is attached.
const POLE_WARNING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncation {
    #[serde(rename = "N_sum")]
    pub n_sum: usize,
    #[serde(rename = "K_zeros")]
    pub k_zeros: usize,
    #[serde(rename = "U_integral")]
    pub u_integral: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesComparison {
    pub series: String,
    pub params: serde_json::Value,
    pub exact_partial: Cx,
    pub explicit_value: Cx,
    pub truncation: Truncation,
    /// |exact_partial − explicit_value|.
    pub residual: f64,
    /// Bound on the terms n > N left out of `exact_partial`.
    pub partial_tail_bound: f64,
    /// (Σ_{n≤N} Λ(n)e^{−ny})², exponential series only.
    pub factorized: Option<Cx>,
    /// s(s+1)∫₁^U u^{−s−2}(ψ*ψ)(u) du, Dirichlet series only.
    pub integral_route: Option<Cx>,
    pub integral_tail_bound: Option<f64>,
    pub notes: Vec<String>,
}

fn goldbach_counts(n: usize) -> Result<(ArithSeq, Vec<f64>)> {
    let lam = sieve_von_mangoldt(n)?;
    let counts = rep_counts(&[&lam, &lam])?;
    Ok((lam, counts))
}

/// Σ_{n≤N} R_G(n)e^{−ny} against 1/y² − 2Σ_ρ y^{−ρ−1}Γ(ρ) + (Σ_ρ y^{−ρ}Γ(ρ))².
pub fn goldbach_exp_series(y: f64, n: usize, zeros: &ZeroTable) -> Result<SeriesComparison> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(invalid(format!("y = {y} must be positive")));
    }
    if n < 4 {
        return Err(invalid(format!("N = {n} must be at least 4")));
    }
    let (lam, counts) = goldbach_counts(n)?;
    let mut exact = Compensated::new();
    let mut single = Compensated::new();
    for i in 1..=n {
        let e = (-(i as f64) * y).exp();
        exact.add(counts[i - 1] * e);
        single.add(lam.get(i) * e);
    }
    let head = exact.value();
    let factorized = single.value() * single.value();

    // R_G(n) ≤ ψ(n)·log n < 1.03883·n·log n. Past m·y > 4 successive terms
    // shrink by at least e^{−y/2}, which bounds what the loop leaves out.
    let mut tail = Compensated::new();
    let mut m = n + 1;
    let partial_tail_bound = loop {
        let mf = m as f64;
        let t = PSI_RATIO_BOUND * mf * mf.ln() * (-mf * y).exp();
        tail.add(t);
        if mf * y > 4.0 && t <= 1e-20 * tail.value() {
            break tail.value() + t / -(-y / 2.0).exp_m1();
        }
        m += 1;
    };
    if partial_tail_bound > 1e-10 * head.abs() {
        return Err(Error::TruncationInsufficient {
            tail: partial_tail_bound,
            tol: 1e-10 * head.abs(),
        });
    }

    let z = Zeros::new(zeros)?;
    let ly = y.ln();
    let (s1, _) = z.single(|i| Ok((-(z.rho[i] + 1.0) * ly + z.lg[i]).exp()))?;
    let (s0, _) = z.single(|i| Ok((-z.rho[i] * ly + z.lg[i]).exp()))?;
    let explicit = Complex64::new(1.0 / (y * y), 0.0) - s1 * 2.0 + s0 * s0;
    let exact_c = Complex64::new(head, 0.0);
    Ok(SeriesComparison {
        series: "goldbach_exp".into(),
        params: serde_json::json!({ "y": y }),
        exact_partial: exact_c.into(),
        explicit_value: explicit.into(),
        truncation: Truncation {
            n_sum: n,
            k_zeros: zeros.len(),
            u_integral: None,
        },
        residual: (exact_c - explicit).norm(),
        partial_tail_bound,
        factorized: Some(Cx::from(factorized)),
        integral_route: None,
        integral_tail_bound: None,
        notes: Vec::new(),
    })
}

/// a^{−s} − b^{−s} for 0 < a < b, without cancellation.
fn power_difference(a: f64, b: f64, s: Complex64) -> Complex64 {
    -(-s * a.ln()).exp() * expm1_complex(-s * (b / a).ln())
}

/// Φ(s) = Σ R_G(n)n^{−s} by the partial sum, by the (ψ*ψ)-integral and by
/// the expansion over zeros.
pub fn dirichlet_phi(s: Complex64, n: usize, u: usize, zeros: &ZeroTable) -> Result<SeriesComparison> {
    if !(s.re > 2.0) {
        return Err(Error::Domain(format!("direct Dirichlet sums need Re s > 2, got {s}")));
    }
    if n < 4 || u < 4 {
        return Err(invalid(format!("N = {n} and U = {u} must be at least 4")));
    }
    let (_, counts) = goldbach_counts(n.max(u))?;
    let sigma = s.re;

    let mut partial = CompensatedComplex::new();
    for i in 1..=n {
        let c = counts[i - 1];
        if c != 0.0 {
            partial.add((-s * (i as f64).ln()).exp() * c);
        }
    }
    // Σ_{n>N} n^{1−σ}·1.03883·log n ≤ 1.03883·∫_N^∞ u^{1−σ} log u du once the integrand decreases.
    let nf = n as f64;
    let partial_tail_bound = PSI_RATIO_BOUND * nf.powf(2.0 - sigma) * (nf.ln() / (sigma - 2.0) + 1.0 / (sigma - 2.0).powi(2));

    // On [m, m+1] the kernel is A·u − B with A = Σ_{j≤m} R(j), B = Σ_{j≤m} j·R(j).
    let mut integral = CompensatedComplex::new();
    let (mut a, mut b) = (Compensated::new(), Compensated::new());
    for m in 1..u {
        let c = counts[m - 1];
        a.add(c);
        b.add(m as f64 * c);
        let (av, bv) = (a.value(), b.value());
        if av == 0.0 && bv == 0.0 {
            continue;
        }
        let lo = m as f64;
        let hi = lo + 1.0;
        integral.add((s + 1.0) * av * power_difference(lo, hi, s) - s * bv * power_difference(lo, hi, s + 1.0));
    }
    let integral_value = integral.value();
    // (ψ*ψ)(u) ≤ 1.03883²u³/6.
    let uf = u as f64;
    let integral_tail_bound = (s * (s + 1.0)).norm() * PSI_RATIO_BOUND.powi(2) * uf.powf(2.0 - sigma) / (6.0 * (sigma - 2.0));

    let z = Zeros::new(zeros)?;
    let ss1 = s * (s + 1.0);
    let main = ss1 / (6.0 * (s - 2.0));
    let (single, _) = z.single(|i| {
        let r = z.rho[i];
        Ok(ss1 / (r * (r + 1.0) * (r + 2.0) * (s - r - 1.0)))
    })?;
    let double = z.double(|i, j| {
        let sum = z.rho[i] + z.rho[j];
        Ok((z.lg[i] + z.lg[j] - ln_gamma(sum + 2.0)?).exp() * ss1 / (s - sum))
    })?;
    let expansion = main - single * 2.0 + double;

    let mut notes = Vec::new();
    if (s - 2.0).norm() < POLE_WARNING {
        notes.push(format!("s = {s} lies near the pole at 2"));
    }
    for &r in &z.rho {
        if (s - r - 1.0).norm() < POLE_WARNING {
            notes.push(format!("s = {s} lies near the pole at 1 + {r}"));
        }
    }
    let exact = partial.value();
    Ok(SeriesComparison {
        series: "dirichlet_phi".into(),
        params: serde_json::json!({ "s": Cx::from(s) }),
        exact_partial: exact.into(),
        explicit_value: expansion.into(),
        truncation: Truncation {
            n_sum: n,
            k_zeros: zeros.len(),
            u_integral: Some(u),
        },
        residual: (exact - expansion).norm(),
        partial_tail_bound,
        factorized: None,
        integral_route: Some(integral_value.into()),
        integral_tail_bound: Some(integral_tail_bound),
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioRow {
    pub x: f64,
    /// Σ_{n≤x} R_G(n)/(x²/2).
    pub ratio_quadratic: f64,
    /// (ψ*ψ)(x)/(x³/6).
    pub ratio_cubic: f64,
}

pub fn asymptotic_ratio(xs: &[f64]) -> Result<Vec<RatioRow>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    if xs.iter().any(|&x| !(x >= 1.0 && x.is_finite())) {
        return Err(invalid("ratio grid points must be finite and at least 1"));
    }
    let top = xs.iter().copied().fold(0.0, f64::max).floor() as usize;
    let (_, counts) = goldbach_counts(top.max(4))?;
    let mut prefix = Vec::with_capacity(counts.len());
    let mut acc = Compensated::new();
    for &c in &counts {
        acc.add(c);
        prefix.push(acc.value());
    }
    let kernel = ConvKernel::from_counts(2, counts)?;
    xs.iter()
        .map(|&x| {
            let sum = prefix[x.floor() as usize - 1];
            Ok(RatioRow {
                x,
                ratio_quadratic: sum / (x * x / 2.0),
                ratio_cubic: kernel.eval(x)? / (x * x * x / 6.0),
            })
        })
        .collect()
}

/// CSV `x,ratio_quadratic,ratio_cubic`.
pub fn write_ratio_csv<W: Write>(mut out: W, rows: &[RatioRow]) -> Result<()> {
    writeln!(out, "x,ratio_quadratic,ratio_cubic")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{}",
            crate::output::fmt_sig(r.x),
            crate::output::fmt_sig(r.ratio_quadratic),
            crate::output::fmt_sig(r.ratio_cubic)
        )?;
    }
    Ok(())
}
