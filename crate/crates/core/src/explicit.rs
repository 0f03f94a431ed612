//! Truncated explicit formulas over zeta zeros.
//!
//! Zero sums run over ρ = 1/2 ± iγ_j for the ordinates in a [`ZeroTable`];
//! double sums cover all four sign combinations. Every Gamma ratio is
//! assembled in log form and exponentiated once, so terms like
//! Γ(ρ)/Γ(ρ+k+2) stay representable for large γ. Outputs keep their
//! imaginary parts, which for real parameters measure how well the
//! conjugate pairs cancel.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::arith::cesaro_average_complex;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{EndCap, Integrator, QuadValue};
use crate::special::{self, ln_gamma, zeta_real, ZETA_LOG_DERIVATIVE_AT_ZERO};
use crate::sum::{Compensated, CompensatedComplex};
use crate::weight::{Weight, WeightKind};
use crate::zeros::ZeroTable;

/// A complex number as it appears in JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<Cx> for Complex64 {
    fn from(z: Cx) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<f64> for Cx {
    fn from(x: f64) -> Self {
        Self { re: x, im: 0.0 }
    }
}

/// How M0, M1, M2 combine into the explicit value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Combination {
    /// M0 − 2·M1 + M2
    Standard,
    /// M0 + M1 + M2
    Additive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplicitTerms {
    pub formula: String,
    pub combination: Combination,
    pub params: Value,
    pub m0: Cx,
    pub m1: Cx,
    pub m2: Cx,
    pub extra: BTreeMap<String, Cx>,
    pub explicit_value: Cx,
    pub exact: Option<Cx>,
    pub residual: Option<Cx>,
    pub truncation_k: usize,
    pub n_max: Option<usize>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl ExplicitTerms {
    fn new(formula: &str, combination: Combination, params: Value, m: [Complex64; 3], k: usize) -> Self {
        let mut t = Self {
            formula: formula.to_string(),
            combination,
            params,
            m0: m[0].into(),
            m1: m[1].into(),
            m2: m[2].into(),
            extra: BTreeMap::new(),
            explicit_value: Cx::from(0.0),
            exact: None,
            residual: None,
            truncation_k: k,
            n_max: None,
            diagnostics: BTreeMap::new(),
        };
        t.refresh();
        t
    }

    fn refresh(&mut self) {
        let (m0, m1, m2): (Complex64, Complex64, Complex64) = (self.m0.into(), self.m1.into(), self.m2.into());
        let mut v = match self.combination {
            Combination::Standard => m0 - m1 * 2.0 + m2,
            Combination::Additive => m0 + m1 + m2,
        };
        for e in self.extra.values() {
            v += Complex64::from(*e);
        }
        self.explicit_value = v.into();
        self.residual = self.exact.map(|x| (Complex64::from(x) - v).into());
    }

    /// Attaches the exact value; the residual becomes exact − explicit.
    pub fn with_exact(mut self, exact: Complex64) -> Self {
        self.exact = Some(exact.into());
        self.refresh();
        self
    }

    /// Adds named terms to the explicit value.
    pub fn with_extra(mut self, extra: BTreeMap<String, Complex64>) -> Self {
        for (k, v) in extra {
            self.extra.insert(k, v.into());
        }
        self.refresh();
        self
    }

    pub fn explicit(&self) -> Complex64 {
        self.explicit_value.into()
    }

    pub fn residual_value(&self) -> Option<Complex64> {
        self.residual.map(Into::into)
    }

    /// Largest |Im|/(1+|Re|) over the reported values.
    pub fn max_imag_ratio(&self) -> f64 {
        let mut vals = vec![self.m0, self.m1, self.m2, self.explicit_value];
        vals.extend(self.extra.values().copied());
        vals.iter().map(|z| z.im.abs() / (1.0 + z.re.abs())).fold(0.0, f64::max)
    }
}

/// Zeros with lnΓ(ρ) precomputed, in the order ρ₁, ρ̄₁, ρ₂, ρ̄₂, …
pub(crate) struct Zeros {
    pub(crate) rho: Vec<Complex64>,
    pub(crate) lg: Vec<Complex64>,
}

impl Zeros {
    pub(crate) fn new(table: &ZeroTable) -> Result<Self> {
        let rho = table.rhos();
        let lg = rho.iter().map(|&r| ln_gamma(r)).collect::<Result<Vec<_>>>()?;
        Ok(Self { rho, lg })
    }

    /// Σ_ρ term(i) and |term(ρ_K) + term(ρ̄_K)|.
    pub(crate) fn single(&self, term: impl Fn(usize) -> Result<Complex64>) -> Result<(Complex64, f64)> {
        let mut acc = CompensatedComplex::new();
        let mut last = 0.0;
        for pair in 0..self.rho.len() / 2 {
            let t = term(2 * pair)? + term(2 * pair + 1)?;
            acc.add(t);
            last = t.norm();
        }
        Ok((acc.value(), last))
    }

    /// Σ_{ρ₁}Σ_{ρ₂} term(i, j); rows in parallel, fixed-order reduction.
    pub(crate) fn double(&self, term: impl Fn(usize, usize) -> Result<Complex64> + Sync) -> Result<Complex64> {
        let n = self.rho.len();
        let rows: Vec<Result<Complex64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = CompensatedComplex::new();
                for j in 0..n {
                    acc.add(term(i, j)?);
                }
                Ok(acc.value())
            })
            .collect();
        let mut acc = CompensatedComplex::new();
        for r in rows {
            acc.add(r?);
        }
        Ok(acc.value())
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_above(name: &str, v: f64, bound: f64) -> Result<()> {
    if v > bound && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {v} must exceed {bound}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZLambda {
    pub value: Cx,
    /// |term(ρ_K) + term(ρ̄_K)| for the last pair.
    pub last_pair: f64,
    /// |Z|·|Γ(w+1)| / (λ^{|u|+1} + 2^{|u|} log(|w|+2)), u = Re w; None at poles of Γ(w+1).
    pub growth_ratio: Option<f64>,
    pub truncation_k: usize,
}

/// Z_λ(w) = Σ_ρ λ^ρ Γ(ρ)/Γ(ρ+w+1).
pub fn z_lambda(lambda: f64, w: Complex64, zeros: &ZeroTable) -> Result<ZLambda> {
    if !(lambda >= 4.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda = {lambda} must be at least 4")));
    }
    let z = Zeros::new(zeros)?;
    let ll = lambda.ln();
    let (value, last_pair) = z.single(|i| {
        let r = z.rho[i];
        Ok((r * ll + z.lg[i] - ln_gamma(r + w + 1.0)?).exp())
    })?;
    let u = w.re.abs();
    let growth_ratio = ln_gamma(w + 1.0)
        .ok()
        .map(|lg| value.norm() * lg.re.exp() / (lambda.powf(u + 1.0) + 2f64.powf(u) * (w.norm() + 2.0).ln()));
    Ok(ZLambda {
        value: value.into(),
        last_pair,
        growth_ratio,
        truncation_k: zeros.len(),
    })
}

/// M_G(x) = x³/6 − 2Σ x^{ρ+2}/(ρ(ρ+1)(ρ+2)) + ΣΣ x^{ρ₁+ρ₂+1}Γ(ρ₁)Γ(ρ₂)/Γ(ρ₁+ρ₂+2).
pub fn m_goldbach(x: f64, zeros: &ZeroTable) -> Result<ExplicitTerms> {
    check_above("x", x, 4.0)?;
    let z = Zeros::new(zeros)?;
    let lx = x.ln();
    let (m1, last) = z.single(|i| {
        let r = z.rho[i];
        Ok(((r + 2.0) * lx).exp() / (r * (r + 1.0) * (r + 2.0)))
    })?;
    let m2 = z.double(|i, j| {
        let s = z.rho[i] + z.rho[j];
        Ok(((s + 1.0) * lx + z.lg[i] + z.lg[j] - ln_gamma(s + 2.0)?).exp())
    })?;
    let mut t = ExplicitTerms::new(
        "goldbach_cesaro1",
        Combination::Standard,
        serde_json::json!({ "x": x }),
        [c(x * x * x / 6.0), m1, m2],
        zeros.len(),
    );
    t.diagnostics.insert("last_pair_m1".into(), last);
    Ok(t)
}

/// Cesàro weight terms M0, M1, M2 for order k, with the residual 𝔈(λ,k)
/// when the representation counts are supplied.
pub fn cesaro_explicit(lambda: f64, k: Complex64, zeros: &ZeroTable, counts: Option<&[f64]>) -> Result<ExplicitTerms> {
    check_above("lambda", lambda, 4.0)?;
    if !(k.re > 0.0) {
        return Err(Error::Domain(format!("Cesaro order needs Re k > 0, got {k}")));
    }
    let z = Zeros::new(zeros)?;
    let ll = lambda.ln();
    let m0 = (2.0 * ll - ln_gamma(k + 3.0)?).exp();
    let (m1, last) = z.single(|i| {
        let r = z.rho[i];
        Ok(((r + 1.0) * ll + z.lg[i] - ln_gamma(r + k + 2.0)?).exp())
    })?;
    let m2 = z.double(|i, j| {
        let s = z.rho[i] + z.rho[j];
        Ok((s * ll + z.lg[i] + z.lg[j] - ln_gamma(s + k + 1.0)?).exp())
    })?;
    let params = serde_json::json!({ "lambda": lambda, "k": Cx::from(k) });
    let mut t = ExplicitTerms::new("cesaro", Combination::Standard, params, [m0, m1, m2], zeros.len());
    t.diagnostics.insert("last_pair_m1".into(), last);
    if let Some(counts) = counts {
        let ck = cesaro_average_complex(counts, lambda, k)?;
        t = t.with_exact(ck * (-k * ll).exp());
    }
    Ok(t)
}

/// Closed form of ∫_lo^hi w^α f^{(j)}(w) dw when one is available.
pub fn derivative_moment_closed(f: &Weight, j: usize, alpha: Complex64, lo: f64, hi: f64) -> Option<Complex64> {
    let (s_lo, s_hi) = f.support();
    let a1 = alpha + 1.0;
    let scale = f.scale();
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    match f.kind() {
        WeightKind::Cesaro { k } => {
            if !(lo <= s_lo && hi >= s_hi) || alpha.re <= -1.0 {
                return None;
            }
            let e = k - j as f64;
            if special::rgamma(e + 1.0) == 0.0 {
                return Some(c(0.0));
            }
            if e <= -1.0 {
                return None;
            }
            // (−1)^j/Γ(k+1−j)·B(α+1, k−j+1) = (−1)^j Γ(α+1)/Γ(α+k−j+2)
            let v = (ln_gamma(a1).ok()? - ln_gamma(alpha + e + 2.0).ok()?).exp();
            Some(v * sign * scale)
        }
        WeightKind::Exponential { rate } => {
            if !(lo <= s_lo && hi.is_infinite()) || alpha.re <= -1.0 {
                return None;
            }
            let v = (ln_gamma(a1).ok()? - a1 * rate.ln()).exp();
            Some(v * (-rate).powi(j as i32) * scale)
        }
        WeightKind::Damped { rate, amplitude, freq } => {
            if !(lo <= s_lo && hi.is_infinite()) || alpha.re <= -1.0 {
                return None;
            }
            let lg = ln_gamma(a1).ok()?;
            let base = (lg - a1 * rate.ln()).exp() * (-rate).powi(j as i32);
            let zp = Complex64::new(-rate, freq);
            let osc = |z: Complex64| z.powi(j as i32) * (lg - a1 * (-z).ln()).exp();
            let v = base + (osc(zp) + osc(zp.conj())) * (0.5 * amplitude);
            Some(v * scale)
        }
        WeightKind::Power { s, lower } => {
            let from = lo.max(lower);
            if !(hi > from) {
                return Some(c(0.0));
            }
            let beta = alpha - s - j as f64;
            let coef = (0..j).map(|i| -s - i as f64).product::<f64>() * scale;
            let p1 = beta + 1.0;
            let upper = if hi.is_infinite() {
                if p1.re >= 0.0 {
                    return None;
                }
                c(0.0)
            } else {
                (p1 * hi.ln()).exp()
            };
            Some((upper - (p1 * from.ln()).exp()) / p1 * coef)
        }
    }
}

/// ∫_lo^hi w^α f^{(j)}(w) dw by quadrature over a finite interval.
pub fn derivative_moment_quad(
    f: &Weight,
    j: usize,
    alpha: Complex64,
    lo: f64,
    hi: f64,
    quad: &Integrator,
) -> Result<Complex64> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(invalid("quadrature moments need a finite interval"));
    }
    let (s_lo, s_hi) = f.support();
    let (a, b) = (lo.max(s_lo), hi.min(s_hi));
    if !(b > a) {
        return Ok(c(0.0));
    }
    let h = |w: f64| (alpha * w.ln()).exp();
    let rough_left = a == 0.0 && !(alpha.im == 0.0 && alpha.re >= 0.0 && alpha.re == alpha.re.floor());
    // ∫₀^inner w^α f^{(j)} ≈ f^{(j)}(inner/2)·inner^{α+1}/(α+1).
    let cap = |inner: f64, _end: f64| ((alpha + 1.0) * inner.ln()).exp() / (alpha + 1.0) * f.derivative(j, 0.5 * inner);
    let left: Option<EndCap<'_, Complex64>> = if rough_left {
        if alpha.re <= -1.0 {
            return Err(Error::Domain(format!("w^{alpha} is not integrable at 0")));
        }
        Some(&cap)
    } else {
        None
    };
    let phase = alpha.im.abs() * a.max(f64::MIN_POSITIVE).ln().abs().max(b.ln().abs());
    let quad = quad.for_phase(phase);
    Ok(f.integrate_derivative(j, a, b, &h, std::iter::empty(), left, &quad)?.value)
}

/// ∫_I w^α f^{(j)}(w) dw: closed form when available, else quadrature
/// (reducing an infinite interval to the full-support closed form).
pub fn derivative_moment(f: &Weight, j: usize, alpha: Complex64, lo: f64, hi: f64, quad: &Integrator) -> Result<Complex64> {
    if f.scale() == 0.0 {
        return Ok(c(0.0));
    }
    if let Some(v) = derivative_moment_closed(f, j, alpha, lo, hi) {
        return Ok(v);
    }
    if hi.is_finite() {
        return derivative_moment_quad(f, j, alpha, lo, hi, quad);
    }
    let s_lo = f.support().0;
    let full = derivative_moment_closed(f, j, alpha, s_lo, hi)
        .ok_or_else(|| Error::NumericFailure(format!("no evaluation scheme for the moment {alpha} on [{lo}, inf)")))?;
    Ok(full - derivative_moment_quad(f, j, alpha, s_lo, lo, quad)?)
}

/// 𝔐₀, 𝔐₁, 𝔐₂ for a general weight on I = [lo, hi].
pub fn general_weight_terms(f: &Weight, lambda: f64, interval: (f64, f64), zeros: &ZeroTable, quad: &Integrator) -> Result<ExplicitTerms> {
    check_above("lambda", lambda, 0.0)?;
    let (lo, hi) = interval;
    if !(hi > lo) {
        return Err(invalid(format!("empty interval [{lo}, {hi}]")));
    }
    let z = Zeros::new(zeros)?;
    let ll = lambda.ln();
    let m0 = derivative_moment(f, 0, c(1.0), lo, hi, quad)? * lambda * lambda;
    let (m1, last) = z.single(|i| {
        let r = z.rho[i];
        Ok(((r + 1.0) * ll).exp() / r * derivative_moment(f, 0, r, lo, hi, quad)?)
    })?;
    let m2 = z.double(|i, j| {
        let s = z.rho[i] + z.rho[j];
        let coef = (s * ll + z.lg[i] + z.lg[j] - ln_gamma(s)?).exp();
        Ok(coef * derivative_moment(f, 0, s - 1.0, lo, hi, quad)?)
    })?;
    let params = serde_json::json!({ "lambda": lambda, "weight": f, "interval": [lo, hi] });
    let mut t = ExplicitTerms::new("general_weight", Combination::Standard, params, [m0, m1, m2], zeros.len());
    t.diagnostics.insert("last_pair_m1".into(), last);
    Ok(t)
}

/// The two additional terms carrying (ζ′/ζ)(0) = log 2π.
pub fn extra_terms_zeta0(
    lambda: f64,
    f: &Weight,
    interval: (f64, f64),
    zeros: &ZeroTable,
    quad: &Integrator,
) -> Result<BTreeMap<String, Complex64>> {
    check_above("lambda", lambda, 0.0)?;
    let (lo, hi) = interval;
    let c0 = ZETA_LOG_DERIVATIVE_AT_ZERO;
    let main = derivative_moment(f, 0, c(0.0), lo, hi, quad)? * (-2.0 * c0 * lambda);
    let z = Zeros::new(zeros)?;
    let ll = lambda.ln();
    let (zs, _) = z.single(|i| {
        let r = z.rho[i];
        Ok((r * ll).exp() * derivative_moment(f, 0, r - 1.0, lo, hi, quad)?)
    })?;
    let mut out = BTreeMap::new();
    out.insert("zeta0_main".to_string(), main);
    out.insert("zeta0_zeros".to_string(), zs * (2.0 * c0));
    Ok(out)
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Coefficients Σ_{m: ℓm ≥ k} C(2,m)(−1)^m C(ℓm,k)·k! for k = 1..2ℓ.
fn oscillatory_coefficients(ell: u64) -> Vec<f64> {
    (1..=2 * ell)
        .map(|k| {
            (1..=2u64)
                .filter(|&m| ell * m >= k)
                .map(|m| binom(2, m) * if m % 2 == 0 { 1.0 } else { -1.0 } * binom(ell * m, k) * factorial(k))
                .sum()
        })
        .collect()
}

/// Σ_{n>N} n^{−p} for p > 1 (all of ζ(p) when N = 0).
fn power_tail(n: usize, p: f64) -> f64 {
    if n == 0 {
        zeta_real(p).unwrap_or(f64::INFINITY)
    } else {
        (n as f64).powf(1.0 - p) / (p - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorySum {
    /// Σ_{n≤N}Σ_mΣ_k C(2,m)(−1)^m C(ℓm,k) k! sin(a+kπ/2)/a^{k+1}, a = 2πn x^{1/ℓ}.
    pub value: f64,
    /// Bound on the omitted n > N.
    pub tail_bound: f64,
}

pub fn oscillatory_sum(x: f64, ell: u32, n_max: usize) -> OscillatorySum {
    let e = ell as u64;
    let coefs = oscillatory_coefficients(e);
    let root = x.powf(1.0 / ell as f64);
    let mut acc = Compensated::new();
    for n in 1..=n_max {
        let a = 2.0 * PI * n as f64 * root;
        let (s, co) = a.sin_cos();
        let mut inv = 1.0 / a;
        for (i, coef) in coefs.iter().enumerate() {
            let k = i + 1;
            inv /= a;
            // sin(a + kπ/2) cycles through cos, −sin, −cos, sin.
            let shifted = match k % 4 {
                1 => co,
                2 => -s,
                3 => -co,
                _ => s,
            };
            acc.add(coef * shifted * inv);
        }
    }
    let tail_bound = coefs
        .iter()
        .enumerate()
        .map(|(i, coef)| {
            let k = (i + 1) as f64;
            coef.abs() * (2.0 * PI * root).powf(-(k + 1.0)) * power_tail(n_max, k + 1.0)
        })
        .sum();
    OscillatorySum {
        value: acc.value(),
        tail_bound,
    }
}

/// sin(nπ/2), exact.
fn sin_half_pi(n: u32) -> f64 {
    [0.0, 1.0, 0.0, -1.0][(n % 4) as usize]
}

/// Σ_nΣ_m C(2,m)(−1)^{m+1} sin(ℓmπ/2)/a^{ℓm+1}, truncated at n_max.
pub fn boundary_sine_sum(x: f64, ell: u32, n_max: usize) -> f64 {
    let root = x.powf(1.0 / ell as f64);
    let mut acc = Compensated::new();
    for n in 1..=n_max {
        let a = 2.0 * PI * n as f64 * root;
        for m in 1..=2u32 {
            let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
            let lm = ell * m;
            acc.add(binom(2, m as u64) * sign * sin_half_pi(lm) / a.powi(lm as i32 + 1));
        }
    }
    acc.value()
}

/// sin(ℓπ/2)ζ(ℓ+1)/(2^ℓ π^{ℓ+1} x^{1+1/ℓ}).
pub fn boundary_sine_closed_form(x: f64, ell: u32) -> Result<f64> {
    let l = ell as f64;
    Ok(sin_half_pi(ell) * zeta_real(l + 1.0)? / (2f64.powf(l) * PI.powf(l + 1.0) * x.powf(1.0 + 1.0 / l)))
}

/// Terms 𝔐₀^ℓ, 𝔐₁^ℓ, 𝔐₂^ℓ of (ψ*R_ℓ)(x).
pub fn psi_rell_terms(x: f64, ell: u32, zeros: &ZeroTable, n_max: usize) -> Result<ExplicitTerms> {
    check_above("x", x, 2.0)?;
    if ell < 2 {
        return Err(invalid(format!("ell = {ell} must be at least 2")));
    }
    let l = ell as f64;
    let inv = 1.0 / l;
    let m0 = l * l * x.powf(2.0 + inv) / (2.0 * l * l + 3.0 * l + 1.0);
    let z = Zeros::new(zeros)?;
    let lx = x.ln();
    let (s1, last) = z.single(|i| {
        let r = z.rho[i];
        Ok(((r + inv + 1.0) * lx + z.lg[i] - ln_gamma(r + 2.0 + inv)?).exp())
    })?;
    let m1 = s1 * (-special::gamma(inv)? / l);
    let osc = oscillatory_sum(x, ell, n_max);
    let scale = x.powf(2.0 + inv);
    // The fractional part of (x−t)^{1/ℓ} averages 1/2, so ∫₀ˣ t/2 dt = x²/4.
    let m2 = -x * x / 4.0 + scale * osc.value;
    let params = serde_json::json!({ "x": x, "ell": ell });
    let mut t = ExplicitTerms::new(
        "psi_rell",
        Combination::Additive,
        params,
        [c(m0), m1, c(m2)],
        zeros.len(),
    );
    t.n_max = Some(n_max);
    t.diagnostics.insert("last_pair_m1".into(), last);
    t.diagnostics.insert("m2_oscillatory".into(), scale * osc.value);
    t.diagnostics.insert("m2_oscillatory_tail_bound".into(), scale * osc.tail_bound);
    Ok(t)
}

/// 𝔍(α; I) = ∫_I w^α f″(w) dw.
pub fn frak_i(alpha: Complex64, f: &Weight, interval: (f64, f64), quad: &Integrator) -> Result<Complex64> {
    let (lo, hi) = interval;
    if !(hi >= lo) {
        return Err(invalid(format!("empty interval [{lo}, {hi}]")));
    }
    if f.scale() == 0.0 || hi == lo {
        return Ok(c(0.0));
    }
    if hi.is_infinite() {
        return derivative_moment(f, 2, alpha, lo, hi, quad);
    }
    derivative_moment_quad(f, 2, alpha, lo, hi, quad)
}

/// Up to 16 complex values integrated together.
#[derive(Debug, Clone, Copy, Default)]
struct Pack([Complex64; 16]);

impl std::ops::Add for Pack {
    type Output = Pack;
    fn add(mut self, o: Pack) -> Pack {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
        self
    }
}

impl std::ops::Sub for Pack {
    type Output = Pack;
    fn sub(mut self, o: Pack) -> Pack {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a -= b;
        }
        self
    }
}

impl std::ops::Mul<f64> for Pack {
    type Output = Pack;
    fn mul(mut self, s: f64) -> Pack {
        for a in self.0.iter_mut() {
            *a *= s;
        }
        self
    }
}

impl QuadValue for Pack {
    fn magnitude(self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Terms of the weighted ψ*R_ℓ expansion on I = [2/λ, b].
///
/// m0 holds the x^{2+1/ℓ} term, m1 the zero sum, m2 the −λ𝔍(2)/4 term plus the
/// oscillatory series (each also listed in the diagnostics).
#[allow(clippy::too_many_arguments)]
pub fn hl_corollary_eval(
    f: &Weight,
    lambda: f64,
    b: f64,
    ell: u32,
    zeros: &ZeroTable,
    n_max: usize,
    lhs: Option<f64>,
    quad: &Integrator,
) -> Result<ExplicitTerms> {
    check_above("lambda", lambda, 2.0)?;
    if !(2..=8).contains(&ell) {
        return Err(invalid(format!("ell = {ell} must lie in 2..=8")));
    }
    if !f.is_compact() {
        return Err(invalid("the weighted expansion needs a compactly supported weight"));
    }
    let lo = 2.0 / lambda;
    if !(b > lo) {
        return Err(invalid(format!("b = {b} must exceed 2/lambda = {lo}")));
    }
    let hi = b.min(f.support().1);
    let l = ell as f64;
    let inv = 1.0 / l;
    let t0 = frak_i(c(2.0 + inv), f, (lo, hi), quad)? * (l * l * lambda.powf(1.0 + inv) / (2.0 * l * l + 3.0 * l + 1.0));
    let t_half = frak_i(c(2.0), f, (lo, hi), quad)?.re * (-0.25 * lambda);

    let z = Zeros::new(zeros)?;
    let ll = lambda.ln();
    let (s1, last) = z.single(|i| {
        let r = z.rho[i];
        let coef = ((r + inv) * ll + z.lg[i] - ln_gamma(r + 2.0 + inv)?).exp();
        Ok(coef * frak_i(r + 1.0 + inv, f, (lo, hi), quad)?)
    })?;
    let t1 = s1 * (-special::gamma(inv)? / l);

    let coefs = oscillatory_coefficients(ell as u64);
    let kmax = coefs.len();
    let u_lo = (lambda * lo).powf(inv);
    let u_hi = (lambda * hi).powf(inv);
    let mut osc = Compensated::new();
    for n in 1..=n_max {
        let freq = 2.0 * PI * n as f64;
        // Half-period breakpoints of sin(2πn(λw)^{1/ℓ}).
        let j0 = (2.0 * n as f64 * u_lo).ceil() as usize;
        let j1 = (2.0 * n as f64 * u_hi).floor() as usize;
        let bps: Vec<f64> = (j0..=j1).map(|j| (j as f64 / (2.0 * n as f64)).powi(ell as i32) / lambda).collect();
        let h = |w: f64| {
            let u = (lambda * w).powf(inv);
            let phase = Complex64::from_polar(1.0, freq * u);
            let step = w.powf(-inv);
            let mut p = Pack::default();
            let mut wp = w * w;
            for slot in p.0.iter_mut().take(kmax) {
                wp *= step;
                *slot = phase * wp;
            }
            p
        };
        let r = f.integrate_derivative(2, lo, hi, &h, bps, None, &quad.for_phase(freq * u_hi))?;
        for (i, coef) in coefs.iter().enumerate() {
            let k = i + 1;
            // Im(i^k · ∫ f″ w^{2−k/ℓ} e^{iθ}) = ∫ f″ w^{2−k/ℓ} sin(θ + kπ/2).
            let val = (Complex64::i().powi(k as i32) * r.value.0[i]).im;
            osc.add(coef * lambda.powf(1.0 - k as f64 * inv) / freq.powi(k as i32 + 1) * val);
        }
    }
    let t_osc = osc.value();

    // |∫ f″ w^p S| ≤ ∫ |f″| w^p with p = 2 − k/ℓ.
    let mut tail = 0.0;
    for (i, coef) in coefs.iter().enumerate() {
        let k = (i + 1) as f64;
        let p = 2.0 - k * inv;
        let abs_f2 = |w: f64| f.derivative(2, w).abs() * w.powf(p);
        let pts = [lo, hi];
        let mass = quad.integrate(&abs_f2, &pts, Default::default()).map(|r| r.value).unwrap_or(f64::INFINITY);
        tail += coef.abs() * lambda.powf(1.0 - k * inv) * mass * (2.0 * PI).powf(-(k + 1.0)) * power_tail(n_max, k + 1.0);
    }

    let params = serde_json::json!({ "lambda": lambda, "b": b, "ell": ell, "weight": f, "interval": [lo, hi] });
    let mut t = ExplicitTerms::new("hl_corollary", Combination::Additive, params, [t0, t1, c(t_half + t_osc)], zeros.len());
    t.n_max = Some(n_max);
    t.diagnostics.insert("last_pair_m1".into(), last);
    t.diagnostics.insert("m2_fractional_part".into(), t_half);
    t.diagnostics.insert("m2_oscillatory".into(), t_osc);
    t.diagnostics.insert("m2_oscillatory_tail_bound".into(), tail);
    if let Some(v) = lhs {
        t = t.with_exact(c(v));
    }
    Ok(t)
}
