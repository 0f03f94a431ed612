//! Smooth weights f and their closed-form derivatives.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{EndCap, EndCaps, Integrator, QuadResult, QuadValue};
use crate::special;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightKind {
    /// (1−w)^k / Γ(k+1) on [0, 1].
    Cesaro { k: f64 },
    /// e^{−rate·w} on [0, ∞).
    Exponential { rate: f64 },
    /// w^{−s} on [lower, ∞).
    Power { s: f64, lower: f64 },
    /// e^{−rate·w}(1 + amplitude·cos(freq·w)) on [0, ∞).
    Damped { rate: f64, amplitude: f64, freq: f64 },
}

/// A weight `scale · base(w)`, zero outside its support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weight {
    #[serde(flatten)]
    kind: WeightKind,
    scale: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {v} must be positive and finite")))
    }
}

/// Falling factorial x(x−1)⋯(x−j+1).
fn falling(x: f64, j: usize) -> f64 {
    (0..j).map(|i| x - i as f64).product()
}

impl Weight {
    pub fn cesaro(k: f64) -> Result<Self> {
        positive("Cesaro order k", k)?;
        Ok(Self::from_kind(WeightKind::Cesaro { k }))
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive("exponential rate", rate)?;
        Ok(Self::from_kind(WeightKind::Exponential { rate }))
    }

    pub fn power(s: f64, lower: f64) -> Result<Self> {
        if !(s > 2.0 && s.is_finite()) {
            return Err(invalid(format!("power exponent s = {s} must exceed 2")));
        }
        positive("power weight lower end", lower)?;
        Ok(Self::from_kind(WeightKind::Power { s, lower }))
    }

    pub fn damped(rate: f64, amplitude: f64, freq: f64) -> Result<Self> {
        positive("damped rate", rate)?;
        if !(amplitude.is_finite() && freq.is_finite()) {
            return Err(invalid("damped amplitude and frequency must be finite"));
        }
        Ok(Self::from_kind(WeightKind::Damped { rate, amplitude, freq }))
    }

    fn from_kind(kind: WeightKind) -> Self {
        Self { kind, scale: 1.0 }
    }

    /// Multiplies the weight by a constant.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            scale: self.scale * factor,
            ..self
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Support [lo, hi]; hi may be +∞.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            WeightKind::Cesaro { .. } => (0.0, 1.0),
            WeightKind::Power { lower, .. } => (lower, f64::INFINITY),
            WeightKind::Exponential { .. } | WeightKind::Damped { .. } => (0.0, f64::INFINITY),
        }
    }

    pub fn is_compact(&self) -> bool {
        self.support().1.is_finite()
    }

    /// f(w).
    pub fn eval(&self, w: f64) -> f64 {
        self.derivative(0, w)
    }

    /// f^{(j)}(w), zero outside the support.
    pub fn derivative(&self, j: usize, w: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(w >= lo && w <= hi) || self.scale == 0.0 {
            return 0.0;
        }
        let v = match self.kind {
            WeightKind::Cesaro { k } => {
                let c = special::rgamma(k + 1.0 - j as f64);
                if c == 0.0 {
                    0.0
                } else {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    sign * c * (1.0 - w).powf(k - j as f64)
                }
            }
            WeightKind::Exponential { rate } => (-rate).powi(j as i32) * (-rate * w).exp(),
            WeightKind::Power { s, .. } => falling(-s, j) * w.powf(-s - j as f64),
            WeightKind::Damped { rate, amplitude, freq } => {
                let z = Complex64::new(-rate, freq);
                let osc = z.powi(j as i32) * (z * w).exp();
                (-rate).powi(j as i32) * (-rate * w).exp() + amplitude * osc.re
            }
        };
        self.scale * v
    }

    /// True when f^{(j)} is not smooth up to the right end of the support,
    /// so quadrature should grade toward it.
    pub fn rough_at_right_end(&self, j: usize) -> bool {
        match self.kind {
            WeightKind::Cesaro { k } => {
                let e = k - j as f64;
                !(e >= 0.0 && e == e.floor())
            }
            _ => false,
        }
    }

    /// Checks f(b⁻) = ⋯ = f^{(order−1)}(b⁻) = 0 at the right end of a compact support,
    /// allowing a finite jump in f^{(order−1)}.
    pub fn check_vanishing(&self, order: usize) -> Result<()> {
        if let WeightKind::Cesaro { k } = self.kind {
            if k + 1.0 < order as f64 {
                return Err(invalid(format!(
                    "cesaro({k}) has an unbounded derivative of order {} at w = 1; needs k >= {}",
                    order - 1,
                    order - 1
                )));
            }
        }
        Ok(())
    }

    /// lim_{w→hi⁻} f^{(j)}(w) when finite; None when unbounded.
    pub fn left_limit_at_right_end(&self, j: usize) -> Option<f64> {
        let (_, hi) = self.support();
        if !hi.is_finite() {
            return Some(0.0);
        }
        match self.kind {
            WeightKind::Cesaro { k } => {
                let e = k - j as f64;
                if e > 0.0 {
                    Some(0.0)
                } else if e == 0.0 {
                    Some(self.derivative(j, hi))
                } else if special::rgamma(k + 1.0 - j as f64) == 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
            _ => Some(self.derivative(j, hi)),
        }
    }

    /// ∫_lo^hi f^{(j)}(w)·h(w) dw for h smooth between the `interior`
    /// breakpoints. Grades toward the support end when f^{(j)} is rough there,
    /// capping the last sliver with h(mid)·Δf^{(j−1)}.
    #[allow(clippy::too_many_arguments)]
    pub fn integrate_derivative<T: QuadValue>(
        &self,
        j: usize,
        lo: f64,
        hi: f64,
        h: &dyn Fn(f64) -> T,
        interior: impl IntoIterator<Item = f64>,
        left_cap: Option<EndCap<'_, T>>,
        quad: &Integrator,
    ) -> Result<QuadResult<T>> {
        if !(hi > lo) || self.scale == 0.0 {
            return Ok(QuadResult {
                value: T::default(),
                error_estimate: 0.0,
                panels: 0,
            });
        }
        let (s_lo, s_hi) = self.support();
        let mut pts = vec![lo];
        pts.extend(interior.into_iter().filter(|&p| p > lo && p < hi));
        for end in [s_lo, s_hi] {
            if end > lo && end < hi {
                pts.push(end);
            }
        }
        pts.push(hi);
        let integrand = |w: f64| h(w) * self.derivative(j, w);
        let graded = j >= 1 && hi == s_hi && self.rough_at_right_end(j);
        if !graded {
            return quad.integrate(&integrand, &pts, EndCaps { left: left_cap, right: None });
        }
        let end_value = self
            .left_limit_at_right_end(j - 1)
            .ok_or_else(|| Error::Domain(format!("f^({}) is unbounded at the support end", j - 1)))?;
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup();
        if pts.len() == 2 {
            pts.insert(1, 0.5 * (lo + hi));
        }
        // The last window runs in t = hi − w, where distances to the end are exact.
        let pivot = pts[pts.len() - 2];
        let head = quad.integrate(&integrand, &pts[..pts.len() - 1], EndCaps { left: left_cap, right: None })?;
        let near = |t: f64| h(hi - t) * self.derivative_before_right_end(j, t);
        let cap = |inner: f64, _end: f64| h(hi - 0.5 * inner) * (end_value - self.derivative_before_right_end(j - 1, inner));
        let tail = quad.integrate(&near, &[0.0, hi - pivot], EndCaps { left: Some(&cap), right: None })?;
        Ok(QuadResult {
            value: head.value + tail.value,
            error_estimate: head.error_estimate + tail.error_estimate,
            panels: head.panels + tail.panels,
        })
    }

    /// f^{(j)}(hi − t) for a compact support [lo, hi], with t ≥ 0 taken exactly.
    pub fn derivative_before_right_end(&self, j: usize, t: f64) -> f64 {
        let (lo, hi) = self.support();
        match self.kind {
            WeightKind::Cesaro { k } if t > 0.0 && t <= hi - lo && self.scale != 0.0 => {
                let c = special::rgamma(k + 1.0 - j as f64);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                self.scale * sign * c * t.powf(k - j as f64)
            }
            _ => self.derivative(j, hi - t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_difference(f: &Weight, j: usize, w: f64) -> f64 {
        let h = 1e-5;
        (f.derivative(j, w + h) - f.derivative(j, w - h)) / (2.0 * h)
    }

    #[test]
    fn cesaro_values() {
        let f = Weight::cesaro(1.0).unwrap();
        assert!((f.eval(0.2) - 0.8).abs() < 1e-15);
        let f = Weight::cesaro(2.0).unwrap();
        assert!((f.eval(0.3) - 0.245).abs() < 1e-15);
        assert!((f.derivative(1, 0.0) + 1.0).abs() < 1e-15);
        assert!((f.derivative(2, 0.4) - 1.0).abs() < 1e-15);
        assert_eq!(f.derivative(3, 0.4), 0.0);
        assert_eq!(f.eval(1.5), 0.0);
        assert_eq!(f.eval(-0.1), 0.0);
        assert!(Weight::cesaro(0.0).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let weights = [
            Weight::cesaro(3.7).unwrap(),
            Weight::exponential(1.3).unwrap(),
            Weight::power(3.0, 0.1).unwrap(),
            Weight::damped(0.8, 0.5, 4.0).unwrap(),
        ];
        for f in weights {
            for j in 0..3 {
                for w in [0.25, 0.5, 0.7] {
                    let fd = finite_difference(&f, j, w);
                    let exact = f.derivative(j + 1, w);
                    assert!(
                        (fd - exact).abs() < 1e-6 * exact.abs().max(1.0),
                        "{f:?} j={j} w={w}: {fd} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn right_end_behaviour() {
        let f = Weight::cesaro(1.5).unwrap();
        assert!(f.rough_at_right_end(2));
        assert!(f.left_limit_at_right_end(2).is_none());
        assert_eq!(f.left_limit_at_right_end(1), Some(0.0));
        let g = Weight::cesaro(1.0).unwrap();
        assert_eq!(g.left_limit_at_right_end(1), Some(-1.0));
        assert!(!Weight::cesaro(3.0).unwrap().rough_at_right_end(2));
        assert!(Weight::cesaro(0.5).unwrap().check_vanishing(2).is_err());
        assert!(Weight::cesaro(1.0).unwrap().check_vanishing(2).is_ok());
    }

    #[test]
    fn scaling_to_zero() {
        let f = Weight::cesaro(2.0).unwrap().scaled(0.0);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.derivative(2, 0.5), 0.0);
    }
}
