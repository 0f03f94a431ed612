//! Laplace convolution of summatory step functions in closed form.
//!
//! For G_j(x) = Σ_{n≤x} g_j(n) the nested convolution G₁*(G₂*⋯*G_d) is the
//! piecewise polynomial (1/(d−1)!) Σ_{n≤x} 𝒢(n)(x−n)^{d−1}, where 𝒢 are the
//! additive representation counts.

use std::io::Write;

use crate::arith::{rep_counts, write_indexed_csv, ArithSeq, SummatoryTable};
use crate::error::{invalid, Error, Result};
use crate::sum::Compensated;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvKernel {
    order: usize,
    /// `coeffs[0]` is 𝒢(1).
    coeffs: Vec<f64>,
    first_support: Option<usize>,
    factorial: f64,
}

impl ConvKernel {
    /// Precomputes 𝒢 for the nested convolution of `seqs`.
    pub fn build(seqs: &[&ArithSeq]) -> Result<Self> {
        Self::from_counts(seqs.len(), rep_counts(seqs)?)
    }

    /// Wraps precomputed coefficients; `order` is the number of convolved factors.
    pub fn from_counts(order: usize, coeffs: Vec<f64>) -> Result<Self> {
        if order < 2 {
            return Err(invalid(format!("kernel order d = {order} must be at least 2")));
        }
        if coeffs.is_empty() {
            return Err(invalid("kernel needs at least one coefficient"));
        }
        let first_support = coeffs.iter().position(|&c| c != 0.0).map(|i| i + 1);
        let factorial: f64 = (1..order).map(|i| i as f64).product();
        Ok(Self {
            order,
            coeffs,
            first_support,
            factorial,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest n with 𝒢(n) ≠ 0; the kernel vanishes for x ≤ this.
    pub fn first_support(&self) -> Option<usize> {
        self.first_support
    }

    /// K(x) for 0 ≤ x ≤ N.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(invalid("x is NaN"));
        }
        if x > self.len() as f64 {
            return Err(Error::OutOfTable { x, n: self.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    /// K(x) without range checks; x beyond N is clamped to the table.
    #[inline]
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        let start = match self.first_support {
            Some(s) if (s as f64) < x => s,
            _ => return 0.0,
        };
        let top = (x.floor() as usize).min(self.coeffs.len());
        let mut acc = Compensated::new();
        for n in start..=top {
            let c = self.coeffs[n - 1];
            if c != 0.0 {
                let gap = x - n as f64;
                let mut p = 1.0;
                for _ in 1..self.order {
                    p *= gap;
                }
                acc.add(c * p);
            }
        }
        acc.value() / self.factorial
    }

    /// Integer breakpoints n ≤ x_max carrying a nonzero coefficient.
    pub fn breakpoints(&self, x_max: f64) -> impl Iterator<Item = usize> + '_ {
        let top = if x_max < 1.0 { 0 } else { (x_max.floor() as usize).min(self.coeffs.len()) };
        (1..=top).filter(move |&n| self.coeffs[n - 1] != 0.0)
    }

    /// CSV dump `n,G_n`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_indexed_csv(out, "n,G_n", &self.coeffs)
    }
}

/// (G₁*G₂)(x) = ∫₀ˣ G₁(x−s)G₂(s) ds.
pub fn laplace_convolve(g1: &SummatoryTable, g2: &SummatoryTable, x: f64) -> Result<f64> {
    ConvKernel::build(&[g1.source(), g2.source()])?.eval(x)
}

/// (G₁*(G₂*⋯*G_d))(x).
pub fn nested_convolve(seqs: &[&ArithSeq], x: f64) -> Result<f64> {
    ConvKernel::build(seqs)?.eval(x)
}
