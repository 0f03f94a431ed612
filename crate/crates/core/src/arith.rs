//! Tabulated arithmetical functions, their summatory step functions and
//! additive representation counts.

use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::special;
use crate::sum::{Compensated, CompensatedComplex};
use num_complex::Complex64;

/// Largest table the sieves will build.
pub const MAX_TABLE: usize = 50_000_000;

/// An arithmetical function g(1..N) stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithSeq {
    name: String,
    /// `values[i]` holds g(i + 1).
    values: Vec<f64>,
    nonnegative: bool,
}

impl ArithSeq {
    /// Wraps arbitrary finite values; `values[0]` is g(1).
    pub fn from_values(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("a sequence needs at least one entry"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("g({}) is not finite", i + 1)));
        }
        let nonnegative = values.iter().all(|&v| v >= 0.0);
        Ok(Self {
            name: name.into(),
            values,
            nonnegative,
        })
    }

    /// Kronecker delta Δ_at(n) on a table of length `len`.
    pub fn kronecker(len: usize, at: usize) -> Result<Self> {
        if at == 0 || at > len {
            return Err(invalid(format!("delta position {at} outside 1..={len}")));
        }
        let mut values = vec![0.0; len];
        values[at - 1] = 1.0;
        Self::from_values(format!("delta{at}"), values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Table length N.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    /// g(n) for 1 ≤ n ≤ N, zero otherwise.
    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        if n == 0 || n > self.values.len() {
            0.0
        } else {
            self.values[n - 1]
        }
    }

    /// Values as a slice, `values()[0]` being g(1).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest n with g(n) ≠ 0.
    pub fn first_support(&self) -> Option<usize> {
        self.values.iter().position(|&v| v != 0.0).map(|i| i + 1)
    }

    /// Writes `n,value` rows with a header line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_indexed_csv(out, "n,value", &self.values)
    }
}

fn check_table_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("table size N must be at least 1"));
    }
    if n > MAX_TABLE {
        return Err(invalid(format!("table size {n} exceeds {MAX_TABLE}")));
    }
    Ok(())
}

/// Smallest-prime-factor table for 0..=n (entries 0 and 1 are 0).
fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let m = i * p as usize;
            if p > si || m > n {
                break;
            }
            spf[m] = p;
        }
    }
    spf
}

/// The von Mangoldt function Λ(1..N).
pub fn sieve_von_mangoldt(n: usize) -> Result<ArithSeq> {
    check_table_size(n)?;
    let spf = smallest_prime_factors(n);
    let mut values = vec![0.0; n];
    for m in 2..=n {
        let p = spf[m] as usize;
        let mut rest = m;
        while rest % p == 0 {
            rest /= p;
        }
        if rest == 1 {
            values[m - 1] = (p as f64).ln();
        }
    }
    ArithSeq::from_values("Lambda", values)
}

/// Indicator r_ℓ of perfect ℓ-th powers on 1..N.
pub fn seq_perfect_powers(n: usize, ell: u32) -> Result<ArithSeq> {
    check_table_size(n)?;
    if ell < 2 {
        return Err(invalid(format!("power ell = {ell} must be at least 2")));
    }
    let mut values = vec![0.0; n];
    for base in 1u64.. {
        match base.checked_pow(ell) {
            Some(p) if p as usize <= n => values[p as usize - 1] = 1.0,
            _ => break,
        }
    }
    ArithSeq::from_values(format!("r{ell}"), values)
}

/// Prefix sums of an [`ArithSeq`], evaluable as the right-continuous step
/// function G(x) = Σ_{n≤x} g(n).
#[derive(Debug, Clone)]
pub struct SummatoryTable {
    source: ArithSeq,
    /// `prefix[n]` = Σ_{m≤n} g(m), with `prefix[0]` = 0.
    prefix: Vec<f64>,
}

impl SummatoryTable {
    pub fn source(&self) -> &ArithSeq {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    /// G(n) at an integer 0 ≤ n ≤ N.
    #[inline]
    pub fn at_integer(&self, n: usize) -> f64 {
        self.prefix[n.min(self.prefix.len() - 1)]
    }

    /// G(x); zero for x ≤ 0, jumps included at integer x.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(invalid("x is NaN"));
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x > self.len() as f64 {
            return Err(Error::OutOfTable { x, n: self.len() });
        }
        Ok(self.prefix[x.floor() as usize])
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }
}

/// Builds the summatory table with compensated prefix sums.
pub fn summatory(seq: &ArithSeq) -> SummatoryTable {
    let mut prefix = Vec::with_capacity(seq.len() + 1);
    prefix.push(0.0);
    let mut acc = Compensated::new();
    for &v in seq.values() {
        acc.add(v);
        prefix.push(acc.value());
    }
    SummatoryTable {
        source: seq.clone(),
        prefix,
    }
}

/// Discrete additive convolution truncated at N: out[n] = Σ_{m<n} a(m) b(n−m).
fn convolve_truncated(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let support: Vec<usize> = (1..=n).filter(|&m| a[m - 1] != 0.0).collect();
    let mut out = vec![0.0; n];
    for total in 2..=n {
        let mut acc = Compensated::new();
        for &m in &support {
            if m >= total {
                break;
            }
            let other = b[total - m - 1];
            if other != 0.0 {
                acc.add(a[m - 1] * other);
            }
        }
        out[total - 1] = acc.value();
    }
    out
}

/// Representation counts 𝒢(n) = Σ_{m₁+⋯+m_d=n} g₁(m₁)⋯g_d(m_d) for n ≤ N.
///
/// Iterated pairwise from the right, matching G₁*(G₂*(⋯*G_d)).
pub fn rep_counts(seqs: &[&ArithSeq]) -> Result<Vec<f64>> {
    if seqs.len() < 2 {
        return Err(invalid("rep_counts needs at least two sequences"));
    }
    let n = seqs[0].len();
    if seqs.iter().any(|s| s.len() != n) {
        return Err(invalid("all sequences must share the same table length"));
    }
    let mut acc = seqs[seqs.len() - 1].values().to_vec();
    for seq in seqs[..seqs.len() - 1].iter().rev() {
        acc = convolve_truncated(seq.values(), &acc);
    }
    Ok(acc)
}

/// Cesàro average of order k: (1/Γ(k+1)) Σ_{n≤x} (x−n)^k 𝒢(n).
///
/// `counts[0]` is 𝒢(1).
pub fn cesaro_average(counts: &[f64], x: f64, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(invalid(format!("Cesaro order k = {k} must be positive")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(invalid(format!("x = {x} must be nonnegative")));
    }
    if x > counts.len() as f64 {
        return Err(Error::OutOfTable { x, n: counts.len() });
    }
    let top = x.floor() as usize;
    let mut acc = Compensated::new();
    for n in 1..=top {
        let c = counts[n - 1];
        if c != 0.0 {
            acc.add(c * (x - n as f64).powf(k));
        }
    }
    Ok(acc.value() * special::rgamma(k + 1.0))
}

/// Cesàro average with complex order, Re k > 0.
pub fn cesaro_average_complex(counts: &[f64], x: f64, k: Complex64) -> Result<Complex64> {
    if !(k.re > 0.0) {
        return Err(invalid(format!("Cesaro order Re k = {} must be positive", k.re)));
    }
    if x.is_nan() || x < 0.0 {
        return Err(invalid(format!("x = {x} must be nonnegative")));
    }
    if x > counts.len() as f64 {
        return Err(Error::OutOfTable { x, n: counts.len() });
    }
    let top = x.floor() as usize;
    let mut acc = CompensatedComplex::new();
    for n in 1..=top {
        let c = counts[n - 1];
        let gap = x - n as f64;
        if c != 0.0 && gap > 0.0 {
            acc.add((k * gap.ln()).exp() * c);
        }
    }
    let norm = special::ln_gamma(k + 1.0)?;
    Ok(acc.value() * (-norm).exp())
}

/// Writes `header` followed by `n,value` rows for n = 1, 2, ….
pub fn write_indexed_csv<W: Write>(mut out: W, header: &str, values: &[f64]) -> Result<()> {
    writeln!(out, "{header}")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, crate::output::fmt_sig(*v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn trial_division_lambda(n: usize) -> f64 {
        if n < 2 {
            return 0.0;
        }
        let mut p = 2;
        while p * p <= n && n % p != 0 {
            p += 1;
        }
        if n % p != 0 {
            p = n;
        }
        let mut rest = n;
        while rest % p == 0 {
            rest /= p;
        }
        if rest == 1 {
            (p as f64).ln()
        } else {
            0.0
        }
    }

    #[test]
    fn lambda_small_values() {
        let lam = sieve_von_mangoldt(1).unwrap();
        assert_eq!(lam.values(), &[0.0]);
        let lam = sieve_von_mangoldt(8).unwrap();
        assert_eq!(lam.get(8), LN_2);
        assert_eq!(lam.get(6), 0.0);
        assert_eq!(lam.get(1), 0.0);
    }

    #[test]
    fn psi_of_ten() {
        let lam = sieve_von_mangoldt(11).unwrap();
        let psi = summatory(&lam);
        let expected = 3.0 * LN_2 + 2.0 * 3f64.ln() + 5f64.ln() + 7f64.ln();
        assert!((psi.eval(10.0).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 7.83202).abs() < 1e-5);
        assert_eq!(psi.eval(10.7).unwrap(), psi.eval(10.0).unwrap());
        assert_eq!(psi.eval(1.5).unwrap(), 0.0);
        assert_eq!(psi.eval(2.0).unwrap(), LN_2);
        assert_eq!(psi.eval(-3.0).unwrap(), 0.0);
        assert!(matches!(psi.eval(11.5), Err(Error::OutOfTable { .. })));
    }

    #[test]
    fn psi_matches_trial_division_up_to_ten_thousand() {
        let n = 10_000;
        let psi = summatory(&sieve_von_mangoldt(n).unwrap());
        let mut acc = Compensated::new();
        for m in 1..=n {
            acc.add(trial_division_lambda(m));
            let got = psi.at_integer(m);
            assert!(
                (got - acc.value()).abs() <= 1e-12 * acc.value().max(1.0),
                "psi({m}) = {got}, oracle {}",
                acc.value()
            );
        }
    }

    #[test]
    fn zero_table_is_rejected() {
        assert!(matches!(sieve_von_mangoldt(0), Err(Error::InvalidArgument(_))));
        assert!(sieve_von_mangoldt(MAX_TABLE + 1).is_err());
    }

    #[test]
    fn perfect_powers() {
        let sq = seq_perfect_powers(10, 2).unwrap();
        assert_eq!(summatory(&sq).eval(10.0).unwrap(), 3.0);
        let cubes = seq_perfect_powers(10, 3).unwrap();
        assert_eq!(summatory(&cubes).eval(10.0).unwrap(), 2.0);
        for ell in 2..6 {
            assert_eq!(seq_perfect_powers(1, ell).unwrap().values(), &[1.0]);
        }
        assert!(seq_perfect_powers(10, 1).is_err());
        let sq = summatory(&seq_perfect_powers(5000, 2).unwrap());
        for x in 1..=5000usize {
            assert_eq!(sq.at_integer(x), (x as f64).sqrt().floor());
        }
    }

    #[test]
    fn goldbach_counts_small() {
        let lam = sieve_von_mangoldt(10).unwrap();
        let r = rep_counts(&[&lam, &lam]).unwrap();
        assert_eq!(r[2], 0.0);
        assert!((r[3] - LN_2 * LN_2).abs() < 1e-15);
        assert!((r[3] - 0.480453).abs() < 1e-6);
        assert!((r[4] - 2.0 * LN_2 * 3f64.ln()).abs() < 1e-15);
        assert!((r[4] - 1.52300).abs() < 1e-5);
    }

    #[test]
    fn rep_counts_match_double_loop() {
        let n = 2000;
        let lam = sieve_von_mangoldt(n).unwrap();
        let sq = seq_perfect_powers(n, 2).unwrap();
        let fast = rep_counts(&[&lam, &sq]).unwrap();
        for total in 1..=n {
            let mut brute = 0.0;
            for m in 1..total {
                brute += lam.get(m) * sq.get(total - m);
            }
            let scale = brute.abs().max(1e-300);
            assert!((fast[total - 1] - brute).abs() <= 1e-12 * scale.max(1.0));
        }
        let swapped = rep_counts(&[&sq, &lam]).unwrap();
        for (a, b) in fast.iter().zip(&swapped) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn rep_counts_of_deltas() {
        let (a, b, c) = (
            ArithSeq::kronecker(30, 2).unwrap(),
            ArithSeq::kronecker(30, 5).unwrap(),
            ArithSeq::kronecker(30, 7).unwrap(),
        );
        let g = rep_counts(&[&a, &b, &c]).unwrap();
        for (i, v) in g.iter().enumerate() {
            assert_eq!(*v, if i + 1 == 14 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn rep_counts_errors() {
        let a = sieve_von_mangoldt(10).unwrap();
        let b = sieve_von_mangoldt(11).unwrap();
        assert!(rep_counts(&[&a]).is_err());
        assert!(rep_counts(&[&a, &b]).is_err());
    }

    #[test]
    fn cesaro_examples() {
        let lam = sieve_von_mangoldt(100).unwrap();
        let r = rep_counts(&[&lam, &lam]).unwrap();
        assert_eq!(cesaro_average(&r, 4.0, 1.0).unwrap(), 0.0);
        assert!((cesaro_average(&r, 5.0, 1.0).unwrap() - LN_2 * LN_2).abs() < 1e-15);
        for k in [0.5, 1.0, 2.5] {
            assert_eq!(cesaro_average(&r, 0.0, k).unwrap(), 0.0);
        }
        assert!(matches!(
            cesaro_average(&r, 100.5, 1.0),
            Err(Error::OutOfTable { .. })
        ));
        assert!(cesaro_average(&r, 10.0, 0.0).is_err());
        let real = cesaro_average(&r, 57.3, 2.5).unwrap();
        let cplx = cesaro_average_complex(&r, 57.3, Complex64::new(2.5, 0.0)).unwrap();
        assert!((real - cplx.re).abs() < 1e-12 * real.abs());
        assert!(cplx.im.abs() < 1e-12 * real.abs());
    }

    #[test]
    fn csv_dump_format() {
        let lam = sieve_von_mangoldt(4).unwrap();
        let mut buf = Vec::new();
        lam.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "n,value\n1,0.0\n2,0.693147180559945\n3,1.09861228866811\n4,0.693147180559945\n"
        );
    }
}
