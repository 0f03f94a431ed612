//! Ordinates of nontrivial zeta zeros.
//!
//! Only positive ordinates γ are stored. Every zero is taken in the form
//! ρ = 1/2 + iγ, and sums over ρ run over both ρ and its conjugate.

use std::io::Read;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The first ordinate, 14.134725…
pub const FIRST_ORDINATE: f64 = 14.134725;

const BUNDLED: &str = include_str!("../../../data/zeros200.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    gammas: Vec<f64>,
}

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

impl ZeroTable {
    /// One ordinate per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut gammas: Vec<f64> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let g: f64 = body
                .parse()
                .map_err(|_| parse_error(line, format!("not a number: {body:?}")))?;
            if !(g.is_finite() && g > 0.0) {
                return Err(parse_error(line, format!("ordinate {g} must be positive and finite")));
            }
            match gammas.last() {
                None if (g - FIRST_ORDINATE).abs() > 1e-6 => {
                    return Err(parse_error(line, format!("first ordinate {g} is not 14.134725…")));
                }
                Some(&prev) if g <= prev => {
                    return Err(parse_error(line, format!("ordinate {g} does not exceed {prev}")));
                }
                _ => {}
            }
            gammas.push(g);
        }
        Ok(Self { gammas })
    }

    pub fn from_reader<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The first 200 ordinates shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled zero table is valid")
    }

    pub fn empty() -> Self {
        Self { gammas: Vec::new() }
    }

    /// The first min(k, K) ordinates.
    pub fn truncated(&self, k: usize) -> Self {
        Self {
            gammas: self.gammas[..k.min(self.gammas.len())].to_vec(),
        }
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// ρ₁, ρ̄₁, ρ₂, ρ̄₂, …
    pub fn rhos(&self) -> Vec<Complex64> {
        self.gammas
            .iter()
            .flat_map(|&g| [Complex64::new(0.5, g), Complex64::new(0.5, -g)])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table() {
        let z = ZeroTable::bundled();
        assert_eq!(z.len(), 200);
        assert!((z.gammas()[0] - 14.134725141734693).abs() < 1e-12);
        assert!((z.gammas()[199] - 396.381854222592187).abs() < 1e-9);
        assert_eq!(z.truncated(10).len(), 10);
        assert_eq!(z.truncated(1000).len(), 200);
        let r = z.truncated(1).rhos();
        assert_eq!(r, vec![Complex64::new(0.5, z.gammas()[0]), Complex64::new(0.5, -z.gammas()[0])]);
    }

    #[test]
    fn parsing_rules() {
        let z = ZeroTable::parse("# c\n\n14.134725141734693\n  21.022039638771555 \n").unwrap();
        assert_eq!(z.len(), 2);
        assert!(ZeroTable::parse("").unwrap().is_empty());
        assert!(ZeroTable::parse("# only comments\n").unwrap().is_empty());
        let bad = ZeroTable::parse("14.134725141734693\n25.0\n21.0\n");
        assert!(matches!(bad, Err(Error::Parse { line: 3, .. })));
        let bad = ZeroTable::parse("14.134725141734693\n\nabc\n");
        assert!(matches!(bad, Err(Error::Parse { line: 3, .. })));
        assert!(ZeroTable::parse("15.0\n").is_err());
        assert!(ZeroTable::parse("14.134725141734693\n-3\n").is_err());
    }

    #[test]
    fn bundled_hundred_file_matches_prefix() {
        let text = include_str!("../../../data/zeros100.txt");
        let z = ZeroTable::parse(text).unwrap();
        assert_eq!(z.len(), 100);
        assert_eq!(z.gammas(), ZeroTable::bundled().truncated(100).gammas());
    }
}
