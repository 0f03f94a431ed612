use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

#[derive(Debug, Parser)]
#[command(name = "lapconv", version, about = "Weighted-average identities and explicit formulas over zeta zeros")]
pub struct Cli {
    /// Zero ordinates file (one per line). Falls back to $LAPCONV_ZEROS, then the bundled table.
    #[arg(long, global = true)]
    pub zeros: Option<PathBuf>,

    /// Number of zeros to use (default: all in the table).
    #[arg(long = "K", global = true)]
    pub k_zeros: Option<usize>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a weighted-sum identity against its convolution form.
    #[command(subcommand)]
    Verify(Verify),
    /// Evaluate an explicit formula and compare it with the exact average.
    #[command(subcommand)]
    Explicit(Explicit),
    /// Compare a generating series with its expansion over zeros.
    #[command(subcommand)]
    Series(Series),
    /// CSV of Σ R_G(n)/(x²/2) and (ψ*ψ)(x)/(x³/6) on a grid.
    Ratio(RatioArgs),
    /// CSV dumps of arithmetic tables.
    #[command(subcommand)]
    Dump(Dump),
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// Two-sequence identity with a boundary term at λa.
    Prop22(Prop22Args),
    /// d-fold identity.
    Cor24(Cor24Args),
}

#[derive(Debug, Args)]
pub struct Prop22Args {
    #[arg(long = "N", default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 50.0)]
    pub lambda: f64,
    /// cesaro:K, exponential:RATE, power:S:LOWER or damped:RATE:AMP:FREQ.
    #[arg(long, default_value = "cesaro:3")]
    pub weight: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// lambda, one or rL (indicator of perfect L-th powers).
    #[arg(long, default_value = "lambda")]
    pub g1: String,
    #[arg(long, default_value = "lambda")]
    pub g2: String,
}

#[derive(Debug, Args)]
pub struct Cor24Args {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long = "N", default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 20.0)]
    pub lambda: f64,
    #[arg(long, default_value = "cesaro:4")]
    pub weight: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Sequence used in every slot.
    #[arg(long, default_value = "lambda")]
    pub g: String,
}

#[derive(Debug, Subcommand)]
pub enum Explicit {
    /// Cesàro average of R_G of order k at λ.
    Cesaro {
        #[arg(long)]
        lambda: f64,
        /// Complex order, e.g. 2 or 2.5+1i.
        #[arg(long, default_value = "2", value_parser = parse_complex)]
        k: Complex64,
    },
    /// (ψ*ψ)(x) against its expansion.
    Mgoldbach {
        #[arg(long)]
        x: f64,
    },
    /// (ψ*R_ℓ)(x) against its expansion.
    Psirl {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 2)]
        ell: u32,
        #[arg(long = "n_max", default_value_t = 10_000)]
        n_max: usize,
    },
    /// Weighted Λ·r_ℓ sum against its expansion.
    Hlgen {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 2)]
        ell: u32,
        #[arg(long, default_value = "cesaro:3")]
        weight: String,
        #[arg(long = "n_max", default_value_t = 100)]
        n_max: usize,
    },
    /// Z_λ(w) = Σ_ρ λ^ρ Γ(ρ)/Γ(ρ+w+1).
    Zlambda {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value = "2", value_parser = parse_complex)]
        w: Complex64,
    },
}

#[derive(Debug, Subcommand)]
pub enum Series {
    /// Σ_{n≤N} R_G(n)e^{−ny}.
    Exp {
        #[arg(long)]
        y: f64,
        #[arg(long = "N", default_value_t = 5000)]
        n: usize,
    },
    /// Σ_{n≤N} R_G(n)n^{−s} and its integral route.
    Dirichlet {
        #[arg(long, value_parser = parse_complex)]
        s: Complex64,
        #[arg(long = "N", default_value_t = 5000)]
        n: usize,
        #[arg(long = "U", default_value_t = 5000)]
        u: usize,
    },
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    #[arg(long)]
    pub xmax: f64,
    /// Grid spacing (default xmax/10).
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Dump {
    /// `n,value` rows of one sequence.
    Seq {
        #[arg(long, default_value = "lambda")]
        g: String,
        #[arg(long = "N")]
        n: usize,
    },
    /// `n,G_n` rows of the representation counts of two sequences.
    Conv {
        #[arg(long, default_value = "lambda")]
        g1: String,
        #[arg(long, default_value = "lambda")]
        g2: String,
        #[arg(long = "N")]
        n: usize,
    },
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    s.trim()
        .parse::<Complex64>()
        .map_err(|_| format!("not a complex number: {s:?}"))
}
