use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use lapconv::arith::{rep_counts, seq_perfect_powers, sieve_von_mangoldt, summatory, write_indexed_csv, ArithSeq};
use lapconv::error::Error;
use lapconv::explicit::{self, ExplicitTerms};
use lapconv::identity::{self, verify_cor24, verify_prop22};
use lapconv::output::to_json_line;
use lapconv::quadrature::Integrator;
use lapconv::series::{self, asymptotic_ratio, write_ratio_csv};
use lapconv::stepconv::laplace_convolve;
use lapconv::weight::Weight;
use lapconv::zeros::ZeroTable;

use crate::args::{Cli, Command, Cor24Args, Dump, Explicit, Prop22Args, RatioArgs, Series, Verify};

/// Environment variable overriding the default zeros file.
pub const ZEROS_ENV: &str = "LAPCONV_ZEROS";

/// Largest |Im|/(1+|Re|) tolerated in a sum that should be real.
const IMAG_TOL: f64 = 1e-9;

pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Zeros(PathBuf, Error),
    Core(Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::NumericFailure(_) | Error::TruncationInsufficient { .. }) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Zeros(p, e) => write!(f, "cannot load zeros file {}: {e}", p.display()),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "output: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Verify(Verify::Prop22(a)) => emit_report(cli, prop22(a)?),
        Command::Verify(Verify::Cor24(a)) => emit_report(cli, cor24(a)?),
        Command::Explicit(e) => explicit_cmd(cli, e),
        Command::Series(s) => series_cmd(cli, s),
        Command::Ratio(r) => ratio_cmd(cli, r),
        Command::Dump(d) => dump_cmd(cli, d),
    }
}

fn sink(cli: &Cli) -> Result<Box<dyn Write>> {
    Ok(match &cli.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_line<T: serde::Serialize>(cli: &Cli, item: &T) -> Result<()> {
    let mut out = sink(cli)?;
    writeln!(out, "{}", to_json_line(item)?)?;
    out.flush()?;
    Ok(())
}

fn emit_report(cli: &Cli, report: identity::VerificationReport) -> Result<Outcome> {
    emit_line(cli, &report)?;
    if report.pass {
        Ok(Outcome::Pass)
    } else {
        eprintln!("lapconv: {} failed: rel_err {:e} > tol", report.identity, report.rel_err);
        Ok(Outcome::Fail)
    }
}

fn load_zeros(cli: &Cli) -> Result<ZeroTable> {
    let path = cli
        .zeros
        .clone()
        .or_else(|| std::env::var_os(ZEROS_ENV).map(PathBuf::from));
    let table = match path {
        Some(p) => ZeroTable::load(&p).map_err(|e| CliError::Zeros(p, e))?,
        None => ZeroTable::bundled(),
    };
    Ok(match cli.k_zeros {
        Some(k) if k > table.len() => {
            return Err(usage(format!("--K {k} exceeds the {} zeros in the table", table.len())));
        }
        Some(k) => table.truncated(k),
        None => table,
    })
}

fn parse_f64(field: &str, text: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| usage(format!("bad number {field:?} in weight {text:?}")))
}

/// `cesaro:K`, `exponential:RATE`, `power:S:LOWER`, `damped:RATE:AMP:FREQ`.
pub fn parse_weight(text: &str) -> Result<Weight> {
    let mut parts = text.split(':');
    let kind = parts.next().unwrap_or_default();
    let nums = parts.map(|p| parse_f64(p, text)).collect::<Result<Vec<f64>>>()?;
    let w = match (kind, nums.as_slice()) {
        ("cesaro", [k]) => Weight::cesaro(*k),
        ("exponential" | "exp", [r]) => Weight::exponential(*r),
        ("power", [s, lower]) => Weight::power(*s, *lower),
        ("damped", [r, a, f]) => Weight::damped(*r, *a, *f),
        _ => return Err(usage(format!("unknown weight {text:?}"))),
    }?;
    Ok(w)
}

/// `lambda`, `one` or `rL`.
pub fn parse_seq(name: &str, n: usize) -> Result<ArithSeq> {
    let seq = match name {
        "lambda" => sieve_von_mangoldt(n)?,
        "one" => ArithSeq::from_values("one", vec![1.0; n])?,
        _ => match name.strip_prefix('r').and_then(|l| l.parse::<u32>().ok()) {
            Some(ell) => seq_perfect_powers(n, ell)?,
            None => return Err(usage(format!("unknown sequence {name:?}"))),
        },
    };
    Ok(seq)
}

fn prop22(a: &Prop22Args) -> Result<identity::VerificationReport> {
    let f = parse_weight(&a.weight)?;
    let g1 = parse_seq(&a.g1, a.n)?;
    let g2 = parse_seq(&a.g2, a.n)?;
    Ok(verify_prop22(&g1, &g2, &f, a.lambda, a.a, a.b, a.tol, &Integrator::default())?)
}

fn cor24(a: &Cor24Args) -> Result<identity::VerificationReport> {
    if a.d < 2 {
        return Err(usage(format!("--d {} must be at least 2", a.d)));
    }
    let f = parse_weight(&a.weight)?;
    let g = parse_seq(&a.g, a.n)?;
    let seqs = vec![&g; a.d];
    Ok(verify_cor24(&seqs, &f, a.lambda, a.b, a.tol, &Integrator::default())?)
}

/// Table length reaching x.
fn reach(x: f64) -> Result<usize> {
    if !(x.is_finite() && x > 0.0) {
        return Err(usage(format!("{x} is not a positive finite argument")));
    }
    Ok(x.ceil() as usize)
}

fn check_real(t: &ExplicitTerms) -> Outcome {
    let r = t.max_imag_ratio();
    if r <= IMAG_TOL {
        Outcome::Pass
    } else {
        eprintln!("lapconv: zero sums not real: |Im|/(1+|Re|) = {r:e}");
        Outcome::Fail
    }
}

fn explicit_cmd(cli: &Cli, e: &Explicit) -> Result<Outcome> {
    let zeros = load_zeros(cli)?;
    let terms = match e {
        Explicit::Cesaro { lambda, k } => {
            let lam = sieve_von_mangoldt(reach(*lambda)?)?;
            let counts = rep_counts(&[&lam, &lam])?;
            explicit::cesaro_explicit(*lambda, *k, &zeros, Some(&counts))?
        }
        Explicit::Mgoldbach { x } => {
            let psi = summatory(&sieve_von_mangoldt(reach(*x)?)?);
            let t = explicit::m_goldbach(*x, &zeros)?;
            t.with_exact(laplace_convolve(&psi, &psi, *x)?.into())
        }
        Explicit::Psirl { x, ell, n_max } => {
            let n = reach(*x)?;
            let t = explicit::psi_rell_terms(*x, *ell, &zeros, *n_max)?;
            let psi = summatory(&sieve_von_mangoldt(n)?);
            let r = summatory(&seq_perfect_powers(n, *ell)?);
            t.with_exact(laplace_convolve(&psi, &r, *x)?.into())
        }
        Explicit::Hlgen { lambda, b, ell, weight, n_max } => {
            let f = parse_weight(weight)?;
            let n = reach(lambda * b)?;
            let lam = sieve_von_mangoldt(n)?;
            let r = seq_perfect_powers(n, *ell)?;
            let lhs = identity::weighted_sum_2(&lam, &r, &f, *lambda, 0.0, *b)?;
            explicit::hl_corollary_eval(&f, *lambda, *b, *ell, &zeros, *n_max, Some(lhs), &Integrator::default())?
        }
        Explicit::Zlambda { lambda, w } => {
            let z = explicit::z_lambda(*lambda, *w, &zeros)?;
            let mut v = serde_json::to_value(z)?;
            v["formula"] = "z_lambda".into();
            v["params"] = serde_json::json!({ "lambda": lambda, "w": explicit::Cx::from(*w) });
            emit_line(cli, &v)?;
            let ratio = z.value.im.abs() / (1.0 + z.value.re.abs());
            if w.im == 0.0 && ratio > IMAG_TOL {
                eprintln!("lapconv: zero sum not real: |Im|/(1+|Re|) = {ratio:e}");
                return Ok(Outcome::Fail);
            }
            return Ok(Outcome::Pass);
        }
    };
    emit_line(cli, &terms)?;
    Ok(check_real(&terms))
}

fn series_cmd(cli: &Cli, s: &Series) -> Result<Outcome> {
    let zeros = load_zeros(cli)?;
    let cmp = match s {
        Series::Exp { y, n } => series::goldbach_exp_series(*y, *n, &zeros)?,
        Series::Dirichlet { s, n, u } => series::dirichlet_phi(*s, *n, *u, &zeros)?,
    };
    emit_line(cli, &cmp)?;
    Ok(Outcome::Pass)
}

fn ratio_cmd(cli: &Cli, r: &RatioArgs) -> Result<Outcome> {
    let step = r.step.unwrap_or(r.xmax / 10.0);
    if !(r.xmax >= 1.0 && r.xmax.is_finite() && step > 0.0 && step.is_finite()) {
        return Err(usage(format!("need xmax >= 1 and step > 0, got {} and {step}", r.xmax)));
    }
    let count = (r.xmax / step + 1e-9).floor() as usize;
    let xs: Vec<f64> = (1..=count).map(|i| i as f64 * step).filter(|&x| x >= 1.0).collect();
    let rows = asymptotic_ratio(&xs)?;
    let mut out = sink(cli)?;
    write_ratio_csv(&mut out, &rows)?;
    out.flush()?;
    Ok(Outcome::Pass)
}

fn dump_cmd(cli: &Cli, d: &Dump) -> Result<Outcome> {
    let mut out = sink(cli)?;
    match d {
        Dump::Seq { g, n } => parse_seq(g, *n)?.write_csv(&mut out)?,
        Dump::Conv { g1, g2, n } => {
            let counts = rep_counts(&[&parse_seq(g1, *n)?, &parse_seq(g2, *n)?])?;
            write_indexed_csv(&mut out, "n,G_n", &counts)?;
        }
    }
    out.flush()?;
    Ok(Outcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_and_sequences() {
        assert_eq!(parse_weight("cesaro:3").unwrap(), Weight::cesaro(3.0).unwrap());
        assert_eq!(parse_weight("power:3:1").unwrap(), Weight::power(3.0, 1.0).unwrap());
        assert!(parse_weight("cesaro").is_err());
        assert!(parse_weight("gauss:1").is_err());
        assert!(parse_weight("cesaro:x").is_err());
        assert_eq!(parse_seq("r2", 10).unwrap().values()[3], 1.0);
        assert_eq!(parse_seq("lambda", 10).unwrap().values()[7], 2f64.ln());
        assert!(parse_seq("mu", 10).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(Error::Domain("x".into())).exit_code(), 2);
        assert_eq!(CliError::Core(Error::NumericFailure("x".into())).exit_code(), 1);
    }
}
