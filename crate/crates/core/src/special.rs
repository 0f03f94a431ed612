//! Complex Gamma function and a few companions.
//!
//! ln Γ uses Lanczos' approximation with g = 671/128 and fourteen
//! coefficients (Godfrey's set), evaluated in log form so that arguments
//! with large imaginary part neither overflow nor underflow. For
//! Re z < 1/2 the reflection formula is applied, also in log form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_092;
const LANCZOS_COEFFS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;

/// (ζ′/ζ)(0) = log 2π.
pub const ZETA_LOG_DERIVATIVE_AT_ZERO: f64 = 1.837_877_066_409_345_5;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor()
}

fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    let mut y = z;
    for c in LANCZOS_COEFFS {
        y += 1.0;
        ser += c / y;
    }
    let t = z + LANCZOS_G;
    (z + 0.5) * t.ln() - t + (ser * SQRT_TWO_PI / z).ln()
}

/// log sin(πz) on some branch.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(πz) = (i/2) e^{-iπz} (1 − e^{2πiz}); |e^{2πiz}| ≤ 1 here.
    let i = Complex64::i();
    let q = (i * 2.0 * PI * z).exp();
    Complex64::new(0.5f64.ln(), PI / 2.0) - i * PI * z + (Complex64::new(1.0, 0.0) - q).ln()
}

/// ln Γ(z) on some branch (the imaginary part is only meaningful mod 2π).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("Gamma argument {z} is not finite")));
    }
    if is_pole(z) {
        return Err(Error::Domain(format!("Gamma has a pole at {}", z.re)));
    }
    if z.re < 0.5 {
        let reflected = ln_gamma_lanczos(Complex64::new(1.0, 0.0) - z);
        Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - reflected)
    } else {
        Ok(ln_gamma_lanczos(z))
    }
}

/// Complex Gamma function.
pub fn cgamma(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(z)?.exp())
}

/// Γ(x) for real x, erroring at the poles.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(cgamma(Complex64::new(x, 0.0))?.re)
}

/// 1/Γ(x) for real x; zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    match ln_gamma(Complex64::new(x, 0.0)) {
        Ok(l) => (-l).exp().re,
        Err(_) => 0.0,
    }
}

/// e^z − 1 without cancellation for small |z|.
pub fn expm1_complex(z: Complex64) -> Complex64 {
    let half = (z.im / 2.0).sin();
    Complex64::new(
        z.re.exp_m1() * z.im.cos() - 2.0 * half * half,
        z.re.exp() * z.im.sin(),
    )
}

/// ζ(s) for real s > 1 by Euler–Maclaurin summation.
pub fn zeta_real(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!("zeta_real needs s > 1, got {s}")));
    }
    const M: f64 = 64.0;
    let mut acc = crate::sum::Compensated::new();
    for n in 1..(M as usize) {
        acc.add((n as f64).powf(-s));
    }
    let ms = M.powf(-s);
    acc.add(M * ms / (s - 1.0));
    acc.add(ms / 2.0);
    acc.add(s * ms / M / 12.0);
    acc.add(-s * (s + 1.0) * (s + 2.0) * ms / M.powi(3) / 720.0);
    acc.add(s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * ms / M.powi(5) / 30240.0);
    Ok(acc.value())
}
