//! Real gamma function, principal complex powers and the complex Euclidean norm.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Distance to the nearest non-positive integer below which gamma reports a pole.
pub const POLE_GUARD: f64 = 1e-8;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function on the real line.
///
/// Lanczos (g = 7, nine coefficients) for `x >= 0.5`, reflection
/// `Γ(x)Γ(1−x) = π / sin(πx)` below that.
pub fn gamma_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite argument {x}")));
    }
    if x <= POLE_GUARD {
        let nearest = x.round();
        if (x - nearest).abs() < POLE_GUARD {
            return Err(Error::Pole(x));
        }
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // sin(πx) evaluated on the reduced argument keeps precision near integers
        let s = sin_pi(x);
        PI / (s * gamma_unchecked(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS_COEFFS[0];
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
    }
}

/// `sin(πx)` with the argument reduced modulo 2 first.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r <= 0.5 {
        (PI * r).sin()
    } else if r <= 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

/// Principal argument in `(−π, π]`; a signed-zero imaginary part counts as `+0`.
pub fn principal_arg(z: Complex64) -> f64 {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    im.atan2(z.re)
}

/// Principal-branch power `exp(w · Log z)`.
pub fn complex_pow(z: Complex64, w: f64) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        if w > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::Domain(format!("0 raised to non-positive power {w}")));
    }
    let log_modulus = z.norm().ln();
    let arg = principal_arg(z);
    Ok(Complex64::from_polar((w * log_modulus).exp(), w * arg))
}

/// Euclidean norm `sqrt(Σ |z_k|²)`.
pub fn norm2(v: &[Complex64]) -> f64 {
    norm2_iter(v.iter().copied())
}

pub fn norm2_iter<I: IntoIterator<Item = Complex64>>(it: I) -> f64 {
    it.into_iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
