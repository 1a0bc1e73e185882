//! Benchmark systems and the by-name registry used by the CLI.

use std::f64::consts::{E, FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::receiver::{self, ReceiverParams};
use crate::system::NonlinearSystem;

/// `f_k(x) = π/2 − Σ_{m=0}^{k} (−1)^m x^{2m+1} / ((2m+1)·(2m+1)!)`, the
/// truncated series of `∫_x^∞ sin(t)/t dt`.
///
/// Terms are generated by the ratio `t_{m+1} = −t_m x² / ((2m+2)(2m+3))` so no
/// factorial is ever formed.
pub fn make_sine_integral_tail(k: usize) -> NonlinearSystem {
    NonlinearSystem::new(format!("si{k}"), 1, move |x| Ok(vec![sine_integral_tail(k, x[0])]))
}

pub fn sine_integral_tail(k: usize, x: Complex64) -> Complex64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..=k {
        sum += term / (2 * m + 1) as f64;
        term = -term * x2 / ((2 * m + 2) * (2 * m + 3)) as f64;
    }
    FRAC_PI_2 - sum
}

pub fn make_example2() -> NonlinearSystem {
    NonlinearSystem::new("example2", 2, |x| {
        let (x1, x2) = (x[0], x[1]);
        let q = 1.0 / (4.0 * PI);
        Ok(vec![
            0.5 * x1 * ((x1 * x2).sin() - 1.0) - q * x2,
            (1.0 - q) * ((2.0 * x1).exp() - E) + E * (x2 / PI - 2.0 * x1),
        ])
    })
}

pub fn make_example3() -> NonlinearSystem {
    NonlinearSystem::new("example3", 3, |x| {
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        Ok(vec![
            -3.6 * x2 * ((x2 * x2).cos() + x1.powu(3) * x3) - 3.6 * x3 + 10.8,
            -1.6 * x1 * (x1 + x2.powu(3) * x3) - 1.6 * x3.sinh() + 6.4,
            -4.6 * x2 * (x1 * x3.powu(3) + 1.0) - 4.6 * x1.cosh() + 27.6,
        ])
    })
}

/// A registered system together with the solver defaults that suit it.
#[derive(Debug, Clone)]
pub struct SystemEntry {
    pub system: NonlinearSystem,
    pub description: &'static str,
    pub default_epsilon: f64,
    pub default_tol: f64,
}

pub const SYSTEM_NAMES: [&str; 5] = ["si50", "example2", "example3", "receiver5", "receiver2"];

/// Looks up a registered system. Receiver systems are built from `params`.
pub fn lookup(name: &str, params: &ReceiverParams) -> Option<SystemEntry> {
    let entry = |system, description, default_epsilon, default_tol| SystemEntry {
        system,
        description,
        default_epsilon,
        default_tol,
    };
    match name {
        "si50" => Some(entry(
            make_sine_integral_tail(50),
            "1-dim truncated sine-integral tail series, k = 50",
            1e-3,
            1e-6,
        )),
        "example2" => Some(entry(
            make_example2(),
            "2-dim trigonometric/exponential system",
            1e-3,
            1e-6,
        )),
        "example3" => Some(entry(make_example3(), "3-dim polynomial/hyperbolic system", 1e-3, 1e-6)),
        "receiver5" => Some(entry(
            receiver::full_system(params).ok()?,
            "hybrid solar receiver, full 5-variable balance",
            1e-4,
            1e-2,
        )),
        "receiver2" => Some(entry(
            receiver::reduced_system(params).ok()?,
            "hybrid solar receiver, reduced 2-variable balance in (T_hot, T_cold)",
            1e-4,
            1e-2,
        )),
        _ => None,
    }
}
