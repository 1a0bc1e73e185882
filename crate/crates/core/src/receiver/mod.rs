//! Steady-state model of a hybrid photovoltaic + thermoelectric solar receiver.
//!
//! State vector (temperatures in °C, efficiencies dimensionless):
//!
//! | index | quantity  |
//! |-------|-----------|
//! | 1     | `T_cell`  |
//! | 2     | `T_hot`   |
//! | 3     | `T_cold`  |
//! | 4     | `η_cell`  |
//! | 5     | `η_TEG`   |
//!
//! The balance is
//!
//! ```text
//! x1 = x2 + a1 a2 (1 − x4)
//! x2 = x3 + a1 a3 (1 − x4)(1 − x5)
//! x3 = a4 + a1 a5 (1 − x4)(1 − x5)
//! x4 = a6 x1 + a7
//! x5 = (a8 − 1)(1 − r)/(a8 + r),   r = (x3 + a9)/(x2 + a9)
//! ```
//!
//! Eliminating `x1`, `x4` and `x5` leaves a two-equation system in
//! `(T_hot, T_cold)`; [`back_substitute`] recovers the rest.
//!
//! [`f_full`] and [`f_reduced`] return `state − model`. The iteration contracts
//! on the opposite orientation (`model − state`) for orders in `(1, 2)`, so the
//! solver-facing systems from [`full_system`] and [`reduced_system`] negate them.

mod batch;
mod params;

pub use batch::{
    batch_solve, read_measurements, write_solutions, MeasurementRow, ReceiverSolution, ReceiverStatus, SOLUTION_HEADER,
};
pub use params::ReceiverParams;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::NonlinearSystem;

/// Celsius to Kelvin offset used inside the Carnot-like TEG factor.
pub const KELVIN_OFFSET: f64 = 273.15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub a7: f64,
    pub a8: f64,
    pub a9: f64,
}

pub fn derive_constants(p: &ReceiverParams) -> Result<ReceiverConstants> {
    p.validate()?;
    let spreading = 0.5 * (p.f_star * p.a_teg).sqrt() * (p.b * p.f_star.sqrt() + p.a_teg.sqrt());
    let k_denominator = p.f_star * p.a_teg * p.k_teg;
    if !(spreading > 0.0) || !(p.a_teg > 0.0) || !(k_denominator > 0.0) {
        return Err(Error::Domain("non-positive denominator in receiver constants".into()));
    }
    let a2 = p.r_cell + p.r_sol + p.a_cell * ((p.r_cop + p.r_cer) / p.a_teg + p.r_intercon / spreading);
    let a5 = p.a_cell * (p.r_intercon / spreading + p.r_cer / p.a_teg + p.r_heat_exch);
    Ok(ReceiverConstants {
        a1: p.eta_opt * p.c_g * p.dni,
        a2,
        a3: p.a_cell * p.l / k_denominator,
        a4: p.t_air,
        a5,
        a6: -p.eta_cell_ref * p.gamma_cell,
        a7: p.eta_cell_ref * (1.0 + 25.0 * p.gamma_cell),
        a8: (1.0 + p.zt).sqrt(),
        a9: KELVIN_OFFSET,
    })
}

fn nonzero(v: Complex64, what: &str) -> Result<Complex64> {
    if v.re == 0.0 && v.im == 0.0 {
        Err(Error::Domain(format!("{what} vanishes")))
    } else {
        Ok(v)
    }
}

impl ReceiverConstants {
    /// `1 + a1 a2 a6`, common denominator of the elimination.
    fn elimination_denominator(&self) -> Result<f64> {
        let d = 1.0 + self.a1 * self.a2 * self.a6;
        if d == 0.0 {
            Err(Error::Domain("1 + a1*a2*a6 vanishes".into()))
        } else {
            Ok(d)
        }
    }

    /// `a8 (x2 + a9) + (x3 + a9)`.
    fn teg_denominator(&self, x2: Complex64, x3: Complex64) -> Result<Complex64> {
        nonzero(self.a8 * (x2 + self.a9) + (x3 + self.a9), "a8(x2+a9)+(x3+a9)")
    }

    /// Heat-flow factor shared by both reduced equations.
    fn reduced_factor(&self, x2: Complex64, x3: Complex64) -> Result<Complex64> {
        let num = (self.a6 * x2 + self.a7 - 1.0) * (self.a8 * (x3 + self.a9) + (x2 + self.a9));
        Ok(num / (self.elimination_denominator()? * self.teg_denominator(x2, x3)?))
    }
}

/// The five balance residuals, `state − model`.
pub fn f_full(x: &[Complex64], c: &ReceiverConstants) -> Result<Vec<Complex64>> {
    if x.len() != 5 {
        return Err(Error::DimensionMismatch {
            expected: 5,
            got: x.len(),
        });
    }
    let (x1, x2, x3, x4, x5) = (x[0], x[1], x[2], x[3], x[4]);
    let hot = nonzero(x2 + c.a9, "x2 + a9")?;
    let ratio = (x3 + c.a9) / hot;
    let teg = nonzero(c.a8 + ratio, "a8 + (x3+a9)/(x2+a9)")?;
    let heat = c.a1 * (1.0 - x4);
    Ok(vec![
        x1 - x2 - c.a2 * heat,
        x2 - x3 - c.a3 * heat * (1.0 - x5),
        x3 - c.a4 - c.a5 * heat * (1.0 - x5),
        x4 - c.a6 * x1 - c.a7,
        x5 - (c.a8 - 1.0) * (1.0 - ratio) / teg,
    ])
}

/// The two reduced residuals in `(T_hot, T_cold)`, `state − model`.
pub fn f_reduced(x: &[Complex64], c: &ReceiverConstants) -> Result<Vec<Complex64>> {
    if x.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: x.len(),
        });
    }
    let (x2, x3) = (x[0], x[1]);
    let q = c.reduced_factor(x2, x3)?;
    Ok(vec![x2 - x3 + c.a1 * c.a3 * q, x3 - c.a4 + c.a1 * c.a5 * q])
}

/// Recovers `(T_cell, η_cell, η_TEG)` from `(T_hot, T_cold)`.
pub fn back_substitute(
    x2: Complex64,
    x3: Complex64,
    c: &ReceiverConstants,
) -> Result<(Complex64, Complex64, Complex64)> {
    let d = c.elimination_denominator()?;
    let teg = c.teg_denominator(x2, x3)?;
    let x1 = (x2 - c.a1 * c.a2 * (c.a7 - 1.0)) / d;
    let x4 = (c.a6 * (c.a1 * c.a2 + x2) + c.a7) / d;
    let x5 = (c.a8 - 1.0) * (x2 - x3) / teg;
    Ok((x1, x4, x5))
}

/// Solver-facing 5-variable system (`model − state`).
pub fn full_system(p: &ReceiverParams) -> Result<NonlinearSystem> {
    let c = derive_constants(p)?;
    Ok(NonlinearSystem::new("receiver5", 5, move |x| f_full(x, &c)).negated())
}

/// Solver-facing 2-variable system in `(T_hot, T_cold)` (`model − state`).
pub fn reduced_system(p: &ReceiverParams) -> Result<NonlinearSystem> {
    let c = derive_constants(p)?;
    Ok(reduced_system_from(c))
}

pub(crate) fn reduced_system_from(c: ReceiverConstants) -> NonlinearSystem {
    NonlinearSystem::new("receiver2", 2, move |x| f_reduced(x, &c)).negated()
}
