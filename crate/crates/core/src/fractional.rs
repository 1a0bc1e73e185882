//! Riemann–Liouville operators in closed form on monomials, and the diagonal
//! preconditioner built from fractional derivatives of constants.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{complex_pow, gamma_real};
use crate::vector::CVector;

/// Order actually applied to component `xk`: `alpha`, or the classical order 1
/// at an exact zero where `x^(-alpha)` is singular.
pub fn beta_select(alpha: f64, xk: Complex64) -> f64 {
    if xk.re == 0.0 && xk.im == 0.0 {
        1.0
    } else {
        alpha
    }
}

/// Riemann–Liouville derivative (lower terminal 0) of order `beta` of the
/// constant 1, evaluated at `x`: `x^(−beta) / Γ(1 − beta)`.
///
/// `beta == 1` is the classical derivative and yields 0.
pub fn frac_deriv_const(x: Complex64, beta: f64) -> Result<Complex64> {
    if beta == 1.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if x.re == 0.0 && x.im == 0.0 {
        return Err(Error::Domain(format!(
            "fractional derivative of order {beta} of a constant is singular at 0"
        )));
    }
    let g = gamma_real(1.0 - beta)?;
    Ok(complex_pow(x, -beta)? / g)
}

/// `coeff · x^power`, closed under Riemann–Liouville differentiation and
/// integration with lower terminal 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub power: f64,
}

impl Monomial {
    pub fn new(coeff: f64, power: f64) -> Self {
        Monomial { coeff, power }
    }

    /// Applies the Riemann–Liouville operator of order `order` (negative
    /// orders integrate): `Γ(μ+1)/Γ(μ−order+1) · x^(μ−order)`.
    ///
    /// Requires `power > −1`. When `μ − order + 1` sits on a gamma pole the
    /// coefficient is exactly zero (e.g. the first derivative of a constant).
    pub fn rl_derivative(&self, order: f64) -> Result<Monomial> {
        if self.power <= -1.0 {
            return Err(Error::Domain(format!("monomial power {} must exceed -1", self.power)));
        }
        let num = gamma_real(self.power + 1.0)?;
        let coeff = match gamma_real(self.power - order + 1.0) {
            Ok(den) => self.coeff * num / den,
            Err(Error::Pole(_)) => 0.0,
            Err(e) => return Err(e),
        };
        Ok(Monomial::new(coeff, self.power - order))
    }

    pub fn eval(&self, x: Complex64) -> Result<Complex64> {
        if self.coeff == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.coeff * complex_pow(x, self.power)?)
    }
}

/// Diagonal preconditioner `P_{ε,β}(x)`.
///
/// Entry `(k, k)` is the order-`β(α, x_k)` derivative of the constant 1
/// at `x_k`, plus `ε`. Off-diagonal entries (derivatives of the constant 0)
/// are identically zero and are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PMatrix {
    diag: Vec<Complex64>,
}

impl PMatrix {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        if row == col {
            self.diag[row]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.size();
        (0..n).map(|j| (0..n).map(|k| self.entry(j, k)).collect()).collect()
    }

    /// `P · v`.
    pub fn apply(&self, v: &[Complex64]) -> CVector {
        self.diag.iter().zip(v).map(|(p, f)| p * f).collect()
    }
}

pub fn p_matrix(x: &CVector, alpha: f64, epsilon: f64) -> Result<PMatrix> {
    let diag = x
        .iter()
        .map(|&xk| Ok(frac_deriv_const(xk, beta_select(alpha, xk))? + epsilon))
        .collect::<Result<Vec<_>>>()?;
    Ok(PMatrix { diag })
}
