//! The rounded fractional pseudo-Newton iteration
//! `x_{i+1} = Rnd(x_i − P_{ε,β}(x_i) f(x_i), m)` and its stopping logic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional::p_matrix;
use crate::system::NonlinearSystem;
use crate::vector::CVector;

/// Iteration parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Fractional order, in `[−2, 2]` and at least 0.01 away from any integer.
    pub alpha: f64,
    /// Diagonal regularizer added to the preconditioner, `0 < ε < 1`.
    pub epsilon: f64,
    /// Both the step norm and the residual norm must reach this to converge.
    pub tol: f64,
    pub max_iter: usize,
    /// Imaginary parts with magnitude `≤ 10^(−round_digits)` are dropped each step.
    pub round_digits: u32,
    /// The run is declared divergent once `‖x_i‖₂` exceeds this.
    pub diverge_bound: f64,
}

/// Smallest admissible distance between `alpha` and an integer.
pub const MIN_INTEGER_DISTANCE: f64 = 0.01;

impl SolverConfig {
    pub fn new(alpha: f64) -> Self {
        SolverConfig {
            alpha,
            ..Self::default()
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_round_digits(mut self, m: u32) -> Self {
        self.round_digits = m;
        self
    }

    pub fn with_diverge_bound(mut self, bound: f64) -> Self {
        self.diverge_bound = bound;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.alpha;
        if !a.is_finite() || !(-2.0..=2.0).contains(&a) {
            return Err(Error::InvalidConfig(format!("alpha {a} outside [-2, 2]")));
        }
        // small slack so that grid values like 0.99 are not rejected by rounding noise
        if (a - a.round()).abs() < MIN_INTEGER_DISTANCE - 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "alpha {a} within {MIN_INTEGER_DISTANCE} of an integer"
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol {} must be positive", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if self.round_digits == 0 {
            return Err(Error::InvalidConfig("round_digits must be positive".into()));
        }
        if !(self.diverge_bound > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "diverge_bound {} must be positive",
                self.diverge_bound
            )));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha: 0.5,
            epsilon: 1e-3,
            tol: 1e-6,
            max_iter: 5000,
            round_digits: 5,
            diverge_bound: 1e8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Converged,
    MaxIterations,
    Diverged,
    NumericalFailure,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::MaxIterations => "MaxIterations",
            Status::Diverged => "Diverged",
            Status::NumericalFailure => "NumericalFailure",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub root: CVector,
    /// `‖x_n − x_{n−1}‖₂`; NaN when no step completed.
    pub step_norm: f64,
    /// `‖f(x_n)‖₂`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub status: Status,
    pub alpha_used: f64,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iterate: CVector,
    /// `None` for the initial point.
    pub step_norm: Option<f64>,
    pub residual_norm: f64,
}

/// Every iterate of a run, starting with `x0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub entries: Vec<TraceEntry>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Step norms of all entries after the first.
    pub fn step_norms(&self) -> Vec<f64> {
        self.entries.iter().filter_map(|e| e.step_norm).collect()
    }
}

/// Drops imaginary parts of magnitude at most `10^(−m)`.
pub fn rnd(v: &CVector, m: u32) -> CVector {
    let threshold = 10f64.powi(-(m as i32));
    v.iter()
        .map(|z| {
            if z.im.abs() <= threshold {
                num_complex::Complex64::new(z.re, 0.0)
            } else {
                *z
            }
        })
        .collect()
}

/// One unrounded step `x − P_{ε,β}(x) f(x)`.
pub fn phi_step(f: &NonlinearSystem, x: &CVector, alpha: f64, epsilon: f64) -> Result<CVector> {
    let fx = f.eval(x)?;
    step_with_residual(x, &fx, alpha, epsilon)
}

fn step_with_residual(x: &CVector, fx: &CVector, alpha: f64, epsilon: f64) -> Result<CVector> {
    let p = p_matrix(x, alpha, epsilon)?;
    let correction = p.apply(fx);
    let next: CVector = x.iter().zip(correction.iter()).map(|(a, b)| a - b).collect();
    if !next.is_finite() {
        return Err(Error::NumericalFailure(format!("non-finite iterate {next}")));
    }
    Ok(next)
}

pub fn solve(f: &NonlinearSystem, x0: &CVector, config: &SolverConfig) -> Result<SolveResult> {
    run(f, x0, config, None)
}

pub fn solve_traced(f: &NonlinearSystem, x0: &CVector, config: &SolverConfig) -> Result<(SolveResult, IterationTrace)> {
    let mut trace = IterationTrace::default();
    let result = run(f, x0, config, Some(&mut trace))?;
    Ok((result, trace))
}

fn run(
    f: &NonlinearSystem,
    x0: &CVector,
    config: &SolverConfig,
    mut trace: Option<&mut IterationTrace>,
) -> Result<SolveResult> {
    config.validate()?;
    f.check_dimension(x0)?;
    if !x0.is_finite() {
        return Err(Error::Domain(format!("initial point {x0} is not finite")));
    }

    let mut x = x0.clone();
    let mut step_norm = f64::NAN;
    let mut iterations = 0;
    let finish = |x: CVector, step_norm, residual_norm, iterations, status| SolveResult {
        root: x,
        step_norm,
        residual_norm,
        iterations,
        status,
        alpha_used: config.alpha,
    };

    let mut fx = match f.eval(&x) {
        Ok(v) if v.is_finite() => v,
        _ => return Ok(finish(x, step_norm, f64::NAN, 0, Status::NumericalFailure)),
    };
    let mut residual_norm = fx.norm2();
    if let Some(t) = trace.as_deref_mut() {
        t.entries.push(TraceEntry {
            iterate: x.clone(),
            step_norm: None,
            residual_norm,
        });
    }

    while iterations < config.max_iter {
        let next = match step_with_residual(&x, &fx, config.alpha, config.epsilon) {
            Ok(v) => rnd(&v, config.round_digits),
            Err(_) => {
                return Ok(finish(
                    x,
                    step_norm,
                    residual_norm,
                    iterations,
                    Status::NumericalFailure,
                ))
            }
        };
        let next_fx = match f.eval(&next) {
            Ok(v) if v.is_finite() => v,
            _ => {
                return Ok(finish(
                    x,
                    step_norm,
                    residual_norm,
                    iterations,
                    Status::NumericalFailure,
                ))
            }
        };
        iterations += 1;
        step_norm = next.distance(&x);
        residual_norm = next_fx.norm2();
        x = next;
        fx = next_fx;
        if let Some(t) = trace.as_deref_mut() {
            t.entries.push(TraceEntry {
                iterate: x.clone(),
                step_norm: Some(step_norm),
                residual_norm,
            });
        }

        if step_norm <= config.tol && residual_norm <= config.tol {
            return Ok(finish(x, step_norm, residual_norm, iterations, Status::Converged));
        }
        if x.norm2() > config.diverge_bound {
            return Ok(finish(x, step_norm, residual_norm, iterations, Status::Diverged));
        }
    }
    Ok(finish(x, step_norm, residual_norm, iterations, Status::MaxIterations))
}
