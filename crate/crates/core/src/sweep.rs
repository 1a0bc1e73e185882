//! Harvesting several roots from one initial point by sweeping the fractional
//! order, plus empirical order-of-convergence estimation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{solve, IterationTrace, SolveResult, SolverConfig, Status};
use crate::system::NonlinearSystem;
use crate::vector::CVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    /// Grid points closer than this to an integer are skipped.
    pub integer_exclusion_radius: f64,
    /// Roots closer than this (Euclidean) are merged.
    pub dedup_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            alpha_min: -2.0,
            alpha_max: 2.0,
            alpha_step: 0.005,
            integer_exclusion_radius: 0.01,
            dedup_tol: 1e-4,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_min <= self.alpha_max) {
            return Err(Error::InvalidConfig(format!(
                "alpha_min {} exceeds alpha_max {}",
                self.alpha_min, self.alpha_max
            )));
        }
        if !(self.alpha_step > 0.0) {
            return Err(Error::InvalidConfig("alpha_step must be positive".into()));
        }
        if !(self.integer_exclusion_radius > 0.0) || !(self.dedup_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "exclusion radius and dedup_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Uniform grid over `[alpha_min, alpha_max]` with the integer bands removed,
/// ascending.
pub fn alpha_grid(cfg: &SweepConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let span = cfg.alpha_max - cfg.alpha_min;
    let n = (span / cfg.alpha_step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|j| cfg.alpha_min + j as f64 * cfg.alpha_step)
        // snap away representation noise so 0.99 stays 0.99
        .map(|a| (a * 1e10).round() / 1e10)
        .filter(|a| (a - a.round()).abs() >= cfg.integer_exclusion_radius - 1e-12)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub root: CVector,
    pub alpha: f64,
    pub step_norm: f64,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl RootRecord {
    fn from_result(r: SolveResult) -> Self {
        RootRecord {
            alpha: r.alpha_used,
            step_norm: r.step_norm,
            residual_norm: r.residual_norm,
            iterations: r.iterations,
            root: r.root,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Distinct roots, ascending in the α that produced them.
    pub records: Vec<RootRecord>,
    pub grid_size: usize,
    pub converged: usize,
}

/// Runs one solve per grid order (in parallel on the current rayon pool) and
/// keeps the distinct converged roots.
pub fn alpha_sweep(
    f: &NonlinearSystem,
    x0: &CVector,
    template: &SolverConfig,
    sweep: &SweepConfig,
) -> Result<SweepReport> {
    f.check_dimension(x0)?;
    let grid = alpha_grid(sweep)?;
    let results: Vec<Option<SolveResult>> = grid
        .par_iter()
        .map(|&alpha| solve(f, x0, &template.with_alpha(alpha)).ok())
        .collect();
    let mut converged: Vec<RootRecord> = results
        .into_iter()
        .flatten()
        .filter(|r| r.status == Status::Converged)
        .map(RootRecord::from_result)
        .collect();
    let count = converged.len();
    converged.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    // a cluster's representative may come from a later order than its first member
    let mut records = dedup_roots(converged, sweep.dedup_tol);
    records.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    Ok(SweepReport {
        records,
        grid_size: grid.len(),
        converged: count,
    })
}

/// Greedy clustering in arrival order. Each cluster is represented by its
/// smallest-residual member; representatives end up pairwise more than
/// `dedup_tol` apart. Conjugate roots are distinct points and are kept apart.
pub fn dedup_roots(records: Vec<RootRecord>, dedup_tol: f64) -> Vec<RootRecord> {
    let mut reps: Vec<RootRecord> = Vec::new();
    for rec in records {
        match reps.iter().position(|r| r.root.distance(&rec.root) <= dedup_tol) {
            None => reps.push(rec),
            Some(i) => {
                if rec.residual_norm < reps[i].residual_norm {
                    reps[i] = rec;
                    merge_into(&mut reps, i, dedup_tol);
                }
            }
        }
    }
    reps
}

/// A replaced representative may have moved within range of others; fold
/// those in until no pair is within tolerance.
fn merge_into(reps: &mut Vec<RootRecord>, mut i: usize, tol: f64) {
    loop {
        let close = (0..reps.len()).find(|&j| j != i && reps[j].root.distance(&reps[i].root) <= tol);
        let Some(j) = close else { return };
        let keep_j = reps[j].residual_norm < reps[i].residual_norm;
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let survivor = if keep_j { reps[j].clone() } else { reps[i].clone() };
        reps.remove(hi);
        reps[lo] = survivor;
        i = lo;
    }
}

/// Empirical order `p` from `e_{i+1} ≈ C e_i^p`, fitted by least squares on
/// `(ln e_i, ln e_{i+1})` over the last `max(4, ⌈n/4⌉)` step norms.
pub fn estimate_order(trace: &IterationTrace) -> Result<f64> {
    estimate_order_from_steps(&trace.step_norms())
}

pub fn estimate_order_from_steps(steps: &[f64]) -> Result<f64> {
    let n = steps.len();
    if n < 4 {
        return Err(Error::InsufficientData(format!("{n} step norms, need at least 4")));
    }
    let tail_len = n.div_ceil(4).max(4);
    let tail = &steps[n - tail_len..];
    if tail.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InsufficientData("step norms must be positive and finite".into()));
    }
    if tail.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InsufficientData("step norms not strictly decreasing".into()));
    }
    let pts: Vec<(f64, f64)> = tail.windows(2).map(|w| (w[0].ln(), w[1].ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("degenerate step norms".into()));
    }
    Ok(sxy / sxx)
}
