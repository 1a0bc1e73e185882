//! Per-measurement solves of the reduced receiver system.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{back_substitute, derive_constants, reduced_system_from, ReceiverParams};
use crate::error::{Error, Result};
use crate::solver::{solve, SolveResult, SolverConfig, Status};
use crate::sweep::{alpha_grid, SweepConfig};
use crate::vector::CVector;

/// One measured operating point and the initial guess for `(T_hot, T_cold)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRow {
    pub dni: f64,
    pub t_air: f64,
    pub x0_2: f64,
    pub x0_3: f64,
    /// Fractional order; when absent an α-sweep picks the first that converges.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReceiverStatus {
    Converged,
    MaxIterations,
    Diverged,
    NumericalFailure,
    /// Converged, but to a root with imaginary parts above the rounding threshold.
    NonPhysical,
}

impl From<Status> for ReceiverStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Converged => ReceiverStatus::Converged,
            Status::MaxIterations => ReceiverStatus::MaxIterations,
            Status::Diverged => ReceiverStatus::Diverged,
            Status::NumericalFailure => ReceiverStatus::NumericalFailure,
        }
    }
}

impl ReceiverStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReceiverStatus::Converged => "Converged",
            ReceiverStatus::MaxIterations => "MaxIterations",
            ReceiverStatus::Diverged => "Diverged",
            ReceiverStatus::NumericalFailure => "NumericalFailure",
            ReceiverStatus::NonPhysical => "NonPhysical",
        }
    }
}

impl std::fmt::Display for ReceiverStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Temperatures in °C. Physical fields are `None` unless the row converged
/// to a real root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverSolution {
    pub dni: f64,
    pub t_air: f64,
    pub alpha: Option<f64>,
    pub t_cell: Option<f64>,
    pub t_hot: Option<f64>,
    pub t_cold: Option<f64>,
    pub eta_cell: Option<f64>,
    pub eta_teg: Option<f64>,
    pub step_norm: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub status: ReceiverStatus,
    /// Last `(T_hot, T_cold)` iterate, kept for diagnostics.
    #[serde(skip)]
    pub final_iterate: Option<CVector>,
}

impl ReceiverSolution {
    fn failed(row: &MeasurementRow, alpha: Option<f64>, status: ReceiverStatus) -> Self {
        ReceiverSolution {
            dni: row.dni,
            t_air: row.t_air,
            alpha,
            t_cell: None,
            t_hot: None,
            t_cold: None,
            eta_cell: None,
            eta_teg: None,
            step_norm: f64::NAN,
            residual_norm: f64::NAN,
            iterations: 0,
            status,
            final_iterate: None,
        }
    }

    /// The full 5-vector `(T_cell, T_hot, T_cold, η_cell, η_TEG)` when available.
    pub fn state(&self) -> Option<[f64; 5]> {
        Some([self.t_cell?, self.t_hot?, self.t_cold?, self.eta_cell?, self.eta_teg?])
    }
}

/// Solves every row independently (in parallel on the current rayon pool);
/// output order always matches input order.
pub fn batch_solve(
    rows: &[MeasurementRow],
    base: &ReceiverParams,
    template: &SolverConfig,
) -> Result<Vec<ReceiverSolution>> {
    if rows.is_empty() {
        return Err(Error::InsufficientData("no data rows".into()));
    }
    template.with_alpha(0.5).validate()?;
    Ok(rows.par_iter().map(|row| solve_row(row, base, template)).collect())
}

fn solve_row(row: &MeasurementRow, base: &ReceiverParams, template: &SolverConfig) -> ReceiverSolution {
    let params = base.with_conditions(row.dni, row.t_air);
    let Ok(constants) = derive_constants(&params) else {
        return ReceiverSolution::failed(row, row.alpha, ReceiverStatus::NumericalFailure);
    };
    let system = reduced_system_from(constants);
    let x0 = CVector::from_real(&[row.x0_2, row.x0_3]);

    let attempt = |alpha: f64| solve(&system, &x0, &template.with_alpha(alpha)).ok();
    let result: Option<SolveResult> = match row.alpha {
        Some(alpha) => attempt(alpha),
        None => {
            let grid = alpha_grid(&SweepConfig::default()).unwrap_or_default();
            let mut last = None;
            for alpha in grid {
                let r = attempt(alpha);
                if r.as_ref().is_some_and(|r| r.converged()) {
                    last = r;
                    break;
                }
                last = r.or(last);
            }
            last
        }
    };
    let Some(result) = result else {
        return ReceiverSolution::failed(row, row.alpha, ReceiverStatus::NumericalFailure);
    };

    let mut out = ReceiverSolution {
        alpha: Some(result.alpha_used),
        step_norm: result.step_norm,
        residual_norm: result.residual_norm,
        iterations: result.iterations,
        status: result.status.into(),
        final_iterate: Some(result.root.clone()),
        ..ReceiverSolution::failed(row, None, ReceiverStatus::NumericalFailure)
    };
    if result.status != Status::Converged {
        return out;
    }
    let threshold = 10f64.powi(-(template.round_digits as i32));
    if result.root.max_abs_imag() > threshold {
        out.status = ReceiverStatus::NonPhysical;
        return out;
    }
    let (x2, x3) = (result.root[0], result.root[1]);
    match back_substitute(x2, x3, &constants) {
        Ok((x1, x4, x5)) => {
            out.t_cell = Some(x1.re);
            out.t_hot = Some(x2.re);
            out.t_cold = Some(x3.re);
            out.eta_cell = Some(x4.re);
            out.eta_teg = Some(x5.re);
        }
        Err(_) => out.status = ReceiverStatus::NumericalFailure,
    }
    out
}

const INPUT_COLUMNS: [&str; 4] = ["dni", "t_air", "x0_2", "x0_3"];

pub const SOLUTION_HEADER: [&str; 12] = [
    "dni",
    "t_air",
    "alpha",
    "t_cell",
    "t_hot",
    "t_cold",
    "eta_cell",
    "eta_teg",
    "step_norm",
    "residual_norm",
    "iterations",
    "status",
];

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Reads `dni,t_air,x0_2,x0_3[,alpha]` (header required, any column order).
pub fn read_measurements<R: Read>(reader: R) -> Result<Vec<MeasurementRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_ascii_lowercase())
        .collect();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(INPUT_COLUMNS) {
        *slot = column(name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("missing required column '{name}'"),
        })?;
    }
    let alpha_idx = column("alpha");

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize, name: &str| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid {name} value '{raw}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite {name} value '{raw}'"),
                });
            }
            Ok(v)
        };
        let dni = field(idx[0], "dni")?;
        if dni < 0.0 {
            return Err(Error::Parse {
                line,
                message: format!("dni must be non-negative, got {dni}"),
            });
        }
        let alpha = match alpha_idx {
            Some(i) if !record.get(i).unwrap_or("").is_empty() => Some(field(i, "alpha")?),
            _ => None,
        };
        rows.push(MeasurementRow {
            dni,
            t_air: field(idx[1], "t_air")?,
            x0_2: field(idx[2], "x0_2")?,
            x0_3: field(idx[3], "x0_3")?,
            alpha,
        });
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData("no data rows".into()));
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes solutions at full precision (shortest round-trip decimal form).
pub fn write_solutions<W: Write>(writer: W, solutions: &[ReceiverSolution]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SOLUTION_HEADER).map_err(csv_error)?;
    for s in solutions {
        w.write_record([
            s.dni.to_string(),
            s.t_air.to_string(),
            opt(s.alpha),
            opt(s.t_cell),
            opt(s.t_hot),
            opt(s.t_cold),
            opt(s.eta_cell),
            opt(s.eta_teg),
            s.step_norm.to_string(),
            s.residual_norm.to_string(),
            s.iterations.to_string(),
            s.status.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
