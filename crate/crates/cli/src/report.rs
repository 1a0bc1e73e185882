//! Report rendering. Text output is a fixed-width table with 8 decimals;
//! csv and json-lines keep full `f64` precision.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use fracpn::receiver::{write_solutions, ReceiverSolution, ReceiverStatus};
use fracpn::vector::format_complex;
use fracpn::CVector;
use serde_json::{json, Value};

const DECIMALS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    JsonLines,
}

#[derive(Debug, Clone)]
pub struct RootRow {
    pub alpha: f64,
    pub root: CVector,
    pub step_norm: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub status: String,
}

#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub lines: Vec<(String, Value)>,
}

impl Summary {
    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.lines.push((key.to_string(), value.into()));
    }
}

fn fixed(v: f64) -> String {
    format!("{v:.DECIMALS$}")
}

fn sci(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.DECIMALS$e}")
    } else {
        v.to_string()
    }
}

fn opt_fixed(v: Option<f64>) -> String {
    v.map(fixed).unwrap_or_else(|| "-".into())
}

fn json_f64(v: f64) -> Value {
    // NaN and infinities have no JSON literal
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn write_table(out: &mut dyn Write, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(header))?;
    for row in rows {
        writeln!(out, "{}", line(row))?;
    }
    Ok(())
}

fn write_summary_text(out: &mut dyn Write, summary: &Summary) -> Result<()> {
    for (k, v) in &summary.lines {
        match v {
            Value::Number(n) if n.is_f64() => writeln!(out, "{k}: {}", fixed(n.as_f64().unwrap_or(f64::NAN)))?,
            Value::String(s) => writeln!(out, "{k}: {s}")?,
            other => writeln!(out, "{k}: {other}")?,
        }
    }
    Ok(())
}

pub fn write_roots(out: &mut dyn Write, format: Format, dim: usize, rows: &[RootRow], summary: &Summary) -> Result<()> {
    match format {
        Format::Text => {
            let mut header = vec!["alpha".to_string()];
            header.extend((1..=dim).map(|k| format!("x{k}")));
            header.extend(["step norm", "residual norm", "n", "status"].map(String::from));
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v = vec![fixed(r.alpha)];
                    v.extend(r.root.iter().map(|z| format_complex(*z, DECIMALS)));
                    v.extend([
                        sci(r.step_norm),
                        sci(r.residual_norm),
                        r.iterations.to_string(),
                        r.status.clone(),
                    ]);
                    v
                })
                .collect();
            write_table(out, &header, &cells)?;
            write_summary_text(out, summary)?;
        }
        Format::Csv => {
            let mut header = vec!["alpha".to_string()];
            for k in 1..=dim {
                header.push(format!("x{k}_re"));
                header.push(format!("x{k}_im"));
            }
            header.extend(["step_norm", "residual_norm", "iterations", "status"].map(String::from));
            writeln!(out, "{}", header.join(","))?;
            for r in rows {
                let mut v = vec![r.alpha.to_string()];
                for z in r.root.iter() {
                    v.push(z.re.to_string());
                    v.push(z.im.to_string());
                }
                v.extend([
                    r.step_norm.to_string(),
                    r.residual_norm.to_string(),
                    r.iterations.to_string(),
                    r.status.clone(),
                ]);
                writeln!(out, "{}", v.join(","))?;
            }
        }
        Format::JsonLines => {
            for r in rows {
                let root: Vec<Value> = r.root.iter().map(|z| json!([json_f64(z.re), json_f64(z.im)])).collect();
                let line = json!({
                    "alpha": json_f64(r.alpha),
                    "root": root,
                    "step_norm": json_f64(r.step_norm),
                    "residual_norm": json_f64(r.residual_norm),
                    "iterations": r.iterations,
                    "status": r.status,
                });
                writeln!(out, "{line}")?;
            }
            if !summary.lines.is_empty() {
                let map: serde_json::Map<String, Value> = summary.lines.iter().cloned().collect();
                writeln!(out, "{}", json!({ "summary": map }))?;
            }
        }
    }
    Ok(())
}

pub fn write_batch(out: &mut dyn Write, format: Format, solutions: &[ReceiverSolution]) -> Result<()> {
    match format {
        Format::Text => {
            let header = [
                "dni",
                "t_air",
                "alpha",
                "T_cell",
                "T_hot",
                "T_cold",
                "eta_cell",
                "eta_TEG",
                "step norm",
                "residual norm",
                "n",
                "status",
            ]
            .map(String::from);
            let cells: Vec<Vec<String>> = solutions
                .iter()
                .map(|s| {
                    vec![
                        s.dni.to_string(),
                        s.t_air.to_string(),
                        opt_fixed(s.alpha),
                        opt_fixed(s.t_cell),
                        opt_fixed(s.t_hot),
                        opt_fixed(s.t_cold),
                        opt_fixed(s.eta_cell),
                        opt_fixed(s.eta_teg),
                        sci(s.step_norm),
                        sci(s.residual_norm),
                        s.iterations.to_string(),
                        s.status.to_string(),
                    ]
                })
                .collect();
            write_table(out, &header, &cells)?;
            let converged = solutions
                .iter()
                .filter(|s| s.status == ReceiverStatus::Converged)
                .count();
            writeln!(out, "rows: {}", solutions.len())?;
            writeln!(out, "converged: {converged}")?;
        }
        Format::Csv => write_solutions(out, solutions)?,
        Format::JsonLines => {
            for s in solutions {
                writeln!(out, "{}", serde_json::to_string(s)?)?;
            }
        }
    }
    Ok(())
}
