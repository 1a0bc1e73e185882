mod config;
mod report;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fracpn::receiver::{batch_solve, read_measurements, write_solutions, ReceiverStatus};
use fracpn::systems::{lookup, SystemEntry, SYSTEM_NAMES};
use fracpn::vector::parse_complex;
use fracpn::{alpha_sweep, estimate_order, solve_traced, CVector, IterationTrace, SolverConfig, SweepConfig};
use serde_json::json;

use config::{Settings, PARAMS_ENV};
use report::{Format, RootRow, Summary};

/// Fractional pseudo-Newton root finder.
#[derive(Parser)]
#[command(name = "fracpn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a registered system from one initial point.
    Solve(SolveArgs),
    /// Solve over a grid of fractional orders and report the distinct roots.
    Sweep(SweepArgs),
    /// Solve the reduced receiver system for every row of a measurement CSV.
    Batch(BatchArgs),
    /// List the registered systems.
    ListSystems,
}

#[derive(Args)]
struct Common {
    /// Settings file of `key = value` lines (receiver parameters and solver keys).
    #[arg(long, env = PARAMS_ENV)]
    params: Option<PathBuf>,
    /// Extra `key=value` setting; overrides the settings file. Repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// ε added to every diagonal entry of the preconditioner.
    #[arg(long)]
    eps: Option<f64>,
    /// Stop when both the step and the residual norm are at most this.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Imaginary parts of magnitude at most 10^-m are dropped after each step.
    #[arg(long, value_name = "M")]
    round_digits: Option<u32>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    system: String,
    /// Initial point, comma-separated; components may be complex (`1.5-2i`).
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    /// Fractional order.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Write every iterate as JSON lines to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    system: String,
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_max: Option<f64>,
    #[arg(long)]
    alpha_step: Option<f64>,
    /// Orders closer than this to an integer are skipped.
    #[arg(long)]
    integer_exclusion: Option<f64>,
    /// Roots closer than this are reported once.
    #[arg(long)]
    dedup_tol: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BatchArgs {
    /// Measurement CSV with columns dni,t_air,x0_2,x0_3[,alpha].
    #[arg(long)]
    input: PathBuf,
    /// Write the solution CSV here as well.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    common: Common,
}

/// Exit status for runs that completed but did not fully converge.
const PARTIAL: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Batch(a) => cmd_batch(a),
        Command::ListSystems => cmd_list(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn parse_x0(text: &str) -> Result<CVector> {
    text.split(',')
        .map(|s| parse_complex(s).ok_or_else(|| anyhow!("cannot parse initial component '{}'", s.trim())))
        .collect::<Result<Vec<_>>>()
        .map(CVector::new)
}

fn system_entry(name: &str, settings: &Settings) -> Result<SystemEntry> {
    if !SYSTEM_NAMES.contains(&name) {
        bail!("unknown system '{name}' (known: {})", SYSTEM_NAMES.join(", "));
    }
    lookup(name, &settings.receiver).ok_or_else(|| anyhow!("cannot build system '{name}' from the receiver parameters"))
}

fn solver_config(c: &Common, s: &Settings, entry_eps: f64, entry_tol: f64, alpha: Option<f64>) -> Result<SolverConfig> {
    let d = SolverConfig::default();
    let cfg = SolverConfig {
        alpha: s.resolve("alpha", alpha, d.alpha),
        epsilon: s.resolve("eps", c.eps, entry_eps),
        tol: s.resolve("tol", c.tol, entry_tol),
        max_iter: s.resolve_count("max_iter", c.max_iter, d.max_iter)?,
        round_digits: s.resolve_count(
            "round_digits",
            c.round_digits.map(|m| m as usize),
            d.round_digits as usize,
        )? as u32,
        ..d
    };
    cfg.validate()?;
    Ok(cfg)
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None | Some(0) => Ok(job()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(job)),
    }
}

fn stdout() -> BufWriter<io::StdoutLock<'static>> {
    BufWriter::new(io::stdout().lock())
}

fn write_trace(path: &PathBuf, trace: &IterationTrace) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create trace file {}", path.display()))?;
    let mut w = BufWriter::new(file);
    let num = |v: f64| {
        serde_json::Number::from_f64(v)
            .map(serde_json::Value::Number)
            .unwrap_or_default()
    };
    for (i, e) in trace.entries.iter().enumerate() {
        let iterate: Vec<_> = e.iterate.iter().map(|z| json!([num(z.re), num(z.im)])).collect();
        let line = json!({
            "iteration": i,
            "iterate": iterate,
            "step_norm": e.step_norm.map(num),
            "residual_norm": num(e.residual_norm),
        });
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> Result<u8> {
    let settings = Settings::load(a.common.params.as_deref(), &a.common.overrides)?;
    let entry = system_entry(&a.system, &settings)?;
    let cfg = solver_config(&a.common, &settings, entry.default_epsilon, entry.default_tol, a.alpha)?;
    let x0 = parse_x0(&a.x0)?;
    let (r, trace) = solve_traced(&entry.system, &x0, &cfg)?;
    let converged = r.converged();

    let mut summary = Summary::default();
    if let Some(path) = &a.trace {
        write_trace(path, &trace)?;
        match estimate_order(&trace) {
            Ok(p) => summary.push("estimated order", p),
            Err(e) => summary.push("estimated order", format!("unavailable ({e})")),
        }
    }
    let row = RootRow {
        alpha: r.alpha_used,
        step_norm: r.step_norm,
        residual_norm: r.residual_norm,
        iterations: r.iterations,
        status: r.status.to_string(),
        root: r.root,
    };
    let mut out = stdout();
    report::write_roots(&mut out, a.common.format, entry.system.dimension(), &[row], &summary)?;
    out.flush()?;
    Ok(if converged { 0 } else { PARTIAL })
}

fn cmd_sweep(a: SweepArgs) -> Result<u8> {
    let settings = Settings::load(a.common.params.as_deref(), &a.common.overrides)?;
    let entry = system_entry(&a.system, &settings)?;
    let cfg = solver_config(&a.common, &settings, entry.default_epsilon, entry.default_tol, None)?;
    let d = SweepConfig::default();
    let sweep = SweepConfig {
        alpha_min: settings.resolve("alpha_min", a.alpha_min, d.alpha_min),
        alpha_max: settings.resolve("alpha_max", a.alpha_max, d.alpha_max),
        alpha_step: settings.resolve("alpha_step", a.alpha_step, d.alpha_step),
        integer_exclusion_radius: settings.resolve(
            "integer_exclusion",
            a.integer_exclusion,
            d.integer_exclusion_radius,
        ),
        dedup_tol: settings.resolve("dedup_tol", a.dedup_tol, d.dedup_tol),
    };
    let threads = settings.resolve_count("threads", a.threads, 0)?;
    let x0 = parse_x0(&a.x0)?;

    let started = Instant::now();
    let rep = with_threads(Some(threads), || alpha_sweep(&entry.system, &x0, &cfg, &sweep))??;
    eprintln!(
        "sweep of {} orders finished in {:.3} s",
        rep.grid_size,
        started.elapsed().as_secs_f64()
    );

    let rows: Vec<RootRow> = rep
        .records
        .iter()
        .map(|r| RootRow {
            alpha: r.alpha,
            root: r.root.clone(),
            step_norm: r.step_norm,
            residual_norm: r.residual_norm,
            iterations: r.iterations,
            status: "Converged".into(),
        })
        .collect();
    let mut summary = Summary::default();
    summary.push("grid size", rep.grid_size);
    summary.push("converged", rep.converged);
    summary.push("distinct roots", rep.records.len());
    let mut out = stdout();
    report::write_roots(&mut out, a.common.format, entry.system.dimension(), &rows, &summary)?;
    out.flush()?;
    Ok(0)
}

fn cmd_batch(a: BatchArgs) -> Result<u8> {
    let settings = Settings::load(a.common.params.as_deref(), &a.common.overrides)?;
    // receiver defaults
    let entry = system_entry("receiver2", &settings)?;
    let template = solver_config(&a.common, &settings, entry.default_epsilon, entry.default_tol, None)?;
    let threads = settings.resolve_count("threads", a.threads, 0)?;

    let file = File::open(&a.input).with_context(|| format!("cannot open {}", a.input.display()))?;
    let rows = read_measurements(BufReader::new(file)).with_context(|| format!("in {}", a.input.display()))?;

    let started = Instant::now();
    let solutions = with_threads(Some(threads), || batch_solve(&rows, &settings.receiver, &template))??;
    for (i, s) in solutions.iter().enumerate() {
        eprintln!("row {}: {} after {} iterations", i + 1, s.status, s.iterations);
    }
    eprintln!(
        "batch of {} rows finished in {:.3} s",
        rows.len(),
        started.elapsed().as_secs_f64()
    );

    if let Some(path) = &a.output {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        write_solutions(BufWriter::new(file), &solutions)?;
    }
    let mut out = stdout();
    report::write_batch(&mut out, a.common.format, &solutions)?;
    out.flush()?;
    let all = solutions.iter().all(|s| s.status == ReceiverStatus::Converged);
    Ok(if all { 0 } else { PARTIAL })
}

fn cmd_list() -> Result<u8> {
    let settings = Settings::default();
    let mut out = stdout();
    for name in SYSTEM_NAMES {
        let e = system_entry(name, &settings)?;
        writeln!(
            out,
            "{name:<10} dim {}  eps {:e}  tol {:e}  {}",
            e.system.dimension(),
            e.default_epsilon,
            e.default_tol,
            e.description
        )?;
    }
    out.flush()?;
    Ok(0)
}
