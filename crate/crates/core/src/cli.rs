//! Command-line front end: `verify`, `profile`, `phase`, `minimize`, `fit`.
//!
//! Options come from flags and, optionally, a JSON file given with
//! `--config`; flags win. Exit codes: 0 success, 1 a check failed or a solve
//! did not converge, 2 invalid invocation or configuration.

use crate::error::{Error, Result};
use crate::extreme::{oscillation_witnesses, WitnessKind};
use crate::hessian::{fit_growth_constants, hess_spectrum};
use crate::integrand::g_eval;
use crate::params::PQParams;
use crate::report::{fmt_real, write_report, write_table, Format};
use crate::variational::{
    build_problem, default_mu_reg, minimize, BoundaryData, Initialization, Integrand, Method,
    SolveOptions,
};
use crate::verifier::{sample_grid, verify_all, SampleGridSpec};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const PROFILE_HEADER: [&str; 8] = [
    "t",
    "alpha",
    "g",
    "g_prime",
    "g_double_prime",
    "lambda_radial",
    "lambda_tangent",
    "ratio",
];
pub const PHASE_HEADER: [&str; 4] = ["L", "alpha", "kind", "t_description"];
pub const SOLUTION_HEADER: [&str; 5] = ["i", "j", "x1", "x2", "u"];

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pq-elliptic",
    version,
    about = "Uniformly elliptic integrands with p-q growth"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every inequality check and write the report
    Verify(RunArgs),
    /// Tabulate g, its derivatives and the Hessian spectrum over the grid
    Profile(RunArgs),
    /// List phase-space witnesses of the exponent oscillation
    Phase(RunArgs),
    /// Minimise the discrete energy on the unit square
    Minimize(RunArgs),
    /// Fit growth and ellipticity envelope constants
    Fit(RunArgs),
}

/// Every option, as it may appear in a config file. Unset fields take the
/// defaults listed in [`RunConfig::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub subquadratic: Option<bool>,
    #[arg(long = "t-min")]
    pub t_min: Option<f64>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub refine: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "n-cells")]
    pub n_cells: Option<usize>,
    /// `saddle`, `affine:c1,c2` or `custom:v0,v1,...`
    #[arg(long)]
    pub boundary: Option<String>,
    /// `radial` or `split`
    #[arg(long)]
    pub integrand: Option<String>,
    #[arg(long = "mu-reg")]
    pub mu_reg: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// `cg` or `gd`
    #[arg(long)]
    pub method: Option<String>,
    /// Growth-fit offset in `[0, 1]`
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub cycles: Option<usize>,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long = "out")]
    #[serde(rename = "out")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON file with any of the options; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: RunConfig,
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParams(format!("bad config {}: {e}", path.display())))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overridden_by(self, other: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            p,
            q,
            epsilon,
            subquadratic,
            t_min,
            t_max,
            points,
            refine,
            seed,
            n_cells,
            boundary,
            integrand,
            mu_reg,
            tol,
            max_iter,
            method,
            mu,
            cycles,
            format,
            path
        )
    }

    /// Defaults: `p = 2`, `q = 6`, grid `[1e-6, 1e12]` with 400 points and
    /// refinement 8, seed 0, 33 cells, saddle boundary, radial integrand,
    /// nonlinear CG, 20000 iterations, `μ = 1`, 2 cycles, CSV.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let params = PQParams::new(
            self.p.unwrap_or(2.0),
            self.q.unwrap_or(6.0),
            self.epsilon,
            self.subquadratic.unwrap_or(false),
        )?;
        let defaults = SampleGridSpec::default();
        let grid = SampleGridSpec {
            t_min: self.t_min.unwrap_or(defaults.t_min),
            t_max: self.t_max.unwrap_or(defaults.t_max),
            count_log: self.points.unwrap_or(defaults.count_log),
            boundary_refine: self.refine.unwrap_or(defaults.boundary_refine),
            seed: self.seed.unwrap_or(defaults.seed),
        };
        grid.validate()?;
        let boundary: BoundaryData = self.boundary.as_deref().unwrap_or("saddle").parse()?;
        let mu_reg = self.mu_reg.unwrap_or_else(|| default_mu_reg(params.p));
        let integrand = match self.integrand.as_deref().unwrap_or("radial") {
            "radial" => Integrand::Radial { params, mu_reg },
            "split" => Integrand::Split {
                p: params.p,
                q: params.q,
                mu_reg,
            },
            other => {
                return Err(Error::InvalidProblem(format!(
                    "unknown integrand '{other}'"
                )))
            }
        };
        let method = match self.method.as_deref().unwrap_or("cg") {
            "cg" | "ncg" => Method::NonlinearCG,
            "gd" => Method::GradientDescent,
            other => return Err(Error::InvalidProblem(format!("unknown method '{other}'"))),
        };
        let mu = self.mu.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidParams(format!("mu={mu} must lie in [0, 1]")));
        }
        if let Some(tol) = self.tol {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::InvalidProblem(format!("tol={tol} must be positive")));
            }
        }
        Ok(ResolvedConfig {
            params,
            grid,
            n_cells: self.n_cells.unwrap_or(33),
            boundary,
            integrand,
            solve: SolveOptions {
                max_iter: self.max_iter.unwrap_or(20_000),
                tol: self.tol,
                method,
                init: Initialization::ZeroFill,
                ..SolveOptions::default()
            },
            mu,
            cycles: self.cycles.unwrap_or(2),
            format: self.format.unwrap_or(Format::Csv),
            path: self.path.clone(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub params: PQParams,
    pub grid: SampleGridSpec,
    pub n_cells: usize,
    pub boundary: BoundaryData,
    pub integrand: Integrand,
    pub solve: SolveOptions,
    pub mu: f64,
    pub cycles: usize,
    pub format: Format,
    pub path: Option<PathBuf>,
}

/// Parses `argv` (including the program name) and runs the command,
/// writing primary output to `out` and diagnostics to `err`.
pub fn run_command_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let (args, command) = match cli.command {
        Command::Verify(a) => (a, "verify"),
        Command::Profile(a) => (a, "profile"),
        Command::Phase(a) => (a, "phase"),
        Command::Minimize(a) => (a, "minimize"),
        Command::Fit(a) => (a, "fit"),
    };
    let config = match args
        .config
        .as_deref()
        .map(RunConfig::from_json_file)
        .transpose()
    {
        Ok(file) => file.unwrap_or_default().overridden_by(args.flags),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let resolved = match config.resolve() {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let outcome = match command {
        "verify" => run_verify(&resolved, out, err),
        "profile" => run_profile(&resolved, out),
        "phase" => run_phase(&resolved, out),
        "minimize" => run_minimize(&resolved, out),
        _ => run_fit(&resolved, out),
    };
    match outcome {
        Ok(code) => code,
        Err(e @ (Error::InvalidParams(_) | Error::InvalidGrid(_) | Error::InvalidProblem(_))) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILED
        }
    }
}

pub fn run_command<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_command_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn io_err(e: std::io::Error) -> Error {
    Error::Report(e.to_string())
}

/// Runs `emit` against the `--out` file if one was given, else `out`.
fn with_sink(
    path: &Option<PathBuf>,
    out: &mut dyn Write,
    emit: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .map_err(|e| Error::Report(format!("cannot write {}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            emit(&mut w)?;
            w.flush().map_err(io_err)
        }
        None => emit(out),
    }
}

fn run_verify(cfg: &ResolvedConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let sections = verify_all(&cfg.params, &cfg.grid)?;
    match &cfg.path {
        Some(p) => write_report(&sections, cfg.format, p)?,
        None => match cfg.format {
            Format::Csv => crate::report::report_to_csv(&sections, &mut *out)?,
            Format::Json => {
                writeln!(out, "{}", crate::report::report_to_json(&sections)?).map_err(io_err)?
            }
        },
    }
    for s in &sections {
        writeln!(
            err,
            "{:<20} records={:<6} worst_margin={} {}",
            s.name,
            s.records.len(),
            fmt_real(s.worst_margin),
            if s.all_passed { "PASS" } else { "FAIL" }
        )
        .map_err(io_err)?;
    }
    if let Some(note) = sections.first().and_then(|s| s.notes.last()) {
        writeln!(err, "note: {note}").map_err(io_err)?;
    }
    Ok(if sections.iter().all(|s| s.all_passed) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

/// Profile rows `(t, α, g, g', g'', λ_radial, λ_tangent, ratio)` on the grid.
pub fn profile_rows(params: &PQParams, grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    grid.iter()
        .map(|&t| {
            let ev = g_eval(params, t)?;
            let spec = hess_spectrum(params, t)?;
            Ok(vec![
                t,
                ev.alpha,
                ev.g,
                ev.g_prime,
                ev.g_double_prime.unwrap_or(f64::NAN),
                spec.lambda_radial,
                spec.lambda_tangent,
                spec.ratio,
            ])
        })
        .collect()
}

fn run_profile(cfg: &ResolvedConfig, out: &mut dyn Write) -> Result<i32> {
    let grid = sample_grid(&cfg.grid)?;
    let rows = profile_rows(&cfg.params, &grid)?;
    with_sink(&cfg.path, out, |w| match cfg.format {
        Format::Csv => write_table(&PROFILE_HEADER, &rows, w),
        Format::Json => {
            let objects: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| {
                    PROFILE_HEADER
                        .iter()
                        .zip(r)
                        .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                        .collect()
                })
                .collect();
            let text =
                serde_json::to_string_pretty(&objects).map_err(|e| Error::Report(e.to_string()))?;
            writeln!(w, "{text}").map_err(io_err)
        }
    })?;
    Ok(EXIT_OK)
}

fn run_phase(cfg: &ResolvedConfig, out: &mut dyn Write) -> Result<i32> {
    let witnesses = oscillation_witnesses(&cfg.params, cfg.cycles)?;
    with_sink(&cfg.path, out, |w| match cfg.format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            let ce = |e: csv::Error| Error::Report(e.to_string());
            csv.write_record(PHASE_HEADER).map_err(ce)?;
            for wit in &witnesses {
                let kind = match wit.kind {
                    WitnessKind::LowerExtreme => "lower",
                    WitnessKind::UpperExtreme => "upper",
                    WitnessKind::Generic => "generic",
                };
                csv.write_record([
                    fmt_real(wit.phase),
                    fmt_real(wit.alpha),
                    kind.to_string(),
                    wit.t_description.clone(),
                ])
                .map_err(ce)?;
            }
            csv.flush().map_err(io_err)
        }
        Format::Json => {
            let text = serde_json::to_string_pretty(&witnesses)
                .map_err(|e| Error::Report(e.to_string()))?;
            writeln!(w, "{text}").map_err(io_err)
        }
    })?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct MinimizeSummary<'a> {
    n_cells: usize,
    boundary: &'a BoundaryData,
    integrand: &'a Integrand,
    mu_reg: f64,
    energy: f64,
    iterations: usize,
    grad_norm_final: f64,
    tol: f64,
    max_cell_gradient: f64,
    max_cell_ratio: f64,
    converged: bool,
}

fn run_minimize(cfg: &ResolvedConfig, out: &mut dyn Write) -> Result<i32> {
    let problem = build_problem(cfg.n_cells, cfg.boundary.clone(), cfg.integrand)?;
    let result = minimize(&problem, &cfg.solve)?;
    let summary = MinimizeSummary {
        n_cells: cfg.n_cells,
        boundary: &cfg.boundary,
        integrand: &cfg.integrand,
        mu_reg: cfg.integrand.mu_reg(),
        energy: result.energy,
        iterations: result.iterations,
        grad_norm_final: result.grad_norm_final,
        tol: result.tol,
        max_cell_gradient: result.max_cell_gradient,
        max_cell_ratio: result.max_cell_ratio,
        converged: result.converged,
    };
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Report(e.to_string()))?;
    writeln!(out, "{text}").map_err(io_err)?;
    if let Some(path) = &cfg.path {
        let m = problem.nodes_per_side();
        let rows: Vec<Vec<f64>> = result
            .u
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let (x1, x2) = problem.coordinates(k);
                vec![(k % m) as f64, (k / m) as f64, x1, x2, v]
            })
            .collect();
        let file = File::create(path)
            .map_err(|e| Error::Report(format!("cannot write {}: {e}", path.display())))?;
        write_table(&SOLUTION_HEADER, &rows, BufWriter::new(file))?;
    }
    Ok(if result.converged {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn run_fit(cfg: &ResolvedConfig, out: &mut dyn Write) -> Result<i32> {
    let grid = sample_grid(&cfg.grid)?;
    let fit = fit_growth_constants(&cfg.params, cfg.mu, &grid)?;
    with_sink(&cfg.path, out, |w| {
        let text = serde_json::to_string_pretty(&fit).map_err(|e| Error::Report(e.to_string()))?;
        writeln!(w, "{text}").map_err(io_err)
    })?;
    Ok(if fit.verified { EXIT_OK } else { EXIT_FAILED })
}
