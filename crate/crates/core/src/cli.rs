//! `dfcrystal <command> --config <path>`: runs a solve or a diagnostic and
//! writes its reports. Exit codes: 0 ok, 2 SCF not converged, 3 assumption
//! or hypothesis failure (strict), 4 asserted property failed (strict),
//! 10 I/O, 11 missing checkpoint, 12 invalid input.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::constants::{check_assumptions, penalization, AssumptionReport, Constants, Penalization};
use crate::diagnostics::{
    band_continuity, contraction_check, critical_coupling, exchange_scaling, expansion_check, shell_report, BandPath,
    CriticalReport, ShellClass,
};
use crate::error::{DfError, Result};
use crate::io::{load_checkpoint, save_checkpoint, write_csv, write_json, RunConfig, SolutionRecord};
use crate::model::Model;
use crate::params::Mode;
use crate::solver::{initial_state, scf_solve, Solution};
use crate::states::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Solve,
    Check,
    Expansion,
    Scaling,
    Bands,
    Contraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Strict,
    Permissive,
}

#[derive(Debug, Parser)]
#[command(name = "dfcrystal", version, about = "Periodic Dirac-Fock crystal simulator")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn exit_code(err: &DfError) -> i32 {
    match err {
        DfError::ScfNotConverged { .. } | DfError::NoDescent { .. } => 2,
        DfError::AssumptionFailed(_) | DfError::HypothesisViolated(_) => 3,
        DfError::PropertyFailed(_) => 4,
        DfError::Io(_) => 10,
        DfError::MissingCheckpoint(_) => 11,
        DfError::Validation(_) | DfError::InvalidParameter { .. } | DfError::GridMismatch(_) => 12,
        _ => 1,
    }
}

/// Parse arguments, run, and map the outcome to an exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 12 } else { 0 };
        }
    };
    match execute(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dfcrystal: {e}");
            exit_code(&e)
        }
    }
}

fn execute(args: &Args) -> Result<()> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(m) = args.mode {
        cfg.mode = if m == ModeArg::Strict { Mode::Strict } else { Mode::Permissive };
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.threads {
        cfg.threads = Some(t);
    }
    if let Some(o) = &args.out {
        cfg.output.directory = o.clone();
    }
    cfg.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| DfError::Validation(e.to_string()))?;
    pool.install(|| run_command(args.command, &cfg))
}

/// Everything a command needs, built once from the configuration.
pub struct Context {
    pub cfg: RunConfig,
    pub model: Model,
    pub consts: Constants,
    pub pen: Penalization,
    pub assumptions: AssumptionReport,
    pub critical: CriticalReport,
}

impl Context {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let model = Model::new(cfg.model, cfg.tolerances)?;
        let consts = if cfg.constants.overrides_only {
            Constants::from_overrides(&cfg.model, &cfg.constants.overrides)
        } else {
            Constants::estimate(&model, &cfg.constants.overrides, cfg.constants.probes, cfg.seed)?
        };
        let pen = penalization(&model, &consts);
        let assumptions = check_assumptions(&cfg.model, &consts, pen.c_star);
        let critical = critical_coupling(&model, &consts);
        Ok(Context { cfg: cfg.clone(), model, consts, pen, assumptions, critical })
    }

    fn strict(&self) -> bool {
        self.cfg.mode == Mode::Strict
    }

    fn out(&self) -> Result<PathBuf> {
        let dir = self.cfg.output.directory.clone();
        fs::create_dir_all(&dir)?;
        Ok(dir)
    }

    fn checkpoint_state(&self) -> Result<Option<DensityMatrix>> {
        match &self.cfg.run.checkpoint {
            Some(p) => load_checkpoint(p, &self.model).map(Some),
            None => Ok(None),
        }
    }

    /// The state a diagnostic runs on: the checkpoint when given, else a fresh solve.
    fn solved_state(&self) -> Result<DensityMatrix> {
        match self.checkpoint_state()? {
            Some(g) => Ok(g),
            None => Ok(scf_solve(&self.model, self.pen.eps_pen, None)?.gamma),
        }
    }

    /// Strict runs need clauses (1) and (2), under which the trace constraint saturates.
    fn require_assumptions(&self) -> Result<()> {
        if self.strict() && !self.assumptions.weak {
            let failed: Vec<&str> =
                self.assumptions.clauses[..2].iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect();
            return Err(DfError::AssumptionFailed(format!("clauses failing: {}", failed.join(", "))));
        }
        Ok(())
    }

    fn assert_property(&self, ok: bool, what: &str) -> Result<()> {
        if self.strict() && !ok {
            return Err(DfError::PropertyFailed(what.into()));
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct CheckFile<'a> {
    schema_version: u32,
    params: &'a crate::ModelParams,
    constants: &'a Constants,
    penalization: &'a Penalization,
    assumptions: &'a AssumptionReport,
    critical: &'a CriticalReport,
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

fn write_report<T: Serialize>(path: &Path, body: &T) -> Result<()> {
    write_json(path, &Versioned { schema_version: 1, body })
}

pub fn run_command(cmd: Command, cfg: &RunConfig) -> Result<()> {
    let ctx = Context::new(cfg)?;
    match cmd {
        Command::Check => cmd_check(&ctx),
        Command::Solve => cmd_solve(&ctx).map(|_| ()),
        Command::Expansion => cmd_expansion(&ctx),
        Command::Scaling => cmd_scaling(&ctx),
        Command::Bands => cmd_bands(&ctx),
        Command::Contraction => cmd_contraction(&ctx),
    }
}

fn cmd_check(ctx: &Context) -> Result<()> {
    let file = CheckFile {
        schema_version: 1,
        params: &ctx.model.params,
        constants: &ctx.consts,
        penalization: &ctx.pen,
        assumptions: &ctx.assumptions,
        critical: &ctx.critical,
    };
    let text = crate::io::to_json(&file)?;
    print!("{text}");
    fs::write(ctx.out()?.join("check.json"), text)?;
    Ok(())
}

pub fn cmd_solve(ctx: &Context) -> Result<Solution> {
    ctx.require_assumptions()?;
    let dir = ctx.out()?;
    let start = ctx.checkpoint_state()?;
    let sol = scf_solve(&ctx.model, ctx.pen.eps_pen, start.as_ref())?;
    let shell = shell_report(&sol, ctx.model.tol.occupation_tol);
    write_json(&dir.join("solution.json"), &SolutionRecord::new(&sol, &ctx.model))?;
    write_report(&dir.join("shell_report.json"), &shell)?;
    write_csv(&dir.join("scf_history.csv"), &sol.history)?;
    if ctx.cfg.output.checkpoint {
        save_checkpoint(&dir.join("gamma.ckpt.json"), &sol.gamma, &ctx.model)?;
    }
    let q = ctx.model.params.q_f64();
    ctx.assert_property((sol.energy.trace - q).abs() <= 1.0e-8, "trace of the minimizer differs from q")?;
    if ctx.assumptions.strong && shell.classification == ShellClass::Fractional {
        save_checkpoint(&dir.join("fractional_shell.ckpt.json"), &sol.gamma, &ctx.model)?;
        ctx.assert_property(false, "fractional last shell under the assumptions")?;
    }
    Ok(sol)
}

fn cmd_expansion(ctx: &Context) -> Result<()> {
    let gamma = ctx.solved_state()?.to_operator();
    let rep = expansion_check(
        &gamma,
        &ctx.model,
        &ctx.consts,
        ctx.pen.eps_pen,
        &ctx.cfg.run.t_values,
        ctx.cfg.mode,
    )?;
    let dir = ctx.out()?;
    write_report(&dir.join("expansion.json"), &rep)?;
    write_csv(&dir.join("expansion.csv"), &rep.rows)?;
    let p = &ctx.model.params;
    if p.alpha == 0.0 {
        let tol = 1.0e-12 * rep.base_energy.abs().max(1.0);
        ctx.assert_property(rep.rows.iter().all(|r| r.residual.abs() <= tol), "alpha = 0 expansion residual")?;
    } else {
        ctx.assert_property(rep.slope >= 1.9, "expansion residual slope below 1.9")?;
        ctx.assert_property(rep.rows.iter().all(|r| r.bound_holds), "|Err| above its bound")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScalingCsvRow {
    lambda: f64,
    lambda_eff: f64,
    n_ball_1: usize,
    n_ball_2: usize,
    hartree: f64,
    exchange: f64,
    trace_vh: f64,
}

fn cmd_scaling(ctx: &Context) -> Result<()> {
    let gamma = ctx.solved_state()?.to_operator();
    let rep = exchange_scaling(&gamma, &ctx.model, &ctx.cfg.run.scaling)?;
    let dir = ctx.out()?;
    write_report(&dir.join("scaling.json"), &rep)?;
    let rows: Vec<ScalingCsvRow> = rep
        .rows
        .iter()
        .map(|r| ScalingCsvRow {
            lambda: r.lambda,
            lambda_eff: r.lambda_eff,
            n_ball_1: r.n_ball[0],
            n_ball_2: r.n_ball[1],
            hartree: r.hartree,
            exchange: r.exchange,
            trace_vh: r.trace_vh,
        })
        .collect();
    write_csv(&dir.join("scaling.csv"), &rows)?;
    ctx.assert_property(rep.b < 0.0, "scaling coefficient b not negative")?;
    ctx.assert_property((rep.fitted_exponent + 2.0).abs() <= 0.3, "fitted exponent outside -2 +- 0.3")
}

#[derive(Serialize)]
struct BandRow {
    s: f64,
    band: usize,
    value: f64,
}

fn cmd_bands(ctx: &Context) -> Result<()> {
    let gamma = ctx.solved_state()?.to_operator();
    let o = &ctx.cfg.run.bands;
    let bands = o.bands.unwrap_or(ctx.model.params.q as usize + 2);
    let mut path = BandPath::standard(ctx.model.params.ell, o.samples, bands);
    if let Some(v) = &o.vertices {
        path.vertices = v.clone();
    }
    let rep = band_continuity(&gamma, &ctx.model, &path)?;
    let dir = ctx.out()?;
    write_report(&dir.join("bands.json"), &rep)?;
    let rows: Vec<BandRow> = rep
        .bands
        .iter()
        .enumerate()
        .flat_map(|(k, b)| rep.arclength.iter().zip(b).map(move |(s, v)| BandRow { s: *s, band: k, value: *v }))
        .collect();
    write_csv(&dir.join("bands.csv"), &rows)?;
    ctx.assert_property(rep.flagged.is_empty(), "band discontinuity flagged")
}

fn cmd_contraction(ctx: &Context) -> Result<()> {
    let start = match ctx.checkpoint_state()? {
        Some(g) => g,
        None => initial_state(&ctx.model)?,
    };
    let rep = contraction_check(&start.to_operator(), &ctx.model, &ctx.consts)?;
    let dir = ctx.out()?;
    write_report(&dir.join("contraction.json"), &rep)?;
    write_csv(&dir.join("retraction_trace.csv"), &rep.trace.steps)?;
    let d = &ctx.consts.derived;
    if ctx.strict() && !(d.kappa < 1.0 && d.r_window_ok && rep.start_membership.member) {
        return Err(DfError::HypothesisViolated(format!(
            "contraction needs kappa < 1, 1 < R < 1/(2A) and a start in U_R (kappa = {}, R = {}, 1/(2A) = {}, member = {})",
            d.kappa, ctx.consts.r.value, d.r_upper, rep.start_membership.member
        )));
    }
    ctx.assert_property(rep.contracting, "step ratio >= 1 after the first step")?;
    ctx.assert_property(rep.within_l, "step ratio above L")?;
    ctx.assert_property(rep.idempotence <= 5.0 * rep.tol, "theta not idempotent")?;
    ctx.assert_property(rep.gamma_plus_defect <= 10.0 * rep.tol, "theta(gamma) off Gamma+")
}
