use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use l1tv::experiments::bounds_table::BoundsTableConfig;
use l1tv::experiments::{
    self, learned, Format, GenConfig, LearnedTaskConfig, Method, PhaseConfig, SolveConfig, Table, UtSweepConfig,
    VerifyConfig, WidthMcConfig,
};
use l1tv::signals::read_csv_file;
use l1tv::{Error, Result};

#[derive(Parser)]
#[command(
    name = "l1tv",
    version,
    about = "Sparse and gradient-sparse compressed sensing experiments"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every random draw (commands without randomness ignore it).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (a directory for `train`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json; verify and width-mc default to json, the rest to csv.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// JSON config, or an earlier output whose header holds one. Flags
    /// given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Φ, Φ_ℓ¹ and Φ_TV with the implied sample counts.
    BoundsTable(BoundsArgs),
    /// Success rate of noiseless recovery against the sampling ratio.
    Phase(PhaseArgs),
    /// PGM-ISTA objective gap over a grid of step pairs (u, t).
    UtSweep(UtArgs),
    /// Train LPGM-ISTA networks; writes checkpoints into --out.
    Train(TrainArgs),
    /// Test-set RelErr of trained networks and of truncated PGM-ISTA.
    Eval(EvalArgs),
    /// Prox KKT, gradient and consistency checks.
    Verify(VerifyArgs),
    /// Monte-Carlo width estimate against Φ.
    WidthMc(WidthArgs),
    /// Measure and recover one signal from a CSV file.
    Solve(SolveArgs),
    /// Write synthetic signals as CSV columns.
    Gen(GenArgs),
}

#[derive(Args)]
struct BoundsArgs {
    /// The six (s_r, s_g) cells at n = 1000 and ratios 1 and 0.1 (the default).
    #[arg(long)]
    table1: bool,
    #[arg(long)]
    n: Option<usize>,
    /// Cells as s_r:s_g, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_cell)]
    cells: Option<Vec<(usize, usize)>>,
    /// Values of λ₁/λ₂.
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s_r: Option<usize>,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    #[arg(long)]
    success_tol: Option<f64>,
}

#[derive(Args)]
struct UtArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    u_fracs: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    t_fracs: Option<Vec<f64>>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Emit the gap after every iteration instead of the summary.
    #[arg(long)]
    curves: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, value_delimiter = ',')]
    layers: Option<Vec<usize>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    train_samples: Option<usize>,
    #[arg(long)]
    test_samples: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory written by `train`.
    #[arg(long)]
    model_dir: Option<PathBuf>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(default)]
struct EvalConfig {
    model_dir: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    kkt_trials: Option<usize>,
    #[arg(long)]
    grad_instances: Option<usize>,
    /// Flip the sign of the threshold sensitivity in the backward pass.
    #[arg(long)]
    inject_fault: bool,
}

#[derive(Args)]
struct WidthArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    /// CSV file with one signal per column.
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    column: Option<String>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// pgm, admm or reference.
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s_r: Option<usize>,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    count: Option<usize>,
}

fn parse_cell(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected s_r:s_g, got '{s}'"))?;
    let p = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("'{v}': {e}"));
    Ok((p(a)?, p(b)?))
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn base_config<C: Default + serde::de::DeserializeOwned>(common: &Common, command: &str) -> Result<C> {
    match &common.config {
        Some(p) => experiments::load_config(p, command),
        None => Ok(C::default()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when an embedded check failed.
fn run(cli: Cli) -> Result<bool> {
    let c = &cli.common;
    let out = c.out.as_deref();
    let table_format = c.format.unwrap_or(Format::Csv);
    let report_format = c.format.unwrap_or(Format::Json);
    match cli.command {
        Command::BoundsTable(a) => {
            let mut cfg: BoundsTableConfig = base_config(c, "bounds-table")?;
            if a.table1 {
                cfg = BoundsTableConfig::default();
            }
            set(&mut cfg.n, a.n);
            set(&mut cfg.cells, a.cells);
            set(&mut cfg.ratios, a.ratios);
            set(&mut cfg.t, a.t);
            let t = experiments::bounds_table(&cfg)?;
            experiments::emit(out, table_format, "bounds-table", &cfg, &t)?;
        }
        Command::Phase(a) => {
            let mut cfg: PhaseConfig = base_config(c, "phase")?;
            set(&mut cfg.n, a.n);
            set(&mut cfg.s_r, a.s_r);
            set(&mut cfg.blocks, a.blocks);
            set(&mut cfg.ratios, a.ratios);
            set(&mut cfg.trials, a.trials);
            set(&mut cfg.lambda1, a.lambda1);
            set(&mut cfg.lambda2, a.lambda2);
            set(&mut cfg.success_tol, a.success_tol);
            set(&mut cfg.seed, c.seed);
            let t = experiments::phase(&cfg)?;
            experiments::emit(out, table_format, "phase", &cfg, &t)?;
        }
        Command::UtSweep(a) => {
            let mut cfg: UtSweepConfig = base_config(c, "ut-sweep")?;
            set(&mut cfg.n, a.n);
            set(&mut cfg.m, a.m);
            set(&mut cfg.sigma, a.sigma);
            set(&mut cfg.lambda1, a.lambda1);
            set(&mut cfg.lambda2, a.lambda2);
            set(&mut cfg.u_fracs, a.u_fracs);
            set(&mut cfg.t_fracs, a.t_fracs);
            set(&mut cfg.iterations, a.iterations);
            set(&mut cfg.threshold, a.threshold);
            set(&mut cfg.seed, c.seed);
            let s = experiments::ut_sweep(&cfg)?;
            let t = if a.curves { &s.curves } else { &s.summary };
            experiments::emit(out, table_format, "ut-sweep", &cfg, t)?;
        }
        Command::Train(a) => {
            let dir = out.ok_or_else(|| Error::Usage("train needs --out <directory>".into()))?;
            let mut cfg: LearnedTaskConfig = base_config(c, "train")?;
            set(&mut cfg.layers, a.layers);
            set(&mut cfg.n, a.n);
            set(&mut cfg.m, a.m);
            set(&mut cfg.train_samples, a.train_samples);
            set(&mut cfg.test_samples, a.test_samples);
            set(&mut cfg.train.epochs, a.epochs);
            set(&mut cfg.train.learning_rate, a.learning_rate);
            set(&mut cfg.train.batch_size, a.batch_size);
            set(&mut cfg.lambda1, a.lambda1);
            set(&mut cfg.lambda2, a.lambda2);
            set(&mut cfg.seed, c.seed);
            let runs = experiments::train_models(&cfg)?;
            learned::save_models(dir, &cfg, &runs)?;
            let ext = if table_format == Format::Json { "json" } else { "csv" };
            let history = dir.join(format!("history.{ext}"));
            experiments::emit(
                Some(&history),
                table_format,
                "train",
                &cfg,
                &learned::history_table(&runs),
            )?;
            for r in &runs {
                eprintln!(
                    "L = {}: best epoch {}, validation loss {:.4e} -> {:.4e}, {:.1} s",
                    r.layers,
                    r.history.best_epoch,
                    r.history.val_loss[0],
                    r.history.val_loss[r.history.best_epoch],
                    r.seconds
                );
            }
        }
        Command::Eval(a) => {
            let mut cfg: EvalConfig = base_config(c, "eval")?;
            if let Some(d) = a.model_dir {
                cfg.model_dir = d.to_string_lossy().into_owned();
            }
            if cfg.model_dir.is_empty() {
                return Err(Error::Usage("eval needs --model-dir".into()));
            }
            let (task, models) = learned::load_models(Path::new(&cfg.model_dir))?;
            let t = experiments::eval_models(&task, &models)?;
            experiments::emit(out, table_format, "eval", &cfg, &t)?;
        }
        Command::Verify(a) => {
            let mut cfg: VerifyConfig = base_config(c, "verify")?;
            set(&mut cfg.kkt_trials, a.kkt_trials);
            set(&mut cfg.grad_instances, a.grad_instances);
            cfg.inject_fault |= a.inject_fault;
            set(&mut cfg.seed, c.seed);
            let report = experiments::verify(&cfg)?;
            experiments::emit(out, report_format, "verify", &cfg, &report.to_table())?;
            return Ok(summarize(&report));
        }
        Command::WidthMc(a) => {
            let mut cfg: WidthMcConfig = base_config(c, "width-mc")?;
            set(&mut cfg.n, a.n);
            set(&mut cfg.trials, a.trials);
            set(&mut cfg.seed, c.seed);
            let (report, t) = experiments::width_mc(&cfg)?;
            experiments::emit(out, report_format, "width-mc", &cfg, &t)?;
            return Ok(summarize(&report));
        }
        Command::Solve(a) => {
            let mut cfg: SolveConfig = base_config(c, "solve")?;
            if a.input.is_some() {
                cfg.input = a.input;
            }
            if a.column.is_some() {
                cfg.column = a.column;
            }
            set(&mut cfg.ratio, a.ratio);
            set(&mut cfg.sigma, a.sigma);
            set(&mut cfg.method, a.method);
            set(&mut cfg.lambda1, a.lambda1);
            set(&mut cfg.lambda2, a.lambda2);
            set(&mut cfg.max_iter, a.max_iter);
            set(&mut cfg.tol, a.tol);
            set(&mut cfg.seed, c.seed);
            let input = cfg
                .input
                .clone()
                .ok_or_else(|| Error::Usage("solve needs --input <csv>".into()))?;
            let signals = read_csv_file(&input)?;
            let x = match &cfg.column {
                Some(name) => signals
                    .iter()
                    .find(|s| &s.name == name)
                    .ok_or_else(|| Error::Config(format!("no column '{name}' in {input}")))?,
                None => signals
                    .first()
                    .ok_or_else(|| Error::Config(format!("{input} holds no signal")))?,
            };
            let (t, summary) = experiments::solve_signal(&cfg, &x.values)?;
            experiments::emit(out, table_format, "solve", &cfg, &t)?;
            eprintln!(
                "m = {}, RelErr = {:.4e}, {} iterations{}, {:.3} s",
                summary.m,
                summary.rel_err,
                summary.iterations,
                if summary.converged { "" } else { " (not converged)" },
                summary.seconds
            );
        }
        Command::Gen(a) => {
            let mut cfg: GenConfig = base_config(c, "gen")?;
            set(&mut cfg.n, a.n);
            set(&mut cfg.s_r, a.s_r);
            set(&mut cfg.blocks, a.blocks);
            set(&mut cfg.count, a.count);
            set(&mut cfg.seed, c.seed);
            let t: Table = experiments::gen_signals(&cfg)?;
            experiments::emit(out, table_format, "gen", &cfg, &t)?;
        }
    }
    Ok(true)
}

fn summarize(report: &experiments::Report) -> bool {
    for c in &report.checks {
        eprintln!(
            "{} {}: {:.3e} vs {:.3e} ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.threshold,
            c.detail
        );
    }
    report.passed()
}
