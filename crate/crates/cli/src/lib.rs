//! Argument handling for the `digame` binary, kept in a library so tests can
//! drive it without spawning processes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use digame::hamilton::AdversaryMode;
use digame::harness::{
    play_traced, sweep, write_csv, write_report, GameKind, SweepConfig, SweepReport, Winner,
};
use digame::strategies::StrategyKind;
use digame::verify::{run_suite, Suite, VerifyOptions};

pub const SEED_ENV: &str = "DIGAME_SEED";

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "digame",
    version,
    about = "Biased Maker-Breaker games on the complete digraph"
)]
pub struct Cli {
    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play one game (first n, first bias) and print its outcome.
    Play(RunArgs),
    /// Sweep every (n, b) for `reps` seeds and estimate thresholds.
    Sweep(RunArgs),
    /// Sweep the random Hamilton model; the swept bias is the list length K.
    HamiltonModel(RunArgs),
    /// Sweep the abstract box game.
    BoxGame(RunArgs),
    /// Run the built-in self-check suites.
    Verify(VerifyArgs),
}

/// Flags mirroring [`SweepConfig`]. Each overrides the same key of the
/// `--config` file; unset flags leave the file (or default) value alone.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct RunArgs {
    /// JSON file with SweepConfig keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// strong, hamilton, box or model.
    #[arg(long)]
    pub game: Option<GameKind>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Absolute bias values; take precedence over --bias-ratio.
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<usize>,
    /// Bias as multiples of n/ln n (of ln n for the model).
    #[arg(long, value_delimiter = ',')]
    pub bias_ratio: Vec<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Target degree K (list length for the model).
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Base seed; falls back to the config file, then $DIGAME_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub maker: Option<StrategyKind>,
    #[arg(long)]
    pub breaker: Option<StrategyKind>,
    /// uniform, block or targeted.
    #[arg(long)]
    pub adversary_mode: Option<AdversaryMode>,
    /// Builder reveal budget in units of n.
    #[arg(long)]
    pub budget_factor: Option<f64>,
    /// Keep the 2αn rule in the builder's endgame.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub strict_endgame: Option<bool>,
    /// Probe the expansion hypothesis at the end of the degree phase.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub expansion_check: Option<bool>,
    /// Check the builder's |Ū*| bound at every snapshot.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub cpstar_monitor: Option<bool>,
    /// Slack of the |Ū*| bound.
    #[arg(long)]
    pub relax: Option<f64>,
    /// Worker threads; 0 uses every core. Never changes results.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Report path: JSON, plus a CSV table beside it for sweeps.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a trace (`<out>.trace`, or standard error without --out).
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// engine, strategies, connectivity, hamilton or all.
    #[arg(long, default_value = "all")]
    pub suite: Suite,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Multiplies the number of random instances.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl RunArgs {
    /// Loads `--config` if given and applies every set flag on top.
    pub fn to_config(&self) -> Result<SweepConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => SweepConfig {
                seed: env_seed()?.unwrap_or(0),
                ..SweepConfig::default()
            },
        };
        self.apply(&mut cfg);
        Ok(cfg)
    }

    fn apply(&self, cfg: &mut SweepConfig) {
        fn set<T: Clone>(dst: &mut T, src: &Option<T>) {
            if let Some(v) = src {
                *dst = v.clone();
            }
        }
        set(&mut cfg.game, &self.game);
        if !self.n.is_empty() {
            cfg.n = self.n.clone();
        }
        if !self.b.is_empty() {
            cfg.b = self.b.clone();
        }
        if !self.bias_ratio.is_empty() {
            cfg.bias_ratio = self.bias_ratio.clone();
        }
        set(&mut cfg.reps, &self.reps);
        set(&mut cfg.seed, &self.seed);
        set(&mut cfg.workers, &self.workers);
        if self.maker.is_some() {
            cfg.maker = self.maker;
        }
        set(&mut cfg.breaker, &self.breaker);
        if self.alpha.is_some() {
            cfg.alpha = self.alpha;
        }
        if self.theta.is_some() {
            cfg.theta = self.theta;
        }
        if self.k.is_some() {
            cfg.k = self.k;
        }
        set(&mut cfg.adversary_mode, &self.adversary_mode);
        set(&mut cfg.budget_factor, &self.budget_factor);
        set(&mut cfg.strict_endgame, &self.strict_endgame);
        set(&mut cfg.expansion_check, &self.expansion_check);
        set(&mut cfg.cpstar_monitor, &self.cpstar_monitor);
        set(&mut cfg.relax, &self.relax);
    }
}

/// The flags that reproduce `cfg` from an empty starting point.
pub fn config_to_flags(cfg: &SweepConfig) -> Vec<String> {
    fn list<T: ToString>(v: &[T]) -> String {
        v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
    }
    let mut f = vec!["--game".to_string(), cfg.game.name().to_string()];
    let mut push = |k: &str, v: String| {
        f.push(format!("--{k}"));
        f.push(v);
    };
    if !cfg.n.is_empty() {
        push("n", list(&cfg.n));
    }
    if !cfg.b.is_empty() {
        push("b", list(&cfg.b));
    }
    if !cfg.bias_ratio.is_empty() {
        push("bias-ratio", list(&cfg.bias_ratio));
    }
    push("reps", cfg.reps.to_string());
    push("seed", cfg.seed.to_string());
    push("workers", cfg.workers.to_string());
    if let Some(m) = cfg.maker {
        push("maker", m.to_string());
    }
    push("breaker", cfg.breaker.to_string());
    if let Some(a) = cfg.alpha {
        push("alpha", a.to_string());
    }
    if let Some(t) = cfg.theta {
        push("theta", t.to_string());
    }
    if let Some(k) = cfg.k {
        push("K", k.to_string());
    }
    push("adversary-mode", cfg.adversary_mode.to_string());
    push("budget-factor", cfg.budget_factor.to_string());
    push("strict-endgame", cfg.strict_endgame.to_string());
    push("expansion-check", cfg.expansion_check.to_string());
    push("cpstar-monitor", cfg.cpstar_monitor.to_string());
    push("relax", cfg.relax.to_string());
    f
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => {
            s.trim().parse().map(Some).map_err(|_| {
                CliError::Usage(format!("{SEED_ENV}={s:?} is not an unsigned integer"))
            })
        }
        Err(_) => Ok(None),
    }
}

/// Reads a JSON config; keys left out take their defaults, with the seed
/// falling back to `$DIGAME_SEED`.
pub fn load_config(path: &Path) -> Result<SweepConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let has_seed = value.get("seed").is_some();
    let mut cfg: SweepConfig = serde_json::from_value(value)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if !has_seed {
        cfg.seed = env_seed()?.unwrap_or(0);
    }
    Ok(cfg)
}

/// Runs a parsed command, writing summaries to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Failed(e.to_string());
    match &cli.command {
        Command::Play(args) => play(args, out),
        Command::Sweep(args) => run_sweep(args, None, out),
        Command::HamiltonModel(args) => run_sweep(args, Some(GameKind::HamiltonModel), out),
        Command::BoxGame(args) => run_sweep(args, Some(GameKind::BoxGame), out),
        Command::Verify(args) => {
            let opts = VerifyOptions {
                seed: match args.seed {
                    Some(s) => s,
                    None => env_seed()?.unwrap_or(0),
                },
                scale: args.scale,
            };
            if !(opts.scale > 0.0) {
                return Err(CliError::Usage("--scale must be positive".into()));
            }
            let reports = run_suite(args.suite, &opts);
            for r in &reports {
                writeln!(out, "{r}").map_err(io)?;
                for f in &r.failures {
                    writeln!(out, "  {f}").map_err(io)?;
                }
            }
            if reports.iter().all(|r| r.passed()) {
                Ok(())
            } else {
                Err(CliError::Failed("verification failed".into()))
            }
        }
    }
}

fn validated(cfg: &SweepConfig) -> Result<(), CliError> {
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if cfg.n.is_empty() {
        return Err(CliError::Usage(
            "no n given (--n or \"n\" in the config)".into(),
        ));
    }
    if cfg.game != GameKind::HamiltonModel && cfg.b.is_empty() && cfg.bias_ratio.is_empty() {
        return Err(CliError::Usage(
            "no bias given (--b or --bias-ratio)".into(),
        ));
    }
    Ok(())
}

fn play(args: &RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = args.to_config()?;
    validated(&cfg)?;
    let n = cfg.n[0];
    let b = cfg.biases(n)[0];
    let (res, trace) = play_traced(&cfg, n, b, cfg.seed, args.trace);
    let mut line = format!("winner={} rounds={}", res.winner, res.rounds);
    if let Some(d) = res.degree_rounds {
        line.push_str(&format!(" degree_rounds={d}"));
    }
    if let Some(p) = res.patch_moves {
        line.push_str(&format!(" patch_moves={p}"));
    }
    if let Some(t) = res.trials {
        line.push_str(&format!(" trials={t}"));
    }
    if let Some(r) = &res.reason {
        line.push_str(&format!(" reason={r:?}"));
    }
    writeln!(out, "{line}").map_err(|e| CliError::Failed(e.to_string()))?;
    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&res).expect("results serialize");
        write_file(path, &json)?;
    }
    if let Some(t) = trace {
        match &args.out {
            Some(path) => write_file(&path.with_extension("trace"), &t)?,
            None => eprint!("{t}"),
        }
    }
    if res.violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(res.violations.join("; ")))
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

fn run_sweep(args: &RunArgs, game: Option<GameKind>, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = args.to_config()?;
    if let Some(g) = game {
        cfg.game = g;
    }
    validated(&cfg)?;
    let report = sweep(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(out, "{}", sweep_summary(&report)).map_err(|e| CliError::Failed(e.to_string()))?;
    if let Some(path) = &args.out {
        write_report(&report, path).map_err(|e| CliError::Failed(e.to_string()))?;
        write_csv(&report, &path.with_extension("csv"))
            .map_err(|e| CliError::Failed(e.to_string()))?;
    }
    if report.all_checks_passed() {
        Ok(())
    } else {
        let first = report.violations().next().unwrap_or_default().to_string();
        Err(CliError::Failed(format!("property check failed: {first}")))
    }
}

/// One line: totals, then `b0[n]=...` per estimated threshold.
pub fn sweep_summary(report: &SweepReport) -> String {
    let runs: usize = report.points.iter().map(|p| p.reps).sum();
    let wins: usize = report.points.iter().map(|p| p.maker_wins).sum();
    let mut line = format!(
        "game={} points={} runs={runs} maker_wins={wins} violations={}",
        report.config.game,
        report.points.len(),
        report.violations().count()
    );
    // A single point won by one side every time (always so for the box game).
    if let [p] = report.points.as_slice() {
        if p.maker_wins == 0 || p.maker_wins == p.reps {
            let winner = if p.maker_wins == 0 {
                Winner::Breaker
            } else {
                Winner::Maker
            };
            line.push_str(&format!(" winner={winner} mean_rounds={}", p.mean_rounds));
        }
    }
    for t in &report.thresholds {
        match (t.b_hat, t.ratio) {
            (Some(b), Some(r)) => line.push_str(&format!(" b0[{}]={b} ratio[{}]={r:.4}", t.n, t.n)),
            _ => line.push_str(&format!(" b0[{}]=censored_{:?}", t.n, t.censoring).to_lowercase()),
        }
    }
    line
}
