//! Monte Carlo runner: single games, parallel bias sweeps, threshold
//! estimates and reports.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectivity::{condense, ConnectivityMaker, Digraph, ExpansionMode};
use crate::game::{EdgeOwner, GameConfig};
use crate::hamilton::{
    cpstar_check, from_maker_graph, model_init, run_builder, validate_hamilton_cycle,
    AdversaryMode, BuilderOptions, BuilderRun, CpstarReport, ModelConfig, RegimeReport,
};
use crate::rng::{derive_seed, rng_from_seed};
use crate::session::Session;
use crate::strategies::box_game::{box_game_default, BoxGameConfig, BoxWinner};
use crate::strategies::{DegreeMaker, MakerStrategy, StrategyKind};

mod io;
mod stats;

pub use io::{load_csv, load_report, write_csv, write_report, CsvRow, CSV_HEADER};
pub use stats::{
    clopper_pearson, estimate_threshold, pav_non_increasing, Censoring, ThresholdEstimate,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),
    #[error("threshold for n = {n} needs at least 3 bias points, got {points}")]
    InsufficientPoints { n: usize, points: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    StrongConnectivity,
    Hamiltonicity,
    /// `n` boxes of size `n`; the swept bias is Breaker's.
    BoxGame,
    /// The random IN/OUT model; the swept "bias" is K.
    HamiltonModel,
}

impl GameKind {
    pub const ALL: [GameKind; 4] = [
        GameKind::StrongConnectivity,
        GameKind::Hamiltonicity,
        GameKind::BoxGame,
        GameKind::HamiltonModel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::StrongConnectivity => "strong",
            GameKind::Hamiltonicity => "hamilton",
            GameKind::BoxGame => "box",
            GameKind::HamiltonModel => "model",
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        Ok(match key.as_str() {
            "strong" | "strongconnectivity" | "connectivity" => GameKind::StrongConnectivity,
            "hamilton" | "hamiltonicity" | "ham" => GameKind::Hamiltonicity,
            "box" | "boxgame" => GameKind::BoxGame,
            "model" | "hamiltonmodel" => GameKind::HamiltonModel,
            _ => {
                return Err(format!(
                    "unknown game {s:?}; expected strong, hamilton, box or model"
                ))
            }
        })
    }
}

/// Everything a sweep needs. Unset optional fields take the per-game defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub game: GameKind,
    pub n: Vec<usize>,
    /// Absolute bias values.
    pub b: Vec<usize>,
    /// Bias as multiples c of n/ln n (of ln n for the model's K); used when
    /// `b` is empty.
    pub bias_ratio: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    /// 0 uses every core. Never affects results.
    pub workers: usize,
    pub maker: Option<StrategyKind>,
    pub breaker: StrategyKind,
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    /// Target degree; derived from θ and α when unset.
    pub k: Option<usize>,
    pub adversary_mode: AdversaryMode,
    pub budget_factor: f64,
    pub strict_endgame: bool,
    pub expansion_check: bool,
    pub cpstar_monitor: bool,
    pub relax: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            game: GameKind::StrongConnectivity,
            n: Vec::new(),
            b: Vec::new(),
            bias_ratio: Vec::new(),
            reps: 10,
            seed: 0,
            workers: 0,
            maker: None,
            breaker: StrategyKind::BreakerBox,
            alpha: None,
            theta: None,
            k: None,
            adversary_mode: AdversaryMode::Uniform,
            budget_factor: BuilderOptions::DEFAULT_BUDGET_FACTOR,
            strict_endgame: true,
            expansion_check: false,
            cpstar_monitor: false,
            relax: 0.25,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if self.n.iter().any(|&n| n < 2) {
            return bad("every n must be at least 2".into());
        }
        let mut ns = self.n.clone();
        ns.sort_unstable();
        ns.dedup();
        if ns.len() != self.n.len() {
            return bad("n values must be distinct".into());
        }
        if self.b.is_empty() && self.bias_ratio.iter().any(|&c| !(c > 0.0)) {
            return bad("bias ratios must be positive".into());
        }
        if self.b.contains(&0) {
            return bad("bias values must be at least 1".into());
        }
        if let Some(m) = self.maker {
            if !m.is_maker() {
                return bad(format!("{m} is not a Maker strategy"));
            }
        }
        if self.breaker.is_maker() {
            return bad(format!("{} is not a Breaker strategy", self.breaker));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return bad(format!("alpha = {a} outside (0, 1)"));
            }
        }
        if !(self.relax > 0.0 && self.relax <= 1.0) {
            return bad(format!("relax = {} outside (0, 1]", self.relax));
        }
        if !(self.budget_factor > 0.0) {
            return bad("budget factor must be positive".into());
        }
        Ok(())
    }

    /// The Hamilton games default to the model's small α: the builder's
    /// 2αn cycle floor leaves no room for rotations at α = 1/2.
    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(match self.game {
            GameKind::HamiltonModel | GameKind::Hamiltonicity => ModelConfig::DEFAULT_ALPHA,
            _ => GameConfig::DEFAULT_ALPHA,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta.unwrap_or(match self.game {
            GameKind::HamiltonModel => ModelConfig::DEFAULT_THETA,
            _ => GameConfig::DEFAULT_THETA,
        })
    }

    pub fn maker(&self) -> StrategyKind {
        self.maker.unwrap_or(match self.game {
            GameKind::StrongConnectivity => StrategyKind::MakerConnectivity,
            _ => StrategyKind::MakerDegree,
        })
    }

    /// The bias values swept at `n`, ascending and deduplicated. For the
    /// model these are list lengths K: ratios give ⌈c ln n⌉, and with neither
    /// `b` nor ratios set, `k` or ⌈θ ln n⌉ is the single point.
    pub fn biases(&self, n: usize) -> Vec<usize> {
        let model = self.game == GameKind::HamiltonModel;
        let mut out: Vec<usize> = if !self.b.is_empty() {
            self.b.clone()
        } else if model && self.bias_ratio.is_empty() {
            vec![self
                .k
                .unwrap_or_else(|| ModelConfig::k_for_theta(n, self.theta()))]
        } else if model {
            self.bias_ratio
                .iter()
                .map(|&c| ModelConfig::k_for_theta(n, c))
                .collect()
        } else {
            let unit = n as f64 / (n as f64).ln();
            self.bias_ratio
                .iter()
                .map(|c| ((c * unit).round() as usize).max(1))
                .collect()
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    fn game_config(&self, n: usize, b: usize, seed: u64) -> GameConfig {
        let mut c = GameConfig::new(n, b);
        c.alpha = self.alpha();
        c.theta = self.theta();
        c.k = self
            .k
            .unwrap_or_else(|| GameConfig::derived_k(n, c.theta, c.alpha));
        c.seed = seed;
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Winner {
    Maker,
    Breaker,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::Maker => "Maker",
            Winner::Breaker => "Breaker",
        })
    }
}

/// Outcome of one game or model run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub n: usize,
    pub b: usize,
    pub winner: Winner,
    /// Maker turns for games, Breaker turns for the box game, reveals for the model.
    pub rounds: usize,
    pub strongly_connected: Option<bool>,
    pub hamilton_cycle: Option<bool>,
    /// Why Maker's strategy stopped early, if it did.
    pub reason: Option<String>,
    pub degree_rounds: Option<usize>,
    pub patch_moves: Option<usize>,
    pub trials: Option<u64>,
    pub cpstar: Option<CpstarReport>,
    /// Failed property checks; empty on a clean run.
    pub violations: Vec<String>,
}

impl RunResult {
    fn new(seed: u64, n: usize, b: usize) -> Self {
        RunResult {
            seed,
            n,
            b,
            winner: Winner::Breaker,
            rounds: 0,
            strongly_connected: None,
            hamilton_cycle: None,
            reason: None,
            degree_rounds: None,
            patch_moves: None,
            trials: None,
            cpstar: None,
            violations: Vec::new(),
        }
    }
}

/// Plays one game (or one model build) at size `n` and bias `b`.
pub fn run_game(config: &SweepConfig, n: usize, b: usize, seed: u64) -> RunResult {
    play_traced(config, n, b, seed, false).0
}

/// Like [`run_game`], optionally returning a text trace: the claim list for
/// games (plus the builder's steps for Hamiltonicity), the builder's steps for
/// the model. The box game has no trace.
pub fn play_traced(
    config: &SweepConfig,
    n: usize,
    b: usize,
    seed: u64,
    trace: bool,
) -> (RunResult, Option<String>) {
    match config.game {
        GameKind::StrongConnectivity => run_strong(config, n, b, seed, trace),
        GameKind::Hamiltonicity => run_hamilton(config, n, b, seed, trace),
        GameKind::BoxGame => (run_box(n, b, seed), None),
        GameKind::HamiltonModel => run_model(config, n, b, seed, trace),
    }
}

fn claims_text(session: &Session) -> Option<String> {
    session.state.to_position_text().ok()
}

fn builder_text(run: &BuilderRun) -> String {
    let mut buf = Vec::new();
    run.write_trace(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("trace is ASCII")
}

fn run_strong(
    config: &SweepConfig,
    n: usize,
    b: usize,
    seed: u64,
    trace: bool,
) -> (RunResult, Option<String>) {
    let mut res = RunResult::new(seed, n, b);
    let game = config.game_config(n, b, seed);
    let mut session = match Session::new(game, trace) {
        Ok(s) => s,
        Err(e) => {
            res.reason = Some(e.to_string());
            return (res, None);
        }
    };
    let mut breaker = config.breaker.breaker().expect("validated Breaker kind");
    let mut connector = (config.maker() == StrategyKind::MakerConnectivity).then(|| {
        if config.expansion_check {
            ConnectivityMaker::with_expansion_probe(ExpansionMode::Sampled {
                samples_per_size: 20,
                seed,
            })
        } else {
            ConnectivityMaker::new()
        }
    });
    let mut degree = DegreeMaker::new();
    loop {
        let maker: &mut dyn MakerStrategy = match connector.as_mut() {
            Some(c) => c,
            None => &mut degree,
        };
        match session.maker_move(maker) {
            Ok(Some(_)) => {}
            Ok(None) => break,
            Err(e) => {
                res.reason = Some(e.to_string());
                break;
            }
        }
        if session.state.is_exhausted() {
            break;
        }
        if let Err(e) = session.breaker_turn(breaker.as_mut()) {
            res.reason = Some(e.to_string());
            break;
        }
    }
    let connected = condense(&Digraph::from_maker(&session.state)).is_strongly_connected();
    res.strongly_connected = Some(connected);
    res.winner = if connected {
        Winner::Maker
    } else {
        Winner::Breaker
    };
    res.rounds = session.state.round();
    if let Some(c) = &connector {
        res.degree_rounds = Some(c.stats.degree_moves);
        res.patch_moves = Some(c.stats.patch_moves);
        if c.stats.implication_holds == Some(false) {
            res.violations
                .push("expansion held but a source or sink component is small".into());
        }
    } else {
        res.degree_rounds = Some(degree.stats.moves);
    }
    let text = if trace { claims_text(&session) } else { None };
    (res, text)
}

fn run_hamilton(
    config: &SweepConfig,
    n: usize,
    b: usize,
    seed: u64,
    trace: bool,
) -> (RunResult, Option<String>) {
    let mut res = RunResult::new(seed, n, b);
    let game = config.game_config(n, b, seed);
    let mut session = match Session::new(game, trace) {
        Ok(s) => s,
        Err(e) => {
            res.reason = Some(e.to_string());
            return (res, None);
        }
    };
    let mut breaker = config.breaker.breaker().expect("validated Breaker kind");
    let mut degree = DegreeMaker::new();
    let mut stopped = None;
    loop {
        match session.maker_move(&mut degree) {
            Ok(Some(_)) => {}
            Ok(None) => break,
            Err(e) => {
                stopped = Some(e.to_string());
                break;
            }
        }
        if session.state.is_exhausted() {
            break;
        }
        if let Err(e) = session.breaker_turn(breaker.as_mut()) {
            stopped = Some(e.to_string());
            break;
        }
    }
    res.rounds = session.state.round();
    res.degree_rounds = Some(degree.stats.moves);
    res.hamilton_cycle = Some(false);
    let mut text = if trace { claims_text(&session) } else { None };
    if let Some(reason) = stopped {
        res.reason = Some(reason);
        return (res, text);
    }
    let mut inst = match from_maker_graph(&session.state) {
        Ok(i) => i,
        Err(e) => {
            res.reason = Some(e.to_string());
            return (res, text);
        }
    };
    let mut opts = BuilderOptions::with_budget_factor(n, config.budget_factor);
    opts.strict_endgame = config.strict_endgame;
    opts.trace = trace;
    let run = run_builder(&mut inst, &opts, &mut session.rng);
    if let Some(t) = text.as_mut() {
        t.push_str(&builder_text(&run));
    }
    res.trials = Some(run.stats.total);
    if run.stats.structure_failures > 0 {
        res.violations.push(format!(
            "builder structure: {}",
            run.stats.first_failure.clone().unwrap_or_default()
        ));
    }
    if config.cpstar_monitor {
        let theta = game_theta(session.state.config());
        res.cpstar = Some(cpstar_check(
            &run.stats.snapshots,
            n,
            inst.alpha,
            theta,
            config.relax,
        ));
    }
    match run.result {
        Ok(cycle) => {
            let state = &session.state;
            match validate_hamilton_cycle(&cycle, n, |a, b| {
                state.owner_of(a, b) == EdgeOwner::Maker
            }) {
                Ok(()) => {
                    res.hamilton_cycle = Some(true);
                    res.winner = Winner::Maker;
                }
                Err(e) => res.violations.push(format!("returned cycle invalid: {e}")),
            }
        }
        Err(f) => res.reason = Some(f.to_string()),
    }
    (res, text)
}

fn game_theta(c: &GameConfig) -> f64 {
    c.k as f64 / (c.n as f64).ln()
}

fn run_box(n: usize, b: usize, seed: u64) -> RunResult {
    let mut res = RunResult::new(seed, n, b);
    match box_game_default(&BoxGameConfig::new(n, n, b)) {
        Ok(out) => {
            res.rounds = out.breaker_turns;
            res.winner = match out.winner {
                BoxWinner::Opponent => Winner::Maker,
                BoxWinner::Breaker => Winner::Breaker,
            };
        }
        Err(e) => res.reason = Some(e.to_string()),
    }
    res
}

fn run_model(
    config: &SweepConfig,
    n: usize,
    k: usize,
    seed: u64,
    trace: bool,
) -> (RunResult, Option<String>) {
    let mut res = RunResult::new(seed, n, k);
    let model = ModelConfig {
        n,
        alpha: config.alpha(),
        k,
        adversary: config.adversary_mode,
        seed,
    };
    let mut rng = rng_from_seed(seed);
    let mut inst = match model_init(&model, &mut rng) {
        Ok(i) => i,
        Err(e) => {
            res.reason = Some(e.to_string());
            res.hamilton_cycle = Some(false);
            return (res, None);
        }
    };
    let mut opts = BuilderOptions::with_budget_factor(n, config.budget_factor);
    opts.strict_endgame = config.strict_endgame;
    opts.trace = trace;
    let run = run_builder(&mut inst, &opts, &mut rng);
    let text = trace.then(|| builder_text(&run));
    res.trials = Some(run.stats.total);
    res.rounds = run.stats.total as usize;
    if run.stats.structure_failures > 0 {
        res.violations.push(format!(
            "builder structure: {}",
            run.stats.first_failure.clone().unwrap_or_default()
        ));
    }
    if config.cpstar_monitor {
        res.cpstar = Some(cpstar_check(
            &run.stats.snapshots,
            n,
            model.alpha,
            model.theta(),
            config.relax,
        ));
    }
    res.hamilton_cycle = Some(false);
    match run.result {
        Ok(cycle) => match validate_hamilton_cycle(&cycle, n, |a, b| inst.edge_allowed(a, b)) {
            Ok(()) => {
                res.hamilton_cycle = Some(true);
                res.winner = Winner::Maker;
            }
            Err(e) => res.violations.push(format!("returned cycle invalid: {e}")),
        },
        Err(f) => res.reason = Some(f.to_string()),
    }
    (res, text)
}

/// Aggregate over the repetitions at one (n, b).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub game: GameKind,
    pub n: usize,
    pub b: usize,
    pub reps: usize,
    pub maker_wins: usize,
    pub win_rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_rounds: f64,
    /// CPstar counts summed over the runs, when monitored.
    pub cpstar: Option<CpstarReport>,
    pub runs: Vec<RunResult>,
}

impl SweepPoint {
    fn from_runs(game: GameKind, n: usize, b: usize, runs: Vec<RunResult>) -> Self {
        let reps = runs.len();
        let maker_wins = runs.iter().filter(|r| r.winner == Winner::Maker).count();
        let (ci_lo, ci_hi) = clopper_pearson(maker_wins, reps, 0.95);
        let mean_rounds = if reps == 0 {
            0.0
        } else {
            runs.iter().map(|r| r.rounds as f64).sum::<f64>() / reps as f64
        };
        let cpstar = runs
            .iter()
            .filter_map(|r| r.cpstar)
            .reduce(|a, b| CpstarReport {
                relax: a.relax,
                large_u: add(a.large_u, b.large_u),
                small_u: add(a.small_u, b.small_u),
            });
        SweepPoint {
            game,
            n,
            b,
            reps,
            maker_wins,
            win_rate: if reps == 0 {
                0.0
            } else {
                maker_wins as f64 / reps as f64
            },
            ci_lo,
            ci_hi,
            mean_rounds,
            cpstar,
            runs,
        }
    }
}

fn add(a: RegimeReport, b: RegimeReport) -> RegimeReport {
    RegimeReport {
        checked: a.checked + b.checked,
        violations: a.violations + b.violations,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    /// The sweep's config with `workers` cleared.
    pub config: SweepConfig,
    pub points: Vec<SweepPoint>,
    /// One per `n` with at least three bias points.
    pub thresholds: Vec<ThresholdEstimate>,
}

impl SweepReport {
    pub fn violations(&self) -> impl Iterator<Item = &str> {
        self.points
            .iter()
            .flat_map(|p| p.runs.iter())
            .flat_map(|r| r.violations.iter().map(String::as_str))
    }

    pub fn all_checks_passed(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// Runs every (n, b, rep) on a pool of `config.workers` threads. The report
/// does not depend on the worker count.
pub fn sweep(config: &SweepConfig) -> Result<SweepReport, HarnessError> {
    config.validate()?;
    let mut jobs = Vec::new();
    let mut grid = Vec::new();
    for &n in &config.n {
        for b in config.biases(n) {
            grid.push((n, b));
            for rep in 0..config.reps {
                jobs.push((n, b, rep));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::InvalidConfig(format!("thread pool: {e}")))?;
    let mut results: Vec<RunResult> = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, b, rep)| {
                let seed = derive_seed(config.seed, n as u64, b as u64, rep as u64);
                run_game(config, n, b, seed)
            })
            .collect()
    });
    let mut points = Vec::with_capacity(grid.len());
    for (n, b) in grid.into_iter().rev() {
        let runs = results.split_off(results.len() - config.reps);
        points.push(SweepPoint::from_runs(config.game, n, b, runs));
    }
    points.reverse();
    let mut thresholds = Vec::new();
    let mut ns = config.n.clone();
    ns.dedup();
    for n in ns {
        if let Ok(t) = estimate_threshold(&points, n) {
            thresholds.push(t);
        }
    }
    let mut stored = config.clone();
    stored.workers = 0;
    log::info!(
        "sweep finished: {} points, {} runs",
        points.len(),
        jobs.len()
    );
    Ok(SweepReport {
        schema_version: SCHEMA_VERSION,
        config: stored,
        points,
        thresholds,
    })
}
