//! Rotation-extension Hamilton cycle construction over OUT lists revealed one
//! entry at a time, on the random IN/OUT model or on Maker's digraph.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::GameState;
use crate::rng::SimRng;

mod builder;
mod cpstar;
mod state;

pub use builder::{
    endgame_step, run_builder, step, validate_hamilton_cycle, BuilderOptions, BuilderRun, StepCase,
    StepOutcome, TraceEntry, TrialStats,
};
pub use cpstar::{cpstar_check, reference_p, CpstarReport, RegimeReport};
pub use state::{Location, PathCycleState};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HamiltonError {
    #[error("invalid model config: {0}")]
    InvalidConfig(String),
    #[error("K = {k} exceeds the candidate set size {size}")]
    KTooLarge { k: usize, size: usize },
    #[error("degree phase incomplete: minimum Maker degree {min_degree} < K = {k}")]
    DegreePhaseIncomplete { min_degree: usize, k: usize },
}

/// Why a build stopped without a Hamilton cycle.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum HamiltonFailure {
    #[error("OUT list of vertex {vertex} exhausted")]
    ListExhausted { vertex: usize },
    #[error("trial budget of {budget} reveals exceeded")]
    BudgetExceeded { budget: u64 },
}

/// How the adversary picks the candidate sets A(v) and B(v).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryMode {
    /// Uniformly random subsets.
    Uniform,
    /// Each vertex excludes the block of vertices just after it (for B) or
    /// just before it (for A), cyclically.
    Block,
    /// Everyone excludes the same block at the top of the vertex range.
    Targeted,
}

impl AdversaryMode {
    pub const ALL: [AdversaryMode; 3] = [
        AdversaryMode::Uniform,
        AdversaryMode::Block,
        AdversaryMode::Targeted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdversaryMode::Uniform => "uniform",
            AdversaryMode::Block => "block",
            AdversaryMode::Targeted => "targeted",
        }
    }
}

impl fmt::Display for AdversaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversaryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AdversaryMode::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown adversary mode {s:?}; expected uniform, block or targeted")
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n: usize,
    pub alpha: f64,
    pub k: usize,
    pub adversary: AdversaryMode,
    pub seed: u64,
}

impl ModelConfig {
    pub const DEFAULT_ALPHA: f64 = 0.1;
    pub const DEFAULT_THETA: f64 = 5.0;

    /// Desk-scale defaults: α = 0.1, K = ⌈5 ln n⌉, uniform adversary.
    pub fn new(n: usize) -> Self {
        ModelConfig {
            n,
            alpha: Self::DEFAULT_ALPHA,
            k: Self::k_for_theta(n, Self::DEFAULT_THETA),
            adversary: AdversaryMode::Uniform,
            seed: 0,
        }
    }

    pub fn k_for_theta(n: usize, theta: f64) -> usize {
        (theta * (n as f64).ln() - 1e-9).ceil().max(1.0) as usize
    }

    /// K / ln n.
    pub fn theta(&self) -> f64 {
        self.k as f64 / (self.n as f64).ln()
    }

    /// ⌈(1−α)n⌉.
    pub fn candidate_size(&self) -> usize {
        ((1.0 - self.alpha) * self.n as f64 - 1e-9).ceil() as usize
    }

    pub fn validate(&self) -> Result<(), HamiltonError> {
        if self.n < 3 {
            return Err(HamiltonError::InvalidConfig(format!("n = {} < 3", self.n)));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(HamiltonError::InvalidConfig(format!(
                "alpha = {} outside (0, 1/2)",
                self.alpha
            )));
        }
        let m = self.candidate_size();
        if m > self.n - 1 {
            return Err(HamiltonError::InvalidConfig(format!(
                "candidate sets of size {m} do not fit in n - 1 = {}",
                self.n - 1
            )));
        }
        if self.k == 0 {
            return Err(HamiltonError::InvalidConfig("K = 0".into()));
        }
        if self.k > m {
            return Err(HamiltonError::KTooLarge { k: self.k, size: m });
        }
        Ok(())
    }
}

/// A(v) and B(v), stored as their (sorted) complements in [n] ∖ {v}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSets {
    n: usize,
    not_a: Vec<Vec<u32>>,
    not_b: Vec<Vec<u32>>,
}

impl CandidateSets {
    pub fn generate(n: usize, size: usize, mode: AdversaryMode, rng: &mut SimRng) -> Self {
        let e = n - 1 - size;
        let others = |v: usize, picks: Vec<usize>| -> Vec<u32> {
            let mut l: Vec<u32> = picks
                .into_iter()
                .map(|i| if i >= v { i + 1 } else { i } as u32)
                .collect();
            l.sort_unstable();
            l
        };
        let (not_a, not_b) = match mode {
            AdversaryMode::Uniform => {
                let mut draw = |v: usize| others(v, index::sample(rng, n - 1, e).into_vec());
                let a = (0..n).map(&mut draw).collect();
                let b = (0..n).map(&mut draw).collect();
                (a, b)
            }
            AdversaryMode::Block => {
                let block = |v: usize, step: isize| -> Vec<u32> {
                    let mut l: Vec<u32> = (1..=e as isize)
                        .map(|d| (v as isize + step * d).rem_euclid(n as isize) as u32)
                        .collect();
                    l.sort_unstable();
                    l
                };
                (
                    (0..n).map(|v| block(v, -1)).collect(),
                    (0..n).map(|v| block(v, 1)).collect(),
                )
            }
            AdversaryMode::Targeted => {
                let common = |v: usize| -> Vec<u32> {
                    // the top e vertices other than v
                    let mut l: Vec<u32> = (0..n)
                        .rev()
                        .filter(|&w| w != v)
                        .take(e)
                        .map(|w| w as u32)
                        .collect();
                    l.reverse();
                    l
                };
                let sets: Vec<Vec<u32>> = (0..n).map(common).collect();
                (sets.clone(), sets)
            }
        };
        CandidateSets { n, not_a, not_b }
    }

    pub fn in_a(&self, v: usize, w: usize) -> bool {
        w != v && self.not_a[v].binary_search(&(w as u32)).is_err()
    }

    pub fn in_b(&self, v: usize, w: usize) -> bool {
        w != v && self.not_b[v].binary_search(&(w as u32)).is_err()
    }

    pub fn a(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&w| self.in_a(v, w)).collect()
    }

    pub fn b(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&w| self.in_b(v, w)).collect()
    }
}

#[derive(Clone, Debug)]
enum OutSource {
    /// Entries drawn on demand from B(v) minus earlier reveals, at most `cap`.
    Deferred { sets: CandidateSets, cap: usize },
    /// Entries fixed in advance.
    Fixed,
}

/// OUT(v) as a list read front to back through the pointer `out(v)`.
#[derive(Clone, Debug)]
pub struct OutLists {
    revealed: Vec<Vec<u32>>,
    pointer: Vec<usize>,
    source: OutSource,
}

impl OutLists {
    pub fn deferred(sets: CandidateSets, cap: usize) -> Self {
        let n = sets.n;
        OutLists {
            revealed: vec![Vec::new(); n],
            pointer: vec![0; n],
            source: OutSource::Deferred { sets, cap },
        }
    }

    pub fn fixed(lists: Vec<Vec<u32>>) -> Self {
        let n = lists.len();
        OutLists {
            revealed: lists,
            pointer: vec![0; n],
            source: OutSource::Fixed,
        }
    }

    /// Reads `out(v)` and moves the pointer past it; `None` at the end of the list.
    pub fn next(&mut self, v: usize, rng: &mut SimRng) -> Option<usize> {
        let p = self.pointer[v];
        if p < self.revealed[v].len() {
            self.pointer[v] += 1;
            return Some(self.revealed[v][p] as usize);
        }
        let OutSource::Deferred { sets, cap } = &self.source else {
            return None;
        };
        if self.revealed[v].len() >= *cap {
            return None;
        }
        let n = sets.n;
        let y = loop {
            let mut w = rng.random_range(0..n - 1);
            if w >= v {
                w += 1;
            }
            if sets.in_b(v, w) && !self.revealed[v].contains(&(w as u32)) {
                break w;
            }
        };
        self.revealed[v].push(y as u32);
        self.pointer[v] += 1;
        Some(y)
    }

    /// Entries of OUT(v) revealed so far.
    pub fn revealed(&self, v: usize) -> &[u32] {
        &self.revealed[v]
    }

    pub fn pointer(&self, v: usize) -> usize {
        self.pointer[v]
    }

    pub fn candidate_sets(&self) -> Option<&CandidateSets> {
        match &self.source {
            OutSource::Deferred { sets, .. } => Some(sets),
            OutSource::Fixed => None,
        }
    }

    /// Reveal cap for deferred lists.
    pub fn cap(&self) -> Option<usize> {
        match &self.source {
            OutSource::Deferred { cap, .. } => Some(*cap),
            OutSource::Fixed => None,
        }
    }
}

/// IN(u) for every u, and the reverse index `holders(x) = {u : x ∈ IN(u)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InSets {
    sets: Vec<Vec<u32>>,
    holders: Vec<Vec<u32>>,
}

impl InSets {
    pub fn new(mut sets: Vec<Vec<u32>>) -> Self {
        let n = sets.len();
        let mut holders = vec![Vec::new(); n];
        for (u, s) in sets.iter_mut().enumerate() {
            s.sort_unstable();
            for &x in s.iter() {
                holders[x as usize].push(u as u32);
            }
        }
        InSets { sets, holders }
    }

    pub fn get(&self, u: usize) -> &[u32] {
        &self.sets[u]
    }

    /// Sorted ascending.
    pub fn holders(&self, x: usize) -> &[u32] {
        &self.holders[x]
    }

    pub fn contains(&self, u: usize, x: usize) -> bool {
        self.sets[u].binary_search(&(x as u32)).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Model,
    MakerGraph,
}

/// Everything the builder works on.
#[derive(Clone, Debug)]
pub struct HamiltonInstance {
    pub kind: InstanceKind,
    pub alpha: f64,
    pub lists: OutLists,
    pub ins: InSets,
    pub state: PathCycleState,
}

impl HamiltonInstance {
    /// Is `(v, w)` an edge the builder may use: a revealed OUT entry of `v`
    /// or `v ∈ IN(w)`.
    pub fn edge_allowed(&self, v: usize, w: usize) -> bool {
        self.lists.revealed(v).contains(&(w as u32)) || self.ins.contains(w, v)
    }
}

/// IN sets drawn as uniform K-subsets of A(v); OUT lists left unrevealed;
/// P = (0), C = Λ.
pub fn model_init(
    config: &ModelConfig,
    rng: &mut SimRng,
) -> Result<HamiltonInstance, HamiltonError> {
    config.validate()?;
    let n = config.n;
    let sets = CandidateSets::generate(n, config.candidate_size(), config.adversary, rng);
    let ins: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            let a = sets.a(v);
            index::sample(rng, a.len(), config.k)
                .into_iter()
                .map(|i| a[i] as u32)
                .collect()
        })
        .collect();
    let ins = InSets::new(ins);
    let state = PathCycleState::new(n, config.alpha, 0, &ins);
    Ok(HamiltonInstance {
        kind: InstanceKind::Model,
        alpha: config.alpha,
        lists: OutLists::deferred(sets, config.k),
        ins,
        state,
    })
}

/// OUT(v) = Maker's out-neighbours in the order Maker claimed them, IN(u) =
/// Maker's in-neighbours; α comes from the game config.
pub fn from_maker_graph(game: &GameState) -> Result<HamiltonInstance, HamiltonError> {
    let k = game.config().k;
    let min_degree = game.min_maker_degree();
    if min_degree < k {
        return Err(HamiltonError::DegreePhaseIncomplete { min_degree, k });
    }
    let n = game.n();
    let lists = OutLists::fixed((0..n).map(|v| game.maker_successors(v).to_vec()).collect());
    let ins = InSets::new(
        (0..n)
            .map(|v| game.maker_predecessors(v).to_vec())
            .collect(),
    );
    let alpha = game.config().alpha;
    let state = PathCycleState::new(n, alpha, 0, &ins);
    Ok(HamiltonInstance {
        kind: InstanceKind::MakerGraph,
        alpha,
        lists,
        ins,
        state,
    })
}
