//! Runtime self-checks, runnable from the command line. Each suite replays
//! seeded random instances and cross-checks the fast code paths against
//! slow recomputations.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::connectivity::{condense, expansion_check, is_violating, Digraph, ExpansionMode};
use crate::game::{BipartiteVertex, DirectedEdge, EdgeOwner, GameConfig, GameState, Player};
use crate::hamilton::{
    model_init, run_builder, validate_hamilton_cycle, BuilderOptions, ModelConfig,
};
use crate::rng::{derive_seed, rng_from_seed, SimRng};
use crate::session::Session;
use crate::strategies::box_game::{box_game_default, BoxGameConfig, BoxWinner};
use crate::strategies::{danger, DangerTable, DegreeMaker, StrategyKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Engine,
    Strategies,
    Connectivity,
    Hamilton,
    All,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Engine,
        Suite::Strategies,
        Suite::Connectivity,
        Suite::Hamilton,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Engine => "engine",
            Suite::Strategies => "strategies",
            Suite::Connectivity => "connectivity",
            Suite::Hamilton => "hamilton",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown suite {s:?}; expected engine, strategies, connectivity, hamilton or all"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    /// Individual assertions evaluated.
    pub checks: u64,
    /// At most [`MAX_FAILURES`] messages are kept; `failed` counts all.
    pub failures: Vec<String>,
    pub failed: u64,
}

pub const MAX_FAILURES: usize = 20;

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport {
            suite,
            checks: 0,
            failures: Vec::new(),
            failed: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(msg());
            }
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {} checks={} failed={}",
            self.suite, self.checks, self.failed
        )
    }
}

/// Sizes of the random workloads. `scale` multiplies each count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            scale: 1.0,
        }
    }
}

impl VerifyOptions {
    fn count(&self, base: usize) -> usize {
        ((base as f64 * self.scale).round() as usize).max(1)
    }
}

/// Runs one suite, or every suite for [`Suite::All`].
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<SuiteReport> {
    match suite {
        Suite::Engine => vec![engine(opts)],
        Suite::Strategies => vec![strategies(opts)],
        Suite::Connectivity => vec![connectivity(opts)],
        Suite::Hamilton => vec![hamilton(opts)],
        Suite::All => [
            Suite::Engine,
            Suite::Strategies,
            Suite::Connectivity,
            Suite::Hamilton,
        ]
        .iter()
        .flat_map(|&s| run_suite(s, opts))
        .collect(),
    }
}

/// Counters from one random legal game.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FuzzTally {
    pub positions: u64,
    pub maker_claims: u64,
    pub consistency_failures: u64,
    pub identity_failures: u64,
    pub danger_increases: u64,
}

/// Plays uniformly random legal claims to the end of the board, checking the
/// caches, the bipartite degree identities, and that no Maker claim raises
/// any vertex's danger.
pub fn fuzz_random_game(n: usize, b: usize, rng: &mut SimRng) -> (FuzzTally, Option<String>) {
    let mut t = FuzzTally::default();
    let mut first = None;
    let mut state = GameState::new(GameConfig::new(n, b)).expect("valid fuzz config");
    let mut free: Vec<DirectedEdge> = (0..state.config().edge_count())
        .map(|i| state.edge_at(i))
        .collect();
    while !free.is_empty() {
        let i = rng.random_range(0..free.len());
        let e = free.swap_remove(i);
        let player = state.to_move();
        let before: Vec<i64> = (0..2 * n)
            .map(|v| danger(&state, BipartiteVertex::from_index(v, n)))
            .collect();
        state.claim(player, e).expect("claim of a free edge");
        t.positions += 1;
        if let Err(m) = state.check_consistency() {
            t.consistency_failures += 1;
            first.get_or_insert(m);
        }
        if let Err(m) = bipartite_identities(&state) {
            t.identity_failures += 1;
            first.get_or_insert(m);
        }
        if player == Player::Maker {
            t.maker_claims += 1;
            for (v, &d0) in before.iter().enumerate() {
                let d1 = danger(&state, BipartiteVertex::from_index(v, n));
                if d1 > d0 {
                    t.danger_increases += 1;
                    first.get_or_insert_with(|| {
                        format!("Maker claim {e} raised danger of vertex {v}: {d0} -> {d1}")
                    });
                }
            }
        }
    }
    (t, first)
}

fn bipartite_identities(state: &GameState) -> Result<(), String> {
    let n = state.n();
    let view = state.bipartite_view();
    for v in 0..n {
        let a = BipartiteVertex::from_index(v, n);
        let b = BipartiteVertex::from_index(n + v, n);
        if view.maker_degree_of(a) != state.maker_out_degree(v)
            || view.maker_degree_of(b) != state.maker_in_degree(v)
            || view.breaker_degree_of(a) != state.breaker_out_degree(v)
            || view.breaker_degree_of(b) != state.breaker_in_degree(v)
        {
            return Err(format!(
                "bipartite degrees of vertex {v} disagree with the digraph"
            ));
        }
        let free = state.unclaimed_incident(a).len();
        if view.maker_degree_of(a) + view.breaker_degree_of(a) + free != n - 1 {
            return Err(format!("out-star of {v} does not add up to n - 1"));
        }
    }
    let sum = |d: &[usize], side: std::ops::Range<usize>| d[side].iter().sum::<usize>();
    let m = state.maker_edge_count();
    let br = state.breaker_edge_count();
    if sum(&view.maker_degree, 0..n) != m
        || sum(&view.maker_degree, n..2 * n) != m
        || sum(&view.breaker_degree, 0..n) != br
        || sum(&view.breaker_degree, n..2 * n) != br
    {
        return Err("degree sums on a side differ from the edge counts".into());
    }
    Ok(())
}

fn engine(opts: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new(Suite::Engine);
    for g in 0..opts.count(2000) {
        let mut rng = rng_from_seed(derive_seed(opts.seed, 1, g as u64, 0));
        let n = rng.random_range(2..=30);
        let b = rng.random_range(1..=4);
        let (t, msg) = fuzz_random_game(n, b, &mut rng);
        let bad = t.consistency_failures + t.identity_failures + t.danger_increases;
        rep.checks += t.positions.saturating_sub(1);
        rep.check(bad == 0, || {
            format!("game {g} (n={n}, b={b}): {}", msg.unwrap_or_default())
        });
    }
    rep
}

fn strategies(opts: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new(Suite::Strategies);
    let breakers = [
        StrategyKind::BreakerBox,
        StrategyKind::BreakerRandom,
        StrategyKind::BreakerMaxDegree,
    ];
    for g in 0..opts.count(60) {
        let seed = derive_seed(opts.seed, 2, g as u64, 0);
        let mut rng = rng_from_seed(seed);
        let n = rng.random_range(20..=60);
        let kind = breakers[g % breakers.len()];
        let mut c = GameConfig::new(n, GameConfig::bias_for_beta(n, 0.1).max(1));
        c.k = GameConfig::derived_k(n, 2.0, 0.5);
        c.seed = seed;
        let k = c.k;
        let mut s = Session::new(c, false).expect("valid config");
        let mut maker = DegreeMaker::new();
        let mut breaker = kind.breaker().expect("breaker kind");
        let mut ok = true;
        loop {
            match s.maker_move(&mut maker) {
                Ok(Some(_)) => {}
                Ok(None) => break,
                Err(e) => {
                    rep.check(false, || format!("{kind} n={n}: {e}"));
                    ok = false;
                    break;
                }
            }
            let quota = s.state.breaker_quota();
            match s.breaker_turn(breaker.as_mut()) {
                Ok(edges) => {
                    rep.check(edges.len() == quota, || format!("{kind} n={n}: short turn"))
                }
                Err(e) => {
                    rep.check(false, || format!("{kind} n={n}: {e}"));
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            rep.check(s.state.min_maker_degree() >= k, || {
                format!("{kind} n={n}: min degree below K")
            });
            rep.check(
                s.danger.values() == DangerTable::from_state(&s.state).values(),
                || format!("{kind} n={n}: danger table drifted"),
            );
            rep.check(s.state.check_consistency().is_ok(), || {
                format!("{kind} n={n}: inconsistent state")
            });
        }
    }
    // Balanced Breaker wins exactly when the box sizes allow it; spot-check
    // the extremes.
    for n in [10usize, 40, 120] {
        let lose = box_game_default(&BoxGameConfig::new(n, n, 1)).map(|o| o.winner);
        rep.check(lose == Ok(BoxWinner::Opponent) || n < 3, || {
            format!("box game n={n} b=1 not an Opponent win")
        });
        let win = box_game_default(&BoxGameConfig::new(n, n, n)).map(|o| o.winner);
        rep.check(win == Ok(BoxWinner::Breaker), || {
            format!("box game n={n} b=n not a Breaker win")
        });
    }
    rep
}

fn random_digraph(n: usize, p: f64, rng: &mut SimRng) -> Digraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Digraph::from_edges(n, edges).expect("loop-free edges")
}

fn reachability(g: &Digraph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut r = vec![vec![false; n]; n];
    for (v, row) in r.iter_mut().enumerate() {
        row[v] = true;
        for &w in g.successors(v) {
            row[w as usize] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

fn connectivity(opts: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new(Suite::Connectivity);
    for g in 0..opts.count(300) {
        let mut rng = rng_from_seed(derive_seed(opts.seed, 3, g as u64, 0));
        let n = rng.random_range(1..=10);
        let p = rng.random_range(0.0..0.5);
        let d = random_digraph(n, p, &mut rng);
        let c = condense(&d);
        let r = reachability(&d);
        let same = (0..n)
            .all(|i| (0..n).all(|j| (c.component[i] == c.component[j]) == (r[i][j] && r[j][i])));
        rep.check(same, || {
            format!("condensation of graph {g} disagrees with reachability")
        });
        let ordered = c.dag_edges.iter().all(|&(x, y)| x < y);
        rep.check(ordered, || {
            format!("graph {g}: DAG edges not topologically numbered")
        });
    }
    for g in 0..opts.count(20) {
        let mut rng = rng_from_seed(derive_seed(opts.seed, 4, g as u64, 0));
        let (n, k, alpha) = (12, 3, 0.3);
        let mut edges = Vec::new();
        for v in 0..n {
            let others: Vec<usize> = (0..n).filter(|&w| w != v).collect();
            for &w in others.choose_multiple(&mut rng, k) {
                edges.push((v, w));
            }
            for &w in others.choose_multiple(&mut rng, k) {
                edges.push((w, v));
            }
        }
        let d = Digraph::from_edges(n, edges).expect("valid");
        let Ok(report) = expansion_check(&d, alpha, k, ExpansionMode::Exhaustive) else {
            rep.check(false, || format!("expansion check refused graph {g}"));
            continue;
        };
        let lo = report.min_size;
        let hi = report.max_size;
        let brute = (1u32..1 << n).find(|&mask| {
            let size = mask.count_ones() as usize;
            if size < lo || size > hi {
                return false;
            }
            let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            is_violating(&d, &set)
        });
        rep.check(report.violation.is_some() == brute.is_some(), || {
            format!("expansion verdict on graph {g} disagrees with enumeration")
        });
    }
    rep
}

fn hamilton(opts: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new(Suite::Hamilton);
    for g in 0..opts.count(40) {
        let seed = derive_seed(opts.seed, 5, g as u64, 0);
        let mut rng = rng_from_seed(seed);
        let n = rng.random_range(20..=120);
        let mut model = ModelConfig::new(n);
        model.seed = seed;
        let mut inst = match model_init(&model, &mut rng) {
            Ok(i) => i,
            Err(e) => {
                rep.check(false, || format!("model n={n}: {e}"));
                continue;
            }
        };
        let mut o = BuilderOptions::new(n);
        o.verify_each_step = true;
        let run = run_builder(&mut inst, &o, &mut rng);
        rep.check(run.stats.structure_failures == 0, || {
            format!(
                "model n={n}: {}",
                run.stats.first_failure.clone().unwrap_or_default()
            )
        });
        rep.check(run.stats.is_consistent(), || {
            format!("model n={n}: trial counts inconsistent")
        });
        if let Ok(cycle) = &run.result {
            let v = validate_hamilton_cycle(cycle, n, |a, b| inst.edge_allowed(a, b));
            rep.check(v.is_ok(), || format!("model n={n}: {}", v.unwrap_err()));
        }
    }
    // Maker's graph after a degree phase, explored in place.
    for g in 0..opts.count(10) {
        let seed = derive_seed(opts.seed, 6, g as u64, 0);
        let n = 30 + 10 * (g % 4);
        let mut c = GameConfig::new(n, 1);
        c.k = 8;
        c.seed = seed;
        let mut s = Session::new(c, false).expect("valid");
        let mut maker = DegreeMaker::new();
        let mut breaker = StrategyKind::BreakerRandom.breaker().expect("breaker");
        while let Ok(Some(_)) = s.maker_move(&mut maker) {
            if s.breaker_turn(breaker.as_mut()).is_err() {
                break;
            }
        }
        let Ok(mut inst) = crate::hamilton::from_maker_graph(&s.state) else {
            continue;
        };
        let mut rng = s.rng.clone();
        let run = run_builder(&mut inst, &BuilderOptions::new(n), &mut rng);
        rep.check(run.stats.structure_failures == 0, || {
            format!("maker graph n={n}: structure")
        });
        if let Ok(cycle) = &run.result {
            let owned = |a: usize, b: usize| s.state.owner_of(a, b) == EdgeOwner::Maker;
            rep.check(validate_hamilton_cycle(cycle, n, owned).is_ok(), || {
                format!("maker graph n={n}: cycle uses an edge Maker does not own")
            });
        }
    }
    rep
}
