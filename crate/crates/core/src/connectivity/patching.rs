use rand::Rng;

use super::{
    condense, expansion_check, expansion_threshold, ConnectivityError, Digraph, ExpansionMode,
    ExpansionReport,
};
use crate::game::{DirectedEdge, GameState, Player};
use crate::rng::SimRng;
use crate::session::Session;
use crate::strategies::{
    BreakerStrategy, DangerTable, DegreeMaker, MakerStrategy, StrategyError, StrategyKind,
};

/// One patching move: an unclaimed edge from a sink component to a source
/// component, uniformly at random among those between the largest such pair
/// (sinks by size, then sources by size, lower component id on ties).
/// `Ok(None)` when Maker's digraph is already strongly connected.
pub fn patch_move(
    state: &GameState,
    rng: &mut SimRng,
) -> Result<Option<DirectedEdge>, ConnectivityError> {
    let cond = condense(&Digraph::from_maker(state));
    if cond.is_strongly_connected() {
        return Ok(None);
    }
    let by_size = |list: &[usize]| {
        let mut l = list.to_vec();
        l.sort_by_key(|&c| (std::cmp::Reverse(cond.size(c)), c));
        l
    };
    let sinks = by_size(&cond.sinks);
    let sources = by_size(&cond.sources);
    for &t in &sinks {
        for &s in &sources {
            if s == t {
                continue;
            }
            let free: Vec<DirectedEdge> = cond.members[t]
                .iter()
                .flat_map(|&i| cond.members[s].iter().map(move |&j| (i, j)))
                .filter(|&(i, j)| state.is_unclaimed(i, j))
                .map(|(i, j)| DirectedEdge::new(i, j).expect("components are disjoint"))
                .collect();
            if !free.is_empty() {
                return Ok(Some(free[rng.random_range(0..free.len())]));
            }
        }
    }
    Err(ConnectivityError::Stuck)
}

/// Plays patching moves against `breaker` until Maker's digraph is strongly
/// connected. Returns Maker's patching moves.
pub fn maker_connectivity_endgame(
    session: &mut Session,
    breaker: &mut dyn BreakerStrategy,
) -> Result<Vec<DirectedEdge>, ConnectivityError> {
    let k = session.state.config().k;
    let min_degree = session.state.min_maker_degree();
    if min_degree < k {
        return Err(ConnectivityError::DegreePhaseIncomplete { min_degree, k });
    }
    if session.state.to_move() == Player::Breaker && !session.state.is_exhausted() {
        session.breaker_turn(breaker)?;
    }
    let mut moves = Vec::new();
    while let Some(e) = patch_move(&session.state, &mut session.rng)? {
        session
            .claim(Player::Maker, e)
            .map_err(StrategyError::from)?;
        moves.push(e);
        if !session.state.is_exhausted() {
            session.breaker_turn(breaker)?;
        }
    }
    Ok(moves)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PatchStats {
    pub degree_moves: usize,
    pub patch_moves: usize,
    /// Components of Maker's digraph when patching began.
    pub components_at_start: Option<usize>,
    /// Smallest source or sink component when patching began.
    pub smallest_end_component: Option<usize>,
    pub expansion: Option<ExpansionReport>,
    /// No violation found ⇒ every source and sink exceeds the threshold.
    pub implication_holds: Option<bool>,
}

/// Degree phase, then sink-to-source patching; done once Maker's digraph is
/// strongly connected.
#[derive(Clone, Debug, Default)]
pub struct ConnectivityMaker {
    pub degree: DegreeMaker,
    pub stats: PatchStats,
    probe: Option<ExpansionMode>,
    patching: bool,
}

impl ConnectivityMaker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs the expansion check on Maker's digraph when patching starts.
    pub fn with_expansion_probe(mode: ExpansionMode) -> Self {
        ConnectivityMaker {
            probe: Some(mode),
            ..Self::default()
        }
    }

    pub fn in_patching(&self) -> bool {
        self.patching
    }

    fn start_patching(&mut self, state: &GameState) -> Result<(), ConnectivityError> {
        self.patching = true;
        let g = Digraph::from_maker(state);
        let cond = condense(&g);
        self.stats.components_at_start = Some(cond.count());
        let smallest = cond
            .sources
            .iter()
            .chain(&cond.sinks)
            .map(|&c| cond.size(c))
            .min();
        self.stats.smallest_end_component = smallest;
        if let Some(mode) = self.probe {
            let cfg = state.config();
            let report = expansion_check(&g, cfg.alpha, cfg.k, mode)?;
            if report.violation.is_none() {
                let t = expansion_threshold(cfg.n, cfg.alpha);
                self.stats.implication_holds =
                    Some(cond.is_strongly_connected() || smallest.is_some_and(|s| s > t));
            }
            self.stats.expansion = Some(report);
        }
        Ok(())
    }
}

impl MakerStrategy for ConnectivityMaker {
    fn kind(&self) -> StrategyKind {
        StrategyKind::MakerConnectivity
    }

    fn choose(
        &mut self,
        state: &GameState,
        danger: &DangerTable,
        rng: &mut SimRng,
    ) -> Result<Option<DirectedEdge>, StrategyError> {
        if !self.patching {
            if let Some(e) = self.degree.choose(state, danger, rng)? {
                self.stats.degree_moves += 1;
                return Ok(Some(e));
            }
            self.start_patching(state).map_err(|e| match e {
                ConnectivityError::Strategy(s) => s,
                _ => StrategyError::Stuck,
            })?;
        }
        match patch_move(state, rng) {
            Ok(Some(e)) => {
                self.stats.patch_moves += 1;
                Ok(Some(e))
            }
            Ok(None) => Ok(None),
            Err(ConnectivityError::Strategy(s)) => Err(s),
            Err(_) => Err(StrategyError::Stuck),
        }
    }
}
