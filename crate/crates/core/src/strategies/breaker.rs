use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::{BreakerStrategy, DangerTable, StrategyKind};
use crate::game::{BipartiteVertex, DirectedEdge, GameState};
use crate::rng::SimRng;

/// `count` distinct unclaimed edges not in `taken`, uniformly at random.
fn random_unclaimed(
    state: &GameState,
    count: usize,
    taken: &HashSet<DirectedEdge>,
    rng: &mut SimRng,
) -> Vec<DirectedEdge> {
    let total = state.config().edge_count();
    let free = state.unclaimed_count() - taken.len();
    let count = count.min(free);
    if count == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(count);
    let mut seen = taken.clone();
    if free * 4 >= total {
        while out.len() < count {
            let e = state.edge_at(rng.random_range(0..total));
            if state.is_unclaimed(e.from(), e.to()) && seen.insert(e) {
                out.push(e);
            }
        }
    } else {
        let pool: Vec<DirectedEdge> = (0..total)
            .map(|i| state.edge_at(i))
            .filter(|e| state.is_unclaimed(e.from(), e.to()) && !seen.contains(e))
            .collect();
        out.extend(
            index::sample(rng, pool.len(), count)
                .into_iter()
                .map(|i| pool[i]),
        );
    }
    out
}

/// Breaker's turn uniformly at random among unclaimed edges.
pub fn breaker_random_move(state: &GameState, rng: &mut SimRng) -> Vec<DirectedEdge> {
    random_unclaimed(state, state.breaker_quota(), &HashSet::new(), rng)
}

/// Box attack on out-stars. An out-star is alive while Maker owns none of its
/// edges and some are unclaimed. Breaker fills the alive star with the fewest
/// unclaimed edges (lowest vertex on ties), spilling into the next smallest
/// when it runs out, and plays randomly once no alive star is left.
pub fn breaker_box_move(state: &GameState, rng: &mut SimRng) -> Vec<DirectedEdge> {
    let n = state.n();
    let quota = state.breaker_quota();
    let mut alive: Vec<(usize, usize)> = (0..n)
        .filter(|&v| state.maker_out_degree(v) == 0)
        .map(|v| (n - 1 - state.breaker_out_degree(v), v))
        .filter(|&(size, _)| size > 0)
        .collect();
    alive.sort_unstable();
    let mut out = Vec::with_capacity(quota);
    for (_, v) in alive {
        if out.len() == quota {
            break;
        }
        let mut star = state.unclaimed_incident(BipartiteVertex::A(v));
        star.shuffle(rng);
        out.extend(star.into_iter().take(quota - out.len()));
    }
    if out.len() < quota {
        let taken: HashSet<_> = out.iter().copied().collect();
        let rest = random_unclaimed(state, quota - out.len(), &taken, rng);
        out.extend(rest);
    }
    out
}

/// Claims unclaimed edges at the bipartite vertex of largest Maker degree
/// (lowest index on ties), moving to the next one once a star is exhausted.
pub fn breaker_maxdegree_move(state: &GameState, rng: &mut SimRng) -> Vec<DirectedEdge> {
    let n = state.n();
    let quota = state.breaker_quota();
    let mut order: Vec<(std::cmp::Reverse<usize>, usize)> = (0..2 * n)
        .map(|idx| {
            (
                std::cmp::Reverse(state.maker_degree(BipartiteVertex::from_index(idx, n))),
                idx,
            )
        })
        .collect();
    order.sort_unstable();
    let mut out: Vec<DirectedEdge> = Vec::with_capacity(quota);
    let mut taken = HashSet::new();
    for (_, idx) in order {
        if out.len() == quota {
            break;
        }
        let mut star = state.unclaimed_incident(BipartiteVertex::from_index(idx, n));
        star.retain(|e| !taken.contains(e));
        star.shuffle(rng);
        for e in star.into_iter().take(quota - out.len()) {
            taken.insert(e);
            out.push(e);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BoxBreaker;

#[derive(Clone, Copy, Debug, Default)]
pub struct RandomBreaker;

#[derive(Clone, Copy, Debug, Default)]
pub struct MaxDegreeBreaker;

impl BreakerStrategy for BoxBreaker {
    fn kind(&self) -> StrategyKind {
        StrategyKind::BreakerBox
    }

    fn choose(
        &mut self,
        state: &GameState,
        _: &DangerTable,
        rng: &mut SimRng,
    ) -> Vec<DirectedEdge> {
        breaker_box_move(state, rng)
    }
}

impl BreakerStrategy for RandomBreaker {
    fn kind(&self) -> StrategyKind {
        StrategyKind::BreakerRandom
    }

    fn choose(
        &mut self,
        state: &GameState,
        _: &DangerTable,
        rng: &mut SimRng,
    ) -> Vec<DirectedEdge> {
        breaker_random_move(state, rng)
    }
}

impl BreakerStrategy for MaxDegreeBreaker {
    fn kind(&self) -> StrategyKind {
        StrategyKind::BreakerMaxDegree
    }

    fn choose(
        &mut self,
        state: &GameState,
        _: &DangerTable,
        rng: &mut SimRng,
    ) -> Vec<DirectedEdge> {
        breaker_maxdegree_move(state, rng)
    }
}
