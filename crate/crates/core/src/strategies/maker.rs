use rand::Rng;

use super::{DangerTable, MakerStrategy, StrategyError, StrategyKind};
use crate::game::{BipartiteVertex, DirectedEdge, GameState};
use crate::rng::SimRng;

/// One easing move of the degree phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeMove {
    pub vertex: BipartiteVertex,
    pub edge: DirectedEdge,
    /// Size of the set the edge was drawn from.
    pub candidates: usize,
}

/// Eases the most dangerous bipartite vertex whose Maker degree is still
/// below `k`: a uniformly random unclaimed edge at that vertex. Ties on
/// danger go to the lowest index (`a_0 … a_{n-1}`, then `b_0 … b_{n-1}`).
///
/// Returns `Ok(None)` once every vertex has Maker degree at least `k`.
pub fn maker_degree_move(
    state: &GameState,
    danger: &DangerTable,
    rng: &mut SimRng,
) -> Result<Option<DegreeMove>, StrategyError> {
    let n = state.n();
    let k = state.config().k;
    let mut best: Option<(i64, usize)> = None;
    for (idx, &d) in danger.values().iter().enumerate() {
        let v = BipartiteVertex::from_index(idx, n);
        if state.maker_degree(v) >= k {
            continue;
        }
        if best.is_none_or(|(bd, _)| d > bd) {
            best = Some((d, idx));
        }
    }
    let Some((_, idx)) = best else {
        return Ok(None);
    };
    let vertex = BipartiteVertex::from_index(idx, n);
    let candidates = state.unclaimed_incident(vertex);
    if candidates.is_empty() {
        return Err(StrategyError::NoUnclaimedIncidentEdge(vertex));
    }
    let edge = candidates[rng.random_range(0..candidates.len())];
    Ok(Some(DegreeMove {
        vertex,
        edge,
        candidates: candidates.len(),
    }))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DegreeStats {
    pub moves: usize,
    /// Smallest candidate set any easing move drew from.
    pub min_candidates: Option<usize>,
    /// Largest Breaker degree seen at a vertex still below the target degree,
    /// sampled at every Maker decision.
    pub max_unfinished_breaker_degree: usize,
}

/// The degree phase as a [`MakerStrategy`]; finishes once the minimum
/// bipartite Maker degree reaches `k`.
#[derive(Clone, Debug, Default)]
pub struct DegreeMaker {
    pub stats: DegreeStats,
}

impl DegreeMaker {
    pub fn new() -> Self {
        Self::default()
    }

    fn observe(&mut self, state: &GameState) {
        let n = state.n();
        let k = state.config().k;
        let worst = (0..2 * n)
            .map(|idx| BipartiteVertex::from_index(idx, n))
            .filter(|&v| state.maker_degree(v) < k)
            .map(|v| state.breaker_degree(v))
            .max()
            .unwrap_or(0);
        self.stats.max_unfinished_breaker_degree =
            self.stats.max_unfinished_breaker_degree.max(worst);
    }
}

impl MakerStrategy for DegreeMaker {
    fn kind(&self) -> StrategyKind {
        StrategyKind::MakerDegree
    }

    fn choose(
        &mut self,
        state: &GameState,
        danger: &DangerTable,
        rng: &mut SimRng,
    ) -> Result<Option<DirectedEdge>, StrategyError> {
        self.observe(state);
        let Some(mv) = maker_degree_move(state, danger, rng)? else {
            return Ok(None);
        };
        self.stats.moves += 1;
        self.stats.min_candidates = Some(
            self.stats
                .min_candidates
                .map_or(mv.candidates, |m| m.min(mv.candidates)),
        );
        Ok(Some(mv.edge))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameConfig, Player};
    use crate::rng::rng_from_seed;

    fn e(i: usize, j: usize) -> DirectedEdge {
        DirectedEdge::new(i, j).unwrap()
    }

    #[test]
    fn symmetric_start_eases_a0() {
        let g = GameState::new(GameConfig::new(7, 2)).unwrap();
        let t = DangerTable::from_state(&g);
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..200 {
            let mv = maker_degree_move(&g, &t, &mut rng_from_seed(seed))
                .unwrap()
                .unwrap();
            assert_eq!(mv.vertex, BipartiteVertex::A(0));
            assert_eq!(mv.edge.from(), 0);
            assert_eq!(mv.candidates, 6);
            seen.insert(mv.edge.to());
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn unique_argmax_is_eased() {
        // Breaker puts 6 edges on a_3 and at most one elsewhere, b = 2.
        let mut g = GameState::new(GameConfig::new(10, 2)).unwrap();
        let maker = [(9, 8), (8, 9), (7, 9)];
        let breaker = [(3, 0), (3, 1), (3, 2), (3, 4), (3, 5), (3, 6)];
        for (round, (i, j)) in maker.into_iter().enumerate() {
            g.claim(Player::Maker, e(i, j)).unwrap();
            for &(a, b) in &breaker[2 * round..2 * round + 2] {
                g.claim(Player::Breaker, e(a, b)).unwrap();
            }
        }
        let t = DangerTable::from_state(&g);
        let mv = maker_degree_move(&g, &t, &mut rng_from_seed(1))
            .unwrap()
            .unwrap();
        assert_eq!(mv.vertex, BipartiteVertex::A(3));
        assert_eq!(mv.candidates, 3);
    }

    #[test]
    fn finished_vertices_leave_the_pool() {
        let mut c = GameConfig::new(3, 1);
        c.k = 1;
        let mut g = GameState::new(c).unwrap();
        g.claim(Player::Maker, e(0, 1)).unwrap();
        g.claim(Player::Breaker, e(2, 0)).unwrap();
        let t = DangerTable::from_state(&g);
        // a_0 and b_1 are done; a_2 and b_0 tie at danger 1, a_2 has the lower index
        let mv = maker_degree_move(&g, &t, &mut rng_from_seed(0))
            .unwrap()
            .unwrap();
        assert_eq!(mv.vertex, BipartiteVertex::A(2));
        assert_eq!(t.get(BipartiteVertex::A(2)), 1);
    }

    #[test]
    fn exhausted_star_is_surfaced() {
        let mut c = GameConfig::new(3, 2);
        c.k = 2;
        let mut g = GameState::new(c).unwrap();
        g.claim(Player::Maker, e(1, 2)).unwrap();
        g.claim(Player::Breaker, e(0, 1)).unwrap();
        g.claim(Player::Breaker, e(0, 2)).unwrap();
        let t = DangerTable::from_state(&g);
        assert_eq!(
            maker_degree_move(&g, &t, &mut rng_from_seed(0)),
            Err(StrategyError::NoUnclaimedIncidentEdge(BipartiteVertex::A(
                0
            )))
        );
    }

    #[test]
    fn phase_completion_returns_none() {
        let mut c = GameConfig::new(3, 1);
        c.k = 1;
        let mut g = GameState::new(c).unwrap();
        g.claim(Player::Maker, e(0, 1)).unwrap();
        g.claim(Player::Breaker, e(1, 0)).unwrap();
        g.claim(Player::Maker, e(1, 2)).unwrap();
        g.claim(Player::Breaker, e(2, 1)).unwrap();
        g.claim(Player::Maker, e(2, 0)).unwrap();
        assert_eq!(g.min_maker_degree(), 1);
        let t = DangerTable::from_state(&g);
        assert_eq!(maker_degree_move(&g, &t, &mut rng_from_seed(0)), Ok(None));
    }
}
