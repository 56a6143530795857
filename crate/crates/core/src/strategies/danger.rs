use crate::game::{BipartiteVertex, DirectedEdge, GameState, Player};

/// `dang(v) = d_B(v) − 2b·d_M(v)` against the bipartite view.
pub fn danger(state: &GameState, v: BipartiteVertex) -> i64 {
    state.breaker_degree(v) as i64 - 2 * state.bias() as i64 * state.maker_degree(v) as i64
}

/// Danger of all `2n` bipartite vertices, updated on every claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DangerTable {
    n: usize,
    maker_step: i64,
    values: Vec<i64>,
}

impl DangerTable {
    pub fn new(n: usize, b: usize) -> Self {
        DangerTable {
            n,
            maker_step: 2 * b as i64,
            values: vec![0; 2 * n],
        }
    }

    pub fn from_state(state: &GameState) -> Self {
        let n = state.n();
        let mut t = DangerTable::new(n, state.bias());
        for (idx, slot) in t.values.iter_mut().enumerate() {
            *slot = danger(state, BipartiteVertex::from_index(idx, n));
        }
        t
    }

    pub fn record(&mut self, player: Player, edge: DirectedEdge) {
        let delta = match player {
            Player::Maker => -self.maker_step,
            Player::Breaker => 1,
        };
        self.values[edge.from()] += delta;
        self.values[self.n + edge.to()] += delta;
    }

    pub fn get(&self, v: BipartiteVertex) -> i64 {
        self.values[v.index(self.n)]
    }

    /// Indexed by [`BipartiteVertex::index`].
    pub fn values(&self) -> &[i64] {
        &self.values
    }
}
