//! The biased Maker-Breaker game on the complete digraph.
//!
//! Maker moves first and claims one edge per turn; Breaker answers with `b`
//! edges. Ownership of the `n(n-1)` directed edges is kept in a flat array
//! indexed by `from * (n - 1) + to'`, where `to'` skips the diagonal, so claims
//! and lookups are O(1). Per-vertex in/out degrees are cached for both players,
//! and Maker's neighbourhoods are kept in acquisition order because the
//! Hamilton builder reads them back as its OUT/IN lists.
//!
//! The same position can be read through the bipartite lens: the digraph edge
//! `(i, j)` is the edge `{a_i, b_j}` of `K_{n,n}`, so the out-degree of `k` is
//! the degree of `a_k` and the in-degree of `k` is the degree of `b_k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A vertex of the board, an index in `0..n`.
pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("edge {0} is already claimed")]
    AlreadyClaimed(DirectedEdge),
    #[error("it is not {0}'s turn")]
    OutOfTurn(Player),
    #[error("self-loop at vertex {0} is not an edge of the complete digraph")]
    LoopEdge(Vertex),
    #[error("vertex {vertex} is out of range for n = {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("invalid game config: {0}")]
    InvalidConfig(String),
    #[error("move history is not being recorded")]
    HistoryDisabled,
    #[error("position text, line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    Maker,
    Breaker,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Maker => write!(f, "Maker"),
            Player::Breaker => write!(f, "Breaker"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum EdgeOwner {
    #[default]
    Unclaimed,
    Maker,
    Breaker,
}

impl From<Player> for EdgeOwner {
    fn from(p: Player) -> Self {
        match p {
            Player::Maker => EdgeOwner::Maker,
            Player::Breaker => EdgeOwner::Breaker,
        }
    }
}

/// An oriented edge `(from, to)` with `from != to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirectedEdge {
    from: u32,
    to: u32,
}

impl DirectedEdge {
    pub fn new(from: Vertex, to: Vertex) -> Result<Self, GameError> {
        if from == to {
            return Err(GameError::LoopEdge(from));
        }
        Ok(DirectedEdge {
            from: from as u32,
            to: to as u32,
        })
    }

    pub fn from(&self) -> Vertex {
        self.from as Vertex
    }

    pub fn to(&self) -> Vertex {
        self.to as Vertex
    }

    pub fn reversed(&self) -> Self {
        DirectedEdge {
            from: self.to,
            to: self.from,
        }
    }
}

impl fmt::Display for DirectedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.from, self.to)
    }
}

/// A vertex of the bipartite view: `A(k)` carries the out-star of `k`,
/// `B(k)` its in-star.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BipartiteVertex {
    A(Vertex),
    B(Vertex),
}

impl BipartiteVertex {
    /// Dense index in `0..2n`: all `a_k` first, then all `b_k`.
    pub fn index(self, n: usize) -> usize {
        match self {
            BipartiteVertex::A(k) => k,
            BipartiteVertex::B(k) => n + k,
        }
    }

    pub fn from_index(idx: usize, n: usize) -> Self {
        if idx < n {
            BipartiteVertex::A(idx)
        } else {
            BipartiteVertex::B(idx - n)
        }
    }

    pub fn vertex(self) -> Vertex {
        match self {
            BipartiteVertex::A(k) | BipartiteVertex::B(k) => k,
        }
    }

    /// Whether the digraph edge maps onto a bipartite edge at this vertex.
    pub fn is_incident(self, edge: DirectedEdge) -> bool {
        match self {
            BipartiteVertex::A(k) => edge.from() == k,
            BipartiteVertex::B(k) => edge.to() == k,
        }
    }
}

impl fmt::Display for BipartiteVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BipartiteVertex::A(k) => write!(f, "a_{k}"),
            BipartiteVertex::B(k) => write!(f, "b_{k}"),
        }
    }
}

/// Parameters of a game. `b`, `alpha`, `beta`, `theta` and `k` follow the
/// usual notation: Breaker bias, Breaker degree cap as a fraction of `n`,
/// bias constant, degree constant, and the target minimum degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub n: usize,
    pub b: usize,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub k: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl GameConfig {
    pub const DEFAULT_ALPHA: f64 = 0.5;
    pub const DEFAULT_BETA: f64 = 0.1;
    pub const DEFAULT_THETA: f64 = 2.0;
    pub const DEFAULT_EPSILON: f64 = 0.1;

    /// Config with default constants and `k` derived from them.
    pub fn new(n: usize, b: usize) -> Self {
        GameConfig {
            n,
            b,
            alpha: Self::DEFAULT_ALPHA,
            beta: Self::DEFAULT_BETA,
            theta: Self::DEFAULT_THETA,
            k: Self::derived_k(n, Self::DEFAULT_THETA, Self::DEFAULT_ALPHA),
            epsilon: Self::DEFAULT_EPSILON,
            seed: 0,
        }
    }

    /// `max(⌈θ ln n⌉, ⌈2/α⌉)`, at least 1.
    pub fn derived_k(n: usize, theta: f64, alpha: f64) -> usize {
        let ln_n = (n.max(2) as f64).ln();
        let from_theta = (theta * ln_n - 1e-9).ceil().max(1.0) as usize;
        let from_alpha = (2.0 / alpha - 1e-9).ceil().max(1.0) as usize;
        from_theta.max(from_alpha)
    }

    /// Breaker bias `⌊βn / ln n⌋`, clamped to at least 1.
    pub fn bias_for_beta(n: usize, beta: f64) -> usize {
        ((beta * n as f64 / (n as f64).ln()).floor() as usize).max(1)
    }

    pub fn validate(&self) -> Result<(), GameError> {
        if self.n < 2 {
            return Err(GameError::InvalidConfig(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.n > u32::MAX as usize {
            return Err(GameError::InvalidConfig("n does not fit in 32 bits".into()));
        }
        if self.b < 1 {
            return Err(GameError::InvalidConfig(
                "Breaker bias b must be at least 1".into(),
            ));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(GameError::InvalidConfig(format!(
                    "{name} must lie in (0,1), got {v}"
                )));
            }
        }
        if !(self.theta > 0.0) {
            return Err(GameError::InvalidConfig(format!(
                "theta must be positive, got {}",
                self.theta
            )));
        }
        Ok(())
    }

    /// Hypotheses under which the degree strategy is guaranteed to reach
    /// minimum degree `k` while keeping Breaker's degrees below `αn`:
    /// `k ≥ 2/α`, `θβ < α` and `θ < (α−β)/β`.
    pub fn degree_hypotheses_hold(&self) -> bool {
        self.k as f64 >= 2.0 / self.alpha
            && self.theta * self.beta < self.alpha
            && self.theta < (self.alpha - self.beta) / self.beta
    }

    pub fn edge_count(&self) -> usize {
        self.n * (self.n - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub player: Player,
    pub edge: DirectedEdge,
}

/// One Maker move followed by Breaker's answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub maker: DirectedEdge,
    pub breaker: Vec<DirectedEdge>,
}

#[derive(Clone, Debug)]
pub struct GameState {
    config: GameConfig,
    owner: Vec<EdgeOwner>,
    maker_out: Vec<u32>,
    maker_in: Vec<u32>,
    breaker_out: Vec<u32>,
    breaker_in: Vec<u32>,
    maker_succ: Vec<Vec<u32>>,
    maker_pred: Vec<Vec<u32>>,
    to_move: Player,
    breaker_claims_this_turn: usize,
    maker_edges: usize,
    breaker_edges: usize,
    round: usize,
    history: Option<Vec<Claim>>,
}

impl GameState {
    /// Fresh game with history recording switched on.
    pub fn new(config: GameConfig) -> Result<Self, GameError> {
        Self::with_history(config, true)
    }

    pub fn with_history(config: GameConfig, record_history: bool) -> Result<Self, GameError> {
        config.validate()?;
        let n = config.n;
        Ok(GameState {
            owner: vec![EdgeOwner::Unclaimed; config.edge_count()],
            maker_out: vec![0; n],
            maker_in: vec![0; n],
            breaker_out: vec![0; n],
            breaker_in: vec![0; n],
            maker_succ: vec![Vec::new(); n],
            maker_pred: vec![Vec::new(); n],
            to_move: Player::Maker,
            breaker_claims_this_turn: 0,
            maker_edges: 0,
            breaker_edges: 0,
            round: 0,
            history: record_history.then(Vec::new),
            config,
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn bias(&self) -> usize {
        self.config.b
    }

    /// Number of Maker turns played so far.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn maker_edge_count(&self) -> usize {
        self.maker_edges
    }

    pub fn breaker_edge_count(&self) -> usize {
        self.breaker_edges
    }

    pub fn unclaimed_count(&self) -> usize {
        self.owner.len() - self.maker_edges - self.breaker_edges
    }

    pub fn is_exhausted(&self) -> bool {
        self.unclaimed_count() == 0
    }

    /// Edges Breaker still has to claim this turn, capped by what is left.
    pub fn breaker_quota(&self) -> usize {
        if self.to_move != Player::Breaker {
            return 0;
        }
        (self.config.b - self.breaker_claims_this_turn).min(self.unclaimed_count())
    }

    #[inline]
    pub fn edge_index(&self, edge: DirectedEdge) -> usize {
        let (from, to) = (edge.from(), edge.to());
        from * (self.config.n - 1) + if to > from { to - 1 } else { to }
    }

    #[inline]
    pub fn edge_at(&self, idx: usize) -> DirectedEdge {
        let m = self.config.n - 1;
        let from = idx / m;
        let r = idx % m;
        let to = if r >= from { r + 1 } else { r };
        DirectedEdge {
            from: from as u32,
            to: to as u32,
        }
    }

    #[inline]
    pub fn owner(&self, edge: DirectedEdge) -> EdgeOwner {
        self.owner[self.edge_index(edge)]
    }

    #[inline]
    pub fn owner_of(&self, from: Vertex, to: Vertex) -> EdgeOwner {
        if from == to {
            return EdgeOwner::Unclaimed;
        }
        self.owner[from * (self.config.n - 1) + if to > from { to - 1 } else { to }]
    }

    #[inline]
    pub fn is_unclaimed(&self, from: Vertex, to: Vertex) -> bool {
        from != to && self.owner_of(from, to) == EdgeOwner::Unclaimed
    }

    pub fn claim(&mut self, player: Player, edge: DirectedEdge) -> Result<(), GameError> {
        let n = self.config.n;
        for v in [edge.from(), edge.to()] {
            if v >= n {
                return Err(GameError::VertexOutOfRange { vertex: v, n });
            }
        }
        if player != self.to_move {
            return Err(GameError::OutOfTurn(player));
        }
        let idx = self.edge_index(edge);
        if self.owner[idx] != EdgeOwner::Unclaimed {
            return Err(GameError::AlreadyClaimed(edge));
        }
        self.owner[idx] = player.into();
        let (i, j) = (edge.from(), edge.to());
        match player {
            Player::Maker => {
                self.maker_out[i] += 1;
                self.maker_in[j] += 1;
                self.maker_succ[i].push(j as u32);
                self.maker_pred[j].push(i as u32);
                self.maker_edges += 1;
                self.round += 1;
                self.to_move = Player::Breaker;
                self.breaker_claims_this_turn = 0;
            }
            Player::Breaker => {
                self.breaker_out[i] += 1;
                self.breaker_in[j] += 1;
                self.breaker_edges += 1;
                self.breaker_claims_this_turn += 1;
                if self.breaker_claims_this_turn == self.config.b {
                    self.to_move = Player::Maker;
                }
            }
        }
        if let Some(h) = self.history.as_mut() {
            h.push(Claim { player, edge });
        }
        Ok(())
    }

    pub fn unclaimed_out_edges(&self, v: Vertex) -> Vec<Vertex> {
        (0..self.config.n)
            .filter(|&w| self.is_unclaimed(v, w))
            .collect()
    }

    pub fn unclaimed_in_edges(&self, v: Vertex) -> Vec<Vertex> {
        (0..self.config.n)
            .filter(|&w| self.is_unclaimed(w, v))
            .collect()
    }

    /// Unclaimed edges incident to `v` in the bipartite view.
    pub fn unclaimed_incident(&self, v: BipartiteVertex) -> Vec<DirectedEdge> {
        match v {
            BipartiteVertex::A(k) => self
                .unclaimed_out_edges(k)
                .into_iter()
                .map(|w| DirectedEdge {
                    from: k as u32,
                    to: w as u32,
                })
                .collect(),
            BipartiteVertex::B(k) => self
                .unclaimed_in_edges(k)
                .into_iter()
                .map(|w| DirectedEdge {
                    from: w as u32,
                    to: k as u32,
                })
                .collect(),
        }
    }

    pub fn maker_out_degree(&self, v: Vertex) -> usize {
        self.maker_out[v] as usize
    }

    pub fn maker_in_degree(&self, v: Vertex) -> usize {
        self.maker_in[v] as usize
    }

    pub fn breaker_out_degree(&self, v: Vertex) -> usize {
        self.breaker_out[v] as usize
    }

    pub fn breaker_in_degree(&self, v: Vertex) -> usize {
        self.breaker_in[v] as usize
    }

    pub fn maker_degree(&self, v: BipartiteVertex) -> usize {
        match v {
            BipartiteVertex::A(k) => self.maker_out[k] as usize,
            BipartiteVertex::B(k) => self.maker_in[k] as usize,
        }
    }

    pub fn breaker_degree(&self, v: BipartiteVertex) -> usize {
        match v {
            BipartiteVertex::A(k) => self.breaker_out[k] as usize,
            BipartiteVertex::B(k) => self.breaker_in[k] as usize,
        }
    }

    /// Smallest Maker degree over all `2n` bipartite vertices.
    pub fn min_maker_degree(&self) -> usize {
        self.maker_out
            .iter()
            .chain(self.maker_in.iter())
            .copied()
            .min()
            .unwrap_or(0) as usize
    }

    pub fn max_breaker_degree(&self) -> usize {
        self.breaker_out
            .iter()
            .chain(self.breaker_in.iter())
            .copied()
            .max()
            .unwrap_or(0) as usize
    }

    /// Maker's out-neighbours of `v` in the order they were claimed.
    pub fn maker_successors(&self, v: Vertex) -> &[u32] {
        &self.maker_succ[v]
    }

    /// Maker's in-neighbours of `v` in the order they were claimed.
    pub fn maker_predecessors(&self, v: Vertex) -> &[u32] {
        &self.maker_pred[v]
    }

    pub fn history(&self) -> Option<&[Claim]> {
        self.history.as_deref()
    }

    /// History grouped into rounds; the last round may have a short Breaker part.
    pub fn rounds(&self) -> Option<Vec<RoundRecord>> {
        let history = self.history.as_ref()?;
        let mut rounds: Vec<RoundRecord> = Vec::new();
        for c in history {
            match c.player {
                Player::Maker => rounds.push(RoundRecord {
                    round: rounds.len(),
                    maker: c.edge,
                    breaker: Vec::new(),
                }),
                Player::Breaker => {
                    if let Some(r) = rounds.last_mut() {
                        r.breaker.push(c.edge);
                    }
                }
            }
        }
        Some(rounds)
    }

    pub fn claimed_edges(&self, player: Player) -> impl Iterator<Item = DirectedEdge> + '_ {
        let target = EdgeOwner::from(player);
        self.owner
            .iter()
            .enumerate()
            .filter(move |(_, o)| **o == target)
            .map(move |(idx, _)| self.edge_at(idx))
    }

    pub fn bipartite_view(&self) -> BipartiteView {
        let n = self.config.n;
        let mut view = BipartiteView {
            n,
            maker_edges: Vec::with_capacity(self.maker_edges),
            breaker_edges: Vec::with_capacity(self.breaker_edges),
            maker_degree: vec![0; 2 * n],
            breaker_degree: vec![0; 2 * n],
        };
        for (idx, owner) in self.owner.iter().enumerate() {
            let e = self.edge_at(idx);
            let (a, b) = (BipartiteVertex::A(e.from()), BipartiteVertex::B(e.to()));
            let (edges, deg) = match owner {
                EdgeOwner::Unclaimed => continue,
                EdgeOwner::Maker => (&mut view.maker_edges, &mut view.maker_degree),
                EdgeOwner::Breaker => (&mut view.breaker_edges, &mut view.breaker_degree),
            };
            edges.push((a, b));
            deg[a.index(n)] += 1;
            deg[b.index(n)] += 1;
        }
        view
    }

    /// Recomputes every cached quantity from the owner array and reports the
    /// first disagreement.
    pub fn check_consistency(&self) -> Result<(), String> {
        let n = self.config.n;
        let mut mo = vec![0u32; n];
        let mut mi = vec![0u32; n];
        let mut bo = vec![0u32; n];
        let mut bi = vec![0u32; n];
        let (mut m, mut b) = (0usize, 0usize);
        for (idx, owner) in self.owner.iter().enumerate() {
            let e = self.edge_at(idx);
            match owner {
                EdgeOwner::Unclaimed => {}
                EdgeOwner::Maker => {
                    mo[e.from()] += 1;
                    mi[e.to()] += 1;
                    m += 1;
                }
                EdgeOwner::Breaker => {
                    bo[e.from()] += 1;
                    bi[e.to()] += 1;
                    b += 1;
                }
            }
        }
        if mo != self.maker_out || mi != self.maker_in {
            return Err("Maker degree cache disagrees with owner map".into());
        }
        if bo != self.breaker_out || bi != self.breaker_in {
            return Err("Breaker degree cache disagrees with owner map".into());
        }
        if m != self.maker_edges || b != self.breaker_edges {
            return Err(format!(
                "edge counts {}/{} disagree with owner map {m}/{b}",
                self.maker_edges, self.breaker_edges
            ));
        }
        if m != self.round {
            return Err(format!("{m} Maker edges after {} Maker turns", self.round));
        }
        for v in 0..n {
            let succ_ok = self.maker_succ[v].len() == mo[v] as usize
                && self.maker_succ[v]
                    .iter()
                    .all(|&w| self.owner_of(v, w as usize) == EdgeOwner::Maker);
            let pred_ok = self.maker_pred[v].len() == mi[v] as usize
                && self.maker_pred[v]
                    .iter()
                    .all(|&w| self.owner_of(w as usize, v) == EdgeOwner::Maker);
            if !succ_ok || !pred_ok {
                return Err(format!("Maker adjacency lists of vertex {v} are stale"));
            }
        }
        // |E_M| − 1 ≤ ⌊|E_B| / b⌋ ≤ |E_M| while unclaimed edges remain
        if !self.is_exhausted() {
            let turns = b / self.config.b;
            if turns > m || turns + 1 < m {
                return Err(format!("turn accounting broken: |E_M| = {m}, |E_B| = {b}"));
            }
        }
        if let Some(h) = &self.history {
            if h.len() != m + b {
                return Err("history length disagrees with claimed edges".into());
            }
        }
        Ok(())
    }

    /// Position dump: header `n b seed`, then `M i j` / `B i j` in claim order.
    pub fn to_position_text(&self) -> Result<String, GameError> {
        let history = self.history.as_ref().ok_or(GameError::HistoryDisabled)?;
        let mut out = format!("{} {} {}\n", self.config.n, self.config.b, self.config.seed);
        for c in history {
            let tag = match c.player {
                Player::Maker => 'M',
                Player::Breaker => 'B',
            };
            out.push_str(&format!("{tag} {} {}\n", c.edge.from(), c.edge.to()));
        }
        Ok(out)
    }

    /// Replays a position dump. Constants other than `n`, `b` and the seed
    /// take their defaults.
    pub fn from_position_text(text: &str) -> Result<Self, GameError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(GameError::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_err = |line: usize, message: String| GameError::Parse { line, message };
        if fields.len() != 3 {
            return Err(parse_err(1, format!("expected `n b seed`, got {header:?}")));
        }
        let n = usize::from_str(fields[0]).map_err(|e| parse_err(1, e.to_string()))?;
        let b = usize::from_str(fields[1]).map_err(|e| parse_err(1, e.to_string()))?;
        let seed = u64::from_str(fields[2]).map_err(|e| parse_err(1, e.to_string()))?;
        let mut config = GameConfig::new(n, b);
        config.seed = seed;
        let mut state = GameState::new(config)?;
        for (i, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(
                    i + 1,
                    format!("expected `M i j` or `B i j`, got {line:?}"),
                ));
            }
            let player = match f[0] {
                "M" => Player::Maker,
                "B" => Player::Breaker,
                other => return Err(parse_err(i + 1, format!("unknown player tag {other:?}"))),
            };
            let from = usize::from_str(f[1]).map_err(|e| parse_err(i + 1, e.to_string()))?;
            let to = usize::from_str(f[2]).map_err(|e| parse_err(i + 1, e.to_string()))?;
            state.claim(player, DirectedEdge::new(from, to)?)?;
        }
        Ok(state)
    }
}

/// The position on `K_{n,n}`: digraph edge `(i, j)` becomes `{a_i, b_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteView {
    pub n: usize,
    pub maker_edges: Vec<(BipartiteVertex, BipartiteVertex)>,
    pub breaker_edges: Vec<(BipartiteVertex, BipartiteVertex)>,
    /// Indexed by [`BipartiteVertex::index`].
    pub maker_degree: Vec<usize>,
    pub breaker_degree: Vec<usize>,
}

impl BipartiteView {
    pub fn maker_degree_of(&self, v: BipartiteVertex) -> usize {
        self.maker_degree[v.index(self.n)]
    }

    pub fn breaker_degree_of(&self, v: BipartiteVertex) -> usize {
        self.breaker_degree[v.index(self.n)]
    }
}
