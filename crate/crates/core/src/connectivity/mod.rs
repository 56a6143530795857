//! Strong connectivity of Maker's digraph: condensation, the expansion
//! checker for small sets, and the sink-to-source patching endgame.

use std::fmt::Write as _;

use thiserror::Error;

use crate::game::{GameState, Vertex};
use crate::strategies::StrategyError;

mod expansion;
mod patching;
mod scc;

pub use expansion::{
    expansion_check, expansion_k_bound, expansion_threshold, is_violating, ExpansionMode,
    ExpansionReport,
};
pub use patching::{maker_connectivity_endgame, patch_move, ConnectivityMaker, PatchStats};
pub use scc::{condense, Condensation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConnectivityError {
    #[error("exhaustive expansion check supports n <= {max}, got n = {n}")]
    SizeTooLargeForExhaustive { n: usize, max: usize },
    #[error("stuck: no unclaimed edge from a sink component to a source component")]
    Stuck,
    #[error("degree phase incomplete: minimum Maker degree {min_degree} < K = {k}")]
    DegreePhaseIncomplete { min_degree: usize, k: usize },
    #[error("invalid digraph: {0}")]
    InvalidGraph(String),
    #[error("digraph text, line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// A simple digraph on `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
}

impl Digraph {
    /// Loops are rejected; duplicate edges are collapsed.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, ConnectivityError> {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(ConnectivityError::InvalidGraph(format!(
                    "edge ({i},{j}) out of range for n = {n}"
                )));
            }
            if i == j {
                return Err(ConnectivityError::InvalidGraph(format!("loop at {i}")));
            }
            out[i].push(j as u32);
            inn[j].push(i as u32);
        }
        for l in out.iter_mut().chain(inn.iter_mut()) {
            l.sort_unstable();
            l.dedup();
        }
        Ok(Digraph { n, out, inn })
    }

    /// Maker's digraph in the current position.
    pub fn from_maker(state: &GameState) -> Self {
        let n = state.n();
        let mut out: Vec<Vec<u32>> = (0..n).map(|v| state.maker_successors(v).to_vec()).collect();
        let mut inn: Vec<Vec<u32>> = (0..n)
            .map(|v| state.maker_predecessors(v).to_vec())
            .collect();
        for l in out.iter_mut().chain(inn.iter_mut()) {
            l.sort_unstable();
        }
        Digraph { n, out, inn }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn successors(&self, v: Vertex) -> &[u32] {
        &self.out[v]
    }

    pub fn predecessors(&self, v: Vertex) -> &[u32] {
        &self.inn[v]
    }

    pub fn has_edge(&self, i: Vertex, j: Vertex) -> bool {
        self.out[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().map(move |&j| (i, j as usize)))
    }

    pub fn min_out_degree(&self) -> usize {
        self.out.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn min_in_degree(&self) -> usize {
        self.inn.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// `n` on the first line, then one `i j` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (i, j) in self.edges() {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    /// Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self, ConnectivityError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(ConnectivityError::Parse {
            line: 1,
            message: "missing vertex count header".into(),
        })?;
        let n: usize = header.parse().map_err(|_| ConnectivityError::Parse {
            line: hl,
            message: format!("expected vertex count, got {header:?}"),
        })?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                [a, b] => a.parse::<usize>().ok().zip(b.parse::<usize>().ok()),
                _ => None,
            };
            let (i, j) = parsed.ok_or_else(|| ConnectivityError::Parse {
                line,
                message: format!("expected \"i j\", got {l:?}"),
            })?;
            if i >= n || j >= n || i == j {
                return Err(ConnectivityError::Parse {
                    line,
                    message: format!(
                        "edge ({i},{j}) is not an edge of the complete digraph on {n} vertices"
                    ),
                });
            }
            edges.push((i, j));
        }
        Digraph::from_edges(n, edges)
    }
}
