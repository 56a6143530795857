//! Pluggable Maker and Breaker move generators.
//!
//! Maker's degree phase eases the most dangerous unfinished bipartite vertex;
//! Breaker has a box-game attack on out-stars plus two baselines. The
//! abstract box game lives in [`box_game`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{BipartiteVertex, DirectedEdge, GameError, GameState};
use crate::rng::SimRng;

pub mod box_game;
mod breaker;
mod danger;
mod maker;

pub use breaker::{
    breaker_box_move, breaker_maxdegree_move, breaker_random_move, BoxBreaker, MaxDegreeBreaker,
    RandomBreaker,
};
pub use danger::{danger, DangerTable};
pub use maker::{maker_degree_move, DegreeMaker, DegreeMove};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    /// The vertex Maker has to ease has no unclaimed incident edge left. This
    /// means the degree guarantee has already been broken.
    #[error("no unclaimed edge incident to {0}")]
    NoUnclaimedIncidentEdge(BipartiteVertex),
    /// No unclaimed edge runs from any sink component to any source component.
    #[error("stuck: no unclaimed sink-to-source edge remains")]
    Stuck,
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    MakerDegree,
    MakerConnectivity,
    BreakerBox,
    BreakerRandom,
    BreakerMaxDegree,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::MakerDegree,
        StrategyKind::MakerConnectivity,
        StrategyKind::BreakerBox,
        StrategyKind::BreakerRandom,
        StrategyKind::BreakerMaxDegree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::MakerDegree => "MakerDegree",
            StrategyKind::MakerConnectivity => "MakerConnectivity",
            StrategyKind::BreakerBox => "BreakerBox",
            StrategyKind::BreakerRandom => "BreakerRandom",
            StrategyKind::BreakerMaxDegree => "BreakerMaxDegree",
        }
    }

    pub fn is_maker(self) -> bool {
        matches!(
            self,
            StrategyKind::MakerDegree | StrategyKind::MakerConnectivity
        )
    }

    /// Instantiates a Breaker strategy; `None` for Maker kinds.
    pub fn breaker(self) -> Option<Box<dyn BreakerStrategy>> {
        match self {
            StrategyKind::BreakerBox => Some(Box::new(BoxBreaker)),
            StrategyKind::BreakerRandom => Some(Box::new(RandomBreaker)),
            StrategyKind::BreakerMaxDegree => Some(Box::new(MaxDegreeBreaker)),
            _ => None,
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    /// Case-insensitive; `_` and `-` are ignored, so `breaker_box` parses.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| !matches!(c, '_' | '-')).collect();
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(&key))
            .ok_or_else(|| {
                let names: Vec<_> = StrategyKind::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown strategy {s:?}; expected one of {}",
                    names.join(", ")
                )
            })
    }
}

/// A Maker move generator. `Ok(None)` means the strategy's plan is complete
/// (its goal holds, or its phase is over) and it has nothing further to claim.
pub trait MakerStrategy: Send {
    fn kind(&self) -> StrategyKind;

    fn choose(
        &mut self,
        state: &GameState,
        danger: &DangerTable,
        rng: &mut SimRng,
    ) -> Result<Option<DirectedEdge>, StrategyError>;
}

/// A Breaker move generator. Returns distinct unclaimed edges, at most
/// [`GameState::breaker_quota`] of them.
pub trait BreakerStrategy: Send {
    fn kind(&self) -> StrategyKind;

    fn choose(
        &mut self,
        state: &GameState,
        danger: &DangerTable,
        rng: &mut SimRng,
    ) -> Vec<DirectedEdge>;
}
