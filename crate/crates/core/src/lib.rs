//! Biased Maker-Breaker games on the complete digraph.
//!
//! The crate bundles a rule-enforcing game engine ([`game`]), pluggable
//! Maker and Breaker strategies ([`strategies`]), strong-connectivity tooling
//! and Maker's sink-to-source patching ([`connectivity`]), the
//! rotation-extension Hamilton cycle builder over deferred OUT lists
//! ([`hamilton`]), and a deterministic Monte Carlo harness ([`harness`]).

pub mod connectivity;
pub mod game;
pub mod hamilton;
pub mod harness;
pub mod rng;
pub mod session;
pub mod strategies;
pub mod verify;

pub use game::{
    BipartiteVertex, DirectedEdge, EdgeOwner, GameConfig, GameError, GameState, Player, Vertex,
};
pub use rng::SimRng;
pub use session::Session;
