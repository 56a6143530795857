//! A game in progress: the board, the incremental danger table, and the
//! seeded generator every strategy draws from.

use crate::game::{DirectedEdge, GameConfig, GameError, GameState, Player};
use crate::rng::{rng_from_seed, SimRng};
use crate::strategies::{BreakerStrategy, DangerTable, MakerStrategy, StrategyError};

#[derive(Clone, Debug)]
pub struct Session {
    pub state: GameState,
    pub danger: DangerTable,
    pub rng: SimRng,
}

impl Session {
    /// Seeds the generator from `config.seed`.
    pub fn new(config: GameConfig, record_history: bool) -> Result<Self, GameError> {
        let rng = rng_from_seed(config.seed);
        let danger = DangerTable::new(config.n, config.b);
        let state = GameState::with_history(config, record_history)?;
        Ok(Session { state, danger, rng })
    }

    pub fn claim(&mut self, player: Player, edge: DirectedEdge) -> Result<(), GameError> {
        self.state.claim(player, edge)?;
        self.danger.record(player, edge);
        Ok(())
    }

    /// Asks `maker` for a move and plays it. `Ok(None)` when the strategy is done.
    pub fn maker_move(
        &mut self,
        maker: &mut dyn MakerStrategy,
    ) -> Result<Option<DirectedEdge>, StrategyError> {
        let Some(edge) = maker.choose(&self.state, &self.danger, &mut self.rng)? else {
            return Ok(None);
        };
        self.claim(Player::Maker, edge)?;
        Ok(Some(edge))
    }

    /// Plays one full Breaker turn.
    pub fn breaker_turn(
        &mut self,
        breaker: &mut dyn BreakerStrategy,
    ) -> Result<Vec<DirectedEdge>, StrategyError> {
        let edges = breaker.choose(&self.state, &self.danger, &mut self.rng);
        for &e in &edges {
            self.claim(Player::Breaker, e)?;
        }
        debug_assert!(
            self.state.is_exhausted() || self.state.to_move() == Player::Maker,
            "{} returned a short turn",
            breaker.kind()
        );
        Ok(edges)
    }
}
