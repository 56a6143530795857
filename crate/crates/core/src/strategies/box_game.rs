//! The abstract box game: `n_boxes` boxes of `box_size` elements each.
//! Breaker places `bias` elements per turn and wins by filling a box; the
//! opponent removes one surviving box per turn and wins once none is left.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::game::GameError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxGameConfig {
    pub n_boxes: usize,
    pub box_size: usize,
    pub bias: usize,
    pub breaker_first: bool,
}

impl BoxGameConfig {
    pub fn new(n_boxes: usize, box_size: usize, bias: usize) -> Self {
        BoxGameConfig {
            n_boxes,
            box_size,
            bias,
            breaker_first: true,
        }
    }

    pub fn validate(&self) -> Result<(), GameError> {
        if self.n_boxes == 0 || self.box_size == 0 || self.bias == 0 {
            return Err(GameError::InvalidConfig(format!(
                "box game needs n_boxes, box_size, bias >= 1 (got {}, {}, {})",
                self.n_boxes, self.box_size, self.bias
            )));
        }
        Ok(())
    }
}

/// Surviving boxes and how many Breaker elements each one holds.
#[derive(Clone, Debug)]
pub struct BoxBoard {
    box_size: usize,
    counts: Vec<usize>,
    alive: Vec<bool>,
    // (count, id) of every surviving box
    by_count: BTreeSet<(usize, usize)>,
}

impl BoxBoard {
    pub fn new(n_boxes: usize, box_size: usize) -> Self {
        BoxBoard {
            box_size,
            counts: vec![0; n_boxes],
            alive: vec![true; n_boxes],
            by_count: (0..n_boxes).map(|i| (0, i)).collect(),
        }
    }

    pub fn box_size(&self) -> usize {
        self.box_size
    }

    pub fn n_boxes(&self) -> usize {
        self.counts.len()
    }

    pub fn alive_count(&self) -> usize {
        self.by_count.len()
    }

    pub fn is_alive(&self, i: usize) -> bool {
        self.alive[i]
    }

    pub fn count(&self, i: usize) -> usize {
        self.counts[i]
    }

    /// Surviving box with the fewest Breaker elements, lowest id on ties.
    pub fn least_attacked(&self) -> Option<usize> {
        self.by_count.first().map(|&(_, i)| i)
    }

    /// Surviving box with the most Breaker elements, lowest id on ties.
    pub fn most_attacked(&self) -> Option<usize> {
        let &(top, _) = self.by_count.last()?;
        self.by_count.range((top, 0)..).next().map(|&(_, i)| i)
    }

    /// Adds one Breaker element to box `i`; true if that fills it.
    pub fn place(&mut self, i: usize) -> bool {
        assert!(self.alive[i], "box {i} is not alive");
        assert!(self.counts[i] < self.box_size, "box {i} is already full");
        self.by_count.remove(&(self.counts[i], i));
        self.counts[i] += 1;
        self.by_count.insert((self.counts[i], i));
        self.counts[i] == self.box_size
    }

    pub fn remove(&mut self, i: usize) {
        assert!(self.alive[i], "box {i} is not alive");
        self.alive[i] = false;
        self.by_count.remove(&(self.counts[i], i));
    }
}

/// Chooses the box for Breaker's next element. Only called while a box is alive.
pub trait BoxBreakerPolicy {
    fn pick(&mut self, board: &BoxBoard) -> usize;
}

/// Chooses the surviving box the opponent removes.
pub trait BoxOpponentPolicy {
    fn remove(&mut self, board: &BoxBoard) -> usize;
}

/// Spreads elements evenly: every element goes to the least attacked box.
#[derive(Clone, Copy, Debug, Default)]
pub struct Balanced;

/// Piles elements into the box closest to completion.
#[derive(Clone, Copy, Debug, Default)]
pub struct SmallestFirst;

#[derive(Clone, Copy, Debug, Default)]
pub struct RemoveMostAttacked;

impl BoxBreakerPolicy for Balanced {
    fn pick(&mut self, board: &BoxBoard) -> usize {
        board.least_attacked().expect("no surviving box")
    }
}

impl BoxBreakerPolicy for SmallestFirst {
    fn pick(&mut self, board: &BoxBoard) -> usize {
        board.most_attacked().expect("no surviving box")
    }
}

impl BoxOpponentPolicy for RemoveMostAttacked {
    fn remove(&mut self, board: &BoxBoard) -> usize {
        board.most_attacked().expect("no surviving box")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoxWinner {
    Breaker,
    Opponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxGameOutcome {
    pub winner: BoxWinner,
    /// Breaker turns started.
    pub breaker_turns: usize,
    pub full_box: Option<usize>,
}

pub fn box_game_play(
    config: &BoxGameConfig,
    breaker: &mut dyn BoxBreakerPolicy,
    opponent: &mut dyn BoxOpponentPolicy,
) -> Result<BoxGameOutcome, GameError> {
    config.validate()?;
    let mut board = BoxBoard::new(config.n_boxes, config.box_size);
    let mut breaker_turns = 0;
    if !config.breaker_first {
        let r = opponent.remove(&board);
        board.remove(r);
    }
    while board.alive_count() > 0 {
        breaker_turns += 1;
        for _ in 0..config.bias {
            let i = breaker.pick(&board);
            if board.place(i) {
                return Ok(BoxGameOutcome {
                    winner: BoxWinner::Breaker,
                    breaker_turns,
                    full_box: Some(i),
                });
            }
        }
        let r = opponent.remove(&board);
        board.remove(r);
    }
    Ok(BoxGameOutcome {
        winner: BoxWinner::Opponent,
        breaker_turns,
        full_box: None,
    })
}

/// Default policies: balanced Breaker against the most-attacked remover.
pub fn box_game_default(config: &BoxGameConfig) -> Result<BoxGameOutcome, GameError> {
    box_game_play(config, &mut Balanced, &mut RemoveMostAttacked)
}
