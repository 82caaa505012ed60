//! Binary payoff vectors: one win/lose bit per player.

use std::fmt;

use game_core::game::{PlayerId, Smg};
use thiserror::Error;

/// One boolean payoff per player, in player order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryPayoff(Vec<bool>);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PayoffParseError {
    #[error("payoff bit string may only contain 0 and 1, got '{0}'")]
    BadCharacter(String),
    #[error("payoff has {found} bits, game has {expected} players")]
    WrongLength { expected: usize, found: usize },
}

impl BinaryPayoff {
    pub fn new(bits: Vec<bool>) -> Self {
        BinaryPayoff(bits)
    }

    /// Parses a compact bit string such as `"101"`, validating its length
    /// against the player count.
    pub fn parse(text: &str, players: usize) -> Result<Self, PayoffParseError> {
        let mut bits = Vec::with_capacity(text.len());
        for c in text.trim().chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(PayoffParseError::BadCharacter(text.to_owned())),
            }
        }
        if bits.len() != players {
            return Err(PayoffParseError::WrongLength { expected: players, found: bits.len() });
        }
        Ok(BinaryPayoff(bits))
    }

    pub fn bit(&self, player: PlayerId) -> bool {
        self.0[player]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Players demanding payoff 0.
    pub fn zero_players(&self) -> impl Iterator<Item = PlayerId> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| !b).map(|(i, _)| i)
    }

    pub fn matches_players(&self, g: &Smg) -> bool {
        self.0.len() == g.players()
    }
}

impl fmt::Display for BinaryPayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}
