//! Head-to-head evaluation of a weight vector playing X.

use std::fmt;
use std::str::FromStr;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::board::{Board, Move, Player};
use crate::error::{Error, Result};
use crate::features::feature_dimension;
use crate::minimax::{search, SearchConfig};
use crate::trainer::{best_move, TrainStats};
use crate::value::WeightVector;

/// Largest board on which an unlimited-depth minimax opponent is allowed.
pub const MAX_FULL_SEARCH_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Opponent {
    Random,
    Minimax(SearchConfig),
    /// The agent's own weights playing O.
    SelfPlay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpponentKind {
    Random,
    Minimax,
    SelfPlay,
}

impl FromStr for OpponentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(OpponentKind::Random),
            "minimax" => Ok(OpponentKind::Minimax),
            "self" => Ok(OpponentKind::SelfPlay),
            other => Err(Error::Config(format!("unknown opponent {other:?}"))),
        }
    }
}

impl fmt::Display for OpponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpponentKind::Random => "random",
            OpponentKind::Minimax => "minimax",
            OpponentKind::SelfPlay => "self",
        })
    }
}

/// Rejects full-depth search where the tree is out of reach.
pub fn check_search_feasible(size: usize, cfg: &SearchConfig) -> Result<()> {
    if cfg.max_depth.is_none() && size > MAX_FULL_SEARCH_SIZE {
        return Err(Error::Config(format!(
            "minimax without a depth limit is only supported up to {MAX_FULL_SEARCH_SIZE}x{MAX_FULL_SEARCH_SIZE}"
        )));
    }
    Ok(())
}

pub fn random_move<R: Rng + ?Sized>(b: &Board, rng: &mut R) -> Result<Move> {
    b.legal_moves().choose(rng).copied().ok_or(Error::GameOver)
}

fn opponent_move(b: &Board, w: &WeightVector, opponent: &Opponent, rng: &mut ChaCha8Rng) -> Result<Move> {
    match opponent {
        Opponent::Random => random_move(b, rng),
        Opponent::SelfPlay => best_move(b, w, rng),
        Opponent::Minimax(cfg) => search(b, cfg)?.best_move.ok_or(Error::GameOver),
    }
}

/// Plays `games` games with `w` as X from the empty board. Each game draws
/// from its own random stream, so the totals do not depend on how the games
/// are spread across threads.
pub fn evaluate_agent(
    w: &WeightVector,
    size: usize,
    win_length: usize,
    opponent: &Opponent,
    games: u64,
    seed: u64,
) -> Result<TrainStats> {
    if games < 1 {
        return Err(Error::Config("evaluation needs at least one game".into()));
    }
    let start = Board::new(size, win_length)?;
    let expected = feature_dimension(win_length);
    if w.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: w.len(),
        });
    }
    if let Opponent::Minimax(cfg) = opponent {
        check_search_feasible(size, cfg)?;
    }

    (0..games)
        .into_par_iter()
        .map(|game| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(game);
            let mut b = start.clone();
            while !b.is_terminal() {
                let m = match b.to_move() {
                    Player::X => best_move(&b, w, &mut rng)?,
                    Player::O => opponent_move(&b, w, opponent, &mut rng)?,
                };
                b = b.apply_move(m)?;
            }
            let mut stats = TrainStats::default();
            stats.record(b.status());
            Ok(stats)
        })
        .try_reduce(TrainStats::default, |a, b| Ok(a.merge(b)))
}
