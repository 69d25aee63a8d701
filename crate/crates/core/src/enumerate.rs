//! Exhaustive game-tree enumeration for small boards.
//!
//! Games are ordered move sequences from the empty board that stop at the
//! first completed line or a full board. No symmetry reduction is applied.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::board::{Board, GameStatus, Player};
use crate::error::{Error, Result};
use crate::minimax::WIN_UTILITY;

/// Largest board accepted for full enumeration.
pub const MAX_ENUMERATION_SIZE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TerminalBreakdown {
    pub x_win_boards: u64,
    pub o_win_boards: u64,
    pub draw_boards: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationReport {
    pub size: usize,
    pub win_length: usize,
    pub total_games: u64,
    pub x_wins: u64,
    pub o_wins: u64,
    pub draws: u64,
    pub distinct_terminal_boards: u64,
    pub terminal_breakdown: TerminalBreakdown,
}

impl EnumerationReport {
    fn rows(&self) -> Vec<(&'static str, u64)> {
        vec![
            ("total_games", self.total_games),
            ("x_wins", self.x_wins),
            ("o_wins", self.o_wins),
            ("draws", self.draws),
            ("distinct_terminal_boards", self.distinct_terminal_boards),
            ("x_win_boards", self.terminal_breakdown.x_win_boards),
            ("o_win_boards", self.terminal_breakdown.o_win_boards),
            ("draw_boards", self.terminal_breakdown.draw_boards),
        ]
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<26}{}x{} (win length {})\n",
            "board", self.size, self.size, self.win_length
        );
        for (name, value) in self.rows() {
            let _ = writeln!(out, "{name:<26}{value}");
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        let _ = writeln!(out, "size,{}", self.size);
        let _ = writeln!(out, "win_length,{}", self.win_length);
        for (name, value) in self.rows() {
            let _ = writeln!(out, "{name},{value}");
        }
        out
    }
}

fn check_size(size: usize) -> Result<()> {
    if size > MAX_ENUMERATION_SIZE {
        return Err(Error::Config(format!(
            "exhaustive enumeration supports boards up to {MAX_ENUMERATION_SIZE}x{MAX_ENUMERATION_SIZE}, got {size}x{size}"
        )));
    }
    Ok(())
}

fn encode(b: &Board) -> u32 {
    b.cells().iter().fold(0, |acc, c| {
        acc * 3
            + match c {
                None => 0,
                Some(Player::X) => 1,
                Some(Player::O) => 2,
            }
    })
}

#[derive(Default)]
struct Tally {
    games: [u64; 3],
    terminals: HashMap<u32, GameStatus>,
}

impl Tally {
    fn walk(&mut self, b: &Board) {
        match b.status() {
            GameStatus::Ongoing => {
                for m in b.legal_moves() {
                    let child = b.apply_move(m).expect("generated move is legal");
                    self.walk(&child);
                }
            }
            status => {
                let slot = match status {
                    GameStatus::WonByX => 0,
                    GameStatus::WonByO => 1,
                    _ => 2,
                };
                self.games[slot] += 1;
                self.terminals.insert(encode(b), status);
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.games.iter_mut().zip(other.games) {
            *a += b;
        }
        self.terminals.extend(other.terminals);
        self
    }
}

pub fn enumerate(size: usize, win_length: usize) -> Result<EnumerationReport> {
    check_size(size)?;
    let root = Board::new(size, win_length)?;
    // shard on the first ply
    let tally = root
        .legal_moves()
        .into_par_iter()
        .map(|m| {
            let mut t = Tally::default();
            t.walk(&root.apply_move(m).expect("generated move is legal"));
            t
        })
        .reduce(Tally::default, Tally::merge);

    let mut breakdown = TerminalBreakdown::default();
    for status in tally.terminals.values() {
        match status {
            GameStatus::WonByX => breakdown.x_win_boards += 1,
            GameStatus::WonByO => breakdown.o_win_boards += 1,
            _ => breakdown.draw_boards += 1,
        }
    }
    let [x_wins, o_wins, draws] = tally.games;
    Ok(EnumerationReport {
        size,
        win_length,
        total_games: x_wins + o_wins + draws,
        x_wins,
        o_wins,
        draws,
        distinct_terminal_boards: tally.terminals.len() as u64,
        terminal_breakdown: breakdown,
    })
}

/// `(size²)!`: every ordering of the cells, ignoring early wins.
pub fn count_state_space(size: usize) -> Result<u64> {
    check_size(size)?;
    Ok((1..=(size * size) as u64).product())
}

/// Perfect-play value of the empty board by backward induction over the full
/// tree, on the +10 / 0 / -10 scale.
pub fn perfect_play_value(size: usize, win_length: usize) -> Result<f64> {
    check_size(size)?;
    fn induct(b: &Board) -> i8 {
        match b.status() {
            GameStatus::WonByX => 1,
            GameStatus::WonByO => -1,
            GameStatus::Draw => 0,
            GameStatus::Ongoing => {
                let children = b
                    .legal_moves()
                    .into_iter()
                    .map(|m| induct(&b.apply_move(m).expect("generated move is legal")));
                if b.to_move() == Player::X {
                    children.max().expect("ongoing board has a move")
                } else {
                    children.min().expect("ongoing board has a move")
                }
            }
        }
    }
    Ok(f64::from(induct(&Board::new(size, win_length)?)) * WIN_UTILITY)
}
