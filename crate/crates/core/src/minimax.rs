//! Exact game-tree search baseline.
//!
//! Terminal utilities are +10 for an X win, -10 for an O win and 0 for a
//! draw; X maximizes and O minimizes. There is deliberately no transposition
//! table or move ordering, so node counts reflect the raw tree.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::board::{Board, GameStatus, Move, Player};
use crate::error::{Error, Result};
use crate::features::extract_features;
use crate::value::WeightVector;

pub const WIN_UTILITY: f64 = 10.0;
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pruning {
    None,
    AlphaBeta,
}

impl fmt::Display for Pruning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pruning::None => "none",
            Pruning::AlphaBeta => "ab",
        })
    }
}

impl FromStr for Pruning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Pruning> {
        match s {
            "none" => Ok(Pruning::None),
            "ab" | "alpha_beta" | "alpha-beta" => Ok(Pruning::AlphaBeta),
            other => Err(Error::Config(format!("unknown pruning mode {other:?}"))),
        }
    }
}

/// Value assigned to non-terminal positions at the depth limit.
#[derive(Debug, Clone, PartialEq)]
pub enum CutoffHeuristic {
    Zero,
    /// Learned utility for X minus learned utility for O.
    WeightedFeatures(WeightVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub max_depth: Option<u32>,
    pub pruning: Pruning,
    pub cutoff: CutoffHeuristic,
    pub node_budget: u64,
    /// Shrinks terminal utilities slightly with depth so quicker wins and
    /// slower losses are preferred. Off by default.
    pub prefer_faster_wins: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: None,
            pruning: Pruning::AlphaBeta,
            cutoff: CutoffHeuristic::Zero,
            node_budget: DEFAULT_NODE_BUDGET,
            prefer_faster_wins: false,
        }
    }
}

impl SearchConfig {
    pub fn with_pruning(mut self, pruning: Pruning) -> Self {
        self.pruning = pruning;
        self
    }

    pub fn with_max_depth(mut self, depth: Option<u32>) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn with_node_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub value: f64,
    pub best_move: Option<Move>,
    pub nodes_visited: u64,
    pub elapsed: Duration,
}

impl SearchResult {
    pub fn elapsed_ms(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1000.0
    }
}

struct Searcher<'a> {
    cfg: &'a SearchConfig,
    nodes: u64,
    cells: f64,
}

impl Searcher<'_> {
    fn terminal_utility(&self, status: GameStatus, depth: u32) -> f64 {
        let magnitude = if self.cfg.prefer_faster_wins {
            WIN_UTILITY - depth as f64 / (self.cells + 1.0)
        } else {
            WIN_UTILITY
        };
        match status {
            GameStatus::WonByX => magnitude,
            GameStatus::WonByO => -magnitude,
            _ => 0.0,
        }
    }

    fn cutoff_value(&self, b: &Board) -> Result<f64> {
        match &self.cfg.cutoff {
            CutoffHeuristic::Zero => Ok(0.0),
            CutoffHeuristic::WeightedFeatures(w) => {
                let x = w.evaluate(&extract_features(b, Player::X))?;
                let o = w.evaluate(&extract_features(b, Player::O))?;
                Ok(x - o)
            }
        }
    }

    fn visit(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cfg.node_budget {
            return Err(Error::NodeBudgetExceeded(self.cfg.node_budget));
        }
        Ok(())
    }

    fn value(&mut self, b: &Board, depth: u32, mut alpha: f64, mut beta: f64) -> Result<f64> {
        self.visit()?;
        if b.is_terminal() {
            return Ok(self.terminal_utility(b.status(), depth));
        }
        if self.cfg.max_depth.is_some_and(|d| depth >= d) {
            return self.cutoff_value(b);
        }
        let prune = self.cfg.pruning == Pruning::AlphaBeta;
        let maximizing = b.to_move() == Player::X;
        let mut best = if maximizing {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
        for m in b.legal_moves() {
            let child = b.apply_move(m)?;
            let v = self.value(&child, depth + 1, alpha, beta)?;
            if maximizing {
                best = best.max(v);
                alpha = alpha.max(v);
            } else {
                best = best.min(v);
                beta = beta.min(v);
            }
            if prune && alpha >= beta {
                break;
            }
        }
        Ok(best)
    }
}

/// Minimax value of `b` and the lowest-index optimal move.
pub fn search(b: &Board, cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.max_depth == Some(0) {
        return Err(Error::Config("search depth limit must be at least 1".into()));
    }
    if let CutoffHeuristic::WeightedFeatures(w) = &cfg.cutoff {
        let expected = crate::features::feature_dimension(b.win_length());
        if w.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: w.len(),
            });
        }
    }
    let started = Instant::now();
    let mut s = Searcher {
        cfg,
        nodes: 0,
        cells: (b.size() * b.size()) as f64,
    };

    if b.is_terminal() {
        s.visit()?;
        return Ok(SearchResult {
            value: s.terminal_utility(b.status(), 0),
            best_move: None,
            nodes_visited: s.nodes,
            elapsed: started.elapsed(),
        });
    }

    s.visit()?;
    let prune = cfg.pruning == Pruning::AlphaBeta;
    let maximizing = b.to_move() == Player::X;
    let (mut alpha, mut beta) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut best_value = if maximizing {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    let mut best_move = None;
    for m in b.legal_moves() {
        let child = b.apply_move(m)?;
        let v = s.value(&child, 1, alpha, beta)?;
        let improves = if maximizing {
            v > best_value
        } else {
            v < best_value
        };
        if improves {
            best_value = v;
            best_move = Some(m);
        }
        if prune {
            if maximizing {
                alpha = alpha.max(v);
            } else {
                beta = beta.min(v);
            }
        }
    }
    Ok(SearchResult {
        value: best_value,
        best_move,
        nodes_visited: s.nodes,
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn board(text: &str) -> Board {
        Board::parse(text, None).unwrap()
    }

    #[test]
    fn empty_board_is_a_draw() {
        let b = Board::new(3, 3).unwrap();
        let ab = search(&b, &SearchConfig::default()).unwrap();
        assert_eq!(ab.value, 0.0);
        let plain = search(&b, &SearchConfig::default().with_pruning(Pruning::None)).unwrap();
        assert_eq!(plain.value, 0.0);
        assert_eq!(plain.best_move, ab.best_move);
        assert!(ab.nodes_visited < plain.nodes_visited);
    }

    #[test]
    fn takes_immediate_win() {
        let r = search(&board("XX.\nOO.\n..."), &SearchConfig::default()).unwrap();
        assert_eq!(r.value, 10.0);
        assert_eq!(
            r.best_move,
            Some(Move {
                cell: 2,
                mark: Player::X
            })
        );
    }

    #[test]
    fn double_threat_against_x() {
        // O threatens cells 5, 6 and 8; X has no immediate win of its own.
        let b = board("OXX\nOO.\n.X.");
        assert_eq!(b.to_move(), Player::X);
        let r = search(&b, &SearchConfig::default()).unwrap();
        assert_eq!(r.value, -10.0);
    }

    #[test]
    fn terminal_root_has_no_move() {
        let r = search(&board("XXX\nOO.\n..."), &SearchConfig::default()).unwrap();
        assert_eq!(r.best_move, None);
        assert_eq!(r.value, 10.0);
        assert_eq!(r.nodes_visited, 1);
    }

    #[test]
    fn node_budget_aborts() {
        let b = Board::new(3, 3).unwrap();
        let cfg = SearchConfig::default()
            .with_pruning(Pruning::None)
            .with_node_budget(1000);
        assert!(matches!(search(&b, &cfg), Err(Error::NodeBudgetExceeded(1000))));
    }

    #[test]
    fn depth_limit_uses_cutoff() {
        let b = Board::new(3, 3).unwrap();
        let r = search(&b, &SearchConfig::default().with_max_depth(Some(1))).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.nodes_visited, 10);
        assert_eq!(r.best_move.unwrap().cell, 0);

        let mut w = vec![0.0; 7];
        w[1] = 1.0;
        let cfg = SearchConfig {
            max_depth: Some(1),
            cutoff: CutoffHeuristic::WeightedFeatures(WeightVector::new(w).unwrap()),
            ..SearchConfig::default()
        };
        let r = search(&b, &cfg).unwrap();
        // the centre lies on four lines
        assert_eq!(r.best_move.unwrap().cell, 4);
        assert_eq!(r.value, 4.0);
    }

    #[test]
    fn faster_wins_break_ties() {
        // X can win now at cell 2; without discounting a slower forced win
        // could also score +10.
        let b = board("XX.\nOO.\n...");
        let cfg = SearchConfig {
            prefer_faster_wins: true,
            ..SearchConfig::default()
        };
        let r = search(&b, &cfg).unwrap();
        assert_eq!(r.best_move.unwrap().cell, 2);
        assert!(r.value > 9.0 && r.value < 10.0);
    }
}
