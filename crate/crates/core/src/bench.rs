//! Per-move latency measurements for minimax and the learned agent.

use std::fmt::Write as _;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::board::Board;
use crate::error::{Error, Result};
use crate::minimax::{search, SearchConfig};
use crate::trainer::best_move;
use crate::value::WeightVector;

pub const BENCH_CSV_HEADER: &str = "size,depth_limit,pruning,mean_ms,stddev_ms,nodes";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyStats {
    pub mean_ms: f64,
    pub stddev_ms: f64,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LatencyOutcome {
    Measured(LatencyStats),
    NodeBudgetExceeded(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatencyRow {
    pub size: usize,
    /// `None` means unlimited.
    pub depth_limit: Option<u32>,
    /// `none`, `ab`, or `agent` for learned-agent rows.
    pub method: String,
    pub outcome: LatencyOutcome,
}

impl LatencyRow {
    pub fn csv_line(&self) -> String {
        let depth = self
            .depth_limit
            .map_or_else(|| "unlimited".to_string(), |d| d.to_string());
        match &self.outcome {
            LatencyOutcome::Measured(s) => format!(
                "{},{},{},{:.4},{:.4},{}",
                self.size, depth, self.method, s.mean_ms, s.stddev_ms, s.nodes
            ),
            LatencyOutcome::NodeBudgetExceeded(budget) => format!(
                "{},{},{},,,node_budget_exceeded>{}",
                self.size, depth, self.method, budget
            ),
        }
    }
}

pub fn latency_csv(rows: &[LatencyRow]) -> String {
    let mut out = String::from(BENCH_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.csv_line());
    }
    out
}

fn mean_stddev(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 1 {
        return Err(Error::Config("benchmark needs at least one trial".into()));
    }
    Ok(())
}

/// Times a search from the empty K = N board of every size. Searches that
/// blow the node budget are reported as labeled rows.
pub fn benchmark_latency(sizes: &[usize], cfg: &SearchConfig, trials: usize) -> Result<Vec<LatencyRow>> {
    check_trials(trials)?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let board = Board::new(size, size)?;
        let mut samples = Vec::with_capacity(trials);
        let mut nodes = 0;
        let mut outcome = None;
        for _ in 0..trials {
            match search(&board, cfg) {
                Ok(r) => {
                    samples.push(r.elapsed_ms());
                    nodes = r.nodes_visited;
                }
                Err(Error::NodeBudgetExceeded(b)) => {
                    outcome = Some(LatencyOutcome::NodeBudgetExceeded(b));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let outcome = outcome.unwrap_or_else(|| {
            let (mean_ms, stddev_ms) = mean_stddev(&samples);
            LatencyOutcome::Measured(LatencyStats {
                mean_ms,
                stddev_ms,
                nodes,
            })
        });
        log::info!("bench size {size} {}: {outcome:?}", cfg.pruning);
        rows.push(LatencyRow {
            size,
            depth_limit: cfg.max_depth,
            method: cfg.pruning.to_string(),
            outcome,
        });
    }
    Ok(rows)
}

/// Times greedy move selection on the empty K = N board. Weights default to
/// the all-0.5 initialization when none match the size. `nodes` reports the
/// number of successors evaluated.
pub fn benchmark_agent_latency(
    sizes: &[usize],
    weights: &[WeightVector],
    trials: usize,
    seed: u64,
) -> Result<Vec<LatencyRow>> {
    check_trials(trials)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let board = Board::new(size, size)?;
        let w = weights
            .iter()
            .find(|w| w.len() == 2 * size + 1)
            .cloned()
            .unwrap_or_else(|| WeightVector::initial(size));
        let mut samples = Vec::with_capacity(trials);
        for _ in 0..trials {
            let started = Instant::now();
            best_move(&board, &w, &mut rng)?;
            samples.push(started.elapsed().as_secs_f64() * 1000.0);
        }
        let (mean_ms, stddev_ms) = mean_stddev(&samples);
        rows.push(LatencyRow {
            size,
            depth_limit: Some(1),
            method: "agent".into(),
            outcome: LatencyOutcome::Measured(LatencyStats {
                mean_ms,
                stddev_ms,
                nodes: board.legal_moves().len() as u64,
            }),
        });
    }
    Ok(rows)
}
