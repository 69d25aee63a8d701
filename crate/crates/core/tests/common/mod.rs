#![allow(dead_code)]

use nrowrl_core::{Board, Player};
use rand::prelude::*;

/// Plays `plies` uniformly random moves from the empty board, stopping early
/// if the game ends.
pub fn random_playout<R: Rng>(rng: &mut R, size: usize, win_length: usize, plies: usize) -> Board {
    let mut b = Board::new(size, win_length).unwrap();
    for _ in 0..plies {
        if b.is_terminal() {
            break;
        }
        let m = *b.legal_moves().choose(rng).unwrap();
        b = b.apply_move(m).unwrap();
    }
    b
}

/// A reachable board after a uniformly random number of plies.
pub fn random_board<R: Rng>(rng: &mut R, size: usize, win_length: usize) -> Board {
    let plies = rng.random_range(0..=size * size);
    random_playout(rng, size, win_length, plies)
}

/// A reachable, unfinished board.
pub fn random_ongoing_board<R: Rng>(rng: &mut R, size: usize, win_length: usize) -> Board {
    loop {
        let b = random_board(rng, size, win_length);
        if !b.is_terminal() {
            return b;
        }
    }
}

/// Win lines found by scanning every K-subset of cells for a contiguous
/// straight run, without going through the engine's line builder.
pub fn brute_force_lines(size: usize, k: usize) -> Vec<Vec<usize>> {
    let cells = size * size;
    let mut out = Vec::new();
    let mut subset = Vec::with_capacity(k);
    fn rec(
        start: usize,
        cells: usize,
        k: usize,
        size: usize,
        subset: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if subset.len() == k {
            if is_segment(subset, size) {
                out.push(subset.clone());
            }
            return;
        }
        for c in start..cells {
            subset.push(c);
            rec(c + 1, cells, k, size, subset, out);
            subset.pop();
        }
    }
    rec(0, cells, k, size, &mut subset, &mut out);
    out
}

fn is_segment(cells: &[usize], size: usize) -> bool {
    if cells.len() == 1 {
        return true;
    }
    let rc: Vec<(i64, i64)> = cells
        .iter()
        .map(|&c| ((c / size) as i64, (c % size) as i64))
        .collect();
    let step = (rc[1].0 - rc[0].0, rc[1].1 - rc[0].1);
    if ![(0, 1), (1, 0), (1, 1), (1, -1)].contains(&step) {
        return false;
    }
    rc.windows(2).all(|w| (w[1].0 - w[0].0, w[1].1 - w[0].1) == step)
}

/// Feature values from a direct classification of each line by its
/// (own, opponent, empty) counts.
pub fn brute_force_features(b: &Board, lines: &[Vec<usize>], perspective: Player) -> Vec<f64> {
    let k = b.win_length();
    let mut values = vec![0.0; 2 * k + 1];
    values[0] = 1.0;
    for line in lines {
        let own = line.iter().filter(|&&c| b.cell(c) == Some(perspective)).count();
        let opp = line
            .iter()
            .filter(|&&c| b.cell(c) == Some(perspective.opponent()))
            .count();
        let empty = line.iter().filter(|&&c| b.cell(c).is_none()).count();
        assert_eq!(own + opp + empty, k);
        if own >= 1 && opp == 0 {
            values[2 * own - 1] += 1.0;
        } else if opp >= 1 && own == 0 {
            values[2 * opp] += 1.0;
        }
    }
    values
}
