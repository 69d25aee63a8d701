//! Open-line count features.
//!
//! For win length K the vector holds a bias followed by K pairs. Pair `m`
//! counts the win lines holding exactly `m` marks of the perspective player
//! (odd slot) or of the opponent (even slot), with every other cell of the
//! line empty. Lines that contain both marks count nowhere. For K = 3 this is
//! the classic seven-entry tic-tac-toe feature set.

use std::ops::Index;

use crate::board::{Board, Player};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    /// Wraps raw values. The first entry is expected to be the bias `1.0`.
    pub fn from_values(values: Vec<f64>) -> FeatureVector {
        FeatureVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn squared_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    /// Exchanges the own/opponent entry of every pair.
    pub fn role_swapped(&self) -> FeatureVector {
        let mut values = self.0.clone();
        for pair in values[1..].chunks_exact_mut(2) {
            pair.swap(0, 1);
        }
        FeatureVector(values)
    }
}

impl Index<usize> for FeatureVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub fn feature_dimension(win_length: usize) -> usize {
    2 * win_length + 1
}

pub fn extract_features(b: &Board, perspective: Player) -> FeatureVector {
    let k = b.win_length();
    let mut values = vec![0.0; feature_dimension(k)];
    values[0] = 1.0;
    let cells = b.cells();
    for line in b.lines().iter() {
        let mut own = 0;
        let mut theirs = 0;
        for &c in line {
            match cells[c] {
                Some(p) if p == perspective => own += 1,
                Some(_) => theirs += 1,
                None => {}
            }
        }
        match (own, theirs) {
            (0, 0) => {}
            (m, 0) => values[2 * m - 1] += 1.0,
            (0, m) => values[2 * m] += 1.0,
            _ => {}
        }
    }
    FeatureVector(values)
}
