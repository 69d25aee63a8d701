//! Linear board utility, terminal values, the LMS update and checkpoints.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::board::{GameStatus, Player};
use crate::error::{Error, Result};
use crate::features::{feature_dimension, FeatureVector};

pub const WIN_VALUE: f64 = 100.0;
pub const LOSS_VALUE: f64 = -100.0;
pub const DRAW_VALUE: f64 = 0.0;

/// Starting value of every weight in a fresh model.
pub const INITIAL_WEIGHT: f64 = 0.5;

const CHECKPOINT_MAGIC: &str = "nrowrl-weights";
const CHECKPOINT_VERSION: &str = "v1";

/// Weights index-aligned with [`FeatureVector`]; entry 0 is the bias weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<WeightVector> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Divergence { game: None });
        }
        Ok(WeightVector(weights))
    }

    pub fn filled(dim: usize, value: f64) -> WeightVector {
        WeightVector(vec![value; dim])
    }

    /// All-0.5 weights sized for win length K.
    pub fn initial(win_length: usize) -> WeightVector {
        Self::filled(feature_dimension(win_length), INITIAL_WEIGHT)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> WeightVector {
        WeightVector(self.0.iter().map(|w| w * factor).collect())
    }

    pub fn evaluate(&self, x: &FeatureVector) -> Result<f64> {
        evaluate(self, x)
    }

    /// In-place LMS step; returns the pre-update error.
    pub fn lms_step(&mut self, ex: &TrainingExample, eta: f64) -> Result<f64> {
        let error = ex.target - self.evaluate(&ex.features)?;
        let mut next = self.0.clone();
        for (w, x) in next.iter_mut().zip(ex.features.values()) {
            *w += eta * error * x;
        }
        if next.iter().any(|w| !w.is_finite()) {
            return Err(Error::Divergence { game: None });
        }
        self.0 = next;
        Ok(error)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub features: FeatureVector,
    pub target: f64,
}

/// Dot product of weights and features, bias included.
pub fn evaluate(w: &WeightVector, x: &FeatureVector) -> Result<f64> {
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            actual: x.len(),
        });
    }
    Ok(w.0.iter().zip(x.values()).map(|(w, x)| w * x).sum())
}

pub fn terminal_value(status: GameStatus, perspective: Player) -> Result<f64> {
    match status {
        GameStatus::Ongoing => Err(Error::NotTerminal),
        GameStatus::Draw => Ok(DRAW_VALUE),
        s if s.winner() == Some(perspective) => Ok(WIN_VALUE),
        _ => Ok(LOSS_VALUE),
    }
}

/// `w_i + eta * (target - V(x)) * x_i` for every coordinate, with the error
/// taken once from the incoming weights.
pub fn lms_update(w: &WeightVector, ex: &TrainingExample, eta: f64) -> Result<WeightVector> {
    let mut next = w.clone();
    next.lms_step(ex, eta)?;
    Ok(next)
}

pub fn squared_error(w: &WeightVector, examples: &[TrainingExample]) -> Result<f64> {
    examples.iter().try_fold(0.0, |acc, ex| {
        let e = ex.target - evaluate(w, &ex.features)?;
        Ok(acc + e * e)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointMeta {
    pub board_size: usize,
    pub win_length: usize,
    pub feature_dim: usize,
    pub eta: f64,
    pub games_trained: u64,
    pub seed: u64,
}

impl CheckpointMeta {
    pub fn new(board_size: usize, win_length: usize, eta: f64, games_trained: u64, seed: u64) -> Self {
        CheckpointMeta {
            board_size,
            win_length,
            feature_dim: feature_dimension(win_length),
            eta,
            games_trained,
            seed,
        }
    }
}

/// Shortest text that parses back to the identical `f64`, switching to
/// exponent notation for very small or very large magnitudes.
pub fn format_weight(w: f64) -> String {
    let a = w.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{w}")
    } else {
        format!("{w:e}")
    }
}

/// Renders the line-oriented checkpoint text. Weights use the shortest
/// representation that parses back to the identical `f64`.
pub fn format_checkpoint(w: &WeightVector, meta: &CheckpointMeta) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}");
    let _ = writeln!(out, "board_size={}", meta.board_size);
    let _ = writeln!(out, "win_length={}", meta.win_length);
    let _ = writeln!(out, "feature_dim={}", meta.feature_dim);
    let _ = writeln!(out, "eta={}", meta.eta);
    let _ = writeln!(out, "games_trained={}", meta.games_trained);
    let _ = writeln!(out, "seed={}", meta.seed);
    let weights: Vec<String> = w.as_slice().iter().map(|&w| format_weight(w)).collect();
    let _ = writeln!(out, "weights={}", weights.join(","));
    out
}

pub fn parse_checkpoint(text: &str) -> Result<(WeightVector, CheckpointMeta)> {
    let bad = |msg: String| Error::Checkpoint(msg);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    match header.split_once(' ') {
        Some((CHECKPOINT_MAGIC, CHECKPOINT_VERSION)) => {}
        Some((CHECKPOINT_MAGIC, other)) => {
            return Err(bad(format!("unsupported version {other:?}")));
        }
        _ => return Err(bad(format!("unrecognized header {header:?}"))),
    }

    const KEYS: [&str; 7] = [
        "board_size",
        "win_length",
        "feature_dim",
        "eta",
        "games_trained",
        "seed",
        "weights",
    ];
    let mut values: [Option<&str>; 7] = [None; 7];
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed line {line:?}")))?;
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| bad(format!("unknown key {key:?}")))?;
        if values[slot].replace(value).is_some() {
            return Err(bad(format!("duplicate key {key:?}")));
        }
    }
    let get = |i: usize| values[i].ok_or_else(|| bad(format!("missing key {:?}", KEYS[i])));
    fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
        v.trim()
            .parse()
            .map_err(|_| Error::Checkpoint(format!("bad value for {key}: {v:?}")))
    }

    let meta = CheckpointMeta {
        board_size: num("board_size", get(0)?)?,
        win_length: num("win_length", get(1)?)?,
        feature_dim: num("feature_dim", get(2)?)?,
        eta: num("eta", get(3)?)?,
        games_trained: num("games_trained", get(4)?)?,
        seed: num("seed", get(5)?)?,
    };
    let weights = get(6)?
        .split(',')
        .map(|v| num::<f64>("weights", v))
        .collect::<Result<Vec<_>>>()?;

    if meta.win_length < 1 || meta.win_length > meta.board_size {
        return Err(bad(format!(
            "win_length {} incompatible with board_size {}",
            meta.win_length, meta.board_size
        )));
    }
    if meta.feature_dim != feature_dimension(meta.win_length) {
        return Err(bad(format!(
            "feature_dim {} does not match 2*win_length+1 = {}",
            meta.feature_dim,
            feature_dimension(meta.win_length)
        )));
    }
    if weights.len() != meta.feature_dim {
        return Err(bad(format!(
            "expected {} weights, found {}",
            meta.feature_dim,
            weights.len()
        )));
    }
    let w = WeightVector::new(weights).map_err(|_| bad("non-finite weight".into()))?;
    Ok((w, meta))
}

pub fn save_checkpoint(w: &WeightVector, meta: &CheckpointMeta, path: &Path) -> Result<()> {
    if w.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence { game: None });
    }
    if w.len() != meta.feature_dim {
        return Err(Error::DimensionMismatch {
            expected: meta.feature_dim,
            actual: w.len(),
        });
    }
    fs::write(path, format_checkpoint(w, meta))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(WeightVector, CheckpointMeta)> {
    parse_checkpoint(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(values: &[f64]) -> WeightVector {
        WeightVector::new(values.to_vec()).unwrap()
    }

    fn x(values: &[f64]) -> FeatureVector {
        FeatureVector::from_values(values.to_vec())
    }

    #[test]
    fn evaluate_examples() {
        let half = WeightVector::initial(3);
        assert_eq!(evaluate(&half, &x(&[1., 0., 0., 0., 0., 0., 0.])).unwrap(), 0.5);
        assert_eq!(evaluate(&half, &x(&[1., 4., 0., 0., 0., 0., 0.])).unwrap(), 2.5);
        let late = w(&[93.4, -168.2, -27.3, 12.4, -6.0, 18.9, -198.6]);
        let v = evaluate(&late, &x(&[1., 0., 1., 0., 0., 1., 0.])).unwrap();
        assert!((v - 85.0).abs() < 1e-9);
        assert!(matches!(
            evaluate(&half, &x(&[1., 0., 0.])),
            Err(Error::DimensionMismatch {
                expected: 7,
                actual: 3
            })
        ));
    }

    #[test]
    fn terminal_values() {
        assert_eq!(terminal_value(GameStatus::WonByX, Player::X).unwrap(), 100.0);
        assert_eq!(terminal_value(GameStatus::WonByX, Player::O).unwrap(), -100.0);
        assert_eq!(terminal_value(GameStatus::Draw, Player::X).unwrap(), 0.0);
        assert_eq!(terminal_value(GameStatus::WonByO, Player::O).unwrap(), 100.0);
        assert!(matches!(
            terminal_value(GameStatus::Ongoing, Player::X),
            Err(Error::NotTerminal)
        ));
    }

    #[test]
    fn lms_update_examples() {
        let half = WeightVector::initial(3);
        let ex = TrainingExample {
            features: x(&[1., 1., 0., 0., 0., 1., 0.]),
            target: 100.0,
        };
        let next = lms_update(&half, &ex, 0.4).unwrap();
        let expected = [39.9, 39.9, 0.5, 0.5, 0.5, 39.9, 0.5];
        for (a, b) in next.as_slice().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }

        assert_eq!(lms_update(&half, &ex, 0.0).unwrap(), half);

        let settled = TrainingExample {
            features: ex.features.clone(),
            target: 1.5,
        };
        assert_eq!(lms_update(&half, &settled, 0.4).unwrap(), half);
    }

    #[test]
    fn lms_divergence_is_reported() {
        let big = w(&[1e308, 0.0, 0.0]);
        let ex = TrainingExample {
            features: x(&[1., 0., 0.]),
            target: -1e308,
        };
        assert!(matches!(
            lms_update(&big, &ex, 10.0),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn squared_error_examples() {
        let half = WeightVector::initial(3);
        assert_eq!(squared_error(&half, &[]).unwrap(), 0.0);
        let f = x(&[1., 1., 0., 0., 0., 1., 0.]);
        let exact = TrainingExample {
            features: f.clone(),
            target: 1.5,
        };
        assert_eq!(squared_error(&half, &[exact]).unwrap(), 0.0);
        let off = TrainingExample {
            features: f,
            target: 100.0,
        };
        assert_eq!(squared_error(&half, &[off]).unwrap(), 9702.25);
    }

    #[test]
    fn checkpoint_text_layout() {
        let weights = w(&[75.2, -8.4, -166.8, -39.4, -171.0, 55.4, -115.1]);
        let meta = CheckpointMeta::new(3, 3, 0.4, 1000, 42);
        let text = format_checkpoint(&weights, &meta);
        assert_eq!(
            text,
            "nrowrl-weights v1\nboard_size=3\nwin_length=3\nfeature_dim=7\neta=0.4\n\
             games_trained=1000\nseed=42\nweights=75.2,-8.4,-166.8,-39.4,-171,55.4,-115.1\n"
        );
        let (back, back_meta) = parse_checkpoint(&text).unwrap();
        assert_eq!(back, weights);
        assert_eq!(back_meta, meta);
    }

    #[test]
    fn checkpoint_rejections() {
        let weights = WeightVector::initial(3);
        let good = format_checkpoint(&weights, &CheckpointMeta::new(3, 3, 0.4, 0, 0));

        let wrong_dim = good.replace("feature_dim=7", "feature_dim=9");
        assert!(matches!(parse_checkpoint(&wrong_dim), Err(Error::Checkpoint(_))));

        let truncated = &good[..good.len() / 2];
        assert!(matches!(parse_checkpoint(truncated), Err(Error::Checkpoint(_))));

        let version = good.replace("v1", "v2");
        let err = parse_checkpoint(&version).unwrap_err().to_string();
        assert!(err.contains("version"), "{err}");

        let unknown = format!("{good}colour=blue\n");
        assert!(parse_checkpoint(&unknown).is_err());

        let short = good.replace("weights=0.5,0.5,", "weights=");
        assert!(parse_checkpoint(&short).is_err());

        let too_long = good.replace("win_length=3", "win_length=4");
        assert!(parse_checkpoint(&too_long).is_err());
    }
}
