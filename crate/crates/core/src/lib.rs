//! Generalized N×N tic-tac-toe learning workbench.
//!
//! The crate bundles:
//!
//! * [`board`]: N×N boards with win length K, move generation and outcomes,
//! * [`features`]: open-line count features,
//! * [`value`]: the linear utility, LMS updates and weight checkpoints,
//! * [`trainer`]: greedy self-play training,
//! * [`evaluate`]: matches against random, minimax or self opponents,
//! * [`minimax`]: exact search with optional alpha-beta pruning,
//! * [`enumerate`]: exhaustive game counts for boards up to 3×3,
//! * [`bench`]: per-move latency reports.

pub mod bench;
pub mod board;
pub mod enumerate;
pub mod error;
pub mod evaluate;
pub mod features;
pub mod minimax;
pub mod trainer;
pub mod value;

pub use board::{win_lines, Board, GameStatus, LineSet, Move, Player, Symmetry};
pub use error::{Error, Result};
pub use features::{extract_features, feature_dimension, FeatureVector};
pub use value::{
    evaluate, lms_update, load_checkpoint, save_checkpoint, squared_error, terminal_value, CheckpointMeta,
    TrainingExample, WeightVector,
};
