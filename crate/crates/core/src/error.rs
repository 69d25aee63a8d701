use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid board: {0}")]
    InvalidBoard(String),

    #[error("illegal move at cell {cell}: {reason}")]
    IllegalMove { cell: usize, reason: &'static str },

    #[error("the game is already over")]
    GameOver,

    #[error("the game is not finished")]
    NotTerminal,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("weights diverged to a non-finite value{}", game_suffix(.game))]
    Divergence { game: Option<u64> },

    #[error("search exceeded the node budget of {0}")]
    NodeBudgetExceeded(u64),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn game_suffix(game: &Option<u64>) -> String {
    match game {
        Some(g) => format!(" during training game {g}"),
        None => String::new(),
    }
}
