//! Self-play training of the linear value model.
//!
//! One training game runs through four roles:
//!
//! * the experiment generator supplies a start position ([`generate_problem`]),
//! * the performance system plays it out greedily against itself
//!   ([`play_game`]),
//! * the critic turns the trace into training examples whose targets come
//!   from the same player's next position ([`derive_training_examples`]),
//! * the generalizer fits the weights with a least-mean-squares step, scaled
//!   by the feature norm unless [`UpdateRule::Lms`] is selected.
//!
//! All targets of a game are computed from the weights as they stood before
//! the game; the updates are applied afterwards in trace order.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::board::{Board, GameStatus, Move, Player};
use crate::error::{Error, Result};
use crate::features::{extract_features, feature_dimension};
use crate::value::{format_weight, terminal_value, TrainingExample, WeightVector};

pub const DEFAULT_ETA: f64 = 0.4;
pub const DEFAULT_CHECKPOINT_EVERY: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perspectives {
    XOnly,
    Both,
}

impl FromStr for Perspectives {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "x_only" => Ok(Perspectives::XOnly),
            "both" => Ok(Perspectives::Both),
            other => Err(Error::Config(format!("unknown perspectives {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartState {
    Empty,
    Random,
}

impl FromStr for StartState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "empty" => Ok(StartState::Empty),
            "random" => Ok(StartState::Random),
            other => Err(Error::Config(format!("unknown start state {other:?}"))),
        }
    }
}

/// How each training example moves the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateRule {
    /// `w += eta * e * x`.
    Lms,
    /// `w += eta * e * x / |x|²`: the error on the example shrinks by the
    /// factor `1 - eta` whatever the feature magnitudes.
    NormalizedLms,
}

impl FromStr for UpdateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lms" => Ok(UpdateRule::Lms),
            "nlms" => Ok(UpdateRule::NormalizedLms),
            other => Err(Error::Config(format!("unknown update rule {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub board_size: usize,
    pub win_length: usize,
    pub num_games: u64,
    pub eta: f64,
    pub seed: u64,
    pub perspectives: Perspectives,
    pub checkpoint_every: u64,
    pub start_state: StartState,
    pub update_rule: UpdateRule,
    /// Defaults to all 0.5 when absent.
    pub initial_weights: Option<WeightVector>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            board_size: 3,
            win_length: 3,
            num_games: 0,
            eta: DEFAULT_ETA,
            seed: 0,
            perspectives: Perspectives::Both,
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
            start_state: StartState::Empty,
            update_rule: UpdateRule::NormalizedLms,
            initial_weights: None,
        }
    }
}

impl TrainConfig {
    pub fn new(board_size: usize, win_length: usize, num_games: u64, seed: u64) -> Self {
        TrainConfig {
            board_size,
            win_length,
            num_games,
            seed,
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        Board::new(self.board_size, self.win_length)?;
        if !self.eta.is_finite() || self.eta < 0.0 {
            return Err(Error::Config(format!(
                "eta must be finite and >= 0, got {}",
                self.eta
            )));
        }
        if self.checkpoint_every < 1 {
            return Err(Error::Config("checkpoint interval must be at least 1".into()));
        }
        if let Some(w) = &self.initial_weights {
            let expected = feature_dimension(self.win_length);
            if w.len() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    actual: w.len(),
                });
            }
        }
        Ok(())
    }

    fn starting_weights(&self) -> WeightVector {
        self.initial_weights
            .clone()
            .unwrap_or_else(|| WeightVector::initial(self.win_length))
    }
}

/// Outcome counts from X's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrainStats {
    pub games_played: u64,
    pub wins: u64,
    pub losses: u64,
    pub draws: u64,
}

impl TrainStats {
    pub fn record(&mut self, status: GameStatus) {
        self.games_played += 1;
        match status {
            GameStatus::WonByX => self.wins += 1,
            GameStatus::WonByO => self.losses += 1,
            GameStatus::Draw => self.draws += 1,
            GameStatus::Ongoing => unreachable!("recorded an unfinished game"),
        }
    }

    pub fn merge(self, other: TrainStats) -> TrainStats {
        TrainStats {
            games_played: self.games_played + other.games_played,
            wins: self.wins + other.wins,
            losses: self.losses + other.losses,
            draws: self.draws + other.draws,
        }
    }

    pub fn win_ratio(&self) -> Option<f64> {
        (self.games_played > 0).then(|| self.wins as f64 / self.games_played as f64)
    }

    pub fn win_draw_ratio(&self) -> Option<f64> {
        (self.draws > 0).then(|| self.wins as f64 / self.draws as f64)
    }

    pub fn non_loss_rate(&self) -> Option<f64> {
        (self.games_played > 0).then(|| (self.wins + self.draws) as f64 / self.games_played as f64)
    }

    /// `games_played,wins,losses,draws,win_ratio,win_draw_ratio`; undefined
    /// ratios are left empty.
    pub fn csv_fields(&self) -> String {
        let ratio = |r: Option<f64>| r.map(|v| format!("{v:.2}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.games_played,
            self.wins,
            self.losses,
            self.draws,
            ratio(self.win_ratio()),
            ratio(self.win_draw_ratio())
        )
    }
}

pub const STATS_CSV_HEADER: &str = "games_played,wins,losses,draws,win_ratio,win_draw_ratio";

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointRow {
    pub stats: TrainStats,
    pub weights: WeightVector,
}

pub fn metrics_csv_header(win_length: usize) -> String {
    let mut header = String::from(STATS_CSV_HEADER);
    for i in 0..feature_dimension(win_length) {
        let _ = write!(header, ",w{i}");
    }
    header
}

impl CheckpointRow {
    pub fn csv_line(&self) -> String {
        let mut line = self.stats.csv_fields();
        for w in self.weights.as_slice() {
            let _ = write!(line, ",{}", format_weight(*w));
        }
        line
    }
}

/// States from the initial position to the terminal one, with the moves
/// between them.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTrace {
    pub states: Vec<Board>,
    pub moves: Vec<Move>,
}

impl GameTrace {
    pub fn final_state(&self) -> &Board {
        self.states
            .last()
            .expect("a trace holds at least its start state")
    }

    pub fn outcome(&self) -> GameStatus {
        self.final_state().status()
    }

    pub fn plies(&self) -> usize {
        self.moves.len()
    }

    /// Header line followed by every state, blank-line separated.
    pub fn render(&self, index: u64) -> String {
        let mut out = format!("game {index} result {}\n", self.outcome());
        for (i, state) in self.states.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&state.render_text());
            out.push('\n');
        }
        out
    }
}

/// Supplies start positions for self-play.
#[derive(Debug, Clone)]
pub struct ExperimentGenerator {
    empty: Board,
    start: StartState,
}

impl ExperimentGenerator {
    pub fn new(size: usize, win_length: usize, start: StartState) -> Result<Self> {
        Ok(ExperimentGenerator {
            empty: Board::new(size, win_length)?,
            start,
        })
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Board {
        match self.start {
            StartState::Empty => self.empty.clone(),
            StartState::Random => self.random_position(rng),
        }
    }

    // An even number of uniformly random plies keeps X to move; positions
    // that finish early are discarded and redrawn.
    fn random_position<R: Rng + ?Sized>(&self, rng: &mut R) -> Board {
        let cells = self.empty.cells().len();
        let max_pairs = (cells - 1) / 2;
        'draw: loop {
            let plies = 2 * rng.random_range(0..=max_pairs);
            let mut b = self.empty.clone();
            for _ in 0..plies {
                let m = *b.legal_moves().choose(rng).expect("ongoing board has a move");
                b = b.apply_move(m).expect("generated move is legal");
                if b.is_terminal() {
                    continue 'draw;
                }
            }
            return b;
        }
    }
}

pub fn generate_problem<R: Rng + ?Sized>(cfg: &TrainConfig, rng: &mut R) -> Result<Board> {
    let generator = ExperimentGenerator::new(cfg.board_size, cfg.win_length, cfg.start_state)?;
    Ok(generator.generate(rng))
}

/// Learned utility of every legal successor, from the mover's perspective.
pub fn move_utilities(b: &Board, w: &WeightVector) -> Result<Vec<(Move, f64)>> {
    if b.is_terminal() {
        return Err(Error::GameOver);
    }
    let mover = b.to_move();
    b.legal_moves()
        .into_iter()
        .map(|m| {
            let next = b.apply_move(m)?;
            Ok((m, w.evaluate(&extract_features(&next, mover))?))
        })
        .collect()
}

/// Greedy move under `w`; ties are broken uniformly at random.
pub fn best_move<R: Rng + ?Sized>(b: &Board, w: &WeightVector, rng: &mut R) -> Result<Move> {
    let scored = move_utilities(b, w)?;
    let top = scored.iter().map(|(_, u)| *u).fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<Move> = scored
        .iter()
        .filter(|(_, u)| *u == top)
        .map(|(m, _)| *m)
        .collect();
    match ties.as_slice() {
        [only] => Ok(*only),
        _ => Ok(*ties.choose(rng).expect("an ongoing board has a legal move")),
    }
}

/// Self-play from `start`: both sides pick moves with the same weights.
pub fn play_game<R: Rng + ?Sized>(start: &Board, w: &WeightVector, rng: &mut R) -> Result<GameTrace> {
    if start.is_terminal() {
        return Err(Error::GameOver);
    }
    let mut states = vec![start.clone()];
    let mut moves = Vec::new();
    let mut b = start.clone();
    while !b.is_terminal() {
        let m = best_move(&b, w, rng)?;
        b = b.apply_move(m)?;
        moves.push(m);
        states.push(b.clone());
    }
    Ok(GameTrace { states, moves })
}

/// Training pairs for one player: every position that player produced,
/// plus the final position if the opponent ended the game. Each target is
/// the learned value of the player's next position, or the terminal value
/// for the last one.
pub fn derive_training_examples(
    trace: &GameTrace,
    w: &WeightVector,
    perspective: Player,
) -> Result<Vec<TrainingExample>> {
    let last = trace.final_state();
    if !last.is_terminal() {
        return Err(Error::NotTerminal);
    }
    let mut positions: Vec<&Board> = trace
        .moves
        .iter()
        .zip(&trace.states[1..])
        .filter(|(m, _)| m.mark == perspective)
        .map(|(_, s)| s)
        .collect();
    if trace.moves.last().map(|m| m.mark) != Some(perspective) {
        positions.push(last);
    }

    let features: Vec<_> = positions
        .iter()
        .map(|b| extract_features(b, perspective))
        .collect();
    let final_target = terminal_value(last.status(), perspective)?;
    let mut examples = Vec::with_capacity(features.len());
    for (j, x) in features.iter().enumerate() {
        let target = match features.get(j + 1) {
            Some(next) => w.evaluate(next)?,
            None => final_target,
        };
        examples.push(TrainingExample {
            features: x.clone(),
            target,
        });
    }
    Ok(examples)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub weights: WeightVector,
    pub stats: TrainStats,
    pub checkpoints: Vec<CheckpointRow>,
}

/// Incremental training loop; [`train`] drives it to completion.
#[derive(Debug, Clone)]
pub struct Trainer {
    cfg: TrainConfig,
    weights: WeightVector,
    stats: TrainStats,
    rng: ChaCha8Rng,
    generator: ExperimentGenerator,
}

impl Trainer {
    pub fn new(cfg: TrainConfig) -> Result<Trainer> {
        cfg.validate()?;
        let generator = ExperimentGenerator::new(cfg.board_size, cfg.win_length, cfg.start_state)?;
        Ok(Trainer {
            weights: cfg.starting_weights(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            stats: TrainStats::default(),
            generator,
            cfg,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn stats(&self) -> TrainStats {
        self.stats
    }

    pub fn finished(&self) -> bool {
        self.stats.games_played >= self.cfg.num_games
    }

    pub fn checkpoint_due(&self) -> bool {
        self.stats.games_played > 0 && self.stats.games_played.is_multiple_of(self.cfg.checkpoint_every)
    }

    pub fn checkpoint_row(&self) -> CheckpointRow {
        CheckpointRow {
            stats: self.stats,
            weights: self.weights.clone(),
        }
    }

    /// Plays one self-play game and learns from it.
    pub fn step(&mut self) -> Result<GameTrace> {
        let game = self.stats.games_played + 1;
        let start = self.generator.generate(&mut self.rng);
        let trace = play_game(&start, &self.weights, &mut self.rng)?;

        let mut examples = derive_training_examples(&trace, &self.weights, Player::X)?;
        if self.cfg.perspectives == Perspectives::Both {
            examples.extend(derive_training_examples(&trace, &self.weights, Player::O)?);
        }
        self.stats.record(trace.outcome());

        for ex in &examples {
            let eta = match self.cfg.update_rule {
                UpdateRule::Lms => self.cfg.eta,
                UpdateRule::NormalizedLms => self.cfg.eta / ex.features.squared_norm(),
            };
            self.weights.lms_step(ex, eta).map_err(|e| match e {
                Error::Divergence { .. } => Error::Divergence { game: Some(game) },
                other => other,
            })?;
        }
        Ok(trace)
    }
}

pub fn train(cfg: &TrainConfig) -> Result<TrainOutcome> {
    let mut trainer = Trainer::new(cfg.clone())?;
    let mut checkpoints = Vec::new();
    while !trainer.finished() {
        trainer.step()?;
        if trainer.checkpoint_due() {
            checkpoints.push(trainer.checkpoint_row());
        }
    }
    Ok(TrainOutcome {
        weights: trainer.weights.clone(),
        stats: trainer.stats,
        checkpoints,
    })
}
