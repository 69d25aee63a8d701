//! In-memory game sessions behind a synchronous API.
//!
//! The HTTP layer is a thin wrapper over [`GameService`], so everything here
//! can be driven directly from tests.

use std::num::NonZeroUsize;
use std::sync::Arc;

use lru::LruCache;
use nrowrl_core::trainer::move_utilities;
use nrowrl_core::{Board, Error, Player, WeightVector};
use parking_lot::Mutex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{CheckpointLibrary, Engine, EngineReply, EngineSpec};
use crate::error::{ServiceError, ServiceResult};

pub const DEFAULT_SESSION_CAPACITY: usize = 1024;
/// Largest board the service will host.
pub const MAX_BOARD_SIZE: usize = 10;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateGame {
    pub size: usize,
    /// Defaults to `size`.
    #[serde(default)]
    pub win_length: Option<usize>,
    pub x_engine: EngineSpec,
    pub o_engine: EngineSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    pub cell: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoggedMove {
    pub cell: usize,
    pub mark: char,
    /// Present for engine moves only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameView {
    pub id: String,
    pub size: usize,
    pub win_length: usize,
    /// Rows of `X`, `O` and `.` separated by newlines.
    pub board: String,
    /// `None` once the game is over.
    pub to_move: Option<char>,
    pub status: String,
    pub x_engine: EngineSpec,
    pub o_engine: EngineSpec,
    pub move_log: Vec<LoggedMove>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine_reply: Option<EngineReply>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellUtility {
    pub cell: usize,
    pub utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointInfo {
    pub id: String,
    pub size: usize,
    pub win_length: usize,
    pub games_trained: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnginesView {
    pub kinds: Vec<&'static str>,
    pub pruning: Vec<&'static str>,
    pub checkpoints: Vec<CheckpointInfo>,
}

struct GameSession {
    id: String,
    board: Board,
    specs: [EngineSpec; 2],
    engines: [Engine; 2],
    move_log: Vec<LoggedMove>,
    rng: ChaCha8Rng,
}

fn slot(p: Player) -> usize {
    match p {
        Player::X => 0,
        Player::O => 1,
    }
}

impl GameSession {
    fn engine_to_move(&self) -> &Engine {
        &self.engines[slot(self.board.to_move())]
    }

    fn apply(&mut self, cell: usize, elapsed_ms: Option<f64>) -> Result<(), Error> {
        let mark = self.board.to_move();
        self.board = self.board.play(cell)?;
        self.move_log.push(LoggedMove {
            cell,
            mark: mark.symbol(),
            elapsed_ms,
        });
        Ok(())
    }

    /// Lets engines move until a human is to move or the game ends.
    fn run_engines(&mut self) -> ServiceResult<Option<EngineReply>> {
        let mut last = None;
        while !self.board.is_terminal() && !self.engine_to_move().is_human() {
            let engine = self.engine_to_move().clone();
            let reply = engine.choose(&self.board, &mut self.rng)?;
            self.apply(reply.cell, Some(reply.elapsed_ms))
                .map_err(|e| ServiceError::Internal(format!("engine chose an illegal move: {e}")))?;
            last = Some(reply);
        }
        Ok(last)
    }

    fn view(&self, engine_reply: Option<EngineReply>) -> GameView {
        GameView {
            id: self.id.clone(),
            size: self.board.size(),
            win_length: self.board.win_length(),
            board: self.board.render_text(),
            to_move: (!self.board.is_terminal()).then(|| self.board.to_move().symbol()),
            status: self.board.status().to_string(),
            x_engine: self.specs[0].clone(),
            o_engine: self.specs[1].clone(),
            move_log: self.move_log.clone(),
            engine_reply,
        }
    }

    /// Weights for analysis: the mover's own agent, else the opponent's.
    fn analysis_weights(&self) -> Option<&WeightVector> {
        let mover = slot(self.board.to_move());
        self.engines[mover]
            .weights()
            .or_else(|| self.engines[1 - mover].weights())
    }
}

/// Session store plus the shared checkpoint library.
pub struct GameService {
    library: Arc<CheckpointLibrary>,
    sessions: Mutex<LruCache<String, Arc<Mutex<GameSession>>>>,
    rng: Mutex<ChaCha8Rng>,
}

impl GameService {
    pub fn new(library: CheckpointLibrary, capacity: usize, seed: u64) -> GameService {
        let capacity = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        GameService {
            library: Arc::new(library),
            sessions: Mutex::new(LruCache::new(capacity)),
            rng: Mutex::new(ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    pub fn library(&self) -> &CheckpointLibrary {
        &self.library
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().len()
    }

    fn session(&self, id: &str) -> ServiceResult<Arc<Mutex<GameSession>>> {
        self.sessions
            .lock()
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(format!("unknown game {id:?}")))
    }

    pub fn create_game(&self, req: CreateGame) -> ServiceResult<GameView> {
        let size = req.size;
        let win_length = req.win_length.unwrap_or(size);
        if size > MAX_BOARD_SIZE {
            return Err(ServiceError::BadRequest(format!(
                "board size is limited to {MAX_BOARD_SIZE}, got {size}"
            )));
        }
        let board = Board::new(size, win_length).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        let engines = [
            Engine::resolve(&req.x_engine, size, win_length, &self.library)?,
            Engine::resolve(&req.o_engine, size, win_length, &self.library)?,
        ];
        let (id, seed) = {
            let mut rng = self.rng.lock();
            (format!("{:016x}", rng.random::<u64>()), rng.random::<u64>())
        };
        let mut session = GameSession {
            id: id.clone(),
            board,
            specs: [req.x_engine, req.o_engine],
            engines,
            move_log: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        let reply = session.run_engines()?;
        let view = session.view(reply);
        if let Some((evicted, _)) = self
            .sessions
            .lock()
            .push(id.clone(), Arc::new(Mutex::new(session)))
        {
            if evicted != id {
                log::debug!("evicted game {evicted}");
            }
        }
        log::info!("created game {id}");
        Ok(view)
    }

    pub fn game(&self, id: &str) -> ServiceResult<GameView> {
        let session = self.session(id)?;
        let s = session.lock();
        Ok(s.view(None))
    }

    pub fn post_move(&self, id: &str, cell: usize) -> ServiceResult<GameView> {
        let session = self.session(id)?;
        let mut s = session.lock();
        if s.board.is_terminal() {
            return Err(ServiceError::Conflict(format!(
                "game is over ({})",
                s.board.status()
            )));
        }
        if !s.engine_to_move().is_human() {
            return Err(ServiceError::Conflict("it is not a human player's turn".into()));
        }
        s.apply(cell, None).map_err(|e| match e {
            Error::IllegalMove { .. } => ServiceError::IllegalMove(e.to_string()),
            other => ServiceError::Internal(other.to_string()),
        })?;
        let reply = if s.board.is_terminal() || s.engine_to_move().is_human() {
            None
        } else {
            let engine = s.engine_to_move().clone();
            let board = s.board.clone();
            let reply = engine.choose(&board, &mut s.rng)?;
            s.apply(reply.cell, Some(reply.elapsed_ms))
                .map_err(|e| ServiceError::Internal(format!("engine chose an illegal move: {e}")))?;
            Some(reply)
        };
        Ok(s.view(reply))
    }

    /// Learned utility of every legal successor from the mover's perspective.
    pub fn analyze(&self, id: &str) -> ServiceResult<Vec<CellUtility>> {
        let session = self.session(id)?;
        let s = session.lock();
        if s.board.is_terminal() {
            return Err(ServiceError::Conflict(format!(
                "game is over ({})",
                s.board.status()
            )));
        }
        let w = s
            .analysis_weights()
            .ok_or_else(|| ServiceError::Conflict("no agent engine in this game".into()))?;
        let scored = move_utilities(&s.board, w).map_err(|e| ServiceError::Internal(e.to_string()))?;
        Ok(scored
            .into_iter()
            .map(|(m, utility)| CellUtility {
                cell: m.cell,
                utility,
            })
            .collect())
    }

    pub fn delete(&self, id: &str) -> ServiceResult<()> {
        self.sessions
            .lock()
            .pop(id)
            .map(|_| ())
            .ok_or_else(|| ServiceError::NotFound(format!("unknown game {id:?}")))
    }

    pub fn engines(&self) -> EnginesView {
        EnginesView {
            kinds: vec!["human", "random", "minimax", "agent"],
            pruning: vec!["none", "ab"],
            checkpoints: self
                .library
                .iter()
                .map(|c| CheckpointInfo {
                    id: c.id.clone(),
                    size: c.meta.board_size,
                    win_length: c.meta.win_length,
                    games_trained: c.meta.games_trained,
                })
                .collect(),
        }
    }
}

impl std::fmt::Debug for GameService {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GameService")
            .field("checkpoints", &self.library.len())
            .field("sessions", &self.session_count())
            .finish()
    }
}
