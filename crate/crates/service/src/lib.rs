//! HTTP game service: sessions of human, random, minimax or trained-agent
//! players on N×N boards.
//!
//! Endpoints, all JSON:
//!
//! | method | path                       | success |
//! |--------|----------------------------|---------|
//! | POST   | `/api/games`               | 201     |
//! | GET    | `/api/games/{id}`          | 200     |
//! | POST   | `/api/games/{id}/move`     | 200     |
//! | GET    | `/api/games/{id}/analysis` | 200     |
//! | GET    | `/api/engines`             | 200     |
//! | DELETE | `/api/games/{id}`          | 204     |
//!
//! Errors carry an `{"error": "..."}` body.

pub mod engine;
pub mod error;
pub mod http;
pub mod service;

pub use engine::{CheckpointLibrary, Engine, EngineReply, EngineSpec};
pub use error::{ServiceError, ServiceResult};
pub use http::{router, serve};
pub use service::{
    CellUtility, CreateGame, EnginesView, GameService, GameView, MoveRequest, DEFAULT_SESSION_CAPACITY,
};
