//! Engine descriptors and move selection for service sessions.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use nrowrl_core::evaluate::{check_search_feasible, random_move};
use nrowrl_core::minimax::{search, Pruning, SearchConfig};
use nrowrl_core::trainer::best_move;
use nrowrl_core::{extract_features, load_checkpoint, Board, CheckpointMeta, Error, WeightVector};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ServiceError, ServiceResult};

/// Extension of checkpoint files picked up from the checkpoint directory.
pub const CHECKPOINT_EXTENSION: &str = "ckpt";

/// Engine descriptor as it appears on the wire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EngineSpec {
    Human,
    Random,
    Minimax {
        /// Omitted or null for a full-depth search.
        #[serde(default)]
        depth: Option<u32>,
        #[serde(default = "default_pruning")]
        pruning: String,
    },
    Agent {
        checkpoint: String,
    },
}

fn default_pruning() -> String {
    Pruning::AlphaBeta.to_string()
}

impl fmt::Display for EngineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineSpec::Human => f.write_str("human"),
            EngineSpec::Random => f.write_str("random"),
            EngineSpec::Minimax {
                depth: Some(d),
                pruning,
            } => write!(f, "minimax(depth {d}, {pruning})"),
            EngineSpec::Minimax { depth: None, pruning } => write!(f, "minimax({pruning})"),
            EngineSpec::Agent { checkpoint } => write!(f, "agent({checkpoint})"),
        }
    }
}

#[derive(Debug)]
pub struct LoadedCheckpoint {
    pub id: String,
    pub weights: WeightVector,
    pub meta: CheckpointMeta,
}

/// Read-only checkpoints keyed by file stem.
#[derive(Debug, Default)]
pub struct CheckpointLibrary {
    entries: BTreeMap<String, Arc<LoadedCheckpoint>>,
}

impl CheckpointLibrary {
    /// Loads every `*.ckpt` file in `dir`. A malformed file fails the whole load.
    pub fn load_dir(dir: &Path) -> nrowrl_core::Result<CheckpointLibrary> {
        let mut lib = CheckpointLibrary::default();
        let mut paths = Vec::new();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_file() && path.extension().is_some_and(|e| e == CHECKPOINT_EXTENSION) {
                paths.push(path);
            }
        }
        paths.sort();
        for path in paths {
            let Some(id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_owned) else {
                continue;
            };
            let (weights, meta) =
                load_checkpoint(&path).map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
            log::info!(
                "loaded checkpoint {id} ({}x{}, k={})",
                meta.board_size,
                meta.board_size,
                meta.win_length
            );
            lib.insert(id, weights, meta);
        }
        Ok(lib)
    }

    pub fn insert(&mut self, id: String, weights: WeightVector, meta: CheckpointMeta) {
        self.entries
            .insert(id.clone(), Arc::new(LoadedCheckpoint { id, weights, meta }));
    }

    pub fn get(&self, id: &str) -> Option<Arc<LoadedCheckpoint>> {
        self.entries.get(id).cloned()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LoadedCheckpoint> {
        self.entries.values().map(Arc::as_ref)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A descriptor resolved against the checkpoint library and board shape.
#[derive(Debug, Clone)]
pub enum Engine {
    Human,
    Random,
    Minimax(SearchConfig),
    Agent(Arc<LoadedCheckpoint>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineReply {
    pub cell: usize,
    pub elapsed_ms: f64,
    /// Learned utility of the chosen successor; agents only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub utility: Option<f64>,
}

impl Engine {
    pub fn resolve(
        spec: &EngineSpec,
        size: usize,
        win_length: usize,
        library: &CheckpointLibrary,
    ) -> ServiceResult<Engine> {
        match spec {
            EngineSpec::Human => Ok(Engine::Human),
            EngineSpec::Random => Ok(Engine::Random),
            EngineSpec::Minimax { depth, pruning } => {
                let pruning: Pruning = pruning
                    .parse()
                    .map_err(|e: Error| ServiceError::BadRequest(e.to_string()))?;
                if *depth == Some(0) {
                    return Err(ServiceError::BadRequest(
                        "minimax depth must be at least 1".into(),
                    ));
                }
                let cfg = SearchConfig::default()
                    .with_pruning(pruning)
                    .with_max_depth(*depth);
                check_search_feasible(size, &cfg).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
                Ok(Engine::Minimax(cfg))
            }
            EngineSpec::Agent { checkpoint } => {
                let ckpt = library
                    .get(checkpoint)
                    .ok_or_else(|| ServiceError::NotFound(format!("unknown checkpoint {checkpoint:?}")))?;
                if ckpt.meta.board_size != size || ckpt.meta.win_length != win_length {
                    return Err(ServiceError::Conflict(format!(
                        "checkpoint {checkpoint:?} was trained on {0}x{0} with win length {1}, not {size}x{size} with win length {win_length}",
                        ckpt.meta.board_size, ckpt.meta.win_length
                    )));
                }
                Ok(Engine::Agent(ckpt))
            }
        }
    }

    pub fn is_human(&self) -> bool {
        matches!(self, Engine::Human)
    }

    pub fn weights(&self) -> Option<&WeightVector> {
        match self {
            Engine::Agent(c) => Some(&c.weights),
            _ => None,
        }
    }

    /// Picks a move for the side to move and times the decision.
    pub fn choose(&self, b: &Board, rng: &mut ChaCha8Rng) -> ServiceResult<EngineReply> {
        let started = Instant::now();
        let (m, utility) = match self {
            Engine::Human => return Err(ServiceError::Internal("human sides do not choose moves".into())),
            Engine::Random => (random_move(b, rng).map_err(internal)?, None),
            Engine::Minimax(cfg) => {
                let r = search(b, cfg).map_err(internal)?;
                (r.best_move.ok_or_else(|| internal(Error::GameOver))?, None)
            }
            Engine::Agent(c) => {
                let m = best_move(b, &c.weights, rng).map_err(internal)?;
                let next = b.apply_move(m).map_err(internal)?;
                let u = c
                    .weights
                    .evaluate(&extract_features(&next, b.to_move()))
                    .map_err(internal)?;
                (m, Some(u))
            }
        };
        Ok(EngineReply {
            cell: m.cell,
            elapsed_ms: started.elapsed().as_secs_f64() * 1000.0,
            utility,
        })
    }
}

fn internal(e: Error) -> ServiceError {
    ServiceError::Internal(e.to_string())
}
