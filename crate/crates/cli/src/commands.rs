use std::fs::{self, File};
use std::io::{self, BufRead, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use nrowrl_core::bench::{benchmark_agent_latency, benchmark_latency, latency_csv};
use nrowrl_core::enumerate::{enumerate, MAX_ENUMERATION_SIZE};
use nrowrl_core::evaluate::{evaluate_agent, random_move, Opponent, MAX_FULL_SEARCH_SIZE};
use nrowrl_core::minimax::{search, SearchConfig};
use nrowrl_core::trainer::{best_move, metrics_csv_header, TrainConfig, Trainer, STATS_CSV_HEADER};
use nrowrl_core::{load_checkpoint, save_checkpoint, Board, CheckpointMeta, Player, WeightVector};
use nrowrl_service::{CheckpointLibrary, GameService};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::*;
use crate::error::{io_at, usage, CliError, CliResult};

pub const METRICS_FILE: &str = "metrics.csv";
pub const TRACES_FILE: &str = "traces.txt";
pub const FINAL_CHECKPOINT: &str = "final.ckpt";

pub fn checkpoint_file(games: u64) -> String {
    format!("checkpoint_{games}.ckpt")
}

fn board_dims(b: &BoardArgs) -> CliResult<(usize, usize)> {
    let size = b.size;
    let k = b.win_length.unwrap_or(size);
    if size < 1 {
        return usage("--size must be at least 1");
    }
    if k < 1 || k > size {
        return usage(format!(
            "--win-length must be between 1 and --size ({size}), got {k}"
        ));
    }
    Ok((size, k))
}

fn search_config(s: &SearchArgs, size: usize) -> CliResult<SearchConfig> {
    if s.depth == Some(0) {
        return usage("--depth must be at least 1");
    }
    if s.depth.is_none() && size > MAX_FULL_SEARCH_SIZE {
        return usage(format!(
            "--depth is required for minimax above {MAX_FULL_SEARCH_SIZE}x{MAX_FULL_SEARCH_SIZE}"
        ));
    }
    Ok(SearchConfig::default()
        .with_pruning(s.pruning.into())
        .with_max_depth(s.depth))
}

fn load(path: &Path) -> CliResult<(WeightVector, CheckpointMeta)> {
    load_checkpoint(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

pub fn train(a: &TrainArgs) -> CliResult<()> {
    let (size, k) = board_dims(&a.board)?;
    if !a.eta.is_finite() || a.eta < 0.0 {
        return usage(format!("--eta must be a finite number >= 0, got {}", a.eta));
    }
    if a.checkpoint_every < 1 {
        return usage("--checkpoint-every must be at least 1");
    }
    let cfg = TrainConfig {
        board_size: size,
        win_length: k,
        num_games: a.games,
        eta: a.eta,
        seed: a.seed,
        perspectives: a.perspectives.into(),
        checkpoint_every: a.checkpoint_every,
        start_state: a.start.into(),
        update_rule: a.update.into(),
        initial_weights: None,
    };
    let mut trainer = Trainer::new(cfg)?;

    io_at(&a.out, fs::create_dir_all(&a.out))?;
    let metrics_path = a.out.join(METRICS_FILE);
    let mut metrics = BufWriter::new(io_at(&metrics_path, File::create(&metrics_path))?);
    writeln!(metrics, "{}", metrics_csv_header(k))?;
    let mut traces = match a.dump_traces {
        true => {
            let p = a.out.join(TRACES_FILE);
            Some(BufWriter::new(io_at(&p, File::create(&p))?))
        }
        false => None,
    };
    let meta = |games| CheckpointMeta::new(size, k, a.eta, games, a.seed);

    while !trainer.finished() {
        let trace = trainer.step()?;
        let games = trainer.stats().games_played;
        if let Some(t) = traces.as_mut() {
            writeln!(t, "{}", trace.render(games))?;
        }
        if trainer.checkpoint_due() {
            let row = trainer.checkpoint_row();
            writeln!(metrics, "{}", row.csv_line())?;
            save_checkpoint(&row.weights, &meta(games), &a.out.join(checkpoint_file(games)))?;
            log::info!("game {games}: {}", row.stats.csv_fields());
        }
    }
    let stats = trainer.stats();
    // a closing row unless the last game already produced one
    if stats.games_played == 0 || !trainer.checkpoint_due() {
        writeln!(metrics, "{}", trainer.checkpoint_row().csv_line())?;
    }
    metrics.flush()?;
    if let Some(mut t) = traces {
        t.flush()?;
    }
    save_checkpoint(
        trainer.weights(),
        &meta(stats.games_played),
        &a.out.join(FINAL_CHECKPOINT),
    )?;

    println!("{STATS_CSV_HEADER}");
    println!("{}", stats.csv_fields());
    Ok(())
}

pub fn eval(a: &EvalArgs) -> CliResult<()> {
    if a.games < 1 {
        return usage("--games must be at least 1");
    }
    let (w, meta) = load(&a.checkpoint)?;
    let opponent = match a.opponent {
        OpponentArg::Random => Opponent::Random,
        OpponentArg::SelfPlay => Opponent::SelfPlay,
        OpponentArg::Minimax => Opponent::Minimax(search_config(&a.search, meta.board_size)?),
    };
    let stats = evaluate_agent(&w, meta.board_size, meta.win_length, &opponent, a.games, a.seed)?;
    println!("{STATS_CSV_HEADER},non_loss_rate");
    let non_loss = stats.non_loss_rate().map_or(String::new(), |r| format!("{r:.4}"));
    println!("{},{non_loss}", stats.csv_fields());
    Ok(())
}

pub fn bench(a: &BenchArgs) -> CliResult<()> {
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        return usage("--size needs one or more sizes of at least 1");
    }
    if a.trials < 1 {
        return usage("--trials must be at least 1");
    }
    if a.search.depth == Some(0) {
        return usage("--depth must be at least 1");
    }
    let cfg = SearchConfig::default()
        .with_pruning(a.search.pruning.into())
        .with_max_depth(a.search.depth)
        .with_node_budget(a.node_budget);
    let weights = a
        .checkpoint
        .iter()
        .map(|p| load(p).map(|(w, _)| w))
        .collect::<CliResult<Vec<_>>>()?;

    let mut rows = benchmark_latency(&a.sizes, &cfg, a.trials)?;
    rows.extend(benchmark_agent_latency(&a.sizes, &weights, a.trials, a.seed)?);
    let csv = latency_csv(&rows);
    match &a.out {
        Some(path) => io_at(path, fs::write(path, csv))?,
        None => print!("{csv}"),
    }
    Ok(())
}

pub fn enumerate_cmd(a: &EnumerateArgs) -> CliResult<()> {
    let (size, k) = board_dims(&a.board)?;
    if size > MAX_ENUMERATION_SIZE {
        return usage(format!(
            "--size {size} is too large; exhaustive enumeration supports up to {MAX_ENUMERATION_SIZE}"
        ));
    }
    let report = enumerate(size, k)?;
    match a.format {
        FormatArg::Text => print!("{}", report.to_text()),
        FormatArg::Csv => print!("{}", report.to_csv()),
    }
    Ok(())
}

enum PlayEngine {
    Random,
    Minimax(SearchConfig),
    Agent(WeightVector),
}

fn show(out: &mut impl Write, b: &Board) -> io::Result<()> {
    let n = b.size();
    let width = (n * n - 1).to_string().len();
    for r in 0..n {
        let row: Vec<String> = (0..n)
            .map(|c| {
                let i = r * n + c;
                match b.cell(i) {
                    Some(p) => format!("{:>width$}", p.symbol()),
                    None => format!("{i:>width$}"),
                }
            })
            .collect();
        writeln!(out, " {}", row.join(" | "))?;
    }
    Ok(())
}

pub fn play(a: &PlayArgs) -> CliResult<()> {
    play_with(a, io::stdin().lock(), io::stdout().lock())
}

/// Terminal game loop over arbitrary input and output streams.
pub fn play_with(a: &PlayArgs, input: impl BufRead, mut out: impl Write) -> CliResult<()> {
    let (size, k) = board_dims(&a.board)?;
    let engine = match a.opponent {
        EngineArg::Random => PlayEngine::Random,
        EngineArg::Minimax => PlayEngine::Minimax(search_config(&a.search, size)?),
        EngineArg::Agent => {
            let Some(path) = &a.checkpoint else {
                return usage("--opponent agent needs --checkpoint");
            };
            let (w, meta) = load(path)?;
            if (meta.board_size, meta.win_length) != (size, k) {
                return usage(format!(
                    "--checkpoint was trained on {0}x{0} with win length {1}; pass --size {0} --win-length {1}",
                    meta.board_size, meta.win_length
                ));
            }
            PlayEngine::Agent(w)
        }
    };
    let human = match a.human {
        SideArg::X => Player::X,
        SideArg::O => Player::O,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut lines = input.lines();
    let mut b = Board::new(size, k)?;

    while !b.is_terminal() {
        show(&mut out, &b)?;
        if b.to_move() == human {
            write!(out, "{} to move, cell: ", human.symbol())?;
            out.flush()?;
            let Some(line) = lines.next() else {
                return Err(CliError::Runtime("input closed before the game ended".into()));
            };
            let line = line?;
            let next = line
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("not a cell index: {:?}", line.trim()))
                .and_then(|cell| b.play(cell).map_err(|e| e.to_string()));
            match next {
                Ok(next) => b = next,
                Err(msg) => writeln!(out, "{msg}")?,
            }
        } else {
            let started = std::time::Instant::now();
            let m = match &engine {
                PlayEngine::Random => random_move(&b, &mut rng)?,
                PlayEngine::Minimax(cfg) => search(&b, cfg)?.best_move.ok_or(nrowrl_core::Error::GameOver)?,
                PlayEngine::Agent(w) => best_move(&b, w, &mut rng)?,
            };
            let ms = started.elapsed().as_secs_f64() * 1000.0;
            writeln!(out, "{} plays {} ({ms:.3} ms)", b.to_move().symbol(), m.cell)?;
            b = b.apply_move(m)?;
        }
    }
    show(&mut out, &b)?;
    writeln!(out, "result {}", b.status())?;
    Ok(())
}

pub fn serve(a: &ServeArgs) -> CliResult<()> {
    if a.capacity < 1 {
        return usage("--capacity must be at least 1");
    }
    let library = match &a.checkpoint_dir {
        Some(dir) => CheckpointLibrary::load_dir(dir)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?,
        None => CheckpointLibrary::default(),
    };
    if let Some(dir) = &a.static_dir {
        if !dir.is_dir() {
            return usage(format!("--static-dir {} is not a directory", dir.display()));
        }
    }
    let svc = Arc::new(GameService::new(library, a.capacity, a.seed));
    let addr = std::net::SocketAddr::new(a.host, a.port);
    let rt = tokio::runtime::Runtime::new()?;
    eprintln!("serving on http://{addr}");
    rt.block_on(nrowrl_service::serve(addr, svc, a.static_dir.clone()))?;
    Ok(())
}
