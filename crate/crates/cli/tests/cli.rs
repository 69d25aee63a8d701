use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

fn nrowrl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrowrl"))
        .args(args)
        .env("NROWRL_LOG", "error")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn train_writes_metrics_and_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("runs/a");
    let o = nrowrl(&[
        "train",
        "--size",
        "3",
        "--games",
        "1000",
        "--eta",
        "0.4",
        "--seed",
        "42",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    let mut lines = metrics.lines();
    assert_eq!(
        lines.next().unwrap(),
        "games_played,wins,losses,draws,win_ratio,win_draw_ratio,w0,w1,w2,w3,w4,w5,w6"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "1000");
    assert_eq!(row.len(), 13);
    let counts: u64 = row[1..4].iter().map(|c| c.parse::<u64>().unwrap()).sum();
    assert_eq!(counts, 1000);
    assert!(lines.next().is_none());
    assert!(out.join("final.ckpt").is_file());
    assert!(!out.join("traces.txt").exists());
}

#[test]
fn checkpoint_cadence_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = nrowrl(&[
        "train",
        "--games",
        "25",
        "--checkpoint-every",
        "10",
        "--seed",
        "3",
        "--out",
        path(out),
        "--dump-traces",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    let games: Vec<&str> = metrics
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(games, ["10", "20", "25"]);
    for f in ["checkpoint_10.ckpt", "checkpoint_20.ckpt", "final.ckpt"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let traces = std::fs::read_to_string(out.join("traces.txt")).unwrap();
    let headers: Vec<&str> = traces.lines().filter(|l| l.starts_with("game ")).collect();
    assert_eq!(headers.len(), 25);
    assert!(headers[0].starts_with("game 1 result "));
    assert!(traces.starts_with("game 1 result ") && traces.contains("\n...\n...\n...\n\n"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    let cases: &[(&[&str], &str)] = &[
        (
            &[
                "train",
                "--size",
                "3",
                "--win-length",
                "5",
                "--games",
                "10",
                "--out",
                out,
            ],
            "--win-length",
        ),
        (&["train", "--games", "10", "--eta", "-1", "--out", out], "--eta"),
        (
            &["train", "--games", "10", "--checkpoint-every", "0", "--out", out],
            "--checkpoint-every",
        ),
        (
            &["train", "--games", "10", "--perspectives", "z", "--out", out],
            "--perspectives",
        ),
        (&["train", "--out", out], "--games"),
        (&["enumerate", "--size", "4"], "--size"),
        (&["bench", "--size", "3", "--trials", "0"], "--trials"),
        (&["frobnicate"], "frobnicate"),
    ];
    for (args, flag) in cases {
        let o = nrowrl(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(flag), "{args:?}: {err}");
    }
}

#[test]
fn runtime_errors_exit_with_one() {
    let o = nrowrl(&["eval", "--checkpoint", "/nonexistent/w.ckpt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/w.ckpt"));
}

#[test]
fn eval_prints_one_row_summing_to_games() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(
        nrowrl(&["train", "--games", "200", "--out", path(out)])
            .status
            .code(),
        Some(0)
    );
    let ckpt = out.join("final.ckpt");
    for opponent in ["random", "self", "minimax"] {
        let o = nrowrl(&[
            "eval",
            "--checkpoint",
            path(&ckpt),
            "--opponent",
            opponent,
            "--games",
            "120",
            "--seed",
            "5",
        ]);
        assert_eq!(o.status.code(), Some(0), "{opponent}");
        let text = stdout(&o);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("games_played,wins,losses,draws"));
        let f: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(f[0], "120");
        let sum: u64 = f[1..4].iter().map(|c| c.parse::<u64>().unwrap()).sum();
        assert_eq!(sum, 120);
    }
    let o = nrowrl(&[
        "train",
        "--size",
        "4",
        "--games",
        "5",
        "--out",
        path(&out.join("four")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = nrowrl(&[
        "eval",
        "--checkpoint",
        path(&out.join("four/final.ckpt")),
        "--opponent",
        "minimax",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--depth"));
}

#[test]
fn enumerate_formats() {
    let o = nrowrl(&["enumerate", "--size", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("metric,value\n"));
    assert!(text.contains("total_games,255168\n"));
    let o = nrowrl(&["enumerate", "--size", "1"]);
    assert!(stdout(&o)
        .lines()
        .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["total_games", "1"]));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let o = nrowrl(&[
        "bench",
        "--size",
        "3",
        "--trials",
        "2",
        "--pruning",
        "none",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "size,depth_limit,pruning,mean_ms,stddev_ms,nodes");
    assert!(lines[1].starts_with("3,unlimited,none,") && lines[1].ends_with(",549946"));
    assert!(lines[2].starts_with("3,1,agent,") && lines[2].ends_with(",9"));
}

#[test]
fn play_in_the_terminal() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nrowrl"))
        .args(["play", "--opponent", "minimax", "--seed", "1"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    // junk and occupied cells are rejected and re-prompted
    let input = "hello\n4\n4\n0\n1\n2\n3\n5\n6\n7\n8\n";
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("not a cell index"));
    assert!(text.contains("O plays "));
    let result = text.lines().last().unwrap();
    assert!(result == "result Draw" || result == "result WonByO", "{result}");
}

#[test]
fn play_needs_input() {
    let o = Command::new(env!("CARGO_BIN_EXE_nrowrl"))
        .args(["play", "--opponent", "random"])
        .stdin(Stdio::null())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = nrowrl(&["play", "--opponent", "agent"]);
    assert_eq!(o.status.code(), Some(2));
}

fn http(port: u16, request: &str) -> Option<String> {
    let mut s = TcpStream::connect(("127.0.0.1", port)).ok()?;
    s.write_all(request.as_bytes()).ok()?;
    let mut out = String::new();
    s.read_to_string(&mut out).ok()?;
    Some(out)
}

#[test]
fn serve_answers_http() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        nrowrl(&["train", "--games", "50", "--out", path(dir.path())])
            .status
            .code(),
        Some(0)
    );
    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_nrowrl"))
        .args([
            "serve",
            "--port",
            &port.to_string(),
            "--checkpoint-dir",
            path(dir.path()),
        ])
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let started = Instant::now();
    let reply = loop {
        if let Some(r) = http(
            port,
            "GET /api/engines HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n",
        ) {
            break r;
        }
        assert!(
            started.elapsed() < Duration::from_secs(20),
            "service did not start"
        );
        std::thread::sleep(Duration::from_millis(50));
    };
    let body = r#"{"size":3,"x_engine":{"kind":"human"},"o_engine":{"kind":"agent","checkpoint":"final"}}"#;
    let created = http(
        port,
        &format!(
            "POST /api/games HTTP/1.1\r\nHost: x\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        ),
    )
    .unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(reply.starts_with("HTTP/1.1 200"), "{reply}");
    assert!(reply.contains("\"id\":\"final\""), "{reply}");
    assert!(created.starts_with("HTTP/1.1 201"), "{created}");
}
