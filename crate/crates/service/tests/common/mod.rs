#![allow(dead_code)]

use nrowrl_core::{Board, CheckpointMeta, WeightVector};
use nrowrl_service::{CheckpointLibrary, GameView};

/// Weights that only reward completing a line of three.
pub fn line_seeker() -> WeightVector {
    WeightVector::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 100.0, 0.0]).unwrap()
}

/// `c1` all-zero 3×3, `c_3x3` line-seeking 3×3, `c4` initial 4×4.
pub fn library() -> CheckpointLibrary {
    let mut lib = CheckpointLibrary::default();
    lib.insert(
        "c1".into(),
        WeightVector::filled(7, 0.0),
        CheckpointMeta::new(3, 3, 0.4, 0, 0),
    );
    lib.insert(
        "c_3x3".into(),
        line_seeker(),
        CheckpointMeta::new(3, 3, 0.4, 1000, 1),
    );
    lib.insert(
        "c4".into(),
        WeightVector::initial(4),
        CheckpointMeta::new(4, 4, 0.4, 0, 0),
    );
    lib
}

/// Checks that a view describes a reachable position consistent with its
/// own move log.
pub fn check_view(v: &GameView) {
    let board = Board::parse(&v.board, Some(v.win_length)).expect("board must be valid");
    assert_eq!(board.size(), v.size);
    assert_eq!(board.status().to_string(), v.status);
    assert_eq!(
        v.to_move,
        (!board.is_terminal()).then(|| board.to_move().symbol())
    );
    let mut replay = Board::new(v.size, v.win_length).unwrap();
    for (i, m) in v.move_log.iter().enumerate() {
        assert_eq!(m.mark, if i % 2 == 0 { 'X' } else { 'O' });
        replay = replay.play(m.cell).expect("logged moves must be legal");
        if let Some(ms) = m.elapsed_ms {
            assert!(ms >= 0.0);
        }
    }
    assert_eq!(replay, board);
}
