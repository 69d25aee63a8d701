//! Generalized N×N boards with a configurable win length K.
//!
//! Cells are indexed row-major from the top-left corner. Boards are immutable
//! values: [`Board::apply_move`] returns a fresh state and leaves its input
//! untouched. The win-line geometry is shared between all states of a game.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    X,
    O,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::X => Player::O,
            Player::O => Player::X,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Player::X => 'X',
            Player::O => 'O',
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub cell: usize,
    pub mark: Player,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameStatus {
    Ongoing,
    WonByX,
    WonByO,
    Draw,
}

impl GameStatus {
    pub fn is_terminal(self) -> bool {
        self != GameStatus::Ongoing
    }

    pub fn winner(self) -> Option<Player> {
        match self {
            GameStatus::WonByX => Some(Player::X),
            GameStatus::WonByO => Some(Player::O),
            _ => None,
        }
    }

    fn won_by(p: Player) -> GameStatus {
        match p {
            Player::X => GameStatus::WonByX,
            Player::O => GameStatus::WonByO,
        }
    }
}

impl fmt::Display for GameStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GameStatus::Ongoing => "Ongoing",
            GameStatus::WonByX => "WonByX",
            GameStatus::WonByO => "WonByO",
            GameStatus::Draw => "Draw",
        };
        f.write_str(s)
    }
}

fn check_dims(size: usize, win_length: usize) -> Result<()> {
    if size < 1 {
        return Err(Error::Config(format!(
            "board size must be at least 1, got {size}"
        )));
    }
    if win_length < 1 || win_length > size {
        return Err(Error::Config(format!(
            "win length must be between 1 and the board size {size}, got {win_length}"
        )));
    }
    Ok(())
}

/// Every K-cell contiguous segment along rows, columns and both diagonals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineSet {
    size: usize,
    win_length: usize,
    lines: Vec<Vec<usize>>,
    // line indices passing through each cell
    by_cell: Vec<Vec<usize>>,
}

impl LineSet {
    pub fn new(size: usize, win_length: usize) -> Result<LineSet> {
        check_dims(size, win_length)?;
        let n = size as isize;
        let k = win_length as isize;
        let mut lines: Vec<Vec<usize>> = Vec::new();
        // (dr, dc): row, column, main diagonal, anti-diagonal
        let directions: &[(isize, isize)] = if win_length == 1 {
            // a single cell is the same segment in every direction
            &[(0, 1)]
        } else {
            &[(0, 1), (1, 0), (1, 1), (1, -1)]
        };
        for &(dr, dc) in directions {
            for r in 0..n {
                for c in 0..n {
                    let end_r = r + dr * (k - 1);
                    let end_c = c + dc * (k - 1);
                    if !(0..n).contains(&end_r) || !(0..n).contains(&end_c) {
                        continue;
                    }
                    let line = (0..k)
                        .map(|i| ((r + dr * i) * n + (c + dc * i)) as usize)
                        .collect();
                    lines.push(line);
                }
            }
        }
        let mut by_cell = vec![Vec::new(); size * size];
        for (li, line) in lines.iter().enumerate() {
            for &cell in line {
                by_cell[cell].push(li);
            }
        }
        Ok(LineSet {
            size,
            win_length,
            lines,
            by_cell,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn win_length(&self) -> usize {
        self.win_length
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.lines.iter().map(Vec::as_slice)
    }

    pub fn lines_through(&self, cell: usize) -> impl Iterator<Item = &[usize]> {
        self.by_cell[cell]
            .iter()
            .map(move |&li| self.lines[li].as_slice())
    }
}

/// Win lines for an N×N board with win length K.
pub fn win_lines(size: usize, win_length: usize) -> Result<LineSet> {
    LineSet::new(size, win_length)
}

/// The eight symmetries of the square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Identity,
    Rotate90,
    Rotate180,
    Rotate270,
    FlipHorizontal,
    FlipVertical,
    Transpose,
    AntiTranspose,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::Identity,
        Symmetry::Rotate90,
        Symmetry::Rotate180,
        Symmetry::Rotate270,
        Symmetry::FlipHorizontal,
        Symmetry::FlipVertical,
        Symmetry::Transpose,
        Symmetry::AntiTranspose,
    ];

    fn map(self, r: usize, c: usize, n: usize) -> (usize, usize) {
        let m = n - 1;
        match self {
            Symmetry::Identity => (r, c),
            Symmetry::Rotate90 => (c, m - r),
            Symmetry::Rotate180 => (m - r, m - c),
            Symmetry::Rotate270 => (m - c, r),
            Symmetry::FlipHorizontal => (r, m - c),
            Symmetry::FlipVertical => (m - r, c),
            Symmetry::Transpose => (c, r),
            Symmetry::AntiTranspose => (m - c, m - r),
        }
    }
}

#[derive(Clone)]
pub struct Board {
    lines: Arc<LineSet>,
    cells: Vec<Option<Player>>,
    to_move: Player,
    status: GameStatus,
}

impl PartialEq for Board {
    fn eq(&self, other: &Self) -> bool {
        self.size() == other.size()
            && self.win_length() == other.win_length()
            && self.to_move == other.to_move
            && self.cells == other.cells
    }
}

impl Eq for Board {}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Board")
            .field("size", &self.size())
            .field("win_length", &self.win_length())
            .field("cells", &self.render_text())
            .field("to_move", &self.to_move)
            .field("status", &self.status)
            .finish()
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

impl Board {
    /// Empty board with X to move.
    pub fn new(size: usize, win_length: usize) -> Result<Board> {
        let lines = Arc::new(LineSet::new(size, win_length)?);
        Ok(Board {
            lines,
            cells: vec![None; size * size],
            to_move: Player::X,
            status: GameStatus::Ongoing,
        })
    }

    /// Builds a board from raw cells, inferring the side to move and checking
    /// the mark-count and single-winner rules.
    pub fn from_cells(size: usize, win_length: usize, cells: Vec<Option<Player>>) -> Result<Board> {
        let mut board = Board::new(size, win_length)?;
        if cells.len() != size * size {
            return Err(Error::InvalidBoard(format!(
                "expected {} cells, got {}",
                size * size,
                cells.len()
            )));
        }
        let xs = cells.iter().filter(|c| **c == Some(Player::X)).count();
        let os = cells.iter().filter(|c| **c == Some(Player::O)).count();
        let to_move = match xs.checked_sub(os) {
            Some(0) => Player::X,
            Some(1) => Player::O,
            _ => {
                return Err(Error::InvalidBoard(format!(
                    "mark counts X={xs}, O={os} cannot arise from alternating play"
                )))
            }
        };
        board.cells = cells;
        board.to_move = to_move;
        let x_won = board.has_line(Player::X);
        let o_won = board.has_line(Player::O);
        board.status = match (x_won, o_won) {
            (true, true) => return Err(Error::InvalidBoard("both players hold a completed line".into())),
            // the winner must have made the last move
            (true, false) if to_move != Player::O => {
                return Err(Error::InvalidBoard("X has won but O has moved since".into()))
            }
            (false, true) if to_move != Player::X => {
                return Err(Error::InvalidBoard("O has won but X has moved since".into()))
            }
            (true, false) => GameStatus::WonByX,
            (false, true) => GameStatus::WonByO,
            (false, false) if xs + os == board.cells.len() => GameStatus::Draw,
            (false, false) => GameStatus::Ongoing,
        };
        Ok(board)
    }

    /// Parses the text format: N rows of N characters from `X`, `O`, `.`.
    /// The win length defaults to N.
    pub fn parse(text: &str, win_length: Option<usize>) -> Result<Board> {
        let text = text.strip_suffix('\n').unwrap_or(text);
        let rows: Vec<&str> = text.split('\n').collect();
        let size = rows.len();
        let mut cells = Vec::with_capacity(size * size);
        for (r, row) in rows.iter().enumerate() {
            let row = row.strip_suffix('\r').unwrap_or(row);
            if row.chars().count() != size {
                return Err(Error::InvalidBoard(format!(
                    "row {r} has {} characters, expected {size}",
                    row.chars().count()
                )));
            }
            for ch in row.chars() {
                cells.push(match ch {
                    'X' => Some(Player::X),
                    'O' => Some(Player::O),
                    '.' => None,
                    other => return Err(Error::InvalidBoard(format!("unexpected character {other:?}"))),
                });
            }
        }
        Board::from_cells(size, win_length.unwrap_or(size), cells)
    }

    fn has_line(&self, p: Player) -> bool {
        self.lines
            .iter()
            .any(|line| line.iter().all(|&c| self.cells[c] == Some(p)))
    }

    pub fn size(&self) -> usize {
        self.lines.size()
    }

    pub fn win_length(&self) -> usize {
        self.lines.win_length()
    }

    pub fn lines(&self) -> &LineSet {
        &self.lines
    }

    pub fn cells(&self) -> &[Option<Player>] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> Option<Player> {
        self.cells[index]
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn status(&self) -> GameStatus {
        self.status
    }

    pub fn is_terminal(&self) -> bool {
        self.status.is_terminal()
    }

    pub fn empty_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    pub fn count(&self, p: Player) -> usize {
        self.cells.iter().filter(|c| **c == Some(p)).count()
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        if self.is_terminal() {
            return Vec::new();
        }
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(cell, _)| Move {
                cell,
                mark: self.to_move,
            })
            .collect()
    }

    pub fn apply_move(&self, m: Move) -> Result<Board> {
        if self.is_terminal() {
            return Err(Error::GameOver);
        }
        if m.cell >= self.cells.len() {
            return Err(Error::IllegalMove {
                cell: m.cell,
                reason: "cell is off the board",
            });
        }
        if self.cells[m.cell].is_some() {
            return Err(Error::IllegalMove {
                cell: m.cell,
                reason: "cell is occupied",
            });
        }
        if m.mark != self.to_move {
            return Err(Error::IllegalMove {
                cell: m.cell,
                reason: "not this mark's turn",
            });
        }
        let mut next = self.clone();
        next.cells[m.cell] = Some(m.mark);
        next.to_move = m.mark.opponent();
        let won = next
            .lines
            .lines_through(m.cell)
            .any(|line| line.iter().all(|&c| next.cells[c] == Some(m.mark)));
        next.status = if won {
            GameStatus::won_by(m.mark)
        } else if next.cells.iter().all(Option::is_some) {
            GameStatus::Draw
        } else {
            GameStatus::Ongoing
        };
        Ok(next)
    }

    /// Places the side-to-move's mark on `cell`.
    pub fn play(&self, cell: usize) -> Result<Board> {
        self.apply_move(Move {
            cell,
            mark: self.to_move,
        })
    }

    pub fn render_text(&self) -> String {
        let n = self.size();
        let mut out = String::with_capacity(n * (n + 1));
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 && i % n == 0 {
                out.push('\n');
            }
            out.push(c.map_or('.', Player::symbol));
        }
        out
    }

    pub fn transformed(&self, sym: Symmetry) -> Board {
        let n = self.size();
        let mut cells = vec![None; n * n];
        for r in 0..n {
            for c in 0..n {
                let (r2, c2) = sym.map(r, c, n);
                cells[r2 * n + c2] = self.cells[r * n + c];
            }
        }
        Board {
            cells,
            ..self.clone()
        }
    }

    /// Exchanges every X and O mark and the side to move.
    ///
    /// The result can have O holding one more mark than X, so it is not
    /// necessarily a reachable position; search and status still apply.
    pub fn color_swapped(&self) -> Board {
        let cells = self.cells.iter().map(|c| c.map(Player::opponent)).collect();
        let status = match self.status {
            GameStatus::WonByX => GameStatus::WonByO,
            GameStatus::WonByO => GameStatus::WonByX,
            s => s,
        };
        Board {
            lines: self.lines.clone(),
            cells,
            to_move: self.to_move.opponent(),
            status,
        }
    }
}

pub fn new_board(size: usize, win_length: usize) -> Result<Board> {
    Board::new(size, win_length)
}

pub fn legal_moves(b: &Board) -> Vec<Move> {
    b.legal_moves()
}

pub fn apply_move(b: &Board, m: Move) -> Result<Board> {
    b.apply_move(m)
}

pub fn status(b: &Board) -> GameStatus {
    b.status()
}

pub fn render_text(b: &Board) -> String {
    b.render_text()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn board(text: &str) -> Board {
        Board::parse(text, None).unwrap()
    }

    #[test]
    fn new_board_is_empty_with_x_to_move() {
        let b = Board::new(3, 3).unwrap();
        assert!(b.cells().iter().all(Option::is_none));
        assert_eq!(b.to_move(), Player::X);
        let b = Board::new(5, 4).unwrap();
        assert_eq!((b.size(), b.win_length()), (5, 4));
        assert_eq!(b.to_move(), Player::X);
        assert!(matches!(Board::new(3, 4), Err(Error::Config(_))));
        assert!(matches!(Board::new(0, 0), Err(Error::Config(_))));
    }

    #[test]
    fn legal_move_counts() {
        let b = Board::new(3, 3).unwrap();
        let moves = b.legal_moves();
        assert_eq!(moves.len(), 9);
        assert!(moves.iter().all(|m| m.mark == Player::X));

        assert!(board("XXX\nOO.\n...").legal_moves().is_empty());
        assert_eq!(board("XO.\n.X.\n..O").legal_moves().len(), 5);
    }

    #[test]
    fn apply_move_semantics() {
        let b = Board::new(3, 3).unwrap();
        let b1 = b.play(4).unwrap();
        assert_eq!(b1.render_text(), "...\n.X.\n...");
        assert_eq!(b1.to_move(), Player::O);
        assert_eq!(b.render_text(), "...\n...\n...");
        assert!(matches!(
            b1.apply_move(Move {
                cell: 4,
                mark: Player::O
            }),
            Err(Error::IllegalMove { cell: 4, .. })
        ));
        assert!(matches!(
            b1.apply_move(Move {
                cell: 0,
                mark: Player::X
            }),
            Err(Error::IllegalMove { .. })
        ));
        assert!(matches!(b1.play(9), Err(Error::IllegalMove { .. })));
        assert!(matches!(board("XXX\nOO.\n...").play(5), Err(Error::GameOver)));
    }

    #[test]
    fn status_examples() {
        assert_eq!(board("XXX\nOO.\n...").status(), GameStatus::WonByX);
        assert_eq!(board("XOX\nXOO\nOXX").status(), GameStatus::Draw);
        assert_eq!(board("...\n.X.\n...").status(), GameStatus::Ongoing);
        assert_eq!(board("XX.\nOOO\nX..").status(), GameStatus::WonByO);
    }

    #[test]
    fn win_line_counts() {
        assert_eq!(win_lines(3, 3).unwrap().len(), 8);
        assert_eq!(win_lines(4, 4).unwrap().len(), 10);
        assert_eq!(win_lines(4, 3).unwrap().len(), 24);
        for n in 2..=8 {
            assert_eq!(win_lines(n, n).unwrap().len(), 2 * n + 2);
        }
        // the four directions coincide on a single cell
        assert_eq!(win_lines(1, 1).unwrap().len(), 1);
        assert_eq!(win_lines(3, 1).unwrap().len(), 9);
    }

    #[test]
    fn render_examples() {
        assert_eq!(Board::new(3, 3).unwrap().render_text(), "...\n...\n...");
        assert_eq!(board("XXX\nOO.\n...").render_text(), "XXX\nOO.\n...");
    }

    #[test]
    fn parser_rejects_malformed_and_invalid_boards() {
        assert!(Board::parse("XX.\nO..\n...\n", None).is_ok());
        assert!(Board::parse("XX\nO..\n...", None).is_err());
        assert!(Board::parse("XZ.\nO..\n...", None).is_err());
        // O ahead of X
        assert!(Board::parse("OO.\nX..\n...", None).is_err());
        // X two marks ahead
        assert!(Board::parse("XX.\nX..\nO..", None).is_err());
        // both players complete a line
        assert!(Board::parse("XXX\nOOO\nX..", None).is_err());
    }

    #[test]
    fn random_playouts_keep_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for game in 0..10_000 {
            let n = 3 + game % 3;
            let mut b = Board::new(n, n).unwrap();
            loop {
                let xs = b.count(Player::X);
                let os = b.count(Player::O);
                assert!(xs == os || xs == os + 1);
                assert_eq!(b.to_move() == Player::X, xs == os);
                let moves = b.legal_moves();
                if b.is_terminal() {
                    assert!(moves.is_empty());
                    break;
                }
                assert_eq!(moves.len(), b.empty_count());
                let m = *moves.choose(&mut rng).unwrap();
                let next = b.apply_move(m).unwrap();
                if !next.is_terminal() {
                    assert_eq!(next.legal_moves().len(), moves.len() - 1);
                }
                // incremental status agrees with a full rescan
                let rescanned = Board::from_cells(n, n, next.cells().to_vec()).unwrap();
                assert_eq!(rescanned.status(), next.status());
                b = next;
            }
        }
    }
}
