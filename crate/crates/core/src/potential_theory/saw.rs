//! Self-avoiding paths on `Z²` with the eight-neighbour (star) adjacency.

use crate::error::{Error, Result};

pub const MAX_SAW_LENGTH: usize = 12;

const MOVES: [(i32, i32); 8] = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)];

struct Board {
    width: i32,
    taken: Vec<bool>,
    offsets: [i32; 8],
}

impl Board {
    fn new(n: usize) -> Self {
        let width = 2 * n as i32 + 3;
        let offsets = MOVES.map(|(x, y)| x + y * width);
        Self {
            width,
            taken: vec![false; (width * width) as usize],
            offsets,
        }
    }

    fn center(&self) -> i32 {
        (self.width / 2) * (self.width + 1)
    }

    /// Extensions of the path ending at `at` by `left` more steps.
    fn count(&mut self, at: i32, left: usize) -> u64 {
        if left == 1 {
            return self.offsets.iter().filter(|&&o| !self.taken[(at + o) as usize]).count() as u64;
        }
        let mut total = 0;
        for k in 0..8 {
            let next = at + self.offsets[k];
            if !self.taken[next as usize] {
                self.taken[next as usize] = true;
                total += self.count(next, left - 1);
                self.taken[next as usize] = false;
            }
        }
        total
    }
}

/// `a(n)`: the number of `n`-step star self-avoiding paths from the origin.
pub fn star_saw_count(n: usize) -> Result<u64> {
    if !(1..=MAX_SAW_LENGTH).contains(&n) {
        return Err(Error::Parameter(format!("star SAW length {n} outside 1..={MAX_SAW_LENGTH}")));
    }
    let mut board = Board::new(n);
    let origin = board.center();
    board.taken[origin as usize] = true;
    if n == 1 {
        return Ok(8);
    }
    // rotations by quarter turns map axial first steps onto each other, and
    // likewise for diagonal ones
    let mut by_first = [0u64; 2];
    for (slot, k) in [(0, 0), (1, 4)] {
        let first = origin + board.offsets[k];
        board.taken[first as usize] = true;
        by_first[slot] = board.count(first, n - 1);
        board.taken[first as usize] = false;
    }
    Ok(4 * by_first[0] + 4 * by_first[1])
}
