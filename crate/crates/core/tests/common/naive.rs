//! Naive re-implementations used as oracles: pixel loops, cell scans, and
//! whole-board turns done by hand.

use pf_core::{Arrangement, Edge, Piece, Placement, PuzzleType, Raster, Rotation};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Quarter turns clockwise, by moving pixels.
pub fn turn(r: &Raster, quarters: usize) -> Raster {
    let mut cur = r.clone();
    for _ in 0..quarters % 4 {
        let mut next = Raster::new(cur.height, cur.width, cur.channels);
        for y in 0..cur.height {
            for x in 0..cur.width {
                for ch in 0..cur.channels {
                    // (y, x) moves to (x, h - 1 - y)
                    next.set(x, cur.height - 1 - y, ch, cur.get(y, x, ch));
                }
            }
        }
        cur = next;
    }
    cur
}

/// Quarters that carry stored edge `e` to side `side`.
pub fn quarters_to(e: usize, side: usize) -> usize {
    (side + 4 - e) % 4
}

pub fn naive_ssd(a: &Raster, b: &Raster, ae: usize, ce: usize) -> u64 {
    let a = turn(a, quarters_to(ae, 1));
    let b = turn(b, quarters_to(ce, 3));
    let mut sum = 0u64;
    for y in 0..a.height {
        for ch in 0..a.channels {
            let d = a.get(y, a.width - 1, ch) as i64 - b.get(y, 0, ch) as i64;
            sum += (d * d) as u64;
        }
    }
    sum
}

pub struct Instance {
    pub rows: usize,
    pub cols: usize,
    /// piece at each cell, row-major, with its clockwise quarters
    pub grid: Vec<(usize, usize)>,
}

impl Instance {
    pub fn random(rng: &mut ChaCha8Rng, pt: PuzzleType) -> Self {
        let (rows, cols) = loop {
            let r = rng.random_range(1..=9);
            let c = rng.random_range(1..=9);
            if r * c <= 9 && r * c >= 2 {
                break (r, c);
            }
        };
        let mut ids: Vec<usize> = (0..rows * cols).collect();
        ids.shuffle(rng);
        let grid = ids
            .into_iter()
            .map(|id| {
                let q = match pt {
                    PuzzleType::Type1 => 0,
                    PuzzleType::Type2 => rng.random_range(0..4),
                };
                (id, q)
            })
            .collect();
        Instance { rows, cols, grid }
    }

    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn arrangement(&self) -> Arrangement {
        let mut cells = vec![None; self.n()];
        for (k, &(id, q)) in self.grid.iter().enumerate() {
            cells[id] = Some(Placement::new(
                k / self.cols,
                k % self.cols,
                Rotation::from_quarters(q as u32),
            ));
        }
        Arrangement::new(self.rows, self.cols, cells).unwrap()
    }

    /// (a, a's stored edge, b, b's stored edge) for every right and bottom neighbor.
    pub fn pairs(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut out = Vec::new();
        let stored = |q: usize, side: usize| (side + 4 - q) % 4;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let (a, qa) = self.grid[r * self.cols + c];
                if c + 1 < self.cols {
                    let (b, qb) = self.grid[r * self.cols + c + 1];
                    out.push((a, stored(qa, 1), b, stored(qb, 3)));
                }
                if r + 1 < self.rows {
                    let (b, qb) = self.grid[(r + 1) * self.cols + c];
                    out.push((a, stored(qa, 2), b, stored(qb, 0)));
                }
            }
        }
        out
    }

    /// The same solution seen after turning the whole board a quarter clockwise.
    pub fn turned(&self) -> Instance {
        let (r0, c0) = (self.rows, self.cols);
        let mut grid = vec![(0, 0); self.n()];
        for r in 0..r0 {
            for c in 0..c0 {
                let (id, q) = self.grid[r * c0 + c];
                // (r, c) goes to (c, r0 - 1 - r) in a c0 x r0 grid
                grid[c * r0 + (r0 - 1 - r)] = (id, (q + 1) % 4);
            }
        }
        Instance {
            rows: c0,
            cols: r0,
            grid,
        }
    }
}

pub fn relation_index(pt: PuzzleType, ae: usize, be: usize) -> usize {
    match pt {
        PuzzleType::Type1 => ae,
        PuzzleType::Type2 => 4 * ae + be,
    }
}

pub fn edge(i: usize) -> Edge {
    Edge::from_index(i)
}

pub fn random_piece(rng: &mut ChaCha8Rng, id: usize, p: usize, c: usize) -> Piece {
    let mut r = Raster::new(p, p, c);
    rng.fill(&mut r.data[..]);
    Piece::new(id, r)
}

pub fn naive_accuracy(sol: &Instance, gt: &Instance) -> f64 {
    let key = |&(a, ae, b, be): &(usize, usize, usize, usize)| {
        if (a, ae) <= (b, be) {
            (a, ae, b, be)
        } else {
            (b, be, a, ae)
        }
    };
    let truth: Vec<_> = gt.pairs().iter().map(key).collect();
    let mine: Vec<_> = sol.pairs().iter().map(key).collect();
    let hits = truth.iter().filter(|k| mine.contains(k)).count();
    hits as f64 / truth.len() as f64
}
