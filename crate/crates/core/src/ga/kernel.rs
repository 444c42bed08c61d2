//! The connected partial placement grown during crossover.

use crate::model::{Arrangement, Edge, Placement, Rotation};

const EMPTY: u32 = u32::MAX;

/// Which bounding boxes a kernel may grow into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameRule {
    /// The final grid must be exactly `rows x cols`.
    Known { rows: usize, cols: usize },
    /// Any `rows x cols` with area `n`; the box must still fit one of them.
    Unknown { shapes: Vec<(usize, usize)> },
}

impl FrameRule {
    pub fn known(rows: usize, cols: usize) -> Self {
        FrameRule::Known { rows, cols }
    }

    pub fn unknown(n: usize) -> Self {
        let shapes = (1..=n).filter(|r| n % r == 0).map(|r| (r, n / r)).collect();
        FrameRule::Unknown { shapes }
    }

    #[inline]
    pub fn fits(&self, h: usize, w: usize) -> bool {
        match self {
            FrameRule::Known { rows, cols } => h <= *rows && w <= *cols,
            FrameRule::Unknown { shapes } => shapes.iter().any(|&(r, c)| h <= r && w <= c),
        }
    }

    fn max_extent(&self) -> (usize, usize) {
        match self {
            FrameRule::Known { rows, cols } => (*rows, *cols),
            FrameRule::Unknown { shapes } => (
                shapes.iter().map(|s| s.0).max().unwrap_or(1),
                shapes.iter().map(|s| s.1).max().unwrap_or(1),
            ),
        }
    }
}

/// The most square `rows x cols` with area `n`, rows <= cols.
pub fn most_square(n: usize) -> (usize, usize) {
    let mut rows = 1;
    let mut r = 1;
    while r * r <= n {
        if n % r == 0 {
            rows = r;
        }
        r += 1;
    }
    (rows, n / rows.max(1))
}

/// One placed piece's side that faces an empty, legal cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreeEdge {
    pub anchor: usize,
    /// Side of the anchor facing the empty cell, in the kernel's frame.
    pub side: Edge,
    /// The anchor's original edge on that side.
    pub anchor_edge: Edge,
    /// The empty cell, board coordinates.
    pub cell: (i32, i32),
}

#[derive(Clone, Debug)]
pub struct Kernel {
    rule: FrameRule,
    height: usize,
    width: usize,
    board: Vec<u32>,
    pos: Vec<Option<(i32, i32, Rotation)>>,
    placed: Vec<usize>,
    frontier: Vec<usize>,
    // inclusive bounds
    min: (i32, i32),
    max: (i32, i32),
}

impl Kernel {
    pub fn new(n: usize, rule: FrameRule) -> Self {
        let (mr, mc) = rule.max_extent();
        let (height, width) = (2 * mr + 1, 2 * mc + 1);
        Kernel {
            rule,
            height,
            width,
            board: vec![EMPTY; height * width],
            pos: vec![None; n],
            placed: Vec::with_capacity(n),
            frontier: Vec::new(),
            min: (0, 0),
            max: (-1, -1),
        }
    }

    pub fn rule(&self) -> &FrameRule {
        &self.rule
    }

    /// Empties the kernel, touching only the cells that were used.
    pub fn reset(&mut self) {
        for &p in &self.placed {
            if let Some((r, c, _)) = self.pos[p].take() {
                let i = self.index(r, c);
                self.board[i] = EMPTY;
            }
        }
        self.placed.clear();
        self.frontier.clear();
        self.min = (0, 0);
        self.max = (-1, -1);
    }

    /// Board cell where the first piece goes.
    pub fn center(&self) -> (i32, i32) {
        ((self.height / 2) as i32, (self.width / 2) as i32)
    }

    #[inline]
    fn index(&self, r: i32, c: i32) -> usize {
        r as usize * self.width + c as usize
    }

    pub fn len(&self) -> usize {
        self.placed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placed.is_empty()
    }

    pub fn piece_count(&self) -> usize {
        self.pos.len()
    }

    pub fn is_complete(&self) -> bool {
        self.placed.len() == self.pos.len()
    }

    #[inline]
    pub fn is_placed(&self, piece: usize) -> bool {
        self.pos[piece].is_some()
    }

    pub fn position(&self, piece: usize) -> Option<(i32, i32, Rotation)> {
        self.pos[piece]
    }

    pub fn at(&self, cell: (i32, i32)) -> Option<usize> {
        let (r, c) = cell;
        if r < 0 || c < 0 || r as usize >= self.height || c as usize >= self.width {
            return None;
        }
        let v = self.board[self.index(r, c)];
        (v != EMPTY).then_some(v as usize)
    }

    pub fn bounding_box(&self) -> (usize, usize) {
        if self.placed.is_empty() {
            (0, 0)
        } else {
            (
                (self.max.0 - self.min.0 + 1) as usize,
                (self.max.1 - self.min.1 + 1) as usize,
            )
        }
    }

    /// Whether `cell` is empty and placing there keeps the frame rule.
    pub fn is_legal(&self, cell: (i32, i32)) -> bool {
        let (r, c) = cell;
        if r < 0 || c < 0 || r as usize >= self.height || c as usize >= self.width {
            return false;
        }
        if self.board[self.index(r, c)] != EMPTY {
            return false;
        }
        if self.placed.is_empty() {
            return true;
        }
        let h = (self.max.0.max(r) - self.min.0.min(r) + 1) as usize;
        let w = (self.max.1.max(c) - self.min.1.min(c) + 1) as usize;
        self.rule.fits(h, w)
    }

    /// Places `piece`. The caller guarantees the move is legal.
    pub fn place(&mut self, piece: usize, cell: (i32, i32), rot: Rotation) {
        debug_assert!(!self.is_placed(piece), "piece {piece} placed twice");
        debug_assert!(self.is_legal(cell), "illegal cell {cell:?}");
        let i = self.index(cell.0, cell.1);
        self.board[i] = piece as u32;
        self.pos[piece] = Some((cell.0, cell.1, rot));
        if self.placed.is_empty() {
            self.min = cell;
            self.max = cell;
        } else {
            self.min = (self.min.0.min(cell.0), self.min.1.min(cell.1));
            self.max = (self.max.0.max(cell.0), self.max.1.max(cell.1));
        }
        self.placed.push(piece);
        self.frontier.push(piece);
    }

    /// All free edges, sorted row-major by the empty cell and then by the
    /// direction (top, right, bottom, left) from that cell to the anchor.
    pub fn free_edges(&mut self, out: &mut Vec<FreeEdge>) {
        out.clear();
        let mut keep = 0;
        for k in 0..self.frontier.len() {
            let p = self.frontier[k];
            let (r, c, rot) = self.pos[p].expect("frontier pieces are placed");
            // Illegal cells never become legal again: the box only grows.
            let mut open = false;
            for side in Edge::ALL {
                let (dr, dc) = side.offset();
                let cell = (r + dr, c + dc);
                if self.is_legal(cell) {
                    open = true;
                    out.push(FreeEdge {
                        anchor: p,
                        side,
                        anchor_edge: Edge::facing(side, rot),
                        cell,
                    });
                }
            }
            if open {
                self.frontier[keep] = p;
                keep += 1;
            }
        }
        self.frontier.truncate(keep);
        out.sort_unstable_by_key(|f| (f.cell.0, f.cell.1, f.side.opposite().index()));
    }

    /// The completed kernel as an arrangement anchored at (0, 0).
    pub fn to_arrangement(&self) -> Option<Arrangement> {
        if !self.is_complete() {
            return None;
        }
        let (h, w) = self.bounding_box();
        let cells = self
            .pos
            .iter()
            .map(|p| {
                p.map(|(r, c, rot)| {
                    Placement::new((r - self.min.0) as usize, (c - self.min.1) as usize, rot)
                })
            })
            .collect();
        let a = Arrangement::new(h, w, cells).ok()?;
        a.is_complete().then_some(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn most_square_shapes() {
        assert_eq!(most_square(12), (3, 4));
        assert_eq!(most_square(150), (10, 15));
        assert_eq!(most_square(13), (1, 13));
        assert_eq!(most_square(16), (4, 4));
    }

    #[test]
    fn unknown_rule_tracks_divisors() {
        let r = FrameRule::unknown(6);
        assert!(r.fits(2, 3) && r.fits(3, 2) && r.fits(1, 6) && r.fits(6, 1));
        assert!(!r.fits(3, 3));
        assert!(!r.fits(2, 4));
    }

    #[test]
    fn known_rule_blocks_growth_past_frame() {
        let mut k = Kernel::new(4, FrameRule::known(1, 4));
        let c = k.center();
        k.place(0, c, Rotation::R0);
        let mut free = Vec::new();
        k.free_edges(&mut free);
        // only left and right are legal in a single row
        assert_eq!(free.len(), 2);
        assert!(free
            .iter()
            .all(|f| f.side == Edge::Left || f.side == Edge::Right));
        k.place(1, (c.0, c.1 + 1), Rotation::R0);
        k.place(2, (c.0, c.1 + 2), Rotation::R0);
        k.place(3, (c.0, c.1 + 3), Rotation::R0);
        k.free_edges(&mut free);
        assert!(free.is_empty());
        let a = k.to_arrangement().unwrap();
        assert_eq!((a.rows(), a.cols()), (1, 4));
        assert_eq!(a.placement(2).unwrap().col, 2);
    }

    #[test]
    fn free_edges_are_row_major() {
        let mut k = Kernel::new(9, FrameRule::known(3, 3));
        let c = k.center();
        k.place(0, c, Rotation::R90);
        let mut free = Vec::new();
        k.free_edges(&mut free);
        let cells: Vec<_> = free.iter().map(|f| f.cell).collect();
        assert_eq!(
            cells,
            vec![
                (c.0 - 1, c.1),
                (c.0, c.1 - 1),
                (c.0, c.1 + 1),
                (c.0 + 1, c.1)
            ]
        );
        // rotated anchor: the top-facing side is its original left edge
        assert_eq!(free[0].anchor_edge, Edge::Left);
    }

    #[test]
    fn reset_clears_everything() {
        let mut k = Kernel::new(2, FrameRule::unknown(2));
        let c = k.center();
        k.place(0, c, Rotation::R0);
        k.place(1, (c.0 + 1, c.1), Rotation::R0);
        k.reset();
        assert!(k.is_empty());
        assert!(k.at(c).is_none() && k.at((c.0 + 1, c.1)).is_none());
        assert!(!k.is_placed(0));
    }
}
