//! Domain types shared by every stage of the pipeline.
//!
//! Pixel data is never rotated in place. A [`Placement`] carries a quarter-turn
//! count and every consumer (edge extraction, rendering, adjacency) applies it
//! on the fly.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four sides of a square piece, in clockwise order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum Edge {
    Top = 0,
    Right = 1,
    Bottom = 2,
    Left = 3,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Top, Edge::Right, Edge::Bottom, Edge::Left];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Edge {
        Edge::ALL[i % 4]
    }

    #[inline]
    pub fn opposite(self) -> Edge {
        Edge::from_index(self.index() + 2)
    }

    /// Side that this (original-frame) edge faces after the piece is rotated.
    #[inline]
    pub fn rotated(self, rot: Rotation) -> Edge {
        Edge::from_index(self.index() + rot.quarters() as usize)
    }

    /// Original-frame edge that faces `side` once the piece is rotated by `rot`.
    #[inline]
    pub fn facing(side: Edge, rot: Rotation) -> Edge {
        Edge::from_index(side.index() + 4 - rot.quarters() as usize)
    }

    /// Grid step (row, col) from a cell towards its neighbor on this side.
    #[inline]
    pub fn offset(self) -> (i32, i32) {
        match self {
            Edge::Top => (-1, 0),
            Edge::Right => (0, 1),
            Edge::Bottom => (1, 0),
            Edge::Left => (0, -1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Edge::Top => "top",
            Edge::Right => "right",
            Edge::Bottom => "bottom",
            Edge::Left => "left",
        }
    }

    pub fn parse(s: &str) -> Option<Edge> {
        match s.to_ascii_lowercase().as_str() {
            "top" | "t" => Some(Edge::Top),
            "right" | "r" => Some(Edge::Right),
            "bottom" | "b" => Some(Edge::Bottom),
            "left" | "l" => Some(Edge::Left),
            _ => None,
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Clockwise rotation in quarter turns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rotation(u8);

impl Rotation {
    pub const R0: Rotation = Rotation(0);
    pub const R90: Rotation = Rotation(1);
    pub const R180: Rotation = Rotation(2);
    pub const R270: Rotation = Rotation(3);
    pub const ALL: [Rotation; 4] = [Rotation::R0, Rotation::R90, Rotation::R180, Rotation::R270];

    #[inline]
    pub fn from_quarters(q: u32) -> Rotation {
        Rotation((q % 4) as u8)
    }

    pub fn from_degrees(deg: u32) -> Option<Rotation> {
        (deg % 90 == 0 && deg < 360).then_some(Rotation((deg / 90) as u8))
    }

    #[inline]
    pub fn quarters(self) -> u8 {
        self.0
    }

    pub fn degrees(self) -> u32 {
        self.0 as u32 * 90
    }

    #[inline]
    pub fn then(self, other: Rotation) -> Rotation {
        Rotation((self.0 + other.0) % 4)
    }

    #[inline]
    pub fn inverse(self) -> Rotation {
        Rotation((4 - self.0) % 4)
    }

    /// Rotation that turns original edge `edge` to face `side`.
    #[inline]
    pub fn bringing(edge: Edge, side: Edge) -> Rotation {
        Rotation::from_quarters((side.index() + 4 - edge.index()) as u32)
    }
}

impl Serialize for Rotation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.degrees())
    }
}

impl<'de> Deserialize<'de> for Rotation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let deg = u32::deserialize(d)?;
        Rotation::from_degrees(deg).ok_or_else(|| {
            serde::de::Error::custom(format!("orientation {deg} is not 0/90/180/270"))
        })
    }
}

/// An (anchor edge, candidate edge) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub anchor: Edge,
    pub candidate: Edge,
}

impl Relation {
    pub fn new(anchor: Edge, candidate: Edge) -> Self {
        Relation { anchor, candidate }
    }

    /// The same physical boundary seen from the other piece.
    pub fn mirror(self) -> Self {
        Relation {
            anchor: self.candidate,
            candidate: self.anchor,
        }
    }

    /// True when the two edges meet without any relative rotation.
    pub fn is_upright(self) -> bool {
        self.candidate == self.anchor.opposite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum PuzzleType {
    /// Orientations known, locations unknown.
    Type1,
    /// Both locations and quarter-turn orientations unknown.
    Type2,
}

impl PuzzleType {
    pub fn relation_count(self) -> usize {
        match self {
            PuzzleType::Type1 => 4,
            PuzzleType::Type2 => 16,
        }
    }

    /// Relations in storage order. Type-1 is indexed by anchor edge, Type-2 by
    /// `4 * anchor + candidate`.
    pub fn relations(self) -> Vec<Relation> {
        match self {
            PuzzleType::Type1 => Edge::ALL
                .iter()
                .map(|&e| Relation::new(e, e.opposite()))
                .collect(),
            PuzzleType::Type2 => Edge::ALL
                .iter()
                .flat_map(|&a| Edge::ALL.iter().map(move |&c| Relation::new(a, c)))
                .collect(),
        }
    }

    #[inline]
    pub fn relation_index(self, rel: Relation) -> Option<usize> {
        match self {
            PuzzleType::Type1 => rel.is_upright().then_some(rel.anchor.index()),
            PuzzleType::Type2 => Some(4 * rel.anchor.index() + rel.candidate.index()),
        }
    }

    /// Candidate edges a given anchor edge is compared against.
    pub fn candidate_edges(self, anchor: Edge) -> &'static [Edge] {
        const OPP: [[Edge; 1]; 4] = [[Edge::Bottom], [Edge::Left], [Edge::Top], [Edge::Right]];
        match self {
            PuzzleType::Type1 => &OPP[anchor.index()],
            PuzzleType::Type2 => &Edge::ALL,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            PuzzleType::Type1 => 1,
            PuzzleType::Type2 => 2,
        }
    }
}

impl From<PuzzleType> for u8 {
    fn from(t: PuzzleType) -> u8 {
        t.code()
    }
}

impl TryFrom<u8> for PuzzleType {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(PuzzleType::Type1),
            2 => Ok(PuzzleType::Type2),
            other => Err(format!("puzzle type must be 1 or 2, got {other}")),
        }
    }
}

/// Interleaved 8-bit image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize, channels: usize) -> Self {
        Raster {
            width,
            height,
            channels,
            data: vec![0; width * height * channels],
        }
    }

    pub fn from_vec(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height * channels {
            return Err(Error::ShapeMismatch(format!(
                "{}x{}x{} raster needs {} bytes, got {}",
                width,
                height,
                channels,
                width * height * channels,
                data.len()
            )));
        }
        Ok(Raster {
            width,
            height,
            channels,
            data,
        })
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, ch: usize) -> u8 {
        self.data[(row * self.width + col) * self.channels + ch]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, ch: usize, v: u8) {
        self.data[(row * self.width + col) * self.channels + ch] = v;
    }

    /// Copy of the `h x w` window whose top-left corner is (`row`, `col`).
    pub fn crop(&self, row: usize, col: usize, h: usize, w: usize) -> Raster {
        let mut out = Raster::new(w, h, self.channels);
        let stride = w * self.channels;
        for r in 0..h {
            let src = ((row + r) * self.width + col) * self.channels;
            out.data[r * stride..(r + 1) * stride].copy_from_slice(&self.data[src..src + stride]);
        }
        out
    }

    /// Writes `src` with its top-left corner at (`row`, `col`).
    pub fn blit(&mut self, src: &Raster, row: usize, col: usize) {
        let stride = src.width * self.channels;
        for r in 0..src.height {
            let dst = ((row + r) * self.width + col) * self.channels;
            self.data[dst..dst + stride].copy_from_slice(&src.data[r * stride..(r + 1) * stride]);
        }
    }

    /// Pixel of the view obtained by rotating this (square) raster clockwise.
    #[inline]
    pub fn get_rotated(&self, row: usize, col: usize, ch: usize, rot: Rotation) -> u8 {
        let last = self.width - 1;
        let (r, c) = match rot.quarters() {
            0 => (row, col),
            1 => (last - col, row),
            2 => (last - row, last - col),
            _ => (col, last - row),
        };
        self.get(r, c, ch)
    }

    pub fn rotated(&self, rot: Rotation) -> Raster {
        if rot == Rotation::R0 {
            return self.clone();
        }
        debug_assert_eq!(self.width, self.height, "only square rasters rotate");
        let mut out = Raster::new(self.width, self.height, self.channels);
        for r in 0..self.height {
            for c in 0..self.width {
                for ch in 0..self.channels {
                    out.set(r, c, ch, self.get_rotated(r, c, ch, rot));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub id: usize,
    pub pixels: Raster,
}

impl Piece {
    pub fn new(id: usize, pixels: Raster) -> Self {
        Piece { id, pixels }
    }

    /// Side length `P` of a square piece (its width for strips).
    pub fn side(&self) -> usize {
        self.pixels.width
    }

    pub fn height(&self) -> usize {
        self.pixels.height
    }

    pub fn width(&self) -> usize {
        self.pixels.width
    }

    pub fn channels(&self) -> usize {
        self.pixels.channels
    }

    pub fn is_square(&self) -> bool {
        self.pixels.width == self.pixels.height
    }
}

/// Cell and orientation of one piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub row: usize,
    pub col: usize,
    #[serde(rename = "orientation")]
    pub rot: Rotation,
}

impl Placement {
    pub fn new(row: usize, col: usize, rot: Rotation) -> Self {
        Placement { row, col, rot }
    }
}

/// Where every piece belongs, and how far it must be turned clockwise to sit
/// upright there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Placement>,
}

impl GroundTruth {
    pub fn new(rows: usize, cols: usize, cells: Vec<Placement>) -> Result<Self> {
        // validates density and uniqueness
        Arrangement::new(rows, cols, cells.iter().copied().map(Some).collect())?
            .require_complete()?;
        Ok(GroundTruth { rows, cols, cells })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn arrangement(&self) -> Arrangement {
        Arrangement::new(
            self.rows,
            self.cols,
            self.cells.iter().copied().map(Some).collect(),
        )
        .expect("ground truth validated at construction")
    }

    /// Piece ids in row-major ground-truth order.
    pub fn row_major_order(&self) -> Vec<usize> {
        let mut order = vec![0; self.cells.len()];
        for (id, p) in self.cells.iter().enumerate() {
            order[p.row * self.cols + p.col] = id;
        }
        order
    }
}

#[derive(Clone, Debug)]
pub struct PuzzleBundle {
    pub pieces: Vec<Piece>,
    pub puzzle_type: PuzzleType,
    pub known_dims: Option<(usize, usize)>,
    pub ground_truth: Option<GroundTruth>,
    pub erosion_width: usize,
}

impl PuzzleBundle {
    pub fn new(
        pieces: Vec<Piece>,
        puzzle_type: PuzzleType,
        known_dims: Option<(usize, usize)>,
        ground_truth: Option<GroundTruth>,
        erosion_width: usize,
    ) -> Result<Self> {
        let bundle = PuzzleBundle {
            pieces,
            puzzle_type,
            known_dims,
            ground_truth,
            erosion_width,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidBundle(m));
        let Some(first) = self.pieces.first() else {
            return bad("no pieces".into());
        };
        let (h, w, c) = (first.height(), first.width(), first.channels());
        for (i, p) in self.pieces.iter().enumerate() {
            if p.id != i {
                return bad(format!(
                    "piece ids must be dense, found {} at index {i}",
                    p.id
                ));
            }
            if (p.height(), p.width(), p.channels()) != (h, w, c) {
                return bad(format!("piece {i} has a different shape from piece 0"));
            }
        }
        if self.puzzle_type == PuzzleType::Type2 && h != w {
            return bad("unknown-orientation puzzles need square pieces".into());
        }
        if let Some((r, cols)) = self.known_dims {
            if r * cols != self.pieces.len() {
                return bad(format!(
                    "dims {r}x{cols} do not hold {} pieces",
                    self.pieces.len()
                ));
            }
        }
        if 2 * self.erosion_width >= h.min(w) && self.erosion_width > 0 {
            return bad(format!("erosion width {} too large", self.erosion_width));
        }
        if let Some(gt) = &self.ground_truth {
            if gt.len() != self.pieces.len() {
                return bad("ground truth does not cover every piece".into());
            }
            if self.puzzle_type == PuzzleType::Type1
                && gt.cells.iter().any(|p| p.rot != Rotation::R0)
            {
                return bad("known-orientation ground truth must be upright".into());
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Side length of the (square) pieces.
    pub fn piece_size(&self) -> usize {
        self.pieces[0].side()
    }

    pub fn channels(&self) -> usize {
        self.pieces[0].channels()
    }

    pub fn ground_truth(&self) -> Result<&GroundTruth> {
        self.ground_truth.as_ref().ok_or(Error::MissingGroundTruth)
    }
}

/// One internal boundary of an arrangement: piece `a`'s original edge
/// `a_edge` touches piece `b`'s original edge `b_edge`. `a` is the left or
/// upper piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Adjacency {
    pub a: usize,
    pub a_edge: Edge,
    pub b: usize,
    pub b_edge: Edge,
}

impl Adjacency {
    /// Order-free key: the same boundary read from either side compares equal.
    pub fn key(&self) -> ((usize, Edge), (usize, Edge)) {
        let x = (self.a, self.a_edge);
        let y = (self.b, self.b_edge);
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }
}

/// Assignment of pieces to grid cells (a chromosome once complete).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    rows: usize,
    cols: usize,
    cells: Vec<Option<Placement>>,
    grid: Vec<Option<usize>>,
}

impl Arrangement {
    /// `cells[piece]` is that piece's placement, if placed.
    pub fn new(rows: usize, cols: usize, cells: Vec<Option<Placement>>) -> Result<Self> {
        let mut grid = vec![None; rows * cols];
        for (id, p) in cells.iter().enumerate() {
            let Some(p) = p else { continue };
            if p.row >= rows || p.col >= cols {
                return Err(Error::InvalidArrangement(format!(
                    "piece {id} at ({}, {}) outside {rows}x{cols}",
                    p.row, p.col
                )));
            }
            let slot = &mut grid[p.row * cols + p.col];
            if let Some(other) = slot {
                return Err(Error::InvalidArrangement(format!(
                    "pieces {other} and {id} share cell ({}, {})",
                    p.row, p.col
                )));
            }
            *slot = Some(id);
        }
        Ok(Arrangement {
            rows,
            cols,
            cells,
            grid,
        })
    }

    pub fn complete(rows: usize, cols: usize, cells: Vec<Placement>) -> Result<Self> {
        let a = Arrangement::new(rows, cols, cells.into_iter().map(Some).collect())?;
        a.require_complete()?;
        Ok(a)
    }

    /// Packs pieces row-major in the given order.
    pub fn from_order(
        rows: usize,
        cols: usize,
        order: &[usize],
        rots: &[Rotation],
    ) -> Result<Self> {
        let mut cells = vec![None; order.len()];
        for (k, &id) in order.iter().enumerate() {
            let rot = rots.get(k).copied().unwrap_or_default();
            *cells.get_mut(id).ok_or_else(|| {
                Error::InvalidArrangement(format!("piece id {id} out of range"))
            })? = Some(Placement::new(k / cols, k % cols, rot));
        }
        let a = Arrangement::new(rows, cols, cells)?;
        a.require_complete()?;
        Ok(a)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn placement(&self, piece: usize) -> Option<Placement> {
        self.cells.get(piece).copied().flatten()
    }

    pub fn placements(&self) -> &[Option<Placement>] {
        &self.cells
    }

    pub fn at(&self, row: usize, col: usize) -> Option<usize> {
        if row < self.rows && col < self.cols {
            self.grid[row * self.cols + col]
        } else {
            None
        }
    }

    pub fn is_complete(&self) -> bool {
        self.cells.len() == self.rows * self.cols && self.cells.iter().all(Option::is_some)
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::IncompleteArrangement)
        }
    }

    pub fn is_upright(&self) -> bool {
        self.cells.iter().flatten().all(|p| p.rot == Rotation::R0)
    }

    /// Adjacency across the boundary between two occupied cells, with edges
    /// expressed in each piece's original frame.
    #[inline]
    fn boundary(&self, upper_left: usize, other: usize, side: Edge) -> Adjacency {
        let pa = self.cells[upper_left].expect("occupied");
        let pb = self.cells[other].expect("occupied");
        Adjacency {
            a: upper_left,
            a_edge: Edge::facing(side, pa.rot),
            b: other,
            b_edge: Edge::facing(side.opposite(), pb.rot),
        }
    }

    /// Every internal horizontal and vertical boundary exactly once, row-major,
    /// right neighbor before bottom neighbor.
    pub fn adjacent_pairs(&self) -> Result<Vec<Adjacency>> {
        self.require_complete()?;
        let (r, c) = (self.rows, self.cols);
        let mut out = Vec::with_capacity(r * c.saturating_sub(1) + c * r.saturating_sub(1));
        for row in 0..r {
            for col in 0..c {
                let a = self.grid[row * c + col].expect("complete");
                if col + 1 < c {
                    let b = self.grid[row * c + col + 1].expect("complete");
                    out.push(self.boundary(a, b, Edge::Right));
                }
                if row + 1 < r {
                    let b = self.grid[(row + 1) * c + col].expect("complete");
                    out.push(self.boundary(a, b, Edge::Bottom));
                }
            }
        }
        Ok(out)
    }

    /// Boundaries as order-free keys.
    pub fn adjacency_set(&self) -> Result<HashSet<((usize, Edge), (usize, Edge))>> {
        Ok(self.adjacent_pairs()?.iter().map(Adjacency::key).collect())
    }

    /// The whole arrangement turned a quarter clockwise, each piece with it.
    pub fn rotate_cw(&self) -> Arrangement {
        let cells = self
            .cells
            .iter()
            .map(|p| {
                p.map(|p| Placement::new(p.col, self.rows - 1 - p.row, p.rot.then(Rotation::R90)))
            })
            .collect();
        Arrangement::new(self.cols, self.rows, cells).expect("rotation preserves validity")
    }

    pub fn to_ground_truth(&self) -> Result<GroundTruth> {
        self.require_complete()?;
        Ok(GroundTruth {
            rows: self.rows,
            cols: self.cols,
            cells: self.cells.iter().map(|p| p.expect("complete")).collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ArrangementRepr {
    rows: usize,
    cols: usize,
    cells: Vec<Placement>,
}

impl Serialize for Arrangement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.is_complete() {
            return Err(serde::ser::Error::custom("arrangement not complete"));
        }
        ArrangementRepr {
            rows: self.rows,
            cols: self.cols,
            cells: self.cells.iter().flatten().copied().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Arrangement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ArrangementRepr::deserialize(d)?;
        Arrangement::complete(r.rows, r.cols, r.cells).map_err(serde::de::Error::custom)
    }
}

/// Compatibility scores indexed by (anchor piece, relation, candidate piece).
///
/// Higher means more compatible. Self-pairs hold the minimum of their slice so
/// the array stays rectangular without ever ranking a piece against itself.
#[derive(Clone, Debug, PartialEq)]
pub struct CompatibilityTensor {
    n: usize,
    puzzle_type: PuzzleType,
    scores: Vec<f32>,
    pub normalized: bool,
    pub symmetric: bool,
}

impl CompatibilityTensor {
    pub fn zeros(n: usize, puzzle_type: PuzzleType) -> Self {
        CompatibilityTensor {
            n,
            puzzle_type,
            scores: vec![0.0; n * n * puzzle_type.relation_count()],
            normalized: false,
            symmetric: false,
        }
    }

    pub fn from_scores(n: usize, puzzle_type: PuzzleType, scores: Vec<f32>) -> Result<Self> {
        let want = n * n * puzzle_type.relation_count();
        if scores.len() != want {
            return Err(Error::ShapeMismatch(format!(
                "{n} pieces x {} relations needs {want} scores, got {}",
                puzzle_type.relation_count(),
                scores.len()
            )));
        }
        Ok(CompatibilityTensor {
            n,
            puzzle_type,
            scores,
            normalized: false,
            symmetric: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn puzzle_type(&self) -> PuzzleType {
        self.puzzle_type
    }

    pub fn relation_count(&self) -> usize {
        self.puzzle_type.relation_count()
    }

    pub fn relations(&self) -> Vec<Relation> {
        self.puzzle_type.relations()
    }

    pub fn scores(&self) -> &[f32] {
        &self.scores
    }

    pub fn scores_mut(&mut self) -> &mut [f32] {
        &mut self.scores
    }

    #[inline]
    fn offset(&self, anchor: usize, rel: usize, cand: usize) -> usize {
        (anchor * self.relation_count() + rel) * self.n + cand
    }

    #[inline]
    pub fn get(&self, anchor: usize, rel: usize, cand: usize) -> f32 {
        self.scores[self.offset(anchor, rel, cand)]
    }

    #[inline]
    pub fn set(&mut self, anchor: usize, rel: usize, cand: usize, v: f32) {
        let o = self.offset(anchor, rel, cand);
        self.scores[o] = v;
    }

    /// Score for `a`'s edge `ae` against `b`'s edge `be`, if this tensor's
    /// puzzle type has that relation.
    #[inline]
    pub fn score(&self, a: usize, ae: Edge, b: usize, be: Edge) -> Option<f32> {
        self.puzzle_type
            .relation_index(Relation::new(ae, be))
            .map(|r| self.get(a, r, b))
    }

    pub fn adjacency_score(&self, adj: &Adjacency) -> Result<f32> {
        self.score(adj.a, adj.a_edge, adj.b, adj.b_edge)
            .ok_or_else(|| {
                Error::ShapeMismatch(format!(
                    "relation ({}, {}) not present in a type-{} tensor",
                    adj.a_edge,
                    adj.b_edge,
                    self.puzzle_type.code()
                ))
            })
    }

    /// Scores of all candidates for one (anchor, relation).
    pub fn row(&self, anchor: usize, rel: usize) -> &[f32] {
        let o = self.offset(anchor, rel, 0);
        &self.scores[o..o + self.n]
    }

    /// Relation indices making up the ranking slice of one anchor edge.
    pub fn slice_relations(&self, anchor_edge: Edge) -> Vec<usize> {
        self.puzzle_type
            .candidate_edges(anchor_edge)
            .iter()
            .filter_map(|&c| {
                self.puzzle_type
                    .relation_index(Relation::new(anchor_edge, c))
            })
            .collect()
    }

    /// Candidate (piece, edge, score) triples of one anchor edge, self excluded.
    pub fn candidates(
        &self,
        anchor: usize,
        anchor_edge: Edge,
    ) -> impl Iterator<Item = (usize, Edge, f32)> + '_ {
        let pt = self.puzzle_type;
        pt.candidate_edges(anchor_edge).iter().flat_map(move |&ce| {
            let rel = pt
                .relation_index(Relation::new(anchor_edge, ce))
                .expect("valid");
            (0..self.n)
                .filter(move |&b| b != anchor)
                .map(move |b| (b, ce, self.get(anchor, rel, b)))
        })
    }
}
