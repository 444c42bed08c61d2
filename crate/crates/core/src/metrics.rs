//! Solution quality and compatibility-ranking measures, plus image exports.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::fitness;
use crate::model::{
    Arrangement, CompatibilityTensor, Edge, GroundTruth, PuzzleType, Raster, Relation,
};

fn same_pieces(a: &Arrangement, gt: &GroundTruth) -> Result<()> {
    if a.len() != gt.len() {
        return Err(Error::ShapeMismatch(format!(
            "arrangement has {} pieces, ground truth {}",
            a.len(),
            gt.len()
        )));
    }
    Ok(())
}

/// Fraction of ground-truth boundaries that `a` reproduces. Boundaries are
/// compared in the pieces' own frames, so both the neighbor and the touching
/// edges must match. Type-2 arrangements are scored at each of the four
/// global rotations and the best is kept.
pub fn neighbor_accuracy(
    a: &Arrangement,
    gt: &GroundTruth,
    puzzle_type: PuzzleType,
) -> Result<f64> {
    same_pieces(a, gt)?;
    let truth = gt.arrangement().adjacency_set()?;
    if truth.is_empty() {
        return Ok(1.0);
    }
    let score = |x: &Arrangement| -> Result<f64> {
        let hits = x.adjacency_set()?.intersection(&truth).count();
        Ok(hits as f64 / truth.len() as f64)
    };
    match puzzle_type {
        PuzzleType::Type1 => score(a),
        PuzzleType::Type2 => {
            let mut best = 0.0f64;
            let mut cur = a.clone();
            for _ in 0..4 {
                best = best.max(score(&cur)?);
                cur = cur.rotate_cw();
            }
            Ok(best)
        }
    }
}

/// Ranking hits of one puzzle: `hits[i]` boundaries had their true neighbor
/// within the top `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopICounts {
    pub boundaries: usize,
    pub hits: Vec<usize>,
}

impl TopICounts {
    pub fn fractions(&self) -> Vec<f64> {
        self.hits
            .iter()
            .map(|&h| {
                if self.boundaries == 0 {
                    0.0
                } else {
                    h as f64 / self.boundaries as f64
                }
            })
            .collect()
    }
}

/// Rank of every directed ground-truth boundary's true neighbor among all
/// candidate (piece, edge) pairs of that edge, self excluded. Ties count
/// against the true neighbor.
pub fn true_neighbor_ranks(t: &CompatibilityTensor, gt: &GroundTruth) -> Result<Vec<usize>> {
    if t.n() != gt.len() {
        return Err(Error::ShapeMismatch(format!(
            "tensor covers {} pieces, ground truth {}",
            t.n(),
            gt.len()
        )));
    }
    let mut ranks = Vec::new();
    for adj in gt.arrangement().adjacent_pairs()? {
        for (a, ae, b, be) in [
            (adj.a, adj.a_edge, adj.b, adj.b_edge),
            (adj.b, adj.b_edge, adj.a, adj.a_edge),
        ] {
            let truth = t.score(a, ae, b, be).ok_or_else(|| {
                Error::InvalidBundle("ground truth boundary not covered by the tensor".into())
            })?;
            let rank = t.candidates(a, ae).filter(|&(_, _, s)| s >= truth).count();
            ranks.push(rank);
        }
    }
    Ok(ranks)
}

pub fn top_i_counts(t: &CompatibilityTensor, gt: &GroundTruth, i_max: usize) -> Result<TopICounts> {
    let ranks = true_neighbor_ranks(t, gt)?;
    let mut hits = vec![0usize; i_max];
    for r in &ranks {
        for h in hits.iter_mut().skip(r - 1) {
            *h += 1;
        }
    }
    Ok(TopICounts {
        boundaries: ranks.len(),
        hits,
    })
}

/// `[Top-1, ..., Top-i_max]` over the boundaries that have a true neighbor.
pub fn top_i(t: &CompatibilityTensor, gt: &GroundTruth, i_max: usize) -> Result<Vec<f64>> {
    Ok(top_i_counts(t, gt, i_max)?.fractions())
}

/// Top-i over several puzzles, weighted by boundary count.
pub fn aggregate_top_i(parts: &[TopICounts]) -> Vec<f64> {
    let len = parts.iter().map(|p| p.hits.len()).max().unwrap_or(0);
    let total = TopICounts {
        boundaries: parts.iter().map(|p| p.boundaries).sum(),
        hits: (0..len)
            .map(|i| {
                parts
                    .iter()
                    .map(|p| p.hits.get(i).copied().unwrap_or(0))
                    .sum()
            })
            .collect(),
    };
    total.fractions()
}

/// Per cell, the mean score of that piece over its neighbors; `[row][col]`.
pub fn local_fitness_grid(a: &Arrangement, t: &CompatibilityTensor) -> Result<Vec<Vec<f64>>> {
    let mut sum = vec![vec![0.0f64; a.cols()]; a.rows()];
    let mut count = vec![vec![0u32; a.cols()]; a.rows()];
    for adj in a.adjacent_pairs()? {
        let s = t.adjacency_score(&adj)? as f64;
        for piece in [adj.a, adj.b] {
            let p = a.placement(piece).expect("complete");
            sum[p.row][p.col] += s;
            count[p.row][p.col] += 1;
        }
    }
    for (srow, crow) in sum.iter_mut().zip(&count) {
        for (s, &c) in srow.iter_mut().zip(crow) {
            if c > 0 {
                *s /= c as f64;
            }
        }
    }
    Ok(sum)
}

/// `n x n` scores of one relation with pieces in ground-truth row-major order.
/// The relation is read in the upright frame of the solved image.
pub fn score_matrix(t: &CompatibilityTensor, gt: &GroundTruth, rel: Relation) -> Result<Vec<f32>> {
    if t.puzzle_type() == PuzzleType::Type1 && rel.candidate != rel.anchor.opposite() {
        return Err(Error::InvalidConfig(format!(
            "known-orientation tensors only score {} against {}",
            rel.anchor,
            rel.anchor.opposite()
        )));
    }
    if t.n() != gt.len() {
        return Err(Error::ShapeMismatch(
            "tensor and ground truth differ in size".into(),
        ));
    }
    let order = gt.row_major_order();
    let n = order.len();
    let mut m = vec![0.0f32; n * n];
    for (i, &a) in order.iter().enumerate() {
        let ae = Edge::facing(rel.anchor, gt.cells[a].rot);
        for (j, &b) in order.iter().enumerate() {
            let be = Edge::facing(rel.candidate, gt.cells[b].rot);
            m[i * n + j] = t.score(a, ae, b, be).expect("relation checked");
        }
    }
    Ok(m)
}

/// Linear map of `values` onto 0..=255 by their own min and max; constant
/// input maps to 0.
pub fn rescale_to_gray(values: &[f32], width: usize, height: usize) -> Raster {
    let (lo, hi) = values
        .iter()
        .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    let data = values
        .iter()
        .map(|&v| {
            if span > 0.0 {
                ((v - lo) / span * 255.0).round() as u8
            } else {
                0
            }
        })
        .collect();
    Raster::from_vec(width, height, 1, data).expect("sized by caller")
}

pub fn score_map(t: &CompatibilityTensor, gt: &GroundTruth, rel: Relation) -> Result<Raster> {
    let m = score_matrix(t, gt, rel)?;
    Ok(rescale_to_gray(&m, gt.len(), gt.len()))
}

/// Local-fitness grid as gray blocks of `cell` pixels, 0..1 mapped to 0..255.
pub fn local_fitness_image(grid: &[Vec<f64>], cell: usize) -> Raster {
    let rows = grid.len();
    let cols = grid.first().map_or(0, Vec::len);
    let mut out = Raster::new(cols * cell, rows * cell, 1);
    for (r, row) in grid.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let g = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
            for y in 0..cell {
                for x in 0..cell {
                    out.set(r * cell + y, c * cell + x, 0, g);
                }
            }
        }
    }
    out
}

/// Binary PGM (P5) of a single-channel raster.
pub fn write_pgm<W: Write>(r: &Raster, mut w: W) -> std::io::Result<()> {
    if r.channels != 1 {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "PGM needs one channel",
        ));
    }
    write!(w, "P5\n{} {}\n255\n", r.width, r.height)?;
    w.write_all(&r.data)?;
    w.flush()
}

/// Writes PGM for `.pgm` paths and PNG otherwise.
pub fn save_gray(r: &Raster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
    {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        write_pgm(r, std::io::BufWriter::new(f)).map_err(|e| Error::io(path, e))
    } else {
        crate::dataset::save_png(r, path)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub neighbor_accuracy: f64,
    pub perfect: bool,
    /// `top_i[k]` is Top-(k + 1).
    pub top_i: Vec<f64>,
    pub fitness: Option<f64>,
    pub ground_truth_fitness: Option<f64>,
    /// `(gt - solved) / |gt| * 100`; negative when the solution beats the
    /// ground truth under these scores.
    pub fitness_gap_percent: Option<f64>,
    pub local_fitness: Option<Vec<Vec<f64>>>,
}

impl EvalReport {
    pub fn evaluate(
        a: &Arrangement,
        gt: &GroundTruth,
        puzzle_type: PuzzleType,
        scores: Option<&CompatibilityTensor>,
        i_max: usize,
    ) -> Result<Self> {
        let acc = neighbor_accuracy(a, gt, puzzle_type)?;
        let mut report = EvalReport {
            neighbor_accuracy: acc,
            perfect: acc == 1.0,
            top_i: Vec::new(),
            fitness: None,
            ground_truth_fitness: None,
            fitness_gap_percent: None,
            local_fitness: None,
        };
        if let Some(t) = scores {
            let f = fitness(a, t)?;
            let g = fitness(&gt.arrangement(), t)?;
            report.top_i = top_i(t, gt, i_max)?;
            report.fitness = Some(f);
            report.ground_truth_fitness = Some(g);
            report.fitness_gap_percent = (g != 0.0).then(|| (g - f) / g.abs() * 100.0);
            report.local_fitness = Some(local_fitness_grid(a, t)?);
        }
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One `key=value` line per scalar.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "neighbor_accuracy={}\nperfect={}\n",
            self.neighbor_accuracy, self.perfect
        );
        for (k, v) in self.top_i.iter().enumerate() {
            s += &format!("top_{}={}\n", k + 1, v);
        }
        for (key, v) in [
            ("fitness", self.fitness),
            ("ground_truth_fitness", self.ground_truth_fitness),
            ("fitness_gap_percent", self.fitness_gap_percent),
        ] {
            if let Some(v) = v {
                s += &format!("{key}={v}\n");
            }
        }
        s
    }
}

/// Unordered pairs of cells that are grid neighbors.
pub fn grid_neighbors(rows: usize, cols: usize) -> HashSet<((usize, usize), (usize, usize))> {
    let mut out = HashSet::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                out.insert(((r, c), (r, c + 1)));
            }
            if r + 1 < rows {
                out.insert(((r, c), (r + 1, c)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Placement, Rotation};

    fn row_gt(n: usize) -> GroundTruth {
        GroundTruth::new(
            1,
            n,
            (0..n).map(|i| Placement::new(0, i, Rotation::R0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn reversed_row_scores_zero() {
        let gt = row_gt(3);
        let a = Arrangement::from_order(1, 3, &[2, 1, 0], &[]).unwrap();
        assert_eq!(neighbor_accuracy(&a, &gt, PuzzleType::Type1).unwrap(), 0.0);
        assert_eq!(
            neighbor_accuracy(&gt.arrangement(), &gt, PuzzleType::Type1).unwrap(),
            1.0
        );
    }

    #[test]
    fn diagonal_swap_scores_zero() {
        let gt = GroundTruth::new(
            2,
            2,
            vec![
                Placement::new(0, 0, Rotation::R0),
                Placement::new(0, 1, Rotation::R0),
                Placement::new(1, 0, Rotation::R0),
                Placement::new(1, 1, Rotation::R0),
            ],
        )
        .unwrap();
        let a = Arrangement::from_order(2, 2, &[3, 1, 2, 0], &[]).unwrap();
        assert_eq!(neighbor_accuracy(&a, &gt, PuzzleType::Type1).unwrap(), 0.0);
    }

    #[test]
    fn type2_global_rotation_ignored() {
        let gt = GroundTruth::new(
            2,
            3,
            (0..6)
                .map(|i| Placement::new(i / 3, i % 3, Rotation::R0))
                .collect(),
        )
        .unwrap();
        let turned = gt.arrangement().rotate_cw();
        assert_eq!(
            neighbor_accuracy(&turned, &gt, PuzzleType::Type2).unwrap(),
            1.0
        );
    }

    #[test]
    fn hand_built_ranks() {
        // 1x3 row a b c; four directed boundaries
        let gt = row_gt(3);
        let mut t = CompatibilityTensor::zeros(3, PuzzleType::Type1);
        let r = Edge::Right.index();
        let l = Edge::Left.index();
        t.set(0, r, 1, 0.9);
        t.set(1, l, 0, 0.9);
        t.set(1, r, 2, 0.9);
        // c's left edge prefers a over its true neighbor b
        t.set(2, l, 1, 0.5);
        t.set(2, l, 0, 0.8);
        let top = top_i(&t, &gt, 3).unwrap();
        assert_eq!(top, vec![0.75, 1.0, 1.0]);
    }

    #[test]
    fn local_grid_corner() {
        let mut t = CompatibilityTensor::zeros(4, PuzzleType::Type1);
        t.scores_mut().fill(1.0);
        let a = Arrangement::from_order(2, 2, &[0, 1, 2, 3], &[]).unwrap();
        let g = local_fitness_grid(&a, &t).unwrap();
        assert_eq!(g, vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn pgm_header() {
        let r = Raster::from_vec(2, 1, 1, vec![0, 255]).unwrap();
        let mut buf = Vec::new();
        write_pgm(&r, &mut buf).unwrap();
        assert_eq!(buf, b"P5\n2 1\n255\n\x00\xff");
    }

    #[test]
    fn constant_tensor_flat_map() {
        let mut t = CompatibilityTensor::zeros(3, PuzzleType::Type1);
        t.scores_mut().fill(0.4);
        let img = score_map(&t, &row_gt(3), Relation::new(Edge::Right, Edge::Left)).unwrap();
        assert!(img.data.iter().all(|&v| v == 0));
    }
}
