//! Classical pairwise compatibility measures and the ground-truth oracle.
//!
//! Every measure here is a dissimilarity (lower = more compatible).
//! [`full_tensor`] negates them so the tensor reads "higher = better".
//!
//! Edge pixels are read as lines. A line runs along one edge at some depth
//! from the cut, traversed clockwise around the piece. Seen as an anchor, the
//! edge is turned to face right, so the line reads top to bottom. Seen as a
//! candidate, the edge is turned to face left and the line reads in reverse.

pub mod lab;
pub mod mgc;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CompatibilityTensor, Edge, Piece, PuzzleBundle, PuzzleType, Relation};
use mgc::GradientStats;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    SsdRgb,
    SsdLab,
    Mgc,
    /// Absolute error against a linear extrapolation of the neighbor.
    L1Asym,
    /// Squared error against a linear extrapolation of the neighbor. Stands in
    /// for prediction-based measures whose exact norm parameters vary.
    Prediction,
    Oracle,
    /// Scores produced outside this crate and loaded from a CMX file.
    External,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::SsdRgb => "ssd-rgb",
            MeasureKind::SsdLab => "ssd-lab",
            MeasureKind::Mgc => "mgc",
            MeasureKind::L1Asym => "l1",
            MeasureKind::Prediction => "prediction",
            MeasureKind::Oracle => "oracle",
            MeasureKind::External => "external",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "ssd-rgb" | "ssd" => MeasureKind::SsdRgb,
            "ssd-lab" => MeasureKind::SsdLab,
            "mgc" => MeasureKind::Mgc,
            "l1" | "l1-asym" => MeasureKind::L1Asym,
            "prediction" => MeasureKind::Prediction,
            "oracle" => MeasureKind::Oracle,
            "external" => MeasureKind::External,
            other => return Err(format!("unknown measure '{other}'")),
        })
    }
}

/// Pixels of one edge at `depth` lines in from the cut, clockwise order.
pub fn edge_line(piece: &Piece, edge: Edge, depth: usize) -> Vec<u8> {
    let px = &piece.pixels;
    let (h, w, c) = (px.height, px.width, px.channels);
    let mut out = Vec::with_capacity(h.max(w) * c);
    let mut push = |r: usize, col: usize| {
        let o = (r * w + col) * c;
        out.extend_from_slice(&px.data[o..o + c]);
    };
    match edge {
        Edge::Right => (0..h).for_each(|r| push(r, w - 1 - depth)),
        Edge::Top => (0..w).for_each(|col| push(depth, col)),
        Edge::Bottom => (0..w).rev().for_each(|col| push(h - 1 - depth, col)),
        Edge::Left => (0..h).rev().for_each(|r| push(r, depth)),
    }
    out
}

fn reversed(line: &[u8], channels: usize) -> Vec<u8> {
    line.chunks_exact(channels)
        .rev()
        .flatten()
        .copied()
        .collect()
}

/// The four lines a boundary measure can look at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryColumns {
    pub channels: usize,
    pub anchor_last: Vec<u8>,
    pub anchor_penultimate: Vec<u8>,
    pub candidate_first: Vec<u8>,
    pub candidate_second: Vec<u8>,
}

impl BoundaryColumns {
    pub fn extract(a: &Piece, b: &Piece, rel: Relation, skip_eroded: usize) -> Result<Self> {
        check_pair(a, b, rel, skip_eroded)?;
        let c = a.channels();
        Ok(BoundaryColumns {
            channels: c,
            anchor_last: edge_line(a, rel.anchor, skip_eroded),
            anchor_penultimate: edge_line(a, rel.anchor, skip_eroded + 1),
            candidate_first: reversed(&edge_line(b, rel.candidate, skip_eroded), c),
            candidate_second: reversed(&edge_line(b, rel.candidate, skip_eroded + 1), c),
        })
    }
}

/// Distance from the cut to the far side, for lines parallel to `edge`.
fn depth_span(p: &Piece, edge: Edge) -> usize {
    match edge {
        Edge::Left | Edge::Right => p.width(),
        Edge::Top | Edge::Bottom => p.height(),
    }
}

fn edge_len(p: &Piece, edge: Edge) -> usize {
    match edge {
        Edge::Left | Edge::Right => p.height(),
        Edge::Top | Edge::Bottom => p.width(),
    }
}

fn check_skip(side: usize, skip: usize) -> Result<()> {
    // Two lines must exist; beyond zero the pair must stay in the outer half.
    let ok = side >= 2 && (skip == 0 || skip + 1 < side / 2);
    if ok {
        Ok(())
    } else {
        Err(Error::SkipTooLarge { skip, side })
    }
}

fn check_pair(a: &Piece, b: &Piece, rel: Relation, skip: usize) -> Result<()> {
    if a.channels() != b.channels() {
        return Err(Error::ShapeMismatch(format!(
            "channel counts differ: {} vs {}",
            a.channels(),
            b.channels()
        )));
    }
    if edge_len(a, rel.anchor) != edge_len(b, rel.candidate) {
        return Err(Error::ShapeMismatch(format!(
            "edge lengths differ: {} vs {}",
            edge_len(a, rel.anchor),
            edge_len(b, rel.candidate)
        )));
    }
    check_skip(
        depth_span(a, rel.anchor).min(depth_span(b, rel.candidate)),
        skip,
    )
}

fn ssd(x: &[u8], y: &[u8]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&p, &q)| {
            let d = p as i64 - q as i64;
            d * d
        })
        .sum::<i64>() as f64
}

fn ssd_f(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// Error of `target` against `2 * last - penultimate`, summed with `norm`.
fn extrapolation_error(last: &[u8], penultimate: &[u8], target: &[u8], squared: bool) -> f64 {
    let mut total: i64 = 0;
    for ((&l, &p), &t) in last.iter().zip(penultimate).zip(target) {
        let d = t as i64 - (2 * l as i64 - p as i64);
        total += if squared { d * d } else { d.abs() };
    }
    total as f64
}

fn from_lines(
    kind: MeasureKind,
    cols: &BoundaryColumns,
    stats: Option<(&GradientStats, &GradientStats)>,
) -> Result<f64> {
    let c = cols.channels;
    Ok(match kind {
        MeasureKind::SsdRgb => ssd(&cols.anchor_last, &cols.candidate_first),
        MeasureKind::SsdLab => ssd_f(
            &lab::line_to_lab(&cols.anchor_last, c),
            &lab::line_to_lab(&cols.candidate_first, c),
        ),
        MeasureKind::Mgc => {
            let owned;
            let (sa, sb) = match stats {
                Some(s) => s,
                None => {
                    owned = (
                        GradientStats::from_lines(&cols.anchor_last, &cols.anchor_penultimate, c),
                        GradientStats::from_lines(&cols.candidate_first, &cols.candidate_second, c),
                    );
                    (&owned.0, &owned.1)
                }
            };
            mgc::mgc(sa, sb, &cols.anchor_last, &cols.candidate_first)
        }
        MeasureKind::L1Asym | MeasureKind::Prediction => {
            let sq = kind == MeasureKind::Prediction;
            extrapolation_error(
                &cols.anchor_last,
                &cols.anchor_penultimate,
                &cols.candidate_first,
                sq,
            ) + extrapolation_error(
                &cols.candidate_first,
                &cols.candidate_second,
                &cols.anchor_last,
                sq,
            )
        }
        MeasureKind::Oracle => return Err(Error::NotComputable("oracle")),
        MeasureKind::External => return Err(Error::NotComputable("external")),
    })
}

/// Dissimilarity of `a`'s edge `rel.anchor` against `b`'s edge `rel.candidate`.
///
/// `skip_eroded` moves the compared lines that many pixels in from the cut, so
/// zeroed erosion frames are not compared against each other.
pub fn dissimilarity(
    kind: MeasureKind,
    a: &Piece,
    b: &Piece,
    rel: Relation,
    skip_eroded: usize,
) -> Result<f64> {
    let cols = BoundaryColumns::extract(a, b, rel, skip_eroded)?;
    from_lines(kind, &cols, None)
}

/// Score 1 for every true boundary (both directions), 0 everywhere else.
pub fn oracle_tensor(bundle: &PuzzleBundle) -> Result<CompatibilityTensor> {
    let gt = bundle.ground_truth()?;
    let mut t = CompatibilityTensor::zeros(bundle.len(), bundle.puzzle_type);
    for adj in gt.arrangement().adjacent_pairs()? {
        let pt = bundle.puzzle_type;
        let fwd = pt.relation_index(Relation::new(adj.a_edge, adj.b_edge));
        let back = pt.relation_index(Relation::new(adj.b_edge, adj.a_edge));
        match (fwd, back) {
            (Some(f), Some(b)) => {
                t.set(adj.a, f, adj.b, 1.0);
                t.set(adj.b, b, adj.a, 1.0);
            }
            _ => {
                return Err(Error::InvalidBundle(
                    "ground truth adjacency not representable in this puzzle type".into(),
                ))
            }
        }
    }
    t.normalized = true;
    t.symmetric = true;
    Ok(t)
}

/// Per-(piece, edge) lines and statistics, computed once per tensor.
struct EdgeCache {
    channels: usize,
    /// `[piece * 4 + edge]` -> (depth-skip line, depth-skip+1 line), clockwise.
    lines: Vec<(Vec<u8>, Vec<u8>)>,
    reversed: Vec<(Vec<u8>, Vec<u8>)>,
    stats: Vec<Option<GradientStats>>,
}

impl EdgeCache {
    fn build(kind: MeasureKind, bundle: &PuzzleBundle, skip: usize) -> Self {
        let c = bundle.channels();
        let mut lines = Vec::with_capacity(bundle.len() * 4);
        let mut rev = Vec::with_capacity(bundle.len() * 4);
        let mut stats = Vec::with_capacity(bundle.len() * 4);
        for p in &bundle.pieces {
            for e in Edge::ALL {
                let l0 = edge_line(p, e, skip);
                let l1 = edge_line(p, e, skip + 1);
                stats.push(
                    (kind == MeasureKind::Mgc).then(|| GradientStats::from_lines(&l0, &l1, c)),
                );
                rev.push((reversed(&l0, c), reversed(&l1, c)));
                lines.push((l0, l1));
            }
        }
        EdgeCache {
            channels: c,
            lines,
            reversed: rev,
            stats,
        }
    }

    fn columns(&self, a: usize, ae: Edge, b: usize, be: Edge) -> BoundaryColumns {
        let (al, ap) = &self.lines[a * 4 + ae.index()];
        let (cf, cs) = &self.reversed[b * 4 + be.index()];
        BoundaryColumns {
            channels: self.channels,
            anchor_last: al.clone(),
            anchor_penultimate: ap.clone(),
            candidate_first: cf.clone(),
            candidate_second: cs.clone(),
        }
    }
}

fn fill_anchor(
    kind: MeasureKind,
    cache: &EdgeCache,
    pt: PuzzleType,
    n: usize,
    a: usize,
    out: &mut [f32],
) -> Result<()> {
    let rels = pt.relations();
    for (ri, rel) in rels.iter().enumerate() {
        for b in 0..n {
            if b == a {
                continue;
            }
            let d = match kind {
                MeasureKind::SsdRgb => {
                    // hot path: no line copies
                    let al = &cache.lines[a * 4 + rel.anchor.index()].0;
                    let cf = &cache.reversed[b * 4 + rel.candidate.index()].0;
                    ssd(al, cf)
                }
                MeasureKind::Mgc => {
                    let al = &cache.lines[a * 4 + rel.anchor.index()].0;
                    let cf = &cache.reversed[b * 4 + rel.candidate.index()].0;
                    let sa = cache.stats[a * 4 + rel.anchor.index()]
                        .as_ref()
                        .expect("mgc stats");
                    let sb = cache.stats[b * 4 + rel.candidate.index()]
                        .as_ref()
                        .expect("mgc stats");
                    mgc::mgc(sa, sb, al, cf)
                }
                _ => from_lines(kind, &cache.columns(a, rel.anchor, b, rel.candidate), None)?,
            };
            out[ri * n + b] = -d as f32;
        }
    }
    // Self-pairs take the minimum of their ranking slice.
    for e in Edge::ALL {
        let rel_ids: Vec<usize> = pt
            .candidate_edges(e)
            .iter()
            .filter_map(|&c| pt.relation_index(Relation::new(e, c)))
            .collect();
        let min = rel_ids
            .iter()
            .flat_map(|&r| (0..n).filter(|&b| b != a).map(move |b| r * n + b))
            .map(|i| out[i])
            .fold(f32::INFINITY, f32::min);
        let min = if min.is_finite() { min } else { 0.0 };
        for &r in &rel_ids {
            out[r * n + a] = min;
        }
    }
    Ok(())
}

/// Scores every ordered pair under every relation of the bundle's puzzle type.
pub fn full_tensor(
    kind: MeasureKind,
    bundle: &PuzzleBundle,
    skip_eroded: usize,
) -> Result<CompatibilityTensor> {
    match kind {
        MeasureKind::Oracle => return Err(Error::NotComputable("oracle")),
        MeasureKind::External => return Err(Error::NotComputable("external")),
        _ => {}
    }
    let n = bundle.len();
    let pt = bundle.puzzle_type;
    if let Some(p) = bundle.pieces.first() {
        for e in Edge::ALL {
            check_pair(p, p, Relation::new(e, e.opposite()), skip_eroded)?;
        }
    }
    let cache = EdgeCache::build(kind, bundle, skip_eroded);
    let mut t = CompatibilityTensor::zeros(n, pt);
    let stride = pt.relation_count() * n;
    if n == 0 {
        return Ok(t);
    }

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        t.scores_mut()
            .par_chunks_mut(stride)
            .enumerate()
            .try_for_each(|(a, out)| fill_anchor(kind, &cache, pt, n, a, out))?;
    }
    #[cfg(not(feature = "parallel"))]
    for (a, out) in t.scores_mut().chunks_mut(stride).enumerate() {
        fill_anchor(kind, &cache, pt, n, a, out)?;
    }
    Ok(t)
}

/// Total compatibility of a strip pair from its per-chunk scores.
pub fn strip_pair_score(score_chunks: &[f64]) -> Result<f64> {
    if score_chunks.is_empty() {
        return Err(Error::NoChunks);
    }
    Ok(score_chunks.iter().sum())
}

/// Scores a strip pair (`a` left of `b`) chunk by chunk with a classical
/// measure and sums the negated chunk dissimilarities.
pub fn chunked_strip_score(
    kind: MeasureKind,
    a: &Piece,
    b: &Piece,
    chunk: usize,
    skip_eroded: usize,
) -> Result<f64> {
    let ca = crate::dataset::chunk_strip(&a.pixels, chunk);
    let cb = crate::dataset::chunk_strip(&b.pixels, chunk);
    if ca.len() != cb.len() {
        return Err(Error::ShapeMismatch("strips differ in height".into()));
    }
    let scores = ca
        .into_iter()
        .zip(cb)
        .map(|(x, y)| {
            dissimilarity(
                kind,
                &Piece::new(a.id, x),
                &Piece::new(b.id, y),
                Relation::new(Edge::Right, Edge::Left),
                skip_eroded,
            )
            .map(|d| -d)
        })
        .collect::<Result<Vec<_>>>()?;
    strip_pair_score(&scores)
}
