//! Per-edge min-max normalization followed by mirror averaging.
//!
//! A ranking slice is everything one anchor edge is compared against: the
//! single upright relation for Type-1, all four candidate edges for Type-2.
//! Self-pairs never take part and end up at 0.

use log::debug;

use crate::error::{Error, Result};
use crate::model::{CompatibilityTensor, Edge, Relation};

#[derive(Clone, Debug)]
pub struct Normalized {
    pub tensor: CompatibilityTensor,
    /// Slices whose scores were all equal and were therefore zeroed.
    pub degenerate_slices: usize,
}

/// Maps every (anchor piece, anchor edge) slice onto [0, 1].
///
/// On slices with a very wide range, plain rounding to f32 can merge two
/// different scores. Such values are pushed down one ulp at a time so that
/// the order within every slice survives exactly.
pub fn minmax_normalize(t: &CompatibilityTensor) -> Normalized {
    let n = t.n();
    let mut out = t.clone();
    let mut degenerate = 0;
    let mut entries: Vec<(f32, usize, usize)> = Vec::new();
    for a in 0..n {
        for e in Edge::ALL {
            entries.clear();
            for r in t.slice_relations(e) {
                for b in 0..n {
                    out.set(a, r, b, 0.0);
                    if b != a {
                        entries.push((t.get(a, r, b), r, b));
                    }
                }
            }
            let lo = entries
                .iter()
                .map(|x| x.0 as f64)
                .fold(f64::INFINITY, f64::min);
            let hi = entries
                .iter()
                .map(|x| x.0 as f64)
                .fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            if span.is_nan() || span <= 0.0 {
                degenerate += 1;
                continue;
            }
            entries.sort_by(|x, y| y.0.total_cmp(&x.0));
            let mut prev: Option<(f32, f32)> = None;
            for &(v, r, b) in &entries {
                let mut s = ((v as f64 - lo) / span) as f32;
                if let Some((pv, ps)) = prev {
                    if v == pv {
                        s = ps;
                    } else if s >= ps {
                        s = next_below(ps);
                    }
                }
                out.set(a, r, b, s);
                prev = Some((v, s));
            }
        }
    }
    if degenerate > 0 {
        debug!("min-max normalization: {degenerate} degenerate slices zeroed");
    }
    out.normalized = true;
    out.symmetric = false;
    Normalized {
        tensor: out,
        degenerate_slices: degenerate,
    }
}

fn next_below(x: f32) -> f32 {
    if x > 0.0 {
        f32::from_bits(x.to_bits() - 1)
    } else {
        0.0
    }
}

/// Replaces each entry and its mirror (pieces swapped, edges swapped) by
/// their mean.
pub fn symmetrize(t: &CompatibilityTensor) -> Result<CompatibilityTensor> {
    if !t.normalized {
        return Err(Error::NotNormalized);
    }
    let n = t.n();
    let pt = t.puzzle_type();
    let mut out = t.clone();
    for (ri, rel) in pt.relations().into_iter().enumerate() {
        let mi = pt
            .relation_index(rel.mirror())
            .expect("relation sets are closed under mirroring");
        for a in 0..n {
            for b in 0..n {
                // visit each unordered entry pair once
                if (a, ri) > (b, mi) {
                    continue;
                }
                let mean = ((t.get(a, ri, b) as f64 + t.get(b, mi, a) as f64) / 2.0) as f32;
                out.set(a, ri, b, mean);
                out.set(b, mi, a, mean);
            }
        }
    }
    out.symmetric = true;
    Ok(out)
}

/// Normalize then symmetrize.
pub fn postprocess(t: &CompatibilityTensor) -> Result<CompatibilityTensor> {
    symmetrize(&minmax_normalize(t).tensor)
}

/// Exhaustive mirror check, exact equality.
pub fn is_mirror_symmetric(t: &CompatibilityTensor) -> bool {
    let n = t.n();
    let pt = t.puzzle_type();
    pt.relations().into_iter().enumerate().all(|(ri, rel)| {
        let mi = pt
            .relation_index(Relation::new(rel.candidate, rel.anchor))
            .unwrap();
        (0..n).all(|a| (0..n).all(|b| t.get(a, ri, b) == t.get(b, mi, a)))
    })
}
