//! Mahalanobis gradient compatibility.
//!
//! Each piece edge has a distribution of intensity gradients taken just inside
//! the boundary (outer line minus the line behind it). A candidate boundary is
//! scored by how unusual the gradients across the cut look under that
//! distribution, from both sides.

use nalgebra::DMatrix;

/// Added to the covariance diagonal before inversion.
pub const COVARIANCE_EPSILON: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct GradientStats {
    pub mean: Vec<f64>,
    pub inv_cov: DMatrix<f64>,
}

impl GradientStats {
    /// `outer` and `inner` are interleaved lines of equal length with
    /// `channels` values per pixel.
    pub fn from_lines(outer: &[u8], inner: &[u8], channels: usize) -> Self {
        let c = channels;
        let mut samples: Vec<Vec<f64>> = outer
            .chunks_exact(c)
            .zip(inner.chunks_exact(c))
            .map(|(o, i)| {
                o.iter()
                    .zip(i)
                    .map(|(&o, &i)| o as f64 - i as f64)
                    .collect()
            })
            .collect();

        // Dummy gradients keep flat edges from producing a singular covariance.
        samples.push(vec![0.0; c]);
        for k in 0..c {
            for sign in [1.0, -1.0] {
                let mut v = vec![0.0; c];
                v[k] = sign;
                samples.push(v);
            }
        }

        let m = samples.len() as f64;
        let mut mean = vec![0.0; c];
        for s in &samples {
            for (acc, v) in mean.iter_mut().zip(s) {
                *acc += v;
            }
        }
        for v in &mut mean {
            *v /= m;
        }

        let mut cov = DMatrix::<f64>::zeros(c, c);
        for s in &samples {
            for i in 0..c {
                for j in 0..c {
                    cov[(i, j)] += (s[i] - mean[i]) * (s[j] - mean[j]);
                }
            }
        }
        cov /= m - 1.0;
        for i in 0..c {
            cov[(i, i)] += COVARIANCE_EPSILON;
        }
        let inv_cov = cov
            .clone()
            .try_inverse()
            .or_else(|| cov.pseudo_inverse(1e-12).ok())
            .unwrap_or_else(|| DMatrix::identity(c, c));
        GradientStats { mean, inv_cov }
    }

    /// Sum over pixels of the squared Mahalanobis distance of `to - from - mean`.
    pub fn distance(&self, from: &[u8], to: &[u8]) -> f64 {
        let c = self.mean.len();
        let mut d = vec![0.0; c];
        let mut total = 0.0;
        for (f, t) in from.chunks_exact(c).zip(to.chunks_exact(c)) {
            for k in 0..c {
                d[k] = t[k] as f64 - f[k] as f64 - self.mean[k];
            }
            for i in 0..c {
                let mut row = 0.0;
                for j in 0..c {
                    row += self.inv_cov[(i, j)] * d[j];
                }
                total += d[i] * row;
            }
        }
        total
    }
}

/// Symmetric score: anchor-side distribution judging the anchor-to-candidate
/// step plus candidate-side distribution judging the reverse step.
pub fn mgc(
    anchor_stats: &GradientStats,
    candidate_stats: &GradientStats,
    anchor_last: &[u8],
    candidate_first: &[u8],
) -> f64 {
    anchor_stats.distance(anchor_last, candidate_first)
        + candidate_stats.distance(candidate_first, anchor_last)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_edge_stays_invertible() {
        let line = vec![7u8; 30];
        let s = GradientStats::from_lines(&line, &line, 3);
        assert!(s.inv_cov.iter().all(|v| v.is_finite()));
        assert!(s.mean.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn smooth_continuation_beats_jump() {
        // A ramp that keeps rising by 2 per column across the cut.
        let inner: Vec<u8> = (0..10).flat_map(|r| [100 + r, 50, 20]).collect();
        let outer: Vec<u8> = inner
            .iter()
            .enumerate()
            .map(|(i, v)| if i % 3 == 0 { v + 2 } else { v + 1 })
            .collect();
        let s = GradientStats::from_lines(&outer, &inner, 3);
        let cont: Vec<u8> = outer
            .iter()
            .enumerate()
            .map(|(i, v)| if i % 3 == 0 { v + 2 } else { v + 1 })
            .collect();
        let jump: Vec<u8> = outer.iter().map(|v| v.saturating_add(40)).collect();
        assert!(s.distance(&outer, &cont) < s.distance(&outer, &jump));
    }
}
