//! Library results against deliberately naive re-implementations on many
//! small random instances.

mod common;

use common::naive::*;
use common::*;
use pf_core::compat::{dissimilarity, full_tensor};
use pf_core::ga::fitness;
use pf_core::metrics::neighbor_accuracy;
use pf_core::{CompatibilityTensor, MeasureKind, Piece, PuzzleBundle, PuzzleType, Relation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INSTANCES: u64 = 200;

#[test]
fn adjacent_pairs_match_cell_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..INSTANCES {
        let pt = if k % 2 == 0 {
            PuzzleType::Type1
        } else {
            PuzzleType::Type2
        };
        let inst = Instance::random(&mut rng, pt);
        let mut got: Vec<_> = inst
            .arrangement()
            .adjacent_pairs()
            .unwrap()
            .into_iter()
            .map(|p| (p.a, p.a_edge.index(), p.b, p.b_edge.index()))
            .collect();
        let mut want = inst.pairs();
        assert_eq!(
            got.len(),
            inst.rows * (inst.cols - 1) + inst.cols * (inst.rows - 1)
        );
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }
}

#[test]
fn fitness_matches_naive_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..INSTANCES {
        let pt = if k % 2 == 0 {
            PuzzleType::Type1
        } else {
            PuzzleType::Type2
        };
        let inst = Instance::random(&mut rng, pt);
        let t = random_tensor(inst.n(), pt, &mut rng);
        let want: f64 = inst
            .pairs()
            .iter()
            .map(|&(a, ae, b, be)| {
                t.scores()[(a * pt.relation_count() + relation_index(pt, ae, be)) * inst.n() + b]
                    as f64
            })
            .sum();
        let got = fitness(&inst.arrangement(), &t).unwrap();
        assert!(
            (got - want).abs() <= 1e-9 * want.abs().max(1.0),
            "{got} vs {want}"
        );
    }
}

#[test]
fn ssd_matches_pixel_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..INSTANCES {
        let p = rng.random_range(2..=8);
        let c = if rng.random_bool(0.5) { 3 } else { 1 };
        let (a, b) = (
            random_piece(&mut rng, 0, p, c),
            random_piece(&mut rng, 1, p, c),
        );
        for ae in 0..4 {
            for be in 0..4 {
                let d = dissimilarity(
                    MeasureKind::SsdRgb,
                    &a,
                    &b,
                    Relation::new(edge(ae), edge(be)),
                    0,
                )
                .unwrap();
                assert_eq!(
                    d,
                    naive_ssd(&a.pixels, &b.pixels, ae, be) as f64,
                    "P={p} C={c} {ae}->{be}"
                );
            }
        }
    }
}

#[test]
fn ssd_tensor_matches_pixel_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..20 {
        let pt = if k % 2 == 0 {
            PuzzleType::Type1
        } else {
            PuzzleType::Type2
        };
        let n = rng.random_range(2..=9);
        let p = rng.random_range(2..=6);
        let pieces: Vec<Piece> = (0..n).map(|id| random_piece(&mut rng, id, p, 3)).collect();
        let bundle = PuzzleBundle::new(pieces, pt, None, None, 0).unwrap();
        let t: CompatibilityTensor = full_tensor(MeasureKind::SsdRgb, &bundle, 0).unwrap();
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                for ae in 0..4 {
                    for be in 0..4 {
                        if pt == PuzzleType::Type1 && be != (ae + 2) % 4 {
                            continue;
                        }
                        let want =
                            -(naive_ssd(&bundle.pieces[a].pixels, &bundle.pieces[b].pixels, ae, be)
                                as f64);
                        let got = t.get(a, relation_index(pt, ae, be), b);
                        assert_eq!(got, want as f32);
                    }
                }
            }
        }
    }
}

#[test]
fn neighbor_accuracy_matches_pair_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..INSTANCES {
        let pt = if k % 2 == 0 {
            PuzzleType::Type1
        } else {
            PuzzleType::Type2
        };
        let gt = Instance::random(&mut rng, pt);
        // a partly disturbed copy: swap a few cells, turn a few pieces
        let mut sol = Instance {
            rows: gt.rows,
            cols: gt.cols,
            grid: gt.grid.clone(),
        };
        for _ in 0..rng.random_range(0..3) {
            let (i, j) = (rng.random_range(0..sol.n()), rng.random_range(0..sol.n()));
            sol.grid.swap(i, j);
            if pt == PuzzleType::Type2 {
                sol.grid[i].1 = rng.random_range(0..4);
            }
        }
        let mut want = naive_accuracy(&sol, &gt);
        if pt == PuzzleType::Type2 {
            // also present the solution turned, as a solver might return it
            for _ in 0..rng.random_range(0..4) {
                sol = sol.turned();
            }
            let mut s = sol.turned();
            want = naive_accuracy(&sol, &gt);
            for _ in 0..3 {
                want = want.max(naive_accuracy(&s, &gt));
                s = s.turned();
            }
        }
        let got = neighbor_accuracy(
            &sol.arrangement(),
            &gt.arrangement().to_ground_truth().unwrap(),
            pt,
        )
        .unwrap();
        assert_eq!(got, want);
    }
}
