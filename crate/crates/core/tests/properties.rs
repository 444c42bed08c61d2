mod common;

use common::naive::Instance;
use common::*;
use pf_core::cmx::{decode, encode, file_len};
use pf_core::compat::{dissimilarity, full_tensor};
use pf_core::dataset::{cut_and_scramble, erode, render};
use pf_core::ga::fitness;
use pf_core::metrics::{local_fitness_grid, neighbor_accuracy, top_i, true_neighbor_ranks};
use pf_core::postprocess::{is_mirror_symmetric, minmax_normalize, postprocess, symmetrize};
use pf_core::{
    Arrangement, CompatibilityTensor, Edge, GroundTruth, MeasureKind, Piece, Placement,
    PuzzleBundle, PuzzleType, Raster, Relation,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn puzzle_type(k: u64) -> PuzzleType {
    if k % 2 == 0 {
        PuzzleType::Type1
    } else {
        PuzzleType::Type2
    }
}

/// A random ground truth and a tensor on a coarse grid, so ties happen.
fn tensor_case(seed: u64) -> (CompatibilityTensor, GroundTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pt = puzzle_type(seed);
    let inst = Instance::random(&mut rng, pt);
    let n = inst.n();
    let levels = rng.random_range(2..64);
    let s = (0..n * n * pt.relation_count())
        .map(|_| rng.random_range(0..levels) as f32)
        .collect();
    let t = CompatibilityTensor::from_scores(n, pt, s).unwrap();
    (t, inst.arrangement().to_ground_truth().unwrap())
}

fn map_scores(t: &CompatibilityTensor, f: impl Fn(f32) -> f32) -> CompatibilityTensor {
    let s = t.scores().iter().map(|&v| f(v)).collect();
    CompatibilityTensor::from_scores(t.n(), t.puzzle_type(), s).unwrap()
}

/// Mirror entry: swap the pieces and the two edges.
fn mirror_ok(t: &CompatibilityTensor) -> bool {
    let n = t.n();
    let pt = t.puzzle_type();
    for a in 0..n {
        for b in 0..n {
            for rel in pt.relations() {
                let r = pt.relation_index(rel).unwrap();
                let m = pt.relation_index(rel.mirror()).unwrap();
                if t.get(a, r, b) != t.get(b, m, a) {
                    return false;
                }
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn top_i_is_monotone_and_rank_based(seed in any::<u64>()) {
        let (t, gt) = tensor_case(seed);
        let i_max = 4 * t.n();
        let base = top_i(&t, &gt, i_max).unwrap();
        prop_assert!(base.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(*base.last().unwrap(), 1.0);
        // integers stay exact in f32, so these maps are strictly increasing
        for f in [|v: f32| v * v * v + 3.0 * v - 7.0, |v: f32| 1000.0 - 1.0 / (v + 1.0) * 1024.0, |v: f32| v * 8.0 - 100.0] {
            let moved = top_i(&map_scores(&t, f), &gt, i_max).unwrap();
            prop_assert_eq!(&moved, &base);
        }
    }

    #[test]
    fn normalization_keeps_every_rank(seed in any::<u64>()) {
        let (t, gt) = tensor_case(seed);
        let norm = minmax_normalize(&t).tensor;
        prop_assert_eq!(true_neighbor_ranks(&norm, &gt).unwrap(), true_neighbor_ranks(&t, &gt).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn postprocess_normalizes_and_symmetrizes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = puzzle_type(seed);
        let n = rng.random_range(2..=10);
        let t = random_tensor(n, pt, &mut rng);
        let t = map_scores(&t, |v| -1000.0 * v);
        let norm = minmax_normalize(&t).tensor;
        for a in 0..n {
            for e in Edge::ALL {
                let raw: Vec<f32> = t.candidates(a, e).map(|(_, _, v)| v).collect();
                if raw.iter().all(|&v| v == raw[0]) {
                    // degenerate: nothing to tell apart, the slice is zeroed
                    prop_assert!(t.candidates(a, e).all(|(b, be, _)| norm.score(a, e, b, be) == Some(0.0)));
                    continue;
                }
                let vals: Vec<f32> = t
                    .candidates(a, e)
                    .map(|(b, be, _)| norm.score(a, e, b, be).unwrap())
                    .collect();
                let lo = vals.iter().copied().fold(f32::INFINITY, f32::min);
                let hi = vals.iter().copied().fold(f32::NEG_INFINITY, f32::max);
                prop_assert_eq!((lo, hi), (0.0, 1.0));
            }
        }
        let both = symmetrize(&norm).unwrap();
        prop_assert!(mirror_ok(&both));
        prop_assert!(is_mirror_symmetric(&both));
        prop_assert!(both.scores().iter().all(|v| (0.0..=1.0).contains(v)));
        let twice = symmetrize(&both).unwrap();
        prop_assert_eq!(twice.scores(), both.scores());
        prop_assert!(symmetrize(&t).is_err());
    }

    #[test]
    fn cmx_round_trip_is_bit_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = puzzle_type(seed);
        let n = rng.random_range(1..=12);
        let s = (0..n * n * pt.relation_count())
            .map(|_| f32::from_bits(rng.random::<u32>() & 0xbf7f_ffff))
            .collect();
        let t = CompatibilityTensor::from_scores(n, pt, s).unwrap();
        let bytes = encode(&t).unwrap();
        prop_assert_eq!(bytes.len(), file_len(n, pt.relation_count()));
        let back = decode(&bytes).unwrap();
        let bits = |t: &CompatibilityTensor| t.scores().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back), bits(&t));
        prop_assert_eq!(back.puzzle_type(), pt);
    }

    #[test]
    fn type2_board_turn_keeps_adjacencies(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = Instance::random(&mut rng, PuzzleType::Type2);
        let a = inst.arrangement();
        let turned = a.rotate_cw();
        prop_assert_eq!(turned.adjacency_set().unwrap(), a.adjacency_set().unwrap());
        prop_assert_eq!(turned, inst.turned().arrangement());
    }

    #[test]
    fn ground_truth_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = Instance::random(&mut rng, puzzle_type(seed));
        let gt = inst.arrangement().to_ground_truth().unwrap();
        prop_assert_eq!(gt.arrangement().to_ground_truth().unwrap(), gt);
    }

    #[test]
    fn accuracy_ignores_consistent_relabeling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = puzzle_type(seed);
        let gt = Instance::random(&mut rng, pt);
        let mut sol = Instance { rows: gt.rows, cols: gt.cols, grid: gt.grid.clone() };
        let (i, j) = (rng.random_range(0..sol.n()), rng.random_range(0..sol.n()));
        sol.grid.swap(i, j);
        let n = gt.n();
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(&mut perm[..], &mut rng);
        let relabel = |x: &Instance| Instance {
            rows: x.rows,
            cols: x.cols,
            grid: x.grid.iter().map(|&(id, q)| (perm[id], q)).collect(),
        };
        let acc = |s: &Instance, g: &Instance| {
            neighbor_accuracy(&s.arrangement(), &g.arrangement().to_ground_truth().unwrap(), pt).unwrap()
        };
        prop_assert_eq!(acc(&sol, &gt), acc(&relabel(&sol), &relabel(&gt)));
    }

    #[test]
    fn local_fitness_sums_to_fitness(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = puzzle_type(seed);
        let inst = Instance::random(&mut rng, pt);
        let t = postprocess(&random_tensor(inst.n(), pt, &mut rng)).unwrap();
        let a = inst.arrangement();
        let grid = local_fitness_grid(&a, &t).unwrap();
        let (r, c) = (a.rows(), a.cols());
        let mut total = 0.0;
        for (y, row) in grid.iter().enumerate() {
            for (x, v) in row.iter().enumerate() {
                let deg = [y > 0, y + 1 < r, x > 0, x + 1 < c].iter().filter(|&&b| b).count();
                total += v * deg as f64;
            }
        }
        let f = fitness(&a, &t).unwrap();
        prop_assert!((total / 2.0 - f).abs() <= 1e-9 * f.abs().max(1.0));
    }

    #[test]
    fn erosion_is_idempotent_and_composes(seed in any::<u64>(), t1 in 0usize..4, t2 in 0usize..4) {
        let bundle = noise_bundle(2, 3, 10, puzzle_type(seed), seed);
        let once = erode(&bundle, t1).unwrap();
        prop_assert_eq!(&erode(&once, t1).unwrap().pieces, &once.pieces);
        let both = erode(&once, t2).unwrap();
        let direct = erode(&bundle, t1.max(t2)).unwrap();
        prop_assert_eq!(&both.pieces, &direct.pieces);
        prop_assert_eq!(both.erosion_width, t1.max(t2));
    }

    #[test]
    fn render_with_ground_truth_restores_image(seed in any::<u64>(), rows in 1usize..5, cols in 1usize..5, extra in 0usize..7) {
        let p = 7;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut img = Raster::new(cols * p + extra, rows * p + extra / 2, 3);
        rng.fill(&mut img.data[..]);
        let s = cut_and_scramble(&img, p, puzzle_type(seed), seed).unwrap();
        let gt = s.bundle.ground_truth().unwrap();
        let out = render(&s.bundle, &gt.arrangement()).unwrap();
        let crop = &s.crops[0];
        prop_assert_eq!(out, img.crop(crop.y, crop.x, crop.height, crop.width));
    }

    #[test]
    fn ssd_is_mirror_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.random_range(2..8);
        let mk = |rng: &mut ChaCha8Rng, id| {
            let mut r = Raster::new(p, p, 3);
            rng.fill(&mut r.data[..]);
            Piece::new(id, r)
        };
        let (a, b) = (mk(&mut rng, 0), mk(&mut rng, 1));
        for rel in PuzzleType::Type2.relations() {
            let d1 = dissimilarity(MeasureKind::SsdRgb, &a, &b, rel, 0).unwrap();
            let d2 = dissimilarity(MeasureKind::SsdRgb, &b, &a, rel.mirror(), 0).unwrap();
            prop_assert_eq!(d1, d2);
        }
    }

    #[test]
    fn mgc_ignores_brightness_offset(seed in any::<u64>(), offset in 1u8..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = 8;
        let mk = |rng: &mut ChaCha8Rng, id, add: u8| {
            let mut r = Raster::new(p, p, 3);
            for v in r.data.iter_mut() {
                *v = rng.random_range(40..200) + add;
            }
            Piece::new(id, r)
        };
        let mut r1 = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (mk(&mut rng, 0, 0), mk(&mut rng, 1, 0));
        let (a2, b2) = (mk(&mut r1, 0, offset), mk(&mut r1, 1, offset));
        let rel = Relation::new(Edge::Right, Edge::Left);
        let d1 = dissimilarity(MeasureKind::Mgc, &a, &b, rel, 0).unwrap();
        let d2 = dissimilarity(MeasureKind::Mgc, &a2, &b2, rel, 0).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-9 * d1.abs().max(1.0), "{} vs {}", d1, d2);
    }

    #[test]
    fn lowering_a_boundary_difference_never_lowers_ssd_score(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = 5;
        let mut pieces: Vec<Piece> = (0..3)
            .map(|id| {
                let mut r = Raster::new(p, p, 3);
                rng.fill(&mut r.data[..]);
                Piece::new(id, r)
            })
            .collect();
        let bundle = PuzzleBundle::new(pieces.clone(), PuzzleType::Type1, None, None, 0).unwrap();
        let before = full_tensor(MeasureKind::SsdRgb, &bundle, 0).unwrap();
        // pull one pixel of piece 0's right column toward piece 1's left column
        let (y, ch) = (rng.random_range(0..p), rng.random_range(0..3));
        let target = pieces[1].pixels.get(y, 0, ch);
        let cur = pieces[0].pixels.get(y, p - 1, ch);
        let moved = ((cur as i32 + target as i32) / 2) as u8;
        pieces[0].pixels.set(y, p - 1, ch, moved);
        let bundle = PuzzleBundle::new(pieces, PuzzleType::Type1, None, None, 0).unwrap();
        let after = full_tensor(MeasureKind::SsdRgb, &bundle, 0).unwrap();
        let right = Edge::Right.index();
        prop_assert!(after.get(0, right, 1) >= before.get(0, right, 1));
    }
}

#[test]
fn erosion_zeroes_exactly_the_frame() {
    let bundle = noise_bundle(2, 2, 64, PuzzleType::Type2, 8);
    let eroded = erode(&bundle, 2).unwrap();
    for (orig, e) in bundle.pieces.iter().zip(&eroded.pieces) {
        for y in 0..64 {
            for x in 0..64 {
                let frame = y < 2 || x < 2 || y >= 62 || x >= 62;
                for ch in 0..3 {
                    let want = if frame { 0 } else { orig.pixels.get(y, x, ch) };
                    assert_eq!(e.pixels.get(y, x, ch), want);
                }
            }
        }
    }
    assert_eq!(erode(&bundle, 0).unwrap().pieces, bundle.pieces);
    assert!(erode(&bundle, 32).is_err());
}

#[test]
fn placements_serialize_as_orientation() {
    let p = Placement::new(1, 2, pf_core::Rotation::R90);
    let json = serde_json::to_string(&p).unwrap();
    assert!(json.contains("orientation"), "{json}");
    let a = Arrangement::complete(1, 1, vec![Placement::new(0, 0, pf_core::Rotation::R0)]).unwrap();
    assert_eq!(a.adjacent_pairs().unwrap().len(), 0);
}
