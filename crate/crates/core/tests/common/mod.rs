#![allow(dead_code)]

pub mod naive;

use std::path::PathBuf;

use pf_core::compat::{full_tensor, oracle_tensor};
use pf_core::dataset::{cut_and_scramble, load_image};
use pf_core::postprocess::postprocess;
use pf_core::{CompatibilityTensor, MeasureKind, PuzzleBundle, PuzzleType, Raster};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const IMAGES: [&str; 5] = ["astronaut", "coffee", "chelsea", "rocket", "china"];

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(format!("{name}.png"))
}

pub fn image(name: &str) -> Raster {
    load_image(data_path(name)).expect("test image")
}

/// Smooth random color field, so classical measures have something to work with.
pub fn synthetic(width: usize, height: usize, seed: u64) -> Raster {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<[f64; 4]> = (0..9)
        .map(|_| {
            [
                rng.random_range(0.01..0.2),
                rng.random_range(0.01..0.2),
                rng.random_range(0.0..6.3),
                rng.random_range(20.0..60.0),
            ]
        })
        .collect();
    let mut r = Raster::new(width, height, 3);
    for y in 0..height {
        for x in 0..width {
            for ch in 0..3 {
                let v: f64 = waves[ch * 3..ch * 3 + 3]
                    .iter()
                    .map(|w| w[3] * (w[0] * x as f64 + w[1] * y as f64 + w[2]).sin())
                    .sum();
                r.set(y, x, ch, (128.0 + v).clamp(0.0, 255.0) as u8);
            }
        }
    }
    r
}

/// A bundle of `rows x cols` random-noise pieces of side `p`.
pub fn noise_bundle(rows: usize, cols: usize, p: usize, pt: PuzzleType, seed: u64) -> PuzzleBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut img = Raster::new(cols * p, rows * p, 3);
    rng.fill(&mut img.data[..]);
    cut_and_scramble(&img, p, pt, seed).unwrap().bundle
}

pub fn natural_bundle(name: &str, pt: PuzzleType, seed: u64) -> PuzzleBundle {
    cut_and_scramble(&image(name), 28, pt, seed).unwrap().bundle
}

pub fn scores(kind: MeasureKind, bundle: &PuzzleBundle) -> CompatibilityTensor {
    match kind {
        MeasureKind::Oracle => oracle_tensor(bundle).unwrap(),
        k => postprocess(&full_tensor(k, bundle, 0).unwrap()).unwrap(),
    }
}

pub fn random_tensor(n: usize, pt: PuzzleType, rng: &mut impl Rng) -> CompatibilityTensor {
    let len = n * n * pt.relation_count();
    let s = (0..len).map(|_| rng.random::<f32>()).collect();
    CompatibilityTensor::from_scores(n, pt, s).unwrap()
}
