//! WebAssembly bindings behind `www/index.html`.
//!
//! One [`Demo`] holds a source image and the puzzle cut from it. The page
//! calls [`Demo::scramble`], then [`Demo::solve`], [`Demo::score_map`] or
//! [`Demo::erosion_preview`]; every image crosses the boundary as RGBA bytes.

use pf_core::compat::{full_tensor, oracle_tensor};
use pf_core::dataset::{cut_and_scramble, erode, render, Scrambled};
use pf_core::ga::{DimsMode, GaConfig};
use pf_core::metrics::{neighbor_accuracy, score_map};
use pf_core::postprocess::postprocess;
use pf_core::{
    evolve, Arrangement, CompatibilityTensor, Edge, MeasureKind, PuzzleBundle, PuzzleType, Raster,
    Relation,
};
use wasm_bindgen::prelude::*;

fn js(e: pf_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn to_rgba(r: &Raster) -> Vec<u8> {
    let mut out = Vec::with_capacity(r.width * r.height * 4);
    for px in r.data.chunks_exact(r.channels) {
        match r.channels {
            1 => out.extend_from_slice(&[px[0], px[0], px[0], 255]),
            _ => out.extend_from_slice(&[px[0], px[1], px[2], 255]),
        }
    }
    out
}

fn from_rgba(rgba: &[u8], width: usize, height: usize) -> Result<Raster, JsError> {
    if rgba.len() != width * height * 4 {
        return Err(JsError::new("RGBA buffer does not match the image size"));
    }
    let data = rgba
        .chunks_exact(4)
        .flat_map(|p| [p[0], p[1], p[2]])
        .collect();
    Raster::from_vec(width, height, 3, data).map_err(js)
}

/// Soft color waves, so the demo has something to cut without an upload.
fn waves(width: usize, height: usize, seed: u32) -> Raster {
    let s = seed as f64 * 0.7919;
    let mut r = Raster::new(width, height, 3);
    for y in 0..height {
        for x in 0..width {
            let (fx, fy) = (x as f64, y as f64);
            let v = [
                (fx * 0.031 + s).sin() + (fy * 0.047 - s * 0.5).cos() + ((fx + fy) * 0.013).sin(),
                (fx * 0.019 - fy * 0.027 + s * 1.3).sin() + (fy * 0.061).sin() * 0.5,
                ((fx * fx + fy * fy).sqrt() * 0.035 + s).cos() + (fx * 0.053).cos() * 0.4,
            ];
            for (ch, v) in v.iter().enumerate() {
                r.set(y, x, ch, (128.0 + 60.0 * v).clamp(0.0, 255.0) as u8);
            }
        }
    }
    r
}

#[wasm_bindgen]
pub struct Image {
    width: usize,
    height: usize,
    rgba: Vec<u8>,
}

#[wasm_bindgen]
impl Image {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Copies the pixels out as RGBA bytes.
    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }
}

impl From<&Raster> for Image {
    fn from(r: &Raster) -> Self {
        Image {
            width: r.width,
            height: r.height,
            rgba: to_rgba(r),
        }
    }
}

#[wasm_bindgen]
pub struct SolveSummary {
    image: Image,
    accuracy: f64,
    fitness: f64,
    generations: usize,
}

#[wasm_bindgen]
impl SolveSummary {
    #[wasm_bindgen(getter)]
    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    #[wasm_bindgen(getter)]
    pub fn fitness(&self) -> f64 {
        self.fitness
    }

    #[wasm_bindgen(getter)]
    pub fn generations(&self) -> usize {
        self.generations
    }

    /// The solved image.
    pub fn image(&self) -> Image {
        Image {
            width: self.image.width,
            height: self.image.height,
            rgba: self.image.rgba.clone(),
        }
    }
}

#[wasm_bindgen]
pub struct Demo {
    source: Raster,
    puzzle: Option<Scrambled>,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(rgba: &[u8], width: usize, height: usize) -> Result<Demo, JsError> {
        Ok(Demo {
            source: from_rgba(rgba, width, height)?,
            puzzle: None,
        })
    }

    /// A demo on a generated image.
    pub fn synthetic(width: usize, height: usize, seed: u32) -> Demo {
        Demo {
            source: waves(width, height, seed),
            puzzle: None,
        }
    }

    pub fn source(&self) -> Image {
        Image::from(&self.source)
    }

    /// Cuts the source into `piece_size` squares and shuffles them; with
    /// `rotate`, each piece is also turned by a random quarter. Returns the
    /// pieces laid out in their shuffled order.
    pub fn scramble(
        &mut self,
        piece_size: usize,
        rotate: bool,
        seed: u32,
    ) -> Result<Image, JsError> {
        let pt = if rotate {
            PuzzleType::Type2
        } else {
            PuzzleType::Type1
        };
        let s = cut_and_scramble(&self.source, piece_size, pt, seed as u64).map_err(js)?;
        let img = shuffled_layout(&s.bundle)?;
        self.puzzle = Some(s);
        Ok(img)
    }

    /// The scrambled pieces with `width` boundary pixels zeroed.
    pub fn erosion_preview(&self, width: usize) -> Result<Image, JsError> {
        let b = erode(&self.bundle()?.clone(), width).map_err(js)?;
        shuffled_layout(&b)
    }

    /// Runs the genetic solver on scores from `measure` (`ssd-rgb`, `mgc`,
    /// `oracle`, ...) computed on pieces eroded by `erosion` pixels.
    pub fn solve(
        &self,
        measure: &str,
        erosion: usize,
        seed: u32,
        unknown_dims: bool,
    ) -> Result<SolveSummary, JsError> {
        let bundle = erode(self.bundle()?, erosion).map_err(js)?;
        let t = self.scores(&bundle, measure)?;
        let dims = if unknown_dims {
            DimsMode::Unknown
        } else {
            DimsMode::Known
        };
        let cfg = GaConfig::default().with_seed(seed as u64).with_dims(dims);
        let report = evolve(&bundle, &t, &cfg).map_err(js)?;
        let gt = bundle.ground_truth().map_err(js)?;
        let accuracy =
            neighbor_accuracy(&report.arrangement, gt, bundle.puzzle_type).map_err(js)?;
        // show the clean pieces, not the eroded ones
        let solved = render(self.bundle()?, &report.arrangement).map_err(js)?;
        Ok(SolveSummary {
            image: Image::from(&solved),
            accuracy,
            fitness: report.fitness,
            generations: report.generations,
        })
    }

    /// Score matrix of one relation, pieces in their true order; the bright
    /// band just above the diagonal marks true right-hand neighbors.
    pub fn score_map(
        &self,
        measure: &str,
        anchor: &str,
        candidate: &str,
    ) -> Result<Image, JsError> {
        let bundle = self.bundle()?;
        let edge =
            |s: &str| Edge::parse(s).ok_or_else(|| JsError::new(&format!("unknown edge '{s}'")));
        let rel = Relation::new(edge(anchor)?, edge(candidate)?);
        let t = self.scores(bundle, measure)?;
        let map = score_map(&t, bundle.ground_truth().map_err(js)?, rel).map_err(js)?;
        Ok(Image::from(&map))
    }

    pub fn piece_count(&self) -> usize {
        self.puzzle.as_ref().map_or(0, |s| s.bundle.len())
    }
}

impl Demo {
    fn bundle(&self) -> Result<&PuzzleBundle, JsError> {
        self.puzzle
            .as_ref()
            .map(|s| &s.bundle)
            .ok_or_else(|| JsError::new("scramble first"))
    }

    fn scores(&self, bundle: &PuzzleBundle, measure: &str) -> Result<CompatibilityTensor, JsError> {
        let kind: MeasureKind = measure.parse().map_err(|e: String| JsError::new(&e))?;
        match kind {
            MeasureKind::Oracle => oracle_tensor(bundle).map_err(js),
            k => {
                postprocess(&full_tensor(k, bundle, bundle.erosion_width).map_err(js)?).map_err(js)
            }
        }
    }
}

fn shuffled_layout(bundle: &PuzzleBundle) -> Result<Image, JsError> {
    let gt = bundle.ground_truth().map_err(js)?;
    let order: Vec<usize> = (0..bundle.len()).collect();
    let a = Arrangement::from_order(gt.rows, gt.cols, &order, &[]).map_err(js)?;
    Ok(Image::from(&render(bundle, &a).map_err(js)?))
}
