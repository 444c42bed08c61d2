//! Turning images into puzzle bundles and back.
//!
//! A bundle on disk is a directory of piece PNGs (`00000.png`, ...) plus a
//! `manifest.json` written last.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Arrangement, GroundTruth, Piece, Placement, PuzzleBundle, PuzzleType, Raster, Rotation,
};

pub const MANIFEST: &str = "manifest.json";

// ---------------------------------------------------------------------------
// image files

/// Converts a decoded image: grayscale stays single-channel, everything else
/// becomes RGB (alpha dropped).
pub fn raster_from_image(img: image::DynamicImage) -> Raster {
    use image::DynamicImage as D;
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        D::ImageLuma8(_) | D::ImageLumaA8(_) | D::ImageLuma16(_) | D::ImageLumaA16(_) => {
            Raster::from_vec(w, h, 1, img.into_luma8().into_raw()).expect("luma buffer")
        }
        other => Raster::from_vec(w, h, 3, other.into_rgb8().into_raw()).expect("rgb buffer"),
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<Raster> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(raster_from_image(img))
}

pub fn decode_png(bytes: &[u8]) -> Result<Raster> {
    let img = image::load_from_memory(bytes).map_err(|source| Error::Image {
        path: PathBuf::from("<memory>"),
        source,
    })?;
    Ok(raster_from_image(img))
}

fn color_type(r: &Raster) -> Result<image::ExtendedColorType> {
    match r.channels {
        1 => Ok(image::ExtendedColorType::L8),
        3 => Ok(image::ExtendedColorType::Rgb8),
        4 => Ok(image::ExtendedColorType::Rgba8),
        c => Err(Error::ShapeMismatch(format!(
            "cannot encode {c}-channel image"
        ))),
    }
}

pub fn save_png(r: &Raster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    image::save_buffer_with_format(
        path,
        &r.data,
        r.width as u32,
        r.height as u32,
        color_type(r)?,
        image::ImageFormat::Png,
    )
    .map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn encode_png(r: &Raster) -> Result<Vec<u8>> {
    use image::ImageEncoder;
    let mut out = Vec::new();
    image::codecs::png::PngEncoder::new(&mut out)
        .write_image(&r.data, r.width as u32, r.height as u32, color_type(r)?)
        .map_err(|source| Error::Image {
            path: PathBuf::from("<memory>"),
            source,
        })?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// tiling

/// Where a crop sits inside its source image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CropInfo {
    pub source_width: usize,
    pub source_height: usize,
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl CropInfo {
    fn centered(src_w: usize, src_h: usize, w: usize, h: usize) -> Self {
        CropInfo {
            source_width: src_w,
            source_height: src_h,
            x: (src_w - w) / 2,
            y: (src_h - h) / 2,
            width: w,
            height: h,
        }
    }

    pub fn apply(&self, image: &Raster) -> Raster {
        image.crop(self.y, self.x, self.height, self.width)
    }
}

#[derive(Clone, Debug)]
pub struct Scrambled {
    pub bundle: PuzzleBundle,
    pub crops: Vec<CropInfo>,
    pub seed: u64,
}

/// Cuts `image` into `p x p` tiles, then shuffles them (and for Type-2 turns
/// each by a random quarter) under `seed`.
pub fn cut_and_scramble(
    image: &Raster,
    p: usize,
    puzzle_type: PuzzleType,
    seed: u64,
) -> Result<Scrambled> {
    let (rows, cols) = (image.height / p.max(1), image.width / p.max(1));
    if p == 0 || rows == 0 || cols == 0 {
        return Err(Error::ImageTooSmall {
            width: image.width,
            height: image.height,
            piece: p,
        });
    }
    let crop = CropInfo::centered(image.width, image.height, cols * p, rows * p);
    let n = rows * cols;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // perm[id] = row-major tile index
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let turns: Vec<Rotation> = match puzzle_type {
        PuzzleType::Type1 => vec![Rotation::R0; n],
        PuzzleType::Type2 => (0..n)
            .map(|_| Rotation::from_quarters(rng.random_range(0..4)))
            .collect(),
    };

    let mut pieces = Vec::with_capacity(n);
    let mut cells = Vec::with_capacity(n);
    for (id, &tile) in perm.iter().enumerate() {
        let (r, c) = (tile / cols, tile % cols);
        let px = image
            .crop(crop.y + r * p, crop.x + c * p, p, p)
            .rotated(turns[id]);
        pieces.push(Piece::new(id, px));
        cells.push(Placement::new(r, c, turns[id].inverse()));
    }
    let gt = GroundTruth::new(rows, cols, cells)?;
    let bundle = PuzzleBundle::new(pieces, puzzle_type, Some((rows, cols)), Some(gt), 0)?;
    Ok(Scrambled {
        bundle,
        crops: vec![crop],
        seed,
    })
}

/// Cuts pages into vertical strips of `strip_width` and shuffles all strips
/// of all pages into one Type-1 bundle whose ground truth is the pages side
/// by side. Pages must share height and channel count.
pub fn shred(pages: &[Raster], strip_width: usize, seed: u64) -> Result<Scrambled> {
    let Some(first) = pages.first() else {
        return Err(Error::InvalidBundle("no pages".into()));
    };
    let mut tiles = Vec::new();
    let mut crops = Vec::with_capacity(pages.len());
    for page in pages {
        if page.height != first.height || page.channels != first.channels {
            return Err(Error::ShapeMismatch(
                "pages differ in height or channels".into(),
            ));
        }
        let k = page.width / strip_width.max(1);
        if strip_width == 0 || k == 0 {
            return Err(Error::ImageTooSmall {
                width: page.width,
                height: page.height,
                piece: strip_width,
            });
        }
        let crop = CropInfo::centered(page.width, page.height, k * strip_width, page.height);
        for i in 0..k {
            tiles.push(page.crop(0, crop.x + i * strip_width, page.height, strip_width));
        }
        crops.push(crop);
    }
    let n = tiles.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);

    let mut pieces = Vec::with_capacity(n);
    let mut cells = Vec::with_capacity(n);
    for (id, &tile) in perm.iter().enumerate() {
        pieces.push(Piece::new(id, tiles[tile].clone()));
        cells.push(Placement::new(0, tile, Rotation::R0));
    }
    let gt = GroundTruth::new(1, n, cells)?;
    let bundle = PuzzleBundle::new(pieces, PuzzleType::Type1, Some((1, n)), Some(gt), 0)?;
    Ok(Scrambled {
        bundle,
        crops,
        seed,
    })
}

/// `floor(height / chunk)` consecutive `chunk`-row windows; the rest is dropped.
pub fn chunk_strip(strip: &Raster, chunk: usize) -> Vec<Raster> {
    if chunk == 0 {
        return Vec::new();
    }
    (0..strip.height / chunk)
        .map(|i| strip.crop(i * chunk, 0, chunk, strip.width))
        .collect()
}

/// Pieces laid out as `a` says, each turned by its placement.
pub fn render(bundle: &PuzzleBundle, a: &Arrangement) -> Result<Raster> {
    a.require_complete()?;
    if a.len() != bundle.len() {
        return Err(Error::ShapeMismatch(format!(
            "arrangement has {} pieces, bundle {}",
            a.len(),
            bundle.len()
        )));
    }
    let first = &bundle.pieces[0].pixels;
    let (ph, pw) = (first.height, first.width);
    let mut out = Raster::new(a.cols() * pw, a.rows() * ph, first.channels);
    for (piece, p) in bundle.pieces.iter().zip(a.placements()) {
        let p = p.expect("complete");
        if p.rot != Rotation::R0 && !piece.is_square() {
            return Err(Error::InvalidArrangement(
                "only square pieces can be turned".into(),
            ));
        }
        out.blit(&piece.pixels.rotated(p.rot), p.row * ph, p.col * pw);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// erosion and augmentation

/// Zeroes the outer `t`-pixel frame of `r` in every channel.
pub fn erode_raster(r: &mut Raster, t: usize) {
    let (h, w) = (r.height, r.width);
    for row in 0..h {
        for col in 0..w {
            if row < t || col < t || row + t >= h || col + t >= w {
                for ch in 0..r.channels {
                    r.set(row, col, ch, 0);
                }
            }
        }
    }
}

pub fn erode(bundle: &PuzzleBundle, t: usize) -> Result<PuzzleBundle> {
    let side = bundle
        .pieces
        .iter()
        .map(|p| p.height().min(p.width()))
        .min()
        .unwrap_or(0);
    if 2 * t >= side && t > 0 {
        return Err(Error::ErosionTooLarge { width: t, side });
    }
    let mut out = bundle.clone();
    for p in &mut out.pieces {
        erode_raster(&mut p.pixels, t);
    }
    out.erosion_width = bundle.erosion_width.max(t);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degradation {
    None,
    /// One-pixel frame zeroed.
    Frame1,
    /// Two-pixel frame zeroed.
    Frame2,
}

impl Degradation {
    pub fn width(self) -> usize {
        match self {
            Degradation::None => 0,
            Degradation::Frame1 => 1,
            Degradation::Frame2 => 2,
        }
    }
}

/// One augmentation draw for a side-by-side training pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Augmentation {
    pub degradation: Degradation,
    /// Per half (anchor, candidate): content displacement (dx, dy), positive
    /// right and down.
    pub shifts: [(i32, i32); 2],
}

impl Augmentation {
    pub const IDENTITY: Augmentation = Augmentation {
        degradation: Degradation::None,
        shifts: [(0, 0); 2],
    };

    pub fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let degradation =
            [Degradation::None, Degradation::Frame1, Degradation::Frame2][rng.random_range(0..3)];
        let axis = |rng: &mut R| {
            let m = rng.random_range(0..3i32);
            if rng.random::<bool>() {
                -m
            } else {
                m
            }
        };
        let mut shifts = [(0, 0); 2];
        for s in &mut shifts {
            *s = (axis(rng), axis(rng));
        }
        Augmentation {
            degradation,
            shifts,
        }
    }

    /// Applies this draw to a `P x 2P` pair (anchor on the left).
    pub fn apply(&self, pair: &Raster) -> Result<Raster> {
        let p = pair.height;
        if pair.width != 2 * p {
            return Err(Error::ShapeMismatch(format!(
                "pair must be {p}x{}, got {}x{}",
                2 * p,
                pair.height,
                pair.width
            )));
        }
        let mut out = Raster::new(pair.width, p, pair.channels);
        for (half, &(dx, dy)) in self.shifts.iter().enumerate() {
            let mut piece = pair.crop(0, half * p, p, p);
            erode_raster(&mut piece, self.degradation.width());
            out.blit(&shift(&piece, dx, dy), 0, half * p);
        }
        Ok(out)
    }
}

/// Moves the content by (dx, dy), filling vacated pixels with zero.
pub fn shift(r: &Raster, dx: i32, dy: i32) -> Raster {
    let mut out = Raster::new(r.width, r.height, r.channels);
    for row in 0..r.height as i32 {
        for col in 0..r.width as i32 {
            let (sr, sc) = (row - dy, col - dx);
            if sr < 0 || sc < 0 || sr >= r.height as i32 || sc >= r.width as i32 {
                continue;
            }
            for ch in 0..r.channels {
                out.set(
                    row as usize,
                    col as usize,
                    ch,
                    r.get(sr as usize, sc as usize, ch),
                );
            }
        }
    }
    out
}

pub fn augment_pair(pair: &Raster, seed: u64) -> Result<(Raster, Augmentation)> {
    let aug = Augmentation::draw(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok((aug.apply(pair)?, aug))
}

// ---------------------------------------------------------------------------
// manifests

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestPiece {
    pub file: String,
    pub id: usize,
    pub row: usize,
    pub col: usize,
    pub orientation: Rotation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleManifest {
    /// Piece width; also the height for square pieces.
    pub piece_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub piece_height: Option<usize>,
    pub channels: usize,
    pub rows: usize,
    pub cols: usize,
    pub puzzle_type: PuzzleType,
    pub erosion_width: usize,
    pub seed: u64,
    #[serde(default)]
    pub crops: Vec<CropInfo>,
    pub pieces: Vec<ManifestPiece>,
}

pub fn piece_file(id: usize) -> String {
    format!("{id:05}.png")
}

impl BundleManifest {
    pub fn describe(bundle: &PuzzleBundle, seed: u64, crops: &[CropInfo]) -> Result<Self> {
        let gt = bundle.ground_truth()?;
        let first = &bundle.pieces[0];
        Ok(BundleManifest {
            piece_size: first.width(),
            piece_height: (!first.is_square()).then_some(first.height()),
            channels: first.channels(),
            rows: gt.rows,
            cols: gt.cols,
            puzzle_type: bundle.puzzle_type,
            erosion_width: bundle.erosion_width,
            seed,
            crops: crops.to_vec(),
            pieces: gt
                .cells
                .iter()
                .enumerate()
                .map(|(id, p)| ManifestPiece {
                    file: piece_file(id),
                    id,
                    row: p.row,
                    col: p.col,
                    orientation: p.rot,
                })
                .collect(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

/// Writes piece PNGs, then the manifest.
pub fn save_bundle(
    bundle: &PuzzleBundle,
    seed: u64,
    crops: &[CropInfo],
    dir: impl AsRef<Path>,
) -> Result<BundleManifest> {
    let dir = dir.as_ref();
    let manifest = BundleManifest::describe(bundle, seed, crops)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |p: &Piece| save_png(&p.pixels, dir.join(piece_file(p.id)));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        bundle.pieces.par_iter().try_for_each(write)?;
    }
    #[cfg(not(feature = "parallel"))]
    bundle.pieces.iter().try_for_each(write)?;
    let path = dir.join(MANIFEST);
    fs::write(&path, manifest.to_json() + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

pub fn load_bundle(dir: impl AsRef<Path>) -> Result<(PuzzleBundle, BundleManifest)> {
    let dir = dir.as_ref();
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let m: BundleManifest = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    let mut entries = m.pieces.clone();
    entries.sort_by_key(|p| p.id);
    let mut pieces = Vec::with_capacity(entries.len());
    let mut cells = Vec::with_capacity(entries.len());
    for e in &entries {
        let px = load_image(dir.join(&e.file))?;
        let want = (
            m.piece_size,
            m.piece_height.unwrap_or(m.piece_size),
            m.channels,
        );
        if (px.width, px.height, px.channels) != want {
            return Err(Error::InvalidBundle(format!(
                "{}: {}x{}x{} does not match manifest {}x{}x{}",
                e.file, px.width, px.height, px.channels, want.0, want.1, want.2
            )));
        }
        pieces.push(Piece::new(e.id, px));
        cells.push(Placement::new(e.row, e.col, e.orientation));
    }
    let gt = GroundTruth::new(m.rows, m.cols, cells)?;
    let bundle = PuzzleBundle::new(
        pieces,
        m.puzzle_type,
        Some((m.rows, m.cols)),
        Some(gt),
        m.erosion_width,
    )?;
    Ok((bundle, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient(w: usize, h: usize) -> Raster {
        let mut r = Raster::new(w, h, 3);
        for row in 0..h {
            for col in 0..w {
                r.set(row, col, 0, (row * 7 + col) as u8);
                r.set(row, col, 1, (col * 3) as u8);
                r.set(row, col, 2, (row ^ col) as u8);
            }
        }
        r
    }

    #[test]
    fn tiling_counts() {
        let s = cut_and_scramble(&gradient(280, 280), 28, PuzzleType::Type1, 1).unwrap();
        assert_eq!(s.bundle.len(), 100);
        let gt = s.bundle.ground_truth().unwrap();
        assert_eq!((gt.rows, gt.cols), (10, 10));
        assert!(gt.cells.iter().all(|p| p.rot == Rotation::R0));
    }

    #[test]
    fn too_small() {
        assert!(matches!(
            cut_and_scramble(&gradient(20, 40), 28, PuzzleType::Type1, 0),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn center_crop_recorded() {
        let s = cut_and_scramble(&gradient(61, 45), 10, PuzzleType::Type2, 3).unwrap();
        let c = s.crops[0];
        assert_eq!((c.x, c.y, c.width, c.height), (0, 2, 60, 40));
    }

    #[test]
    fn ground_truth_render_restores_crop() {
        let img = gradient(95, 67);
        for pt in [PuzzleType::Type1, PuzzleType::Type2] {
            let s = cut_and_scramble(&img, 16, pt, 9).unwrap();
            let back = render(&s.bundle, &s.bundle.ground_truth().unwrap().arrangement()).unwrap();
            assert_eq!(back, s.crops[0].apply(&img));
        }
    }

    #[test]
    fn chunk_counts() {
        let strip = Raster::new(50, 5500, 1);
        assert_eq!(chunk_strip(&strip, 50).len(), 110);
        assert_eq!(chunk_strip(&Raster::new(50, 5525, 1), 50).len(), 110);
        assert_eq!(chunk_strip(&strip, 5500).len(), 1);
        assert!(chunk_strip(&strip, 0).is_empty());
    }

    #[test]
    fn shift_zero_bands() {
        let mut r = Raster::new(4, 4, 1);
        r.data.fill(9);
        let s = shift(&r, -1, -1);
        for row in 0..4 {
            for col in 0..4 {
                let band = row == 3 || col == 3;
                assert_eq!(s.get(row, col, 0) == 0, band);
            }
        }
    }

    #[test]
    fn identity_augmentation() {
        let pair = gradient(16, 8);
        assert_eq!(Augmentation::IDENTITY.apply(&pair).unwrap(), pair);
    }
}
