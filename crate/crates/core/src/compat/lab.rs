//! 8-bit sRGB to CIE-LAB under a D65 white point.

use std::sync::OnceLock;

const WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];

const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

fn linear_table() -> &'static [f64; 256] {
    static TABLE: OnceLock<[f64; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 256];
        for (v, out) in t.iter_mut().enumerate() {
            let c = v as f64 / 255.0;
            *out = if c <= 0.04045 {
                c / 12.92
            } else {
                ((c + 0.055) / 1.055).powf(2.4)
            };
        }
        t
    })
}

fn f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

pub fn srgb_to_lab(rgb: [u8; 3]) -> [f64; 3] {
    let lin = linear_table();
    let l = [
        lin[rgb[0] as usize],
        lin[rgb[1] as usize],
        lin[rgb[2] as usize],
    ];
    let mut xyz = [0.0; 3];
    for (k, row) in RGB_TO_XYZ.iter().enumerate() {
        xyz[k] = (row[0] * l[0] + row[1] * l[1] + row[2] * l[2]) / WHITE[k];
    }
    let (fx, fy, fz) = (f(xyz[0]), f(xyz[1]), f(xyz[2]));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Converts an interleaved line of pixels. Single-channel input is treated as
/// gray (R = G = B).
pub fn line_to_lab(line: &[u8], channels: usize) -> Vec<f64> {
    line.chunks_exact(channels)
        .flat_map(|px| {
            let rgb = match channels {
                1 => [px[0]; 3],
                _ => [px[0], px[1], px[2]],
            };
            srgb_to_lab(rgb)
        })
        .collect()
}
