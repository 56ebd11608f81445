//! Procedural test scenes with a clear composition: horizon-style bands,
//! a skyline, a few objects and mild texture. Used by the benchmark and as
//! a stand-in when no photographic corpus is available.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::RgbImage;

fn hash_noise(x: usize, y: usize, seed: u64) -> i32 {
    let mut z = (x as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (y as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f)
        ^ seed.wrapping_mul(0x1656_67b1_9e37_79f9);
    z = (z ^ (z >> 29)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^= z >> 32;
    (z % 17) as i32 - 8
}

fn shade(rgb: [i32; 3], noise: i32) -> [u8; 3] {
    rgb.map(|v| (v + noise).clamp(0, 255) as u8)
}

/// Landscape: sky gradient, sun, hilly tree line, a tower and rippled water.
pub fn landscape(width: usize, height: usize) -> RgbImage {
    let (w, h) = (width as f64, height as f64);
    let horizon = 0.62 * h;
    RgbImage::from_fn(width, height, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        let ridge =
            0.36 * h + 0.05 * h * (fx / w * 9.0).sin() + 0.03 * h * (fx / w * 23.0 + 1.3).sin();
        let sun = ((fx - 0.74 * w).powi(2) + (fy - 0.16 * h).powi(2)).sqrt() < 0.07 * h;
        let tower = (fx - 0.28 * w).abs() < 0.018 * w && fy > 0.22 * h && fy < 0.70 * h;
        let rgb = if tower {
            [70, 60, 55]
        } else if fy < ridge {
            if sun {
                [250, 230, 120]
            } else {
                let t = fy / ridge;
                [(90.0 + 80.0 * t) as i32, (150.0 + 60.0 * t) as i32, 235]
            }
        } else if fy < horizon {
            let band = ((fy - ridge) / (horizon - ridge) * 3.0) as i32;
            [35 + 10 * band, 95 - 12 * band, 40]
        } else {
            let ripple = if ((fy - horizon) / (0.02 * h)) as i32 % 2 == 0 {
                8
            } else {
                -8
            };
            let t = (fy - horizon) / (h - horizon);
            [
                (40.0 + 30.0 * t) as i32 + ripple,
                (80.0 + 40.0 * t) as i32 + ripple,
                150 + ripple,
            ]
        };
        shade(rgb, hash_noise(x, y, 1))
    })
    .expect("caller passes valid dimensions")
}

/// Random arrangement of coloured bands and blocks over a gradient.
pub fn scene(width: usize, height: usize, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: [i32; 3] = std::array::from_fn(|_| rng.random_range(0..256));
    let slope: [i32; 3] = std::array::from_fn(|_| rng.random_range(-120..120));
    let horizontal = rng.random::<bool>();
    let mut rects = Vec::new();
    for _ in 0..rng.random_range(2..7) {
        let x0 = rng.random_range(0..width);
        let y0 = rng.random_range(0..height);
        let x1 = rng.random_range(x0 + 1..=width);
        let y1 = rng.random_range(y0 + 1..=height);
        let color: [i32; 3] = std::array::from_fn(|_| rng.random_range(0..256));
        rects.push((x0, y0, x1, y1, color));
    }
    RgbImage::from_fn(width, height, |x, y| {
        let t = if horizontal {
            y as f64 / height as f64
        } else {
            x as f64 / width as f64
        };
        let mut rgb = std::array::from_fn(|c| base[c] + (slope[c] as f64 * t) as i32);
        for &(x0, y0, x1, y1, color) in &rects {
            if (x0..x1).contains(&x) && (y0..y1).contains(&y) {
                rgb = color;
            }
        }
        shade(rgb, hash_noise(x, y, seed))
    })
    .expect("caller passes valid dimensions")
}

/// Uniform random pixels.
pub fn noise(width: usize, height: usize, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RgbImage::from_fn(width, height, |_, _| rng.random()).expect("caller passes valid dimensions")
}
