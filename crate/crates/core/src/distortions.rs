//! Seedable image distortions: three that leave the composition intact
//! (impulse noise, additive Gaussian noise, Gaussian blur) and the
//! geometric ones that change it (rotation, zoom, pan).
//!
//! Noise is drawn from ChaCha8 seeded with the `DistortionSpec` 64-bit seed, so a
//! given input, distortion and seed always produce the same bytes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::image::RgbImage;

/// Side of the square centre crop taken after an arbitrary rotation.
pub const ROTATE_CROP: usize = 362;
/// Side of the square panning window.
pub const PAN_WINDOW: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistortionKind {
    /// Each pixel becomes black or white with probability `density`.
    SaltPepper {
        density: f64,
    },
    /// Additive N(0, sigma²) per channel on the 0–255 scale.
    GaussianNoise {
        sigma: f64,
    },
    GaussianBlur {
        sigma: f64,
    },
    /// Counter-clockwise rotation about the centre followed by a `crop`×`crop` centre crop.
    Rotate {
        degrees: f64,
        crop: usize,
    },
    /// Exact counter-clockwise quarter turn.
    Rotate90,
    /// Centre zoom-in by `factor`, resampled bilinearly back to full size.
    Zoom {
        factor: f64,
    },
    /// `window`×`window` crop, vertically centred, shifted `dx` pixels right of centre.
    Pan {
        dx: i64,
        window: usize,
    },
}

impl DistortionKind {
    pub fn rotate(degrees: f64) -> Self {
        Self::Rotate {
            degrees,
            crop: ROTATE_CROP,
        }
    }

    pub fn pan(dx: i64) -> Self {
        Self::Pan {
            dx,
            window: PAN_WINDOW,
        }
    }

    /// Whether the distortion is meant to leave scene composition unchanged.
    pub fn is_compositional(&self) -> bool {
        !matches!(
            self,
            Self::SaltPepper { .. } | Self::GaussianNoise { .. } | Self::GaussianBlur { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionSpec {
    pub kind: DistortionKind,
    /// Only consulted by the noise kinds.
    pub seed: u64,
}

impl DistortionSpec {
    pub fn new(kind: DistortionKind, seed: u64) -> Self {
        Self { kind, seed }
    }
}

/// Mixes a base seed with a task index (SplitMix64 finalizer), giving each
/// sweep level an independent noise stream.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

pub fn apply_distortion(img: &RgbImage, spec: &DistortionSpec) -> Result<RgbImage> {
    match spec.kind {
        DistortionKind::SaltPepper { density } => salt_pepper(img, density, spec.seed),
        DistortionKind::GaussianNoise { sigma } => gaussian_noise(img, sigma, spec.seed),
        DistortionKind::GaussianBlur { sigma } => gaussian_blur(img, sigma),
        DistortionKind::Rotate { degrees, crop } => rotate(img, degrees, crop),
        DistortionKind::Rotate90 => Ok(rotate90(img)),
        DistortionKind::Zoom { factor } => zoom(img, factor),
        DistortionKind::Pan { dx, window } => pan(img, dx, window),
    }
}

#[inline]
fn round_u8(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn salt_pepper(img: &RgbImage, density: f64, seed: u64) -> Result<RgbImage> {
    if !(0.0..=1.0).contains(&density) {
        return Err(invalid(format!(
            "salt & pepper density {density} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = img.clone();
    for y in 0..img.height() {
        for x in 0..img.width() {
            if rng.random::<f64>() < density {
                let v = if rng.random::<bool>() { 255 } else { 0 };
                out.set_pixel(x, y, [v; 3]);
            }
        }
    }
    Ok(out)
}

pub fn gaussian_noise(img: &RgbImage, sigma: f64, seed: u64) -> Result<RgbImage> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(invalid(format!(
            "noise sigma {sigma} must be finite and non-negative"
        )));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = img
        .as_raw()
        .iter()
        .map(|&v| round_u8(v as f64 + normal.sample(&mut rng)))
        .collect();
    RgbImage::from_raw(img.width(), img.height(), data)
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    (-radius..=radius)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect()
}

/// One separable pass along a line of `len` samples spaced `stride` apart.
/// Taps that fall outside the image are dropped and the rest renormalized.
fn convolve_line(src: &[f64], dst: &mut [f64], len: usize, stride: usize, kernel: &[f64]) {
    let radius = (kernel.len() / 2) as i64;
    for i in 0..len as i64 {
        let lo = (i - radius).max(0);
        let hi = (i + radius).min(len as i64 - 1);
        let (mut acc, mut weight) = ([0.0; 3], 0.0);
        for j in lo..=hi {
            let w = kernel[(j - i + radius) as usize];
            let base = j as usize * stride;
            for c in 0..3 {
                acc[c] += w * src[base + c];
            }
            weight += w;
        }
        let base = i as usize * stride;
        for c in 0..3 {
            dst[base + c] = acc[c] / weight;
        }
    }
}

pub fn gaussian_blur(img: &RgbImage, sigma: f64) -> Result<RgbImage> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(invalid(format!(
            "blur sigma {sigma} must be finite and non-negative"
        )));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(sigma);
    let (w, h) = (img.width(), img.height());
    let src: Vec<f64> = img.as_raw().iter().map(|&v| v as f64).collect();
    let mut horiz = vec![0.0; src.len()];
    for y in 0..h {
        let row = y * w * 3..(y + 1) * w * 3;
        convolve_line(&src[row.clone()], &mut horiz[row], w, 3, &kernel);
    }
    // vertical pass on a transposed copy so each column is contiguous
    let mut cols = vec![0.0; src.len()];
    for y in 0..h {
        for x in 0..w {
            let (s, d) = ((y * w + x) * 3, (x * h + y) * 3);
            cols[d..d + 3].copy_from_slice(&horiz[s..s + 3]);
        }
    }
    let mut blurred = vec![0.0; src.len()];
    for x in 0..w {
        let col = x * h * 3..(x + 1) * h * 3;
        convolve_line(&cols[col.clone()], &mut blurred[col], h, 3, &kernel);
    }
    RgbImage::from_fn(w, h, |x, y| {
        let d = (x * h + y) * 3;
        [
            round_u8(blurred[d]),
            round_u8(blurred[d + 1]),
            round_u8(blurred[d + 2]),
        ]
    })
}

/// Bilinear sample at real coordinates, clamping to the nearest edge pixel.
fn sample_bilinear(img: &RgbImage, sx: f64, sy: f64) -> [u8; 3] {
    let (w, h) = (img.width(), img.height());
    let sx = sx.clamp(0.0, (w - 1) as f64);
    let sy = sy.clamp(0.0, (h - 1) as f64);
    let (x0, y0) = (sx.floor() as usize, sy.floor() as usize);
    let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
    let (fx, fy) = (sx - x0 as f64, sy - y0 as f64);
    let (p00, p10, p01, p11) = (
        img.pixel(x0, y0),
        img.pixel(x1, y0),
        img.pixel(x0, y1),
        img.pixel(x1, y1),
    );
    std::array::from_fn(|c| {
        let top = p00[c] as f64 * (1.0 - fx) + p10[c] as f64 * fx;
        let bottom = p01[c] as f64 * (1.0 - fx) + p11[c] as f64 * fx;
        round_u8(top * (1.0 - fy) + bottom * fy)
    })
}

fn window_error(img: &RgbImage, x0: i64, y0: i64, ww: usize, wh: usize) -> Error {
    Error::WindowOutOfBounds {
        x0,
        y0,
        window_w: ww,
        window_h: wh,
        width: img.width(),
        height: img.height(),
    }
}

pub fn rotate(img: &RgbImage, degrees: f64, crop: usize) -> Result<RgbImage> {
    if !degrees.is_finite() {
        return Err(invalid(format!("rotation angle {degrees} is not finite")));
    }
    let (w, h) = (img.width(), img.height());
    if crop == 0 || crop > w || crop > h {
        let x0 = (w as i64 - crop as i64) / 2;
        let y0 = (h as i64 - crop as i64) / 2;
        return Err(window_error(img, x0, y0, crop, crop));
    }
    let (x0, y0) = ((w - crop) / 2, (h - crop) / 2);
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let (sin, cos) = degrees.to_radians().sin_cos();
    RgbImage::from_fn(crop, crop, |x, y| {
        // inverse map from the rotated frame back into the source (y points down)
        let dx = (x0 + x) as f64 - cx;
        let dy = (y0 + y) as f64 - cy;
        sample_bilinear(img, cx + cos * dx - sin * dy, cy + sin * dx + cos * dy)
    })
}

pub fn rotate90(img: &RgbImage) -> RgbImage {
    let (w, h) = (img.width(), img.height());
    RgbImage::from_fn(h, w, |x, y| img.pixel(w - 1 - y, x))
        .expect("dimensions are swapped, not changed")
}

pub fn zoom(img: &RgbImage, factor: f64) -> Result<RgbImage> {
    if !(factor >= 1.0 && factor.is_finite()) {
        return Err(invalid(format!(
            "zoom factor {factor} must be finite and at least 1"
        )));
    }
    let (w, h) = (img.width() as f64, img.height() as f64);
    let (cw, ch) = (w / factor, h / factor);
    let (ox, oy) = ((w - cw) / 2.0, (h - ch) / 2.0);
    RgbImage::from_fn(img.width(), img.height(), |x, y| {
        let sx = ox + (x as f64 + 0.5) * cw / w - 0.5;
        let sy = oy + (y as f64 + 0.5) * ch / h - 0.5;
        sample_bilinear(img, sx, sy)
    })
}

pub fn pan(img: &RgbImage, dx: i64, window: usize) -> Result<RgbImage> {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let win = window as i64;
    let x0 = (w - win) / 2 + dx;
    let y0 = (h - win) / 2;
    if window == 0 || x0 < 0 || y0 < 0 || x0 + win > w || y0 + win > h {
        return Err(window_error(img, x0, y0, window, window));
    }
    img.crop(x0 as usize, y0 as usize, window, window)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: usize, h: usize) -> RgbImage {
        RgbImage::from_fn(w, h, |x, y| {
            [
                ((x * 7 + y * 3) % 256) as u8,
                ((x * y) % 251) as u8,
                if (x / 8 + y / 8) % 2 == 0 { 30 } else { 220 },
            ]
        })
        .unwrap()
    }

    fn spec(kind: DistortionKind) -> DistortionSpec {
        DistortionSpec::new(kind, 42)
    }

    #[test]
    fn zero_strength_is_identity() {
        let img = textured(40, 30);
        for kind in [
            DistortionKind::SaltPepper { density: 0.0 },
            DistortionKind::GaussianNoise { sigma: 0.0 },
            DistortionKind::GaussianBlur { sigma: 0.0 },
            DistortionKind::Zoom { factor: 1.0 },
        ] {
            assert_eq!(
                apply_distortion(&img, &spec(kind)).unwrap(),
                img,
                "{kind:?}"
            );
        }
    }

    #[test]
    fn four_quarter_turns() {
        let img = textured(7, 5);
        let once = rotate90(&img);
        assert_eq!((once.width(), once.height()), (5, 7));
        // top-right corner moves to top-left under a counter-clockwise turn
        assert_eq!(once.pixel(0, 0), img.pixel(6, 0));
        let back = rotate90(&rotate90(&rotate90(&once)));
        assert_eq!(back, img);
    }

    #[test]
    fn full_density_salt_pepper() {
        let img = textured(512, 512);
        let out = salt_pepper(&img, 1.0, 9).unwrap();
        let mut white = 0usize;
        for y in 0..512 {
            for x in 0..512 {
                match out.pixel(x, y) {
                    [255, 255, 255] => white += 1,
                    [0, 0, 0] => {}
                    other => panic!("unexpected pixel {other:?}"),
                }
            }
        }
        let frac = white as f64 / (512.0 * 512.0);
        assert!((frac - 0.5).abs() <= 0.02, "{frac}");
    }

    #[test]
    fn salt_pepper_density_is_respected() {
        let img = RgbImage::filled(200, 200, [128, 128, 128]).unwrap();
        let out = salt_pepper(&img, 0.3, 1).unwrap();
        let hit = (0..200 * 200)
            .filter(|i| out.pixel(i % 200, i / 200) != [128; 3])
            .count();
        let frac = hit as f64 / 40000.0;
        // binomial std is ~0.0023 here
        assert!((frac - 0.3).abs() < 0.012, "{frac}");
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let img = textured(64, 48);
        for kind in [
            DistortionKind::SaltPepper { density: 0.4 },
            DistortionKind::GaussianNoise { sigma: 12.0 },
        ] {
            let a = apply_distortion(&img, &DistortionSpec::new(kind, 5)).unwrap();
            let b = apply_distortion(&img, &DistortionSpec::new(kind, 5)).unwrap();
            let c = apply_distortion(&img, &DistortionSpec::new(kind, 6)).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn noise_is_centered() {
        let img = RgbImage::filled(128, 128, [100, 120, 140]).unwrap();
        let out = gaussian_noise(&img, 10.0, 3).unwrap();
        let n = (128 * 128) as f64;
        for c in 0..3 {
            let mean: f64 = out
                .as_raw()
                .iter()
                .skip(c)
                .step_by(3)
                .map(|&v| v as f64)
                .sum::<f64>()
                / n;
            assert!(
                (mean - img.as_raw()[c] as f64).abs() < 0.5,
                "channel {c}: {mean}"
            );
        }
    }

    #[test]
    fn blur_preserves_mean() {
        let img = crate::synthetic::noise(96, 64, 8);
        for sigma in [0.7, 2.0, 5.0] {
            let out = gaussian_blur(&img, sigma).unwrap();
            for c in 0..3 {
                let m = |im: &RgbImage| {
                    im.as_raw()
                        .iter()
                        .skip(c)
                        .step_by(3)
                        .map(|&v| v as f64)
                        .sum::<f64>()
                        / (96.0 * 64.0)
                };
                assert!(
                    (m(&out) - m(&img)).abs() <= 0.5,
                    "sigma {sigma} channel {c}"
                );
            }
        }
    }

    #[test]
    fn blur_of_constant_is_constant() {
        let img = RgbImage::filled(20, 10, [10, 200, 77]).unwrap();
        assert_eq!(gaussian_blur(&img, 3.0).unwrap(), img);
    }

    #[test]
    fn geometric_output_sizes() {
        let img = textured(768, 512);
        assert_eq!(pan(&img, 0, PAN_WINDOW).unwrap().width(), 512);
        assert_eq!(pan(&img, 128, PAN_WINDOW).unwrap().height(), 512);
        let r = rotate(&img, 37.0, ROTATE_CROP).unwrap();
        assert_eq!((r.width(), r.height()), (362, 362));
        let z = zoom(&img, 1.7).unwrap();
        assert_eq!((z.width(), z.height()), (768, 512));
    }

    #[test]
    fn rotate_zero_is_center_crop() {
        let img = textured(400, 380);
        let r = rotate(&img, 0.0, ROTATE_CROP).unwrap();
        assert_eq!(r, img.crop(19, 9, 362, 362).unwrap());
    }

    #[test]
    fn rotate_ninety_matches_quarter_turn_on_square() {
        let img = textured(363, 363);
        let r = rotate(&img, 90.0, 363).unwrap();
        assert_eq!(r, rotate90(&img));
    }

    #[test]
    fn pan_offsets() {
        let img = textured(768, 512);
        assert_eq!(
            pan(&img, 64, 512).unwrap(),
            img.crop(192, 0, 512, 512).unwrap()
        );
        assert!(matches!(
            pan(&img, 129, 512),
            Err(Error::WindowOutOfBounds { .. })
        ));
        assert!(matches!(
            pan(&img, -129, 512),
            Err(Error::WindowOutOfBounds { .. })
        ));
        assert!(matches!(
            pan(&textured(500, 600), 0, 512),
            Err(Error::WindowOutOfBounds { .. })
        ));
    }

    #[test]
    fn crop_too_large_for_rotation() {
        assert!(matches!(
            rotate(&textured(300, 400), 10.0, ROTATE_CROP),
            Err(Error::WindowOutOfBounds { .. })
        ));
    }

    #[test]
    fn invalid_parameters() {
        let img = textured(8, 8);
        assert!(salt_pepper(&img, 1.5, 0).is_err());
        assert!(salt_pepper(&img, -0.1, 0).is_err());
        assert!(gaussian_noise(&img, -1.0, 0).is_err());
        assert!(gaussian_blur(&img, f64::NAN).is_err());
        assert!(zoom(&img, 0.5).is_err());
        assert!(rotate(&img, f64::INFINITY, 4).is_err());
    }

    #[test]
    fn seeds_are_mixed() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
