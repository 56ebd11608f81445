//! Brute-force reference for cut search and greedy partitioning.
//!
//! SSE is evaluated literally as the sum of squared deviations from the
//! region mean, scaled by n² so that it stays an exact integer:
//! n²·e = Σᵢ ‖n·pᵢ − Σⱼ pⱼ‖². Nothing here uses prefix sums.

#![allow(dead_code)]

use num_rational::Ratio;
use scssim::{Axis, Region, RgbImage};

pub type Exact = Ratio<i128>;
type Choice = Option<(Axis, usize, Exact)>;

pub fn sse(img: &RgbImage, r: &Region) -> Exact {
    let n = r.area() as i128;
    let mut sum = [0i128; 3];
    for y in r.y0..r.y1 {
        for x in r.x0..r.x1 {
            for (s, v) in sum.iter_mut().zip(img.pixel(x, y)) {
                *s += v as i128;
            }
        }
    }
    let mut scaled = 0i128;
    for y in r.y0..r.y1 {
        for x in r.x0..r.x1 {
            for (s, v) in sum.iter().zip(img.pixel(x, y)) {
                let d = n * v as i128 - s;
                scaled += d * d;
            }
        }
    }
    Exact::new(scaled, n * n)
}

pub fn to_f64(v: &Exact) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

fn halves(r: &Region, axis: Axis, offset: usize) -> (Region, Region) {
    match axis {
        Axis::Horizontal => (
            Region {
                y1: r.y0 + offset,
                ..*r
            },
            Region {
                y0: r.y0 + offset,
                ..*r
            },
        ),
        Axis::Vertical => (
            Region {
                x1: r.x0 + offset,
                ..*r
            },
            Region {
                x0: r.x0 + offset,
                ..*r
            },
        ),
    }
}

/// Every candidate cut, horizontal top-to-bottom then vertical left-to-right,
/// keeping the first strict maximum.
pub fn best_cut(img: &RgbImage, r: &Region) -> Choice {
    let e = sse(img, r);
    let candidates = (1..r.height())
        .map(|o| (Axis::Horizontal, o))
        .chain((1..r.width()).map(|o| (Axis::Vertical, o)));
    let mut best: Choice = None;
    for (axis, offset) in candidates {
        let (a, b) = halves(r, axis, offset);
        let gain = e - sse(img, &a) - sse(img, &b);
        if best.as_ref().is_none_or(|(_, _, g)| gain > *g) {
            best = Some((axis, offset, gain));
        }
    }
    best
}

/// Greedy partitioning: split the leaf with the largest best-cut gain,
/// preferring the earliest-created leaf on ties.
pub fn greedy(img: &RgbImage, n_cuts: usize) -> Vec<(Axis, usize, Exact)> {
    let mut leaves: Vec<(Region, Choice)> = Vec::new();
    let full = Region::full(img.width(), img.height());
    leaves.push((full, best_cut(img, &full)));
    let mut alive = vec![true];
    let mut cuts = Vec::new();
    for _ in 0..n_cuts {
        let mut pick: Option<usize> = None;
        for (i, (_, best)) in leaves.iter().enumerate() {
            let Some((_, _, g)) = best else { continue };
            if !alive[i] {
                continue;
            }
            if pick.is_none_or(|p| *g > leaves[p].1.as_ref().unwrap().2) {
                pick = Some(i);
            }
        }
        let p = pick.expect("a splittable leaf exists");
        alive[p] = false;
        let (region, best) = leaves[p];
        let (axis, offset, gain) = best.unwrap();
        cuts.push((axis, offset, gain));
        let (a, b) = halves(&region, axis, offset);
        for child in [a, b] {
            leaves.push((child, best_cut(img, &child)));
            alive.push(true);
        }
    }
    cuts
}

pub fn close(actual: f64, expected: f64, rel: f64) -> bool {
    (actual - expected).abs() <= rel * expected.abs().max(1e-300) || actual == expected
}
