//! Summed-area tables over pixel values and squared pixel norms.
//!
//! Every rectangle's pixel count, per-channel sum and squared-norm sum are
//! available in O(1) and are exact integers, so SSE and cut gains can be
//! formed with a single final division.

use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::scalar::Scalar;

/// Axis-aligned pixel rectangle, `[x0, x1) × [y0, y1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Region {
    /// Returns `None` for empty or inverted rectangles.
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Option<Self> {
        (x0 < x1 && y0 < y1).then_some(Self { x0, y0, x1, y1 })
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            x0: 0,
            y0: 0,
            x1: width,
            y1: height,
        }
    }

    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.x0 < self.x1 && self.y0 < self.y1 && self.x1 <= width && self.y1 <= height
    }

    /// Splits `offset` rows below the top edge; `None` if either half would be empty.
    pub fn split_horizontal(&self, offset: usize) -> Option<(Region, Region)> {
        (offset >= 1 && offset < self.height()).then(|| {
            let y = self.y0 + offset;
            (Region { y1: y, ..*self }, Region { y0: y, ..*self })
        })
    }

    /// Splits `offset` columns right of the left edge; `None` if either half would be empty.
    pub fn split_vertical(&self, offset: usize) -> Option<(Region, Region)> {
        (offset >= 1 && offset < self.width()).then(|| {
            let x = self.x0 + offset;
            (Region { x1: x, ..*self }, Region { x0: x, ..*self })
        })
    }
}

/// Exact first and second moments of a pixel set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RegionStats {
    pub count: u64,
    pub sum: [i64; 3],
    pub sum_sq: u64,
}

impl RegionStats {
    /// `n·e`, i.e. `n·Σ‖p‖² − ‖Σp‖²`, which is never negative.
    pub fn scaled_sse(&self) -> i128 {
        let n = self.count as i128;
        let norm: i128 = self.sum.iter().map(|&s| (s as i128) * (s as i128)).sum();
        (n * self.sum_sq as i128 - norm).max(0)
    }

    /// Sum of squared deviations from the mean colour.
    pub fn sse<T: Scalar>(&self) -> T {
        if self.count == 0 {
            return T::zero();
        }
        let num = T::from_i128(self.scaled_sse()).unwrap_or_else(T::infinity);
        num / T::from_u64(self.count).unwrap_or_else(T::infinity)
    }
}

impl std::ops::Sub for RegionStats {
    type Output = RegionStats;

    fn sub(self, rhs: RegionStats) -> RegionStats {
        RegionStats {
            count: self.count - rhs.count,
            sum: [
                self.sum[0] - rhs.sum[0],
                self.sum[1] - rhs.sum[1],
                self.sum[2] - rhs.sum[2],
            ],
            sum_sq: self.sum_sq - rhs.sum_sq,
        }
    }
}

/// Prefix tables of size `(width+1) × (height+1)` with a zero first row and column.
#[derive(Clone, Debug)]
pub struct IntegralSums {
    width: usize,
    height: usize,
    values: Vec<[i64; 3]>,
    squares: Vec<u64>,
}

impl IntegralSums {
    pub fn new(img: &RgbImage) -> Self {
        let (w, h) = (img.width(), img.height());
        let stride = w + 1;
        let mut values = vec![[0i64; 3]; stride * (h + 1)];
        let mut squares = vec![0u64; stride * (h + 1)];
        for (y, row) in img.rows().enumerate() {
            let (done, rest) = values.split_at_mut((y + 1) * stride);
            let (above, here) = (&done[y * stride + 1..], &mut rest[1..stride]);
            let (done_sq, rest_sq) = squares.split_at_mut((y + 1) * stride);
            let (above_sq, here_sq) = (&done_sq[y * stride + 1..], &mut rest_sq[1..stride]);
            let mut run = [0i64; 3];
            let mut run_sq = 0u64;
            for ((((px, up), out), up_sq), out_sq) in row
                .chunks_exact(3)
                .zip(above)
                .zip(here.iter_mut())
                .zip(above_sq)
                .zip(here_sq.iter_mut())
            {
                let (r, g, b) = (px[0] as i64, px[1] as i64, px[2] as i64);
                run[0] += r;
                run[1] += g;
                run[2] += b;
                run_sq += (r * r + g * g + b * b) as u64;
                *out = [up[0] + run[0], up[1] + run[1], up[2] + run[2]];
                *out_sq = up_sq + run_sq;
            }
        }
        Self {
            width: w,
            height: h,
            values,
            squares,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Per-channel sum over pixels with coordinates strictly below `(x, y)`.
    pub fn value_prefix(&self, x: usize, y: usize) -> [i64; 3] {
        self.values[y * (self.width + 1) + x]
    }

    /// Squared-norm sum over pixels with coordinates strictly below `(x, y)`.
    pub fn square_prefix(&self, x: usize, y: usize) -> u64 {
        self.squares[y * (self.width + 1) + x]
    }

    pub fn full_region(&self) -> Region {
        Region::full(self.width, self.height)
    }

    fn check(&self, region: &Region) -> Result<()> {
        if region.fits(self.width, self.height) {
            Ok(())
        } else {
            Err(Error::RegionOutOfBounds {
                region: (region.x0, region.y0, region.x1, region.y1),
                width: self.width,
                height: self.height,
            })
        }
    }

    /// Moments of `region`; the caller guarantees it lies within the image.
    pub(crate) fn stats_unchecked(&self, region: &Region) -> RegionStats {
        let stride = self.width + 1;
        let (a, b) = (
            region.y0 * stride + region.x0,
            region.y0 * stride + region.x1,
        );
        let (c, d) = (
            region.y1 * stride + region.x0,
            region.y1 * stride + region.x1,
        );
        let (va, vb, vc, vd) = (
            self.values[a],
            self.values[b],
            self.values[c],
            self.values[d],
        );
        RegionStats {
            count: region.area() as u64,
            sum: [
                vd[0] - vb[0] - vc[0] + va[0],
                vd[1] - vb[1] - vc[1] + va[1],
                vd[2] - vb[2] - vc[2] + va[2],
            ],
            sum_sq: self.squares[d] + self.squares[a] - self.squares[b] - self.squares[c],
        }
    }

    pub fn stats(&self, region: &Region) -> Result<RegionStats> {
        self.check(region)?;
        Ok(self.stats_unchecked(region))
    }

    /// SSE of `region` about its mean colour.
    pub fn region_sse<T: Scalar>(&self, region: &Region) -> Result<T> {
        Ok(self.stats(region)?.sse())
    }

    pub fn total_sse<T: Scalar>(&self) -> T {
        self.stats_unchecked(&self.full_region()).sse()
    }
}

/// Free-function form of [`IntegralSums::new`].
pub fn build_integral(img: &RgbImage) -> IntegralSums {
    IntegralSums::new(img)
}

/// Free-function form of [`IntegralSums::region_sse`].
pub fn region_sse<T: Scalar>(sums: &IntegralSums, region: &Region) -> Result<T> {
    sums.region_sse(region)
}
