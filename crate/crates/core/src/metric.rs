//! Cumulative-gain curves and the composition similarity scores built on them.

use crate::cupid::{CupidTree, GainSeq};
use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::integral::IntegralSums;
use crate::scalar::Scalar;

pub const DEFAULT_CUTS: usize = 64;
pub const DEFAULT_LAMBDA: f64 = 25.0;
pub const DEFAULT_CURVE_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricConfig<T> {
    /// Number of leading cuts compared.
    pub n_cuts: usize,
    /// Decay rate of the exponential score.
    pub lambda: T,
    /// Lower clamp applied to curve values before taking logarithms.
    pub curve_floor: T,
}

impl<T: Scalar> Default for MetricConfig<T> {
    fn default() -> Self {
        Self {
            n_cuts: DEFAULT_CUTS,
            lambda: T::of(DEFAULT_LAMBDA),
            curve_floor: T::of(DEFAULT_CURVE_FLOOR),
        }
    }
}

impl<T: Scalar> MetricConfig<T> {
    pub fn new(n_cuts: usize, lambda: T) -> Result<Self> {
        let cfg = Self {
            n_cuts,
            lambda,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cuts == 0 {
            return Err(Error::InvalidParameter(
                "cut count must be at least 1".into(),
            ));
        }
        if !(self.lambda.is_finite() && self.lambda > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.curve_floor > T::zero() && self.curve_floor < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "curve floor must lie in (0, 1), got {}",
                self.curve_floor
            )));
        }
        Ok(())
    }
}

/// Running sum of cut gains normalized by the image's total SSE.
#[derive(Clone, Debug, PartialEq)]
pub struct GainCurve<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> GainCurve<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// First `n` points of the normalized cumulative-gain curve.
pub fn cumulative_curve<T: Scalar>(seq: &GainSeq<T>, n: usize) -> Result<GainCurve<T>> {
    if seq.total_sse.is_nan() || seq.total_sse <= T::zero() {
        return Err(Error::DegenerateImage);
    }
    if seq.gains.len() < n {
        return Err(Error::InvalidParameter(format!(
            "curve of length {n} requested from {} gains",
            seq.gains.len()
        )));
    }
    let mut acc = T::zero();
    let values: Vec<T> = seq.gains[..n]
        .iter()
        .map(|&g| {
            acc += g;
            acc / seq.total_sse
        })
        .collect();
    debug_assert!(
        values.iter().all(|&c| c <= T::one() + T::of(1e-9)),
        "cumulative gain exceeded total SSE: {values:?}"
    );
    Ok(GainCurve { values })
}

/// An image's integral sums together with its own partition tree.
#[derive(Clone, Debug)]
pub struct PreparedImage<T> {
    sums: IntegralSums,
    tree: CupidTree<T>,
}

impl<T: Scalar> PreparedImage<T> {
    pub fn new(img: &RgbImage, n_cuts: usize) -> Result<Self> {
        let sums = IntegralSums::new(img);
        let tree = CupidTree::build_from_sums(&sums, n_cuts)?;
        Ok(Self { sums, tree })
    }

    /// Pairs an image with a previously built tree of that same image.
    pub fn with_tree(img: &RgbImage, tree: CupidTree<T>) -> Result<Self> {
        if (tree.source_width(), tree.source_height()) != (img.width(), img.height()) {
            return Err(Error::InvalidParameter(format!(
                "tree was built on a {}x{} image, not {}x{}",
                tree.source_width(),
                tree.source_height(),
                img.width(),
                img.height()
            )));
        }
        Ok(Self {
            sums: IntegralSums::new(img),
            tree,
        })
    }

    pub fn sums(&self) -> &IntegralSums {
        &self.sums
    }

    pub fn tree(&self) -> &CupidTree<T> {
        &self.tree
    }
}

/// Intermediate values of one directional comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Directional<T> {
    /// Reference tree replayed on the reference.
    pub reference_curve: GainCurve<T>,
    /// Test tree replayed on the reference.
    pub test_curve: GainCurve<T>,
    /// Mean log-ratio of the two curves.
    pub mean_log_ratio: T,
    pub similarity: T,
}

fn check_tree_len<T: Scalar>(tree: &CupidTree<T>, n: usize) -> Result<()> {
    if tree.n_cuts() < n {
        return Err(Error::InvalidParameter(format!(
            "tree has {} cuts, {n} required",
            tree.n_cuts()
        )));
    }
    Ok(())
}

/// How well the test image's tree explains the reference, relative to the
/// reference's own tree.
pub fn directional_detail<T: Scalar>(
    test_tree: &CupidTree<T>,
    reference: &PreparedImage<T>,
    cfg: &MetricConfig<T>,
) -> Result<Directional<T>> {
    cfg.validate()?;
    let n = cfg.n_cuts;
    check_tree_len(test_tree, n)?;
    check_tree_len(&reference.tree, n)?;
    let reference_curve = cumulative_curve(&reference.tree.apply(&reference.sums), n)?;
    let test_curve = cumulative_curve(&test_tree.apply(&reference.sums), n)?;

    let floor = cfg.curve_floor;
    let sum: T = test_curve
        .values
        .iter()
        .zip(&reference_curve.values)
        .map(|(&c, &c0)| c.max(floor).ln() - c0.max(floor).ln())
        .sum();
    let mean_log_ratio = sum / T::from_usize(n).unwrap();
    // exp underflows to zero for large deviations; the score stays strictly positive
    let similarity = (-cfg.lambda * mean_log_ratio * mean_log_ratio)
        .exp()
        .max(T::min_positive_value());
    Ok(Directional {
        reference_curve,
        test_curve,
        mean_log_ratio,
        similarity,
    })
}

/// Directional similarity `M(test, reference)` in `(0, 1]`.
pub fn directional_similarity<T: Scalar>(
    test: &RgbImage,
    reference: &RgbImage,
    cfg: &MetricConfig<T>,
) -> Result<T> {
    cfg.validate()?;
    let test_tree = CupidTree::build(test, cfg.n_cuts)?;
    let reference = PreparedImage::new(reference, cfg.n_cuts)?;
    Ok(directional_detail(&test_tree, &reference, cfg)?.similarity)
}

/// Both directions of a symmetric comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct ScssimReport<T> {
    /// `M(b, a)`: `b`'s tree judged on `a`.
    pub on_first: Directional<T>,
    /// `M(a, b)`: `a`'s tree judged on `b`.
    pub on_second: Directional<T>,
    pub score: T,
}

pub fn scssim_prepared_report<T: Scalar>(
    a: &PreparedImage<T>,
    b: &PreparedImage<T>,
    cfg: &MetricConfig<T>,
) -> Result<ScssimReport<T>> {
    let on_second = directional_detail(&a.tree, b, cfg)?;
    let on_first = directional_detail(&b.tree, a, cfg)?;
    let half = T::of(0.5);
    let score = half * (on_second.similarity + on_first.similarity);
    Ok(ScssimReport {
        on_first,
        on_second,
        score,
    })
}

pub fn scssim_prepared<T: Scalar>(
    a: &PreparedImage<T>,
    b: &PreparedImage<T>,
    cfg: &MetricConfig<T>,
) -> Result<T> {
    Ok(scssim_prepared_report(a, b, cfg)?.score)
}

/// Symmetric composition similarity: the mean of both directional scores.
pub fn scssim<T: Scalar>(a: &RgbImage, b: &RgbImage, cfg: &MetricConfig<T>) -> Result<T> {
    cfg.validate()?;
    let a = PreparedImage::new(a, cfg.n_cuts)?;
    let b = PreparedImage::new(b, cfg.n_cuts)?;
    scssim_prepared(&a, &b, cfg)
}
