//! Scene composition similarity (SCSSIM).
//!
//! Images are partitioned by a greedy sequence of straight cuts, each
//! chosen to remove the most sum-of-squared-error. The running total of the
//! removed error, normalized by the image's total error, forms a curve that
//! fingerprints where an image's strong horizontal and vertical structure
//! lies. Two images are compared by replaying each one's cuts on the other
//! and comparing the resulting curves.
//!
//! The numeric pipeline is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to one of them.

pub mod cupid;
pub mod distortions;
mod error;
pub mod image;
pub mod integral;
pub mod metric;
mod scalar;
pub mod synthetic;

pub use cupid::{apply_tree, best_cut, build_tree, tree_from_json, tree_to_json, Axis, Side};
pub use distortions::{apply_distortion, DistortionKind, DistortionSpec};
pub use error::{Error, Result};
pub use image::{load_image, RgbImage};
pub use integral::{build_integral, region_sse, IntegralSums, Region, RegionStats};
pub use metric::{cumulative_curve, directional_similarity, scssim, DEFAULT_CUTS, DEFAULT_LAMBDA};
pub use scalar::Scalar;

pub type Cut = cupid::Cut<f64>;
pub type CutNode = cupid::CutNode<f64>;
pub type CupidTree = cupid::CupidTree<f64>;
pub type GainSeq = cupid::GainSeq<f64>;
pub type GainCurve = metric::GainCurve<f64>;
pub type MetricConfig = metric::MetricConfig<f64>;
pub type PreparedImage = metric::PreparedImage<f64>;
pub type Directional = metric::Directional<f64>;
pub type ScssimReport = metric::ScssimReport<f64>;

pub type CupidTreeF32 = cupid::CupidTree<f32>;
pub type GainSeqF32 = cupid::GainSeq<f32>;
pub type GainCurveF32 = metric::GainCurve<f32>;
pub type MetricConfigF32 = metric::MetricConfig<f32>;
pub type PreparedImageF32 = metric::PreparedImage<f32>;
