use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::grid::Family;

#[derive(Debug, Parser)]
#[command(
    name = "scssim",
    version,
    about = "Scene composition similarity from greedy partition trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct MetricArgs {
    /// Number of leading cuts compared.
    #[arg(long, default_value_t = scssim::DEFAULT_CUTS)]
    pub cuts: usize,
    /// Decay rate of the similarity score.
    #[arg(long, default_value_t = scssim::DEFAULT_LAMBDA)]
    pub lambda: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score two images.
    Compare {
        reference: PathBuf,
        test: PathBuf,
        #[command(flatten)]
        metric: MetricArgs,
        /// Print both directional scores, mean log-ratios and curves as JSON.
        #[arg(long)]
        json: bool,
        /// Use a stored tree for the reference image instead of rebuilding it.
        #[arg(long, visible_alias = "tree")]
        ref_tree: Option<PathBuf>,
        /// Use a stored tree for the test image instead of rebuilding it.
        #[arg(long)]
        test_tree: Option<PathBuf>,
    },
    /// Emit the cumulative-gain curve as CSV (`i,c0,c`).
    Curve {
        image: PathBuf,
        /// Judge IMAGE's tree on this reference instead of on IMAGE itself.
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long, default_value_t = scssim::DEFAULT_CUTS)]
        cuts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a partition tree and dump it as JSON.
    Tree {
        image: PathBuf,
        #[arg(long, default_value_t = scssim::DEFAULT_CUTS)]
        cuts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a reference against a grid of distortion strengths.
    Sweep {
        reference: PathBuf,
        #[arg(long, value_enum)]
        distortion: Family,
        /// `start:stop:step` (inclusive) or a comma list; defaults per distortion.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        metric: MetricArgs,
        /// Worker threads (0 picks one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pairwise scores for every PNG/PPM image in a directory.
    Matrix {
        dir: PathBuf,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a grayscale PPM heatmap.
        #[arg(long)]
        heatmap: Option<PathBuf>,
        /// Heatmap pixels per matrix cell.
        #[arg(long, default_value_t = 16)]
        cell: usize,
    },
    /// Time tree construction and scoring on synthetic square images.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [128usize, 256, 512, 1024])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply one distortion and write the result (PNG for `.png`, PPM otherwise).
    Distort {
        image: PathBuf,
        #[arg(long, value_enum)]
        distortion: Family,
        /// Strength: density, sigma, degrees, zoom factor or pan offset.
        #[arg(long, default_value_t = 0.0)]
        param: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Download the Kodak images into the cache directory.
    FetchKodak {
        /// Destination; defaults to `$SCSSIM_CACHE/kodak`.
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(long, default_value = crate::kodak::DEFAULT_BASE_URL)]
        base_url: String,
    },
}
