use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use scssim::distortions::{apply_distortion, derive_seed, DistortionSpec};
use scssim::metric::{directional_detail, scssim_prepared, scssim_prepared_report};
use scssim::{
    load_image, synthetic, tree_from_json, tree_to_json, CupidTree, Directional, MetricConfig,
    PreparedImage, RgbImage,
};
use serde_json::json;

use crate::args::{Cli, Command, MetricArgs};
use crate::failure::{CliResult, Failure};
use crate::grid::{parse_grid, Family};
use crate::kodak;
use crate::stats::mean_std;

pub fn config(args: &MetricArgs) -> CliResult<MetricConfig> {
    MetricConfig::new(args.cuts, args.lambda).map_err(|e| Failure::bad_flags(e.to_string()))
}

fn cuts_config(cuts: usize) -> CliResult<MetricConfig> {
    config(&MetricArgs {
        cuts,
        lambda: scssim::DEFAULT_LAMBDA,
    })
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
        }
        None => stdout.write_all(bytes).map_err(Into::into),
    }
}

fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::bad_flags(e.to_string()))
}

fn load_tree(path: &Path) -> CliResult<CupidTree> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    Ok(tree_from_json(&text)?)
}

fn prepare(img: &RgbImage, tree: Option<&PathBuf>, cfg: &MetricConfig) -> CliResult<PreparedImage> {
    match tree {
        Some(path) => Ok(PreparedImage::with_tree(img, load_tree(path)?)?),
        None => Ok(PreparedImage::new(img, cfg.n_cuts)?),
    }
}

fn directional_json(d: &Directional) -> serde_json::Value {
    json!({
        "m": d.similarity,
        "k_bar": d.mean_log_ratio,
        "c0": d.reference_curve.values,
        "c": d.test_curve.values,
    })
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Failure::io(e.to_string()))
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Compare {
            reference,
            test,
            metric,
            json,
            ref_tree,
            test_tree,
        } => {
            let cfg = config(&metric)?;
            let a = prepare(&load_image(&reference)?, ref_tree.as_ref(), &cfg)?;
            let b = prepare(&load_image(&test)?, test_tree.as_ref(), &cfg)?;
            let report = scssim_prepared_report(&a, &b, &cfg)?;
            let text = if json {
                let doc = json!({
                    "reference": reference.display().to_string(),
                    "test": test.display().to_string(),
                    "cuts": cfg.n_cuts,
                    "lambda": cfg.lambda,
                    "scssim": report.score,
                    "test_on_reference": directional_json(&report.on_first),
                    "reference_on_test": directional_json(&report.on_second),
                });
                serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
            } else {
                format!("{:.6}\n", report.score)
            };
            emit(None, stdout, text.as_bytes())
        }
        Command::Curve {
            image,
            against,
            cuts,
            out,
        } => {
            let cfg = cuts_config(cuts)?;
            let img = load_image(&image)?;
            let detail = match against {
                Some(reference) => {
                    let test_tree = CupidTree::build(&img, cfg.n_cuts)?;
                    let reference = PreparedImage::new(&load_image(&reference)?, cfg.n_cuts)?;
                    directional_detail(&test_tree, &reference, &cfg)?
                }
                None => {
                    let own = PreparedImage::new(&img, cfg.n_cuts)?;
                    directional_detail(own.tree(), &own, &cfg)?
                }
            };
            let rows = detail
                .reference_curve
                .values
                .iter()
                .zip(&detail.test_curve.values)
                .enumerate()
                .map(|(i, (c0, c))| vec![(i + 1).to_string(), c0.to_string(), c.to_string()]);
            emit(out.as_deref(), stdout, &csv_bytes(&["i", "c0", "c"], rows)?)
        }
        Command::Tree { image, cuts, out } => {
            let cfg = cuts_config(cuts)?;
            let tree = CupidTree::build(&load_image(&image)?, cfg.n_cuts)?;
            emit(
                out.as_deref(),
                stdout,
                (tree_to_json(&tree) + "\n").as_bytes(),
            )
        }
        Command::Sweep {
            reference,
            distortion,
            grid,
            seed,
            metric,
            jobs,
            out,
        } => {
            let cfg = config(&metric)?;
            let grid = match grid {
                Some(spec) => parse_grid(&spec)?,
                None => distortion.default_grid(),
            };
            let img = load_image(&reference)?;
            let rows = pool(jobs)?.install(|| sweep(&img, distortion, &grid, seed, &cfg))?;
            let label = reference.display().to_string();
            let records = rows.iter().map(|r| {
                vec![
                    distortion.name().to_string(),
                    r.level.to_string(),
                    format!("{:.6}", r.score),
                    seed.to_string(),
                    cfg.n_cuts.to_string(),
                    cfg.lambda.to_string(),
                    label.clone(),
                ]
            });
            let header = [
                "distortion",
                "level",
                "scssim",
                "seed",
                "cuts",
                "lambda",
                "reference",
            ];
            emit(out.as_deref(), stdout, &csv_bytes(&header, records)?)
        }
        Command::Matrix {
            dir,
            metric,
            jobs,
            out,
            heatmap,
            cell,
        } => {
            let cfg = config(&metric)?;
            let files = image_files(&dir)?;
            if files.is_empty() {
                return Err(Failure::io(format!(
                    "no PNG or PPM images in {}",
                    dir.display()
                )));
            }
            let images = files
                .iter()
                .map(load_image)
                .collect::<Result<Vec<_>, _>>()?;
            let matrix = pool(jobs)?.install(|| similarity_matrix(&images, &cfg))?;
            let names: Vec<String> = files
                .iter()
                .map(|p| {
                    p.file_name()
                        .map(|n| n.to_string_lossy().into_owned())
                        .unwrap_or_default()
                })
                .collect();
            let mut header = vec!["image"];
            header.extend(names.iter().map(String::as_str));
            let rows = names.iter().zip(&matrix).map(|(name, row)| {
                std::iter::once(name.clone())
                    .chain(row.iter().map(|v| format!("{v:.6}")))
                    .collect()
            });
            emit(out.as_deref(), stdout, &csv_bytes(&header, rows)?)?;
            if let Some(path) = heatmap {
                heatmap_image(&matrix, cell)?.save(&path)?;
            }
            eprintln!(
                "matrix: {} images, cuts={}, lambda={}",
                names.len(),
                cfg.n_cuts,
                cfg.lambda
            );
            Ok(())
        }
        Command::Bench {
            sizes,
            repeats,
            metric,
            out,
        } => {
            let cfg = config(&metric)?;
            if repeats == 0 || sizes.is_empty() {
                return Err(Failure::bad_flags(
                    "bench needs at least one size and one repeat",
                ));
            }
            let rows = bench(&sizes, repeats, &cfg)?;
            let records = rows.iter().map(|r| {
                vec![
                    r.pixels.to_string(),
                    format!("{:.3}", r.mean_ms),
                    format!("{:.3}", r.std_ms),
                ]
            });
            eprintln!(
                "bench: repeats={repeats}, cuts={}, lambda={}",
                cfg.n_cuts, cfg.lambda
            );
            emit(
                out.as_deref(),
                stdout,
                &csv_bytes(&["pixels", "mean_ms", "std_ms"], records)?,
            )
        }
        Command::Distort {
            image,
            distortion,
            param,
            seed,
            out,
        } => {
            let spec = DistortionSpec::new(distortion.kind(param)?, seed);
            apply_distortion(&load_image(&image)?, &spec)?.save(&out)?;
            Ok(())
        }
        Command::FetchKodak { dir, base_url } => {
            let dir = dir.unwrap_or_else(kodak::kodak_dir);
            let fetched = kodak::fetch(&dir, &base_url)?;
            writeln!(stdout, "{fetched} images downloaded to {}", dir.display())?;
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub level: f64,
    pub score: f64,
}

/// Scores each distorted level against the undistorted reference.
///
/// Cropping families compare against the zero-strength crop so that both
/// images cover the same frame size. Level `i` draws noise from
/// `derive_seed(seed, i)`.
pub fn sweep(
    img: &RgbImage,
    family: Family,
    grid: &[f64],
    seed: u64,
    cfg: &MetricConfig,
) -> CliResult<Vec<SweepRow>> {
    let base = match family.neutral() {
        Some(kind) => apply_distortion(img, &DistortionSpec::new(kind, seed))?,
        None => img.clone(),
    };
    let base = PreparedImage::new(&base, cfg.n_cuts)?;
    let kinds = grid
        .iter()
        .map(|&level| family.kind(level))
        .collect::<CliResult<Vec<_>>>()?;
    kinds
        .par_iter()
        .zip(grid)
        .enumerate()
        .map(|(i, (&kind, &level))| {
            let distorted =
                apply_distortion(img, &DistortionSpec::new(kind, derive_seed(seed, i as u64)))?;
            let prepared = PreparedImage::new(&distorted, cfg.n_cuts)?;
            Ok(SweepRow {
                level,
                score: scssim_prepared(&base, &prepared, cfg)?,
            })
        })
        .collect()
}

/// Symmetric matrix of pairwise scores; each image's tree is built once.
pub fn similarity_matrix(images: &[RgbImage], cfg: &MetricConfig) -> CliResult<Vec<Vec<f64>>> {
    let prepared = images
        .par_iter()
        .map(|img| PreparedImage::new(img, cfg.n_cuts))
        .collect::<Result<Vec<_>, _>>()?;
    let n = images.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let scores = pairs
        .par_iter()
        .map(|&(i, j)| scssim_prepared(&prepared[i], &prepared[j], cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut matrix = vec![vec![0.0; n]; n];
    for (&(i, j), &s) in pairs.iter().zip(&scores) {
        matrix[i][j] = s;
        matrix[j][i] = s;
    }
    Ok(matrix)
}

/// Grayscale rendering, `round(255·score)` per cell.
pub fn heatmap_image(matrix: &[Vec<f64>], cell: usize) -> CliResult<RgbImage> {
    let cell = cell.max(1);
    let side = matrix.len() * cell;
    Ok(RgbImage::from_fn(side, side, |x, y| {
        let v = (255.0 * matrix[y / cell][x / cell])
            .round()
            .clamp(0.0, 255.0) as u8;
        [v; 3]
    })?)
}

fn image_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry?.path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("png" | "ppm")) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub pixels: usize,
    pub mean_ms: f64,
    pub std_ms: f64,
}

/// Times a full comparison (both trees, both directions) of a synthetic
/// `s`×`s` landscape against a noisy copy, after one warm-up run.
pub fn bench(sizes: &[usize], repeats: usize, cfg: &MetricConfig) -> CliResult<Vec<BenchRow>> {
    sizes
        .iter()
        .map(|&size| {
            if size == 0 || size > scssim::image::MAX_DIMENSION {
                return Err(Failure::bad_flags(format!(
                    "bench size {size} out of range"
                )));
            }
            let a = synthetic::landscape(size, size);
            let b = scssim::distortions::gaussian_noise(&a, 10.0, 0)?;
            scssim::scssim(&a, &b, cfg)?;
            let mut times = Vec::with_capacity(repeats);
            for _ in 0..repeats {
                let start = Instant::now();
                std::hint::black_box(scssim::scssim(&a, &b, cfg)?);
                times.push(start.elapsed().as_secs_f64() * 1e3);
            }
            let (mean_ms, std_ms) = mean_std(&times);
            Ok(BenchRow {
                pixels: size * size,
                mean_ms,
                std_ms,
            })
        })
        .collect()
}
