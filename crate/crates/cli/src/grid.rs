//! Distortion families addressable from the command line and their
//! parameter grids.

use clap::ValueEnum;
use scssim::distortions::{DistortionKind, PAN_WINDOW, ROTATE_CROP};

use crate::failure::{CliResult, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    SaltPepper,
    GaussianNoise,
    Blur,
    Rotate,
    Rotate90,
    Zoom,
    Pan,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::SaltPepper => "salt-pepper",
            Family::GaussianNoise => "gaussian-noise",
            Family::Blur => "blur",
            Family::Rotate => "rotate",
            Family::Rotate90 => "rotate90",
            Family::Zoom => "zoom",
            Family::Pan => "pan",
        }
    }

    /// Sweep levels used when `--grid` is not given.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            Family::SaltPepper => range(0.05, 0.95, 0.05),
            Family::GaussianNoise => range(5.0, 50.0, 5.0),
            Family::Blur => range(0.5, 12.0, 0.5),
            Family::Rotate => range(0.0, 90.0, 9.0),
            Family::Rotate90 => vec![0.0, 1.0],
            Family::Zoom => range(1.0, 2.0, 0.1),
            Family::Pan => range(0.0, 128.0, 16.0),
        }
    }

    /// The distortion at parameter `level`.
    pub fn kind(self, level: f64) -> CliResult<DistortionKind> {
        Ok(match self {
            Family::SaltPepper => DistortionKind::SaltPepper { density: level },
            Family::GaussianNoise => DistortionKind::GaussianNoise { sigma: level },
            Family::Blur => DistortionKind::GaussianBlur { sigma: level },
            Family::Rotate => DistortionKind::Rotate {
                degrees: level,
                crop: ROTATE_CROP,
            },
            Family::Rotate90 => DistortionKind::Rotate90,
            Family::Zoom => DistortionKind::Zoom { factor: level },
            Family::Pan => {
                if level.fract() != 0.0 {
                    return Err(Failure::bad_flags(format!(
                        "pan offset must be an integer, got {level}"
                    )));
                }
                DistortionKind::Pan {
                    dx: level as i64,
                    window: PAN_WINDOW,
                }
            }
        })
    }

    /// Transform giving the undistorted comparison target: the same crop
    /// at zero strength for the cropping families, `None` otherwise.
    pub fn neutral(self) -> Option<DistortionKind> {
        match self {
            Family::Rotate => Some(DistortionKind::Rotate {
                degrees: 0.0,
                crop: ROTATE_CROP,
            }),
            Family::Pan => Some(DistortionKind::Pan {
                dx: 0,
                window: PAN_WINDOW,
            }),
            _ => None,
        }
    }
}

/// Inclusive arithmetic progression, computed by index to avoid drift.
pub fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| {
            let v = start + step * i as f64;
            // trims representation noise such as 0.30000000000000004
            (v * 1e9).round() / 1e9
        })
        .collect()
}

/// Parses `start:stop:step` or a comma-separated list.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| Failure::bad_flags(format!("invalid grid {spec:?}: {why}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(start.is_finite() && stop.is_finite() && step > 0.0 && stop >= start) {
                return Err(bad("expected start <= stop and step > 0"));
            }
            if (stop - start) / step > 1e6 {
                return Err(bad("too many levels"));
            }
            range(start, stop, step)
        }
        [list] => list.split(',').map(number).collect::<CliResult<Vec<_>>>()?,
        _ => return Err(bad("expected start:stop:step or a comma list")),
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(bad("empty or non-finite"));
    }
    Ok(grid)
}
