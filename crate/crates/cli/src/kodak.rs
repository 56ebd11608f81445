//! Local cache of the 24-image Kodak photo set.

use std::fs;
use std::path::{Path, PathBuf};

use crate::failure::{CliResult, Failure};

pub const CACHE_ENV: &str = "SCSSIM_CACHE";
pub const DEFAULT_BASE_URL: &str = "https://r0k.us/graphics/kodak/kodak";
pub const IMAGE_COUNT: usize = 24;

/// `$SCSSIM_CACHE`, else `$XDG_CACHE_HOME/scssim`, else `~/.cache/scssim`.
pub fn cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(dir);
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(dir).join("scssim");
    }
    let home = std::env::var_os("HOME")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    home.join(".cache").join("scssim")
}

pub fn kodak_dir() -> PathBuf {
    cache_dir().join("kodak")
}

pub fn file_name(index: usize) -> String {
    format!("kodim{index:02}.png")
}

/// Path of `kodimNN.png` if it is present in the cache.
pub fn cached(index: usize) -> Option<PathBuf> {
    let path = kodak_dir().join(file_name(index));
    path.is_file().then_some(path)
}

/// Downloads any missing images into `dir`; returns how many were fetched.
pub fn fetch(dir: &Path, base_url: &str) -> CliResult<usize> {
    fs::create_dir_all(dir)?;
    let mut fetched = 0;
    for index in 1..=IMAGE_COUNT {
        let target = dir.join(file_name(index));
        if target.is_file() {
            continue;
        }
        let url = format!("{}/{}", base_url.trim_end_matches('/'), file_name(index));
        let bytes = ureq::get(&url)
            .call()
            .and_then(|mut r| r.body_mut().with_config().limit(64 << 20).read_to_vec())
            .map_err(|e| Failure::io(format!("downloading {url}: {e}")))?;
        // validate before committing the file to the cache
        scssim::image::decode_image(&bytes)?;
        let partial = target.with_extension("part");
        fs::write(&partial, &bytes)?;
        fs::rename(&partial, &target)?;
        fetched += 1;
    }
    Ok(fetched)
}
