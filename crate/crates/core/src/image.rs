//! 8-bit RGB rasters and the two supported on-disk formats (PNG, binary PPM).

use std::fs;
use std::io::{Cursor, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Largest accepted width or height.
pub const MAX_DIMENSION: usize = 16_384;

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

/// Owned row-major 8-bit RGB raster.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for RgbImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RgbImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl RgbImage {
    /// Wraps interleaved `r, g, b` bytes.
    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dimensions(width, height)?;
        if data.len() != width * height * 3 {
            return Err(Error::InvalidImage(format!(
                "expected {} bytes for {}x{} RGB, got {}",
                width * height * 3,
                width,
                height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image filled with a single colour.
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        check_dimensions(width, height)?;
        let data = rgb
            .iter()
            .copied()
            .cycle()
            .take(width * height * 3)
            .collect();
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Result<Self> {
        check_dimensions(width, height)?;
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.data.chunks_exact(self.width * 3)
    }

    /// Copies out the `w`×`h` window with top-left corner `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if w == 0 || h == 0 || x0 + w > self.width || y0 + h > self.height {
            return Err(Error::WindowOutOfBounds {
                x0: x0 as i64,
                y0: y0 as i64,
                window_w: w,
                window_h: h,
                width: self.width,
                height: self.height,
            });
        }
        let mut data = Vec::with_capacity(w * h * 3);
        for row in self.rows().skip(y0).take(h) {
            data.extend_from_slice(&row[x0 * 3..(x0 + w) * 3]);
        }
        Ok(Self {
            width: w,
            height: h,
            data,
        })
    }

    /// Swaps rows and columns.
    pub fn transpose(&self) -> Self {
        let mut out = Self {
            width: self.height,
            height: self.width,
            data: vec![0; self.data.len()],
        };
        for y in 0..self.height {
            for x in 0..self.width {
                out.set_pixel(y, x, self.pixel(x, y));
            }
        }
        out
    }

    /// Encodes as binary PPM (P6, maxval 255).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    /// Encodes as 8-bit RGB PNG.
    pub fn to_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut encoder = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            encoder.set_color(png::ColorType::Rgb);
            encoder.set_depth(png::BitDepth::Eight);
            let mut writer = encoder
                .write_header()
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            writer
                .write_image_data(&self.data)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
        Ok(out)
    }

    /// Writes the image, choosing PNG for a `.png` extension and PPM otherwise.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        let bytes = if is_png {
            self.to_png()?
        } else {
            self.to_ppm()
        };
        let mut file = fs::File::create(path)?;
        file.write_all(&bytes)?;
        Ok(())
    }
}

fn check_dimensions(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidImage(format!("empty image {width}x{height}")));
    }
    if width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(Error::InvalidImage(format!(
            "{width}x{height} exceeds the {MAX_DIMENSION}x{MAX_DIMENSION} limit"
        )));
    }
    Ok(())
}

/// Reads a PNG or binary PPM file from disk.
pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::FileNotFound(path.to_path_buf()))
        }
        Err(e) => return Err(e.into()),
    };
    decode_image(&bytes)
}

/// Decodes PNG or PPM bytes, sniffing the format from the leading magic.
pub fn decode_image(bytes: &[u8]) -> Result<RgbImage> {
    if bytes.starts_with(&PNG_SIGNATURE) {
        decode_png(bytes)
    } else if bytes.first() == Some(&b'P') {
        decode_ppm(bytes)
    } else {
        Err(Error::UnsupportedFormat("neither PNG nor PPM".into()))
    }
}

fn decode_png(bytes: &[u8]) -> Result<RgbImage> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::CorruptData(e.to_string()))?;
    let (color, depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    if depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!("PNG bit depth {depth:?}")));
    }
    let channels = match color {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Indexed => return Err(Error::UnsupportedFormat("palette PNG".into())),
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::CorruptData("PNG frame too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::CorruptData(e.to_string()))?;
    let (width, height) = (frame.width as usize, frame.height as usize);
    check_dimensions(width, height)?;

    let mut data = Vec::with_capacity(width * height * 3);
    for row in buf.chunks(frame.line_size).take(height) {
        for px in row[..width * channels].chunks_exact(channels) {
            match channels {
                1 | 2 => data.extend_from_slice(&[px[0], px[0], px[0]]),
                _ => data.extend_from_slice(&px[..3]),
            }
        }
    }
    RgbImage::from_raw(width, height, data)
}

/// Cursor over a PNM header: whitespace-separated tokens with `#` comments.
struct PnmHeader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PnmHeader<'_> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::CorruptData(
                "truncated or malformed PPM header".into(),
            ));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::CorruptData("PPM header value out of range".into()))
    }
}

fn decode_ppm(bytes: &[u8]) -> Result<RgbImage> {
    if bytes.len() < 2 {
        return Err(Error::CorruptData("truncated PPM magic".into()));
    }
    match &bytes[..2] {
        b"P6" => {}
        b"P1" | b"P2" | b"P3" | b"P4" | b"P5" | b"P7" => {
            return Err(Error::UnsupportedFormat(format!(
                "PNM variant {} (only P6 is supported)",
                String::from_utf8_lossy(&bytes[..2])
            )))
        }
        _ => return Err(Error::UnsupportedFormat("unknown P-format magic".into())),
    }
    let mut header = PnmHeader { bytes, pos: 2 };
    let width = header.number()?;
    let height = header.number()?;
    let maxval = header.number()?;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!("PPM maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(header.pos) {
        Some(b) if b.is_ascii_whitespace() => header.pos += 1,
        _ => return Err(Error::CorruptData("truncated PPM header".into())),
    }
    check_dimensions(width, height)?;
    let len = width * height * 3;
    let raster = bytes
        .get(header.pos..header.pos + len)
        .ok_or_else(|| Error::CorruptData(format!("PPM raster shorter than {len} bytes")))?;
    RgbImage::from_raw(width, height, raster.to_vec())
}
