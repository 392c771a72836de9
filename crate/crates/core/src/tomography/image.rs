use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::linalg::Vector;

/// Row-major image with every pixel in `{−1, +1}`; row 0 is the top row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<i8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<i8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!("image must be at least 1x1, got {width}x{height}")));
        }
        check_dim("binary image", width * height, pixels.len())?;
        if let Some(p) = pixels.iter().find(|p| p.abs() != 1) {
            return Err(Error::InvalidParameter(format!("pixel value {p} is not -1 or +1")));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: i8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[i8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.pixels[row * self.width + col]
    }

    pub fn count_positive(&self) -> usize {
        self.pixels.iter().filter(|&&p| p > 0).count()
    }

    pub fn to_vector(&self) -> Vector {
        Vector::from_vec_unchecked(self.pixels.iter().map(|&p| f64::from(p)).collect())
    }

    /// Pixels flipped between `−1` and `+1`.
    pub fn inverted(&self) -> Self {
        Self {
            pixels: self.pixels.iter().map(|p| -p).collect(),
            ..self.clone()
        }
    }
}

/// Pixelwise sign, with `0 ↦ +1`.
pub fn threshold_to_binary(x: &[f64], width: usize, height: usize) -> Result<BinaryImage> {
    BinaryImage::new(width, height, x.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect())
}

/// Fraction of pixels on which the two images differ.
pub fn misclassification_rate(rec: &BinaryImage, truth: &BinaryImage) -> Result<f64> {
    if (rec.width, rec.height) != (truth.width, truth.height) {
        return Err(Error::DimensionMismatch {
            context: "misclassification rate",
            expected: truth.pixels.len(),
            found: rec.pixels.len(),
        });
    }
    let wrong = rec.pixels.iter().zip(&truth.pixels).filter(|(a, b)| a != b).count();
    Ok(wrong as f64 / rec.pixels.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhantomKind {
    /// Centered disk of radius `5/16 · min(width, height)`.
    Disk,
    /// Vertical bars of width `max(1, width/8)`; the seed shifts the phase.
    Bars,
    /// Thresholded sum of seeded Gaussian bumps, 60% foreground.
    Blob,
}

impl std::str::FromStr for PhantomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disk" => Ok(Self::Disk),
            "bars" => Ok(Self::Bars),
            "blob" => Ok(Self::Blob),
            other => Err(Error::Parse(format!("unknown phantom kind {other:?} (expected disk, bars or blob)"))),
        }
    }
}

impl std::fmt::Display for PhantomKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Disk => "disk",
            Self::Bars => "bars",
            Self::Blob => "blob",
        })
    }
}

const BLOB_BUMPS: usize = 4;
const BLOB_BACKGROUND_QUANTILE: f64 = 0.4;

pub fn make_phantom(kind: PhantomKind, width: usize, height: usize, seed: u64) -> Result<BinaryImage> {
    if width < 4 || height < 4 {
        return Err(Error::InvalidParameter(format!("phantoms need at least 4x4 pixels, got {width}x{height}")));
    }
    let (w, h) = (width as f64, height as f64);
    let pixels = match kind {
        PhantomKind::Disk => {
            let radius = 5.0 / 16.0 * w.min(h);
            (0..height)
                .flat_map(|r| (0..width).map(move |c| (r, c)))
                .map(|(r, c)| {
                    let dx = c as f64 + 0.5 - w / 2.0;
                    let dy = r as f64 + 0.5 - h / 2.0;
                    if dx.hypot(dy) <= radius {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        }
        PhantomKind::Bars => {
            let bar = (width / 8).max(1);
            let shift = (seed % (2 * bar as u64)) as usize;
            (0..height)
                .flat_map(|_| (0..width).map(|c| if ((c + shift) / bar) % 2 == 1 { 1 } else { -1 }))
                .collect()
        }
        PhantomKind::Blob => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = w.min(h);
            let bumps: Vec<[f64; 3]> = (0..BLOB_BUMPS)
                .map(|_| {
                    [
                        rng.gen_range(0.25..0.75) * w,
                        rng.gen_range(0.25..0.75) * h,
                        rng.gen_range(0.1..0.25) * m,
                    ]
                })
                .collect();
            let field: Vec<f64> = (0..height)
                .flat_map(|r| (0..width).map(move |c| (r, c)))
                .map(|(r, c)| {
                    let (x, y) = (c as f64 + 0.5, r as f64 + 0.5);
                    bumps
                        .iter()
                        .map(|[cx, cy, s]| (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp())
                        .sum()
                })
                .collect();
            let mut sorted = field.clone();
            sorted.sort_by(f64::total_cmp);
            let cut = sorted[(BLOB_BACKGROUND_QUANTILE * sorted.len() as f64) as usize];
            field.iter().map(|&v| if v >= cut { 1 } else { -1 }).collect()
        }
    };
    BinaryImage::new(width, height, pixels)
}

/// Binary PGM (P5, maxval 255) with `−1 ↦ 0` and `+1 ↦ 255`.
pub fn write_pgm<W: Write>(image: &BinaryImage, mut out: W) -> Result<()> {
    write!(out, "P5\n{} {}\n255\n", image.width, image.height)?;
    let bytes: Vec<u8> = image.pixels.iter().map(|&p| if p > 0 { 255 } else { 0 }).collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

/// Reads a P5 or P2 image; grey levels scaled to `[0, 255]` map to `+1`
/// when `≥ 128`.
pub fn read_pgm<R: Read>(mut input: R) -> Result<BinaryImage> {
    let mut data = Vec::new();
    input.read_to_end(&mut data)?;
    let mut pos = 0;
    let mut token = |data: &[u8]| -> Result<String> {
        loop {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse("unexpected end of PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&data[start..pos]).into_owned())
    };
    let magic = token(&data)?;
    let parse = |s: String, what: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::Parse(format!("invalid PGM {what} {s:?}")))
    };
    let width = parse(token(&data)?, "width")?;
    let height = parse(token(&data)?, "height")?;
    let maxval = parse(token(&data)?, "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse(format!("PGM maxval {maxval} out of range")));
    }
    let n = width * height;
    let levels: Vec<usize> = match magic.as_str() {
        "P5" => {
            // exactly one whitespace byte separates the header from the raster
            let start = pos + 1;
            let bpp = if maxval > 255 { 2 } else { 1 };
            let raster = data
                .get(start..start + n * bpp)
                .ok_or_else(|| Error::Parse("PGM raster is truncated".into()))?;
            if bpp == 1 {
                raster.iter().map(|&b| b as usize).collect()
            } else {
                raster.chunks(2).map(|c| (c[0] as usize) << 8 | c[1] as usize).collect()
            }
        }
        "P2" => (0..n)
            .map(|_| parse(token(&data)?, "grey level"))
            .collect::<Result<_>>()?,
        other => return Err(Error::Parse(format!("unsupported PGM magic {other:?}"))),
    };
    if let Some(v) = levels.iter().find(|&&v| v > maxval) {
        return Err(Error::Parse(format!("grey level {v} exceeds maxval {maxval}")));
    }
    let pixels = levels
        .iter()
        .map(|&v| if v as f64 * 255.0 / maxval as f64 >= 128.0 { 1 } else { -1 })
        .collect();
    BinaryImage::new(width, height, pixels)
}
