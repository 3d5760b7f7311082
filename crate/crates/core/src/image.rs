//! 8-bit grayscale rasters and the netpbm PGM codec.
//!
//! Both the binary (`P5`) and plain (`P2`) flavours are read; writing always
//! uses maxval 255. Inputs with a maxval below 255 are accepted and their
//! samples kept as-is.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Row-major 8-bit grayscale image. Pixel `(r, c)` lives at `r * width + c`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        let expected = width * height;
        if pixels.len() != expected {
            return Err(Error::PixelCount {
                width,
                height,
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            pixels: vec![value; width * height],
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut pixels = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    /// Always false; a `GrayImage` has at least one pixel.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }

    #[inline]
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.pixels[row * self.width..(row + 1) * self.width]
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn same_dims(&self, other: &GrayImage) -> Result<()> {
        dims_match((self.width, self.height), (other.width, other.height))
    }
}

impl fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrayImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

pub(crate) fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        Err(Error::ZeroDimension { width, height })
    } else {
        Ok(())
    }
}

pub(crate) fn dims_match(left: (usize, usize), right: (usize, usize)) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            left_w: left.0,
            left_h: left.1,
            right_w: right.0,
            right_h: right.1,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PgmEncoding {
    /// `P5`, raw octets.
    #[default]
    Binary,
    /// `P2`, whitespace-separated decimal samples.
    Ascii,
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_ws_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedHeader(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("{what} out of range")))
    }
}

/// Decodes a `P5` or `P2` stream.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 {
        return Err(Error::BadMagic(String::from_utf8_lossy(bytes).into_owned()));
    }
    let encoding = match &bytes[..2] {
        b"P5" => PgmEncoding::Binary,
        b"P2" => PgmEncoding::Ascii,
        other => return Err(Error::BadMagic(String::from_utf8_lossy(other).into_owned())),
    };
    let mut rd = HeaderReader { bytes, pos: 2 };
    if !rd
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::MalformedHeader(
            "missing whitespace after magic".into(),
        ));
    }
    let width = rd.number("width")? as usize;
    let height = rd.number("height")? as usize;
    let maxval = rd.number("maxval")?;
    if maxval == 0 {
        return Err(Error::MalformedHeader("maxval must be positive".into()));
    }
    if maxval > 255 {
        return Err(Error::SixteenBit(maxval));
    }
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))?;

    // exactly one whitespace octet separates maxval from the body
    match bytes.get(rd.pos) {
        Some(b) if b.is_ascii_whitespace() => rd.pos += 1,
        _ => {
            return Err(Error::MalformedHeader(
                "missing whitespace after maxval".into(),
            ))
        }
    }
    let body = &bytes[rd.pos..];

    let pixels = match encoding {
        PgmEncoding::Binary => {
            if body.len() < expected {
                return Err(Error::Truncated {
                    expected,
                    found: body.len(),
                });
            }
            let px = body[..expected].to_vec();
            if let Some(&v) = px.iter().find(|&&v| u32::from(v) > maxval) {
                return Err(Error::SampleOutOfRange {
                    value: v.into(),
                    maxval,
                });
            }
            px
        }
        PgmEncoding::Ascii => {
            let mut rd = HeaderReader {
                bytes: body,
                pos: 0,
            };
            let mut px = Vec::with_capacity(expected);
            for found in 0..expected {
                rd.skip_ws_and_comments();
                if rd.pos >= body.len() {
                    return Err(Error::Truncated { expected, found });
                }
                let v = rd.number("sample")?;
                if v > maxval {
                    return Err(Error::SampleOutOfRange { value: v, maxval });
                }
                px.push(v as u8);
            }
            px
        }
    };
    GrayImage::new(width, height, pixels)
}

/// Encodes with maxval 255.
pub fn write_pgm(img: &GrayImage, encoding: PgmEncoding) -> Vec<u8> {
    match encoding {
        PgmEncoding::Binary => {
            let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
            out.extend_from_slice(&img.pixels);
            out
        }
        PgmEncoding::Ascii => write_plain_samples(
            img.width,
            img.height,
            255,
            img.pixels.iter().map(|&v| u32::from(v)),
        ),
    }
}

/// Plain `P2` writer for arbitrary sample values (used for cardinality dumps,
/// whose maxval is the window size rather than 255).
pub fn write_plain_samples(
    width: usize,
    height: usize,
    maxval: u32,
    samples: impl IntoIterator<Item = u32>,
) -> Vec<u8> {
    use std::fmt::Write;

    let mut out = format!("P2\n{width} {height}\n{maxval}\n");
    let mut samples = samples.into_iter();
    for _ in 0..height {
        let line: Vec<String> = samples
            .by_ref()
            .take(width)
            .map(|v| v.to_string())
            .collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out.into_bytes()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// Horizontal ramp `floor(255 * c / (width - 1))`.
    Gradient,
    /// 8x8 blocks alternating 64 and 192, starting with 64 at the origin.
    Checker,
    /// Uniform random field smoothed by one 3x3 box-mean pass.
    SmoothRandom,
}

impl std::str::FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gradient" => Ok(Self::Gradient),
            "checker" => Ok(Self::Checker),
            "smooth-random" => Ok(Self::SmoothRandom),
            other => Err(Error::InvalidParameter(format!(
                "unknown synthetic image kind {other:?}"
            ))),
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gradient => "gradient",
            Self::Checker => "checker",
            Self::SmoothRandom => "smooth-random",
        })
    }
}

/// Deterministic synthetic test image. The seed only affects `SmoothRandom`.
pub fn synth_image(width: usize, height: usize, seed: u64, kind: SynthKind) -> Result<GrayImage> {
    check_dims(width, height)?;
    match kind {
        SynthKind::Gradient => GrayImage::from_fn(width, height, |_, c| {
            if width == 1 {
                0
            } else {
                (255 * c / (width - 1)) as u8
            }
        }),
        SynthKind::Checker => GrayImage::from_fn(width, height, |r, c| {
            if (r / 8 + c / 8) % 2 == 0 {
                64
            } else {
                192
            }
        }),
        SynthKind::SmoothRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let field: Vec<u8> = (0..width * height).map(|_| rng.random()).collect();
            GrayImage::from_fn(width, height, |r, c| {
                let (mut sum, mut n) = (0u32, 0u32);
                for rr in r.saturating_sub(1)..=(r + 1).min(height - 1) {
                    for cc in c.saturating_sub(1)..=(c + 1).min(width - 1) {
                        sum += u32::from(field[rr * width + cc]);
                        n += 1;
                    }
                }
                // rounded mean over the in-bounds cells
                ((sum + n / 2) / n).min(255) as u8
            })
        }
    }
}
