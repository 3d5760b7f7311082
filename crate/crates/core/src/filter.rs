//! Hypergraph root-mean-square classification and replacement.
//!
//! A pixel's hyperedge is the set of cells in its `(2β+1)²` window whose
//! intensity lies strictly within `α` of the center. The cardinality pass
//! counts that set for every pixel (center included). The removal pass
//! rewrites each pixel whose cardinality is below the threshold with the
//! rounded root mean square of its dissimilar neighbors, provided nearly the
//! whole window disagrees with it.
//!
//! Both passes are expressed as per-row kernels so the serial and parallel
//! engines in [`crate::engine`] run exactly the same arithmetic.

use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::image::{dims_match, GrayImage};

pub const DEFAULT_ALPHA: u32 = 20;
pub const DEFAULT_BETA: u32 = 1;
pub const DEFAULT_ITERATIONS: u32 = 5;
pub const DEFAULT_CARD_THRESHOLD: u32 = 3;

/// How the window size is counted for the replacement test at image borders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum BorderMode {
    /// The full `(2β+1)²` window, even where part of it falls off the image.
    /// With β = 1 this makes corner pixels irreplaceable.
    #[default]
    Faithful,
    /// Only the in-bounds cells of the window.
    InBounds,
}

impl FromStr for BorderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "faithful" => Ok(Self::Faithful),
            "inbounds" | "in-bounds" => Ok(Self::InBounds),
            other => Err(Error::InvalidParameter(format!(
                "unknown border mode {other:?} (expected faithful or inbounds)"
            ))),
        }
    }
}

impl fmt::Display for BorderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Faithful => "faithful",
            Self::InBounds => "inbounds",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DenoiseParams {
    /// Intensity tolerance; `a` and `b` are similar iff `|a - b| < alpha`.
    pub alpha: u32,
    /// Window radius.
    pub beta: u32,
    /// Maximum number of cardinality + removal iterations.
    pub k: u32,
    /// Pixels with cardinality below this are candidates for replacement.
    pub card_threshold: u32,
    pub border_mode: BorderMode,
}

impl Default for DenoiseParams {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            k: DEFAULT_ITERATIONS,
            card_threshold: DEFAULT_CARD_THRESHOLD,
            border_mode: BorderMode::Faithful,
        }
    }
}

impl DenoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(1..=255).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be ≥ 1 and ≤ 255, got {}",
                self.alpha
            )));
        }
        if self.beta < 1 {
            return Err(Error::InvalidParameter("beta must be ≥ 1".into()));
        }
        if self.k < 1 {
            return Err(Error::InvalidParameter("iterations must be ≥ 1".into()));
        }
        if self.card_threshold < 1 {
            return Err(Error::InvalidParameter(
                "cardinality threshold must be ≥ 1".into(),
            ));
        }
        Ok(())
    }

    /// `(2β+1)²`.
    pub fn window_size(&self) -> u32 {
        window_size(self.beta)
    }
}

pub(crate) fn check_alpha_beta(alpha: u32, beta: u32) -> Result<()> {
    DenoiseParams {
        alpha,
        beta,
        ..DenoiseParams::default()
    }
    .validate()
}

#[inline]
pub fn window_size(beta: u32) -> u32 {
    let side = 2 * beta + 1;
    side * side
}

/// Strict, symmetric α-similarity.
#[inline]
pub fn similar(a: u8, b: u8, alpha: u32) -> bool {
    u32::from(a.abs_diff(b)) < alpha
}

/// Per-pixel count of α-similar cells in the β-window, center included.
#[derive(Clone, PartialEq, Eq)]
pub struct CardinalityMap {
    width: usize,
    height: usize,
    counts: Vec<u32>,
}

impl CardinalityMap {
    pub(crate) fn from_counts(width: usize, height: usize, counts: Vec<u32>) -> Self {
        debug_assert_eq!(counts.len(), width * height);
        Self {
            width,
            height,
            counts,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.counts[row * self.width + col]
    }

    /// Number of pixels whose count is below `threshold`.
    pub fn below(&self, threshold: u32) -> usize {
        self.counts.iter().filter(|&&c| c < threshold).count()
    }

    pub fn into_counts(self) -> Vec<u32> {
        self.counts
    }
}

impl fmt::Debug for CardinalityMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CardinalityMap")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

/// What one iteration of the driver did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassStats {
    /// 1-based.
    pub iteration: u32,
    pub flagged: usize,
    /// Pixels whose value changed. Never exceeds `flagged`.
    pub replaced: usize,
    pub elapsed: Duration,
}

/// Per-row/per-worker counters of the removal pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RemovalTally {
    pub flagged: usize,
    pub replaced: usize,
}

impl AddAssign for RemovalTally {
    fn add_assign(&mut self, rhs: Self) {
        self.flagged += rhs.flagged;
        self.replaced += rhs.replaced;
    }
}

#[inline]
fn span(center: usize, radius: usize, len: usize) -> (usize, usize) {
    (
        center.saturating_sub(radius),
        (center + radius).min(len - 1),
    )
}

/// Fills `out` (one image row) with cardinalities for row `row`.
pub(crate) fn cardinality_row(img: &GrayImage, alpha: u32, beta: u32, row: usize, out: &mut [u32]) {
    let (w, h) = (img.width(), img.height());
    let radius = beta as usize;
    let px = img.pixels();
    let (r0, r1) = span(row, radius, h);
    for (c, slot) in out.iter_mut().enumerate() {
        let center = px[row * w + c];
        let (c0, c1) = span(c, radius, w);
        let mut count = 0u32;
        for rr in r0..=r1 {
            let line = &px[rr * w + c0..=rr * w + c1];
            count += line.iter().filter(|&&v| similar(v, center, alpha)).count() as u32;
        }
        *slot = count;
    }
}

/// Fills `out` (one image row) with the removal-pass output for row `row`.
pub(crate) fn removal_row(
    img: &GrayImage,
    card: &[u32],
    params: &DenoiseParams,
    row: usize,
    out: &mut [u8],
) -> RemovalTally {
    let (w, h) = (img.width(), img.height());
    let radius = params.beta as usize;
    let px = img.pixels();
    let (r0, r1) = span(row, radius, h);
    let mut tally = RemovalTally::default();
    for (c, slot) in out.iter_mut().enumerate() {
        let idx = row * w + c;
        let center = px[idx];
        *slot = center;
        if card[idx] >= params.card_threshold {
            continue;
        }
        tally.flagged += 1;

        let (c0, c1) = span(c, radius, w);
        let mut sum = 0u64;
        let mut flag = 0u32;
        for rr in r0..=r1 {
            for &v in &px[rr * w + c0..=rr * w + c1] {
                if !similar(v, center, params.alpha) {
                    sum += u64::from(v) * u64::from(v);
                    flag += 1;
                }
            }
        }
        let pix_count = match params.border_mode {
            BorderMode::Faithful => params.window_size(),
            BorderMode::InBounds => ((r1 - r0 + 1) * (c1 - c0 + 1)) as u32,
        };
        // flag > pix_count - 3, kept unsigned; flag == 0 has nothing to average
        if flag > 0 && flag + 3 > pix_count {
            let value = rms_round(sum, flag);
            if value != center {
                *slot = value;
                tally.replaced += 1;
            }
        }
    }
    tally
}

/// `round(sqrt(sum / count))`, rounding halves away from zero, clamped to 255.
///
/// Computed exactly: the result is the largest `n` with
/// `(2n - 1)² · count ≤ 4 · sum`.
pub fn rms_round(sum: u64, count: u32) -> u8 {
    assert!(count > 0, "rms of an empty set");
    let count = u128::from(count);
    let quad = 4 * u128::from(sum);
    let mut n = ((sum as f64) / (count as f64)).sqrt().round() as u128;
    while n > 0 && (2 * n - 1) * (2 * n - 1) * count > quad {
        n -= 1;
    }
    while (2 * n + 1) * (2 * n + 1) * count <= quad {
        n += 1;
    }
    n.min(255) as u8
}

/// Serial cardinality pass.
pub fn compute_cardinality(img: &GrayImage, alpha: u32, beta: u32) -> Result<CardinalityMap> {
    check_alpha_beta(alpha, beta)?;
    let w = img.width();
    let mut counts = vec![0u32; img.len()];
    for (row, out) in counts.chunks_mut(w).enumerate() {
        cardinality_row(img, alpha, beta, row, out);
    }
    Ok(CardinalityMap::from_counts(w, img.height(), counts))
}

pub(crate) fn check_card(img: &GrayImage, card: &CardinalityMap) -> Result<()> {
    dims_match((img.width(), img.height()), (card.width, card.height))
}

/// Serial removal pass. Reads only `img`; writes a fresh image.
pub fn denoise_pass(
    img: &GrayImage,
    card: &CardinalityMap,
    params: &DenoiseParams,
) -> Result<(GrayImage, PassStats)> {
    crate::engine::denoise_pass_with(img, card, params, &crate::engine::EngineSpec::serial())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn impulse3() -> GrayImage {
        let mut img = GrayImage::filled(3, 3, 100).unwrap();
        img.set(1, 1, 255);
        img
    }

    #[test]
    fn similarity_is_strict() {
        assert!(similar(100, 119, 20));
        assert!(!similar(100, 120, 20));
        assert!(!similar(120, 100, 20));
        for v in [0u8, 17, 255] {
            for a in [1u32, 20, 255] {
                assert!(similar(v, v, a));
            }
        }
    }

    #[test]
    fn constant_cardinality() {
        let img = GrayImage::filled(3, 3, 100).unwrap();
        let card = compute_cardinality(&img, 20, 1).unwrap();
        assert_eq!(card.counts(), &[4, 6, 4, 6, 9, 6, 4, 6, 4]);
    }

    #[test]
    fn impulse_cardinality() {
        let card = compute_cardinality(&impulse3(), 20, 1).unwrap();
        assert_eq!(card.counts(), &[3, 5, 3, 5, 1, 5, 3, 5, 3]);
    }

    #[test]
    fn single_pixel_cardinality() {
        let img = GrayImage::filled(1, 1, 7).unwrap();
        for alpha in [1, 20, 255] {
            assert_eq!(compute_cardinality(&img, alpha, 3).unwrap().counts(), &[1]);
        }
    }

    #[test]
    fn impulse_pass_restores_center() {
        let img = impulse3();
        let card = compute_cardinality(&img, 20, 1).unwrap();
        let (out, stats) = denoise_pass(&img, &card, &DenoiseParams::default()).unwrap();
        assert_eq!(out, GrayImage::filled(3, 3, 100).unwrap());
        assert_eq!((stats.flagged, stats.replaced), (1, 1));
        assert_eq!(stats.iteration, 1);
    }

    #[test]
    fn corner_fork_between_border_modes() {
        let mut img = GrayImage::filled(4, 4, 50).unwrap();
        img.set(0, 0, 255);
        let card = compute_cardinality(&img, 20, 1).unwrap();
        assert_eq!(card.get(0, 0), 1);

        let faithful = DenoiseParams::default();
        let (out, stats) = denoise_pass(&img, &card, &faithful).unwrap();
        assert_eq!(out, img);
        assert_eq!((stats.flagged, stats.replaced), (1, 0));

        let inbounds = DenoiseParams {
            border_mode: BorderMode::InBounds,
            ..faithful
        };
        let (out, stats) = denoise_pass(&img, &card, &inbounds).unwrap();
        assert_eq!(out, GrayImage::filled(4, 4, 50).unwrap());
        assert_eq!(stats.replaced, 1);
    }

    #[test]
    fn tiny_inbounds_window_without_dissimilar_cells() {
        // pix_count 1 makes the threshold trivially true, but there is nothing to average
        let img = GrayImage::filled(1, 1, 9).unwrap();
        let params = DenoiseParams {
            border_mode: BorderMode::InBounds,
            card_threshold: 5,
            ..DenoiseParams::default()
        };
        let card = compute_cardinality(&img, 20, 1).unwrap();
        let (out, stats) = denoise_pass(&img, &card, &params).unwrap();
        assert_eq!(out, img);
        assert_eq!((stats.flagged, stats.replaced), (1, 0));
    }

    #[test]
    fn mismatched_map_is_rejected() {
        let img = GrayImage::filled(3, 3, 1).unwrap();
        let other = GrayImage::filled(3, 4, 1).unwrap();
        let card = compute_cardinality(&other, 20, 1).unwrap();
        assert!(matches!(
            denoise_pass(&img, &card, &DenoiseParams::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rms_rounding() {
        assert_eq!(rms_round(8 * 100 * 100, 8), 100);
        assert_eq!(rms_round(0, 3), 0);
        assert_eq!(rms_round(255 * 255 * 9, 9), 255);
        // sqrt(2) -> 1, sqrt(2.25) = 1.5 -> 2 (half away from zero), sqrt(2.2) -> 1
        assert_eq!(rms_round(2, 1), 1);
        assert_eq!(rms_round(9, 4), 2);
        assert_eq!(rms_round(11, 5), 1);
        // brute-force against floating point away from ties
        for sum in 0..3000u64 {
            for count in 1..10u32 {
                let x = (sum as f64 / f64::from(count)).sqrt();
                if (x.fract() - 0.5).abs() > 1e-9 {
                    assert_eq!(rms_round(sum, count), x.round() as u8, "{sum}/{count}");
                }
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(DenoiseParams::default().validate().is_ok());
        let bad = |f: fn(&mut DenoiseParams)| {
            let mut p = DenoiseParams::default();
            f(&mut p);
            p.validate().is_err()
        };
        assert!(bad(|p| p.alpha = 0));
        assert!(bad(|p| p.alpha = 256));
        assert!(bad(|p| p.beta = 0));
        assert!(bad(|p| p.k = 0));
        assert!(bad(|p| p.card_threshold = 0));
        let msg = check_alpha_beta(0, 1).unwrap_err().to_string();
        assert!(msg.contains("alpha must be ≥ 1"), "{msg}");
    }

    #[test]
    fn border_mode_parsing() {
        assert_eq!(
            "faithful".parse::<BorderMode>().unwrap(),
            BorderMode::Faithful
        );
        assert_eq!(
            "InBounds".parse::<BorderMode>().unwrap(),
            BorderMode::InBounds
        );
        assert!("clamp".parse::<BorderMode>().is_err());
    }
}
