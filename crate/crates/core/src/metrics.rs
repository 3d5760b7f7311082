//! MSE / PSNR against a reference, plus the residual α–β noise count.
//!
//! The peak is fixed at 255 whatever the images actually contain.

use std::cmp::Ordering;
use std::fmt;

use crate::error::Result;
use crate::filter::compute_cardinality;
use crate::image::GrayImage;

const PEAK_SQUARED: f64 = 255.0 * 255.0;

/// Peak signal-to-noise ratio in decibels. `Infinite` iff the images match.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn from_mse(mse: f64) -> Self {
        if mse == 0.0 {
            Psnr::Infinite
        } else {
            Psnr::Finite(10.0 * (PEAK_SQUARED / mse).log10())
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Psnr::Infinite)
    }

    /// `f64::INFINITY` for the infinite case.
    pub fn as_f64(&self) -> f64 {
        match *self {
            Psnr::Finite(db) => db,
            Psnr::Infinite => f64::INFINITY,
        }
    }
}

impl PartialOrd for Psnr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.as_f64().partial_cmp(&other.as_f64())
    }
}

/// Three decimals, or `inf`.
impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(db) => write!(f, "{db:.3}"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

/// Sum of squared differences, exact.
pub fn sse(a: &GrayImage, b: &GrayImage) -> Result<u64> {
    a.same_dims(b)?;
    Ok(a.pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = u64::from(x.abs_diff(y));
            d * d
        })
        .sum())
}

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    Ok(sse(a, b)? as f64 / a.len() as f64)
}

pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<Psnr> {
    Ok(Psnr::from_mse(mse(a, b)?))
}

/// Pixels whose α–β cardinality is still below `card_threshold`.
pub fn residual_noise_count(
    img: &GrayImage,
    alpha: u32,
    beta: u32,
    card_threshold: u32,
) -> Result<usize> {
    Ok(compute_cardinality(img, alpha, beta)?.below(card_threshold))
}
