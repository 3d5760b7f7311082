//! Reproducible salt-and-pepper corruption.
//!
//! Exactly `round(density * N)` distinct pixels are picked by a partial
//! Fisher-Yates shuffle of the pixel indices, driven by ChaCha8
//! (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`). The first
//! `round(salt_ratio * n)` picks, in draw order, become salt (255) and the
//! rest pepper (0).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    density: f64,
    salt_ratio: f64,
    seed: u64,
}

impl NoiseSpec {
    pub fn new(density: f64, salt_ratio: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::InvalidParameter(format!(
                "density must be in [0, 1], got {density}"
            )));
        }
        if !(0.0..=1.0).contains(&salt_ratio) {
            return Err(Error::InvalidParameter(format!(
                "salt ratio must be in [0, 1], got {salt_ratio}"
            )));
        }
        Ok(Self {
            density,
            salt_ratio,
            seed,
        })
    }

    /// Balanced salt and pepper.
    pub fn with_density(density: f64, seed: u64) -> Result<Self> {
        Self::new(density, 0.5, seed)
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn salt_ratio(&self) -> f64 {
        self.salt_ratio
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn corrupted_count(&self, pixels: usize) -> usize {
        (self.density * pixels as f64).round() as usize
    }

    pub fn salt_count(&self, corrupted: usize) -> usize {
        (self.salt_ratio * corrupted as f64).round() as usize
    }
}

/// Which pixels the injector touched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorruptionMask {
    width: usize,
    height: usize,
    flags: Vec<bool>,
}

impl CorruptionMask {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn is_corrupted(&self, row: usize, col: usize) -> bool {
        self.flags[row * self.width + col]
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    /// 255 where corrupted, 0 elsewhere.
    pub fn to_image(&self) -> GrayImage {
        let px = self
            .flags
            .iter()
            .map(|&f| if f { 255 } else { 0 })
            .collect();
        GrayImage::new(self.width, self.height, px).expect("mask shares image dims")
    }
}

pub fn inject_sp_noise(img: &GrayImage, spec: &NoiseSpec) -> (GrayImage, CorruptionMask) {
    let total = img.len();
    let n = spec.corrupted_count(total).min(total);
    let salt = spec.salt_count(n);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut indices: Vec<usize> = (0..total).collect();
    for i in 0..n {
        let j = rng.random_range(i..total);
        indices.swap(i, j);
    }

    let mut out = img.clone();
    let mut flags = vec![false; total];
    let px = out.pixels_mut();
    for (k, &idx) in indices[..n].iter().enumerate() {
        px[idx] = if k < salt { 255 } else { 0 };
        flags[idx] = true;
    }
    let mask = CorruptionMask {
        width: img.width(),
        height: img.height(),
        flags,
    };
    (out, mask)
}
