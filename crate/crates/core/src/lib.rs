//! Salt-and-pepper noise removal by hypergraph root-mean-square filtering.
//!
//! Each pixel is classified by how many α-similar pixels surround it in its
//! β-window (its cardinality). Pixels with almost no similar neighbors are
//! rewritten with the RMS of the neighbors that disagree with them, and the
//! two passes repeat up to `k` times. A serial and a row-parallel engine
//! produce bit-identical results.
//!
//! ```
//! use hgrms::{denoise, DenoiseParams, EngineSpec, GrayImage};
//!
//! let mut img = GrayImage::filled(3, 3, 100).unwrap();
//! img.set(1, 1, 255);
//! let (clean, stats) = denoise(&img, &DenoiseParams::default(), &EngineSpec::serial()).unwrap();
//! assert_eq!(clean, GrayImage::filled(3, 3, 100).unwrap());
//! assert_eq!(stats[0].replaced, 1);
//! ```

pub mod bench;
pub mod cli;
pub mod engine;
pub mod error;
pub mod filter;
pub mod image;
pub mod metrics;
pub mod noise;

pub use engine::{
    compute_cardinality_with, default_workers, denoise, denoise_pass_with, row_blocks,
    run_parallel_pass, EngineMode, EngineSpec,
};
pub use error::{Error, Result};
pub use filter::{
    compute_cardinality, denoise_pass, similar, BorderMode, CardinalityMap, DenoiseParams,
    PassStats,
};
pub use image::{read_pgm, synth_image, write_pgm, GrayImage, PgmEncoding, SynthKind};
pub use metrics::{mse, psnr, residual_noise_count, Psnr};
pub use noise::{inject_sp_noise, CorruptionMask, NoiseSpec};
