//! Serial and row-parallel execution of the two passes, and the iteration
//! driver.
//!
//! The parallel engine splits output rows into contiguous blocks, one per
//! worker. Every worker reads the shared input (and cardinality map) and
//! writes only its own rows; joining the scoped workers is the barrier that
//! separates the cardinality pass from the removal pass and one iteration
//! from the next. Since each row is produced by the same kernel regardless of
//! which thread runs it, the output cannot depend on the worker count.

use std::fmt;
use std::ops::{AddAssign, Range};
use std::str::FromStr;
use std::thread;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::filter::{
    cardinality_row, check_alpha_beta, check_card, removal_row, CardinalityMap, DenoiseParams,
    PassStats, RemovalTally,
};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineMode {
    Serial,
    Parallel,
}

impl FromStr for EngineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "serial" => Ok(Self::Serial),
            "parallel" => Ok(Self::Parallel),
            other => Err(Error::InvalidParameter(format!(
                "unknown engine {other:?} (expected serial or parallel)"
            ))),
        }
    }
}

impl fmt::Display for EngineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Serial => "serial",
            Self::Parallel => "parallel",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EngineSpec {
    mode: EngineMode,
    workers: usize,
}

/// Hardware parallelism, or 1 when it cannot be queried.
pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

impl EngineSpec {
    pub fn serial() -> Self {
        Self {
            mode: EngineMode::Serial,
            workers: 1,
        }
    }

    pub fn parallel(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidParameter("threads must be ≥ 1".into()));
        }
        Ok(Self {
            mode: EngineMode::Parallel,
            workers,
        })
    }

    pub fn new(mode: EngineMode, workers: usize) -> Result<Self> {
        match mode {
            EngineMode::Serial => Ok(Self::serial()),
            EngineMode::Parallel => Self::parallel(workers),
        }
    }

    pub fn mode(&self) -> EngineMode {
        self.mode
    }

    /// Worker count; always 1 for the serial engine.
    pub fn workers(&self) -> usize {
        match self.mode {
            EngineMode::Serial => 1,
            EngineMode::Parallel => self.workers,
        }
    }
}

impl Default for EngineSpec {
    fn default() -> Self {
        Self {
            mode: EngineMode::Parallel,
            workers: default_workers(),
        }
    }
}

/// Contiguous row ranges, at most `workers` of them, none empty.
pub fn row_blocks(height: usize, workers: usize) -> Vec<Range<usize>> {
    let workers = workers.clamp(1, height.max(1));
    let per = height.div_ceil(workers).max(1);
    (0..height)
        .step_by(per)
        .map(|start| start..(start + per).min(height))
        .collect()
}

/// Runs `kernel(row, row_out)` for every row of `out` (rows of `row_len`
/// cells), spreading contiguous row blocks across `workers` scoped threads.
/// Per-row results are summed. Returns once every worker has finished.
pub fn run_parallel_pass<T, S, F>(out: &mut [T], row_len: usize, workers: usize, kernel: F) -> S
where
    T: Send,
    S: Default + AddAssign + Send,
    F: Fn(usize, &mut [T]) -> S + Sync,
{
    assert!(
        row_len > 0 && out.len().is_multiple_of(row_len),
        "buffer is not whole rows"
    );
    let height = out.len() / row_len;
    let blocks = row_blocks(height, workers);
    if blocks.len() <= 1 {
        return run_rows(out, row_len, 0, &kernel);
    }
    let per = blocks[0].len();
    let kernel = &kernel;
    thread::scope(|scope| {
        let handles: Vec<_> = out
            .chunks_mut(per * row_len)
            .zip(blocks)
            .map(|(chunk, block)| {
                scope.spawn(move || run_rows(chunk, row_len, block.start, kernel))
            })
            .collect();
        let mut total = S::default();
        for h in handles {
            total += h.join().expect("worker panicked");
        }
        total
    })
}

fn run_rows<T, S, F>(chunk: &mut [T], row_len: usize, first_row: usize, kernel: &F) -> S
where
    S: Default + AddAssign,
    F: Fn(usize, &mut [T]) -> S,
{
    let mut acc = S::default();
    for (i, row) in chunk.chunks_mut(row_len).enumerate() {
        acc += kernel(first_row + i, row);
    }
    acc
}

/// Unit accumulator for passes that produce no counters.
#[derive(Default)]
struct NoTally;

impl AddAssign for NoTally {
    fn add_assign(&mut self, _: Self) {}
}

fn fill_cardinality(img: &GrayImage, alpha: u32, beta: u32, engine: &EngineSpec, out: &mut [u32]) {
    let w = img.width();
    match engine.mode() {
        EngineMode::Serial => {
            for (row, line) in out.chunks_mut(w).enumerate() {
                cardinality_row(img, alpha, beta, row, line);
            }
        }
        EngineMode::Parallel => {
            run_parallel_pass(out, w, engine.workers(), |row, line: &mut [u32]| {
                cardinality_row(img, alpha, beta, row, line);
                NoTally
            });
        }
    }
}

fn fill_removal(
    img: &GrayImage,
    card: &[u32],
    params: &DenoiseParams,
    engine: &EngineSpec,
    out: &mut [u8],
) -> RemovalTally {
    let w = img.width();
    match engine.mode() {
        EngineMode::Serial => {
            let mut tally = RemovalTally::default();
            for (row, line) in out.chunks_mut(w).enumerate() {
                tally += removal_row(img, card, params, row, line);
            }
            tally
        }
        EngineMode::Parallel => run_parallel_pass(out, w, engine.workers(), |row, line| {
            removal_row(img, card, params, row, line)
        }),
    }
}

pub fn compute_cardinality_with(
    img: &GrayImage,
    alpha: u32,
    beta: u32,
    engine: &EngineSpec,
) -> Result<CardinalityMap> {
    check_alpha_beta(alpha, beta)?;
    let mut counts = vec![0u32; img.len()];
    fill_cardinality(img, alpha, beta, engine, &mut counts);
    Ok(CardinalityMap::from_counts(
        img.width(),
        img.height(),
        counts,
    ))
}

/// One removal pass on the given engine; `iteration` in the stats is 1.
pub fn denoise_pass_with(
    img: &GrayImage,
    card: &CardinalityMap,
    params: &DenoiseParams,
    engine: &EngineSpec,
) -> Result<(GrayImage, PassStats)> {
    params.validate()?;
    check_card(img, card)?;
    let start = Instant::now();
    let mut out = img.clone();
    let tally = fill_removal(img, card.counts(), params, engine, out.pixels_mut());
    let stats = PassStats {
        iteration: 1,
        flagged: tally.flagged,
        replaced: tally.replaced,
        elapsed: start.elapsed(),
    };
    Ok((out, stats))
}

/// Alternates cardinality and removal passes up to `params.k` times,
/// stopping after the first pass that changes nothing.
pub fn denoise(
    img: &GrayImage,
    params: &DenoiseParams,
    engine: &EngineSpec,
) -> Result<(GrayImage, Vec<PassStats>)> {
    params.validate()?;
    let mut current = img.clone();
    let mut scratch = img.clone();
    let mut card = vec![0u32; img.len()];
    let mut history = Vec::with_capacity(params.k as usize);

    for iteration in 1..=params.k {
        let start = Instant::now();
        fill_cardinality(&current, params.alpha, params.beta, engine, &mut card);
        let tally = fill_removal(&current, &card, params, engine, scratch.pixels_mut());
        std::mem::swap(&mut current, &mut scratch);
        history.push(PassStats {
            iteration,
            flagged: tally.flagged,
            replaced: tally.replaced,
            elapsed: start.elapsed(),
        });
        if tally.replaced == 0 {
            break;
        }
    }
    Ok((current, history))
}
