//! Timing and restoration-quality grid: images × noise densities × engines.
//!
//! Cells run one at a time. Within a cell every engine sees the same noisy
//! image; the reported time is the median over the repetitions of the full
//! `denoise` call (all iterations), excluding I/O and noise injection.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::engine::{denoise, EngineMode, EngineSpec};
use crate::error::{Error, Result};
use crate::filter::DenoiseParams;
use crate::image::{read_pgm, synth_image, GrayImage, SynthKind};
use crate::metrics::{psnr, Psnr};
use crate::noise::{inject_sp_noise, NoiseSpec};

pub const DEFAULT_SIZES: [usize; 5] = [128, 256, 512, 1024, 2048];
pub const DEFAULT_DENSITIES: [f64; 4] = [0.05, 0.10, 0.15, 0.20];
pub const DEFAULT_REPETITIONS: usize = 5;

pub const CSV_HEADER: &str = "image_id,width,height,noise_pct,engine,workers,iterations_run,total_ms,psnr_noisy_db,psnr_denoised_db,replaced_total";

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Directory of `.pgm` files, used in addition to the synthetic sizes.
    pub corpus: Option<PathBuf>,
    /// Square synthetic images of these side lengths.
    pub sizes: Vec<usize>,
    pub synth_kind: SynthKind,
    pub densities: Vec<f64>,
    pub engines: Vec<EngineSpec>,
    pub repetitions: usize,
    pub params: DenoiseParams,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            sizes: DEFAULT_SIZES.to_vec(),
            synth_kind: SynthKind::SmoothRandom,
            densities: DEFAULT_DENSITIES.to_vec(),
            engines: vec![EngineSpec::serial(), EngineSpec::default()],
            repetitions: DEFAULT_REPETITIONS,
            params: DenoiseParams::default(),
            seed: 0,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidParameter("repetitions must be ≥ 1".into()));
        }
        if self.corpus.is_none() && self.sizes.is_empty() {
            return Err(Error::EmptyImageSet);
        }
        if let Some(&d) = self.densities.iter().find(|d| !(0.0..=1.0).contains(*d)) {
            return Err(Error::InvalidParameter(format!(
                "density must be in [0, 1], got {d}"
            )));
        }
        if self.densities.is_empty() {
            return Err(Error::InvalidParameter("no noise densities given".into()));
        }
        if self.engines.is_empty() {
            return Err(Error::InvalidParameter("no engines given".into()));
        }
        if self.sizes.contains(&0) {
            return Err(Error::InvalidParameter("image size must be ≥ 1".into()));
        }
        self.params.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub image_id: String,
    pub width: usize,
    pub height: usize,
    pub noise_pct: f64,
    pub engine: EngineMode,
    pub workers: usize,
    pub iterations_run: usize,
    /// Median wall time of the denoise call, in milliseconds.
    pub total_ms: f64,
    pub psnr_noisy_db: Psnr,
    pub psnr_denoised_db: Psnr,
    pub replaced_total: usize,
}

/// A corpus file that could not be used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedSource {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub skipped: Vec<SkippedSource>,
}

#[derive(Debug, Clone)]
pub struct BenchImage {
    pub id: String,
    pub image: GrayImage,
}

/// Every readable `.pgm` in `dir`, sorted by file name.
pub fn load_corpus(dir: &Path) -> Result<(Vec<BenchImage>, Vec<SkippedSource>)> {
    let entries = std::fs::read_dir(dir).map_err(|e| {
        Error::InvalidParameter(format!("cannot read corpus {}: {e}", dir.display()))
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .is_some_and(|ext| ext.eq_ignore_ascii_case("pgm"))
        })
        .collect();
    paths.sort();

    let mut images = Vec::new();
    let mut skipped = Vec::new();
    for path in paths {
        let decoded = std::fs::read(&path)
            .map_err(|e| e.to_string())
            .and_then(|bytes| read_pgm(&bytes).map_err(|e| e.to_string()));
        match decoded {
            Ok(image) => images.push(BenchImage {
                id: path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                image,
            }),
            Err(reason) => skipped.push(SkippedSource { path, reason }),
        }
    }
    Ok((images, skipped))
}

fn median(mut samples: Vec<Duration>) -> Duration {
    samples.sort_unstable();
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2
    }
}

/// Runs one (image, density) cell across all configured engines.
pub fn run_cell(
    id: &str,
    clean: &GrayImage,
    density: f64,
    cfg: &BenchConfig,
) -> Result<Vec<BenchRecord>> {
    let spec = NoiseSpec::with_density(density, cfg.seed)?;
    let (noisy, _) = inject_sp_noise(clean, &spec);
    let psnr_noisy = psnr(clean, &noisy)?;

    let mut records = Vec::with_capacity(cfg.engines.len());
    for engine in &cfg.engines {
        let mut times = Vec::with_capacity(cfg.repetitions);
        let mut last = None;
        for _ in 0..cfg.repetitions {
            let start = Instant::now();
            let result = denoise(&noisy, &cfg.params, engine)?;
            times.push(start.elapsed());
            last = Some(result);
        }
        let (restored, stats) = last.expect("at least one repetition");
        records.push(BenchRecord {
            image_id: id.to_owned(),
            width: clean.width(),
            height: clean.height(),
            noise_pct: density * 100.0,
            engine: engine.mode(),
            workers: engine.workers(),
            iterations_run: stats.len(),
            total_ms: median(times).as_secs_f64() * 1e3,
            psnr_noisy_db: psnr_noisy,
            psnr_denoised_db: psnr(clean, &restored)?,
            replaced_total: stats.iter().map(|s| s.replaced).sum(),
        });
    }
    Ok(records)
}

pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let mut report = BenchReport::default();
    let mut images = Vec::new();
    if let Some(dir) = &cfg.corpus {
        let (found, skipped) = load_corpus(dir)?;
        images.extend(found);
        report.skipped = skipped;
    }
    for &size in &cfg.sizes {
        images.push(BenchImage {
            id: format!("{}-{size}x{size}", cfg.synth_kind),
            image: synth_image(size, size, cfg.seed, cfg.synth_kind)?,
        });
    }
    if images.is_empty() {
        return Err(Error::EmptyImageSet);
    }

    for img in &images {
        for &density in &cfg.densities {
            report
                .records
                .extend(run_cell(&img.id, &img.image, density, cfg)?);
        }
    }
    Ok(report)
}

/// Serial time over the fastest parallel time, summed per image size across
/// all cells of that size. Sizes lacking either engine are omitted.
pub fn speedup_by_size(records: &[BenchRecord]) -> Vec<((usize, usize), f64)> {
    // size -> (image_id, noise_pct) -> (serial, best parallel)
    type Cell = (Option<f64>, Option<f64>);
    let mut cells: BTreeMap<(usize, usize), BTreeMap<(String, u64), Cell>> = BTreeMap::new();
    for r in records {
        let slot = cells
            .entry((r.width, r.height))
            .or_default()
            .entry((r.image_id.clone(), r.noise_pct.to_bits()))
            .or_default();
        match r.engine {
            EngineMode::Serial => slot.0 = Some(slot.0.map_or(r.total_ms, |t| t.min(r.total_ms))),
            EngineMode::Parallel => slot.1 = Some(slot.1.map_or(r.total_ms, |t| t.min(r.total_ms))),
        }
    }
    cells
        .into_iter()
        .filter_map(|(size, by_cell)| {
            let (mut serial, mut parallel) = (0.0, 0.0);
            for (s, p) in by_cell.into_values() {
                if let (Some(s), Some(p)) = (s, p) {
                    serial += s;
                    parallel += p;
                }
            }
            (parallel > 0.0).then(|| (size, serial / parallel))
        })
        .collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn write_csv(records: &[BenchRecord]) -> Vec<u8> {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{:.3},{},{},{},{:.3},{},{},{}",
            csv_field(&r.image_id),
            r.width,
            r.height,
            r.noise_pct,
            r.engine,
            r.workers,
            r.iterations_run,
            r.total_ms,
            r.psnr_noisy_db,
            r.psnr_denoised_db,
            r.replaced_total
        );
    }
    out.into_bytes()
}
