//! `hgrms` command line.
//!
//! Exit codes: 0 success, 1 runtime or data error (undecodable image,
//! dimension mismatch), 2 usage error (bad flags, unreadable or unwritable
//! paths).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{run_benchmark, speedup_by_size, write_csv, BenchConfig};
use crate::engine::{default_workers, denoise, EngineMode, EngineSpec};
use crate::error::Error;
use crate::filter::{
    compute_cardinality, window_size, BorderMode, DenoiseParams, DEFAULT_ALPHA, DEFAULT_BETA,
    DEFAULT_CARD_THRESHOLD, DEFAULT_ITERATIONS,
};
use crate::image::{read_pgm, write_pgm, write_plain_samples, GrayImage, PgmEncoding, SynthKind};
use crate::metrics::{mse, Psnr};
use crate::noise::{inject_sp_noise, NoiseSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hgrms",
    version,
    about = "Salt-and-pepper denoising with hypergraph RMS filtering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Remove salt-and-pepper noise from a PGM image.
    Denoise {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value = "parallel")]
        engine: String,
        /// Worker threads for the parallel engine [default: hardware threads]
        #[arg(long)]
        threads: Option<usize>,
        /// Print one line per iteration.
        #[arg(long)]
        stats: bool,
    },
    /// Corrupt a PGM image with salt-and-pepper noise.
    AddNoise {
        input: PathBuf,
        output: PathBuf,
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0.5)]
        salt_ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the corruption mask (255 = corrupted) as a P5 PGM.
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// PSNR and MSE between two PGM images.
    Psnr { a: PathBuf, b: PathBuf },
    /// Dump the cardinality map as a plain P2 PGM.
    Cardmap {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: u32,
        #[arg(long, default_value_t = DEFAULT_BETA)]
        beta: u32,
    },
    /// Time serial against parallel denoising over a grid of images and noise levels.
    Bench {
        /// Comma-separated square sizes [default: 128,256,512,1024,2048, or none with --corpus]
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long, default_value = "0.05,0.10,0.15,0.20")]
        densities: String,
        /// Directory of PGM files to include.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Comma-separated parallel worker counts [default: hardware threads]
        #[arg(long)]
        threads: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        filter: FilterArgs,
    },
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: u32,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: u32,
    /// Maximum iterations (k).
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: u32,
    #[arg(long, default_value_t = DEFAULT_CARD_THRESHOLD)]
    card_threshold: u32,
    #[arg(long, default_value = "faithful")]
    border: String,
}

impl FilterArgs {
    fn params(&self) -> Result<DenoiseParams, CliError> {
        let params = DenoiseParams {
            alpha: self.alpha,
            beta: self.beta,
            k: self.iters,
            card_threshold: self.card_threshold,
            border_mode: self.border.parse::<BorderMode>().map_err(usage)?,
        };
        params.validate().map_err(usage)?;
        Ok(params)
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl ToString) -> CliError {
    CliError::Runtime(e.to_string())
}

fn load(path: &Path) -> Result<GrayImage, CliError> {
    let bytes = std::fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    read_pgm(&bytes).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn store(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_list<T: std::str::FromStr>(what: &str, text: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| usage(format!("malformed {what} list entry {s:?}")))
        })
        .collect()
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Denoise {
            input,
            output,
            filter,
            engine,
            threads,
            stats,
        } => {
            let params = filter.params()?;
            let mode = engine.parse::<EngineMode>().map_err(usage)?;
            let engine =
                EngineSpec::new(mode, threads.unwrap_or_else(default_workers)).map_err(usage)?;
            let img = load(&input)?;
            let (restored, history) = denoise(&img, &params, &engine).map_err(runtime)?;
            store(&output, &write_pgm(&restored, PgmEncoding::Binary))?;
            if stats {
                for s in &history {
                    writeln!(
                        out,
                        "iter={} flagged={} replaced={} ms={:.3}",
                        s.iteration,
                        s.flagged,
                        s.replaced,
                        s.elapsed.as_secs_f64() * 1e3
                    )
                    .map_err(runtime)?;
                }
            }
            Ok(())
        }
        Command::AddNoise {
            input,
            output,
            density,
            salt_ratio,
            seed,
            mask,
        } => {
            let spec = NoiseSpec::new(density, salt_ratio, seed).map_err(usage)?;
            let img = load(&input)?;
            let (noisy, corruption) = inject_sp_noise(&img, &spec);
            store(&output, &write_pgm(&noisy, PgmEncoding::Binary))?;
            if let Some(path) = mask {
                store(
                    &path,
                    &write_pgm(&corruption.to_image(), PgmEncoding::Binary),
                )?;
            }
            Ok(())
        }
        Command::Psnr { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let mse = mse(&a, &b).map_err(runtime)?;
            writeln!(out, "psnr_db={} mse={mse:.3}", Psnr::from_mse(mse)).map_err(runtime)
        }
        Command::Cardmap {
            input,
            output,
            alpha,
            beta,
        } => {
            let img = load(&input)?;
            let card = compute_cardinality(&img, alpha, beta).map_err(usage)?;
            let bytes = write_plain_samples(
                card.width(),
                card.height(),
                window_size(beta),
                card.counts().iter().copied(),
            );
            store(&output, &bytes)
        }
        Command::Bench {
            sizes,
            densities,
            corpus,
            reps,
            threads,
            seed,
            out: csv_path,
            filter,
        } => {
            let params = filter.params()?;
            let sizes = match (&sizes, &corpus) {
                (Some(list), _) => parse_list("sizes", list)?,
                (None, Some(_)) => Vec::new(),
                (None, None) => crate::bench::DEFAULT_SIZES.to_vec(),
            };
            let workers: Vec<usize> = match &threads {
                Some(list) => parse_list("threads", list)?,
                None => vec![default_workers()],
            };
            let mut engines = vec![EngineSpec::serial()];
            for w in workers {
                engines.push(EngineSpec::parallel(w).map_err(usage)?);
            }
            let cfg = BenchConfig {
                corpus,
                sizes,
                synth_kind: SynthKind::SmoothRandom,
                densities: parse_list("densities", &densities)?,
                engines,
                repetitions: reps,
                params,
                seed,
            };
            cfg.validate().map_err(usage)?;
            let report = run_benchmark(&cfg).map_err(|e| match e {
                Error::InvalidParameter(_) | Error::EmptyImageSet => usage(e),
                other => runtime(other),
            })?;
            for skip in &report.skipped {
                let _ = writeln!(
                    err,
                    "warning: skipped {}: {}",
                    skip.path.display(),
                    skip.reason
                );
            }
            store(&csv_path, &write_csv(&report.records))?;
            for ((w, h), speedup) in speedup_by_size(&report.records) {
                let size = if w == h {
                    w.to_string()
                } else {
                    format!("{w}x{h}")
                };
                writeln!(out, "size={size} speedup={speedup:.3}").map_err(runtime)?;
            }
            Ok(())
        }
    }
}
