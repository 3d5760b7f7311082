//! Reference implementations kept independent of the library's kernels.

#![allow(dead_code)]

use std::sync::atomic::{AtomicU32, Ordering};
use std::thread;

use hgrms::{BorderMode, DenoiseParams, GrayImage, SynthKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn similar(a: u8, b: u8, alpha: u32) -> bool {
    (i64::from(a) - i64::from(b)).abs() < i64::from(alpha)
}

/// Cardinality by scattering: every pixel increments the count of each
/// window cell that is similar to it, with atomic adds from several threads.
pub fn scatter_cardinality(img: &GrayImage, alpha: u32, beta: u32) -> Vec<u32> {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let b = i64::from(beta);
    let counts: Vec<AtomicU32> = (0..img.len()).map(|_| AtomicU32::new(0)).collect();
    let threads = 4;
    thread::scope(|s| {
        for t in 0..threads {
            let counts = &counts;
            s.spawn(move || {
                for p in (t..img.len()).step_by(threads) {
                    let (r, c) = (p as i64 / w, p as i64 % w);
                    let center = img.pixels()[p];
                    for i in r - b..=r + b {
                        for j in c - b..=c + b {
                            if i >= 0 && i < h && j >= 0 && j < w {
                                let q = (i * w + j) as usize;
                                if similar(img.pixels()[q], center, alpha) {
                                    counts[q].fetch_add(1, Ordering::Relaxed);
                                }
                            }
                        }
                    }
                }
            });
        }
    });
    counts.into_iter().map(AtomicU32::into_inner).collect()
}

/// Straightforward gather cardinality.
pub fn brute_cardinality(img: &GrayImage, alpha: u32, beta: u32) -> Vec<u32> {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let b = i64::from(beta);
    let mut out = vec![0u32; img.len()];
    for r in 0..h {
        for c in 0..w {
            let center = img.pixels()[(r * w + c) as usize];
            let mut n = 0;
            for i in r - b..=r + b {
                for j in c - b..=c + b {
                    if i >= 0
                        && i < h
                        && j >= 0
                        && j < w
                        && similar(img.pixels()[(i * w + j) as usize], center, alpha)
                    {
                        n += 1;
                    }
                }
            }
            out[(r * w + c) as usize] = n;
        }
    }
    out
}

/// One removal pass written as the literal window scan, with floating-point
/// RMS. Returns the new pixels and (flagged, replaced).
pub fn brute_pass(img: &GrayImage, card: &[u32], p: &DenoiseParams) -> (Vec<u8>, usize, usize) {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let b = i64::from(p.beta);
    let px = img.pixels();
    let mut out = px.to_vec();
    let (mut flagged, mut replaced) = (0, 0);
    for r in 0..h {
        for c in 0..w {
            let idx = (r * w + c) as usize;
            if card[idx] >= p.card_threshold {
                continue;
            }
            flagged += 1;
            let (mut sum, mut flag, mut pix_count) = (0f64, 0i64, 0i64);
            for i in r - b..=r + b {
                for j in c - b..=c + b {
                    let inside = i >= 0 && i < h && j >= 0 && j < w;
                    if p.border_mode == BorderMode::Faithful || inside {
                        pix_count += 1;
                    }
                    if inside {
                        let v = px[(i * w + j) as usize];
                        if !similar(v, px[idx], p.alpha) {
                            sum += f64::from(v) * f64::from(v);
                            flag += 1;
                        }
                    }
                }
            }
            if flag > 0 && flag > pix_count - 3 {
                let v = (sum / flag as f64).sqrt().round().clamp(0.0, 255.0) as u8;
                if v != px[idx] {
                    out[idx] = v;
                    replaced += 1;
                }
            }
        }
    }
    (out, flagged, replaced)
}

/// Full driver on top of the brute-force passes.
pub fn brute_denoise(img: &GrayImage, p: &DenoiseParams) -> (GrayImage, Vec<(usize, usize)>) {
    let mut cur = img.clone();
    let mut history = Vec::new();
    for _ in 0..p.k {
        let card = brute_cardinality(&cur, p.alpha, p.beta);
        let (px, flagged, replaced) = brute_pass(&cur, &card, p);
        cur = GrayImage::new(cur.width(), cur.height(), px).unwrap();
        history.push((flagged, replaced));
        if replaced == 0 {
            break;
        }
    }
    (cur, history)
}

/// Random test image: uniform noise, or a smooth field with impulses.
pub fn random_image(rng: &mut ChaCha8Rng, max_w: usize, max_h: usize) -> GrayImage {
    let w = rng.random_range(1..=max_w);
    let h = rng.random_range(1..=max_h);
    if rng.random_bool(0.5) {
        let px = (0..w * h).map(|_| rng.random()).collect();
        GrayImage::new(w, h, px).unwrap()
    } else {
        let mut img = hgrms::synth_image(w, h, rng.random(), SynthKind::SmoothRandom).unwrap();
        let density = rng.random_range(0.0..0.4);
        let spec = hgrms::NoiseSpec::with_density(density, rng.random()).unwrap();
        img = hgrms::inject_sp_noise(&img, &spec).0;
        img
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
