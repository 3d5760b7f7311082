mod common;

use hgrms::{
    compute_cardinality, denoise, denoise_pass, BorderMode, DenoiseParams, EngineSpec, GrayImage,
};
use proptest::prelude::*;

fn image(max: usize) -> impl Strategy<Value = GrayImage> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        prop_oneof![
            proptest::collection::vec(any::<u8>(), w * h),
            // mostly flat with impulses
            proptest::collection::vec(
                prop_oneof![6 => Just(120u8), 1 => Just(0u8), 1 => Just(255u8), 1 => 100u8..140],
                w * h
            ),
        ]
        .prop_map(move |px| GrayImage::new(w, h, px).unwrap())
    })
}

fn params() -> impl Strategy<Value = DenoiseParams> {
    (1u32..=80, 1u32..=3, 1u32..=5, 1u32..=6, any::<bool>()).prop_map(
        |(alpha, beta, k, card_threshold, inb)| DenoiseParams {
            alpha,
            beta,
            k,
            card_threshold,
            border_mode: if inb {
                BorderMode::InBounds
            } else {
                BorderMode::Faithful
            },
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matches_brute_force_driver(img in image(20), p in params()) {
        let (expected, history) = common::brute_denoise(&img, &p);
        let (got, stats) = denoise(&img, &p, &EngineSpec::serial()).unwrap();
        prop_assert_eq!(got, expected);
        let counts: Vec<_> = stats.iter().map(|s| (s.flagged, s.replaced)).collect();
        prop_assert_eq!(counts, history);
    }

    #[test]
    fn parallel_equals_serial(img in image(32), p in params(), workers in 1usize..10) {
        let serial = denoise(&img, &p, &EngineSpec::serial()).unwrap();
        let parallel = denoise(&img, &p, &EngineSpec::parallel(workers).unwrap()).unwrap();
        prop_assert_eq!(serial.0, parallel.0);
        prop_assert_eq!(serial.1.len(), parallel.1.len());
    }

    #[test]
    fn gather_equals_scatter(img in image(8), alpha in 1u32..=255, beta in 1u32..=3) {
        let gather = compute_cardinality(&img, alpha, beta).unwrap();
        prop_assert_eq!(gather.counts(), &common::scatter_cardinality(&img, alpha, beta)[..]);
    }

    #[test]
    fn cardinality_bounds(img in image(24), alpha in 1u32..=255, beta in 1u32..=3) {
        let card = compute_cardinality(&img, alpha, beta).unwrap();
        let b = beta as usize;
        for r in 0..img.height() {
            for c in 0..img.width() {
                let rows = (r + b).min(img.height() - 1) - r.saturating_sub(b) + 1;
                let cols = (c + b).min(img.width() - 1) - c.saturating_sub(b) + 1;
                let n = card.get(r, c);
                prop_assert!(n >= 1);
                prop_assert!(n as usize <= rows * cols);
                prop_assert!(n <= (2 * beta + 1).pow(2));
            }
        }
    }

    #[test]
    fn unflagged_pixels_untouched(img in image(24), p in params()) {
        let card = compute_cardinality(&img, p.alpha, p.beta).unwrap();
        let (out, stats) = denoise_pass(&img, &card, &p).unwrap();
        prop_assert!(stats.replaced <= stats.flagged);
        for (i, (&a, &b)) in img.pixels().iter().zip(out.pixels()).enumerate() {
            if card.counts()[i] >= p.card_threshold {
                prop_assert_eq!(a, b);
            }
        }
        let changed = img.pixels().iter().zip(out.pixels()).filter(|(a, b)| a != b).count();
        prop_assert_eq!(changed, stats.replaced);
    }

    #[test]
    fn fixed_point_is_stable(img in image(20), p in params()) {
        let (out, stats) = denoise(&img, &p, &EngineSpec::serial()).unwrap();
        if stats.last().unwrap().replaced == 0 {
            let card = compute_cardinality(&out, p.alpha, p.beta).unwrap();
            let (again, s) = denoise_pass(&out, &card, &p).unwrap();
            prop_assert_eq!(s.replaced, 0);
            prop_assert_eq!(again, out);
        }
    }

    #[test]
    fn isolated_impulse_restored(
        w in 3usize..12, h in 3usize..12, v in any::<u8>(), spike in any::<u8>(),
        alpha in 1u32..=255, seed in any::<u64>(),
    ) {
        prop_assume!(u32::from(v.abs_diff(spike)) >= alpha);
        let r = 1 + (seed as usize % (h - 2));
        let c = 1 + ((seed >> 32) as usize % (w - 2));
        let mut img = GrayImage::filled(w, h, v).unwrap();
        img.set(r, c, spike);
        let p = DenoiseParams { alpha, ..DenoiseParams::default() };
        let card = compute_cardinality(&img, alpha, 1).unwrap();
        let (out, stats) = denoise_pass(&img, &card, &p).unwrap();
        prop_assert_eq!(out, GrayImage::filled(w, h, v).unwrap());
        prop_assert_eq!(stats.replaced, 1);
    }

    #[test]
    fn faithful_corners_never_replaced(img in image(16), alpha in 1u32..=255, threshold in 1u32..=9) {
        let p = DenoiseParams { alpha, card_threshold: threshold, ..DenoiseParams::default() };
        let card = compute_cardinality(&img, alpha, 1).unwrap();
        let (out, _) = denoise_pass(&img, &card, &p).unwrap();
        let (w, h) = (img.width(), img.height());
        for (r, c) in [(0, 0), (0, w - 1), (h - 1, 0), (h - 1, w - 1)] {
            prop_assert_eq!(out.get(r, c), img.get(r, c));
        }
    }
}
