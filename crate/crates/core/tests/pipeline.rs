use proptest::prelude::*;

use pmi_sampler::scores::{leaky_map, score_video, series_from_raw};
use pmi_sampler::selector::{dense_clip_select, pad_repeat, sample, segment, select, SamplerConfig, SelectMode};
use pmi_sampler::synth::{render, Background, SceneSpec, Sprite};
use pmi_sampler::{FrameSequence, MetricKind, ScoreConfig};

fn small_scene(frames: usize, jitter: usize, seed: u64) -> FrameSequence {
    render(&SceneSpec {
        height: 32,
        width: 32,
        channels: 1,
        frames,
        background: Background::Noise,
        sprite: Sprite { size: 6, intensity: 1.0, origin: (4, 4), velocity: (1, 1) },
        motion_window: Some((frames / 3, frames / 3 + 10)),
        camera_jitter: jitter,
        seed,
    })
    .unwrap()
}

fn small_config() -> ScoreConfig {
    ScoreConfig { patch_size: 2, ..ScoreConfig::default() }
}

fn raw_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..50.0, 2..60).prop_map(|mut v| {
        v[0] = 0.0;
        v
    })
}

proptest! {
    #[test]
    fn pipeline_outputs_are_distributions(raw in raw_strategy(), alpha in 0.0f64..=1.0, euclid in any::<bool>()) {
        let metric = if euclid { MetricKind::Euclidean } else { MetricKind::Pmi };
        let t = raw.len();
        let cfg = ScoreConfig { alpha, ..ScoreConfig::default() };
        let s = series_from_raw(metric, raw.clone(), vec![false; t], &cfg).unwrap();
        let sum_n: f64 = s.normalized.iter().sum();
        let sum_r: f64 = s.remapped.iter().sum();
        prop_assert!((sum_n - 1.0).abs() <= 1e-9);
        prop_assert!((sum_r - 1.0).abs() <= 1e-9);
        prop_assert!(s.remapped.iter().all(|&v| v >= 0.0));
        prop_assert!(s.cdf.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(*s.cdf.last().unwrap(), 1.0);
        // the remap never reorders frames
        for i in 0..t {
            for j in 0..t {
                if s.normalized[i] < s.normalized[j] {
                    prop_assert!(s.remapped[i] <= s.remapped[j] + 1e-15);
                }
            }
        }
        prop_assert_eq!(series_from_raw(metric, raw, vec![false; t], &cfg).unwrap(), s);
    }

    #[test]
    fn leaky_map_is_continuous_and_monotone(alpha in 0.0f64..=1.0, mean in 0.001f64..0.999, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(leaky_map(lo, alpha, mean) <= leaky_map(hi, alpha, mean) + 1e-15);
        let below = leaky_map(mean - 1e-12, alpha, mean);
        let above = leaky_map(mean + 1e-12, alpha, mean);
        prop_assert!((above - below).abs() < 1e-9);
        prop_assert!((leaky_map(mean, alpha, mean) - alpha * mean).abs() < 1e-15);
        prop_assert!((leaky_map(1.0, alpha, mean) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polarization_widens_ratios(alpha in 0.0f64..1.0, mean in 0.05f64..0.95, x in 0.0f64..1.0, y in 0.001f64..1.0) {
        // a below-mean frame loses weight against an above-mean frame
        let x = x * mean;
        let y = mean + y * (1.0 - mean);
        let (fx, fy) = (leaky_map(x, alpha, mean), leaky_map(y, alpha, mean));
        prop_assert!(fx * y <= x * fy + 1e-12);
    }

    #[test]
    fn segmentation_partitions_the_video(raw in raw_strategy(), n_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let t = raw.len();
        let n = 1 + ((t - 1) as f64 * n_frac) as usize;
        let s = series_from_raw(MetricKind::Pmi, raw, vec![false; t], &ScoreConfig::default()).unwrap();
        let seg = segment(&s.cdf, n).unwrap();
        prop_assert_eq!(seg.segments.len(), n);
        prop_assert_eq!(seg.segments[0][0], 0);
        prop_assert_eq!(seg.segments[n - 1][1], t - 1);
        for w in seg.segments.windows(2) {
            prop_assert_eq!(w[0][1] + 1, w[1][0]);
        }
        prop_assert!(seg.segments.iter().all(|[a, b]| a <= b));
        for mode in [SelectMode::Random, SelectMode::Center] {
            let idx = select(&seg, mode, seed);
            prop_assert_eq!(idx.len(), n);
            for (i, [a, b]) in idx.iter().zip(&seg.segments) {
                prop_assert!(a <= i && i <= b);
            }
            prop_assert_eq!(&idx, &select(&seg, mode, seed));
        }
    }

    #[test]
    fn uniform_cdf_segments_differ_by_at_most_one(t in 1usize..300, n_frac in 0.0f64..1.0) {
        let n = 1 + ((t - 1) as f64 * n_frac) as usize;
        let cdf: Vec<f64> = (1..=t).map(|i| i as f64 / t as f64).collect();
        let sizes: Vec<usize> = segment(&cdf, n).unwrap().segments.iter().map(|[a, b]| b - a + 1).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn pad_repeat_is_even_and_ordered(t in 1usize..20, extra in 1usize..40) {
        let n = t + extra;
        let idx = pad_repeat(t, n);
        prop_assert_eq!(idx.len(), n);
        prop_assert_eq!(idx[0], 0);
        prop_assert!(idx.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(idx.iter().all(|&i| i < t));
        let mut counts = vec![0usize; t];
        for &i in &idx {
            counts[i] += 1;
        }
        prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
    }
}

#[test]
fn reversal_mirrors_pair_scores() {
    let seq = small_scene(30, 1, 4);
    let cfg = small_config();
    for metric in MetricKind::ALL {
        let fwd = score_video(&seq, metric, &cfg).unwrap();
        let rev = score_video(&seq.reversed(), metric, &cfg).unwrap();
        let t = seq.len();
        for i in 1..t {
            let (a, b) = (fwd.raw[i], rev.raw[t - i]);
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{metric} pair {i}: {a} vs {b}");
        }
    }
}

#[test]
fn static_video_gives_uniform_distribution() {
    let seq = render(&SceneSpec { frames: 12, ..SceneSpec::still(0, 0) }).unwrap();
    let s = score_video(&seq, MetricKind::Pmi, &ScoreConfig::default()).unwrap();
    for (t, (&r, &c)) in s.remapped.iter().zip(&s.cdf).enumerate() {
        assert!((r - 1.0 / 12.0).abs() < 1e-12);
        assert!((c - (t + 1) as f64 / 12.0).abs() < 1e-12);
    }
}

#[test]
fn static_video_ranks_every_pair_alike() {
    let seq = render(&SceneSpec { frames: 9, ..SceneSpec::still(0, 0) }).unwrap();
    for metric in MetricKind::ALL {
        let s = score_video(&seq, metric, &ScoreConfig::default()).unwrap();
        assert!(s.raw[1..].iter().all(|&r| r == s.raw[1]), "{metric}");
        if matches!(metric, MetricKind::Pmi | MetricKind::Psnr | MetricKind::Euclidean) {
            assert!(s.remapped.iter().all(|&r| (r - 1.0 / 9.0).abs() < 1e-12), "{metric}");
        }
    }
}

#[test]
fn dense_clips_cover_every_clip() {
    let seq = small_scene(400, 1, 8);
    let cfg = SamplerConfig { score: small_config(), mode: SelectMode::Random, ..SamplerConfig::new(8) };
    let report = dense_clip_select(&seq, 10, 8, MetricKind::Pmi, &cfg, 5).unwrap();
    assert_eq!(report.indices.len(), 80);
    for (c, clip) in report.clips.iter().enumerate() {
        assert_eq!((clip.start, clip.len), (c * 40, 40));
        assert!(clip.indices.iter().all(|&i| (c * 40..(c + 1) * 40).contains(&i)));
    }
    let again = dense_clip_select(&seq, 10, 8, MetricKind::Pmi, &cfg, 5).unwrap();
    assert_eq!(report, again);
}

#[test]
fn single_clip_matches_plain_selection() {
    let seq = small_scene(40, 1, 2);
    let cfg = SamplerConfig { score: small_config(), mode: SelectMode::Random, seed: 11, ..SamplerConfig::new(6) };
    let report = sample(&seq, MetricKind::Pmi, &cfg).unwrap();
    let scores = score_video(&seq, MetricKind::Pmi, &cfg.score).unwrap();
    let direct = select(&segment(&scores.cdf, 6).unwrap(), SelectMode::Random, 11);
    assert_eq!(report.indices, direct);
}

#[test]
fn uniform_dense_clips_pick_lower_medians() {
    let seq = render(&SceneSpec { frames: 8, ..SceneSpec::still(0, 0) }).unwrap();
    let cfg = SamplerConfig { clips: 2, ..SamplerConfig::new(2) };
    let report = sample(&seq, MetricKind::Pmi, &cfg).unwrap();
    assert_eq!(report.indices, vec![0, 2, 4, 6]);
}

#[test]
fn short_video_pads_only_when_allowed() {
    let seq = render(&SceneSpec { frames: 5, ..SceneSpec::still(0, 0) }).unwrap();
    let mut cfg = SamplerConfig::new(8);
    let err = sample(&seq, MetricKind::Pmi, &cfg).unwrap_err();
    assert_eq!(err.class().exit_code(), 2);
    assert!(err.to_string().contains("--allow-repeat"));
    cfg.allow_repeat = true;
    let report = sample(&seq, MetricKind::Pmi, &cfg).unwrap();
    assert_eq!(report.indices, vec![0, 0, 1, 1, 2, 3, 3, 4]);
    assert!(report.clips[0].padded);
}

#[test]
fn more_clips_than_frames_is_rejected() {
    let seq = render(&SceneSpec { frames: 6, ..SceneSpec::still(0, 0) }).unwrap();
    let cfg = SamplerConfig { clips: 10, allow_repeat: true, ..SamplerConfig::new(1) };
    assert_eq!(sample(&seq, MetricKind::Pmi, &cfg).unwrap_err().class().exit_code(), 2);
}
