use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use pmi_sampler::entropy::{gaussian_entropy, pmi, sample_covariance};
use pmi_sampler::metrics::{cosine, euclidean, histogram_mi};
use pmi_sampler::patch::{embed_frame, embed_pair, make_grid};
use pmi_sampler::Frame;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

#[test]
fn correlated_gaussian_pixels_recover_closed_form_mi() {
    // r = 1 makes every pixel a sample; N = 100 000.
    let (h, w) = (250, 400);
    let grid = make_grid(h, w, 1, 1).unwrap();
    for (seed, rho) in [(1u64, 0.0), (2, 0.5), (3, 0.9)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut xs = Vec::with_capacity(h * w);
        let mut ys = Vec::with_capacity(h * w);
        for _ in 0..h * w {
            let (u, v) = (normal(&mut rng), normal(&mut rng));
            xs.push(u);
            ys.push(rho * u + (1.0f64 - rho * rho).sqrt() * v);
        }
        let a = Frame::new(h, w, 1, xs).unwrap();
        let b = Frame::new(h, w, 1, ys).unwrap();
        let expected = -0.5 * (1.0f64 - rho * rho).ln();
        let got = pmi(&a, &b, &grid).unwrap().value;
        assert!((got - expected).abs() < 0.05, "rho {rho}: {got} vs {expected}");
    }
}

#[test]
fn sample_entropy_converges_to_population_entropy() {
    // 2d = 4 joint Gaussian with a known covariance via a Cholesky factor.
    let l = DMatrix::from_row_slice(4, 4, &[
        1.0, 0.0, 0.0, 0.0,
        0.5, 0.8, 0.0, 0.0,
        0.2, -0.3, 0.9, 0.0,
        0.1, 0.4, 0.2, 0.7,
    ]);
    let sigma = &l * l.transpose();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let n = 100_000;
    let z = DMatrix::from_fn(4, n, |_, _| normal(&mut rng));
    let x = &l * z;
    let estimated = gaussian_entropy(&sample_covariance(&x).unwrap()).unwrap();
    let exact = gaussian_entropy(&sigma).unwrap();
    assert!((estimated - exact).abs() < 0.05, "{estimated} vs {exact}");
}

#[test]
fn self_pmi_exceeds_noisy_copy() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid = make_grid(64, 64, 1, 4).unwrap();
    let a = Frame::from_fn(64, 64, 1, |y, x, _| ((y * 3 + x * 5) % 17) as f64 / 17.0 + 0.01 * normal(&mut rng));
    let noisy = Frame::new(64, 64, 1, a.data().iter().map(|v| v + 0.2 * normal(&mut rng)).collect()).unwrap();
    let same = pmi(&a, &a, &grid).unwrap();
    let near = pmi(&a, &noisy, &grid).unwrap();
    assert!(same.value > near.value, "{} vs {}", same.value, near.value);
}

#[test]
fn euclidean_matches_double_loop() {
    let a = Frame::from_fn(5, 7, 3, |y, x, c| (y * 7 + x + c) as f64 / 100.0);
    let b = Frame::from_fn(5, 7, 3, |y, x, c| ((x * 5 + y * 2 + c * 3) % 11) as f64 / 10.0);
    let mut sum = 0.0;
    for y in 0..5 {
        for x in 0..7 {
            for c in 0..3 {
                sum += (a.get(y, x, c) - b.get(y, x, c)).powi(2);
            }
        }
    }
    assert!((euclidean(&a, &b).unwrap() - sum.sqrt()).abs() < 1e-12);
}

fn frame_strategy(h: usize, w: usize) -> impl Strategy<Value = Frame> {
    prop::collection::vec(0.0f64..1.0, h * w).prop_map(move |v| Frame::new(h, w, 1, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euclidean_triangle_inequality(a in frame_strategy(6, 6), b in frame_strategy(6, 6), c in frame_strategy(6, 6)) {
        let ab = euclidean(&a, &b).unwrap();
        let bc = euclidean(&b, &c).unwrap();
        let ac = euclidean(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert!((ab - euclidean(&b, &a).unwrap()).abs() == 0.0);
    }

    #[test]
    fn similarity_metrics_are_symmetric_and_bounded(a in frame_strategy(8, 8), b in frame_strategy(8, 8)) {
        let c = cosine(&a, &b).unwrap();
        prop_assert!((-1.0..=1.0).contains(&c));
        prop_assert!((c - cosine(&b, &a).unwrap()).abs() < 1e-12);
        let mi = histogram_mi(&a, &b, 16).unwrap();
        prop_assert!(mi >= 0.0);
        prop_assert!((mi - histogram_mi(&b, &a, 16).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn embedding_is_a_pure_gather(a in frame_strategy(12, 9), b in frame_strategy(12, 9), r in 1usize..4) {
        let grid = make_grid(12, 9, 1, r).unwrap_or_else(|_| make_grid(12, 9, 1, 1).unwrap());
        let r = grid.patch_size;
        let joint = embed_pair(&a, &b, &grid).unwrap().data;
        let d = grid.dim();
        for j in 0..grid.patches() {
            let (pr, pc) = (j / grid.cols, j % grid.cols);
            for dy in 0..r {
                for dx in 0..r {
                    prop_assert_eq!(joint[(dy * r + dx, j)], a.get(pr * r + dy, pc * r + dx, 0));
                    prop_assert_eq!(joint[(d + dy * r + dx, j)], b.get(pr * r + dy, pc * r + dx, 0));
                }
            }
        }
        // marginal embeddings are exactly the joint's row blocks
        prop_assert_eq!(embed_frame(&a, &grid).unwrap(), joint.rows(0, d).into_owned());
        prop_assert_eq!(embed_frame(&b, &grid).unwrap(), joint.rows(d, d).into_owned());
    }

    #[test]
    fn swapping_frames_swaps_row_blocks(a in frame_strategy(8, 8), b in frame_strategy(8, 8)) {
        let grid = make_grid(8, 8, 1, 2).unwrap();
        let ab = embed_pair(&a, &b, &grid).unwrap().data;
        let ba = embed_pair(&b, &a, &grid).unwrap().data;
        let d = grid.dim();
        prop_assert_eq!(ab.rows(0, d), ba.rows(d, d));
        prop_assert_eq!(ab.rows(d, d), ba.rows(0, d));
    }

    #[test]
    fn covariance_ignores_column_order(a in frame_strategy(8, 8), b in frame_strategy(8, 8), shift in 1usize..16) {
        let grid = make_grid(8, 8, 1, 2).unwrap();
        let x = embed_pair(&a, &b, &grid).unwrap().data;
        let n = x.ncols();
        let rotated = DMatrix::from_fn(x.nrows(), n, |i, j| x[(i, (j + shift) % n)]);
        let c1 = sample_covariance(&x).unwrap();
        let c2 = sample_covariance(&rotated).unwrap();
        prop_assert!((c1 - c2).abs().max() < 1e-14);
    }
}
