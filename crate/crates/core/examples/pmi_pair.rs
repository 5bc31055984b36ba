//! Patch mutual information between frame pairs with different amounts of
//! shared content.
//!
//! ```text
//! cargo run --release --example pmi_pair
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pmi_sampler::patch::make_grid;
use pmi_sampler::{pmi, Frame};

fn noise(rng: &mut ChaCha8Rng, h: usize, w: usize) -> Frame {
    Frame::from_fn(h, w, 1, |_, _, _| rng.random::<f64>())
}

fn blend(a: &Frame, b: &Frame, weight: f64) -> Frame {
    let data = a.data().iter().zip(b.data()).map(|(x, y)| weight * x + (1.0 - weight) * y).collect();
    Frame::new(a.height(), a.width(), 1, data).expect("same shape")
}

fn main() -> pmi_sampler::Result<()> {
    let (h, w) = (96, 96);
    let grid = make_grid(h, w, 1, 4)?;
    println!("grid: {} patches of dimension {}", grid.patches(), grid.dim());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = noise(&mut rng, h, w);
    let other = noise(&mut rng, h, w);
    println!("{:<22} {:>10}", "second frame", "pmi (nats)");
    for weight in [0.95, 0.8, 0.5, 0.2, 0.0] {
        let b = blend(&a, &other, weight);
        let v = pmi(&a, &b, &grid)?;
        println!("{:<22} {:>10.4}", format!("{:.0}% shared content", weight * 100.0), v.value);
    }
    let v = pmi(&a, &a.map(|x| 0.5 * x + 0.2), &grid)?;
    println!("{:<22} {:>10.4}", "contrast change only", v.value);
    Ok(())
}
