//! Sample points and tolerances for numeric identity checks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_1a2b;

pub type Point = BTreeMap<String, f64>;

/// `count` points uniform in `[-half_width, half_width]` per coordinate.
pub fn sample_points(coords: &[String], count: usize, half_width: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| coords.iter().map(|c| (c.clone(), rng.gen_range(-half_width..=half_width))).collect())
        .collect()
}

/// `|a-b| / max(1, |a|, |b|)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        return f64::INFINITY;
    }
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}
