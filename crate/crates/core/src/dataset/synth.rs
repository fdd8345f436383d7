//! Seeded two-dimensional benchmark with eight Gaussian classes.
//!
//! Centers sit on a three-level hierarchy: two well separated groups
//! (classes 1-4 and 5-8), each split into two pairs, each pair split into
//! two classes. Nearby classes are the hardest to separate.

use rand_distr::{Distribution, Normal};

use super::Dataset;
use crate::error::Result;
use crate::seed::rng_for;

pub const GROUP_OFFSET: f64 = 4.0;
pub const PAIR_OFFSET: f64 = 1.5;
pub const CLASS_OFFSET: f64 = 0.6;
pub const DEFAULT_SPREAD: f64 = 0.2;

/// Center of class `class` (0-based, 0..8).
pub fn class_center(class: usize) -> [f64; 2] {
    assert!(class < 8);
    let sign = |bit: usize| if (class >> bit) & 1 == 0 { -1.0 } else { 1.0 };
    [
        sign(2) * GROUP_OFFSET + sign(0) * CLASS_OFFSET,
        sign(1) * PAIR_OFFSET,
    ]
}

/// `points_per_class` draws around each center with standard deviation
/// `spread`, labelled "1" to "8", grouped by class.
pub fn eight_gaussians(points_per_class: usize, spread: f64, seed: u64) -> Result<Dataset> {
    let normal = Normal::new(0.0, spread).map_err(|e| crate::EcocError::invalid(e.to_string()))?;
    let mut rows = Vec::with_capacity(points_per_class * 8);
    let mut labels = Vec::with_capacity(points_per_class * 8);
    for class in 0..8 {
        let mut rng = rng_for(seed, &[0x5e_17, class as u64]);
        let [cx, cy] = class_center(class);
        for _ in 0..points_per_class {
            rows.push(vec![cx + normal.sample(&mut rng), cy + normal.sample(&mut rng)]);
            labels.push((class + 1).to_string());
        }
    }
    Dataset::from_rows("synth8", rows, labels)
}
