//! Fixtures shared by the benchmarks.

use lexiscreen_core::eval::synth_generate;
use lexiscreen_core::{AgeVariant, Dataset};

/// A synthetic dataset with the archived cohort's class balance.
pub fn fixture(n: usize) -> Dataset {
    synth_generate(n, 0.108, 0.3, 11, AgeVariant::Full).expect("valid synth parameters")
}
