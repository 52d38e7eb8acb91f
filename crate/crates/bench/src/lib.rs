//! Shared fixtures for the benchmarks.

use rearrange_core::generators::stable_values;
use rearrange_core::GridFunction;

/// Heavy-tailed test function: one draw of the 1.5-stable family.
pub fn fixture(n_cells: usize, seed: u64) -> GridFunction {
    GridFunction::new(stable_values(1.5, seed, 0, n_cells).expect("valid stability index"))
        .expect("finite samples")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_reproducible() {
        assert_eq!(fixture(64, 3), fixture(64, 3));
        assert_ne!(fixture(64, 3), fixture(64, 4));
    }
}
