//! Pauli decomposition of target projectors, setting grouping, simulated
//! counts and fidelity estimation.

mod counts;
mod decompose;
mod estimate;
mod setting;

pub use counts::{outcome_probabilities, read_counts_csv, sample_counts, simulate_counts, write_counts_csv, CountsTable};
pub use decompose::{decompose_projector, PauliDecomposition, COEFF_FLOOR, MAX_DECOMPOSE_QUBITS};
pub use estimate::{estimate_fidelity, FidelityEstimator};
pub use setting::{group_settings, Setting, SettingBasis};

use std::collections::BTreeMap;

use crate::qsim::{DensityMatrix, Seed};
use crate::Result;

/// Exact (infinite-shot) value of the estimator on `rho`.
pub fn exact_estimate(rho: &DensityMatrix, d: &PauliDecomposition, settings: &[Setting]) -> Result<f64> {
    let est = FidelityEstimator::new(d, settings)?;
    let freqs = settings
        .iter()
        .map(|s| Ok((s.label(), outcome_probabilities(rho, s)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    est.evaluate(&freqs)
}

/// Simulates every setting with its own stream `family:index` of `seed`.
pub fn simulate_all(rho: &DensityMatrix, settings: &[Setting], shots: u64, seed: Seed, family: u32) -> Result<Vec<CountsTable>> {
    settings
        .iter()
        .enumerate()
        .map(|(i, s)| simulate_counts(rho, s, shots, &mut seed.substream(family, i as u32)))
        .collect()
}
