//! Dense pure/mixed state simulation.

mod density;
mod gate;
mod measure;
mod noise;
mod pauli;
mod seed;
mod state;

pub use density::DensityMatrix;
pub use gate::Gate;
pub use measure::{Basis, ForcedOutcomes, Measured, OutcomeSource, SampledOutcomes};
pub use noise::{apply_channel, noisy_state, ChannelLayout, NoiseSpec};
pub use pauli::{Pauli, PauliString, Phase};
pub use seed::{binomial_estimate, Seed, ShotRng};
pub use state::StateVector;

pub use num_complex::Complex64 as C64;

/// Tolerance for algebraic identities.
pub const TOL: f64 = 1e-10;
/// Floor below which an eigenvalue is treated as negative.
pub const EIG_FLOOR: f64 = -1e-9;
/// Outcomes with smaller probability cannot be forced.
pub const PROB_FLOOR: f64 = 1e-12;
/// Largest register the dense routines accept.
pub const MAX_QUBITS: usize = 12;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Bit mask of qubit `q` in an `n`-qubit basis index.
#[inline]
pub(crate) fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

pub(crate) fn check_qubit(q: usize, n: usize) -> crate::Result<()> {
    if q >= n {
        Err(crate::Error::QubitOutOfRange {
            index: q,
            n_qubits: n,
        })
    } else {
        Ok(())
    }
}

/// Applies a 2x2 matrix to qubit `q` of an amplitude vector over `n` qubits.
pub(crate) fn apply_1q(amps: &mut [C64], n: usize, q: usize, m: &[[C64; 2]; 2]) {
    let mask = bit(n, q);
    for i in 0..amps.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (a, b) = (amps[i], amps[j]);
            amps[i] = m[0][0] * a + m[0][1] * b;
            amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

/// Applies a 4x4 matrix to qubits `(q0, q1)`; `q0` is the high bit of the
/// local index.
pub(crate) fn apply_2q(amps: &mut [C64], n: usize, q0: usize, q1: usize, m: &[[C64; 4]; 4]) {
    let (m0, m1) = (bit(n, q0), bit(n, q1));
    for i in 0..amps.len() {
        if i & (m0 | m1) == 0 {
            let idx = [i, i | m1, i | m0, i | m0 | m1];
            let v = idx.map(|k| amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                amps[k] = (0..4).map(|col| m[r][col] * v[col]).sum();
            }
        }
    }
}
