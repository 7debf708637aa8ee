use serde::{Deserialize, Serialize};

use super::{check_qubit, DensityMatrix, Pauli, PauliString, StateVector};
use crate::{Error, Result};

/// Parameters of the abstract noise model. The default is noiseless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Weight of the input state in `v*rho + (1-v)*I/2^n`.
    pub white_noise_v: f64,
    /// ZZ dephasing strength applied on every interfering pair.
    pub pair_dephasing_d: f64,
    /// XX contrast of the pair named by [`ChannelLayout::epr_pair`].
    pub epr_visibility: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self {
            white_noise_v: 1.0,
            pair_dephasing_d: 0.0,
            epr_visibility: 1.0,
        }
    }

    pub fn white(v: f64) -> Result<Self> {
        let s = Self {
            white_noise_v: v,
            ..Self::noiseless()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("white_noise_v", self.white_noise_v),
            ("pair_dephasing_d", self.pair_dephasing_d),
            ("epr_visibility", self.epr_visibility),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidNoise { name, value });
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.white_noise_v == 1.0 && self.pair_dephasing_d == 0.0 && self.epr_visibility == 1.0
    }
}

/// Where the noise acts on a particular register.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChannelLayout {
    /// Pairs that receive ZZ dephasing, in application order.
    pub interfering_pairs: Vec<(usize, usize)>,
    /// Pair whose XX visibility is reduced (by Z dephasing of its first qubit).
    pub epr_pair: Option<(usize, usize)>,
}

impl ChannelLayout {
    pub fn pairs(pairs: &[(usize, usize)]) -> Self {
        Self {
            interfering_pairs: pairs.to_vec(),
            epr_pair: None,
        }
    }
}

fn dephase(rho: &DensityMatrix, p: f64, z: &PauliString) -> Result<DensityMatrix> {
    if p == 0.0 {
        return Ok(rho.clone());
    }
    rho.mix(1.0 - p, &rho.conjugate_pauli(z)?, p)
}

/// Visibility loss, then pair dephasing in listed order, then white noise.
/// The three maps commute, so the order only matters for round-off.
pub fn apply_channel(rho: &DensityMatrix, spec: &NoiseSpec, layout: &ChannelLayout) -> Result<DensityMatrix> {
    spec.validate()?;
    let n = rho.n_qubits();
    let mut out = rho.clone();
    if let Some((a, b)) = layout.epr_pair {
        check_qubit(a, n)?;
        check_qubit(b, n)?;
        let p = (1.0 - spec.epr_visibility) / 2.0;
        out = dephase(&out, p, &PauliString::on(n, &[(a, Pauli::Z)]))?;
    }
    for &(a, b) in &layout.interfering_pairs {
        check_qubit(a, n)?;
        check_qubit(b, n)?;
        if a == b {
            return Err(Error::DuplicateTargets(a));
        }
        let zz = PauliString::on(n, &[(a, Pauli::Z), (b, Pauli::Z)]);
        out = dephase(&out, spec.pair_dephasing_d, &zz)?;
    }
    if spec.white_noise_v < 1.0 {
        let v = spec.white_noise_v;
        out = out.mix(v, &DensityMatrix::maximally_mixed(n)?, 1.0 - v)?;
    }
    Ok(out)
}

/// The ideal pure state pushed through [`apply_channel`].
pub fn noisy_state(ideal: &StateVector, spec: &NoiseSpec, layout: &ChannelLayout) -> Result<DensityMatrix> {
    apply_channel(&DensityMatrix::from_pure(ideal), spec, layout)
}
