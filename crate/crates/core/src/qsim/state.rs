use std::ops::Index;

use super::gate::{check_targets, Matrix};
use super::{apply_1q, apply_2q, bit, c, check_qubit, Gate, PauliString, C64, MAX_QUBITS, TOL};
use crate::{Error, Result};

/// A normalised pure state on `n` qubits; qubit 0 is the most significant
/// bit of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::SizeOverflow(n_qubits));
        }
        let mut amps = vec![C64::default(); 1 << n_qubits];
        amps[0] = c(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Normalises `amps`; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!("length {len} is not 2^n")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::SizeOverflow(n_qubits));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(Self {
            n_qubits,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Builds a state from `(bitstring, amplitude)` pairs, e.g. `("0110", 1.0)`.
    pub fn from_terms<'a>(terms: impl IntoIterator<Item = (&'a str, C64)>) -> Result<Self> {
        let mut n = None;
        let mut amps = Vec::new();
        for (bits, amp) in terms {
            let len = bits.len();
            match n {
                None => {
                    if len == 0 || len > MAX_QUBITS {
                        return Err(Error::SizeOverflow(len));
                    }
                    n = Some(len);
                    amps = vec![C64::default(); 1 << len];
                }
                Some(k) if k != len => return Err(Error::LengthMismatch { expected: k, got: len }),
                _ => {}
            }
            let idx = usize::from_str_radix(bits, 2)
                .map_err(|_| Error::Parse(format!("bad bitstring {bits:?}")))?;
            amps[idx] += amp;
        }
        Self::from_amplitudes(amps)
    }

    /// Single-qubit state `a0|0> + a1|1>` (normalised).
    pub fn qubit(a0: C64, a1: C64) -> Result<Self> {
        Self::from_amplitudes(vec![a0, a1])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::SizeOverflow(n));
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn apply(&self, gate: Gate, targets: &[usize]) -> Result<StateVector> {
        check_targets(&gate, targets, self.n_qubits)?;
        let mut out = self.clone();
        match gate.matrix() {
            Matrix::One(m) => apply_1q(&mut out.amps, self.n_qubits, targets[0], &m),
            Matrix::Two(m) => apply_2q(&mut out.amps, self.n_qubits, targets[0], targets[1], &m),
        }
        Ok(out)
    }

    /// Applies `(gate, targets)` pairs left to right.
    pub fn apply_all<'a>(
        &self,
        ops: impl IntoIterator<Item = &'a (Gate, Vec<usize>)>,
    ) -> Result<StateVector> {
        ops.into_iter()
            .try_fold(self.clone(), |s, (g, t)| s.apply(*g, t))
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<StateVector> {
        if p.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: p.len(),
            });
        }
        let (xmask, _) = p.masks();
        let mut amps = vec![C64::default(); self.dim()];
        for (k, a) in self.amps.iter().enumerate() {
            amps[k ^ xmask] = p.column_factor(k) * a;
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    /// `<self|P|self>`.
    pub fn expectation(&self, p: &PauliString) -> Result<C64> {
        self.inner(&self.apply_pauli(p)?)
    }

    /// Projects qubit `q` onto `|b>` (given by its two amplitudes) and
    /// removes it. Returns the unnormalised remainder.
    pub(crate) fn project_out(&self, q: usize, b: [C64; 2]) -> Result<Vec<C64>> {
        check_qubit(q, self.n_qubits)?;
        if self.n_qubits == 1 {
            return Err(Error::DiscardAll);
        }
        let n = self.n_qubits;
        let mask = bit(n, q);
        let low = mask - 1;
        let mut rest = vec![C64::default(); self.dim() / 2];
        for (r, slot) in rest.iter_mut().enumerate() {
            let base = ((r & !low) << 1) | (r & low);
            *slot = b[0].conj() * self.amps[base] + b[1].conj() * self.amps[base | mask];
        }
        Ok(rest)
    }

    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .amps
                .iter()
                .zip(&other.amps)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// True when the two states agree up to a global phase.
    pub fn equal_up_to_phase(&self, other: &StateVector) -> bool {
        self.overlap(other).map(|f| (f - 1.0).abs() <= TOL * 10.0).unwrap_or(false)
    }

    /// `a*self + b*other` (normalised).
    pub fn superpose(&self, a: C64, other: &StateVector, b: C64) -> Result<StateVector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        StateVector::from_amplitudes(
            self.amps
                .iter()
                .zip(&other.amps)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }
}

impl Index<usize> for StateVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.amps[i]
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    use super::*;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn hadamard_on_zero() {
        let s = StateVector::zero(1).unwrap().apply(Gate::H, &[0]).unwrap();
        assert!(close(s[0], c(FRAC_1_SQRT_2, 0.0)));
        assert!(close(s[1], c(FRAC_1_SQRT_2, 0.0)));
    }

    #[test]
    fn bell_pair_from_cnot() {
        let s = StateVector::zero(2)
            .unwrap()
            .apply(Gate::H, &[0])
            .unwrap()
            .apply(Gate::Cnot, &[0, 1])
            .unwrap();
        let bell = StateVector::from_terms([("00", c(1.0, 0.0)), ("11", c(1.0, 0.0))]).unwrap();
        assert!(s.approx_eq(&bell, 1e-12));
    }

    #[test]
    fn rz_minus_half_pi_on_plus() {
        // exp(-i a Z/2) with a = -pi/2 gives diag(e^{i pi/4}, e^{-i pi/4}).
        let plus = StateVector::zero(1).unwrap().apply(Gate::H, &[0]).unwrap();
        let s = plus.apply(Gate::Rz(-FRAC_PI_2), &[0]).unwrap();
        let ratio = s[1] / s[0];
        assert!(close(ratio, c(0.0, -1.0)));
    }

    #[test]
    fn gate_errors() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(
            s.apply(Gate::H, &[2]),
            Err(Error::QubitOutOfRange { index: 2, .. })
        ));
        assert_eq!(s.apply(Gate::Cnot, &[1, 1]), Err(Error::DuplicateTargets(1)));
        assert!(matches!(
            s.apply(Gate::Cz, &[0]),
            Err(Error::ArityMismatch { expected: 2, got: 1, .. })
        ));
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let s = StateVector::zero(3).unwrap().apply(Gate::X, &[0]).unwrap();
        assert!(close(s[0b100], c(1.0, 0.0)));
    }
}
