use nalgebra::DMatrix;

use super::gate::{check_targets, conj1, conj2, Matrix};
use super::{apply_1q, apply_2q, bit, c, check_qubit, Gate, PauliString, StateVector, C64, EIG_FLOOR, MAX_QUBITS, TOL};
use crate::{Error, Result};

/// Mixed state on `n` qubits stored as a dense row-major `2^n x 2^n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        let data = a
            .iter()
            .flat_map(|x| a.iter().map(move |y| x * y.conj()))
            .collect();
        Self {
            n_qubits: psi.n_qubits(),
            data,
        }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::SizeOverflow(n_qubits));
        }
        let dim = 1 << n_qubits;
        let mut data = vec![C64::default(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = c(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n_qubits, data })
    }

    /// Wraps a raw row-major matrix after checking it is a valid state.
    pub fn from_matrix(data: Vec<C64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidState(format!("{} entries is not 2^n x 2^n", data.len())));
        }
        let rho = Self {
            n_qubits: dim.trailing_zeros() as usize,
            data,
        };
        rho.validate()?;
        Ok(rho)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i).re).sum()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        // rho is Hermitian, so Tr(rho^2) = sum |rho_ij|^2.
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (i..d).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Checks Hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<()> {
        if !self.is_hermitian(TOL) {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = self.eigenvalues()[0];
        if min < EIG_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `U rho U^dagger`.
    pub fn apply(&self, gate: Gate, targets: &[usize]) -> Result<DensityMatrix> {
        check_targets(&gate, targets, self.n_qubits)?;
        let mut out = self.clone();
        match gate.matrix() {
            Matrix::One(m) => out.conjugate_1q(targets[0], &m),
            Matrix::Two(m) => {
                let n = self.n_qubits;
                apply_2q(&mut out.data, 2 * n, targets[0], targets[1], &m);
                apply_2q(&mut out.data, 2 * n, n + targets[0], n + targets[1], &conj2(&m));
            }
        }
        Ok(out)
    }

    pub fn apply_all<'a>(
        &self,
        ops: impl IntoIterator<Item = &'a (Gate, Vec<usize>)>,
    ) -> Result<DensityMatrix> {
        ops.into_iter()
            .try_fold(self.clone(), |s, (g, t)| s.apply(*g, t))
    }

    /// `M rho M^dagger` for an arbitrary 2x2 matrix on qubit `q`. The data is
    /// treated as a `2n`-qubit vector whose high half indexes rows.
    pub(crate) fn conjugate_1q(&mut self, q: usize, m: &[[C64; 2]; 2]) {
        let n = self.n_qubits;
        apply_1q(&mut self.data, 2 * n, q, m);
        apply_1q(&mut self.data, 2 * n, n + q, &conj1(m));
    }

    /// `P rho P^dagger`.
    pub fn conjugate_pauli(&self, p: &PauliString) -> Result<DensityMatrix> {
        if p.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: p.len(),
            });
        }
        let d = self.dim();
        let (x, _) = p.masks();
        let f: Vec<C64> = (0..d).map(|k| p.column_factor(k)).collect();
        let mut data = vec![C64::default(); d * d];
        for i in 0..d {
            for j in 0..d {
                data[(i ^ x) * d + (j ^ x)] = f[i] * self.get(i, j) * f[j].conj();
            }
        }
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            data,
        })
    }

    /// `Tr(rho P)` as a complex number.
    pub fn expectation_complex(&self, p: &PauliString) -> Result<C64> {
        if p.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: p.len(),
            });
        }
        let (x, _) = p.masks();
        Ok((0..self.dim())
            .map(|k| p.column_factor(k) * self.get(k, k ^ x))
            .sum())
    }

    /// `Tr(rho P)` for a Hermitian Pauli string (phase +1 or -1).
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        Ok(self.expectation_complex(p)?.re)
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: psi.dim(),
            });
        }
        let a = psi.amplitudes();
        let d = self.dim();
        let mut acc = C64::default();
        for i in 0..d {
            let row: C64 = (0..d).map(|j| self.get(i, j) * a[j]).sum();
            acc += a[i].conj() * row;
        }
        Ok(acc.re)
    }

    /// Traces out `discard`; survivors keep their relative order.
    pub fn partial_trace(&self, discard: &[usize]) -> Result<DensityMatrix> {
        let n = self.n_qubits;
        let mut gone = vec![false; n];
        for &q in discard {
            check_qubit(q, n)?;
            gone[q] = true;
        }
        let kept: Vec<usize> = (0..n).filter(|&q| !gone[q]).collect();
        if kept.is_empty() {
            return Err(Error::DiscardAll);
        }
        if kept.len() == n {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..n).filter(|&q| gone[q]).collect();
        let scatter = |bits: usize, qubits: &[usize]| -> usize {
            let k = qubits.len();
            qubits
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> (k - 1 - i) & 1 == 1)
                .fold(0, |acc, (_, &q)| acc | bit(n, q))
        };
        let kd = 1 << kept.len();
        let kept_idx: Vec<usize> = (0..kd).map(|r| scatter(r, &kept)).collect();
        let traced_idx: Vec<usize> = (0..1 << traced.len()).map(|t| scatter(t, &traced)).collect();
        let mut data = vec![C64::default(); kd * kd];
        for r in 0..kd {
            for s in 0..kd {
                data[r * kd + s] = traced_idx
                    .iter()
                    .map(|&t| self.get(kept_idx[r] | t, kept_idx[s] | t))
                    .sum();
            }
        }
        Ok(DensityMatrix {
            n_qubits: kept.len(),
            data,
        })
    }

    /// Unnormalised `<b|_q rho |b>_q` with qubit `q` removed.
    pub(crate) fn project_out(&self, q: usize, b: [C64; 2]) -> Result<DensityMatrix> {
        check_qubit(q, self.n_qubits)?;
        if self.n_qubits == 1 {
            return Err(Error::DiscardAll);
        }
        let n = self.n_qubits;
        let mask = bit(n, q);
        let low = mask - 1;
        let rd = self.dim() / 2;
        let full = |r: usize| ((r & !low) << 1) | (r & low);
        let mut data = vec![C64::default(); rd * rd];
        for r in 0..rd {
            let (r0, r1) = (full(r), full(r) | mask);
            for s in 0..rd {
                let (s0, s1) = (full(s), full(s) | mask);
                data[r * rd + s] = b[0].conj() * (self.get(r0, s0) * b[0] + self.get(r0, s1) * b[1])
                    + b[1].conj() * (self.get(r1, s0) * b[0] + self.get(r1, s1) * b[1]);
            }
        }
        Ok(DensityMatrix {
            n_qubits: n - 1,
            data,
        })
    }

    /// `a*self + b*other` without renormalisation.
    pub fn mix(&self, a: f64, other: &DensityMatrix, b: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x * a + y * b)
                .collect(),
        })
    }

    pub(crate) fn scaled(mut self, k: f64) -> DensityMatrix {
        for z in &mut self.data {
            *z *= k;
        }
        self
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::SizeOverflow(n));
        }
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut data = vec![C64::default(); d * d];
        for i in 0..da {
            for j in 0..da {
                let a = self.get(i, j);
                for k in 0..db {
                    for l in 0..db {
                        data[(i * db + k) * d + j * db + l] = a * other.get(k, l);
                    }
                }
            }
        }
        Ok(DensityMatrix { n_qubits: n, data })
    }

    /// Largest element-wise difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl From<&StateVector> for DensityMatrix {
    fn from(psi: &StateVector) -> Self {
        DensityMatrix::from_pure(psi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{encode, CodeParams, LogicalInput};

    fn ket(terms: &[(&str, f64)]) -> StateVector {
        StateVector::from_terms(terms.iter().map(|&(b, a)| (b, c(a, 0.0)))).unwrap()
    }

    #[test]
    fn trace_out_half_of_bell_pair() {
        let rho = DensityMatrix::from_pure(&ket(&[("00", 1.0), ("11", 1.0)]));
        let red = rho.partial_trace(&[0]).unwrap();
        assert!(red.max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap()) < 1e-12);
    }

    #[test]
    fn trace_out_product_partner() {
        let rho = DensityMatrix::from_pure(&ket(&[("01", 1.0)]));
        let red = rho.partial_trace(&[1]).unwrap();
        let zero = DensityMatrix::from_pure(&ket(&[("0", 1.0)]));
        assert!(red.max_abs_diff(&zero) < 1e-12);
    }

    #[test]
    fn trace_first_block_of_ghz_codeword() {
        let plus = encode(&LogicalInput::plus(), &CodeParams::new(2, 2).unwrap()).unwrap();
        let red = DensityMatrix::from_pure(&plus).partial_trace(&[0, 1]).unwrap();
        let expect = DensityMatrix::from_pure(&ket(&[("00", 1.0)]))
            .mix(0.5, &DensityMatrix::from_pure(&ket(&[("11", 1.0)])), 0.5)
            .unwrap();
        assert!(red.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(rho.partial_trace(&[0, 1]), Err(Error::DiscardAll));
        assert!(matches!(rho.partial_trace(&[2]), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn expectation_values() {
        let ghz = DensityMatrix::from_pure(&ket(&[("0000", 1.0), ("1111", 1.0)]));
        assert!((ghz.expectation(&"ZZZZ".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
        let bell = DensityMatrix::from_pure(&ket(&[("00", 1.0), ("11", 1.0)]));
        assert!(bell.expectation(&"ZI".parse().unwrap()).unwrap().abs() < 1e-12);
        assert!(matches!(
            bell.expectation(&"Z".parse().unwrap()),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_examples() {
        let zero = ket(&[("0", 1.0)]);
        let f = DensityMatrix::from_pure(&zero).fidelity_pure(&zero).unwrap();
        assert!((f - 1.0).abs() < 1e-12);

        let psi = ket(&[("0000", 1.0), ("0110", -0.5), ("1011", 0.25)]);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!((mixed.fidelity_pure(&psi).unwrap() - 1.0 / 16.0).abs() < 1e-12);
        let half = DensityMatrix::from_pure(&psi).mix(0.5, &mixed, 0.5).unwrap();
        assert!((half.fidelity_pure(&psi).unwrap() - 0.53125).abs() < 1e-12);
        assert!(matches!(
            half.fidelity_pure(&zero),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn validate_rejects_bad_matrices() {
        let bad = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(DensityMatrix::from_matrix(bad).is_err());
        let neg = vec![c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)];
        assert!(DensityMatrix::from_matrix(neg).is_err());
    }
}
