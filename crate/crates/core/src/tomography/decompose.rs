use crate::qsim::{Pauli, PauliString, StateVector, C64};
use crate::{Error, Result};

/// Largest register [`decompose_projector`] accepts.
pub const MAX_DECOMPOSE_QUBITS: usize = 6;
/// Terms with smaller coefficients are dropped.
pub const COEFF_FLOOR: f64 = 1e-12;

/// `|psi><psi| = sum_k c_k P_k` with real coefficients; terms are in
/// lexicographic letter order (`I < X < Y < Z`).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliDecomposition {
    pub n_qubits: usize,
    pub terms: Vec<(f64, PauliString)>,
}

impl PauliDecomposition {
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Coefficient of the identity string (always `2^-n` for a projector).
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .find(|(_, p)| p.is_identity())
            .map_or(0.0, |(c, _)| *c)
    }

    /// Non-identity terms with their indices.
    pub fn nontrivial(&self) -> impl Iterator<Item = (usize, &(f64, PauliString))> {
        self.terms.iter().enumerate().filter(|(_, (_, p))| !p.is_identity())
    }

    /// `sum_k c_k P_k` as a dense row-major matrix.
    pub fn reconstruct(&self) -> Vec<C64> {
        let d = self.dim();
        let mut m = vec![C64::default(); d * d];
        for (c, p) in &self.terms {
            let (x, _) = p.masks();
            for col in 0..d {
                m[(col ^ x) * d + col] += p.column_factor(col) * c;
            }
        }
        m
    }

    /// Matrix element `<row|sum c P|row ^ mask>` restricted to terms with
    /// flip mask `mask`.
    pub(crate) fn coherence(&self, mask: usize, row: usize) -> C64 {
        let col = row ^ mask;
        self.terms
            .iter()
            .filter(|(_, p)| p.masks().0 == mask)
            .map(|(c, p)| p.column_factor(col) * c)
            .sum()
    }
}

fn letters_of(index: usize, n: usize) -> Vec<Pauli> {
    (0..n).map(|q| Pauli::ALL[index >> (2 * (n - 1 - q)) & 3]).collect()
}

pub fn decompose_projector(psi: &StateVector) -> Result<PauliDecomposition> {
    let n = psi.n_qubits();
    if n > MAX_DECOMPOSE_QUBITS {
        return Err(Error::SizeOverflow(n));
    }
    let a = psi.amplitudes();
    let scale = 1.0 / psi.dim() as f64;
    let mut terms = Vec::new();
    for index in 0..1usize << (2 * n) {
        let p = PauliString::new(letters_of(index, n));
        let (x, _) = p.masks();
        let e: C64 = (0..a.len())
            .map(|k| a[k ^ x].conj() * p.column_factor(k) * a[k])
            .sum();
        let c = e.re * scale;
        if c.abs() >= COEFF_FLOOR {
            terms.push((c, p));
        }
    }
    Ok(PauliDecomposition { n_qubits: n, terms })
}
