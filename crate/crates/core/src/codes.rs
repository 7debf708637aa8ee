//! The `(n, m)` parity/redundancy code family and its four-qubit circuit.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3};
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::qsim::{Gate, Pauli, PauliString, StateVector, C64, MAX_QUBITS, TOL};
use crate::{Error, Result};

/// `m` blocks of `n` qubits; block `b` holds qubits `b*n .. (b+1)*n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    n: usize,
    m: usize,
}

impl CodeParams {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n < 2 || m < 1 {
            return Err(Error::InvalidCode { n, m });
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn total(&self) -> usize {
        self.n * self.m
    }

    pub fn block_of(&self, q: usize) -> usize {
        q / self.n
    }

    pub fn block(&self, b: usize) -> std::ops::Range<usize> {
        b * self.n..(b + 1) * self.n
    }

    fn check_size(&self) -> Result<()> {
        if self.total() > MAX_QUBITS {
            Err(Error::SizeOverflow(self.total()))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

/// Logical qubit `a0|0> + a1|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalInput {
    pub a0: C64,
    pub a1: C64,
}

impl LogicalInput {
    /// Normalises the pair; fails on the zero vector.
    pub fn new(a0: C64, a1: C64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidState("zero logical amplitudes".into()));
        }
        Ok(Self {
            a0: a0 / norm,
            a1: a1 / norm,
        })
    }

    fn equator(phi: f64) -> Self {
        Self {
            a0: C64::new(FRAC_1_SQRT_2, 0.0),
            a1: C64::from_polar(FRAC_1_SQRT_2, phi),
        }
    }

    pub fn zero() -> Self {
        Self {
            a0: C64::new(1.0, 0.0),
            a1: C64::new(0.0, 0.0),
        }
    }

    /// `|V> = |1>`.
    pub fn v() -> Self {
        Self {
            a0: C64::new(0.0, 0.0),
            a1: C64::new(1.0, 0.0),
        }
    }

    pub fn plus() -> Self {
        Self::equator(0.0)
    }

    /// `(|0> + i|1>)/sqrt2`.
    pub fn r() -> Self {
        Self::equator(std::f64::consts::FRAC_PI_2)
    }

    /// `(|0> + e^{i pi/3}|1>)/sqrt2`.
    pub fn s() -> Self {
        Self::equator(FRAC_PI_3)
    }

    /// `(|0> + e^{i phi}|1>)/sqrt2`.
    pub fn on_equator(phi: f64) -> Self {
        Self::equator(phi)
    }

    /// Looks up a preset by name: `H`/`0`, `V`/`1`, `PLUS`/`+`, `R`, `S`.
    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "H" | "0" | "ZERO" => Some(Self::zero()),
            "V" | "1" | "ONE" => Some(Self::v()),
            "PLUS" | "+" => Some(Self::plus()),
            "R" => Some(Self::r()),
            "S" => Some(Self::s()),
            _ => None,
        }
    }

    /// Haar-random pure qubit.
    pub fn haar(rng: &mut impl Rng) -> Self {
        loop {
            let mut g = || rng.sample::<f64, _>(StandardNormal);
            let (a0, a1) = (C64::new(g(), g()), C64::new(g(), g()));
            if let Ok(x) = Self::new(a0, a1) {
                return x;
            }
        }
    }

    pub fn state(&self) -> StateVector {
        StateVector::qubit(self.a0, self.a1).expect("normalised amplitudes")
    }
}

/// `(|0_l>, |1_l>)`, both normalised.
pub fn logical_basis(params: &CodeParams) -> Result<(StateVector, StateVector)> {
    params.check_size()?;
    let n = params.n();
    let all_ones = (1usize << n) - 1;
    let block = |sign: f64| {
        let mut amps = vec![C64::default(); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        amps[all_ones] = C64::new(sign, 0.0);
        StateVector::from_amplitudes(amps)
    };
    let (plus, minus) = (block(1.0)?, block(-1.0)?);
    let mut zero = plus.clone();
    let mut one = minus.clone();
    for _ in 1..params.m() {
        zero = zero.tensor(&plus)?;
        one = one.tensor(&minus)?;
    }
    Ok((zero, one))
}

pub fn encode(input: &LogicalInput, params: &CodeParams) -> Result<StateVector> {
    let (zero, one) = logical_basis(params)?;
    zero.superpose(input.a0, &one, input.a1)
}

/// Gate list mapping `|psi>|000>` to the `(2,2)` codeword of `psi`.
pub fn circuit_22() -> Vec<(Gate, Vec<usize>)> {
    vec![
        (Gate::Cnot, vec![0, 2]),
        (Gate::H, vec![0]),
        (Gate::H, vec![2]),
        (Gate::Cnot, vec![0, 1]),
        (Gate::Cnot, vec![2, 3]),
    ]
}

pub fn encode_circuit_22(input: &LogicalInput) -> StateVector {
    input
        .state()
        .tensor(&StateVector::zero(3).expect("3 qubits"))
        .and_then(|s| s.apply_all(&circuit_22()))
        .expect("fixed four-qubit circuit")
}

/// Generators stabilising every codeword: `X^n X^n` on consecutive block
/// pairs and `Z_i Z_{i+1}` inside each block.
pub fn stabilizers(params: &CodeParams) -> Vec<PauliString> {
    let total = params.total();
    let mut out = Vec::new();
    for b in 0..params.m().saturating_sub(1) {
        let sites: Vec<(usize, Pauli)> = params
            .block(b)
            .chain(params.block(b + 1))
            .map(|q| (q, Pauli::X))
            .collect();
        out.push(PauliString::on(total, &sites));
    }
    for b in 0..params.m() {
        for q in params.block(b).take(params.n() - 1) {
            out.push(PauliString::on(total, &[(q, Pauli::Z), (q + 1, Pauli::Z)]));
        }
    }
    out
}

/// True when `psi` is a +1 eigenstate of every generator.
pub fn in_code_space(psi: &StateVector, params: &CodeParams) -> Result<bool> {
    for p in stabilizers(params) {
        if (psi.expectation(&p)? - 1.0).norm() > TOL {
            return Ok(false);
        }
    }
    Ok(true)
}
