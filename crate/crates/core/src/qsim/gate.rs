use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use super::{c, C64};

/// Named unitaries understood by [`StateVector::apply`](super::StateVector::apply)
/// and [`DensityMatrix::apply`](super::DensityMatrix::apply).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    /// `exp(-i a Z / 2) = diag(e^{-ia/2}, e^{ia/2})`.
    Rz(f64),
    /// Control first, target second.
    Cnot,
    Cz,
}

pub(crate) enum Matrix {
    One([[C64; 2]; 2]),
    Two([[C64; 4]; 4]),
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot | Gate::Cz => 2,
            _ => 1,
        }
    }

    /// The inverse gate.
    pub fn dagger(&self) -> Gate {
        match *self {
            Gate::Rz(a) => Gate::Rz(-a),
            g => g,
        }
    }

    pub(crate) fn matrix(&self) -> Matrix {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        match *self {
            Gate::H => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                Matrix::One([[h, h], [h, -h]])
            }
            Gate::X => Matrix::One([[o, l], [l, o]]),
            Gate::Y => Matrix::One([[o, c(0.0, -1.0)], [c(0.0, 1.0), o]]),
            Gate::Z => Matrix::One([[l, o], [o, -l]]),
            Gate::Rz(a) => Matrix::One([
                [C64::from_polar(1.0, -a / 2.0), o],
                [o, C64::from_polar(1.0, a / 2.0)],
            ]),
            Gate::Cnot => Matrix::Two([
                [l, o, o, o],
                [o, l, o, o],
                [o, o, o, l],
                [o, o, l, o],
            ]),
            Gate::Cz => Matrix::Two([
                [l, o, o, o],
                [o, l, o, o],
                [o, o, l, o],
                [o, o, o, -l],
            ]),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H => write!(f, "H"),
            Gate::X => write!(f, "X"),
            Gate::Y => write!(f, "Y"),
            Gate::Z => write!(f, "Z"),
            Gate::Rz(a) => write!(f, "Rz({a})"),
            Gate::Cnot => write!(f, "CNOT"),
            Gate::Cz => write!(f, "CZ"),
        }
    }
}

pub(crate) fn check_targets(gate: &Gate, targets: &[usize], n: usize) -> crate::Result<()> {
    if targets.len() != gate.arity() {
        return Err(crate::Error::ArityMismatch {
            gate: gate.to_string(),
            expected: gate.arity(),
            got: targets.len(),
        });
    }
    for (i, &t) in targets.iter().enumerate() {
        super::check_qubit(t, n)?;
        if targets[..i].contains(&t) {
            return Err(crate::Error::DuplicateTargets(t));
        }
    }
    Ok(())
}

pub(crate) fn conj1(m: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    m.map(|row| row.map(|z| z.conj()))
}

pub(crate) fn conj2(m: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    m.map(|row| row.map(|z| z.conj()))
}
