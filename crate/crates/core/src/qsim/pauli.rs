use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{c, C64};
use crate::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Product `self * other` as `(power of i, letter)`.
    pub fn product(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    /// `<b'|P|b>` where `b' = b xor flips()`.
    fn factor(self, b: bool) -> C64 {
        match (self, b) {
            (Pauli::I, _) | (Pauli::X, _) | (Pauli::Z, false) => c(1.0, 0.0),
            (Pauli::Z, true) => c(-1.0, 0.0),
            (Pauli::Y, false) => c(0.0, 1.0),
            (Pauli::Y, true) => c(0.0, -1.0),
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase of a Pauli string, a power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    fn from_power(k: u8) -> Phase {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    fn power(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn value(self) -> C64 {
        match self {
            Phase::PlusOne => c(1.0, 0.0),
            Phase::PlusI => c(0.0, 1.0),
            Phase::MinusOne => c(-1.0, 0.0),
            Phase::MinusI => c(0.0, -1.0),
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }
}

/// Signed tensor product of Pauli letters; letter 0 acts on qubit 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    phase: Phase,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self {
            letters,
            phase: Phase::PlusOne,
        }
    }

    pub fn with_phase(letters: Vec<Pauli>, phase: Phase) -> Self {
        Self { letters, phase }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n])
    }

    /// `letter` on the listed qubits, identity elsewhere.
    pub fn on(n: usize, sites: &[(usize, Pauli)]) -> Self {
        let mut letters = vec![Pauli::I; n];
        for &(q, p) in sites {
            letters[q] = p;
        }
        Self::new(letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn negated(&self) -> Self {
        Self {
            letters: self.letters.clone(),
            phase: Phase::from_power(self.phase.power() + 2),
        }
    }

    /// Bit masks `(x, z)` in basis-index convention (qubit 0 is the MSB).
    pub fn masks(&self) -> (usize, usize) {
        let n = self.letters.len();
        let mut x = 0;
        let mut z = 0;
        for (q, p) in self.letters.iter().enumerate() {
            let b = 1 << (n - 1 - q);
            if p.flips() {
                x |= b;
            }
            if p.has_z() {
                z |= b;
            }
        }
        (x, z)
    }

    /// Factor `f(k)` with `P|k> = f(k) |k xor x>`.
    pub(crate) fn column_factor(&self, k: usize) -> C64 {
        let n = self.letters.len();
        self.letters
            .iter()
            .enumerate()
            .fold(self.phase.value(), |acc, (q, p)| {
                acc * p.factor(k >> (n - 1 - q) & 1 == 1)
            })
    }

    /// Dense matrix, row-major.
    pub fn to_matrix(&self) -> Vec<C64> {
        let dim = 1 << self.len();
        let (x, _) = self.masks();
        let mut m = vec![C64::default(); dim * dim];
        for k in 0..dim {
            m[(k ^ x) * dim + k] = self.column_factor(k);
        }
        m
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        assert_eq!(self.len(), rhs.len(), "Pauli strings of different length");
        let mut power = self.phase.power() + rhs.phase.power();
        let letters = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .map(|(&a, &b)| {
                let (k, p) = a.product(b);
                power += k;
                p
            })
            .collect();
        PauliString {
            letters,
            phase: Phase::from_power(power),
        }
    }
}

impl Mul for PauliString {
    type Output = PauliString;

    fn mul(self, rhs: PauliString) -> PauliString {
        &self * &rhs
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            Phase::PlusOne => "",
            Phase::MinusOne => "-",
            Phase::PlusI => "i",
            Phase::MinusI => "-i",
        };
        write!(f, "{prefix}")?;
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (Phase::MinusI, r)
        } else if let Some(r) = s.strip_prefix("+i").or_else(|| s.strip_prefix('i')) {
            (Phase::PlusI, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MinusOne, r)
        } else {
            (Phase::PlusOne, s.strip_prefix('+').unwrap_or(s))
        };
        let letters = rest
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("bad Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        Ok(PauliString { letters, phase })
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn matmul(a: &[C64], b: &[C64], dim: usize) -> Vec<C64> {
        let mut out = vec![C64::default(); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                for j in 0..dim {
                    out[i * dim + j] += a[i * dim + k] * b[k * dim + j];
                }
            }
        }
        out
    }

    #[test]
    fn letter_products() {
        assert_eq!(ps("X") * ps("Y"), ps("iZ"));
        assert_eq!(ps("Y") * ps("X"), ps("-iZ"));
        // XZ = -iY and ZX = iY
        assert_eq!(ps("XZ") * ps("ZX"), ps("YY"));
    }

    #[test]
    fn display_round_trip() {
        for s in ["XXXX", "-ZZII", "iXY", "-iYZ"] {
            assert_eq!(ps(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn hzh_is_x() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hm = [c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)];
        let z = ps("Z").to_matrix();
        let hzh = matmul(&matmul(&hm, &z, 2), &hm, 2);
        let x = ps("X").to_matrix();
        for (a, b) in hzh.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
        (prop::collection::vec(0..4usize, n), 0..4u8).prop_map(|(ls, ph)| {
            PauliString::with_phase(ls.into_iter().map(|k| Pauli::ALL[k]).collect(), Phase::from_power(ph))
        })
    }

    proptest! {
        #[test]
        fn product_matches_matrix_product(a in arb_string(3), b in arb_string(3)) {
            let lhs = (&a * &b).to_matrix();
            let rhs = matmul(&a.to_matrix(), &b.to_matrix(), 8);
            for (x, y) in lhs.iter().zip(&rhs) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn product_is_associative(a in arb_string(4), b in arb_string(4), cc in arb_string(4)) {
            prop_assert_eq!(&(&a * &b) * &cc, &a * &(&b * &cc));
        }

        #[test]
        fn square_is_phase_squared(a in arb_string(4)) {
            let sq = &a * &a;
            prop_assert!(sq.is_identity());
            let expect = if a.phase().is_real() { Phase::PlusOne } else { Phase::MinusOne };
            prop_assert_eq!(sq.phase(), expect);
        }
    }
}
