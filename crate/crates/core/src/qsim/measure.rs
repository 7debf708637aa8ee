use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;

use super::{bit, c, check_qubit, DensityMatrix, StateVector, C64, PROB_FLOOR};
use crate::{Error, Result};

/// Single-qubit projective measurement basis. Outcome 0 is always the first
/// vector: `|0>`, `|+>` or `(|0> + e^{ia}|1>)/sqrt2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    Z,
    X,
    /// `B(a) = {(|0> ± e^{ia}|1>)/sqrt2}`; `Angle(0)` is the X basis.
    Angle(f64),
}

impl Basis {
    /// Amplitudes of the two basis vectors, outcome 0 first.
    pub fn vectors(&self) -> [[C64; 2]; 2] {
        let h = FRAC_1_SQRT_2;
        match *self {
            Basis::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
            Basis::X => Basis::Angle(0.0).vectors(),
            Basis::Angle(a) => {
                let e = C64::from_polar(h, a);
                [[c(h, 0.0), e], [c(h, 0.0), -e]]
            }
        }
    }
}

/// Supplies measurement outcomes, either scripted or random.
pub trait OutcomeSource {
    /// Chooses an outcome given the probability `p0` of outcome 0.
    fn next_outcome(&mut self, p0: f64) -> Result<u8>;
}

/// Replays a fixed outcome list in order.
#[derive(Debug, Clone)]
pub struct ForcedOutcomes {
    bits: Vec<u8>,
    pos: usize,
}

impl ForcedOutcomes {
    pub fn new(bits: impl Into<Vec<u8>>) -> Self {
        Self {
            bits: bits.into(),
            pos: 0,
        }
    }

    /// The `k` low bits of `branch`, most significant first.
    pub fn from_index(branch: usize, k: usize) -> Self {
        Self::new((0..k).map(|i| (branch >> (k - 1 - i) & 1) as u8).collect::<Vec<_>>())
    }

    pub fn consumed(&self) -> usize {
        self.pos
    }
}

impl OutcomeSource for ForcedOutcomes {
    fn next_outcome(&mut self, _p0: f64) -> Result<u8> {
        let b = *self.bits.get(self.pos).ok_or(Error::OutcomesExhausted)?;
        self.pos += 1;
        Ok(b & 1)
    }
}

/// Draws outcomes from an RNG according to the Born rule.
#[derive(Debug)]
pub struct SampledOutcomes<R>(pub R);

impl<R: Rng> OutcomeSource for SampledOutcomes<R> {
    fn next_outcome(&mut self, p0: f64) -> Result<u8> {
        Ok(u8::from(self.0.random::<f64>() >= p0))
    }
}

/// Result of measuring one qubit; the measured qubit is removed from `state`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured<S> {
    pub outcome: u8,
    pub state: S,
    pub probability: f64,
}

fn check_forced(qubit: usize, outcome: u8, probability: f64) -> Result<()> {
    if probability <= PROB_FLOOR {
        return Err(Error::ZeroProbabilityOutcome {
            qubit,
            outcome,
            probability,
        });
    }
    Ok(())
}

impl StateVector {
    pub fn outcome_probabilities(&self, q: usize, basis: Basis) -> Result<[f64; 2]> {
        check_qubit(q, self.n_qubits())?;
        let vs = basis.vectors();
        let mask = bit(self.n_qubits(), q);
        let a = self.amplitudes();
        let mut p = [0.0; 2];
        for (o, v) in vs.iter().enumerate() {
            p[o] = (0..a.len())
                .filter(|i| i & mask == 0)
                .map(|i| (v[0].conj() * a[i] + v[1].conj() * a[i | mask]).norm_sqr())
                .sum();
        }
        Ok(p)
    }

    /// Projects qubit `q` onto the given outcome and removes it.
    pub fn collapse(&self, q: usize, basis: Basis, outcome: u8) -> Result<Measured<StateVector>> {
        let rest = self.project_out(q, basis.vectors()[usize::from(outcome & 1)])?;
        let probability: f64 = rest.iter().map(|z| z.norm_sqr()).sum();
        check_forced(q, outcome, probability)?;
        Ok(Measured {
            outcome,
            state: StateVector::from_amplitudes(rest)?,
            probability,
        })
    }

    pub fn measure(
        &self,
        q: usize,
        basis: Basis,
        src: &mut impl OutcomeSource,
    ) -> Result<Measured<StateVector>> {
        let [p0, _] = self.outcome_probabilities(q, basis)?;
        let outcome = src.next_outcome(p0)?;
        self.collapse(q, basis, outcome)
    }
}

impl DensityMatrix {
    pub fn outcome_probabilities(&self, q: usize, basis: Basis) -> Result<[f64; 2]> {
        check_qubit(q, self.n_qubits())?;
        let vs = basis.vectors();
        let mask = bit(self.n_qubits(), q);
        let mut p = [0.0; 2];
        for (o, v) in vs.iter().enumerate() {
            p[o] = (0..self.dim())
                .filter(|i| i & mask == 0)
                .map(|i| {
                    let j = i | mask;
                    (v[0].conj() * (self.get(i, i) * v[0] + self.get(i, j) * v[1])
                        + v[1].conj() * (self.get(j, i) * v[0] + self.get(j, j) * v[1]))
                        .re
                })
                .sum();
        }
        Ok(p)
    }

    /// Projects qubit `q` onto the given outcome and removes it.
    pub fn collapse(&self, q: usize, basis: Basis, outcome: u8) -> Result<Measured<DensityMatrix>> {
        let rest = self.project_out(q, basis.vectors()[usize::from(outcome & 1)])?;
        let probability = rest.trace();
        check_forced(q, outcome, probability)?;
        Ok(Measured {
            outcome,
            state: rest.scaled(1.0 / probability),
            probability,
        })
    }

    pub fn measure(
        &self,
        q: usize,
        basis: Basis,
        src: &mut impl OutcomeSource,
    ) -> Result<Measured<DensityMatrix>> {
        let [p0, _] = self.outcome_probabilities(q, basis)?;
        let outcome = src.next_outcome(p0)?;
        self.collapse(q, basis, outcome)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn ket(terms: &[(&str, C64)]) -> StateVector {
        StateVector::from_terms(terms.iter().copied()).unwrap()
    }

    #[test]
    fn z_measure_bell_pair() {
        let bell = ket(&[("00", c(1.0, 0.0)), ("11", c(1.0, 0.0))]);
        let m = DensityMatrix::from_pure(&bell)
            .measure(0, Basis::Z, &mut ForcedOutcomes::new([0]))
            .unwrap();
        assert_eq!(m.outcome, 0);
        assert!((m.probability - 0.5).abs() < 1e-12);
        assert!((m.state.get(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_measure_plus_factor() {
        let psi = ket(&[("0", c(0.6, 0.0)), ("1", c(0.0, 0.8))]);
        let plus = ket(&[("0", c(1.0, 0.0)), ("1", c(1.0, 0.0))]);
        let m = plus
            .tensor(&psi)
            .unwrap()
            .measure(0, Basis::X, &mut ForcedOutcomes::new([0]))
            .unwrap();
        assert!((m.probability - 1.0).abs() < 1e-12);
        assert!(m.state.equal_up_to_phase(&psi));
    }

    #[test]
    fn angle_basis_on_r_state() {
        let r = ket(&[("0", c(1.0, 0.0)), ("1", c(0.0, 1.0))]);
        let rest = r.tensor(&ket(&[("0", c(1.0, 0.0))])).unwrap();
        let m = DensityMatrix::from_pure(&rest)
            .measure(0, Basis::Angle(-FRAC_PI_2), &mut ForcedOutcomes::new([1]))
            .unwrap();
        assert!((m.probability - 1.0).abs() < 1e-12);
        let p = DensityMatrix::from_pure(&r)
            .outcome_probabilities(0, Basis::Angle(-FRAC_PI_2))
            .unwrap();
        assert!(p[0].abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forcing_impossible_outcome_fails() {
        let zero = StateVector::zero(2).unwrap();
        let err = zero.measure(1, Basis::Z, &mut ForcedOutcomes::new([1]));
        assert!(matches!(err, Err(Error::ZeroProbabilityOutcome { .. })));
        let err = zero.measure(1, Basis::Z, &mut ForcedOutcomes::new([]));
        assert_eq!(err, Err(Error::OutcomesExhausted));
    }

    #[test]
    fn sampled_outcomes_follow_born_rule() {
        let psi = ket(&[("00", c(0.6, 0.0)), ("11", c(0.8, 0.0))]);
        let mut src = SampledOutcomes(ChaCha8Rng::seed_from_u64(5));
        let ones = (0..20000)
            .filter(|_| psi.measure(0, Basis::Z, &mut src).unwrap().outcome == 1)
            .count();
        let f = ones as f64 / 20000.0;
        assert!((f - 0.64).abs() < 0.02, "{f}");
    }

    fn random_state(n: usize, raw: &[(f64, f64)]) -> StateVector {
        StateVector::from_amplitudes(raw[..1 << n].iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn branches_average_to_partial_trace(
            raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
            q in 0usize..3,
            a in -3.2f64..3.2,
        ) {
            prop_assume!(raw.iter().map(|(x, y)| x * x + y * y).sum::<f64>() > 1e-3);
            let rho = DensityMatrix::from_pure(&random_state(3, &raw));
            let basis = Basis::Angle(a);
            let p = rho.outcome_probabilities(q, basis).unwrap();
            prop_assert!((p[0] + p[1] - 1.0).abs() < 1e-10);
            let traced = rho.partial_trace(&[q]).unwrap();
            let mut avg = DensityMatrix::maximally_mixed(2).unwrap().scaled(0.0);
            for o in 0..2u8 {
                if p[usize::from(o)] > 1e-9 {
                    let m = rho.collapse(q, basis, o).unwrap();
                    avg = avg.mix(1.0, &m.state, m.probability).unwrap();
                }
            }
            prop_assert!(avg.max_abs_diff(&traced) < 1e-10);
        }
    }
}
