use std::collections::BTreeSet;

use crate::codes::LogicalInput;
use crate::qsim::{Basis, DensityMatrix, ForcedOutcomes, Gate, OutcomeSource, Pauli, PauliString};
use crate::{Error, Result};

/// Apply `gate` when the XOR of the referenced step outcomes is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Feedforward {
    pub gate: Gate,
    pub depends_on: Vec<usize>,
}

impl Feedforward {
    pub fn new(gate: Gate, depends_on: impl Into<Vec<usize>>) -> Self {
        Self {
            gate,
            depends_on: depends_on.into(),
        }
    }

    fn fires(&self, outcomes: &[u8]) -> bool {
        self.depends_on.iter().fold(0, |acc, &i| acc ^ outcomes[i]) == 1
    }
}

/// One measurement; `feedforward` is applied to the qubit, in listed order,
/// just before it is measured.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub qubit: usize,
    pub basis: Basis,
    pub feedforward: Vec<Feedforward>,
}

impl Step {
    pub fn new(qubit: usize, basis: Basis) -> Self {
        Self {
            qubit,
            basis,
            feedforward: Vec::new(),
        }
    }

    pub fn with(mut self, ff: Feedforward) -> Self {
        self.feedforward.push(ff);
        self
    }
}

/// Adaptive single-qubit measurement program on an `n_qubits` register.
/// Qubits in `erased` are traced out first; after the steps only `output`
/// may remain, and `output_frame` removes its byproduct.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPattern {
    pub n_qubits: usize,
    pub erased: Vec<usize>,
    pub steps: Vec<Step>,
    pub output: usize,
    pub output_frame: Vec<Feedforward>,
}

impl MeasurementPattern {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedPattern(m));
        let n = self.n_qubits;
        if self.output >= n {
            return bad(format!("output {} out of range", self.output));
        }
        let mut used = BTreeSet::new();
        for &q in &self.erased {
            if q >= n || q == self.output || !used.insert(q) {
                return bad(format!("bad erased qubit {q}"));
            }
        }
        for (i, s) in self.steps.iter().enumerate() {
            if s.qubit >= n || s.qubit == self.output {
                return bad(format!("step {i} measures qubit {}", s.qubit));
            }
            if !used.insert(s.qubit) {
                return bad(format!("qubit {} used twice", s.qubit));
            }
            for ff in &s.feedforward {
                if ff.depends_on.iter().any(|&j| j >= i) {
                    return bad(format!("step {i} depends on a later step"));
                }
            }
        }
        if used.len() != n - 1 {
            return bad(format!("{} qubits left unmeasured", n - 1 - used.len()));
        }
        if self.output_frame.iter().any(|ff| ff.depends_on.iter().any(|&j| j >= self.steps.len())) {
            return bad("output frame references a missing step".into());
        }
        Ok(())
    }

    pub fn n_outcomes(&self) -> usize {
        self.steps.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneWayResult {
    /// `(qubit, bit)` in step order.
    pub outcomes: Vec<(usize, u8)>,
    /// Byproduct correction applied to the output, in application order.
    pub byproduct: Vec<Gate>,
    pub probability: f64,
    pub output_state: DensityMatrix,
    pub target: LogicalInput,
    pub fidelity: f64,
}

impl OneWayResult {
    pub fn branch_label(&self) -> String {
        self.outcomes.iter().map(|(_, b)| char::from(b'0' + b)).collect()
    }
}

fn apply_on(
    state: DensityMatrix,
    alive: &[usize],
    q: usize,
    ffs: &[Feedforward],
    outcomes: &[u8],
    log: &mut Vec<Gate>,
) -> Result<DensityMatrix> {
    let idx = alive.iter().position(|&a| a == q).expect("validated");
    ffs.iter().filter(|ff| ff.fires(outcomes)).try_fold(state, |s, ff| {
        log.push(ff.gate);
        s.apply(ff.gate, &[idx])
    })
}

pub fn run_pattern(
    state: &DensityMatrix,
    pattern: &MeasurementPattern,
    target: &LogicalInput,
    src: &mut impl OutcomeSource,
) -> Result<OneWayResult> {
    pattern.validate()?;
    if state.n_qubits() != pattern.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << pattern.n_qubits,
            got: state.dim(),
        });
    }
    let mut alive: Vec<usize> = (0..pattern.n_qubits).filter(|q| !pattern.erased.contains(q)).collect();
    let mut rho = if pattern.erased.is_empty() {
        state.clone()
    } else {
        state.partial_trace(&pattern.erased)?
    };
    let mut bits = Vec::with_capacity(pattern.steps.len());
    let mut probability = 1.0;
    let mut scratch = Vec::new();
    for step in &pattern.steps {
        rho = apply_on(rho, &alive, step.qubit, &step.feedforward, &bits, &mut scratch)?;
        let idx = alive.iter().position(|&a| a == step.qubit).expect("validated");
        let m = rho.measure(idx, step.basis, src)?;
        alive.remove(idx);
        probability *= m.probability;
        bits.push(m.outcome);
        rho = m.state;
    }
    let mut byproduct = Vec::new();
    rho = apply_on(rho, &alive, pattern.output, &pattern.output_frame, &bits, &mut byproduct)?;
    let fidelity = rho.fidelity_pure(&target.state())?;
    Ok(OneWayResult {
        outcomes: pattern.steps.iter().map(|s| s.qubit).zip(bits).collect(),
        byproduct,
        probability,
        output_state: rho,
        target: *target,
        fidelity,
    })
}

/// All forced branches in ascending branch order; impossible branches are
/// skipped.
pub fn enumerate_pattern(
    state: &DensityMatrix,
    pattern: &MeasurementPattern,
    target: &LogicalInput,
) -> Result<Vec<OneWayResult>> {
    let k = pattern.n_outcomes();
    let mut out = Vec::new();
    for b in 0..1usize << k {
        match run_pattern(state, pattern, target, &mut ForcedOutcomes::from_index(b, k)) {
            Ok(r) => out.push(r),
            Err(Error::ZeroProbabilityOutcome { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndirectZ {
    /// Parity of the stabilizer's Z support other than the helper.
    pub inferred: u8,
    pub helper_outcome: u8,
    pub probability: f64,
    /// State with the lost qubit traced out and the helper measured away;
    /// `None` when nothing else remains.
    pub state: Option<DensityMatrix>,
}

/// Infers the Z value of a lost qubit from its stabilizer partner.
///
/// `stabilizer` must hold on `rho` (the state before the loss), act with X or
/// Z on `helper`, and with Z on `lost` and any other qubits. The helper is
/// measured in the basis of its letter and the lost qubit is then traced out.
pub fn indirect_z(
    rho: &DensityMatrix,
    lost: usize,
    helper: usize,
    stabilizer: &PauliString,
    src: &mut impl OutcomeSource,
) -> Result<IndirectZ> {
    let letters = stabilizer.letters();
    if letters.len() != rho.n_qubits() {
        return Err(Error::LengthMismatch {
            expected: rho.n_qubits(),
            got: letters.len(),
        });
    }
    if lost >= letters.len() || helper >= letters.len() || lost == helper {
        return Err(Error::RulePrecondition("lost and helper must be distinct qubits".into()));
    }
    let basis = match letters[helper] {
        Pauli::X => Basis::X,
        Pauli::Z => Basis::Z,
        p => return Err(Error::RulePrecondition(format!("helper letter {p:?}"))),
    };
    let z_only = letters
        .iter()
        .enumerate()
        .all(|(q, &p)| q == helper || p == Pauli::I || p == Pauli::Z);
    if letters[lost] != Pauli::Z || !z_only || !stabilizer.phase().is_real() {
        return Err(Error::RulePrecondition(format!("{stabilizer} is not a Z-type partner of qubit {lost}")));
    }
    let expectation = rho.expectation(stabilizer)?;
    if expectation < 1.0 - 1e-9 {
        return Err(Error::StabilizerNotSatisfied {
            stabilizer: stabilizer.to_string(),
            expectation,
        });
    }
    let m = rho.measure(helper, basis, src)?;
    let lost_after = if lost > helper { lost - 1 } else { lost };
    let state = match m.state.partial_trace(&[lost_after]) {
        Ok(s) => Some(s),
        Err(Error::DiscardAll) => None,
        Err(e) => return Err(e),
    };
    let sign = u8::from(stabilizer.phase() != crate::qsim::Phase::PlusOne);
    Ok(IndirectZ {
        inferred: m.outcome ^ sign,
        helper_outcome: m.outcome,
        probability: m.probability,
        state,
    })
}
