//! Heralded loss as erasure, and measure-and-correct decoding to one qubit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::codes::{encode, CodeParams, LogicalInput};
use crate::qsim::{
    binomial_estimate, noisy_state, Basis, ChannelLayout, DensityMatrix, ForcedOutcomes, Gate,
    NoiseSpec, OutcomeSource, Seed,
};
use crate::{Error, Result};

/// Stream family used by [`recovery_sweep`].
const SWEEP_STREAM: u32 = 1;

/// Set of lost physical qubits.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LossPattern {
    lost: BTreeSet<usize>,
}

impl LossPattern {
    pub fn new(lost: impl IntoIterator<Item = usize>) -> Self {
        Self {
            lost: lost.into_iter().collect(),
        }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn single(q: usize) -> Self {
        Self::new([q])
    }

    pub fn lost(&self) -> Vec<usize> {
        self.lost.iter().copied().collect()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.lost.contains(&q)
    }

    pub fn len(&self) -> usize {
        self.lost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lost.is_empty()
    }

    pub fn validate(&self, params: &CodeParams) -> Result<()> {
        match self.lost.iter().find(|&&q| q >= params.total()) {
            Some(&q) => Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: params.total(),
            }),
            None => Ok(()),
        }
    }

    fn losses_in(&self, params: &CodeParams, b: usize) -> usize {
        params.block(b).filter(|q| self.contains(*q)).count()
    }
}

impl fmt::Display for LossPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lost.iter().map(|q| q.to_string()).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Traces out the lost qubits; survivors keep ascending order.
pub fn erase(rho: &DensityMatrix, pattern: &LossPattern) -> Result<DensityMatrix> {
    if pattern.is_empty() {
        return Ok(rho.clone());
    }
    rho.partial_trace(&pattern.lost())
}

/// Every block keeps a survivor and at least one block is untouched.
pub fn recoverable(params: &CodeParams, pattern: &LossPattern) -> bool {
    let losses: Vec<usize> = (0..params.m()).map(|b| pattern.losses_in(params, b)).collect();
    losses.iter().all(|&k| k < params.n()) && losses.contains(&0)
}

/// Highest-index qubit of the lowest-index loss-free block.
pub fn default_target(params: &CodeParams, pattern: &LossPattern) -> Option<usize> {
    (0..params.m())
        .find(|&b| pattern.losses_in(params, b) == 0)
        .map(|b| params.block(b).end - 1)
}

/// Measurement schedule and outcome-keyed correction for one loss pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryPlan {
    pub params: CodeParams,
    pub pattern: LossPattern,
    /// Survivors of every non-target block, measured in Z.
    pub z_measurements: Vec<usize>,
    /// Non-target qubits of the target block, measured in X.
    pub x_measurements: Vec<usize>,
    pub target: usize,
    /// One Z outcome per non-target block enters the Z parity.
    pub z_parity_qubits: Vec<usize>,
    /// `(z parity, x parity)` to an operator word, written left to right and
    /// applied right to left.
    pub correction_table: BTreeMap<(u8, u8), Vec<Gate>>,
}

fn correction_table() -> BTreeMap<(u8, u8), Vec<Gate>> {
    let mut t = BTreeMap::new();
    for zp in 0..2u8 {
        for xp in 0..2u8 {
            let mut word = vec![Gate::H];
            if zp == 1 {
                word.push(Gate::X);
            }
            if xp == 1 {
                word.push(Gate::Z);
            }
            t.insert((zp, xp), word);
        }
    }
    t
}

fn build_plan(params: &CodeParams, pattern: &LossPattern, target: usize) -> RecoveryPlan {
    let tb = params.block_of(target);
    let mut z_measurements = Vec::new();
    let mut z_parity_qubits = Vec::new();
    for b in (0..params.m()).filter(|&b| b != tb) {
        let survivors: Vec<usize> = params.block(b).filter(|q| !pattern.contains(*q)).collect();
        if let Some(&first) = survivors.first() {
            z_parity_qubits.push(first);
        }
        z_measurements.extend(survivors);
    }
    let x_measurements = params
        .block(tb)
        .filter(|&q| q != target && !pattern.contains(q))
        .collect();
    RecoveryPlan {
        params: *params,
        pattern: pattern.clone(),
        z_measurements,
        x_measurements,
        target,
        z_parity_qubits,
        correction_table: correction_table(),
    }
}

/// Plan for a recoverable pattern. `target` defaults to [`default_target`].
pub fn plan_recovery(
    params: &CodeParams,
    pattern: &LossPattern,
    target: Option<usize>,
) -> Result<RecoveryPlan> {
    pattern.validate(params)?;
    if !recoverable(params, pattern) {
        return Err(Error::NotRecoverable(pattern.lost()));
    }
    let target = match target {
        Some(t) => {
            if t >= params.total() {
                return Err(Error::QubitOutOfRange {
                    index: t,
                    n_qubits: params.total(),
                });
            }
            if pattern.losses_in(params, params.block_of(t)) > 0 {
                return Err(Error::TargetInDamagedBlock(t));
            }
            t
        }
        None => default_target(params, pattern).expect("recoverable pattern has an intact block"),
    };
    Ok(build_plan(params, pattern, target))
}

/// Same schedule applied to any pattern that leaves a survivor: the target
/// block is the one with the fewest losses, fully lost blocks contribute no
/// parity information.
pub fn plan_best_effort(params: &CodeParams, pattern: &LossPattern) -> Result<RecoveryPlan> {
    pattern.validate(params)?;
    let tb = (0..params.m())
        .min_by_key(|&b| pattern.losses_in(params, b))
        .expect("m >= 1");
    let target = params
        .block(tb)
        .rev()
        .find(|q| !pattern.contains(*q))
        .ok_or(Error::DiscardAll)?;
    Ok(build_plan(params, pattern, target))
}

impl RecoveryPlan {
    /// Measurements in execution order.
    pub fn measurements(&self) -> impl Iterator<Item = (usize, Basis)> + '_ {
        self.z_measurements
            .iter()
            .map(|&q| (q, Basis::Z))
            .chain(self.x_measurements.iter().map(|&q| (q, Basis::X)))
    }

    pub fn n_outcomes(&self) -> usize {
        self.z_measurements.len() + self.x_measurements.len()
    }

    pub fn n_branches(&self) -> usize {
        1 << self.n_outcomes()
    }

    pub fn correction(&self, z_parity: u8, x_parity: u8) -> &[Gate] {
        &self.correction_table[&(z_parity & 1, x_parity & 1)]
    }
}

/// Operator word such as `HXZ`.
pub fn word_to_string(word: &[Gate]) -> String {
    if word.is_empty() {
        return "I".into();
    }
    word.iter().map(|g| g.to_string()).collect()
}

/// Outcome of running a plan on one erased codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryRecord {
    /// `(physical qubit, bit)` in measurement order.
    pub outcomes: Vec<(usize, u8)>,
    pub parities: (u8, u8),
    pub correction_applied: Vec<Gate>,
    /// Joint probability of the observed outcomes.
    pub probability: f64,
    pub output: DensityMatrix,
    pub fidelity_vs_input: f64,
}

impl RecoveryRecord {
    pub fn branch_label(&self) -> String {
        self.outcomes.iter().map(|(_, b)| char::from(b'0' + b)).collect()
    }
}

/// Runs the plan on the erased state `rho` (survivors only).
pub fn execute_recovery(
    rho: &DensityMatrix,
    plan: &RecoveryPlan,
    input: &LogicalInput,
    src: &mut impl OutcomeSource,
) -> Result<RecoveryRecord> {
    let mut alive: Vec<usize> = (0..plan.params.total())
        .filter(|q| !plan.pattern.contains(*q))
        .collect();
    if rho.n_qubits() != alive.len() {
        return Err(Error::DimensionMismatch {
            expected: 1 << alive.len(),
            got: rho.dim(),
        });
    }
    let mut state = rho.clone();
    let mut outcomes = Vec::with_capacity(plan.n_outcomes());
    let mut probability = 1.0;
    for (q, basis) in plan.measurements() {
        let idx = alive.iter().position(|&a| a == q).expect("plan only measures survivors");
        let m = state.measure(idx, basis, src)?;
        alive.remove(idx);
        probability *= m.probability;
        outcomes.push((q, m.outcome));
        state = m.state;
    }
    let bit_of = |q: usize| outcomes.iter().find(|(p, _)| *p == q).map_or(0, |(_, b)| *b);
    let zp = plan.z_parity_qubits.iter().fold(0, |acc, &q| acc ^ bit_of(q));
    let xp = plan.x_measurements.iter().fold(0, |acc, &q| acc ^ bit_of(q));
    let word = plan.correction(zp, xp).to_vec();
    for g in word.iter().rev() {
        state = state.apply(*g, &[0])?;
    }
    let fidelity_vs_input = state.fidelity_pure(&input.state())?;
    Ok(RecoveryRecord {
        outcomes,
        parities: (zp, xp),
        correction_applied: word,
        probability,
        output: state,
        fidelity_vs_input,
    })
}

/// Every forced branch of `plan`; branches of zero probability are skipped.
pub fn enumerate_branches(
    rho: &DensityMatrix,
    plan: &RecoveryPlan,
    input: &LogicalInput,
) -> Result<Vec<RecoveryRecord>> {
    let k = plan.n_outcomes();
    let mut out = Vec::with_capacity(1 << k);
    for b in 0..1usize << k {
        match execute_recovery(rho, plan, input, &mut ForcedOutcomes::from_index(b, k)) {
            Ok(r) => out.push(r),
            Err(Error::ZeroProbabilityOutcome { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Probability-weighted fidelity over all branches.
pub fn average_fidelity(records: &[RecoveryRecord]) -> f64 {
    records.iter().map(|r| r.probability * r.fidelity_vs_input).sum()
}

/// One `(input, loss pattern, branch)` cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRow {
    pub input: usize,
    pub pattern: LossPattern,
    pub branch: String,
    pub correction: String,
    pub probability: f64,
    /// Noiseless-readout value.
    pub exact: f64,
    /// Shot estimate (equals `exact` when `shots == 0`).
    pub fidelity: f64,
    pub sigma: f64,
}

/// Sweep inputs x patterns x branches. The codeword is prepared under
/// `noise`, erased, decoded on every forced branch and each branch fidelity
/// is estimated from `shots` single-shot readouts of the output against the
/// input. Rows come out ordered by input, pattern, branch.
pub fn recovery_sweep(
    inputs: &[LogicalInput],
    params: &CodeParams,
    noise: &NoiseSpec,
    layout: &ChannelLayout,
    patterns: &[LossPattern],
    shots: u64,
    seed: Seed,
) -> Result<Vec<BranchRow>> {
    noise.validate()?;
    for p in patterns {
        p.validate(params)?;
    }
    let cells: Vec<(usize, usize)> = (0..inputs.len())
        .flat_map(|i| (0..patterns.len()).map(move |p| (i, p)))
        .collect();
    let per_cell: Vec<Vec<BranchRow>> = cells
        .par_iter()
        .enumerate()
        .map(|(cell, &(i, p))| {
            let pattern = &patterns[p];
            let rho = noisy_state(&encode(&inputs[i], params)?, noise, layout)?;
            let plan = plan_recovery(params, pattern, None)?;
            let records = enumerate_branches(&erase(&rho, pattern)?, &plan, &inputs[i])?;
            let mut rng = seed.substream(SWEEP_STREAM, cell as u32);
            Ok(records
                .into_iter()
                .map(|r| {
                    let (fidelity, sigma) = binomial_estimate(&mut rng, shots, r.fidelity_vs_input);
                    BranchRow {
                        input: i,
                        pattern: pattern.clone(),
                        branch: r.branch_label(),
                        correction: word_to_string(&r.correction_applied),
                        probability: r.probability,
                        exact: r.fidelity_vs_input,
                        fidelity,
                        sigma,
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::qsim::{c, SampledOutcomes, StateVector};

    fn p22() -> CodeParams {
        CodeParams::new(2, 2).unwrap()
    }

    fn codeword(x: &LogicalInput) -> DensityMatrix {
        DensityMatrix::from_pure(&encode(x, &p22()).unwrap())
    }

    fn ket(terms: &[(&str, f64)]) -> DensityMatrix {
        DensityMatrix::from_pure(&StateVector::from_terms(terms.iter().map(|&(b, a)| (b, c(a, 0.0)))).unwrap())
    }

    #[test]
    fn erase_examples() {
        let out = erase(&codeword(&LogicalInput::plus()), &LossPattern::single(0)).unwrap();
        let expect = ket(&[("000", 1.0)]).mix(0.5, &ket(&[("111", 1.0)]), 0.5).unwrap();
        assert!(out.max_abs_diff(&expect) < 1e-12);

        let rho = codeword(&LogicalInput::r());
        assert_eq!(erase(&rho, &LossPattern::none()).unwrap(), rho);

        let out = erase(&codeword(&LogicalInput::v()), &LossPattern::single(0)).unwrap();
        let expect = DensityMatrix::maximally_mixed(1)
            .unwrap()
            .tensor(&ket(&[("00", 1.0), ("11", -1.0)]))
            .unwrap();
        assert!(out.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn recoverability_predicate() {
        assert!(recoverable(&p22(), &LossPattern::single(1)));
        assert!(!recoverable(&p22(), &LossPattern::new([0, 1])));
        assert!(!recoverable(&p22(), &LossPattern::new([0, 2])));
        let p32 = CodeParams::new(3, 2).unwrap();
        assert!(recoverable(&p32, &LossPattern::new([0, 1])));
        assert!(!recoverable(&CodeParams::new(2, 1).unwrap(), &LossPattern::single(0)));
    }

    #[test]
    fn plan_for_first_qubit_lost() {
        let plan = plan_recovery(&p22(), &LossPattern::single(0), Some(3)).unwrap();
        assert_eq!(plan.z_measurements, [1]);
        assert_eq!(plan.x_measurements, [2]);
        assert_eq!(plan.target, 3);
        let words: Vec<String> = [(0, 0), (1, 0), (0, 1), (1, 1)]
            .iter()
            .map(|&(z, x)| word_to_string(plan.correction(z, x)))
            .collect();
        assert_eq!(words, ["H", "HX", "HZ", "HXZ"]);
    }

    #[test]
    fn plan_for_last_qubit_lost() {
        let plan = plan_recovery(&p22(), &LossPattern::single(3), Some(1)).unwrap();
        assert_eq!(plan.z_measurements, [2]);
        assert_eq!(plan.x_measurements, [0]);
        assert_eq!(plan, plan_recovery(&p22(), &LossPattern::single(3), None).unwrap());
    }

    #[test]
    fn plan_without_loss() {
        let plan = plan_recovery(&p22(), &LossPattern::none(), Some(3)).unwrap();
        assert_eq!(plan.z_measurements, [0, 1]);
        assert_eq!(plan.x_measurements, [2]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = LogicalInput::haar(&mut rng);
            for r in enumerate_branches(&codeword(&x), &plan, &x).unwrap() {
                assert!((r.fidelity_vs_input - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn plan_errors() {
        assert_eq!(
            plan_recovery(&p22(), &LossPattern::new([0, 1]), None),
            Err(Error::NotRecoverable(vec![0, 1]))
        );
        assert_eq!(
            plan_recovery(&p22(), &LossPattern::single(0), Some(1)),
            Err(Error::TargetInDamagedBlock(1))
        );
        assert!(plan_recovery(&p22(), &LossPattern::single(9), None).is_err());
    }

    #[test]
    fn every_branch_of_v_recovers() {
        let x = LogicalInput::v();
        let plan = plan_recovery(&p22(), &LossPattern::single(0), None).unwrap();
        let rho = erase(&codeword(&x), &plan.pattern).unwrap();
        let recs = enumerate_branches(&rho, &plan, &x).unwrap();
        assert_eq!(recs.len(), 4);
        for r in &recs {
            assert!((r.fidelity_vs_input - 1.0).abs() < 1e-12);
            assert!((r.probability - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn r_with_third_qubit_lost() {
        let x = LogicalInput::r();
        let plan = plan_recovery(&p22(), &LossPattern::single(2), None).unwrap();
        let rho = erase(&codeword(&x), &plan.pattern).unwrap();
        let rec = execute_recovery(&rho, &plan, &x, &mut ForcedOutcomes::new([0, 0])).unwrap();
        assert!((rec.fidelity_vs_input - 1.0).abs() < 1e-12);
        assert_eq!(word_to_string(&rec.correction_applied), "H");
    }

    #[test]
    fn white_noise_gives_half_plus_half_v() {
        let v = 0.5;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let x = LogicalInput::haar(&mut rng);
            let rho = noisy_state(&encode(&x, &p22()).unwrap(), &NoiseSpec::white(v).unwrap(), &ChannelLayout::default()).unwrap();
            for lost in 0..4 {
                let plan = plan_recovery(&p22(), &LossPattern::single(lost), None).unwrap();
                for r in enumerate_branches(&erase(&rho, &plan.pattern).unwrap(), &plan, &x).unwrap() {
                    assert!((r.fidelity_vs_input - 0.75).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let plan = plan_recovery(&p22(), &LossPattern::single(0), None).unwrap();
        let err = execute_recovery(&codeword(&LogicalInput::v()), &plan, &LogicalInput::v(), &mut ForcedOutcomes::new([0, 0]));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn larger_code_with_two_losses() {
        let p32 = CodeParams::new(3, 2).unwrap();
        let pattern = LossPattern::new([0, 1]);
        let x = LogicalInput::s();
        let plan = plan_recovery(&p32, &pattern, None).unwrap();
        assert_eq!(plan.target, 5);
        let rho = erase(&DensityMatrix::from_pure(&encode(&x, &p32).unwrap()), &pattern).unwrap();
        for r in enumerate_branches(&rho, &plan, &x).unwrap() {
            assert!((r.fidelity_vs_input - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sampled_average_matches_branch_average() {
        let x = LogicalInput::r();
        let spec = NoiseSpec {
            white_noise_v: 0.8,
            pair_dephasing_d: 0.1,
            epr_visibility: 1.0,
        };
        let layout = ChannelLayout::pairs(&[(0, 1), (2, 3), (1, 2)]);
        let rho = noisy_state(&encode(&x, &p22()).unwrap(), &spec, &layout).unwrap();
        let plan = plan_recovery(&p22(), &LossPattern::single(1), None).unwrap();
        let erased = erase(&rho, &plan.pattern).unwrap();
        let exact = average_fidelity(&enumerate_branches(&erased, &plan, &x).unwrap());

        let mut src = SampledOutcomes(Seed(21).stream(0));
        let fs: Vec<f64> = (0..10_000)
            .map(|_| execute_recovery(&erased, &plan, &x, &mut src).unwrap().fidelity_vs_input)
            .collect();
        let mean = fs.iter().sum::<f64>() / fs.len() as f64;
        let var = fs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (fs.len() - 1) as f64;
        let sigma = (var / fs.len() as f64).sqrt();
        assert!((mean - exact).abs() <= 3.0 * sigma.max(1e-12), "{mean} vs {exact} ({sigma})");
    }

    #[test]
    fn fidelity_monotone_in_white_noise() {
        let x = LogicalInput::plus();
        let plan = plan_recovery(&p22(), &LossPattern::single(2), None).unwrap();
        let mut last = f64::INFINITY;
        for k in 0..=5 {
            let v = 1.0 - 0.1 * k as f64;
            let rho = noisy_state(&encode(&x, &p22()).unwrap(), &NoiseSpec::white(v).unwrap(), &ChannelLayout::default()).unwrap();
            let f = average_fidelity(&enumerate_branches(&erase(&rho, &plan.pattern).unwrap(), &plan, &x).unwrap());
            assert!(f <= last + 1e-12);
            last = f;
        }
    }

    #[test]
    fn fully_lost_block_stays_below_classical_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pattern = LossPattern::new([0, 1]);
        let plan = plan_best_effort(&p22(), &pattern).unwrap();
        let mut total = 0.0;
        for _ in 0..200 {
            let x = LogicalInput::haar(&mut rng);
            let rho = erase(&codeword(&x), &pattern).unwrap();
            total += average_fidelity(&enumerate_branches(&rho, &plan, &x).unwrap());
        }
        let avg = total / 200.0;
        assert!(avg <= (1.0 + FRAC_1_SQRT_2) / 2.0 + 0.02, "{avg}");
    }

    #[test]
    fn sweep_rows_are_ordered_and_noiseless_rows_are_one() {
        let inputs = [LogicalInput::v(), LogicalInput::plus(), LogicalInput::r()];
        let patterns: Vec<LossPattern> = (0..4).map(LossPattern::single).collect();
        let rows = recovery_sweep(&inputs, &p22(), &NoiseSpec::noiseless(), &ChannelLayout::default(), &patterns, 1000, Seed(1)).unwrap();
        assert_eq!(rows.len(), 48);
        assert!(rows.iter().all(|r| (r.fidelity - 1.0).abs() < 1e-12));
        let keys: Vec<_> = rows.iter().map(|r| (r.input, r.pattern.clone(), r.branch.clone())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn single_loss_round_trip(a in (-1.0f64..1.0, -1.0f64..1.0), b in (-1.0f64..1.0, -1.0f64..1.0), lost in 0usize..4) {
            prop_assume!(a.0.abs() + a.1.abs() + b.0.abs() + b.1.abs() > 1e-3);
            let x = LogicalInput::new(c(a.0, a.1), c(b.0, b.1)).unwrap();
            let plan = plan_recovery(&p22(), &LossPattern::single(lost), None).unwrap();
            let rho = erase(&codeword(&x), &plan.pattern).unwrap();
            let recs = enumerate_branches(&rho, &plan, &x).unwrap();
            let total: f64 = recs.iter().map(|r| r.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
            for r in recs {
                prop_assert!((r.fidelity_vs_input - 1.0).abs() < 1e-9);
            }
        }
    }
}
