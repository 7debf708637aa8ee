use std::fmt;
use std::str::FromStr;

use super::graph::{graph_cluster_state, Graph};
use super::pattern::{run_pattern, Feedforward, MeasurementPattern, OneWayResult, Step};
use crate::codes::LogicalInput;
use crate::qsim::{noisy_state, Basis, ChannelLayout, DensityMatrix, Gate, NoiseSpec, OutcomeSource, StateVector, C64};
use crate::{Error, Result};

/// Five-photon state, photon `k` on qubit `k-1`, amplitude 1/2 on
/// `00000`, `01111`, `10011` and `11100`.
pub fn phi5() -> StateVector {
    let h = C64::new(0.5, 0.0);
    StateVector::from_terms([("00000", h), ("01111", h), ("10011", h), ("11100", h)])
        .expect("fixed five-qubit state")
}

/// Cluster graph behind [`phi5`]: the path `2 - 1 - 0 - 3 - 4`.
pub fn phi5_graph() -> Graph {
    Graph::new(0..5, [(0, 1), (1, 2), (0, 3), (3, 4)]).expect("fixed graph")
}

/// `H_0 H_2 H_4` applied to the cluster state of [`phi5_graph`].
pub fn phi5_from_cluster() -> Result<StateVector> {
    let mut psi = graph_cluster_state(&phi5_graph())?;
    for q in [0, 2, 4] {
        psi = psi.apply(Gate::H, &[q])?;
    }
    Ok(psi)
}

/// Which photon of [`phi5`] is lost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LossCase {
    Photon2,
    Photon4,
}

impl LossCase {
    pub const ALL: [LossCase; 2] = [LossCase::Photon2, LossCase::Photon4];

    pub fn lost_qubit(self) -> usize {
        match self {
            LossCase::Photon2 => 1,
            LossCase::Photon4 => 3,
        }
    }

    /// `(H/V-measured, +/- measured, B(alpha)-measured)` qubits.
    fn roles(self) -> (usize, usize, usize) {
        match self {
            LossCase::Photon2 => (2, 4, 3),
            LossCase::Photon4 => (4, 2, 1),
        }
    }
}

impl fmt::Display for LossCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossCase::Photon2 => write!(f, "photon2"),
            LossCase::Photon4 => write!(f, "photon4"),
        }
    }
}

impl FromStr for LossCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "photon2" | "2" => Ok(LossCase::Photon2),
            "photon4" | "4" => Ok(LossCase::Photon4),
            other => Err(Error::UnsupportedLossCase(other.to_string())),
        }
    }
}

/// The rotation target `Rz(-alpha)|+>`, i.e. `(|0> + e^{-i alpha}|1>)/sqrt2`.
pub fn rotation_target(alpha: f64) -> LogicalInput {
    LogicalInput::on_equator(-alpha)
}

/// Lab-basis program on [`phi5`] for one loss case. The neighbour of the
/// lost photon is read in H/V, which infers the lost photon's value; the
/// redundant end photon is read in +/-; the resulting pair `(s, t)` selects
/// `X^s Z^t` on the middle photon before it is measured in `B(alpha)`, and
/// that outcome `r` leaves `Z^r` on photon 1.
pub fn oneway_pattern(case: LossCase, alpha: f64) -> MeasurementPattern {
    let (zq, xq, aq) = case.roles();
    MeasurementPattern {
        n_qubits: 5,
        erased: vec![case.lost_qubit()],
        steps: vec![
            Step::new(zq, Basis::Z),
            Step::new(xq, Basis::X),
            Step::new(aq, Basis::Angle(alpha))
                .with(Feedforward::new(Gate::Z, [1]))
                .with(Feedforward::new(Gate::X, [0])),
        ],
        output: 0,
        output_frame: vec![Feedforward::new(Gate::Z, [2])],
    }
}

/// Prepares [`phi5`] under `noise`, loses the photon and runs
/// [`oneway_pattern`]; fidelity is measured against [`rotation_target`].
pub fn loss_tolerant_rotation(
    case: LossCase,
    alpha: f64,
    noise: &NoiseSpec,
    layout: &ChannelLayout,
    src: &mut impl OutcomeSource,
) -> Result<OneWayResult> {
    let rho = noisy_state(&phi5(), noise, layout)?;
    run_pattern(&rho, &oneway_pattern(case, alpha), &rotation_target(alpha), src)
}

/// Noisy [`phi5`] density matrix.
pub fn noisy_phi5(noise: &NoiseSpec, layout: &ChannelLayout) -> Result<DensityMatrix> {
    noisy_state(&phi5(), noise, layout)
}
