use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use rayon::prelude::*;

use super::config::{Experiment, ExperimentConfig, Placement};
use super::HarnessError;
use crate::cluster::{enumerate_pattern, noisy_phi5, oneway_pattern, phi5, phi5_graph, rotation_target, LossCase};
use crate::codes::{encode, CodeParams};
use crate::qsim::{binomial_estimate, noisy_state, ChannelLayout, DensityMatrix, Seed, StateVector};
use crate::recovery::{recovery_sweep, LossPattern};
use crate::tomography::{decompose_projector, estimate_fidelity, exact_estimate, group_settings, simulate_all};

const ENCODE_STREAM: u32 = 100;
const CLUSTER_STREAM: u32 = 200;
const ONEWAY_STREAM: u32 = 300;

/// One output line. Empty strings and `None` mark non-applicable columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: Experiment,
    pub input: String,
    pub code: Option<(usize, usize)>,
    pub lost: String,
    pub branch: String,
    pub alpha: Option<f64>,
    pub fidelity: f64,
    pub sigma: f64,
    pub settings: Option<usize>,
    pub shots: u64,
    pub seed: u64,
}

/// `--force-branch`: `BITS` or `LOST:BITS`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchFilter {
    pub lost: Option<String>,
    pub bits: String,
}

impl BranchFilter {
    pub fn parse(spec: &str) -> Result<Self, HarnessError> {
        let (lost, bits) = match spec.split_once(':') {
            Some((l, b)) => (Some(l.trim().to_string()), b.trim()),
            None => (None, spec.trim()),
        };
        if bits.is_empty() || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(HarnessError::config("force_branch", format!("expected BITS or LOST:BITS, got {spec:?}")));
        }
        Ok(Self {
            lost,
            bits: bits.to_string(),
        })
    }

    fn keeps(&self, lost: &str, branch: &str) -> bool {
        branch == self.bits && self.lost.as_deref().is_none_or(|l| l == lost)
    }
}

fn numeric(e: crate::Error) -> HarnessError {
    HarnessError::Numeric(e)
}

fn code_layout(cfg: &ExperimentConfig, params: &CodeParams, input: &str) -> ChannelLayout {
    if !cfg.interfering_pairs.is_empty() {
        return ChannelLayout {
            interfering_pairs: cfg.interfering_pairs.iter().map(|[a, b]| (*a, *b)).collect(),
            epr_pair: Some((0, 1)),
        };
    }
    match cfg.noise_placement {
        Placement::None => ChannelLayout::default(),
        Placement::Interference => {
            let n = params.n();
            let mut pairs: Vec<(usize, usize)> = (0..params.m())
                .flat_map(|b| params.block(b).take(n - 1).map(|q| (q, q + 1)))
                .collect();
            if input != "V" && input != "1" && input != "ONE" {
                pairs.extend((1..params.m()).map(|b| (b * n - 1, b * n)));
            }
            ChannelLayout {
                interfering_pairs: pairs,
                epr_pair: Some((0, 1)),
            }
        }
    }
}

fn cluster_layout(cfg: &ExperimentConfig) -> ChannelLayout {
    if !cfg.interfering_pairs.is_empty() {
        return ChannelLayout {
            interfering_pairs: cfg.interfering_pairs.iter().map(|[a, b]| (*a, *b)).collect(),
            epr_pair: Some((0, 1)),
        };
    }
    match cfg.noise_placement {
        Placement::None => ChannelLayout::default(),
        Placement::Interference => ChannelLayout {
            interfering_pairs: phi5_graph().edges().collect(),
            epr_pair: Some((0, 1)),
        },
    }
}

/// Tomographic fidelity of `rho` against `psi`: `(F, sigma, settings)`.
fn tomography_row(rho: &DensityMatrix, psi: &StateVector, shots: u64, seed: Seed, family: u32) -> crate::Result<(f64, f64, usize)> {
    let d = decompose_projector(psi)?;
    let settings = group_settings(&d);
    if shots == 0 {
        return Ok((exact_estimate(rho, &d, &settings)?, 0.0, settings.len()));
    }
    let tables = simulate_all(rho, &settings, shots, seed, family)?;
    let (f, s) = estimate_fidelity(&tables, &d)?;
    Ok((f, s, settings.len()))
}

fn base_row(cfg: &ExperimentConfig) -> ResultRow {
    ResultRow {
        experiment: cfg.experiment(),
        input: String::new(),
        code: None,
        lost: String::new(),
        branch: String::new(),
        alpha: None,
        fidelity: 0.0,
        sigma: 0.0,
        settings: None,
        shots: cfg.shots,
        seed: cfg.seed,
    }
}

pub fn cmd_encode(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    let params = cfg.params()?;
    let seed = Seed(cfg.seed);
    cfg.logical_inputs()?
        .par_iter()
        .enumerate()
        .map(|(i, (name, x))| {
            let psi = encode(x, &params).map_err(numeric)?;
            let rho = noisy_state(&psi, &cfg.noise(), &code_layout(cfg, &params, name)).map_err(numeric)?;
            let (fidelity, sigma, n) = tomography_row(&rho, &psi, cfg.shots, seed, ENCODE_STREAM + i as u32).map_err(numeric)?;
            Ok(ResultRow {
                input: name.clone(),
                code: Some((params.n(), params.m())),
                fidelity,
                sigma,
                settings: Some(n),
                ..base_row(cfg)
            })
        })
        .collect()
}

pub fn cmd_cluster_fidelity(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    let rho = noisy_phi5(&cfg.noise(), &cluster_layout(cfg)).map_err(numeric)?;
    let (fidelity, sigma, n) = tomography_row(&rho, &phi5(), cfg.shots, Seed(cfg.seed), CLUSTER_STREAM).map_err(numeric)?;
    Ok(vec![ResultRow {
        input: "phi5".into(),
        fidelity,
        sigma,
        settings: Some(n),
        ..base_row(cfg)
    }])
}

/// Probability-weighted mean of `(p, F, sigma)` cells over `groups` equal
/// groups, with independent errors combined in quadrature.
fn weighted(cells: &[(f64, f64, f64)], groups: usize) -> (f64, f64) {
    let g = groups as f64;
    let f = cells.iter().map(|(p, f, _)| p * f / g).sum();
    let v: f64 = cells.iter().map(|(p, _, s)| (p * s / g).powi(2)).sum();
    (f, v.sqrt())
}

pub fn cmd_recover(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    let params = cfg.params()?;
    let inputs = cfg.logical_inputs()?;
    let positions: Vec<usize> = if cfg.lost.is_empty() { (0..params.total()).collect() } else { cfg.lost.clone() };
    let patterns: Vec<LossPattern> = positions.iter().map(|&q| LossPattern::single(q)).collect();
    let filter = cfg.force_branch.as_deref().map(BranchFilter::parse).transpose()?;
    let mut rows = Vec::new();
    for (i, (name, x)) in inputs.iter().enumerate() {
        let layout = code_layout(cfg, &params, name);
        // Each input gets its own block of streams.
        let seed = Seed(cfg.seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let swept = recovery_sweep(std::slice::from_ref(x), &params, &cfg.noise(), &layout, &patterns, cfg.shots, seed)
            .map_err(numeric)?;
        let mut cells = Vec::new();
        for r in &swept {
            cells.push((r.probability, r.fidelity, r.sigma));
            let lost = r.pattern.to_string();
            if filter.as_ref().is_some_and(|f| !f.keeps(&lost, &r.branch)) {
                continue;
            }
            rows.push(ResultRow {
                input: name.clone(),
                code: Some((params.n(), params.m())),
                lost,
                branch: r.branch.clone(),
                fidelity: r.fidelity,
                sigma: r.sigma,
                ..base_row(cfg)
            });
        }
        if filter.is_none() {
            let (fidelity, sigma) = weighted(&cells, patterns.len());
            rows.push(ResultRow {
                input: name.clone(),
                code: Some((params.n(), params.m())),
                lost: "all".into(),
                branch: "avg".into(),
                fidelity,
                sigma,
                ..base_row(cfg)
            });
        }
    }
    Ok(rows)
}

pub fn default_alphas() -> Vec<f64> {
    vec![0.0, -FRAC_PI_2, -FRAC_PI_3]
}

pub fn cmd_oneway(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    let cases: Vec<LossCase> = if cfg.loss_cases.is_empty() {
        LossCase::ALL.to_vec()
    } else {
        cfg.loss_cases
            .iter()
            .map(|c| c.parse().map_err(|_| HarnessError::config("loss_cases", format!("unsupported loss case {c:?}"))))
            .collect::<Result<_, _>>()?
    };
    let alphas = if cfg.alphas.is_empty() { default_alphas() } else { cfg.alphas.clone() };
    let filter = cfg.force_branch.as_deref().map(BranchFilter::parse).transpose()?;
    let rho = noisy_phi5(&cfg.noise(), &cluster_layout(cfg)).map_err(numeric)?;
    let cells: Vec<(LossCase, f64)> = cases.iter().flat_map(|&c| alphas.iter().map(move |&a| (c, a))).collect();
    let seed = Seed(cfg.seed);
    let per_cell: Vec<Vec<ResultRow>> = cells
        .par_iter()
        .enumerate()
        .map(|(k, &(case, alpha))| {
            let results = enumerate_pattern(&rho, &oneway_pattern(case, alpha), &rotation_target(alpha)).map_err(numeric)?;
            let mut rng = seed.substream(ONEWAY_STREAM, k as u32);
            let lost = case.to_string();
            let mut rows = Vec::new();
            let mut stats = Vec::new();
            for r in results {
                let (fidelity, sigma) = binomial_estimate(&mut rng, cfg.shots, r.fidelity);
                stats.push((r.probability, fidelity, sigma));
                let branch = r.branch_label();
                if filter.as_ref().is_some_and(|f| !f.keeps(&lost, &branch)) {
                    continue;
                }
                rows.push(ResultRow {
                    input: "phi5".into(),
                    lost: lost.clone(),
                    branch,
                    alpha: Some(alpha),
                    fidelity,
                    sigma,
                    ..base_row(cfg)
                });
            }
            if filter.is_none() {
                let (fidelity, sigma) = weighted(&stats, 1);
                rows.push(ResultRow {
                    input: "phi5".into(),
                    lost,
                    branch: "avg".into(),
                    alpha: Some(alpha),
                    fidelity,
                    sigma,
                    ..base_row(cfg)
                });
            }
            Ok(rows)
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    match cfg.experiment() {
        Experiment::Encode => cmd_encode(cfg),
        Experiment::Recover => cmd_recover(cfg),
        Experiment::ClusterFidelity => cmd_cluster_fidelity(cfg),
        Experiment::Oneway => cmd_oneway(cfg),
    }
}
