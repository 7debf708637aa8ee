use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::counts::CountsTable;
use super::decompose::PauliDecomposition;
use super::setting::{Setting, SettingBasis};
use crate::qsim::C64;
use crate::{Error, Result};

/// Largest acceptable residual of a joint coherence solve.
const SOLVE_TOL: f64 = 1e-8;

/// Linear fidelity estimator `F = c_I + sum_s sum_o g_s(o) f_s(o)` over the
/// outcome frequencies `f_s` of each setting.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityEstimator {
    pub identity: f64,
    /// Setting label and per-outcome weights.
    pub weights: Vec<(Setting, Vec<f64>)>,
}

fn parity(x: usize) -> f64 {
    if x.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn support_mask(p: &crate::qsim::PauliString) -> usize {
    let (x, z) = p.masks();
    x | z
}

impl FidelityEstimator {
    /// Builds weights for `d` from the available settings (first occurrence
    /// of each label wins).
    ///
    /// A group of terms sharing an X/Y support is estimated term by term when
    /// each of its terms is read off letter-wise by some setting (the
    /// lexicographically first one is used). Otherwise the group is solved
    /// jointly from the settings that are equatorial exactly on that support.
    pub fn new(d: &PauliDecomposition, settings: &[Setting]) -> Result<Self> {
        let n = d.n_qubits;
        let mut uniq: Vec<Setting> = Vec::new();
        for s in settings {
            if s.n_qubits() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: s.n_qubits(),
                });
            }
            if !uniq.iter().any(|u| u.label() == s.label()) {
                uniq.push(Setting::new(s.bases.clone()));
            }
        }
        uniq.sort_by_key(|s| s.label());
        let mut g = vec![vec![0.0; d.dim()]; uniq.len()];

        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, (_, p)) in d.nontrivial() {
            groups.entry(p.masks().0).or_default().push(i);
        }
        for (&mask, idx) in &groups {
            let first: Vec<Option<usize>> = idx
                .iter()
                .map(|&i| uniq.iter().position(|s| s.covers(&d.terms[i].1)))
                .collect();
            if first.iter().all(Option::is_some) {
                for (&i, s) in idx.iter().zip(first) {
                    let (coef, p) = &d.terms[i];
                    let sup = support_mask(p);
                    for (o, w) in g[s.expect("checked")].iter_mut().enumerate() {
                        *w += coef * parity(o & sup);
                    }
                }
            } else {
                solve_group(d, mask, &uniq, &mut g).map_err(|_| {
                    let missing = idx
                        .iter()
                        .zip(&first)
                        .find(|(_, f)| f.is_none())
                        .map(|(&i, _)| d.terms[i].1.to_string())
                        .unwrap_or_default();
                    Error::UncoveredTerm(missing)
                })?;
            }
        }
        Ok(Self {
            identity: d.identity_coefficient(),
            weights: uniq.into_iter().zip(g).collect(),
        })
    }

    /// Applies the weights to outcome frequencies keyed by setting label.
    pub fn evaluate(&self, freqs: &BTreeMap<String, Vec<f64>>) -> Result<f64> {
        let mut f = self.identity;
        for (s, w) in &self.weights {
            if w.iter().all(|x| *x == 0.0) {
                continue;
            }
            let p = freqs.get(&s.label()).ok_or_else(|| Error::UncoveredTerm(s.label()))?;
            f += w.iter().zip(p).map(|(a, b)| a * b).sum::<f64>();
        }
        Ok(f)
    }
}

/// Joint estimator for all coherences with flip mask `mask`, conditioned on
/// the Z values of the other qubits.
fn solve_group(d: &PauliDecomposition, mask: usize, settings: &[Setting], g: &mut [Vec<f64>]) -> Result<()> {
    let n = d.n_qubits;
    let cols: Vec<usize> = (0..settings.len())
        .filter(|&s| settings[s].equatorial_mask() == mask)
        .collect();
    if cols.is_empty() {
        return Err(Error::UncoveredTerm(format!("mask {mask:b}")));
    }
    let pos: Vec<usize> = (0..n).filter(|q| mask >> (n - 1 - q) & 1 == 1).collect();
    let k = pos.len();
    let rest = !mask & (d.dim() - 1);
    // Ket bit patterns on the flipped qubits, expanded to full indices.
    let spread = |a: usize| -> usize {
        pos.iter()
            .enumerate()
            .filter(|(i, _)| a >> (k - 1 - i) & 1 == 1)
            .fold(0, |acc, (_, &q)| acc | 1 << (n - 1 - q))
    };
    let kets: Vec<usize> = (0..1usize << k).map(spread).collect();
    // <c,a| (|c><c| x M_t) |c,a^f> coefficient for each setting and ket.
    let phase = |s: &Setting, a: usize| -> C64 {
        let sum: f64 = pos
            .iter()
            .map(|&q| {
                let t = match s.bases[q] {
                    SettingBasis::Equatorial(t) => t,
                    SettingBasis::Z => 0.0,
                };
                if a >> (n - 1 - q) & 1 == 0 {
                    -t
                } else {
                    t
                }
            })
            .sum();
        C64::from_polar(1.0, sum)
    };
    let mut conds: Vec<usize> = (0..d.dim()).map(|x| x & rest).collect();
    conds.sort_unstable();
    conds.dedup();
    for c in conds {
        let target: Vec<C64> = kets.iter().map(|&a| d.coherence(mask, c | a)).collect();
        if target.iter().all(|t| t.norm() < 1e-14) {
            continue;
        }
        let rows = 2 * kets.len();
        let a = DMatrix::from_fn(rows, cols.len(), |r, j| {
            let z = phase(&settings[cols[j]], kets[r / 2]);
            if r % 2 == 0 {
                z.re
            } else {
                z.im
            }
        });
        let b = DVector::from_fn(rows, |r, _| {
            let t = target[r / 2];
            if r % 2 == 0 {
                t.re
            } else {
                t.im
            }
        });
        let w = a
            .clone()
            .svd(true, true)
            .solve(&b, 1e-12)
            .map_err(|e| Error::UncoveredTerm(e.to_string()))?;
        if (&a * &w - &b).norm() > SOLVE_TOL {
            return Err(Error::UncoveredTerm(format!("mask {mask:b}")));
        }
        for (j, &s) in cols.iter().enumerate() {
            for (o, weight) in g[s].iter_mut().enumerate() {
                if o & rest == c {
                    *weight += w[j] * parity(o & mask);
                }
            }
        }
    }
    Ok(())
}

/// Fidelity and Poisson-propagated standard error from measured tables.
pub fn estimate_fidelity(tables: &[CountsTable], d: &PauliDecomposition) -> Result<(f64, f64)> {
    let settings: Vec<Setting> = tables.iter().map(|t| t.setting.clone()).collect();
    let est = FidelityEstimator::new(d, &settings)?;
    let mut f = est.identity;
    let mut var = 0.0;
    for (s, w) in &est.weights {
        if w.iter().all(|x| *x == 0.0) {
            continue;
        }
        let label = s.label();
        let t = tables
            .iter()
            .find(|t| t.setting.label() == label)
            .expect("estimator settings come from the tables");
        if t.shots == 0 {
            return Err(Error::UncoveredTerm(label));
        }
        let n = t.shots as f64;
        for (gw, &k) in w.iter().zip(&t.counts) {
            f += gw * k as f64 / n;
            var += gw * gw * k as f64 / (n * n);
        }
    }
    Ok((f, var.sqrt()))
}
