use std::io::{Read, Write};

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::setting::{Setting, SettingBasis};
use crate::qsim::{c, DensityMatrix, ShotRng, C64};
use crate::{Error, Result};

/// Outcome histogram of one setting; index bit order follows the qubits
/// (qubit 0 is the MSB).
#[derive(Debug, Clone, PartialEq)]
pub struct CountsTable {
    pub setting: Setting,
    pub shots: u64,
    pub counts: Vec<u64>,
}

impl CountsTable {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&k| k as f64 / self.shots as f64).collect()
    }
}

/// Born probabilities of every outcome string of `setting`.
pub fn outcome_probabilities(rho: &DensityMatrix, setting: &Setting) -> Result<Vec<f64>> {
    if setting.n_qubits() != rho.n_qubits() {
        return Err(Error::LengthMismatch {
            expected: rho.n_qubits(),
            got: setting.n_qubits(),
        });
    }
    let mut r = rho.clone();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (q, b) in setting.bases.iter().enumerate() {
        if let SettingBasis::Equatorial(t) = *b {
            // Rows of V^dagger are the conjugated basis vectors.
            let e = C64::from_polar(h, -t);
            r.conjugate_1q(q, &[[c(h, 0.0), e], [c(h, 0.0), -e]]);
        }
    }
    Ok((0..r.dim()).map(|i| r.get(i, i).re.max(0.0)).collect())
}

/// Multinomial sample of `shots` outcomes.
pub fn sample_counts(probs: &[f64], shots: u64, rng: &mut ShotRng) -> Vec<u64> {
    let mut counts = vec![0; probs.len()];
    let mut left = shots;
    let mut mass: f64 = probs.iter().sum();
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = left;
            break;
        }
        let frac = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(left, frac).expect("clamped probability").sample(rng);
        counts[i] = k;
        left -= k;
        mass -= p;
    }
    counts
}

pub fn simulate_counts(rho: &DensityMatrix, setting: &Setting, shots: u64, rng: &mut ShotRng) -> Result<CountsTable> {
    if shots == 0 {
        return Err(Error::Parse("shots must be at least 1".into()));
    }
    let probs = outcome_probabilities(rho, setting)?;
    Ok(CountsTable {
        setting: setting.clone(),
        shots,
        counts: sample_counts(&probs, shots, rng),
    })
}

#[derive(Serialize, Deserialize)]
struct CountRow {
    setting: String,
    outcome: String,
    count: u64,
}

/// Writes `setting,outcome,count` rows, every outcome listed.
pub fn write_counts_csv<W: Write>(tables: &[CountsTable], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for t in tables {
        let n = t.setting.n_qubits();
        for (o, &count) in t.counts.iter().enumerate() {
            w.serialize(CountRow {
                setting: t.setting.label(),
                outcome: format!("{o:0n$b}"),
                count,
            })
            .map_err(|e| Error::Parse(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

/// Reads rows written by [`write_counts_csv`]; tables keep first-seen order
/// and missing outcomes count zero.
pub fn read_counts_csv<R: Read>(input: R) -> Result<Vec<CountsTable>> {
    let mut r = csv::Reader::from_reader(input);
    let mut tables: Vec<(String, CountsTable)> = Vec::new();
    for row in r.deserialize::<CountRow>() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        let idx = match tables.iter().position(|(l, _)| *l == row.setting) {
            Some(i) => i,
            None => {
                let setting: crate::tomography::Setting = row.setting.parse()?;
                let n = setting.n_qubits();
                tables.push((
                    row.setting.clone(),
                    CountsTable {
                        setting,
                        shots: 0,
                        counts: vec![0; 1 << n],
                    },
                ));
                tables.len() - 1
            }
        };
        let t = &mut tables[idx].1;
        if row.outcome.len() != t.setting.n_qubits() {
            return Err(Error::Parse(format!("outcome {:?} has wrong length", row.outcome)));
        }
        let o = usize::from_str_radix(&row.outcome, 2).map_err(|_| Error::Parse(format!("bad outcome {:?}", row.outcome)))?;
        t.counts[o] += row.count;
        t.shots += row.count;
    }
    Ok(tables.into_iter().map(|(_, t)| t).collect())
}
