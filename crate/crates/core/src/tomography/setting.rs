use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use super::decompose::{PauliDecomposition, COEFF_FLOOR};
use crate::qsim::{Basis, Pauli, PauliString};
use crate::{Error, Result};

/// Angles closer than this (mod pi) are the same setting.
pub(crate) const ANGLE_TOL: f64 = 1e-9;

/// Local measurement on one qubit: Z, or `M_t = cos t X + sin t Y` with
/// `t` in `[0, pi)`. Outcome 0 is the +1 eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SettingBasis {
    Z,
    Equatorial(f64),
}

pub(crate) fn wrap_pi(t: f64) -> f64 {
    let w = t.rem_euclid(PI);
    if PI - w < ANGLE_TOL {
        0.0
    } else {
        w
    }
}

fn same_angle(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(PI);
    d < ANGLE_TOL || PI - d < ANGLE_TOL
}

impl SettingBasis {
    pub const X: SettingBasis = SettingBasis::Equatorial(0.0);
    pub const Y: SettingBasis = SettingBasis::Equatorial(FRAC_PI_2);

    pub fn equatorial(t: f64) -> Self {
        SettingBasis::Equatorial(wrap_pi(t))
    }

    pub fn measurement_basis(&self) -> Basis {
        match *self {
            SettingBasis::Z => Basis::Z,
            SettingBasis::Equatorial(t) => Basis::Angle(t),
        }
    }

    /// True when a Pauli letter is read off directly (I matches anything).
    pub fn measures(&self, p: Pauli) -> bool {
        match (p, *self) {
            (Pauli::I, _) => true,
            (Pauli::Z, SettingBasis::Z) => true,
            (Pauli::X, SettingBasis::Equatorial(t)) => same_angle(t, 0.0),
            (Pauli::Y, SettingBasis::Equatorial(t)) => same_angle(t, FRAC_PI_2),
            _ => false,
        }
    }

    fn same(&self, other: &SettingBasis) -> bool {
        match (*self, *other) {
            (SettingBasis::Z, SettingBasis::Z) => true,
            (SettingBasis::Equatorial(a), SettingBasis::Equatorial(b)) => same_angle(a, b),
            _ => false,
        }
    }

    fn is_equatorial(&self) -> bool {
        matches!(self, SettingBasis::Equatorial(_))
    }
}

impl fmt::Display for SettingBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SettingBasis::Z => write!(f, "Z"),
            SettingBasis::Equatorial(t) if same_angle(t, 0.0) => write!(f, "X"),
            SettingBasis::Equatorial(t) if same_angle(t, FRAC_PI_2) => write!(f, "Y"),
            SettingBasis::Equatorial(t) => {
                let deg = (t.to_degrees() * 1e9).round() / 1e9;
                write!(f, "M{deg}")
            }
        }
    }
}

/// One local basis per qubit, plus the decomposition terms it reads off
/// letter by letter.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub bases: Vec<SettingBasis>,
    pub covered: Vec<usize>,
}

impl Setting {
    pub fn new(bases: Vec<SettingBasis>) -> Self {
        Self {
            bases,
            covered: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.bases.len()
    }

    /// Concatenated per-qubit tokens, e.g. `XXZZ` or `M45M45M45M45`.
    pub fn label(&self) -> String {
        self.bases.iter().map(|b| b.to_string()).collect()
    }

    pub fn covers(&self, p: &PauliString) -> bool {
        p.len() == self.bases.len() && p.letters().iter().zip(&self.bases).all(|(&l, b)| b.measures(l))
    }

    pub fn same_as(&self, other: &Setting) -> bool {
        self.bases.len() == other.bases.len() && self.bases.iter().zip(&other.bases).all(|(a, b)| a.same(b))
    }

    /// Bit mask of the equatorial qubits (qubit 0 is the MSB).
    pub fn equatorial_mask(&self) -> usize {
        let n = self.bases.len();
        self.bases
            .iter()
            .enumerate()
            .filter(|(_, b)| b.is_equatorial())
            .fold(0, |m, (q, _)| m | 1 << (n - 1 - q))
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad setting label {s:?}"));
        let mut bases = Vec::new();
        let mut chars = s.trim().chars().peekable();
        while let Some(ch) = chars.next() {
            bases.push(match ch {
                'X' => SettingBasis::X,
                'Y' => SettingBasis::Y,
                'Z' => SettingBasis::Z,
                'M' => {
                    let mut num = String::new();
                    while let Some(&d) = chars.peek() {
                        if d.is_ascii_digit() || d == '.' || d == '-' || d == 'e' {
                            num.push(d);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    let deg: f64 = num.parse().map_err(|_| bad())?;
                    SettingBasis::equatorial(deg.to_radians())
                }
                _ => return Err(bad()),
            });
        }
        if bases.is_empty() {
            return Err(bad());
        }
        Ok(Setting::new(bases))
    }
}

fn mask_positions(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|q| mask >> (n - 1 - q) & 1 == 1).collect()
}

/// One setting per distinct X/Y pattern on the flip positions, Z elsewhere.
fn pauli_family(d: &PauliDecomposition, idx: &[usize]) -> Vec<Setting> {
    let mut order: Vec<usize> = idx.to_vec();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&d.terms[a].1, &d.terms[b].1);
        pb.weight().cmp(&pa.weight()).then_with(|| pa.letters().cmp(pb.letters()))
    });
    let mut partial: Vec<Vec<Pauli>> = Vec::new();
    for i in order {
        let letters = d.terms[i].1.letters();
        let slot = partial.iter_mut().find(|s| {
            s.iter()
                .zip(letters)
                .all(|(&a, &b)| a == Pauli::I || b == Pauli::I || a == b)
        });
        match slot {
            Some(s) => {
                for (a, &b) in s.iter_mut().zip(letters) {
                    if *a == Pauli::I {
                        *a = b;
                    }
                }
            }
            None => partial.push(letters.to_vec()),
        }
    }
    partial
        .into_iter()
        .map(|s| {
            Setting::new(
                s.into_iter()
                    .map(|p| match p {
                        Pauli::X => SettingBasis::X,
                        Pauli::Y => SettingBasis::Y,
                        _ => SettingBasis::Z,
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Equal-angle families resolving each coherence `|a><a^f|` of the target:
/// for a coherence with value `q`, `t_j = e_j (j pi + g) / k` with
/// `g = -arg q`, `k` the number of flipped qubits, `e_j = +1` where the
/// ket bit is 0 and `-1` where it is 1.
fn fourier_family(d: &PauliDecomposition, mask: usize) -> Vec<Setting> {
    let n = d.n_qubits;
    let pos = mask_positions(mask, n);
    let k = pos.len() as f64;
    let mut out: Vec<Setting> = Vec::new();
    for row in 0..d.dim() {
        let q = d.coherence(mask, row);
        if q.norm() < COEFF_FLOOR {
            continue;
        }
        let gamma = (-q.arg()).rem_euclid(PI);
        for j in 0..pos.len() {
            let phase = (j as f64 * PI + gamma) / k;
            let mut bases = vec![SettingBasis::Z; n];
            for &p in &pos {
                let eps = if row >> (n - 1 - p) & 1 == 0 { 1.0 } else { -1.0 };
                bases[p] = SettingBasis::equatorial(eps * phase);
            }
            let s = Setting::new(bases);
            if !out.iter().any(|o| o.same_as(&s)) {
                out.push(s);
            }
        }
    }
    out
}

/// Groups the non-identity terms into local settings.
///
/// Terms are partitioned by their X/Y support. Diagonal terms share one
/// all-Z setting. Every other group takes the smaller of two families: one
/// setting per distinct X/Y letter pattern, or the equal-angle families of
/// [`fourier_family`] (ties keep the letter patterns). Settings are returned
/// in lexicographic label order with duplicates removed.
pub fn group_settings(d: &PauliDecomposition) -> Vec<Setting> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, (_, p)) in d.nontrivial() {
        groups.entry(p.masks().0).or_default().push(i);
    }
    let mut settings: Vec<Setting> = Vec::new();
    for (&mask, idx) in &groups {
        let family = if mask == 0 {
            vec![Setting::new(vec![SettingBasis::Z; d.n_qubits])]
        } else {
            let pauli = pauli_family(d, idx);
            let fourier = fourier_family(d, mask);
            if fourier.len() < pauli.len() {
                fourier
            } else {
                pauli
            }
        };
        for s in family {
            if !settings.iter().any(|o| o.same_as(&s)) {
                settings.push(s);
            }
        }
    }
    for s in &mut settings {
        s.covered = d.nontrivial().filter(|(_, (_, p))| s.covers(p)).map(|(i, _)| i).collect();
    }
    settings.sort_by_key(|s| s.label());
    settings
}
