use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::exactalg::GaussianRational;

/// The rescaling `z ↦ qz = (q₁z₁, …, q_m z_m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QShift {
    q: Vec<GaussianRational>,
    diagonal: bool,
}

impl QShift {
    /// Validates that no entry is zero and that `diagonal` matches the entries.
    pub fn new(q: Vec<GaussianRational>, diagonal: bool) -> Result<QShift> {
        if q.is_empty() {
            return usage("q-shift with no entries");
        }
        if let Some(i) = q.iter().position(|x| x.is_zero()) {
            return usage(format!("q-shift entry {i} is zero"));
        }
        let all_equal = q.iter().all(|x| x == &q[0]);
        if diagonal && !all_equal {
            return usage("q-shift marked diagonal but entries differ");
        }
        let s = QShift {
            q,
            diagonal: all_equal,
        };
        if s.is_root_of_unity() {
            log::warn!("q-shift has a root-of-unity entry; q-invariant fields degenerate");
        }
        Ok(s)
    }

    /// Diagonal shift `(q, …, q)` in `m` variables.
    pub fn scalar(m: usize, q: GaussianRational) -> Result<QShift> {
        QShift::new(vec![q; m], true)
    }

    pub fn from_ints(q: &[i64]) -> Result<QShift> {
        let v: Vec<GaussianRational> = q.iter().map(|&x| GaussianRational::from_int(x)).collect();
        let d = v.iter().all(|x| x == &v[0]);
        QShift::new(v, d)
    }

    pub fn nvars(&self) -> usize {
        self.q.len()
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.q
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// The common value `q̃` of a diagonal shift.
    pub fn diagonal_value(&self) -> Option<&GaussianRational> {
        self.diagonal.then(|| &self.q[0])
    }

    /// Entries of `q^k` (k may be negative).
    pub fn power(&self, k: i64) -> Vec<GaussianRational> {
        self.q
            .iter()
            .map(|x| x.pow(k).expect("nonzero entry"))
            .collect()
    }

    pub fn c64(&self) -> Vec<Complex64> {
        self.q.iter().map(|x| x.to_c64()).collect()
    }

    /// Apply `q^k` to a point.
    pub fn apply_c64(&self, z: &[Complex64], k: i32) -> Vec<Complex64> {
        self.q
            .iter()
            .zip(z)
            .map(|(q, zi)| zi * q.to_c64().powi(k))
            .collect()
    }

    /// True when some entry has modulus 1 and order at most 24.
    pub fn is_root_of_unity(&self) -> bool {
        self.q
            .iter()
            .any(|x| (1..=24).any(|k| x.pow(k).map(|p| p.is_one()).unwrap_or(false)))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QShiftJson {
    q: Vec<GaussianRational>,
    #[serde(default)]
    diagonal: bool,
}

impl Serialize for QShift {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QShiftJson {
            q: self.q.clone(),
            diagonal: self.diagonal,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QShift {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = QShiftJson::deserialize(d)?;
        QShift::new(raw.q, raw.diagonal).map_err(serde::de::Error::custom)
    }
}
