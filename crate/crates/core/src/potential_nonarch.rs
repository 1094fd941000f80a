//! Data at the finite places of Q: per-point log-sizes, size presets and the
//! exact per-place matrices.
//!
//! Every entry is a rational coefficient of `log p`; conversion to floating
//! point happens only when the global matrix is assembled.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal_data::PointId;
use crate::rational::{format_rational, is_prime, p_adic_valuation, parse_rational, ratio, to_f64, ExactRational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizePreset {
    GoodReduction,
    Leaf,
    LeafPCurvature,
}

/// Log-size coefficient `q` (size `p^q`) for a preset.
pub fn size_preset(kind: SizePreset, p: u64) -> Result<ExactRational> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let p = p as i64;
    Ok(match kind {
        SizePreset::GoodReduction => ExactRational::zero(),
        SizePreset::Leaf => ratio(-1, p - 1),
        SizePreset::LeafPCurvature => ratio(-1, p * (p - 1)),
    })
}

/// JSON form of a finite place.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonArchPlaceDoc {
    pub p: u64,
    #[serde(default)]
    pub log_size_coeffs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub off_diagonal: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub preset: BTreeMap<String, SizePreset>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonArchPlace {
    pub p: u64,
    /// `q_i <= 0`; points not listed have `q_i = 0`.
    pub log_size: BTreeMap<PointId, ExactRational>,
    pub off_diagonal: BTreeMap<(PointId, PointId), ExactRational>,
}

fn parse_id(key: &str, ids: &[PointId]) -> Result<PointId> {
    let id: PointId = key
        .trim()
        .parse()
        .map_err(|_| Error::field("nonarch_places", format!("bad point id {key:?}")))?;
    if !ids.contains(&id) {
        return Err(Error::UnknownPoint(id));
    }
    Ok(id)
}

impl NonArchPlace {
    pub fn good_reduction(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(NonArchPlace { p, log_size: BTreeMap::new(), off_diagonal: BTreeMap::new() })
    }

    pub fn from_doc(doc: NonArchPlaceDoc, ids: &[PointId]) -> Result<Self> {
        if !is_prime(doc.p) {
            return Err(Error::NotPrime(doc.p));
        }
        let mut log_size = BTreeMap::new();
        for (key, text) in &doc.log_size_coeffs {
            log_size.insert(parse_id(key, ids)?, parse_rational(text)?);
        }
        for (key, kind) in &doc.preset {
            let id = parse_id(key, ids)?;
            let q = size_preset(*kind, doc.p)?;
            if log_size.get(&id).is_some_and(|old| *old != q) {
                return Err(Error::field(
                    "nonarch_places",
                    format!("point {id} at p = {} has both a preset and a different coefficient", doc.p),
                ));
            }
            log_size.insert(id, q);
        }
        if let Some((id, q)) = log_size.iter().find(|(_, q)| q.is_positive()) {
            return Err(Error::field(
                "log_size_coeffs",
                format!("coefficient {} for point {id} is positive", format_rational(q)),
            ));
        }
        let mut off_diagonal = BTreeMap::new();
        for (key, text) in &doc.off_diagonal {
            let (i, j) = key
                .split_once(',')
                .ok_or_else(|| Error::field("off_diagonal", format!("key {key:?} is not \"i,j\"")))?;
            let (i, j) = (parse_id(i, ids)?, parse_id(j, ids)?);
            if i == j {
                return Err(Error::field("off_diagonal", format!("key {key:?} is on the diagonal")));
            }
            let v = parse_rational(text)?;
            if v.is_negative() {
                return Err(Error::field("off_diagonal", format!("entry {key:?} is negative")));
            }
            off_diagonal.insert((i, j), v);
        }
        Ok(NonArchPlace { p: doc.p, log_size, off_diagonal })
    }

    pub fn to_doc(&self) -> NonArchPlaceDoc {
        NonArchPlaceDoc {
            p: self.p,
            log_size_coeffs: self.log_size.iter().map(|(id, q)| (id.to_string(), format_rational(q))).collect(),
            off_diagonal: self
                .off_diagonal
                .iter()
                .map(|((i, j), q)| (format!("{i},{j}"), format_rational(q)))
                .collect(),
            preset: BTreeMap::new(),
        }
    }

    pub fn log_size_of(&self, id: PointId) -> ExactRational {
        self.log_size.get(&id).cloned().unwrap_or_else(ExactRational::zero)
    }
}

/// `G^v` at a finite place: entry `(i, j)` stands for `coeffs[i][j] * log p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonArchMatrix {
    pub p: u64,
    pub coeffs: Vec<Vec<ExactRational>>,
}

impl NonArchMatrix {
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        let lp = (self.p as f64).ln();
        self.coeffs
            .iter()
            .map(|row| row.iter().map(|q| to_f64(q) * lp).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(Zero::is_zero)
    }
}

/// Diagonal `q_i + v_p(a_i)` (since `-log|a|_p = v_p(a) log p`), off-diagonal
/// from the supplied values.
pub fn nonarch_matrix(place: &NonArchPlace, ids: &[PointId], scalings: &[ExactRational]) -> Result<NonArchMatrix> {
    let n = ids.len();
    let mut coeffs = vec![vec![ExactRational::zero(); n]; n];
    for (i, &id) in ids.iter().enumerate() {
        let a = scalings.get(i).cloned().unwrap_or_else(|| ratio(1, 1));
        if a.is_zero() {
            return Err(Error::ZeroScaling(id));
        }
        coeffs[i][i] = place.log_size_of(id) + ExactRational::from_integer(p_adic_valuation(&a, place.p).into());
        for (j, &jd) in ids.iter().enumerate() {
            if i != j {
                if let Some(v) = place.off_diagonal.get(&(id, jd)) {
                    coeffs[i][j] = v.clone();
                }
            }
        }
    }
    Ok(NonArchMatrix { p: place.p, coeffs })
}

/// Per-point sum of log-sizes over all listed places, as exact `log p` terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticityReport {
    /// For each point: list of `(p, q)` pairs with nonzero `q`.
    pub totals: BTreeMap<PointId, Vec<(u64, String)>>,
    /// Numerical value of each total.
    pub total_values: BTreeMap<PointId, f64>,
    pub verdict: bool,
}

pub fn a_analyticity_check(places: &[NonArchPlace], ids: &[PointId], infinite_tail: bool) -> AnalyticityReport {
    let mut totals = BTreeMap::new();
    let mut total_values = BTreeMap::new();
    for &id in ids {
        let terms: Vec<(u64, ExactRational)> = places
            .iter()
            .map(|pl| (pl.p, pl.log_size_of(id)))
            .filter(|(_, q)| !q.is_zero())
            .collect();
        let value = terms.iter().map(|(p, q)| to_f64(q) * (*p as f64).ln()).sum();
        totals.insert(id, terms.into_iter().map(|(p, q)| (p, format_rational(&q))).collect());
        total_values.insert(id, value);
    }
    AnalyticityReport { totals, total_values, verdict: !infinite_tail }
}
