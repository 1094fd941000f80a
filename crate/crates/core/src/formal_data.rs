//! Marked points of the projective line, local jets, tangent scalings, and
//! the JSON problem document.
//!
//! The local parameter at a finite point `p` is `t = z - p`; at infinity it
//! is `t = 1/z`. All series coefficients are exact rationals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::global_matrix::ExtraMatrix;
use crate::poly::{series_quotient, Polynomial};
use crate::potential_arch::ArchDomainAssignment;
use crate::potential_nonarch::{NonArchPlace, NonArchPlaceDoc};
use crate::rational::{format_rational, parse_rational, serde_rational, serde_rational_vec, ExactRational};

pub type PointId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Coordinate {
    Finite(ExactRational),
    Infinity,
}

impl Coordinate {
    pub fn finite(&self) -> Option<&ExactRational> {
        match self {
            Coordinate::Finite(x) => Some(x),
            Coordinate::Infinity => None,
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coordinate::Finite(x) => write!(f, "{}", format_rational(x)),
            Coordinate::Infinity => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Coordinate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Coordinate::Infinity),
            other => parse_rational(other).map(Coordinate::Finite),
        }
    }
}

impl Serialize for Coordinate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coordinate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub id: PointId,
    pub coordinate: Coordinate,
}

impl MarkedPoint {
    pub fn new(id: PointId, coordinate: Coordinate) -> Self {
        MarkedPoint { id, coordinate }
    }

    pub fn finite(id: PointId, x: ExactRational) -> Self {
        MarkedPoint::new(id, Coordinate::Finite(x))
    }

    pub fn infinity(id: PointId) -> Self {
        MarkedPoint::new(id, Coordinate::Infinity)
    }
}

/// `xi'_i = a_i xi_i` relative to the canonical `d/dt_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangentScaling {
    pub point: PointId,
    #[serde(with = "serde_rational")]
    pub scalar: ExactRational,
}

/// Truncated jet `c_0 + c_1 t + ... + c_M t^M` at a marked point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSeries {
    pub point: PointId,
    #[serde(with = "serde_rational_vec")]
    coefficients: Vec<ExactRational>,
}

impl LocalSeries {
    pub fn new(point: PointId, coefficients: Vec<ExactRational>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::SeriesMismatch(format!("series at point {point} has no coefficients")));
        }
        Ok(LocalSeries { point, coefficients })
    }

    pub fn coefficients(&self) -> &[ExactRational] {
        &self.coefficients
    }

    /// Truncation order `M`; the jet has `M + 1` coefficients.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coeff(&self, k: usize) -> ExactRational {
        self.coefficients.get(k).cloned().unwrap_or_else(ExactRational::zero)
    }
}

/// Jet of `num/den` at `point` in its canonical local parameter.
pub fn expand_rational_at_point(
    num: &Polynomial,
    den: &Polynomial,
    point: &MarkedPoint,
    order: usize,
) -> Result<LocalSeries> {
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if num.is_zero() {
        return LocalSeries::new(point.id, vec![ExactRational::zero(); order + 1]);
    }
    let g = num.gcd(den);
    let (num, _) = num.div_rem(&g);
    let (den, _) = den.div_rem(&g);
    let (n, d) = match &point.coordinate {
        Coordinate::Finite(p) => (num.shift(p), den.shift(p)),
        Coordinate::Infinity => {
            let top = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
            (num.reversed(top), den.reversed(top))
        }
    };
    let coeffs = series_quotient(n.coeffs(), d.coeffs(), order)
        .ok_or_else(|| Error::PoleAtPoint(point.coordinate.to_string()))?;
    LocalSeries::new(point.id, coeffs)
}

/// Wire form of the problem document. Field names are normative.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub points: Vec<MarkedPoint>,
    pub series: Vec<LocalSeries>,
    #[serde(default)]
    pub arch_places: Vec<ArchDomainAssignment>,
    #[serde(default)]
    pub nonarch_places: Vec<NonArchPlaceDoc>,
    #[serde(default)]
    pub scalings: Vec<TangentScaling>,
    pub degree_bound: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_matrices: Vec<ExtraMatrix>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub infinite_tail: bool,
}

/// A validated problem. Points are sorted by id; `series` and `scalings`
/// are aligned with `points`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub points: Vec<MarkedPoint>,
    pub series: Vec<LocalSeries>,
    pub arch_places: Vec<ArchDomainAssignment>,
    pub nonarch_places: Vec<NonArchPlace>,
    pub scalings: Vec<TangentScaling>,
    pub degree_bound: usize,
    pub extra_matrices: Vec<ExtraMatrix>,
    pub infinite_tail: bool,
}

pub fn parse_problem(text: &[u8]) -> Result<ProblemSpec> {
    let doc: ProblemDocument = serde_json::from_slice(text)?;
    ProblemSpec::from_document(doc)
}

impl ProblemSpec {
    pub fn from_document(doc: ProblemDocument) -> Result<Self> {
        let mut points = doc.points;
        if points.is_empty() {
            return Err(Error::field("points", "at least one marked point is required"));
        }
        points.sort_by_key(|p| p.id);
        let mut coords = BTreeSet::new();
        for w in points.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::DuplicatePoint(format!("id {} appears twice", w[0].id)));
            }
        }
        for p in &points {
            if !coords.insert(p.coordinate.to_string()) {
                return Err(Error::DuplicatePoint(format!("coordinate {} appears twice", p.coordinate)));
            }
        }
        let ids: Vec<PointId> = points.iter().map(|p| p.id).collect();

        let mut by_point: BTreeMap<PointId, LocalSeries> = BTreeMap::new();
        for s in doc.series {
            if !ids.contains(&s.point) {
                return Err(Error::SeriesMismatch(format!("series for undeclared point {}", s.point)));
            }
            if s.coefficients.is_empty() {
                return Err(Error::SeriesMismatch(format!("series at point {} has no coefficients", s.point)));
            }
            let id = s.point;
            if by_point.insert(id, s).is_some() {
                return Err(Error::SeriesMismatch(format!("two series for point {id}")));
            }
        }
        let series = ids
            .iter()
            .map(|id| {
                by_point
                    .remove(id)
                    .ok_or_else(|| Error::SeriesMismatch(format!("no series for point {id}")))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut scale_map: BTreeMap<PointId, ExactRational> = BTreeMap::new();
        for s in doc.scalings {
            if !ids.contains(&s.point) {
                return Err(Error::UnknownPoint(s.point));
            }
            if s.scalar.is_zero() {
                return Err(Error::ZeroScaling(s.point));
            }
            if scale_map.insert(s.point, s.scalar).is_some() {
                return Err(Error::field("scalings", format!("two scalings for point {}", s.point)));
            }
        }
        let scalings = ids
            .iter()
            .map(|&id| TangentScaling {
                point: id,
                scalar: scale_map.remove(&id).unwrap_or_else(ExactRational::one),
            })
            .collect();

        if doc.arch_places.len() > 1 {
            return Err(Error::field(
                "arch_places",
                "the rationals have a single archimedean place; give at most one assignment",
            ));
        }
        let arch_places = doc
            .arch_places
            .into_iter()
            .map(|a| a.validated(&points))
            .collect::<Result<Vec<_>>>()?;

        let mut primes = BTreeSet::new();
        let mut nonarch_places = Vec::new();
        for d in doc.nonarch_places {
            let place = NonArchPlace::from_doc(d, &ids)?;
            if !primes.insert(place.p) {
                return Err(Error::field("nonarch_places", format!("prime {} listed twice", place.p)));
            }
            nonarch_places.push(place);
        }

        for m in &doc.extra_matrices {
            m.check_shape(ids.len())?;
        }
        if doc.degree_bound == 0 {
            return Err(Error::field("degree_bound", "must be a positive integer"));
        }

        Ok(ProblemSpec {
            points,
            series,
            arch_places,
            nonarch_places,
            scalings,
            degree_bound: doc.degree_bound,
            extra_matrices: doc.extra_matrices,
            infinite_tail: doc.infinite_tail,
        })
    }

    pub fn to_document(&self) -> ProblemDocument {
        ProblemDocument {
            points: self.points.clone(),
            series: self.series.clone(),
            arch_places: self.arch_places.clone(),
            nonarch_places: self.nonarch_places.iter().map(NonArchPlace::to_doc).collect(),
            scalings: self.scalings.clone(),
            degree_bound: self.degree_bound,
            extra_matrices: self.extra_matrices.clone(),
            infinite_tail: self.infinite_tail,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("problem documents always serialize")
    }

    pub fn ids(&self) -> Vec<PointId> {
        self.points.iter().map(|p| p.id).collect()
    }

    pub fn index_of(&self, id: PointId) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    pub fn scalars(&self) -> Vec<ExactRational> {
        self.scalings.iter().map(|s| s.scalar.clone()).collect()
    }
}
