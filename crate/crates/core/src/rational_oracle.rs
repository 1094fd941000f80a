//! Rationality certificates for jets: Hankel determinants, single-point
//! Padé approximants and simultaneous reconstruction from jets at several
//! points. Every returned function has been re-expanded and compared with
//! the input jets.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal_data::{expand_rational_at_point, Coordinate, LocalSeries, MarkedPoint, PointId};
use crate::linalg;
use crate::poly::Polynomial;
use crate::rational::{format_rational, ExactRational};

/// `num / den` in lowest terms with a monic denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RationalFunction::zero());
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lc = den.leading().expect("nonzero").recip();
        Ok(RationalFunction { num: num.scale(&lc), den: den.scale(&lc) })
    }

    pub fn zero() -> Self {
        RationalFunction { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    /// `max(deg num, deg den)`.
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    pub fn expand_at(&self, point: &MarkedPoint, order: usize) -> Result<LocalSeries> {
        expand_rational_at_point(&self.num, &self.den, point, order)
    }

    /// Does the expansion at `point` reproduce every coefficient of `jet`?
    pub fn matches(&self, point: &MarkedPoint, jet: &LocalSeries) -> bool {
        self.expand_at(point, jet.order())
            .is_ok_and(|s| s.coefficients() == jet.coefficients())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// `D_n = det(c_{i+j})_{0 <= i,j <= n}` for `n = 0..=max_order`.
pub fn hankel_profile(series: &LocalSeries, max_order: usize) -> Result<Vec<ExactRational>> {
    if series.order() < 2 * max_order {
        return Err(Error::InsufficientOrder(format!(
            "Hankel determinant of order {max_order} needs {} coefficients, got {}",
            2 * max_order + 1,
            series.order() + 1
        )));
    }
    let c = series.coefficients();
    Ok((0..=max_order)
        .map(|n| {
            let h: linalg::Matrix = (0..=n).map(|i| (0..=n).map(|j| c[i + j].clone()).collect()).collect();
            linalg::determinant(&h)
        })
        .collect())
}

/// Padé approximant of type `(d_num, d_den)` with `q(0) = 1`, kept only if it
/// reproduces every supplied coefficient of `series`.
pub fn pade(series: &LocalSeries, d_num: usize, d_den: usize) -> Result<Option<RationalFunction>> {
    if series.order() < d_num + d_den {
        return Err(Error::InsufficientOrder(format!(
            "Padé ({d_num}, {d_den}) needs {} coefficients, got {}",
            d_num + d_den + 1,
            series.order() + 1
        )));
    }
    let c = |k: usize| series.coeff(k);
    // Unknowns q_0..q_{d_den}; rows force the coefficients d_num+1..=d_num+d_den
    // of q·f to vanish, plus the normalization q_0 = 1.
    let mut rows: linalg::Matrix = Vec::new();
    let mut rhs = Vec::new();
    for k in d_num + 1..=d_num + d_den {
        rows.push((0..=d_den).map(|j| if j <= k { c(k - j) } else { ExactRational::zero() }).collect());
        rhs.push(ExactRational::zero());
    }
    let mut norm = vec![ExactRational::zero(); d_den + 1];
    norm[0] = ExactRational::one();
    rows.push(norm);
    rhs.push(ExactRational::one());
    let Some(q) = linalg::solve(&rows, &rhs) else {
        return Ok(None);
    };
    let p: Vec<ExactRational> = (0..=d_num)
        .map(|k| (0..=d_den.min(k)).map(|j| &q[j] * c(k - j)).sum())
        .collect();
    let candidate = RationalFunction::new(Polynomial::new(p), Polynomial::new(q))?;
    let origin = MarkedPoint::finite(series.point, ExactRational::zero());
    Ok(candidate.matches(&origin, series).then_some(candidate))
}

fn binomial(n: usize, k: usize) -> ExactRational {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    ExactRational::from_integer(acc)
}

/// Number of linear conditions the jets impose.
pub fn total_conditions(jets: &[(MarkedPoint, LocalSeries)]) -> usize {
    jets.iter().map(|(_, s)| s.order() + 1).sum()
}

/// Rows of `q f - p ≡ 0` at one point; unknowns are `p_0..p_d, q_0..q_d`.
fn jet_rows(point: &MarkedPoint, jet: &LocalSeries, d: usize) -> linalg::Matrix {
    let width = 2 * d + 2;
    let c = |k: usize| jet.coeff(k);
    (0..=jet.order())
        .map(|m| {
            let mut row = vec![ExactRational::zero(); width];
            match &point.coordinate {
                Coordinate::Finite(x) => {
                    for n in 0..=d {
                        // [p(x + t)]_m = sum_n C(n, m) x^(n-m) p_n
                        if n >= m {
                            row[n] = -binomial(n, m) * num_traits::pow(x.clone(), n - m);
                        }
                        let mut acc = ExactRational::zero();
                        for l in 0..=m.min(n) {
                            acc += binomial(n, l) * num_traits::pow(x.clone(), n - l) * c(m - l);
                        }
                        row[d + 1 + n] = acc;
                    }
                }
                Coordinate::Infinity => {
                    // In t = 1/z: p~(t) = sum_n p_n t^(d-n), likewise q~.
                    if m <= d {
                        row[d - m] = -ExactRational::one();
                    }
                    for n in 0..=d {
                        let l = d - n;
                        if l <= m {
                            row[d + 1 + n] = c(m - l);
                        }
                    }
                }
            }
            row
        })
        .collect()
}

/// Finds `p/q` with `deg p, deg q <= d` matching every jet, or `None`.
pub fn multipoint_reconstruct(jets: &[(MarkedPoint, LocalSeries)], d: usize) -> Result<Option<RationalFunction>> {
    let mut seen = HashSet::new();
    for (p, _) in jets {
        if !seen.insert(p.coordinate.clone()) {
            return Err(Error::DuplicatePoint(format!("two jets at {}", p.coordinate)));
        }
    }
    let total = total_conditions(jets);
    if total < 2 * d + 2 {
        return Err(Error::InsufficientOrder(format!(
            "degree {d} needs {} jet conditions, got {total}",
            2 * d + 2
        )));
    }
    let rows: linalg::Matrix = jets.iter().flat_map(|(p, s)| jet_rows(p, s, d)).collect();
    for v in linalg::nullspace(&rows, 2 * d + 2) {
        let q = Polynomial::new(v[d + 1..].to_vec());
        if q.is_zero() {
            continue;
        }
        let candidate = RationalFunction::new(Polynomial::new(v[..=d].to_vec()), q)?;
        if jets.iter().all(|(p, s)| candidate.matches(p, s)) {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// Largest degree the jets can pin down: `(total - 2) / 2`.
pub fn degree_cap(jets: &[(MarkedPoint, LocalSeries)]) -> Option<usize> {
    total_conditions(jets).checked_sub(2).map(|t| t / 2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    pub function: Option<RationalFunction>,
    pub degree: Option<usize>,
    pub degrees_tried: Vec<usize>,
    pub verified_orders: BTreeMap<PointId, usize>,
}

/// Tries `d = 0, 1, ...` up to `max_degree` (clipped to what the jets allow)
/// and returns the first verified reconstruction.
pub fn search(jets: &[(MarkedPoint, LocalSeries)], max_degree: Option<usize>) -> Result<OracleOutcome> {
    let cap = degree_cap(jets).ok_or_else(|| Error::InsufficientOrder("need at least two jet conditions".into()))?;
    let cap = max_degree.map_or(cap, |m| m.min(cap));
    let verified_orders = jets.iter().map(|(p, s)| (p.id, s.order())).collect();
    let mut tried = Vec::new();
    for d in 0..=cap {
        tried.push(d);
        if let Some(f) = multipoint_reconstruct(jets, d)? {
            return Ok(OracleOutcome { function: Some(f), degree: Some(d), degrees_tried: tried, verified_orders });
        }
    }
    Ok(OracleOutcome { function: None, degree: None, degrees_tried: tried, verified_orders: BTreeMap::new() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub status: String,
    pub numerator: Vec<String>,
    pub denominator: Vec<String>,
    pub degree: Option<usize>,
    pub degrees_tried: Vec<usize>,
    pub verified_orders: BTreeMap<PointId, usize>,
}

impl OracleOutcome {
    pub fn report(&self) -> OracleReport {
        let coeffs = |p: &Polynomial| p.coeffs().iter().map(format_rational).collect();
        match &self.function {
            Some(f) => OracleReport {
                status: "rational".into(),
                numerator: coeffs(f.numerator()),
                denominator: coeffs(f.denominator()),
                degree: self.degree,
                degrees_tried: self.degrees_tried.clone(),
                verified_orders: self.verified_orders.clone(),
            },
            None => OracleReport {
                status: "not_found".into(),
                numerator: Vec::new(),
                denominator: Vec::new(),
                degree: None,
                degrees_tried: self.degrees_tried.clone(),
                verified_orders: BTreeMap::new(),
            },
        }
    }
}
