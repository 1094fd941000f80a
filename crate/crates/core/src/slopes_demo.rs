//! Evaluation filtration on the projective line.
//!
//! Sections of `O(N)` are polynomials of degree at most `N`. Step `k` of the
//! filtration keeps those vanishing to order `omega_i(k)` at every marked
//! point; vanishing at infinity caps the degree.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal_data::{Coordinate, MarkedPoint};
use crate::linalg;
use crate::rational::ExactRational;
use crate::scheduler::Schedule;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiltrationProfile {
    #[serde(rename = "N")]
    n: usize,
    ranks: Vec<usize>,
}

impl FiltrationProfile {
    /// Requires `r_0 = N + 1`, unit-or-zero drops, and a single trailing 0.
    pub fn new(n: usize, ranks: Vec<usize>) -> Result<Self> {
        let bad = |m: String| Err(Error::Precondition(format!("invalid filtration profile: {m}")));
        if ranks.first() != Some(&(n + 1)) {
            return bad(format!("r_0 must be N + 1 = {}", n + 1));
        }
        if ranks.last() != Some(&0) {
            return bad("profile must end at rank 0".into());
        }
        for (k, w) in ranks.windows(2).enumerate() {
            if w[0] == 0 {
                return bad(format!("rank reaches 0 before the end at step {k}"));
            }
            if w[1] > w[0] || w[0] - w[1] > 1 {
                return bad(format!("step {k} -> {}: {} -> {}", k + 1, w[0], w[1]));
            }
        }
        Ok(FiltrationProfile { n, ranks })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank_sum(&self) -> usize {
        self.ranks.iter().sum()
    }
}

fn check_distinct(points: &[MarkedPoint]) -> Result<()> {
    let mut seen = HashSet::new();
    for p in points {
        if !seen.insert(p.coordinate.clone()) {
            return Err(Error::DuplicatePoint(format!("coincident points at {}", p.coordinate)));
        }
    }
    Ok(())
}

/// Dimension of the space of degree-`<= N` polynomials with the given
/// vanishing orders, by counting: the conditions at distinct points are
/// independent until the space is exhausted.
fn counted_rank(n: usize, orders: &[u64]) -> usize {
    let total: u64 = orders.iter().sum();
    (n as u64 + 1).saturating_sub(total) as usize
}

pub fn filtration_ranks(n: usize, schedule: &Schedule, points: &[MarkedPoint]) -> Result<FiltrationProfile> {
    check_distinct(points)?;
    if schedule.points() != points.len() {
        return Err(Error::Precondition(format!(
            "schedule has {} points, {} given",
            schedule.points(),
            points.len()
        )));
    }
    let mut ranks = Vec::new();
    for omega in schedule.omegas() {
        let r = counted_rank(n, &omega);
        ranks.push(r);
        if r == 0 {
            return FiltrationProfile::new(n, ranks);
        }
    }
    Err(Error::Precondition(format!(
        "schedule horizon {} is too short to exhaust degree {n}",
        schedule.horizon()
    )))
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Dimension of the same space by exact row reduction of the jet
/// conditions on the coefficient vector `(c_0, ..., c_N)`.
pub fn rank_oracle(n: usize, conditions: &[(Coordinate, u64)]) -> usize {
    let mut rows: linalg::Matrix = Vec::new();
    for (coord, m) in conditions {
        for j in 0..*m as usize {
            let mut row = vec![ExactRational::zero(); n + 1];
            match coord {
                // j-th Taylor coefficient at p: sum_k C(k, j) p^(k-j) c_k
                Coordinate::Finite(p) => {
                    for (k, slot) in row.iter_mut().enumerate().skip(j) {
                        let pk = num_traits::pow(p.clone(), k - j);
                        *slot = ExactRational::from_integer(binomial(k, j)) * pk;
                    }
                }
                // In t = 1/z the section reads sum_k c_k t^(N-k).
                Coordinate::Infinity => {
                    if j <= n {
                        row[n - j] = ExactRational::one();
                    }
                }
            }
            rows.push(row);
        }
    }
    n + 1 - linalg::rank(&rows)
}

/// `sum_{k>=1} k (r_{k-1} - r_k) == sum_k r_k`.
pub fn abel_check(profile: &FiltrationProfile) -> bool {
    let r = &profile.ranks;
    let lhs: usize = (1..r.len()).map(|k| k * (r[k - 1] - r[k])).sum();
    lhs == profile.rank_sum()
}

/// `sum_k r_k >= r_0 (r_0 + 1) / 2`.
pub fn quadratic_bound_check(profile: &FiltrationProfile) -> bool {
    let r0 = profile.ranks[0];
    2 * profile.rank_sum() >= r0 * (r0 + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub rank_sum: usize,
    pub triangular_bound: usize,
    pub n_squared: usize,
}

/// Rank sums of the generic profile against the quadratic budget.
pub fn growth_table(max_n: usize) -> Vec<GrowthRow> {
    (0..=max_n)
        .map(|n| {
            let ranks: Vec<usize> = (0..=n + 1).map(|k| n + 1 - k).collect();
            let profile = FiltrationProfile::new(n, ranks).expect("generic profile is valid");
            GrowthRow {
                n,
                rank_sum: profile.rank_sum(),
                triangular_bound: (n + 1) * (n + 2) / 2,
                n_squared: n * n,
            }
        })
        .collect()
}
