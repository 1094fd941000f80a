//! Greedy derivation schedule: at each step differentiate once more at the
//! point whose counter lags furthest behind its target share `k a_i`.

use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal_data::PointId;
use crate::game::{PayoffMatrix, Strategy};
use crate::rational::{format_rational, ExactRational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    a: Vec<ExactRational>,
    /// `i_1, ..., i_K` as indices into the point list.
    sequence: Vec<usize>,
}

/// Common denominator `L` and numerators `n_i = L a_i`.
fn scaled(a: &[ExactRational]) -> (BigInt, Vec<BigInt>) {
    let l = a.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let n = a.iter().map(|q| (q * ExactRational::from_integer(l.clone())).to_integer()).collect();
    (l, n)
}

trait Counter: Clone + Ord + Zero + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> {}
impl<T: Clone + Ord + Zero + for<'a> AddAssign<&'a T> + for<'a> SubAssign<&'a T>> Counter for T {}

/// Deviations are tracked as `L (omega_i(k) - k a_i)`, which stay integers.
fn greedy<T: Counter>(l: &T, n: &[T], steps: usize) -> Vec<usize> {
    let mut dev = vec![T::zero(); n.len()];
    let mut seq = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut best = 0;
        for i in 1..dev.len() {
            if dev[i] < dev[best] {
                best = i;
            }
        }
        dev[best] += l;
        for (d, ni) in dev.iter_mut().zip(n) {
            *d -= ni;
        }
        seq.push(best);
    }
    seq
}

fn as_i128(l: &BigInt, n: &[BigInt]) -> Option<(i128, Vec<i128>)> {
    // |deviation| <= |I| * L, so L < 2^63 keeps everything inside i128.
    let l64 = l.to_i64()?;
    let n = n.iter().map(|x| x.to_i64().map(i128::from)).collect::<Option<Vec<_>>>()?;
    Some((i128::from(l64), n))
}

fn check_weights(a: &[ExactRational]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidStrategy("empty strategy".into()));
    }
    if let Some(i) = a.iter().position(|q| !q.is_positive()) {
        return Err(Error::InvalidStrategy(format!("a_{i} = {} is not positive", format_rational(&a[i]))));
    }
    let total: ExactRational = a.iter().sum();
    if !total.is_one() {
        return Err(Error::InvalidStrategy(format!("weights sum to {}", format_rational(&total))));
    }
    Ok(())
}

/// Greedy schedule of length `k_max`; ties go to the smallest index.
pub fn build_schedule(a: &[ExactRational], k_max: usize) -> Result<Schedule> {
    check_weights(a)?;
    let (l, n) = scaled(a);
    let sequence = match as_i128(&l, &n) {
        Some((l, n)) => greedy(&l, &n, k_max),
        None => greedy(&l, &n, k_max),
    };
    Ok(Schedule { a: a.to_vec(), sequence })
}

impl Schedule {
    /// Wraps an arbitrary sequence, e.g. to test the bounds on it.
    pub fn from_sequence(a: &[ExactRational], sequence: Vec<usize>) -> Result<Self> {
        check_weights(a)?;
        if let Some(&bad) = sequence.iter().find(|&&i| i >= a.len()) {
            return Err(Error::InvalidStrategy(format!("sequence index {bad} out of range")));
        }
        Ok(Schedule { a: a.to_vec(), sequence })
    }

    pub fn from_strategy(a: &Strategy, k_max: usize) -> Result<Self> {
        build_schedule(a.weights(), k_max)
    }

    pub fn weights(&self) -> &[ExactRational] {
        &self.a
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn horizon(&self) -> usize {
        self.sequence.len()
    }

    pub fn points(&self) -> usize {
        self.a.len()
    }

    /// Counters `omega(0), omega(1), ..., omega(K)`.
    pub fn omegas(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let mut current = vec![0u64; self.a.len()];
        std::iter::once(current.clone()).chain(self.sequence.iter().map(move |&i| {
            current[i] += 1;
            current.clone()
        }))
    }

    pub fn omega_at(&self, k: usize) -> Vec<u64> {
        let mut w = vec![0u64; self.a.len()];
        for &i in &self.sequence[..k] {
            w[i] += 1;
        }
        w
    }

    pub fn report(&self, ids: &[PointId]) -> ScheduleReport {
        ScheduleReport {
            a: self.a.iter().map(format_rational).collect(),
            k: self.horizon(),
            sequence: self.sequence.iter().map(|&i| ids[i]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub a: Vec<String>,
    #[serde(rename = "K")]
    pub k: usize,
    pub sequence: Vec<PointId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    /// `max_{i,k} omega_i(k) - k a_i`.
    pub max_dev: ExactRational,
    pub min_dev: ExactRational,
    pub verdict: bool,
}

/// Exact check of `1 - |I| <= omega_i(k) - k a_i <= 1` for all `k <= K`.
pub fn check_bounds(schedule: &Schedule) -> BoundsReport {
    let (l, n) = scaled(&schedule.a);
    let mut dev = vec![BigInt::zero(); n.len()];
    let (mut hi, mut lo) = (BigInt::zero(), BigInt::zero());
    for &i in &schedule.sequence {
        dev[i] += &l;
        for (d, ni) in dev.iter_mut().zip(&n) {
            *d -= ni;
            if *d > hi {
                hi = d.clone();
            }
            if *d < lo {
                lo = d.clone();
            }
        }
    }
    let max_dev = ExactRational::new(hi, l.clone());
    let min_dev = ExactRational::new(lo, l);
    let upper = ExactRational::one();
    let lower = ExactRational::from_integer(1.into()) - ExactRational::from_integer(schedule.a.len().into());
    let verdict = max_dev <= upper && min_dev >= lower;
    BoundsReport { max_dev, min_dev, verdict }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFloor {
    /// Smallest `c >= 0` with `sum_i omega_i(k) G_ij >= k V' - c` for all
    /// `k <= K` and all columns `j`.
    pub c: ExactRational,
    /// Set when some column has `sum_i a_i G_ij <= V'`.
    pub diagnostic: Option<String>,
}

pub fn weighted_floor(schedule: &Schedule, g: &PayoffMatrix, v_prime: &ExactRational) -> Result<WeightedFloor> {
    let n = schedule.points();
    if g.size() != n {
        return Err(Error::InvalidMatrix(format!("matrix is {0}x{0}, schedule has {n} points", g.size())));
    }
    let mut diagnostic = None;
    for j in 0..n {
        if let crate::game::Payoff::Finite(p) = g.column_payoff(&schedule.a, j) {
            if &p <= v_prime {
                diagnostic = Some(format!(
                    "column {j}: sum_i a_i G_ij = {} does not exceed V' = {}",
                    format_rational(&p),
                    format_rational(v_prime)
                ));
                break;
            }
        }
    }

    // Clear denominators so the sweep runs on integers.
    let mut den = v_prime.denom().clone();
    for i in 0..n {
        for j in 0..n {
            if let Some(q) = g.get(i, j) {
                den = den.lcm(q.denom());
            }
        }
    }
    let scale = ExactRational::from_integer(den.clone());
    let gi: Vec<Vec<Option<BigInt>>> = (0..n)
        .map(|i| (0..n).map(|j| g.get(i, j).map(|q| (q * &scale).to_integer())).collect())
        .collect();
    let vi = (v_prime * &scale).to_integer();

    let mut sums = vec![BigInt::zero(); n];
    let mut infinite = vec![false; n];
    let mut target = BigInt::zero();
    let mut worst = BigInt::zero();
    for &i in &schedule.sequence {
        target += &vi;
        for j in 0..n {
            match &gi[i][j] {
                Some(x) => sums[j] += x,
                None => infinite[j] = true,
            }
            if !infinite[j] {
                let gap = &target - &sums[j];
                if gap > worst {
                    worst = gap;
                }
            }
        }
    }
    Ok(WeightedFloor { c: ExactRational::new(worst, den), diagnostic })
}
