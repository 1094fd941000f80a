//! Value of the zero-sum matrix game, optimal strategies, minimax check and
//! strictly positive rational strategies.
//!
//! Rows belong to the maximizing player. Payoffs are exact rationals (or
//! `+∞`); archimedean floats are rationalized by continued fractions before
//! any LP is solved.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::global_matrix::{Entry, GameMatrix};
use crate::rational::{format_rational, int, rationalize_default, to_f64, ExactRational};
use crate::simplex::{maximize, LpOutcome};

/// Values closer to zero than this are flagged as marginal verdicts.
pub const MARGINAL_THRESHOLD: f64 = 1e-6;
/// Slack allowed between a certificate and the reported value.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-9;

/// Exact value in `Q ∪ {+∞}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Payoff {
    Finite(ExactRational),
    Infinite,
}

impl Payoff {
    pub fn to_f64(&self) -> f64 {
        match self {
            Payoff::Finite(q) => to_f64(q),
            Payoff::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<&ExactRational> {
        match self {
            Payoff::Finite(q) => Some(q),
            Payoff::Infinite => None,
        }
    }

    pub fn to_entry(&self) -> Entry {
        match self {
            Payoff::Finite(q) => Entry::Finite(to_f64(q)),
            Payoff::Infinite => Entry::Infinite,
        }
    }
}

impl fmt::Display for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payoff::Finite(q) => write!(f, "{}", format_rational(q)),
            Payoff::Infinite => write!(f, "inf"),
        }
    }
}

/// Exact payoff matrix; `None` stands for `+∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffMatrix {
    entries: Vec<Vec<Option<ExactRational>>>,
}

impl PayoffMatrix {
    pub fn new(entries: Vec<Vec<Option<ExactRational>>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("payoff matrix must be square and nonempty".into()));
        }
        Ok(PayoffMatrix { entries })
    }

    pub fn finite(entries: Vec<Vec<ExactRational>>) -> Result<Self> {
        PayoffMatrix::new(entries.into_iter().map(|r| r.into_iter().map(Some).collect()).collect())
    }

    /// Continued-fraction rationalization of every finite entry.
    pub fn from_game_matrix(g: &GameMatrix) -> Self {
        PayoffMatrix {
            entries: g
                .entries
                .iter()
                .map(|r| r.iter().map(|e| e.finite().map(rationalize_default)).collect())
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&ExactRational> {
        self.entries[i][j].as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(Option::is_some)
    }

    fn max_abs(&self) -> ExactRational {
        self.entries
            .iter()
            .flatten()
            .flatten()
            .map(|q| q.abs())
            .max()
            .unwrap_or_else(ExactRational::zero)
    }

    /// `sum_i x_i G_ij` with `0 · ∞ = 0`.
    pub fn column_payoff(&self, x: &[ExactRational], j: usize) -> Payoff {
        let mut acc = ExactRational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            match &self.entries[i][j] {
                Some(g) => acc += xi * g,
                None => return Payoff::Infinite,
            }
        }
        Payoff::Finite(acc)
    }
}

/// A mixed strategy: nonnegative exact weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Strategy(Vec<ExactRational>);

impl Strategy {
    pub fn new(weights: Vec<ExactRational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidStrategy("empty strategy".into()));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::InvalidStrategy("negative weight".into()));
        }
        let total: ExactRational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidStrategy(format!("weights sum to {}", format_rational(&total))));
        }
        Ok(Strategy(weights))
    }

    pub fn uniform(n: usize) -> Self {
        Strategy(vec![ExactRational::new(1.into(), (n as i64).into()); n])
    }

    pub fn pure(n: usize, i: usize) -> Self {
        let mut w = vec![ExactRational::zero(); n];
        w[i] = ExactRational::one();
        Strategy(w)
    }

    pub fn weights(&self) -> &[ExactRational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_fully_mixed(&self) -> bool {
        self.0.iter().all(Signed::is_positive)
    }

    /// `(1 - eps) self + eps other`.
    fn blend(&self, other: &Strategy, eps: &ExactRational) -> Strategy {
        let keep = ExactRational::one() - eps;
        Strategy(self.0.iter().zip(&other.0).map(|(a, b)| &keep * a + eps * b).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rational).collect()
    }
}

/// `min_j sum_i x_i G_ij`.
pub fn payoff_floor(g: &PayoffMatrix, x: &Strategy) -> Payoff {
    (0..g.size())
        .map(|j| g.column_payoff(x.weights(), j))
        .min()
        .expect("nonempty matrix")
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameValueResult {
    pub value: Payoff,
    pub x_star: Strategy,
    /// Absent when the value is infinite.
    pub y_star: Option<Strategy>,
    /// Column payoffs of `x_star`.
    pub certificate: Vec<Payoff>,
}

impl GameValueResult {
    pub fn margin_flag(&self) -> &'static str {
        match &self.value {
            Payoff::Finite(v) if to_f64(v).abs() < MARGINAL_THRESHOLD => "marginal",
            _ => "ok",
        }
    }

    pub fn report(&self) -> ValueReport {
        ValueReport {
            value: self.value.to_entry(),
            value_exact: self.value.to_string(),
            x_star: self.x_star.to_strings(),
            y_star: self.y_star.as_ref().map(Strategy::to_strings),
            margin_flag: self.margin_flag().to_string(),
            certificate: self.certificate.iter().map(Payoff::to_entry).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueReport {
    pub value: Entry,
    pub value_exact: String,
    pub x_star: Vec<String>,
    pub y_star: Option<Vec<String>>,
    pub margin_flag: String,
    pub certificate: Vec<Entry>,
}

struct LpGame {
    value: ExactRational,
    /// Maximizer (rows).
    x: Vec<ExactRational>,
    /// Minimizer (columns).
    y: Vec<ExactRational>,
}

/// Solves the column player's LP on a finite `rows x cols` matrix:
/// `max sum w  s.t.  (G + s) w <= 1`, giving `inf_y sup_x`. The row
/// player's strategy comes from the dual prices.
fn column_lp(g: &[Vec<ExactRational>]) -> Result<LpGame> {
    let cols = g[0].len();
    let min = g.iter().flatten().min().cloned().expect("nonempty");
    let shift = int(1) - min;
    let a: Vec<Vec<ExactRational>> = g.iter().map(|r| r.iter().map(|x| x + &shift).collect()).collect();
    let ones_c = vec![ExactRational::one(); cols];
    let ones_b = vec![ExactRational::one(); g.len()];
    let sol = match maximize(&ones_c, &a, &ones_b)? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Unbounded => return Err(Error::Lp("game LP unexpectedly unbounded".into())),
    };
    let total = sol.value.clone();
    if !total.is_positive() {
        return Err(Error::Lp("game LP has a nonpositive optimum".into()));
    }
    Ok(LpGame {
        value: total.recip() - shift,
        x: sol.y.iter().map(|u| u / &total).collect(),
        y: sol.x.iter().map(|w| w / &total).collect(),
    })
}

/// `inf_y sup_x <x, G y>` for a finite matrix, via the column player's LP.
pub fn inf_sup(g: &PayoffMatrix) -> Result<ExactRational> {
    Ok(column_lp(&finite_rows(g)?)?.value)
}

/// `sup_x inf_y <x, G y>` for a finite matrix, via the column LP of `-G^T`.
pub fn sup_inf(g: &PayoffMatrix) -> Result<ExactRational> {
    let rows = finite_rows(g)?;
    let n = rows.len();
    let neg_t: Vec<Vec<ExactRational>> = (0..n).map(|i| (0..n).map(|j| -rows[j][i].clone()).collect()).collect();
    Ok(-column_lp(&neg_t)?.value)
}

fn finite_rows(g: &PayoffMatrix) -> Result<Vec<Vec<ExactRational>>> {
    g.entries
        .iter()
        .map(|r| r.iter().cloned().collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Precondition("minimax check requires a finite matrix".into()))
}

/// Exact equality of the sup-inf and inf-sup LP values.
pub fn minimax_check(g: &PayoffMatrix) -> Result<bool> {
    Ok(sup_inf(g)? == inf_sup(g)?)
}

/// Value and optimal strategies.
///
/// When some column has no infinite entry, the value equals the value of
/// the finite game on those columns: any fully mixed row strategy already
/// collects `+∞` on every other column. The returned `x_star` is then a
/// slight blend towards the barycenter so that it certifies the value within
/// [`CERTIFICATE_TOLERANCE`] on the full matrix.
pub fn game_value_exact(g: &PayoffMatrix) -> Result<GameValueResult> {
    let n = g.size();
    let finite_cols: Vec<usize> = (0..n).filter(|&j| (0..n).all(|i| g.get(i, j).is_some())).collect();
    if finite_cols.is_empty() {
        let x = Strategy::uniform(n);
        let certificate = (0..n).map(|j| g.column_payoff(x.weights(), j)).collect();
        return Ok(GameValueResult { value: Payoff::Infinite, x_star: x, y_star: None, certificate });
    }
    let reduced: Vec<Vec<ExactRational>> = (0..n)
        .map(|i| finite_cols.iter().map(|&j| g.get(i, j).cloned().expect("finite column")).collect())
        .collect();
    let lp = column_lp(&reduced)?;
    let mut y = vec![ExactRational::zero(); n];
    for (k, &j) in finite_cols.iter().enumerate() {
        y[j] = lp.y[k].clone();
    }
    let mut x = Strategy::new(lp.x)?;
    if finite_cols.len() < n {
        let scale = g.max_abs() + lp.value.abs() + int(1);
        let eps = (scale * int(10_000_000_000)).recip();
        x = x.blend(&Strategy::uniform(n), &eps);
    }
    let certificate = (0..n).map(|j| g.column_payoff(x.weights(), j)).collect();
    Ok(GameValueResult { value: Payoff::Finite(lp.value), x_star: x, y_star: Some(Strategy::new(y)?), certificate })
}

pub fn game_value(g: &GameMatrix) -> Result<GameValueResult> {
    game_value_exact(&PayoffMatrix::from_game_matrix(g))
}

/// A strictly positive rational strategy whose every column payoff exceeds
/// `v_prime`. Built by blending an optimal strategy with the barycenter,
/// halving the blend weight until all columns clear `v_prime`.
pub fn rational_strategy(g: &PayoffMatrix, v_prime: &ExactRational) -> Result<Strategy> {
    let result = game_value_exact(g)?;
    if let Payoff::Finite(v) = &result.value {
        if v_prime >= v {
            return Err(Error::Precondition(format!(
                "V' = {} is not below the game value {}",
                format_rational(v_prime),
                format_rational(v)
            )));
        }
    }
    let n = g.size();
    let center = Strategy::uniform(n);
    let mut eps = ExactRational::new(1.into(), 2.into());
    for _ in 0..400 {
        let a = result.x_star.blend(&center, &eps);
        let clears = (0..n).all(|j| match g.column_payoff(a.weights(), j) {
            Payoff::Infinite => true,
            Payoff::Finite(p) => &p > v_prime,
        });
        if clears && a.is_fully_mixed() {
            return Ok(a);
        }
        eps /= int(2);
    }
    Err(Error::Lp("no strictly positive strategy found within the blending budget".into()))
}
