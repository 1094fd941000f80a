//! Dense exact-rational simplex for `max c·x  s.t.  A x <= b, x >= 0` with
//! `b >= 0`, so the slack basis is feasible from the start. Pivoting follows
//! Bland's rule, which rules out cycling.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::ExactRational;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: ExactRational,
    /// Primal optimum.
    pub x: Vec<ExactRational>,
    /// Dual optimum (shadow prices of the rows).
    pub y: Vec<ExactRational>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Unbounded,
}

pub fn maximize(c: &[ExactRational], a: &[Vec<ExactRational>], b: &[ExactRational]) -> Result<LpOutcome> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(Error::Lp("inconsistent dimensions".into()));
    }
    if b.iter().any(Signed::is_negative) {
        return Err(Error::Lp("right-hand side must be nonnegative".into()));
    }
    let width = n + m;
    // Row i: [A_i | e_i | b_i].
    let mut rows: Vec<Vec<ExactRational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..m).map(|k| if k == i { ExactRational::from_integer(1.into()) } else { ExactRational::zero() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    // Reduced costs c_j - (c_B B^-1 A)_j, then the negated objective value.
    let mut cost: Vec<ExactRational> = c.iter().cloned().chain((0..=m).map(|_| ExactRational::zero())).collect();
    let mut basis: Vec<usize> = (n..width).collect();
    let mut pivots = 0;

    while let Some(enter) = (0..width).find(|&j| cost[j].is_positive()) {
        let mut leave: Option<usize> = None;
        let mut best = ExactRational::zero();
        for (i, row) in rows.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[width] / &row[enter];
            let better = match leave {
                None => true,
                Some(l) => ratio < best || (ratio == best && basis[i] < basis[l]),
            };
            if better {
                best = ratio;
                leave = Some(i);
            }
        }
        let Some(r) = leave else {
            return Ok(LpOutcome::Unbounded);
        };

        let inv = rows[r][enter].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        let f = cost[enter].clone();
        for (x, p) in cost.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
        basis[r] = enter;
        pivots += 1;
    }

    let mut x = vec![ExactRational::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = rows[i][width].clone();
        }
    }
    let y = (0..m).map(|i| -cost[n + i].clone()).collect();
    Ok(LpOutcome::Optimal(LpSolution { value: -cost[width].clone(), x, y, pivots }))
}
