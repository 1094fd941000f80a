//! The global matrix `G = sum_v G^v`, gauge shifts and irreducibility.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Add;

use num_traits::Zero;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::potential_nonarch::NonArchMatrix;
use crate::rational::{p_adic_valuation, to_f64, ExactRational};

pub const SYMMETRY_TOLERANCE: f64 = 1e-9;
pub const NEGATIVITY_TOLERANCE: f64 = 1e-9;

/// A matrix entry in `R ∪ {+∞}`; infinity is an explicit tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entry {
    Finite(f64),
    Infinite,
}

impl Entry {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Entry::Finite(x) => Some(*x),
            Entry::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Entry::Infinite)
    }
}

impl Default for Entry {
    fn default() -> Self {
        Entry::Finite(0.0)
    }
}

impl From<f64> for Entry {
    fn from(x: f64) -> Self {
        Entry::Finite(x)
    }
}

impl Add for Entry {
    type Output = Entry;
    fn add(self, rhs: Entry) -> Entry {
        match (self, rhs) {
            (Entry::Finite(a), Entry::Finite(b)) => Entry::Finite(a + b),
            _ => Entry::Infinite,
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Finite(x) => write!(f, "{x}"),
            Entry::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Entry::Finite(x) => s.serialize_f64(*x),
            Entry::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct EntryVisitor;
        impl Visitor<'_> for EntryVisitor {
            type Value = Entry;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Entry, E> {
                Ok(Entry::Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Entry, E> {
                Ok(Entry::Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Entry, E> {
                Ok(Entry::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Entry, E> {
                match v {
                    "inf" | "+inf" | "infinity" => Ok(Entry::Infinite),
                    other => other
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .map(Entry::Finite)
                        .ok_or_else(|| E::custom(format!("bad matrix entry {other:?}"))),
                }
            }
        }
        d.deserialize_any(EntryVisitor)
    }
}

/// User-supplied numeric matrix for a place without a closed-form model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraMatrix {
    pub label: String,
    pub entries: Vec<Vec<Entry>>,
}

impl ExtraMatrix {
    pub fn check_shape(&self, n: usize) -> Result<()> {
        if self.entries.len() != n || self.entries.iter().any(|r| r.len() != n) {
            return Err(Error::field(
                "extra_matrices",
                format!("matrix {:?} must be {n}x{n}", self.label),
            ));
        }
        Ok(())
    }
}

/// Square matrix with finite diagonal and off-diagonal entries in `[0, +∞]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameMatrix {
    pub entries: Vec<Vec<Entry>>,
    pub places: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl GameMatrix {
    /// Validates shape, finiteness of the diagonal and off-diagonal signs.
    /// Off-diagonal values within tolerance of zero are clamped to zero.
    pub fn new(mut entries: Vec<Vec<Entry>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        for (i, row) in entries.iter_mut().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!("row {i} has length {} (expected {n})", row.len())));
            }
            for (j, e) in row.iter_mut().enumerate() {
                match *e {
                    Entry::Infinite if i == j => {
                        return Err(Error::InvalidMatrix(format!("infinite diagonal entry {i}")));
                    }
                    Entry::Finite(x) if !x.is_finite() => {
                        return Err(Error::InvalidMatrix(format!("non-finite entry ({i}, {j})")));
                    }
                    Entry::Finite(x) if i != j && x < 0.0 => {
                        if x < -NEGATIVITY_TOLERANCE {
                            return Err(Error::InvalidMatrix(format!("negative off-diagonal entry ({i}, {j}) = {x}")));
                        }
                        *e = Entry::Finite(0.0);
                    }
                    _ => {}
                }
            }
        }
        Ok(GameMatrix { entries, places: Vec::new(), warnings: Vec::new() })
    }

    pub fn from_f64(rows: Vec<Vec<f64>>) -> Result<Self> {
        GameMatrix::new(rows.into_iter().map(|r| r.into_iter().map(Entry::Finite).collect()).collect())
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Entry {
        self.entries[i][j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.size()).map(|i| self.entries[i][i].finite().expect("finite diagonal")).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|e| !e.is_infinite())
    }

    /// Largest relative asymmetry `|G_ij - G_ji| / (1 + |G_ij| + |G_ji|)`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max(match (self.entries[i][j], self.entries[j][i]) {
                    (Entry::Finite(a), Entry::Finite(b)) => (a - b).abs() / (1.0 + a.abs() + b.abs()),
                    (Entry::Infinite, Entry::Infinite) => 0.0,
                    _ => f64::INFINITY,
                });
            }
        }
        worst
    }

    /// `P G P^T` for the relabeling `new index k = old index perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> GameMatrix {
        let entries = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| self.entries[i][j]).collect())
            .collect();
        GameMatrix { entries, places: self.places.clone(), warnings: self.warnings.clone() }
    }
}

/// One place's contribution before assembly.
#[derive(Debug, Clone, PartialEq)]
pub enum PlaceMatrix {
    Arch(Vec<Vec<f64>>),
    NonArch(NonArchMatrix),
}

impl PlaceMatrix {
    pub fn label(&self) -> String {
        match self {
            PlaceMatrix::Arch(_) => "inf".to_string(),
            PlaceMatrix::NonArch(m) => format!("p={}", m.p),
        }
    }

    fn to_f64(&self) -> Vec<Vec<f64>> {
        match self {
            PlaceMatrix::Arch(m) => m.clone(),
            PlaceMatrix::NonArch(m) => m.to_f64(),
        }
    }
}

/// Entrywise sum over all places plus user matrices, `+∞` absorbing.
pub fn assemble(arch: &[Vec<Vec<f64>>], nonarch: &[NonArchMatrix], extra: &[ExtraMatrix]) -> Result<GameMatrix> {
    let places: Vec<PlaceMatrix> = arch
        .iter()
        .cloned()
        .map(PlaceMatrix::Arch)
        .chain(nonarch.iter().cloned().map(PlaceMatrix::NonArch))
        .collect();
    assemble_places(&places, extra)
}

pub fn assemble_places(places: &[PlaceMatrix], extra: &[ExtraMatrix]) -> Result<GameMatrix> {
    let n = places
        .iter()
        .map(|p| p.to_f64().len())
        .chain(extra.iter().map(|e| e.entries.len()))
        .next()
        .ok_or_else(|| Error::InvalidMatrix("no place contributes to the matrix".into()))?;
    let mut sum = vec![vec![0.0f64; n]; n];
    let mut labels = Vec::new();
    for place in places {
        let m = place.to_f64();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix(format!("place {} has the wrong shape", place.label())));
        }
        for (srow, row) in sum.iter_mut().zip(&m) {
            for (s, x) in srow.iter_mut().zip(row) {
                *s += x;
            }
        }
        labels.push(place.label());
    }
    let computed = GameMatrix::from_f64(sum.clone())?;
    let asym = computed.asymmetry();
    let user_off_diagonal = places.iter().any(|p| match p {
        PlaceMatrix::NonArch(m) => (0..n).any(|i| (0..n).any(|j| i != j && !m.coeffs[i][j].is_zero())),
        PlaceMatrix::Arch(_) => false,
    });
    let mut warnings = Vec::new();
    if asym > SYMMETRY_TOLERANCE {
        if user_off_diagonal {
            warnings.push(format!("supplied finite-place entries are asymmetric (relative defect {asym:.3e})"));
        } else {
            return Err(Error::InvalidMatrix(format!("assembled matrix is asymmetric (relative defect {asym:.3e})")));
        }
    }

    let mut entries: Vec<Vec<Entry>> = sum.into_iter().map(|r| r.into_iter().map(Entry::Finite).collect()).collect();
    for e in extra {
        e.check_shape(n)?;
        for (erow, row) in entries.iter_mut().zip(&e.entries) {
            for (x, y) in erow.iter_mut().zip(row) {
                *x = *x + *y;
            }
        }
        labels.push(e.label.clone());
    }
    let mut g = GameMatrix::new(entries)?;
    if !extra.is_empty() && g.asymmetry() > SYMMETRY_TOLERANCE {
        warnings.push(format!("user-supplied matrices make G asymmetric (relative defect {:.3e})", g.asymmetry()));
    }
    g.places = labels;
    g.warnings = warnings;
    Ok(g)
}

/// Shifts each place's diagonal by `-log |a_i|_v`.
pub fn gauge_shift(places: &[PlaceMatrix], scalings: &[ExactRational]) -> Result<Vec<PlaceMatrix>> {
    if let Some(k) = scalings.iter().position(Zero::is_zero) {
        return Err(Error::ZeroScaling(k as u32));
    }
    Ok(places
        .iter()
        .map(|place| match place {
            PlaceMatrix::Arch(m) => {
                let mut m = m.clone();
                for (i, a) in scalings.iter().enumerate().take(m.len()) {
                    m[i][i] -= to_f64(a).abs().ln();
                }
                PlaceMatrix::Arch(m)
            }
            PlaceMatrix::NonArch(m) => {
                let mut m = m.clone();
                for (i, a) in scalings.iter().enumerate().take(m.coeffs.len()) {
                    m.coeffs[i][i] += ExactRational::from_integer(p_adic_valuation(a, m.p).into());
                }
                PlaceMatrix::NonArch(m)
            }
        })
        .collect())
}

/// Strong connectivity of the digraph with an edge `i -> j` whenever
/// `i != j` and `G_ij > 0`.
pub fn irreducibility(g: &GameMatrix) -> bool {
    let n = g.size();
    let positive = |i: usize, j: usize| match g.entries[i][j] {
        Entry::Infinite => true,
        Entry::Finite(x) => x > 0.0,
    };
    let reaches_all = |forward: bool| {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let edge = if forward { positive(u, v) } else { positive(v, u) };
                if v != u && !seen[v] && edge {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    reaches_all(true) && reaches_all(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential_nonarch::{nonarch_matrix, NonArchPlace};
    use crate::rational::{int, ratio};
    use std::f64::consts::LN_2;

    #[test]
    fn single_arch() {
        let g = assemble(&[vec![vec![LN_2]]], &[], &[]).unwrap();
        assert_eq!(g.entries, vec![vec![Entry::Finite(LN_2)]]);
        assert_eq!(g.places, vec!["inf"]);
    }

    #[test]
    fn infinity_absorbs() {
        let extra = ExtraMatrix {
            label: "user".into(),
            entries: vec![vec![Entry::Finite(0.0), Entry::Infinite], vec![Entry::Infinite, Entry::Finite(0.0)]],
        };
        let g = assemble(&[vec![vec![0.0, 0.0], vec![0.0, 0.0]]], &[], &[extra]).unwrap();
        assert!(g.get(0, 1).is_infinite() && g.get(1, 0).is_infinite());
        assert_eq!(g.diagonal(), vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(GameMatrix::new(vec![vec![Entry::Infinite]]).is_err());
        assert!(GameMatrix::from_f64(vec![vec![0.0, -1.0], vec![0.0, 0.0]]).is_err());
        let g = GameMatrix::from_f64(vec![vec![0.0, -1e-12], vec![0.0, 0.0]]).unwrap();
        assert_eq!(g.get(0, 1), Entry::Finite(0.0));
        assert!(GameMatrix::from_f64(vec![vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn asymmetric_user_data_warns() {
        let extra = ExtraMatrix {
            label: "user".into(),
            entries: vec![vec![Entry::Finite(0.0), Entry::Finite(1.0)], vec![Entry::Finite(0.0), Entry::Finite(0.0)]],
        };
        let g = assemble(&[vec![vec![0.0, 0.0], vec![0.0, 0.0]]], &[], &[extra]).unwrap();
        assert_eq!(g.warnings.len(), 1);
        assert!(assemble(&[vec![vec![0.0, 1.0], vec![0.0, 0.0]]], &[], &[]).is_err());
    }

    #[test]
    fn gauge_examples() {
        let arch = PlaceMatrix::Arch(vec![vec![1.0]]);
        let same = gauge_shift(&[arch.clone()], &[int(1)]).unwrap();
        assert_eq!(same, vec![arch.clone()]);
        let shifted = gauge_shift(&[arch.clone()], &[int(2)]).unwrap();
        assert_eq!(shifted, vec![PlaceMatrix::Arch(vec![vec![1.0 - LN_2]])]);
        assert!(gauge_shift(&[arch], &[int(0)]).is_err());

        let a = ratio(3, 2);
        let p2 = nonarch_matrix(&NonArchPlace::good_reduction(2).unwrap(), &[0], &[int(1)]).unwrap();
        let p3 = nonarch_matrix(&NonArchPlace::good_reduction(3).unwrap(), &[0], &[int(1)]).unwrap();
        let out = gauge_shift(&[PlaceMatrix::NonArch(p2), PlaceMatrix::NonArch(p3)], &[a]).unwrap();
        match (&out[0], &out[1]) {
            (PlaceMatrix::NonArch(m2), PlaceMatrix::NonArch(m3)) => {
                assert_eq!(m2.coeffs[0][0], int(-1));
                assert_eq!(m3.coeffs[0][0], int(1));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn irreducibility_examples() {
        assert!(irreducibility(&GameMatrix::from_f64(vec![vec![3.0]]).unwrap()));
        assert!(irreducibility(&GameMatrix::from_f64(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()));
        assert!(!irreducibility(&GameMatrix::from_f64(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap()));
        // one-way edge only
        assert!(!irreducibility(&GameMatrix::from_f64(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()));
        let cyc = GameMatrix::new(vec![
            vec![Entry::Finite(0.0), Entry::Infinite, Entry::Finite(0.0)],
            vec![Entry::Finite(0.0), Entry::Finite(0.0), Entry::Finite(2.0)],
            vec![Entry::Finite(1.0), Entry::Finite(0.0), Entry::Finite(0.0)],
        ])
        .unwrap();
        assert!(irreducibility(&cyc));
    }

    #[test]
    fn entry_json() {
        let e: Vec<Entry> = serde_json::from_str(r#"[1, 2.5, "inf"]"#).unwrap();
        assert_eq!(e, vec![Entry::Finite(1.0), Entry::Finite(2.5), Entry::Infinite]);
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"[1.0,2.5,"inf"]"#);
    }
}
