//! End-to-end run: matrices at every place, the game value, the schedule
//! diagnostic and the independent rationality oracle.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::Serialize;

use crate::error::Result;
use crate::formal_data::{LocalSeries, MarkedPoint, ProblemSpec};
use crate::game::{game_value_exact, rational_strategy, GameValueResult, Payoff, PayoffMatrix, ValueReport};
use crate::global_matrix::{assemble_places, irreducibility, Entry, GameMatrix, PlaceMatrix};
use crate::potential_arch::arch_matrix;
use crate::potential_nonarch::{a_analyticity_check, nonarch_matrix, AnalyticityReport, NonArchPlace};
use crate::rational::{format_rational, prime_support, ExactRational};
use crate::rational_oracle::{degree_cap, search, OracleOutcome, OracleReport};
use crate::scheduler::{check_bounds, weighted_floor, Schedule, ScheduleReport};

/// Horizon of the schedule diagnostic.
pub const SCHEDULE_HORIZON: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Confirmed,
    CriterionOnly,
    OracleOnly,
    BothNegative,
}

impl Agreement {
    pub fn from_parts(criterion: bool, oracle: bool) -> Self {
        match (criterion, oracle) {
            (true, true) => Agreement::Confirmed,
            (true, false) => Agreement::CriterionOnly,
            (false, true) => Agreement::OracleOnly,
            (false, false) => Agreement::BothNegative,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Agreement::Confirmed => "confirmed",
            Agreement::CriterionOnly => "criterion_only",
            Agreement::OracleOnly => "oracle_only",
            Agreement::BothNegative => "both_negative",
        }
    }
}

/// Per-place matrices after scaling, in assembly order.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub places: Vec<PlaceMatrix>,
    pub matrix: GameMatrix,
}

/// Places that see the problem: the archimedean one if present, every listed
/// prime, and a good-reduction place for each prime dividing a scaling so
/// that the product formula is respected.
pub fn build_places(spec: &ProblemSpec) -> Result<Vec<PlaceMatrix>> {
    let ids = spec.ids();
    let scalars = spec.scalars();
    let mut places = Vec::new();
    for assignment in &spec.arch_places {
        places.push(PlaceMatrix::Arch(arch_matrix(assignment, &spec.points, &scalars)?));
    }
    let mut nonarch: BTreeMap<u64, NonArchPlace> = spec.nonarch_places.iter().map(|p| (p.p, p.clone())).collect();
    for a in &scalars {
        for p in prime_support(a)? {
            if let std::collections::btree_map::Entry::Vacant(e) = nonarch.entry(p) {
                e.insert(NonArchPlace::good_reduction(p)?);
            }
        }
    }
    for place in nonarch.values() {
        places.push(PlaceMatrix::NonArch(nonarch_matrix(place, &ids, &scalars)?));
    }
    Ok(places)
}

pub fn assemble_spec(spec: &ProblemSpec) -> Result<Assembly> {
    let places = build_places(spec)?;
    let matrix = if places.is_empty() && spec.extra_matrices.is_empty() {
        // Good reduction everywhere and no real place: every entry vanishes.
        let n = spec.points.len();
        GameMatrix::from_f64(vec![vec![0.0; n]; n])?
    } else {
        assemble_places(&places, &spec.extra_matrices)?
    };
    Ok(Assembly { places, matrix })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixReport {
    pub size: usize,
    pub entries: Vec<Vec<Entry>>,
    pub diagonal: Vec<f64>,
    pub places: BTreeMap<String, Vec<Vec<f64>>>,
    /// Exact coefficients of `log p` at each finite place.
    pub places_exact: BTreeMap<String, Vec<Vec<String>>>,
    pub asymmetry: f64,
    pub irreducible: bool,
    pub warnings: Vec<String>,
}

impl Assembly {
    pub fn report(&self) -> MatrixReport {
        let mut places = BTreeMap::new();
        let mut places_exact = BTreeMap::new();
        for p in &self.places {
            match p {
                PlaceMatrix::Arch(m) => {
                    places.insert(p.label(), m.clone());
                }
                PlaceMatrix::NonArch(m) => {
                    places.insert(p.label(), m.to_f64());
                    places_exact.insert(
                        p.label(),
                        m.coeffs.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
                    );
                }
            }
        }
        MatrixReport {
            size: self.matrix.size(),
            entries: self.matrix.entries.clone(),
            diagonal: self.matrix.diagonal(),
            places,
            places_exact,
            asymmetry: self.matrix.asymmetry(),
            irreducible: irreducibility(&self.matrix),
            warnings: self.matrix.warnings.clone(),
        }
    }
}

pub fn value_of(spec: &ProblemSpec) -> Result<(Assembly, GameValueResult)> {
    let assembly = assemble_spec(spec)?;
    let value = game_value_exact(&PayoffMatrix::from_game_matrix(&assembly.matrix))?;
    Ok((assembly, value))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsSummary {
    pub max_dev: String,
    pub min_dev: String,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleDiagnostic {
    pub v_prime: String,
    pub strategy: Vec<String>,
    pub schedule: ScheduleReport,
    pub bounds: BoundsSummary,
    pub weighted_floor_c: String,
    pub weighted_floor_diagnostic: Option<String>,
}

/// Rational strategy at `V' = V/2`, its schedule, the drift bounds and the
/// weighted floor constant.
pub fn schedule_diagnostic(
    g: &PayoffMatrix,
    v: &ExactRational,
    spec: &ProblemSpec,
    horizon: usize,
) -> Result<ScheduleDiagnostic> {
    let v_prime = v / ExactRational::from_integer(2.into());
    let a = rational_strategy(g, &v_prime)?;
    let schedule = Schedule::from_strategy(&a, horizon)?;
    let bounds = check_bounds(&schedule);
    let floor = weighted_floor(&schedule, g, &v_prime)?;
    Ok(ScheduleDiagnostic {
        v_prime: format_rational(&v_prime),
        strategy: a.to_strings(),
        schedule: schedule.report(&spec.ids()),
        bounds: BoundsSummary {
            max_dev: format_rational(&bounds.max_dev),
            min_dev: format_rational(&bounds.min_dev),
            verdict: bounds.verdict,
        },
        weighted_floor_c: format_rational(&floor.c),
        weighted_floor_diagnostic: floor.diagnostic,
    })
}

pub fn jets(spec: &ProblemSpec) -> Vec<(MarkedPoint, LocalSeries)> {
    spec.points.iter().cloned().zip(spec.series.iter().cloned()).collect()
}

/// Oracle search capped at `max_degree`, or at the largest degree the jets
/// allow. Too few coefficients to pin down even a constant yields "not found".
pub fn run_oracle(spec: &ProblemSpec, max_degree: Option<usize>) -> Result<OracleOutcome> {
    let jets = jets(spec);
    if degree_cap(&jets).is_none() {
        return Ok(OracleOutcome {
            function: None,
            degree: None,
            degrees_tried: Vec::new(),
            verified_orders: BTreeMap::new(),
        });
    }
    search(&jets, max_degree)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    #[serde(rename = "V_G")]
    pub v_g: Entry,
    #[serde(rename = "V_G_exact")]
    pub v_g_exact: String,
    pub criterion_holds: bool,
    pub margin_flag: String,
    pub oracle_result: OracleReport,
    pub agreement: Agreement,
    pub game: ValueReport,
    pub matrix: MatrixReport,
    pub analyticity: AnalyticityReport,
    pub schedule: Option<ScheduleDiagnostic>,
}

pub fn run_check(spec: &ProblemSpec) -> Result<Verdict> {
    let (assembly, value) = value_of(spec)?;
    let payoff = PayoffMatrix::from_game_matrix(&assembly.matrix);
    let criterion_holds = match &value.value {
        Payoff::Infinite => true,
        Payoff::Finite(v) => v.is_positive(),
    };
    let schedule = match &value.value {
        Payoff::Finite(v) if v.is_positive() => {
            Some(schedule_diagnostic(&payoff, v, spec, SCHEDULE_HORIZON)?)
        }
        _ => None,
    };
    let oracle = run_oracle(spec, Some(spec.degree_bound))?;
    let agreement = Agreement::from_parts(criterion_holds, oracle.function.is_some());
    Ok(Verdict {
        v_g: value.value.to_entry(),
        v_g_exact: value.value.to_string(),
        criterion_holds,
        margin_flag: value.margin_flag().to_string(),
        oracle_result: oracle.report(),
        agreement,
        game: value.report(),
        matrix: assembly.report(),
        analyticity: a_analyticity_check(&spec.nonarch_places, &spec.ids(), spec.infinite_tail),
        schedule,
    })
}
