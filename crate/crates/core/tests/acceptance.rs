//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if a criterion fails that is not listed as known to be
//! unattainable.

use std::f64::consts::LN_2;
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use capgame::formal_data::{parse_problem, Coordinate, LocalSeries, MarkedPoint, ProblemSpec};
use capgame::game::{game_value_exact, minimax_check, rational_strategy, Payoff, PayoffMatrix};
use capgame::pipeline::{assemble_spec, run_check, Agreement};
use capgame::poly::Polynomial;
use capgame::potential_arch::{green, robin_constant, ArchDomain, EvalPoint};
use capgame::rational::{int, ratio, to_f64};
use capgame::rational_oracle::{hankel_profile, multipoint_reconstruct, search, RationalFunction};
use capgame::scheduler::{build_schedule, check_bounds, weighted_floor, Schedule};
use capgame::slopes_demo::{abel_check, filtration_ranks, quadratic_bound_check, rank_oracle, FiltrationProfile};
use capgame::ExactRational;

type Q = ExactRational;
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Criteria whose statement is false as written; their failure is reported
/// but does not fail the run.
const KNOWN_UNATTAINABLE: &[usize] = &[5];

fn testdata(name: &str) -> ProblemSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("testdata").join(name);
    parse_problem(&std::fs::read(path).expect("testdata file")).expect("valid problem")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rand_q(rng: &mut StdRng, num: i64, den: i64) -> Q {
    ratio(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn borel_dwork() -> Outcome {
    let spec = testdata("borel_dwork.json");
    let start = Instant::now();
    let verdict = run_check(&spec).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let v = verdict.v_g.finite().ok_or("V_G is infinite")?;
    ensure((v - LN_2).abs() < 1e-9, || format!("V_G = {v}, expected log 2"))?;
    ensure(verdict.criterion_holds, || "criterion does not hold".into())?;
    ensure(verdict.agreement == Agreement::Confirmed, || format!("agreement {:?}", verdict.agreement))?;
    let expected = RationalFunction::new(Polynomial::one(), Polynomial::new(vec![int(1), int(-2)])).unwrap();
    let found = capgame::pipeline::run_oracle(&spec, Some(spec.degree_bound))
        .map_err(|e| e.to_string())?
        .function
        .ok_or("oracle found nothing")?;
    ensure(found == expected, || format!("oracle returned {found}"))?;
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!("V_G = {v:.12}, oracle {found}, {elapsed:?}"))
}

fn polya_threshold() -> Outcome {
    let r1 = robin_constant(&ArchDomain::interval_complement(int(-1), int(1)), &Coordinate::Infinity)
        .map_err(|e| e.to_string())?;
    let r2 = robin_constant(&ArchDomain::interval_complement(int(-2), int(2)), &Coordinate::Infinity)
        .map_err(|e| e.to_string())?;
    ensure((r1 - LN_2).abs() < 1e-9, || format!("[-1,1]: {r1}"))?;
    ensure(r2.abs() < 1e-9, || format!("[-2,2]: {r2}"))?;
    Ok(format!("[-1,1] -> {r1:.12}, [-2,2] -> {r2:.3e}"))
}

fn green_at(d: &ArchDomain, pole: &Q, z: Complex64) -> Result<f64, String> {
    green(d, &Coordinate::Finite(pole.clone()), EvalPoint::Finite(z)).map_err(|e| e.to_string())
}

/// Five-point Laplacian at step `h`, evaluated independently of the library's
/// own diagnostic.
fn laplacian(d: &ArchDomain, pole: &Q, z: Complex64, h: f64) -> Result<f64, String> {
    let f = |w: Complex64| green_at(d, pole, w);
    let s = f(z + h)? + f(z - h)? + f(z + Complex64::new(0.0, h))? + f(z - Complex64::new(0.0, h))? - 4.0 * f(z)?;
    Ok(s / (h * h))
}

fn green_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x9e37);
    let configs = 120;
    let (mut worst_sym, mut worst_bdry, mut worst_lap) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..configs {
        let c = rand_q(&mut rng, 30, 10);
        let r = ratio(rng.gen_range(30..=50), 10);
        let disk = ArchDomain::disk(c.clone(), r.clone());
        let (cf, rf) = (to_f64(&c), to_f64(&r));
        let w1 = &c + ratio(rng.gen_range(-5..=5), 10);
        let w2 = &c + ratio(rng.gen_range(-20..=20), 10);
        let w2 = if w2 == w1 { &w1 + ratio(1, 7) } else { w2 };
        let (w1f, w2f) = (to_f64(&w1), to_f64(&w2));

        // Symmetry.
        let a = green_at(&disk, &w1, Complex64::new(w2f, 0.0))?;
        let b = green_at(&disk, &w2, Complex64::new(w1f, 0.0))?;
        worst_sym = worst_sym.max((a - b).abs());
        ensure((a - b).abs() < 1e-9, || format!("config {n}: symmetry {a} vs {b}"))?;

        // Boundary vanishing.
        for k in 0..64 {
            let t = std::f64::consts::TAU * k as f64 / 64.0;
            let z = Complex64::new(cf, 0.0) + Complex64::from_polar(rf, t);
            let g = green_at(&disk, &w1, z)?;
            worst_bdry = worst_bdry.max(g.abs());
            ensure(g.abs() <= 1e-8, || format!("config {n}: boundary value {g} at {z}"))?;
        }

        // Harmonicity at distance >= 1 from the pole and the boundary.
        for _ in 0..4 {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let z = Complex64::new(w1f, 0.0) + Complex64::from_polar(1.2, t);
            let lap = laplacian(&disk, &w1, z, 0.01)?;
            worst_lap = worst_lap.max(lap.abs());
            ensure(lap.abs() < 1e-4, || format!("config {n}: Laplacian {lap} at {z}"))?;
        }

        // Monotonicity, and comparison with the disk of radius S about the pole.
        let s = &r - (&w1 - &c).abs();
        let small_r = &(&r + (&w1 - &c).abs() + ratio(13, 10)) / int(2);
        let smaller = ArchDomain::disk(c.clone(), small_r.clone());
        let around = ArchDomain::disk(w1.clone(), s.clone());
        let robin = robin_constant(&disk, &Coordinate::Finite(w1.clone())).map_err(|e| e.to_string())?;
        ensure(robin >= to_f64(&s).ln() - 1e-12, || format!("config {n}: Robin {robin} < log S"))?;
        for _ in 0..8 {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let rho: f64 = rng.gen_range(0.05..1.2);
            let z = Complex64::new(w1f, 0.0) + Complex64::from_polar(rho, t);
            let big = green_at(&disk, &w1, z)?;
            let small = green_at(&smaller, &w1, z)?;
            ensure(small <= big + 1e-12, || format!("config {n}: monotonicity {small} > {big}"))?;
            let exact = (to_f64(&s) / rho).ln();
            let local = green_at(&around, &w1, z)?;
            ensure((local - exact).abs() < 1e-9, || format!("config {n}: disk about pole {local} vs {exact}"))?;
            ensure(big >= exact - 1e-9, || format!("config {n}: lower bound {big} < {exact}"))?;
        }
    }
    Ok(format!(
        "{configs} disks; max symmetry defect {worst_sym:.1e}, boundary {worst_bdry:.1e}, Laplacian {worst_lap:.1e}"
    ))
}

fn gauge_invariance() -> Outcome {
    let doc = |scalar: &str| {
        format!(
            r#"{{
            "points": [{{"id": 1, "coordinate": "0"}}, {{"id": 2, "coordinate": "inf"}}, {{"id": 3, "coordinate": "2"}}],
            "series": [
                {{"point": 1, "coefficients": ["1"]}},
                {{"point": 2, "coefficients": ["1"]}},
                {{"point": 3, "coefficients": ["1"]}}
            ],
            "arch_places": [{{"domain": {{"kind": "union", "components": [
                {{"kind": "disk", "center": "1", "radius": "3/2"}},
                {{"kind": "exterior_disk", "center": "0", "radius": "4"}}
            ]}}}}],
            "nonarch_places": [{{"p": 3, "log_size_coeffs": {{"1": "-1/2", "3": "-1"}}}}, {{"p": 7, "preset": {{"2": "leaf"}}}}],
            "scalings": [{{"point": 1, "scalar": "{scalar}"}}, {{"point": 2, "scalar": "{scalar}"}}, {{"point": 3, "scalar": "{scalar}"}}],
            "degree_bound": 1
        }}"#
        )
    };
    let base = assemble_spec(&parse_problem(doc("1").as_bytes()).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?
        .matrix
        .diagonal();
    let mut worst = 0.0f64;
    for a in ["2", "3/2", "-5/6"] {
        let spec = parse_problem(doc(a).as_bytes()).map_err(|e| e.to_string())?;
        let assembly = assemble_spec(&spec).map_err(|e| e.to_string())?;
        let diag = assembly.matrix.diagonal();
        for (x, y) in diag.iter().zip(&base) {
            worst = worst.max((x - y).abs());
            ensure((x - y).abs() < 1e-9, || format!("a = {a}: diagonal {diag:?} vs {base:?}"))?;
        }
        // Each individual place must actually move when a is not a unit there.
        ensure(assembly.places.len() >= 3, || format!("a = {a}: only {} places", assembly.places.len()))?;
    }
    Ok(format!("max diagonal change {worst:.1e}"))
}

fn random_matrix(rng: &mut StdRng, n: usize, nonneg_off_diagonal: bool) -> Vec<Vec<Q>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let q = rand_q(rng, 20, 6);
                    if nonneg_off_diagonal && i != j {
                        q.abs()
                    } else {
                        q
                    }
                })
                .collect()
        })
        .collect()
}

/// Checks optimality from both certificates: `min_j (x G)_j = V = max_i (G y)_i`.
fn certified(rows: &[Vec<Q>], v: &Q, x: &[Q], y: &[Q]) -> bool {
    let n = rows.len();
    let col = |j: usize| -> Q { (0..n).map(|i| &x[i] * &rows[i][j]).sum() };
    let row = |i: usize| -> Q { (0..n).map(|j| &rows[i][j] * &y[j]).sum() };
    let simplex = |s: &[Q]| s.iter().all(|w| !w.is_negative()) && s.iter().sum::<Q>() == Q::one();
    simplex(x) && simplex(y) && (0..n).map(col).min().as_ref() == Some(v) && (0..n).map(row).max().as_ref() == Some(v)
}

struct GameCase {
    matrix: PayoffMatrix,
    value: Q,
}

fn game_cases() -> (Vec<GameCase>, Vec<GameCase>) {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut make = |nonneg| {
        (0..200)
            .map(|_| {
                let n = rng.gen_range(1..=6);
                let rows = random_matrix(&mut rng, n, nonneg);
                let matrix = PayoffMatrix::finite(rows).unwrap();
                let value = match game_value_exact(&matrix).unwrap().value {
                    Payoff::Finite(v) => v,
                    Payoff::Infinite => unreachable!("finite matrix"),
                };
                GameCase { matrix, value }
            })
            .collect::<Vec<_>>()
    };
    let general = make(false);
    let nonneg = make(true);
    (general, nonneg)
}

fn rows_of(m: &PayoffMatrix) -> Vec<Vec<Q>> {
    (0..m.size()).map(|i| (0..m.size()).map(|j| m.get(i, j).cloned().unwrap()).collect()).collect()
}

fn game_suite() -> Outcome {
    let start = Instant::now();
    let half = ratio(1, 2);
    let mp = PayoffMatrix::finite(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
    let r = game_value_exact(&mp).map_err(|e| e.to_string())?;
    ensure(r.value == Payoff::Finite(half.clone()), || format!("[[0,1],[1,0]] value {}", r.value))?;
    ensure(r.x_star.weights() == [half.clone(), half.clone()], || "x* is not (1/2, 1/2)".into())?;
    ensure(
        r.y_star.as_ref().map(|y| y.weights().to_vec()) == Some(vec![half.clone(), half.clone()]),
        || "y* is not (1/2, 1/2)".into(),
    )?;
    let inf = PayoffMatrix::new(vec![vec![Some(int(0)), None], vec![None, Some(int(0))]]).unwrap();
    let r = game_value_exact(&inf).map_err(|e| e.to_string())?;
    ensure(r.value == Payoff::Infinite, || format!("[[0,inf],[inf,0]] value {}", r.value))?;

    let (general, nonneg) = game_cases();
    for (k, case) in general.iter().chain(&nonneg).enumerate() {
        ensure(minimax_check(&case.matrix).map_err(|e| e.to_string())?, || format!("matrix {k}: sup-inf != inf-sup"))?;
        let r = game_value_exact(&case.matrix).map_err(|e| e.to_string())?;
        let y = r.y_star.as_ref().ok_or("missing y*")?;
        ensure(certified(&rows_of(&case.matrix), &case.value, r.x_star.weights(), y.weights()), || {
            format!("matrix {k}: strategies do not certify the value")
        })?;
    }

    let mut violations = Vec::new();
    for (k, case) in nonneg.iter().enumerate() {
        let max_diag = (0..case.matrix.size()).map(|i| case.matrix.get(i, i).cloned().unwrap()).max().unwrap();
        if case.value < max_diag {
            violations.push((k, case.value.clone(), max_diag));
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 10.0, || format!("took {elapsed:?}"))?;
    if let Some((k, v, d)) = violations.first() {
        return Err(format!(
            "value >= max diagonal fails on {}/200 matrices (first: #{k}, value {v} < {d}); \
             counterexample [[1,0],[0,1]] has value 1/2 < 1",
            violations.len()
        ));
    }
    Ok(format!("400 random matrices, {elapsed:?}"))
}

fn rational_strategy_lemma() -> Outcome {
    let (general, nonneg) = game_cases();
    let mut checked = 0;
    for (k, case) in general.iter().chain(&nonneg).enumerate() {
        if !case.value.is_positive() {
            continue;
        }
        let v_prime = &case.value / int(2);
        let a = rational_strategy(&case.matrix, &v_prime).map_err(|e| format!("matrix {k}: {e}"))?;
        let w = a.weights();
        ensure(w.iter().all(Signed::is_positive), || format!("matrix {k}: not strictly positive"))?;
        ensure(w.iter().sum::<Q>() == Q::one(), || format!("matrix {k}: weights do not sum to 1"))?;
        let rows = rows_of(&case.matrix);
        for j in 0..rows.len() {
            let p: Q = (0..rows.len()).map(|i| &w[i] * &rows[i][j]).sum();
            ensure(p > v_prime, || format!("matrix {k}, column {j}: {p} <= {v_prime}"))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} matrices with positive value"))
}

/// Exact drift bounds recomputed from the sequence alone.
fn independent_bounds(a: &[Q], seq: &[usize]) -> bool {
    let n = a.len();
    let mut omega = vec![0i64; n];
    let lower = int(1) - int(n as i64);
    for (k, &i) in seq.iter().enumerate() {
        omega[i] += 1;
        let k = int(k as i64 + 1);
        for (o, ai) in omega.iter().zip(a) {
            let dev = int(*o) - &k * ai;
            if dev > int(1) || dev < lower {
                return false;
            }
        }
    }
    true
}

fn scheduler_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xa11ce);
    for t in 0..500 {
        let n = rng.gen_range(1..=8);
        let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=60)).collect();
        let total: i64 = raw.iter().sum();
        let a: Vec<Q> = raw.iter().map(|&x| ratio(x, total)).collect();
        let s = build_schedule(&a, 10_000).map_err(|e| e.to_string())?;
        ensure(s.sequence().len() == 10_000, || format!("trial {t}: wrong length"))?;
        ensure(check_bounds(&s).verdict, || format!("trial {t}: check_bounds rejects a = {a:?}"))?;
        ensure(independent_bounds(&a, s.sequence()), || format!("trial {t}: drift out of bounds for a = {a:?}"))?;
    }
    let hand = build_schedule(&[ratio(2, 3), ratio(1, 3)], 3).map_err(|e| e.to_string())?;
    ensure(hand.sequence() == [0, 1, 0], || format!("hand example gives {:?}", hand.sequence()))?;

    let (general, _) = game_cases();
    let mut compared = 0;
    for (k, case) in general.iter().enumerate().filter(|(_, c)| c.value.is_positive()) {
        let v_prime = &case.value / int(2);
        let a = rational_strategy(&case.matrix, &v_prime).map_err(|e| e.to_string())?;
        let short = Schedule::from_strategy(&a, 1_000).map_err(|e| e.to_string())?;
        let long = Schedule::from_strategy(&a, 10_000).map_err(|e| e.to_string())?;
        let c1 = weighted_floor(&short, &case.matrix, &v_prime).map_err(|e| e.to_string())?.c;
        let c2 = weighted_floor(&long, &case.matrix, &v_prime).map_err(|e| e.to_string())?.c;
        ensure(c1 == c2, || format!("matrix {k}: c = {c1} at K = 1000, {c2} at K = 10000"))?;
        compared += 1;
    }
    Ok(format!("500 random weight vectors, weighted floor stable on {compared} games"))
}

fn filtration_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xf117);
    let mut cases = 0;
    for n in 0..=8usize {
        for size in 1..=3usize {
            for _ in 0..6 {
                let mut coords: Vec<Coordinate> = Vec::new();
                while coords.len() < size {
                    let c = if rng.gen_bool(0.25) { Coordinate::Infinity } else { Coordinate::Finite(rand_q(&mut rng, 5, 3)) };
                    if !coords.contains(&c) {
                        coords.push(c);
                    }
                }
                let points: Vec<MarkedPoint> =
                    coords.iter().enumerate().map(|(i, c)| MarkedPoint::new(i as u32, c.clone())).collect();
                let raw: Vec<i64> = (0..size).map(|_| rng.gen_range(1..=9)).collect();
                let total: i64 = raw.iter().sum();
                let a: Vec<Q> = raw.iter().map(|&x| ratio(x, total)).collect();
                let schedule = build_schedule(&a, n + 1).map_err(|e| e.to_string())?;
                let profile = filtration_ranks(n, &schedule, &points).map_err(|e| e.to_string())?;
                for (k, omega) in schedule.omegas().enumerate().take(profile.ranks().len()) {
                    let conditions: Vec<(Coordinate, u64)> = coords.iter().cloned().zip(omega).collect();
                    let r = rank_oracle(n, &conditions);
                    ensure(r == profile.ranks()[k], || {
                        format!("N = {n}, points {coords:?}, step {k}: closed form {} vs oracle {r}", profile.ranks()[k])
                    })?;
                }
                cases += 1;
            }
        }
        let generic = FiltrationProfile::new(n, (0..=n + 1).map(|k| n + 1 - k).collect()).map_err(|e| e.to_string())?;
        ensure(abel_check(&generic), || format!("N = {n}: Abel identity fails"))?;
        ensure(quadratic_bound_check(&generic), || format!("N = {n}: quadratic bound fails"))?;
        ensure(2 * generic.rank_sum() == (n + 1) * (n + 2), || format!("N = {n}: quadratic bound is not an equality"))?;
    }
    Ok(format!("{cases} filtrations matched the rank oracle"))
}

fn random_poly(rng: &mut StdRng, deg: usize) -> Polynomial {
    Polynomial::new((0..=deg).map(|_| int(rng.gen_range(-6..=6))).collect())
}

fn oracle_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x0ac1e);
    let mut trials = 0;
    while trials < 500 {
        let d = rng.gen_range(0..=5usize);
        let num = random_poly(&mut rng, d);
        let den = random_poly(&mut rng, d);
        if den.is_zero() {
            continue;
        }
        let f = RationalFunction::new(num, den).unwrap();
        let mut coords: Vec<Coordinate> = Vec::new();
        while coords.len() < 2 {
            let c = if rng.gen_bool(0.3) { Coordinate::Infinity } else { Coordinate::Finite(rand_q(&mut rng, 4, 3)) };
            if !coords.contains(&c) {
                coords.push(c);
            }
        }
        // Total order 2d + 2 means sum of (M_i + 1) = 2d + 2.
        let m0 = rng.gen_range(0..=2 * d);
        let orders = [m0, 2 * d - m0];
        let mut jets = Vec::new();
        let mut regular = true;
        for (i, (c, m)) in coords.iter().zip(orders).enumerate() {
            let p = MarkedPoint::new(i as u32, c.clone());
            match f.expand_at(&p, m) {
                Ok(s) => jets.push((p, s)),
                Err(_) => regular = false,
            }
        }
        if !regular {
            continue;
        }
        let got = multipoint_reconstruct(&jets, d).map_err(|e| format!("trial {trials}: {e}"))?;
        ensure(got.as_ref() == Some(&f), || {
            format!("trial {trials}: {f} at {coords:?} orders {orders:?} reconstructed as {got:?}")
        })?;
        trials += 1;
    }

    for r in [int(2), ratio(-3, 5), int(7), ratio(1, 9)] {
        let coeffs: Vec<Q> = (0..12).map(|k| num_traits::pow(r.clone(), k)).collect();
        let h = hankel_profile(&LocalSeries::new(0, coeffs).unwrap(), 5).map_err(|e| e.to_string())?;
        ensure(h[0] == Q::one() && h[1..].iter().all(Zero::is_zero), || format!("ratio {r}: Hankel {h:?}"))?;
    }

    let mut c = vec![Q::one()];
    for k in 1..=20 {
        let next = &c[k - 1] / int(k as i64);
        c.push(next);
    }
    let jets = vec![(MarkedPoint::finite(0, int(0)), LocalSeries::new(0, c).unwrap())];
    let out = search(&jets, None).map_err(|e| e.to_string())?;
    ensure(out.function.is_none(), || "exp reported rational".into())?;
    ensure(out.degrees_tried == (0..=9).collect::<Vec<_>>(), || format!("tried {:?}", out.degrees_tried))?;
    Ok(format!("{trials} reconstructions, exp not_found for d <= 9"))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("Borel-Dwork end-to-end", borel_dwork),
        ("Polya threshold", polya_threshold),
        ("Green-function suite", green_suite),
        ("product-formula gauge invariance", gauge_invariance),
        ("game suite", game_suite),
        ("rational strategy lemma", rational_strategy_lemma),
        ("scheduler", scheduler_suite),
        ("filtration", filtration_suite),
        ("oracle", oracle_suite),
    ];
    let mut unexpected = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        match run() {
            Ok(detail) => println!("criterion {id} PASS  {name}: {detail}"),
            Err(why) => {
                let known = KNOWN_UNATTAINABLE.contains(&id);
                if !known {
                    unexpected += 1;
                }
                let tag = if known { " (known unattainable)" } else { "" };
                println!("criterion {id} FAIL{tag}  {name}: {why}");
            }
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} acceptance criteria failed");
        std::process::exit(1);
    }
}
