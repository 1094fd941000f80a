//! Archimedean Green functions with closed forms.
//!
//! Every supported simply connected domain comes with an explicit conformal
//! map `zeta` onto the unit disk. The Green function with pole `w` is then
//! `log |(1 - conj(zeta(w)) zeta(z)) / (zeta(z) - zeta(w))|`, and the Robin
//! constant in the canonical local parameter is read off the derivative of
//! `zeta` at the pole (or its decay rate at infinity).

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal_data::{Coordinate, MarkedPoint, PointId};
use crate::rational::{serde_rational, to_f64, ExactRational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArchDomain {
    Disk {
        #[serde(with = "serde_rational")]
        center: ExactRational,
        #[serde(with = "serde_rational")]
        radius: ExactRational,
    },
    /// `|z - center| > radius`, together with the point at infinity.
    ExteriorDisk {
        #[serde(with = "serde_rational")]
        center: ExactRational,
        #[serde(with = "serde_rational")]
        radius: ExactRational,
    },
    /// The projective line minus the real segment `[a, b]`.
    IntervalComplement {
        #[serde(with = "serde_rational")]
        a: ExactRational,
        #[serde(with = "serde_rational")]
        b: ExactRational,
    },
    Union { components: Vec<ArchDomain> },
}

/// A point of the closed projective line used for evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalPoint {
    Finite(Complex64),
    Infinity,
}

impl From<&Coordinate> for EvalPoint {
    fn from(c: &Coordinate) -> Self {
        match c {
            Coordinate::Finite(x) => EvalPoint::Finite(Complex64::new(to_f64(x), 0.0)),
            Coordinate::Infinity => EvalPoint::Infinity,
        }
    }
}

impl From<Complex64> for EvalPoint {
    fn from(z: Complex64) -> Self {
        EvalPoint::Finite(z)
    }
}

/// Float view of a single (non-union) component.
#[derive(Debug, Clone, Copy)]
enum Shape {
    Disk { c: f64, r: f64 },
    Exterior { c: f64, r: f64 },
    Slit { a: f64, b: f64 },
}

impl Shape {
    fn contains_closure(&self, z: EvalPoint) -> bool {
        match (*self, z) {
            (Shape::Disk { .. }, EvalPoint::Infinity) => false,
            (Shape::Disk { c, r }, EvalPoint::Finite(z)) => (z - c).norm() <= r,
            (Shape::Exterior { .. }, EvalPoint::Infinity) => true,
            (Shape::Exterior { c, r }, EvalPoint::Finite(z)) => (z - c).norm() >= r,
            (Shape::Slit { .. }, _) => true,
        }
    }

    /// Joukowski inverse: `phi + sqrt(phi^2 - 1)` with modulus at least one.
    fn joukowski(a: f64, b: f64, z: Complex64) -> Complex64 {
        let phi = (2.0 * z - a - b) / (b - a);
        let s = (phi - 1.0).sqrt() * (phi + 1.0).sqrt();
        let j = phi + s;
        if j.norm() >= 1.0 {
            j
        } else {
            phi - s
        }
    }

    fn zeta(&self, z: EvalPoint) -> Complex64 {
        match (*self, z) {
            (Shape::Disk { c, r }, EvalPoint::Finite(z)) => (z - c) / r,
            (Shape::Disk { .. }, EvalPoint::Infinity) => unreachable!("infinity is outside a disk"),
            (Shape::Exterior { .. } | Shape::Slit { .. }, EvalPoint::Infinity) => Complex64::zero(),
            (Shape::Exterior { c, r }, EvalPoint::Finite(z)) => r / (z - c),
            (Shape::Slit { a, b }, EvalPoint::Finite(z)) => Shape::joukowski(a, b, z).inv(),
        }
    }

    fn green(&self, pole: EvalPoint, z: EvalPoint) -> f64 {
        if !self.contains_closure(z) {
            return 0.0;
        }
        let zw = self.zeta(pole);
        let zz = self.zeta(z);
        let g = ((1.0 - zw.conj() * zz) / (zz - zw)).norm().ln();
        g.max(0.0)
    }

    fn robin(&self, pole: EvalPoint) -> f64 {
        match (*self, pole) {
            (Shape::Disk { .. }, EvalPoint::Infinity) => unreachable!("infinity is outside a disk"),
            (Shape::Exterior { r, .. }, EvalPoint::Infinity) => -r.ln(),
            (Shape::Slit { a, b }, EvalPoint::Infinity) => (4.0 / (b - a)).ln(),
            (_, EvalPoint::Finite(w)) => {
                let zw = self.zeta(pole);
                let deriv = match *self {
                    Shape::Disk { r, .. } => Complex64::new(1.0 / r, 0.0),
                    Shape::Exterior { c, r } => -r / ((w - c) * (w - c)),
                    Shape::Slit { a, b } => {
                        let phi = (2.0 * w - a - b) / (b - a);
                        let j = Shape::joukowski(a, b, w);
                        -(2.0 / (b - a)) / (j * (j - phi))
                    }
                };
                (1.0 - zw.norm_sqr()).ln() - deriv.norm().ln()
            }
        }
    }

    /// Points where the closed-form expression itself is singular.
    fn singularities(&self, pole: EvalPoint) -> Vec<Complex64> {
        let mut out = Vec::new();
        if let EvalPoint::Finite(w) = pole {
            out.push(w);
            match *self {
                Shape::Disk { c, r } | Shape::Exterior { c, r } if (w - c).norm() > 0.0 => {
                    out.push(c + r * r / (w - c).conj());
                }
                _ => {}
            }
        }
        out
    }
}

impl ArchDomain {
    pub fn disk(center: ExactRational, radius: ExactRational) -> Self {
        ArchDomain::Disk { center, radius }
    }

    pub fn exterior_disk(center: ExactRational, radius: ExactRational) -> Self {
        ArchDomain::ExteriorDisk { center, radius }
    }

    pub fn interval_complement(a: ExactRational, b: ExactRational) -> Self {
        ArchDomain::IntervalComplement { a, b }
    }

    fn shape(&self) -> Shape {
        match self {
            ArchDomain::Disk { center, radius } => Shape::Disk { c: to_f64(center), r: to_f64(radius) },
            ArchDomain::ExteriorDisk { center, radius } => Shape::Exterior { c: to_f64(center), r: to_f64(radius) },
            ArchDomain::IntervalComplement { a, b } => Shape::Slit { a: to_f64(a), b: to_f64(b) },
            ArchDomain::Union { .. } => unreachable!("unions have no single shape"),
        }
    }

    /// Components of the domain; a simple domain is its own single component.
    pub fn components(&self) -> Vec<&ArchDomain> {
        match self {
            ArchDomain::Union { components } => components.iter().collect(),
            simple => vec![simple],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ArchDomain::Disk { radius, .. } | ArchDomain::ExteriorDisk { radius, .. } => {
                if !radius.is_positive() {
                    return Err(Error::InvalidDomain("radius must be positive".into()));
                }
            }
            ArchDomain::IntervalComplement { a, b } => {
                if a >= b {
                    return Err(Error::InvalidDomain("interval complement needs a < b".into()));
                }
            }
            ArchDomain::Union { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidDomain("empty union".into()));
                }
                for c in components {
                    if matches!(c, ArchDomain::Union { .. }) {
                        return Err(Error::InvalidDomain("nested unions are not supported".into()));
                    }
                    c.validate()?;
                }
                for (i, x) in components.iter().enumerate() {
                    for y in &components[i + 1..] {
                        if !closures_disjoint(x, y) {
                            return Err(Error::InvalidDomain("union components must have disjoint closures".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Exact test that `pole` lies in the open component.
    fn strictly_contains(&self, pole: &Coordinate) -> bool {
        match (self, pole) {
            (ArchDomain::Disk { .. }, Coordinate::Infinity) => false,
            (ArchDomain::Disk { center, radius }, Coordinate::Finite(w)) => (w - center).abs() < *radius,
            (ArchDomain::ExteriorDisk { .. } | ArchDomain::IntervalComplement { .. }, Coordinate::Infinity) => true,
            (ArchDomain::ExteriorDisk { center, radius }, Coordinate::Finite(w)) => (w - center).abs() > *radius,
            (ArchDomain::IntervalComplement { a, b }, Coordinate::Finite(w)) => w < a || w > b,
            (ArchDomain::Union { components }, _) => components.iter().any(|c| c.strictly_contains(pole)),
        }
    }

    /// Index of the component strictly containing `pole`.
    pub fn component_of(&self, pole: &Coordinate) -> Result<usize> {
        self.components()
            .iter()
            .position(|c| c.strictly_contains(pole))
            .ok_or_else(|| Error::PoleNotInside(pole.to_string()))
    }
}

fn closures_disjoint(x: &ArchDomain, y: &ArchDomain) -> bool {
    use ArchDomain::*;
    match (x, y) {
        (Disk { center: c1, radius: r1 }, Disk { center: c2, radius: r2 }) => (c1 - c2).abs() > r1 + r2,
        (Disk { center: c1, radius: r1 }, ExteriorDisk { center: c2, radius: r2 })
        | (ExteriorDisk { center: c2, radius: r2 }, Disk { center: c1, radius: r1 }) => (c1 - c2).abs() + r1 < *r2,
        // Both remaining kinds contain infinity or the whole line minus a slit.
        _ => false,
    }
}

/// Green function `g_{domain, pole}(z)`; zero outside the pole's component.
pub fn green(domain: &ArchDomain, pole: &Coordinate, z: EvalPoint) -> Result<f64> {
    domain.validate()?;
    let k = domain.component_of(pole)?;
    green_in_component(domain.components()[k], pole, z)
}

fn green_in_component(component: &ArchDomain, pole: &Coordinate, z: EvalPoint) -> Result<f64> {
    let w = EvalPoint::from(pole);
    if w == z {
        return Err(Error::AtPole);
    }
    Ok(component.shape().green(w, z))
}

/// `lim_{z -> pole} g(z) + log |t(z)|` with `t = z - p`, or `t = 1/z` at infinity.
pub fn robin_constant(domain: &ArchDomain, pole: &Coordinate) -> Result<f64> {
    domain.validate()?;
    let k = domain.component_of(pole)?;
    Ok(domain.components()[k].shape().robin(EvalPoint::from(pole)))
}

/// Archimedean domain together with the component hosting each marked point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchDomainAssignment {
    pub domain: ArchDomain,
    #[serde(default)]
    pub placement: BTreeMap<PointId, usize>,
}

impl ArchDomainAssignment {
    pub fn new(domain: ArchDomain) -> Self {
        ArchDomainAssignment { domain, placement: BTreeMap::new() }
    }

    /// Checks the domain and fills in the placement of every point, inferring
    /// missing entries from membership.
    pub fn validated(mut self, points: &[MarkedPoint]) -> Result<Self> {
        self.domain.validate()?;
        let components = self.domain.components();
        for id in self.placement.keys() {
            if !points.iter().any(|p| p.id == *id) {
                return Err(Error::UnknownPoint(*id));
            }
        }
        for p in points {
            let k = match self.placement.get(&p.id) {
                Some(&k) => k,
                None => self.domain.component_of(&p.coordinate)?,
            };
            let comp = components.get(k).ok_or_else(|| {
                Error::field("placement", format!("point {} assigned to missing component {k}", p.id))
            })?;
            if !comp.strictly_contains(&p.coordinate) {
                return Err(Error::PoleNotInside(format!("point {} ({}) in component {k}", p.id, p.coordinate)));
            }
            self.placement.insert(p.id, k);
        }
        Ok(self)
    }
}

/// The matrix `G^v` at the real place; diagonal shifted by `-log |a_i|`.
pub fn arch_matrix(
    assignment: &ArchDomainAssignment,
    points: &[MarkedPoint],
    scalings: &[ExactRational],
) -> Result<Vec<Vec<f64>>> {
    let assignment = assignment.clone().validated(points)?;
    let components = assignment.domain.components();
    let n = points.len();
    let mut m = vec![vec![0.0; n]; n];
    for (i, pi) in points.iter().enumerate() {
        let comp = components[assignment.placement[&pi.id]];
        for (j, pj) in points.iter().enumerate() {
            m[i][j] = if i == j {
                let a = scalings.get(i).map_or(1.0, |a| to_f64(&a.abs()));
                comp.shape().robin(EvalPoint::from(&pi.coordinate)) - a.ln()
            } else if assignment.placement[&pj.id] != assignment.placement[&pi.id] {
                0.0
            } else {
                green_in_component(comp, &pi.coordinate, EvalPoint::from(&pj.coordinate))?
            };
        }
    }
    Ok(m)
}

/// Numerical check of the closed forms on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenDiagnostics {
    pub step: f64,
    pub exclusion_radius: f64,
    pub laplacian_residual: f64,
    pub laplacian_samples: usize,
    pub boundary_residual: f64,
    pub boundary_samples: usize,
    pub min_interior: f64,
    pub interior_samples: usize,
    pub passes: bool,
}

const LATTICE_POINTS: usize = 81;
const BOUNDARY_POINTS: usize = 64;

/// Applies the 5-point Laplacian with step `h` at a lattice of centres
/// covering the pole's component. Centres closer than
/// `(2 h^2 / tolerance)^(1/4)` to a singularity of the closed form are
/// skipped: there the discretisation error of a logarithm alone exceeds half
/// the tolerance.
pub fn validate_green(domain: &ArchDomain, pole: &Coordinate, h: f64, tolerance: f64) -> Result<GreenDiagnostics> {
    domain.validate()?;
    let k = domain.component_of(pole)?;
    let shape = domain.components()[k].shape();
    let w = EvalPoint::from(pole);
    let rho = (2.0 * h * h / tolerance).powf(0.25);
    let singular = shape.singularities(w);

    let (x0, x1, y0, y1) = match shape {
        Shape::Disk { c, r } => (c - r, c + r, -r, r),
        Shape::Exterior { c, r } => (c - 3.0 * r, c + 3.0 * r, -3.0 * r, 3.0 * r),
        Shape::Slit { a, b } => (a - (b - a), b + (b - a), -(b - a), b - a),
    };
    // Distance from a finite point to the boundary of the component.
    let boundary_distance = |z: Complex64| match shape {
        Shape::Disk { c, r } | Shape::Exterior { c, r } => ((z - c).norm() - r).abs(),
        Shape::Slit { a, b } => {
            let x = z.re.clamp(a, b);
            (z - Complex64::new(x, 0.0)).norm()
        }
    };

    let mut lap_max: f64 = 0.0;
    let mut lap_n = 0;
    let mut min_g = f64::INFINITY;
    let mut interior_n = 0;
    for ix in 0..LATTICE_POINTS {
        for iy in 0..LATTICE_POINTS {
            let fx = ix as f64 / (LATTICE_POINTS - 1) as f64;
            let fy = iy as f64 / (LATTICE_POINTS - 1) as f64;
            let z = Complex64::new(x0 + fx * (x1 - x0), y0 + fy * (y1 - y0));
            let zp = EvalPoint::Finite(z);
            let dist_b = boundary_distance(z);
            if !shape.contains_closure(zp) || dist_b == 0.0 || EvalPoint::Finite(z) == w {
                continue;
            }
            if let EvalPoint::Finite(pw) = w {
                if (z - pw).norm() < 1e-12 {
                    continue;
                }
            }
            let g = shape.green(w, zp);
            min_g = min_g.min(g);
            interior_n += 1;

            let far_from_singularities = singular.iter().all(|s| (z - s).norm() >= rho);
            let clear_of_boundary = match shape {
                Shape::Slit { .. } => dist_b >= rho,
                _ => dist_b > 1.5 * h,
            };
            if !(far_from_singularities && clear_of_boundary) {
                continue;
            }
            let at = |dx: f64, dy: f64| shape.green(w, EvalPoint::Finite(z + Complex64::new(dx, dy)));
            let lap = (at(h, 0.0) + at(-h, 0.0) + at(0.0, h) + at(0.0, -h) - 4.0 * g) / (h * h);
            lap_max = lap_max.max(lap.abs());
            lap_n += 1;
        }
    }

    let mut bnd_max: f64 = 0.0;
    for k in 0..BOUNDARY_POINTS {
        let s = k as f64 / BOUNDARY_POINTS as f64;
        let z = match shape {
            Shape::Disk { c, r } | Shape::Exterior { c, r } => {
                c + Complex64::from_polar(r, 2.0 * std::f64::consts::PI * s)
            }
            Shape::Slit { a, b } => Complex64::new(a + (b - a) * k as f64 / (BOUNDARY_POINTS - 1) as f64, 0.0),
        };
        if EvalPoint::Finite(z) == w {
            continue;
        }
        // Evaluate the closed form directly, without the outside-is-zero cut-off.
        let zw = shape.zeta(w);
        let zz = shape.zeta(EvalPoint::Finite(z));
        let g = ((1.0 - zw.conj() * zz) / (zz - zw)).norm().ln();
        bnd_max = bnd_max.max(g.abs());
    }

    if interior_n == 0 {
        min_g = 0.0;
    }
    Ok(GreenDiagnostics {
        step: h,
        exclusion_radius: rho,
        laplacian_residual: lap_max,
        laplacian_samples: lap_n,
        boundary_residual: bnd_max,
        boundary_samples: BOUNDARY_POINTS,
        min_interior: min_g,
        interior_samples: interior_n,
        passes: lap_max < tolerance && bnd_max <= 1e-8 && min_g >= 0.0,
    })
}
