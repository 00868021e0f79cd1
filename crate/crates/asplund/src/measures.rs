//! The measure layer: the moment measure `μ_g = (∇ψ)_♯(g dx)` with
//! `ψ = −log g`, the surface measure `ν_g = (n_{K_g})_♯(g·H^{n−1}|_{∂K_g})`
//! on polytopal supports, quadrature of support functions against both, and
//! the checker for the three moment-measure conditions (positive finite
//! mass, zero barycenter with finite first moment, no concentration on a
//! lower-dimensional subspace).

use crate::analytic::Polytope;
use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, Infinity};
use crate::grid::GridSpec;
use crate::logconcave::{support_shape, FnRepr, LogConcaveFn, SupportShape};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// A weighted atom in Euclidean space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Atom {
    pub location: Vec<f64>,
    pub weight: f64,
}

/// Finitely many weighted atoms in `ℝⁿ` (weights strictly positive; the
/// first moment of a finite atom list is automatically finite).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl PointMeasure {
    pub fn new(atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("a measure needs atoms".into()));
        }
        let dim = atoms[0].0.len();
        let mut out = Vec::with_capacity(atoms.len());
        for (location, weight) in atoms {
            if location.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: location.len(),
                });
            }
            if !weight.is_finite() || weight <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "weights must be positive and finite, got {weight}"
                )));
            }
            out.push(Atom { location, weight });
        }
        Ok(PointMeasure { dim, atoms: out })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// `Σ w·|x|`.
    pub fn first_moment(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * norm(&a.location))
            .sum()
    }

    /// `Σ w·x` (unnormalized barycenter).
    pub fn weighted_sum(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.dim];
        for a in &self.atoms {
            for (si, xi) in s.iter_mut().zip(&a.location) {
                *si += a.weight * xi;
            }
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        match self.dim {
            1 => writeln!(w, "x,weight")?,
            _ => writeln!(w, "x1,x2,weight")?,
        }
        for a in &self.atoms {
            for c in &a.location {
                write!(w, "{c},")?;
            }
            writeln!(w, "{}", a.weight)?;
        }
        Ok(())
    }
}

/// A weighted atom on the unit sphere.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SphereAtom {
    pub direction: Vec<f64>,
    pub weight: f64,
}

/// Finitely many weighted atoms on `S^{n−1}` (directions unit, weights
/// strictly positive). The empty measure is allowed: it is `ν_g` of every
/// essentially continuous `g`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SphereMeasure {
    dim: usize,
    atoms: Vec<SphereAtom>,
}

impl SphereMeasure {
    pub fn new(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let mut out = Vec::with_capacity(atoms.len());
        for (direction, weight) in atoms {
            if direction.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: direction.len(),
                });
            }
            let n = norm(&direction);
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "directions must be unit vectors, |θ| = {n}"
                )));
            }
            if !weight.is_finite() || weight <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "weights must be positive and finite, got {weight}"
                )));
            }
            out.push(SphereAtom {
                direction: direction.iter().map(|v| v / n).collect(),
                weight,
            });
        }
        Ok(SphereMeasure { dim, atoms: out })
    }

    pub fn empty(dim: usize) -> SphereMeasure {
        SphereMeasure {
            dim,
            atoms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[SphereAtom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// The weight carried at a direction (summing atoms within an angular
    /// tolerance), for weight-recovery comparisons.
    pub fn weight_at(&self, direction: &[f64], tol: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| {
                let dot: f64 = a.direction.iter().zip(direction).map(|(u, v)| u * v).sum();
                dot >= 1.0 - tol
            })
            .map(|a| a.weight)
            .sum()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        match self.dim {
            1 => writeln!(w, "direction,weight")?,
            _ => writeln!(w, "theta1,theta2,weight")?,
        }
        for a in &self.atoms {
            for c in &a.direction {
                write!(w, "{c},")?;
            }
            writeln!(w, "{}", a.weight)?;
        }
        Ok(())
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// The moment measure `μ_g = (∇ψ)_♯(g dx)` rendered on a grid: one atom per
/// cell whose corners are all finite (the stencil never crosses `∂K_g`) and
/// whose density clears the mass floor `1e−12·max g`. The atom sits at the
/// central-difference gradient of ψ at the cell center and carries
/// `g(center)·|cell|`, so the total mass tracks `∫g`.
pub fn moment_measure(g: &LogConcaveFn, grid: &GridSpec) -> Result<PointMeasure> {
    let psi = g.phi_on(grid)?;
    let p = grid.points_per_axis();
    let min_psi = psi
        .min_finite()
        .ok_or_else(|| Error::Improper("ψ has no finite nodes".into()))?;
    let mut atoms: Vec<(Vec<f64>, f64)> = Vec::new();
    match grid.dim() {
        1 => {
            let h = grid.spacing(0);
            for i in 0..p - 1 {
                let (a, b) = (psi.value(i), psi.value(i + 1));
                let (Finite(a), Finite(b)) = (a, b) else {
                    continue;
                };
                let density = (-(0.5 * (a + b) - min_psi)).exp();
                if density <= 1e-12 {
                    continue;
                }
                let gradient = (b - a) / h;
                atoms.push((vec![gradient], density * (-min_psi).exp() * h));
            }
        }
        _ => {
            let (h0, h1) = (grid.spacing(0), grid.spacing(1));
            for i in 0..p - 1 {
                for j in 0..p - 1 {
                    let v = |a: usize, b: usize| psi.value(a * p + b);
                    let (Finite(c00), Finite(c10), Finite(c01), Finite(c11)) =
                        (v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1))
                    else {
                        continue;
                    };
                    let mean = 0.25 * (c00 + c10 + c01 + c11);
                    let density = (-(mean - min_psi)).exp();
                    if density <= 1e-12 {
                        continue;
                    }
                    let g0 = (c10 + c11 - c00 - c01) / (2.0 * h0);
                    let g1 = (c01 + c11 - c00 - c10) / (2.0 * h1);
                    atoms.push((vec![g0, g1], density * (-min_psi).exp() * h0 * h1));
                }
            }
        }
    }
    if atoms.is_empty() {
        return Err(Error::Improper(
            "g vanishes on the whole grid window".into(),
        ));
    }
    PointMeasure::new(atoms)
}

// Gauss–Legendre nodes and weights on [-1, 1], 5 points.
const GL5: [(f64, f64); 5] = [
    (-0.906179845938664, 0.23692688505618908),
    (-0.5384693101056831, 0.47862867049936647),
    (0.0, 0.5688888888888889),
    (0.5384693101056831, 0.47862867049936647),
    (0.906179845938664, 0.23692688505618908),
];

/// The surface measure `ν_g` for g with polytopal support and analytic
/// density: one atom per facet, direction the outer normal, weight the 1-D
/// Gauss–Legendre quadrature of g along the facet (`edge_quadrature`
/// panels). Full supports produce the empty measure; non-polytopal
/// boundaries are outside the exact path.
pub fn surface_measure(g: &LogConcaveFn, edge_quadrature: usize) -> Result<SphereMeasure> {
    let FnRepr::PhiAnalytic(spec) = g.repr() else {
        return Err(Error::UnsupportedBoundary(
            "the exact surface-measure path needs an analytic φ".into(),
        ));
    };
    let shape = support_shape(spec).ok_or_else(|| {
        Error::UnsupportedBoundary("structural support not resolved for this φ".into())
    })?;
    let polytope = match shape {
        SupportShape::Full => return Ok(SphereMeasure::empty(g.dim())),
        SupportShape::Polytope(p) => p,
    };
    let panels = edge_quadrature.max(1);
    match polytope {
        Polytope::Interval { a, b } => {
            if a == b {
                return Err(Error::UnsupportedBoundary(
                    "degenerate support has no 0-dimensional surface measure".into(),
                ));
            }
            let g_at = |x: f64| -> Result<f64> {
                Ok(match spec.evaluate(&[x])? {
                    Finite(v) => (-v).exp(),
                    Infinity => 0.0,
                })
            };
            let atoms = vec![(vec![-1.0], g_at(a)?), (vec![1.0], g_at(b)?)]
                .into_iter()
                .filter(|(_, w)| *w > 0.0)
                .collect();
            SphereMeasure::new(1, atoms)
        }
        Polytope::Polygon { vertices } => {
            if vertices.len() < 3 {
                return Err(Error::UnsupportedBoundary(
                    "degenerate polygon support is outside the exact path".into(),
                ));
            }
            let n = vertices.len();
            let mut atoms = Vec::with_capacity(n);
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                let len = ex.hypot(ey);
                let normal = vec![ey / len, -ex / len];
                let mut weight = 0.0;
                for panel in 0..panels {
                    let t0 = panel as f64 / panels as f64;
                    let t1 = (panel + 1) as f64 / panels as f64;
                    for (node, w) in GL5 {
                        let t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * node;
                        let x = [a[0] + t * ex, a[1] + t * ey];
                        let gval = match spec.evaluate(&x)? {
                            Finite(v) => (-v).exp(),
                            Infinity => 0.0,
                        };
                        weight += w * gval * 0.5 * (t1 - t0) * len;
                    }
                }
                if weight > 0.0 {
                    atoms.push((normal, weight));
                }
            }
            SphereMeasure::new(2, atoms)
        }
    }
}

/// `Σ w·h(x)` over the atoms of a point measure; `+∞` as soon as an atom
/// with positive weight meets an infinite value of `h`.
pub fn integrate_against_point<F>(mut h: F, mu: &PointMeasure) -> Result<ExtReal>
where
    F: FnMut(&[f64]) -> Result<ExtReal>,
{
    let mut sum = 0.0;
    for a in &mu.atoms {
        match h(&a.location)? {
            Finite(v) => sum += a.weight * v,
            Infinity => return Ok(Infinity),
        }
    }
    Ok(Finite(sum))
}

/// `Σ w·h(θ)` over the atoms of a sphere measure, same `+∞` convention.
pub fn integrate_against_sphere<F>(mut h: F, nu: &SphereMeasure) -> Result<ExtReal>
where
    F: FnMut(&[f64]) -> Result<ExtReal>,
{
    let mut sum = 0.0;
    for a in &nu.atoms {
        match h(&a.direction)? {
            Finite(v) => sum += a.weight * v,
            Infinity => return Ok(Infinity),
        }
    }
    Ok(Finite(sum))
}

/// Tolerances of [`minkowski_check`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MinkowskiTolerances {
    /// `|Σ w·x| ≤ centered_rel · Σ w·|x|`.
    pub centered_rel: f64,
    /// smallest/largest singular-value ratio of the weight-normalized atom
    /// matrix must exceed this
    pub sv_ratio: f64,
    /// an atom sits on a candidate hyperplane when its offset is below
    /// `hyperplane_offset_rel · scale`
    pub hyperplane_offset_rel: f64,
    /// mass off every candidate hyperplane must exceed
    /// `hyperplane_mass_rel · mass`
    pub hyperplane_mass_rel: f64,
}

impl Default for MinkowskiTolerances {
    fn default() -> Self {
        MinkowskiTolerances {
            centered_rel: 1e-2,
            sv_ratio: 1e-6,
            hyperplane_offset_rel: 1e-9,
            hyperplane_mass_rel: 1e-9,
        }
    }
}

/// Report of the three moment-measure conditions. A failed condition is a
/// verdict, not an error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinkowskiReport {
    pub mass_ok: bool,
    pub centered_ok: bool,
    pub full_dim_ok: bool,
    pub mass: f64,
    pub first_moment: f64,
    pub barycenter_norm: f64,
    pub sv_ratio: f64,
}

/// Check the conditions characterizing moment measures: positive finite
/// mass; zero barycenter (relative to the first moment); and full
/// dimensionality, meaning the smallest singular value of the
/// weight-normalized atom matrix clears `sv_ratio` and no candidate
/// hyperplane (spanned by the singular directions) carries all the mass.
pub fn minkowski_check(mu: &PointMeasure, tol: &MinkowskiTolerances) -> MinkowskiReport {
    let mass = mu.total_mass();
    let first_moment = mu.first_moment();
    let bary = mu.weighted_sum();
    let barycenter_norm = norm(&bary);

    let mass_ok = mass > 0.0 && mass.is_finite();
    let centered_ok = barycenter_norm <= tol.centered_rel * first_moment.max(f64::MIN_POSITIVE);

    let scale = mu
        .atoms
        .iter()
        .map(|a| norm(&a.location))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);

    // second-moment matrix of the weight-normalized, scale-normalized atoms
    let dim = mu.dim();
    let mut m = [[0.0_f64; 2]; 2];
    #[allow(clippy::needless_range_loop)]
    for a in &mu.atoms {
        let w = a.weight / mass;
        for i in 0..dim {
            for j in 0..dim {
                m[i][j] += w * (a.location[i] / scale) * (a.location[j] / scale);
            }
        }
    }
    let (eigs, vecs) = match dim {
        1 => ([m[0][0], m[0][0]], [[1.0, 0.0], [1.0, 0.0]]),
        _ => sym_eigen_2x2(m),
    };
    let (lo, hi) = (eigs[0].min(eigs[1]).max(0.0), eigs[0].max(eigs[1]).max(0.0));
    let sv_ratio = if hi > 0.0 { (lo / hi).sqrt() } else { 0.0 };

    let mut full_dim_ok = if dim == 1 {
        // the only proper subspace is {0}
        let off: f64 = mu
            .atoms
            .iter()
            .filter(|a| a.location[0].abs() > tol.hyperplane_offset_rel * scale)
            .map(|a| a.weight)
            .sum();
        off > tol.hyperplane_mass_rel * mass
    } else {
        sv_ratio > tol.sv_ratio
    };
    if dim == 2 && full_dim_ok {
        for u in vecs {
            let off: f64 = mu
                .atoms
                .iter()
                .filter(|a| {
                    (u[0] * a.location[0] + u[1] * a.location[1]).abs()
                        > tol.hyperplane_offset_rel * scale
                })
                .map(|a| a.weight)
                .sum();
            if off <= tol.hyperplane_mass_rel * mass {
                full_dim_ok = false;
            }
        }
    }

    MinkowskiReport {
        mass_ok,
        centered_ok,
        full_dim_ok,
        mass,
        first_moment,
        barycenter_norm,
        sv_ratio,
    }
}

/// Eigenvalues and (unit) eigenvectors of a symmetric 2×2 matrix.
fn sym_eigen_2x2(m: [[f64; 2]; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let (a, b, c) = (m[0][0], m[0][1], m[1][1]);
    let tr = a + c;
    let det = a * c - b * b;
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let l1 = tr / 2.0 + disc;
    let l2 = tr / 2.0 - disc;
    let v1 = if b.abs() > 1e-300 {
        let v = [l1 - c, b];
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    } else if a >= c {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let v2 = [-v1[1], v1[0]];
    ([l1, l2], [v1, v2])
}
