//! Asymptotic behavior of convex functions: the recession function
//! `φ̄(θ) = lim_{λ→∞} φ(p + λθ)/λ`, the support body `K_f` with
//! `h_{K_f} = h̄_f`, Pasch–Hausdorff envelopes
//! `φ_k(x) = inf_y [φ(y) + k|x−y|]`, and the fast-growth constructions
//! used to stress integrability.
//!
//! The limit defining `φ̄` exists, is independent of the base point, and is
//! monotone in `λ` (the quotients increase to their supremum), which is why
//! the numeric estimator below may threshold dyadic quotients. For every
//! variant of the analytic family the recession value is also available in
//! closed form; the structural path is the default and the numeric path
//! backs the base-point-independence and uniformity checks.

use crate::analytic::AnalyticConvexSpec;
use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, Infinity};
use crate::grid::ConvexGridFunction;
use crate::logconcave::{support_shape, FnRepr, LogConcaveFn, SupportShape};
use crate::measures::PointMeasure;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Unit directions: the pair `{−1, +1}` in dimension 1, `m` equally spaced
/// angles on the circle in dimension 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionGrid {
    dim: usize,
    directions: Vec<Vec<f64>>,
}

impl DirectionGrid {
    pub fn pair() -> DirectionGrid {
        DirectionGrid {
            dim: 1,
            directions: vec![vec![-1.0], vec![1.0]],
        }
    }

    /// `m` equally spaced unit vectors starting at angle 0.
    pub fn circle(m: usize) -> DirectionGrid {
        let directions = (0..m)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                vec![th.cos(), th.sin()]
            })
            .collect();
        DirectionGrid { dim: 2, directions }
    }

    /// The default grid for a dimension (64 angles in the plane).
    pub fn default_for(dim: usize) -> DirectionGrid {
        match dim {
            1 => DirectionGrid::pair(),
            _ => DirectionGrid::circle(64),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn direction(&self, k: usize) -> &[f64] {
        &self.directions[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.directions.iter()
    }
}

/// Values of a 1-homogeneous limit function on a direction grid. Houses
/// both `φ̄` and `h_{K_f}`. We expose the 1-homogeneous extension through
/// [`RecessionFunction::evaluate`] for quadrature convenience.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecessionFunction {
    directions: DirectionGrid,
    values: Vec<ExtReal>,
}

impl RecessionFunction {
    pub fn new(directions: DirectionGrid, values: Vec<ExtReal>) -> Result<Self> {
        if directions.len() != values.len() {
            return Err(Error::InvalidParameter(
                "one value per direction required".into(),
            ));
        }
        Ok(RecessionFunction { directions, values })
    }

    pub fn directions(&self) -> &DirectionGrid {
        &self.directions
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn value(&self, k: usize) -> ExtReal {
        self.values[k]
    }

    /// Value of the 1-homogeneous extension at an arbitrary nonzero vector:
    /// exact in dimension 1, angular-linear interpolation between adjacent
    /// grid directions in dimension 2.
    pub fn evaluate(&self, x: &[f64]) -> Result<ExtReal> {
        if x.len() != self.directions.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.directions.dim(),
                got: x.len(),
            });
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return Ok(Finite(0.0));
        }
        match self.directions.dim() {
            1 => {
                let k = if x[0] < 0.0 { 0 } else { 1 };
                Ok(self.values[k].scale(r))
            }
            _ => {
                let m = self.directions.len();
                let tau = 2.0 * std::f64::consts::PI;
                let angle = x[1].atan2(x[0]).rem_euclid(tau);
                let step = tau / m as f64;
                let k = (angle / step).floor() as usize % m;
                let t = (angle - k as f64 * step) / step;
                match (self.values[k], self.values[(k + 1) % m]) {
                    (Finite(a), Finite(b)) => Ok(Finite(r * (a + t * (b - a)))),
                    (Infinity, _) | (_, Infinity) => Ok(Infinity),
                }
            }
        }
    }

    /// Largest violation of the discrete sublinearity test
    /// `2 cos(Δθ)·v_i ≤ v_{i−1} + v_{i+1}` over consecutive direction
    /// triples; `0` for data that extends to a convex 1-homogeneous
    /// function. Infinite neighbors impose no constraint.
    pub fn sublinearity_defect(&self) -> f64 {
        let m = self.values.len();
        if self.directions.dim() == 1 || m < 3 {
            return 0.0;
        }
        let step = 2.0 * std::f64::consts::PI / m as f64;
        let c = 2.0 * step.cos();
        let mut worst = 0.0_f64;
        for i in 0..m {
            let (a, b, d) = (
                self.values[(i + m - 1) % m],
                self.values[i],
                self.values[(i + 1) % m],
            );
            match (a, b, d) {
                (Finite(a), Finite(b), Finite(d)) => worst = worst.max(c * b - (a + d)),
                (Finite(_), Infinity, Finite(_)) => return f64::INFINITY,
                _ => {}
            }
        }
        worst
    }

    /// CSV rows `angle,value` (dimension 2) or `direction,value`
    /// (dimension 1, direction ±1), `inf` for infinite values.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        match self.directions.dim() {
            1 => {
                writeln!(w, "direction,value")?;
                for (d, v) in self.directions.iter().zip(&self.values) {
                    writeln!(w, "{},{}", d[0], v)?;
                }
            }
            _ => {
                writeln!(w, "angle,value")?;
                let m = self.directions.len();
                for (k, v) in self.values.iter().enumerate() {
                    let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                    writeln!(w, "{th},{v}")?;
                }
            }
        }
        Ok(())
    }
}

/// Exact recession value of an analytic spec in direction `theta`
/// (closed-form recursion over the family).
pub fn recession_value_spec(spec: &AnalyticConvexSpec, theta: &[f64]) -> Result<ExtReal> {
    use AnalyticConvexSpec as S;
    Ok(match spec {
        S::Quadratic { scale } => {
            if *scale > 0.0 {
                Infinity
            } else {
                Finite(0.0)
            }
        }
        S::NormMultiple { c } => Finite(*c),
        S::Affine { slope, offset: _ } => {
            if slope.len() != theta.len() {
                return Err(Error::DimensionMismatch {
                    expected: slope.len(),
                    got: theta.len(),
                });
            }
            Finite(slope.iter().zip(theta).map(|(s, t)| s * t).sum())
        }
        // compact body: the recession cone is {0}, so every unit direction
        // leaves the domain
        S::IndicatorPolytope { .. } => Infinity,
        S::SupportOfPolytope { polytope } => Finite(polytope.support(theta)),
        S::RhoA { a } => Finite(a * a),
        S::Huber { k, .. } => Finite(*k),
        S::ShiftedCone { polytope, .. } => Finite(polytope.support(theta).max(0.0)),
        S::RadialPl { knots } => {
            let n = knots.len();
            if n == 1 {
                Finite(0.0)
            } else {
                let (r0, v0) = knots[n - 2];
                let (r1, v1) = knots[n - 1];
                Finite((v1 - v0) / (r1 - r0))
            }
        }
        S::Sum { terms } => terms.iter().try_fold(Finite(0.0), |acc, t| {
            Ok::<_, Error>(acc + recession_value_spec(t, theta)?)
        })?,
        S::Max { terms } => {
            let mut best: Option<ExtReal> = None;
            for t in terms {
                let v = recession_value_spec(t, theta)?;
                best = Some(best.map_or(v, |b| b.max(v)));
            }
            best.ok_or_else(|| Error::InvalidParameter("max over empty term list".into()))?
        }
        S::Constant { .. } => Finite(0.0),
        S::Scaled { factor, inner } => recession_value_spec(inner, theta)?.scale(*factor),
        S::Dilated { inner, .. } => recession_value_spec(inner, theta)?,
        S::Translated { inner, .. } => recession_value_spec(inner, theta)?,
    })
}

/// Whether φ is finite on all of space (membership in `Cvx^F`).
pub fn everywhere_finite(spec: &AnalyticConvexSpec) -> bool {
    use AnalyticConvexSpec as S;
    match spec {
        S::IndicatorPolytope { .. } => false,
        S::Scaled { inner, .. } | S::Dilated { inner, .. } | S::Translated { inner, .. } => {
            everywhere_finite(inner)
        }
        S::Sum { terms } | S::Max { terms } => terms.iter().all(everywhere_finite),
        _ => true,
    }
}

/// Whether the domain of φ is bounded (an indicator of a compact polytope
/// appears as a factor).
pub fn domain_is_bounded(spec: &AnalyticConvexSpec) -> bool {
    use AnalyticConvexSpec as S;
    match spec {
        S::IndicatorPolytope { .. } => true,
        S::Scaled { inner, .. } | S::Dilated { inner, .. } | S::Translated { inner, .. } => {
            domain_is_bounded(inner)
        }
        S::Sum { terms } | S::Max { terms } => terms.iter().any(domain_is_bounded),
        _ => false,
    }
}

/// Dense direction set for scanning extremes in classification.
pub fn scan_directions(dim: usize, m: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![-1.0], vec![1.0]],
        _ => (0..m)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
    }
}

/// How to compute a recession function.
#[derive(Clone, Debug, Default)]
pub enum RecessionMethod {
    /// Closed-form recursion over the analytic family (exact).
    #[default]
    Structural,
    /// Monotone dyadic quotients `(φ(p+λθ)−φ(p))/λ`, `λ ∈ {2^0..2^20}`,
    /// with convergence detection and a geometric tail correction. The
    /// base point defaults to a structurally found finite point.
    Numeric { base_point: Option<Vec<f64>> },
}

/// The recession function `φ̄` of an analytic convex function on a
/// direction grid. The value may be `+∞`.
pub fn recession_function(
    spec: &AnalyticConvexSpec,
    dirs: &DirectionGrid,
    method: &RecessionMethod,
) -> Result<RecessionFunction> {
    if let Some(d) = spec.dim() {
        if d != dirs.dim() {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: dirs.dim(),
            });
        }
    }
    let values: Vec<ExtReal> = match method {
        RecessionMethod::Structural => dirs
            .iter()
            .map(|th| recession_value_spec(spec, th))
            .collect::<Result<_>>()?,
        RecessionMethod::Numeric { base_point } => {
            let p = match base_point {
                Some(p) => p.clone(),
                None => spec
                    .finite_point(dirs.dim())
                    .ok_or_else(|| Error::Improper("no finite base point found".into()))?,
            };
            let fp = spec
                .evaluate(&p)?
                .finite()
                .ok_or_else(|| Error::Improper("base point is not finite".into()))?;
            dirs.iter()
                .map(|th| numeric_recession(spec, &p, fp, th))
                .collect::<Result<_>>()?
        }
    };
    RecessionFunction::new(dirs.clone(), values)
}

fn numeric_recession(
    spec: &AnalyticConvexSpec,
    p: &[f64],
    phi_p: f64,
    theta: &[f64],
) -> Result<ExtReal> {
    let mut qs: Vec<f64> = Vec::with_capacity(21);
    for j in 0..=20 {
        let lam = (1u64 << j) as f64;
        let x: Vec<f64> = p.iter().zip(theta).map(|(pi, ti)| pi + lam * ti).collect();
        let q = match spec.evaluate(&x)? {
            // the quotients are monotone, so one infinite value settles it
            Infinity => return Ok(Infinity),
            Finite(v) => (v - phi_p) / lam,
        };
        if q > 1e12 {
            return Ok(Infinity);
        }
        qs.push(q);
    }
    // classify on the tail only: the quotients are monotone, so an early
    // plateau (φ still on a flat piece) says nothing about the limit
    let n = qs.len();
    let d1 = qs[n - 1] - qs[n - 2];
    if d1.abs() <= 1e-9 * qs[n - 1].abs().max(1.0) {
        return Ok(Finite(qs[n - 1]));
    }
    // correct the geometric tail when the increments halve (the signature
    // of a linear-plus-constant tail)
    let d0 = qs[n - 2] - qs[n - 3];
    if d0 > 0.0 {
        let r = d1 / d0;
        if (0.25..0.75).contains(&r) {
            return Ok(Finite(qs[n - 1] + d1 * r / (1.0 - r)));
        }
    }
    Ok(Finite(qs[n - 1]))
}

/// `h_{K_f} = h̄_{h_f}` on a direction grid: the support function of
/// `K_f = closure{f > 0}`. Exact vertex maxima for polytopal supports,
/// `+∞` in every direction for full supports, hull maxima for grid φ.
pub fn support_body_function(f: &LogConcaveFn, dirs: &DirectionGrid) -> Result<RecessionFunction> {
    if f.dim() != dirs.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: dirs.dim(),
        });
    }
    let values: Vec<ExtReal> = match f.repr() {
        FnRepr::PhiAnalytic(spec) => {
            let shape = support_shape(spec).ok_or_else(|| {
                Error::UnsupportedBoundary("structural support not resolved for this φ".into())
            })?;
            match shape {
                SupportShape::Full => vec![Infinity; dirs.len()],
                SupportShape::Polytope(k) => dirs.iter().map(|th| Finite(k.support(th))).collect(),
            }
        }
        FnRepr::PhiGrid(phi) => dirs
            .iter()
            .map(|th| Finite(grid_domain_support(phi, th)))
            .collect(),
        FnRepr::SupportAnalytic { spec, .. } => dirs
            .iter()
            .map(|th| recession_value_spec(spec, th))
            .collect::<Result<_>>()?,
        FnRepr::SupportGrid(_) => {
            return Err(Error::UnsupportedBoundary(
                "grid-rendered support functions do not determine a support body; \
                 use an analytic representation"
                    .into(),
            ))
        }
    };
    RecessionFunction::new(dirs.clone(), values)
}

/// `h_{K_f}(θ)` at a single direction, outside any direction grid.
pub fn support_body_value(f: &LogConcaveFn, theta: &[f64]) -> Result<ExtReal> {
    match f.repr() {
        FnRepr::PhiAnalytic(spec) => {
            let shape = support_shape(spec).ok_or_else(|| {
                Error::UnsupportedBoundary("structural support not resolved for this φ".into())
            })?;
            Ok(match shape {
                SupportShape::Full => Infinity,
                SupportShape::Polytope(k) => Finite(k.support(theta)),
            })
        }
        FnRepr::PhiGrid(phi) => Ok(Finite(grid_domain_support(phi, theta))),
        FnRepr::SupportAnalytic { spec, .. } => recession_value_spec(spec, theta),
        FnRepr::SupportGrid(_) => Err(Error::UnsupportedBoundary(
            "grid-rendered support functions do not determine a support body".into(),
        )),
    }
}

fn grid_domain_support(phi: &ConvexGridFunction, theta: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for idx in 0..phi.grid().node_count() {
        if phi.value(idx).is_finite() {
            let x = phi.grid().node_point(idx);
            best = best.max(x.iter().zip(theta).map(|(a, b)| a * b).sum());
        }
    }
    best
}

/// The Pasch–Hausdorff envelope `φ_k(x) = inf_y [φ(y) + k|x−y|]` as a spec,
/// for the variants where the infimum has a closed form (radial families,
/// affine maps below the slope bound, and functions already `k`-Lipschitz).
/// Its conjugate satisfies `(φ_k)* = φ* + 𝟙_{kB}^∞`; the generic grid-side
/// rendering of that identity is [`pasch_hausdorff_grid`].
pub fn pasch_hausdorff(spec: &AnalyticConvexSpec, k: f64) -> Result<AnalyticConvexSpec> {
    use AnalyticConvexSpec as S;
    if k <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Pasch–Hausdorff needs k > 0, got {k}"
        )));
    }
    Ok(match spec {
        S::Quadratic { scale } => {
            if *scale == 0.0 {
                spec.clone()
            } else {
                S::Huber {
                    k,
                    quadratic_scale: *scale,
                }
            }
        }
        S::NormMultiple { c } => S::NormMultiple { c: c.min(k) },
        S::Huber {
            k: k0,
            quadratic_scale,
        } => S::Huber {
            k: k0.min(k),
            quadratic_scale: *quadratic_scale,
        },
        S::RhoA { a } => {
            if k >= a * a {
                spec.clone()
            } else {
                S::Huber {
                    k,
                    quadratic_scale: *a,
                }
            }
        }
        S::Constant { .. } => spec.clone(),
        S::Affine { slope, .. } => {
            let norm = slope.iter().map(|s| s * s).sum::<f64>().sqrt();
            if norm <= k {
                spec.clone()
            } else {
                return Err(Error::Improper(format!(
                    "envelope of an affine map with slope norm {norm} > k = {k} is −∞"
                )));
            }
        }
        S::SupportOfPolytope { polytope } | S::ShiftedCone { polytope, .. } => {
            if polytope.max_vertex_norm() <= k {
                spec.clone()
            } else {
                return Err(Error::InvalidParameter(
                    "k below the Lipschitz bound of the body; use the grid path".into(),
                ));
            }
        }
        S::RadialPl { knots } => S::RadialPl {
            knots: clamp_radial_slopes(knots, k),
        },
        S::Scaled { factor, inner } => S::Scaled {
            factor: *factor,
            inner: Box::new(pasch_hausdorff(inner, k / factor)?),
        },
        S::Dilated { lambda, inner } => S::Dilated {
            lambda: *lambda,
            inner: Box::new(pasch_hausdorff(inner, k)?),
        },
        S::Translated { offset, inner } => S::Translated {
            offset: offset.clone(),
            inner: Box::new(pasch_hausdorff(inner, k)?),
        },
        S::Sum { .. } | S::Max { .. } | S::IndicatorPolytope { .. } => {
            return Err(Error::InvalidParameter(
                "no closed-form envelope for this variant; use the grid path".into(),
            ))
        }
    })
}

fn clamp_radial_slopes(knots: &[(f64, f64)], k: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = vec![knots[0]];
    for w in knots.windows(2) {
        let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        let last = *out.last().expect("seeded with the first knot");
        if slope <= k {
            out.push((w[1].0, last.1 + slope * (w[1].0 - last.0)));
        } else {
            out.push((w[1].0, last.1 + k * (w[1].0 - last.0)));
        }
    }
    out
}

/// Grid rendering of the conjugate identity: `φ_k = (φ* + 𝟙_{kB}^∞)*`,
/// computed with one transform to `dual_grid`, a nodewise ball restriction,
/// and one transform back to the grid of `phi`.
pub fn pasch_hausdorff_grid(
    phi: &ConvexGridFunction,
    k: f64,
    dual_grid: &crate::grid::GridSpec,
) -> Result<ConvexGridFunction> {
    if k <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Pasch–Hausdorff needs k > 0, got {k}"
        )));
    }
    let star = crate::legendre::legendre_transform(phi, dual_grid)?;
    let restricted: Vec<ExtReal> = (0..dual_grid.node_count())
        .map(|idx| {
            let y = dual_grid.node_point(idx);
            let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r <= k {
                star.value(idx)
            } else {
                Infinity
            }
        })
        .collect();
    let capped = ConvexGridFunction::new(dual_grid.clone(), restricted)?;
    crate::legendre::legendre_transform(&capped, phi.grid())
}

/// A radial convex `ψ ≥ 0` that eventually dominates any prescribed
/// multiple of φ: on the shell `k ≤ |x| ≤ k+1` the ratio `ψ/φ` is at
/// least `k`. Built from the convex increasing sequence `b_0 = 1`,
/// `b_{k+1} = max{2 b_k, a_{k+1}} + 1` with
/// `a_k = k·max{φ(x) : |x| ≤ k+1}`, joined piecewise-linearly.
pub fn dominating_growth(
    spec: &AnalyticConvexSpec,
    dim: usize,
    shells: usize,
) -> Result<AnalyticConvexSpec> {
    if !everywhere_finite(spec) {
        return Err(Error::Improper(
            "the growth construction needs φ finite everywhere".into(),
        ));
    }
    let targets: Vec<f64> = (1..=shells)
        .map(|k| Ok(k as f64 * ball_max(spec, dim, (k + 1) as f64)?))
        .collect::<Result<_>>()?;
    Ok(AnalyticConvexSpec::RadialPl {
        knots: growth_knots(&targets),
    })
}

/// `max{φ(x) : |x| ≤ r}` for convex φ: attained on the sphere, sampled over
/// 720 directions in the plane (exact endpoints on the line).
fn ball_max(spec: &AnalyticConvexSpec, dim: usize, r: f64) -> Result<f64> {
    let dirs = scan_directions(dim, 720);
    let mut best = f64::NEG_INFINITY;
    for th in dirs {
        let x: Vec<f64> = th.iter().map(|t| t * r).collect();
        match spec.evaluate(&x)? {
            Finite(v) => best = best.max(v),
            Infinity => return Err(Error::Improper("φ takes +∞ inside the sampled ball".into())),
        }
    }
    Ok(best)
}

/// `b_0 = 1`, `b_{k+1} = max{2 b_k, a_{k+1}} + 1`: convex, increasing, and
/// above the targets. `targets[k-1]` is `a_k`.
fn growth_knots(targets: &[f64]) -> Vec<(f64, f64)> {
    let mut knots = Vec::with_capacity(targets.len() + 1);
    let mut b = 1.0_f64;
    knots.push((0.0, b));
    for (k, &a) in targets.iter().enumerate() {
        b = (2.0 * b).max(a) + 1.0;
        knots.push(((k + 1) as f64, b));
    }
    knots
}

/// Per-shell data of the divergence witness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellRow {
    pub shell: usize,
    pub mass: f64,
    pub rho: f64,
}

/// Desk-scale rendering of an infinite statement: the report carries the
/// partial-sum lower bound over the occupied shells, not a claim of `∞`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub shells: Vec<ShellRow>,
    pub occupied_shells: usize,
    /// `Σ_k mass_k · ρ(k)` over occupied shells, at least `occupied_shells`.
    pub partial_sum_lower_bound: f64,
    /// `Σ w·φ(x)` over the atoms inside the radius cap.
    pub partial_integral: f64,
}

/// A radial convex φ whose integral against μ grows without bound when μ is
/// not compactly supported: `ρ(k) ≥ 1/μ(shell k)`, so each occupied shell
/// contributes at least 1. Errors when μ stops strictly inside the cap
/// (compact-support surrogate: no atoms reach the outermost shell).
pub fn divergence_witness(
    mu: &PointMeasure,
    radius_cap: f64,
) -> Result<(AnalyticConvexSpec, DivergenceReport)> {
    if radius_cap < 2.0 {
        return Err(Error::InvalidParameter("radius cap below 2".into()));
    }
    let shell_count = radius_cap.floor() as usize;
    let mut masses = vec![0.0_f64; shell_count];
    for atom in mu.atoms() {
        let r: f64 = atom.location.iter().map(|v| v * v).sum::<f64>().sqrt();
        let k = r.floor() as usize;
        if k < shell_count {
            masses[k] += atom.weight;
        }
    }
    let last_occupied = masses.iter().rposition(|&m| m > 0.0);
    match last_occupied {
        Some(k) if k == shell_count - 1 => {}
        _ => {
            return Err(Error::CompactSupport(format!(
                "last occupied shell is {last_occupied:?}, cap covers shells 0..={}",
                shell_count - 1
            )))
        }
    }
    let targets: Vec<f64> = masses[1..]
        .iter()
        .map(|&m| if m > 0.0 { 1.0 / m } else { 0.0 })
        .collect();
    let knots = growth_knots(&targets);
    let spec = AnalyticConvexSpec::RadialPl {
        knots: knots.clone(),
    };

    let mut shells = Vec::with_capacity(shell_count);
    let mut bound = 0.0;
    let mut occupied = 0;
    for (k, &m) in masses.iter().enumerate() {
        let rho = knots[k].1;
        if m > 0.0 {
            occupied += 1;
            bound += m * rho;
        }
        shells.push(ShellRow {
            shell: k,
            mass: m,
            rho,
        });
    }
    let mut partial_integral = 0.0;
    for atom in mu.atoms() {
        let r: f64 = atom.location.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r < shell_count as f64 {
            partial_integral += atom.weight * spec.evaluate(&atom.location)?.unwrap_finite();
        }
    }
    let report = DivergenceReport {
        shells,
        occupied_shells: occupied,
        partial_sum_lower_bound: bound,
        partial_integral,
    };
    Ok((spec, report))
}
