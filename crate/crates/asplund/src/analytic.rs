//! Symbolic convex functions from a closed family, evaluable exactly at
//! any point. These are the oracles of the toolkit: indicators and support
//! functions of polytopes, quadratics, norm multiples, Huber envelopes, the
//! `ρ_a` regularizers, radial piecewise-linear growth functions, and
//! sums/maxima/dilations/translations of all of the above.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, Infinity};
use crate::grid::{ConvexGridFunction, GridSpec};
use serde::{Deserialize, Serialize};

/// A compact convex polytope: an interval in dimension 1, a convex polygon
/// (vertices in counter-clockwise convex position) in dimension 2. Single
/// points and segments are allowed as degenerate polygons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Polytope {
    Interval { a: f64, b: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Polytope {
    pub fn interval(a: f64, b: f64) -> Result<Polytope> {
        if !a.is_finite() || !b.is_finite() || a > b {
            return Err(Error::InvalidParameter(format!(
                "interval needs a <= b, got [{a}, {b}]"
            )));
        }
        Ok(Polytope::Interval { a, b })
    }

    pub fn point(p: &[f64]) -> Result<Polytope> {
        match p.len() {
            1 => Polytope::interval(p[0], p[0]),
            2 => Ok(Polytope::Polygon {
                vertices: vec![[p[0], p[1]]],
            }),
            d => Err(Error::DimensionMismatch {
                expected: 2,
                got: d,
            }),
        }
    }

    /// Polygon from counter-clockwise vertices in strictly convex position.
    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Polytope> {
        if vertices.is_empty() {
            return Err(Error::InvalidParameter("polygon needs vertices".into()));
        }
        if vertices.len() >= 3 {
            let n = vertices.len();
            let scale = vertices
                .iter()
                .map(|v| v[0].abs().max(v[1].abs()))
                .fold(1.0_f64, f64::max);
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let c = vertices[(i + 2) % n];
                let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
                if cross <= 1e-12 * scale * scale {
                    return Err(Error::InvalidParameter(format!(
                        "vertices must be in counter-clockwise strictly convex position \
                         (violated at vertex {i})"
                    )));
                }
            }
        }
        Ok(Polytope::Polygon { vertices })
    }

    /// Axis-aligned box `[lo0, hi0] × [lo1, hi1]`.
    pub fn rect(lo: [f64; 2], hi: [f64; 2]) -> Result<Polytope> {
        Polytope::polygon(vec![
            [lo[0], lo[1]],
            [hi[0], lo[1]],
            [hi[0], hi[1]],
            [lo[0], hi[1]],
        ])
    }

    /// Convex hull of a planar point cloud (monotone chain, collinear
    /// points dropped), as a CCW polygon.
    pub fn hull_of(points: &[[f64; 2]]) -> Result<Polytope> {
        let mut pts: Vec<[f64; 2]> = points.to_vec();
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
        pts.dedup();
        if pts.len() < 3 {
            return Polytope::polygon(pts);
        }
        let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
            (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        };
        let mut lower: Vec<[f64; 2]> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2
                && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<[f64; 2]> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Polytope::polygon(lower)
    }

    /// Regular `m`-gon of circumradius `r` with the first vertex at angle
    /// `rotation`.
    pub fn regular_polygon(m: usize, r: f64, rotation: f64) -> Result<Polytope> {
        if m < 3 || r <= 0.0 {
            return Err(Error::InvalidParameter(
                "regular polygon needs m >= 3 and r > 0".into(),
            ));
        }
        let vertices = (0..m)
            .map(|k| {
                let th = rotation + 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                [r * th.cos(), r * th.sin()]
            })
            .collect();
        Polytope::polygon(vertices)
    }

    pub fn dim(&self) -> usize {
        match self {
            Polytope::Interval { .. } => 1,
            Polytope::Polygon { .. } => 2,
        }
    }

    /// Support value `h_K(y) = max_{v ∈ K} ⟨v, y⟩` for any `y` (1-homogeneous).
    pub fn support(&self, y: &[f64]) -> f64 {
        match self {
            Polytope::Interval { a, b } => (a * y[0]).max(b * y[0]),
            Polytope::Polygon { vertices } => vertices
                .iter()
                .map(|v| v[0] * y[0] + v[1] * y[1])
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Closed-set membership with a relative tolerance on the boundary.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Polytope::Interval { a, b } => {
                let eps = 1e-12 * (1.0 + a.abs().max(b.abs()));
                x[0] >= a - eps && x[0] <= b + eps
            }
            Polytope::Polygon { vertices } => {
                let scale = vertices
                    .iter()
                    .map(|v| v[0].abs().max(v[1].abs()))
                    .fold(1.0_f64, f64::max)
                    .max(x[0].abs())
                    .max(x[1].abs());
                let eps = 1e-12 * scale;
                match vertices.len() {
                    1 => {
                        let v = vertices[0];
                        (x[0] - v[0]).abs() <= eps && (x[1] - v[1]).abs() <= eps
                    }
                    2 => dist_to_segment(x, vertices[0], vertices[1]) <= eps,
                    n => (0..n).all(|i| {
                        let a = vertices[i];
                        let b = vertices[(i + 1) % n];
                        (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])
                            >= -eps * scale
                    }),
                }
            }
        }
    }

    /// A point of the polytope (vertex average).
    pub fn inner_point(&self) -> Vec<f64> {
        match self {
            Polytope::Interval { a, b } => vec![0.5 * (a + b)],
            Polytope::Polygon { vertices } => {
                let n = vertices.len() as f64;
                let (sx, sy) = vertices
                    .iter()
                    .fold((0.0, 0.0), |(sx, sy), v| (sx + v[0], sy + v[1]));
                vec![sx / n, sy / n]
            }
        }
    }

    /// Largest Euclidean vertex norm (a Lipschitz constant for `h_K`).
    pub fn max_vertex_norm(&self) -> f64 {
        match self {
            Polytope::Interval { a, b } => a.abs().max(b.abs()),
            Polytope::Polygon { vertices } => vertices
                .iter()
                .map(|v| v[0].hypot(v[1]))
                .fold(0.0_f64, f64::max),
        }
    }

    pub fn vertices2d(&self) -> Option<&[[f64; 2]]> {
        match self {
            Polytope::Polygon { vertices } => Some(vertices),
            Polytope::Interval { .. } => None,
        }
    }
}

fn dist_to_segment(x: &[f64], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((x[0] - a[0]) * dx + (x[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    let (px, py) = (a[0] + t * dx, a[1] + t * dy);
    (x[0] - px).hypot(x[1] - py)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A convex function described symbolically. Every variant evaluates to an
/// exact extended-real value anywhere; the family is closed under sums,
/// maxima, positive scaling, epigraph dilation and translation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticConvexSpec {
    /// `a·|x|²/2`, `a ≥ 0`.
    Quadratic {
        scale: f64,
    },
    /// `c·|x|`, `c ≥ 0`.
    NormMultiple {
        c: f64,
    },
    /// `⟨slope, x⟩ + offset`.
    Affine {
        slope: Vec<f64>,
        offset: f64,
    },
    /// Convex indicator `𝟙_K^∞`: 0 on `K`, `+∞` outside.
    IndicatorPolytope {
        polytope: Polytope,
    },
    /// Support function `h_K` as a 1-homogeneous function on all of space.
    SupportOfPolytope {
        polytope: Polytope,
    },
    /// `ρ_a`: `a|x|²/2` for `|x| ≤ a`, `a²|x| − a³/2` beyond (C¹ at the seam).
    RhoA {
        a: f64,
    },
    /// Huber envelope: `a|x|²/2` for `|x| ≤ k/a`, `k|x| − k²/(2a)` beyond —
    /// the Pasch–Hausdorff envelope of `a|x|²/2` at slope `k`.
    Huber {
        k: f64,
        quadratic_scale: f64,
    },
    /// `max{h_K − shift, 0}` — linear-growth probe with recession `h_K`.
    ShiftedCone {
        polytope: Polytope,
        shift: f64,
    },
    /// Radial convex piecewise-linear function `ρ(|x|)`: knots are
    /// `(radius, value)` pairs starting at radius 0, slopes nondecreasing
    /// and nonnegative; the last slope extends to infinity.
    RadialPl {
        knots: Vec<(f64, f64)>,
    },
    Sum {
        terms: Vec<AnalyticConvexSpec>,
    },
    Max {
        terms: Vec<AnalyticConvexSpec>,
    },
    Constant {
        c: f64,
    },
    /// Pointwise scale `c·φ`, `c > 0`.
    Scaled {
        factor: f64,
        inner: Box<AnalyticConvexSpec>,
    },
    /// Epigraph dilation `λ·φ(x/λ)`, `λ > 0`.
    Dilated {
        lambda: f64,
        inner: Box<AnalyticConvexSpec>,
    },
    /// Translate `φ(x − offset)`.
    Translated {
        offset: Vec<f64>,
        inner: Box<AnalyticConvexSpec>,
    },
}

use AnalyticConvexSpec as Spec;

impl AnalyticConvexSpec {
    pub fn quadratic(scale: f64) -> Spec {
        Spec::Quadratic { scale }
    }

    pub fn norm_multiple(c: f64) -> Spec {
        Spec::NormMultiple { c }
    }

    pub fn constant(c: f64) -> Spec {
        Spec::Constant { c }
    }

    pub fn indicator(polytope: Polytope) -> Spec {
        Spec::IndicatorPolytope { polytope }
    }

    pub fn support_of(polytope: Polytope) -> Spec {
        Spec::SupportOfPolytope { polytope }
    }

    pub fn rho_a(a: f64) -> Spec {
        Spec::RhoA { a }
    }

    pub fn shifted_cone(polytope: Polytope, shift: f64) -> Spec {
        Spec::ShiftedCone { polytope, shift }
    }

    pub fn translated(self, offset: Vec<f64>) -> Spec {
        Spec::Translated {
            offset,
            inner: Box::new(self),
        }
    }

    pub fn scaled(self, factor: f64) -> Spec {
        Spec::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    pub fn sum(terms: Vec<Spec>) -> Spec {
        Spec::Sum { terms }
    }

    pub fn max(terms: Vec<Spec>) -> Spec {
        Spec::Max { terms }
    }

    /// Intrinsic dimension, or `None` for dimension-generic variants
    /// (radial and constant families evaluate in any dimension).
    pub fn dim(&self) -> Option<usize> {
        match self {
            Spec::Quadratic { .. }
            | Spec::NormMultiple { .. }
            | Spec::RhoA { .. }
            | Spec::Huber { .. }
            | Spec::RadialPl { .. }
            | Spec::Constant { .. } => None,
            Spec::Affine { slope, .. } => Some(slope.len()),
            Spec::IndicatorPolytope { polytope }
            | Spec::SupportOfPolytope { polytope }
            | Spec::ShiftedCone { polytope, .. } => Some(polytope.dim()),
            Spec::Translated { offset, .. } => Some(offset.len()),
            Spec::Scaled { inner, .. } | Spec::Dilated { inner, .. } => inner.dim(),
            Spec::Sum { terms } | Spec::Max { terms } => terms.iter().find_map(|t| t.dim()),
        }
    }

    /// Check structural parameter validity (positivity, polytope shape,
    /// slope monotonicity of radial knots), recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            Spec::Quadratic { scale } if *scale < 0.0 => Err(Error::InvalidParameter(
                "quadratic scale must be nonnegative".into(),
            )),
            Spec::NormMultiple { c } if *c < 0.0 => Err(Error::InvalidParameter(
                "norm multiple must be nonnegative".into(),
            )),
            Spec::RhoA { a } if *a <= 0.0 => {
                Err(Error::InvalidParameter("rho_a needs a > 0".into()))
            }
            Spec::Huber { k, quadratic_scale } if *k < 0.0 || *quadratic_scale <= 0.0 => Err(
                Error::InvalidParameter("huber needs k >= 0 and a positive scale".into()),
            ),
            Spec::ShiftedCone { shift, .. } if *shift < 0.0 => Err(Error::InvalidParameter(
                "shifted cone needs a nonnegative shift".into(),
            )),
            Spec::Scaled { factor, inner } => {
                if *factor <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "scale factor must be positive".into(),
                    ));
                }
                inner.validate()
            }
            Spec::Dilated { lambda, inner } => {
                if *lambda <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "dilation factor must be positive".into(),
                    ));
                }
                inner.validate()
            }
            Spec::Translated { inner, .. } => inner.validate(),
            Spec::RadialPl { knots } => {
                if knots.is_empty() || knots[0].0 != 0.0 {
                    return Err(Error::InvalidParameter(
                        "radial knots must start at radius 0".into(),
                    ));
                }
                let mut prev_slope = 0.0_f64;
                for w in knots.windows(2) {
                    let dr = w[1].0 - w[0].0;
                    if dr <= 0.0 {
                        return Err(Error::InvalidParameter(
                            "radial knot radii must be strictly increasing".into(),
                        ));
                    }
                    let slope = (w[1].1 - w[0].1) / dr;
                    if slope < prev_slope - 1e-12 || slope < 0.0 {
                        return Err(Error::InvalidParameter(
                            "radial knot slopes must be nonnegative and nondecreasing".into(),
                        ));
                    }
                    prev_slope = slope;
                }
                Ok(())
            }
            Spec::Sum { terms } | Spec::Max { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidParameter(
                        "sum/max needs at least one term".into(),
                    ));
                }
                let mut dim = None;
                for t in terms {
                    t.validate()?;
                    if let Some(d) = t.dim() {
                        match dim {
                            None => dim = Some(d),
                            Some(d0) if d0 != d => {
                                return Err(Error::DimensionMismatch {
                                    expected: d0,
                                    got: d,
                                })
                            }
                            _ => {}
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Exact value at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<ExtReal> {
        if let Some(d) = self.dim() {
            if d != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[f64]) -> ExtReal {
        match self {
            Spec::Quadratic { scale } => Finite(0.5 * scale * x.iter().map(|v| v * v).sum::<f64>()),
            Spec::NormMultiple { c } => Finite(c * norm(x)),
            Spec::Affine { slope, offset } => {
                Finite(slope.iter().zip(x).map(|(s, v)| s * v).sum::<f64>() + offset)
            }
            Spec::IndicatorPolytope { polytope } => {
                if polytope.contains(x) {
                    Finite(0.0)
                } else {
                    Infinity
                }
            }
            Spec::SupportOfPolytope { polytope } => Finite(polytope.support(x)),
            Spec::RhoA { a } => Finite(huber_value(norm(x), a * a, *a)),
            Spec::Huber { k, quadratic_scale } => {
                Finite(huber_value(norm(x), *k, *quadratic_scale))
            }
            Spec::ShiftedCone { polytope, shift } => Finite((polytope.support(x) - shift).max(0.0)),
            Spec::RadialPl { knots } => Finite(radial_pl_value(knots, norm(x))),
            Spec::Sum { terms } => terms
                .iter()
                .fold(Finite(0.0), |acc, t| acc + t.eval_unchecked(x)),
            Spec::Max { terms } => terms
                .iter()
                .map(|t| t.eval_unchecked(x))
                .fold(None, |acc: Option<ExtReal>, v| {
                    Some(acc.map_or(v, |a| a.max(v)))
                })
                .expect("max over empty term list"),
            Spec::Constant { c } => Finite(*c),
            Spec::Scaled { factor, inner } => inner.eval_unchecked(x).scale(*factor),
            Spec::Dilated { lambda, inner } => {
                let y: Vec<f64> = x.iter().map(|v| v / lambda).collect();
                inner.eval_unchecked(&y).scale(*lambda)
            }
            Spec::Translated { offset, inner } => {
                let y: Vec<f64> = x.iter().zip(offset).map(|(v, o)| v - o).collect();
                inner.eval_unchecked(&y)
            }
        }
    }

    /// Node-exact sampling onto a grid. Errors if the result is improper
    /// (all nodes `+∞`).
    pub fn sample_to_grid(&self, grid: &GridSpec) -> Result<ConvexGridFunction> {
        if let Some(d) = self.dim() {
            if d != grid.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: grid.dim(),
                });
            }
        }
        let values: Vec<ExtReal> = (0..grid.node_count())
            .map(|idx| self.eval_unchecked(&grid.node_point(idx)))
            .collect();
        ConvexGridFunction::new(grid.clone(), values)
    }

    /// A point where the function is finite, if one can be named
    /// structurally (used as the base point of recession limits).
    pub fn finite_point(&self, dim: usize) -> Option<Vec<f64>> {
        let zero = vec![0.0; dim];
        match self {
            Spec::IndicatorPolytope { polytope } => Some(polytope.inner_point()),
            Spec::Translated { offset, inner } => inner
                .finite_point(dim)
                .map(|p| p.iter().zip(offset).map(|(v, o)| v + o).collect()),
            Spec::Dilated { lambda, inner } => inner
                .finite_point(dim)
                .map(|p| p.iter().map(|v| v * lambda).collect()),
            Spec::Scaled { inner, .. } => inner.finite_point(dim),
            Spec::Sum { terms } | Spec::Max { terms } => {
                // Try the candidates named by the members; a sum is finite
                // only where all members are.
                let mut candidates: Vec<Vec<f64>> = vec![zero.clone()];
                for t in terms {
                    if let Some(p) = t.finite_point(dim) {
                        candidates.push(p);
                    }
                }
                candidates
                    .into_iter()
                    .find(|p| self.eval_unchecked(p).is_finite())
            }
            _ => Some(zero),
        }
        .filter(|p| self.eval_unchecked(p).is_finite())
    }

    /// Midpoint-convexity spot check on a deterministic point cloud inside
    /// `[-r, r]^dim`; the sampling backs the "every variant is convex"
    /// invariant in the test suites.
    pub fn midpoint_convexity_check(&self, dim: usize, r: f64, pairs: usize) -> bool {
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 * r - r
        };
        for _ in 0..pairs {
            let x: Vec<f64> = (0..dim).map(|_| next()).collect();
            let y: Vec<f64> = (0..dim).map(|_| next()).collect();
            let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
            let (fx, fy, fm) = (
                self.eval_unchecked(&x),
                self.eval_unchecked(&y),
                self.eval_unchecked(&mid),
            );
            match (fx + fy, fm) {
                (Finite(s), Finite(m)) => {
                    if m > 0.5 * s + 1e-9 * (1.0 + s.abs()) {
                        return false;
                    }
                }
                (Infinity, _) => {}
                (Finite(_), Infinity) => return false,
            }
        }
        true
    }
}

fn huber_value(r: f64, k: f64, a: f64) -> f64 {
    let seam = k / a;
    if r <= seam {
        0.5 * a * r * r
    } else {
        k * r - 0.5 * k * k / a
    }
}

fn radial_pl_value(knots: &[(f64, f64)], r: f64) -> f64 {
    let n = knots.len();
    if n == 1 {
        return knots[0].1;
    }
    for w in knots.windows(2) {
        if r <= w[1].0 {
            let t = (r - w[0].0) / (w[1].0 - w[0].0);
            return w[0].1 + t * (w[1].1 - w[0].1);
        }
    }
    // beyond the last knot: extend the final slope
    let (r0, v0) = knots[n - 2];
    let (r1, v1) = knots[n - 1];
    let slope = (v1 - v0) / (r1 - r0);
    v1 + slope * (r - r1)
}
