//! Theorem harness: functionals represented by a measure pair `(μ, ν)`,
//! audits of the linearity and monotonicity axioms, the degenerate-case
//! identities that kill finite linear functionals on the full convex cone,
//! monotone-continuity probes along the Pasch–Hausdorff chain, and the
//! recovery of the spherical part ν of a black-box functional from the
//! linear-growth probe family `φ_R = max{h_K − R, 0}`.
//!
//! The probes exploit two exact facts: `φ̄_R = h_K` for bodies containing
//! the origin, and `φ_R → 0` pointwise as `R → ∞`, so
//! `F(f_{φ_R}) → ∫ h_K dν` while the μ-term dies off like the μ-tail
//! beyond radius R. The μ-part of a black-box F is not recovered (that
//! would take a full compactly-supported probe basis); the harness reports
//! it as F minus the ν-reconstruction.

use crate::analytic::{AnalyticConvexSpec, Polytope};
use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, Infinity};
use crate::grid::GridSpec;
use crate::logconcave::{support_value_spec, LogConcaveFn};
use crate::measures::{
    integrate_against_point, integrate_against_sphere, PointMeasure, SphereMeasure,
};
use crate::recession::{pasch_hausdorff, support_body_value};
use crate::variation::{first_variation, VariationConfig};
use serde::{Deserialize, Serialize};

/// A functional in the representation form
/// `F(f) = ∫ h_f dμ + ∫ h_{K_f} dν` with positive measures. By
/// construction it is linear for the Asplund structure and increasing, and
/// it vanishes on point masses at the origin.
#[derive(Clone, Debug)]
pub struct RepresentedFunctional {
    pub mu: PointMeasure,
    pub nu: SphereMeasure,
}

impl RepresentedFunctional {
    pub fn new(mu: PointMeasure, nu: SphereMeasure) -> Result<Self> {
        if mu.dim() != nu.dim() {
            return Err(Error::DimensionMismatch {
                expected: mu.dim(),
                got: nu.dim(),
            });
        }
        Ok(RepresentedFunctional { mu, nu })
    }

    pub fn evaluate(&self, f: &LogConcaveFn) -> Result<ExtReal> {
        let mu_term = match support_value_spec(f) {
            Some(h) => integrate_against_point(|x| h.evaluate(x), &self.mu)?,
            None => {
                let h = f.support_function(&f.default_dual_grid()?)?;
                integrate_against_point(|x| h.interpolate(x), &self.mu)?
            }
        };
        let nu_term = integrate_against_sphere(|th| support_body_value(f, th), &self.nu)?;
        Ok(mu_term + nu_term)
    }
}

/// An opaque evaluation map from log-concave functions to `(−∞, ∞]`. The
/// harness measures linearity and monotonicity, it does not assume them.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum FunctionalOracle {
    Represented(RepresentedFunctional),
    /// `F(f) = δ(g, f)` computed by the numeric pipeline.
    FirstVariation {
        g: LogConcaveFn,
        config: VariationConfig,
    },
    /// `F(f) = ∫ f` — increasing but NOT Asplund-linear.
    Integral,
    /// A deliberately discontinuous functional mimicking a ray limit:
    /// `F(f) = h_f(λθ)/λ^α` at `λ = 2^20` with `α > 1`. It vanishes on
    /// linear-growth support functions but not everywhere, so it violates
    /// the monotone-continuity assumption.
    RayLimit {
        theta: Vec<f64>,
        alpha: f64,
    },
}

impl FunctionalOracle {
    pub fn eval(&self, f: &LogConcaveFn) -> Result<ExtReal> {
        match self {
            FunctionalOracle::Represented(r) => r.evaluate(f),
            FunctionalOracle::FirstVariation { g, config } => {
                first_variation(g, f, config)?.delta.to_extreal()
            }
            FunctionalOracle::Integral => Ok(Finite(f.integral()?)),
            FunctionalOracle::RayLimit { theta, alpha } => {
                let h = support_value_spec(f).ok_or_else(|| {
                    Error::OracleFailure("ray-limit oracle needs a symbolic h_f".into())
                })?;
                let lam = (1u64 << 20) as f64;
                let x: Vec<f64> = theta.iter().map(|t| t * lam).collect();
                Ok(h.evaluate(&x)?.map(|v| v / lam.powf(*alpha)))
            }
        }
    }
}

/// One audit case: the combination `(α·f)⋆(β·g)` versus `αF(f) + βF(g)`.
#[derive(Clone, Debug)]
pub struct AuditCase {
    pub f: LogConcaveFn,
    pub g: LogConcaveFn,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditRow {
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    /// `|F((α·f)⋆(β·g)) − (αF(f)+βF(g))|`; infinite when exactly one side
    /// is infinite
    pub linearity_residual: ExtReal,
    /// present when the pair is pointwise comparable: did `f ≤ g` imply
    /// `F(f) ≤ F(g)`?
    pub monotone_ok: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    /// largest finite linearity residual
    pub max_residual: f64,
    pub monotone_violations: usize,
}

/// Measure the linearity convention `F((α·f)⋆(β·g)) = αF(f) + βF(g)` and
/// monotonicity on a suite of cases. Combinations are built exactly on the
/// support side (`h = α·h_f + β·h_g`), which requires symbolic support
/// functions on the test suite.
pub fn axiom_audit(oracle: &FunctionalOracle, cases: &[AuditCase]) -> Result<AuditReport> {
    let mut rows = Vec::with_capacity(cases.len());
    let mut max_residual = 0.0_f64;
    let mut monotone_violations = 0;
    for case in cases {
        let hf = support_value_spec(&case.f).ok_or_else(|| {
            Error::OracleFailure("audit cases need symbolic support functions".into())
        })?;
        let hg = support_value_spec(&case.g).ok_or_else(|| {
            Error::OracleFailure("audit cases need symbolic support functions".into())
        })?;
        let combined_h = AnalyticConvexSpec::sum(vec![
            hf.clone().scaled(case.alpha),
            hg.clone().scaled(case.beta),
        ]);
        let window = case
            .f
            .window()
            .scaled(case.alpha)
            .box_sum(&case.g.window().scaled(case.beta))?;
        let dual = case.f.default_dual_grid()?;
        let combined = LogConcaveFn::from_support_spec(combined_h, dual.clone(), window)?;

        let lhs = oracle.eval(&combined)?;
        let ff = oracle.eval(&case.f)?;
        let fg = oracle.eval(&case.g)?;
        let rhs = match (ff, fg) {
            (Finite(a), Finite(b)) => Finite(case.alpha * a + case.beta * b),
            _ => Infinity,
        };
        let linearity_residual = lhs.abs_diff(rhs);
        if let Finite(r) = linearity_residual {
            max_residual = max_residual.max(r);
        }

        // monotonicity probe on comparable pairs: f ≤ g iff h_f ≤ h_g
        let monotone_ok = match pointwise_le(&hf, &hg, case.f.dim()) {
            Some(true) => {
                let ok = ff <= fg;
                if !ok {
                    monotone_violations += 1;
                }
                Some(ok)
            }
            _ => None,
        };
        rows.push(AuditRow {
            lhs,
            rhs,
            linearity_residual,
            monotone_ok,
        });
    }
    Ok(AuditReport {
        rows,
        max_residual,
        monotone_violations,
    })
}

/// Sampled pointwise comparison of two specs (`Some(true)` when `a ≤ b`
/// everywhere on the sample, `Some(false)` when `a ≥ b`, `None` when
/// incomparable).
fn pointwise_le(a: &AnalyticConvexSpec, b: &AnalyticConvexSpec, dim: usize) -> Option<bool> {
    let mut le = true;
    let mut ge = true;
    for x in sample_points(dim, 200).iter() {
        let va = a.evaluate(x).ok()?;
        let vb = b.evaluate(x).ok()?;
        if va > vb {
            le = false;
        }
        if vb > va {
            ge = false;
        }
    }
    if le {
        Some(true)
    } else if ge {
        Some(false)
    } else {
        None
    }
}

fn sample_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let mut state = 0x2545f4914f6cdd1d_u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 8.0 - 4.0
    };
    (0..count)
        .map(|_| (0..dim).map(|_| next()).collect())
        .collect()
}

/// Nodewise residual of the identity
/// `φ + 𝟙_{{p}}^∞ = φ(p)·𝟙 + 𝟙_{{p}}^∞` on a grid containing `p` as a
/// node — the mechanism that collapses finite linear functionals on the
/// full cone.
pub fn degenerate_identity_witness(
    phi: &AnalyticConvexSpec,
    p: &[f64],
    grid: &GridSpec,
) -> Result<f64> {
    let at_p = phi.evaluate(p)?;
    let Finite(phi_p) = at_p else {
        return Err(Error::Improper("φ(p) must be finite".into()));
    };
    let point = Polytope::point(p)?;
    let lhs = AnalyticConvexSpec::sum(vec![
        phi.clone(),
        AnalyticConvexSpec::indicator(point.clone()),
    ])
    .sample_to_grid(grid)?;
    let rhs = AnalyticConvexSpec::sum(vec![
        AnalyticConvexSpec::constant(phi_p),
        AnalyticConvexSpec::indicator(point),
    ])
    .sample_to_grid(grid)?;
    let mut residual = 0.0_f64;
    for idx in 0..grid.node_count() {
        match lhs.value(idx).abs_diff(rhs.value(idx)) {
            Finite(d) => residual = residual.max(d),
            Infinity => {
                return Err(Error::InvariantViolation(
                    "one side finite where the other is infinite".into(),
                ))
            }
        }
    }
    Ok(residual)
}

/// Configuration of the ν-recovery harness.
#[derive(Clone, Debug)]
pub struct DecomposeConfig {
    /// number of candidate atom directions (equally spaced)
    pub directions: usize,
    /// circumradius of the polygonal ball carrying the probes
    pub base_radius: f64,
    /// height of the vertex push that localizes each probe
    pub bump_height: f64,
    /// vertex count of the polygonal ball
    pub ball_vertices: usize,
    /// shift sequence of the probe family `max{h_K − R, 0}`
    pub r_sequence: Vec<f64>,
    /// regular m-gons used as held-out validation probes
    pub validation_gons: Vec<usize>,
    /// caller-supplied bodies: each is probed for `∫ h_K dν` and checked
    /// against the reconstruction; bodies missing the origin are probed
    /// through their Minkowski sum with the polygonal ball
    /// (`h_K = h_{K+B} − h_B`)
    pub extra_bodies: Vec<Polytope>,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            directions: 16,
            base_radius: 4.0,
            bump_height: 1.0,
            ball_vertices: 64,
            r_sequence: vec![10.0, 20.0, 40.0],
            validation_gons: vec![4, 8, 16],
            extra_bodies: Vec::new(),
        }
    }
}

/// Probe diagnostics for one body.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BodyProbe {
    pub label: String,
    pub limits: Vec<f64>,
    pub extrapolated: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionReport {
    /// candidate directions (unit vectors)
    pub directions: Vec<Vec<f64>>,
    /// solved weights per direction (raw, may carry numerical dust)
    pub weights: Vec<f64>,
    /// the positive part of the solved weights as a measure
    pub recovered_nu_mass: f64,
    pub nu_mass_estimate: f64,
    pub probes: Vec<BodyProbe>,
    /// worst disagreement between the reconstruction and the held-out
    /// validation probes
    pub validation_residual: f64,
}

impl DecompositionReport {
    /// The recovered measure (entries above `floor`).
    pub fn recovered(&self, floor: f64) -> Result<SphereMeasure> {
        let atoms: Vec<(Vec<f64>, f64)> = self
            .directions
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > floor)
            .map(|(d, &w)| (d.clone(), w))
            .collect();
        if atoms.is_empty() {
            Ok(SphereMeasure::empty(2))
        } else {
            SphereMeasure::new(2, atoms)
        }
    }
}

fn probe_body_limit(
    oracle: &FunctionalOracle,
    body: &Polytope,
    config: &DecomposeConfig,
    window: &GridSpec,
    dual: &GridSpec,
    label: &str,
) -> Result<BodyProbe> {
    let mut limits = Vec::with_capacity(config.r_sequence.len());
    for &r in &config.r_sequence {
        let h = AnalyticConvexSpec::shifted_cone(body.clone(), r);
        let probe = LogConcaveFn::from_support_spec(h, dual.clone(), window.clone())?;
        match oracle.eval(&probe)? {
            Finite(v) => limits.push(v),
            Infinity => {
                return Err(Error::OracleFailure(format!(
                    "oracle diverges on probe {label} at R = {r}"
                )))
            }
        }
    }
    // linear-in-1/R extrapolation through the last two shifts
    let n = limits.len();
    let extrapolated = if n >= 2 {
        let (r1, r2) = (config.r_sequence[n - 2], config.r_sequence[n - 1]);
        (r2 * limits[n - 1] - r1 * limits[n - 2]) / (r2 - r1)
    } else {
        limits[n - 1]
    };
    Ok(BodyProbe {
        label: label.to_string(),
        limits,
        extrapolated,
    })
}

/// Recover the spherical part ν of a linear increasing functional from the
/// probe family `φ_R = max{h_K − R, 0}`.
///
/// Bodies: a polygonal ball of radius `base_radius` (whose limit divided by
/// the radius estimates the ν-mass) and, per candidate direction, the same
/// ball with one vertex pushed out by `bump_height` — the support-function
/// difference is a localized tent, so the probe limits essentially read off
/// the ν-weights direction by direction after one small linear solve.
/// Regular m-gons serve as held-out validation probes. Centered regular
/// bodies alone cannot separate the candidate weights (their support
/// functions only carry harmonics that are multiples of m), which is why
/// the localized family does the recovery and the m-gons only validate.
pub fn decompose_functional(
    oracle: &FunctionalOracle,
    config: &DecomposeConfig,
) -> Result<DecompositionReport> {
    let m = config.directions;
    let tau = 2.0 * std::f64::consts::PI;
    let directions: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let th = tau * j as f64 / m as f64;
            vec![th.cos(), th.sin()]
        })
        .collect();

    // probe evaluation grids: generous dual box (the probes are
    // base_radius·(1+ε)-Lipschitz), window wide enough for integral oracles
    let lip = config.base_radius + config.bump_height;
    let dual = GridSpec::symmetric(2, lip * 1.5, 129)?;
    let window = GridSpec::symmetric(2, 40.0, 129)?;

    let ball = Polytope::regular_polygon(config.ball_vertices, config.base_radius, 0.0)?;
    let ball_probe = probe_body_limit(oracle, &ball, config, &window, &dual, "ball")?;
    let nu_mass_estimate = ball_probe.extrapolated / config.base_radius;

    let mut bodies = Vec::with_capacity(m);
    let ball_points: Vec<[f64; 2]> = (0..config.ball_vertices)
        .map(|k| {
            let th = tau * k as f64 / config.ball_vertices as f64;
            [config.base_radius * th.cos(), config.base_radius * th.sin()]
        })
        .collect();
    for dir in &directions {
        let mut points = ball_points.clone();
        points.push([
            (config.base_radius + config.bump_height) * dir[0],
            (config.base_radius + config.bump_height) * dir[1],
        ]);
        bodies.push(Polytope::hull_of(&points)?);
    }

    let mut probes = vec![ball_probe];
    let mut rhs = Vec::with_capacity(m);
    for (j, body) in bodies.iter().enumerate() {
        let probe = probe_body_limit(oracle, body, config, &window, &dual, &format!("bump{j}"))?;
        rhs.push(probe.extrapolated - probes[0].extrapolated);
        probes.push(probe);
    }

    // tent matrix: a[i][j] = (h_{K_j} − h_ball)(u_i), exact support values
    let a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| bodies[j].support(&directions[i]) - ball.support(&directions[i]))
                .collect()
        })
        .collect();
    // the system is K_j-indexed by equations: row j is probe j over the
    // direction atoms: Σ_i w_i·tent_j(u_i) = rhs_j, i.e. transpose(a)
    let at: Vec<Vec<f64>> = (0..m).map(|j| (0..m).map(|i| a[i][j]).collect()).collect();
    let weights = solve_dense(at, rhs)?;

    // held-out validation on regular m-gons: predicted ∫ h dν̂ + 0·μ-tail
    // versus the measured limit
    let mut validation_residual = 0.0_f64;
    for &gon in &config.validation_gons {
        let body = Polytope::regular_polygon(gon, config.base_radius, 0.0)?;
        let probe = probe_body_limit(oracle, &body, config, &window, &dual, &format!("{gon}-gon"))?;
        let predicted: f64 = directions
            .iter()
            .zip(&weights)
            .map(|(u, w)| w * body.support(u))
            .sum();
        validation_residual = validation_residual.max((predicted - probe.extrapolated).abs());
        probes.push(probe);
    }

    // caller-supplied bodies: probe ∫ h_K dν, shifting bodies that miss the
    // origin through the polygonal ball (h_K = h_{K+B} − h_B)
    for (i, body) in config.extra_bodies.iter().enumerate() {
        let origin = vec![0.0; 2];
        let (estimate, probe) = if body.contains(&origin) {
            let probe =
                probe_body_limit(oracle, body, config, &window, &dual, &format!("body{i}"))?;
            (probe.extrapolated, probe)
        } else {
            let verts = body.vertices2d().ok_or_else(|| {
                Error::InvalidParameter("extra bodies must be planar polygons".into())
            })?;
            let mut points: Vec<[f64; 2]> = Vec::with_capacity(verts.len() * ball_points.len());
            for v in verts {
                for b in &ball_points {
                    points.push([v[0] + b[0], v[1] + b[1]]);
                }
            }
            let shifted = Polytope::hull_of(&points)?;
            let mut probe = probe_body_limit(
                oracle,
                &shifted,
                config,
                &window,
                &dual,
                &format!("body{i}+ball"),
            )?;
            probe.extrapolated -= probes[0].extrapolated;
            (probe.extrapolated, probe)
        };
        let predicted: f64 = directions
            .iter()
            .zip(&weights)
            .map(|(u, w)| w * body.support(u))
            .sum();
        validation_residual = validation_residual.max((predicted - estimate).abs());
        probes.push(probe);
    }

    let recovered_nu_mass = weights.iter().filter(|w| **w > 0.0).sum();
    Ok(DecompositionReport {
        directions,
        weights,
        recovered_nu_mass,
        nu_mass_estimate,
        probes,
        validation_residual,
    })
}

/// Dense Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .expect("finite matrix entries")
            })
            .expect("nonempty column");
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::InvalidParameter(
                "singular probe system; widen the probe family".into(),
            ));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}

/// Report of the monotone-continuity probe along the Pasch–Hausdorff chain
/// `φ_k` (`φ_k* ↓ φ*`, hence `f_k ↑ f`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub k_values: Vec<f64>,
    pub oracle_values: Vec<ExtReal>,
    pub nondecreasing: bool,
    pub limit_value: ExtReal,
    /// `|F(f) − F(f_K)|` for the last chain member, when both are finite
    pub final_gap: Option<f64>,
}

/// Evaluate `F` along the chain `h_{f_k} = φ_k` and against the limit
/// `h_f = φ`; a functional of the representation form must ride the chain
/// monotonically up to `F(f)`.
pub fn monotone_continuity_check(
    oracle: &FunctionalOracle,
    phi: &AnalyticConvexSpec,
    k_sequence: &[f64],
    dual: &GridSpec,
    window: &GridSpec,
) -> Result<MonotoneReport> {
    let mut oracle_values = Vec::with_capacity(k_sequence.len());
    for &k in k_sequence {
        let phi_k = pasch_hausdorff(phi, k)?;
        let f_k = LogConcaveFn::from_support_spec(phi_k, dual.clone(), window.clone())?;
        oracle_values.push(oracle.eval(&f_k)?);
    }
    let nondecreasing = oracle_values.windows(2).all(|w| w[0] <= w[1]);
    let f = LogConcaveFn::from_support_spec(phi.clone(), dual.clone(), window.clone())?;
    let limit_value = oracle.eval(&f)?;
    let final_gap = match (oracle_values.last(), limit_value) {
        (Some(Finite(last)), Finite(lim)) => Some((lim - last).abs()),
        _ => None,
    };
    Ok(MonotoneReport {
        k_values: k_sequence.to_vec(),
        oracle_values,
        nondecreasing,
        limit_value,
        final_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::AnalyticConvexSpec as Spec;

    fn unit_atoms() -> PointMeasure {
        PointMeasure::new(vec![
            (vec![1.0, 0.0], 1.0),
            (vec![0.0, 1.0], 1.0),
            (vec![-1.0, 0.0], 1.0),
            (vec![0.0, -1.0], 1.0),
        ])
        .unwrap()
    }

    fn square_surface() -> SphereMeasure {
        SphereMeasure::new(
            2,
            vec![
                (vec![1.0, 0.0], 1.0),
                (vec![0.0, 1.0], 1.0),
                (vec![-1.0, 0.0], 1.0),
                (vec![0.0, -1.0], 1.0),
            ],
        )
        .unwrap()
    }

    fn gaussian_f() -> LogConcaveFn {
        LogConcaveFn::from_phi_spec(
            Spec::quadratic(1.0),
            GridSpec::symmetric(2, 8.0, 257).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn represented_functional_vanishes_on_origin_masses() {
        let functional = RepresentedFunctional::new(unit_atoms(), square_surface()).unwrap();
        let origin = LogConcaveFn::from_phi_spec(
            Spec::indicator(Polytope::polygon(vec![[0.0, 0.0]]).unwrap()),
            GridSpec::symmetric(2, 1.0, 9).unwrap(),
        )
        .unwrap();
        assert_eq!(functional.evaluate(&origin).unwrap(), Finite(0.0));
    }

    #[test]
    fn represented_functional_is_monotone_by_construction() {
        let functional = RepresentedFunctional::new(unit_atoms(), SphereMeasure::empty(2)).unwrap();
        // h grows with the body: 𝟙_{small} ≤ 𝟙_{large}
        let small = LogConcaveFn::from_phi_spec(
            Spec::indicator(Polytope::rect([-0.5, -0.5], [0.5, 0.5]).unwrap()),
            GridSpec::symmetric(2, 1.0, 17).unwrap(),
        )
        .unwrap();
        let large = LogConcaveFn::from_phi_spec(
            Spec::indicator(Polytope::rect([-1.0, -1.0], [1.0, 1.0]).unwrap()),
            GridSpec::symmetric(2, 2.0, 17).unwrap(),
        )
        .unwrap();
        assert!(functional.evaluate(&small).unwrap() <= functional.evaluate(&large).unwrap());
    }

    #[test]
    fn represented_oracles_are_exactly_linear() {
        let functional = RepresentedFunctional::new(unit_atoms(), square_surface()).unwrap();
        let oracle = FunctionalOracle::Represented(functional);
        let cases = vec![
            AuditCase {
                f: gaussian_f(),
                g: LogConcaveFn::from_phi_spec(
                    Spec::indicator(Polytope::rect([-1.0, -1.0], [1.0, 1.0]).unwrap()),
                    GridSpec::symmetric(2, 2.0, 33).unwrap(),
                )
                .unwrap(),
                alpha: 1.5,
                beta: 0.5,
            },
            AuditCase {
                f: gaussian_f(),
                g: gaussian_f(),
                alpha: 2.0,
                beta: 3.0,
            },
        ];
        let report = axiom_audit(&oracle, &cases).unwrap();
        assert!(report.max_residual <= 1e-8, "{}", report.max_residual);
        assert_eq!(report.monotone_violations, 0);
    }

    #[test]
    fn the_integral_is_not_asplund_linear() {
        // oracle values from closed forms: ∫(f⋆g) = (√(2π)+2)² for the
        // Gaussian and the centered square, while ∫f + ∫g = 2π + 4
        let oracle = FunctionalOracle::Integral;
        let f = gaussian_f();
        let g = LogConcaveFn::from_phi_spec(
            Spec::indicator(Polytope::rect([-1.0, -1.0], [1.0, 1.0]).unwrap()),
            GridSpec::symmetric(2, 2.0, 257).unwrap(),
        )
        .unwrap();
        let case = AuditCase {
            f,
            g,
            alpha: 1.0,
            beta: 1.0,
        };
        let report = axiom_audit(&oracle, &[case]).unwrap();
        let s = (2.0 * std::f64::consts::PI).sqrt() + 2.0;
        let expect = s * s - (2.0 * std::f64::consts::PI + 4.0);
        let got = report.rows[0].linearity_residual.unwrap_finite();
        assert!(
            (got - expect).abs() / expect < 0.02,
            "residual {got}, expected {expect}"
        );
    }

    #[test]
    fn degenerate_identities_have_zero_residual() {
        let grid = GridSpec::symmetric(2, 2.0, 9).unwrap();
        // |x| pinned at p = e₁ (a grid node)
        let r = degenerate_identity_witness(&Spec::norm_multiple(1.0), &[1.0, 0.0], &grid).unwrap();
        assert_eq!(r, 0.0);
        let r = degenerate_identity_witness(&Spec::constant(5.0), &[0.5, -0.5], &grid).unwrap();
        assert_eq!(r, 0.0);
        assert!(degenerate_identity_witness(
            &Spec::indicator(Polytope::rect([0.0, 0.0], [1.0, 1.0]).unwrap()),
            &[2.0, 2.0],
            &grid
        )
        .is_err());
    }

    #[test]
    fn conv_c_sandwich_holds_nodewise() {
        // (φ(0)−ε)·𝟙 + 𝟙_{rB}^∞ ≤ φ + 𝟙_{rB}^∞ ≤ (φ(0)+ε)·𝟙 + 𝟙_{rB}^∞
        // with ε = r for φ = |x| (its modulus of continuity on rB)
        let r = 0.5;
        let eps = r;
        let grid = GridSpec::symmetric(2, 1.0, 33).unwrap();
        let ball = Polytope::regular_polygon(256, r, 0.0).unwrap();
        let phi = Spec::norm_multiple(1.0);
        let mid = Spec::sum(vec![phi.clone(), Spec::indicator(ball.clone())])
            .sample_to_grid(&grid)
            .unwrap();
        let low = Spec::sum(vec![
            Spec::constant(0.0 - eps),
            Spec::indicator(ball.clone()),
        ])
        .sample_to_grid(&grid)
        .unwrap();
        let high = Spec::sum(vec![Spec::constant(0.0 + eps), Spec::indicator(ball)])
            .sample_to_grid(&grid)
            .unwrap();
        for idx in 0..grid.node_count() {
            assert!(low.value(idx) <= mid.value(idx));
            assert!(mid.value(idx) <= high.value(idx));
        }
    }

    #[test]
    fn decomposition_recovers_the_square_surface_measure() {
        let functional = RepresentedFunctional::new(unit_atoms(), square_surface()).unwrap();
        let oracle = FunctionalOracle::Represented(functional);
        let report = decompose_functional(&oracle, &DecomposeConfig::default()).unwrap();
        for (dir, w) in report.directions.iter().zip(&report.weights) {
            let expected = if dir[0].abs() > 0.99 || dir[1].abs() > 0.99 {
                1.0
            } else {
                0.0
            };
            assert!(
                (w - expected).abs() <= 0.05,
                "direction {dir:?}: weight {w}, expected {expected}"
            );
        }
        assert!(report.validation_residual <= 1e-6);
    }

    #[test]
    fn decomposition_of_a_pure_mu_functional_is_null() {
        let functional = RepresentedFunctional::new(unit_atoms(), SphereMeasure::empty(2)).unwrap();
        let oracle = FunctionalOracle::Represented(functional);
        let report = decompose_functional(&oracle, &DecomposeConfig::default()).unwrap();
        for p in &report.probes {
            assert!(
                p.extrapolated.abs() <= 1e-3,
                "{}: {}",
                p.label,
                p.extrapolated
            );
        }
        for w in &report.weights {
            assert!(w.abs() <= 1e-6);
        }
    }

    #[test]
    fn monotone_continuity_along_the_envelope_chain() {
        // μ-only functional: F(f_k) = ∫ φ_k dμ stabilizes exactly once the
        // envelope is the identity near the atoms
        let functional = RepresentedFunctional::new(unit_atoms(), SphereMeasure::empty(2)).unwrap();
        let oracle = FunctionalOracle::Represented(functional);
        let dual = GridSpec::symmetric(2, 8.0, 65).unwrap();
        let window = GridSpec::symmetric(2, 8.0, 65).unwrap();
        let report = monotone_continuity_check(
            &oracle,
            &Spec::quadratic(0.5),
            &[1.0, 2.0, 4.0, 8.0, 16.0],
            &dual,
            &window,
        )
        .unwrap();
        assert!(report.nondecreasing);
        assert_eq!(report.final_gap, Some(0.0));

        // the broken ray-limit oracle leaves a gap: it vanishes along the
        // chain but not on the quadratic limit
        let broken = FunctionalOracle::RayLimit {
            theta: vec![1.0, 0.0],
            alpha: 1.5,
        };
        let report = monotone_continuity_check(
            &broken,
            &Spec::quadratic(0.5),
            &[1.0, 2.0, 4.0],
            &dual,
            &window,
        )
        .unwrap();
        let gap = report.final_gap.expect("both sides finite");
        assert!(gap > 1.0, "gap {gap}");
    }
}
