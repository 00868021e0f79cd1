//! The first variation of the integral,
//! `δ(g,f) = lim_{t→0⁺} (∫ g⋆(t·f) − ∫g)/t`, and the numerical
//! verification of its representation
//! `δ(g,f) = ∫ h_f dμ_g + ∫ h_{K_f} dν_g`.
//!
//! Every level renders `h_g + t·h_f` on a shared dual grid, conjugates it
//! onto a quadrature box scaled by `(1 + t·ρ)` (ρ a radius surrogate of
//! `K_f`, so the box tracks the Minkowski growth of the support and keeps
//! polytope edges on grid nodes), and integrates. The one-sided derivative
//! is Richardson-extrapolated over the halving sequence
//! `t₀, t₀/2, …, t₀/2^levels`; `∫g` itself goes through the same conjugate
//! path so the PL rendering bias cancels in the quotients. The limit lives
//! in `(−∞, ∞]`: unbounded quotient growth is reported as `+∞` by the
//! divergence detector, and sequences between clean convergence and the
//! detector thresholds are reported as indeterminate, not guessed.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, Infinity};
use crate::grid::GridSpec;
use crate::legendre::legendre_transform;
use crate::logconcave::{integral_of_phi_grid, support_value_spec, LogConcaveFn};
use crate::measures::{
    integrate_against_point, integrate_against_sphere, moment_measure, surface_measure,
    PointMeasure,
};
use crate::recession::support_body_value;
use serde::{Deserialize, Serialize};

/// Parameters of the limit computation.
#[derive(Clone, Debug)]
pub struct VariationConfig {
    /// largest step of the halving sequence
    pub t0: f64,
    /// number of halvings below `t0`
    pub levels: usize,
    /// grid carrying `h_g + t·h_f`
    pub dual_grid: GridSpec,
    /// quadrature box at `t = 0`; axis `a` is scaled by
    /// `(1 + t·window_growth[a])` per level
    pub base_window: GridSpec,
    /// per-axis radius surrogates of `K_f` driving the box growth; polytope
    /// edges that sit on node fractions of the base box stay on nodes as
    /// the box tracks the Minkowski growth of the support
    pub window_growth: Vec<f64>,
    /// relative agreement of successive Richardson extrapolants that counts
    /// as convergence
    pub rel_tol: f64,
    /// quotient growth over three consecutive halvings that counts as
    /// divergence
    pub divergence_growth: f64,
    /// absolute quotient floor the divergence verdict must clear
    pub divergence_floor: f64,
}

impl VariationConfig {
    pub fn new(dual_grid: GridSpec, base_window: GridSpec) -> VariationConfig {
        let dim = base_window.dim();
        VariationConfig {
            t0: 0.1,
            levels: 6,
            dual_grid,
            base_window,
            window_growth: vec![1.0; dim],
            rel_tol: 5e-3,
            divergence_growth: 2.0,
            divergence_floor: 100.0,
        }
    }

    pub fn with_growth(mut self, growth: Vec<f64>) -> VariationConfig {
        self.window_growth = growth;
        self
    }
}

/// The verdict on the one-sided limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaEstimate {
    Finite { value: f64 },
    PlusInfinity,
    Indeterminate,
}

impl DeltaEstimate {
    pub fn to_extreal(self) -> Result<ExtReal> {
        match self {
            DeltaEstimate::Finite { value } => Ok(Finite(value)),
            DeltaEstimate::PlusInfinity => Ok(Infinity),
            DeltaEstimate::Indeterminate => Err(Error::IndeterminateVariation),
        }
    }
}

/// The t-sequence diagnostics and the verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariationEstimate {
    pub delta: DeltaEstimate,
    pub integral_g: f64,
    pub t_values: Vec<f64>,
    pub integral_values: Vec<f64>,
    pub quotients: Vec<f64>,
    pub extrapolants: Vec<f64>,
}

/// Compute `δ(g,f)` by one-sided differentiation of `t ↦ ∫ g⋆(t·f)`.
pub fn first_variation(
    g: &LogConcaveFn,
    f: &LogConcaveFn,
    config: &VariationConfig,
) -> Result<VariationEstimate> {
    if g.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: f.dim(),
        });
    }
    let hg = g.support_function(&config.dual_grid)?;
    let hf = f.support_function(&config.dual_grid)?;

    let phi0 = legendre_transform(&hg, &config.base_window)?;
    let integral_g = integral_of_phi_grid(&phi0)?;
    if !integral_g.is_finite() || integral_g <= 0.0 {
        return Err(Error::Improper(format!(
            "∫g = {integral_g} is not in (0, ∞)"
        )));
    }

    let mut t_values = Vec::with_capacity(config.levels + 1);
    let mut integral_values = Vec::with_capacity(config.levels + 1);
    let mut quotients = Vec::with_capacity(config.levels + 1);
    for j in 0..=config.levels {
        let t = config.t0 / (1u64 << j) as f64;
        let h_t: Vec<ExtReal> = hg
            .values()
            .iter()
            .zip(hf.values())
            .map(|(&a, &b)| a + b.scale(t))
            .collect();
        let h_t = crate::grid::ConvexGridFunction::new(config.dual_grid.clone(), h_t)
            .map_err(|_| Error::Improper("h_g + t·h_f is identically +∞".into()))?;
        let factors: Vec<f64> = config
            .window_growth
            .iter()
            .map(|rho| 1.0 + t * rho)
            .collect();
        let window = config.base_window.scaled_axes(&factors);
        let phi_t = legendre_transform(&h_t, &window)?;
        let integral_t = integral_of_phi_grid(&phi_t)?;
        t_values.push(t);
        integral_values.push(integral_t);
        quotients.push((integral_t - integral_g) / t);
    }

    let extrapolants: Vec<f64> = quotients.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();

    let delta = classify(&quotients, &extrapolants, config);
    Ok(VariationEstimate {
        delta,
        integral_g,
        t_values,
        integral_values,
        quotients,
        extrapolants,
    })
}

fn classify(quotients: &[f64], extrapolants: &[f64], config: &VariationConfig) -> DeltaEstimate {
    let n = extrapolants.len();
    if n >= 2 {
        let (a, b) = (extrapolants[n - 2], extrapolants[n - 1]);
        if (a - b).abs() <= config.rel_tol * b.abs().max(1.0) {
            return DeltaEstimate::Finite { value: b };
        }
    }
    // sustained growth: the final three halvings each increase the quotient
    // and together more than double it, above the absolute floor
    let m = quotients.len();
    if m >= 4 {
        let tail = &quotients[m - 4..];
        let increasing = tail.windows(2).all(|w| w[1] > w[0]);
        let doubled = tail[3] > config.divergence_growth * tail[0].max(f64::MIN_POSITIVE);
        if increasing && doubled && tail[3] > config.divergence_floor {
            return DeltaEstimate::PlusInfinity;
        }
    }
    DeltaEstimate::Indeterminate
}

/// Configuration of the representation check.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub variation: VariationConfig,
    /// grid carrying the moment-measure pushforward of g
    pub measure_grid: GridSpec,
    /// quadrature panels per facet of the surface measure
    pub edge_quadrature: usize,
}

/// The two-sided comparison `δ(g,f)` versus `∫h_f dμ_g + ∫h_{K_f} dν_g`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariationReport {
    pub delta: DeltaEstimate,
    pub mu_term: ExtReal,
    pub nu_term: ExtReal,
    /// `mu_term + nu_term` in extended-real arithmetic
    pub representation_total: ExtReal,
    /// `|δ − total| / max(1, |δ|)`; present only when both sides are finite
    pub relative_gap: Option<f64>,
    pub nu_mass: f64,
    pub mu_mass: f64,
    pub t_values: Vec<f64>,
    pub integral_values: Vec<f64>,
    pub quotients: Vec<f64>,
}

/// Verify the representation of the first variation: the μ-term integrates
/// `h_f` against the moment measure of g (exact symbolic `h_f` whenever the
/// representation provides one), the ν-term integrates `h_{K_f}` against
/// the surface measure of g on the exact polytope path (empty for full
/// supports, which are essentially continuous).
pub fn verify_representation(
    g: &LogConcaveFn,
    f: &LogConcaveFn,
    config: &VerifyConfig,
) -> Result<VariationReport> {
    let estimate = first_variation(g, f, &config.variation)?;

    let mu = moment_measure(g, &config.measure_grid)?;
    let mu_term = mu_term(f, &mu, &config.variation.dual_grid)?;

    let nu = surface_measure(g, config.edge_quadrature)?;
    let nu_term = integrate_against_sphere(|th| support_body_value(f, th), &nu)?;

    let representation_total = mu_term + nu_term;
    let relative_gap = match (estimate.delta, representation_total) {
        (DeltaEstimate::Finite { value }, Finite(total)) => {
            Some((value - total).abs() / value.abs().max(1.0))
        }
        _ => None,
    };
    Ok(VariationReport {
        delta: estimate.delta,
        mu_term,
        nu_term,
        representation_total,
        relative_gap,
        nu_mass: nu.total_mass(),
        mu_mass: mu.total_mass(),
        t_values: estimate.t_values,
        integral_values: estimate.integral_values,
        quotients: estimate.quotients,
    })
}

/// `∫ h_f dμ`: exact symbolic `h_f` when available, PL-interpolated grid
/// rendering otherwise.
pub fn mu_term(f: &LogConcaveFn, mu: &PointMeasure, dual_grid: &GridSpec) -> Result<ExtReal> {
    if let Some(h) = support_value_spec(f) {
        return integrate_against_point(|x| h.evaluate(x), mu);
    }
    let h = f.support_function(dual_grid)?;
    integrate_against_point(|x| h.interpolate(x), mu)
}

/// Essential continuity probe: g is essentially continuous iff `ν_g ≡ 0`.
/// Returns the verdict and the ν-mass; `floor` absorbs quadrature dust for
/// densities that vanish on the boundary to machine precision.
pub fn essential_continuity_probe(
    g: &LogConcaveFn,
    edge_quadrature: usize,
    floor: f64,
) -> Result<(bool, f64)> {
    let nu = surface_measure(g, edge_quadrature)?;
    let mass = nu.total_mass();
    Ok((mass <= floor, mass))
}
