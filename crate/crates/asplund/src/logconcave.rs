//! The log-concave layer: `f = e^{−φ}` with φ convex, the support function
//! `h_f = (−log f)*`, the Asplund sum (sup-convolution), dilation, integrals
//! and coercivity classification.
//!
//! A `LogConcaveFn` is represented either by φ (symbolically or on a grid)
//! or by its support function `h_f` (symbolically or on a dual grid). Sums
//! and dilations act on the support side, where they are exact: the Asplund
//! sum adds support functions, the dilation scales them. The φ-side grid is
//! produced by one Legendre transform when quadrature needs it.

use crate::analytic::{AnalyticConvexSpec, Polytope};
use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, Infinity};
use crate::grid::{ConvexGridFunction, GridSpec};
use crate::legendre::{auto_dual_grid, legendre_transform};
use crate::recession;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// How the function is stored: by `φ = −log f` or by `h_f`.
#[derive(Clone, Debug)]
pub enum FnRepr {
    PhiAnalytic(AnalyticConvexSpec),
    PhiGrid(ConvexGridFunction),
    SupportAnalytic {
        spec: AnalyticConvexSpec,
        dual_grid: GridSpec,
    },
    SupportGrid(ConvexGridFunction),
}

/// An upper semi-continuous log-concave function `f = e^{−φ}` together with
/// its quadrature window. `f ≤ 1` is not required: φ may take negative
/// values. The support-function cache is populated eagerly by
/// [`LogConcaveFn::support_function`] and is idempotent.
#[derive(Clone, Debug)]
pub struct LogConcaveFn {
    repr: FnRepr,
    window: GridSpec,
    h_cache: OnceLock<(GridSpec, ConvexGridFunction)>,
}

impl LogConcaveFn {
    pub fn from_phi_spec(spec: AnalyticConvexSpec, window: GridSpec) -> Result<Self> {
        spec.validate()?;
        if let Some(d) = spec.dim() {
            if d != window.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: window.dim(),
                });
            }
        }
        Ok(LogConcaveFn {
            repr: FnRepr::PhiAnalytic(spec),
            window,
            h_cache: OnceLock::new(),
        })
    }

    pub fn from_phi_grid(phi: ConvexGridFunction) -> Self {
        let window = phi.grid().clone();
        LogConcaveFn {
            repr: FnRepr::PhiGrid(phi),
            window,
            h_cache: OnceLock::new(),
        }
    }

    /// Build from a symbolic support function `h_f`; `dual_grid` is where
    /// `h_f` is rendered when grid passes need it.
    pub fn from_support_spec(
        spec: AnalyticConvexSpec,
        dual_grid: GridSpec,
        window: GridSpec,
    ) -> Result<Self> {
        spec.validate()?;
        Ok(LogConcaveFn {
            repr: FnRepr::SupportAnalytic { spec, dual_grid },
            window,
            h_cache: OnceLock::new(),
        })
    }

    pub fn from_support_grid(h: ConvexGridFunction, window: GridSpec) -> Self {
        LogConcaveFn {
            repr: FnRepr::SupportGrid(h),
            window,
            h_cache: OnceLock::new(),
        }
    }

    pub fn repr(&self) -> &FnRepr {
        &self.repr
    }

    pub fn window(&self) -> &GridSpec {
        &self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    /// Same function, new quadrature window.
    pub fn with_window(&self, window: GridSpec) -> Self {
        LogConcaveFn {
            repr: self.repr.clone(),
            window,
            h_cache: OnceLock::new(),
        }
    }

    /// The symbolic φ, when the function is stored that way.
    pub fn phi_spec(&self) -> Option<&AnalyticConvexSpec> {
        match &self.repr {
            FnRepr::PhiAnalytic(s) => Some(s),
            _ => None,
        }
    }

    /// The symbolic support function, when stored that way.
    pub fn support_spec(&self) -> Option<&AnalyticConvexSpec> {
        match &self.repr {
            FnRepr::SupportAnalytic { spec, .. } => Some(spec),
            _ => None,
        }
    }

    /// φ rendered on an arbitrary grid. Exact at nodes for analytic φ;
    /// PL-interpolated for grid φ; one Legendre transform away for
    /// support-side representations.
    pub fn phi_on(&self, grid: &GridSpec) -> Result<ConvexGridFunction> {
        match &self.repr {
            FnRepr::PhiAnalytic(spec) => spec.sample_to_grid(grid),
            FnRepr::PhiGrid(phi) => {
                if phi.grid() == grid {
                    Ok(phi.clone())
                } else {
                    let values: Vec<ExtReal> = (0..grid.node_count())
                        .map(|idx| {
                            let x = grid.node_point(idx);
                            phi.interpolate(&x).unwrap_or(Infinity)
                        })
                        .collect();
                    ConvexGridFunction::new(grid.clone(), values)
                }
            }
            FnRepr::SupportAnalytic { spec, dual_grid } => {
                let h = spec.sample_to_grid(dual_grid)?;
                legendre_transform(&h, grid)
            }
            FnRepr::SupportGrid(h) => legendre_transform(h, grid),
        }
    }

    /// φ on the quadrature window.
    pub fn phi_grid(&self) -> Result<ConvexGridFunction> {
        self.phi_on(&self.window)
    }

    /// The support function `h_f = (−log f)*` on `dual_grid`, populating the
    /// cache on first use. For φ-side representations this is one exact
    /// discrete Legendre transform; for support-side representations it is a
    /// direct rendering.
    pub fn support_function(&self, dual_grid: &GridSpec) -> Result<ConvexGridFunction> {
        if let Some((g, h)) = self.h_cache.get() {
            if g == dual_grid {
                return Ok(h.clone());
            }
        }
        let h = match &self.repr {
            FnRepr::PhiAnalytic(spec) => {
                let phi = spec.sample_to_grid(&self.window)?;
                legendre_transform(&phi, dual_grid)?
            }
            FnRepr::PhiGrid(phi) => legendre_transform(phi, dual_grid)?,
            FnRepr::SupportAnalytic { spec, .. } => spec.sample_to_grid(dual_grid)?,
            FnRepr::SupportGrid(stored) => {
                if stored.grid() == dual_grid {
                    stored.clone()
                } else {
                    let values: Vec<ExtReal> = (0..dual_grid.node_count())
                        .map(|idx| {
                            let y = dual_grid.node_point(idx);
                            stored.interpolate(&y).unwrap_or(Infinity)
                        })
                        .collect();
                    ConvexGridFunction::new(dual_grid.clone(), values)?
                }
            }
        };
        let _ = self.h_cache.set((dual_grid.clone(), h.clone()));
        Ok(h)
    }

    /// A dual grid adapted to this function's slope range.
    pub fn default_dual_grid(&self) -> Result<GridSpec> {
        match &self.repr {
            FnRepr::SupportAnalytic { dual_grid, .. } => Ok(dual_grid.clone()),
            FnRepr::SupportGrid(h) => Ok(h.grid().clone()),
            _ => {
                let phi = self.phi_grid()?;
                if phi.values().iter().any(|v| v.is_infinite()) {
                    // bounded support: h_f is kinked-linear, exact on any
                    // dual grid, and the dual radius is a ramp-resolution
                    // choice — 32/spacing drives the density below e^{−32}
                    // one cell outside the support
                    let min_h = (0..self.window.dim())
                        .map(|a| self.window.spacing(a))
                        .fold(f64::INFINITY, f64::min);
                    GridSpec::symmetric(
                        self.window.dim(),
                        32.0 / min_h,
                        self.window.points_per_axis(),
                    )
                } else {
                    auto_dual_grid(&phi, self.window.points_per_axis())
                }
            }
        }
    }

    /// CSV rows `x1[,x2],f` with the density `f = e^{−φ}` at the window
    /// nodes (0 at infinite nodes). Deterministic byte output.
    pub fn write_density_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let phi = self.phi_grid()?;
        let grid = phi.grid();
        match grid.dim() {
            1 => writeln!(w, "x,f")?,
            _ => writeln!(w, "x1,x2,f")?,
        }
        for idx in 0..grid.node_count() {
            for c in grid.node_point(idx) {
                write!(w, "{c},")?;
            }
            let f = match phi.value(idx) {
                ExtReal::Finite(v) => (-v).exp(),
                ExtReal::Infinity => 0.0,
            };
            writeln!(w, "{f}")?;
        }
        Ok(())
    }

    /// Trapezoidal quadrature of `e^{−φ}` over the window, with a closed
    /// form for the pure Gaussian `φ = a|x|²/2` (translations included) and
    /// an exact zero for measure-zero supports. Errors when the boundary
    /// values show the window truncates mass.
    pub fn integral(&self) -> Result<f64> {
        if let FnRepr::PhiAnalytic(spec) = &self.repr {
            if let Some(a) = gaussian_scale(spec) {
                let n = self.window.dim() as f64;
                return Ok((2.0 * std::f64::consts::PI / a).powf(n / 2.0));
            }
            if let Some(shape) = support_shape(spec) {
                if shape_is_degenerate(&shape) {
                    return Ok(0.0);
                }
            }
        }
        let phi = self.phi_grid()?;
        integral_of_phi_grid(&phi)
    }
}

/// Trapezoidal quadrature of `e^{−φ}`: every cell contributes the mean of
/// its corner densities times the cell volume, and cells touching a `+∞`
/// node contribute nothing — beyond the finite-node hull the interpolant
/// means `f = 0`, so sharp support edges that sit on grid nodes integrate
/// exactly. Errors when a boundary node carries `e^{−φ} ≥ 1e−12` of the
/// peak (the window truncates mass).
pub fn integral_of_phi_grid(phi: &ConvexGridFunction) -> Result<f64> {
    let grid = phi.grid();
    let p = grid.points_per_axis();
    let min_phi = phi
        .min_finite()
        .ok_or_else(|| Error::Improper("no finite nodes".into()))?;
    let density = |v: ExtReal| -> Option<f64> {
        match v {
            Finite(t) => Some((-(t - min_phi)).exp()),
            Infinity => None,
        }
    };

    // boundary truncation check
    for idx in 0..grid.node_count() {
        let multi = match grid.dim() {
            1 => vec![idx],
            _ => vec![idx / p, idx % p],
        };
        if multi.iter().any(|&k| k == 0 || k == p - 1) {
            if let Some(d) = density(phi.value(idx)) {
                if d >= 1e-12 {
                    return Err(Error::Truncation(format!(
                        "boundary node at {:?} carries relative density {d:.3e} >= 1e-12",
                        grid.node_point(idx)
                    )));
                }
            }
        }
    }

    let mut sum = 0.0;
    match grid.dim() {
        1 => {
            for i in 0..p - 1 {
                if let (Some(a), Some(b)) = (density(phi.value(i)), density(phi.value(i + 1))) {
                    sum += 0.5 * (a + b);
                }
            }
        }
        _ => {
            for i in 0..p - 1 {
                for j in 0..p - 1 {
                    let corners = [
                        density(phi.value(i * p + j)),
                        density(phi.value((i + 1) * p + j)),
                        density(phi.value(i * p + j + 1)),
                        density(phi.value((i + 1) * p + j + 1)),
                    ];
                    if let [Some(a), Some(b), Some(c), Some(d)] = corners {
                        sum += 0.25 * (a + b + c + d);
                    }
                }
            }
        }
    }
    let cell: f64 = (0..grid.dim()).map(|a| grid.spacing(a)).product();
    Ok(sum * cell * (-min_phi).exp())
}

fn gaussian_scale(spec: &AnalyticConvexSpec) -> Option<f64> {
    match spec {
        AnalyticConvexSpec::Quadratic { scale } if *scale > 0.0 => Some(*scale),
        AnalyticConvexSpec::Translated { inner, .. } => gaussian_scale(inner),
        _ => None,
    }
}

/// The support shape of `e^{−φ}` read off the structure of φ: the
/// intersection of the indicator members, or full space when none occur.
#[derive(Clone, Debug)]
pub enum SupportShape {
    Full,
    Polytope(Polytope),
}

pub(crate) fn shape_is_degenerate(shape: &SupportShape) -> bool {
    match shape {
        SupportShape::Full => false,
        SupportShape::Polytope(Polytope::Interval { a, b }) => a == b,
        SupportShape::Polytope(Polytope::Polygon { vertices }) => vertices.len() < 3,
    }
}

/// Structural support of `e^{−φ}` for an analytic φ. `None` when the
/// structure mixes indicators in a way the desk-scale reader does not
/// resolve (then grid paths take over).
pub fn support_shape(spec: &AnalyticConvexSpec) -> Option<SupportShape> {
    use AnalyticConvexSpec as S;
    match spec {
        S::IndicatorPolytope { polytope } => Some(SupportShape::Polytope(polytope.clone())),
        S::Quadratic { .. }
        | S::NormMultiple { .. }
        | S::Affine { .. }
        | S::RhoA { .. }
        | S::Huber { .. }
        | S::RadialPl { .. }
        | S::SupportOfPolytope { .. }
        | S::ShiftedCone { .. }
        | S::Constant { .. } => Some(SupportShape::Full),
        S::Scaled { inner, .. } => support_shape(inner),
        S::Translated { offset, inner } => match support_shape(inner)? {
            SupportShape::Full => Some(SupportShape::Full),
            SupportShape::Polytope(p) => {
                Some(SupportShape::Polytope(translate_polytope(&p, offset)))
            }
        },
        S::Dilated { lambda, inner } => match support_shape(inner)? {
            SupportShape::Full => Some(SupportShape::Full),
            SupportShape::Polytope(p) => Some(SupportShape::Polytope(scale_polytope(&p, *lambda))),
        },
        S::Sum { terms } | S::Max { terms } => {
            let mut shape = SupportShape::Full;
            for t in terms {
                match (shape, support_shape(t)?) {
                    (SupportShape::Full, s) => shape = s,
                    (s, SupportShape::Full) => shape = s,
                    // two distinct polytope factors: unresolved at desk scale
                    _ => return None,
                }
            }
            Some(shape)
        }
    }
}

fn translate_polytope(p: &Polytope, offset: &[f64]) -> Polytope {
    match p {
        Polytope::Interval { a, b } => Polytope::Interval {
            a: a + offset[0],
            b: b + offset[0],
        },
        Polytope::Polygon { vertices } => Polytope::Polygon {
            vertices: vertices
                .iter()
                .map(|v| [v[0] + offset[0], v[1] + offset[1]])
                .collect(),
        },
    }
}

fn scale_polytope(p: &Polytope, lambda: f64) -> Polytope {
    match p {
        Polytope::Interval { a, b } => Polytope::Interval {
            a: a * lambda,
            b: b * lambda,
        },
        Polytope::Polygon { vertices } => Polytope::Polygon {
            vertices: vertices
                .iter()
                .map(|v| [v[0] * lambda, v[1] * lambda])
                .collect(),
        },
    }
}

/// Grid choices for the Asplund sum. Defaults derive a common dual grid
/// from both operands and take the Minkowski sum of the windows.
#[derive(Clone, Debug, Default)]
pub struct AsplundParams {
    pub dual_grid: Option<GridSpec>,
    pub window: Option<GridSpec>,
}

/// The sup-convolution `(f⋆g)(x) = sup_y f(y)·g(x−y)`, computed on the
/// support side: `h_{f⋆g} = h_f + h_g`, then one conjugation produces the
/// φ-grid when needed. The result is the closed (upper semi-continuous)
/// representative; boundary values of the summed support are reported as
/// the closed values.
pub fn asplund_sum(
    f: &LogConcaveFn,
    g: &LogConcaveFn,
    params: &AsplundParams,
) -> Result<LogConcaveFn> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let dual = match &params.dual_grid {
        Some(d) => d.clone(),
        None => {
            let df = f.default_dual_grid()?;
            let dg = g.default_dual_grid()?;
            let lower: Vec<f64> = df
                .lower()
                .iter()
                .zip(dg.lower())
                .map(|(a, b)| a.min(*b))
                .collect();
            let upper: Vec<f64> = df
                .upper()
                .iter()
                .zip(dg.upper())
                .map(|(a, b)| a.max(*b))
                .collect();
            GridSpec::new(lower, upper, df.points_per_axis().max(dg.points_per_axis()))?
        }
    };
    let window = match &params.window {
        Some(w) => w.clone(),
        None => f.window().box_sum(g.window())?,
    };
    let hf = f.support_function(&dual)?;
    let hg = g.support_function(&dual)?;
    let h_sum: Vec<ExtReal> = hf
        .values()
        .iter()
        .zip(hg.values())
        .map(|(&a, &b)| a + b)
        .collect();
    let h = ConvexGridFunction::new(dual, h_sum).map_err(|_| {
        Error::Improper("Asplund sum is improper: h_f + h_g is identically +∞".into())
    })?;
    Ok(LogConcaveFn::from_support_grid(h, window))
}

/// The dilation `(λ·f)(x) = f(x/λ)^λ`, i.e. `h_{λ·f} = λ·h_f`; exact on
/// each representation.
pub fn dilate(lambda: f64, f: &LogConcaveFn) -> Result<LogConcaveFn> {
    if lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "dilation needs λ > 0, got {lambda}"
        )));
    }
    let repr = match &f.repr {
        FnRepr::PhiAnalytic(spec) => FnRepr::PhiAnalytic(AnalyticConvexSpec::Dilated {
            lambda,
            inner: Box::new(spec.clone()),
        }),
        FnRepr::PhiGrid(phi) => FnRepr::PhiGrid(phi.epi_dilate(lambda)?),
        FnRepr::SupportAnalytic { spec, dual_grid } => FnRepr::SupportAnalytic {
            spec: spec.clone().scaled(lambda),
            dual_grid: dual_grid.clone(),
        },
        FnRepr::SupportGrid(h) => FnRepr::SupportGrid(h.scale(lambda)?),
    };
    Ok(LogConcaveFn {
        repr,
        window: f.window.scaled(lambda),
        h_cache: OnceLock::new(),
    })
}

/// Coercivity classes of a convex function, ordered: super-coercive
/// functions are coercive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoercivityClass {
    NotCoercive,
    Coercive,
    SuperCoercive,
}

/// Linear-growth witnesses: `φ(x) ≤ A|x| + B` everywhere.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LinearGrowth {
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoercivityReport {
    pub class: CoercivityClass,
    pub linear_growth: Option<LinearGrowth>,
}

/// Classify an analytic φ by its recession behavior: coercive iff the
/// recession function is positive in every direction, super-coercive iff it
/// is `+∞` in every direction, linear growth iff it is bounded above and φ
/// is finite everywhere. Directional extremes are exact per direction and
/// scanned over a dense direction set in dimension 2.
pub fn classify_coercivity_spec(spec: &AnalyticConvexSpec, dim: usize) -> Result<CoercivityReport> {
    spec.validate()?;
    if let Some(d) = spec.dim() {
        if d != dim {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: dim,
            });
        }
    }
    if recession::domain_is_bounded(spec) {
        // +∞ outside a compact set: φ(x)/|x| → ∞ trivially.
        return Ok(CoercivityReport {
            class: CoercivityClass::SuperCoercive,
            linear_growth: None,
        });
    }
    let dirs = recession::scan_directions(dim, 4096);
    let mut min_rec = Infinity;
    let mut max_rec = Finite(f64::NEG_INFINITY);
    for th in &dirs {
        let r = recession::recession_value_spec(spec, th)?;
        min_rec = min_rec.min(r);
        max_rec = max_rec.max(r);
    }
    let class = if min_rec == Infinity {
        CoercivityClass::SuperCoercive
    } else if min_rec > Finite(0.0) {
        CoercivityClass::Coercive
    } else {
        CoercivityClass::NotCoercive
    };
    let linear_growth = match max_rec {
        Finite(a) if recession::everywhere_finite(spec) => {
            let b = spec
                .evaluate(&vec![0.0; dim])?
                .finite()
                .expect("everywhere-finite φ is finite at 0");
            Some(LinearGrowth { a, b })
        }
        _ => None,
    };
    Ok(CoercivityReport {
        class,
        linear_growth,
    })
}

/// Grid functions extend by `+∞` outside their box, so the PL-extended
/// function is always super-coercive and never of (global) linear growth.
pub fn classify_coercivity_grid(_phi: &ConvexGridFunction) -> CoercivityReport {
    CoercivityReport {
        class: CoercivityClass::SuperCoercive,
        linear_growth: None,
    }
}

/// Closed-form Legendre conjugate of an analytic spec, for the variants
/// where one exists: quadratics and indicator/support pairs, carried
/// through translation, scaling and dilation by the conjugate calculus
/// `(φ(·−b))* = φ* + ⟨b,·⟩`, `(cφ)* = c·φ*(·/c)`, `(λφ(·/λ))* = λφ*`.
pub fn conjugate_spec(spec: &AnalyticConvexSpec) -> Option<AnalyticConvexSpec> {
    use AnalyticConvexSpec as S;
    match spec {
        S::Quadratic { scale } if *scale > 0.0 => Some(S::Quadratic { scale: 1.0 / scale }),
        S::IndicatorPolytope { polytope } => Some(S::SupportOfPolytope {
            polytope: polytope.clone(),
        }),
        S::SupportOfPolytope { polytope } => Some(S::IndicatorPolytope {
            polytope: polytope.clone(),
        }),
        S::Affine { slope, offset } => Some(S::Sum {
            terms: vec![
                S::IndicatorPolytope {
                    polytope: Polytope::point(slope).ok()?,
                },
                S::Constant { c: -offset },
            ],
        }),
        S::Translated { offset, inner } => Some(S::Sum {
            terms: vec![
                conjugate_spec(inner)?,
                S::Affine {
                    slope: offset.clone(),
                    offset: 0.0,
                },
            ],
        }),
        S::Scaled { factor, inner } => Some(S::Dilated {
            lambda: *factor,
            inner: Box::new(conjugate_spec(inner)?),
        }),
        S::Dilated { lambda, inner } => Some(S::Scaled {
            factor: *lambda,
            inner: Box::new(conjugate_spec(inner)?),
        }),
        _ => None,
    }
}

/// Exact support-function evaluation for this function when its
/// representation admits one (symbolic `h` or a φ with a closed-form
/// conjugate).
pub fn support_value_spec(f: &LogConcaveFn) -> Option<AnalyticConvexSpec> {
    match f.repr() {
        FnRepr::SupportAnalytic { spec, .. } => Some(spec.clone()),
        FnRepr::PhiAnalytic(spec) => conjugate_spec(spec),
        _ => None,
    }
}
