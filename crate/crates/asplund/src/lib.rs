//! Numerical convex analysis for log-concave functions.
//!
//! The crate implements the calculus of log-concave functions
//! `f = e^{−φ}` with φ convex: the discrete Legendre transform and
//! biconjugation of extended-real grid functions, the Asplund sum
//! (sup-convolution) and dilation through support functions, recession
//! functions and Pasch–Hausdorff envelopes, moment and surface measures,
//! the first variation of the integral `δ(g,f)`, and a harness that
//! verifies the Riesz-type representation
//! `F(f) = ∫ h_f dμ + ∫ h_{K_f} dν` at desk scale.
//!
//! Grid functions mean their piecewise-linear interpolants extended by
//! `+∞` outside the box; conjugation of that meaning is exact, so all
//! discretization lives in the modeling step, not in the transform.
//! All operations are pure functions of immutable inputs; independent
//! lines, directions and probes are processed in parallel where it helps.
//!
//! ```
//! use asplund::{AnalyticConvexSpec, GridSpec, LogConcaveFn};
//!
//! // the standard Gaussian f = e^{−|x|²/2} on a quadrature window
//! let f = LogConcaveFn::from_phi_spec(
//!     AnalyticConvexSpec::quadratic(1.0),
//!     GridSpec::symmetric(1, 8.0, 257)?,
//! )?;
//! assert!((f.integral()? - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-9);
//!
//! // its support function h_f = (−log f)* is the dual quadratic |y|²/2
//! let h = f.support_function(&GridSpec::symmetric(1, 4.0, 129)?)?;
//! let at_two = h.value(128).unwrap_finite(); // y = 4 is the last node
//! assert!((at_two - 8.0).abs() < 1e-2);
//! # Ok::<(), asplund::Error>(())
//! ```

pub mod analytic;
pub mod error;
pub mod extreal;
pub mod grid;
pub mod legendre;
pub mod logconcave;
pub mod measures;
pub mod recession;
pub mod riesz;
pub mod variation;

pub use analytic::{AnalyticConvexSpec, Polytope};
pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use grid::{pointwise_combine, CombineOp, ConvexGridFunction, GridSpec};
pub use legendre::{auto_dual_grid, biconjugate, conjugate_at, legendre_transform};
pub use logconcave::{
    asplund_sum, classify_coercivity_grid, classify_coercivity_spec, dilate, AsplundParams,
    CoercivityClass, CoercivityReport, LogConcaveFn,
};
pub use measures::{
    integrate_against_point, integrate_against_sphere, minkowski_check, moment_measure,
    surface_measure, MinkowskiReport, MinkowskiTolerances, PointMeasure, SphereMeasure,
};
pub use recession::{
    divergence_witness, dominating_growth, pasch_hausdorff, pasch_hausdorff_grid,
    recession_function, support_body_function, DirectionGrid, RecessionFunction, RecessionMethod,
};
pub use riesz::{
    axiom_audit, decompose_functional, degenerate_identity_witness, monotone_continuity_check,
    AuditCase, DecomposeConfig, DecompositionReport, FunctionalOracle, RepresentedFunctional,
};
pub use variation::{
    essential_continuity_probe, first_variation, verify_representation, DeltaEstimate,
    VariationConfig, VariationEstimate, VariationReport, VerifyConfig,
};
