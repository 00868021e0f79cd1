//! Property suites for the structural invariants: conjugation reverses
//! order, biconjugation is the identity on convex data, transforms of
//! lines stay convex, the 2-D transform equals brute-force maximization,
//! and the support-function calculus is linear over the Asplund cone.

use asplund::analytic::AnalyticConvexSpec as Spec;
use asplund::extreal::{ExtReal, Finite};
use asplund::{
    asplund_sum, biconjugate, conjugate_at, dilate, legendre_transform, AsplundParams,
    ConvexGridFunction, GridSpec, LogConcaveFn, Polytope,
};
use proptest::prelude::*;

/// Convex 1-D node data from nonnegative second differences.
fn convex_line(n: usize) -> impl Strategy<Value = Vec<f64>> {
    (
        -2.0..2.0_f64,
        -3.0..3.0_f64,
        prop::collection::vec(0.0..1.5_f64, n.saturating_sub(2)),
    )
        .prop_map(|(v0, slope0, curvs)| {
            let mut vals = Vec::with_capacity(curvs.len() + 2);
            let mut v = v0;
            let mut s = slope0;
            vals.push(v);
            v += s;
            vals.push(v);
            for c in curvs {
                s += c;
                v += s;
                vals.push(v);
            }
            vals
        })
}

/// Arbitrary bounded 1-D node data.
fn any_line(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0_f64, n)
}

fn to_grid(vals: &[f64], radius: f64) -> ConvexGridFunction {
    let grid = GridSpec::new(vec![-radius], vec![radius], vals.len()).unwrap();
    ConvexGridFunction::new(grid, vals.iter().map(|&v| Finite(v)).collect()).unwrap()
}

/// A dimension-generic convex spec of bounded size.
fn leaf_spec() -> impl Strategy<Value = Spec> {
    prop_oneof![
        (0.1..3.0_f64).prop_map(Spec::quadratic),
        (0.0..2.0_f64).prop_map(Spec::norm_multiple),
        (0.2..2.0_f64).prop_map(Spec::rho_a),
        ((0.2..2.0_f64), (0.2..2.0_f64)).prop_map(|(k, a)| Spec::Huber {
            k,
            quadratic_scale: a
        }),
        (-1.0..1.0_f64).prop_map(Spec::constant),
        ((3usize..8), (0.5..2.0_f64), (0.0..1.0_f64)).prop_map(|(m, r, rot)| Spec::support_of(
            Polytope::regular_polygon(m, r, rot).unwrap()
        )),
    ]
}

fn convex_spec_2d() -> impl Strategy<Value = Spec> {
    prop_oneof![
        leaf_spec(),
        (leaf_spec(), leaf_spec()).prop_map(|(a, b)| Spec::sum(vec![a, b])),
        (leaf_spec(), leaf_spec()).prop_map(|(a, b)| Spec::max(vec![a, b])),
        (leaf_spec(), prop::collection::vec(-1.0..1.0_f64, 2)).prop_map(|(s, b)| s.translated(b)),
        (leaf_spec(), (0.3..2.0_f64)).prop_map(|(s, c)| s.scaled(c)),
        ((0.5..2.0_f64), (0.5..2.0_f64)).prop_map(|(lo, hi)| Spec::indicator(
            Polytope::rect([-lo, -hi], [hi, lo.max(hi)]).unwrap()
        )),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugation_reverses_order(lo in any_line(17), bumps in prop::collection::vec(0.0..3.0_f64, 17)) {
        let hi: Vec<f64> = lo.iter().zip(&bumps).map(|(a, b)| a + b).collect();
        let phi = to_grid(&lo, 2.0);
        let psi = to_grid(&hi, 2.0);
        let dual = GridSpec::new(vec![-3.0], vec![3.0], 21).unwrap();
        let phi_star = legendre_transform(&phi, &dual).unwrap();
        let psi_star = legendre_transform(&psi, &dual).unwrap();
        for idx in 0..dual.node_count() {
            prop_assert!(phi_star.value(idx) >= psi_star.value(idx));
        }
    }

    #[test]
    fn biconjugation_fixes_convex_lines(vals in convex_line(33)) {
        let phi = to_grid(&vals, 3.0);
        let env = biconjugate(&phi).unwrap();
        for (idx, v) in vals.iter().enumerate() {
            let d = (env.value(idx).unwrap_finite() - v).abs();
            prop_assert!(d <= 1e-8, "node {idx}: drift {d}");
        }
    }

    #[test]
    fn biconjugation_lower_bounds_any_line(vals in any_line(25)) {
        let phi = to_grid(&vals, 3.0);
        let env = biconjugate(&phi).unwrap();
        // envelope is a minorant, and brute-force chords confirm it
        let xs: Vec<f64> = (0..25).map(|k| phi.grid().coord(0, k)).collect();
        for k in 0..vals.len() {
            let e = env.value(k).unwrap_finite();
            prop_assert!(e <= vals[k] + 1e-12);
            let mut best = vals[k];
            for i in 0..xs.len() {
                for j in i + 1..xs.len() {
                    if xs[i] <= xs[k] && xs[k] <= xs[j] && i != j {
                        let t = (xs[k] - xs[i]) / (xs[j] - xs[i]);
                        best = best.min(vals[i] + t * (vals[j] - vals[i]));
                    }
                }
            }
            prop_assert!((e - best).abs() <= 1e-9, "node {k}: {e} vs chord oracle {best}");
        }
    }

    #[test]
    fn transforms_of_lines_are_convex(vals in any_line(21)) {
        let phi = to_grid(&vals, 2.0);
        let dual = GridSpec::new(vec![-4.0], vec![4.0], 41).unwrap();
        let star = legendre_transform(&phi, &dual).unwrap();
        let v: Vec<f64> = star.values().iter().map(|x| x.unwrap_finite()).collect();
        for w in v.windows(3) {
            prop_assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-10);
        }
    }

    #[test]
    fn biconjugation_fixes_convex_planes(spec in convex_spec_2d()) {
        let grid = GridSpec::symmetric(2, 3.0, 17).unwrap();
        if let Ok(phi) = spec.sample_to_grid(&grid) {
            let env = biconjugate(&phi).unwrap();
            for idx in 0..grid.node_count() {
                match (phi.value(idx), env.value(idx)) {
                    (Finite(a), Finite(b)) => prop_assert!(
                        (a - b).abs() <= 1e-8 * (1.0 + a.abs()),
                        "node {idx}: {a} vs {b}"
                    ),
                    (a, b) => prop_assert!(a == b),
                }
            }
        }
    }

    #[test]
    fn planar_transform_equals_brute_force(spec in convex_spec_2d(), dual_r in 1.0..4.0_f64) {
        let grid = GridSpec::symmetric(2, 2.5, 13).unwrap();
        if let Ok(phi) = spec.sample_to_grid(&grid) {
            let dual = GridSpec::symmetric(2, dual_r, 9).unwrap();
            let star = legendre_transform(&phi, &dual).unwrap();
            for idx in 0..dual.node_count() {
                let y = dual.node_point(idx);
                let brute = conjugate_at(&phi, &y).unwrap();
                prop_assert!(
                    (star.value(idx).unwrap_finite() - brute).abs() <= 1e-8,
                    "y = {y:?}"
                );
            }
        }
    }

    #[test]
    fn support_functions_add_over_the_asplund_cone(
        a in 0.3..2.0_f64,
        b in 0.3..2.0_f64,
        alpha in 0.25..3.0_f64,
        beta in 0.25..3.0_f64,
    ) {
        // h over (α·f)⋆(β·g) = α·h_f + β·h_g at every dual node
        let f = LogConcaveFn::from_phi_spec(
            Spec::quadratic(a),
            GridSpec::symmetric(1, 8.0, 129).unwrap(),
        )
        .unwrap();
        let g = LogConcaveFn::from_phi_spec(
            Spec::sum(vec![Spec::quadratic(b), Spec::norm_multiple(0.5)]),
            GridSpec::symmetric(1, 8.0, 129).unwrap(),
        )
        .unwrap();
        let dual = GridSpec::symmetric(1, 6.0, 97).unwrap();
        let params = AsplundParams {
            dual_grid: Some(dual.clone()),
            window: None,
        };
        let fa = dilate(alpha, &f).unwrap();
        let gb = dilate(beta, &g).unwrap();
        let sum = asplund_sum(&fa, &gb, &params).unwrap();
        let h_sum = sum.support_function(&dual).unwrap();
        let hf = f.support_function(&dual).unwrap();
        let hg = g.support_function(&dual).unwrap();
        for idx in 0..dual.node_count() {
            let expect = alpha * hf.value(idx).unwrap_finite()
                + beta * hg.value(idx).unwrap_finite();
            let got = h_sum.value(idx).unwrap_finite();
            prop_assert!((got - expect).abs() <= 1e-8 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn asplund_sum_commutes_and_associates(
        a in 0.3..2.0_f64,
        b in 0.3..2.0_f64,
        c in 0.3..2.0_f64,
    ) {
        let window = GridSpec::symmetric(1, 8.0, 65).unwrap();
        let dual = GridSpec::symmetric(1, 6.0, 65).unwrap();
        let params = AsplundParams {
            dual_grid: Some(dual.clone()),
            window: Some(window.clone()),
        };
        let mk = |s: f64| {
            LogConcaveFn::from_phi_spec(Spec::quadratic(s), window.clone()).unwrap()
        };
        let (f, g, h) = (mk(a), mk(b), mk(c));
        let fg = asplund_sum(&f, &g, &params).unwrap();
        let gf = asplund_sum(&g, &f, &params).unwrap();
        let fg_h = asplund_sum(&fg, &h, &params).unwrap();
        let g_h = asplund_sum(&g, &h, &params).unwrap();
        let f_gh = asplund_sum(&f, &g_h, &params).unwrap();
        let h1 = fg.support_function(&dual).unwrap();
        let h2 = gf.support_function(&dual).unwrap();
        let h3 = fg_h.support_function(&dual).unwrap();
        let h4 = f_gh.support_function(&dual).unwrap();
        for idx in 0..dual.node_count() {
            prop_assert!(
                (h1.value(idx).unwrap_finite() - h2.value(idx).unwrap_finite()).abs() <= 1e-8
            );
            prop_assert!(
                (h3.value(idx).unwrap_finite() - h4.value(idx).unwrap_finite()).abs() <= 1e-8
            );
        }
    }

    #[test]
    fn pointwise_order_transfers_to_support_functions(
        a in 0.3..1.5_f64,
        bump in 0.0..2.0_f64,
    ) {
        // f ≤ g pointwise (φ_f ≥ φ_g) forces h_f ≤ h_g nodewise
        let window = GridSpec::symmetric(1, 8.0, 65).unwrap();
        let g = LogConcaveFn::from_phi_spec(Spec::quadratic(a), window.clone()).unwrap();
        let f = LogConcaveFn::from_phi_spec(
            Spec::sum(vec![Spec::quadratic(a), Spec::constant(bump)]),
            window,
        )
        .unwrap();
        let dual = GridSpec::symmetric(1, 4.0, 33).unwrap();
        let hf = f.support_function(&dual).unwrap();
        let hg = g.support_function(&dual).unwrap();
        for idx in 0..dual.node_count() {
            prop_assert!(hf.value(idx) <= hg.value(idx));
        }
    }

    #[test]
    fn extreal_arithmetic_stays_in_the_cone(v in -1e12..1e12_f64, s in 0.1..10.0_f64) {
        let x = ExtReal::Finite(v);
        prop_assert_eq!(x + ExtReal::Infinity, ExtReal::Infinity);
        prop_assert_eq!(ExtReal::Infinity.scale(s), ExtReal::Infinity);
        prop_assert!(x < ExtReal::Infinity);
        prop_assert_eq!(x.scale(s), ExtReal::Finite(v * s));
    }
}
