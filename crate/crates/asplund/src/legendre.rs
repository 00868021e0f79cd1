//! Discrete Legendre transform `φ*(y) = sup_x (⟨x,y⟩ − φ(x))` and the
//! convex lower envelope (biconjugate) of grid functions.
//!
//! Under the PL-interpolant semantics the conjugate of a grid function is
//! exactly `max_i (⟨x_i, y⟩ − φ(x_i))` over the finite nodes: the objective
//! is affine on every cell of the interpolant, so the supremum sits at a
//! node. Per 1-D line this is computed with one lower-convex-hull pass and
//! a two-pointer sweep over sorted dual nodes, linear in the node count.
//! The 2-D transform factors into iterated 1-D transforms along the axes
//! and agrees with brute-force maximization over all grid nodes.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, Infinity};
use crate::grid::{ConvexGridFunction, GridSpec};
use rayon::prelude::*;

/// Lower convex hull of the finite points of one grid line, with slope
/// ties broken toward the smaller abscissa.
struct LineHull {
    xs: Vec<f64>,
    vs: Vec<f64>,
}

impl LineHull {
    /// Build from `(coord, value)` pairs in increasing coordinate order,
    /// skipping infinite values.
    fn build(points: impl Iterator<Item = (f64, ExtReal)>) -> Option<LineHull> {
        let mut xs: Vec<f64> = Vec::new();
        let mut vs: Vec<f64> = Vec::new();
        for (x, v) in points {
            let Finite(v) = v else { continue };
            while xs.len() >= 2 {
                let n = xs.len();
                // pop the middle point when it lies on or above the chord
                let lhs = (vs[n - 1] - vs[n - 2]) * (x - xs[n - 1]);
                let rhs = (v - vs[n - 1]) * (xs[n - 1] - xs[n - 2]);
                if lhs >= rhs {
                    xs.pop();
                    vs.pop();
                } else {
                    break;
                }
            }
            xs.push(x);
            vs.push(v);
        }
        if xs.is_empty() {
            None
        } else {
            Some(LineHull { xs, vs })
        }
    }

    fn slope(&self, j: usize) -> f64 {
        (self.vs[j + 1] - self.vs[j]) / (self.xs[j + 1] - self.xs[j])
    }

    /// `max_i (x_i·y − v_i)` for every `y` in the ascending slice `ys`,
    /// advancing the argmax monotonically. Ties keep the left vertex.
    fn conjugate_sorted(&self, ys: &[f64], out: &mut Vec<f64>) {
        out.clear();
        let mut j = 0;
        for &y in ys {
            while j + 1 < self.xs.len() && self.slope(j) < y {
                j += 1;
            }
            out.push(self.xs[j] * y - self.vs[j]);
        }
    }

    /// Convex envelope value at `x` (chord interpolation between hull
    /// vertices; exact at and beyond the hull range endpoints).
    fn envelope_at(&self, x: f64) -> f64 {
        match self
            .xs
            .binary_search_by(|p| p.partial_cmp(&x).expect("grid coords are ordered"))
        {
            Ok(j) => self.vs[j],
            Err(j) => {
                if j == 0 {
                    self.vs[0]
                } else if j == self.xs.len() {
                    self.vs[self.xs.len() - 1]
                } else {
                    let t = (x - self.xs[j - 1]) / (self.xs[j] - self.xs[j - 1]);
                    self.vs[j - 1] + t * (self.vs[j] - self.vs[j - 1])
                }
            }
        }
    }
}

/// Exact conjugate value at one dual point: `max` of `⟨x,y⟩ − φ(x)` over all
/// finite nodes. O(node count); the grid transform below is the fast path.
pub fn conjugate_at(phi: &ConvexGridFunction, y: &[f64]) -> Result<f64> {
    if y.len() != phi.grid().dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.grid().dim(),
            got: y.len(),
        });
    }
    let mut best = f64::NEG_INFINITY;
    for idx in 0..phi.grid().node_count() {
        if let Finite(v) = phi.value(idx) {
            let x = phi.grid().node_point(idx);
            let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            best = best.max(dot - v);
        }
    }
    Ok(best)
}

/// The discrete Legendre transform of a proper grid function, evaluated at
/// the nodes of `dual_grid`. The result is finite everywhere: the domain of
/// the input is bounded, so the conjugate has (at most) linear growth.
pub fn legendre_transform(
    phi: &ConvexGridFunction,
    dual_grid: &GridSpec,
) -> Result<ConvexGridFunction> {
    if dual_grid.dim() != phi.grid().dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.grid().dim(),
            got: dual_grid.dim(),
        });
    }
    match phi.grid().dim() {
        1 => {
            let coords = phi.grid().axis_coords(0);
            let hull = LineHull::build(coords.iter().copied().zip(phi.values().iter().copied()))
                .ok_or_else(|| Error::Improper("no finite nodes".into()))?;
            let ys = dual_grid.axis_coords(0);
            let mut out = Vec::with_capacity(ys.len());
            hull.conjugate_sorted(&ys, &mut out);
            ConvexGridFunction::new(dual_grid.clone(), out.into_iter().map(Finite).collect())
        }
        _ => {
            let p = phi.grid().points_per_axis();
            let m = dual_grid.points_per_axis();
            let x1 = phi.grid().axis_coords(1);
            let y1 = dual_grid.axis_coords(1);

            // Pass A: conjugate along axis 1 for every axis-0 column.
            // `u[i*m + l] = max_j (x1_j·y1_l − φ_ij)`, None for empty columns.
            let values = phi.values();
            let u: Vec<Option<f64>> = (0..p)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let col = &values[i * p..(i + 1) * p];
                    match LineHull::build(x1.iter().copied().zip(col.iter().copied())) {
                        Some(hull) => {
                            let mut out = Vec::with_capacity(m);
                            hull.conjugate_sorted(&y1, &mut out);
                            out.into_iter().map(Some).collect::<Vec<_>>()
                        }
                        None => vec![None; m],
                    }
                })
                .collect();

            // Pass B: conjugate along axis 0 for every dual axis-1 line.
            // φ*(y0, y1) = max_i (x0_i·y0 − (−u_i(y1))).
            let x0 = phi.grid().axis_coords(0);
            let y0 = dual_grid.axis_coords(0);
            let columns: Vec<Vec<f64>> = (0..m)
                .into_par_iter()
                .map(|l| {
                    let hull = LineHull::build((0..p).map(|i| {
                        (
                            x0[i],
                            match u[i * m + l] {
                                Some(v) => Finite(-v),
                                None => Infinity,
                            },
                        )
                    }))
                    .expect("a proper function has a nonempty column");
                    let mut out = Vec::with_capacity(y0.len());
                    hull.conjugate_sorted(&y0, &mut out);
                    out
                })
                .collect();

            let mut vals = vec![Finite(0.0); m * m];
            for (l, col) in columns.iter().enumerate() {
                for (k, &v) in col.iter().enumerate() {
                    vals[k * m + l] = Finite(v);
                }
            }
            ConvexGridFunction::new(dual_grid.clone(), vals)
        }
    }
}

/// A dual grid covering the one-sided-difference slope range of `phi`,
/// padded by 10% per side. Degenerate ranges are widened symmetrically so
/// the box stays valid.
pub fn auto_dual_grid(phi: &ConvexGridFunction, points_per_axis: usize) -> Result<GridSpec> {
    let dim = phi.grid().dim();
    let mut lower = Vec::with_capacity(dim);
    let mut upper = Vec::with_capacity(dim);
    for axis in 0..dim {
        let (lo, hi) = phi.slope_range(axis).unwrap_or((0.0, 0.0));
        let span = (hi - lo)
            .max(1e-6 * (1.0 + lo.abs().max(hi.abs())))
            .max(1e-6);
        lower.push(lo - 0.1 * span);
        upper.push(hi + 0.1 * span);
    }
    GridSpec::new(lower, upper, points_per_axis)
}

fn envelope_lines_axis(values: &mut [ExtReal], grid: &GridSpec, axis: usize) -> f64 {
    let p = grid.points_per_axis();
    let coords = grid.axis_coords(axis);
    let mut max_change = 0.0_f64;
    let lines: Vec<usize> = if grid.dim() == 1 {
        vec![0]
    } else {
        (0..p).collect()
    };
    for line in lines {
        let index = |k: usize| -> usize {
            if grid.dim() == 1 {
                k
            } else if axis == 0 {
                k * p + line
            } else {
                line * p + k
            }
        };
        let Some(hull) = LineHull::build((0..p).map(|k| (coords[k], values[index(k)]))) else {
            continue;
        };
        for k in 0..p {
            if let Finite(v) = values[index(k)] {
                let e = hull.envelope_at(coords[k]);
                if e < v {
                    max_change = max_change.max(v - e);
                    values[index(k)] = Finite(e);
                }
            }
        }
    }
    max_change
}

/// The biconjugate `φ**` at the grid nodes.
///
/// In one dimension this is the exact convex lower envelope of the node
/// data. In two dimensions it is computed by alternating per-axis envelope
/// passes to a fixed point, which coincides with `φ**` whenever the input
/// data is convex (the case every calibrated tolerance relies on) and
/// brackets it from above otherwise. Infinite nodes are left untouched.
pub fn biconjugate(phi: &ConvexGridFunction) -> Result<ConvexGridFunction> {
    let grid = phi.grid().clone();
    let mut values = phi.values().to_vec();
    match grid.dim() {
        1 => {
            envelope_lines_axis(&mut values, &grid, 0);
        }
        _ => {
            let scale = 1.0 + phi.max_finite().unwrap_or(0.0).abs();
            for _ in 0..64 {
                let c0 = envelope_lines_axis(&mut values, &grid, 0);
                let c1 = envelope_lines_axis(&mut values, &grid, 1);
                if c0.max(c1) <= 1e-13 * scale {
                    break;
                }
            }
        }
    }
    ConvexGridFunction::new(grid, values)
}
