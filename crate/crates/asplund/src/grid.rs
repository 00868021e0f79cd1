//! Uniform box grids and extended-real grid functions.
//!
//! A `ConvexGridFunction` stores node values of a convex function on a
//! uniform box grid. The function it *means* is the piecewise-linear
//! interpolant of the finite nodes, extended by `+∞` outside the box and
//! at `+∞` nodes. That convention makes the discrete Legendre transform
//! exact: the conjugate of a piecewise-linear function is again
//! piecewise-linear, so discretization is a modeling statement rather
//! than an algorithmic error source.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, Infinity};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// A uniform grid on an axis-aligned box in dimension 1 or 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
    points_per_axis: usize,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, points_per_axis: usize) -> Result<Self> {
        let dim = lower.len();
        if dim == 0 || dim > 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if upper.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: upper.len(),
            });
        }
        if points_per_axis < 3 {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be at least 3, got {points_per_axis}"
            )));
        }
        for axis in 0..dim {
            if !lower[axis].is_finite() || !upper[axis].is_finite() || lower[axis] >= upper[axis] {
                return Err(Error::InvalidGrid(format!(
                    "need lower < upper on axis {axis}: [{}, {}]",
                    lower[axis], upper[axis]
                )));
            }
        }
        Ok(GridSpec {
            lower,
            upper,
            points_per_axis,
        })
    }

    /// Symmetric box `[-r, r]^dim`.
    pub fn symmetric(dim: usize, radius: f64, points_per_axis: usize) -> Result<Self> {
        GridSpec::new(vec![-radius; dim], vec![radius; dim], points_per_axis)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.points_per_axis - 1) as f64
    }

    /// Coordinate of node `k` along `axis`.
    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        self.lower[axis] + self.spacing(axis) * k as f64
    }

    /// Axis coordinates as a vector.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.points_per_axis)
            .map(|k| self.coord(axis, k))
            .collect()
    }

    /// Total number of nodes (`points_per_axis^dim`).
    pub fn node_count(&self) -> usize {
        self.points_per_axis.pow(self.dim() as u32)
    }

    /// Flat index of a node from per-axis indices (row-major, axis 0 major).
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        match self.dim() {
            1 => multi[0],
            _ => multi[0] * self.points_per_axis + multi[1],
        }
    }

    /// Location of the node with flat index `idx`.
    pub fn node_point(&self, idx: usize) -> Vec<f64> {
        match self.dim() {
            1 => vec![self.coord(0, idx)],
            _ => {
                let i = idx / self.points_per_axis;
                let j = idx % self.points_per_axis;
                vec![self.coord(0, i), self.coord(1, j)]
            }
        }
    }

    /// Whether `x` lies in the closed box.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && (0..self.dim()).all(|a| {
                let eps = 1e-12 * (1.0 + self.upper[a].abs().max(self.lower[a].abs()));
                x[a] >= self.lower[a] - eps && x[a] <= self.upper[a] + eps
            })
    }

    /// The box scaled by `λ > 0` about the origin (node set scales with it).
    pub fn scaled(&self, lambda: f64) -> GridSpec {
        GridSpec {
            lower: self.lower.iter().map(|v| v * lambda).collect(),
            upper: self.upper.iter().map(|v| v * lambda).collect(),
            points_per_axis: self.points_per_axis,
        }
    }

    /// Per-axis scaling about the origin.
    pub fn scaled_axes(&self, factors: &[f64]) -> GridSpec {
        GridSpec {
            lower: self.lower.iter().zip(factors).map(|(v, f)| v * f).collect(),
            upper: self.upper.iter().zip(factors).map(|(v, f)| v * f).collect(),
            points_per_axis: self.points_per_axis,
        }
    }

    /// The Minkowski sum of two boxes (per-axis interval sums), keeping the
    /// larger node count.
    pub fn box_sum(&self, other: &GridSpec) -> Result<GridSpec> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let lower = self
            .lower
            .iter()
            .zip(&other.lower)
            .map(|(a, b)| a + b)
            .collect();
        let upper = self
            .upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| a + b)
            .collect();
        GridSpec::new(
            lower,
            upper,
            self.points_per_axis.max(other.points_per_axis),
        )
    }
}

/// Node values of a convex function on a `GridSpec`, with the
/// PL-interpolant-extended-by-`+∞` semantics described in the module docs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexGridFunction {
    grid: GridSpec,
    values: Vec<ExtReal>,
}

impl ConvexGridFunction {
    /// Build and validate: at least one finite node (properness), and the
    /// finite nodes form a lattice-convex set (no finite–infinite–finite run
    /// along any axis line).
    pub fn new(grid: GridSpec, values: Vec<ExtReal>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match node count {}",
                values.len(),
                grid.node_count()
            )));
        }
        if values.iter().all(|v| v.is_infinite()) {
            return Err(Error::Improper(
                "all nodes are +∞ (function is identically +∞)".into(),
            ));
        }
        let f = ConvexGridFunction { grid, values };
        f.check_lattice_convexity()?;
        Ok(f)
    }

    fn check_lattice_convexity(&self) -> Result<()> {
        let check_line = |vals: &mut dyn Iterator<Item = ExtReal>| -> bool {
            // Finite entries must be contiguous.
            let mut seen_finite = false;
            let mut ended = false;
            for v in vals {
                match (v.is_finite(), seen_finite, ended) {
                    (true, _, true) => return false,
                    (true, _, false) => seen_finite = true,
                    (false, true, _) => ended = true,
                    (false, false, _) => {}
                }
            }
            true
        };
        let p = self.grid.points_per_axis();
        match self.grid.dim() {
            1 => {
                if !check_line(&mut self.values.iter().copied()) {
                    return Err(Error::InvariantViolation(
                        "interior +∞ node between finite nodes".into(),
                    ));
                }
            }
            _ => {
                for i in 0..p {
                    if !check_line(&mut (0..p).map(|j| self.values[i * p + j])) {
                        return Err(Error::InvariantViolation(format!(
                            "interior +∞ node between finite nodes on row {i}"
                        )));
                    }
                }
                for j in 0..p {
                    if !check_line(&mut (0..p).map(|i| self.values[i * p + j])) {
                        return Err(Error::InvariantViolation(format!(
                            "interior +∞ node between finite nodes on column {j}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> ExtReal {
        self.values[idx]
    }

    /// Largest finite node value, if any node is finite.
    pub fn max_finite(&self) -> Option<f64> {
        self.values
            .iter()
            .filter_map(|v| v.finite())
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    pub fn min_finite(&self) -> Option<f64> {
        self.values
            .iter()
            .filter_map(|v| v.finite())
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
    }

    /// Evaluate the interpolant at `x` inside the box (cellwise linear in
    /// 1-D, bilinear in 2-D). `+∞` if `x` is outside the box or the cell
    /// touches an infinite node.
    pub fn interpolate(&self, x: &[f64]) -> Result<ExtReal> {
        if x.len() != self.grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dim(),
                got: x.len(),
            });
        }
        if !self.grid.contains(x) {
            return Err(Error::AtomOutsideGrid {
                location: x.to_vec(),
            });
        }
        let p = self.grid.points_per_axis();
        let locate = |axis: usize| -> (usize, f64) {
            let h = self.grid.spacing(axis);
            let t = (x[axis] - self.grid.lower()[axis]) / h;
            let mut k = t.floor() as isize;
            if k < 0 {
                k = 0;
            }
            let mut k = k as usize;
            if k >= p - 1 {
                k = p - 2;
            }
            (k, (t - k as f64).clamp(0.0, 1.0))
        };
        match self.grid.dim() {
            1 => {
                let (k, t) = locate(0);
                match (self.values[k], self.values[k + 1]) {
                    (Finite(a), Finite(b)) => Ok(Finite(a + t * (b - a))),
                    (Finite(a), Infinity) if t == 0.0 => Ok(Finite(a)),
                    (Infinity, Finite(b)) if t == 1.0 => Ok(Finite(b)),
                    _ => Ok(Infinity),
                }
            }
            _ => {
                let (i, s) = locate(0);
                let (j, t) = locate(1);
                let v = |a: usize, b: usize| self.values[a * p + b];
                match (v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1)) {
                    (Finite(c00), Finite(c10), Finite(c01), Finite(c11)) => Ok(Finite(
                        (1.0 - s) * (1.0 - t) * c00
                            + s * (1.0 - t) * c10
                            + (1.0 - s) * t * c01
                            + s * t * c11,
                    )),
                    _ => {
                        // a query pinned to a cell edge only needs that
                        // edge's corners; elsewhere an infinite corner
                        // means the cell leaves the finite-node hull
                        let edge = |a: ExtReal, b: ExtReal, u: f64| match (a, b) {
                            (Finite(a), Finite(b)) => Finite(a + u * (b - a)),
                            (Finite(a), Infinity) if u == 0.0 => Finite(a),
                            (Infinity, Finite(b)) if u == 1.0 => Finite(b),
                            _ => Infinity,
                        };
                        if s == 0.0 {
                            Ok(edge(v(i, j), v(i, j + 1), t))
                        } else if s == 1.0 {
                            Ok(edge(v(i + 1, j), v(i + 1, j + 1), t))
                        } else if t == 0.0 {
                            Ok(edge(v(i, j), v(i + 1, j), s))
                        } else if t == 1.0 {
                            Ok(edge(v(i, j + 1), v(i + 1, j + 1), s))
                        } else {
                            Ok(Infinity)
                        }
                    }
                }
            }
        }
    }

    /// Per-axis range of one-sided finite-difference slopes over finite
    /// nodes. Lines with fewer than two finite nodes contribute nothing.
    pub fn slope_range(&self, axis: usize) -> Option<(f64, f64)> {
        let p = self.grid.points_per_axis();
        let h = self.grid.spacing(axis);
        let mut range: Option<(f64, f64)> = None;
        let mut feed = |a: ExtReal, b: ExtReal| {
            if let (Finite(va), Finite(vb)) = (a, b) {
                let s = (vb - va) / h;
                range = Some(match range {
                    None => (s, s),
                    Some((lo, hi)) => (lo.min(s), hi.max(s)),
                });
            }
        };
        match self.grid.dim() {
            1 => {
                for k in 0..p - 1 {
                    feed(self.values[k], self.values[k + 1]);
                }
            }
            _ => {
                for i in 0..p {
                    for j in 0..p {
                        if axis == 0 && i + 1 < p {
                            feed(self.values[i * p + j], self.values[(i + 1) * p + j]);
                        }
                        if axis == 1 && j + 1 < p {
                            feed(self.values[i * p + j], self.values[i * p + j + 1]);
                        }
                    }
                }
            }
        }
        range
    }

    /// Pointwise scale of values by `λ > 0`.
    pub fn scale(&self, lambda: f64) -> Result<ConvexGridFunction> {
        if lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {lambda}"
            )));
        }
        Ok(ConvexGridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.scale(lambda)).collect(),
        })
    }

    /// The epigraph dilation `x ↦ λ·f(x/λ)`: box scales by `λ`, node values
    /// scale by `λ`, nodes stay in one-to-one correspondence.
    pub fn epi_dilate(&self, lambda: f64) -> Result<ConvexGridFunction> {
        if lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dilation factor must be positive, got {lambda}"
            )));
        }
        Ok(ConvexGridFunction {
            grid: self.grid.scaled(lambda),
            values: self.values.iter().map(|v| v.scale(lambda)).collect(),
        })
    }

    /// CSV rows `x1[,x2],value` with `inf` for infinite nodes. Output is
    /// deterministic: identical inputs give byte-identical bytes.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        match self.grid.dim() {
            1 => writeln!(w, "x,value")?,
            _ => writeln!(w, "x1,x2,value")?,
        }
        for idx in 0..self.values.len() {
            let pt = self.grid.node_point(idx);
            for c in &pt {
                write!(w, "{c},")?;
            }
            writeln!(w, "{}", self.values[idx])?;
        }
        Ok(())
    }
}

/// The pointwise cone operations on grid functions.
#[derive(Clone, Debug)]
pub enum CombineOp {
    Sum,
    Max,
    Scale(f64),
    /// Add the affine map `x ↦ ⟨slope, x⟩ + offset`.
    AddAffine {
        slope: Vec<f64>,
        offset: f64,
    },
}

/// Nodewise combination with extended-real arithmetic. `Sum` and `Max`
/// take exactly two arguments; `Scale` and `AddAffine` exactly one.
pub fn pointwise_combine(
    op: &CombineOp,
    args: &[&ConvexGridFunction],
) -> Result<ConvexGridFunction> {
    let arity = match op {
        CombineOp::Sum | CombineOp::Max => 2,
        _ => 1,
    };
    if args.len() != arity {
        return Err(Error::InvalidParameter(format!(
            "operation takes {arity} argument(s), got {}",
            args.len()
        )));
    }
    let grid = args[0].grid().clone();
    for f in &args[1..] {
        if *f.grid() != grid {
            return Err(Error::GridMismatch(
                "pointwise combination requires identical grids".into(),
            ));
        }
    }
    let values: Vec<ExtReal> = match op {
        CombineOp::Sum => args[0]
            .values()
            .iter()
            .zip(args[1].values())
            .map(|(&a, &b)| a + b)
            .collect(),
        CombineOp::Max => args[0]
            .values()
            .iter()
            .zip(args[1].values())
            .map(|(&a, &b)| a.max(b))
            .collect(),
        CombineOp::Scale(lambda) => {
            if *lambda <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "scale factor must be positive, got {lambda}"
                )));
            }
            args[0].values().iter().map(|v| v.scale(*lambda)).collect()
        }
        CombineOp::AddAffine { slope, offset } => {
            if slope.len() != grid.dim() {
                return Err(Error::DimensionMismatch {
                    expected: grid.dim(),
                    got: slope.len(),
                });
            }
            (0..grid.node_count())
                .map(|idx| {
                    let x = grid.node_point(idx);
                    let aff: f64 = slope.iter().zip(&x).map(|(s, xi)| s * xi).sum::<f64>() + offset;
                    args[0].value(idx).map(|v| v + aff)
                })
                .collect()
        }
    };
    ConvexGridFunction::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(vals: &[f64]) -> ConvexGridFunction {
        let g = GridSpec::new(vec![-1.0], vec![1.0], vals.len()).unwrap();
        ConvexGridFunction::new(g, vals.iter().map(|&v| Finite(v)).collect()).unwrap()
    }

    #[test]
    fn rejects_improper_and_nonconvex_lattices() {
        let g = GridSpec::new(vec![-1.0], vec![1.0], 3).unwrap();
        assert!(matches!(
            ConvexGridFunction::new(g.clone(), vec![Infinity, Infinity, Infinity]),
            Err(Error::Improper(_))
        ));
        assert!(matches!(
            ConvexGridFunction::new(g, vec![Finite(0.0), Infinity, Finite(0.0)]),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn sum_and_max_follow_extreal_rules() {
        let g = GridSpec::new(vec![-1.0], vec![1.0], 3).unwrap();
        let a =
            ConvexGridFunction::new(g.clone(), vec![Infinity, Finite(0.0), Finite(0.0)]).unwrap();
        let b = ConvexGridFunction::new(g, vec![Finite(0.0), Finite(0.0), Infinity]).unwrap();
        let m = pointwise_combine(&CombineOp::Max, &[&a, &b]).unwrap();
        assert_eq!(m.values(), &[Infinity, Finite(0.0), Infinity]);
        let s = pointwise_combine(&CombineOp::Sum, &[&a, &b]).unwrap();
        assert_eq!(s.values(), &[Infinity, Finite(0.0), Infinity]);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = line(&[1.0, 0.0, 1.0]);
        let g2 = GridSpec::new(vec![-2.0], vec![1.0], 3).unwrap();
        let b = ConvexGridFunction::new(g2, vec![Finite(0.0); 3]).unwrap();
        assert!(pointwise_combine(&CombineOp::Sum, &[&a, &b]).is_err());
    }

    #[test]
    fn scale_acts_pointwise() {
        let f = line(&[1.0, 0.0, 1.0]);
        let g = pointwise_combine(&CombineOp::Scale(2.0), &[&f]).unwrap();
        assert_eq!(g.values(), &[Finite(2.0), Finite(0.0), Finite(2.0)]);
        assert!(pointwise_combine(&CombineOp::Scale(0.0), &[&f]).is_err());
    }

    #[test]
    fn add_affine_shifts_by_the_affine_map() {
        let f = line(&[1.0, 0.0, 1.0]);
        let g = pointwise_combine(
            &CombineOp::AddAffine {
                slope: vec![2.0],
                offset: 1.0,
            },
            &[&f],
        )
        .unwrap();
        // nodes at -1, 0, 1
        assert_eq!(g.values(), &[Finite(0.0), Finite(1.0), Finite(4.0)]);
    }

    #[test]
    fn interpolation_is_linear_between_nodes() {
        let f = line(&[1.0, 0.0, 1.0]);
        assert_eq!(f.interpolate(&[0.5]).unwrap(), Finite(0.5));
        assert!(f.interpolate(&[2.0]).is_err());
    }

    #[test]
    fn interpolation_handles_support_edges() {
        // an L-shaped finite region: queries pinned to a finite cell edge
        // interpolate along it, queries off the finite hull are infinite
        let g = GridSpec::new(vec![0.0, 0.0], vec![2.0, 2.0], 3).unwrap();
        let inf_at = |i: usize, j: usize| i == 2 && j == 2;
        let values: Vec<ExtReal> = (0..9)
            .map(|idx| {
                let (i, j) = (idx / 3, idx % 3);
                if inf_at(i, j) {
                    Infinity
                } else {
                    Finite((i + j) as f64)
                }
            })
            .collect();
        let f = ConvexGridFunction::new(g, values).unwrap();
        // interior of an all-finite cell
        assert_eq!(f.interpolate(&[0.5, 0.5]).unwrap(), Finite(1.0));
        // pinned to the finite edge of the cell with the infinite corner
        assert_eq!(f.interpolate(&[1.0, 1.5]).unwrap(), Finite(2.5));
        // strictly inside that cell
        assert_eq!(f.interpolate(&[1.5, 1.5]).unwrap(), Infinity);
    }

    #[test]
    fn csv_is_deterministic() {
        let f = line(&[1.0, 0.25, 1.0]);
        let mut a = Vec::new();
        let mut b = Vec::new();
        f.write_csv(&mut a).unwrap();
        f.write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("x,value\n-1,1\n"));
    }
}
