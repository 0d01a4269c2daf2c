//! Uniform midpoint-sampled 1-D grids, cube families, and the measure-level
//! primitives built on them: cube averages, superlevel measures, weighted
//! Lp norms, and the Kolmogorov weak-vs-strong norm pair.
//!
//! Cubes are intervals. The shifted-dyadic family is three dyadic lattices
//! offset by 0, 1/3 and 2/3 of the window, clipped to it; every interval of
//! length `>= h/6` inside the window sits in some family cube of at most six
//! times its length. Nodes sit at cell midpoints, so no node ever lies on a
//! lattice boundary (shifted boundaries stay at least h/6 away).

use crate::error::{invalid, CzError, Result};

/// Tolerance, in units of the grid spacing, used when deciding whether a
/// node lies inside a cube. Family boundaries keep a distance of at least
/// h/6 from every node, so any slack well below that is safe.
const RANGE_EPS: f64 = 1e-9;

/// Midpoint-sampled uniform lattice on `[center - half_width, center + half_width]`.
///
/// Node `i` sits at `center - half_width + (i + 1/2) h` with `h = 2 half_width / n`,
/// and `n` is a power of two so the dyadic ladder bottoms out exactly on cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    center: f64,
    half_width: f64,
    n: usize,
}

impl Grid {
    pub fn new(center: f64, half_width: f64, n: usize) -> Result<Self> {
        if !center.is_finite() || !half_width.is_finite() || half_width <= 0.0 {
            return Err(invalid(format!(
                "window must have finite center and positive half-width, got center {center}, half-width {half_width}"
            )));
        }
        if n == 0 || !n.is_power_of_two() {
            return Err(CzError::GridSize(n));
        }
        Ok(Self { center, half_width, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Cell width `h`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Left end of the window.
    pub fn origin(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn window(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    pub fn window_length(&self) -> f64 {
        2.0 * self.half_width
    }

    /// Sampling node `i` (cell midpoint).
    pub fn node(&self, i: usize) -> f64 {
        self.origin() + (i as f64 + 0.5) * self.spacing()
    }

    /// Evaluation node `i`, staggered half a cell to the right of node `i`.
    /// Singular operators are evaluated here so no source tuple is ever hit.
    pub fn staggered_node(&self, i: usize) -> f64 {
        self.origin() + (i as f64 + 1.0) * self.spacing()
    }

    /// Number of dyadic levels below the window itself: `log2 n`.
    pub fn levels(&self) -> u32 {
        self.n.trailing_zeros()
    }

    /// Same window, twice the nodes.
    pub fn refined(&self) -> Grid {
        Grid { center: self.center, half_width: self.half_width, n: self.n * 2 }
    }
}

/// Samples of a function at the grid nodes. All values are finite.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(CzError::LengthMismatch { got: values.len(), want: grid.n() });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(CzError::NonFiniteSample { index: i, x: grid.node(i), value: v });
            }
        }
        Ok(Self { grid, values })
    }

    /// Sample a closure at every node, rejecting non-finite values.
    pub fn sample(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = (0..grid.n()).map(|i| f(grid.node(i))).collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        Self::from_values(grid, vec![c; grid.n()])
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.n()] }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices of nonzero samples, ascending. Operators restrict their
    /// source sums to these.
    pub fn support_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.values[i] != 0.0).collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(CzError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_values(self.grid, values)
    }

    pub fn abs(&self) -> Self {
        // |v| of finite values stays finite.
        Self { grid: self.grid, values: self.values.iter().map(|v| v.abs()).collect() }
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Sample a closure at every grid node.
pub fn build_grid_function(grid: Grid, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
    GridFunction::sample(grid, f)
}

/// A closed interval `[left, left + length]` inside the grid window that
/// contains at least one node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cube {
    left: f64,
    length: f64,
}

impl Cube {
    pub fn new(grid: &Grid, left: f64, length: f64) -> Result<Self> {
        if !left.is_finite() || !length.is_finite() || length <= 0.0 {
            return Err(invalid(format!(
                "cube needs finite left endpoint and positive length, got left {left}, length {length}"
            )));
        }
        let (lo, hi) = grid.window();
        let slack = RANGE_EPS * grid.spacing();
        if left < lo - slack || left + length > hi + slack {
            return Err(CzError::CubeOutsideWindow { left, right: left + length, lo, hi });
        }
        let cube = Self { left, length };
        if cube.node_range(grid).is_none() {
            return Err(CzError::EmptyCube { left, right: left + length });
        }
        Ok(cube)
    }

    /// Internal constructor for family cubes whose geometry is valid by
    /// construction.
    pub(crate) fn raw(left: f64, length: f64) -> Self {
        Self { left, length }
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.left + self.length
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn midpoint(&self) -> f64 {
        self.left + 0.5 * self.length
    }

    /// Inclusive index range of nodes inside the cube, or `None` if empty.
    pub fn node_range(&self, grid: &Grid) -> Option<(usize, usize)> {
        let h = grid.spacing();
        let t0 = (self.left - grid.origin()) / h - 0.5;
        let t1 = (self.right() - grid.origin()) / h - 0.5;
        let lo = (t0 - RANGE_EPS).ceil();
        let hi = (t1 + RANGE_EPS).floor();
        let lo = lo.max(0.0);
        let hi = hi.min(grid.n() as f64 - 1.0);
        if hi < lo {
            return None;
        }
        Some((lo as usize, hi as usize))
    }

    /// Discrete measure of the node set inside the cube: `h * count`.
    pub fn node_measure(&self, grid: &Grid) -> f64 {
        match self.node_range(grid) {
            Some((lo, hi)) => (hi - lo + 1) as f64 * grid.spacing(),
            None => 0.0,
        }
    }
}

/// Which cubes a sup or max ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// Dyadic subintervals of the window, all levels down to single cells.
    Dyadic,
    /// Dyadic plus the two lattices shifted by one and two thirds of the
    /// window, clipped to it. Any interval of length `>= h/6` inside the
    /// window is contained in a family cube of at most six times its length.
    ShiftedDyadic,
    /// Every cell-aligned interval. Quadratically many cubes; intended for
    /// small grids and for closed-form cross-checks of uncentered sups.
    All,
}

impl FamilyKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dyadic" => Ok(Self::Dyadic),
            "shifted" | "shifted_dyadic" => Ok(Self::ShiftedDyadic),
            "all" => Ok(Self::All),
            other => Err(invalid(format!(
                "unknown cube family '{other}' (expected dyadic, shifted, or all)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Dyadic => "dyadic",
            Self::ShiftedDyadic => "shifted",
            Self::All => "all",
        }
    }
}

/// A finite family of cubes over one grid.
#[derive(Clone, Debug)]
pub struct CubeFamily {
    grid: Grid,
    kind: FamilyKind,
    cubes: Vec<Cube>,
}

/// Largest grid for which the quadratic `All` family is still materialized.
const ALL_FAMILY_MAX_N: usize = 2048;

impl CubeFamily {
    pub fn new(grid: Grid, kind: FamilyKind) -> Result<Self> {
        let mut cubes = Vec::new();
        let w = grid.window_length();
        let origin = grid.origin();
        match kind {
            FamilyKind::Dyadic | FamilyKind::ShiftedDyadic => {
                for level in 0..=grid.levels() {
                    let len = w / (1u64 << level) as f64;
                    let count = 1usize << level;
                    for m in 0..count {
                        cubes.push(Cube::raw(origin + m as f64 * len, len));
                    }
                }
                if kind == FamilyKind::ShiftedDyadic {
                    for shift_thirds in [1.0, 2.0] {
                        let s = shift_thirds * w / 3.0;
                        for level in 0..=grid.levels() {
                            let len = w / (1u64 << level) as f64;
                            // Keep only shifted cubes that stay inside the window.
                            let m_lo = (-s / len).ceil() as i64;
                            let m_hi = ((w - s) / len).floor() as i64;
                            for m in m_lo..m_hi {
                                let left = origin + s + m as f64 * len;
                                if left >= origin - 1e-12 * w && left + len <= origin + w + 1e-12 * w {
                                    cubes.push(Cube::raw(left, len));
                                }
                            }
                        }
                    }
                }
            }
            FamilyKind::All => {
                let n = grid.n();
                if n > ALL_FAMILY_MAX_N {
                    return Err(invalid(format!(
                        "the all-intervals family has ~n^2/2 cubes; n = {n} exceeds the cap of {ALL_FAMILY_MAX_N}"
                    )));
                }
                let h = grid.spacing();
                for a in 0..n {
                    for b in (a + 1)..=n {
                        cubes.push(Cube::raw(origin + a as f64 * h, (b - a) as f64 * h));
                    }
                }
            }
        }
        Ok(Self { grid, kind, cubes })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }
}

/// Mean of `f` over the nodes of `q` with respect to `h dx / |q|`:
/// `(sum_{x_i in q} f(x_i) h) / |q|`. Exact for affine `f` on cell-aligned
/// cubes because nodes are cell midpoints.
pub fn cube_average(f: &GridFunction, q: &Cube) -> Result<f64> {
    let grid = f.grid();
    let (lo, hi) = q
        .node_range(&grid)
        .ok_or(CzError::EmptyCube { left: q.left(), right: q.right() })?;
    let sum: f64 = f.values()[lo..=hi].iter().sum();
    Ok(sum * grid.spacing() / q.length())
}

/// Discrete measure (optionally `w`-weighted) of `{ |g| > t }`.
pub fn superlevel_measure(g: &GridFunction, t: f64, w: Option<&GridFunction>) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid(format!("superlevel threshold must be positive, got {t}")));
    }
    let h = g.grid().spacing();
    match w {
        None => {
            let count = g.values().iter().filter(|v| v.abs() > t).count();
            Ok(count as f64 * h)
        }
        Some(w) => {
            if w.grid() != g.grid() {
                return Err(CzError::GridMismatch);
            }
            check_positive_weight(w)?;
            let mut sum = 0.0;
            for (v, wv) in g.values().iter().zip(w.values()) {
                if v.abs() > t {
                    sum += wv;
                }
            }
            Ok(sum * h)
        }
    }
}

/// Prefix sums for O(1) node-range sums and means over `[lo, hi]`.
pub(crate) struct PrefixSums(Vec<f64>);

impl PrefixSums {
    pub(crate) fn new(values: &[f64]) -> Self {
        let mut sums = Vec::with_capacity(values.len() + 1);
        sums.push(0.0);
        let mut acc = 0.0;
        for &v in values {
            acc += v;
            sums.push(acc);
        }
        Self(sums)
    }

    pub(crate) fn sum(&self, lo: usize, hi: usize) -> f64 {
        self.0[hi + 1] - self.0[lo]
    }

    pub(crate) fn mean(&self, lo: usize, hi: usize) -> f64 {
        self.sum(lo, hi) / (hi - lo + 1) as f64
    }
}

pub(crate) fn check_positive_weight(w: &GridFunction) -> Result<()> {
    for (i, &v) in w.values().iter().enumerate() {
        if !(v > 0.0) {
            return Err(CzError::NonPositiveWeight { index: i, value: v });
        }
    }
    Ok(())
}

/// `( sum |f|^p w h )^{1/p}` over the whole window, `p > 0`.
pub fn weighted_lp_norm(f: &GridFunction, p: f64, w: &GridFunction) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(invalid(format!("Lp exponent must be positive and finite, got {p}")));
    }
    if w.grid() != f.grid() {
        return Err(CzError::GridMismatch);
    }
    check_positive_weight(w)?;
    let h = f.grid().spacing();
    let mut sum = 0.0;
    for (v, wv) in f.values().iter().zip(w.values()) {
        if *v != 0.0 {
            sum += v.abs().powf(p) * wv;
        }
    }
    Ok((sum * h).powf(1.0 / p))
}

/// Geometric grid from `lo` to `hi` with `per_decade` points per decade.
/// Endpoints are always included; the grid is deterministic in its inputs.
pub fn geometric_grid(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi > lo) || per_decade == 0 {
        return Err(invalid(format!(
            "geometric grid needs 0 < lo < hi and a positive density, got lo {lo}, hi {hi}, per-decade {per_decade}"
        )));
    }
    let decades = (hi / lo).log10();
    let steps = (decades * per_decade as f64).ceil() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let x = lo * 10f64.powf(k as f64 / per_decade as f64);
        out.push(x.min(hi));
    }
    out.dedup();
    Ok(out)
}

/// Weak Lq norm of `f` over `q` with the normalized measure `h dx / |q|`,
/// computed as a sup of `lambda * mu(|f| > lambda)^{1/q}`.
///
/// The distribution function jumps exactly at the data values, and between
/// jumps the functional increases in lambda, so the sup is attained as a left
/// limit at a data value. Evaluating `mu(|f| >= lambda)` at the distinct data
/// values (together with a geometric sweep for reporting) therefore recovers
/// the exact sup of the strict-inequality form.
pub fn weak_lq_norm(f: &GridFunction, q: &Cube, q_exp: f64) -> Result<f64> {
    if !(q_exp > 0.0) || !q_exp.is_finite() {
        return Err(invalid(format!("weak norm exponent must be positive, got {q_exp}")));
    }
    let grid = f.grid();
    let (lo, hi) = q
        .node_range(&grid)
        .ok_or(CzError::EmptyCube { left: q.left(), right: q.right() })?;
    let mut vals: Vec<f64> = f.values()[lo..=hi]
        .iter()
        .map(|v| v.abs())
        .filter(|v| *v > 0.0)
        .collect();
    if vals.is_empty() {
        return Ok(0.0);
    }
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let h = grid.spacing();
    let qlen = q.length();
    let mut candidates: Vec<f64> = vals.clone();
    candidates.extend(geometric_grid(vals[vals.len() - 1], vals[0], 64).unwrap_or_default());
    let mut sup = 0.0_f64;
    for lambda in candidates {
        // vals is descending: count of |f| >= lambda.
        let count = vals.partition_point(|v| *v >= lambda);
        if count == 0 {
            continue;
        }
        let mu = count as f64 * h / qlen;
        sup = sup.max(lambda * mu.powf(1.0 / q_exp));
    }
    Ok(sup)
}

/// Left side `||f||_{L^p(q, h dx/|q|)}` and right side
/// `(q/(q-p))^{1/p} ||f||_{L^{q,infty}(q, h dx/|q|)}` of the Kolmogorov
/// inequality, for `0 < p < q`.
pub fn kolmogorov_pair(f: &GridFunction, q: &Cube, p: f64, q_exp: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && q_exp > p) || !q_exp.is_finite() {
        return Err(invalid(format!(
            "Kolmogorov pair needs 0 < p < q, got p {p}, q {q_exp}"
        )));
    }
    let grid = f.grid();
    let (lo, hi) = q
        .node_range(&grid)
        .ok_or(CzError::EmptyCube { left: q.left(), right: q.right() })?;
    let h = grid.spacing();
    let mut sum = 0.0;
    for v in &f.values()[lo..=hi] {
        if *v != 0.0 {
            sum += v.abs().powf(p);
        }
    }
    let lhs = (sum * h / q.length()).powf(1.0 / p);
    let constant = (q_exp / (q_exp - p)).powf(1.0 / p);
    let rhs = constant * weak_lq_norm(f, q, q_exp)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(Grid::new(0.0, 8.0, 0).is_err());
        assert!(Grid::new(0.0, 8.0, 48).is_err());
        assert!(Grid::new(0.0, 0.0, 64).is_err());
        assert!(Grid::new(0.0, -1.0, 64).is_err());
        assert!(Grid::new(f64::NAN, 1.0, 64).is_err());
        assert!(Grid::new(0.0, 8.0, 64).is_ok());
    }

    #[test]
    fn grid_nodes_are_cell_midpoints() {
        let g = Grid::new(0.0, 8.0, 16).unwrap();
        assert_close(g.spacing(), 1.0, 0.0);
        assert_close(g.node(0), -7.5, 1e-15);
        assert_close(g.node(15), 7.5, 1e-15);
        assert_close(g.staggered_node(0), -7.0, 1e-15);
        assert_eq!(g.levels(), 4);
    }

    #[test]
    fn indicator_sampling_hits_exactly_the_inside_nodes() {
        // One-cell support: exactly one node carries the value 1.
        let g = Grid::new(0.0, 8.0, 16).unwrap();
        let f = build_grid_function(g, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(f.support_indices(), vec![8]);
        assert_close(f.value(8), 1.0, 0.0);
    }

    #[test]
    fn sampling_rejects_non_finite_values_with_node_location() {
        let g = Grid::new(0.0, 8.0, 16).unwrap();
        let err = build_grid_function(g, |x| 1.0 / (x - 0.5)).unwrap_err();
        match err {
            CzError::NonFiniteSample { index, x, .. } => {
                assert_eq!(index, 8);
                assert_close(x, 0.5, 1e-15);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn cube_validation() {
        let g = Grid::new(0.0, 8.0, 64).unwrap();
        assert!(Cube::new(&g, -8.0, 16.0).is_ok());
        assert!(Cube::new(&g, -9.0, 2.0).is_err());
        assert!(Cube::new(&g, 7.0, 2.0).is_err());
        assert!(Cube::new(&g, 1.0, 0.0).is_err());
        // Shorter than a cell and strictly between two nodes: no node inside.
        assert!(Cube::new(&g, 0.26, 0.05).is_err());
    }

    #[test]
    fn cube_average_of_constant_is_exact() {
        let g = Grid::new(0.0, 8.0, 64).unwrap();
        let f = GridFunction::constant(g, 3.25).unwrap();
        let q = Cube::new(&g, -1.0, 3.0).unwrap();
        assert_close(cube_average(&f, &q).unwrap(), 3.25, 1e-15);
    }

    #[test]
    fn cube_average_indicator_over_double_cube() {
        let g = Grid::new(0.0, 8.0, 16).unwrap();
        let f = build_grid_function(g, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 }).unwrap();
        let q = Cube::new(&g, 0.0, 2.0).unwrap();
        assert_close(cube_average(&f, &q).unwrap(), 0.5, 1e-15);
    }

    #[test]
    fn cube_average_is_exact_for_affine_functions() {
        // Midpoint sampling integrates affine functions exactly.
        let g = Grid::new(0.0, 8.0, 1024).unwrap();
        let f = build_grid_function(g, |x| 3.0 * x + 1.0).unwrap();
        let q = Cube::new(&g, 0.0, 1.0).unwrap();
        assert_close(cube_average(&f, &q).unwrap(), 2.5, 1e-12);
    }

    #[test]
    fn dyadic_family_count_and_containment() {
        let g = Grid::new(0.0, 8.0, 8).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
        assert_eq!(fam.len(), 15); // 1 + 2 + 4 + 8
        let (lo, hi) = g.window();
        for c in fam.cubes() {
            assert!(c.left() >= lo - 1e-12 && c.right() <= hi + 1e-12);
            assert!(c.node_range(&g).is_some());
        }
    }

    #[test]
    fn all_family_count() {
        let g = Grid::new(0.0, 8.0, 8).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::All).unwrap();
        assert_eq!(fam.len(), 8 * 9 / 2);
    }

    #[test]
    fn all_family_rejects_large_grids() {
        let g = Grid::new(0.0, 8.0, 4096).unwrap();
        assert!(CubeFamily::new(g, FamilyKind::All).is_err());
    }

    #[test]
    fn shifted_family_covers_intervals_within_factor_six() {
        let g = Grid::new(0.0, 8.0, 64).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::ShiftedDyadic).unwrap();
        let (lo, hi) = g.window();
        for c in fam.cubes() {
            assert!(c.left() >= lo - 1e-12 && c.right() <= hi + 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = g.spacing();
        for _ in 0..300 {
            let len = (h / 6.0) * 10f64.powf(rng.gen_range(0.0..2.6));
            let len = len.min(0.9 * g.window_length());
            let left = rng.gen_range(lo..(hi - len));
            let cover = fam.cubes().iter().find(|c| {
                c.left() <= left + 1e-12 && c.right() >= left + len - 1e-12 && c.length() <= 6.0 * len + 1e-12
            });
            assert!(
                cover.is_some(),
                "no covering cube within 6x for [{left}, {}]",
                left + len
            );
        }
    }

    #[test]
    fn superlevel_measure_of_indicator() {
        let g = Grid::new(0.0, 16.0, 1024).unwrap();
        let f = build_grid_function(g, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 }).unwrap();
        let m = superlevel_measure(&f, 0.5, None).unwrap();
        assert_close(m, 1.0, g.spacing());
        assert_close(superlevel_measure(&f, 2.0, None).unwrap(), 0.0, 0.0);
        assert!(superlevel_measure(&f, 0.0, None).is_err());
        assert!(superlevel_measure(&f, -1.0, None).is_err());
    }

    #[test]
    fn superlevel_measure_with_weight_matches_manual_sum() {
        let g = Grid::new(0.0, 4.0, 64).unwrap();
        let f = build_grid_function(g, |x| x).unwrap();
        let w = build_grid_function(g, |x| 1.0 + x.abs()).unwrap();
        let t = 1.5;
        let manual: f64 = (0..g.n())
            .filter(|&i| f.value(i).abs() > t)
            .map(|i| w.value(i) * g.spacing())
            .sum();
        assert_close(superlevel_measure(&f, t, Some(&w)).unwrap(), manual, 1e-12);
        let bad = GridFunction::constant(g, 0.0).unwrap();
        assert!(superlevel_measure(&f, t, Some(&bad)).is_err());
    }

    #[test]
    fn weighted_lp_norm_basics() {
        let g = Grid::new(0.0, 8.0, 1024).unwrap();
        let one = GridFunction::constant(g, 1.0).unwrap();
        let f = build_grid_function(g, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 }).unwrap();
        // ||chi||_L2 = |A|^(1/2) = 1 on a cell-aligned set.
        assert_close(weighted_lp_norm(&f, 2.0, &one).unwrap(), 1.0, 1e-12);
        let zero = GridFunction::zeros(g);
        assert_close(weighted_lp_norm(&zero, 0.5, &one).unwrap(), 0.0, 0.0);
        assert!(weighted_lp_norm(&f, 0.0, &one).is_err());
        assert!(weighted_lp_norm(&f, -1.0, &one).is_err());
    }

    #[test]
    fn weighted_lp_norm_sqrt_integral() {
        // ||sqrt(x) chi_(0,1)||_L2^2 = integral of x over (0,1) = 1/2,
        // exact under midpoint quadrature on a cell-aligned interval.
        let g = Grid::new(0.0, 8.0, 2048).unwrap();
        let one = GridFunction::constant(g, 1.0).unwrap();
        let f = build_grid_function(g, |x| if x > 0.0 && x < 1.0 { x.max(0.0).sqrt() } else { 0.0 })
            .unwrap();
        let l2 = weighted_lp_norm(&f, 2.0, &one).unwrap();
        assert_close(l2 * l2, 0.5, 1e-12);
    }

    #[test]
    fn kolmogorov_pair_on_indicators_and_constants() {
        let g = Grid::new(0.0, 8.0, 256).unwrap();
        let q = Cube::new(&g, -8.0, 16.0).unwrap();
        let one = GridFunction::constant(g, 1.0).unwrap();
        let (lhs, rhs) = kolmogorov_pair(&one, &q, 0.5, 1.0).unwrap();
        assert_close(lhs, 1.0, 1e-12);
        // rhs = (q/(q-p))^{1/p} * 1 = 4 for p = 1/2, q = 1.
        assert_close(rhs, 4.0, 1e-12);
        assert!(lhs <= rhs);
        let zero = GridFunction::zeros(g);
        let (lz, rz) = kolmogorov_pair(&zero, &q, 0.5, 1.0).unwrap();
        assert_eq!((lz, rz), (0.0, 0.0));
        assert!(kolmogorov_pair(&one, &q, 1.0, 1.0).is_err());
        assert!(kolmogorov_pair(&one, &q, 0.0, 1.0).is_err());
    }

    #[test]
    fn kolmogorov_inequality_holds_on_random_data() {
        let g = Grid::new(0.0, 8.0, 256).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let f = GridFunction::from_values(
                g,
                (0..g.n()).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            )
            .unwrap();
            let p = rng.gen_range(0.05..0.95);
            let q_exp = rng.gen_range(p + 0.01..1.0);
            let a = rng.gen_range(0..g.n() - 1);
            let b = rng.gen_range(a + 1..g.n());
            let cube = Cube::new(
                &g,
                g.origin() + a as f64 * g.spacing(),
                (b - a) as f64 * g.spacing(),
            )
            .unwrap();
            let (lhs, rhs) = kolmogorov_pair(&f, &cube, p, q_exp).unwrap();
            assert!(
                lhs <= rhs * (1.0 + 1e-12),
                "Kolmogorov violated: lhs {lhs}, rhs {rhs}, p {p}, q {q_exp}"
            );
        }
    }

    #[test]
    fn geometric_grid_endpoints_and_density() {
        let grid = geometric_grid(1e-3, 1e3, 64).unwrap();
        assert_close(grid[0], 1e-3, 1e-18);
        assert_close(*grid.last().unwrap(), 1e3, 1e-9);
        assert_eq!(grid.len(), 6 * 64 + 1);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert!(geometric_grid(0.0, 1.0, 64).is_err());
        assert!(geometric_grid(2.0, 1.0, 64).is_err());
    }

    proptest! {
        #[test]
        fn cube_average_is_monotone_and_linear(
            vals in proptest::collection::vec(-10.0f64..10.0, 32),
            scale in 0.1f64..5.0,
            a in 0usize..31,
            len in 1usize..16,
        ) {
            let g = Grid::new(0.0, 8.0, 32).unwrap();
            let f = GridFunction::from_values(g, vals.clone()).unwrap();
            let b = (a + len).min(32);
            let cube = Cube::new(&g, g.origin() + a as f64 * g.spacing(), (b - a) as f64 * g.spacing()).unwrap();
            let avg = cube_average(&f, &cube).unwrap();
            let scaled = cube_average(&f.scale(scale).unwrap(), &cube).unwrap();
            prop_assert!((scaled - scale * avg).abs() <= 1e-10 * (1.0 + avg.abs()) * scale.max(1.0));
            let dominated = f.map(|v| v + 1.0).unwrap();
            prop_assert!(cube_average(&dominated, &cube).unwrap() >= avg);
        }

        #[test]
        fn superlevel_is_nonincreasing_in_threshold(
            vals in proptest::collection::vec(-5.0f64..5.0, 32),
            t1 in 0.01f64..4.0,
            dt in 0.01f64..2.0,
        ) {
            let g = Grid::new(0.0, 8.0, 32).unwrap();
            let f = GridFunction::from_values(g, vals).unwrap();
            let m1 = superlevel_measure(&f, t1, None).unwrap();
            let m2 = superlevel_measure(&f, t1 + dt, None).unwrap();
            prop_assert!(m2 <= m1);
        }
    }
}
