//! Maximal functions over a cube family: the power-mean maximal `M_delta`,
//! the sharp (oscillation) maximal, oscillation norms of symbols, and the
//! multilinear Orlicz maximal functions `M_{L(log L)^k}`.
//!
//! Everything here is an exact sup over the finitely many family cubes. The
//! cubes of every family contain a whole number of cells with no node on a
//! boundary, so cube averages are plain means of the covered samples.

use crate::error::{invalid, CzError, Result};
use crate::lattice::{CubeFamily, GridFunction, PrefixSums};
use crate::orlicz::luxemburg_norm;

fn family_ranges(family: &CubeFamily) -> Vec<(usize, usize)> {
    let grid = family.grid();
    family
        .cubes()
        .iter()
        .map(|q| q.node_range(&grid).expect("family cubes contain nodes"))
        .collect()
}

/// `M_delta f(x) = sup_{Q ni x} ( avg_Q |f|^delta )^{1/delta}`, `delta > 0`.
/// `delta = 1` is the uncentered maximal function over the family.
pub fn maximal_delta(f: &GridFunction, family: &CubeFamily, delta: f64) -> Result<GridFunction> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("maximal exponent must be positive, got {delta}")));
    }
    if f.grid() != family.grid() {
        return Err(CzError::GridMismatch);
    }
    let powered: Vec<f64> = if delta == 1.0 {
        f.values().iter().map(|v| v.abs()).collect()
    } else {
        f.values().iter().map(|v| v.abs().powf(delta)).collect()
    };
    let sums = PrefixSums::new(&powered);
    let mut out = vec![0.0_f64; f.len()];
    for (lo, hi) in family_ranges(family) {
        let avg = sums.mean(lo, hi);
        for slot in &mut out[lo..=hi] {
            if avg > *slot {
                *slot = avg;
            }
        }
    }
    if delta != 1.0 {
        let inv = 1.0 / delta;
        for v in &mut out {
            *v = v.powf(inv);
        }
    }
    GridFunction::from_values(f.grid(), out)
}

/// Sharp maximal function `f -> sup_{Q ni x} avg_Q |f - avg_Q f|`, applied
/// to the signed samples.
pub fn sharp_maximal(f: &GridFunction, family: &CubeFamily) -> Result<GridFunction> {
    if f.grid() != family.grid() {
        return Err(CzError::GridMismatch);
    }
    let sums = PrefixSums::new(f.values());
    let mut out = vec![0.0_f64; f.len()];
    for (lo, hi) in family_ranges(family) {
        let mean = sums.mean(lo, hi);
        let mut osc = 0.0;
        for &v in &f.values()[lo..=hi] {
            osc += (v - mean).abs();
        }
        osc /= (hi - lo + 1) as f64;
        for slot in &mut out[lo..=hi] {
            if osc > *slot {
                *slot = osc;
            }
        }
    }
    GridFunction::from_values(f.grid(), out)
}

/// `M^#_delta f = ( sharp maximal of |f|^delta )^{1/delta}`.
pub fn sharp_maximal_delta(
    f: &GridFunction,
    family: &CubeFamily,
    delta: f64,
) -> Result<GridFunction> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("sharp maximal exponent must be positive, got {delta}")));
    }
    let powered = f.map(|v| v.abs().powf(delta))?;
    let sharp = sharp_maximal(&powered, family)?;
    sharp.map(|v| v.powf(1.0 / delta))
}

/// Oscillation norm of a symbol over the family:
/// `max_Q avg_Q |b - avg_Q b|`.
pub fn bmo_norm(b: &GridFunction, family: &CubeFamily) -> Result<f64> {
    let sharp = sharp_maximal(b, family)?;
    Ok(sharp.values().iter().fold(0.0_f64, |m, &v| m.max(v)))
}

/// A tuple of symbols, stored centered (window mean subtracted) together
/// with their oscillation norms over a fixed family.
#[derive(Clone, Debug)]
pub struct SymbolTuple {
    symbols: Vec<GridFunction>,
    norms: Vec<f64>,
}

impl SymbolTuple {
    pub fn new(symbols: Vec<GridFunction>, family: &CubeFamily) -> Result<Self> {
        if symbols.is_empty() {
            return Err(invalid("a symbol tuple needs at least one symbol"));
        }
        let grid = symbols[0].grid();
        if grid != family.grid() {
            return Err(CzError::GridMismatch);
        }
        let mut centered = Vec::with_capacity(symbols.len());
        let mut norms = Vec::with_capacity(symbols.len());
        for b in symbols {
            if b.grid() != grid {
                return Err(CzError::GridMismatch);
            }
            let mean = b.values().iter().sum::<f64>() / b.len() as f64;
            let c = b.map(|v| v - mean)?;
            norms.push(bmo_norm(&c, family)?);
            centered.push(c);
        }
        Ok(Self { symbols: centered, norms })
    }

    pub fn m(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[GridFunction] {
        &self.symbols
    }

    pub fn symbol(&self, j: usize) -> &GridFunction {
        &self.symbols[j]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Product of the oscillation norms, the natural size of an iterated
    /// commutator bound.
    pub fn product_norm(&self) -> f64 {
        self.norms.iter().product()
    }

    /// Sum of the oscillation norms, the natural size for the sum commutator.
    pub fn sum_norm(&self) -> f64 {
        self.norms.iter().sum()
    }
}

fn check_tuple(fs: &[GridFunction], family: &CubeFamily) -> Result<()> {
    if fs.is_empty() {
        return Err(invalid("multilinear maximal needs at least one function"));
    }
    for f in fs {
        if f.grid() != family.grid() {
            return Err(CzError::GridMismatch);
        }
    }
    Ok(())
}

/// Multilinear Orlicz maximal function
/// `M_{L(log L)^k}(f_1, ..., f_m)(x) = sup_{Q ni x} prod_j ||f_j||_{phi^k, Q}`.
/// With `k = 0` the norms are plain averages and this is the multilinear
/// maximal function `M`.
pub fn m_llogl(fs: &[GridFunction], family: &CubeFamily, k: usize) -> Result<GridFunction> {
    check_tuple(fs, family)?;
    let grid = family.grid();
    // A cube where some factor vanishes identically contributes 0; count
    // support nodes per range in O(1) to skip such cubes. On sparsely
    // supported inputs this collapses the cost to the support's neighborhood.
    let support_counts: Vec<PrefixSums> = fs
        .iter()
        .map(|f| {
            let ind: Vec<f64> =
                f.values().iter().map(|&v| if v != 0.0 { 1.0 } else { 0.0 }).collect();
            PrefixSums::new(&ind)
        })
        .collect();
    let mut out = vec![0.0_f64; grid.n()];
    for q in family.cubes() {
        let (lo, hi) = q.node_range(&grid).expect("family cubes contain nodes");
        if support_counts.iter().any(|s| s.sum(lo, hi) == 0.0) {
            continue;
        }
        let mut product = 1.0;
        for f in fs {
            product *= luxemburg_norm(f, q, k)?;
            if product == 0.0 {
                break;
            }
        }
        if product > 0.0 {
            for slot in &mut out[lo..=hi] {
                if product > *slot {
                    *slot = product;
                }
            }
        }
    }
    GridFunction::from_values(grid, out)
}

/// Sum-form Orlicz maximal function
/// `sup_Q sum_j ( ||f_j||_{phi^k, Q} prod_{i != j} avg_Q |f_i| )`,
/// the companion of the sum commutator (one Orlicz factor at a time).
pub fn m_sigma_llogl(fs: &[GridFunction], family: &CubeFamily, k: usize) -> Result<GridFunction> {
    check_tuple(fs, family)?;
    let grid = family.grid();
    let abs_sums: Vec<PrefixSums> = fs
        .iter()
        .map(|f| {
            let a: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
            PrefixSums::new(&a)
        })
        .collect();
    let mut out = vec![0.0_f64; grid.n()];
    for q in family.cubes() {
        let (lo, hi) = q.node_range(&grid).expect("family cubes contain nodes");
        if abs_sums.iter().any(|s| s.sum(lo, hi) == 0.0) {
            continue;
        }
        let avgs: Vec<f64> = abs_sums.iter().map(|s| s.mean(lo, hi)).collect();
        let mut total = 0.0;
        for (j, f) in fs.iter().enumerate() {
            let mut term = luxemburg_norm(f, q, k)?;
            for (i, &avg) in avgs.iter().enumerate() {
                if i != j {
                    term *= avg;
                }
            }
            total += term;
        }
        if total > 0.0 {
            for slot in &mut out[lo..=hi] {
                if total > *slot {
                    *slot = total;
                }
            }
        }
    }
    GridFunction::from_values(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_grid_function, FamilyKind, Grid};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    fn indicator_setup(n: usize) -> (Grid, GridFunction) {
        let g = Grid::new(4.0, 4.0, n).unwrap();
        let f = build_grid_function(g, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 }).unwrap();
        (g, f)
    }

    #[test]
    fn maximal_of_constant_is_constant() {
        let g = Grid::new(0.0, 8.0, 64).unwrap();
        let f = GridFunction::constant(g, 2.25).unwrap();
        for kind in [FamilyKind::Dyadic, FamilyKind::ShiftedDyadic, FamilyKind::All] {
            let fam = CubeFamily::new(g, kind).unwrap();
            let m = maximal_delta(&f, &fam, 1.0).unwrap();
            for &v in m.values() {
                assert_close(v, 2.25, 1e-12);
            }
        }
    }

    #[test]
    fn all_family_maximal_of_indicator_matches_closed_form() {
        // For f = chi_(0,1) and the all-intervals family, the maximal value
        // at a node right of the support is exactly 1 / (x + h/2): the best
        // interval is [0, x + h/2].
        let (g, f) = indicator_setup(64);
        let fam = CubeFamily::new(g, FamilyKind::All).unwrap();
        let m = maximal_delta(&f, &fam, 1.0).unwrap();
        let h = g.spacing();
        for i in 0..g.n() {
            let x = g.node(i);
            if x > 1.0 {
                assert_close(m.value(i), 1.0 / (x + 0.5 * h), 1e-12);
            } else if x > 0.0 {
                assert_close(m.value(i), 1.0, 1e-12);
            }
        }
    }

    #[test]
    fn maximal_dominates_cell_average() {
        let g = Grid::new(0.0, 8.0, 128).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = GridFunction::from_values(
            g,
            (0..g.n()).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        )
        .unwrap();
        let m = maximal_delta(&f, &fam, 1.0).unwrap();
        for i in 0..g.n() {
            assert!(m.value(i) >= f.value(i).abs() - 1e-12);
        }
    }

    #[test]
    fn maximal_delta_is_monotone_in_delta() {
        let g = Grid::new(0.0, 8.0, 128).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::ShiftedDyadic).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = GridFunction::from_values(
            g,
            (0..g.n()).map(|_| rng.gen_range(0.0..3.0)).collect(),
        )
        .unwrap();
        let m1 = maximal_delta(&f, &fam, 0.25).unwrap();
        let m2 = maximal_delta(&f, &fam, 0.5).unwrap();
        let m3 = maximal_delta(&f, &fam, 1.0).unwrap();
        for i in 0..g.n() {
            assert!(m1.value(i) <= m2.value(i) * (1.0 + 1e-10));
            assert!(m2.value(i) <= m3.value(i) * (1.0 + 1e-10));
        }
        assert!(maximal_delta(&f, &fam, 0.0).is_err());
    }

    #[test]
    fn linear_symbol_oscillation_is_quarter_length() {
        // For b(x) = x and a cell-aligned cube with an even node count,
        // avg_Q |b - b_Q| = |Q|/4 exactly; the norm is attained on the window.
        let g = Grid::new(0.0, 8.0, 256).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
        let b = build_grid_function(g, |x| x).unwrap();
        assert_close(bmo_norm(&b, &fam).unwrap(), 4.0, 1e-12);
        // The max of the sharp maximal function equals the norm.
        let sharp = sharp_maximal(&b, &fam).unwrap();
        let peak = sharp.values().iter().fold(0.0_f64, |m, &v| m.max(v));
        assert_close(peak, 4.0, 1e-12);
    }

    #[test]
    fn log_symbol_oscillation_is_resolution_stable() {
        // b(x) = log|x| has bounded mean oscillation; its norm must not grow
        // as the grid refines, while the sup norm does.
        let norm_at = |n: usize| {
            let g = Grid::new(0.0, 8.0, n).unwrap();
            let fam = CubeFamily::new(g, FamilyKind::ShiftedDyadic).unwrap();
            let b = build_grid_function(g, |x| x.abs().ln()).unwrap();
            bmo_norm(&b, &fam).unwrap()
        };
        let (n1, n2) = (norm_at(256), norm_at(1024));
        assert!(n2 / n1 < 1.25, "oscillation norm should stabilize: {n1} -> {n2}");
    }

    #[test]
    fn symbol_tuple_centers_and_caches_norms() {
        let g = Grid::new(0.0, 8.0, 128).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
        let b1 = build_grid_function(g, |x| x + 100.0).unwrap();
        let b2 = build_grid_function(g, |x| 2.0 * x).unwrap();
        let tuple = SymbolTuple::new(vec![b1, b2], &fam).unwrap();
        // Centering removes the constant; window mean of x is 0.
        let mean0: f64 = tuple.symbol(0).values().iter().sum::<f64>() / 128.0;
        assert_close(mean0, 0.0, 1e-10);
        assert_close(tuple.norms()[0], 4.0, 1e-12);
        assert_close(tuple.norms()[1], 8.0, 1e-12);
        assert_close(tuple.product_norm(), 32.0, 1e-12);
        assert_close(tuple.sum_norm(), 12.0, 1e-12);
    }

    #[test]
    fn orlicz_maximal_of_unit_indicators_attains_one() {
        // The cube equal to the support gives Luxemburg norm 1 per factor.
        let (g, f) = indicator_setup(64);
        let fam = CubeFamily::new(g, FamilyKind::All).unwrap();
        let m = m_llogl(&[f.clone(), f.clone()], &fam, 1).unwrap();
        let peak = m.values().iter().fold(0.0_f64, |acc, &v| acc.max(v));
        assert_close(peak, 1.0, 1e-9);
        // Off the support the value is positive but below 1.
        let i_far = g.n() - 1;
        assert!(m.value(i_far) > 0.0 && m.value(i_far) < 1.0);
    }

    #[test]
    fn orlicz_maximal_dominates_multilinear_maximal() {
        // phi^k >= phi^0 pointwise, so each Luxemburg factor is larger.
        let g = Grid::new(0.0, 8.0, 128).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::ShiftedDyadic).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let fs: Vec<GridFunction> = (0..2)
            .map(|_| {
                GridFunction::from_values(
                    g,
                    (0..g.n()).map(|_| rng.gen_range(0.0..2.0)).collect(),
                )
                .unwrap()
            })
            .collect();
        let m0 = m_llogl(&fs, &fam, 0).unwrap();
        let m1 = m_llogl(&fs, &fam, 1).unwrap();
        for i in 0..g.n() {
            assert!(m0.value(i) <= m1.value(i) * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn single_factor_orlicz_maximal_matches_plain_maximal() {
        let g = Grid::new(0.0, 8.0, 128).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::ShiftedDyadic).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = GridFunction::from_values(
            g,
            (0..g.n()).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        )
        .unwrap();
        let a = m_llogl(std::slice::from_ref(&f), &fam, 0).unwrap();
        let b = maximal_delta(&f, &fam, 1.0).unwrap();
        for i in 0..g.n() {
            assert_close(a.value(i), b.value(i), 1e-12 * (1.0 + b.value(i)));
        }
    }

    #[test]
    fn sum_form_matches_product_form_for_one_factor() {
        let (g, f) = indicator_setup(64);
        let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
        let a = m_sigma_llogl(std::slice::from_ref(&f), &fam, 1).unwrap();
        let b = m_llogl(std::slice::from_ref(&f), &fam, 1).unwrap();
        for i in 0..g.n() {
            assert_close(a.value(i), b.value(i), 1e-12);
        }
    }

    #[test]
    fn sparse_support_keeps_large_grids_fast() {
        // 2^17 nodes with an 8-node support: must finish quickly because
        // only support-adjacent cubes contribute.
        let g = Grid::new(0.0, 8192.0, 1 << 17).unwrap();
        let f = build_grid_function(g, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 }).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::ShiftedDyadic).unwrap();
        let start = std::time::Instant::now();
        let m = m_llogl(&[f.clone(), f], &fam, 1).unwrap();
        assert!(start.elapsed().as_secs_f64() < 10.0, "sparse maximal too slow");
        assert!(m.values().iter().any(|&v| v > 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn sharp_maximal_is_dominated_by_twice_maximal(
            vals in proptest::collection::vec(-4.0f64..4.0, 64),
        ) {
            let g = Grid::new(0.0, 8.0, 64).unwrap();
            let f = GridFunction::from_values(g, vals).unwrap();
            let fam = CubeFamily::new(g, FamilyKind::ShiftedDyadic).unwrap();
            let sharp = sharp_maximal(&f, &fam).unwrap();
            let m = maximal_delta(&f, &fam, 1.0).unwrap();
            for i in 0..g.n() {
                // avg_Q |f - f_Q| <= 2 avg_Q |f| <= 2 M f.
                prop_assert!(sharp.value(i) <= 2.0 * m.value(i) + 1e-10);
            }
        }

        #[test]
        fn oscillation_norm_kills_constants(
            c in -50.0f64..50.0,
            vals in proptest::collection::vec(-2.0f64..2.0, 32),
        ) {
            let g = Grid::new(0.0, 8.0, 32).unwrap();
            let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
            let f = GridFunction::from_values(g, vals).unwrap();
            let shifted = f.map(|v| v + c).unwrap();
            let n1 = bmo_norm(&f, &fam).unwrap();
            let n2 = bmo_norm(&shifted, &fam).unwrap();
            prop_assert!((n1 - n2).abs() <= 1e-9 * (1.0 + n1.abs()));
        }
    }
}
