//! Iterated and sum commutators of an m-linear operator with a tuple of
//! symbols, computed by two independent routes that share one quadrature.
//!
//! The kernel route multiplies the kernel by
//! `prod_j (b_j(x) - b_j(y_j))` inside the sum; the expansion route writes
//! the same object as the inclusion-exclusion sum
//! `sum_{S subset of [m]} (-1)^{|S|} (prod_{j not in S} b_j(x)) T(..., b_j f_j for j in S, ...)`.
//! Both use the symbol value at the staggered output node, interpolated as
//! the mean of the two neighbouring samples, so they agree to rounding.

use crate::czop::{apply_operator, apply_weighted, MKernel};
use crate::error::{CzError, Result};
use crate::lattice::GridFunction;
use crate::maximal::SymbolTuple;

/// Symbol values at the staggered nodes: the midpoint interpolation
/// `(v_i + v_{i+1}) / 2`, clamped at the right edge.
pub(crate) fn staggered_values(b: &GridFunction) -> Vec<f64> {
    let v = b.values();
    let n = v.len();
    (0..n)
        .map(|i| if i + 1 < n { 0.5 * (v[i] + v[i + 1]) } else { v[n - 1] })
        .collect()
}

fn check_inputs(kernel: &MKernel, symbols: &SymbolTuple, fs: &[GridFunction]) -> Result<()> {
    if symbols.m() != kernel.arity() {
        return Err(CzError::ArityMismatch { kernel: kernel.arity(), given: symbols.m() });
    }
    if fs.len() != kernel.arity() {
        return Err(CzError::ArityMismatch { kernel: kernel.arity(), given: fs.len() });
    }
    let grid = fs[0].grid();
    for b in symbols.symbols() {
        if b.grid() != grid {
            return Err(CzError::GridMismatch);
        }
    }
    Ok(())
}

/// Iterated commutator via the weighted kernel: one quadrature pass with
/// `K(x, y) prod_j (b_j(x) - b_j(y_j))`.
pub fn iterated_commutator_kernel(
    kernel: &MKernel,
    symbols: &SymbolTuple,
    fs: &[GridFunction],
) -> Result<GridFunction> {
    check_inputs(kernel, symbols, fs)?;
    let staggered: Vec<Vec<f64>> = symbols.symbols().iter().map(staggered_values).collect();
    let symbol_values: Vec<&[f64]> = symbols.symbols().iter().map(|b| b.values()).collect();
    apply_weighted(kernel, fs, |i, idx| {
        let mut w = 1.0;
        for (j, &node) in idx.iter().enumerate() {
            w *= staggered[j][i] - symbol_values[j][node];
        }
        w
    })
}

/// Iterated commutator via inclusion-exclusion over symbol placements:
/// `2^m` plain operator applications combined with staggered symbol values.
pub fn iterated_commutator_expansion(
    kernel: &MKernel,
    symbols: &SymbolTuple,
    fs: &[GridFunction],
) -> Result<GridFunction> {
    check_inputs(kernel, symbols, fs)?;
    let m = kernel.arity();
    let staggered: Vec<Vec<f64>> = symbols.symbols().iter().map(staggered_values).collect();
    let n = fs[0].grid().n();
    let mut acc = vec![0.0_f64; n];
    let mut out_grid = None;
    for mask in 0u32..(1u32 << m) {
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let inputs: Vec<GridFunction> = (0..m)
            .map(|j| {
                if mask & (1 << j) != 0 {
                    fs[j].pointwise_mul(symbols.symbol(j))
                } else {
                    Ok(fs[j].clone())
                }
            })
            .collect::<Result<_>>()?;
        let t = apply_operator(kernel, &inputs)?;
        out_grid.get_or_insert(t.grid());
        for i in 0..n {
            let mut coeff = sign;
            for (j, stag) in staggered.iter().enumerate() {
                if mask & (1 << j) == 0 {
                    coeff *= stag[i];
                }
            }
            acc[i] += coeff * t.value(i);
        }
    }
    GridFunction::from_values(out_grid.expect("at least one subset"), acc)
}

/// Iterated commutator; the kernel route is the default (single pass).
pub fn iterated_commutator(
    kernel: &MKernel,
    symbols: &SymbolTuple,
    fs: &[GridFunction],
) -> Result<GridFunction> {
    iterated_commutator_kernel(kernel, symbols, fs)
}

/// Sum commutator `sum_j [b_j, T]_j`: each term puts the j-th symbol inside
/// the j-th slot only,
/// `b_j(x) T(f)(x) - T(f_1, ..., b_j f_j, ..., f_m)(x)`.
pub fn sum_commutator(
    kernel: &MKernel,
    symbols: &SymbolTuple,
    fs: &[GridFunction],
) -> Result<GridFunction> {
    check_inputs(kernel, symbols, fs)?;
    let staggered: Vec<Vec<f64>> = symbols.symbols().iter().map(staggered_values).collect();
    let base = apply_operator(kernel, fs)?;
    let n = base.len();
    let mut acc = vec![0.0_f64; n];
    for (j, stag) in staggered.iter().enumerate() {
        let mut inputs = fs.to_vec();
        inputs[j] = fs[j].pointwise_mul(symbols.symbol(j))?;
        let inner = apply_operator(kernel, &inputs)?;
        for i in 0..n {
            acc[i] += stag[i] * base.value(i) - inner.value(i);
        }
    }
    GridFunction::from_values(base.grid(), acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::czop::{hilbert_kernel, riesz_bilinear_kernel};
    use crate::lattice::{build_grid_function, CubeFamily, FamilyKind, Grid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    fn smooth_symbols(grid: Grid, fam: &CubeFamily) -> SymbolTuple {
        let b1 = build_grid_function(grid, |x| (0.4 * x).sin() + 0.3 * x).unwrap();
        let b2 = build_grid_function(grid, |x| (1.0 + x * x).ln()).unwrap();
        SymbolTuple::new(vec![b1, b2], fam).unwrap()
    }

    fn random_function(grid: Grid, rng: &mut ChaCha8Rng) -> GridFunction {
        GridFunction::from_values(
            grid,
            (0..grid.n()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn staggered_interpolation_midpoints_and_edge() {
        let g = Grid::new(0.0, 2.0, 4).unwrap();
        let b = GridFunction::from_values(g, vec![1.0, 3.0, 5.0, 9.0]).unwrap();
        assert_eq!(staggered_values(&b), vec![2.0, 4.0, 7.0, 9.0]);
    }

    #[test]
    fn kernel_and_expansion_routes_agree() {
        let g = Grid::new(0.0, 4.0, 64).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
        let symbols = smooth_symbols(g, &fam);
        let k = riesz_bilinear_kernel();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..5 {
            let f1 = random_function(g, &mut rng);
            let f2 = random_function(g, &mut rng);
            let a = iterated_commutator_kernel(&k, &symbols, &[f1.clone(), f2.clone()]).unwrap();
            let b = iterated_commutator_expansion(&k, &symbols, &[f1, f2]).unwrap();
            let scale = a.max_abs().max(b.max_abs()).max(1e-30);
            for i in 0..g.n() {
                assert!(
                    (a.value(i) - b.value(i)).abs() <= 1e-10 * scale,
                    "routes differ at node {i}: {} vs {}",
                    a.value(i),
                    b.value(i)
                );
            }
        }
    }

    #[test]
    fn constant_symbols_give_zero_commutator() {
        let g = Grid::new(0.0, 4.0, 64).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
        let b1 = GridFunction::constant(g, 4.2).unwrap();
        let b2 = GridFunction::constant(g, -1.3).unwrap();
        let symbols = SymbolTuple::new(vec![b1, b2], &fam).unwrap();
        assert_close(symbols.product_norm(), 0.0, 0.0);
        let k = riesz_bilinear_kernel();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f1 = random_function(g, &mut rng);
        let f2 = random_function(g, &mut rng);
        let a = iterated_commutator_kernel(&k, &symbols, &[f1.clone(), f2.clone()]).unwrap();
        let b = iterated_commutator_expansion(&k, &symbols, &[f1.clone(), f2.clone()]).unwrap();
        let s = sum_commutator(&k, &symbols, &[f1, f2]).unwrap();
        for i in 0..g.n() {
            assert!(a.value(i).abs() <= 1e-12);
            assert!(b.value(i).abs() <= 1e-12);
            assert!(s.value(i).abs() <= 1e-12);
        }
    }

    #[test]
    fn symbols_are_invariant_under_constant_shifts() {
        let g = Grid::new(0.0, 4.0, 64).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
        let b = build_grid_function(g, |x| x.abs().sqrt()).unwrap();
        let b_shifted = b.map(|v| v + 37.0).unwrap();
        let t1 = SymbolTuple::new(vec![b], &fam).unwrap();
        let t2 = SymbolTuple::new(vec![b_shifted], &fam).unwrap();
        let k = hilbert_kernel();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_function(g, &mut rng);
        let c1 = iterated_commutator(&k, &t1, std::slice::from_ref(&f)).unwrap();
        let c2 = iterated_commutator(&k, &t2, std::slice::from_ref(&f)).unwrap();
        for i in 0..g.n() {
            assert_close(c1.value(i), c2.value(i), 1e-12 * (1.0 + c1.value(i).abs()));
        }
    }

    #[test]
    fn linear_commutator_matches_hand_expansion() {
        // m = 1: [b, T]f = b(x) Tf(x) - T(bf)(x), assembled by hand.
        let g = Grid::new(0.0, 4.0, 64).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
        let b = build_grid_function(g, |x| x).unwrap();
        let symbols = SymbolTuple::new(vec![b.clone()], &fam).unwrap();
        let k = hilbert_kernel();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = random_function(g, &mut rng);
        let via_kernel = iterated_commutator_kernel(&k, &symbols, std::slice::from_ref(&f)).unwrap();
        let centered = symbols.symbol(0);
        let stag = staggered_values(centered);
        let tf = apply_operator(&k, std::slice::from_ref(&f)).unwrap();
        let tbf = apply_operator(&k, &[f.pointwise_mul(centered).unwrap()]).unwrap();
        for (i, &sv) in stag.iter().enumerate() {
            let hand = sv * tf.value(i) - tbf.value(i);
            assert_close(via_kernel.value(i), hand, 1e-11 * (1.0 + hand.abs()));
        }
        // And the sum commutator coincides with the iterated one at m = 1.
        let s = sum_commutator(&k, &symbols, std::slice::from_ref(&f)).unwrap();
        for i in 0..g.n() {
            assert_close(s.value(i), via_kernel.value(i), 1e-11 * (1.0 + s.value(i).abs()));
        }
    }

    #[test]
    fn single_cell_sources_give_exact_weighted_kernel_term() {
        let g = Grid::new(0.0, 4.0, 64).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
        let symbols = smooth_symbols(g, &fam);
        let h = g.spacing();
        let (a_idx, c_idx) = (10usize, 50usize);
        let mut a = vec![0.0; g.n()];
        let mut c = vec![0.0; g.n()];
        a[a_idx] = 1.5;
        c[c_idx] = 2.0;
        let fa = GridFunction::from_values(g, a).unwrap();
        let fc = GridFunction::from_values(g, c).unwrap();
        let k = riesz_bilinear_kernel();
        let out = iterated_commutator_kernel(&k, &symbols, &[fa, fc]).unwrap();
        let stag1 = staggered_values(symbols.symbol(0));
        let stag2 = staggered_values(symbols.symbol(1));
        for i in [5usize, 30, 60] {
            let x = g.staggered_node(i);
            let expect = k.eval(x, &[g.node(a_idx), g.node(c_idx)])
                * (stag1[i] - symbols.symbol(0).value(a_idx))
                * (stag2[i] - symbols.symbol(1).value(c_idx))
                * 1.5
                * 2.0
                * h
                * h;
            assert_close(out.value(i), expect, 1e-14 + 1e-12 * expect.abs());
        }
    }

    #[test]
    fn mismatched_symbol_counts_are_rejected() {
        let g = Grid::new(0.0, 4.0, 64).unwrap();
        let fam = CubeFamily::new(g, FamilyKind::Dyadic).unwrap();
        let b = build_grid_function(g, |x| x).unwrap();
        let one_symbol = SymbolTuple::new(vec![b], &fam).unwrap();
        let k = riesz_bilinear_kernel();
        let f = GridFunction::constant(g, 1.0).unwrap();
        assert!(iterated_commutator(&k, &one_symbol, &[f.clone(), f]).is_err());
    }
}
