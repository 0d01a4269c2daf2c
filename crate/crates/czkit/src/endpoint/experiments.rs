//! Experiment drivers: each function computes one quantitative statement
//! (an identity residual, a ratio bound, a divergence series, ...) and is
//! shared by the acceptance checks and the CLI subcommands.

use std::time::Instant;

use crate::czop::{apply_operator, riesz_bilinear_kernel};
use crate::commutator::{
    iterated_commutator_expansion, iterated_commutator_kernel,
};
use crate::endpoint::corpus::{
    draw_function, draw_nonnegative, draw_symbol, draw_weight, rng_for,
};
use crate::error::{invalid, CzError, Result};
use crate::lattice::{
    build_grid_function, geometric_grid, superlevel_measure, weighted_lp_norm, Cube, CubeFamily,
    FamilyKind, Grid, GridFunction,
};
use crate::maximal::{m_llogl, maximal_delta, sharp_maximal_delta, SymbolTuple};
use crate::orlicz::{luxemburg_equiv_functional, luxemburg_norm, phi_inverse, phi_iter};
use crate::weights::{
    characterization_constants, power_weight, CharacterizationConstants, ExponentVector,
};

use rand::Rng;

/// Common run parameters threaded from the CLI into experiments.
#[derive(Clone, Copy, Debug)]
pub struct ExperimentEnv {
    pub n: usize,
    pub half_width: f64,
    pub family: FamilyKind,
    pub seed: u64,
}

impl Default for ExperimentEnv {
    fn default() -> Self {
        Self { n: 256, half_width: 8.0, family: FamilyKind::ShiftedDyadic, seed: 17 }
    }
}

impl ExperimentEnv {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(0.0, self.half_width, self.n)
    }
}

/// `sum phi^k(|f_i| / t) w_i h` over the support of `f`.
pub fn weighted_orlicz_integral(
    f: &GridFunction,
    w: Option<&GridFunction>,
    k: usize,
    t: f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid(format!("Orlicz integral scale must be positive, got {t}")));
    }
    if let Some(w) = w {
        if w.grid() != f.grid() {
            return Err(CzError::GridMismatch);
        }
    }
    let h = f.grid().spacing();
    let mut sum = 0.0;
    for (i, &v) in f.values().iter().enumerate() {
        if v != 0.0 {
            let wv = w.map_or(1.0, |w| w.value(i));
            sum += phi_iter(k, v.abs() / t)? * wv;
        }
    }
    Ok(sum * h)
}

/// Exact `sup_{lambda > 0} lambda^p (h sum_{|v_i| >= lambda} w_i)`:
/// the sup of the strict-inequality form is attained as a left limit at a
/// data value, so scanning the sorted distinct values is exact.
pub fn weak_power_sup(values: &[f64], weights: &[f64], p: f64, h: f64) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].abs().partial_cmp(&values[a].abs()).unwrap());
    let mut sup = 0.0_f64;
    let mut cum = 0.0;
    for &i in &order {
        let v = values[i].abs();
        cum += weights[i];
        if v > 0.0 {
            sup = sup.max(v.powf(p) * cum * h);
        }
    }
    sup
}

// ---------------------------------------------------------------------------
// Orlicz-side statements
// ---------------------------------------------------------------------------

/// Largest relative error of the identity
/// `||chi_A||_{phi^k, Q} = 1 / (phi^k)^{-1}(|Q| / |A|)` over random
/// cell-aligned pairs `A subset Q`, and the wall time spent.
pub fn indicator_identity_stats(n: usize, pairs: usize, seed: u64) -> Result<(f64, f64)> {
    let grid = Grid::new(0.0, 8.0, n)?;
    let h = grid.spacing();
    let mut rng = rng_for(seed, 1);
    let start = Instant::now();
    let mut max_rel = 0.0_f64;
    for _ in 0..pairs {
        let a = rng.gen_range(0..n - 1);
        let b = rng.gen_range(a + 2..=n.min(a + 2 + n / 2));
        let c = rng.gen_range(a..b - 1);
        let d = rng.gen_range(c + 1..=b);
        let mut vals = vec![0.0; n];
        for v in &mut vals[c..d] {
            *v = 1.0;
        }
        let f = GridFunction::from_values(grid, vals)?;
        let q = Cube::new(&grid, grid.origin() + a as f64 * h, (b - a) as f64 * h)?;
        for k in 1..=2usize {
            let norm = luxemburg_norm(&f, &q, k)?;
            let expect = 1.0 / phi_inverse(k, (b - a) as f64 / (d - c) as f64)?;
            max_rel = max_rel.max((norm - expect).abs() / expect);
        }
    }
    Ok((max_rel, start.elapsed().as_secs_f64()))
}

/// Dichotomy and equivalence statistics over random draws on the window
/// cube: `||f||_{phi,Q} > 1` must coincide with `avg_Q phi(|f|) > 1`, and the
/// variational functional must lie in `[norm, 2 norm]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct DichotomyStats {
    pub draws: usize,
    pub skipped: usize,
    pub dichotomy_violations: usize,
    pub equivalence_violations: usize,
    pub min_equiv_ratio: f64,
    pub max_equiv_ratio: f64,
}

pub fn dichotomy_stats(n: usize, draws: usize, seed: u64) -> Result<DichotomyStats> {
    let grid = Grid::new(0.0, 8.0, n)?;
    let q = Cube::new(&grid, grid.origin(), grid.window_length())?;
    let mut rng = rng_for(seed, 2);
    let mut stats = DichotomyStats {
        min_equiv_ratio: f64::INFINITY,
        ..DichotomyStats::default()
    };
    while stats.draws < draws {
        let scale = 10f64.powf(rng.gen_range(-1.2..1.2));
        let f = draw_function(&mut rng, grid.window_length()).sample(grid)?;
        let f = f.scale(scale)?;
        if f.support_indices().is_empty() {
            stats.skipped += 1;
            continue;
        }
        stats.draws += 1;
        let norm = luxemburg_norm(&f, &q, 1)?;
        let avg_phi = weighted_orlicz_integral(&f, None, 1, 1.0)? / q.length();
        if (norm - 1.0).abs() > 1e-7 && (norm > 1.0) != (avg_phi > 1.0) {
            stats.dichotomy_violations += 1;
        }
        let equiv = luxemburg_equiv_functional(&f, &q, 1)?;
        let ratio = equiv / norm;
        stats.min_equiv_ratio = stats.min_equiv_ratio.min(ratio);
        stats.max_equiv_ratio = stats.max_equiv_ratio.max(ratio);
        if !(1.0 - 1e-6..=2.0 + 1e-6).contains(&ratio) {
            stats.equivalence_violations += 1;
        }
    }
    Ok(stats)
}

// ---------------------------------------------------------------------------
// Maximal-side statements
// ---------------------------------------------------------------------------

/// Pointwise bounds of `M_{L log L} f / M(M f)` pooled over draws: both sups
/// run over the same family, so the ratio is trapped between dimensional
/// constants.
#[derive(Clone, Copy, Debug)]
pub struct RatioBounds {
    pub lo: f64,
    pub hi: f64,
}

pub fn mllogl_vs_mm_bounds(n: usize, draws: usize, seed: u64) -> Result<RatioBounds> {
    let grid = Grid::new(0.0, 8.0, n)?;
    let family = CubeFamily::new(grid, FamilyKind::ShiftedDyadic)?;
    let mut rng = rng_for(seed, 3);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    let mut done = 0;
    while done < draws {
        let f = draw_nonnegative(&mut rng, grid.window_length()).sample(grid)?;
        if f.support_indices().is_empty() {
            continue;
        }
        done += 1;
        let a = m_llogl(std::slice::from_ref(&f), &family, 1)?;
        let mf = maximal_delta(&f, &family, 1.0)?;
        let mmf = maximal_delta(&mf, &family, 1.0)?;
        for i in 0..grid.n() {
            if mmf.value(i) > 0.0 {
                let r = a.value(i) / mmf.value(i);
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    Ok(RatioBounds { lo, hi })
}

/// Closed-form check series for the all-intervals maximal function of a unit
/// indicator: rows `(lambda, measured superlevel, 2/lambda - 1)`.
pub fn maximal_closed_form_series(n: usize, half_width: f64) -> Result<Vec<(f64, f64, f64)>> {
    let grid = Grid::new(0.0, half_width, n)?;
    let f = build_grid_function(grid, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 })?;
    let family = CubeFamily::new(grid, FamilyKind::All)?;
    let m = maximal_delta(&f, &family, 1.0)?;
    let h = grid.spacing();
    let lambdas = geometric_grid(4.5 * h, 0.95, 16)?;
    let mut rows = Vec::with_capacity(lambdas.len());
    for lambda in lambdas {
        let measured = superlevel_measure(&m, lambda, None)?;
        rows.push((lambda, measured, 2.0 / lambda - 1.0));
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Commutator statements
// ---------------------------------------------------------------------------

/// Agreement between the two commutator routes on random draws, plus the
/// largest absolute output for constant symbols (which must vanish).
#[derive(Clone, Copy, Debug)]
pub struct RouteAgreement {
    pub max_rel: f64,
    pub max_const_abs: f64,
}

pub fn commutator_route_agreement(n: usize, draws: usize, seed: u64) -> Result<RouteAgreement> {
    let grid = Grid::new(0.0, 4.0, n)?;
    let family = CubeFamily::new(grid, FamilyKind::Dyadic)?;
    let kernel = riesz_bilinear_kernel();
    let mut rng = rng_for(seed, 4);
    let span = grid.window_length();
    let mut max_rel = 0.0_f64;
    for _ in 0..draws {
        let symbols = SymbolTuple::new(
            vec![draw_symbol(&mut rng, span).sample(grid)?, draw_symbol(&mut rng, span).sample(grid)?],
            &family,
        )?;
        let fs = [
            draw_function(&mut rng, span).sample(grid)?,
            draw_function(&mut rng, span).sample(grid)?,
        ];
        let a = iterated_commutator_kernel(&kernel, &symbols, &fs)?;
        let b = iterated_commutator_expansion(&kernel, &symbols, &fs)?;
        let scale = a.max_abs().max(b.max_abs());
        if scale == 0.0 {
            continue;
        }
        for i in 0..grid.n() {
            max_rel = max_rel.max((a.value(i) - b.value(i)).abs() / scale);
        }
    }
    let mut max_const_abs = 0.0_f64;
    for _ in 0..10 {
        let c1 = rng.gen_range(-5.0..5.0);
        let c2 = rng.gen_range(-5.0..5.0);
        let symbols = SymbolTuple::new(
            vec![GridFunction::constant(grid, c1)?, GridFunction::constant(grid, c2)?],
            &family,
        )?;
        let fs = [
            draw_function(&mut rng, span).sample(grid)?,
            draw_function(&mut rng, span).sample(grid)?,
        ];
        let a = iterated_commutator_kernel(&kernel, &symbols, &fs)?;
        let b = iterated_commutator_expansion(&kernel, &symbols, &fs)?;
        max_const_abs = max_const_abs.max(a.max_abs()).max(b.max_abs());
    }
    Ok(RouteAgreement { max_rel, max_const_abs })
}

/// Sup over nodes and configurations of
/// `M^#_delta(T_PI_b f) / ( prod_j ||b_j||_osc ( M_eps(T f) + M_{L log L} f ) )`,
/// the pointwise control of iterated commutators. The first configuration is
/// the canonical one (symbols `log|1 + x|`, unit indicators); `draws` random
/// corpus configurations follow. Requires `0 < delta < eps < 1/2` for the
/// bilinear kernel.
pub fn pointwise_bound_sup(
    n: usize,
    draws: usize,
    seed: u64,
    delta: f64,
    eps: f64,
) -> Result<f64> {
    if !(0.0 < delta && delta < eps && eps < 0.5) {
        return Err(invalid(format!(
            "pointwise bound needs 0 < delta < eps < 1/2, got delta {delta}, eps {eps}"
        )));
    }
    let grid = Grid::new(0.0, 8.0, n)?;
    let family = CubeFamily::new(grid, FamilyKind::ShiftedDyadic)?;
    let kernel = riesz_bilinear_kernel();
    let mut rng = rng_for(seed, 5);
    let chi = build_grid_function(grid, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 })?;
    let blog = build_grid_function(grid, |x| (1.0 + x).abs().ln())?;
    let mut configs: Vec<([GridFunction; 2], SymbolTuple)> = vec![(
        [chi.clone(), chi],
        SymbolTuple::new(vec![blog.clone(), blog], &family)?,
    )];
    let mut done = 0;
    while done < draws {
        // Narrow draws keep quadrature costs quadratic in a small support.
        let f1 = draw_function(&mut rng, 4.0).sample(grid)?;
        let f2 = draw_function(&mut rng, 4.0).sample(grid)?;
        let symbols = SymbolTuple::new(
            vec![
                draw_symbol(&mut rng, grid.window_length()).sample(grid)?,
                draw_symbol(&mut rng, grid.window_length()).sample(grid)?,
            ],
            &family,
        )?;
        if f1.support_indices().is_empty()
            || f2.support_indices().is_empty()
            || symbols.product_norm() == 0.0
        {
            continue;
        }
        done += 1;
        configs.push(([f1, f2], symbols));
    }
    let mut sup = 0.0_f64;
    for (fs, symbols) in configs {
        let tf = apply_operator(&kernel, &fs)?;
        let tc = iterated_commutator_kernel(&kernel, &symbols, &fs)?;
        let out_family = CubeFamily::new(tf.grid(), FamilyKind::ShiftedDyadic)?;
        let lhs = sharp_maximal_delta(&tc, &out_family, delta)?;
        let m_eps = maximal_delta(&tf, &out_family, eps)?;
        let m_ll = m_llogl(&fs, &family, 1)?;
        let coeff = symbols.product_norm();
        for i in 0..grid.n() {
            let rhs = coeff * (m_eps.value(i) + m_ll.value(i));
            if rhs > 0.0 {
                sup = sup.max(lhs.value(i) / rhs);
            }
        }
    }
    Ok(sup)
}

/// Strong-bound statistics for the iterated commutator: over corpus draws
/// with admissible power weights `w_j = |x - c_j|^{a_j}`, `a_j` drawn inside
/// `(-0.9, 0.9)` so every component condition holds, the ratio
/// `||T(b, f)||_{L^1(nu)} / ( prod_j ||b_j||_osc prod_j ||f_j||_{L^2(w_j)} )`
/// with coupling weight `nu = (w_1 w_2)^{1/2}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct StrongBoundStats {
    pub draws: usize,
    pub skipped: usize,
    pub max_ratio: f64,
}

pub fn strong_bound_stats(n: usize, draws: usize, seed: u64) -> Result<StrongBoundStats> {
    let grid = Grid::new(0.0, 8.0, n)?;
    let family = CubeFamily::new(grid, FamilyKind::ShiftedDyadic)?;
    let kernel = riesz_bilinear_kernel();
    let mut rng = rng_for(seed, 9);
    let mut stats = StrongBoundStats::default();
    while stats.draws < draws {
        let f1 = draw_function(&mut rng, 4.0).sample(grid)?;
        let f2 = draw_function(&mut rng, 4.0).sample(grid)?;
        let symbols = SymbolTuple::new(
            vec![
                draw_symbol(&mut rng, grid.window_length()).sample(grid)?,
                draw_symbol(&mut rng, grid.window_length()).sample(grid)?,
            ],
            &family,
        )?;
        let a1 = rng.gen_range(-0.9..0.9);
        let a2 = rng.gen_range(-0.9..0.9);
        // Continuous centers almost surely miss every node of both grids.
        let c1 = rng.gen_range(-2.0..2.0);
        let c2 = rng.gen_range(-2.0..2.0);
        if f1.support_indices().is_empty()
            || f2.support_indices().is_empty()
            || symbols.product_norm() == 0.0
        {
            stats.skipped += 1;
            continue;
        }
        stats.draws += 1;
        let w1 = build_grid_function(grid, |x| (x - c1).abs().powf(a1))?;
        let w2 = build_grid_function(grid, |x| (x - c2).abs().powf(a2))?;
        let fs = [f1, f2];
        let t = iterated_commutator_kernel(&kernel, &symbols, &fs)?;
        let nu = build_grid_function(t.grid(), |x| {
            ((x - c1).abs().powf(a1) * (x - c2).abs().powf(a2)).sqrt()
        })?;
        let num = weighted_lp_norm(&t, 1.0, &nu)?;
        let den = symbols.product_norm()
            * weighted_lp_norm(&fs[0], 2.0, &w1)?
            * weighted_lp_norm(&fs[1], 2.0, &w2)?;
        if den > 1e-300 {
            stats.max_ratio = stats.max_ratio.max(num / den);
        }
    }
    Ok(stats)
}

// ---------------------------------------------------------------------------
// Endpoint functionals and divergence series
// ---------------------------------------------------------------------------

/// Endpoint ratio series for an operator or maximal output `g` against the
/// source tuple `fs` with component weights `ws` and coupling weight `nu`
/// (sampled on `g`'s grid):
/// `ratio(t) = nu({|g| > t^m}) / prod_j ( sum phi^k(|f_j|/t) w_j h )^{1/m}`.
/// A bound of this shape with `k = m` is the endpoint theorem; with smaller
/// iterates the ratio diverges.
pub fn endpoint_ratio_series(
    g: &GridFunction,
    nu: &GridFunction,
    fs: &[GridFunction],
    ws: &[Option<&GridFunction>],
    k: usize,
    t_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if fs.len() != ws.len() {
        return Err(CzError::LengthMismatch { got: ws.len(), want: fs.len() });
    }
    let m = fs.len() as f64;
    let mut series = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let num = superlevel_measure(g, t.powf(m), Some(nu))?;
        let mut den = 1.0_f64;
        for (f, w) in fs.iter().zip(ws) {
            den *= weighted_orlicz_integral(f, *w, k, t)?.powf(1.0 / m);
        }
        // A vanishing integral with mass still above the threshold marks a
        // degenerate datapoint (t beyond the data range); flag it loudly.
        let ratio = if den > 0.0 {
            num / den
        } else if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        series.push((t, ratio));
    }
    Ok(series)
}

/// Bounded-side endpoint series for the two-factor Orlicz maximal function
/// with unit indicators and Lebesgue measure: the ratio of
/// `|{ M_{L log L}(chi, chi) > t^2 }|` to the geometric mean of two-iterate
/// Orlicz integrals, over a geometric `t` grid. The endpoint theorem makes
/// this bounded; compare `maximal_divergence_series` for the single-iterate
/// blow-up.
pub fn maximal_endpoint_ratio_series(
    n: usize,
    half_width: f64,
    t_lo: f64,
    t_hi: f64,
    per_decade: usize,
) -> Result<Vec<(f64, f64)>> {
    let grid = Grid::new(0.0, half_width, n)?;
    let f = build_grid_function(grid, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 })?;
    let family = CubeFamily::new(grid, FamilyKind::ShiftedDyadic)?;
    let g = m_llogl(&[f.clone(), f.clone()], &family, 1)?;
    let one = GridFunction::constant(grid, 1.0)?;
    let t_grid = geometric_grid(t_lo, t_hi, per_decade)?;
    endpoint_ratio_series(&g, &one, &[f.clone(), f], &[None, None], 2, &t_grid)
}

/// Bounded-side endpoint series for the iterated commutator with symbols
/// `log|1 + x|` and unit indicators: the ratio of `|{ |T(b, f)| > t^2 }|` to
/// the geometric mean of two-iterate Orlicz integrals over a geometric `t`
/// grid. Bounded by the commutator endpoint theorem.
pub fn commutator_endpoint_ratio_series(
    n: usize,
    half_width: f64,
    t_lo: f64,
    t_hi: f64,
    per_decade: usize,
) -> Result<Vec<(f64, f64)>> {
    let grid = Grid::new(0.0, half_width, n)?;
    let f = build_grid_function(grid, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 })?;
    let b = build_grid_function(grid, |x| (1.0 + x).abs().ln())?;
    let family = CubeFamily::new(grid, FamilyKind::ShiftedDyadic)?;
    let symbols = SymbolTuple::new(vec![b.clone(), b], &family)?;
    let kernel = riesz_bilinear_kernel();
    let t_op = iterated_commutator_kernel(&kernel, &symbols, &[f.clone(), f.clone()])?;
    let one = GridFunction::constant(t_op.grid(), 1.0)?;
    let t_grid = geometric_grid(t_lo, t_hi, per_decade)?;
    endpoint_ratio_series(&t_op, &one, &[f.clone(), f], &[None, None], 2, &t_grid)
}

/// Divergence series for the bilinear Orlicz maximal endpoint: with
/// `f_1 = f_2 = chi_(0,1)` on a wide sparse grid,
/// `G(s) = |{ M_{L log L}(f) >= s }|^2 / ( sum phi(|f_1|/s) h * sum phi(|f_2|) h )`.
/// A bound of this shape would force `G` to stay bounded; instead it grows
/// like `log(1/s)`, which is the sharpness statement.
///
/// The discrete maximal function is a staircase over the cube family, so
/// sampling `G` on an arbitrary threshold grid produces a sawtooth (G climbs
/// within each value step and crashes at each level crossing). The
/// thresholds are therefore taken at the staircase's own distinct values,
/// which traces the upper envelope — the object with continuum meaning.
pub fn maximal_divergence_series(
    n: usize,
    half_width: f64,
    s_lo: f64,
    s_hi: f64,
    max_points: usize,
) -> Result<Vec<(f64, f64)>> {
    if max_points < 3 {
        return Err(invalid(format!("need at least 3 series points, got {max_points}")));
    }
    let grid = Grid::new(0.0, half_width, n)?;
    let h = grid.spacing();
    let f = build_grid_function(grid, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 })?;
    let family = CubeFamily::new(grid, FamilyKind::ShiftedDyadic)?;
    let m = m_llogl(&[f.clone(), f.clone()], &family, 1)?;
    let mut levels: Vec<f64> = m
        .values()
        .iter()
        .copied()
        .filter(|v| *v >= s_lo && *v <= s_hi)
        .collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * *b);
    if levels.len() > max_points {
        let step = levels.len() as f64 / max_points as f64;
        levels = (0..max_points)
            .map(|i| levels[(i as f64 * step) as usize])
            .collect();
    }
    let mut sorted = m.values().to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let fixed = weighted_orlicz_integral(&f, None, 1, 1.0)?;
    let mut series = Vec::with_capacity(levels.len());
    for s in levels {
        let count = sorted.len() - sorted.partition_point(|v| *v < s);
        let measure = count as f64 * h;
        let den = weighted_orlicz_integral(&f, None, 1, s)? * fixed;
        let val = if den > 0.0 { measure * measure / den } else { 0.0 };
        series.push((s, val));
    }
    Ok(series)
}

/// Divergence series for the iterated-commutator endpoint: symbols
/// `log|1 + x|` and unit indicators on a wide sparse grid,
/// `G(lambda) = |{ |T(b, f)| > lambda }|^2 / phi(1/lambda)`.
/// Boundedness would correspond to a single-phi endpoint inequality; the
/// observed logarithmic growth shows the iterated scale is genuinely needed.
pub fn commutator_divergence_series(
    n: usize,
    half_width: f64,
    l_lo: f64,
    l_hi: f64,
    per_decade: usize,
) -> Result<Vec<(f64, f64)>> {
    let grid = Grid::new(0.0, half_width, n)?;
    let f = build_grid_function(grid, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 })?;
    let b = build_grid_function(grid, |x| (1.0 + x).abs().ln())?;
    let family = CubeFamily::new(grid, FamilyKind::ShiftedDyadic)?;
    let symbols = SymbolTuple::new(vec![b.clone(), b], &family)?;
    let kernel = riesz_bilinear_kernel();
    let t = iterated_commutator_kernel(&kernel, &symbols, &[f.clone(), f])?;
    let mut series = Vec::new();
    for lambda in geometric_grid(l_lo, l_hi, per_decade)? {
        let measure = superlevel_measure(&t, lambda, None)?;
        let den = phi_iter(1, 1.0 / lambda)?;
        series.push((lambda, measure * measure / den));
    }
    Ok(series)
}

/// Max over positive entries divided by the median of the positive entries.
pub fn max_over_median(series: &[(f64, f64)]) -> f64 {
    let mut pos: Vec<f64> = series.iter().map(|(_, v)| *v).filter(|v| *v > 0.0).collect();
    if pos.is_empty() {
        return f64::INFINITY;
    }
    pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = pos[pos.len() / 2];
    pos[pos.len() - 1] / median
}

// ---------------------------------------------------------------------------
// Oscillation-control (Fefferman-Stein type) ratios
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Default)]
pub struct FsStats {
    pub draws: usize,
    pub degenerate: usize,
    pub min_strong: f64,
    pub max_strong: f64,
    pub max_weak: f64,
}

/// Weighted strong and weak ratios of `M_delta g` against `M^#_delta g`
/// over corpus draws: for reasonable weights both stay bounded.
pub fn fefferman_stein_stats(n: usize, draws: usize, seed: u64, delta: f64) -> Result<FsStats> {
    let grid = Grid::new(0.0, 8.0, n)?;
    let family = CubeFamily::new(grid, FamilyKind::ShiftedDyadic)?;
    let mut rng = rng_for(seed, 6);
    let h = grid.spacing();
    let mut stats = FsStats { min_strong: f64::INFINITY, ..FsStats::default() };
    while stats.draws < draws {
        let g = draw_function(&mut rng, grid.window_length()).sample(grid)?;
        let w = draw_weight(&mut rng, grid.window_length()).sample(grid)?;
        let p = if rng.gen::<bool>() { 1.0 } else { 1.5 };
        if g.support_indices().is_empty() {
            continue;
        }
        stats.draws += 1;
        let md = maximal_delta(&g, &family, delta)?;
        let ms = sharp_maximal_delta(&g, &family, delta)?;
        let strong_num: f64 = md
            .values()
            .iter()
            .zip(w.values())
            .map(|(&v, &wv)| v.powf(p) * wv)
            .sum::<f64>()
            * h;
        let strong_den: f64 = ms
            .values()
            .iter()
            .zip(w.values())
            .map(|(&v, &wv)| v.powf(p) * wv)
            .sum::<f64>()
            * h;
        let weak_num = weak_power_sup(md.values(), w.values(), p, h);
        let weak_den = weak_power_sup(ms.values(), w.values(), p, h);
        if strong_den < 1e-300 || weak_den < 1e-300 {
            stats.degenerate += 1;
            continue;
        }
        let strong = strong_num / strong_den;
        stats.min_strong = stats.min_strong.min(strong);
        stats.max_strong = stats.max_strong.max(strong);
        stats.max_weak = stats.max_weak.max(weak_num / weak_den);
    }
    Ok(stats)
}

// ---------------------------------------------------------------------------
// Weight characterization sweep
// ---------------------------------------------------------------------------

/// One grid point of the componentwise characterization sweep: growth
/// factors of every constant under grid doubling, and the two finiteness
/// verdicts that the acceptance criterion compares.
#[derive(Clone, Debug)]
pub struct CharRow {
    pub a1: f64,
    pub a2: f64,
    pub joint_growth: f64,
    pub nu_growth: f64,
    pub component_growth: Vec<f64>,
    pub joint_divergent: bool,
    pub components_divergent: bool,
}

/// Growth factor that separates a divergent constant from a stable one.
pub const GROWTH_THRESHOLD: f64 = 2.0;

/// Sweep power-weight pairs `(|x|^{a1}, |x|^{a2})` with exponents `(2, 2)`:
/// the joint constant is finite exactly when the component conditions hold,
/// so the divergence verdicts must agree pointwise on the sweep.
pub fn characterization_sweep(
    base_n: usize,
    half_width: f64,
    exponents: &[f64],
) -> Result<Vec<CharRow>> {
    let exps = ExponentVector::new(vec![2.0, 2.0])?;
    let mut rows = Vec::with_capacity(exponents.len() * exponents.len());
    for &a1 in exponents {
        for &a2 in exponents {
            let mut per_res: Vec<CharacterizationConstants> = Vec::with_capacity(2);
            for n in [base_n, base_n * 2] {
                let grid = Grid::new(0.0, half_width, n)?;
                let family = CubeFamily::new(grid, FamilyKind::ShiftedDyadic)?;
                let w1 = power_weight(grid, a1)?;
                let w2 = power_weight(grid, a2)?;
                per_res.push(characterization_constants(&[w1, w2], &exps, &family)?);
            }
            let joint_growth = per_res[1].multi_ap / per_res[0].multi_ap;
            let nu_growth = per_res[1].nu_ap / per_res[0].nu_ap;
            let component_growth: Vec<f64> = per_res[1]
                .component
                .iter()
                .zip(&per_res[0].component)
                .map(|(b, a)| b / a)
                .collect();
            let joint_divergent = joint_growth > GROWTH_THRESHOLD;
            let components_divergent = nu_growth > GROWTH_THRESHOLD
                || component_growth.iter().any(|&g| g > GROWTH_THRESHOLD);
            rows.push(CharRow {
                a1,
                a2,
                joint_growth,
                nu_growth,
                component_growth,
                joint_divergent,
                components_divergent,
            });
        }
    }
    Ok(rows)
}

/// Constants of the unit weight vector, which must all equal 1 exactly;
/// exercises both the conjugate-exponent and the `p_j = 1` branches.
pub fn unit_weight_constants(n: usize) -> Result<Vec<CharacterizationConstants>> {
    let grid = Grid::new(0.0, 8.0, n)?;
    let family = CubeFamily::new(grid, FamilyKind::ShiftedDyadic)?;
    let one = GridFunction::constant(grid, 1.0)?;
    let mut out = Vec::new();
    for ps in [vec![2.0, 2.0], vec![1.0, 2.0], vec![1.0, 1.0]] {
        let exps = ExponentVector::new(ps)?;
        out.push(characterization_constants(&[one.clone(), one.clone()], &exps, &family)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Kolmogorov sweep
// ---------------------------------------------------------------------------

/// Count violations of the weak-vs-strong norm inequality on random data,
/// cubes, and exponent pairs; also return the largest lhs/rhs ratio seen.
pub fn kolmogorov_violations(n: usize, draws: usize, seed: u64) -> Result<(usize, f64)> {
    let grid = Grid::new(0.0, 8.0, n)?;
    let mut rng = rng_for(seed, 8);
    let h = grid.spacing();
    let mut violations = 0;
    let mut max_ratio = 0.0_f64;
    for _ in 0..draws {
        let f = GridFunction::from_values(
            grid,
            (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect(),
        )?;
        let a = rng.gen_range(0..n - 1);
        let b = rng.gen_range(a + 1..n);
        let q = Cube::new(&grid, grid.origin() + a as f64 * h, (b - a) as f64 * h)?;
        let p = rng.gen_range(0.05..0.95);
        let q_exp = rng.gen_range(p + 0.01..1.0);
        let (lhs, rhs) = crate::lattice::kolmogorov_pair(&f, &q, p, q_exp)?;
        if rhs > 0.0 {
            max_ratio = max_ratio.max(lhs / rhs);
        }
        if lhs > rhs * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    Ok((violations, max_ratio))
}
