//! Acceptance checks: every quantitative claim the toolkit makes, each with
//! pinned parameters and tolerances. Each check returns a `CriterionResult`
//! so the test suite and the CLI can share one implementation.

use crate::endpoint::experiments::{
    characterization_sweep, commutator_divergence_series, commutator_endpoint_ratio_series,
    commutator_route_agreement, dichotomy_stats, fefferman_stein_stats, indicator_identity_stats,
    kolmogorov_violations, maximal_closed_form_series, maximal_divergence_series,
    maximal_endpoint_ratio_series, max_over_median, mllogl_vs_mm_bounds, pointwise_bound_sup,
    strong_bound_stats, unit_weight_constants,
};
use crate::endpoint::report::linear_fit;
use crate::error::Result;

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("[acceptance] {}: {} ({})", self.name, verdict, self.detail)
    }
}

// --- pinned budgets and tolerances ------------------------------------------------

/// Random cell-aligned indicator/cube pairs checked against the closed form
/// (each pair is checked with both the single and the doubled iterate).
pub const IDENTITY_PAIRS: usize = 200;
/// Relative tolerance for the indicator-norm closed form.
pub const IDENTITY_MAX_REL: f64 = 1e-6;
/// Wall-time budget for the identity sweep (seconds).
pub const IDENTITY_MAX_SECONDS: f64 = 5.0;

/// Random draws for the norm dichotomy and the variational equivalence.
pub const DICHOTOMY_DRAWS: usize = 500;

/// Corpus size for the Orlicz-vs-iterated maximal comparison.
pub const MLLOGL_DRAWS: usize = 100;
/// Allowed spread (hi/lo) between the Orlicz maximal function and the
/// twice-iterated maximal function, pooled over draws and nodes.
pub const MLLOGL_SPREAD_MAX: f64 = 32.0;
/// Allowed relative drift of the spread bounds under grid doubling.
pub const MLLOGL_DRIFT_MAX: f64 = 0.25;

/// Random symbol/data draws for the commutator route comparison.
pub const ROUTE_DRAWS: usize = 50;
/// Relative agreement required between the two commutator routes.
pub const ROUTE_REL_TOL: f64 = 1e-10;
/// Absolute bound on commutators of constant symbols.
pub const ROUTE_CONST_TOL: f64 = 1e-12;

/// Cap on the pointwise-domination ratio (sharp function of the commutator
/// against the oscillation-times-maximal side). Observed 1.10e-5 at both
/// n = 256 and n = 1024 (the canonical log-symbol configuration dominates
/// the random draws); pinned with ~9x headroom.
pub const POINTWISE_SUP_CAP: f64 = 1e-4;
/// Allowed growth of that ratio from n = 256 to n = 1024 (observed 1.003).
pub const POINTWISE_GROWTH_MAX: f64 = 2.0;

/// Geometric threshold grid for the bounded endpoint functionals.
pub const ENDPOINT_T_LO: f64 = 1e-3;
pub const ENDPOINT_T_HI: f64 = 1e3;
pub const ENDPOINT_T_PER_DECADE: usize = 64;
/// The bounded functionals must stay flat: max over the grid at most this
/// multiple of the median of the positive values (observed 4.9 and 2.3).
pub const BOUNDED_MAX_OVER_MEDIAN: f64 = 50.0;
/// Allowed relative drift of the bounded-functional max under grid doubling
/// (observed 0.00 for the maximal form, 0.148 for the commutator form).
pub const BOUNDED_MAX_DRIFT: f64 = 0.2;

/// Threshold range for the divergent single-iterate variants.
pub const DIVERGENCE_S_LO: f64 = 1e-6;
pub const DIVERGENCE_S_HI: f64 = 1e-1;
/// Point budget for the staircase-envelope series (the staircase has ~10
/// distinct levels across five decades) and grid density for the smooth one.
pub const DIVERGENCE_MAX_POINTS: usize = 64;
pub const DIVERGENCE_PER_DECADE: usize = 16;
/// Divergence series: required end-to-end growth factor, minimum linear-fit
/// quality in log(1/s), spike guard, allowed cross-resolution relative
/// deviation of slope and growth, and the largest per-point dip tolerated in
/// the half-resolution companion (the full-resolution series must be
/// monotone). Observed: slopes 0.68 / 0.58 with r2 0.9999 / 0.990, growths
/// 2.7 / 78, zero fine-grid dips, worst coarse dip 9.3e-3.
pub const DIVERGENCE_MIN_GROWTH: f64 = 2.0;
pub const DIVERGENCE_MIN_R2: f64 = 0.9;
pub const DIVERGENCE_MAX_SPREAD: f64 = 50.0;
pub const DIVERGENCE_MAX_SLOPE_DEV: f64 = 0.2;
pub const DIVERGENCE_MAX_GROWTH_DEV: f64 = 0.2;
pub const DIVERGENCE_COARSE_DROP_MAX: f64 = 0.02;
/// Wide window for the endpoint runs: the superlevel set of the slowest
/// decaying case extends to |x| ~ 1.06e4 at the smallest threshold, safely
/// inside; the resolution keeps the cell width at 1/8.
pub const DIVERGENCE_HALF_WIDTH: f64 = 16384.0;
pub const DIVERGENCE_N: usize = 1 << 18;

/// Strong-bound corpus: draw budget, cap on the weighted-norm ratio
/// (observed 2.53 at n = 256 and n = 512, refinement growth 1.004; pinned
/// with ~3x headroom), and the allowed refinement factor.
pub const STRONG_BOUND_DRAWS: usize = 100;
pub const STRONG_BOUND_CAP: f64 = 8.0;
pub const STRONG_BOUND_GROWTH_MAX: f64 = 2.0;

/// Oscillation-control (sharp-function) ratios: draw budget, smoothing
/// power, caps pinned from an observation run (strong 182.4, weak 134.2,
/// refinement growth 1.01; caps carry ~2.2x headroom), and a floor implied
/// by the pointwise bound `M^#_delta f <= 2^{1/delta} M_delta f` at p <= 1.5.
pub const FS_DRAWS: usize = 100;
pub const FS_DELTA: f64 = 0.25;
pub const FS_STRONG_CAP: f64 = 400.0;
pub const FS_WEAK_CAP: f64 = 300.0;
pub const FS_STRONG_FLOOR: f64 = 0.015625;
pub const FS_GROWTH_MAX: f64 = 2.0;

/// Power-weight exponents swept in the characterization check; chosen away
/// from class boundaries so divergence shows a clear growth signature.
pub const CHARACTERIZATION_EXPONENTS: [f64; 5] = [-2.5, -1.0, 0.0, 0.5, 4.5];

/// Allowed deviation, in cell widths, between the measured superlevel sets
/// of the indicator maximal function and the exact formula `2/lambda - 1`.
pub const CLOSED_FORM_TOL_CELLS: f64 = 4.0;

/// Random draws for the weak-vs-strong norm inequality.
pub const KOLMOGOROV_DRAWS: usize = 500;

/// Base seed for every acceptance run; criteria use disjoint streams.
pub const ACCEPTANCE_SEED: u64 = 2026;

fn verdict(name: &'static str, passed: bool, detail: String) -> CriterionResult {
    CriterionResult { name, passed, detail }
}

// --- criteria ---------------------------------------------------------------------

/// The Luxemburg norm of a cell-aligned indicator over a cell-aligned cube
/// must match `1 / (phi^k)^{-1}(|Q|/|A|)` to high accuracy, quickly.
pub fn criterion_indicator_identity() -> Result<CriterionResult> {
    let (max_rel, secs) = indicator_identity_stats(1024, IDENTITY_PAIRS, ACCEPTANCE_SEED)?;
    let passed = max_rel <= IDENTITY_MAX_REL && secs <= IDENTITY_MAX_SECONDS;
    Ok(verdict(
        "orlicz_indicator_identity",
        passed,
        format!("max rel err {max_rel:.3e} over {IDENTITY_PAIRS} pairs in {secs:.2}s"),
    ))
}

/// `||f||_{phi,Q} > 1` iff `avg_Q phi(|f|) > 1`, and the variational
/// functional stays inside `[norm, 2 norm]`.
pub fn criterion_dichotomy_equivalence() -> Result<CriterionResult> {
    let stats = dichotomy_stats(512, DICHOTOMY_DRAWS, ACCEPTANCE_SEED)?;
    let passed = stats.dichotomy_violations == 0 && stats.equivalence_violations == 0;
    Ok(verdict(
        "orlicz_dichotomy_and_equivalence",
        passed,
        format!(
            "{} draws, {} dichotomy / {} equivalence violations, ratio in [{:.4}, {:.4}]",
            stats.draws,
            stats.dichotomy_violations,
            stats.equivalence_violations,
            stats.min_equiv_ratio,
            stats.max_equiv_ratio
        ),
    ))
}

/// The Orlicz maximal function is pointwise comparable to the iterated
/// maximal function `M(Mf)`, with a spread that is stable under refinement.
pub fn criterion_orlicz_maximal_equivalence() -> Result<CriterionResult> {
    let coarse = mllogl_vs_mm_bounds(256, MLLOGL_DRAWS, ACCEPTANCE_SEED)?;
    let fine = mllogl_vs_mm_bounds(512, MLLOGL_DRAWS, ACCEPTANCE_SEED)?;
    let spread_c = coarse.hi / coarse.lo;
    let spread_f = fine.hi / fine.lo;
    let drift_hi = (fine.hi - coarse.hi).abs() / coarse.hi;
    let drift_lo = (fine.lo - coarse.lo).abs() / coarse.lo;
    let passed = spread_c <= MLLOGL_SPREAD_MAX
        && spread_f <= MLLOGL_SPREAD_MAX
        && drift_hi <= MLLOGL_DRIFT_MAX
        && drift_lo <= MLLOGL_DRIFT_MAX;
    Ok(verdict(
        "orlicz_maximal_matches_iterated",
        passed,
        format!(
            "{MLLOGL_DRAWS} draws: ratio spread {spread_c:.2} (n=256) / {spread_f:.2} (n=512), drift hi {drift_hi:.3} lo {drift_lo:.3}"
        ),
    ))
}

/// The weighted-quadrature route and the inclusion-exclusion route to the
/// iterated commutator agree, and constant symbols annihilate it.
pub fn criterion_commutator_routes() -> Result<CriterionResult> {
    let agree = commutator_route_agreement(64, ROUTE_DRAWS, ACCEPTANCE_SEED)?;
    let passed = agree.max_rel <= ROUTE_REL_TOL && agree.max_const_abs <= ROUTE_CONST_TOL;
    Ok(verdict(
        "commutator_routes_agree",
        passed,
        format!(
            "max rel diff {:.3e}, constant-symbol residual {:.3e}",
            agree.max_rel, agree.max_const_abs
        ),
    ))
}

/// Pointwise domination of the commutator's sharp function by the product
/// of oscillation norms times maximal terms, stable under refinement.
pub fn criterion_pointwise_domination() -> Result<CriterionResult> {
    let coarse = pointwise_bound_sup(256, 2, ACCEPTANCE_SEED, 0.125, 0.25)?;
    let fine = pointwise_bound_sup(1024, 2, ACCEPTANCE_SEED, 0.125, 0.25)?;
    let growth = fine / coarse;
    let passed =
        fine.is_finite() && fine <= POINTWISE_SUP_CAP && growth <= POINTWISE_GROWTH_MAX;
    Ok(verdict(
        "commutator_pointwise_domination",
        passed,
        format!("sup ratio {coarse:.3e} (n=256) -> {fine:.3e} (n=1024), growth {growth:.3}"),
    ))
}

/// Shape statistics of one bounded-functional series.
struct BoundedShape {
    max: f64,
    spread: f64,
    degenerate: usize,
}

fn bounded_shape(series: &[(f64, f64)]) -> BoundedShape {
    BoundedShape {
        max: series.iter().map(|&(_, v)| v).fold(0.0_f64, f64::max),
        spread: max_over_median(series),
        degenerate: series.iter().filter(|(_, v)| v.is_infinite()).count(),
    }
}

/// Fit and growth statistics of one divergence series; abscissas are
/// thresholds s in (0, 1) and the fit is value against log(1/s).
struct DivergenceShape {
    slope: f64,
    r_squared: f64,
    growth: f64,
    spread: f64,
    monotone_violations: usize,
    worst_drop: f64,
}

fn divergence_shape(series: &[(f64, f64)]) -> Option<DivergenceShape> {
    let mut pairs: Vec<(f64, f64)> =
        series.iter().map(|&(s, v)| ((1.0 / s).ln(), v)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut monotone_violations = 0;
    let mut worst_drop = 0.0_f64;
    for w in pairs.windows(2) {
        if w[1].1 < w[0].1 * (1.0 - 1e-12) {
            monotone_violations += 1;
            worst_drop = worst_drop.max(1.0 - w[1].1 / w[0].1);
        }
    }
    let fit = linear_fit(&pairs)?;
    let growth = pairs.last().map_or(0.0, |l| l.1) / pairs.first().map_or(f64::NAN, |f| f.1);
    Some(DivergenceShape {
        slope: fit.slope,
        r_squared: fit.r_squared,
        growth,
        spread: max_over_median(series),
        monotone_violations,
        worst_drop,
    })
}

/// Two-sided endpoint verdict: the two-iterate functional must stay flat and
/// refinement-stable while the single-iterate variant must grow linearly in
/// log(1/s), monotonically, with a refinement-stable shape.
fn endpoint_verdict(
    name: &'static str,
    bounded_fine: &[(f64, f64)],
    bounded_coarse: &[(f64, f64)],
    sharp_fine: &[(f64, f64)],
    sharp_coarse: &[(f64, f64)],
) -> CriterionResult {
    let bf = bounded_shape(bounded_fine);
    let bc = bounded_shape(bounded_coarse);
    let bounded_drift = (bf.max / bc.max - 1.0).abs();
    let bounded_ok = bf.degenerate == 0
        && bc.degenerate == 0
        && bf.max.is_finite()
        && bf.spread <= BOUNDED_MAX_OVER_MEDIAN
        && bc.spread <= BOUNDED_MAX_OVER_MEDIAN
        && bounded_drift <= BOUNDED_MAX_DRIFT;
    let (Some(f), Some(c)) = (divergence_shape(sharp_fine), divergence_shape(sharp_coarse))
    else {
        return verdict(name, false, "divergence fit failed (too few points)".into());
    };
    let slope_dev = (f.slope / c.slope - 1.0).abs();
    let growth_dev = (f.growth / c.growth - 1.0).abs();
    let sharp_ok = f.slope > 0.0
        && f.r_squared >= DIVERGENCE_MIN_R2
        && f.growth >= DIVERGENCE_MIN_GROWTH
        && f.spread <= DIVERGENCE_MAX_SPREAD
        && f.monotone_violations == 0
        && c.worst_drop <= DIVERGENCE_COARSE_DROP_MAX
        && slope_dev <= DIVERGENCE_MAX_SLOPE_DEV
        && growth_dev <= DIVERGENCE_MAX_GROWTH_DEV;
    verdict(
        name,
        bounded_ok && sharp_ok,
        format!(
            "bounded max {:.3} (spread {:.1}, drift {bounded_drift:.3}); divergent slope {:.2} (r2 {:.3}) growth {:.1} monotone dips {}, refinement dev slope {slope_dev:.3} growth {growth_dev:.3}",
            bf.max, bf.spread, f.slope, f.r_squared, f.growth, f.monotone_violations
        ),
    )
}

/// Two-sided endpoint check for the Orlicz maximal function: the two-iterate
/// functional is bounded while the single-iterate variant diverges like
/// log(1/s) — the iterated scale cannot be lowered.
pub fn criterion_maximal_endpoint() -> Result<CriterionResult> {
    let bounded_fine = maximal_endpoint_ratio_series(
        DIVERGENCE_N,
        DIVERGENCE_HALF_WIDTH,
        ENDPOINT_T_LO,
        ENDPOINT_T_HI,
        ENDPOINT_T_PER_DECADE,
    )?;
    let bounded_coarse = maximal_endpoint_ratio_series(
        DIVERGENCE_N / 2,
        DIVERGENCE_HALF_WIDTH,
        ENDPOINT_T_LO,
        ENDPOINT_T_HI,
        ENDPOINT_T_PER_DECADE,
    )?;
    let sharp_fine = maximal_divergence_series(
        DIVERGENCE_N,
        DIVERGENCE_HALF_WIDTH,
        DIVERGENCE_S_LO,
        DIVERGENCE_S_HI,
        DIVERGENCE_MAX_POINTS,
    )?;
    let sharp_coarse = maximal_divergence_series(
        DIVERGENCE_N / 2,
        DIVERGENCE_HALF_WIDTH,
        DIVERGENCE_S_LO,
        DIVERGENCE_S_HI,
        DIVERGENCE_MAX_POINTS,
    )?;
    Ok(endpoint_verdict(
        "maximal_endpoint_bounded_and_sharp",
        &bounded_fine,
        &bounded_coarse,
        &sharp_fine,
        &sharp_coarse,
    ))
}

/// Two-sided endpoint check for the iterated commutator with logarithmic
/// symbols: bounded with the two-iterate functional, log-divergent with the
/// single-iterate one.
pub fn criterion_commutator_endpoint() -> Result<CriterionResult> {
    let bounded_fine = commutator_endpoint_ratio_series(
        DIVERGENCE_N,
        DIVERGENCE_HALF_WIDTH,
        ENDPOINT_T_LO,
        ENDPOINT_T_HI,
        ENDPOINT_T_PER_DECADE,
    )?;
    let bounded_coarse = commutator_endpoint_ratio_series(
        DIVERGENCE_N / 2,
        DIVERGENCE_HALF_WIDTH,
        ENDPOINT_T_LO,
        ENDPOINT_T_HI,
        ENDPOINT_T_PER_DECADE,
    )?;
    let sharp_fine = commutator_divergence_series(
        DIVERGENCE_N,
        DIVERGENCE_HALF_WIDTH,
        DIVERGENCE_S_LO,
        DIVERGENCE_S_HI,
        DIVERGENCE_PER_DECADE,
    )?;
    let sharp_coarse = commutator_divergence_series(
        DIVERGENCE_N / 2,
        DIVERGENCE_HALF_WIDTH,
        DIVERGENCE_S_LO,
        DIVERGENCE_S_HI,
        DIVERGENCE_PER_DECADE,
    )?;
    Ok(endpoint_verdict(
        "commutator_endpoint_bounded_and_sharp",
        &bounded_fine,
        &bounded_coarse,
        &sharp_fine,
        &sharp_coarse,
    ))
}

/// The weighted strong bound for the iterated commutator: the ratio of the
/// coupled-weight L1 norm of the output to the product of oscillation norms
/// and weighted L2 norms of the inputs stays bounded over the corpus with
/// admissible power weights, stably under refinement.
pub fn criterion_strong_bound() -> Result<CriterionResult> {
    let coarse = strong_bound_stats(256, STRONG_BOUND_DRAWS, ACCEPTANCE_SEED)?;
    let fine = strong_bound_stats(512, STRONG_BOUND_DRAWS, ACCEPTANCE_SEED)?;
    let growth = fine.max_ratio / coarse.max_ratio;
    let passed = fine.max_ratio.is_finite()
        && coarse.max_ratio <= STRONG_BOUND_CAP
        && fine.max_ratio <= STRONG_BOUND_CAP
        && growth <= STRONG_BOUND_GROWTH_MAX;
    Ok(verdict(
        "commutator_strong_bound",
        passed,
        format!(
            "max ratio {:.3} (n=256) -> {:.3} (n=512) over {} draws, growth {growth:.3}",
            coarse.max_ratio, fine.max_ratio, STRONG_BOUND_DRAWS
        ),
    ))
}

/// The joint weight constant diverges exactly when some componentwise
/// constant does, across a power-weight sweep; unit weights give exactly 1.
pub fn criterion_weight_characterization() -> Result<CriterionResult> {
    let rows = characterization_sweep(256, 4.0, &CHARACTERIZATION_EXPONENTS)?;
    let disagreements = rows
        .iter()
        .filter(|r| r.joint_divergent != r.components_divergent)
        .count();
    let mut unit_dev = 0.0_f64;
    for c in unit_weight_constants(256)? {
        unit_dev = unit_dev.max((c.multi_ap - 1.0).abs()).max((c.nu_ap - 1.0).abs());
        for comp in &c.component {
            unit_dev = unit_dev.max((comp - 1.0).abs());
        }
    }
    let passed = disagreements == 0 && unit_dev <= 1e-12;
    Ok(verdict(
        "weight_class_characterization",
        passed,
        format!(
            "{} / {} sweep points agree, unit-weight deviation {unit_dev:.2e}",
            rows.len() - disagreements,
            rows.len()
        ),
    ))
}

/// Superlevel sets of the all-intervals maximal function of a unit
/// indicator match `|{M chi > lambda}| = 2/lambda - 1` to within a few cells.
pub fn criterion_maximal_closed_form() -> Result<CriterionResult> {
    let n = 1024;
    let half_width = 16.0;
    let rows = maximal_closed_form_series(n, half_width)?;
    let h = 2.0 * half_width / n as f64;
    let max_dev = rows
        .iter()
        .map(|&(_, measured, exact)| (measured - exact).abs())
        .fold(0.0_f64, f64::max);
    let passed = max_dev <= CLOSED_FORM_TOL_CELLS * h;
    Ok(verdict(
        "maximal_closed_form",
        passed,
        format!("max deviation {max_dev:.4} vs allowance {:.4}", CLOSED_FORM_TOL_CELLS * h),
    ))
}

/// The weak-norm/strong-norm comparison holds on every random draw.
pub fn criterion_kolmogorov() -> Result<CriterionResult> {
    let (violations, max_ratio) = kolmogorov_violations(256, KOLMOGOROV_DRAWS, ACCEPTANCE_SEED)?;
    let passed = violations == 0 && max_ratio <= 1.0 + 1e-12;
    Ok(verdict(
        "weak_norm_interpolation",
        passed,
        format!("{violations} violations over {KOLMOGOROV_DRAWS} draws, max ratio {max_ratio:.6}"),
    ))
}

/// Weighted strong and weak ratios of `M_delta` against `M^#_delta` stay
/// inside pinned caps over the corpus, never degenerate, respect the
/// pointwise floor, and the strong cap is stable under refinement.
pub fn criterion_sharp_function_control() -> Result<CriterionResult> {
    let coarse = fefferman_stein_stats(256, FS_DRAWS, ACCEPTANCE_SEED, FS_DELTA)?;
    let fine = fefferman_stein_stats(512, FS_DRAWS, ACCEPTANCE_SEED, FS_DELTA)?;
    let growth = fine.max_strong / coarse.max_strong;
    let passed = coarse.degenerate == 0
        && fine.degenerate == 0
        && coarse.max_strong <= FS_STRONG_CAP
        && fine.max_strong <= FS_STRONG_CAP
        && coarse.max_weak <= FS_WEAK_CAP
        && fine.max_weak <= FS_WEAK_CAP
        && coarse.min_strong >= FS_STRONG_FLOOR
        && growth <= FS_GROWTH_MAX;
    Ok(verdict(
        "sharp_function_controls_maximal",
        passed,
        format!(
            "strong in [{:.3}, {:.2}], weak max {:.2}, growth {growth:.2}, degenerate {}",
            coarse.min_strong, fine.max_strong.max(coarse.max_strong), fine.max_weak.max(coarse.max_weak),
            coarse.degenerate + fine.degenerate
        ),
    ))
}

/// Every acceptance criterion, in report order.
pub fn run_all() -> Result<Vec<CriterionResult>> {
    Ok(vec![
        criterion_indicator_identity()?,
        criterion_dichotomy_equivalence()?,
        criterion_orlicz_maximal_equivalence()?,
        criterion_commutator_routes()?,
        criterion_pointwise_domination()?,
        criterion_maximal_endpoint()?,
        criterion_commutator_endpoint()?,
        criterion_strong_bound()?,
        criterion_weight_characterization()?,
        criterion_maximal_closed_form()?,
        criterion_kolmogorov()?,
        criterion_sharp_function_control()?,
    ])
}
