//! Named experiment reports behind the CLI subcommands, optional TOML
//! configuration, and the full suite runner (all reports + all acceptance
//! checks).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::czop::{
    apply_operator, hilbert_kernel, kernel_size_check, kernel_smoothness_check,
    riesz_bilinear_kernel, ProbeSet,
};
use crate::endpoint::acceptance::{self, CriterionResult};
use crate::endpoint::corpus::{draw_function, draw_nonnegative, draw_symbol, draw_weight, rng_for};
use crate::endpoint::experiments::{
    characterization_sweep, commutator_divergence_series, commutator_route_agreement,
    dichotomy_stats, endpoint_ratio_series, indicator_identity_stats, kolmogorov_violations,
    maximal_closed_form_series, maximal_divergence_series, max_over_median, mllogl_vs_mm_bounds,
    strong_bound_stats, unit_weight_constants, ExperimentEnv,
};
use crate::endpoint::report::{
    linear_fit, log_log_fit, write_series_csv, write_summary_csv, ExperimentReport,
};
use crate::error::{invalid, CzError, Result};
use crate::lattice::{
    build_grid_function, geometric_grid, Cube, CubeFamily, FamilyKind,
};
use crate::maximal::{m_llogl, SymbolTuple};
use crate::orlicz::{luxemburg_equiv_functional, luxemburg_norm};
use crate::weights::{multi_ap_constant, ExponentVector};

/// Optional experiment configuration; command-line flags take precedence.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub n: Option<usize>,
    pub window: Option<f64>,
    pub family: Option<String>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| CzError::Config(e.to_string()))
    }

    /// Fold the config into an environment (config fills unset fields only
    /// when the caller passes `None`; explicit flags already won).
    pub fn apply(&self, env: &mut ExperimentEnv) -> Result<()> {
        if let Some(n) = self.n {
            env.n = n;
        }
        if let Some(w) = self.window {
            env.half_width = w;
        }
        if let Some(f) = &self.family {
            env.family = FamilyKind::parse(f)?;
        }
        if let Some(s) = self.seed {
            env.seed = s;
        }
        Ok(())
    }
}

fn base_report(id: &str, env: &ExperimentEnv) -> ExperimentReport {
    ExperimentReport::new(id)
        .with_param("n", env.n as u64)
        .with_param("window", env.half_width)
        .with_param("family", env.family.name())
        .with_param("seed", env.seed)
}

/// Orlicz-norm behaviour on one drawn function: the norm over nested dyadic
/// cubes (series) plus identity/dichotomy/equivalence summaries.
pub fn orlicz_report(env: &ExperimentEnv) -> Result<ExperimentReport> {
    let grid = env.grid()?;
    let mut rng = rng_for(env.seed, 11);
    let f = draw_nonnegative(&mut rng, grid.window_length()).sample(grid)?;
    let mut report = base_report("orlicz_nested_norms", env);
    for level in 0..=grid.levels() {
        let pieces = 1usize << level;
        let length = grid.window_length() / pieces as f64;
        // Dyadic cube at this level sitting just right of the window center.
        let q = Cube::new(&grid, grid.origin() + (pieces / 2) as f64 * length, length)?;
        report.series.push((length, luxemburg_norm(&f, &q, 1)?));
    }
    let q = Cube::new(&grid, grid.origin(), grid.window_length())?;
    let norm = luxemburg_norm(&f, &q, 1)?;
    let equiv = luxemburg_equiv_functional(&f, &q, 1)?;
    report.push_summary("window_norm", norm);
    report.push_summary("window_equiv_ratio", equiv / norm);
    let (max_rel, _) = indicator_identity_stats(env.n.max(64), 50, env.seed)?;
    report.push_summary("indicator_identity_max_rel_err", max_rel);
    let stats = dichotomy_stats(env.n.max(64), 100, env.seed)?;
    report.push_summary("dichotomy_violations", stats.dichotomy_violations as f64);
    report.push_summary("equiv_ratio_min", stats.min_equiv_ratio);
    report.push_summary("equiv_ratio_max", stats.max_equiv_ratio);
    Ok(report)
}

/// Maximal-function behaviour: measured superlevel sizes of the indicator
/// maximal function (series) against the exact sizes, plus the pointwise
/// comparison of the Orlicz and iterated maximal functions.
pub fn maximal_report(env: &ExperimentEnv) -> Result<ExperimentReport> {
    let mut report = base_report("maximal_superlevel_profile", env);
    let rows = maximal_closed_form_series(env.n, env.half_width.max(4.0))?;
    let mut max_dev = 0.0_f64;
    for &(lambda, measured, exact) in &rows {
        report.series.push((lambda, measured));
        max_dev = max_dev.max((measured - exact).abs());
    }
    report.push_summary("closed_form_max_deviation", max_dev);
    let bounds = mllogl_vs_mm_bounds(env.n, 3, env.seed)?;
    report.push_summary("orlicz_vs_iterated_lo", bounds.lo);
    report.push_summary("orlicz_vs_iterated_hi", bounds.hi);
    report.push_summary("orlicz_vs_iterated_spread", bounds.hi / bounds.lo);
    Ok(report)
}

/// Weight characterization: joint-constant growth along the diagonal of the
/// power-weight sweep (series), agreement count over the full sweep, and
/// unit-weight exactness.
pub fn weights_report(env: &ExperimentEnv) -> Result<ExperimentReport> {
    let mut report = base_report("weight_characterization", env);
    let exponents = acceptance::CHARACTERIZATION_EXPONENTS;
    let rows = characterization_sweep(env.n, env.half_width.min(4.0), &exponents)?;
    for row in &rows {
        if row.a1 == row.a2 {
            report.series.push((row.a1, row.joint_growth));
        }
    }
    let disagreements =
        rows.iter().filter(|r| r.joint_divergent != r.components_divergent).count();
    report.push_summary("sweep_points", rows.len() as f64);
    report.push_summary("flag_disagreements", disagreements as f64);
    let mut unit_dev = 0.0_f64;
    for c in unit_weight_constants(env.n)? {
        unit_dev = unit_dev.max((c.multi_ap - 1.0).abs()).max((c.nu_ap - 1.0).abs());
        for comp in &c.component {
            unit_dev = unit_dev.max((comp - 1.0).abs());
        }
    }
    report.push_summary("unit_weight_max_deviation", unit_dev);
    Ok(report)
}

fn kernel_for_arity(m: usize) -> Result<crate::czop::MKernel> {
    match m {
        1 => Ok(hilbert_kernel()),
        2 => Ok(riesz_bilinear_kernel()),
        other => Err(invalid(format!(
            "no built-in kernel of arity {other}; supported arities are 1 and 2"
        ))),
    }
}

/// Singular-integral behaviour: decay profile of the operator applied to
/// unit indicators (series) plus kernel size/smoothness check summaries.
pub fn operator_report(env: &ExperimentEnv, m: usize) -> Result<ExperimentReport> {
    let kernel = kernel_for_arity(m)?;
    let grid = env.grid()?;
    let f = build_grid_function(grid, |x| if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 })?;
    let fs = vec![f; m];
    let out = apply_operator(&kernel, &fs)?;
    let mut report = base_report(&format!("operator_decay_m{m}"), env).with_param("m", m as u64);
    for i in 0..out.grid().n() {
        let x = out.grid().node(i);
        if x > 1.5 {
            report.series.push((x, out.value(i).abs()));
        }
    }
    let probes = ProbeSet::random(m, 20_000, env.seed);
    let size = kernel_size_check(&kernel, &probes)?;
    let smooth = kernel_smoothness_check(&kernel, &probes, env.seed)?;
    report.push_summary("size_max_ratio", size.max_ratio);
    report.push_summary("size_points", size.evaluated as f64);
    report.push_summary("smoothness_max_ratio", smooth.max_ratio);
    report.push_summary("smoothness_points", smooth.evaluated as f64);
    if let Some(fit) = log_log_fit(&report.series) {
        report.push_summary("decay_exponent", fit.slope);
        report.push_summary("decay_fit_r2", fit.r_squared);
    }
    Ok(report)
}

/// Commutator behaviour: one iterated-commutator output (series) plus the
/// agreement statistics between its two computation routes.
pub fn commutator_report(env: &ExperimentEnv) -> Result<ExperimentReport> {
    // The route comparison is quadratic in the support; keep the grid small.
    let n = env.n.min(128);
    let mut report = base_report("commutator_route_agreement", env);
    report.params.insert("n".into(), (n as u64).into());
    let agree = commutator_route_agreement(n, 20, env.seed)?;
    report.push_summary("route_max_rel_diff", agree.max_rel);
    report.push_summary("constant_symbol_residual", agree.max_const_abs);
    Ok(report)
}

fn ratio_summaries(report: &mut ExperimentReport) {
    let max_ratio = report.series.iter().map(|&(_, v)| v).fold(0.0_f64, f64::max);
    report.push_summary("max_ratio", max_ratio);
    report.push_summary("max_over_median", max_over_median(&report.series));
    let degenerate = report.series.iter().filter(|(_, v)| v.is_infinite()).count();
    report.push_summary("degenerate_points", degenerate as f64);
}

/// Endpoint functionals on drawn data with drawn weights: the ratio series
/// of a two-iterate Orlicz bound for the maximal function and for the
/// iterated commutator, plus the strong-bound corpus sweep. The joint
/// constant of the drawn weight pair at exponents (1, 1) is recorded as the
/// precondition summary.
pub fn endpoint_reports(env: &ExperimentEnv) -> Result<Vec<ExperimentReport>> {
    let grid = env.grid()?;
    let family = CubeFamily::new(grid, env.family)?;
    let mut rng = rng_for(env.seed, 12);
    let fs = [
        draw_function(&mut rng, 4.0).sample(grid)?,
        draw_function(&mut rng, 4.0).sample(grid)?,
    ];
    let w1 = draw_weight(&mut rng, grid.window_length());
    let w2 = draw_weight(&mut rng, grid.window_length());
    let ws = [w1.sample(grid)?, w2.sample(grid)?];
    let ones = ExponentVector::new(vec![1.0, 1.0])?;
    let precondition = multi_ap_constant(&ws, &ones, &family)?;
    let t_grid = geometric_grid(1e-3, 1e3, 64)?;

    // Coupling weight nu = (w1 w2)^{1/2} for exponents (2, 2), sampled on
    // whichever grid the compared output lives on.
    let m_out = m_llogl(&fs, &family, 1)?;
    let nu_src = build_grid_function(grid, |x| (w1.eval(x) * w2.eval(x)).sqrt())?;
    let mut maximal = base_report("endpoint_maximal_ratio", env);
    maximal.series =
        endpoint_ratio_series(&m_out, &nu_src, &fs, &[Some(&ws[0]), Some(&ws[1])], 2, &t_grid)?;
    ratio_summaries(&mut maximal);
    maximal.push_summary("joint_a1_constant", precondition);

    let symbols = SymbolTuple::new(
        vec![
            draw_symbol(&mut rng, grid.window_length()).sample(grid)?,
            draw_symbol(&mut rng, grid.window_length()).sample(grid)?,
        ],
        &family,
    )?;
    let kernel = riesz_bilinear_kernel();
    let t_out = crate::commutator::iterated_commutator_kernel(&kernel, &symbols, &fs)?;
    let nu_out = build_grid_function(t_out.grid(), |x| (w1.eval(x) * w2.eval(x)).sqrt())?;
    let mut commutator = base_report("endpoint_commutator_ratio", env);
    commutator.series =
        endpoint_ratio_series(&t_out, &nu_out, &fs, &[Some(&ws[0]), Some(&ws[1])], 2, &t_grid)?;
    ratio_summaries(&mut commutator);
    commutator.push_summary("joint_a1_constant", precondition);
    commutator.push_summary("symbol_product_norm", symbols.product_norm());

    let stats = strong_bound_stats(env.n.min(256), 20, env.seed)?;
    let mut strong = base_report("endpoint_strong_bound", env);
    strong.params.insert("n".into(), ((env.n.min(256)) as u64).into());
    strong.push_summary("max_ratio", stats.max_ratio);
    strong.push_summary("draws", stats.draws as f64);

    Ok(vec![maximal, commutator, strong])
}

/// Sharpness runs: the two divergence series on the wide sparse window,
/// each summarized by its growth and its linear fit in log(1/lambda).
pub fn sharpness_reports(n: usize, half_width: f64) -> Result<Vec<ExperimentReport>> {
    let mut out = Vec::with_capacity(2);
    for (id, series) in [
        (
            "maximal_endpoint_sharpness",
            maximal_divergence_series(n, half_width, 1e-6, 1e-1, 64)?,
        ),
        (
            "commutator_endpoint_sharpness",
            commutator_divergence_series(n, half_width, 1e-6, 1e-1, 16)?,
        ),
    ] {
        let mut report = ExperimentReport::new(id)
            .with_param("n", n as u64)
            .with_param("window", half_width);
        report.series = series;
        let growth = report.series.first().map_or(0.0, |f| f.1)
            / report.series.last().map_or(f64::NAN, |l| l.1);
        report.push_summary("growth", growth);
        let pairs: Vec<(f64, f64)> =
            report.series.iter().map(|&(s, v)| ((1.0 / s).ln(), v)).collect();
        if let Some(fit) = linear_fit(&pairs) {
            report.push_summary("log_slope", fit.slope);
            report.push_summary("log_fit_r2", fit.r_squared);
        }
        out.push(report);
    }
    Ok(out)
}

/// Kolmogorov sweep packaged as a report.
pub fn kolmogorov_report(env: &ExperimentEnv) -> Result<ExperimentReport> {
    let (violations, max_ratio) = kolmogorov_violations(env.n, 200, env.seed)?;
    let mut report = base_report("weak_norm_interpolation", env);
    report.push_summary("violations", violations as f64);
    report.push_summary("max_ratio", max_ratio);
    Ok(report)
}

/// Write one series CSV per report plus a combined `summary.csv` into the
/// output directory (created if missing); rerunning with the same inputs
/// produces byte-identical files. Returns the summary path.
pub fn write_reports(dir: &Path, reports: &[ExperimentReport]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    for report in reports {
        let path = dir.join(format!("{}.csv", report.id));
        write_series_csv(&path, std::slice::from_ref(report))?;
    }
    let summary = dir.join("summary.csv");
    write_summary_csv(&summary, reports)?;
    Ok(summary)
}

/// Everything: the full report battery at a fixed default environment plus
/// every acceptance criterion. Returns the reports, the criterion results,
/// and whether all criteria passed.
pub fn run_suite(out: Option<&Path>) -> Result<(Vec<ExperimentReport>, Vec<CriterionResult>, bool)> {
    let env = ExperimentEnv::default();
    let mut reports = vec![
        orlicz_report(&env)?,
        maximal_report(&ExperimentEnv { n: 1024, half_width: 16.0, ..env })?,
        weights_report(&ExperimentEnv { half_width: 4.0, ..env })?,
        operator_report(&env, 2)?,
        operator_report(&env, 1)?,
        commutator_report(&ExperimentEnv { n: 64, half_width: 4.0, ..env })?,
    ];
    reports.extend(endpoint_reports(&env)?);
    reports.push(kolmogorov_report(&env)?);
    reports.extend(sharpness_reports(
        acceptance::DIVERGENCE_N,
        acceptance::DIVERGENCE_HALF_WIDTH,
    )?);
    let criteria = acceptance::run_all()?;
    let all_passed = criteria.iter().all(|c| c.passed);
    if let Some(dir) = out {
        write_reports(dir, &reports)?;
    }
    Ok((reports, criteria, all_passed))
}
