//! Muckenhoupt constants for single weights and for vectors of weights
//! coupled through a Holder exponent, over a cube family.
//!
//! For an exponent vector `(p_1, ..., p_m)` with `1/p = sum_j 1/p_j`, the
//! joint constant tested here is
//!
//! ```text
//! sup_Q ( avg_Q nu )^{1/p} * prod_j ( avg_Q w_j^{1 - p_j'} )^{1/p_j'},
//! nu = prod_j w_j^{p/p_j},
//! ```
//!
//! with the factor for `p_j = 1` read as `( inf_Q w_j )^{-1}`. Every family
//! cube has length an exact multiple of the cell width and no node on its
//! boundary, so node averages are true means and the constants obey the
//! classical `>= 1` lower bound up to rounding.

use crate::error::{invalid, CzError, Result};
use crate::lattice::{check_positive_weight, Cube, CubeFamily, Grid, GridFunction, PrefixSums};

/// Exponents `(p_1, ..., p_m)`, each in `[1, infinity)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentVector {
    ps: Vec<f64>,
}

impl ExponentVector {
    pub fn new(ps: Vec<f64>) -> Result<Self> {
        if ps.is_empty() {
            return Err(invalid("exponent vector must have at least one component"));
        }
        for &p in &ps {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(invalid(format!("exponents must be finite and >= 1, got {p}")));
            }
        }
        Ok(Self { ps })
    }

    pub fn m(&self) -> usize {
        self.ps.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.ps
    }

    /// The coupled exponent `p` with `1/p = sum_j 1/p_j`; lies in `[1/m, min p_j]`.
    pub fn holder_exponent(&self) -> f64 {
        1.0 / self.ps.iter().map(|p| 1.0 / p).sum::<f64>()
    }

    /// Conjugate `p_j' = p_j / (p_j - 1)`, or `None` when `p_j = 1`.
    pub fn conjugate(&self, j: usize) -> Option<f64> {
        let p = self.ps[j];
        if p == 1.0 {
            None
        } else {
            Some(p / (p - 1.0))
        }
    }
}

fn check_weights(weights: &[GridFunction], exps: &ExponentVector) -> Result<Grid> {
    if weights.len() != exps.m() {
        return Err(CzError::LengthMismatch { got: weights.len(), want: exps.m() });
    }
    let grid = weights[0].grid();
    for w in weights {
        if w.grid() != grid {
            return Err(CzError::GridMismatch);
        }
        check_positive_weight(w)?;
    }
    Ok(grid)
}

/// The coupling weight `nu = prod_j w_j^{p/p_j}`.
pub fn nu_weight(weights: &[GridFunction], exps: &ExponentVector) -> Result<GridFunction> {
    let grid = check_weights(weights, exps)?;
    let p = exps.holder_exponent();
    let mut values = vec![1.0_f64; grid.n()];
    for (w, &pj) in weights.iter().zip(exps.components()) {
        let e = p / pj;
        for (out, &v) in values.iter_mut().zip(w.values()) {
            *out *= v.powf(e);
        }
    }
    GridFunction::from_values(grid, values)
}

/// Sparse table for O(1) range minima over node index ranges.
struct RangeMin {
    table: Vec<Vec<f64>>,
}

impl RangeMin {
    fn new(values: &[f64]) -> Self {
        let n = values.len();
        let levels = usize::BITS - n.leading_zeros();
        let mut table = vec![values.to_vec()];
        for k in 1..levels as usize {
            let half = 1usize << (k - 1);
            let prev = &table[k - 1];
            let row: Vec<f64> = (0..=n - (1 << k))
                .map(|i| prev[i].min(prev[i + half]))
                .collect();
            table.push(row);
        }
        Self { table }
    }

    fn min(&self, lo: usize, hi: usize) -> f64 {
        let len = hi - lo + 1;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        self.table[k][lo].min(self.table[k][hi + 1 - (1 << k)])
    }
}

/// Classical constant of a single weight over a family:
/// `sup_Q avg_Q(w) avg_Q(w^{1-p'})^{p-1}` for `p > 1`, and
/// `sup_Q avg_Q(w) / min_Q(w)` for `p = 1`.
pub fn ap_constant(w: &GridFunction, p: f64, family: &CubeFamily) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("weight class exponent must be finite and >= 1, got {p}")));
    }
    check_positive_weight(w)?;
    if w.grid() != family.grid() {
        return Err(CzError::GridMismatch);
    }
    let grid = w.grid();
    let sums = PrefixSums::new(w.values());
    let mut sup = 0.0_f64;
    if p == 1.0 {
        let mins = RangeMin::new(w.values());
        for q in family.cubes() {
            let (lo, hi) = q.node_range(&grid).expect("family cubes contain nodes");
            sup = sup.max(sums.mean(lo, hi) / mins.min(lo, hi));
        }
    } else {
        let dual_exp = 1.0 - p / (p - 1.0);
        let dual: Vec<f64> = w.values().iter().map(|v| v.powf(dual_exp)).collect();
        let dual_sums = PrefixSums::new(&dual);
        for q in family.cubes() {
            let (lo, hi) = q.node_range(&grid).expect("family cubes contain nodes");
            sup = sup.max(sums.mean(lo, hi) * dual_sums.mean(lo, hi).powf(p - 1.0));
        }
    }
    if !sup.is_finite() {
        return Err(invalid("weight constant overflowed; weight range is too extreme"));
    }
    Ok(sup)
}

/// Per-cube factors of the joint constant, shared by the sup and by callers
/// that need the maximizing cube.
struct JointEvaluator {
    nu_sums: PrefixSums,
    // One entry per component: either prefix sums of w_j^{1 - p_j'} with the
    // outer exponent 1/p_j', or a range-min structure for p_j = 1.
    factors: Vec<ComponentFactor>,
    inv_p: f64,
}

enum ComponentFactor {
    Dual { sums: PrefixSums, outer: f64 },
    Inf { mins: RangeMin },
}

impl JointEvaluator {
    fn new(weights: &[GridFunction], exps: &ExponentVector) -> Result<Self> {
        let nu = nu_weight(weights, exps)?;
        let nu_sums = PrefixSums::new(nu.values());
        let mut factors = Vec::with_capacity(exps.m());
        for (j, w) in weights.iter().enumerate() {
            match exps.conjugate(j) {
                Some(pj_conj) => {
                    let vals: Vec<f64> =
                        w.values().iter().map(|v| v.powf(1.0 - pj_conj)).collect();
                    factors.push(ComponentFactor::Dual {
                        sums: PrefixSums::new(&vals),
                        outer: 1.0 / pj_conj,
                    });
                }
                None => factors.push(ComponentFactor::Inf { mins: RangeMin::new(w.values()) }),
            }
        }
        Ok(Self { nu_sums, factors, inv_p: 1.0 / exps.holder_exponent() })
    }

    fn eval(&self, lo: usize, hi: usize) -> f64 {
        let mut value = self.nu_sums.mean(lo, hi).powf(self.inv_p);
        for factor in &self.factors {
            value *= match factor {
                ComponentFactor::Dual { sums, outer } => sums.mean(lo, hi).powf(*outer),
                ComponentFactor::Inf { mins } => 1.0 / mins.min(lo, hi),
            };
        }
        value
    }
}

/// Joint constant of a weight vector over the family (see module docs).
/// For `m = 1` it equals `ap_constant(w, p, family)^{1/p}` exactly.
pub fn multi_ap_constant(
    weights: &[GridFunction],
    exps: &ExponentVector,
    family: &CubeFamily,
) -> Result<f64> {
    let grid = check_weights(weights, exps)?;
    if grid != family.grid() {
        return Err(CzError::GridMismatch);
    }
    let eval = JointEvaluator::new(weights, exps)?;
    let mut sup = 0.0_f64;
    for q in family.cubes() {
        let (lo, hi) = q.node_range(&grid).expect("family cubes contain nodes");
        sup = sup.max(eval.eval(lo, hi));
    }
    if !sup.is_finite() {
        return Err(invalid("joint weight constant overflowed; weight range is too extreme"));
    }
    Ok(sup)
}

/// The constants entering the componentwise description of the joint class:
/// the joint constant itself, the `A_{mp}` constant of `nu`, and per
/// component either `A_{m p_j'}(w_j^{1 - p_j'})` or, when `p_j = 1`,
/// `A_1(w_j^{1/m})`.
#[derive(Clone, Debug)]
pub struct CharacterizationConstants {
    pub multi_ap: f64,
    pub nu_ap: f64,
    pub component: Vec<f64>,
}

pub fn characterization_constants(
    weights: &[GridFunction],
    exps: &ExponentVector,
    family: &CubeFamily,
) -> Result<CharacterizationConstants> {
    let multi_ap = multi_ap_constant(weights, exps, family)?;
    let m = exps.m() as f64;
    let p = exps.holder_exponent();
    let nu = nu_weight(weights, exps)?;
    let nu_ap = ap_constant(&nu, m * p, family)?;
    let mut component = Vec::with_capacity(exps.m());
    for (j, w) in weights.iter().enumerate() {
        let c = match exps.conjugate(j) {
            Some(pj_conj) => {
                let dual = w.map(|v| v.powf(1.0 - pj_conj))?;
                ap_constant(&dual, m * pj_conj, family)?
            }
            None => {
                let root = w.map(|v| v.powf(1.0 / m))?;
                ap_constant(&root, 1.0, family)?
            }
        };
        component.push(c);
    }
    Ok(CharacterizationConstants { multi_ap, nu_ap, component })
}

/// `|x|^a` sampled at the nodes. Nodes are cell midpoints, so with an even
/// node count and the singularity on a cell boundary every sample is finite.
pub fn power_weight(grid: Grid, a: f64) -> Result<GridFunction> {
    GridFunction::sample(grid, |x| x.abs().powf(a))
}

/// Evaluate the joint constant on one explicit cube (used by refinement
/// sweeps that track where the sup lives).
pub fn multi_ap_on_cube(
    weights: &[GridFunction],
    exps: &ExponentVector,
    q: &Cube,
) -> Result<f64> {
    let grid = check_weights(weights, exps)?;
    let (lo, hi) = q
        .node_range(&grid)
        .ok_or(CzError::EmptyCube { left: q.left(), right: q.right() })?;
    Ok(JointEvaluator::new(weights, exps)?.eval(lo, hi))
}
