//! Deterministic corpus of synthetic inputs: sums of compactly supported
//! atoms, rough symbols, and weights, all defined as formulas so the same
//! draw can be sampled on grids of any resolution.
//!
//! Randomness comes exclusively from a seeded ChaCha stream; a `(seed,
//! index)` pair pins a draw forever.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::lattice::{Grid, GridFunction};

/// Height cap for logarithmic spikes, keeping every sample finite.
const LOG_SPIKE_CAP: f64 = 10.0;

/// One compactly supported atom.
#[derive(Clone, Copy, Debug)]
pub enum Atom {
    /// `height` on `(center - half_width, center + half_width)`.
    Indicator { center: f64, half_width: f64, height: f64 },
    /// Truncated Gaussian profile `height (exp(-9u^2) - exp(-9))`, with
    /// `u = (x - center)/half_width`, supported on `|u| < 1`.
    Bump { center: f64, half_width: f64, height: f64 },
    /// `height min(CAP, ln(2 half_width / |x - center|))` on `|u| < 1`:
    /// an integrable unbounded-profile spike, capped for finiteness.
    LogSpike { center: f64, half_width: f64, height: f64 },
}

impl Atom {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Atom::Indicator { center, half_width, height } => {
                if (x - center).abs() < half_width {
                    height
                } else {
                    0.0
                }
            }
            Atom::Bump { center, half_width, height } => {
                let u = (x - center) / half_width;
                if u.abs() < 1.0 {
                    height * ((-9.0 * u * u).exp() - (-9.0f64).exp())
                } else {
                    0.0
                }
            }
            Atom::LogSpike { center, half_width, height } => {
                let d = (x - center).abs();
                if d < half_width {
                    height * LOG_SPIKE_CAP.min((2.0 * half_width / d.max(1e-300)).ln())
                } else {
                    0.0
                }
            }
        }
    }
}

/// A finite sum of atoms, evaluable anywhere.
#[derive(Clone, Debug)]
pub struct SyntheticFunction {
    atoms: Vec<Atom>,
}

impl SyntheticFunction {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Self { atoms }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.atoms.iter().map(|a| a.eval(x)).sum()
    }

    pub fn sample(&self, grid: Grid) -> Result<GridFunction> {
        GridFunction::sample(grid, |x| self.eval(x))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

/// Draw a compactly supported function: 1 to 3 atoms with centers in the
/// middle half of the span and widths across 1.5 decades.
pub fn draw_function(rng: &mut ChaCha8Rng, span: f64) -> SyntheticFunction {
    let count = rng.gen_range(1..=3);
    let atoms = (0..count)
        .map(|_| {
            let center = rng.gen_range(-0.25 * span..0.25 * span);
            let half_width = span * 10f64.powf(rng.gen_range(-2.0..-0.5));
            let height = 10f64.powf(rng.gen_range(-0.5..0.5))
                * if rng.gen::<bool>() { 1.0 } else { -1.0 };
            match rng.gen_range(0..3) {
                0 => Atom::Indicator { center, half_width, height },
                1 => Atom::Bump { center, half_width, height },
                _ => Atom::LogSpike { center, half_width, height },
            }
        })
        .collect();
    SyntheticFunction::new(atoms)
}

/// Draw a nonnegative function: as `draw_function` but with positive heights.
pub fn draw_nonnegative(rng: &mut ChaCha8Rng, span: f64) -> SyntheticFunction {
    let f = draw_function(rng, span);
    let atoms = f
        .atoms
        .into_iter()
        .map(|a| match a {
            Atom::Indicator { center, half_width, height } => {
                Atom::Indicator { center, half_width, height: height.abs() }
            }
            Atom::Bump { center, half_width, height } => {
                Atom::Bump { center, half_width, height: height.abs() }
            }
            Atom::LogSpike { center, half_width, height } => {
                Atom::LogSpike { center, half_width, height: height.abs() }
            }
        })
        .collect();
    SyntheticFunction::new(atoms)
}

/// A symbol of bounded mean oscillation: a gentle linear part plus bumps and
/// an optional capped logarithmic spike.
#[derive(Clone, Debug)]
pub struct SymbolRecipe {
    pub slope: f64,
    pub parts: SyntheticFunction,
}

impl SymbolRecipe {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.parts.eval(x)
    }

    pub fn sample(&self, grid: Grid) -> Result<GridFunction> {
        GridFunction::sample(grid, |x| self.eval(x))
    }
}

pub fn draw_symbol(rng: &mut ChaCha8Rng, span: f64) -> SymbolRecipe {
    let slope = rng.gen_range(-2.0..2.0) / span;
    let count = rng.gen_range(1..=2);
    let mut atoms: Vec<Atom> = (0..count)
        .map(|_| Atom::Bump {
            center: rng.gen_range(-0.3 * span..0.3 * span),
            half_width: span * 10f64.powf(rng.gen_range(-1.5..-0.5)),
            height: rng.gen_range(-2.0..2.0),
        })
        .collect();
    if rng.gen::<bool>() {
        atoms.push(Atom::LogSpike {
            center: rng.gen_range(-0.3 * span..0.3 * span),
            half_width: span * 10f64.powf(rng.gen_range(-1.5..-0.5)),
            height: rng.gen_range(-1.0..1.0),
        });
    }
    SymbolRecipe { slope, parts: SyntheticFunction::new(atoms) }
}

/// A positive weight `|x - c|^a exp(s(x))` with `a` inside the stable range
/// of the quadratic class and `s` a bounded sum of bumps. The singularity
/// center `c` is drawn continuously, so it almost surely misses every node
/// of every grid (including half-cell-shifted output grids).
#[derive(Clone, Debug)]
pub struct WeightRecipe {
    pub power: f64,
    pub center: f64,
    pub modulation: SyntheticFunction,
}

impl WeightRecipe {
    pub fn eval(&self, x: f64) -> f64 {
        (x - self.center).abs().powf(self.power) * self.modulation.eval(x).exp()
    }

    pub fn sample(&self, grid: Grid) -> Result<GridFunction> {
        GridFunction::sample(grid, |x| self.eval(x))
    }
}

pub fn draw_weight(rng: &mut ChaCha8Rng, span: f64) -> WeightRecipe {
    let power = rng.gen_range(-0.5..0.5);
    let center = rng.gen_range(-0.125 * span..0.125 * span);
    let count = rng.gen_range(1..=2);
    let atoms = (0..count)
        .map(|_| Atom::Bump {
            center: rng.gen_range(-0.3 * span..0.3 * span),
            half_width: span * 10f64.powf(rng.gen_range(-1.0..-0.3)),
            height: rng.gen_range(-1.0..1.0),
        })
        .collect();
    WeightRecipe { power, center, modulation: SyntheticFunction::new(atoms) }
}

/// A fresh deterministic stream for a `(seed, stream)` pair. Distinct
/// streams decouple experiments that share one top-level seed.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_deterministic_in_seed_and_stream() {
        let mut r1 = rng_for(42, 7);
        let mut r2 = rng_for(42, 7);
        let f1 = draw_function(&mut r1, 16.0);
        let f2 = draw_function(&mut r2, 16.0);
        for x in [-3.0, -0.5, 0.0, 0.25, 2.0] {
            assert_eq!(f1.eval(x), f2.eval(x));
        }
        let mut r3 = rng_for(42, 8);
        let f3 = draw_function(&mut r3, 16.0);
        let differs = [-3.0, -0.5, 0.25, 2.0].iter().any(|&x| f1.eval(x) != f3.eval(x));
        assert!(differs, "different streams should give different draws");
    }

    #[test]
    fn samples_agree_across_resolutions_at_shared_nodes() {
        // Node i on the coarse grid is node 2i+... the refined grid halves
        // cells, so coarse node i = fine node 2i with the midpoint offset
        // preserved only for matching parity; instead check formula equality.
        let mut rng = rng_for(1, 0);
        let f = draw_function(&mut rng, 16.0);
        let g1 = Grid::new(0.0, 8.0, 128).unwrap();
        let g2 = Grid::new(0.0, 8.0, 512).unwrap();
        let s1 = f.sample(g1).unwrap();
        let s2 = f.sample(g2).unwrap();
        for i in 0..g1.n() {
            assert_eq!(s1.value(i), f.eval(g1.node(i)));
        }
        for i in 0..g2.n() {
            assert_eq!(s2.value(i), f.eval(g2.node(i)));
        }
    }

    #[test]
    fn atoms_are_compactly_supported_and_finite() {
        let atoms = [
            Atom::Indicator { center: 1.0, half_width: 0.5, height: 2.0 },
            Atom::Bump { center: -1.0, half_width: 0.25, height: -1.5 },
            Atom::LogSpike { center: 0.5, half_width: 1.0, height: 1.0 },
        ];
        for a in atoms {
            let (c, w) = match a {
                Atom::Indicator { center, half_width, .. }
                | Atom::Bump { center, half_width, .. }
                | Atom::LogSpike { center, half_width, .. } => (center, half_width),
            };
            assert_eq!(a.eval(c + w * 1.0001), 0.0);
            assert_eq!(a.eval(c - w * 1.0001), 0.0);
            for t in [-0.999f64, -0.5, 1e-9, 0.5, 0.999] {
                assert!(a.eval(c + w * t).is_finite());
            }
        }
    }

    #[test]
    fn log_spike_is_capped_at_the_center() {
        let a = Atom::LogSpike { center: 0.0, half_width: 1.0, height: 2.0 };
        assert_eq!(a.eval(0.0), 2.0 * LOG_SPIKE_CAP);
        assert_eq!(a.eval(1e-12), 2.0 * LOG_SPIKE_CAP);
        assert!((a.eval(0.5) - 2.0 * (4.0f64).ln().min(LOG_SPIKE_CAP)).abs() < 1e-12);
    }

    #[test]
    fn bump_vanishes_continuously_at_the_edge() {
        let a = Atom::Bump { center: 0.0, half_width: 1.0, height: 1.0 };
        assert!(a.eval(0.99999).abs() < 1e-4);
        assert!((a.eval(0.0) - (1.0 - (-9.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn weights_are_strictly_positive_on_grids() {
        let mut rng = rng_for(5, 3);
        for _ in 0..20 {
            let w = draw_weight(&mut rng, 16.0);
            let g = Grid::new(0.0, 8.0, 256).unwrap();
            let s = w.sample(g).unwrap();
            assert!(s.values().iter().all(|&v| v > 0.0 && v.is_finite()));
        }
    }

    #[test]
    fn symbols_sample_finite_on_fine_grids() {
        let mut rng = rng_for(9, 2);
        for _ in 0..20 {
            let b = draw_symbol(&mut rng, 16.0);
            let g = Grid::new(0.0, 8.0, 1024).unwrap();
            let s = b.sample(g).unwrap();
            assert!(s.values().iter().all(|v| v.is_finite()));
        }
    }
}
