//! Equilibrium measures and capacities of finite sets.
//!
//! `φ_B` solves `Σ_b G(a - b) φ(b) = 1` for `a ∈ B` and `Cap(B) = Σ φ`.
//! Row sums `r(a) = Σ_b G(a - b)` sandwich the capacity:
//! `|B| / max r ≤ Cap(B) ≤ |B| / min r`.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{GreenKernel, WalkConfig};
use crate::lattice::{sub, Dim, FiniteLatticeSet, Point};
use crate::linalg::{dot, mat_vec, Cholesky};
use crate::real::Real;

/// Largest set solved directly.
pub const DEFAULT_SOLVER_CAP: usize = 4096;

/// Weights below this are treated as negative.
pub const NEGATIVE_WEIGHT_TOLERANCE: f64 = -1e-9;

/// Largest padded box used for convolution row sums.
/// Multiplicative `μ ← μ / √(Gμ)` steps applied to a subsample trial measure.
pub const TRIAL_REFINEMENTS: usize = 6;

pub const MAX_FFT_LEN: usize = 1 << 24;

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumMeasure<T> {
    pub weights: Vec<(Point, T)>,
    pub capacity: T,
    pub min_weight: T,
    /// `max_{a ∈ B} |Gφ(a) - 1|`.
    pub residual: T,
    pub condition_estimate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CapacityBounds<T> {
    pub lower: T,
    pub upper: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsoperimetricCheck<T> {
    pub floor: T,
    pub capacity: T,
    pub met: bool,
}

/// Capacity of a possibly oversized set, as an interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShellCapacity<T> {
    pub size: usize,
    /// Points entering the linear solve.
    pub solved: usize,
    pub subsampled: bool,
    /// Energy lower bound of the trial measure; exact when not subsampled.
    pub capacity: T,
    /// Interval containing the capacity.
    pub lower: T,
    pub upper: T,
    pub bounds: CapacityBounds<T>,
    pub residual: T,
    pub min_weight: T,
}

/// Green kernel plus solver settings; cheap to share across threads.
#[derive(Debug)]
pub struct CapacitySolver<T: Real> {
    kernel: GreenKernel<T>,
    max_points: usize,
}

impl<T: Real> CapacitySolver<T> {
    pub fn new(cfg: WalkConfig<T>) -> Result<Self> {
        Ok(CapacitySolver {
            kernel: GreenKernel::new(cfg)?,
            max_points: DEFAULT_SOLVER_CAP,
        })
    }

    pub fn from_kernel(kernel: GreenKernel<T>) -> Self {
        CapacitySolver {
            kernel,
            max_points: DEFAULT_SOLVER_CAP,
        }
    }

    pub fn with_max_points(mut self, max_points: usize) -> Self {
        self.max_points = max_points.max(1);
        self
    }

    pub fn kernel(&self) -> &GreenKernel<T> {
        &self.kernel
    }

    pub fn max_points(&self) -> usize {
        self.max_points
    }

    fn check(&self, set: &FiniteLatticeSet) -> Result<()> {
        if set.dim() != self.kernel.cfg().dim {
            return Err(Error::domain(format!(
                "set lives in dimension {} but the walk in {}",
                set.dim().get(),
                self.kernel.cfg().dim.get()
            )));
        }
        if set.is_empty() {
            return Err(Error::domain("capacity of the empty set"));
        }
        Ok(())
    }

    /// Row-major `[G(b_i - b_j)]`.
    pub fn green_matrix(&self, set: &FiniteLatticeSet) -> Vec<T> {
        let pts = set.points();
        self.kernel.prepare(set.diameter());
        let n = pts.len();
        let mut m = vec![T::zero(); n * n];
        m.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = self.kernel.value(&sub(&pts[i], &pts[j]));
            }
        });
        m
    }

    pub fn equilibrium_measure(&self, set: &FiniteLatticeSet) -> Result<EquilibriumMeasure<T>> {
        self.check(set)?;
        let n = set.len();
        if n > self.max_points {
            return Err(Error::Resource(format!(
                "set of {n} points exceeds the solver cap {}",
                self.max_points
            )));
        }
        let g = self.green_matrix(set);
        self.solve(set, &g).map(|(m, _)| m)
    }

    fn solve(
        &self,
        set: &FiniteLatticeSet,
        g: &[T],
    ) -> Result<(EquilibriumMeasure<T>, CapacityBounds<T>)> {
        let n = set.len();
        let chol = Cholesky::factor(g, n)?;
        let phi = chol.solve(&vec![T::one(); n]);
        let potential = mat_vec(g, &phi);
        let residual = potential
            .iter()
            .map(|&v| (v - T::one()).abs())
            .fold(T::zero(), T::max);
        let (k, min_weight) = phi
            .iter()
            .enumerate()
            .fold((0, T::infinity()), |(bk, bv), (k, &v)| if v < bv { (k, v) } else { (bk, bv) });
        if min_weight.f64() < NEGATIVE_WEIGHT_TOLERANCE {
            return Err(Error::NegativeWeight {
                weight: min_weight.f64(),
                point: set.points()[k],
            });
        }
        let rows: Vec<T> = g.par_chunks(n).map(|r| r.iter().copied().sum()).collect();
        let bounds = bounds_from_rows(n, &rows);
        let capacity = phi.iter().copied().sum();
        Ok((
            EquilibriumMeasure {
                weights: set.points().iter().copied().zip(phi).collect(),
                capacity,
                min_weight,
                residual,
                condition_estimate: chol.condition_estimate(),
            },
            bounds,
        ))
    }

    pub fn capacity(&self, set: &FiniteLatticeSet) -> Result<T> {
        Ok(self.equilibrium_measure(set)?.capacity)
    }

    /// Row-sum bounds; uses the dense matrix up to the solver cap and a
    /// convolution over the bounding box above it.
    pub fn capacity_bounds(&self, set: &FiniteLatticeSet) -> Result<CapacityBounds<T>> {
        self.check(set)?;
        let rows = if set.len() <= self.max_points {
            let g = self.green_matrix(set);
            g.par_chunks(set.len()).map(|r| r.iter().copied().sum()).collect()
        } else {
            self.row_sums_fft(set)?
        };
        Ok(bounds_from_rows(set.len(), &rows))
    }

    pub fn isoperimetric_floor(&self, set: &FiniteLatticeSet, c: T) -> Result<IsoperimetricCheck<T>> {
        let cfg = self.kernel.cfg();
        let d = T::of_usize(cfg.dim.get());
        let floor = c * T::of_usize(set.len()).powf(T::one() - cfg.alpha / d);
        let capacity = self.capacity(set)?;
        // equality in exact arithmetic must count as met
        let slack = T::of(1e-12) * floor.abs();
        Ok(IsoperimetricCheck {
            floor,
            capacity,
            met: capacity + slack >= floor,
        })
    }

    /// Exact solve up to the cap. Above it a uniform subsample is solved and
    /// its equilibrium weights, interpolated in point order, give a trial
    /// measure `μ` on the whole set; then
    /// `μ(B)² / ⟨μ, Gμ⟩ ≤ Cap(B) ≤ μ(B) / min_B Gμ`.
    pub fn shell_capacity(&self, set: &FiniteLatticeSet, seed: u64) -> Result<ShellCapacity<T>> {
        self.check(set)?;
        let n = set.len();
        if n <= self.max_points {
            let g = self.green_matrix(set);
            let (m, bounds) = self.solve(set, &g)?;
            return Ok(ShellCapacity {
                size: n,
                solved: n,
                subsampled: false,
                capacity: m.capacity,
                lower: m.capacity,
                upper: m.capacity,
                bounds,
                residual: m.residual,
                min_weight: m.min_weight,
            });
        }
        let bounds = self.capacity_bounds(set)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = sample(&mut rng, n, self.max_points).into_vec();
        idx.sort_unstable();
        let pts: Vec<Point> = idx.iter().map(|&i| set.points()[i]).collect();
        let subset = FiniteLatticeSet::from_distinct(set.dim(), pts);
        let g = self.green_matrix(&subset);
        let (m, _) = self.solve(&subset, &g)?;
        // spread the subsample weights over the full set as a trial measure
        let phi: Vec<T> = m.weights.iter().map(|w| w.1).collect();
        let mut mu = vec![T::zero(); n];
        for (k, pair) in idx.windows(2).enumerate() {
            let (i0, i1) = (pair[0], pair[1]);
            let span = T::of_usize(i1 - i0);
            for i in i0..i1 {
                let t = T::of_usize(i - i0) / span;
                mu[i] = phi[k] * (T::one() - t) + phi[k + 1] * t;
            }
        }
        mu[..idx[0]].fill(phi[0]);
        mu[*idx.last().unwrap()..].fill(*phi.last().unwrap());
        let (mut lower, mut upper) = (m.capacity.max(bounds.lower), bounds.upper);
        for step in 0..=TRIAL_REFINEMENTS {
            let pot = self.potential_fft(set, &mu)?;
            let mass: T = mu.iter().copied().sum();
            let energy = dot(&mu, &pot);
            let min_pot = pot.iter().copied().fold(T::infinity(), T::min);
            let max_pot = pot.iter().copied().fold(T::neg_infinity(), T::max);
            lower = lower.max(mass * mass / energy).max(mass / max_pot);
            upper = upper.min(mass / min_pot);
            if step < TRIAL_REFINEMENTS {
                for (w, v) in mu.iter_mut().zip(&pot) {
                    *w /= v.sqrt();
                }
            }
        }
        let upper = upper.max(lower);
        Ok(ShellCapacity {
            size: n,
            solved: subset.len(),
            subsampled: true,
            capacity: lower,
            lower,
            upper,
            bounds,
            residual: m.residual,
            min_weight: m.min_weight,
        })
    }

    /// `Σ_b G(a - b)` for every `a ∈ B` by one convolution of the indicator
    /// of `B` with `G` over the bounding box.
    pub fn row_sums_fft(&self, set: &FiniteLatticeSet) -> Result<Vec<T>> {
        self.potential_fft(set, &vec![T::one(); set.len()])
    }

    /// Potential `Σ_b G(a - b) μ(b)` on `B` of a measure carried by `B`.
    pub fn potential_fft(&self, set: &FiniteLatticeSet, mu: &[T]) -> Result<Vec<T>> {
        self.check(set)?;
        if mu.len() != set.len() {
            return Err(Error::Internal(format!(
                "{} weights for {} points",
                mu.len(),
                set.len()
            )));
        }
        let pts = set.points();
        let lo = [0, 1].map(|c| pts.iter().map(|p| p[c]).min().unwrap());
        let hi = [0, 1].map(|c| pts.iter().map(|p| p[c]).max().unwrap());
        let ext = [0, 1].map(|c| (hi[c] - lo[c]) as usize + 1);
        let dim = self.kernel.cfg().dim;
        let (n0, n1) = match dim {
            Dim::One => ((2 * ext[0]).next_power_of_two(), 1),
            Dim::Two => (
                (2 * ext[0]).next_power_of_two(),
                (2 * ext[1]).next_power_of_two(),
            ),
        };
        if n0.saturating_mul(n1) > MAX_FFT_LEN {
            return Err(Error::Resource(format!(
                "bounding box {:?} too large for convolution row sums",
                &ext[..dim.get()]
            )));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut ind = vec![zero; n0 * n1];
        for (p, &m) in pts.iter().zip(mu) {
            let i = (p[0] - lo[0]) as usize;
            let j = (p[1] - lo[1]) as usize;
            ind[i * n1 + j] = Complex::new(m, T::zero());
        }
        self.kernel.prepare(ext[0].max(ext[1]) as u64);
        // circular layout of G over displacements |δ_c| < ext_c
        let mut ker = vec![zero; n0 * n1];
        let wrap = |d: i64, n: usize| if d >= 0 { d as usize } else { (n as i64 + d) as usize };
        let e1 = if dim == Dim::Two { ext[1] as i64 } else { 1 };
        ker.par_chunks_mut(n1).enumerate().for_each(|(i, row)| {
            let d0 = if i < ext[0] {
                i as i64
            } else if i + ext[0] > n0 {
                i as i64 - n0 as i64
            } else {
                return;
            };
            for d1 in -(e1 - 1)..e1 {
                row[wrap(d1, n1)] = Complex::new(self.kernel.value(&[d0, d1]), T::zero());
            }
        });
        let mut planner = FftPlanner::<T>::new();
        fft2(&mut planner, &mut ind, n0, n1, false);
        fft2(&mut planner, &mut ker, n0, n1, false);
        for (a, b) in ind.iter_mut().zip(&ker) {
            *a *= *b;
        }
        fft2(&mut planner, &mut ind, n0, n1, true);
        let scale = T::one() / T::of_usize(n0 * n1);
        Ok(pts
            .iter()
            .map(|p| {
                let i = (p[0] - lo[0]) as usize;
                let j = (p[1] - lo[1]) as usize;
                ind[i * n1 + j].re * scale
            })
            .collect())
    }
}

fn bounds_from_rows<T: Real>(n: usize, rows: &[T]) -> CapacityBounds<T> {
    let (min, max) = rows
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    let n = T::of_usize(n);
    CapacityBounds {
        lower: n / max,
        upper: n / min,
    }
}

fn fft2<T: Real>(planner: &mut FftPlanner<T>, data: &mut [Complex<T>], n0: usize, n1: usize, inverse: bool) {
    if n1 > 1 {
        let plan = if inverse {
            planner.plan_fft_inverse(n1)
        } else {
            planner.plan_fft_forward(n1)
        };
        data.par_chunks_mut(n1).for_each(|row| plan.process(row));
    }
    let plan = if inverse {
        planner.plan_fft_inverse(n0)
    } else {
        planner.plan_fft_forward(n0)
    };
    let mut cols: Vec<Vec<Complex<T>>> = (0..n1)
        .map(|j| (0..n0).map(|i| data[i * n1 + j]).collect())
        .collect();
    cols.par_iter_mut().for_each(|c| plan.process(c));
    for (j, c) in cols.into_iter().enumerate() {
        for (i, v) in c.into_iter().enumerate() {
            data[i * n1 + j] = v;
        }
    }
}

pub fn equilibrium_measure<T: Real>(
    cfg: &WalkConfig<T>,
    set: &FiniteLatticeSet,
) -> Result<EquilibriumMeasure<T>> {
    CapacitySolver::new(*cfg)?.equilibrium_measure(set)
}

pub fn capacity<T: Real>(cfg: &WalkConfig<T>, set: &FiniteLatticeSet) -> Result<T> {
    CapacitySolver::new(*cfg)?.capacity(set)
}

pub fn capacity_bounds<T: Real>(
    cfg: &WalkConfig<T>,
    set: &FiniteLatticeSet,
) -> Result<CapacityBounds<T>> {
    CapacitySolver::new(*cfg)?.capacity_bounds(set)
}

pub fn isoperimetric_floor<T: Real>(
    cfg: &WalkConfig<T>,
    set: &FiniteLatticeSet,
    c: T,
) -> Result<IsoperimetricCheck<T>> {
    CapacitySolver::new(*cfg)?.isoperimetric_floor(set, c)
}
