//! Monte Carlo hitting probabilities and visit counts for `S_α`.
//!
//! Every path draws from its own ChaCha8 stream keyed by `(seed, path)`, so
//! results do not depend on how rayon schedules the paths.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::WalkConfig;
use crate::lattice::{sup_norm, Dim, Point};
use crate::sets::{PrimeTable, SetFamily};
use crate::subordinator::Subordinator;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Step counts above this use the normal approximation of the binomial.
pub const BINOMIAL_EXACT_LIMIT: u64 = 1 << 40;

/// Largest sieved prefix used for prime membership along paths.
pub const PRIME_TABLE_LIMIT: u64 = 1 << 27;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub dim: Dim,
    pub alpha: f64,
    pub family: SetFamily,
    pub start: Point,
    pub n_paths: usize,
    /// Number of subordinated steps.
    pub horizon: u64,
    /// A path is abandoned once its sup-norm exceeds this.
    pub radius_cap: u64,
    pub seed: u64,
}

impl SimulationPlan {
    pub fn cfg(&self) -> Result<WalkConfig<f64>> {
        WalkConfig::new(self.dim, self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg()?;
        self.family.validate()?;
        if self.family.dim() != self.dim {
            return Err(Error::domain(format!(
                "family {} lives in Z^{}, walk in Z^{}",
                self.family,
                self.family.dim().get(),
                self.dim.get()
            )));
        }
        if !self.dim.admits(&self.start) {
            return Err(Error::domain(format!("start {:?} is not in Z^1", self.start)));
        }
        if self.n_paths == 0 || self.horizon == 0 {
            return Err(Error::domain("n_paths and horizon must be positive"));
        }
        if self.radius_cap <= sup_norm(&self.start) {
            return Err(Error::domain("radius_cap must exceed the norm of the start"));
        }
        Ok(())
    }
}

/// How one path ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "end", rename_all = "snake_case")]
pub enum PathOutcome {
    /// Entered the set at this (positive) step.
    Hit { step: u64 },
    /// Left the radius cap at this step.
    Escaped { step: u64 },
    /// Neither, by the horizon.
    Survived,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingEstimate {
    pub horizon: u64,
    pub hits: u64,
    pub paths: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Paths without a hit: `paths - hits`.
    pub censored: u64,
    /// Censored paths that left the radius cap.
    pub escaped: u64,
}

/// Wilson score interval for `hits` successes out of `n`.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Position of the simple random walk after `k` steps from the origin.
pub fn srw_displacement<R: Rng + ?Sized>(dim: Dim, k: u64, rng: &mut R) -> Point {
    let line = |rng: &mut R| -> i128 {
        if k == 0 {
            return 0;
        }
        if k > BINOMIAL_EXACT_LIMIT {
            // normal approximation with the parity of k kept
            let z: f64 = StandardNormal.sample(rng);
            let half = (z * (k as f64).sqrt() / 2.0).round() as i128;
            return 2 * half + (k & 1) as i128;
        }
        let b = Binomial::new(k, 0.5).unwrap().sample(rng);
        2 * b as i128 - k as i128
    };
    let clamp = |v: i128| v.clamp(i64::MIN as i128, i64::MAX as i128) as i64;
    match dim {
        Dim::One => [clamp(line(rng)), 0],
        Dim::Two => {
            // rotated coordinates are independent one-dimensional walks
            let u = line(rng);
            let v = line(rng);
            [clamp((u + v) / 2), clamp((u - v) / 2)]
        }
    }
}

/// One step of `S_α` from `position`.
pub fn step_walk<R: Rng + ?Sized>(
    sub: &Subordinator<f64>,
    dim: Dim,
    position: &Point,
    rng: &mut R,
) -> Point {
    let k = sub.sample_step(rng);
    let d = srw_displacement(dim, k, rng);
    [position[0].saturating_add(d[0]), position[1].saturating_add(d[1])]
}

/// The stream for path `index`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn needs_primes(family: &SetFamily) -> bool {
    match family {
        SetFamily::Primes | SetFamily::Leitmann { .. } | SetFamily::PiatetskiShapiro { .. } => true,
        SetFamily::Subthorn { base, .. } => needs_primes(base),
        _ => false,
    }
}

/// Runs every path of the plan; outcomes are in path order.
pub fn simulate_paths(plan: &SimulationPlan) -> Result<Vec<PathOutcome>> {
    plan.validate()?;
    let sub = Subordinator::new(plan.alpha)?;
    let table = needs_primes(&plan.family).then(|| PrimeTable::new(plan.radius_cap.min(PRIME_TABLE_LIMIT)));
    let table = table.as_ref();
    let outcomes = (0..plan.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(plan.seed, i);
            let mut x = plan.start;
            for step in 1..=plan.horizon {
                x = step_walk(&sub, plan.dim, &x, &mut rng);
                if sup_norm(&x) > plan.radius_cap {
                    return PathOutcome::Escaped { step };
                }
                if plan.family.contains_with(&x, table) {
                    return PathOutcome::Hit { step };
                }
            }
            PathOutcome::Survived
        })
        .collect();
    Ok(outcomes)
}

/// Summary of `outcomes` truncated at `horizon` (at most the simulated one).
pub fn summarize(outcomes: &[PathOutcome], horizon: u64) -> HittingEstimate {
    let paths = outcomes.len() as u64;
    let hits = outcomes
        .iter()
        .filter(|o| matches!(o, PathOutcome::Hit { step } if *step <= horizon))
        .count() as u64;
    let escaped = outcomes
        .iter()
        .filter(|o| matches!(o, PathOutcome::Escaped { step } if *step <= horizon))
        .count() as u64;
    let (ci_low, ci_high) = wilson_interval(hits, paths);
    HittingEstimate {
        horizon,
        hits,
        paths,
        estimate: if paths == 0 { 0.0 } else { hits as f64 / paths as f64 },
        ci_low,
        ci_high,
        censored: paths - hits,
        escaped,
    }
}

/// Lower estimate of `p_B(start)` from paths of length `plan.horizon`.
pub fn hitting_estimate(plan: &SimulationPlan) -> Result<HittingEstimate> {
    Ok(summarize(&simulate_paths(plan)?, plan.horizon))
}

/// Estimates at each horizon from a single run to the largest.
pub fn hitting_curve(plan: &SimulationPlan, horizons: &[u64]) -> Result<Vec<HittingEstimate>> {
    let max = horizons.iter().copied().max().unwrap_or(plan.horizon);
    let plan = SimulationPlan {
        horizon: max,
        ..plan.clone()
    };
    let outcomes = simulate_paths(&plan)?;
    Ok(horizons.iter().map(|&h| summarize(&outcomes, h)).collect())
}

/// Per-path outcomes as CSV: `path,end,step`.
pub fn write_trace_csv<W: Write>(outcomes: &[PathOutcome], out: W) -> Result<()> {
    let err = |e: csv::Error| Error::Internal(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["path", "end", "step"]).map_err(err)?;
    for (i, o) in outcomes.iter().enumerate() {
        let (end, step) = match o {
            PathOutcome::Hit { step } => ("hit", step.to_string()),
            PathOutcome::Escaped { step } => ("escaped", step.to_string()),
            PathOutcome::Survived => ("survived", String::new()),
        };
        w.write_record([i.to_string().as_str(), end, &step]).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Internal(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenEstimate {
    pub target: Point,
    pub paths: u64,
    pub horizon: u64,
    /// Mean number of visits at steps `0..=horizon`.
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Expected visits of `x` by `S_α` from the origin up to `horizon`; a lower
/// estimate of `G_α(0, x)`.
pub fn empirical_green(
    cfg: &WalkConfig<f64>,
    x: &Point,
    n_paths: usize,
    horizon: u64,
    seed: u64,
) -> Result<GreenEstimate> {
    if !cfg.dim.admits(x) {
        return Err(Error::domain(format!("point {x:?} is not in Z^1")));
    }
    if n_paths < 2 {
        return Err(Error::domain("empirical_green needs at least two paths"));
    }
    let sub = Subordinator::new(cfg.alpha)?;
    let counts: Vec<u64> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let mut pos = [0, 0];
            let mut visits = u64::from(pos == *x);
            for _ in 0..horizon {
                pos = step_walk(&sub, cfg.dim, &pos, &mut rng);
                visits += u64::from(pos == *x);
            }
            visits
        })
        .collect();
    let n = n_paths as f64;
    let mean = counts.iter().sum::<u64>() as f64 / n;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let std_error = (var / n).sqrt();
    Ok(GreenEstimate {
        target: *x,
        paths: n_paths as u64,
        horizon,
        mean,
        std_error,
        ci_low: mean - Z95 * std_error,
        ci_high: mean + Z95 * std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(family: &str, alpha: f64, dim: Dim, horizon: u64) -> SimulationPlan {
        SimulationPlan {
            dim,
            alpha,
            family: family.parse().unwrap(),
            start: [0, 0],
            n_paths: 200,
            horizon,
            radius_cap: 1 << 22,
            seed: 11,
        }
    }

    #[test]
    fn whole_space_is_hit_at_once() {
        for dim in [Dim::One, Dim::Two] {
            let d = dim.get();
            let est = hitting_estimate(&plan(&format!("all:d={d}"), 0.7, dim, 1)).unwrap();
            assert_eq!(est.hits, 200);
            assert_eq!(est.estimate, 1.0);
            assert_eq!(est.censored, 0);
        }
    }

    #[test]
    fn deterministic_and_monotone_in_horizon() {
        let p = plan("primes", 0.8, Dim::One, 400);
        let a = simulate_paths(&p).unwrap();
        let b = simulate_paths(&p).unwrap();
        assert_eq!(a, b);
        let curve = hitting_curve(&p, &[10, 100, 400]).unwrap();
        assert!(curve.windows(2).all(|w| w[0].hits <= w[1].hits));
        assert_eq!(curve[2], hitting_estimate(&p).unwrap());
        for e in &curve {
            assert_eq!(e.hits + e.censored, e.paths);
            assert!(e.ci_low <= e.estimate && e.estimate <= e.ci_high);
        }
    }

    #[test]
    fn displacement_parity_and_zero() {
        let mut rng = path_rng(1, 0);
        assert_eq!(srw_displacement(Dim::Two, 0, &mut rng), [0, 0]);
        for k in [1u64, 2, 7, 1000] {
            let p = srw_displacement(Dim::Two, k, &mut rng);
            assert_eq!((p[0] + p[1]).rem_euclid(2) as u64, k % 2);
            assert!(p[0].unsigned_abs() + p[1].unsigned_abs() <= k);
            let q = srw_displacement(Dim::One, k, &mut rng);
            assert_eq!(q[0].rem_euclid(2) as u64, k % 2);
        }
    }

    #[test]
    fn wilson_brackets() {
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.35);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn plan_validation() {
        let mut p = plan("axis", 1.0, Dim::One, 10);
        assert!(p.validate().is_err());
        p.dim = Dim::Two;
        assert!(p.validate().is_ok());
        p.radius_cap = 0;
        assert_eq!(p.validate().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn green_counts_the_start() {
        let cfg = WalkConfig::new(Dim::Two, 1.0).unwrap();
        let g = empirical_green(&cfg, &[0, 0], 50, 5, 3).unwrap();
        assert!(g.mean >= 1.0);
    }
}
