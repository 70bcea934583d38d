//! The dyadic-shell test of massiveness and closed-form classifiers.
//!
//! A set `B ⊂ Z^d` is hit with probability one iff
//! `Σ_n Cap(B_n) / 2^{n(d-α)} = ∞`. Finitely many terms cannot decide
//! divergence, so [`wiener_test`] fits the envelope
//! `term_n ≈ c·n^{-s}·ρ^n` and reads the verdict off `(s, ρ)`.

mod classify;

use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::CapacitySolver;
use crate::error::{Error, Result};
use crate::kernels::WalkConfig;
use crate::linalg::Cholesky;
use crate::real::Real;
use crate::sets::SetFamily;

pub use classify::*;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_SHELLS: RangeInclusive<u32> = 4..=24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVerdict {
    Diverges,
    Converges,
    Inconclusive,
}

/// Least-squares fit of `ln term_n = ln c - s ln n + n ln ρ`, plus the two
/// one-parameter slopes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeFit {
    pub log_c: f64,
    pub s: f64,
    pub log_rho: f64,
    /// Slope of `ln term` against `ln n`.
    pub power_slope: f64,
    /// Slope of `ln term` against `n`.
    pub geometric_slope: f64,
    pub rms: f64,
    pub points: usize,
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Fits the envelope on the positive terms; `None` with fewer than three.
pub fn envelope_fit(ns: &[f64], terms: &[f64]) -> Option<EnvelopeFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = ns
        .iter()
        .zip(terms)
        .filter(|(n, t)| **n >= 1.0 && **t > 0.0 && t.is_finite())
        .map(|(n, t)| (*n, t.ln()))
        .unzip();
    if x.len() < 3 {
        return None;
    }
    let logs: Vec<f64> = x.iter().map(|n| n.ln()).collect();
    let power_slope = slope(&logs, &y);
    let geometric_slope = slope(&x, &y);
    // normal equations for the basis [1, -ln n, n], columns scaled to unit size
    let cols: [Vec<f64>; 3] = [
        vec![1.0; x.len()],
        logs.iter().map(|l| -l).collect(),
        x.clone(),
    ];
    let scale: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300))
        .collect();
    let mut ata = vec![0.0; 9];
    let mut atb = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            ata[i * 3 + j] = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum::<f64>()
                / (scale[i] * scale[j]);
        }
        atb[i] = cols[i].iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / scale[i];
    }
    for i in 0..3 {
        ata[i * 4] += 1e-13;
    }
    let coef = Cholesky::factor(&ata, 3).ok()?.solve(&atb);
    let (log_c, s, log_rho) = (coef[0] / scale[0], coef[1] / scale[1], coef[2] / scale[2]);
    let rms = (x
        .iter()
        .zip(&logs)
        .zip(&y)
        .map(|((n, l), v)| (log_c - s * l + log_rho * n - v).powi(2))
        .sum::<f64>()
        / x.len() as f64)
        .sqrt();
    Some(EnvelopeFit {
        log_c,
        s,
        log_rho,
        power_slope,
        geometric_slope,
        rms,
        points: x.len(),
    })
}

/// Diverges when `|ln ρ| < 0.02` and `s ≤ 0.9` (or the terms grow
/// geometrically); converges when `ρ < 0.98` or `s ≥ 1.1`.
pub fn envelope_verdict(fit: Option<&EnvelopeFit>) -> SeriesVerdict {
    let Some(f) = fit else {
        return SeriesVerdict::Inconclusive;
    };
    let rho = f.log_rho.exp();
    if rho < 0.98 {
        SeriesVerdict::Converges
    } else if f.log_rho.abs() < 0.02 {
        if f.s <= 0.9 {
            SeriesVerdict::Diverges
        } else if f.s >= 1.1 {
            SeriesVerdict::Converges
        } else {
            SeriesVerdict::Inconclusive
        }
    } else if f.log_rho >= 0.02 {
        SeriesVerdict::Diverges
    } else {
        SeriesVerdict::Inconclusive
    }
}

/// One row of a report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShellTerm {
    pub n: u32,
    pub size: usize,
    pub solved: usize,
    pub subsampled: bool,
    pub capacity: f64,
    pub capacity_low: f64,
    pub capacity_high: f64,
    pub term: f64,
    pub term_low: f64,
    pub term_high: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WienerReport {
    pub schema_version: u32,
    pub dim: usize,
    pub alpha: f64,
    pub family: String,
    pub solver_cap: usize,
    pub seed: u64,
    pub terms: Vec<ShellTerm>,
    pub partial_sums: Vec<f64>,
    /// Slope of `ln term` against `ln n`.
    pub fitted_exponent: Option<f64>,
    pub fit: Option<EnvelopeFit>,
    /// Largest `(term_high - term_low) / term` over subsampled shells.
    pub max_relative_width: f64,
    pub verdict: SeriesVerdict,
}

impl WienerReport {
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for t in &self.terms {
            out.serialize(t).map_err(|e| Error::Internal(e.to_string()))?;
        }
        out.flush().map_err(|e| Error::Internal(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WienerOptions {
    pub solver_cap: usize,
    pub seed: u64,
}

impl Default for WienerOptions {
    fn default() -> Self {
        WienerOptions {
            solver_cap: crate::capacity::DEFAULT_SOLVER_CAP,
            seed: 0,
        }
    }
}

/// Per-shell seed for the subsample.
fn shell_seed(seed: u64, n: u32) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub fn wiener_test<T: Real>(
    cfg: &WalkConfig<T>,
    family: &SetFamily,
    shells: RangeInclusive<u32>,
    opts: WienerOptions,
) -> Result<WienerReport> {
    cfg.require_transient()?;
    family.validate()?;
    if family.dim() != cfg.dim {
        return Err(Error::domain(format!(
            "family {family} lives in dimension {} but the walk in {}",
            family.dim().get(),
            cfg.dim.get()
        )));
    }
    let solver = CapacitySolver::new(*cfg)?.with_max_points(opts.solver_cap);
    let gap = cfg.gap().f64();
    let ns: Vec<u32> = shells.collect();
    let terms: Vec<ShellTerm> = ns
        .par_iter()
        .map(|&n| -> Result<ShellTerm> {
            let scale = (-(n as f64) * gap * std::f64::consts::LN_2).exp();
            let Some(set) = family.dyadic_shell(n)? else {
                return Ok(ShellTerm {
                    n,
                    size: 0,
                    solved: 0,
                    subsampled: false,
                    capacity: 0.0,
                    capacity_low: 0.0,
                    capacity_high: 0.0,
                    term: 0.0,
                    term_low: 0.0,
                    term_high: 0.0,
                    residual: 0.0,
                });
            };
            let c = solver.shell_capacity(&set, shell_seed(opts.seed, n))?;
            Ok(ShellTerm {
                n,
                size: c.size,
                solved: c.solved,
                subsampled: c.subsampled,
                capacity: c.capacity.f64(),
                capacity_low: c.lower.f64(),
                capacity_high: c.upper.f64(),
                term: c.capacity.f64() * scale,
                term_low: c.lower.f64() * scale,
                term_high: c.upper.f64() * scale,
                residual: c.residual.f64(),
            })
        })
        .collect::<Result<_>>()?;
    let partial_sums = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t.term;
            Some(*acc)
        })
        .collect();
    let xs: Vec<f64> = terms.iter().map(|t| t.n as f64).collect();
    let ys: Vec<f64> = terms.iter().map(|t| t.term).collect();
    let fit = envelope_fit(&xs, &ys);
    let max_relative_width = terms
        .iter()
        .filter(|t| t.subsampled && t.term > 0.0)
        .map(|t| (t.term_high - t.term_low) / t.term)
        .fold(0.0, f64::max);
    Ok(WienerReport {
        schema_version: REPORT_SCHEMA_VERSION,
        dim: cfg.dim.get(),
        alpha: cfg.alpha.f64(),
        family: family.to_string(),
        solver_cap: opts.solver_cap,
        seed: opts.seed,
        terms,
        partial_sums,
        fitted_exponent: fit.map(|f| f.power_slope),
        verdict: envelope_verdict(fit.as_ref()),
        fit,
        max_relative_width,
    })
}
