//! Transition functions of the simple and subordinated walks, and the Green
//! function `G_α` by three independent routes.

mod asymptotic;
mod quadrature;
mod series;
mod table;

use serde::Serialize;

pub use asymptotic::{asymptotic_constant, green_asymptotic};
pub use quadrature::{green_quadrature, green_quadrature_with};
pub use series::{green_series, green_series_adaptive};
pub use table::{GreenKernel, DEFAULT_FAR_FIELD_RADIUS};

use crate::error::{Error, Result};
use crate::gauss::gauss_legendre;
use crate::lattice::{Dim, Point};
use crate::real::Real;
use crate::special::ln_binomial;
use crate::subordinator::Subordinator;

/// Dimension and stability index of the walk `S_α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WalkConfig<T> {
    pub dim: Dim,
    pub alpha: T,
}

impl<T: Real> WalkConfig<T> {
    pub fn new(dim: Dim, alpha: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::of(2.0)) {
            return Err(Error::domain(format!(
                "stability index alpha = {alpha} must lie in (0, 2)"
            )));
        }
        Ok(WalkConfig { dim, alpha })
    }

    /// `S_α` is transient iff `0 < α < d`.
    pub fn transient(&self) -> bool {
        self.alpha < T::of_usize(self.dim.get())
    }

    pub fn require_transient(&self) -> Result<()> {
        if self.transient() {
            Ok(())
        } else {
            Err(Error::NotTransient {
                alpha: self.alpha.f64(),
                dim: self.dim.get(),
            })
        }
    }

    /// `d - α`, the scaling exponent of the massiveness test.
    pub fn gap(&self) -> T {
        T::of_usize(self.dim.get()) - self.alpha
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GreenMethod {
    Series,
    Quadrature,
    Asymptotic,
}

/// A Green function value with its error information.
///
/// For the series route `value` is a certified lower bound (a partial sum of
/// nonnegative terms) and `abs_error_bound` is the extrapolated tail. For
/// quadrature it is an error estimate. The asymptotic route has no bound and
/// reports infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GreenValue<T> {
    pub value: T,
    pub abs_error_bound: T,
    pub method: GreenMethod,
}

impl<T: Real> GreenValue<T> {
    /// Best point estimate: the series partial sum plus its tail estimate,
    /// the plain value otherwise.
    pub fn estimate(&self) -> T {
        match self.method {
            GreenMethod::Series => self.value + self.abs_error_bound,
            _ => self.value,
        }
    }
}

/// `p¹(k, m)`, the one-dimensional simple random walk transition function.
pub fn srw_pmf_1d(k: u64, m: i64) -> f64 {
    let am = m.unsigned_abs();
    if am > k || (k - am) % 2 != 0 {
        return 0.0;
    }
    let j = (k + am) / 2;
    (ln_binomial(k, j) - k as f64 * std::f64::consts::LN_2).exp()
}

/// `p(k, x)` for the simple random walk on Z^d.
///
/// In two dimensions the rotated coordinates `x₁ + x₂`, `x₁ − x₂` move as
/// independent ±1 walks, so the planar kernel factors into two 1-D kernels.
pub fn srw_pmf<T: Real>(dim: Dim, k: u64, x: &Point) -> T {
    T::of(match dim {
        Dim::One => srw_pmf_1d(k, x[0]),
        Dim::Two => srw_pmf_1d(k, x[0] + x[1]) * srw_pmf_1d(k, x[0] - x[1]),
    })
}

/// `max_{k' ≥ k} p(k', x)` bound: the central probability is nonincreasing.
fn srw_central_bound(dim: Dim, k: u64) -> f64 {
    let c = srw_pmf_1d(k, (k % 2) as i64).max(srw_pmf_1d(k + 1, ((k + 1) % 2) as i64));
    match dim {
        Dim::One => c,
        Dim::Two => c * c,
    }
}

/// Subordinated transition probability with its truncation information.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelValue<T> {
    /// Truncated sum over subordinator values `k ≤ K`; a lower bound.
    pub value: T,
    /// Rigorous bound on the neglected part.
    pub remainder_bound: T,
    /// Estimate of the neglected part under the tail extrapolation of the
    /// step law (one-step kernel only).
    pub tail_estimate: Option<T>,
}

impl<T: Real> KernelValue<T> {
    pub fn corrected(&self) -> T {
        self.value + self.tail_estimate.unwrap_or(T::zero())
    }
}

/// `p_α(n, x) = Σ_k p(k, x) P(τ_n = k)`.
pub fn subordinated_pmf<T: Real>(
    cfg: &WalkConfig<T>,
    sub: &Subordinator<T>,
    n: usize,
    x: &Point,
) -> Result<KernelValue<T>> {
    check_alpha(cfg, sub)?;
    if !cfg.dim.admits(x) {
        return Err(Error::domain(format!("point {x:?} is not in Z^1")));
    }
    let law = sub.n_step_law(n)?;
    let big_k = law.probs.len() - 1;
    let mut acc = 0.0;
    for_each_srw(cfg.dim, x, big_k as u64, |k, p| {
        acc += p * law.probs[k as usize].f64();
    });
    Ok(KernelValue {
        value: T::of(acc),
        remainder_bound: T::of(law.eps_trunc.f64() * srw_central_bound(cfg.dim, big_k as u64 + 1)),
        tail_estimate: (n == 1).then(|| T::of(one_step_tail(cfg, sub, x))),
    })
}

/// One-step kernel on the box `‖x‖_∞ ≤ radius`, row-major over
/// `x₁` then `x₂` (for `d = 1` a vector over `x₁ ∈ [-radius, radius]`).
pub fn subordinated_pmf_box<T: Real>(
    cfg: &WalkConfig<T>,
    sub: &Subordinator<T>,
    n: usize,
    radius: usize,
) -> Result<Vec<KernelValue<T>>> {
    check_alpha(cfg, sub)?;
    let law = sub.n_step_law(n)?;
    let big_k = law.probs.len() - 1;
    let r = radius as i64;
    // 1-D rows are needed on [-2r, 2r] for the rotated planar coordinates.
    let span = match cfg.dim {
        Dim::One => r,
        Dim::Two => 2 * r,
    };
    let width = (2 * span + 1) as usize;
    let side = (2 * r + 1) as usize;
    let cells = match cfg.dim {
        Dim::One => side,
        Dim::Two => side * side,
    };
    let mut acc = vec![0.0f64; cells];
    let mut row = vec![0.0f64; width];
    for k in 1..=big_k as u64 {
        let weight = law.probs[k as usize].f64();
        if weight == 0.0 {
            continue;
        }
        srw_row(k, span, &mut row);
        match cfg.dim {
            Dim::One => {
                for (a, p) in acc.iter_mut().zip(&row) {
                    *a += weight * p;
                }
            }
            Dim::Two => {
                for i in 0..side {
                    let x1 = i as i64 - r;
                    for j in 0..side {
                        let x2 = j as i64 - r;
                        let pa = row[(x1 + x2 + span) as usize];
                        if pa == 0.0 {
                            continue;
                        }
                        acc[i * side + j] += weight * pa * row[(x1 - x2 + span) as usize];
                    }
                }
            }
        }
    }
    let bound = T::of(law.eps_trunc.f64() * srw_central_bound(cfg.dim, big_k as u64 + 1));
    let point = |idx: usize| -> Point {
        match cfg.dim {
            Dim::One => [idx as i64 - r, 0],
            Dim::Two => [(idx / side) as i64 - r, (idx % side) as i64 - r],
        }
    };
    Ok(acc
        .into_iter()
        .enumerate()
        .map(|(idx, v)| KernelValue {
            value: T::of(v),
            remainder_bound: bound,
            tail_estimate: (n == 1).then(|| T::of(one_step_tail(cfg, sub, &point(idx)))),
        })
        .collect())
}

fn check_alpha<T: Real>(cfg: &WalkConfig<T>, sub: &Subordinator<T>) -> Result<()> {
    if cfg.alpha != sub.alpha() {
        return Err(Error::domain("subordinator and walk use different alpha"));
    }
    Ok(())
}

/// Fills `row[m + span] = p¹(k, m)` for `|m| ≤ span`.
fn srw_row(k: u64, span: i64, row: &mut [f64]) {
    row.iter_mut().for_each(|v| *v = 0.0);
    let m0 = (k % 2) as i64;
    let mut p = srw_pmf_1d(k, m0);
    let mut m = m0;
    while m <= span && (m as u64) <= k && p > 0.0 {
        row[(m + span) as usize] = p;
        row[(span - m) as usize] = p;
        // p¹(k, m+2) / p¹(k, m) = (k − m) / (k + m + 2)
        p *= (k as i64 - m) as f64 / (k as i64 + m + 2) as f64;
        m += 2;
    }
}

/// Calls `f(k, p(k, x))` for every `k ≤ max_k` with `p(k, x) > 0`, using
/// multiplicative recurrences in `k` at fixed `x`.
pub(crate) fn for_each_srw(dim: Dim, x: &Point, max_k: u64, mut f: impl FnMut(u64, f64)) {
    let (a, b) = match dim {
        Dim::One => (x[0], 0),
        Dim::Two => (x[0] + x[1], x[0] - x[1]),
    };
    let k0 = match dim {
        Dim::One => a.unsigned_abs(),
        Dim::Two => a.unsigned_abs().max(b.unsigned_abs()),
    };
    if k0 > max_k {
        return;
    }
    let mut walker_a = Srw1Walker::start(k0, a);
    let mut walker_b = (dim == Dim::Two).then(|| Srw1Walker::start(k0, b));
    let mut k = k0;
    while k <= max_k {
        let p = walker_a.p * walker_b.as_ref().map_or(1.0, |w| w.p);
        f(k, p);
        walker_a.advance();
        if let Some(w) = walker_b.as_mut() {
            w.advance();
        }
        k += 2;
    }
}

/// `p¹(k, m)` advanced along `k, k + 2, …`.
struct Srw1Walker {
    k: u64,
    m: u64,
    p: f64,
}

impl Srw1Walker {
    fn start(k: u64, m: i64) -> Self {
        Srw1Walker {
            k,
            m: m.unsigned_abs(),
            p: srw_pmf_1d(k, m),
        }
    }

    fn advance(&mut self) {
        let k = self.k as f64;
        let j = ((self.k + self.m) / 2) as f64;
        self.p *= (k + 1.0) * (k + 2.0) / (4.0 * (j + 1.0) * (k - j + 1.0));
        self.k += 2;
    }
}

/// `Σ_{k > K} q_k p(k, x)` where `q` is the extrapolated step law beyond the
/// table and `p` the local limit density averaged over parity.
fn one_step_tail<T: Real>(cfg: &WalkConfig<T>, sub: &Subordinator<T>, x: &Point) -> f64 {
    let big_k = sub.table_len() as f64;
    let a = sub.index().f64();
    let mass = sub.tail_mass().f64();
    let r2 = (x[0] * x[0] + x[1] * x[1]) as f64;
    let rule = gauss_legendre(12);
    let mut total = 0.0;
    // integrate in s = ln k over [ln K, ln K + 90]
    let s0 = big_k.ln();
    for panel in 0..90 {
        let lo = s0 + panel as f64;
        for &(t, w) in rule.iter() {
            let s = lo + 0.5 + 0.5 * t;
            let k = s.exp();
            let density = mass * a * big_k.powf(a) * k.powf(-a - 1.0);
            let local = match cfg.dim {
                Dim::One => (2.0 * std::f64::consts::PI * k).powf(-0.5) * (-r2 / (2.0 * k)).exp(),
                Dim::Two => (-r2 / k).exp() / (std::f64::consts::PI * k),
            };
            total += 0.5 * w * density * local * k;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, alpha: f64) -> WalkConfig<f64> {
        WalkConfig::new(Dim::new(d).unwrap(), alpha).unwrap()
    }

    #[test]
    fn srw_small_cases() {
        assert_eq!(srw_pmf::<f64>(Dim::One, 0, &[0, 0]), 1.0);
        assert!((srw_pmf::<f64>(Dim::One, 2, &[0, 0]) - 0.5).abs() < 1e-15);
        assert!((srw_pmf::<f64>(Dim::Two, 2, &[0, 0]) - 0.25).abs() < 1e-15);
        assert_eq!(srw_pmf::<f64>(Dim::One, 3, &[0, 0]), 0.0);
        assert_eq!(srw_pmf::<f64>(Dim::Two, 1, &[1, 1]), 0.0);
    }

    #[test]
    fn srw_2d_matches_path_enumeration() {
        // enumerate all 4^4 paths of length 4
        let steps = [[1, 0], [-1, 0], [0, 1], [0, -1]];
        let mut counts = std::collections::HashMap::new();
        for code in 0..256usize {
            let mut p = [0i64, 0];
            for s in 0..4 {
                let st = steps[(code >> (2 * s)) & 3];
                p = [p[0] + st[0], p[1] + st[1]];
            }
            *counts.entry(p).or_insert(0usize) += 1;
        }
        for (p, c) in counts {
            let exact = c as f64 / 256.0;
            assert!((srw_pmf::<f64>(Dim::Two, 4, &p) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn walker_recurrence_matches_direct() {
        for x in [[0, 0], [3, 0], [2, -5]] {
            let dim = if x[1] == 0 { Dim::One } else { Dim::Two };
            for_each_srw(dim, &x, 400, |k, p| {
                let direct = srw_pmf::<f64>(dim, k, &x);
                assert!((p - direct).abs() <= 1e-12 * direct.max(1e-300), "{x:?} {k}");
            });
        }
    }

    #[test]
    fn transience_predicate() {
        assert!(cfg(1, 0.9).transient());
        assert!(!cfg(1, 1.0).transient());
        assert!(cfg(2, 1.99).transient());
        assert!(WalkConfig::new(Dim::Two, 2.0f64).is_err());
    }

    #[test]
    fn one_step_kernel_symmetry_and_lower_bound() {
        let c = cfg(1, 1.0);
        let sub = Subordinator::new(1.0).unwrap();
        let plus = subordinated_pmf(&c, &sub, 1, &[1, 0]).unwrap();
        let minus = subordinated_pmf(&c, &sub, 1, &[-1, 0]).unwrap();
        assert_eq!(plus.value, minus.value);
        assert!(plus.value >= 0.25);
        // 20-term partial sum plus the remainder bound brackets the value
        let mut partial = 0.0;
        for k in (1..40u64).step_by(2) {
            partial += srw_pmf_1d(k, 1) * sub.step_pmf(k);
        }
        assert!(partial <= plus.value);
        let rest = sub.step_tail(39) * srw_central_bound(Dim::One, 40);
        assert!(plus.value <= partial + rest);
    }

    #[test]
    fn box_matches_pointwise() {
        let c = cfg(2, 1.5);
        let sub = Subordinator::with_table_len(1.5, 4096).unwrap();
        let table = subordinated_pmf_box(&c, &sub, 1, 3).unwrap();
        for (idx, x) in [(0usize, [-3i64, -3i64]), (24, [0, 0]), (25, [0, 1]), (40, [2, 2])] {
            let direct = subordinated_pmf(&c, &sub, 1, &x).unwrap();
            assert!((table[idx].value - direct.value).abs() < 1e-15);
        }
    }
}
