//! The discrete α/2-stable subordinator.
//!
//! Expanding `1 - (1 - s)^{α/2} = Σ_{k≥1} c_k s^k` gives the step law
//! `P(τ_1 = k) = c_k`, and partial sums telescope to the tail
//! `P(τ_1 > k) = Π_{j=1}^{k} (1 - α/(2j))`. Both are evaluated by product
//! recurrences, so no Gamma ratios appear in the table.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::special::ln_gamma;

/// Default size of the exact pmf table.
pub const DEFAULT_TABLE_LEN: usize = 1 << 16;

/// Value of an n-step probability together with the probability mass that
/// lies beyond the truncated support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncated<T> {
    pub value: T,
    pub eps_trunc: T,
}

/// Law of `τ_n` on `{0, …, K}` and the mass `P(τ_n > K)`.
#[derive(Clone, Debug)]
pub struct NStepLaw<T> {
    pub n: usize,
    /// `probs[k] = P(τ_n = k)` for `k ≤ K`.
    pub probs: Vec<T>,
    pub eps_trunc: T,
}

#[derive(Debug)]
pub struct Subordinator<T: Real> {
    alpha: T,
    /// `pmf[k - 1] = c_k` for `1 ≤ k ≤ K`.
    pmf: Vec<T>,
    /// `tail[k] = P(τ_1 > k)` for `0 ≤ k ≤ K`.
    tail: Vec<T>,
    cdf: Vec<f64>,
    n_step_cache: Mutex<HashMap<usize, Arc<NStepLaw<T>>>>,
}

impl<T: Real> Clone for Subordinator<T> {
    fn clone(&self) -> Self {
        Subordinator {
            alpha: self.alpha,
            pmf: self.pmf.clone(),
            tail: self.tail.clone(),
            cdf: self.cdf.clone(),
            n_step_cache: Mutex::new(HashMap::new()),
        }
    }
}

impl<T: Real> Subordinator<T> {
    pub fn new(alpha: T) -> Result<Self> {
        Self::with_table_len(alpha, DEFAULT_TABLE_LEN)
    }

    pub fn with_table_len(alpha: T, table_len: usize) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::of(2.0)) {
            return Err(Error::domain(format!(
                "stability index alpha = {alpha} must lie in (0, 2)"
            )));
        }
        if table_len == 0 {
            return Err(Error::domain("pmf table length must be positive"));
        }
        let a = alpha.f64() / 2.0;
        let mut pmf = Vec::with_capacity(table_len);
        let mut tail = Vec::with_capacity(table_len + 1);
        let mut cdf = Vec::with_capacity(table_len + 1);
        let mut c = a;
        let mut t = 1.0f64;
        tail.push(T::one());
        cdf.push(0.0);
        for k in 1..=table_len {
            let kf = k as f64;
            if k > 1 {
                c *= (kf - 1.0 - a) / kf;
            }
            t *= 1.0 - a / kf;
            pmf.push(T::of(c));
            tail.push(T::of(t));
            cdf.push(1.0 - t);
        }
        Ok(Subordinator {
            alpha,
            pmf,
            tail,
            cdf,
            n_step_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Index of the subordinator, α/2.
    pub fn index(&self) -> T {
        self.alpha / T::of(2.0)
    }

    /// Table length `K`.
    pub fn table_len(&self) -> usize {
        self.pmf.len()
    }

    /// `1 - Σ_{k ≤ K} P(τ_1 = k)`.
    pub fn tail_mass(&self) -> T {
        self.tail[self.table_len()]
    }

    /// The exact table `P(τ_1 = k)`, `k = 1..=K`.
    pub fn pmf_table(&self) -> &[T] {
        &self.pmf
    }

    /// `P(τ_1 = k)` for `k ≥ 1`, exact for every `k`.
    pub fn step_pmf(&self, k: u64) -> T {
        if k == 0 {
            return T::zero();
        }
        if (k as usize) <= self.table_len() {
            return self.pmf[k as usize - 1];
        }
        // c_k = P(τ > k-1) · a / k with P(τ > m) = Γ(m+1-a) / (Γ(1-a) Γ(m+1)).
        let a = self.alpha.f64() / 2.0;
        let m = (k - 1) as f64;
        let ln_t = ln_gamma(m + 1.0 - a) - ln_gamma(1.0 - a) - ln_gamma(m + 1.0);
        T::of(ln_t.exp() * a / k as f64)
    }

    /// `P(τ_1 > k)`: exact up to `K`, regularly varying with index `-α/2`
    /// beyond, matched continuously at `K`.
    pub fn step_tail(&self, k: u64) -> T {
        let big_k = self.table_len();
        if (k as usize) <= big_k {
            return self.tail[k as usize];
        }
        let ratio = T::of(big_k as f64 / k as f64);
        self.tail_mass() * ratio.powf(self.index())
    }

    /// Law of `τ_n` on `{0, …, K}`.
    pub fn n_step_law(&self, n: usize) -> Result<Arc<NStepLaw<T>>> {
        if n == 0 {
            return Err(Error::domain("n-step law needs n >= 1"));
        }
        if let Some(law) = self.n_step_cache.lock().unwrap().get(&n) {
            return Ok(Arc::clone(law));
        }
        let big_k = self.table_len();
        let mut step = vec![0.0f64; big_k + 1];
        for (k, p) in self.pmf.iter().enumerate() {
            step[k + 1] = p.f64();
        }
        let mut acc = step.clone();
        if n > 1 {
            let mut planner = FftPlanner::<f64>::new();
            let size = (2 * (big_k + 1)).next_power_of_two();
            let fwd = planner.plan_fft_forward(size);
            let inv = planner.plan_fft_inverse(size);
            let mut step_hat: Vec<Complex<f64>> = step
                .iter()
                .map(|&v| Complex::new(v, 0.0))
                .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
                .take(size)
                .collect();
            fwd.process(&mut step_hat);
            for m in 2..=n {
                let mut buf: Vec<Complex<f64>> = acc
                    .iter()
                    .map(|&v| Complex::new(v, 0.0))
                    .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
                    .take(size)
                    .collect();
                fwd.process(&mut buf);
                for (b, s) in buf.iter_mut().zip(&step_hat) {
                    *b *= s;
                }
                inv.process(&mut buf);
                let scale = 1.0 / size as f64;
                for (k, slot) in acc.iter_mut().enumerate() {
                    // τ_m ≥ m, so entries below m vanish exactly.
                    *slot = if k < m { 0.0 } else { (buf[k].re * scale).max(0.0) };
                }
            }
        }
        let total: f64 = acc.iter().sum();
        let law = Arc::new(NStepLaw {
            n,
            probs: acc.into_iter().map(T::of).collect(),
            eps_trunc: T::of((1.0 - total).max(0.0)),
        });
        self.n_step_cache
            .lock()
            .unwrap()
            .insert(n, Arc::clone(&law));
        Ok(law)
    }

    /// `P(τ_n = k)` with the truncation mass of the support it was computed on.
    pub fn n_step_pmf(&self, n: usize, k: u64) -> Result<Truncated<T>> {
        let law = self.n_step_law(n)?;
        let value = if (k as usize) < law.probs.len() && k >= n as u64 {
            law.probs[k as usize]
        } else {
            T::zero()
        };
        Ok(Truncated {
            value,
            eps_trunc: law.eps_trunc,
        })
    }

    /// One draw of `τ_1`. Values beyond `u64::MAX` saturate.
    pub fn sample_step<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let big_k = self.table_len();
        let tail_mass = self.tail[big_k].f64();
        if u < 1.0 - tail_mass {
            // first k with cdf[k] > u
            let idx = self.cdf.partition_point(|&c| c <= u);
            return idx.clamp(1, big_k) as u64;
        }
        // Conditional uniform on the tail event, mapped through the
        // continuous Pareto inverse and rounded up.
        let v = ((1.0 - u) / tail_mass).clamp(f64::MIN_POSITIVE, 1.0);
        let x = big_k as f64 * v.powf(-2.0 / self.alpha.f64());
        if x >= u64::MAX as f64 {
            u64::MAX
        } else {
            (x.ceil() as u64).max(big_k as u64 + 1)
        }
    }
}
