//! Gauss–Legendre rules and composite rules on graded meshes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&m) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_rule(m));
    cache.lock().unwrap().insert(m, Arc::clone(&rule));
    rule
}

fn compute_rule(m: usize) -> Vec<(f64, f64)> {
    assert!(m >= 1);
    let mut out = vec![(0.0, 0.0); m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[m - 1 - i] = (x, w);
    }
    out
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule on `[0, upper]` resolving an integrable singularity at 0
/// and an oscillation `cos(freq * θ)`.
///
/// The mesh is geometrically graded toward 0 below `grade_top` (ratio
/// `ratio`, `levels` panels) and uniform above it.
#[derive(Clone, Debug)]
pub struct GradedMesh {
    pub upper: f64,
    pub grade_top: f64,
    pub ratio: f64,
    pub levels: usize,
    pub base_order: usize,
    pub max_panel: f64,
    pub freq: f64,
}

impl GradedMesh {
    pub fn new(upper: f64, freq: f64) -> Self {
        Self::for_singularity(upper, freq, 0.5)
    }

    /// Mesh for an integrand whose integral over `[0, ε]` (or the corner
    /// `[0, ε]^d`) scales like `ε^strength`; grading goes deep enough that
    /// the innermost panel carries below `1e-16` of the mass.
    pub fn for_singularity(upper: f64, freq: f64, strength: f64) -> Self {
        let ratio: f64 = 0.15;
        let levels = (16.0 * std::f64::consts::LN_10 / (strength * (1.0 / ratio).ln())).ceil() as usize + 2;
        GradedMesh {
            upper,
            grade_top: upper.min(0.5),
            ratio,
            levels: levels.max(12),
            base_order: 14,
            max_panel: 0.5,
            freq: freq.abs(),
        }
    }

    /// A finer mesh used for error estimation.
    pub fn refined(&self) -> Self {
        GradedMesh {
            ratio: self.ratio * 1.4,
            levels: self.levels + 12,
            base_order: self.base_order + 8,
            max_panel: self.max_panel * 0.75,
            ..self.clone()
        }
    }

    fn panels(&self) -> Vec<(f64, f64)> {
        let mut panels = Vec::new();
        let mut hi = self.grade_top;
        for _ in 0..self.levels {
            let lo = hi * self.ratio;
            panels.push((lo, hi));
            hi = lo;
        }
        panels.push((0.0, hi));
        panels.reverse();
        let span = self.upper - self.grade_top;
        if span > 0.0 {
            let n = (span / self.max_panel).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for i in 0..n {
                let lo = self.grade_top + i as f64 * h;
                panels.push((lo, if i + 1 == n { self.upper } else { lo + h }));
            }
        }
        panels
    }

    /// Nodes and weights of the composite rule.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for (lo, hi) in self.panels() {
            let h = hi - lo;
            let order = self.base_order + (0.55 * self.freq * h).ceil() as usize;
            let rule = gauss_legendre(order);
            let half = 0.5 * h;
            let mid = lo + half;
            out.extend(rule.iter().map(|&(x, w)| (mid + half * x, half * w)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials() {
        let rule = gauss_legendre(7);
        let s: f64 = rule.iter().map(|&(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        let total: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn graded_mesh_handles_endpoint_singularity() {
        // ∫_0^1 θ^{-1/2} cos(40 θ) dθ = sqrt(pi/80) * C(sqrt(80/pi)) (Fresnel);
        // compare against a much finer mesh instead.
        let f = |t: f64| t.powf(-0.5) * (40.0 * t).cos();
        let coarse: f64 = GradedMesh::new(1.0, 40.0).nodes().iter().map(|&(t, w)| w * f(t)).sum();
        let fine: f64 = GradedMesh::new(1.0, 40.0)
            .refined()
            .refined()
            .nodes()
            .iter()
            .map(|&(t, w)| w * f(t))
            .sum();
        assert!((coarse - fine).abs() < 1e-11, "{coarse} vs {fine}");
        let plain: f64 = GradedMesh::new(1.0, 0.0).nodes().iter().map(|&(t, w)| w * t.powf(-0.5)).sum();
        assert!((plain - 2.0).abs() < 1e-10, "{plain}");
    }
}
