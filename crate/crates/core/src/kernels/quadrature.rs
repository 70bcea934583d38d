//! Fourier route: `G_α(x) = π^{-d} ∫_{[0,π]^d} Π cos(x_i θ_i) (1 − φ_d(θ))^{-α/2} dθ`
//! with `φ₁ = cos θ` and `φ₂ = (cos θ₁ + cos θ₂)/2`.
//!
//! The integrand blows up like `|θ|^{-α}` at the origin. Each axis uses a
//! composite Gauss rule geometrically graded toward 0, so the tensor mesh
//! refines toward the singular corner.

use super::{GreenMethod, GreenValue, WalkConfig};
use crate::error::{Error, Result};
use crate::gauss::GradedMesh;
use crate::lattice::{Dim, Point};
use crate::real::Real;

/// `sin²(θ/2)`, i.e. `(1 − cos θ)/2` without cancellation.
#[inline]
pub(crate) fn half_versine(theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    s * s
}

pub(crate) struct AxisRule {
    pub theta: Vec<f64>,
    pub weight: Vec<f64>,
    pub hv: Vec<f64>,
}

impl AxisRule {
    pub fn new(mesh: &GradedMesh) -> Self {
        let nodes = mesh.nodes();
        AxisRule {
            theta: nodes.iter().map(|n| n.0).collect(),
            weight: nodes.iter().map(|n| n.1).collect(),
            hv: nodes.iter().map(|n| half_versine(n.0)).collect(),
        }
    }

    /// `w_i cos(x θ_i)`.
    pub fn cos_weights(&self, x: i64) -> Vec<f64> {
        let xf = x as f64;
        self.theta
            .iter()
            .zip(&self.weight)
            .map(|(t, w)| w * (xf * t).cos())
            .collect()
    }
}

fn evaluate(dim: Dim, alpha: f64, x: &Point, refine: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let mesh_for = |freq: i64| {
        let mut m = GradedMesh::for_singularity(pi, freq as f64, dim.get() as f64 - alpha);
        for _ in 0..refine {
            m = m.refined();
        }
        m
    };
    let e = -0.5 * alpha;
    match dim {
        Dim::One => {
            let rule = AxisRule::new(&mesh_for(x[0]));
            let cw = rule.cos_weights(x[0]);
            let s: f64 = cw.iter().zip(&rule.hv).map(|(c, h)| c * (2.0 * h).powf(e)).sum();
            s / pi
        }
        Dim::Two => {
            let r1 = AxisRule::new(&mesh_for(x[0]));
            let r2 = AxisRule::new(&mesh_for(x[1]));
            let c1 = r1.cos_weights(x[0]);
            let c2 = r2.cos_weights(x[1]);
            let mut total = 0.0;
            for (ci, hi) in c1.iter().zip(&r1.hv) {
                let inner: f64 = c2.iter().zip(&r2.hv).map(|(cj, hj)| cj * (hi + hj).powf(e)).sum();
                total += ci * inner;
            }
            total / (pi * pi)
        }
    }
}

/// Green function by quadrature of its Fourier representation. The error
/// estimate is the difference against a refined mesh.
pub fn green_quadrature<T: Real>(cfg: &WalkConfig<T>, x: &Point) -> Result<GreenValue<T>> {
    green_quadrature_with(cfg, x, 0)
}

/// As [`green_quadrature`], with `refine` extra mesh refinements.
pub fn green_quadrature_with<T: Real>(
    cfg: &WalkConfig<T>,
    x: &Point,
    refine: usize,
) -> Result<GreenValue<T>> {
    cfg.require_transient()?;
    if !cfg.dim.admits(x) {
        return Err(Error::domain(format!("point {x:?} is not in Z^1")));
    }
    let alpha = cfg.alpha.f64();
    let base = evaluate(cfg.dim, alpha, x, refine);
    let fine = evaluate(cfg.dim, alpha, x, refine + 1);
    Ok(GreenValue {
        value: T::of(fine),
        abs_error_bound: T::of((fine - base).abs() + 4.0 * f64::EPSILON * fine.abs()),
        method: GreenMethod::Quadrature,
    })
}
