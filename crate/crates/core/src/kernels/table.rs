//! Cached Green kernel used by the capacity solver.
//!
//! Values with Euclidean norm above the far-field radius come from the
//! asymptotic form. Below it they come from a table filled by one tensor
//! quadrature: with `C[x][i] = w_i cos(x θ_i)` and `F[i][j]` the symbol on the
//! node grid, the planar table is `π^{-2} C F Cᵀ`.

use std::sync::{Arc, RwLock};

use super::quadrature::AxisRule;
use super::{asymptotic_constant, green_quadrature_with, WalkConfig};
use crate::error::Result;
use crate::gauss::GradedMesh;
use crate::lattice::{euclidean_norm, Dim, Point};
use crate::real::Real;

pub const DEFAULT_FAR_FIELD_RADIUS: f64 = 512.0;

#[derive(Debug)]
struct NearTable<T> {
    radius: usize,
    /// d = 1: `values[|x|]`; d = 2: `values[|x₁| (radius + 1) + |x₂|]`.
    values: Vec<T>,
}

#[derive(Debug)]
pub struct GreenKernel<T: Real> {
    cfg: WalkConfig<T>,
    far_field_radius: f64,
    far_constant: T,
    origin: T,
    table: RwLock<Arc<NearTable<T>>>,
}

impl<T: Real> GreenKernel<T> {
    pub fn new(cfg: WalkConfig<T>) -> Result<Self> {
        Self::with_far_field_radius(cfg, DEFAULT_FAR_FIELD_RADIUS)
    }

    pub fn with_far_field_radius(cfg: WalkConfig<T>, far_field_radius: f64) -> Result<Self> {
        cfg.require_transient()?;
        let origin = green_quadrature_with(&cfg, &[0, 0], 1)?.value;
        Ok(GreenKernel {
            far_constant: asymptotic_constant(&cfg)?,
            cfg,
            far_field_radius: far_field_radius.max(1.0),
            origin,
            table: RwLock::new(Arc::new(NearTable {
                radius: 0,
                values: vec![origin],
            })),
        })
    }

    pub fn cfg(&self) -> &WalkConfig<T> {
        &self.cfg
    }

    pub fn far_field_radius(&self) -> f64 {
        self.far_field_radius
    }

    /// `G_α(0, 0)`.
    pub fn origin(&self) -> T {
        self.origin
    }

    /// Makes sure every displacement with sup norm up to `extent` is served
    /// from the table or the far field.
    pub fn prepare(&self, extent: u64) {
        let cap = self.far_field_radius.ceil() as u64;
        let needed = extent.min(cap) as usize;
        if self.table.read().unwrap().radius >= needed {
            return;
        }
        let mut guard = self.table.write().unwrap();
        if guard.radius >= needed {
            return;
        }
        let radius = needed.next_power_of_two().max(16).min(cap as usize);
        let mut values = build_table(self.cfg.dim, self.cfg.alpha.f64(), radius);
        values[0] = self.origin.f64();
        *guard = Arc::new(NearTable {
            radius,
            values: values.into_iter().map(T::of).collect(),
        });
    }

    /// `G_α(x)`.
    pub fn value(&self, x: &Point) -> T {
        let r = euclidean_norm(x);
        if r > self.far_field_radius {
            return self.far_constant * T::of(r).powf(-self.cfg.gap());
        }
        let (a, b) = (x[0].unsigned_abs() as usize, x[1].unsigned_abs() as usize);
        {
            let table = self.table.read().unwrap();
            if a <= table.radius && b <= table.radius {
                return match self.cfg.dim {
                    Dim::One => table.values[a],
                    Dim::Two => table.values[a * (table.radius + 1) + b],
                };
            }
        }
        self.prepare(a.max(b) as u64);
        self.value(x)
    }

    /// `G_α` on displacements `0..=len` along the first axis (`d = 1`) or on
    /// the quarter plane `[0, len]²` (`d = 2`, row-major).
    pub fn values_on_grid(&self, len: usize) -> Vec<T> {
        self.prepare(len as u64);
        match self.cfg.dim {
            Dim::One => (0..=len as i64).map(|i| self.value(&[i, 0])).collect(),
            Dim::Two => (0..=len as i64)
                .flat_map(|i| (0..=len as i64).map(move |j| [i, j]))
                .map(|p| self.value(&p))
                .collect(),
        }
    }
}

fn build_table(dim: Dim, alpha: f64, radius: usize) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    let mesh = GradedMesh::for_singularity(pi, radius as f64, dim.get() as f64 - alpha);
    let rule = AxisRule::new(&mesh);
    let m = rule.theta.len();
    let e = -0.5 * alpha;
    let cos_rows: Vec<Vec<f64>> = (0..=radius as i64).map(|x| rule.cos_weights(x)).collect();
    match dim {
        Dim::One => {
            let f: Vec<f64> = rule.hv.iter().map(|h| (2.0 * h).powf(e)).collect();
            cos_rows
                .iter()
                .map(|c| c.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>() / pi)
                .collect()
        }
        Dim::Two => {
            // H = F Cᵀ as rows H[x][i] = Σ_j F[i][j] C[x][j]
            let mut f = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..m {
                    f[i * m + j] = (rule.hv[i] + rule.hv[j]).powf(e);
                }
            }
            let n = radius + 1;
            let mut h = vec![0.0; n * m];
            for (x, c) in cos_rows.iter().enumerate() {
                let out = &mut h[x * m..(x + 1) * m];
                for i in 0..m {
                    let row = &f[i * m..(i + 1) * m];
                    out[i] = dot(row, c);
                }
            }
            let mut table = vec![0.0; n * n];
            for x1 in 0..n {
                for x2 in 0..=x1 {
                    let v = dot(&cos_rows[x1], &h[x2 * m..(x2 + 1) * m]) / (pi * pi);
                    table[x1 * n + x2] = v;
                    table[x2 * n + x1] = v;
                }
            }
            table
        }
    }
}

/// Dot product with four independent accumulators.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..n {
        s += a[i] * b[i];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::green_quadrature;

    #[test]
    fn table_matches_pointwise_quadrature() {
        for (d, alpha) in [(1usize, 0.5f64), (2, 1.0)] {
            let cfg = WalkConfig::new(Dim::new(d).unwrap(), alpha).unwrap();
            let kernel = GreenKernel::new(cfg).unwrap();
            kernel.prepare(40);
            let pts: Vec<Point> = match d {
                1 => vec![[1, 0], [17, 0], [-40, 0]],
                _ => vec![[1, 0], [3, 4], [-17, 9], [40, 40]],
            };
            for p in pts {
                let direct = green_quadrature(&cfg, &p).unwrap().value;
                let tab = kernel.value(&p);
                assert!((tab - direct).abs() < 1e-10 * direct, "{d} {p:?}: {tab} {direct}");
            }
        }
    }

    #[test]
    fn far_field_switch() {
        let cfg = WalkConfig::new(Dim::Two, 1.0f64).unwrap();
        let kernel = GreenKernel::with_far_field_radius(cfg, 8.0).unwrap();
        let v = kernel.value(&[30, 40]);
        assert!((v - 1.0 / (50.0 * std::f64::consts::PI)).abs() < 1e-15);
    }
}
