use serde::Serialize;

use crate::real::Field;

/// Shape of a positive sequence evaluated on dyadic scales,
/// `x_n ≍ exp(log_rho·n + root·√n) · n^power · (ln n)^log`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Growth<F> {
    pub log_rho: F,
    pub root: F,
    pub power: F,
    pub log: F,
}

impl<F: Field> Growth<F> {
    pub fn one() -> Self {
        Growth {
            log_rho: F::zero(),
            root: F::zero(),
            power: F::zero(),
            log: F::zero(),
        }
    }

    pub fn geometric(log_rho: F) -> Self {
        Growth { log_rho, ..Self::one() }
    }

    pub fn polynomial(power: F, log: F) -> Self {
        Growth {
            power,
            log,
            ..Self::one()
        }
    }

    pub fn stretched(root: F) -> Self {
        Growth { root, ..Self::one() }
    }

    pub fn mul(self, o: Self) -> Self {
        Growth {
            log_rho: self.log_rho + o.log_rho,
            root: self.root + o.root,
            power: self.power + o.power,
            log: self.log + o.log,
        }
    }

    pub fn pow(self, e: F) -> Self {
        Growth {
            log_rho: self.log_rho * e,
            root: self.root * e,
            power: self.power * e,
            log: self.log * e,
        }
    }

    pub fn recip(self) -> Self {
        self.pow(F::zero() - F::one())
    }

    /// Whether `Σ_n x_n` diverges.
    pub fn series_diverges(&self) -> bool {
        let z = F::zero();
        let minus_one = z - F::one();
        if self.log_rho != z {
            return self.log_rho > z;
        }
        if self.root != z {
            return self.root > z;
        }
        if self.power != minus_one {
            return self.power > minus_one;
        }
        self.log >= minus_one
    }

    pub fn to_f64(&self) -> Growth<f64> {
        Growth {
            log_rho: self.log_rho.as_f64(),
            root: self.root.as_f64(),
            power: self.power.as_f64(),
            log: self.log.as_f64(),
        }
    }
}
