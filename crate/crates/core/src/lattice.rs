//! Lattice points of Z and Z^2 and finite subsets.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point; for `d = 1` the second coordinate is zero.
pub type Point = [i64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            _ => Err(Error::domain(format!("dimension must be 1 or 2, got {d}"))),
        }
    }

    pub fn get(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    /// Whether `p` is a valid point of this lattice.
    pub fn admits(self, p: &Point) -> bool {
        self == Dim::Two || p[1] == 0
    }

    /// Coordinates of `p` as a vector of length `d`.
    pub fn coords(self, p: &Point) -> Vec<i64> {
        p[..self.get()].to_vec()
    }
}

pub fn sup_norm(p: &Point) -> u64 {
    p[0].unsigned_abs().max(p[1].unsigned_abs())
}

pub fn euclidean_norm(p: &Point) -> f64 {
    (p[0] as f64).hypot(p[1] as f64)
}

pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

/// Index of the dyadic shell `[2^n, 2^{n+1})` containing `r`, if `r >= 1`.
pub fn shell_index(r: u64) -> Option<u32> {
    (r >= 1).then(|| 63 - r.leading_zeros())
}

/// A nonempty finite subset of Z^d with a fixed point order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteLatticeSet {
    dim: Dim,
    points: Vec<Point>,
}

impl FiniteLatticeSet {
    pub fn new(dim: Dim, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("lattice set must be nonempty"));
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if !dim.admits(p) {
                return Err(Error::domain(format!("point {p:?} is not in Z^1")));
            }
            if !seen.insert(*p) {
                return Err(Error::domain(format!("duplicate point {p:?}")));
            }
        }
        Ok(FiniteLatticeSet { dim, points })
    }

    /// Builds a set from points already known to be distinct and admissible.
    pub(crate) fn from_distinct(dim: Dim, points: Vec<Point>) -> Self {
        debug_assert!(!points.is_empty());
        FiniteLatticeSet { dim, points }
    }

    pub fn singleton(dim: Dim, p: Point) -> Result<Self> {
        Self::new(dim, vec![p])
    }

    /// The integer interval `{start, …, start + len - 1}` in Z.
    pub fn interval(start: i64, len: usize) -> Result<Self> {
        Self::new(Dim::One, (0..len as i64).map(|i| [start + i, 0]).collect())
    }

    /// The square box `{0..side}^2` in Z^2.
    pub fn square(side: usize) -> Result<Self> {
        let s = side as i64;
        Self::new(
            Dim::Two,
            (0..s).flat_map(|i| (0..s).map(move |j| [i, j])).collect(),
        )
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn translate(&self, z: &Point) -> Result<Self> {
        Self::new(self.dim, self.points.iter().map(|p| add(p, z)).collect())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::domain("union of sets in different dimensions"));
        }
        let mut seen: HashSet<Point> = self.points.iter().copied().collect();
        let mut points = self.points.clone();
        points.extend(other.points.iter().filter(|p| seen.insert(**p)));
        Self::new(self.dim, points)
    }

    /// Largest sup-norm distance between two points of the set.
    pub fn diameter(&self) -> u64 {
        let (mut lo, mut hi) = ([i64::MAX; 2], [i64::MIN; 2]);
        for p in &self.points {
            for c in 0..2 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        ((hi[0] - lo[0]) as u64).max((hi[1] - lo[1]) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sets() {
        assert!(FiniteLatticeSet::new(Dim::One, vec![]).is_err());
        assert!(FiniteLatticeSet::new(Dim::One, vec![[1, 0], [1, 0]]).is_err());
        assert!(FiniteLatticeSet::new(Dim::One, vec![[1, 2]]).is_err());
        assert!(FiniteLatticeSet::new(Dim::Two, vec![[1, 2]]).is_ok());
    }

    #[test]
    fn shells() {
        assert_eq!(shell_index(0), None);
        assert_eq!(shell_index(1), Some(0));
        assert_eq!(shell_index(7), Some(2));
        assert_eq!(shell_index(8), Some(3));
        assert_eq!(sup_norm(&[-9, 4]), 9);
    }
}
