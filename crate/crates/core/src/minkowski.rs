//! Vectors of Minkowski 3-space with the flat metric of signature (2,1).

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A vector in the frame `e1 e2 e3` with `e1² = e2² = 1`, `e3² = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MinkowskiVec {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl MinkowskiVec {
    pub const E1: MinkowskiVec = MinkowskiVec::new(1.0, 0.0, 0.0);
    pub const E2: MinkowskiVec = MinkowskiVec::new(0.0, 1.0, 0.0);
    pub const E3: MinkowskiVec = MinkowskiVec::new(0.0, 0.0, 1.0);
    pub const ZERO: MinkowskiVec = MinkowskiVec::new(0.0, 0.0, 0.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        MinkowskiVec { x1, x2, x3 }
    }

    pub fn dot(&self, other: &MinkowskiVec) -> f64 {
        minkowski_dot(self, other)
    }

    /// `<a, a>`; positive for space-like, negative for time-like vectors.
    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    /// Lorentzian cross product: the unique vector `c` with `<c, w> = det[a b w]`.
    pub fn cross(&self, other: &MinkowskiVec) -> MinkowskiVec {
        let (a, b) = (self, other);
        MinkowskiVec::new(
            a.x2 * b.x3 - a.x3 * b.x2,
            a.x3 * b.x1 - a.x1 * b.x3,
            -(a.x1 * b.x2 - a.x2 * b.x1),
        )
    }

    /// Euclidean coordinate norm, used only for discrepancy measures.
    pub fn coord_norm(&self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        MinkowskiVec::new(a[0], a[1], a[2])
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }
}

/// `a1 b1 + a2 b2 - a3 b3`.
pub fn minkowski_dot(a: &MinkowskiVec, b: &MinkowskiVec) -> f64 {
    a.x1 * b.x1 + a.x2 * b.x2 - a.x3 * b.x3
}

/// Coordinate determinant of the matrix with columns `a`, `b`, `c`.
pub fn det3(a: &MinkowskiVec, b: &MinkowskiVec, c: &MinkowskiVec) -> f64 {
    a.x1 * (b.x2 * c.x3 - b.x3 * c.x2) - b.x1 * (a.x2 * c.x3 - a.x3 * c.x2)
        + c.x1 * (a.x2 * b.x3 - a.x3 * b.x2)
}

impl Add for MinkowskiVec {
    type Output = MinkowskiVec;
    fn add(self, o: MinkowskiVec) -> MinkowskiVec {
        MinkowskiVec::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for MinkowskiVec {
    fn add_assign(&mut self, o: MinkowskiVec) {
        *self = *self + o;
    }
}

impl Sub for MinkowskiVec {
    type Output = MinkowskiVec;
    fn sub(self, o: MinkowskiVec) -> MinkowskiVec {
        MinkowskiVec::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for MinkowskiVec {
    type Output = MinkowskiVec;
    fn neg(self) -> MinkowskiVec {
        MinkowskiVec::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<MinkowskiVec> for f64 {
    type Output = MinkowskiVec;
    fn mul(self, v: MinkowskiVec) -> MinkowskiVec {
        MinkowskiVec::new(self * v.x1, self * v.x2, self * v.x3)
    }
}

impl Mul<f64> for MinkowskiVec {
    type Output = MinkowskiVec;
    fn mul(self, s: f64) -> MinkowskiVec {
        s * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_signature() {
        assert_eq!(minkowski_dot(&MinkowskiVec::E1, &MinkowskiVec::E1), 1.0);
        assert_eq!(minkowski_dot(&MinkowskiVec::E3, &MinkowskiVec::E3), -1.0);
        let null = MinkowskiVec::new(1.0, 0.0, 1.0);
        assert_eq!(null.square(), 0.0);
    }

    #[test]
    fn cross_is_orthogonal_and_matches_determinant() {
        let a = MinkowskiVec::new(0.3, -1.2, 0.7);
        let b = MinkowskiVec::new(2.0, 0.5, -0.1);
        let w = MinkowskiVec::new(-0.4, 0.9, 1.3);
        let c = a.cross(&b);
        assert!(c.dot(&a).abs() < 1e-14);
        assert!(c.dot(&b).abs() < 1e-14);
        assert!((c.dot(&w) - det3(&a, &b, &w)).abs() < 1e-13);
        // X x Y of the standard frame is the time-like unit with <l,l> = -1.
        let l = MinkowskiVec::E1.cross(&MinkowskiVec::E2);
        assert_eq!(l.square(), -1.0);
    }
}
