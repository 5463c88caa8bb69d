//! Fixed-dimension points/vectors with the handful of operations the rest of
//! the crate needs. No distinction is made between points and displacement
//! vectors; everything is a `Point<N>`.

use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// A point (or vector) in `N`-dimensional Euclidean space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<const N: usize>(pub [f64; N]);

/// Points in the plane.
pub type P2 = Point<2>;
/// Points in 3-space, the ambient dimension for meshes, flows and linking.
pub type P3 = Point<3>;

impl<const N: usize> Point<N> {
    pub const DIM: usize = N;

    pub fn zero() -> Self {
        Point([0.0; N])
    }

    pub fn dot(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            s += self.0[i] * other.0[i];
        }
        s
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }

    pub fn dist_sq(&self, other: &Self) -> f64 {
        (*self - *other).norm_sq()
    }

    /// Unit vector in the same direction; `None` for (near-)zero input.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(*self / n)
        } else {
            None
        }
    }

    /// |a × b| for vectors of any dimension, via the Lagrange identity
    /// |a|²|b|² − (a·b)².
    pub fn cross_norm(&self, other: &Self) -> f64 {
        let g = self.norm_sq() * other.norm_sq() - self.dot(other).powi(2);
        g.max(0.0).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        *self + (*other - *self) * t
    }

    pub fn coords(&self) -> &[f64; N] {
        &self.0
    }
}

impl P3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }

    pub fn cross(&self, other: &Self) -> Self {
        Point([
            self.0[1] * other.0[2] - self.0[2] * other.0[1],
            self.0[2] * other.0[0] - self.0[0] * other.0[2],
            self.0[0] * other.0[1] - self.0[1] * other.0[0],
        ])
    }

    /// Rodrigues rotation about a unit `axis` by `angle`.
    pub fn rotated(&self, axis: &P3, angle: f64) -> P3 {
        let (s, c) = angle.sin_cos();
        *self * c + axis.cross(self) * s + *axis * (axis.dot(self) * (1.0 - c))
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }
    pub fn y(&self) -> f64 {
        self.0[1]
    }
    pub fn z(&self) -> f64 {
        self.0[2]
    }
}

impl P2 {
    pub fn of(x: f64, y: f64) -> Self {
        Point([x, y])
    }
}

impl<const N: usize> Add for Point<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            self.0[i] += rhs.0[i];
        }
        self
    }
}

impl<const N: usize> AddAssign for Point<N> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..N {
            self.0[i] += rhs.0[i];
        }
    }
}

impl<const N: usize> Sub for Point<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            self.0[i] -= rhs.0[i];
        }
        self
    }
}

impl<const N: usize> SubAssign for Point<N> {
    fn sub_assign(&mut self, rhs: Self) {
        for i in 0..N {
            self.0[i] -= rhs.0[i];
        }
    }
}

impl<const N: usize> Mul<f64> for Point<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        for c in &mut self.0 {
            *c *= rhs;
        }
        self
    }
}

impl<const N: usize> Div<f64> for Point<N> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self * (1.0 / rhs)
    }
}

impl<const N: usize> Neg for Point<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl<const N: usize> Index<usize> for Point<N> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const N: usize> IndexMut<usize> for Point<N> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Interior angle at the corner `(a, apex, b)`, i.e. the angle between
/// `a − apex` and `b − apex`, in `[0, π]`. Robust near 0 and π.
pub fn angle_between<const N: usize>(u: &Point<N>, v: &Point<N>) -> f64 {
    u.cross_norm(v).atan2(u.dot(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_norm_matches_cross_in_3d() {
        let a = P3::new(1.0, 2.0, 3.0);
        let b = P3::new(-0.5, 0.25, 4.0);
        assert!((a.cross_norm(&b) - a.cross(&b).norm()).abs() < 1e-12);
    }

    #[test]
    fn angle_of_orthogonal_vectors_is_half_pi() {
        let a = P2::of(2.0, 0.0);
        let b = P2::of(0.0, -3.0);
        assert_eq!(angle_between(&a, &b), std::f64::consts::FRAC_PI_2);
    }
}
