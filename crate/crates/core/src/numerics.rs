//! Small dense helpers shared by the thermodynamics and the scheme.

use nalgebra::{Matrix3, Vector2, Vector3};

pub type Vec2 = Vector2<f64>;
pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Embeds an in-plane vector into 3D with a zero third component.
#[inline]
pub fn lift(v: &Vec2) -> Vec3 {
    Vec3::new(v.x, v.y, 0.0)
}

/// z-component of the planar cross product `a × b`.
#[inline]
pub fn cross_z(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Frobenius inner product `A : B`.
#[inline]
pub fn ddot(a: &Mat3, b: &Mat3) -> f64 {
    a.component_mul(b).sum()
}

/// Cofactor matrix, `cof(A) = det(A) A^{-T}` without forming the inverse.
pub fn cofactor(a: &Mat3) -> Mat3 {
    let m = |r0: usize, r1: usize, c0: usize, c1: usize| a[(r0, c0)] * a[(r1, c1)] - a[(r0, c1)] * a[(r1, c0)];
    Mat3::new(
        m(1, 2, 1, 2),
        -m(1, 2, 0, 2),
        m(1, 2, 0, 1),
        -m(0, 2, 1, 2),
        m(0, 2, 0, 2),
        -m(0, 2, 0, 1),
        m(0, 1, 1, 2),
        -m(0, 1, 0, 2),
        m(0, 1, 0, 1),
    )
}

/// In-plane block of `σ L` for a planar corner normal `L`.
#[inline]
pub fn stress_dot(sigma: &Mat3, l: &Vec2) -> Vec2 {
    Vec2::new(
        sigma[(0, 0)] * l.x + sigma[(0, 1)] * l.y,
        sigma[(1, 0)] * l.x + sigma[(1, 1)] * l.y,
    )
}

/// Neumaier-compensated accumulator for global reductions.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of floats.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}
