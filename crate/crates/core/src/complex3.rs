//! Vectors and 3×3 matrices over complex scalars (or jets), with the
//! bilinear, non-conjugating inner product `⟨x, y⟩ = xᵀy`.
//!
//! [`alpha`] is the isometry of `ℂ³` onto the skew-symmetric matrices:
//! `alpha(x) y = x × y` and `½ tr(alpha(x)ᵀ alpha(y)) = xᵀy`.

use crate::error::{GeomError, Result};
use crate::scalar::{Scalar, C64};
use std::ops::{Add, Index, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Vec3<S>(pub [S; 3]);

#[derive(Clone, Debug, PartialEq)]
pub struct Mat3<S>(pub [[S; 3]; 3]);

pub type CVec3 = Vec3<C64>;
pub type CMat3 = Mat3<C64>;

impl<S> Index<usize> for Vec3<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S: Scalar> Vec3<S> {
    pub fn new(x1: S, x2: S, x3: S) -> Self {
        Vec3([x1, x2, x3])
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Vec3<T> {
        Vec3([f(&self.0[0]), f(&self.0[1]), f(&self.0[2])])
    }

    pub fn dot(&self, rhs: &Self) -> S {
        self.0[0].clone() * rhs.0[0].clone()
            + self.0[1].clone() * rhs.0[1].clone()
            + self.0[2].clone() * rhs.0[2].clone()
    }

    pub fn cross(&self, rhs: &Self) -> Self {
        let [a1, a2, a3] = &self.0;
        let [b1, b2, b3] = &rhs.0;
        Vec3([
            a2.clone() * b3.clone() - a3.clone() * b2.clone(),
            a3.clone() * b1.clone() - a1.clone() * b3.clone(),
            a1.clone() * b2.clone() - a2.clone() * b1.clone(),
        ])
    }

    /// `|x|² = xᵀx` (no conjugation).
    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|x| x.clone() * k.clone())
    }

    pub fn scale_c(&self, k: C64) -> Self {
        self.map(|x| x.clone() * k)
    }

    pub fn value(&self) -> CVec3 {
        self.map(|x| x.value())
    }

    pub fn zero_like(s: &S) -> Self {
        Vec3([s.zero_like(), s.zero_like(), s.zero_like()])
    }

    /// Lifts a constant vector into the space of `like`.
    pub fn lift(c: &CVec3, like: &S) -> Self {
        c.map(|x| like.constant_like(*x))
    }
}

impl<S: Scalar> Add for Vec3<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = rhs.0;
        Vec3([a1 + b1, a2 + b2, a3 + b3])
    }
}

impl<S: Scalar> Sub for Vec3<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = rhs.0;
        Vec3([a1 - b1, a2 - b2, a3 - b3])
    }
}

impl<S: Scalar> Neg for Vec3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        let [a1, a2, a3] = self.0;
        Vec3([-a1, -a2, -a3])
    }
}

impl CVec3 {
    pub fn from_re(x: [f64; 3]) -> CVec3 {
        Vec3(x.map(|v| C64::new(v, 0.0)))
    }

    pub fn zero() -> CVec3 {
        CVec3::from_re([0.0; 3])
    }

    pub fn basis(i: usize) -> CVec3 {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        CVec3::from_re(e)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Isotropic: `|x|² = 0` relative to the largest entry squared.
    pub fn is_isotropic(&self, tol: f64) -> bool {
        let scale = self.max_abs().powi(2);
        scale > 0.0 && self.norm_sq().norm() <= tol * scale
    }
}

impl<S: Scalar> Mat3<S> {
    pub fn from_columns(c0: &Vec3<S>, c1: &Vec3<S>, c2: &Vec3<S>) -> Self {
        let row = |i: usize| [c0.0[i].clone(), c1.0[i].clone(), c2.0[i].clone()];
        Mat3([row(0), row(1), row(2)])
    }

    pub fn identity_like(s: &S) -> Self {
        let (o, z) = (s.one_like(), s.zero_like());
        Mat3([
            [o.clone(), z.clone(), z.clone()],
            [z.clone(), o.clone(), z.clone()],
            [z.clone(), z, o],
        ])
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Mat3<T> {
        let r = |i: usize| [f(&self.0[i][0]), f(&self.0[i][1]), f(&self.0[i][2])];
        Mat3([r(0), r(1), r(2)])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        let r = |j: usize| [m[0][j].clone(), m[1][j].clone(), m[2][j].clone()];
        Mat3([r(0), r(1), r(2)])
    }

    pub fn column(&self, j: usize) -> Vec3<S> {
        Vec3([self.0[0][j].clone(), self.0[1][j].clone(), self.0[2][j].clone()])
    }

    pub fn mul_vec(&self, x: &Vec3<S>) -> Vec3<S> {
        let row = |i: usize| Vec3(self.0[i].clone()).dot(x);
        Vec3([row(0), row(1), row(2)])
    }

    pub fn mul_mat(&self, rhs: &Self) -> Self {
        let rt = rhs.transpose();
        let e = |i: usize, j: usize| Vec3(self.0[i].clone()).dot(&Vec3(rt.0[j].clone()));
        Mat3([
            [e(0, 0), e(0, 1), e(0, 2)],
            [e(1, 0), e(1, 1), e(1, 2)],
            [e(2, 0), e(2, 1), e(2, 2)],
        ])
    }

    pub fn det(&self) -> S {
        let c0 = self.column(0);
        let c1 = self.column(1);
        let c2 = self.column(2);
        c0.dot(&c1.cross(&c2))
    }

    /// Inverse through the adjugate; the caller guarantees `det ≠ 0`.
    pub fn inverse(&self) -> Self {
        let c0 = self.column(0);
        let c1 = self.column(1);
        let c2 = self.column(2);
        let r0 = c1.cross(&c2);
        let r1 = c2.cross(&c0);
        let r2 = c0.cross(&c1);
        let inv_det = c0.dot(&r0).recip();
        Mat3([
            r0.scale(&inv_det).0,
            r1.scale(&inv_det).0,
            r2.scale(&inv_det).0,
        ])
    }

    pub fn value(&self) -> CMat3 {
        self.map(|x| x.value())
    }

    pub fn outer(a: &Vec3<S>, b: &Vec3<S>) -> Self {
        let r = |i: usize| {
            [
                a.0[i].clone() * b.0[0].clone(),
                a.0[i].clone() * b.0[1].clone(),
                a.0[i].clone() * b.0[2].clone(),
            ]
        };
        Mat3([r(0), r(1), r(2)])
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|x| x.clone() * k.clone())
    }
}

impl<S: Scalar> Add for Mat3<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = out.0[i][j].clone() + rhs.0[i][j].clone();
            }
        }
        out
    }
}

impl<S: Scalar> Sub for Mat3<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = out.0[i][j].clone() - rhs.0[i][j].clone();
            }
        }
        out
    }
}

impl<S: Scalar> Mul for Mat3<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_mat(&rhs)
    }
}

impl CMat3 {
    pub fn identity() -> CMat3 {
        Mat3::identity_like(&C64::new(0.0, 0.0))
    }

    pub fn from_re(m: [[f64; 3]; 3]) -> CMat3 {
        Mat3(m.map(|r| r.map(|x| C64::new(x, 0.0))))
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &CMat3) -> f64 {
        (self.clone() - rhs.clone()).max_abs()
    }

    /// Worst entry of `RᵀR − I` and `|det R − 1|`.
    pub fn rotation_defects(&self) -> (f64, f64) {
        let gram = self.transpose().mul_mat(self);
        let orth = gram.max_abs_diff(&CMat3::identity());
        let det = (self.det() - C64::new(1.0, 0.0)).norm();
        (orth, det)
    }

    /// `RᵀR = I₃` and `det R = 1`, relative to the largest entry.
    pub fn is_rotation(&self, tol: f64) -> bool {
        let scale = self.max_abs().powi(2).max(1.0);
        let (orth, det) = self.rotation_defects();
        orth <= tol * scale && det <= tol * scale
    }

    pub fn is_skew(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let skew_err = (self.clone() + self.transpose()).max_abs();
        skew_err <= tol * scale
    }

    /// `⟨X, Y⟩ = ½ tr(XᵀY)`.
    pub fn inner(&self, rhs: &CMat3) -> C64 {
        let p = self.transpose().mul_mat(rhs);
        (p.0[0][0] + p.0[1][1] + p.0[2][2]) * 0.5
    }
}

pub fn dot<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> S {
    a.dot(b)
}

pub fn cross<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    a.cross(b)
}

/// The skew-symmetric matrix of `x`, so that `alpha(x) y = x × y`.
pub fn alpha<S: Scalar>(x: &Vec3<S>) -> Mat3<S> {
    let [x1, x2, x3] = &x.0;
    let z = x1.zero_like();
    Mat3([
        [z.clone(), -x3.clone(), x2.clone()],
        [x3.clone(), z.clone(), -x1.clone()],
        [-x2.clone(), x1.clone(), z],
    ])
}

/// Inverse of [`alpha`]; rejects matrices that are not skew-symmetric
/// within `tol` (relative to the largest entry).
pub fn alpha_inv(m: &CMat3, tol: f64) -> Result<CVec3> {
    if !m.is_skew(tol) {
        return Err(GeomError::MalformedInput(
            "alpha_inv expects a skew-symmetric matrix".into(),
        ));
    }
    let e = &m.0;
    Ok(Vec3([
        (e[2][1] - e[1][2]) * 0.5,
        (e[0][2] - e[2][0]) * 0.5,
        (e[1][0] - e[0][1]) * 0.5,
    ]))
}

/// Matrix commutator `[X, Y] = XY − YX`.
pub fn commutator<S: Scalar>(x: &Mat3<S>, y: &Mat3<S>) -> Mat3<S> {
    x.mul_mat(y) - y.mul_mat(x)
}
