//! The scalar abstraction shared by plain complex numbers and jets.
//!
//! Every closed-form map in the crate is written once against [`Scalar`] and
//! evaluated either on [`C64`] (point values) or on [`crate::jet::Jet`]
//! (truncated Taylor expansions carrying all partials up to a fixed order).

use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type C64 = Complex64;

/// Shorthand for a real number lifted into `C64`.
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<C64, Output = Self>
    + Sub<C64, Output = Self>
    + Mul<C64, Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// A constant living in the same space as `self`.
    fn constant_like(&self, c: C64) -> Self;
    /// The value at the base point.
    fn value(&self) -> C64;

    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn tanh(&self) -> Self {
        self.sinh() / self.cosh()
    }
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    /// Principal branch. Callers are responsible for keeping the argument off
    /// the negative real axis.
    fn sqrt(&self) -> Self;
    fn recip(&self) -> Self;

    fn zero_like(&self) -> Self {
        self.constant_like(C64::new(0.0, 0.0))
    }
    fn one_like(&self) -> Self {
        self.constant_like(C64::new(1.0, 0.0))
    }
    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for C64 {
    fn constant_like(&self, c: C64) -> Self {
        c
    }
    fn value(&self) -> C64 {
        *self
    }
    fn sin(&self) -> Self {
        Complex64::sin(*self)
    }
    fn cos(&self) -> Self {
        Complex64::cos(*self)
    }
    fn sinh(&self) -> Self {
        Complex64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        Complex64::cosh(*self)
    }
    fn tanh(&self) -> Self {
        Complex64::tanh(*self)
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn ln(&self) -> Self {
        Complex64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        Complex64::sqrt(*self)
    }
    fn recip(&self) -> Self {
        self.inv()
    }
}

/// True when `z` lies on (or numerically next to) the cut of the principal
/// square root, i.e. the closed negative real axis.
pub fn on_sqrt_branch_cut(z: C64, tol: f64) -> bool {
    z.re <= 0.0 && z.im.abs() <= tol * z.norm().max(f64::MIN_POSITIVE)
}
