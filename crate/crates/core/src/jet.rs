//! Truncated multivariate Taylor expansions ("jets") with complex coefficients.
//!
//! A [`Jet`] stores the Taylor coefficients `c_α = ∂^α f / α!` of a function of
//! one to three parameters at a base point, for all multi-indices with
//! `|α| ≤ degree`. Arithmetic and elementary functions act on the truncated
//! series exactly, which gives forward-mode derivatives of any order up to the
//! space degree. Each jet also tracks the order up to which its coefficients
//! are trustworthy: differentiation lowers it by one.

use crate::error::GeomError;
use crate::scalar::{Scalar, C64};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

pub const MAX_VARS: usize = 3;
pub const MAX_DEGREE: usize = 5;

/// Monomial layout and multiplication table for one (nvars, degree) pair.
pub struct Space {
    nvars: usize,
    degree: usize,
    monos: Vec<[u8; MAX_VARS]>,
    // (i, j, k): coefficient i times coefficient j lands in k.
    mul: Vec<(u16, u16, u16)>,
    // deriv[var][k] = Some((source, factor)) with (∂_var f)_k = factor * f_source.
    deriv: Vec<Vec<Option<(usize, f64)>>>,
    // α! for each monomial.
    factorial: Vec<f64>,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space(nvars={}, degree={})", self.nvars, self.degree)
    }
}

fn mono_degree(m: &[u8; MAX_VARS]) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

impl Space {
    fn build(nvars: usize, degree: usize) -> Space {
        let mut monos = Vec::new();
        for total in 0..=degree {
            // lexicographic within a degree, first variable highest
            let mut level = Vec::new();
            for a in (0..=total).rev() {
                for b in (0..=(total - a)).rev() {
                    let c = total - a - b;
                    let m = [a as u8, b as u8, c as u8];
                    let ok = (0..MAX_VARS).all(|i| i < nvars || m[i] == 0);
                    if ok {
                        level.push(m);
                    }
                }
            }
            monos.extend(level);
        }
        let find = |m: &[u8; MAX_VARS]| monos.iter().position(|x| x == m);

        let mut mul = Vec::new();
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                let s = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                if mono_degree(&s) <= degree {
                    let k = find(&s).expect("monomial present");
                    mul.push((i as u16, j as u16, k as u16));
                }
            }
        }

        let mut deriv = Vec::with_capacity(nvars);
        for var in 0..nvars {
            let table = monos
                .iter()
                .map(|m| {
                    let mut up = *m;
                    up[var] += 1;
                    if mono_degree(&up) <= degree {
                        find(&up).map(|src| (src, up[var] as f64))
                    } else {
                        None
                    }
                })
                .collect();
            deriv.push(table);
        }

        let factorial = monos
            .iter()
            .map(|m| m.iter().map(|&e| (1..=e as u32).product::<u32>() as f64).product())
            .collect();

        Space {
            nvars,
            degree,
            monos,
            mul,
            deriv,
            factorial,
        }
    }

    /// The shared space for `nvars` variables truncated at `degree`.
    pub fn get(nvars: usize, degree: usize) -> &'static Space {
        assert!((1..=MAX_VARS).contains(&nvars), "jets support 1..=3 variables");
        assert!(degree <= MAX_DEGREE, "jet degree above {MAX_DEGREE}");
        static SPACES: [[OnceLock<Space>; MAX_DEGREE + 1]; MAX_VARS] = [
            [const { OnceLock::new() }; MAX_DEGREE + 1],
            [const { OnceLock::new() }; MAX_DEGREE + 1],
            [const { OnceLock::new() }; MAX_DEGREE + 1],
        ];
        SPACES[nvars - 1][degree].get_or_init(|| Space::build(nvars, degree))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    fn index_of(&self, alpha: &[usize]) -> Option<usize> {
        if alpha.len() > self.nvars {
            return None;
        }
        let mut m = [0u8; MAX_VARS];
        for (i, &a) in alpha.iter().enumerate() {
            m[i] = a as u8;
        }
        self.monos.iter().position(|x| *x == m)
    }
}

#[derive(Clone)]
pub struct Jet {
    space: &'static Space,
    order: usize,
    c: Vec<C64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("space", self.space)
            .field("order", &self.order)
            .field("value", &self.c[0])
            .finish()
    }
}

impl Jet {
    pub fn constant(space: &'static Space, c: C64) -> Jet {
        let mut coeffs = vec![C64::new(0.0, 0.0); space.len()];
        coeffs[0] = c;
        Jet {
            space,
            order: space.degree,
            c: coeffs,
        }
    }

    /// The coordinate function `x_var` expanded at `at`.
    pub fn variable(space: &'static Space, var: usize, at: C64) -> Jet {
        assert!(var < space.nvars);
        let mut j = Jet::constant(space, at);
        if space.degree >= 1 {
            j.c[1 + var] = C64::new(1.0, 0.0);
        }
        j
    }

    /// All coordinate functions of `space` at the base point `at`.
    pub fn variables(space: &'static Space, at: &[C64]) -> Vec<Jet> {
        (0..space.nvars).map(|i| Jet::variable(space, i, at[i])).collect()
    }

    /// Builds a jet from raw Taylor coefficients in the space's monomial order.
    pub fn from_coeffs(space: &'static Space, c: Vec<C64>) -> Jet {
        assert_eq!(c.len(), space.len());
        Jet {
            space,
            order: space.degree,
            c,
        }
    }

    pub fn space(&self) -> &'static Space {
        self.space
    }

    /// Order up to which the partials of this jet are exact.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }

    /// The partial derivative `∂^α f` at the base point.
    pub fn partial(&self, alpha: &[usize]) -> C64 {
        let total: usize = alpha.iter().sum();
        if total > self.order {
            return C64::new(f64::NAN, f64::NAN);
        }
        match self.space.index_of(alpha) {
            Some(k) => self.c[k] * self.space.factorial[k],
            None => C64::new(0.0, 0.0),
        }
    }

    /// First-order partial along `var`, as a value.
    pub fn d1(&self, var: usize) -> C64 {
        let mut alpha = [0usize; MAX_VARS];
        alpha[var] = 1;
        self.partial(&alpha[..self.space.nvars])
    }

    /// The partial derivative along `var` as a jet one order lower.
    pub fn d(&self, var: usize) -> Jet {
        debug_assert!(self.order >= 1, "differentiating an order-0 jet");
        let table = &self.space.deriv[var];
        let c = table
            .iter()
            .map(|e| match e {
                Some((src, f)) => self.c[*src] * *f,
                None => C64::new(0.0, 0.0),
            })
            .collect();
        Jet {
            space: self.space,
            order: self.order.saturating_sub(1),
            c,
        }
    }

    pub fn checked_d(&self, var: usize) -> Result<Jet, GeomError> {
        if self.order == 0 {
            return Err(GeomError::JetOrderInsufficient {
                needed: 1,
                available: 0,
            });
        }
        Ok(self.d(var))
    }

    /// Sums `Σ_k coeffs[k] δ^k` with `δ = self - value`; used by every
    /// elementary function.
    fn compose(&self, coeffs: &[C64]) -> Jet {
        let mut delta = self.clone();
        delta.c[0] = C64::new(0.0, 0.0);
        let mut out = Jet::constant(self.space, coeffs[0]);
        out.order = self.order;
        let mut power = Jet::constant(self.space, C64::new(1.0, 0.0));
        for ck in coeffs.iter().skip(1) {
            power = power.mul_ref(&delta);
            for (o, p) in out.c.iter_mut().zip(&power.c) {
                *o += ck * p;
            }
        }
        out
    }

    fn series_len(&self) -> usize {
        self.space.degree + 1
    }

    fn mul_ref(&self, rhs: &Jet) -> Jet {
        assert!(
            std::ptr::eq(self.space, rhs.space),
            "jets from different spaces"
        );
        let mut c = vec![C64::new(0.0, 0.0); self.space.len()];
        for &(i, j, k) in &self.space.mul {
            c[k as usize] += self.c[i as usize] * rhs.c[j as usize];
        }
        Jet {
            space: self.space,
            order: self.order.min(rhs.order),
            c,
        }
    }

    fn zip(&self, rhs: &Jet, f: impl Fn(C64, C64) -> C64) -> Jet {
        assert!(
            std::ptr::eq(self.space, rhs.space),
            "jets from different spaces"
        );
        Jet {
            space: self.space,
            order: self.order.min(rhs.order),
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn scale(mut self, k: C64) -> Jet {
        for x in &mut self.c {
            *x *= k;
        }
        self
    }

    /// Lowers the trusted order without touching the coefficients.
    pub fn with_order(mut self, order: usize) -> Jet {
        self.order = self.order.min(order);
        self
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.zip(&rhs, |a, b| a + b)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.zip(&rhs, |a, b| a - b)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_ref(&rhs)
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self.mul_ref(&rhs.recip())
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Add<C64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: C64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<C64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: C64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<C64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: C64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self + C64::new(rhs, 0.0)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self - C64::new(rhs, 0.0)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale(C64::new(1.0 / rhs, 0.0))
    }
}

impl Scalar for Jet {
    fn constant_like(&self, c: C64) -> Self {
        Jet::constant(self.space, c)
    }

    fn value(&self) -> C64 {
        self.c[0]
    }

    fn sin(&self) -> Self {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        let cycle = [s, c, -s, -c];
        let coeffs = taylor_cycle(&cycle, self.series_len());
        self.compose(&coeffs)
    }

    fn cos(&self) -> Self {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        let cycle = [c, -s, -c, s];
        let coeffs = taylor_cycle(&cycle, self.series_len());
        self.compose(&coeffs)
    }

    fn sinh(&self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        let coeffs = taylor_cycle(&[s, c], self.series_len());
        self.compose(&coeffs)
    }

    fn cosh(&self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        let coeffs = taylor_cycle(&[c, s], self.series_len());
        self.compose(&coeffs)
    }

    fn exp(&self) -> Self {
        let e = self.c[0].exp();
        let coeffs = taylor_cycle(&[e], self.series_len());
        self.compose(&coeffs)
    }

    fn ln(&self) -> Self {
        let a = self.c[0];
        let mut coeffs = vec![a.ln()];
        let mut inv_pow = C64::new(1.0, 0.0);
        for k in 1..self.series_len() {
            inv_pow /= a;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            coeffs.push(inv_pow * (sign / k as f64));
        }
        self.compose(&coeffs)
    }

    fn sqrt(&self) -> Self {
        let a = self.c[0];
        let root = a.sqrt();
        let mut coeffs = Vec::with_capacity(self.series_len());
        let mut binom = 1.0;
        let mut inv_pow = C64::new(1.0, 0.0);
        for k in 0..self.series_len() {
            if k > 0 {
                binom *= (0.5 - (k as f64 - 1.0)) / k as f64;
                inv_pow /= a;
            }
            coeffs.push(root * inv_pow * binom);
        }
        self.compose(&coeffs)
    }

    fn recip(&self) -> Self {
        let a = self.c[0];
        let mut coeffs = Vec::with_capacity(self.series_len());
        let mut term = C64::new(1.0, 0.0) / a;
        for _ in 0..self.series_len() {
            coeffs.push(term);
            term = -term / a;
        }
        self.compose(&coeffs)
    }
}

// Taylor coefficients f^(k)(a)/k! for a function whose derivatives cycle.
fn taylor_cycle(cycle: &[C64], len: usize) -> Vec<C64> {
    let mut fact = 1.0;
    (0..len)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            cycle[k % cycle.len()] / fact
        })
        .collect()
}
