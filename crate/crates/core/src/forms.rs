//! Pointwise differential forms in two or three parameters.
//!
//! A [`VForm1`] holds the coefficients of `c_u du + c_v dv (+ c_w dw)`; a
//! [`VForm2`] holds one coefficient per basis 2-form in the fixed orientation
//! `du∧dv, du∧dw, dv∧dw`. Coefficients are scalars, vectors, or jets of
//! either, so the same types serve point values and fields.
//!
//! Conventions:
//! - `(a ∧ b)_{ij} = a_i b_j − a_j b_i`
//! - `(ω₁ ×∧ ω₂)_{ij} = ω₁_i × ω₂_j − ω₁_j × ω₂_i`, which is symmetric in the
//!   two forms and gives `aᵀω ∧ bᵀω = ½ (a × b)ᵀ(ω ×∧ ω)`.
//! - `a ⊙ b = (ab + ba)/2`, so `du ⊙ dv` has `s₁₂ = s₂₁ = ½`.

use crate::complex3::Vec3;
use crate::error::{GeomError, Result};
use crate::jet::Jet;
use crate::scalar::{Scalar, C64};

/// Basis 2-forms for the given arity, in storage order.
pub fn basis_pairs(arity: usize) -> &'static [(usize, usize)] {
    match arity {
        2 => &[(0, 1)],
        3 => &[(0, 1), (0, 2), (1, 2)],
        _ => &[],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VForm1<T> {
    pub coeffs: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VForm2<T> {
    arity: usize,
    pub coeffs: Vec<T>,
}

impl<T: Clone> VForm1<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(
            coeffs.len() == 2 || coeffs.len() == 3,
            "1-forms live in 2 or 3 parameters"
        );
        VForm1 { coeffs }
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> VForm1<U> {
        VForm1::new(self.coeffs.iter().map(f).collect())
    }

    /// Restriction to the first two parameters (drops the `dw` part).
    pub fn uv(&self) -> VForm1<T> {
        VForm1::new(self.coeffs[..2].to_vec())
    }
}

impl<T: Clone> VForm2<T> {
    pub fn new(arity: usize, coeffs: Vec<T>) -> Self {
        assert_eq!(coeffs.len(), basis_pairs(arity).len());
        VForm2 { arity, coeffs }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> VForm2<U> {
        VForm2::new(self.arity, self.coeffs.iter().map(f).collect())
    }

    /// The `du∧dv` coefficient.
    pub fn uv(&self) -> &T {
        &self.coeffs[0]
    }
}

fn check_arity(a: usize, b: usize) -> Result<usize> {
    if a != b {
        return Err(GeomError::ArityMismatch { left: a, right: b });
    }
    Ok(a)
}

/// Pairing of coefficients over every basis 2-form: `f(a_i, b_j) − f(a_j, b_i)`.
fn pair_forms<A: Clone, B: Clone, T: Clone>(
    a: &VForm1<A>,
    b: &VForm1<B>,
    f: impl Fn(&A, &B) -> T,
    sub: impl Fn(T, T) -> T,
) -> Result<VForm2<T>> {
    let n = check_arity(a.arity(), b.arity())?;
    let coeffs = basis_pairs(n)
        .iter()
        .map(|&(i, j)| sub(f(&a.coeffs[i], &b.coeffs[j]), f(&a.coeffs[j], &b.coeffs[i])))
        .collect();
    Ok(VForm2::new(n, coeffs))
}

impl<S: Scalar> VForm1<S> {
    pub fn add(&self, rhs: &Self) -> Self {
        VForm1::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        VForm1::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|c| c.clone() * k.clone())
    }

    pub fn value(&self) -> VForm1<C64> {
        self.map(|c| c.value())
    }

    /// Coefficient-wise vector multiple: `(c_i) ↦ (c_i v)`.
    pub fn times_vec(&self, v: &Vec3<S>) -> VForm1<Vec3<S>> {
        self.map(|c| v.scale(c))
    }
}

impl<S: Scalar> VForm1<Vec3<S>> {
    pub fn add(&self, rhs: &Self) -> Self {
        VForm1::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        VForm1::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|c| c.scale(k))
    }

    pub fn value(&self) -> VForm1<Vec3<C64>> {
        self.map(|c| c.value())
    }

    /// `aᵀω` as a scalar 1-form.
    pub fn dot_left(&self, a: &Vec3<S>) -> VForm1<S> {
        self.map(|c| a.dot(c))
    }

    /// `ω × a` coefficient-wise.
    pub fn cross_right(&self, a: &Vec3<S>) -> Self {
        self.map(|c| c.cross(a))
    }

    /// `a × ω` coefficient-wise.
    pub fn cross_left(&self, a: &Vec3<S>) -> Self {
        self.map(|c| a.cross(c))
    }
}

impl<S: Scalar> VForm2<S> {
    pub fn value(&self) -> VForm2<C64> {
        self.map(|c| c.value())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        VForm2::new(
            self.arity,
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn add(&self, rhs: &Self) -> Self {
        VForm2::new(
            self.arity,
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }
}

impl<S: Scalar> VForm2<Vec3<S>> {
    pub fn value(&self) -> VForm2<Vec3<C64>> {
        self.map(|c| c.value())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        VForm2::new(
            self.arity,
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        VForm2::new(
            self.arity,
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|c| c.scale(k))
    }

    pub fn dot_left(&self, a: &Vec3<S>) -> VForm2<S> {
        self.map(|c| a.dot(c))
    }
}

impl VForm1<C64> {
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl VForm1<Vec3<C64>> {
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }
}

impl VForm2<C64> {
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl VForm2<Vec3<C64>> {
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }
}

/// Scalar wedge product `a ∧ b`.
pub fn wedge<S: Scalar>(a: &VForm1<S>, b: &VForm1<S>) -> Result<VForm2<S>> {
    pair_forms(a, b, |x, y| x.clone() * y.clone(), |p, q| p - q)
}

/// Cross-wedge `ω₁ ×∧ ω₂` of vector-valued 1-forms.
pub fn cross_wedge<S: Scalar>(
    w1: &VForm1<Vec3<S>>,
    w2: &VForm1<Vec3<S>>,
) -> Result<VForm2<Vec3<S>>> {
    pair_forms(w1, w2, |x, y| x.cross(y), |p, q| p - q)
}

/// `aᵀ ∧ b` for vector-valued 1-forms: `(a_i·b_j − a_j·b_i)`.
pub fn dot_wedge<S: Scalar>(a: &VForm1<Vec3<S>>, b: &VForm1<Vec3<S>>) -> Result<VForm2<S>> {
    pair_forms(a, b, |x, y| x.dot(y), |p, q| p - q)
}

/// Symmetric tensor `Σ s_ij du_i du_j` with `s_ij = s_ji`, stored upper-triangular.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor2 {
    arity: usize,
    entries: Vec<C64>,
}

impl SymTensor2 {
    pub fn zeros(arity: usize) -> Self {
        SymTensor2 {
            arity,
            entries: vec![C64::new(0.0, 0.0); arity * (arity + 1) / 2],
        }
    }

    /// From the full matrix, symmetrizing.
    pub fn from_matrix(m: &[Vec<C64>]) -> Self {
        let n = m.len();
        let mut t = SymTensor2::zeros(n);
        for i in 0..n {
            for j in i..n {
                t.set(i, j, (m[i][j] + m[j][i]) * 0.5);
            }
        }
        t
    }

    /// 2-parameter tensor from `s11, s12, s22`.
    pub fn new2(s11: C64, s12: C64, s22: C64) -> Self {
        SymTensor2 {
            arity: 2,
            entries: vec![s11, s12, s22],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[self.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, x: C64) {
        let k = self.index(i, j);
        self.entries[k] = x;
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // offset of row i in the packed upper triangle
        let row_start: usize = (0..i).map(|r| self.arity - r).sum();
        row_start + (j - i)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, rhs: &SymTensor2) -> SymTensor2 {
        SymTensor2 {
            arity: self.arity,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, rhs: &SymTensor2) -> SymTensor2 {
        SymTensor2 {
            arity: self.arity,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, k: C64) -> SymTensor2 {
        SymTensor2 {
            arity: self.arity,
            entries: self.entries.iter().map(|a| a * k).collect(),
        }
    }

    /// Determinant of the 2×2 tensor.
    pub fn det2(&self) -> C64 {
        self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(0, 1)
    }
}

/// Symmetric product `a ⊙ b` of scalar 1-forms.
pub fn sym_prod(a: &VForm1<C64>, b: &VForm1<C64>) -> Result<SymTensor2> {
    let n = check_arity(a.arity(), b.arity())?;
    let mut t = SymTensor2::zeros(n);
    for i in 0..n {
        for j in i..n {
            t.set(i, j, (a.coeffs[i] * b.coeffs[j] + a.coeffs[j] * b.coeffs[i]) * 0.5);
        }
    }
    Ok(t)
}

/// `aᵀ ⊙ b` for vector-valued 1-forms.
pub fn dot_sym(a: &VForm1<Vec3<C64>>, b: &VForm1<Vec3<C64>>) -> Result<SymTensor2> {
    let n = check_arity(a.arity(), b.arity())?;
    let mut t = SymTensor2::zeros(n);
    for i in 0..n {
        for j in i..n {
            t.set(
                i,
                j,
                (a.coeffs[i].dot(&b.coeffs[j]) + a.coeffs[j].dot(&b.coeffs[i])) * 0.5,
            );
        }
    }
    Ok(t)
}

/// `aᵀω₁ ∧ bᵀω₂ − [(a×b)ᵀ(ω₁ ×∧ ω₂) + bᵀω₁ ∧ aᵀω₂]`, identically zero.
pub fn fund_identity_residual(
    a: &Vec3<C64>,
    b: &Vec3<C64>,
    w1: &VForm1<Vec3<C64>>,
    w2: &VForm1<Vec3<C64>>,
) -> Result<VForm2<C64>> {
    let lhs = wedge(&w1.dot_left(a), &w2.dot_left(b))?;
    let cw = cross_wedge(w1, w2)?.dot_left(&a.cross(b));
    let swapped = wedge(&w1.dot_left(b), &w2.dot_left(a))?;
    Ok(lhs.sub(&cw.add(&swapped)))
}

/// Coefficients that can be differentiated as fields.
pub trait FieldCoeff: Clone {
    fn partial(&self, var: usize) -> Self;
    fn order(&self) -> usize;
    fn minus(&self, rhs: &Self) -> Self;
}

impl FieldCoeff for Jet {
    fn partial(&self, var: usize) -> Self {
        self.d(var)
    }
    fn order(&self) -> usize {
        Jet::order(self)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.clone() - rhs.clone()
    }
}

impl FieldCoeff for Vec3<Jet> {
    fn partial(&self, var: usize) -> Self {
        self.map(|c| c.d(var))
    }
    fn order(&self) -> usize {
        self.0.iter().map(|c| c.order()).min().unwrap_or(0)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.clone() - rhs.clone()
    }
}

/// Exterior derivative of a 1-form field: `(dθ)_{ij} = ∂_i θ_j − ∂_j θ_i`.
pub fn exterior_d<T: FieldCoeff>(field: &VForm1<T>) -> Result<VForm2<T>> {
    let available = field.coeffs.iter().map(|c| c.order()).min().unwrap_or(0);
    if available == 0 {
        return Err(GeomError::JetOrderInsufficient {
            needed: 1,
            available,
        });
    }
    let n = field.arity();
    let coeffs = basis_pairs(n)
        .iter()
        .map(|&(i, j)| field.coeffs[j].partial(i).minus(&field.coeffs[i].partial(j)))
        .collect();
    Ok(VForm2::new(n, coeffs))
}

/// The differential `df` of a scalar field in all parameters of its space.
pub fn differential(f: &Jet) -> VForm1<Jet> {
    VForm1::new((0..f.space().nvars()).map(|i| f.d(i)).collect())
}

/// The differential of a vector field in all parameters of its space.
pub fn differential_vec(f: &Vec3<Jet>) -> VForm1<Vec3<Jet>> {
    let n = f.0[0].space().nvars();
    VForm1::new((0..n).map(|i| f.map(|c| c.d(i))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex3::CVec3;
    use crate::jet::Space;
    use crate::scalar::re;
    use proptest::prelude::*;

    fn sf(c: &[f64]) -> VForm1<C64> {
        VForm1::new(c.iter().map(|&x| re(x)).collect())
    }

    #[test]
    fn wedge_examples() {
        let du = sf(&[1.0, 0.0]);
        let dv = sf(&[0.0, 1.0]);
        assert_eq!(*wedge(&du, &dv).unwrap().uv(), re(1.0));
        let a = sf(&[2.0, 3.0]);
        assert_eq!(*wedge(&a, &a).unwrap().uv(), re(0.0));
        let b = sf(&[5.0, 7.0]);
        assert_eq!(*wedge(&a, &b).unwrap().uv(), re(-1.0));
        assert_eq!(
            wedge(&a, &b).unwrap().coeffs[0],
            -wedge(&b, &a).unwrap().coeffs[0]
        );
    }

    #[test]
    fn wedge_arity_mismatch() {
        let a = sf(&[1.0, 0.0]);
        let b = sf(&[1.0, 0.0, 2.0]);
        assert_eq!(
            wedge(&a, &b),
            Err(GeomError::ArityMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn wedge_three_parameters() {
        let a = sf(&[1.0, 2.0, 3.0]);
        let b = sf(&[4.0, 5.0, 6.0]);
        let w = wedge(&a, &b).unwrap();
        // du∧dv, du∧dw, dv∧dw
        assert_eq!(w.coeffs, vec![re(-3.0), re(-6.0), re(-3.0)]);
    }

    #[test]
    fn cross_wedge_examples() {
        let w = VForm1::new(vec![CVec3::basis(0), CVec3::basis(1)]);
        // ω ×∧ ω = 2 ω_u × ω_v
        let cw = cross_wedge(&w, &w).unwrap();
        assert_eq!(*cw.uv(), CVec3::basis(2).scale_c(re(2.0)));
        let par = VForm1::new(vec![CVec3::basis(0), CVec3::basis(0)]);
        assert_eq!(*cross_wedge(&par, &par).unwrap().uv(), CVec3::zero());
        // ½ (e1×e2)ᵀ(ω×∧ω) = e1ᵀω ∧ e2ᵀω = 1
        let half = cw.dot_left(&CVec3::basis(2)).coeffs[0] * 0.5;
        assert_eq!(half, re(1.0));
    }

    #[test]
    fn sym_prod_examples() {
        let du = sf(&[1.0, 0.0]);
        let dv = sf(&[0.0, 1.0]);
        let t = sym_prod(&du, &dv).unwrap();
        assert_eq!(t.get(0, 1), re(0.5));
        assert_eq!(t.get(1, 0), re(0.5));
        assert_eq!(t.get(0, 0), re(0.0));
        assert_eq!(sym_prod(&du, &du).unwrap().get(0, 0), re(1.0));
        let t = sym_prod(&sf(&[2.0, 0.0]), &sf(&[0.0, 3.0])).unwrap();
        assert_eq!(t.get(0, 1), re(3.0));
    }

    #[test]
    fn sym_tensor_indexing_three_params() {
        let mut t = SymTensor2::zeros(3);
        let mut k = 0.0;
        for i in 0..3 {
            for j in i..3 {
                k += 1.0;
                t.set(i, j, re(k));
            }
        }
        assert_eq!(t.get(0, 0), re(1.0));
        assert_eq!(t.get(2, 0), re(3.0));
        assert_eq!(t.get(1, 1), re(4.0));
        assert_eq!(t.get(2, 1), re(5.0));
        assert_eq!(t.get(2, 2), re(6.0));
    }

    #[test]
    fn fund_identity_basis_case() {
        let w1 = VForm1::new(vec![CVec3::basis(0), CVec3::zero()]);
        let w2 = VForm1::new(vec![CVec3::zero(), CVec3::basis(1)]);
        let r = fund_identity_residual(&CVec3::basis(0), &CVec3::basis(1), &w1, &w2).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn exterior_d_examples() {
        let s = Space::get(2, 2);
        let v = Jet::variables(s, &[re(0.3), re(-0.2)]);
        // d(u dv) = du∧dv
        let f = VForm1::new(vec![v[0].zero_like(), v[0].clone()]);
        assert_eq!(exterior_d(&f).unwrap().uv().value(), re(1.0));
        // d(du) = 0
        let g = VForm1::new(vec![v[0].one_like(), v[0].zero_like()]);
        assert_eq!(exterior_d(&g).unwrap().uv().value(), re(0.0));
    }

    #[test]
    fn exterior_d_needs_order() {
        let s = Space::get(2, 1);
        let v = Jet::variables(s, &[re(0.3), re(-0.2)]);
        let f = VForm1::new(vec![v[0].d(0), v[1].d(0)]);
        assert!(matches!(
            exterior_d(&f),
            Err(GeomError::JetOrderInsufficient { .. })
        ));
    }

    fn cvec() -> impl Strategy<Value = CVec3> {
        prop::array::uniform6(-1.5f64..1.5).prop_map(|a| {
            Vec3([
                C64::new(a[0], a[1]),
                C64::new(a[2], a[3]),
                C64::new(a[4], a[5]),
            ])
        })
    }

    fn vform(arity: usize) -> impl Strategy<Value = VForm1<CVec3>> {
        prop::collection::vec(cvec(), arity).prop_map(VForm1::new)
    }

    proptest! {
        #[test]
        fn fund_identity_vanishes(a in cvec(), b in cvec(), w1 in vform(3), w2 in vform(3)) {
            let r = fund_identity_residual(&a, &b, &w1, &w2).unwrap();
            prop_assert!(r.max_abs() <= 1e-12);
        }

        #[test]
        fn cross_wedge_symmetric(w1 in vform(2), w2 in vform(2)) {
            prop_assert_eq!(cross_wedge(&w1, &w2).unwrap(), cross_wedge(&w2, &w1).unwrap());
        }

        #[test]
        fn d_of_d_vanishes(c in prop::array::uniform10(-2.0f64..2.0), p in prop::array::uniform3(-1.0f64..1.0)) {
            let s = Space::get(3, 3);
            let x = Jet::variables(s, &[re(p[0]), re(p[1]), re(p[2])]);
            // random cubic polynomial
            let f = x[0].clone() * c[0] + x[1].clone() * x[2].clone() * c[1]
                + x[0].clone() * x[0].clone() * x[1].clone() * c[2]
                + x[2].clone() * x[2].clone() * x[2].clone() * c[3]
                + x[0].clone() * x[1].clone() * x[2].clone() * c[4]
                + x[1].clone() * x[1].clone() * c[5] + c[6];
            let dd = exterior_d(&differential(&f)).unwrap();
            prop_assert!(dd.value().max_abs() <= 1e-10);
        }
    }
}
