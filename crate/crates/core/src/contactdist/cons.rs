//! The symmetric-tensor condition for isometric correspondence of leaves.
//!
//! With `P = N₀mᵀ/(mᵀN₀)` and `Z = d(V + x₀)`, the residual is
//! `α ⊙ β` where `α = Zᵀ(I − mN₀ᵀ/(mᵀN₀))` and
//! `β = dP ∂_wV − ∂_wP Z + 2N₀ᵀ[∂_wV × Z] (dP ∧ Z)/N₀ᵀ[Z ×∧ Z]`,
//! all vector-valued 1-forms in `du, dv`.

use super::Local;
use crate::complex3::{CVec3, Mat3};
use crate::error::{GeomError, Result};
use crate::forms::SymTensor2;
use crate::jet::Jet;
use crate::scalar::{Scalar, C64};

pub const CONS_TOL: f64 = 1e-10;

pub fn cons_residual(local: &Local) -> Result<SymTensor2> {
    let n = &local.seed.normal;
    let m = &local.m;
    let mn = m.dot(n);
    let scale = m.value().max_abs();
    if mn.value().norm() <= CONS_TOL * scale {
        return Err(GeomError::NormalComponentVanishes {
            value: mn.value().norm(),
        });
    }
    let z: Vec<CVec3> = (0..2).map(|i| local.dp(i).value()).collect();
    let nv = n.value();
    let area = nv.dot(&z[0].cross(&z[1]));
    let zscale = z[0].max_abs() * z[1].max_abs();
    if area.norm() <= CONS_TOL * zscale.max(1e-300) {
        return Err(GeomError::LeafAreaVanishes { value: area.norm() });
    }

    let p: Mat3<Jet> = Mat3::outer(n, m).scale(&mn.recip());
    let dp: Vec<crate::complex3::CMat3> = (0..3).map(|i| p.map(|c| c.d1(i))).collect();
    let dwv = local.dw_v().value();
    let mv = m.value();
    let mn0 = mn.value();

    // α_i = Z_iᵀ(I − mN₀ᵀ/(mᵀN₀)) = Z_i − (Z_i·m) N₀/(mᵀN₀)
    let alpha: Vec<CVec3> = z
        .iter()
        .map(|zi| zi.clone() - nv.scale_c(zi.dot(&mv) / mn0))
        .collect();
    let dpz = dp[0].mul_vec(&z[1]) - dp[1].mul_vec(&z[0]);
    let beta: Vec<CVec3> = (0..2)
        .map(|i| {
            // N₀ᵀ[Z ×∧ Z] = 2 N₀·(Z_u × Z_v) cancels the factor 2
            let k = nv.dot(&dwv.cross(&z[i])) / area;
            dp[i].mul_vec(&dwv) - dp[2].mul_vec(&z[i]) + dpz.scale_c(k)
        })
        .collect();
    let mut out = SymTensor2::zeros(2);
    for i in 0..2 {
        for j in i..2 {
            let s: C64 = (alpha[i].dot(&beta[j]) + alpha[j].dot(&beta[i])) * 0.5;
            out.set(i, j, s);
        }
    }
    Ok(out)
}
