//! Seeded random instances for the algebraic suites.

use crate::complex3::{CMat3, CVec3, Mat3, Vec3};
use crate::forms::VForm1;
use crate::scalar::{Scalar, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Entries uniform in the unit square of ℂ.
pub fn c64(rng: &mut SampleRng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn cvec3(rng: &mut SampleRng) -> CVec3 {
    Vec3([c64(rng), c64(rng), c64(rng)])
}

pub fn vform1(rng: &mut SampleRng, arity: usize) -> VForm1<CVec3> {
    VForm1::new((0..arity).map(|_| cvec3(rng)).collect())
}

/// Unit vector in the bilinear metric; `None` when `a` is (nearly) isotropic.
fn normalize(a: &CVec3) -> Option<CVec3> {
    let n = a.norm_sq();
    (n.norm() > 1e-3).then(|| a.scale_c(n.sqrt().recip()))
}

/// A complex rotation from a bilinear Gram–Schmidt frame `[e₁ e₂ e₁×e₂]`.
pub fn rotation(rng: &mut SampleRng) -> CMat3 {
    loop {
        let Some(e1) = normalize(&cvec3(rng)) else { continue };
        let b = cvec3(rng);
        let Some(e2) = normalize(&(b.clone() - e1.scale_c(b.dot(&e1)))) else {
            continue;
        };
        let e3 = e1.cross(&e2);
        return Mat3::from_columns(&e1, &e2, &e3);
    }
}
