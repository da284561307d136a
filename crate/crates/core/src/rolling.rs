//! Rolling of a surface `x₀` onto an isometric surface `x`, the connection
//! form `ω`, and residuals of its structure equations.
//!
//! Everything is computed pointwise from jets of the two parametrizations;
//! `dR` comes from differentiating the frame formula, never from differencing
//! neighbouring grid points.

use crate::complex3::{CMat3, CVec3, Mat3, Vec3};
use crate::error::{GeomError, Result};
use crate::forms::{cross_wedge, dot_sym, dot_wedge, exterior_d, SymTensor2, VForm1, VForm2};
use crate::jet::{Jet, Space};
use crate::scalar::{re, Scalar, C64};
use crate::surfgeo::{frame_jets, FrameJets, SurfaceFrame, SurfacePatch};

/// Jet degree used for pair evaluations: enough for `dω` at the point.
pub const PAIR_DEGREE: usize = 3;

/// Relative tolerance on `I(x) − I(x₀)` before a pair is declared non-isometric.
pub const ISOMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct RollingState {
    pub u: f64,
    pub v: f64,
    pub r: CMat3,
    pub t: CVec3,
    pub omega: VForm1<CVec3>,
    pub omega_prime: VForm1<CVec3>,
    /// Set when the normal column had to be flipped to reach `det R = 1`.
    pub flipped: bool,
    /// `max |I(x) − I(x₀)|`.
    pub isometry_defect: f64,
    /// `max |R dx₀ − dx|`.
    pub transport_defect: f64,
    /// `max |dt + dR x₀|`.
    pub translation_defect: f64,
}

/// `R` and `t` as jets, together with both frames.
#[derive(Clone, Debug)]
pub struct RollingJets {
    pub x0: FrameJets,
    pub x: FrameJets,
    pub r: Mat3<Jet>,
    pub t: Vec3<Jet>,
    pub flipped: bool,
}

fn first_form_defect(a: &FrameJets, b: &FrameJets) -> (f64, f64) {
    let g = |f: &FrameJets| {
        let (xu, xv) = (f.xu.value(), f.xv.value());
        [xu.dot(&xu), xu.dot(&xv), xv.dot(&xv)]
    };
    let (ga, gb) = (g(a), g(b));
    let diff = ga.iter().zip(&gb).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    let scale = ga.iter().chain(&gb).map(|p| p.norm()).fold(0.0, f64::max);
    (diff, scale)
}

/// `R = [x_u x_v N][x₀_u x₀_v N₀]⁻¹` and `t = x − R x₀` as jets at `at`.
pub fn rolling_jets(
    x0: &SurfacePatch,
    x: &SurfacePatch,
    space: &'static Space,
    at: &[C64],
    tol: f64,
) -> Result<RollingJets> {
    let f0 = frame_jets(x0, space, at)?;
    let f = frame_jets(x, space, at)?;
    let (deviation, scale) = first_form_defect(&f0, &f);
    if deviation > tol * scale.max(1.0) {
        return Err(GeomError::IsometryViolation { deviation });
    }
    let target = Mat3::from_columns(&f.xu, &f.xv, &f.normal);
    let mut source = Mat3::from_columns(&f0.xu, &f0.xv, &f0.normal);
    let mut r = target.mul_mat(&source.inverse());
    let mut flipped = false;
    if (r.det().value() + re(1.0)).norm() < 0.5 {
        // the principal root picked opposite orientations; flip N₀
        let flipped_n = -f0.normal.clone();
        source = Mat3::from_columns(&f0.xu, &f0.xv, &flipped_n);
        r = target.mul_mat(&source.inverse());
        flipped = true;
    }
    let t = f.x.clone() - r.mul_vec(&f0.x);
    Ok(RollingJets {
        x0: f0,
        x: f,
        r,
        t,
        flipped,
    })
}

impl RollingJets {
    /// `R⁻¹ ∂_i R` for each parameter, as jets one order lower than `R`.
    pub fn maurer_cartan(&self) -> Vec<Mat3<Jet>> {
        let rt = self.r.transpose();
        (0..2).map(|i| rt.mul_mat(&self.r.map(|c| c.d(i)))).collect()
    }

    /// `ω = N₀ × (R⁻¹dR N₀)` as a field.
    pub fn omega(&self) -> VForm1<Vec3<Jet>> {
        omega_from_rotation(&self.r, &self.x0.normal)
    }

    /// Connection form of the rolling with the other face,
    /// from `R′ = R(I − 2N₀N₀ᵀ)`.
    pub fn omega_prime_via_reflection(&self) -> VForm1<Vec3<Jet>> {
        let n = &self.x0.normal;
        let id = Mat3::identity_like(&n.0[0]);
        let two = n.0[0].constant_like(re(2.0));
        let reflect = id - Mat3::outer(n, n).scale(&two);
        omega_from_rotation(&self.r.mul_mat(&reflect), n)
    }
}

fn omega_from_rotation(r: &Mat3<Jet>, n0: &Vec3<Jet>) -> VForm1<Vec3<Jet>> {
    let rinv = r.inverse();
    VForm1::new(
        (0..2)
            .map(|i| {
                let dr = r.map(|c| c.d(i));
                n0.cross(&rinv.mul_mat(&dr).mul_vec(n0))
            })
            .collect(),
    )
}

/// Rolling of `x₀` onto `x` at `(u, v)`.
pub fn rolling_map(x0: &SurfacePatch, x: &SurfacePatch, u: f64, v: f64) -> Result<RollingState> {
    rolling_map_with_tol(x0, x, u, v, ISOMETRY_TOL)
}

pub fn rolling_map_with_tol(
    x0: &SurfacePatch,
    x: &SurfacePatch,
    u: f64,
    v: f64,
    tol: f64,
) -> Result<RollingState> {
    let space = Space::get(2, 2);
    let rj = rolling_jets(x0, x, space, &[re(u), re(v)], tol)?;
    let r = rj.r.value();
    let (isometry_defect, _) = first_form_defect(&rj.x0, &rj.x);
    let mut transport_defect: f64 = 0.0;
    let mut translation_defect: f64 = 0.0;
    for i in 0..2 {
        let dx0 = rj.x0.x.map(|c| c.d1(i));
        let dx = rj.x.x.map(|c| c.d1(i));
        transport_defect = transport_defect.max((r.mul_vec(&dx0) - dx).max_abs());
        let dt = rj.t.map(|c| c.d1(i));
        let dr = rj.r.map(|c| c.d1(i));
        translation_defect =
            translation_defect.max((dt + dr.mul_vec(&rj.x0.x.value())).max_abs());
    }
    let omega = rj.omega().map(|w| w.value());
    let n0 = rj.x0.normal.value();
    let dn0 = rj.x0.dn().map(|w| w.value());
    let omega_prime = other_face_form(&omega, &n0, &dn0);
    Ok(RollingState {
        u,
        v,
        r,
        t: rj.t.value(),
        omega,
        omega_prime,
        flipped: rj.flipped,
        isometry_defect,
        transport_defect,
        translation_defect,
    })
}

impl RollingState {
    /// `(|RᵀR − I|, |det R − 1|)`.
    pub fn rotation_defects(&self) -> (f64, f64) {
        self.r.rotation_defects()
    }
}

/// Difference of second fundamental forms `s_ij = N·∂_ij x − N₀·∂_ij x₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondFormDifference {
    pub s: SymTensor2,
}

impl SecondFormDifference {
    pub fn between(f0: &SurfaceFrame, f: &SurfaceFrame) -> Self {
        SecondFormDifference {
            s: f.second.sub(&f0.second),
        }
    }

    /// `ω` from `s`: `ω_u = (s₁₂x₀_u − s₁₁x₀_v)/|n|`, `ω_v = (s₂₂x₀_u − s₂₁x₀_v)/|n|`.
    pub fn omega(&self, f0: &SurfaceFrame) -> VForm1<CVec3> {
        omega_from_s(&self.s, f0)
    }
}

pub fn omega_from_s(s: &SymTensor2, f0: &SurfaceFrame) -> VForm1<CVec3> {
    let inv = C64::new(1.0, 0.0) / f0.area;
    let col = |a: C64, b: C64| (f0.xu.scale_c(a) - f0.xv.scale_c(b)).scale_c(inv);
    VForm1::new(vec![
        col(s.get(0, 1), s.get(0, 0)),
        col(s.get(1, 1), s.get(0, 1)),
    ])
}

/// Both computations of `ω` at a point: from `R⁻¹dR` and from `s`.
pub fn connection_form(
    x0: &SurfacePatch,
    x: &SurfacePatch,
    u: f64,
    v: f64,
) -> Result<(VForm1<CVec3>, VForm1<CVec3>)> {
    let space = Space::get(2, 2);
    let rj = rolling_jets(x0, x, space, &[re(u), re(v)], ISOMETRY_TOL)?;
    let by_rotation = rj.omega().map(|w| w.value());
    let f0 = SurfaceFrame::from_jets(&rj.x0, u, v);
    let f = SurfaceFrame::from_jets(&rj.x, u, v);
    let by_s = SecondFormDifference::between(&f0, &f).omega(&f0);
    Ok((by_rotation, by_s))
}

/// `max_i |R⁻¹∂_iR − α(ω_i)|`.
pub fn maurer_cartan_defect(rj: &RollingJets) -> f64 {
    let omega = rj.omega().map(|w| w.value());
    rj.maurer_cartan()
        .iter()
        .zip(&omega.coeffs)
        .map(|(m, w)| m.value().max_abs_diff(&crate::complex3::alpha(w)))
        .fold(0.0, f64::max)
}

/// The pair's `ω` as a field around `(u, v)`, exact to first order.
pub fn pair_omega_field(
    x0: &SurfacePatch,
    x: &SurfacePatch,
    u: f64,
    v: f64,
) -> Result<(VForm1<Vec3<Jet>>, FrameJets)> {
    let space = Space::get(2, PAIR_DEGREE);
    let rj = rolling_jets(x0, x, space, &[re(u), re(v)], ISOMETRY_TOL)?;
    Ok((rj.omega(), rj.x0))
}

#[derive(Clone, Debug)]
pub struct Flatness {
    /// `dω + ½ ω ×∧ ω`
    pub r1: VForm2<CVec3>,
    /// `ω ×∧ dx₀`
    pub r2: VForm2<CVec3>,
    /// `N₀ᵀω`
    pub r3: VForm1<C64>,
}

impl Flatness {
    pub fn max_abs(&self) -> [f64; 3] {
        [self.r1.max_abs(), self.r2.max_abs(), self.r3.max_abs()]
    }
}

/// Structure-equation residuals of an `ω` field over the frame of `x₀`.
pub fn flatness_residuals(omega: &VForm1<Vec3<Jet>>, x0: &FrameJets) -> Result<Flatness> {
    let d_omega = exterior_d(omega)?.map(|c| c.value());
    let w = omega.map(|c| c.value());
    let dx0 = x0.dx().uv().map(|c| c.value());
    let half = re(0.5);
    let r1 = VForm2::new(
        2,
        vec![d_omega.uv().clone() + cross_wedge(&w, &w)?.uv().scale_c(half)],
    );
    let r2 = cross_wedge(&w, &dx0)?;
    let n0 = x0.normal.value();
    let r3 = w.dot_left(&n0);
    Ok(Flatness { r1, r2, r3 })
}

/// `½ ω ×∧ ω − (dN₀ᵀ ∧ ω) N₀`.
pub fn omom_residual(omega: &VForm1<CVec3>, n0: &CVec3, dn0: &VForm1<CVec3>) -> Result<VForm2<CVec3>> {
    let lhs = cross_wedge(omega, omega)?.scale(&re(0.5));
    let k = dot_wedge(dn0, omega)?;
    let rhs = VForm2::new(lhs.arity(), k.coeffs.iter().map(|c| n0.scale_c(*c)).collect());
    Ok(lhs.sub(&rhs))
}

/// `ω′ = −ω − 2 N₀ × dN₀`.
pub fn other_face_form<S: Scalar>(
    omega: &VForm1<Vec3<S>>,
    n0: &Vec3<S>,
    dn0: &VForm1<Vec3<S>>,
) -> VForm1<Vec3<S>> {
    VForm1::new(
        omega
            .coeffs
            .iter()
            .zip(&dn0.coeffs)
            .map(|(w, dn)| -(w.clone() + n0.cross(dn).scale_c(re(2.0))))
            .collect(),
    )
}

/// Annihilator witness `a = λ (N₀ × dx₀) + (ν₁du + ν₂dv) N₀` at a frame.
pub fn annihilator(f: &SurfaceFrame, lambda: C64, nu: [C64; 2]) -> VForm1<CVec3> {
    let n = &f.normal;
    VForm1::new(vec![
        n.cross(&f.xu).scale_c(lambda) + n.scale_c(nu[0]),
        n.cross(&f.xv).scale_c(lambda) + n.scale_c(nu[1]),
    ])
}

/// For the witness `a`: `(aᵀ ⊙ dx₀, aᵀ ∧ ω)`; both vanish.
pub fn aom_residual(
    omega: &VForm1<CVec3>,
    f: &SurfaceFrame,
    lambda: C64,
    nu: [C64; 2],
) -> Result<(SymTensor2, C64)> {
    let a = annihilator(f, lambda, nu);
    let sym = dot_sym(&a, &f.dx())?;
    let w = dot_wedge(&a, omega)?;
    Ok((sym, *w.uv()))
}

/// Injects `s₁₂ ↦ s₁₂ + δ` into an `ω` field, breaking `ω ×∧ dx₀ = 0`.
pub fn corrupt_omega(omega: &VForm1<Vec3<Jet>>, x0: &FrameJets, delta: f64) -> VForm1<Vec3<Jet>> {
    let bump = x0.xu.scale(&x0.area.recip()).scale_c(re(delta));
    let mut c = omega.coeffs.clone();
    c[0] = c[0].clone() + bump;
    VForm1::new(c)
}

/// An admissible connection form at one point, used to probe distributions.
///
/// Built only from a symmetric `s` on the Gauß quadric `det(II + s) = det II`
/// (or from a catalog pair), so arbitrary `ω` cannot be injected. The field
/// extension is affine with `dω = −ω_u × ω_v`, which is all any consumer
/// differentiates.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionProbe {
    pub label: String,
    pub omega: VForm1<CVec3>,
}

/// Relative tolerance for membership on the Gauß quadric.
pub const QUADRIC_TOL: f64 = 1e-9;

impl ConnectionProbe {
    pub fn zero(f0: &SurfaceFrame) -> Self {
        ConnectionProbe::from_s_unchecked("zero", &SymTensor2::zeros(2), f0)
    }

    /// `ω = −2 N₀ × dN₀`, i.e. `s = −2 II`.
    pub fn mirror(f0: &SurfaceFrame) -> Self {
        ConnectionProbe::from_s_unchecked("mirror", &f0.second.scale(re(-2.0)), f0)
    }

    pub fn from_s(label: &str, s: &SymTensor2, f0: &SurfaceFrame) -> Result<Self> {
        let h = &f0.second;
        let gap = h.add(s).det2() - h.det2();
        let scale = h.max_abs().max(s.max_abs()).max(1.0).powi(2);
        if gap.norm() > QUADRIC_TOL * scale {
            return Err(GeomError::MalformedInput(format!(
                "s is not admissible: det(II + s) − det II = {:e}",
                gap.norm()
            )));
        }
        Ok(ConnectionProbe::from_s_unchecked(label, s, f0))
    }

    fn from_s_unchecked(label: &str, s: &SymTensor2, f0: &SurfaceFrame) -> Self {
        ConnectionProbe {
            label: label.to_string(),
            omega: omega_from_s(s, f0),
        }
    }

    /// A point on the quadric with the given `s₁₁, s₁₂`; `s₂₂` is solved for.
    pub fn on_quadric(label: &str, s11: C64, s12: C64, f0: &SurfaceFrame) -> Result<Self> {
        let h = &f0.second;
        let lead = h.get(0, 0) + s11;
        if lead.norm() < 1e-8 {
            return Err(GeomError::MalformedInput(
                "II₁₁ + s₁₁ vanishes; choose another s₁₁".into(),
            ));
        }
        let h12 = h.get(0, 1) + s12;
        let s22 = (h.det2() + h12 * h12) / lead - h.get(1, 1);
        ConnectionProbe::from_s(label, &SymTensor2::new2(s11, s12, s22), f0)
    }

    /// The rolling with the other face: `s ↦ −s − 2 II`.
    pub fn other_face(&self, f0: &SurfaceFrame) -> Self {
        ConnectionProbe {
            label: format!("{}'", self.label),
            omega: other_face_form(&self.omega, &f0.normal, &f0.dn()),
        }
    }

    /// The connection form of a catalog pair at the frame's point.
    pub fn from_pair(x0: &SurfacePatch, x: &SurfacePatch, f0: &SurfaceFrame) -> Result<Self> {
        let (w, _) = connection_form(x0, x, f0.u, f0.v)?;
        Ok(ConnectionProbe {
            label: format!("{}:{}", x0.name, x.name),
            omega: w,
        })
    }

    /// Field extension in `space` (first two variables `u, v`; a third
    /// variable, if present, is a spectator with `ω_w = 0`).
    pub fn field(&self, space: &'static Space, at: &[C64]) -> VForm1<Vec3<Jet>> {
        let (wu, wv) = (&self.omega.coeffs[0], &self.omega.coeffs[1]);
        let dv = Jet::variable(space, 1, at[1]) - at[1];
        let lift = |c: &CVec3| Vec3::lift(c, &dv);
        let slope = wu.cross(wv);
        let wu_field = lift(wu) + Vec3::lift(&slope, &dv).scale(&dv);
        let mut coeffs = vec![wu_field, lift(wv)];
        if space.nvars() == 3 {
            coeffs.push(Vec3::zero_like(&dv));
        }
        VForm1::new(coeffs)
    }
}
