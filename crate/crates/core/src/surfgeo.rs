//! Parametric surfaces: unit normal, fundamental forms, Gauß curvature, and
//! the catalog of analytic fixtures.
//!
//! Surfaces are closed-form maps written against [`Scalar`]; evaluating them
//! on jets yields exact partials up to the jet degree. Normals use the
//! principal square root of `|x_u × x_v|²` and are rejected on its branch cut.

use crate::complex3::{CMat3, CVec3, Mat3, Vec3};
use crate::error::{GeomError, Result};
use crate::forms::{SymTensor2, VForm1};
use crate::jet::{Jet, Space};
use crate::scalar::{on_sqrt_branch_cut, re, Scalar, C64};
use std::fmt;
use std::sync::Arc;

/// Relative floor below which `|x_u × x_v|²` counts as degenerate.
pub const DEGENERATE_METRIC_TOL: f64 = 1e-12;

/// Object-safe view of a parametrization, evaluable on jets and points.
pub trait SurfaceMap: Send + Sync {
    fn eval_jet(&self, u: &Jet, v: &Jet) -> Vec3<Jet>;
    fn eval_point(&self, u: C64, v: C64) -> CVec3;
}

/// A parametrization written once for every scalar type.
pub trait ClosedFormSurface: Send + Sync {
    fn eval<S: Scalar>(&self, u: S, v: S) -> Vec3<S>;
}

impl<T: ClosedFormSurface> SurfaceMap for T {
    fn eval_jet(&self, u: &Jet, v: &Jet) -> Vec3<Jet> {
        self.eval(u.clone(), v.clone())
    }
    fn eval_point(&self, u: C64, v: C64) -> CVec3 {
        self.eval(u, v)
    }
}

#[derive(Clone)]
pub struct SurfacePatch {
    pub name: String,
    pub map: Arc<dyn SurfaceMap>,
    /// Safe parameter rectangle `[(u_min, u_max), (v_min, v_max)]`.
    pub rect: [(f64, f64); 2],
}

impl fmt::Debug for SurfacePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfacePatch")
            .field("name", &self.name)
            .field("rect", &self.rect)
            .finish()
    }
}

impl SurfacePatch {
    pub fn new(name: &str, map: Arc<dyn SurfaceMap>, rect: [(f64, f64); 2]) -> Self {
        SurfacePatch {
            name: name.to_string(),
            map,
            rect,
        }
    }

    pub fn point(&self, u: C64, v: C64) -> CVec3 {
        self.map.eval_point(u, v)
    }

    /// The surface as a jet in `space`, with `u, v` as its first two variables
    /// (any further variable is a spectator).
    pub fn jet(&self, space: &'static Space, at: &[C64]) -> Vec3<Jet> {
        let u = Jet::variable(space, 0, at[0]);
        let v = Jet::variable(space, 1, at[1]);
        self.map.eval_jet(&u, &v)
    }
}

/// Jets of the moving frame of a surface at a point.
#[derive(Clone, Debug)]
pub struct FrameJets {
    pub x: Vec3<Jet>,
    pub xu: Vec3<Jet>,
    pub xv: Vec3<Jet>,
    /// `|x_u × x_v|` on the principal branch.
    pub area: Jet,
    pub normal: Vec3<Jet>,
}

impl FrameJets {
    /// `dx` as a vector 1-form in the parameters of the space.
    pub fn dx(&self) -> VForm1<Vec3<Jet>> {
        let n = self.x.0[0].space().nvars();
        let mut c = vec![self.xu.clone(), self.xv.clone()];
        if n == 3 {
            c.push(Vec3::zero_like(&self.area));
        }
        VForm1::new(c)
    }

    /// `dN₀` as a vector 1-form.
    pub fn dn(&self) -> VForm1<Vec3<Jet>> {
        let n = self.x.0[0].space().nvars();
        VForm1::new(
            (0..n)
                .map(|i| {
                    if i < 2 {
                        self.normal.map(|c| c.d(i))
                    } else {
                        Vec3::zero_like(&self.area)
                    }
                })
                .collect(),
        )
    }
}

/// Computes the frame jets from the surface jet `x`; the resulting jets are
/// exact to one order less than `x`.
pub fn frame_jets_from(x: Vec3<Jet>, u: f64, v: f64) -> Result<FrameJets> {
    if x.0[0].order() < 1 {
        return Err(GeomError::JetOrderInsufficient {
            needed: 1,
            available: 0,
        });
    }
    let xu = x.map(|c| c.d(0));
    let xv = x.map(|c| c.d(1));
    let n = xu.cross(&xv);
    let area_sq = n.norm_sq();
    let a2 = area_sq.value();
    let scale = (xu.value().max_abs() * xv.value().max_abs()).powi(2);
    if a2.norm() <= DEGENERATE_METRIC_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(GeomError::DegenerateMetric {
            u,
            v,
            area_sq: a2.norm(),
        });
    }
    if on_sqrt_branch_cut(a2, 1e-14) {
        return Err(GeomError::BranchCut { u, v });
    }
    let area = area_sq.sqrt();
    let normal = n.scale(&area.recip());
    Ok(FrameJets {
        x,
        xu,
        xv,
        area,
        normal,
    })
}

pub fn frame_jets(s: &SurfacePatch, space: &'static Space, at: &[C64]) -> Result<FrameJets> {
    frame_jets_from(s.jet(space, at), at[0].re, at[1].re)
}

/// Point data of a surface: position, tangents, normal, fundamental forms and
/// Gauß curvature.
#[derive(Clone, Debug)]
pub struct SurfaceFrame {
    pub u: f64,
    pub v: f64,
    pub x: CVec3,
    pub xu: CVec3,
    pub xv: CVec3,
    pub normal: CVec3,
    pub area: C64,
    pub first: SymTensor2,
    pub second: SymTensor2,
    pub curvature: C64,
    /// Partials of the normal.
    pub nu: CVec3,
    pub nv: CVec3,
}

impl SurfaceFrame {
    pub fn from_jets(fj: &FrameJets, u: f64, v: f64) -> SurfaceFrame {
        let xu = fj.xu.value();
        let xv = fj.xv.value();
        let normal = fj.normal.value();
        let xuu = fj.xu.map(|c| c.d1(0));
        let xuv = fj.xu.map(|c| c.d1(1));
        let xvv = fj.xv.map(|c| c.d1(1));
        let first = SymTensor2::new2(xu.dot(&xu), xu.dot(&xv), xv.dot(&xv));
        let second = SymTensor2::new2(normal.dot(&xuu), normal.dot(&xuv), normal.dot(&xvv));
        let curvature = second.det2() / first.det2();
        SurfaceFrame {
            u,
            v,
            x: fj.x.value(),
            xu,
            xv,
            normal,
            area: fj.area.value(),
            first,
            second,
            curvature,
            nu: fj.normal.map(|c| c.d1(0)),
            nv: fj.normal.map(|c| c.d1(1)),
        }
    }

    pub fn dx(&self) -> VForm1<CVec3> {
        VForm1::new(vec![self.xu.clone(), self.xv.clone()])
    }

    pub fn dn(&self) -> VForm1<CVec3> {
        VForm1::new(vec![self.nu.clone(), self.nv.clone()])
    }

    /// The frame matrix `[x_u  x_v  N]`.
    pub fn frame_matrix(&self) -> CMat3 {
        Mat3::from_columns(&self.xu, &self.xv, &self.normal)
    }

    /// Tangential coordinates `(V₁, V₂)` of `w` in the basis `(x_u, x_v)`,
    /// from the 2×2 Gram system.
    pub fn tangent_coords(&self, w: &CVec3) -> (C64, C64) {
        let g = &self.first;
        let (b1, b2) = (w.dot(&self.xu), w.dot(&self.xv));
        let det = g.det2();
        (
            (g.get(1, 1) * b1 - g.get(0, 1) * b2) / det,
            (g.get(0, 0) * b2 - g.get(0, 1) * b1) / det,
        )
    }
}

/// Normal, fundamental forms and curvature at `(u, v)`.
pub fn frame(s: &SurfacePatch, u: f64, v: f64) -> Result<SurfaceFrame> {
    let space = Space::get(2, 2);
    let fj = frame_jets(s, space, &[re(u), re(v)])?;
    Ok(SurfaceFrame::from_jets(&fj, u, v))
}

/// `½ dN₀ ×∧ dN₀ − K |x_u × x_v| N₀`, the `du∧dv` coefficient.
pub fn gauss_identity_residual(s: &SurfacePatch, u: f64, v: f64) -> Result<CVec3> {
    let f = frame(s, u, v)?;
    let lhs = f.nu.cross(&f.nv);
    let rhs = f.normal.scale_c(f.curvature * f.area);
    Ok(lhs - rhs)
}

/// Entrywise deviation of the first fundamental forms of two surfaces.
pub fn isometry_deviation(a: &SurfaceFrame, b: &SurfaceFrame) -> f64 {
    a.first.sub(&b.first).max_abs()
}

pub mod catalog {
    //! Analytic fixtures. Each declares a rectangle that keeps clear of
    //! coordinate singularities.

    use super::*;
    use std::f64::consts::PI;

    /// Unit sphere `(cos v cos u, cos v sin u, sin v)`, outward normal.
    pub struct Sphere;
    impl ClosedFormSurface for Sphere {
        fn eval<S: Scalar>(&self, u: S, v: S) -> Vec3<S> {
            Vec3([v.cos() * u.cos(), v.cos() * u.sin(), v.sin()])
        }
    }

    pub struct Plane;
    impl ClosedFormSurface for Plane {
        fn eval<S: Scalar>(&self, u: S, v: S) -> Vec3<S> {
            let z = u.zero_like();
            Vec3([u, v, z])
        }
    }

    /// Circular cylinder `(cos u, sin u, v)`.
    pub struct Cylinder;
    impl ClosedFormSurface for Cylinder {
        fn eval<S: Scalar>(&self, u: S, v: S) -> Vec3<S> {
            Vec3([u.cos(), u.sin(), v])
        }
    }

    /// Catenoid `(cosh v cos u, cosh v sin u, v)`; metric `cosh²v (du² + dv²)`.
    pub struct Catenoid;
    impl ClosedFormSurface for Catenoid {
        fn eval<S: Scalar>(&self, u: S, v: S) -> Vec3<S> {
            Vec3([v.cosh() * u.cos(), v.cosh() * u.sin(), v])
        }
    }

    /// Helicoid `(sinh v cos u, sinh v sin u, u)`; metric `cosh²v (du² + dv²)`.
    pub struct Helicoid;
    impl ClosedFormSurface for Helicoid {
        fn eval<S: Scalar>(&self, u: S, v: S) -> Vec3<S> {
            Vec3([v.sinh() * u.cos(), v.sinh() * u.sin(), u])
        }
    }

    /// Tractrix of revolution `(sech v cos u, sech v sin u, v − tanh v)`, `K = −1`,
    /// cusp at `v = 0`.
    pub struct Pseudosphere;
    impl ClosedFormSurface for Pseudosphere {
        fn eval<S: Scalar>(&self, u: S, v: S) -> Vec3<S> {
            let sech = v.cosh().recip();
            Vec3([
                sech.clone() * u.cos(),
                sech * u.sin(),
                v.clone() - v.tanh(),
            ])
        }
    }

    /// `Q x + c` for a fixed rotation `Q` and translation `c`.
    pub struct RigidMotion {
        pub inner: Arc<dyn SurfaceMap>,
        pub rotation: CMat3,
        pub translation: CVec3,
    }

    impl SurfaceMap for RigidMotion {
        fn eval_jet(&self, u: &Jet, v: &Jet) -> Vec3<Jet> {
            let x = self.inner.eval_jet(u, v);
            let q = self.rotation.map(|c| u.constant_like(*c));
            q.mul_vec(&x) + Vec3::lift(&self.translation, u)
        }
        fn eval_point(&self, u: C64, v: C64) -> CVec3 {
            self.rotation.mul_vec(&self.inner.eval_point(u, v)) + self.translation.clone()
        }
    }

    /// The fixed rigid motion used by the `:rigid` pair fixtures: rotation by
    /// 0.7 rad about the unit axis `(1, 2, 2)/3`, translation `(0.5, −1, 2)`.
    pub fn reference_motion() -> (CMat3, CVec3) {
        let axis = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        let (s, c) = 0.7f64.sin_cos();
        let k = CMat3::from_re([
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]);
        let k2 = k.mul_mat(&k);
        let q = CMat3::identity() + k.map(|x| x * s) + k2.map(|x| x * (1.0 - c));
        (q, CVec3::from_re([0.5, -1.0, 2.0]))
    }

    pub const NAMES: [&str; 6] = [
        "catenoid",
        "helicoid",
        "pseudosphere",
        "sphere",
        "plane",
        "cylinder",
    ];

    pub fn surface(name: &str) -> Option<SurfacePatch> {
        let (map, rect): (Arc<dyn SurfaceMap>, [(f64, f64); 2]) = match name {
            "catenoid" => (Arc::new(Catenoid), [(-1.5, 1.5), (-1.2, 1.2)]),
            "helicoid" => (Arc::new(Helicoid), [(-1.5, 1.5), (-1.2, 1.2)]),
            "pseudosphere" => (Arc::new(Pseudosphere), [(-2.5, 2.5), (0.4, 2.0)]),
            "sphere" => (Arc::new(Sphere), [(0.1, 2.0 * PI - 0.1), (-1.2, 1.2)]),
            "plane" => (Arc::new(Plane), [(-1.0, 1.0), (-1.0, 1.0)]),
            "cylinder" => (Arc::new(Cylinder), [(-2.0, 2.0), (-1.0, 1.0)]),
            _ => return None,
        };
        Some(SurfacePatch::new(name, map, rect))
    }

    /// `name` moved by [`reference_motion`].
    pub fn rigid(name: &str) -> Option<SurfacePatch> {
        let base = surface(name)?;
        let (rotation, translation) = reference_motion();
        let map = Arc::new(RigidMotion {
            inner: base.map.clone(),
            rotation,
            translation,
        });
        Some(SurfacePatch::new(&format!("{name}-rigid"), map, base.rect))
    }
}
