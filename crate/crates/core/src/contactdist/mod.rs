//! Three-parameter distributions of contact elements `(p, m)` over a seed
//! surface `x₀`, and the integrability analysis of their rolled versions.
//!
//! A distribution is evaluated at `(u, v, w)` into a [`Local`] bundle of jets
//! in three variables. The rolled Pfaffian `dw = θ` depends on a connection
//! form, always supplied as a [`ConnectionProbe`].

pub mod abc;
pub mod cons;
pub mod fixtures;

pub use abc::{bc_relations_residual, extract_abc, ABCDecomposition, BcResiduals};
pub use cons::cons_residual;

use crate::complex3::{CVec3, Vec3};
use crate::error::{GeomError, Result};
use crate::forms::VForm1;
use crate::jet::{Jet, Space};
use crate::rolling::ConnectionProbe;
use crate::scalar::{re, Scalar, C64};
use crate::surfgeo::{frame_jets, FrameJets, SurfaceFrame, SurfacePatch};
use std::fmt;
use std::sync::Arc;

/// Jet degree for distributions: the compatibility form needs `θ` to first
/// order, hence `x₀` to third.
pub const DIST_DEGREE: usize = 3;

/// Relative floor for denominators and genericity components.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Coordinate jets `(u, v, w)` handed to field closures.
#[derive(Clone, Debug)]
pub struct Coords {
    pub u: Jet,
    pub v: Jet,
    pub w: Jet,
}

pub type VecField = Arc<dyn Fn(&Coords, &FrameJets) -> Vec3<Jet> + Send + Sync>;
pub type ScalarField = Arc<dyn Fn(&Coords, &FrameJets) -> Jet + Send + Sync>;

/// `m = V × N₀ + 𝐦 N₀ + 𝐧 V`.
#[derive(Clone)]
pub struct ConfigA {
    pub bm: ScalarField,
    pub bn: ScalarField,
}

/// `m = V + 𝐦 N₀`.
#[derive(Clone)]
pub struct ConfigB {
    pub bm: ScalarField,
}

#[derive(Clone)]
pub enum ContactNormal {
    General(VecField),
    A(ConfigA),
    B(ConfigB),
}

#[derive(Clone)]
pub struct ContactDistribution3 {
    pub name: String,
    pub seed: SurfacePatch,
    /// The offset `V = p − x₀`.
    pub offset: VecField,
    pub normal: ContactNormal,
    pub w_range: (f64, f64),
}

impl fmt::Debug for ContactDistribution3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.normal {
            ContactNormal::General(_) => "general",
            ContactNormal::A(_) => "A",
            ContactNormal::B(_) => "B",
        };
        f.debug_struct("ContactDistribution3")
            .field("name", &self.name)
            .field("seed", &self.seed.name)
            .field("config", &kind)
            .field("w_range", &self.w_range)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum LocalConfig {
    General,
    A { bm: Jet, bn: Jet },
    B { bm: Jet },
}

/// Jets of a distribution at one point of `(u, v, w)` space.
#[derive(Clone, Debug)]
pub struct Local {
    pub at: [f64; 3],
    pub seed: FrameJets,
    pub frame: SurfaceFrame,
    pub v: Vec3<Jet>,
    pub m: Vec3<Jet>,
    pub config: LocalConfig,
}

fn is_small(x: C64, scale: f64) -> bool {
    x.norm() <= DEGENERACY_TOL * scale.max(1e-300)
}

impl ContactDistribution3 {
    pub fn local(&self, u: f64, v: f64, w: f64) -> Result<Local> {
        let space = Space::get(3, DIST_DEGREE);
        let at = [re(u), re(v), re(w)];
        let seed = frame_jets(&self.seed, space, &at)?;
        let coords = Coords {
            u: Jet::variable(space, 0, at[0]),
            v: Jet::variable(space, 1, at[1]),
            w: Jet::variable(space, 2, at[2]),
        };
        let vv = (self.offset)(&coords, &seed);
        let (m, config) = match &self.normal {
            ContactNormal::General(f) => (f(&coords, &seed), LocalConfig::General),
            ContactNormal::A(c) => {
                let bm = (c.bm)(&coords, &seed);
                let bn = (c.bn)(&coords, &seed);
                let m = vv.cross(&seed.normal) + seed.normal.scale(&bm) + vv.scale(&bn);
                (m, LocalConfig::A { bm, bn })
            }
            ContactNormal::B(c) => {
                let bm = (c.bm)(&coords, &seed);
                let m = vv.clone() + seed.normal.scale(&bm);
                (m, LocalConfig::B { bm })
            }
        };
        if m.value().max_abs() == 0.0 {
            return Err(GeomError::InvalidFixture(format!(
                "m vanishes at ({u}, {v}, {w})"
            )));
        }
        let frame = SurfaceFrame::from_jets(&seed, u, v);
        Ok(Local {
            at: [u, v, w],
            seed,
            frame,
            v: vv,
            m,
            config,
        })
    }

    /// `p = x₀ + V` at a point.
    pub fn p(&self, u: f64, v: f64, w: f64) -> Result<CVec3> {
        let l = self.local(u, v, w)?;
        Ok(l.seed.x.value() + l.v.value())
    }
}

impl Local {
    pub fn space(&self) -> &'static Space {
        self.v.0[0].space()
    }

    pub fn coords(&self) -> [C64; 3] {
        [re(self.at[0]), re(self.at[1]), re(self.at[2])]
    }

    /// `∂_w V`.
    pub fn dw_v(&self) -> Vec3<Jet> {
        self.v.map(|c| c.d(2))
    }

    /// `∂_i(V + x₀)` for `i ∈ {u, v}`.
    pub fn dp(&self, i: usize) -> Vec3<Jet> {
        let base = if i == 0 { &self.seed.xu } else { &self.seed.xv };
        self.v.map(|c| c.d(i)) + base.clone()
    }

    /// `N₀ᵀV`, which the configuration formulas assume vanishes.
    pub fn normal_part(&self) -> C64 {
        self.seed.normal.value().dot(&self.v.value())
    }

    fn require_tangent(&self) -> Result<()> {
        let np = self.normal_part();
        if np.norm() > 1e-9 * self.v.value().max_abs().max(1.0) {
            return Err(GeomError::NotTangent {
                normal_part: np.norm(),
            });
        }
        Ok(())
    }

    fn omega_field(&self, probe: &ConnectionProbe) -> VForm1<Vec3<Jet>> {
        probe.field(self.space(), &self.coords())
    }

    /// `mᵀ∂_wV` with its magnitude scale.
    fn pfaffian_denominator(&self) -> (Jet, f64) {
        let dwv = self.dw_v();
        let d = self.m.dot(&dwv);
        let scale = self.m.value().max_abs() * dwv.value().max_abs();
        (d, scale)
    }

    /// `(mᵀ∂_wV, |(m × V) × N₀|²)`.
    pub fn genericity(&self) -> (C64, C64) {
        let m = self.m.value();
        let v = self.v.value();
        let n = self.seed.normal.value();
        let first = m.dot(&self.dw_v().value());
        let second = m.cross(&v).cross(&n).norm_sq();
        (first, second)
    }

    /// `θ = −mᵀ(ω × V + d(V + x₀)) / mᵀ∂_wV` as jets (du, dv components).
    pub fn pfaffian(&self, probe: &ConnectionProbe) -> Result<VForm1<Jet>> {
        let (den, scale) = self.pfaffian_denominator();
        if is_small(den.value(), scale) {
            return Err(GeomError::NonGeneric(format!(
                "mᵀ∂wV = {:e}",
                den.value().norm()
            )));
        }
        let omega = self.omega_field(probe);
        let inv = den.recip();
        Ok(VForm1::new(
            (0..2)
                .map(|i| {
                    let t = omega.coeffs[i].cross(&self.v) + self.dp(i);
                    -(self.m.dot(&t) * inv.clone())
                })
                .collect(),
        ))
    }

    /// The compatibility 2-form `dθ + θ ∧ ∂_wθ` of the rolled Pfaffian, the
    /// `du∧dv` coefficient.
    pub fn compatibility_form(&self, probe: &ConnectionProbe) -> Result<C64> {
        let th = self.pfaffian(probe)?;
        let (tu, tv) = (&th.coeffs[0], &th.coeffs[1]);
        Ok(tv.d1(0) - tu.d1(1) + tu.value() * tv.d1(2) - tv.value() * tu.d1(2))
    }

    /// `Θ ∧ dΘ` for `Θ = dw − θ`, the `du∧dv∧dw` coefficient.
    pub fn frobenius_residual(&self, probe: &ConnectionProbe) -> Result<C64> {
        let th = self.pfaffian(probe)?;
        let one = th.coeffs[0].constant_like(re(1.0));
        let big = VForm1::new(vec![-th.coeffs[0].clone(), -th.coeffs[1].clone(), one]);
        let d = crate::forms::exterior_d(&big)?;
        // basis order du∧dv, du∧dw, dv∧dw
        let c = |k: usize| d.coeffs[k].value();
        let t = |k: usize| big.coeffs[k].value();
        Ok(t(0) * c(2) - t(1) * c(1) + t(2) * c(0))
    }

    /// `mᵀ(ω × V + d(V + x₀) + ∂_wV dw)` for a given `dw`.
    pub fn integrability_residual(
        &self,
        probe: &ConnectionProbe,
        dw: &VForm1<C64>,
    ) -> Result<VForm1<C64>> {
        let (den, scale) = self.pfaffian_denominator();
        if is_small(den.value(), scale) {
            return Err(GeomError::NonGeneric(format!(
                "mᵀ∂wV = {:e}",
                den.value().norm()
            )));
        }
        let m = self.m.value();
        let v = self.v.value();
        let dwv = self.dw_v().value();
        Ok(VForm1::new(
            (0..2)
                .map(|i| {
                    let t = probe.omega.coeffs[i].cross(&v)
                        + self.dp(i).value()
                        + dwv.scale_c(dw.coeffs[i]);
                    m.dot(&t)
                })
                .collect(),
        ))
    }

    /// `W = ω × N₀ + dN₀` at the point.
    pub fn w_form(&self, probe: &ConnectionProbe) -> VForm1<CVec3> {
        let n = &self.frame.normal;
        VForm1::new(
            (0..2)
                .map(|i| probe.omega.coeffs[i].cross(n) + [&self.frame.nu, &self.frame.nv][i].clone())
                .collect(),
        )
    }

    /// `dw` from the configuration-specific closed form.
    pub fn dw_connection(&self, probe: &ConnectionProbe) -> Result<VForm1<C64>> {
        let n = self.frame.normal.clone();
        let v = self.v.value();
        let dwv = self.dw_v().value();
        let wf = self.w_form(probe);
        let dp: Vec<CVec3> = (0..2).map(|i| self.dp(i).value()).collect();
        let (num, den): (Vec<C64>, C64) = match &self.config {
            LocalConfig::A { bm, bn } => {
                self.require_tangent()?;
                let (bm, bn) = (bm.value(), bn.value());
                let den = n.dot(&dwv.cross(&v)) + bn * v.dot(&dwv);
                let num = (0..2)
                    .map(|i| n.dot(&v.cross(&dp[i])) + bm * v.dot(&wf.coeffs[i]) - bn * v.dot(&dp[i]))
                    .collect();
                (num, den)
            }
            LocalConfig::B { bm } => {
                self.require_tangent()?;
                let bm = bm.value();
                let den = v.dot(&dwv);
                let num = (0..2)
                    .map(|i| bm * v.dot(&wf.coeffs[i]) - v.dot(&dp[i]))
                    .collect();
                (num, den)
            }
            LocalConfig::General => {
                let th = self.pfaffian(probe)?;
                return Ok(th.map(|c| c.value()));
            }
        };
        let scale = v.max_abs() * dwv.max_abs();
        if is_small(den, scale) {
            return Err(GeomError::DegeneratePfaffian {
                denominator: den.norm(),
            });
        }
        Ok(VForm1::new(num.into_iter().map(|x| x / den).collect()))
    }

    fn config_a(&self) -> Result<(C64, C64)> {
        match &self.config {
            LocalConfig::A { bm, bn } => Ok((bm.value(), bn.value())),
            _ => Err(GeomError::MalformedInput(
                "operation needs m = V×N₀ + 𝐦N₀ + 𝐧V".into(),
            )),
        }
    }

    /// `P_i = N₀ᵀ[∂_wV × ∂_i(V + x₀)]`.
    pub fn p_form(&self) -> [C64; 2] {
        let n = &self.frame.normal;
        let dwv = self.dw_v().value();
        [0, 1].map(|i| n.dot(&dwv.cross(&self.dp(i).value())))
    }

    /// `Q_i = (N₀ × V)ᵀ∂_i x₀`.
    pub fn q_form(&self) -> [C64; 2] {
        let nv = self.frame.normal.cross(&self.v.value());
        [nv.dot(&self.frame.xu), nv.dot(&self.frame.xv)]
    }

    /// `𝐧 N₀ᵀ[∂_wV × d(V + x₀)] ∧ dx₀ᵀ(N₀ × V)`, the `du∧dv` coefficient.
    pub fn n_condition_residual(&self) -> Result<C64> {
        let (_, bn) = self.config_a()?;
        let (p, q) = (self.p_form(), self.q_form());
        Ok(bn * (p[0] * q[1] - p[1] * q[0]))
    }

    /// The two expressions for `b` and their difference.
    pub fn b_coefficient(&self) -> Result<BCoefficient> {
        let (bm, bn) = self.config_a()?;
        let n = &self.frame.normal;
        let v = self.v.value();
        let dwv = self.dw_v().value();
        let den = n.dot(&dwv.cross(&v)) + bn * v.dot(&dwv);
        if is_small(den, v.max_abs() * dwv.max_abs()) {
            return Err(GeomError::DegeneratePfaffian {
                denominator: den.norm(),
            });
        }
        let (p, q) = (self.p_form(), self.q_form());
        let qscale = v.max_abs() * self.frame.xu.max_abs().max(self.frame.xv.max_abs());
        for (k, qi) in q.iter().enumerate() {
            if is_small(*qi, qscale) {
                return Err(GeomError::DegenerateDirection(format!(
                    "∂{}x₀ᵀ(N₀×V) = {:e}",
                    ["u", "v"][k],
                    qi.norm()
                )));
            }
        }
        let kappa = bm * bn * n.cross(&v).norm_sq() / (den * den);
        let b_u = kappa * p[0] / q[0];
        let b_v = kappa * p[1] / q[1];
        Ok(BCoefficient {
            b_u,
            b_v,
            mismatch: b_u - b_v,
        })
    }

    /// `𝐦 N₀ᵀ[∂_wV × d(V + x₀)]/(Vᵀ∂_wV)² − b dx₀ᵀ(N₀ × V)/|N₀ × V|²` with
    /// `b` fitted by least squares.
    pub fn case_b_relation(&self) -> Result<CaseBRelation> {
        let bm = match &self.config {
            LocalConfig::B { bm } => bm.value(),
            _ => return Err(GeomError::MalformedInput("operation needs m = V + 𝐦N₀".into())),
        };
        let v = self.v.value();
        let dwv = self.dw_v().value();
        let vdw = v.dot(&dwv);
        if is_small(vdw, v.max_abs() * dwv.max_abs()) {
            return Err(GeomError::DegeneratePfaffian {
                denominator: vdw.norm(),
            });
        }
        let nv2 = self.frame.normal.cross(&v).norm_sq();
        if is_small(nv2, v.max_abs().powi(2)) {
            return Err(GeomError::DegenerateDirection(format!(
                "|N₀×V|² = {:e}",
                nv2.norm()
            )));
        }
        let (p, q) = (self.p_form(), self.q_form());
        let lhs = p.map(|pi| bm * pi / (vdw * vdw));
        let rhs_unit = q.map(|qi| qi / nv2);
        let norm: f64 = rhs_unit.iter().map(|x| x.norm_sqr()).sum();
        let b = if norm == 0.0 {
            re(0.0)
        } else {
            (rhs_unit[0].conj() * lhs[0] + rhs_unit[1].conj() * lhs[1]) / norm
        };
        let residual = VForm1::new(vec![lhs[0] - b * rhs_unit[0], lhs[1] - b * rhs_unit[1]]);
        let parallel = dwv.cross(&v).max_abs() <= 1e-10 * v.max_abs() * dwv.max_abs();
        Ok(CaseBRelation {
            b,
            residual,
            parallel,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BCoefficient {
    pub b_u: C64,
    pub b_v: C64,
    pub mismatch: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseBRelation {
    pub b: C64,
    pub residual: VForm1<C64>,
    /// `∂_wV ∥ V`, where the relation degenerates to a tautology.
    pub parallel: bool,
}

pub fn genericity_value(dist: &ContactDistribution3, u: f64, v: f64, w: f64) -> Result<(C64, C64)> {
    Ok(dist.local(u, v, w)?.genericity())
}

/// True when both genericity components exceed `tol` in magnitude.
pub fn is_generic(values: (C64, C64), tol: f64) -> bool {
    values.0.norm() > tol && values.1.norm() > tol
}

/// Standard probe set at a frame: zero, mirror, and `count` random points of
/// the Gauß quadric together with their other faces.
pub fn probe_set(f0: &SurfaceFrame, seed: u64, count: usize) -> Vec<ConnectionProbe> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![ConnectionProbe::zero(f0), ConnectionProbe::mirror(f0)];
    let mut k = 0;
    while out.len() < 2 + 2 * count {
        let s11 = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-0.3..0.3));
        let s12 = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-0.3..0.3));
        if let Ok(p) = ConnectionProbe::on_quadric(&format!("s{k}"), s11, s12, f0) {
            out.push(p.other_face(f0));
            out.push(p);
        }
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn back_substitution_vanishes() {
        let d = backlund_fixture(std::f64::consts::FRAC_PI_4).unwrap();
        let l = d.local(0.3, 0.9, 0.7).unwrap();
        for p in probe_set(&l.frame, 7, 2) {
            let dw = l.dw_connection(&p).unwrap();
            let r = l.integrability_residual(&p, &dw).unwrap();
            assert!(r.max_abs() < 1e-12, "{}: {:e}", p.label, r.max_abs());
            let th = l.pfaffian(&p).unwrap().map(|c| c.value());
            assert!(th.sub(&dw).max_abs() < 1e-12);
        }
    }

    #[test]
    fn zero_dw_leaves_the_differential() {
        let d = backlund_fixture(0.6).unwrap();
        let l = d.local(0.1, 1.1, 0.4).unwrap();
        let zero = ConnectionProbe::zero(&l.frame);
        let r = l
            .integrability_residual(&zero, &VForm1::new(vec![re(0.0), re(0.0)]))
            .unwrap();
        let m = l.m.value();
        for i in 0..2 {
            assert!((r.coeffs[i] - m.dot(&l.dp(i).value())).norm() < 1e-15);
        }
    }

    #[test]
    fn frobenius_equals_minus_compatibility() {
        let d = random_config_a(3, "pseudosphere", 0.1).unwrap();
        let l = d.local(0.2, 0.8, 0.5).unwrap();
        for p in probe_set(&l.frame, 1, 1) {
            let f = l.compatibility_form(&p).unwrap();
            let fr = l.frobenius_residual(&p).unwrap();
            assert!((f + fr).norm() < 1e-12 * f.norm().max(1.0));
        }
    }

    #[test]
    fn genericity_components() {
        let s = 0.7f64;
        let d = backlund_fixture(s).unwrap();
        let (a, b) = genericity_value(&d, 0.3, 1.0, 0.5).unwrap();
        assert!((a + re(s.sin().powi(2))).norm() < 1e-12);
        assert!((b - re((s.cos() * s.sin()).powi(2))).norm() < 1e-12);
    }

    #[test]
    fn w_independent_offset_is_not_generic() {
        let d = constant_offset_fixture().unwrap();
        let l = d.local(0.2, 0.9, 0.5).unwrap();
        assert_eq!(l.genericity().0, re(0.0));
        let p = ConnectionProbe::zero(&l.frame);
        assert!(matches!(l.dw_connection(&p), Err(GeomError::DegeneratePfaffian { .. })));
        assert!(matches!(l.pfaffian(&p), Err(GeomError::NonGeneric(_))));
    }

    #[test]
    fn normal_offset_is_rejected() {
        let d = normal_offset_fixture().unwrap();
        let l = d.local(0.2, 0.9, 0.5).unwrap();
        let p = ConnectionProbe::zero(&l.frame);
        assert!(matches!(l.dw_connection(&p), Err(GeomError::NotTangent { .. })));
    }

    #[test]
    fn config_b_single_point_by_hand() {
        // plane seed, ω = 0: dN₀ = 0, so dw_i = −Vᵀ∂_i(V + x₀)/(Vᵀ∂wV).
        // With V = (ς(2 − u), eʷ, 0): ∂wV = (ς(1 − ς)(2 − u), eʷ, 0),
        // ∂u(V + x₀) = (1 − ς, 0, 0), ∂v(V + x₀) = (0, 1, 0).
        let (u, w) = (0.2f64, 0.5f64);
        let sg = 1.0 / (1.0 + (-w).exp());
        let v = [sg * (2.0 - u), w.exp()];
        let den = v[0] * sg * (1.0 - sg) * (2.0 - u) + v[1] * w.exp();
        let expected = [-v[0] * (1.0 - sg) / den, -v[1] / den];
        let d = case_b_fixture().unwrap();
        let l = d.local(0.2, 0.1, 0.5).unwrap();
        let dw = l.dw_connection(&ConnectionProbe::zero(&l.frame)).unwrap();
        assert!((dw.coeffs[0] - re(expected[0])).norm() < 1e-14);
        assert!((dw.coeffs[1] - re(expected[1])).norm() < 1e-14);
    }

    #[test]
    fn n_condition_factor() {
        let d = random_config_a(11, "pseudosphere", 0.0).unwrap();
        let l = d.local(0.4, 1.2, 0.3).unwrap();
        assert_eq!(l.n_condition_residual().unwrap(), re(0.0));
        let b = l.b_coefficient().unwrap();
        assert_eq!((b.b_u, b.b_v), (re(0.0), re(0.0)));
        let d = random_config_a(11, "pseudosphere", 0.1).unwrap();
        let l = d.local(0.4, 1.2, 0.3).unwrap();
        assert!(l.n_condition_residual().unwrap().norm() > 1e-4);
    }

    #[test]
    fn parallel_offset_satisfies_b_relation() {
        let d = parallel_offset_fixture(0.3).unwrap();
        let l = d.local(0.3, 0.2, 0.6).unwrap();
        assert!(l.n_condition_residual().unwrap().norm() < 1e-13);
        let b = l.b_coefficient().unwrap();
        assert!(b.b_u.norm() > 1e-3);
        assert!(b.mismatch.norm() < 1e-12);
    }

    #[test]
    fn case_b_relations() {
        let d = case_b_fixture().unwrap();
        let l = d.local(0.3, -0.2, 0.6).unwrap();
        let r = l.case_b_relation().unwrap();
        assert!(!r.parallel);
        assert!(r.residual.max_abs() < 1e-13);
        assert!(r.b.norm() > 1e-3);
        let flat = case_b_parallel_fixture().unwrap();
        let r = flat.local(0.3, -0.2, 0.6).unwrap().case_b_relation().unwrap();
        assert!(r.parallel);
        let zero = case_b_zero_m_fixture().unwrap();
        let r = zero.local(0.3, -0.2, 0.6).unwrap().case_b_relation().unwrap();
        assert_eq!(r.b, re(0.0));
        assert_eq!(r.residual.max_abs(), 0.0);
        let off = fixtures::case_b_generic_fixture().unwrap();
        let r = off.local(0.3, -0.2, 0.6).unwrap().case_b_relation().unwrap();
        assert!(r.residual.max_abs() > 1e-3);
    }
}
