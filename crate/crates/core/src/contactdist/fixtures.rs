//! Distribution fixtures: the Bäcklund (tangency) construction on a
//! pseudospherical seed, a seeded random family, and small synthetic cases.

use super::{ConfigA, ConfigB, ContactDistribution3, ContactNormal, Coords, ScalarField, VecField};
use crate::complex3::Vec3;
use crate::error::{GeomError, Result};
use crate::jet::Jet;
use crate::scalar::{re, Scalar, C64};
use crate::surfgeo::{catalog, frame, FrameJets, SurfacePatch};
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::sync::Arc;

/// Sign of `𝐦 = ±cos σ` in the Bäcklund fixture. Flipping it is the same as
/// `σ ↦ π − σ`, so either choice gives an integrable family.
pub const BACKLUND_M_SIGN: f64 = -1.0;

pub const BACKLUND_W_RANGE: (f64, f64) = (0.2, 6.0);

fn constant(c: C64) -> ScalarField {
    Arc::new(move |x: &Coords, _: &FrameJets| x.u.constant_like(c))
}

/// Unit tangent frame `T₁ = x₀_u/|x₀_u|`, `T₂ = N₀ × T₁`.
pub fn tangent_frame(fj: &FrameJets) -> (Vec3<Jet>, Vec3<Jet>) {
    let t1 = fj.xu.scale(&fj.xu.norm_sq().sqrt().recip());
    let t2 = fj.normal.cross(&t1);
    (t1, t2)
}

fn circle(fj: &FrameJets, radius: &Jet, angle: &Jet) -> Vec3<Jet> {
    let (t1, t2) = tangent_frame(fj);
    (t1.scale(&angle.cos()) + t2.scale(&angle.sin())).scale(radius)
}

fn require_pseudospherical(seed: &SurfacePatch) -> Result<()> {
    let [(u0, u1), (v0, v1)] = seed.rect;
    for i in 0..3 {
        for j in 0..3 {
            let u = u0 + (u1 - u0) * i as f64 / 2.0;
            let v = v0 + (v1 - v0) * j as f64 / 2.0;
            let k = frame(seed, u, v)?.curvature;
            if (k + re(1.0)).norm() > 1e-8 {
                return Err(GeomError::InvalidFixture(format!(
                    "seed {} has K = {k} at ({u}, {v}), need −1",
                    seed.name
                )));
            }
        }
    }
    Ok(())
}

fn backlund_offset(sigma: C64) -> VecField {
    Arc::new(move |c: &Coords, fj: &FrameJets| {
        let r = c.u.constant_like(sigma.sin());
        circle(fj, &r, &c.w)
    })
}

fn check_sigma(sigma: C64) -> Result<()> {
    if sigma.sin().norm() < 1e-8 {
        return Err(GeomError::InvalidFixture(
            "σ ≈ 0 collapses p onto the seed".into(),
        ));
    }
    Ok(())
}

/// `V = sin σ (cos w T₁ + sin w T₂)`, `m = V × N₀ + 𝐦 N₀ + 𝐧 V` with
/// `𝐦 = ∓cos σ` and `𝐧 = n_shift` (zero for the genuine transform).
pub fn backlund_on(seed: SurfacePatch, sigma: C64, n_shift: f64) -> Result<ContactDistribution3> {
    require_pseudospherical(&seed)?;
    check_sigma(sigma)?;
    let bm = sigma.cos() * BACKLUND_M_SIGN;
    if (bm * sigma.sin()).norm() < 1e-8 {
        return Err(GeomError::NonGeneric(format!(
            "σ = {sigma}: |(m×V)×N₀|² = sin²σ cos²σ vanishes"
        )));
    }
    Ok(ContactDistribution3 {
        name: format!("backlund:{}:sigma={}", seed.name, sigma.re),
        seed,
        offset: backlund_offset(sigma),
        normal: ContactNormal::A(ConfigA {
            bm: constant(bm),
            bn: constant(re(n_shift)),
        }),
        w_range: BACKLUND_W_RANGE,
    })
}

pub fn backlund_fixture(sigma: f64) -> Result<ContactDistribution3> {
    backlund_on(catalog::surface("pseudosphere").expect("catalog"), re(sigma), 0.0)
}

/// The same construction with `m` given explicitly, valid for every `σ`
/// including the non-generic `σ = π/2`.
pub fn backlund_general(seed: SurfacePatch, sigma: C64) -> Result<ContactDistribution3> {
    require_pseudospherical(&seed)?;
    check_sigma(sigma)?;
    let bm = sigma.cos() * BACKLUND_M_SIGN;
    let offset = backlund_offset(sigma);
    let off = offset.clone();
    let normal: VecField = Arc::new(move |c: &Coords, fj: &FrameJets| {
        let v = off(c, fj);
        v.cross(&fj.normal) + fj.normal.scale_c(bm)
    });
    Ok(ContactDistribution3 {
        name: format!("backlund-general:{}:sigma={}", seed.name, sigma.re),
        seed,
        offset,
        normal: ContactNormal::General(normal),
        w_range: BACKLUND_W_RANGE,
    })
}

/// Seeded family of tangent configuration-A distributions:
/// `V = (r₀ + r₁w)(cos ψ T₁ + sin ψ T₂)`, `ψ = w + c₁u + c₂v`,
/// `𝐦 = m₀ + m₁u + m₂w`, `𝐧 = n`.
pub fn random_config_a(seed: u64, surface: &str, n: f64) -> Result<ContactDistribution3> {
    let patch = catalog::surface(surface)
        .ok_or_else(|| GeomError::InvalidFixture(format!("unknown surface {surface}")))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let r0: f64 = rng.random_range(0.3..0.6);
    let r1: f64 = rng.random_range(0.1..0.3);
    let c1: f64 = rng.random_range(-0.5..0.5);
    let c2: f64 = rng.random_range(-0.5..0.5);
    let m0: f64 = rng.random_range(0.5..1.0);
    let m1: f64 = rng.random_range(-0.1..0.1);
    let m2: f64 = rng.random_range(-0.1..0.1);
    let offset: VecField = Arc::new(move |c: &Coords, fj: &FrameJets| {
        let r = c.w.clone() * r1 + r0;
        let psi = c.w.clone() + c.u.clone() * c1 + c.v.clone() * c2;
        circle(fj, &r, &psi)
    });
    let bm: ScalarField =
        Arc::new(move |c: &Coords, _: &FrameJets| c.u.clone() * m1 + c.w.clone() * m2 + m0);
    Ok(ContactDistribution3 {
        name: format!("random:{surface}:{seed}:n={n}"),
        seed: patch,
        offset,
        normal: ContactNormal::A(ConfigA {
            bm,
            bn: constant(re(n)),
        }),
        w_range: (0.2, 1.3),
    })
}

/// Configuration A on the cylinder with `V = f(u, v, w)(a T₁ + b T₂)`, so
/// `∂_wV ∥ V` and the two expressions for `b` agree for any `𝐧`.
pub fn parallel_offset_fixture(n: f64) -> Result<ContactDistribution3> {
    let offset: VecField = Arc::new(|c: &Coords, fj: &FrameJets| {
        let (t1, t2) = tangent_frame(fj);
        let f = (c.u.sin() * 0.3 + c.v.clone() * 0.2 + 1.2) * (c.w.clone() * 0.4 + 1.0);
        (t1.scale_c(re(0.6)) + t2.scale_c(re(0.8))).scale(&f)
    });
    Ok(ContactDistribution3 {
        name: format!("parallel:cylinder:n={n}"),
        seed: catalog::surface("cylinder").expect("catalog"),
        offset,
        normal: ContactNormal::A(ConfigA {
            bm: constant(re(0.8)),
            bn: constant(re(n)),
        }),
        w_range: (0.2, 1.0),
    })
}

fn plane_offset(f: impl Fn(&Coords) -> [Jet; 2] + Send + Sync + 'static) -> VecField {
    Arc::new(move |c: &Coords, _: &FrameJets| {
        let [a, b] = f(c);
        let z = a.zero_like();
        Vec3([a, b, z])
    })
}

fn case_b_on_plane(name: &str, offset: VecField, bm: ScalarField) -> ContactDistribution3 {
    ContactDistribution3 {
        name: name.to_string(),
        seed: catalog::surface("plane").expect("catalog"),
        offset,
        normal: ContactNormal::B(ConfigB { bm }),
        w_range: (0.2, 1.0),
    }
}

/// Configuration B on the plane with `V = (ς(w)(2 − u), eʷ, 0)`, `ς` the
/// logistic function. This solves `P_u Q_v = P_v Q_u` (so the relation holds
/// with a single `b`) while `∂_wV` stays transverse to `V`.
pub fn case_b_fixture() -> Result<ContactDistribution3> {
    let offset = plane_offset(|c| {
        let logistic = ((-c.w.clone()).exp() + 1.0).recip();
        [logistic * (-c.u.clone() + 2.0), c.w.exp()]
    });
    let bm: ScalarField = Arc::new(|c: &Coords, _: &FrameJets| c.u.clone() * 0.1 + 0.7);
    Ok(case_b_on_plane("caseb:plane", offset, bm))
}

/// [`case_b_fixture`] with `0.3v` added to the first offset component, which
/// breaks the proportionality of `P` and `Q`.
pub fn case_b_generic_fixture() -> Result<ContactDistribution3> {
    let offset = plane_offset(|c| {
        let logistic = ((-c.w.clone()).exp() + 1.0).recip();
        [logistic * (-c.u.clone() + 2.0) + c.v.clone() * 0.3, c.w.exp()]
    });
    let bm: ScalarField = Arc::new(|c: &Coords, _: &FrameJets| c.u.clone() * 0.1 + 0.7);
    Ok(case_b_on_plane("caseb-generic:plane", offset, bm))
}

/// Configuration B with `∂_wV ∥ V`.
pub fn case_b_parallel_fixture() -> Result<ContactDistribution3> {
    let offset = plane_offset(|c| {
        let f = (c.w.clone() * 0.4 + 1.0) * (c.u.clone() * 0.2 + 1.0);
        [f.clone() * 0.6, f * 0.8]
    });
    Ok(case_b_on_plane("caseb-parallel:plane", offset, constant(re(0.7))))
}

/// [`case_b_fixture`] with `𝐦 = 0`.
pub fn case_b_zero_m_fixture() -> Result<ContactDistribution3> {
    let mut d = case_b_fixture()?;
    d.normal = ContactNormal::B(ConfigB {
        bm: constant(re(0.0)),
    });
    d.name = "caseb-zero:plane".into();
    Ok(d)
}

/// `V = 0.5 T₁`, independent of `w`.
pub fn constant_offset_fixture() -> Result<ContactDistribution3> {
    let offset: VecField = Arc::new(|_: &Coords, fj: &FrameJets| tangent_frame(fj).0.scale_c(re(0.5)));
    Ok(ContactDistribution3 {
        name: "constant-offset:pseudosphere".into(),
        seed: catalog::surface("pseudosphere").expect("catalog"),
        offset,
        normal: ContactNormal::A(ConfigA {
            bm: constant(re(0.7)),
            bn: constant(re(0.0)),
        }),
        w_range: (0.2, 1.0),
    })
}

/// A Bäcklund-like offset lifted off the tangent plane by `0.3 N₀`.
pub fn normal_offset_fixture() -> Result<ContactDistribution3> {
    let offset: VecField = Arc::new(|c: &Coords, fj: &FrameJets| {
        let r = c.u.constant_like(re(0.5));
        circle(fj, &r, &c.w) + fj.normal.scale_c(re(0.3))
    });
    Ok(ContactDistribution3 {
        name: "normal-offset:pseudosphere".into(),
        seed: catalog::surface("pseudosphere").expect("catalog"),
        offset,
        normal: ContactNormal::A(ConfigA {
            bm: constant(re(0.7)),
            bn: constant(re(0.0)),
        }),
        w_range: (0.2, 1.0),
    })
}

/// Every contact element centred at one fixed point: `p ≡ c`, `m = N₀`.
pub fn fixed_center_fixture() -> Result<ContactDistribution3> {
    let center = crate::complex3::CVec3::from_re([0.2, -0.1, 0.5]);
    let offset: VecField = Arc::new(move |_: &Coords, fj: &FrameJets| {
        Vec3::lift(&center, &fj.area) - fj.x.clone()
    });
    let normal: VecField = Arc::new(|_: &Coords, fj: &FrameJets| fj.normal.clone());
    Ok(ContactDistribution3 {
        name: "fixed-center:pseudosphere".into(),
        seed: catalog::surface("pseudosphere").expect("catalog"),
        offset,
        normal: ContactNormal::General(normal),
        w_range: (0.2, 1.0),
    })
}

pub const FIXTURE_FORMS: [&str; 8] = [
    "backlund:<seed>:sigma=<angle>[:n=<shift>]",
    "backlund-general:<seed>:sigma=<angle>",
    "random:<seed>:<u64>[:n=<value>]",
    "parallel:cylinder[:n=<value>]",
    "caseb:plane",
    "caseb-parallel:plane",
    "caseb-generic:plane",
    "fixed-center:pseudosphere",
];

fn parse_kv(part: &str, key: &str) -> Result<f64> {
    part.strip_prefix(key)
        .and_then(|s| s.strip_prefix('='))
        .and_then(|s| s.parse::<f64>().ok())
        .ok_or_else(|| GeomError::MalformedInput(format!("expected {key}=<number>, got {part:?}")))
}

/// Parses a distribution fixture name (see [`FIXTURE_FORMS`]).
pub fn parse(name: &str) -> Result<ContactDistribution3> {
    let parts: Vec<&str> = name.split(':').collect();
    let surface = |s: &str| {
        catalog::surface(s).ok_or_else(|| GeomError::MalformedInput(format!("unknown surface {s:?}")))
    };
    let opt_n = |p: Option<&&str>| p.map(|s| parse_kv(s, "n")).transpose().map(|x| x.unwrap_or(0.0));
    match parts.as_slice() {
        ["backlund", seed, sigma, rest @ ..] if rest.len() <= 1 => {
            let sigma = parse_kv(sigma, "sigma")?;
            backlund_on(surface(seed)?, re(sigma), opt_n(rest.first())?)
        }
        ["backlund-general", seed, sigma] => {
            backlund_general(surface(seed)?, re(parse_kv(sigma, "sigma")?))
        }
        ["random", seed, k, rest @ ..] if rest.len() <= 1 => {
            let k: u64 = k
                .parse()
                .map_err(|_| GeomError::MalformedInput(format!("bad random seed {k:?}")))?;
            surface(seed)?;
            random_config_a(k, seed, opt_n(rest.first())?)
        }
        ["parallel", "cylinder", rest @ ..] if rest.len() <= 1 => {
            parallel_offset_fixture(opt_n(rest.first())?)
        }
        ["caseb", "plane"] => case_b_fixture(),
        ["caseb-parallel", "plane"] => case_b_parallel_fixture(),
        ["caseb-generic", "plane"] => case_b_generic_fixture(),
        ["fixed-center", "pseudosphere"] => fixed_center_fixture(),
        _ => Err(GeomError::MalformedInput(format!(
            "unknown distribution fixture {name:?}; forms: {}",
            FIXTURE_FORMS.join(", ")
        ))),
    }
}

/// A default `σ` of `π/4`.
pub fn default_sigma() -> f64 {
    PI / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn developable_seeds_rejected() {
        for s in ["plane", "cylinder", "sphere"] {
            let r = backlund_on(catalog::surface(s).unwrap(), re(0.7), 0.0);
            assert!(matches!(r, Err(GeomError::InvalidFixture(_))), "{s}");
        }
    }

    #[test]
    fn degenerate_sigmas() {
        let ps = catalog::surface("pseudosphere").unwrap();
        assert!(matches!(
            backlund_on(ps.clone(), re(1e-10), 0.0),
            Err(GeomError::InvalidFixture(_))
        ));
        assert!(matches!(
            backlund_on(ps.clone(), re(PI / 2.0), 0.0),
            Err(GeomError::NonGeneric(_))
        ));
        // the explicit-m form exists at π/2 but fails genericity there
        let d = backlund_general(ps, re(PI / 2.0)).unwrap();
        let (a, b) = d.local(0.3, 1.0, 0.7).unwrap().genericity();
        assert!(a.norm() > 0.5);
        assert!(b.norm() < 1e-15);
    }

    #[test]
    fn parse_names() {
        assert!(parse("backlund:pseudosphere:sigma=0.7854").is_ok());
        assert!(parse("backlund:pseudosphere:sigma=0.7854:n=0.1").is_ok());
        assert!(parse("random:catenoid:5:n=0.1").is_ok());
        assert!(parse("caseb:plane").is_ok());
        assert!(parse("backlund:nowhere:sigma=1").is_err());
        assert!(parse("backlund:pseudosphere:s=1").is_err());
    }

    #[test]
    fn tangency_holds() {
        let d = backlund_fixture(0.9).unwrap();
        let l = d.local(-1.0, 1.4, 2.0).unwrap();
        assert!(l.normal_part().norm() < 1e-15);
        assert!((l.v.value().norm_sq() - re(0.9f64.sin().powi(2))).norm() < 1e-14);
    }
}
