//! Central-difference oracle with one Richardson step.
//!
//! Each level of the jet machinery is checked on its own: analytic partials
//! at a point against differences of point values at shifted points.
#![allow(dead_code)]

use rand::Rng;
use rollgeom::contactdist::{fixtures, probe_set, LocalConfig};
use rollgeom::forms::VForm1;
use rollgeom::rolling::{connection_form, pair_omega_field, rolling_jets, rolling_map, ConnectionProbe, ISOMETRY_TOL};
use rollgeom::surfgeo::{catalog, frame};
use rollgeom::{re, sample, CVec3, Jet, Result, Scalar, Space, C64};

pub const H: f64 = 1e-4;
pub const SAMPLES: usize = 20;

/// `(4 D(h/2) − D(h)) / 3` with `D` the central difference.
pub fn richardson(f: &dyn Fn(f64) -> Result<Vec<C64>>, x: f64, h: f64) -> Result<Vec<C64>> {
    let central = |h: f64| -> Result<Vec<C64>> {
        let (p, m) = (f(x + h)?, f(x - h)?);
        Ok(p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect())
    };
    let (coarse, fine) = (central(h)?, central(h / 2.0)?);
    Ok(fine.iter().zip(&coarse).map(|(f, c)| (f * 4.0 - c) / 3.0).collect())
}

/// `max |a − d| / max(max |d|, 1)`.
pub fn relative_error(analytic: &[C64], oracle: &[C64]) -> f64 {
    assert_eq!(analytic.len(), oracle.len());
    let scale = oracle.iter().map(|z| z.norm()).fold(1.0, f64::max);
    analytic
        .iter()
        .zip(oracle)
        .map(|(a, d)| (a - d).norm())
        .fold(0.0, f64::max)
        / scale
}

#[derive(Clone, Debug)]
pub struct Agreement {
    pub fixture: String,
    pub quantity: &'static str,
    pub worst: f64,
    pub at: Vec<f64>,
    pub comparisons: usize,
}

/// Points drawn uniformly from the box shrunk by 5% on each side.
pub fn sample_points(seed: u64, rect: &[(f64, f64)], n: usize) -> Vec<Vec<f64>> {
    let mut rng = sample::rng(seed);
    (0..n)
        .map(|_| {
            rect.iter()
                .map(|&(a, b)| {
                    let pad = 0.05 * (b - a);
                    rng.random_range(a + pad..b - pad)
                })
                .collect()
        })
        .collect()
}

/// Compares `jet(p, i)` with the oracle derivative of `value` along `i` at
/// every point and every coordinate.
pub fn compare(
    fixture: &str,
    quantity: &'static str,
    points: &[Vec<f64>],
    value: &dyn Fn(&[f64]) -> Result<Vec<C64>>,
    jet: &dyn Fn(&[f64], usize) -> Result<Vec<C64>>,
) -> Result<Agreement> {
    let mut out = Agreement {
        fixture: fixture.to_string(),
        quantity,
        worst: 0.0,
        at: Vec::new(),
        comparisons: 0,
    };
    for p in points {
        for i in 0..p.len() {
            let shifted = |t: f64| {
                let mut q = p.clone();
                q[i] = t;
                value(&q)
            };
            let oracle = richardson(&shifted, p[i], H)?;
            let err = relative_error(&jet(p, i)?, &oracle);
            out.comparisons += 1;
            if err > out.worst || out.at.is_empty() {
                out.worst = err;
                out.at = p.clone();
            }
        }
    }
    Ok(out)
}

fn flat(v: &CVec3) -> Vec<C64> {
    v.0.to_vec()
}

fn cplx(p: &[f64]) -> Vec<C64> {
    p.iter().map(|&x| re(x)).collect()
}

/// Unit multi-index in two variables plus `extra`.
fn alpha2(i: usize, extra: usize) -> [usize; 2] {
    let mut a = [0, 0];
    a[i] += 1;
    a[extra] += 1;
    a
}

/// Position, tangent and normal levels of a catalog surface.
pub fn surface_levels(name: &str, seed: u64) -> Result<Vec<Agreement>> {
    let s = catalog::surface(name).expect("catalog surface");
    let pts = sample_points(seed, &s.rect, SAMPLES);
    let position = compare(
        name,
        "x",
        &pts,
        &|p| Ok(flat(&s.point(re(p[0]), re(p[1])))),
        &|p, i| Ok(flat(&s.jet(Space::get(2, 1), &cplx(p)).map(|c| c.d1(i)))),
    )?;
    let tangents = compare(
        name,
        "x_u, x_v",
        &pts,
        &|p| {
            let f = frame(&s, p[0], p[1])?;
            Ok([flat(&f.xu), flat(&f.xv)].concat())
        },
        &|p, i| {
            let x = s.jet(Space::get(2, 2), &cplx(p));
            Ok((0..2)
                .flat_map(|j| x.0.iter().map(move |c| c.partial(&alpha2(i, j))).collect::<Vec<_>>())
                .collect())
        },
    )?;
    let normal = compare(
        name,
        "N",
        &pts,
        &|p| Ok(flat(&frame(&s, p[0], p[1])?.normal)),
        &|p, i| {
            let f = frame(&s, p[0], p[1])?;
            Ok(flat(if i == 0 { &f.nu } else { &f.nv }))
        },
    )?;
    Ok(vec![position, tangents, normal])
}

/// Rotation and connection-form levels of an isometric pair.
pub fn pair_levels(x0_name: &str, x_name: &str, seed: u64) -> Result<Vec<Agreement>> {
    let x0 = catalog::surface(x0_name).expect("catalog surface");
    let x = catalog::surface(x_name).expect("catalog surface");
    let label = format!("{x0_name}:{x_name}");
    let pts = sample_points(seed, &x0.rect, SAMPLES);
    let rotation = compare(
        &label,
        "R",
        &pts,
        &|p| Ok(rolling_map(&x0, &x, p[0], p[1])?.r.0.iter().flatten().copied().collect()),
        &|p, i| {
            let rj = rolling_jets(&x0, &x, Space::get(2, 2), &cplx(p), ISOMETRY_TOL)?;
            Ok(rj.r.0.iter().flatten().map(|c| c.d1(i)).collect())
        },
    )?;
    let omega = compare(
        &label,
        "omega",
        &pts,
        &|p| {
            let (w, _) = connection_form(&x0, &x, p[0], p[1])?;
            Ok(w.coeffs.iter().flat_map(flat).collect())
        },
        &|p, i| {
            let (w, _) = pair_omega_field(&x0, &x, p[0], p[1])?;
            Ok(w.coeffs.iter().flat_map(|c| flat(&c.map(|z| z.d1(i)))).collect())
        },
    )?;
    Ok(vec![rotation, omega])
}

/// The affine extension of a probe evaluated at `(u, v)` instead of `(u₀, v₀)`.
fn moved_probe(p: &ConnectionProbe, v0: f64, v: f64) -> ConnectionProbe {
    let (wu, wv) = (&p.omega.coeffs[0], &p.omega.coeffs[1]);
    let slope = wu.cross(wv);
    ConnectionProbe {
        label: p.label.clone(),
        omega: VForm1::new(vec![wu.clone() + slope.scale_c(re(v - v0)), wv.clone()]),
    }
}

fn config_scalars(c: &LocalConfig) -> Vec<Jet> {
    match c {
        LocalConfig::General => vec![],
        LocalConfig::A { bm, bn } => vec![bm.clone(), bn.clone()],
        LocalConfig::B { bm } => vec![bm.clone()],
    }
}

/// Offset, contact normal, configuration scalars and Pfaffian levels of a
/// distribution fixture, in `(u, v, w)`.
pub fn distribution_levels(name: &str, seed: u64) -> Result<Vec<Agreement>> {
    let d = fixtures::parse(name)?;
    let rect = [d.seed.rect[0], d.seed.rect[1], d.w_range];
    let pts = sample_points(seed, &rect, SAMPLES);
    let local = |p: &[f64]| d.local(p[0], p[1], p[2]);
    let jet_vec = |c: &rollgeom::complex3::Vec3<Jet>, i: usize| -> Vec<C64> { c.0.iter().map(|z| z.d1(i)).collect() };
    let offset = compare(name, "V", &pts, &|p| Ok(flat(&local(p)?.v.value())), &|p, i| {
        Ok(jet_vec(&local(p)?.v, i))
    })?;
    let normal = compare(name, "m", &pts, &|p| Ok(flat(&local(p)?.m.value())), &|p, i| {
        Ok(jet_vec(&local(p)?.m, i))
    })?;
    let scalars = compare(
        name,
        "config scalars",
        &pts,
        &|p| Ok(config_scalars(&local(p)?.config).iter().map(|j| j.value()).collect()),
        &|p, i| Ok(config_scalars(&local(p)?.config).iter().map(|j| j.d1(i)).collect()),
    )?;
    let mut theta = Agreement {
        fixture: name.to_string(),
        quantity: "theta",
        worst: 0.0,
        at: Vec::new(),
        comparisons: 0,
    };
    for (k, p0) in pts.iter().enumerate() {
        let base = local(p0)?;
        for probe in probe_set(&base.frame, seed ^ k as u64, 1) {
            let one = [p0.clone()];
            let a = compare(
                name,
                "theta",
                &one,
                &|p| {
                    let th = local(p)?.pfaffian(&moved_probe(&probe, p0[1], p[1]))?;
                    Ok(th.coeffs.iter().map(|c| c.value()).collect())
                },
                &|p, i| Ok(local(p)?.pfaffian(&probe)?.coeffs.iter().map(|c| c.d1(i)).collect()),
            )?;
            theta.comparisons += a.comparisons;
            if a.worst > theta.worst || theta.at.is_empty() {
                theta.worst = a.worst;
                theta.at = a.at;
            }
        }
    }
    Ok(vec![offset, normal, scalars, theta])
}

/// Every level entering the surface, rolling and distribution suites.
pub fn all_levels(seed: u64) -> Result<Vec<Agreement>> {
    let mut out = Vec::new();
    for s in ["sphere", "catenoid", "pseudosphere"] {
        out.extend(surface_levels(s, seed)?);
    }
    out.extend(pair_levels("catenoid", "helicoid", seed)?);
    out.extend(distribution_levels(
        "backlund:pseudosphere:sigma=0.7853981633974483",
        seed,
    )?);
    Ok(out)
}
