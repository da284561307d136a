//! The registered verification targets.

use super::report::{Location, MeasureSpec, ResidualReport, Sites};
use super::{Ctx, Failure};
use crate::complex3::{alpha, alpha_inv, commutator, CMat3, CVec3, Mat3};
use crate::contactdist::{
    bc_relations_residual, cons_residual, extract_abc, fixtures, probe_set, ContactDistribution3,
    Local,
};
use crate::error::GeomError;
use crate::forms::{cross_wedge, dot_sym, fund_identity_residual, VForm1};
use crate::rolling::{
    aom_residual, connection_form, corrupt_omega, flatness_residuals, maurer_cartan_defect,
    omom_residual, other_face_form, pair_omega_field, rolling_jets, rolling_map, ISOMETRY_TOL,
};
use crate::sample;
use crate::scalar::{re, C64};
use crate::surfgeo::{catalog, frame, gauss_identity_residual, SurfacePatch};
use crate::sweep::{map_indices, Grid};
use crate::jet::Space;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureKind {
    /// Seeded random instances; the grid is a single instance count.
    Instances,
    /// A catalog surface.
    Surface,
    /// `x0:x`, two catalog surfaces (a `-rigid` suffix applies the reference motion).
    Pair,
    /// A distribution fixture name.
    Distribution,
}

pub type Runner = fn(&Ctx, &str, &mut ResidualReport) -> Result<(), Failure>;
pub type Controls = fn(&Ctx, &mut ResidualReport) -> Result<(), Failure>;

pub struct TargetInfo {
    pub id: &'static str,
    pub formula: &'static str,
    /// Library operations whose residuals the target reports.
    pub operations: &'static [&'static str],
    pub kind: FixtureKind,
    pub default_fixtures: &'static [&'static str],
    pub default_grid: &'static [usize],
    pub run: Runner,
    pub controls: Controls,
}

const BACKLUND: &str = "backlund:pseudosphere:sigma=0.7853981633974483";
const BACKLUND_N: &str = "backlund:pseudosphere:sigma=0.7853981633974483:n=0.1";
const COMPLEMENTARY: &str = "backlund-general:pseudosphere:sigma=1.5707963267948966";
const PAIR: &str = "catenoid:helicoid";
const DIST_GRID: &[usize] = &[12, 12, 8];
const SURF_GRID: &[usize] = &[16, 16];

pub static TARGETS: &[TargetInfo] = &[
    TargetInfo {
        id: "alg:eq-fund",
        formula: "aᵀω₁ ∧ bᵀω₂ = (a×b)ᵀ(ω₁ ×∧ ω₂) + bᵀω₁ ∧ aᵀω₂",
        operations: &["forms::fund_identity_residual", "forms::cross_wedge"],
        kind: FixtureKind::Instances,
        default_fixtures: &["random"],
        default_grid: &[500],
        run: run_fund,
        controls: controls_fund,
    },
    TargetInfo {
        id: "alg:alpha",
        formula: "α(x)y = x×y, α(x×y) = [α(x), α(y)], ½tr(α(x)ᵀα(y)) = xᵀy, α(Rx) = Rα(x)R⁻¹",
        operations: &["complex3::alpha", "complex3::alpha_inv", "complex3::commutator"],
        kind: FixtureKind::Instances,
        default_fixtures: &["random"],
        default_grid: &[1000],
        run: run_alpha,
        controls: controls_alpha,
    },
    TargetInfo {
        id: "surf:gauss",
        formula: "½ dN₀ ×∧ dN₀ = K |∂u x₀ × ∂v x₀| N₀ du∧dv",
        operations: &["surfgeo::gauss_identity_residual", "surfgeo::frame"],
        kind: FixtureKind::Surface,
        default_fixtures: &["sphere", "catenoid", "pseudosphere"],
        default_grid: SURF_GRID,
        run: run_gauss,
        controls: controls_gauss,
    },
    TargetInfo {
        id: "roll:eq-omjk",
        formula: "N₀ × R⁻¹dR N₀ = ω, ω_j = (s_j2 ∂u x₀ − s_j1 ∂v x₀)/|∂u x₀ × ∂v x₀|, R⁻¹dR = α(ω)",
        operations: &[
            "rolling::rolling_map",
            "rolling::connection_form",
            "rolling::maurer_cartan_defect",
        ],
        kind: FixtureKind::Pair,
        default_fixtures: &[PAIR],
        default_grid: SURF_GRID,
        run: run_omjk,
        controls: controls_omjk,
    },
    TargetInfo {
        id: "roll:eq-om",
        formula: "dω + ½ ω ×∧ ω = 0, ω ×∧ dx₀ = 0, N₀ᵀω = 0",
        operations: &["rolling::pair_omega_field", "rolling::flatness_residuals"],
        kind: FixtureKind::Pair,
        default_fixtures: &[PAIR],
        default_grid: SURF_GRID,
        run: run_om,
        controls: controls_om,
    },
    TargetInfo {
        id: "roll:eq-omom",
        formula: "½ ω ×∧ ω = (dN₀ᵀ ∧ ω) N₀",
        operations: &["rolling::omom_residual"],
        kind: FixtureKind::Pair,
        default_fixtures: &[PAIR],
        default_grid: SURF_GRID,
        run: run_omom,
        controls: controls_omom,
    },
    TargetInfo {
        id: "roll:eq-om-prime",
        formula: "ω′ = −ω − 2 N₀ × dN₀",
        operations: &["rolling::other_face_form", "rolling::RollingJets::omega_prime_via_reflection"],
        kind: FixtureKind::Pair,
        default_fixtures: &[PAIR],
        default_grid: SURF_GRID,
        run: run_om_prime,
        controls: controls_om_prime,
    },
    TargetInfo {
        id: "roll:eq-aom",
        formula: "a = λ N₀×dx₀ + ν N₀: aᵀ ⊙ dx₀ = 0 and aᵀ ∧ ω = 0",
        operations: &["rolling::aom_residual"],
        kind: FixtureKind::Pair,
        default_fixtures: &[PAIR],
        default_grid: SURF_GRID,
        run: run_aom,
        controls: controls_aom,
    },
    TargetInfo {
        id: "dist:genericity",
        formula: "mᵀ∂wV ≠ 0, |(m×V)×N₀|² ≠ 0",
        operations: &["contactdist::Local::genericity"],
        kind: FixtureKind::Distribution,
        default_fixtures: &[BACKLUND],
        default_grid: DIST_GRID,
        run: run_genericity,
        controls: controls_genericity,
    },
    TargetInfo {
        id: "dist:pfaffian",
        formula: "mᵀ(ω×V + d(V+x₀) + ∂wV dw) = 0, Θ ∧ dΘ = 0 for Θ = dw − θ",
        operations: &[
            "contactdist::Local::dw_connection",
            "contactdist::Local::integrability_residual",
            "contactdist::Local::frobenius_residual",
        ],
        kind: FixtureKind::Distribution,
        default_fixtures: &[BACKLUND],
        default_grid: DIST_GRID,
        run: run_pfaffian,
        controls: controls_pfaffian,
    },
    TargetInfo {
        id: "dist:abc",
        formula: "F(ω) = A + B ∧ Vᵀ(ω×N₀ + dN₀) + C ∧ (N₀×V)ᵀ(ω×N₀ + dN₀), A = 0",
        operations: &[
            "contactdist::Local::compatibility_form",
            "contactdist::extract_abc",
            "contactdist::bc_relations_residual",
        ],
        kind: FixtureKind::Distribution,
        default_fixtures: &[BACKLUND],
        default_grid: DIST_GRID,
        run: run_abc,
        controls: controls_abc,
    },
    TargetInfo {
        id: "dist:n-condition",
        formula: "𝐧 N₀ᵀ[∂wV × d(V+x₀)] ∧ dx₀ᵀ(N₀×V) = 0",
        operations: &["contactdist::Local::n_condition_residual", "contactdist::Local::b_coefficient"],
        kind: FixtureKind::Distribution,
        default_fixtures: &[BACKLUND],
        default_grid: DIST_GRID,
        run: run_n_condition,
        controls: controls_n_condition,
    },
    TargetInfo {
        id: "dist:cons",
        formula: "d(V+x₀)ᵀ(I − N₀mᵀ/mᵀN₀)ᵀ ⊙ β = 0",
        operations: &["contactdist::cons_residual"],
        kind: FixtureKind::Distribution,
        default_fixtures: &[BACKLUND],
        default_grid: DIST_GRID,
        run: run_cons,
        controls: controls_cons,
    },
    TargetInfo {
        id: "dist:case-b",
        formula: "𝐦 N₀ᵀ[∂wV × d(V+x₀)]/(Vᵀ∂wV)² = b dx₀ᵀ(N₀×V)/|N₀×V|²",
        operations: &["contactdist::Local::case_b_relation"],
        kind: FixtureKind::Distribution,
        default_fixtures: &["caseb:plane"],
        default_grid: &[12, 12, 8],
        run: run_case_b,
        controls: controls_case_b,
    },
];

pub fn find(id: &str) -> Option<&'static TargetInfo> {
    TARGETS.iter().find(|t| t.id == id)
}

// ---- helpers ----

/// The entry of largest magnitude (the first on ties), zero when empty.
fn peak(it: impl IntoIterator<Item = C64>) -> C64 {
    let mut best = re(0.0);
    for z in it {
        if z.norm() > best.norm() || z.norm().is_nan() {
            best = z;
        }
    }
    best
}

fn vpeak(v: &CVec3) -> C64 {
    peak(v.0.iter().copied())
}

fn mpeak(a: &CMat3, b: &CMat3) -> C64 {
    peak((0..9).map(|k| a.0[k / 3][k % 3] - b.0[k / 3][k % 3]))
}

fn fpeak(f: &VForm1<CVec3>) -> C64 {
    peak(f.coeffs.iter().map(vpeak))
}

/// Per-sample seed: splitmix-style mixing of `(seed, salt, k)`.
pub fn mix(seed: u64, salt: u64, k: usize) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-point values keyed by measure index.
type PointValues = Vec<(usize, C64)>;

fn evaluate(
    specs: &[MeasureSpec],
    fixture: &str,
    points: &[PointValues],
    sites: Sites,
) -> Vec<super::report::Measure> {
    let mut per: Vec<Vec<(usize, C64)>> = vec![Vec::new(); specs.len()];
    for (k, vals) in points.iter().enumerate() {
        for &(m, z) in vals {
            per[m].push((k, z));
        }
    }
    specs
        .iter()
        .zip(&per)
        .map(|(s, v)| s.evaluate(fixture, v, sites))
        .collect()
}

fn first_error<T>(
    results: Vec<Result<T, GeomError>>,
    fixture: &str,
    locate: impl Fn(usize) -> Location,
) -> Result<Vec<T>, Failure> {
    let mut out = Vec::with_capacity(results.len());
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(t) => out.push(t),
            Err(e) => return Err(Failure::at(e, fixture, Some(locate(k)))),
        }
    }
    Ok(out)
}

fn sweep_grid(
    cx: &Ctx,
    grid: &Grid,
    fixture: &str,
    f: impl Fn(usize, &[f64]) -> Result<PointValues, GeomError> + Sync + Send,
) -> Result<Vec<PointValues>, Failure> {
    let results = map_indices(grid.len(), cx.exec(), |k| f(k, &grid.point(k)));
    first_error(results, fixture, |k| Sites::Grid(grid).locate(k))
}

fn sweep_instances(
    cx: &Ctx,
    n: usize,
    fixture: &str,
    f: impl Fn(usize) -> Result<PointValues, GeomError> + Sync + Send,
) -> Result<Vec<PointValues>, Failure> {
    let results = map_indices(n, cx.exec(), f);
    first_error(results, fixture, |k| Sites::Instances.locate(k))
}

fn check(cx: &Ctx, report: &mut ResidualReport, specs: Vec<MeasureSpec>, fixture: &str, points: &[PointValues], sites: Sites) {
    let specs: Vec<MeasureSpec> = specs.into_iter().map(|s| cx.tol.apply(s, true)).collect();
    report.checks.extend(evaluate(&specs, fixture, points, sites));
}

fn control(cx: &Ctx, report: &mut ResidualReport, specs: Vec<MeasureSpec>, fixture: &str, points: &[PointValues], sites: Sites) {
    let specs: Vec<MeasureSpec> = specs.into_iter().map(|s| cx.tol.apply(s, false)).collect();
    report.negative_controls.extend(evaluate(&specs, fixture, points, sites));
}

fn instances(cx: &Ctx) -> Result<usize, Failure> {
    let dims = cx.dims();
    match dims.as_slice() {
        [n] if *n >= 2 => Ok(*n),
        _ => Err(Failure::usage(format!(
            "{} takes a single instance count (≥ 2) as its grid, got {dims:?}",
            cx.info.id
        ))),
    }
}

// ---- algebraic identities ----

struct FundInstance {
    a: CVec3,
    b: CVec3,
    w1: VForm1<CVec3>,
    w2: VForm1<CVec3>,
}

fn fund_instance(seed: u64, k: usize) -> FundInstance {
    let mut r = sample::rng(mix(seed, 1, k));
    FundInstance {
        a: sample::cvec3(&mut r),
        b: sample::cvec3(&mut r),
        w1: sample::vform1(&mut r, 3),
        w2: sample::vform1(&mut r, 3),
    }
}

fn run_fund(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let n = instances(cx)?;
    let points = sweep_instances(cx, n, fixture, |k| {
        let i = fund_instance(cx.seed(), k);
        let r = fund_identity_residual(&i.a, &i.b, &i.w1, &i.w2)?;
        Ok(vec![(0, peak(r.coeffs))])
    })?;
    let specs = vec![MeasureSpec::at_most("fund-identity", TARGETS[0].formula, 1e-12)];
    check(cx, report, specs, fixture, &points, Sites::Instances);
    Ok(())
}

fn controls_fund(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let n = instances(cx)?;
    let points = sweep_instances(cx, n, "random", |k| {
        let i = fund_instance(cx.seed(), k);
        let r = fund_identity_residual(&i.a, &i.b, &i.w1, &i.w2)?;
        let cw = cross_wedge(&i.w1, &i.w2)?.dot_left(&i.a.cross(&i.b));
        Ok(vec![(0, peak(r.add(&cw).coeffs))])
    })?;
    let specs = vec![MeasureSpec::max_at_least(
        "fund-without-cross-term",
        "aᵀω₁ ∧ bᵀω₂ − bᵀω₁ ∧ aᵀω₂",
        1e-3,
    )];
    control(cx, report, specs, "random", &points, Sites::Instances);
    Ok(())
}

fn alpha_values(seed: u64, k: usize) -> Result<PointValues, GeomError> {
    let mut r = sample::rng(mix(seed, 2, k));
    let x = sample::cvec3(&mut r);
    let y = sample::cvec3(&mut r);
    let q = sample::rotation(&mut r);
    let (ax, ay) = (alpha(&x), alpha(&y));
    let xy = x.cross(&y);
    let explicit = Mat3::outer(&y, &x) - Mat3::outer(&x, &y);
    let conj = q.mul_mat(&ax).mul_mat(&q.inverse());
    Ok(vec![
        (0, vpeak(&(ax.mul_vec(&y) - xy.clone()))),
        (1, mpeak(&alpha(&xy), &explicit)),
        (2, mpeak(&alpha(&xy), &commutator(&ax, &ay))),
        (3, ax.inner(&ay) - x.dot(&y)),
        (4, mpeak(&alpha(&q.mul_vec(&x)), &conj)),
        (5, vpeak(&(alpha_inv(&ax, 1e-12)? - x))),
    ])
}

fn run_alpha(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let n = instances(cx)?;
    let points = sweep_instances(cx, n, fixture, |k| alpha_values(cx.seed(), k))?;
    let specs = vec![
        MeasureSpec::at_most("alpha-apply", "α(x)y − x×y", 1e-10),
        MeasureSpec::at_most("alpha-cross-explicit", "α(x×y) − (yxᵀ − xyᵀ)", 1e-10),
        MeasureSpec::at_most("alpha-commutator", "α(x×y) − [α(x), α(y)]", 1e-10),
        MeasureSpec::at_most("alpha-inner", "½tr(α(x)ᵀα(y)) − xᵀy", 1e-10),
        MeasureSpec::at_most("alpha-equivariance", "α(Rx) − Rα(x)R⁻¹", 1e-10),
        MeasureSpec::at_most("alpha-round-trip", "α⁻¹(α(x)) − x", 1e-10),
    ];
    check(cx, report, specs, fixture, &points, Sites::Instances);
    Ok(())
}

fn controls_alpha(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let n = instances(cx)?;
    let points = sweep_instances(cx, n, "random", |k| {
        let mut r = sample::rng(mix(cx.seed(), 2, k));
        let x = sample::cvec3(&mut r);
        let y = sample::cvec3(&mut r);
        let reversed = commutator(&alpha(&y), &alpha(&x));
        Ok(vec![(0, mpeak(&alpha(&x.cross(&y)), &reversed))])
    })?;
    let specs = vec![MeasureSpec::max_at_least(
        "alpha-reversed-commutator",
        "α(x×y) − [α(y), α(x)]",
        1e-3,
    )];
    control(cx, report, specs, "random", &points, Sites::Instances);
    Ok(())
}

// ---- surfaces ----

fn surface(name: &str) -> Result<SurfacePatch, Failure> {
    let patch = match name.strip_suffix("-rigid") {
        Some(base) => catalog::rigid(base),
        None => catalog::surface(name),
    };
    patch.ok_or_else(|| {
        Failure::usage(format!(
            "unknown surface {name:?}; catalog: {} (append -rigid for the moved copy)",
            catalog::NAMES.join(", ")
        ))
    })
}

/// Known constant curvature of catalog surfaces.
fn known_curvature(name: &str) -> Option<f64> {
    match name.trim_end_matches("-rigid") {
        "sphere" => Some(1.0),
        "pseudosphere" => Some(-1.0),
        "plane" | "cylinder" => Some(0.0),
        _ => None,
    }
}

fn run_gauss(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let s = surface(fixture)?;
    let grid = cx.grid(s.rect.to_vec(), 2)?;
    let k_known = known_curvature(fixture);
    let points = sweep_grid(cx, &grid, fixture, |_, p| {
        let f = frame(&s, p[0], p[1])?;
        let mut out = vec![
            (0, vpeak(&gauss_identity_residual(&s, p[0], p[1])?)),
            (1, peak([f.normal.dot(&f.xu), f.normal.dot(&f.xv)])),
            (2, f.normal.dot(&f.normal) - re(1.0)),
        ];
        if let Some(k) = k_known {
            out.push((3, f.curvature - re(k)));
        }
        Ok(out)
    })?;
    let mut specs = vec![
        MeasureSpec::at_most("gauss-identity", TARGETS[2].formula, 1e-8),
        MeasureSpec::at_most("normal-orthogonality", "N₀ᵀ∂u x₀, N₀ᵀ∂v x₀", 1e-11),
        MeasureSpec::at_most("normal-unit", "N₀ᵀN₀ − 1", 1e-11),
    ];
    if let Some(k) = k_known {
        specs.push(MeasureSpec::at_most("curvature", &format!("K − ({k})"), 1e-9));
    }
    report.grids.push((&grid).into());
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_gauss(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let name = "pseudosphere";
    let s = surface(name)?;
    let grid = cx.control_grid(s.rect.to_vec(), 2)?;
    let points = sweep_grid(cx, &grid, name, |_, p| {
        let f = frame(&s, p[0], p[1])?;
        let r = gauss_identity_residual(&s, p[0], p[1])?;
        let bump = f.normal.scale_c(f.curvature * f.area * 0.1);
        Ok(vec![(0, vpeak(&(r - bump)))])
    })?;
    let specs = vec![MeasureSpec::max_at_least(
        "gauss-with-curvature-scaled",
        "½ dN₀ ×∧ dN₀ − 1.1 K |∂u x₀ × ∂v x₀| N₀",
        1e-3,
    )];
    control(cx, report, specs, name, &points, Sites::Grid(&grid));
    Ok(())
}

// ---- rolling ----

fn pair(name: &str) -> Result<(SurfacePatch, SurfacePatch), Failure> {
    match name.split(':').collect::<Vec<_>>().as_slice() {
        [a, b] => Ok((surface(a)?, surface(b)?)),
        _ => Err(Failure::usage(format!("pair fixtures are x0:x, got {name:?}"))),
    }
}

fn pair_grid(cx: &Ctx, x0: &SurfacePatch, control: bool) -> Result<Grid, Failure> {
    if control {
        cx.control_grid(x0.rect.to_vec(), 2)
    } else {
        cx.grid(x0.rect.to_vec(), 2)
    }
}

fn run_omjk(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let (x0, x) = pair(fixture)?;
    let grid = pair_grid(cx, &x0, false)?;
    let flips = std::sync::atomic::AtomicUsize::new(0);
    let points = sweep_grid(cx, &grid, fixture, |_, p| {
        let st = rolling_map(&x0, &x, p[0], p[1])?;
        if st.flipped {
            flips.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
        let (orth, det) = st.rotation_defects();
        let (by_r, by_s) = connection_form(&x0, &x, p[0], p[1])?;
        let space = Space::get(2, 2);
        let rj = rolling_jets(&x0, &x, space, &[re(p[0]), re(p[1])], ISOMETRY_TOL)?;
        Ok(vec![
            (0, re(st.isometry_defect)),
            (1, re(orth)),
            (2, re(det)),
            (3, re(st.transport_defect)),
            (4, fpeak(&by_r.sub(&by_s))),
            (5, re(maurer_cartan_defect(&rj))),
        ])
    })?;
    let specs = vec![
        MeasureSpec::at_most("isometry", "|dx|² − |dx₀|²", 1e-10),
        MeasureSpec::at_most("orthogonality", "RᵀR − I", 1e-10),
        MeasureSpec::at_most("determinant", "det R − 1", 1e-10),
        MeasureSpec::at_most("transport", "R dx₀ − dx", 1e-10),
        MeasureSpec::at_most("omega-two-way", "N₀ × R⁻¹dR N₀ − ω(s)", 1e-8),
        MeasureSpec::at_most("maurer-cartan", "R⁻¹dR − α(ω)", 1e-8),
    ];
    let flips = flips.into_inner();
    if flips > 0 {
        report
            .notes
            .push(format!("{fixture}: normal column flipped to reach det R = 1 at {flips} points"));
    }
    report.grids.push((&grid).into());
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_omjk(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let (x0, x) = pair(PAIR)?;
    let grid = pair_grid(cx, &x0, true)?;
    let points = sweep_grid(cx, &grid, PAIR, |_, p| {
        let (field, fj) = pair_omega_field(&x0, &x, p[0], p[1])?;
        let bad = corrupt_omega(&field, &fj, 0.1).map(|w| w.value());
        let (_, by_s) = connection_form(&x0, &x, p[0], p[1])?;
        Ok(vec![(0, fpeak(&bad.sub(&by_s)))])
    })?;
    let specs = vec![MeasureSpec::max_at_least(
        "omega-two-way-s12-corrupted",
        "ω with s₁₂ ↦ s₁₂ + 0.1 against ω(s)",
        1e-3,
    )];
    control(cx, report, specs, PAIR, &points, Sites::Grid(&grid));
    Ok(())
}

fn run_om(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let (x0, x) = pair(fixture)?;
    let grid = pair_grid(cx, &x0, false)?;
    let points = sweep_grid(cx, &grid, fixture, |_, p| {
        let (field, fj) = pair_omega_field(&x0, &x, p[0], p[1])?;
        let fl = flatness_residuals(&field, &fj)?;
        Ok(vec![
            (0, peak(fl.r1.coeffs.iter().map(vpeak))),
            (1, peak(fl.r2.coeffs.iter().map(vpeak))),
            (2, peak(fl.r3.coeffs.iter().copied())),
        ])
    })?;
    let specs = vec![
        MeasureSpec::at_most("flatness", "dω + ½ ω ×∧ ω", 1e-7),
        MeasureSpec::at_most("symmetry", "ω ×∧ dx₀", 1e-7),
        MeasureSpec::at_most("tangency", "N₀ᵀω", 1e-7),
    ];
    report.grids.push((&grid).into());
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_om(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let (x0, x) = pair(PAIR)?;
    let grid = pair_grid(cx, &x0, true)?;
    let points = sweep_grid(cx, &grid, PAIR, |_, p| {
        let (field, fj) = pair_omega_field(&x0, &x, p[0], p[1])?;
        let fl = flatness_residuals(&corrupt_omega(&field, &fj, 0.1), &fj)?;
        Ok(vec![(0, peak(fl.r2.coeffs.iter().map(vpeak)))])
    })?;
    let specs = vec![MeasureSpec::max_at_least(
        "symmetry-s12-corrupted",
        "ω ×∧ dx₀ with s₁₂ ↦ s₁₂ + 0.1",
        1e-3,
    )];
    control(cx, report, specs, PAIR, &points, Sites::Grid(&grid));
    Ok(())
}

fn omom_at(x0: &SurfacePatch, x: &SurfacePatch, p: &[f64], corrupt: f64) -> Result<C64, GeomError> {
    let (field, fj) = pair_omega_field(x0, x, p[0], p[1])?;
    let field = if corrupt != 0.0 { corrupt_omega(&field, &fj, corrupt) } else { field };
    let w = field.map(|c| c.value());
    let r = omom_residual(&w, &fj.normal.value(), &fj.dn().uv().map(|c| c.value()))?;
    Ok(peak(r.coeffs.iter().map(vpeak)))
}

fn run_omom(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let (x0, x) = pair(fixture)?;
    let grid = pair_grid(cx, &x0, false)?;
    let points = sweep_grid(cx, &grid, fixture, |_, p| Ok(vec![(0, omom_at(&x0, &x, p, 0.0)?)]))?;
    let specs = vec![MeasureSpec::at_most("omom", TARGETS[5].formula, 1e-7)];
    report.grids.push((&grid).into());
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_omom(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let (x0, x) = pair(PAIR)?;
    let grid = pair_grid(cx, &x0, true)?;
    let points = sweep_grid(cx, &grid, PAIR, |_, p| Ok(vec![(0, omom_at(&x0, &x, p, 0.1)?)]))?;
    let specs = vec![MeasureSpec::max_at_least(
        "omom-s12-corrupted",
        "½ ω ×∧ ω − (dN₀ᵀ ∧ ω) N₀ with s₁₂ ↦ s₁₂ + 0.1",
        1e-3,
    )];
    control(cx, report, specs, PAIR, &points, Sites::Grid(&grid));
    Ok(())
}

fn run_om_prime(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let (x0, x) = pair(fixture)?;
    let grid = pair_grid(cx, &x0, false)?;
    let points = sweep_grid(cx, &grid, fixture, |_, p| {
        let space = Space::get(2, crate::rolling::PAIR_DEGREE);
        let rj = rolling_jets(&x0, &x, space, &[re(p[0]), re(p[1])], ISOMETRY_TOL)?;
        let omega = rj.omega();
        let n0 = rj.x0.normal.clone();
        let dn0 = rj.x0.dn().uv();
        let prime = other_face_form(&omega, &n0, &dn0);
        let via_reflection = rj.omega_prime_via_reflection();
        let twice = other_face_form(&prime, &n0, &dn0);
        let val = |f: &VForm1<crate::complex3::Vec3<crate::jet::Jet>>| f.map(|c| c.value());
        let flat = flatness_residuals(&prime, &rj.x0)?;
        Ok(vec![
            (0, fpeak(&val(&prime).sub(&val(&via_reflection)))),
            (1, fpeak(&val(&twice).sub(&val(&omega)))),
            (2, peak(flat.r1.coeffs.iter().map(vpeak))),
        ])
    })?;
    let specs = vec![
        MeasureSpec::at_most("two-path", "ω′ by formula − ω′ from the reflected rolling", 1e-8),
        MeasureSpec::at_most("involution", "(ω′)′ − ω", 1e-10),
        MeasureSpec::at_most("flatness-prime", "dω′ + ½ ω′ ×∧ ω′", 1e-7),
    ];
    report.grids.push((&grid).into());
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_om_prime(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let (x0, x) = pair(PAIR)?;
    let grid = pair_grid(cx, &x0, true)?;
    let points = sweep_grid(cx, &grid, PAIR, |_, p| {
        let space = Space::get(2, crate::rolling::PAIR_DEGREE);
        let rj = rolling_jets(&x0, &x, space, &[re(p[0]), re(p[1])], ISOMETRY_TOL)?;
        let via_reflection = rj.omega_prime_via_reflection().map(|c| c.value());
        let minus = rj.omega().map(|c| -c.value());
        Ok(vec![(0, fpeak(&minus.sub(&via_reflection)))])
    })?;
    let specs = vec![MeasureSpec::max_at_least(
        "two-path-without-normal-term",
        "−ω − ω′ from the reflected rolling",
        1e-3,
    )];
    control(cx, report, specs, PAIR, &points, Sites::Grid(&grid));
    Ok(())
}

fn witness(seed: u64, k: usize) -> (C64, [C64; 2]) {
    let mut r = sample::rng(mix(seed, 3, k));
    (sample::c64(&mut r), [sample::c64(&mut r), sample::c64(&mut r)])
}

fn run_aom(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let (x0, x) = pair(fixture)?;
    let grid = pair_grid(cx, &x0, false)?;
    let points = sweep_grid(cx, &grid, fixture, |k, p| {
        let st = rolling_map(&x0, &x, p[0], p[1])?;
        let f0 = frame(&x0, p[0], p[1])?;
        let (lambda, nu) = witness(cx.seed(), k);
        let (sym, w) = aom_residual(&st.omega, &f0, lambda, nu)?;
        let (_, w_prime) = aom_residual(&st.omega_prime, &f0, lambda, nu)?;
        Ok(vec![(0, peak([sym.get(0, 0), sym.get(0, 1), sym.get(1, 1)])), (1, w), (2, w_prime)])
    })?;
    let specs = vec![
        MeasureSpec::at_most("annihilates-dx0", "aᵀ ⊙ dx₀", 1e-8),
        MeasureSpec::at_most("annihilates-omega", "aᵀ ∧ ω", 1e-8),
        MeasureSpec::at_most("annihilates-omega-prime", "aᵀ ∧ ω′", 1e-8),
    ];
    report.grids.push((&grid).into());
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_aom(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let (x0, _) = pair(PAIR)?;
    let grid = pair_grid(cx, &x0, true)?;
    let points = sweep_grid(cx, &grid, PAIR, |k, p| {
        let f0 = frame(&x0, p[0], p[1])?;
        let (lambda, nu) = witness(cx.seed(), k);
        // tangent instead of conormal directions
        let a = VForm1::new(vec![
            f0.xu.scale_c(lambda) + f0.normal.scale_c(nu[0]),
            f0.xv.scale_c(lambda) + f0.normal.scale_c(nu[1]),
        ]);
        let sym = dot_sym(&a, &f0.dx())?;
        Ok(vec![(0, peak([sym.get(0, 0), sym.get(0, 1), sym.get(1, 1)]))])
    })?;
    let specs = vec![MeasureSpec::max_at_least(
        "tangent-witness",
        "(λ dx₀ + ν N₀)ᵀ ⊙ dx₀",
        1e-3,
    )];
    control(cx, report, specs, PAIR, &points, Sites::Grid(&grid));
    Ok(())
}

// ---- distributions ----

fn distribution(name: &str) -> Result<ContactDistribution3, Failure> {
    fixtures::parse(name).map_err(|e| match e {
        GeomError::MalformedInput(m) => Failure::usage(m),
        other => Failure::at(other, name, None),
    })
}

fn dist_rect(d: &ContactDistribution3) -> Vec<(f64, f64)> {
    vec![d.seed.rect[0], d.seed.rect[1], d.w_range]
}

/// Sweeps a distribution over its grid, handing each point its [`Local`].
fn sweep_dist(
    cx: &Ctx,
    name: &str,
    control: bool,
    f: impl Fn(usize, &Local) -> Result<PointValues, GeomError> + Sync + Send,
) -> Result<(Grid, Vec<PointValues>), Failure> {
    let d = distribution(name)?;
    let grid = if control {
        cx.control_grid(dist_rect(&d), 3)?
    } else {
        cx.grid(dist_rect(&d), 3)?
    };
    let points = sweep_grid(cx, &grid, name, |k, p| f(k, &d.local(p[0], p[1], p[2])?))?;
    Ok((grid, points))
}

fn run_genericity(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let (grid, points) = sweep_dist(cx, fixture, false, |_, l| {
        let (a, b) = l.genericity();
        Ok(vec![(0, a), (1, b)])
    })?;
    let specs = vec![
        MeasureSpec::min_at_least("pfaffian-denominator", "mᵀ∂wV", 1e-6),
        MeasureSpec::min_at_least("leaf-transversality", "|(m×V)×N₀|²", 1e-6),
    ];
    report.grids.push((&grid).into());
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_genericity(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let (grid, points) = sweep_dist(cx, COMPLEMENTARY, true, |_, l| Ok(vec![(0, l.genericity().1)]))?;
    let specs = vec![MeasureSpec::at_most(
        "complementary-transform-transversality",
        "|(m×V)×N₀|² at σ = π/2",
        1e-12,
    )];
    control(cx, report, specs, COMPLEMENTARY, &points, Sites::Grid(&grid));
    Ok(())
}

fn probes(cx: &Ctx, l: &Local, k: usize, salt: u64, count: usize) -> Vec<crate::rolling::ConnectionProbe> {
    probe_set(&l.frame, mix(cx.seed(), salt, k), count)
}

fn run_pfaffian(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let (grid, points) = sweep_dist(cx, fixture, false, |k, l| {
        let mut out = Vec::new();
        for p in probes(cx, l, k, 4, 2) {
            let dw = l.dw_connection(&p)?;
            out.push((0, peak(l.integrability_residual(&p, &dw)?.coeffs)));
            out.push((1, l.frobenius_residual(&p)?));
        }
        Ok(out)
    })?;
    let specs = vec![
        MeasureSpec::at_most("back-substitution", "mᵀ(ω×V + d(V+x₀) + ∂wV dw)", 1e-9),
        MeasureSpec::at_most("frobenius", "Θ ∧ dΘ, Θ = dw − θ", 1e-7),
    ];
    report.grids.push((&grid).into());
    report.notes.push(format!(
        "{fixture}: each point uses the zero, mirror and two random quadric probes with their other faces"
    ));
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_pfaffian(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let (grid, points) = sweep_dist(cx, BACKLUND_N, true, |k, l| {
        let mut out = Vec::new();
        for p in probes(cx, l, k, 4, 2) {
            out.push((0, l.frobenius_residual(&p)?));
        }
        Ok(out)
    })?;
    let specs = vec![MeasureSpec::max_at_least("frobenius-n-injected", "Θ ∧ dΘ with 𝐧 = 0.1", 1e-3)];
    control(cx, report, specs, BACKLUND_N, &points, Sites::Grid(&grid));
    Ok(())
}

fn run_abc(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let conditions = std::sync::Mutex::new(0.0f64);
    let (grid, points) = sweep_dist(cx, fixture, false, |k, l| {
        let first = probes(cx, l, k, 5, 2);
        let dec = extract_abc(l, &first[2..])?;
        let second = probes(cx, l, k, 6, 3);
        let alt = extract_abc(l, &second[2..])?;
        let bc = bc_relations_residual(&dec, &l.frame, &l.v.value())?;
        let mut c = conditions.lock().expect("no poisoning");
        *c = c.max(dec.condition);
        drop(c);
        let moved = peak(
            [dec.a - alt.a]
                .into_iter()
                .chain(dec.b.coeffs.iter().zip(&alt.b.coeffs).map(|(x, y)| x - y))
                .chain(dec.c.coeffs.iter().zip(&alt.c.coeffs).map(|(x, y)| x - y)),
        );
        Ok(vec![
            (0, dec.a),
            (1, re(dec.reconstruction)),
            (2, re(dec.face_symmetry)),
            (3, re(bc.max_abs())),
            (4, re(bc.kernel_sym)),
            (5, moved),
        ])
    })?;
    let specs = vec![
        MeasureSpec::at_most("A", "½(F(0) + F(−2N₀×dN₀))", 1e-7),
        MeasureSpec::at_most("reconstruction", "A + B∧X + C∧Y − F over all probes", 1e-7),
        MeasureSpec::at_most("face-symmetry", "F(ω) + F(ω′) − 2A", 1e-7),
        MeasureSpec::at_most(
            "bc-relations",
            "(BV + C N₀×V)ᵀ ∧ dN₀, (B N₀×V − C V)ᵀ ⊙ dx₀, C = a(V₂, −V₁), BV + C N₀×V = b dx₀",
            1e-7,
        ),
        MeasureSpec::at_most("kernel-relations", "(B N₀×V − C V)ᵀ ⊙ dx₀ on the unobservable direction", 1e-7),
        MeasureSpec::at_most("probe-independence", "(A, B, C) from two probe sets", 1e-7),
    ];
    report.grids.push((&grid).into());
    report.notes.push(format!(
        "{fixture}: largest probe-system condition estimate {:.3e}; B, C are the minimum-norm solution",
        conditions.into_inner().expect("no poisoning")
    ));
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_abc(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let (grid, points) = sweep_dist(cx, BACKLUND_N, true, |k, l| {
        let extra = probes(cx, l, k, 5, 2);
        Ok(vec![(0, extract_abc(l, &extra[2..])?.a)])
    })?;
    let spec = MeasureSpec::max_at_least("A-n-injected", "A with 𝐧 = 0.1", 1e-3);
    control(cx, report, vec![spec], BACKLUND_N, &points, Sites::Grid(&grid));

    let (grid, points) = sweep_dist(cx, BACKLUND, true, |k, l| {
        let extra = probes(cx, l, k, 5, 2);
        let mut dec = extract_abc(l, &extra[2..])?;
        let mut r = sample::rng(mix(cx.seed(), 7, k));
        dec.b = VForm1::new(vec![sample::c64(&mut r), sample::c64(&mut r)]);
        dec.c = VForm1::new(vec![sample::c64(&mut r), sample::c64(&mut r)]);
        Ok(vec![(0, re(bc_relations_residual(&dec, &l.frame, &l.v.value())?.max_abs()))])
    })?;
    let spec = MeasureSpec::max_at_least("bc-relations-random", "relations for random B, C", 1e-3);
    control(cx, report, vec![spec], BACKLUND, &points, Sites::Grid(&grid));
    Ok(())
}

/// Number of random configuration-A families used by the 𝐧 control.
pub const N_CONTROL_FAMILIES: u64 = 5;

fn run_n_condition(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let (grid, points) = sweep_dist(cx, fixture, false, |_, l| {
        let b = l.b_coefficient()?;
        Ok(vec![(0, l.n_condition_residual()?), (1, b.mismatch)])
    })?;
    let specs = vec![
        MeasureSpec::at_most("n-condition", TARGETS[11].formula, 1e-8),
        MeasureSpec::at_most("b-mismatch", "b from the du and dv components", 1e-8),
    ];
    report.grids.push((&grid).into());
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_n_condition(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let mut names = vec![BACKLUND_N.to_string()];
    names.extend(
        (0..N_CONTROL_FAMILIES).map(|i| format!("random:pseudosphere:{}:n=0.1", cx.seed().wrapping_add(i))),
    );
    for name in &names {
        let (grid, points) = sweep_dist(cx, name, true, |_, l| Ok(vec![(0, l.n_condition_residual()?)]))?;
        let spec = MeasureSpec::fraction_above("n-injected", "𝐧-condition with 𝐧 = 0.1", 1e-4, 0.9);
        control(cx, report, vec![spec], name, &points, Sites::Grid(&grid));
    }
    Ok(())
}

fn run_cons(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let (grid, points) = sweep_dist(cx, fixture, false, |_, l| {
        let c = cons_residual(l)?;
        Ok(vec![(0, peak([c.get(0, 0), c.get(0, 1), c.get(1, 1)]))])
    })?;
    let specs = vec![MeasureSpec::at_most("cons", TARGETS[12].formula, 1e-6)];
    report.grids.push((&grid).into());
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_cons(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let (grid, points) = sweep_dist(cx, BACKLUND_N, true, |_, l| {
        let c = cons_residual(l)?;
        Ok(vec![(0, peak([c.get(0, 0), c.get(0, 1), c.get(1, 1)]))])
    })?;
    let spec = MeasureSpec::max_at_least("cons-n-injected", "cons residual with 𝐧 = 0.1", 1e-3);
    control(cx, report, vec![spec], BACKLUND_N, &points, Sites::Grid(&grid));
    Ok(())
}

fn run_case_b(cx: &Ctx, fixture: &str, report: &mut ResidualReport) -> Result<(), Failure> {
    let parallel = std::sync::atomic::AtomicUsize::new(0);
    let (grid, points) = sweep_dist(cx, fixture, false, |_, l| {
        let r = l.case_b_relation()?;
        if r.parallel {
            parallel.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
        Ok(vec![(0, peak(r.residual.coeffs.iter().copied()))])
    })?;
    let specs = vec![MeasureSpec::at_most("case-b-fit", TARGETS[13].formula, 1e-7)];
    let parallel = parallel.into_inner();
    if parallel > 0 {
        report.notes.push(format!(
            "{fixture}: ∂wV ∥ V at {parallel} points, where the relation holds trivially"
        ));
    }
    report.grids.push((&grid).into());
    check(cx, report, specs, fixture, &points, Sites::Grid(&grid));
    Ok(())
}

fn controls_case_b(cx: &Ctx, report: &mut ResidualReport) -> Result<(), Failure> {
    let name = "caseb-generic:plane";
    let (grid, points) = sweep_dist(cx, name, true, |_, l| {
        let r = l.case_b_relation()?;
        Ok(vec![(0, peak(r.residual.coeffs.iter().copied()))])
    })?;
    let spec = MeasureSpec::max_at_least("case-b-fit-unrelated", "fit residual without P ∥ Q", 1e-3);
    control(cx, report, vec![spec], name, &points, Sites::Grid(&grid));
    Ok(())
}
