//! Acceptance criteria 1–7, one PASS/FAIL line each.

mod common;

use rollgeom::verify::report::{Bound, Measure, ResidualReport};
use rollgeom::verify::{run_verify, VerifyRequest, ALL};
use std::time::{Duration, Instant};

const BACKLUND: &str = "backlund:pseudosphere:sigma=0.7853981633974483";
const SEED: u64 = 0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(target: &str, fixtures: &[&str], grid: &[usize]) -> (ResidualReport, Duration) {
    let mut req = VerifyRequest::new(target);
    req.fixtures = fixtures.iter().map(|s| s.to_string()).collect();
    req.grid = Some(grid.to_vec());
    req.seed = SEED;
    let start = Instant::now();
    let report = run_verify(&req).unwrap_or_else(|e| panic!("{target}: {}", e.0));
    (report, start.elapsed())
}

/// `value / threshold` for upper bounds, its inverse for lower bounds; below 1
/// means the bound holds with room to spare.
fn margin(m: &Measure) -> f64 {
    match m.bound {
        Bound::AtMost => m.value / m.threshold,
        Bound::AtLeast => m.threshold / m.value.max(f64::MIN_POSITIVE),
    }
}

fn summarize(reports: &[&ResidualReport]) -> (bool, String) {
    let checks: Vec<&Measure> = reports.iter().flat_map(|r| &r.checks).collect();
    let controls: Vec<&Measure> = reports.iter().flat_map(|r| &r.negative_controls).collect();
    let errors: usize = reports.iter().map(|r| r.errors.len()).sum();
    let ok = |ms: &[&Measure]| ms.iter().filter(|m| m.pass).count();
    let worst = checks
        .iter()
        .chain(&controls)
        .max_by(|a, b| margin(a).total_cmp(&margin(b)));
    let pass = reports.iter().all(|r| r.pass) && errors == 0;
    let mut detail = format!(
        "{}/{} checks, {}/{} controls",
        ok(&checks),
        checks.len(),
        ok(&controls),
        controls.len()
    );
    if errors > 0 {
        detail += &format!(", {errors} errors");
    }
    if let Some(w) = worst {
        detail += &format!(
            ", tightest {} [{}] {:.2e} vs {:.1e}",
            w.name, w.fixture, w.value, w.threshold
        );
    }
    for m in checks.iter().chain(&controls).filter(|m| !m.pass) {
        detail += &format!("\n    failed {} [{}] {:.3e} vs {:.1e}", m.name, m.fixture, m.value, m.threshold);
    }
    (pass, detail)
}

fn measure<'a>(r: &'a ResidualReport, name: &str, fixture: &str) -> Option<&'a Measure> {
    r.checks.iter().find(|m| m.name == name && m.fixture == fixture)
}

fn criterion_1() -> Outcome {
    let (fund, t1) = run("alg:eq-fund", &["random"], &[500]);
    let (alpha, t2) = run("alg:alpha", &["random"], &[1000]);
    let (ok, detail) = summarize(&[&fund, &alpha]);
    let counts = fund.checks.iter().all(|m| m.samples >= 500) && alpha.checks.iter().all(|m| m.samples >= 1000);
    let elapsed = t1 + t2;
    Outcome {
        pass: ok && counts && elapsed < Duration::from_secs(5),
        detail: format!("{detail}; {:.2} s", elapsed.as_secs_f64()),
    }
}

fn criterion_2() -> Outcome {
    let (r, t) = run("surf:gauss", &["sphere", "catenoid", "pseudosphere"], &[16, 16]);
    let (ok, detail) = summarize(&[&r]);
    let k = measure(&r, "curvature", "pseudosphere").map(|m| m.value);
    let k_ok = k.is_some_and(|v| v <= 1e-9);
    Outcome {
        pass: ok && k_ok,
        detail: format!("{detail}; |K + 1| {:.2e}; {:.2} s", k.unwrap_or(f64::NAN), t.as_secs_f64()),
    }
}

fn criterion_3() -> Outcome {
    let targets = ["roll:eq-omjk", "roll:eq-om", "roll:eq-omom", "roll:eq-om-prime"];
    let mut reports = Vec::new();
    let mut elapsed = Duration::ZERO;
    for t in targets {
        let (r, dt) = run(t, &["catenoid:helicoid"], &[16, 16]);
        reports.push(r);
        elapsed += dt;
    }
    let (ok, detail) = summarize(&reports.iter().collect::<Vec<_>>());
    Outcome {
        pass: ok && elapsed < Duration::from_secs(20),
        detail: format!("{detail}; {:.2} s", elapsed.as_secs_f64()),
    }
}

fn criterion_4() -> Outcome {
    let targets = ["dist:genericity", "dist:pfaffian", "dist:abc", "dist:cons"];
    let reports: Vec<ResidualReport> = targets.iter().map(|t| run(t, &[BACKLUND], &[12, 12, 8]).0).collect();
    let (ok, detail) = summarize(&reports.iter().collect::<Vec<_>>());
    Outcome { pass: ok, detail }
}

fn criterion_5() -> Outcome {
    let mut fixtures = vec![BACKLUND.to_string()];
    fixtures.extend((0..5).map(|k| format!("random:pseudosphere:{}", 100 + k)));
    let names: Vec<&str> = fixtures.iter().map(String::as_str).collect();
    let (r, _) = run("dist:n-condition", &names, &[12, 12, 8]);
    let (ok, detail) = summarize(&[&r]);
    let perturbed = r
        .negative_controls
        .iter()
        .filter(|m| m.name == "n-injected" && m.fixture.starts_with("random:"))
        .count();
    let fractions: Vec<String> = r
        .negative_controls
        .iter()
        .filter(|m| m.name == "n-injected")
        .map(|m| format!("{:.3}", m.value))
        .collect();
    Outcome {
        pass: ok && perturbed >= 5,
        detail: format!("{detail}; {perturbed} random perturbations, fractions above 1e-4: {}", fractions.join(" ")),
    }
}

fn criterion_6() -> Outcome {
    let levels = common::all_levels(SEED).expect("oracle levels evaluate");
    let worst = levels
        .iter()
        .max_by(|a, b| a.worst.total_cmp(&b.worst))
        .expect("levels");
    let failing: Vec<String> = levels
        .iter()
        .filter(|a| !(a.worst <= 1e-5))
        .map(|a| format!("{} {} {:.2e}", a.fixture, a.quantity, a.worst))
        .collect();
    let comparisons: usize = levels.iter().map(|a| a.comparisons).sum();
    Outcome {
        pass: failing.is_empty(),
        detail: format!(
            "{} levels, {comparisons} comparisons at {} points per fixture, worst {} {} {:.2e}{}",
            levels.len(),
            common::SAMPLES,
            worst.fixture,
            worst.quantity,
            worst.worst,
            if failing.is_empty() { String::new() } else { format!("; failing: {}", failing.join(", ")) }
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut req = VerifyRequest::new(ALL);
    req.seed = SEED;
    let start = Instant::now();
    let first = run_verify(&req).expect("full suite runs");
    let elapsed = start.elapsed();
    let second = run_verify(&req).expect("full suite runs");
    let (a, b) = (first.to_json(), second.to_json());
    let same = a == b;
    Outcome {
        pass: same && first.pass && elapsed < Duration::from_secs(60),
        detail: format!(
            "reports {} ({} bytes), suite {}, {:.2} s per run",
            if same { "byte-identical" } else { "differ" },
            a.len(),
            if first.pass { "passes" } else { "fails" },
            elapsed.as_secs_f64()
        ),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("algebraic identities", criterion_1),
        ("surface suite", criterion_2),
        ("rolling suite", criterion_3),
        ("distribution suite", criterion_4),
        ("n-forcing", criterion_5),
        ("oracle equivalence", criterion_6),
        ("determinism", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("criterion {} {name}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
