use std::process::{Command, Output};

fn rollcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rollcheck"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_names_every_distribution_target() {
    let o = rollcheck(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in ["dist:genericity", "dist:pfaffian", "dist:abc", "dist:n-condition", "dist:cons", "dist:case-b"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id} missing");
    }
}

#[test]
fn schema_is_json() {
    let o = rollcheck(&["report-schema"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object());
}

#[test]
fn passing_run_exits_zero() {
    let o = rollcheck(&["verify", "--target", "surf:gauss", "--fixture", "sphere", "--grid", "4x4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["schema_version"], "rollcheck-report/1");
}

#[test]
fn failing_check_exits_one() {
    let o = rollcheck(&[
        "verify", "--target", "dist:abc", "--fixture", "random:pseudosphere:3", "--grid", "3x3x2",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_and_precondition_errors_exit_two() {
    assert_eq!(rollcheck(&["verify", "--target", "nope"]).status.code(), Some(2));
    assert_eq!(rollcheck(&["verify", "--target", "surf:gauss", "--grid", "1x4"]).status.code(), Some(2));
    assert_eq!(rollcheck(&["verify", "--target", "surf:gauss", "--tol", "x=-1"]).status.code(), Some(2));
    let o = rollcheck(&["verify", "--target", "dist:abc", "--fixture", "backlund:plane:sigma=0.7", "--grid", "3x3x2"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["errors"][0]["kind"], "invalid-fixture");
}

#[test]
fn out_file_is_deterministic() {
    let dir = std::env::temp_dir().join(format!("rollcheck-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let paths = [dir.join("a.json"), dir.join("b.json")];
    for (p, extra) in paths.iter().zip([None, Some("--sequential")]) {
        let mut args = vec!["verify", "--target", "dist:cons", "--grid", "3x3x2", "--seed", "5", "--out", p.to_str().unwrap()];
        args.extend(extra);
        let o = rollcheck(&args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}
