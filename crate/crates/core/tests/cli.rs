use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quartic-census"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("quartic-census-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn engines_match_on_gaussian_field() {
    let (code, out, _) = run(&["count-relative", "--disc", "-4", "--bound", "16", "--engine", "both"]);
    assert_eq!(code, 0);
    assert_eq!(out, "disc,bound,direct,characters,verdict\n-4,16,2,2,match\n");
}

#[test]
fn non_fundamental_is_usage_error() {
    let (code, out, err) = run(&["count-relative", "--disc", "9", "--bound", "10"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("not a fundamental discriminant"), "{err}");
}

#[test]
fn small_bound_direct_only() {
    let (code, out, _) = run(&["count-relative", "--disc", "5", "--bound", "1", "--engine", "direct"]);
    assert_eq!(code, 0);
    assert_eq!(out, "disc,bound,direct,characters,verdict\n5,1,0,,\n");
}

#[test]
fn census_identity_column() {
    let (code, out, _) = run(&["census", "--bound", "1000"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("X,total,n_d4,n_c4,n_v4,identity_check"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with(",ok")));
    assert_eq!(rows[2], "1000,73,24,1,8,ok");
}

#[test]
fn census_zero_bound() {
    assert_eq!(run(&["census", "--bound", "0"]).0, 2);
}

#[test]
fn census_compare() {
    let good = "# oracle run\nabs_disc,galois_type,count\n117,D4,1\n125,C4,1\n144,V4,1\n189,D4,1\n225,V4,1\n256,V4,1\n272,D4,1\n";
    let p = scratch("good.csv", good);
    let (code, _, err) = run(&["census", "--bound", "272", "--compare", p.to_str().unwrap()]);
    assert_eq!((code, err.as_str()), (0, ""));

    let p = scratch("corrupt.csv", &good.replace("189,D4,1", "189,D4,2"));
    let (code, out, err) = run(&["census", "--bound", "272", "--compare", p.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(out.starts_with("X,total"));
    assert!(err.contains("189,D4: computed 1, reference 2"), "{err}");

    let p = scratch("malformed.csv", "abs_disc,galois_type,count\n117,D4,1\n125,C4\n");
    let (code, _, err) = run(&["census", "--bound", "300", "--compare", p.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("line 3"), "{err}");

    let (code, _, _) = run(&["census", "--bound", "300", "--compare", "/nonexistent/ref.csv"]);
    assert_eq!(code, 3);
}

#[test]
fn constant_c_nests() {
    let get = |b: &str| {
        let (code, out, _) = run(&["constant-c", "--truncation", b]);
        assert_eq!(code, 0);
        serde_json::from_str::<serde_json::Value>(&out).unwrap()
    };
    let (a, b) = (get("100"), get("1000"));
    let f = |v: &serde_json::Value, k: &str| v[k].as_f64().unwrap();
    assert!(f(&b, "lo") < f(&b, "hi"));
    assert!(f(&b, "width") < f(&a, "width"));
    assert!(f(&a, "lo") <= f(&b, "lo") && f(&b, "hi") <= f(&a, "hi"));
    assert!(b["precision"]["interval"].as_str().unwrap().starts_with("certified"));
}

#[test]
fn error_scan_rows() {
    let (code, out, _) = run(&["error-scan", "--disc", "-4", "--grid", "1e2:1e5:log10"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 31);
    let ys: Vec<u64> = rows.iter().map(|r| r["Y"].as_u64().unwrap()).collect();
    assert!(ys.windows(2).all(|w| w[0] < w[1]));
    assert!(rows.iter().all(|r| r["count"].is_u64()));
    assert_eq!(v["main_term"].as_str().unwrap().len(), "2.".len() + 39 + "e-1".len());
    assert_eq!(run(&["error-scan", "--disc", "-4", "--grid", "junk"]).0, 2);
}

#[test]
fn fit_over_two_decades() {
    let (code, out, _) = run(&["fit-secondary", "--grid", "1e3:1e5:log2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["fitted_D"].as_f64().unwrap() > 0.0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert_eq!(run(&["fit-secondary", "--grid", "1e3:1e4:log2"]).0, 2);
}

#[test]
fn zsplit_and_config_errors() {
    assert_eq!(run(&["zsplit", "--bound", "16"]).0, 0);
    assert_eq!(run(&["zsplit", "--bound", "15"]).0, 2);
    assert_eq!(run(&["census", "--bound", "10", "--threads", "0"]).0, 2);
    assert_eq!(run(&["census", "--bound", "10", "--precision-digits", "20"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
}

#[test]
fn output_independent_of_threads() {
    let a = run(&["census", "--bound", "20000", "--breakdown", "--threads", "1"]).1;
    let b = run(&["census", "--bound", "20000", "--breakdown", "--threads", "3"]).1;
    assert_eq!(a, b);
}
