use std::process::{Command, Output};

use lame_core::closedform::c_from_p_case0;
use lame_core::{Complex64 as C, LatticeData};
use serde_json::Value;

fn lame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lame"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = lame(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn cx(v: &Value) -> C {
    C::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn lattice_report_round_trips_bit_for_bit() {
    let v = json(&["lattice", "--tau", "i"]);
    assert_eq!(v["schema"], 1);
    let l = LatticeData::new(C::new(0.0, 1.0), 1e-12).unwrap();
    for (key, z) in [("eta1", l.eta1()), ("eta2", l.eta2()), ("g2", l.g2()), ("g3", l.g3())] {
        let got = cx(&v[key]);
        assert_eq!(got.re.to_bits(), z.re.to_bits(), "{key}");
        assert_eq!(got.im.to_bits(), z.im.to_bits(), "{key}");
    }
    assert!(cx(&v["g3"]).norm() < 1e-10 * cx(&v["g2"]).norm());
    assert!(v["legendre_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn input_errors_exit_with_2() {
    let out = lame(&["lattice", "--tau", "0.2-1i"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("NonPositiveImaginaryPart"));
    assert_eq!(lame(&["lattice"]).status.code(), Some(2));
    assert_eq!(lame(&["lattice", "--tau", "1+2j"]).status.code(), Some(2));
    assert_eq!(lame(&["lattice", "--tau", "i", "--tol", "1e-3"]).status.code(), Some(2));
    assert_eq!(lame(&["pvi", "--C", "1", "--k", "5", "--grid", "i:2i:5"]).status.code(), Some(2));
    assert_eq!(lame(&["bogus"]).status.code(), Some(2));
}

#[test]
fn monodromy_classifies_both_kinds() {
    let (tau, p) = (C::new(0.0, 1.3), C::new(0.23, 0.36));
    let generic = json(&["monodromy", "--tau", "1.3i", "--p", "0.23+0.36i", "--A", "0.7-0.2i"]);
    assert_eq!(generic["classification"], "CompletelyReducible");
    assert!(generic["extracted"].is_null());
    assert!(generic["gamma_defect"].as_f64().unwrap() < 1e-6);

    let rh = json(&["rh-solve", "--tau", "1.3i", "--p", "0.23+0.36i", "--C", &root(tau, p)]);
    let a = cx(&rh["A"]);
    let a = format!("{}{:+}i", a.re, a.im);
    let special = json(&["monodromy", "--tau", "1.3i", "--p", "0.23+0.36i", "--A", &a]);
    assert_eq!(special["classification"], "NotCompletelyReducible");
    assert!(special["gamma_defect"].as_f64().unwrap() < 1e-6);
}

fn root(tau: C, p: C) -> String {
    let l = LatticeData::new(tau, 1e-12).unwrap();
    let c = c_from_p_case0(l.wp(p).unwrap(), &l)[0].finite().unwrap();
    format!("{}{:+}i", c.re, c.im)
}

#[test]
fn rh_solve_matches_and_rejects() {
    let c = root(C::new(0.0, 1.3), C::new(0.23, 0.36));
    let v = json(&["rh-solve", "--tau", "1.3i", "--p", "0.23+0.36i", "--C", &c]);
    assert_eq!(v["match"], true);
    assert!(v["c_error"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["extracted"]["eps1"], 1);

    let out = lame(&["rh-solve", "--tau", "1.3i", "--p", "0.23+0.36i", "--C", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("InconsistentInput"));

    let v = json(&["rh-solve", "--tau", "0.1+1.2i", "--C", "inf"]);
    assert_eq!(v["predicted"]["C"], "inf");
    assert_eq!(v["extracted"]["C"], "inf");

    let v = json(&["rh-solve", "--tau", "0.1+1.2i", "--C", "1.2-0.4i", "--k", "1"]);
    assert_eq!(v["match"], true);
    assert_eq!((v["extracted"]["eps1"].clone(), v["extracted"]["eps2"].clone()), (1.into(), (-1).into()));
}

#[test]
fn verify_thm1_is_seeded_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = lame(&["verify-thm1", "--seed", "11", "--samples", "10", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_slice(&ta).unwrap();
    assert!(v["max_residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["pass"], true);
    let cases = v["cases"].as_array().unwrap();
    let ks: Vec<u64> = cases.iter().map(|c| c["k"].as_u64().unwrap()).collect();
    assert_eq!(ks, [0, 1, 2, 3]);
    assert_eq!(cases[1]["signs"], serde_json::json!([1, -1]));
    let other = json(&["verify-thm1", "--seed", "12", "--samples", "10"]);
    assert_ne!(other["cases"], v["cases"]);
}

#[test]
fn pvi_reports_residuals_and_order() {
    let v = json(&["pvi", "--C", "0.3+0.8i", "--k", "0", "--grid", "0.1+1.1i:0.12+1.1i:21"]);
    let s = &v["summary"];
    assert!(s["max_residual"].as_f64().unwrap() < 1e-4);
    assert!(s["max_pvi_residual"].as_f64().unwrap() < 1e-3);
    assert_eq!(s["splices"], 0);
    let ratio = v["ratio"]["residual"].as_f64().unwrap();
    assert!((2.5..=6.0).contains(&ratio), "{ratio}");
    assert_eq!(v["order"].as_array().unwrap().len(), 2);
    assert_eq!(v["points"].as_array().unwrap().len(), 21);
}

#[test]
fn pvi_marks_splices_in_csv() {
    let out = lame(&[
        "pvi", "--C", "0.11+1.1i", "--k", "0", "--grid", "0.1+1.1i:0.12+1.1i:21", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "tau_re,tau_im,p_re,p_im,residual_re,residual_im,residual_abs,pvi_residual_abs,splice"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 20);
    let spliced: Vec<&Vec<&str>> = rows.iter().filter(|r| r[8] == "1").collect();
    assert_eq!(spliced.len(), 1);
    assert_eq!(spliced[0][6], "");
    // 17 significant digits
    assert_eq!(rows[0][0], "1.0000000000000001e-1");
    assert!(stderr(&out).contains("h,max_residual,max_pvi_residual"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.conf");
    std::fs::write(&cfg, "# lattice job\ntau = 0.3+0.9i\nformat = csv\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = lame(&["lattice", "--config", cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("field,re,im\ntau,2.9999999999999999e-1,9.0000000000000002e-1\n"));
    let v = json(&["lattice", "--config", cfg, "--tau", "i", "--format", "json"]);
    assert_eq!(cx(&v["tau"]), C::new(0.0, 1.0));
    let missing = lame(&["lattice", "--config", "/nonexistent/job.conf"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn identical_jobs_give_identical_bytes() {
    let args = ["monodromy", "--tau", "0.1+1.2i", "--p", "0.3+0.25i", "--A", "0.4+0.1i"];
    let (a, b) = (lame(&args), lame(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["classification"], "CompletelyReducible");
}
