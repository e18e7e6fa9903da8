use std::path::PathBuf;
use std::process::{Command, Output};

use solnet::dc::DcFit;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solnet")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("solnet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mp_count_prints_region_bound() {
    assert_eq!(ok(&["mp", "count", "--m1", "3", "--nz", "2", "--m2", "0"]).trim(), "7");
    assert_eq!(ok(&["mp", "bound", "pwa", "--eps", "0.1", "--kappa", "1", "--m1", "3", "--nz", "2"]).trim(), "700");
    let smooth: f64 = ok(&["mp", "bound", "smooth", "--eps", "0.01", "--k", "2", "--nx", "2", "--n", "100"]).trim().parse().unwrap();
    assert!((smooth - (1000.0 + 4.0 * 100f64.ln())).abs() <= 1e-9);
}

#[test]
fn taylor_report_prints_first_layer_counts() {
    let out = ok(&["taylor", "report", "--nx", "1", "--k", "2", "--eps", "0.5"]);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines.contains(&"N=1"), "{out}");
    assert!(lines.contains(&"first_layer_constraints=10"), "{out}");
    assert!(lines.contains(&"first_layer_variables=4"), "{out}");
}

#[test]
fn recon_image_full_budget_is_exact() {
    let out = ok(&["recon", "image", "--keep", "1.0"]);
    assert_eq!(out.lines().next().unwrap(), "MSE 0.0");
    let png = tmp("tex.ppm");
    let img = solnet::recon::bundled_texture();
    img.write(&png).unwrap();
    let rec = tmp("rec.ppm");
    ok(&["recon", "image", "--in", s(&png), "--keep", "1", "--out", s(&rec)]);
    assert_eq!(std::fs::read(&rec).unwrap(), std::fs::read(&png).unwrap());
}

#[test]
fn exit_codes_and_diagnostics() {
    let o = run(&["mp", "count", "--m1", "x", "--nz", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "usage");
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let o = run(&["solve", "/definitely/not/here.json"]);
    assert_eq!(o.status.code(), Some(1));
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "domain");
    assert!(o.stdout.is_empty());
    assert_eq!(run(&["recon", "testfn", "--name", "rosenbrock", "--k", "2", "--n", "2"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn solve_reports_solution_and_kkt() {
    let f = tmp("lp.json");
    std::fs::write(&f, r#"{"cost": [-1, -1], "ineq_lhs": [[1, 2], [3, 1]], "ineq_rhs": [4, 6], "bounds": {"lower": [0, 0]}}"#).unwrap();
    let v: serde_json::Value = serde_json::from_str(&ok(&["solve", s(&f)])).unwrap();
    assert_eq!(v["result"]["status"], "Optimal");
    let z: Vec<f64> = serde_json::from_value(v["result"]["primal"].clone()).unwrap();
    assert!((z[0] - 1.6).abs() < 1e-9 && (z[1] - 1.2).abs() < 1e-9, "{z:?}");
    assert_eq!(v["kkt"]["pass"], true);
    let v: serde_json::Value = serde_json::from_str(&ok(&["solve", s(&f), "--tol", "1e-6"])).unwrap();
    assert_eq!(v["kkt"]["pass"], true);
}

#[test]
fn gadgets_and_network_files() {
    let v: Vec<f64> = serde_json::from_str(&ok(&["gadget", "product", "--x", "0.3,-0.5"])).unwrap();
    assert!((v[0] + 0.15).abs() <= 1e-12);
    let v: Vec<f64> = serde_json::from_str(&ok(&["gadget", "bump", "--intervals", "0:1,2:3", "--x", "2.5"])).unwrap();
    assert_eq!(v, vec![1.0]);
    let v: Vec<f64> = serde_json::from_str(&ok(&["gadget", "indicator", "--cell", "1,0", "--n", "2", "--x", "0.7,0.2"])).unwrap();
    assert_eq!(v, vec![1.0]);
    let p = tmp("prod.json");
    ok(&["gadget", "product", "--a1", "-1", "--out", s(&p)]);
    let info: serde_json::Value = serde_json::from_str(&ok(&["net", "info", s(&p)])).unwrap();
    assert_eq!(info["inputs"], 2);
    assert_eq!(info["complexity"]["depth"], 2);
    let v: Vec<f64> = serde_json::from_str(&ok(&["net", "eval", s(&p), "--x", "1,0.5"])).unwrap();
    assert!((v[0] - 1.0).abs() <= 1e-12);
    let audit: serde_json::Value = serde_json::from_str(&ok(&["net", "eval", s(&p), "--x", "1,0.5", "--audit"])).unwrap();
    assert_eq!(audit["kkt_failures"], 0);
    let both = tmp("both.json");
    assert!(ok(&["net", "build", s(&p), s(&p), "--out", s(&both)]).contains("outputs=2"));
    let v: Vec<f64> = serde_json::from_str(&ok(&["net", "eval", s(&both), "--x", "1,0.5"])).unwrap();
    assert_eq!(v.len(), 2);
    let b = tmp("bump.json");
    ok(&["gadget", "bump", "--out", s(&b)]);
    let chain = tmp("chain.json");
    ok(&["net", "build", "--series", s(&p), s(&b), "--out", s(&chain)]);
    let v: Vec<f64> = serde_json::from_str(&ok(&["net", "eval", s(&chain), "--x", "0.2,0.5"])).unwrap();
    assert_eq!(v, vec![1.0]);
    let v: Vec<f64> = serde_json::from_str(&ok(&["net", "eval", s(&chain), "--x", "3,0.5"])).unwrap();
    assert_eq!(v, vec![0.0]);
    assert_eq!(run(&["net", "build", "--series", s(&p), s(&p)]).status.code(), Some(1));
}

#[test]
fn taylor_build_and_eval() {
    let net = tmp("taylor.json");
    let rep = tmp("taylor_report.json");
    let summary = ok(&["taylor", "build", "--expr", "sin(x1 + x2)/2", "--nx", "2", "--k", "3", "--eps", "0.05", "--out", s(&net), "--report", s(&rep)]);
    assert!(summary.starts_with("N=3 "), "{summary}");
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert!(r["measured_error"].as_f64().unwrap() <= 0.05);
    let v: Vec<f64> = serde_json::from_str(&ok(&["net", "eval", s(&net), "--x", "0.3,0.45"])).unwrap();
    assert!((v[0] - 0.75f64.sin() / 2.0).abs() <= 0.05);
    let e: serde_json::Value = serde_json::from_str(&ok(&["taylor", "eval", "--expr", "x1^2", "--nx", "1", "--k", "2", "--eps", "0.1", "--x", "0.4"])).unwrap();
    assert!((e["value"].as_f64().unwrap() - 0.16).abs() <= 1e-12);
    assert_eq!(e["target"], 0.16000000000000003);
    let o = run(&["taylor", "build", "--expr", "x3", "--nx", "2", "--k", "2", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn maxaffine_fit_and_emit() {
    let fit = tmp("fit.json");
    let summary = ok(&["maxaffine", "fit", "--expr", "sin(3*x)", "--eps", "0.05", "--rho", "9", "--out", s(&fit)]);
    assert!(summary.contains("certified=true"), "{summary}");
    let doc: DcFit = serde_json::from_str(&std::fs::read_to_string(&fit).unwrap()).unwrap();
    let net = tmp("dc.json");
    let counts = ok(&["maxaffine", "emit", s(&fit), "--out", s(&net)]);
    let (k1, k2) = doc.planes();
    assert!(counts.contains(&format!("constraints={}", k1 + k2 + 1)), "{counts}");
    for x in [0.0, 0.37, 0.9] {
        let v: Vec<f64> = serde_json::from_str(&ok(&["net", "eval", s(&net), "--x", &x.to_string()])).unwrap();
        assert!((v[0] - doc.pair.eval(&[x])).abs() <= 1e-9);
    }
}

#[test]
fn mp_regions_and_kappa() {
    let spec = tmp("mp.json");
    let lp = solnet::mp::ParamQp::new(1, 0, 1)
        .with_cost(solnet::linalg::Matrix::zeros(1, 1), solnet::linalg::Matrix::zeros(1, 0), vec![-1.0])
        .with_ineq(
            solnet::linalg::Matrix::from_f64_rows(&[&[1.0], &[1.0]]),
            vec![0.0, 2.0],
            solnet::linalg::Matrix::from_f64_rows(&[&[1.0], &[-1.0]]),
            solnet::linalg::Matrix::zeros(2, 0),
        );
    std::fs::write(&spec, serde_json::to_string(&lp).unwrap()).unwrap();
    let (j, c) = (tmp("regions.json"), tmp("regions.csv"));
    let out = ok(&["mp", "regions", s(&spec), "--lo", "0", "--hi", "2", "--json", s(&j), "--csv", s(&c)]);
    assert!(out.starts_with("regions=2 examined=3 bound=3"), "{out}");
    assert!(std::fs::read_to_string(&c).unwrap().starts_with("active_set,size,spectral_norm,retained,rank_deficient\n"));
    let en: solnet::mp::Enumeration = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(en.regions.len(), 2);
    assert!(ok(&["mp", "kappa", s(&spec)]).starts_with("1 "));
}

#[test]
fn recon_csv_outputs() {
    let out = ok(&["recon", "testfn", "--name", "Trid", "--k", "2", "--n", "1,2"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], solnet::recon::SWEEP_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("trid,2,2,1,-20,20,100,"));
    let rows = solnet::recon::recon_testfn(solnet::recon::Benchmark::Trid, 2, &[1]).unwrap();
    assert_eq!(lines[1].split(',').nth(7).unwrap(), format!("{:e}", rows[0].mse));
    let csv = tmp("drop.csv");
    ok(&["recon", "drop", "--keep", "0.5,1", "--seeds", "2", "--seed", "3", "--csv", s(&csv)]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0.5,3,2883,5766,"));
    assert!(lines[4].starts_with("1,4,5766,5766,1922,0,0e0"), "{}", lines[4]);
}
