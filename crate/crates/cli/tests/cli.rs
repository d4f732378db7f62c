use serde_json::Value;
use sjg_core::connections::tables::{builtin, point_env};
use sjg_core::{ChartId, ChartPoint, ModelParams, Scalar};
use std::process::{Command, Output};

fn sjg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sjg")).args(args).env_remove("SJG_PARAMS").env_remove("SJG_K").output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&sjg(args))).unwrap()
}

fn complex(v: &Value) -> Scalar {
    Scalar::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let head = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (head, rows)
}

#[test]
fn half_plane_christoffel_symbol() {
    let v = json(&["eval", "--space", "XJ1-real", "--object", "christoffel", "--at", "x=0,y=1,q=0,p=0", "--params", "k=2,nu=1"]);
    assert_eq!(v["value"]["x x y"].as_f64(), Some(-1.0));
    assert_eq!(v["value"]["y x x"].as_f64(), Some(1.0));
    assert_eq!(v["params"]["k"].as_f64(), Some(2.0));
}

#[test]
fn berry_connection_vanishes_at_the_centre() {
    let v = json(&["eval", "--space", "D1", "--object", "berry", "--at", "w=0"]);
    for (_, c) in v["value"].as_object().unwrap() {
        assert_eq!(complex(c).norm(), 0.0);
    }
}

#[test]
fn connection_matrix_matches_the_printed_table() {
    let v = json(&["eval", "--space", "DJ1", "--object", "connection-matrix", "--at", "w=0.1,z=0.2", "--params", "k=1,nu=1"]);
    let m = &v["value"]["matrix"];
    let t = builtin().into_iter().find(|t| t.name == "33ab63").unwrap();
    let p = ModelParams::new(1.0, 1.0, 1.0).unwrap();
    let pt = ChartPoint::parse(ChartId::DJ1, "w=0.1,z=0.2").unwrap();
    let env = point_env(ChartId::DJ1, &t.lets, &p, &pt).unwrap();
    let names = ChartId::DJ1.coord_names();
    let pos = |s: &str| names.iter().position(|n| n == s).unwrap();
    let mut listed = Vec::new();
    for e in &t.entries {
        let [i, j, k] = [pos(&e.idx[0]), pos(&e.idx[1]), pos(&e.idx[2])];
        let got = complex(&m[j][i][format!("d{}", names[k])]);
        let want = e.printed.eval(&env).unwrap();
        assert!((got - want).norm() < 1e-12 * (1.0 + want.norm()), "{}: {got} vs {want}", e.text);
        listed.push((i, j, k));
    }
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                if !listed.contains(&(i, j, k)) {
                    assert!(complex(&m[j][i][format!("d{}", names[k])]).norm() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn loop_phase_agrees_with_stokes() {
    let (head, rows) = csv(&stdout(&sjg(&["loop-phase", "--space", "D1", "--curve", "circle:r=0.5", "--params", "k=1"])));
    assert_eq!(head, ["loop", "stokes", "abs_diff"]);
    let want = -4.0 * std::f64::consts::PI / 3.0;
    assert!((rows[0][0] - want).abs() < 1e-7);
    assert!((rows[0][1] - want).abs() < 1e-7);
    assert!(rows[0][2] < 1e-7);
}

#[test]
fn geodesic_follows_tanh_and_sech() {
    let (head, rows) = csv(&stdout(&sjg(&["geodesic", "--space", "X1", "--init", "x=0,y=1,vx=1,vy=0", "--t", "2", "--step", "1e-3"])));
    assert_eq!(head, ["t", "x", "y", "vx", "vy"]);
    assert_eq!(rows.len(), 2001);
    for r in &rows {
        let t = r[0];
        assert!((r[1] - t.tanh()).abs() < 1e-7 && (r[2] - 1.0 / t.cosh()).abs() < 1e-7, "{r:?}");
    }
    assert!((rows.last().unwrap()[0] - 2.0).abs() < 1e-12);
}

#[test]
fn zero_hamiltonian_flow_is_constant() {
    let (head, rows) = csv(&stdout(&sjg(&["flow", "--space", "XJ1-ext", "--H", "a=0,b=0,c=0,m=0,n=0", "--t", "1"])));
    assert_eq!(head, ["t", "x", "y", "q", "p", "kappa"]);
    for r in &rows {
        assert_eq!(&r[1..], &[0.0, 1.0, 0.0, 0.0, 0.0]);
    }
}

#[test]
fn cosymplectic_check_reports_full_rank() {
    let v = json(&["cosym-check", "--space", "XJ1-ext", "--samples", "20"]);
    assert_eq!(v["acos"], true);
    assert_eq!(v["min_rank"], v["expected_rank"]);
}

#[test]
fn verify_report_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = sjg(&["verify", "--suite", "cosymplectic", "--samples", "20", "--seed", "9", "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["schema"], "1");
    assert_eq!(v["seed"], 9);
    assert_eq!(v["pass"], true);
    // Only the two reports; the temporary files were renamed away.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn discrepancy_suite_detects_the_differences() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = sjg(&["verify", "--suite", "discrepancies", "--out", path.to_str().unwrap(), "--csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("identity_id,paper_anchor,suite,kind,expect,samples,max_abs_err,tol,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true") && l.contains(",discrepancy,differ,")));
}

#[test]
fn single_sample_run_is_legal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = sjg(&["verify", "--suite", "all", "--samples", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["samples"], 1);
}

#[test]
fn exit_codes() {
    assert_eq!(sjg(&["eval", "--space", "D1", "--object", "metric", "--at", "w=1.5"]).status.code(), Some(2));
    assert_eq!(sjg(&["geodesic", "--space", "X1-real", "--init", "x=0,y=-1,vx=0,vy=1", "--t", "1"]).status.code(), Some(2));
    assert_eq!(sjg(&["eval", "--space", "D9", "--object", "metric", "--at", "w=0"]).status.code(), Some(1));
    assert_eq!(sjg(&["eval", "--space", "D1", "--object", "metric"]).status.code(), Some(1));
    assert_eq!(sjg(&["verify", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(sjg(&["verify", "--samples", "0"]).status.code(), Some(1));
    assert_eq!(sjg(&["eval", "--space", "D1", "--object", "metric", "--at", "w=0", "--params", "k=-1"]).status.code(), Some(1));
    assert_eq!(sjg(&["--help"]).status.code(), Some(0));
}

#[test]
fn parameters_from_the_environment() {
    let run = |env: &[(&str, &str)], extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_sjg"));
        c.args(["eval", "--space", "X1", "--object", "metric", "--at", "v=0+1i"]).args(extra);
        c.env_remove("SJG_PARAMS").env_remove("SJG_K");
        for (k, v) in env {
            c.env(k, v);
        }
        let v: Value = serde_json::from_str(&stdout(&c.output().unwrap())).unwrap();
        v["params"]["k"].as_f64().unwrap()
    };
    assert_eq!(run(&[], &[]), 1.0);
    assert_eq!(run(&[("SJG_K", "3")], &[]), 3.0);
    assert_eq!(run(&[("SJG_PARAMS", "k=4")], &[]), 4.0);
    assert_eq!(run(&[("SJG_K", "3")], &["--params", "k=5"]), 5.0);
}

#[test]
fn numbers_carry_seventeen_digits() {
    let text = stdout(&sjg(&["eval", "--space", "D1", "--object", "metric", "--at", "w=0.1"]));
    assert!(text.contains("2.0406081012141617e0"), "{text}");
}
