use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use annulus_core::arith::{Matrix, RatLambda};
use annulus_core::geometry::Circle;
use annulus_core::measurement::symbolic_matrix;
use annulus_core::network::{fixtures, move_cut_base, Network};
use annulus_core::realize::{realize_matrix, RationalMatrixSpec};
use serde_json::Value;

fn dir() -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("annet-cli");
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn file(name: &str, text: &str) -> PathBuf {
    let p = dir().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn net(name: &str, n: &Network) -> PathBuf {
    file(name, &n.to_json())
}

fn numeric_pergrann() -> PathBuf {
    net("pergrann.json", &fixtures::pergrann().with_weights(&fixtures::pergrann_values()))
}

fn annet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annet")).args(args).output().unwrap()
}

fn run(args: &[&str]) -> (i32, String) {
    let o = annet(args);
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap())
}

fn doc(args: &[&str]) -> Value {
    let (code, out) = run(args);
    assert_eq!(code, 0, "{args:?}: {out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tool"], "annet");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["input_sha256"].as_str().unwrap().len(), 64);
    v["result"].clone()
}

/// Records between the header and the summary, after checking both.
fn lines(args: &[&str]) -> Vec<Value> {
    let (code, out) = run(args);
    let all: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(all.len() >= 2, "{out}");
    assert_eq!(all[0]["tool"], "annet");
    let summary = &all[all.len() - 1]["summary"];
    assert_eq!(summary["pass"], true, "{args:?}: {out}");
    assert_eq!(code, 0);
    all[1..all.len() - 1].to_vec()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_reports_and_exit_codes() {
    let good = numeric_pergrann();
    assert_eq!(doc(&["validate", s(&good)]), serde_json::json!([]));
    let bad = net("crossed.json", &fixtures::crossed());
    let (code, out) = run(&["validate", s(&bad)]);
    assert_eq!(code, 1);
    assert!(!serde_json::from_str::<Value>(&out).unwrap()["result"].as_array().unwrap().is_empty());
    let junk = file("junk.json", "{ not json");
    let o = annet(&["validate", s(&junk)]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("parse"));
    assert_eq!(annet(&["measure", s(&bad), "--source", "1", "--sink", "3"]).status.code(), Some(2));
    assert_eq!(annet(&["measure", s(&good)]).status.code(), Some(2));
    assert_eq!(annet(&["nonsense", s(&good)]).status.code(), Some(2));
}

#[test]
fn symbolic_measurement_after_moving_the_cut() {
    let moved = move_cut_base(&fixtures::pergrann(), Circle::Inner).unwrap();
    let p = net("moved.json", &moved);
    let (m, sym) = symbolic_matrix(&moved).unwrap();
    let r = doc(&["measure", s(&p), "--source", "1", "--sink", "2"]);
    assert_eq!(r["value"], sym.format(m.get(1, 2).unwrap()));
    assert!(r["value"].as_str().unwrap().contains("w9"));
}

#[test]
fn realize_then_matrix_round_trips() {
    let spec = file(
        "spec.json",
        r#"{"k": 2, "m": 2, "entries": [["1,1", "1"], ["0", "1"], ["2", "1,-1/2"], ["0,0,3", "1"]]}"#,
    );
    let out = dir().join("realized.json");
    let r = doc(&["realize", s(&spec), "-o", s(&out)]);
    assert!(r["crossings_resolved"].as_u64().is_some());
    assert!(!r["provenance"].as_array().unwrap().is_empty());
    let log: Value =
        serde_json::from_str(&std::fs::read_to_string(dir().join("realized.json.provenance.json")).unwrap()).unwrap();
    assert_eq!(log["steps"], r["provenance"]);
    let m = doc(&["matrix", s(&out)]);
    let want = RationalMatrixSpec::from_json(&std::fs::read_to_string(&spec).unwrap()).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(m["entries"][i][j], want.entries.get(i, j).to_list_string());
        }
    }
    assert_eq!(
        annet(&["realize", s(&file("bad_spec.json", r#"{"k": 1, "m": 1, "entries": []}"#))]).status.code(),
        Some(2)
    );
}

#[test]
fn reports_are_deterministic() {
    let p = numeric_pergrann();
    let a = annet(&["psre-check", s(&p), "--seed", "3"]);
    let b = annet(&["psre-check", s(&p), "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
    let c = annet(&["psre-check", s(&p), "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn bracket_checks_pass() {
    let p = numeric_pergrann();
    let recs = lines(&["psre-check", s(&p)]);
    assert!(recs.iter().filter(|r| r["pass"] == true).count() >= 5);
    let recs = lines(&["psre2-check", s(&p), "--source", "1,2", "--sink", "3,3", "--at", "2/3,-5/7"]);
    assert_eq!(recs.len(), 1);
    assert_eq!(annet(&["psre-check", s(&p), "--source", "1,3", "--sink", "2,2"]).status.code(), Some(2));
    let b =
        doc(&["bracket", s(&p), "--source", "1,2", "--sink", "3", "--at", "2/3,-5/7", "--params", "1,1/2,2,0,3,-1"]);
    assert_eq!(b["alpha"], "3/2");
    assert!(b["bracket"].is_string());
}

#[test]
fn sklyanin_check_on_a_realized_square_network() {
    let rat = |n: &str, d: &str| {
        RatLambda::from_coeff_strings(&n.split(',').collect::<Vec<_>>(), &d.split(',').collect::<Vec<_>>()).unwrap()
    };
    let f =
        Matrix::from_rows(vec![vec![rat("1,1", "1"), rat("3", "1")], vec![rat("0", "1"), rat("2", "1,-1")]]).unwrap();
    let p = net("square.json", &realize_matrix(&f).unwrap().to_network().unwrap());
    let recs = lines(&["sklyanin-check", s(&p)]);
    assert_eq!(recs.len(), 16 * 3);
    let pergrann = numeric_pergrann();
    assert_eq!(annet(&["sklyanin-check", s(&pergrann)]).status.code(), Some(2));
}

#[test]
fn grassmannian_commands() {
    let p = numeric_pergrann();
    let pl = doc(&["plucker", s(&p)]);
    assert_eq!(pl["coordinates"].as_array().unwrap().len(), 3);
    let one = doc(&["plucker", s(&p), "--set", "1,3", "--at", "1/2"]);
    assert_eq!(one["coordinates"][0]["set"], serde_json::json!([1, 3]));
    assert!(!lines(&["pathrev-check", s(&p)]).is_empty());
    assert!(!lines(&["chart-check", s(&p), "--params", "1,2/3,-1,3,1/2,2"]).is_empty());
    let out = dir().join("reversed.json");
    let r = doc(&["reverse-path", s(&p), "--path", "e1,e2,e3,e4", "-o", s(&out)]);
    assert_eq!(r["t_sign"], -1);
    assert_eq!(doc(&["validate", s(&out)]), serde_json::json!([]));
}

#[test]
fn network_commands() {
    let p = numeric_pergrann();
    let f = doc(&["faces", s(&p)]);
    assert_eq!(f["product"], "1");
    let t = doc(&["trail", s(&p)]);
    assert!(t["weight"].is_string());
    for circle in ["inner", "outer"] {
        let r = doc(&["move-cut", s(&p), circle]);
        assert_eq!(r["measurement_law"]["pass"], true);
        assert!(r["network"]["edges"].is_array());
    }
    assert_eq!(doc(&["reverse-cut", s(&p)])["inverts_lambda"]["pass"], true);
    let o = doc(&["oracle", s(&p), "--source", "1", "--sink", "3", "--maxlen", "6", "--at", "1/5"]);
    assert_eq!(o["rows"].as_array().unwrap().len(), 6);
    let m = doc(&["matrix", s(&p), "--at", "-1/2"]);
    assert_eq!(m["at"]["entries"].as_array().unwrap().len(), 2);
}
