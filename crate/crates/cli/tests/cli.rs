use std::path::Path;
use std::process::{Command, Output};

use billiards::polygon::read_polygon;
use billiards::Rational;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_billiards")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--json", "-"]);
    serde_json::from_str(&ok(&all)).unwrap()
}

/// Exit code plus the parsed error object from stderr; stdout must be empty.
fn failure(args: &[&str]) -> (i32, Value) {
    let o = run(args);
    assert!(o.stdout.is_empty(), "partial output: {}", stdout(&o));
    let err: Value = serde_json::from_slice(&o.stderr).expect("JSON error object");
    (o.status.code().unwrap(), err)
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SQUARE: &str = "# unit square\n0 0\n1 0\n\n1 1\n0 1\n";

#[test]
fn simulate_reports_the_diamond_period() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.poly", SQUARE);
    let out = ok(&["simulate", "-p", &sq, "--pos", "1/2,0", "--dir", "1:1", "--links", "10"]);
    assert!(out.contains("periodic, 4 links, length 2√2 ≈ 2.8284"), "{out}");
    let j = json(&["simulate", "-p", &sq, "--pos", "1/2,0", "--dir", "1:1", "--links", "10"]);
    assert_eq!(j["orbit"]["period_links"], 4);
    assert_eq!(j["orbit"]["length_exact"], "2√2");
    assert_eq!(j["orbit"]["links"][0]["b"]["y"], "1/2");
}

#[test]
fn simulate_reports_corner_hits() {
    let out = ok(&["simulate", "--pos", "1/2,1/2", "--dir", "1:1"]);
    assert!(out.contains("singular event at vertex 2 (1, 1)"), "{out}");
}

#[test]
fn errors_have_distinct_codes_and_no_partial_output() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.poly", SQUARE);
    let svg = dir.path().join("never.svg");
    let svg_arg = svg.to_str().unwrap();

    let (code, err) = failure(&["simulate", "-p", &sq, "--pos", "1/2,0", "--dir", "1:", "--svg", svg_arg]);
    assert_eq!(code, 2);
    assert_eq!(err["error"]["kind"], "usage");
    assert!(!svg.exists());

    let (code, err) = failure(&["simulate", "-p", &dir.path().join("missing.poly").to_string_lossy(), "--pos", "1/2,0", "--dir", "1:1"]);
    assert_eq!(code, 3);
    assert_eq!(err["error"]["kind"], "input");

    let bad = write(&dir, "bad.poly", "0 0\n1 zero\n1 1\n");
    let (code, err) = failure(&["simulate", "-p", &bad, "--pos", "1/2,0", "--dir", "1:1"]);
    assert_eq!(code, 3);
    assert!(err["error"]["message"].as_str().unwrap().contains("line 2"));

    let (code, err) = failure(&["simulate", "-p", &sq, "--pos", "2,1/2", "--dir", "1:1", "--svg", svg_arg]);
    assert_eq!(code, 4);
    assert_eq!(err["error"]["kind"], "numeric");
    assert!(!svg.exists());

    let (code, _) = failure(&["simulate", "--pos", "0.5,0", "--dir", "1:1"]);
    assert_eq!(code, 2, "the exact backend rejects decimals");
    let (code, _) = failure(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn float_backend_takes_decimals_and_radians() {
    let j = json(&["--backend", "float", "simulate", "--pos", "0.5,0", "--dir", "0.25 pi", "--links", "10"]);
    assert_eq!(j["backend"], "float");
    assert_eq!(j["orbit"]["period_links"], 4);
    assert!((j["orbit"]["length"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-9);
    let j = json(&["--backend", "float", "simulate", "--pos", "0.5,0.25", "--dir", "1.5707963267948966", "--links", "10"]);
    assert_eq!(j["orbit"]["period_links"], 2);
}

#[test]
fn unfold_lays_copies_along_a_straight_segment() {
    let out = ok(&["unfold", "--pos", "1/2,0", "--dir", "1:1", "--links", "4"]);
    assert!(out.starts_with("4 copies"), "{out}");
    assert!(out.contains("collinearity residual 0\n"));
    let j = json(&["unfold", "--pos", "1/2,0", "--dir", "1:1", "--links", "1"]);
    assert_eq!(j["copies"].as_array().unwrap().len(), 1);
    assert_eq!(j["exactly_collinear"], true);
}

fn diagonal_rows(max_links: &str) -> usize {
    ok(&["diagonals", "--max-links", max_links]).lines().filter(|l| !l.starts_with('#')).count()
}

#[test]
fn diagonal_tables() {
    assert_eq!(diagonal_rows("0"), 0);
    assert_eq!(diagonal_rows("1"), 2);
    // Primitive steps (a, b) with a, b ≥ 1 and a + b ≤ 4, four corners, each diagonal counted from both ends.
    assert_eq!(diagonal_rows("3"), 10);
    let row = ok(&["diagonals", "--max-links", "1"]);
    assert!(row.lines().any(|l| l == "1 - 1:1 0"), "{row}");
}

#[test]
fn lshape_orbit_avoids_the_right_square() {
    let j = json(&["lshape", "--k", "3"]);
    assert_eq!(j["links"], 8);
    assert_eq!(j["avoids_right_square"], true);
    assert_eq!(j["right_square_length"], 0.0);
}

#[test]
fn perpendicular_square_feet_are_periodic() {
    let j = json(&["perp", "--side", "0", "--samples", "100"]);
    let side = &j["sides"][0];
    assert_eq!(side["periodic"], 100);
    assert_eq!(side["singular"], 0);
    assert_eq!(side["singular_feet"].as_array().unwrap().len(), 0);
    let (code, _) = failure(&["perp", "--side", "4"]);
    assert_eq!(code, 2);
}

#[test]
fn bouncer_is_not_well_distributed() {
    let j = json(&["welldist", "--pos", "1/2,0", "--dir", "0:1", "--eps", "0.1"]);
    assert_eq!(j["well_distributed"], false);
    let j = json(&["welldist", "--pos", "1/2,0", "--dir", "0:1", "--eps", "0.1", "--basis", "0.6"]);
    assert!((j["sup_discrepancy"].as_f64().unwrap() - std::f64::consts::PI / 16.0).abs() < 1e-9);
    assert_eq!(j["well_distributed"], false);
}

#[test]
fn bouncer_density_witness() {
    let j = json(&["density", "--pos", "1/2,0", "--dir", "0:1", "--eps", "0.4"]);
    assert_eq!(j["dense"], false);
    assert_eq!(j["uncovered_witness"]["y"], "1/2");
}

#[test]
fn scan_and_periodic_reports() {
    let j = json(&["scan", "--theta", "1:1", "--eps", "0.3", "--grid", "4"]);
    assert!(j["coverage"].as_f64().unwrap() > 0.0);
    let j = json(&["periodic", "--max-word", "4"]);
    let words: Vec<&Value> = j["cylinders"].as_array().unwrap().iter().map(|c| &c["word"]).collect();
    assert_eq!(words.len(), 3);
    assert_eq!(j["cylinders"][0]["translation"]["x"], "2");
}

#[test]
fn reports_are_deterministic() {
    let cases: [&[&str]; 3] = [
        &["--seed", "7", "perp", "--table", "triangle", "--samples", "20", "--exceptional"],
        &["scan", "--table", "lshape", "--theta", "1:2", "--eps", "0.4", "--grid", "3", "--budget", "5000"],
        &["--backend", "float", "welldist", "--pos", "1/3,1/7", "--dir", "1/5 pi", "--links", "60", "--eps", "0.3"],
    ];
    for args in cases {
        let mut a = args.to_vec();
        a.extend(["--json", "-"]);
        assert_eq!(ok(&a), ok(&a), "{args:?}");
    }
}

fn assert_well_formed_svg(path: &Path) {
    let text = std::fs::read_to_string(path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(doc.root().children().filter(|n| n.is_element()).count(), 1);
    let vb: Vec<f64> = root.attribute("viewBox").unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert!(vb.len() == 4 && vb.iter().all(|x| x.is_finite()) && vb[2] > 0.0 && vb[3] > 0.0);
    for node in root.descendants().filter(|n| n.is_element()) {
        for attr in ["points", "d", "cx", "cy", "r", "x", "y"] {
            if let Some(v) = node.attribute(attr) {
                for num in v.split(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == 'e')).filter(|s| !s.is_empty()) {
                    let x: f64 = num.parse().unwrap_or_else(|_| panic!("{attr}={v}"));
                    assert!(x.is_finite());
                }
            }
        }
    }
}

#[test]
fn every_command_draws_well_formed_svg() {
    let dir = TempDir::new().unwrap();
    let cases: [&[&str]; 10] = [
        &["simulate", "--pos", "1/2,1/2", "--dir", "1:1"],
        &["unfold", "--pos", "1/2,0", "--dir", "1:2", "--links", "6"],
        &["diagonals", "--table", "triangle", "--max-links", "3"],
        &["periodic", "--max-word", "6"],
        &["perp", "--table", "triangle", "--samples", "10", "--exceptional"],
        &["welldist", "--pos", "1/2,0", "--dir", "0:1", "--eps", "0.3"],
        &["density", "--pos", "1/2,0", "--dir", "0:1", "--eps", "0.4", "--surface"],
        &["lshape", "--k", "2"],
        &["scan", "--theta", "1:1", "--eps", "0.3", "--grid", "3"],
        &["--backend", "float", "simulate", "--pos", "0.3,0.2", "--dir", "1.0", "--links", "30"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = dir.path().join(format!("{i}.svg"));
        let mut a = args.to_vec();
        a.extend(["--svg", path.to_str().unwrap()]);
        ok(&a);
        assert_well_formed_svg(&path);
    }
}

#[test]
fn saved_tables_round_trip() {
    let dir = TempDir::new().unwrap();
    // Clockwise, with fractions and comments; the tool normalizes the orientation.
    let src = write(&dir, "kite.poly", "0 0  # origin\n1/3 2\n3/2 1\n1 -1/2\n");
    let saved = dir.path().join("saved.poly");
    ok(&["simulate", "-p", &src, "--pos", "1/2,1/2", "--dir", "1:3", "--save-table", saved.to_str().unwrap()]);
    let original = read_polygon::<Rational>(&std::fs::read_to_string(&src).unwrap()).unwrap();
    let again = read_polygon::<Rational>(&std::fs::read_to_string(&saved).unwrap()).unwrap();
    assert_eq!(original.vertices(), again.vertices());

    let resaved = dir.path().join("resaved.poly");
    ok(&["diagonals", "-p", saved.to_str().unwrap(), "--max-links", "0", "--save-table", resaved.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&saved).unwrap(), std::fs::read_to_string(&resaved).unwrap());
}

#[test]
fn json_file_and_text_together() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("r.json");
    let out = ok(&["lshape", "--k", "1", "--json", path.to_str().unwrap()]);
    assert!(out.contains("periodic, 4 links"), "{out}");
    let j: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(j["links"], 4);
    assert_eq!(j["backend"], "exact");
}
