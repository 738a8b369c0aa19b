use std::fs;
use std::path::Path;

use polyiso::cli::run_with;
use polyiso::mesh::{read_obj, read_off, validate};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(std::iter::once("polyiso").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn constructed_meshes_revalidate_on_read() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["construct", "gyro", "--k", "25"],
        &["construct", "twisted-gyro", "--k", "9"],
        &["construct", "biarc", "--x", "3", "--y", "5"],
        &["construct", "bipyramid", "--n", "7", "--h", "0.4"],
    ];
    for (i, args) in cases.iter().enumerate() {
        for ext in ["off", "obj"] {
            let file = path(dir.path(), &format!("m{i}.{ext}"));
            let mut a = args.to_vec();
            a.extend(["--out", &file]);
            let (code, out, err) = run(&a);
            assert_eq!(code, 0, "{args:?}: {err}");
            let text = fs::read_to_string(&file).unwrap();
            let m = if ext == "obj" { read_obj(&text) } else { read_off(&text) }.unwrap();
            assert!(validate(&m).is_valid(), "{args:?}");
            let v: Value = serde_json::from_str(&out).unwrap();
            assert_eq!(v["audit"]["faceCount"].as_u64().unwrap() as usize, m.num_faces());
            assert_eq!(v["audit"]["monohedral"], true);
            assert_eq!(v["audit"]["convex"], true);
        }
    }
}

#[test]
fn analyze_matches_construct_audit() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "g.off");
    let (_, built, _) = run(&["construct", "gyro", "--k", "11", "--out", &file]);
    let (code, analyzed, _) = run(&["analyze", "--in", &file]);
    assert_eq!(code, 0);
    let built: Value = serde_json::from_str(&built).unwrap();
    let analyzed: Value = serde_json::from_str(&analyzed).unwrap();
    // OFF keeps 17 significant digits, so the audit is unchanged
    assert_eq!(built["audit"], analyzed);
}

#[test]
fn spike_kleetope_of_octahedron() {
    let dir = tempfile::tempdir().unwrap();
    let oct = path(dir.path(), "oct.off");
    let spike = path(dir.path(), "spike.off");
    assert_eq!(run(&["construct", "bipyramid", "--n", "4", "--out", &oct]).0, 0);
    let (code, out, err) = run(&["kleetope", "--in", &oct, "--mode", "spike", "--out", &spike]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["audit"]["convex"], false);
    assert_eq!(v["audit"]["isosceles"], true);
    assert_eq!(v["audit"]["selfIntersectingPairs"], 0);
    let m = read_off(&fs::read_to_string(&spike).unwrap()).unwrap();
    assert_eq!(m.num_faces(), 24);

    let (code, _, err) = run(&["kleetope", "--in", &oct, "--mode", "spike", "--radius", "0.1"]);
    assert_eq!(code, 1);
    assert!(err.contains("circumradius"));
    let (code, _, err) = run(&["kleetope", "--in", &spike, "--mode", "spike"]);
    assert_eq!(code, 2, "non-convex input is an invariant failure");
    assert!(err.contains("convex"));
}

#[test]
fn graph_kleetope_and_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let tet = path(dir.path(), "tet.txt");
    fs::write(&tet, "# tetrahedron\n4 4\n0 1 2\n0 3 1\n0 2 3\n1 3 2\n").unwrap();
    let k = path(dir.path(), "k.txt");
    let (code, out, _) = run(&["kleetope", "--in", &tet, "--mode", "graph", "--out", &k]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!((v["vertexCount"].as_u64(), v["faceCount"].as_u64()), (Some(8), Some(12)));
    let (code, out, _) = run(&["cycle", "--in", &k]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["length"], 8);
    assert_eq!(v["result"]["exact"], true);

    let koff = path(dir.path(), "k2.off");
    assert_eq!(run(&["kleetope", "--in", &tet, "--mode", "graph", "--iterations", "2", "--out", &koff]).0, 0);
    let (_, out, _) = run(&["cycle", "--in", &koff, "--budget", "30"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["vertexCount"], 20);
}

#[test]
fn convex_kleetope_iterates() {
    let dir = tempfile::tempdir().unwrap();
    let oct = path(dir.path(), "oct.obj");
    run(&["construct", "bipyramid", "--n", "4", "--out", &oct]);
    let (code, out, err) = run(&["kleetope", "--in", &oct, "--mode", "convex", "--iterations", "2"]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["audit"]["vertexCount"], 38);
    assert_eq!(v["audit"]["faceCount"], 72);
    assert_eq!(v["audit"]["convex"], true);
    assert!(v["audit"]["scaleneWitness"].is_u64());
}

#[test]
fn verify_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.json");
    let b = path(dir.path(), "b.json");
    for f in [&a, &b] {
        let (code, out, err) = run(&["verify", "big-dihedral", "--samples", "2000", "--seed", "7", "--report", f]);
        assert_eq!(code, 0, "{err}");
        assert!(out.is_empty());
    }
    let ja = fs::read(&a).unwrap();
    assert_eq!(ja, fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["totalViolations"], 0);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["schemaVersion"], 1);

    let (c1, o1, _) = run(&["verify", "obtuse-projection", "--samples", "3000"]);
    let (c2, o2, _) = run(&["verify", "obtuse-projection", "--samples", "3000"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(o1, o2);
    let v: Value = serde_json::from_str(&o1).unwrap();
    assert!(v["counterexample"].is_null());

    let (code, out, _) = run(&["verify", "sharpness-decay"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["series"].as_array().unwrap().len(), 4);
    assert_eq!(v["doublingBoundHolds"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&[]).0, 1);
    assert_eq!(run(&["construct", "bipyramid", "--n", "2"]).0, 1);
    assert_eq!(run(&["construct", "gyro", "--k", "6", "--equilateral"]).0, 1);
    assert_eq!(run(&["verify", "sharpness-decay", "--iterations", "5"]).0, 1);
    assert_eq!(run(&["cycle", "--in", "/does/not/exist"]).0, 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.off");
    fs::write(&bad, "OFF\n3 1 0\n0 0 0\n1 0 0\n").unwrap();
    let (code, _, err) = run(&["analyze", "--in", &bad]);
    assert_eq!(code, 1);
    assert!(err.contains("line"));
    let (code, _, _) = run(&["construct", "gyro", "--k", "5", "--out", "/does/not/exist/x.off"]);
    assert_eq!(code, 1);
}
