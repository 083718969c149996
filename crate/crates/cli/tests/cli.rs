use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use axum::body::Body;
use axum::http::Request;
use gslep_core::io::{write_frame_table, FrameRecord};
use gslep_service::{router, AppState, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/fixtures")
}

fn gslep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gslep"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = gslep(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn frame_column(bytes: &[u8], column: &str) -> Vec<f64> {
    let mut reader = csv::Reader::from_reader(bytes);
    let index = reader
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == column)
        .unwrap();
    reader
        .records()
        .map(|r| r.unwrap()[index].parse().unwrap())
        .collect()
}

#[test]
fn slepian_writes_every_artifact_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = fixture_dir();
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let stdout = ok(&[
            "slepian",
            "--openflights",
            path(&fixture),
            "--operator",
            "modularity",
            "--bandwidth",
            "4",
            "--select-attr",
            "continent=Europe",
            "--out",
            path(&out),
        ]);
        assert!(
            stdout.contains("W=4 S=3 N=6 K=2.0000 transition_index="),
            "{stdout}"
        );
        runs.push(out);
    }
    for name in [
        "basis.json",
        "slepians.csv",
        "summary.json",
        "spectrum.csv",
        "frame.csv",
    ] {
        assert_eq!(read(&runs[0], name), read(&runs[1], name), "{name}");
    }
    let summary: Value = serde_json::from_slice(&read(&runs[0], "summary.json")).unwrap();
    assert_eq!(summary["selection_size"], 3);
    assert_eq!(summary["mu_sequence"].as_array().unwrap().len(), 4);
    let slepians = String::from_utf8(read(&runs[0], "slepians.csv")).unwrap();
    assert_eq!(slepians.lines().next().unwrap(), "node,label,s1,s2,s3,s4");
}

#[tokio::test]
async fn cli_frame_matches_service_response_byte_for_byte() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = fixture_dir();
    let cases = [
        (
            json!({"attribute": {"key": "continent", "value": "Europe"}}),
            "--select-attr",
            "continent=Europe",
            "modularity",
            4,
        ),
        (
            json!({"nodes": ["IST"]}),
            "--select-nodes",
            "IST",
            "laplacian",
            3,
        ),
        (
            json!({"nodes": ["ABJ", "DKR", "JFK"]}),
            "--select-nodes",
            "ABJ,DKR,JFK",
            "laplacian-norm",
            2,
        ),
    ];
    let (graph, _) = gslep_core::datasets::load_openflights_dir(&fixture).unwrap();
    let app = router(AppState::new(Some(graph), ServiceConfig::default()));
    for (i, (selection, flag, value, operator, w)) in cases.into_iter().enumerate() {
        let out = tmp.path().join(format!("case{i}"));
        let w_text = w.to_string();
        ok(&[
            "slepian",
            "--openflights",
            path(&fixture),
            "--operator",
            operator,
            "--bandwidth",
            &w_text,
            flag,
            value,
            "--out",
            path(&out),
        ]);

        let body = json!({"selection": selection, "W": w, "operator": operator, "axes": [0, 1]});
        let request = Request::post("/slepian/query")
            .header("content-type", "application/json")
            .body(Body::from(body.to_string()))
            .unwrap();
        let response = app.clone().oneshot(request).await.unwrap();
        assert!(response.status().is_success());
        let bytes = response.into_body().collect().await.unwrap().to_bytes();
        let value: Value = serde_json::from_slice(&bytes).unwrap();
        let records: Vec<FrameRecord> =
            serde_json::from_value(value["frame"]["nodes"].clone()).unwrap();
        let mut served = Vec::new();
        write_frame_table(&records, &mut served).unwrap();
        assert_eq!(served, read(&out, "frame.csv"), "{operator} {flag} {value}");

        let summary: Value = serde_json::from_slice(&read(&out, "summary.json")).unwrap();
        assert_eq!(summary["mu_sequence"], value["mu_sequence"]);
        assert_eq!(summary["shannon_number"], value["K"]);
        assert_eq!(summary["transition_index"], value["transition_index"]);
    }
}

#[test]
fn ingested_edge_list_reproduces_the_direct_run() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = fixture_dir();
    let ingest = tmp.path().join("ingest");
    let stdout = ok(&[
        "ingest",
        "--openflights",
        path(&fixture),
        "--out",
        path(&ingest),
    ]);
    assert!(stdout.contains("airports=6 routes=8"), "{stdout}");
    let report: Value = serde_json::from_slice(&read(&ingest, "ingest_report.json")).unwrap();
    assert_eq!(report["undirected_edges"], 6);

    let direct = tmp.path().join("direct");
    let reloaded = tmp.path().join("reloaded");
    let common = [
        "--operator",
        "laplacian",
        "--bandwidth",
        "3",
        "--select-nodes",
        "CDG,BRU",
    ];
    let mut a = vec![
        "slepian",
        "--openflights",
        path(&fixture),
        "--out",
        path(&direct),
    ];
    a.extend(common);
    ok(&a);
    let edges = ingest.join("airports.edges");
    let meta = ingest.join("airports.nodes.csv");
    let mut b = vec![
        "slepian",
        "--edges",
        path(&edges),
        "--meta",
        path(&meta),
        "--out",
        path(&reloaded),
    ];
    b.extend(common);
    ok(&b);
    for name in ["basis.json", "slepians.csv", "frame.csv", "spectrum.csv"] {
        assert_eq!(read(&direct, name), read(&reloaded, name), "{name}");
    }
}

#[test]
fn full_selection_reproduces_the_raw_eigenvector_view() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = fixture_dir();
    let (slep, raw) = (tmp.path().join("slep"), tmp.path().join("raw"));
    let base = [
        "--openflights",
        path(&fixture),
        "--operator",
        "modularity",
        "--bandwidth",
        "2",
    ];
    let mut a = vec!["embed"];
    a.extend(base);
    a.extend(["--out", path(&slep)]);
    ok(&a);
    let mut b = vec!["embed", "--raw"];
    b.extend(base);
    b.extend(["--out", path(&raw)]);
    ok(&b);
    // Slepians of the full selection span U_W, so they differ from (u1, u2)
    // by a 2x2 orthogonal map that preserves each node's radius.
    let (m1, m2) = (
        frame_column(&read(&slep, "frame.csv"), "magnitude"),
        frame_column(&read(&raw, "frame.csv"), "magnitude"),
    );
    for (x, y) in m1.iter().zip(&m2) {
        assert!((x - y).abs() < 1e-10, "{m1:?} vs {m2:?}");
    }
}

#[test]
fn sweep_slices_one_basis_and_matches_the_generated_files() {
    let tmp = tempfile::tempdir().unwrap();
    let gen = tmp.path().join("gen");
    let stdout = ok(&[
        "generate",
        "--nodes",
        "300",
        "--seed",
        "3",
        "--out",
        path(&gen),
    ]);
    assert!(stdout.starts_with("N=300 "), "{stdout}");

    let (in_memory, from_files) = (tmp.path().join("mem"), tmp.path().join("files"));
    let sweep = [
        "sweep",
        "--operator",
        "laplacian-norm",
        "--seed",
        "3",
        "--bandwidth",
        "2..4,10",
    ];
    let mut a = sweep.to_vec();
    a.extend(["--swiss-roll", "--nodes", "300", "--out", path(&in_memory)]);
    let stdout = ok(&a);
    assert_eq!(stdout.lines().count(), 4);

    let (edges, meta, selection) = (
        gen.join("roll.edges"),
        gen.join("roll.nodes.csv"),
        gen.join("selection.txt"),
    );
    let mut b = sweep.to_vec();
    b.extend([
        "--edges",
        path(&edges),
        "--meta",
        path(&meta),
        "--select-file",
        path(&selection),
    ]);
    b.extend(["--out", path(&from_files)]);
    ok(&b);

    for name in [
        "mu_spectrum.csv",
        "sweep.json",
        "frame_W2.csv",
        "frame_W10.csv",
        "basis.json",
    ] {
        assert_eq!(read(&in_memory, name), read(&from_files, name), "{name}");
    }
    let spectrum = String::from_utf8(read(&in_memory, "mu_spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().count(), 1 + 2 + 3 + 4 + 10);
    let basis: Value = serde_json::from_slice(&read(&in_memory, "basis.json")).unwrap();
    assert_eq!(basis["values"].as_array().unwrap().len(), 10);
}

#[test]
fn failures_exit_nonzero_with_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = fixture_dir();
    let out = tmp.path().join("out");
    let run = |extra: &[&str]| {
        let mut args = vec![
            "slepian",
            "--openflights",
            path(&fixture),
            "--out",
            path(&out),
        ];
        args.extend(extra);
        gslep(&args)
    };

    let r = run(&["--bandwidth", "6"]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("bandwidth 6 out of range"));

    let r = run(&["--bandwidth", "3", "--select-nodes", "CDG,XYZ,QQQ"]);
    assert!(!r.status.success());
    let stderr = String::from_utf8_lossy(&r.stderr);
    assert!(stderr.contains("XYZ") && stderr.contains("QQQ"), "{stderr}");

    let r = run(&["--bandwidth", "3", "--axes", "0,3"]);
    assert!(!r.status.success());
    assert!(
        !out.join("basis.json").exists(),
        "nothing written before validation"
    );

    let r = gslep(&["slepian", "--bandwidth", "2", "--out", path(&out)]);
    assert_eq!(r.status.code(), Some(2));

    let r = gslep(&[
        "spectrum",
        "--swiss-roll",
        "--openflights",
        path(&fixture),
        "--bandwidth",
        "2",
    ]);
    assert_eq!(r.status.code(), Some(2), "two input sources");

    let r = run(&["--bandwidth", "2", "--operator", "spectral"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn partial_outputs_are_flagged() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = fixture_dir();
    let out = tmp.path().join("out");
    // A directory where the frame table should go makes the last write fail.
    fs::create_dir_all(out.join("frame.csv")).unwrap();
    let r = gslep(&[
        "slepian",
        "--openflights",
        path(&fixture),
        "--bandwidth",
        "3",
        "--out",
        path(&out),
    ]);
    assert!(!r.status.success());
    let marker = fs::read_to_string(out.join("INCOMPLETE")).unwrap();
    assert!(
        marker.contains("basis.json") && marker.contains("summary.json"),
        "{marker}"
    );
    assert!(String::from_utf8_lossy(&r.stderr).contains("partial outputs"));

    fs::remove_dir(out.join("frame.csv")).unwrap();
    ok(&[
        "slepian",
        "--openflights",
        path(&fixture),
        "--bandwidth",
        "3",
        "--out",
        path(&out),
    ]);
    assert!(
        !out.join("INCOMPLETE").exists(),
        "a successful rerun clears the marker"
    );
}

#[test]
fn spectrum_writes_basis_and_eigenvalues() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let fixture = fixture_dir();
    let stdout = ok(&[
        "spectrum",
        "--openflights",
        path(&fixture),
        "--operator",
        "laplacian",
        "--bandwidth",
        "4",
        "--out",
        path(&out),
    ]);
    assert!(stdout.contains("operator=laplacian W=4"), "{stdout}");
    let values = frame_column(&read(&out, "eigenvalues.csv"), "eigenvalue");
    assert_eq!(values.len(), 4);
    assert!(values[0].abs() < 1e-10);
    let basis = gslep_core::io::load_basis(&out.join("basis.json")).unwrap();
    assert_eq!(basis.values, values);
}
