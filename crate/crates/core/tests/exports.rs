use std::path::PathBuf;

use gslep_core::datasets::load_openflights_dir;
use gslep_core::io::{
    frame_records, load_basis, load_graph, save_basis, save_graph, spectrum_rows,
    write_frame_table, write_slepian_table, write_spectrum_table, SlepianSummary,
};
use gslep_core::{
    compute_slepians, embed, geographic_overlay, make_operator, solve_extreme, BasisKind,
    OperatorKind, SolverConfig, SubgraphSelection,
};

fn fixture() -> gslep_core::Graph {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    load_openflights_dir(dir).unwrap().0
}

#[test]
fn graph_and_basis_files_round_trip() {
    let g = fixture();
    let dir = tempfile::tempdir().unwrap();
    let (edges, meta) = (dir.path().join("g.edges"), dir.path().join("g.nodes.csv"));
    save_graph(&g, &edges, &meta).unwrap();
    assert_eq!(load_graph(&edges, Some(&meta)).unwrap(), g);

    let op = make_operator(&g, OperatorKind::Modularity).unwrap();
    let basis = solve_extreme(&op, &SolverConfig::new(3)).unwrap();
    let path = dir.path().join("basis.json");
    save_basis(&basis, &path).unwrap();
    assert_eq!(load_basis(&path).unwrap(), basis);
}

#[test]
fn tables_have_headers_and_one_row_per_node() {
    let g = fixture();
    let op = make_operator(&g, OperatorKind::Modularity).unwrap();
    let basis = solve_extreme(&op, &SolverConfig::new(2)).unwrap();
    let sel = SubgraphSelection::new(vec![0, 1, 4], 6).unwrap();
    let s = compute_slepians(&basis, &sel).unwrap();

    let mut out = Vec::new();
    write_slepian_table(&g, &s, 2, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "node,label,s1,s2");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("0,CDG,"));

    let frame = embed(&s.vectors, (0, 1), None, BasisKind::Slepian).unwrap();
    let styled = geographic_overlay(&frame, &g).unwrap();
    let mut out = Vec::new();
    write_frame_table(&frame_records(&g, &frame, Some(&styled)), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("node,label,x,y,color_scalar,magnitude,lon,lat,hue,size\n"));
    let jfk: Vec<&str> = text.lines().nth(6).unwrap().split(',').collect();
    assert_eq!(jfk[1], "JFK");
    assert_eq!(jfk[6].parse::<f64>().unwrap(), -73.77890015);

    let mut out = Vec::new();
    write_spectrum_table(&spectrum_rows(&s), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "bandwidth,k,mu,shannon_number,transition_index"
    );
    assert_eq!(text.lines().count(), 3);

    let summary = SlepianSummary::new(OperatorKind::Modularity, &s);
    let json = serde_json::to_value(&summary).unwrap();
    assert_eq!(json["operator"], "modularity");
    assert_eq!(json["selection_size"], 3);
    assert_eq!(json["shannon_number"], 1.0);
}
