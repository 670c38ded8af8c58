use monadcoh_wasm::{cohomology_report, families, scan_report};

#[test]
fn lists_every_family() {
    assert_eq!(families().lines().count(), 8);
    assert!(families().lines().any(|f| f == "nullcorrelation"));
    assert!(families().lines().any(|f| f == "c32"));
}

#[test]
fn schwarzenberger_report() {
    let text = cohomology_report("c36_schwarzenberger", "", "q", 0, -3, 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["chern"], "3 0 3 6");
    assert_eq!(v["spectrum"], "(-1,-1,-1) OK");
    assert_eq!(v["stability"], "stable");
    let rows = v["table"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r["exact"] == true));
}

#[test]
fn c32_with_parameters() {
    let text = cohomology_report("c32", "1, 0, 0, 1", "fp:101", 0, -1, 0).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["spectrum"], "(-1,0,0) OK");
    assert_eq!(v["table"][0]["h"][1], "2");
    assert_eq!(v["table"][1]["h"][1], "2");
}

#[test]
fn rejects_wide_windows_and_bad_input() {
    assert!(cohomology_report("c32", "", "q", 0, -20, 20).is_err());
    assert!(cohomology_report("nope", "", "q", 0, 0, 1).is_err());
    assert!(cohomology_report("c32", "", "fp:6", 0, 0, 1).is_err());
    assert!(scan_report("c32", "", "fp:101", 0, "points", 5).is_err());
    assert!(scan_report("c32", "", "fp:101", 0, "planes", 0).is_err());
}

#[test]
fn exhaustive_plane_scan_over_f5() {
    let tsv = scan_report("c32", "1,0,0,1", "fp:5", 0, "planes", 0).unwrap();
    assert!(tsv.contains("# planes: 156"), "{tsv}");
    assert!(tsv.contains("# unstable planes: 0"), "{tsv}");
}

#[test]
fn sampled_line_scan_is_seeded() {
    let a = scan_report("c30_min", "", "fp:101", 4, "lines", 10).unwrap();
    let b = scan_report("c30_min", "", "fp:101", 4, "lines", 10).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("# lines: 10"), "{a}");
}
