//! Replays the checked-in fuzz seeds through the same checks as the fuzz targets.

use std::fs;
use std::path::PathBuf;

use diversify::harness::BenchPlan;
use diversify::ingest::parse_table;
use diversify::load_instance;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn instance_seeds_round_trip() {
    for (path, text) in seeds("instance_json") {
        let inst = load_instance(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(load_instance(&inst.to_json()).unwrap(), inst);
    }
}

#[test]
fn table_seeds_parse() {
    for (path, text) in seeds("feature_table") {
        let table = parse_table(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(table.columns.iter().all(|c| c.len() == table.rows()));
    }
}

#[test]
fn plan_seeds_parse() {
    for (path, text) in seeds("bench_plan") {
        BenchPlan::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
