#![no_main]

use diversify::ingest::parse_table;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(table) = parse_table(data) {
        let rows = table.rows();
        assert!(table.columns.iter().all(|c| c.len() == rows));
        if let Some(h) = &table.header {
            assert_eq!(h.len(), table.columns.len());
        }
    }
});
