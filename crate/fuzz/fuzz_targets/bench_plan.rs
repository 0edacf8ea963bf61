#![no_main]

use diversify::harness::BenchPlan;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = BenchPlan::from_json(data);
});
