#![no_main]

use diversify::load_instance;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(inst) = load_instance(data) {
        let again = load_instance(&inst.to_json()).expect("serialized instance reloads");
        assert_eq!(inst, again);
    }
});
