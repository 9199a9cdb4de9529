#![no_main]

use eventwarden_core::fuzzing::scenario_parse;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    scenario_parse(data);
});
