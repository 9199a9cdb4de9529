#![no_main]

use eventwarden_core::fuzzing::report_parse;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    report_parse(data);
});
