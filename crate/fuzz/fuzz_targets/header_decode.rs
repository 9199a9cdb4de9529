#![no_main]

use eventwarden_core::fuzzing::header_decode;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    header_decode(data);
});
