#![no_main]

use eventwarden_core::fuzzing::creation_payload_decode;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    creation_payload_decode(data);
});
