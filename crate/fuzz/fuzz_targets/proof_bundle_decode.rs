#![no_main]

use eventwarden_core::fuzzing::proof_bundle_decode;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    proof_bundle_decode(data);
});
