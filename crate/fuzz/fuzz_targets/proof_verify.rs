#![no_main]

use eventwarden_core::fuzzing::proof_verify;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    proof_verify(data);
});
