#![no_main]

use eventwarden_core::fuzzing::receipt_decode;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    receipt_decode(data);
});
