#![no_main]

use eventwarden_core::fuzzing::rlp_decode;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    rlp_decode(data);
});
