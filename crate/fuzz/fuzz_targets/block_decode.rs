#![no_main]

use eventwarden_core::fuzzing::block_decode;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    block_decode(data);
});
