#![no_main]

use eventwarden_core::fuzzing::call_data_decode;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    call_data_decode(data);
});
