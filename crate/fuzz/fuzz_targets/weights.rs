#![no_main]

use gsampling::io::parse_weights;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = parse_weights(data);
});
