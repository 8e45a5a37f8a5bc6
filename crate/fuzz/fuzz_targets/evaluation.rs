#![no_main]

use gsampling::io::parse_evaluation_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = parse_evaluation_csv(data);
});
