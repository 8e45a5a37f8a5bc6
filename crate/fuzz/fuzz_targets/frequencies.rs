#![no_main]

use gsampling::io::{encode_frequencies, parse_frequencies, Format};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(set) = parse_frequencies(data) {
        // anything accepted must survive a binary round trip
        let bytes = encode_frequencies(&set, Format::Binary);
        let again = parse_frequencies(&bytes).unwrap();
        assert_eq!(again.coords().len(), set.coords().len());
    }
});
