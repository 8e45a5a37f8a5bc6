#![no_main]

use gsampling::io::parse_coefficients;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(grid) = parse_coefficients(data) {
        assert_eq!(grid.values.len(), grid.side_len().pow(grid.dim as u32));
    }
});
