#![no_main]

use gsampling::io::Pgm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = Pgm::parse(data) {
        assert_eq!(img.pixels.len(), img.width * img.height);
    }
});
