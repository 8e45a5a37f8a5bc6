//! Replays the checked-in fuzz corpus through the parsers.

use std::fs;
use std::path::PathBuf;

use gsampling::io::{parse_coefficients, parse_evaluation_csv, parse_frequencies, parse_samples, parse_weights, Pgm};

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<Vec<u8>> = fs::read_dir(&dir).unwrap().map(|e| fs::read(e.unwrap().path()).unwrap()).collect();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out.sort();
    out
}

#[test]
fn corpus_seeds_parse() {
    for s in seeds("frequencies") {
        parse_frequencies(&s).unwrap();
    }
    for s in seeds("samples") {
        parse_samples(&s).unwrap();
    }
    for s in seeds("coefficients") {
        parse_coefficients(&s).unwrap();
    }
    for s in seeds("weights") {
        assert!(parse_weights(&s).unwrap().iter().all(|w| *w > 0.0));
    }
    for s in seeds("evaluation") {
        parse_evaluation_csv(&s).unwrap();
    }
    for s in seeds("pgm") {
        let img = Pgm::parse(&s).unwrap();
        assert_eq!(img.encode(), s);
    }
}

#[test]
fn truncated_seeds_are_rejected_without_panicking() {
    for target in ["frequencies", "samples", "coefficients", "pgm"] {
        for s in seeds(target) {
            for cut in 0..s.len() {
                let head = &s[..cut];
                let _ = (parse_frequencies(head), parse_samples(head), parse_coefficients(head), Pgm::parse(head));
            }
        }
    }
}
