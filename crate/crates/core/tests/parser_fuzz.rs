mod common;

use std::panic::catch_unwind;

use annlint::syntax::{coverage, parse_bytes, tokenize};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS: [&str; 5] = ["jpa.ann", "person.ann", "person_employee.ann", "conflict.ann", "grammar_tour.ann"];

fn survives(bytes: &[u8]) -> bool {
    catch_unwind(|| {
        let _ = parse_bytes("fuzz.ann", bytes);
        if let Ok(s) = std::str::from_utf8(bytes) {
            let _ = tokenize(s);
        }
    })
    .is_ok()
}

#[test]
fn random_bytes_never_panic() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..2_000 {
        let len = rng.random_range(0..256);
        let bytes: Vec<u8> = (0..len).map(|_| rng.random()).collect();
        assert!(survives(&bytes), "case {i}: {bytes:?}");
    }
}

#[test]
fn mutated_sources_never_panic() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let sources: Vec<Vec<u8>> = CORPUS.iter().map(|n| common::fixture(n).into_bytes()).collect();
    let alphabet = b"{}();:,=@.\"'-+ \n\tabcxyz019eEfFL\\/*";
    for i in 0..2_000 {
        let mut bytes = sources[i % sources.len()].clone();
        for _ in 0..rng.random_range(1..6) {
            let at = rng.random_range(0..=bytes.len());
            match rng.random_range(0..3) {
                0 => bytes.truncate(at),
                1 => bytes.insert(at, alphabet[rng.random_range(0..alphabet.len())]),
                _ if at < bytes.len() => {
                    bytes.remove(at);
                }
                _ => {}
            }
        }
        assert!(survives(&bytes), "case {i}: {}", String::from_utf8_lossy(&bytes));
    }
}

#[test]
fn corpus_covers_every_production() {
    let sources: Vec<(String, String)> = CORPUS.iter().map(|n| (n.to_string(), common::fixture(n))).collect();
    let report = coverage(sources.iter().map(|(p, s)| (p.as_str(), s.as_str())));
    assert!(report.is_complete(), "uncovered: {:?}", report.missing);
}

#[test]
fn errors_carry_positions() {
    let err = parse_bytes("bad.ann", b"annotation A {\n  require public;\n}").unwrap_err();
    assert_eq!(err[0].span.line, 2);
}
