//! Shared inputs for the benchmarks.

use fleas::{fixtures, Word};

/// Deterministic mixed-sign word of the given length.
pub fn sample_word(len: usize) -> Word {
    let letters = ["U", "V'", "W", "U'", "V", "W'", "V", "U"];
    let text: Vec<&str> = (0..len).map(|i| letters[(i * 5 + i / 3) % letters.len()]).collect();
    text.join(" ").parse().expect("sample word parses")
}

pub fn fixtures() -> [(&'static str, fleas::PointTriple); 2] {
    [("G", fixtures::g()), ("H", fixtures::h())]
}
