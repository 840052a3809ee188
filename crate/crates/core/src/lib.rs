//! Compiles Boolean functions into the DQC1, HC1Q, Clifford+T and H-counting
//! circuit families whose acceptance probabilities encode `gap(f)` or `#f`,
//! and checks every closed-form probability against two independent exact
//! simulators: a dense statevector and a mod-8 path-sum engine.
//!
//! Conventions used throughout the crate:
//!
//! * bit / qubit 0 is the leftmost character of a ket string, and the
//!   statevector index of a basis state is the big-endian integer of that
//!   string;
//! * Boolean assignments are enumerated lexicographically, `x_1` being the
//!   most significant bit.

pub mod boolean;
pub mod circuit;
pub mod constructions;
pub mod error;
pub mod instance;
pub mod pathsum;
pub mod rational;
pub mod reversible;
pub mod statevector;

pub use error::{Error, Result};

/// Parses a string of `0`/`1` characters into a bit vector.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .enumerate()
        .map(|(i, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::parse(1, format!("bad bit character {c:?} at position {i}"))),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
