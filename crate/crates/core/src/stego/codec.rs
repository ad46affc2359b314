//! Payload framing and the bytes <-> integer <-> permutation codec.
//!
//! Payloads are framed as a 2-byte big-endian length prefix followed by
//! the data. Framed bytes map to integers big-endian, and integers map to
//! permutations through the factorial number system (Lehmer code), so a
//! layout line is a number is a byte string.

use num_bigint::BigUint;

use super::StegoError;
use crate::layout::Layout;

/// Adds the 2-byte big-endian length prefix.
pub fn frame(payload: &[u8]) -> Result<Vec<u8>, StegoError> {
    if payload.len() > u16::MAX as usize {
        return Err(StegoError::PayloadTooLarge {
            needed: payload.len() as u64,
            capacity: u16::MAX as u64,
        });
    }
    let mut framed = Vec::with_capacity(payload.len() + 2);
    framed.extend_from_slice(&(payload.len() as u16).to_be_bytes());
    framed.extend_from_slice(payload);
    Ok(framed)
}

/// Strips the length prefix. Trailing bytes beyond the declared length are
/// tolerated: block-oriented carriers pad with zeros and the scheduling
/// channel decodes unmodified gates past the payload end.
pub fn deframe(framed: &[u8]) -> Result<Vec<u8>, StegoError> {
    if framed.len() < 2 {
        return Err(StegoError::Frame(format!(
            "framed payload needs at least 2 bytes, got {}",
            framed.len()
        )));
    }
    let length = u16::from_be_bytes([framed[0], framed[1]]) as usize;
    if framed.len() < length + 2 {
        return Err(StegoError::Frame(format!(
            "length prefix {} exceeds available {} bytes",
            length,
            framed.len() - 2
        )));
    }
    Ok(framed[2..2 + length].to_vec())
}

/// Big-endian bytes-to-integer mapping.
pub fn bytes_to_int(framed: &[u8]) -> BigUint {
    BigUint::from_bytes_be(framed)
}

/// Inverse of [`bytes_to_int`] on framed payloads.
///
/// The frame length is not stored in the integer, but it is recoverable:
/// exactly one zero-padding width makes the length prefix consistent with
/// the total length.
pub fn int_to_frame(value: &BigUint) -> Result<Vec<u8>, StegoError> {
    let minimal = value.to_bytes_be();
    let minimal = if minimal == [0] { Vec::new() } else { minimal };
    for total in minimal.len().max(2)..=minimal.len() + 2 {
        let mut framed = vec![0u8; total - minimal.len()];
        framed.extend_from_slice(&minimal);
        let length = u16::from_be_bytes([framed[0], framed[1]]) as usize;
        if length + 2 == total {
            return Ok(framed);
        }
    }
    Err(StegoError::Frame(
        "integer does not decode to a framed payload".to_string(),
    ))
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

/// `floor(log2 n!)`: the exact bit capacity of an n-qubit layout.
pub fn layout_capacity_bits(n: usize) -> u64 {
    factorial(n).bits() - 1
}

/// Layout channel capacity in whole bytes.
pub fn layout_capacity_bytes(n: usize) -> u64 {
    layout_capacity_bits(n) / 8
}

/// The `k`-th permutation of `{0..n-1}` in lexicographic order.
pub fn int_to_permutation(k: &BigUint, n: usize) -> Result<Layout, StegoError> {
    if *k >= factorial(n) {
        return Err(StegoError::ValueTooLarge(k.to_string()));
    }
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut rest = k.clone();
    let mut map = Vec::with_capacity(n);
    for position in (0..n).rev() {
        let divisor = factorial(position);
        // k < n! keeps every factoradic digit below the remaining count.
        let digit = usize::try_from(&rest / &divisor).expect("digit bounded by n");
        rest %= &divisor;
        map.push(remaining.remove(digit));
    }
    Ok(Layout::new(map).expect("unranking yields a permutation"))
}

/// Lexicographic rank of a permutation; inverse of [`int_to_permutation`].
pub fn permutation_to_int(layout: &Layout) -> BigUint {
    let n = layout.len();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut rank = BigUint::from(0u32);
    for (position, &value) in layout.as_slice().iter().enumerate() {
        let digit = remaining.iter().position(|&r| r == value).unwrap();
        rank += BigUint::from(digit as u64) * factorial(n - 1 - position);
        remaining.remove(digit);
    }
    rank
}
