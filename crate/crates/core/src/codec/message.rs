use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// A bit string of any length, leading zeros included.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Message {
    bits: Vec<bool>,
}

impl Message {
    pub fn from_bits(bits: Vec<bool>) -> Message {
        Message { bits }
    }

    /// Bytes most-significant bit first; `m = 8 * bytes.len()`.
    pub fn from_bytes(bytes: &[u8]) -> Message {
        let bits = bytes.iter().flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1 == 1)).collect();
        Message { bits }
    }

    /// Parses a `0`/`1` string.
    pub fn parse(s: &str) -> Result<Message> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Message::from_bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Packs into bytes, zero-padding the final byte on the right.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i))))
            .collect()
    }

    /// `2^m + value(bits)`: the high sentinel bit keeps leading zeros.
    pub fn to_integer(&self) -> BigUint {
        let m = self.bits.len() as u64;
        let mut pi = BigUint::zero();
        pi.set_bit(m, true);
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                pi.set_bit(m - 1 - i as u64, true);
            }
        }
        pi
    }

    /// Inverse of [`Message::to_integer`]; the integer must be at least 1.
    pub fn from_integer(pi: &BigUint) -> Result<Message> {
        if pi.is_zero() {
            return Err(Error::invalid("integer 0 carries no sentinel bit"));
        }
        let m = pi.bits() - 1;
        let bits = (0..m).map(|i| pi.bit(m - 1 - i)).collect();
        Ok(Message { bits })
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Splits off `pi mod p`, leaving the quotient in `pi`.
pub(crate) fn split_digit(pi: &mut BigUint, p: u32) -> u32 {
    let r = (&*pi % p).iter_u32_digits().next().unwrap_or(0);
    *pi /= p;
    r
}

/// Horner evaluation of mixed-radix digits given as `(digit, radix)` pairs,
/// least significant first.
pub(crate) fn join_digits(digits: &[(u32, u32)]) -> BigUint {
    let mut acc = BigUint::zero();
    for &(r, p) in digits.iter().rev() {
        acc *= p;
        acc += r;
    }
    acc
}

#[cfg(test)]
mod tests {
    use num_traits::One;

    use super::*;

    #[test]
    fn sentinel_keeps_leading_zeros() {
        let a = Message::parse("0001").unwrap();
        let b = Message::parse("1").unwrap();
        assert_ne!(a.to_integer(), b.to_integer());
        assert_eq!(a.to_integer(), BigUint::from(0b10001u32));
        assert_eq!(Message::from_integer(&a.to_integer()).unwrap(), a);
    }

    #[test]
    fn empty_message_is_one() {
        let e = Message::default();
        assert!(e.to_integer().is_one());
        assert_eq!(Message::from_integer(&BigUint::one()).unwrap(), e);
        assert!(Message::from_integer(&BigUint::zero()).is_err());
    }

    #[test]
    fn bytes_round_trip() {
        let m = Message::from_bytes(&[0x00, 0xA5, 0xFF]);
        assert_eq!(m.len(), 24);
        assert_eq!(m.to_bytes(), vec![0x00, 0xA5, 0xFF]);
        assert_eq!(m.to_string()[..16].to_string(), "0000000010100101");
    }

    #[test]
    fn mixed_radix_round_trip() {
        let original = BigUint::from(42u32);
        let mut pi = original.clone();
        let radices = [4u32, 2, 2, 3];
        let mut digits = Vec::new();
        for &p in &radices {
            digits.push((split_digit(&mut pi, p), p));
        }
        assert!(pi.is_zero());
        assert_eq!(digits.iter().map(|d| d.0).collect::<Vec<_>>(), vec![2, 0, 1, 2]);
        assert_eq!(join_digits(&digits), original);
    }
}
