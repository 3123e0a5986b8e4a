//! Quaternary alphabet and k-mer indexing.
//!
//! Nucleotides map to digits `A=0, C=1, G=2, T=3`; a k-mer is indexed as the
//! big-endian base-4 number of its digits, so its successor on appending `c`
//! is `(index * 4 + c) mod 4^k`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Nucleotide {
    A = 0,
    C = 1,
    G = 2,
    T = 3,
}

impl Nucleotide {
    pub const ALL: [Nucleotide; 4] = [Nucleotide::A, Nucleotide::C, Nucleotide::G, Nucleotide::T];

    #[inline]
    pub fn from_digit(d: u8) -> Nucleotide {
        Nucleotide::ALL[(d & 3) as usize]
    }

    #[inline]
    pub fn digit(self) -> u8 {
        self as u8
    }

    pub fn from_char(c: char) -> Option<Nucleotide> {
        match c {
            'A' | 'a' => Some(Nucleotide::A),
            'C' | 'c' => Some(Nucleotide::C),
            'G' | 'g' => Some(Nucleotide::G),
            'T' | 't' => Some(Nucleotide::T),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        b"ACGT"[self as usize] as char
    }

    pub fn complement(self) -> Nucleotide {
        Nucleotide::from_digit(3 - self.digit())
    }

    pub fn is_gc(self) -> bool {
        matches!(self, Nucleotide::C | Nucleotide::G)
    }
}

impl fmt::Display for Nucleotide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

pub type Seq = Vec<Nucleotide>;

/// Parses an `A/C/G/T` string (case-insensitive).
pub fn parse_seq(s: &str) -> Result<Seq> {
    s.chars()
        .enumerate()
        .map(|(i, c)| {
            Nucleotide::from_char(c)
                .ok_or_else(|| Error::invalid(format!("invalid nucleotide {c:?} at position {i}")))
        })
        .collect()
}

pub fn seq_to_string(seq: &[Nucleotide]) -> String {
    seq.iter().map(|n| n.to_char()).collect()
}

pub fn reverse_complement(seq: &[Nucleotide]) -> Seq {
    seq.iter().rev().map(|n| n.complement()).collect()
}

/// `sum_p u[p] * 4^(k-p)` over the k-mer.
pub fn kmer_index(kmer: &[Nucleotide]) -> u32 {
    kmer.iter().fold(0u32, |acc, n| (acc << 2) | n.digit() as u32)
}

pub fn kmer_from_index(index: u32, k: usize) -> Seq {
    (0..k)
        .map(|p| Nucleotide::from_digit(((index >> (2 * (k - 1 - p))) & 3) as u8))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_mapping_is_bijective_and_ordered() {
        for (i, n) in Nucleotide::ALL.iter().enumerate() {
            assert_eq!(n.digit() as usize, i);
            assert_eq!(Nucleotide::from_digit(i as u8), *n);
        }
        assert!(Nucleotide::A < Nucleotide::C && Nucleotide::C < Nucleotide::G && Nucleotide::G < Nucleotide::T);
    }

    #[test]
    fn parse_rejects_foreign_symbols() {
        assert!(parse_seq("ACGN").is_err());
        assert_eq!(seq_to_string(&parse_seq("acgt").unwrap()), "ACGT");
    }

    #[test]
    fn index_round_trip() {
        let kmer = parse_seq("GATTACA").unwrap();
        let idx = kmer_index(&kmer);
        assert_eq!(kmer_from_index(idx, 7), kmer);
        // AC = 0*4 + 1
        assert_eq!(kmer_index(&parse_seq("AC").unwrap()), 1);
        assert_eq!(kmer_index(&parse_seq("TC").unwrap()), 13);
    }

    #[test]
    fn reverse_complement_of_motif() {
        assert_eq!(seq_to_string(&reverse_complement(&parse_seq("GACGC").unwrap())), "GCGTC");
    }
}
