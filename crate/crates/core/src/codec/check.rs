use crate::error::{Error, Result};
use crate::nucleotide::{Nucleotide, Seq};

/// Check value stored in the protected suffix: the nucleotide sum mod 4 and
/// the ascent-weighted signature `sum_{i=1}^{n-1} i * [y[i+1] >= y[i]]`
/// mod `4^k`, serialized as one symbol followed by `k` big-endian symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CheckValue {
    pub sum_residue: u8,
    pub signature_residue: u32,
    k: u8,
}

impl CheckValue {
    pub fn compute(seq: &[Nucleotide], k: usize) -> CheckValue {
        let modulus = 1u64 << (2 * k);
        let sum = seq.iter().map(|n| n.digit() as u32).sum::<u32>() % 4;
        let mut sig = 0u64;
        for (i, w) in seq.windows(2).enumerate() {
            if w[1] >= w[0] {
                sig += i as u64 + 1;
            }
        }
        CheckValue { sum_residue: sum as u8, signature_residue: (sig % modulus) as u32, k: k as u8 }
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    /// Suffix of `k + 1` nucleotides.
    pub fn to_symbols(&self) -> Seq {
        let k = self.k as usize;
        let mut out = Vec::with_capacity(k + 1);
        out.push(Nucleotide::from_digit(self.sum_residue));
        for p in (0..k).rev() {
            out.push(Nucleotide::from_digit(((self.signature_residue >> (2 * p)) & 3) as u8));
        }
        out
    }

    pub fn from_symbols(symbols: &[Nucleotide], k: usize) -> Result<CheckValue> {
        if symbols.len() != k + 1 {
            return Err(Error::invalid(format!("check suffix needs {} symbols, got {}", k + 1, symbols.len())));
        }
        let sig = symbols[1..].iter().fold(0u32, |acc, n| (acc << 2) | n.digit() as u32);
        Ok(CheckValue { sum_residue: symbols[0].digit(), signature_residue: sig, k: k as u8 })
    }
}
