use crate::nucleotide::Nucleotide;

use super::{Accessor, ABSENT};

/// Outgoing arcs of one vertex listed in digit order: `arcs[d]` is the
/// nucleotide bound to digit `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArcList {
    items: [Nucleotide; 4],
    len: u8,
}

impl ArcList {
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[Nucleotide] {
        &self.items[..self.len as usize]
    }

    pub fn digit_of(&self, n: Nucleotide) -> Option<usize> {
        self.as_slice().iter().position(|&x| x == n)
    }

    pub fn get(&self, digit: usize) -> Option<Nucleotide> {
        self.as_slice().get(digit).copied()
    }

    pub(crate) fn from_row(row: &[u32]) -> ArcList {
        let mut list = ArcList { items: [Nucleotide::A; 4], len: 0 };
        for (c, &j) in row.iter().enumerate() {
            if j != ABSENT {
                list.items[list.len as usize] = Nucleotide::from_digit(c as u8);
                list.len += 1;
            }
        }
        list
    }
}

/// Arc-to-digit binding. Canonical binding numbers each vertex's arcs in
/// `A < C < G < T` order; a keyed binding permutes each vertex's digits with
/// a permutation derived from `(key, vertex)` alone, so it is reproducible
/// on any platform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArcBinding {
    Canonical,
    Keyed(u64),
}

impl ArcBinding {
    pub fn new(key: Option<u64>) -> ArcBinding {
        key.map_or(ArcBinding::Canonical, ArcBinding::Keyed)
    }

    pub fn key(&self) -> Option<u64> {
        match self {
            ArcBinding::Canonical => None,
            ArcBinding::Keyed(k) => Some(*k),
        }
    }

    /// Arcs of `v` in digit order.
    #[inline]
    pub fn arcs(&self, acc: &Accessor, v: u32) -> ArcList {
        let mut list = ArcList::from_row(acc.row(v));
        if let ArcBinding::Keyed(key) = *self {
            let n = list.len as usize;
            if n > 1 {
                let mut state = key ^ (v as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93);
                for i in (1..n).rev() {
                    let j = (splitmix64(&mut state) % (i as u64 + 1)) as usize;
                    list.items.swap(i, j);
                }
            }
        }
        list
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Binds a generated accessor; `None` gives the canonical order.
pub fn bind(_acc: &Accessor, key: Option<u64>) -> ArcBinding {
    ArcBinding::new(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nucleotide::{kmer_index, parse_seq};

    #[test]
    fn canonical_order_follows_alphabet() {
        // vertex ending in ...A with arcs {A, C, T}
        let k = 2;
        let vs: Vec<u32> = ["AA", "AC", "AT", "CA", "TA"].iter().map(|s| kmer_index(&parse_seq(s).unwrap())).collect();
        let acc = Accessor::from_vertices(k, &vs).unwrap();
        let arcs = ArcBinding::Canonical.arcs(&acc, kmer_index(&parse_seq("CA").unwrap()));
        assert_eq!(arcs.as_slice(), &[Nucleotide::A, Nucleotide::C, Nucleotide::T]);
        assert_eq!(arcs.digit_of(Nucleotide::T), Some(2));
    }

    #[test]
    fn keyed_binding_is_a_deterministic_permutation() {
        let acc = Accessor::complete(3).unwrap();
        let a = ArcBinding::Keyed(42);
        let b = ArcBinding::Keyed(43);
        let mut differs = false;
        for v in 0..64 {
            let x = a.arcs(&acc, v);
            assert_eq!(x, a.arcs(&acc, v));
            let mut sorted = x.as_slice().to_vec();
            sorted.sort();
            assert_eq!(sorted, Nucleotide::ALL.to_vec());
            differs |= x != b.arcs(&acc, v);
        }
        assert!(differs);
    }

    #[test]
    fn single_arc_always_digit_zero() {
        let vs: Vec<u32> = ["AC", "CA"].iter().map(|s| kmer_index(&parse_seq(s).unwrap())).collect();
        let acc = Accessor::from_vertices(2, &vs).unwrap();
        for key in [1u64, 7, 99] {
            assert_eq!(ArcBinding::Keyed(key).arcs(&acc, 1).as_slice(), &[Nucleotide::A]);
        }
    }
}
