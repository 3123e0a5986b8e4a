//! Edit-error channel and multi-copy read pools.

use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{CheckValue, Codec, Codeword};
use crate::error::{Error, Result};
use crate::nucleotide::{Nucleotide, Seq};

pub const DEFAULT_SEED: u64 = 2021;
pub const MAX_ERROR_RATE: f64 = 0.08;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCountMode {
    /// Exactly `round(e * L)` edits, halves rounded up.
    Fixed,
    /// Each position independently edited with probability `e`.
    PerNucleotide,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EditKind {
    Substitution,
    Insertion,
    Deletion,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    pub error_rate: f64,
    /// Substitution, insertion, deletion.
    pub type_weights: [f64; 3],
    pub seed: u64,
    pub mode: ErrorCountMode,
}

impl ChannelSpec {
    pub fn new(error_rate: f64) -> Result<ChannelSpec> {
        if !(0.0..=MAX_ERROR_RATE).contains(&error_rate) {
            return Err(Error::invalid(format!("error rate {error_rate} outside [0, {MAX_ERROR_RATE}]")));
        }
        Ok(ChannelSpec { error_rate, type_weights: [1.0 / 3.0; 3], seed: DEFAULT_SEED, mode: ErrorCountMode::Fixed })
    }

    pub fn with_weights(mut self, weights: [f64; 3]) -> Result<ChannelSpec> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("edit type weights {weights:?} must be nonnegative and sum to 1")));
        }
        self.type_weights = weights;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> ChannelSpec {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: ErrorCountMode) -> ChannelSpec {
        self.mode = mode;
        self
    }

    /// `round(e * len)` with halves rounded up.
    pub fn error_count(&self, len: usize) -> usize {
        (self.error_rate * len as f64 + 0.5 + 1e-9).floor() as usize
    }

    fn kind<R: Rng>(&self, rng: &mut R) -> EditKind {
        let x: f64 = rng.gen();
        let [s, i, _] = self.type_weights;
        if x < s {
            EditKind::Substitution
        } else if x < s + i {
            EditKind::Insertion
        } else {
            EditKind::Deletion
        }
    }
}

/// Generator for record `index` of a run seeded with `seed`.
pub fn derived_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Generator for copy `copy` of original `origin`. It does not depend on
/// how many copies a pool holds, so smaller pools are prefixes of larger
/// ones.
pub fn copy_rng(seed: u64, origin: usize, copy: usize) -> ChaCha8Rng {
    derived_rng(derived_rng(seed, origin as u64).next_u64(), copy as u64)
}

/// Applies edits drawn from `spec` using `rng`; returns the corrupted
/// sequence and the applied edits as `(position, kind)` in original
/// coordinates, rightmost first.
pub fn corrupt_with<R: Rng>(seq: &[Nucleotide], spec: &ChannelSpec, rng: &mut R) -> (Seq, Vec<(usize, EditKind)>) {
    let len = seq.len();
    let mut edits: Vec<(usize, EditKind)> = match spec.mode {
        ErrorCountMode::Fixed => {
            // positions 0..len are symbols, position len is the gap after the last
            let slots = if spec.type_weights[1] > 0.0 { len + 1 } else { len };
            let count = spec.error_count(len).min(slots);
            let mut edits = Vec::with_capacity(count);
            for p in sample(rng, slots, count) {
                let mut kind = spec.kind(rng);
                while p == len && kind != EditKind::Insertion {
                    kind = spec.kind(rng);
                }
                edits.push((p, kind));
            }
            edits
        }
        ErrorCountMode::PerNucleotide => {
            let mut edits = Vec::new();
            for p in 0..len {
                if rng.gen_bool(spec.error_rate) {
                    edits.push((p, spec.kind(rng)));
                }
            }
            edits
        }
    };
    edits.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    let mut out = seq.to_vec();
    for &(p, kind) in &edits {
        match kind {
            EditKind::Substitution => {
                let shift = rng.gen_range(1..4u8);
                out[p] = Nucleotide::from_digit(out[p].digit() + shift);
            }
            EditKind::Insertion => out.insert(p, Nucleotide::from_digit(rng.gen_range(0..4u8))),
            EditKind::Deletion => {
                out.remove(p);
            }
        }
    }
    (out, edits)
}

/// Corrupts with a generator seeded from `spec.seed`.
pub fn corrupt(seq: &[Nucleotide], spec: &ChannelSpec) -> Seq {
    corrupt_with(seq, spec, &mut ChaCha8Rng::seed_from_u64(spec.seed)).0
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReadRecord {
    /// Index of the original sequence.
    pub origin: usize,
    pub start: Option<u32>,
    pub payload: Seq,
    /// Protected, copied from the original.
    pub check: CheckValue,
    /// Protected, copied from the original.
    pub expected_len: usize,
}

impl ReadRecord {
    /// `<origin>\t<expected length>\t<framed record>`.
    pub fn format(&self, codec: &Codec) -> String {
        let cw = Codeword { start: self.start, payload: self.payload.clone(), check: self.check };
        format!("{}\t{}\t{}", self.origin, self.expected_len, codec.format_record(&cw))
    }

    /// Inverse of [`ReadRecord::format`]. A bare framed record is taken as
    /// an error-free read of origin `line_index`.
    pub fn parse(codec: &Codec, line: &str, line_index: usize) -> Result<ReadRecord> {
        let fields: Vec<&str> = line.trim().split('\t').collect();
        let (origin, expected, record) = match fields.as_slice() {
            [o, e, r] => (
                o.parse().map_err(|_| Error::invalid(format!("bad origin {o:?}")))?,
                Some(e.parse().map_err(|_| Error::invalid(format!("bad expected length {e:?}")))?),
                *r,
            ),
            [r] => (line_index, None, *r),
            _ => return Err(Error::invalid(format!("read line {line_index} has {} fields", fields.len()))),
        };
        let cw = codec.parse_record(record)?;
        let expected_len = expected.unwrap_or(cw.payload.len());
        Ok(ReadRecord { origin, start: cw.start, expected_len, payload: cw.payload, check: cw.check })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReadPool {
    pub records: Vec<ReadRecord>,
    pub diversity: usize,
    pub copies: usize,
}

/// `copies` independently corrupted reads of every original, drawn from
/// [`copy_rng`].
pub fn make_pool(originals: &[Codeword], copies: usize, spec: &ChannelSpec) -> Result<ReadPool> {
    if originals.is_empty() || copies == 0 {
        return Err(Error::invalid("pool needs at least one original and one copy"));
    }
    let mut records = Vec::with_capacity(originals.len() * copies);
    for (origin, cw) in originals.iter().enumerate() {
        for c in 0..copies {
            let (payload, _) = corrupt_with(&cw.payload, spec, &mut copy_rng(spec.seed, origin, c));
            records.push(ReadRecord { origin, start: cw.start, payload, check: cw.check, expected_len: cw.payload.len() });
        }
    }
    Ok(ReadPool { records, diversity: originals.len(), copies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nucleotide::parse_seq;

    fn random_seq(len: usize, seed: u64) -> Seq {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| Nucleotide::from_digit(rng.gen_range(0..4))).collect()
    }

    #[test]
    fn zero_rate_is_identity() {
        let s = random_seq(200, 1);
        assert_eq!(corrupt(&s, &ChannelSpec::new(0.0).unwrap()), s);
    }

    #[test]
    fn half_percent_of_200_is_one_edit() {
        let spec = ChannelSpec::new(0.005).unwrap();
        assert_eq!(spec.error_count(200), 1);
        assert_eq!(ChannelSpec::new(0.04).unwrap().error_count(200), 8);
        assert_eq!(ChannelSpec::new(0.0125).unwrap().error_count(200), 3);
        let (_, edits) = corrupt_with(&random_seq(200, 2), &spec, &mut derived_rng(5, 0));
        assert_eq!(edits.len(), 1);
    }

    #[test]
    fn length_accounting() {
        let s = random_seq(200, 3);
        let spec = ChannelSpec::new(0.04).unwrap();
        for i in 0..200 {
            let (out, edits) = corrupt_with(&s, &spec, &mut derived_rng(7, i));
            assert_eq!(edits.len(), 8);
            let ins = edits.iter().filter(|e| e.1 == EditKind::Insertion).count();
            let del = edits.iter().filter(|e| e.1 == EditKind::Deletion).count();
            assert_eq!(out.len() + del, s.len() + ins);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let s = random_seq(100, 4);
        let spec = ChannelSpec::new(0.03).unwrap().with_seed(11);
        assert_eq!(corrupt(&s, &spec), corrupt(&s, &spec));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ChannelSpec::new(0.5).is_err());
        assert!(ChannelSpec::new(0.01).unwrap().with_weights([0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn pool_has_every_copy() {
        let cw = Codeword { start: Some(0), payload: parse_seq("ACGTAC").unwrap(), check: CheckValue::compute(&parse_seq("ACGTAC").unwrap(), 2) };
        let pool = make_pool(&[cw.clone(), cw], 3, &ChannelSpec::new(0.0).unwrap()).unwrap();
        assert_eq!(pool.records.len(), 6);
        assert!(pool.records.iter().all(|r| r.payload.len() == 6));
        assert_eq!(pool.records.iter().filter(|r| r.origin == 1).count(), 3);
    }

    #[test]
    fn smaller_pools_are_prefixes() {
        let y = random_seq(120, 9);
        let cw = Codeword { start: Some(0), check: CheckValue::compute(&y, 3), payload: y };
        let spec = ChannelSpec::new(0.04).unwrap();
        let small = make_pool(&[cw.clone(), cw.clone()], 2, &spec).unwrap();
        let large = make_pool(&[cw.clone(), cw], 5, &spec).unwrap();
        for origin in 0..2 {
            let a: Vec<_> = small.records.iter().filter(|r| r.origin == origin).collect();
            let b: Vec<_> = large.records.iter().filter(|r| r.origin == origin).take(2).collect();
            assert_eq!(a, b);
        }
    }
}
