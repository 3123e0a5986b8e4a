//! Pretreatment-free retrieval: repair every read, count the sieved
//! candidates, keep the most frequent ones and decode them. Also holds the
//! fitted estimators for read counts and thresholds, and the operation
//! count model comparing this pipeline with cluster-and-align retrieval.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::channel::{copy_rng, corrupt_with, derived_rng, ChannelSpec, ReadPool, ReadRecord};
use crate::codec::{CheckValue, Codec, Codeword, Message, WalkState};
use crate::corrector::{repair, repair_counters_profile, CandidateSet, RepairCounters, RepairLimits, PROFILE_READ_LEN};
use crate::error::{Error, Result};
use crate::nucleotide::{Nucleotide, Seq};

/// Operations to turn a 200 nt walk into its integer.
pub const DIGITS_TO_INTEGER_OPS: f64 = 24_275.83;
/// Operations to turn that integer into the bit message.
pub const INTEGER_TO_BITS_OPS: f64 = 24_712.86;

/// Candidate counts keyed by the full payload.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: FxHashMap<Seq, u64>,
}

impl FrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one occurrence and returns the new count.
    pub fn add(&mut self, seq: &[Nucleotide]) -> u64 {
        if let Some(c) = self.counts.get_mut(seq) {
            *c += 1;
            return *c;
        }
        self.counts.insert(seq.to_vec(), 1);
        1
    }

    pub fn merge(&mut self, other: FrequencyTable) {
        for (seq, c) in other.counts {
            *self.counts.entry(seq).or_insert(0) += c;
        }
    }

    pub fn count(&self, seq: &[Nucleotide]) -> u64 {
        self.counts.get(seq).copied().unwrap_or(0)
    }

    /// Distinct sequences.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Seq, u64)> {
        self.counts.iter().map(|(s, &c)| (s, c))
    }

    /// The `n` most frequent sequences, equal counts in lexicographic order.
    /// Sequences are grouped by count first, so no comparison sort over the
    /// whole table is needed.
    pub fn top(&self, n: usize) -> Vec<(Seq, u64)> {
        let max = self.counts.values().copied().max().unwrap_or(0) as usize;
        let mut buckets: Vec<Vec<&Seq>> = vec![Vec::new(); max + 1];
        for (s, &c) in &self.counts {
            buckets[c as usize].push(s);
        }
        let mut out = Vec::with_capacity(n.min(self.counts.len()));
        for (c, bucket) in buckets.iter_mut().enumerate().rev() {
            if out.len() >= n {
                break;
            }
            bucket.sort_unstable();
            out.extend(bucket.iter().take(n - out.len()).map(|s| ((*s).clone(), c as u64)));
        }
        out
    }

    /// Every sequence counted more than `tau` times, in lexicographic order.
    pub fn above(&self, tau: u64) -> Vec<Seq> {
        let mut out: Vec<Seq> = self.counts.iter().filter(|(_, &c)| c > tau).map(|(s, _)| s.clone()).collect();
        out.sort_unstable();
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RetrievalReport {
    /// Sequences asked for.
    pub diversity: usize,
    /// Copies per original.
    pub reads: usize,
    pub records: usize,
    pub retrieved: usize,
    /// Distinct sieved candidates over the pool.
    pub distinct: usize,
    /// Reads whose search overflowed; they add nothing to the counts.
    pub undecodable: usize,
    /// Originals missing from the top list; needs ground truth.
    pub losses: Option<usize>,
    /// Lowest original count minus highest count of any other candidate.
    pub min_gap: Option<i64>,
    /// Highest count of a candidate that is not an original.
    pub tau_observed: Option<u64>,
    pub counters: RepairCounters,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Retrieved {
    pub payload: Seq,
    pub count: u64,
    /// `None` when the payload does not decode.
    pub message: Option<Message>,
}

#[derive(Clone, Debug)]
pub struct Retrieval {
    pub report: RetrievalReport,
    pub ranked: Vec<Retrieved>,
    pub table: FrequencyTable,
}

fn pool_start(codec: &Codec, records: &[ReadRecord]) -> Result<WalkState> {
    let first = records.first().ok_or_else(|| Error::invalid("empty read pool"))?.start;
    if records.iter().any(|r| r.start != first) {
        return Err(Error::invalid("reads of one pool must share a start"));
    }
    codec.start_state(first)
}

fn repair_record(codec: &Codec, start: WalkState, rec: &ReadRecord, limits: &RepairLimits) -> Result<Option<CandidateSet>> {
    match repair(codec, &rec.payload, start, &rec.check, rec.expected_len, limits) {
        Ok(c) => Ok(Some(c)),
        Err(Error::CandidateOverflow { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Default)]
struct Partial {
    table: FrequencyTable,
    counters: RepairCounters,
    undecodable: usize,
}

impl Partial {
    fn absorb(mut self, outcome: Option<CandidateSet>) -> Self {
        match outcome {
            Some(c) => {
                for y in &c.repaired {
                    self.table.add(y);
                }
                self.counters += c.counters;
            }
            None => self.undecodable += 1,
        }
        self
    }

    fn merge(mut self, other: Partial) -> Self {
        self.table.merge(other.table);
        self.counters += other.counters;
        self.undecodable += other.undecodable;
        self
    }
}

/// Repairs and counts every read of `pool`, then decodes the `n_expected`
/// most frequent candidates. With `truth`, also scores the outcome.
pub fn retrieve(pool: &ReadPool, codec: &Codec, n_expected: usize, truth: Option<&[Seq]>, limits: &RepairLimits) -> Result<Retrieval> {
    let start = pool_start(codec, &pool.records)?;
    let partial = pool
        .records
        .par_iter()
        .map(|rec| repair_record(codec, start, rec, limits))
        .try_fold(Partial::default, |acc, outcome| outcome.map(|o| acc.absorb(o)))
        .try_reduce(Partial::default, |a, b| Ok(a.merge(b)))?;

    let ranked: Vec<Retrieved> = partial
        .table
        .top(n_expected)
        .into_iter()
        .map(|(payload, count)| {
            let message = codec.decode_payload(&payload, start).ok();
            Retrieved { payload, count, message }
        })
        .collect();

    let mut report = RetrievalReport {
        diversity: n_expected,
        reads: pool.copies,
        records: pool.records.len(),
        retrieved: ranked.len(),
        distinct: partial.table.len(),
        undecodable: partial.undecodable,
        counters: partial.counters,
        ..Default::default()
    };
    if let Some(truth) = truth {
        score(&mut report, &partial.table, &ranked, truth);
    }
    Ok(Retrieval { report, ranked, table: partial.table })
}

/// Reports for several read depths of one pool, each read repaired once.
/// Depth `r` counts the first `r` copies of every original, which is the
/// pool [`crate::channel::make_pool`] builds with `r` copies.
pub fn retrieve_depths(
    pool: &ReadPool,
    codec: &Codec,
    n_expected: usize,
    truth: &[Seq],
    depths: &[usize],
    limits: &RepairLimits,
) -> Result<Vec<RetrievalReport>> {
    let start = pool_start(codec, &pool.records)?;
    let deepest = depths.iter().copied().max().unwrap_or(0);
    let mut rank: FxHashMap<usize, usize> = FxHashMap::default();
    let copy_index: Vec<usize> = pool
        .records
        .iter()
        .map(|r| {
            let c = rank.entry(r.origin).or_insert(0);
            *c += 1;
            *c - 1
        })
        .collect();
    let outcomes: Vec<Option<CandidateSet>> = pool
        .records
        .par_iter()
        .zip(copy_index.par_iter())
        .map(|(rec, &c)| if c < deepest { repair_record(codec, start, rec, limits) } else { Ok(None) })
        .collect::<Result<_>>()?;
    depths
        .iter()
        .map(|&depth| {
            let mut partial = Partial::default();
            let mut records = 0;
            for (outcome, &c) in outcomes.iter().zip(&copy_index) {
                if c < depth {
                    records += 1;
                    partial = partial.absorb(outcome.clone());
                }
            }
            let ranked: Vec<Retrieved> = partial
                .table
                .top(n_expected)
                .into_iter()
                .map(|(payload, count)| Retrieved { payload, count, message: None })
                .collect();
            let mut report = RetrievalReport {
                diversity: n_expected,
                reads: depth.min(pool.copies),
                records,
                retrieved: ranked.len(),
                distinct: partial.table.len(),
                undecodable: partial.undecodable,
                counters: partial.counters,
                ..Default::default()
            };
            score(&mut report, &partial.table, &ranked, truth);
            Ok(report)
        })
        .collect()
}

fn score(report: &mut RetrievalReport, table: &FrequencyTable, ranked: &[Retrieved], truth: &[Seq]) {
    let originals: rustc_hash::FxHashSet<&Seq> = truth.iter().collect();
    let kept: rustc_hash::FxHashSet<&Seq> = ranked.iter().map(|r| &r.payload).collect();
    report.losses = Some(originals.iter().filter(|s| !kept.contains(**s)).count());
    let lowest = originals.iter().map(|s| table.count(s)).min().unwrap_or(0);
    let highest_other = table.iter().filter(|(s, _)| !originals.contains(s)).map(|(_, c)| c).max().unwrap_or(0);
    report.min_gap = Some(lowest as i64 - highest_other as i64);
    report.tau_observed = Some(highest_other);
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Emission {
    pub payload: Seq,
    /// Position in the stream of the read that pushed the count past the
    /// threshold.
    pub record: usize,
    pub message: Option<Message>,
}

#[derive(Clone, Debug)]
pub struct Streamed {
    pub emissions: Vec<Emission>,
    pub table: FrequencyTable,
    pub counters: RepairCounters,
    pub undecodable: usize,
}

impl Streamed {
    /// Emitted payloads in lexicographic order.
    pub fn emitted(&self) -> Vec<Seq> {
        let mut out: Vec<Seq> = self.emissions.iter().map(|e| e.payload.clone()).collect();
        out.sort_unstable();
        out
    }
}

const STREAM_CHUNK: usize = 256;

/// Streaming retrieval: a candidate is decoded and emitted once, as soon as
/// its count first exceeds `tau`. Reads are repaired in parallel chunks but
/// counted strictly in stream order, so emissions are deterministic.
pub fn retrieve_nonblocking(records: &[ReadRecord], codec: &Codec, tau: u64, limits: &RepairLimits) -> Result<Streamed> {
    let start = pool_start(codec, records)?;
    let mut table = FrequencyTable::new();
    let mut counters = RepairCounters::default();
    let mut undecodable = 0;
    let mut emissions = Vec::new();
    for (chunk_index, chunk) in records.chunks(STREAM_CHUNK).enumerate() {
        let outcomes: Vec<Option<CandidateSet>> =
            chunk.par_iter().map(|rec| repair_record(codec, start, rec, limits)).collect::<Result<_>>()?;
        for (offset, outcome) in outcomes.into_iter().enumerate() {
            let Some(c) = outcome else {
                undecodable += 1;
                continue;
            };
            counters += c.counters;
            for y in c.repaired {
                if table.add(&y) == tau + 1 {
                    let message = codec.decode_payload(&y, start).ok();
                    emissions.push(Emission { payload: y, record: chunk_index * STREAM_CHUNK + offset, message });
                }
            }
        }
    }
    Ok(Streamed { emissions, table, counters, undecodable })
}

/// Random messages of `bits` bits encoded from the codec's start. Message
/// `i` draws from [`derived_rng`]`(seed, i)`.
pub fn random_library(codec: &Codec, count: usize, bits: usize, seed: u64) -> Result<(Vec<Message>, Vec<Codeword>)> {
    let messages: Vec<Message> = (0..count)
        .map(|i| {
            let mut rng = derived_rng(seed, i as u64);
            Message::from_bits((0..bits).map(|_| rng.gen::<bool>()).collect())
        })
        .collect();
    let codewords = messages.par_iter().map(|m| codec.encode(m)).collect::<Result<Vec<_>>>()?;
    Ok((messages, codewords))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinReads {
    /// Smallest read count at which the original was strictly the most
    /// frequent candidate in every trial.
    pub min_reads: Option<usize>,
    /// `failures[r - 1]`: trials where `r` reads were not enough.
    pub failures: Vec<usize>,
}

/// Single-sequence frequency experiment. Each trial corrupts a random
/// [`PROFILE_READ_LEN`]-nt walk into `max_reads` reads and checks, for every
/// prefix of that read stream, whether the original is the strict winner.
pub fn min_reads_single(codec: &Codec, spec: &ChannelSpec, trials: usize, max_reads: usize, limits: &RepairLimits) -> Result<MinReads> {
    if trials == 0 || max_reads == 0 {
        return Err(Error::invalid("min-reads needs at least one trial and one read"));
    }
    let wins: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<bool>> {
            let mut rng = derived_rng(spec.seed, t as u64);
            let start = WalkState::Vertex(codec.random_vertex(&mut rng));
            let truth = codec.random_walk(start, PROFILE_READ_LEN, &mut rng)?;
            let check = CheckValue::compute(&truth, codec.k());
            let stream_seed = rng.next_u64();
            let mut table = FrequencyTable::new();
            let mut wins = Vec::with_capacity(max_reads);
            for r in 0..max_reads {
                let (read, _) = corrupt_with(&truth, spec, &mut derived_rng(stream_seed, r as u64));
                match repair(codec, &read, start, &check, truth.len(), limits) {
                    Ok(c) => c.repaired.iter().for_each(|y| {
                        table.add(y);
                    }),
                    Err(Error::CandidateOverflow { .. }) => {}
                    Err(e) => return Err(e),
                }
                let own = table.count(&truth);
                wins.push(own > 0 && table.iter().all(|(s, c)| c < own || *s == truth));
            }
            Ok(wins)
        })
        .collect::<Result<_>>()?;
    let failures: Vec<usize> = (0..max_reads).map(|r| wins.iter().filter(|w| !w[r]).count()).collect();
    let min_reads = failures.iter().position(|&f| f == 0).map(|r| r + 1);
    Ok(MinReads { min_reads, failures })
}

/// Retrieval-rate targets of the fitted read-count formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RetrievalTarget {
    Lossless,
    /// 99.9% of sequences retrieved.
    Rate999,
    /// 99.0% of sequences retrieved.
    Rate990,
}

/// Fitted minimum reads per sequence for `n` sequences with `errors` edits
/// per read (1 or 8).
pub fn estimator_min_reads(n: f64, errors: u32, target: RetrievalTarget) -> Result<f64> {
    if !(n >= 10.0) {
        return Err(Error::invalid(format!("diversity {n} below 10")));
    }
    let (a, b) = match (errors, target) {
        (8, RetrievalTarget::Lossless) => (1.864, 7.100),
        (8, RetrievalTarget::Rate999) => (1.399, 5.684),
        (8, RetrievalTarget::Rate990) => (0.384, 8.572),
        (1, RetrievalTarget::Lossless) => (0.259, 2.147),
        (1, RetrievalTarget::Rate999) => (0.189, 1.181),
        (1, RetrievalTarget::Rate990) => (0.046, 2.627),
        _ => return Err(Error::invalid(format!("no fitted read count for {errors} errors"))),
    };
    let lg = n.log10();
    Ok(a * lg * lg + b)
}

/// Fitted highest frequency of an incorrect candidate with `reads` reads
/// per sequence among `n` sequences.
pub fn estimator_tau(reads: f64, n: f64, errors: u32) -> Result<f64> {
    if !(reads >= 1.0) || !(n >= 10.0) {
        return Err(Error::invalid(format!("threshold estimate needs reads >= 1 and diversity >= 10, got {reads}, {n}")));
    }
    let divisor = match errors {
        8 => 0.346,
        1 => 1.601,
        _ => return Err(Error::invalid(format!("no fitted threshold for {errors} errors"))),
    };
    Ok((reads + 1.0).log10() * n.log10() / divisor)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexityParams {
    pub diversity: f64,
    pub reads: f64,
    pub length: f64,
    /// Mean vertex accesses per read.
    pub accesses: f64,
    /// Mean candidates before the sieve.
    pub search: f64,
    /// Mean candidates after the sieve.
    pub sieved: f64,
    pub digits_to_integer: f64,
    pub integer_to_bits: f64,
}

impl ComplexityParams {
    /// Uses the default decode operation counts.
    pub fn new(diversity: f64, reads: f64, length: f64, accesses: f64, search: f64, sieved: f64) -> Self {
        ComplexityParams {
            diversity,
            reads,
            length,
            accesses,
            search,
            sieved,
            digits_to_integer: DIGITS_TO_INTEGER_OPS,
            integer_to_bits: INTEGER_TO_BITS_OPS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexityEstimate {
    pub ours: f64,
    pub conventional: f64,
    pub params: ComplexityParams,
}

/// Operation counts of repair, count and decode against cluster, align,
/// decode and correct.
pub fn complexity_model(p: &ComplexityParams) -> Result<ComplexityEstimate> {
    let values = [p.diversity, p.reads, p.length, p.accesses, p.search, p.sieved, p.digits_to_integer, p.integer_to_bits];
    if values.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::invalid("complexity parameters must be nonnegative"));
    }
    let (n, r, l) = (p.diversity, p.reads, p.length);
    let correct = n * r * (p.accesses + p.search * l);
    let sort = n * r * p.sieved * (l + 1.0) + (n + r);
    let decode = n * (p.digits_to_integer + p.integer_to_bits);
    let conventional = n * n * l + n * r * l.powi(3) + n * l + n * l.powi(3);
    Ok(ComplexityEstimate { ours: correct + sort + decode, conventional, params: *p })
}

/// Reference closed form of our operation count for 1 (0.5%) or 8 (4%)
/// edits per read.
pub fn closed_form_ours(n: f64, errors: u32) -> Result<f64> {
    let lg2 = n.log10().powi(2);
    match errors {
        1 => Ok(183.18 * n * lg2 + 50_508.16 * n + 0.26 * lg2 + 2.15),
        8 => Ok(7_275.66 * n * lg2 + 76_702.78 * n + 1.86 * lg2 + 7.10),
        _ => Err(Error::invalid(format!("no closed form for {errors} errors"))),
    }
}

/// Reference closed form of the conventional operation count.
pub fn closed_form_conventional(n: f64) -> f64 {
    200.0 * n * n + 48_000_200.0 * n
}

/// Nucleotides repaired per second over `trials` corrupted random walks.
pub fn measure_throughput(codec: &Codec, error_rate: f64, trials: usize, limits: &RepairLimits) -> Result<f64> {
    if trials < 1000 {
        return Err(Error::invalid(format!("throughput needs at least 1000 trials, got {trials}")));
    }
    let profile = repair_counters_profile(codec, &ChannelSpec::new(error_rate)?, trials, limits)?;
    Ok(profile.nucleotides_per_second())
}

/// Pool of `copies` reads per codeword, the same records [`crate::channel::make_pool`]
/// would produce, but only for the first `copies` of each stream.
pub fn pool_prefix(pool: &ReadPool, copies: usize) -> ReadPool {
    let mut seen: FxHashMap<usize, usize> = FxHashMap::default();
    let records = pool
        .records
        .iter()
        .filter(|r| {
            let c = seen.entry(r.origin).or_insert(0);
            *c += 1;
            *c <= copies
        })
        .cloned()
        .collect();
    ReadPool { records, diversity: pool.diversity, copies: copies.min(pool.copies) }
}

/// One corrupted copy, for callers building pools record by record.
pub fn corrupt_copy(cw: &Codeword, origin: usize, copy: usize, spec: &ChannelSpec) -> ReadRecord {
    let (payload, _) = corrupt_with(&cw.payload, spec, &mut copy_rng(spec.seed, origin, copy));
    ReadRecord { origin, start: cw.start, payload, check: cw.check, expected_len: cw.payload.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::make_pool;
    use crate::digraph::{Accessor, ArcBinding};
    use crate::nucleotide::parse_seq;

    fn codec() -> Codec {
        Codec::with_default_start(Accessor::complete(3).unwrap(), ArcBinding::Canonical).unwrap()
    }

    #[test]
    fn top_breaks_ties_lexicographically() {
        let mut t = FrequencyTable::new();
        for s in ["GG", "AC", "AC", "CT", "TT", "AA"] {
            t.add(&parse_seq(s).unwrap());
        }
        let top: Vec<(Seq, u64)> = t.top(3);
        assert_eq!(top, vec![(parse_seq("AC").unwrap(), 2), (parse_seq("AA").unwrap(), 1), (parse_seq("CT").unwrap(), 1)]);
        assert_eq!(t.top(10).len(), 5);
        assert_eq!(t.above(1), vec![parse_seq("AC").unwrap()]);
    }

    #[test]
    fn clean_single_sequence() {
        let c = codec();
        let (msgs, cws) = random_library(&c, 1, 40, 1).unwrap();
        let pool = make_pool(&cws, 3, &ChannelSpec::new(0.0).unwrap()).unwrap();
        let truth = vec![cws[0].payload.clone()];
        let r = retrieve(&pool, &c, 1, Some(&truth), &RepairLimits::default()).unwrap();
        assert_eq!(r.report.losses, Some(0));
        assert_eq!(r.ranked[0].count, 3);
        assert_eq!(r.ranked[0].message.as_ref(), Some(&msgs[0]));
        assert_eq!(r.report.tau_observed, Some(0));
        assert_eq!(r.report.min_gap, Some(3));
    }

    #[test]
    fn streaming_emits_on_first_sight_at_zero() {
        let c = codec();
        let (_, cws) = random_library(&c, 4, 30, 2).unwrap();
        let pool = make_pool(&cws, 1, &ChannelSpec::new(0.0).unwrap()).unwrap();
        let s = retrieve_nonblocking(&pool.records, &c, 0, &RepairLimits::default()).unwrap();
        assert_eq!(s.emissions.len(), 4);
        assert_eq!(s.emissions.iter().map(|e| e.record).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn estimator_spot_values() {
        assert!((estimator_min_reads(1e6, 8, RetrievalTarget::Lossless).unwrap() - 74.204).abs() < 1e-9);
        assert!((estimator_min_reads(10.0, 1, RetrievalTarget::Rate999).unwrap() - 1.370).abs() < 1e-9);
        assert!((estimator_tau(9.0, 10.0, 8).unwrap() - 1.0 / 0.346).abs() < 1e-12);
        assert!(estimator_min_reads(5.0, 8, RetrievalTarget::Lossless).is_err());
        assert!(estimator_tau(9.0, 10.0, 3).is_err());
    }

    #[test]
    fn conventional_closed_form_at_one() {
        assert_eq!(closed_form_conventional(1.0), 48_000_400.0);
        let est = complexity_model(&ComplexityParams::new(1.0, 5.0, 200.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(est.conventional, 48_000_400.0);
    }

    #[test]
    fn prefix_pool_matches_smaller_pool() {
        let c = codec();
        let (_, cws) = random_library(&c, 3, 40, 3).unwrap();
        let spec = ChannelSpec::new(0.02).unwrap();
        let big = make_pool(&cws, 6, &spec).unwrap();
        assert_eq!(pool_prefix(&big, 2), make_pool(&cws, 2, &spec).unwrap());
        assert_eq!(corrupt_copy(&cws[1], 1, 4, &spec), big.records[1 * 6 + 4]);
    }
}
