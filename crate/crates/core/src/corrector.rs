//! Path-based detection and repair of edit errors.
//!
//! A read that is not a walk on the digraph fails at some first position
//! `j`. The repair step revisits positions `j, j-1, .., j-k` and at each one
//! tries every substitution and insertion offered by the working vertex's
//! arcs plus the deletion of that symbol. A variant is kept when its walk
//! clears the failing symbol by a short lookahead. If no variant does, the
//! ones that at least get past the failure are kept for one more round, so
//! two close errors can be fixed as a pair. Kept variants re-enter a
//! first-in first-out worklist until they are complete walks; those are
//! then sieved by the protected check value and the expected length.

use std::collections::VecDeque;
use std::ops::AddAssign;
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::channel::{corrupt_with, derived_rng, ChannelSpec};
use crate::codec::{CheckValue, Codec, WalkState};
use crate::error::{Error, Result};
use crate::nucleotide::{Nucleotide, Seq};

pub const DEFAULT_MAX_CANDIDATES: usize = 1000;
pub const DEFAULT_MAX_EXPANSIONS: usize = 100_000;
pub const DEFAULT_LOOKAHEAD: usize = 3;
pub const DEFAULT_RELAXED_DEPTH: u8 = 1;
pub const PROFILE_READ_LEN: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DetectionResult {
    pub valid: bool,
    pub first_error_position: Option<usize>,
}

/// First position of `seq` that has no matching arc from `start`.
pub fn detect(codec: &Codec, seq: &[Nucleotide], start: WalkState) -> DetectionResult {
    match codec.walk(start, seq) {
        Ok(_) => DetectionResult { valid: true, first_error_position: None },
        Err(j) => DetectionResult { valid: false, first_error_position: Some(j) },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RepairLimits {
    /// Largest tolerated number of complete walks found by the search.
    pub max_candidates: usize,
    /// Largest number of worklist entries expanded.
    pub max_expansions: usize,
    /// Symbols past the failing one that an edited variant must also walk
    /// before it is kept.
    pub lookahead: usize,
    /// Consecutive edits allowed to merely move the failure forward
    /// without clearing the lookahead.
    pub relaxed_depth: u8,
}

impl Default for RepairLimits {
    fn default() -> Self {
        RepairLimits { max_candidates: DEFAULT_MAX_CANDIDATES, max_expansions: DEFAULT_MAX_EXPANSIONS, lookahead: DEFAULT_LOOKAHEAD, relaxed_depth: DEFAULT_RELAXED_DEPTH }
    }
}

/// Work done by one or more repairs. Counters add, so per-read tallies can
/// be merged in any order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RepairCounters {
    /// Distinct `(position, vertex)` nodes entered while walking the read
    /// and its variants. A node reached again along another candidate is
    /// counted once.
    pub vertex_accesses: u64,
    /// Distinct complete walks found by the search.
    pub search_candidates: u64,
    /// Of those, the ones passing the check value and length sieve.
    pub sieved_candidates: u64,
    pub reads: u64,
    /// Every successful step of every walk, revisits included.
    pub walk_steps: u64,
}

impl AddAssign for RepairCounters {
    fn add_assign(&mut self, o: RepairCounters) {
        self.vertex_accesses += o.vertex_accesses;
        self.search_candidates += o.search_candidates;
        self.sieved_candidates += o.sieved_candidates;
        self.reads += o.reads;
        self.walk_steps += o.walk_steps;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateSet {
    /// Complete walks in discovery order.
    pub search: Vec<Seq>,
    /// Members of `search` matching the check value and expected length.
    pub repaired: Vec<Seq>,
    pub counters: RepairCounters,
}

impl CandidateSet {
    pub fn unique(&self) -> Option<&Seq> {
        (self.repaired.len() == 1).then(|| &self.repaired[0])
    }
}

#[derive(Clone, Copy, Debug)]
enum Edit {
    Sub(usize, Nucleotide),
    Ins(usize, Nucleotide),
    Del(usize),
}

impl Edit {
    fn len_after(self, len: usize) -> usize {
        match self {
            Edit::Sub(..) => len,
            Edit::Ins(..) => len + 1,
            Edit::Del(_) => len - 1,
        }
    }

    #[inline]
    fn symbol(self, seq: &[Nucleotide], idx: usize) -> Nucleotide {
        match self {
            Edit::Sub(i, n) => {
                if idx == i {
                    n
                } else {
                    seq[idx]
                }
            }
            Edit::Ins(i, n) => match idx.cmp(&i) {
                std::cmp::Ordering::Less => seq[idx],
                std::cmp::Ordering::Equal => n,
                std::cmp::Ordering::Greater => seq[idx - 1],
            },
            Edit::Del(i) => {
                if idx < i {
                    seq[idx]
                } else {
                    seq[idx + 1]
                }
            }
        }
    }

    fn apply(self, seq: &[Nucleotide]) -> Seq {
        (0..self.len_after(seq.len())).map(|idx| self.symbol(seq, idx)).collect()
    }
}

struct Item {
    seq: Seq,
    // states[i] is the state before consuming seq[i]; one entry past the
    // last valid symbol
    states: Vec<WalkState>,
    relaxed: u8,
}

impl Item {
    fn valid_prefix(&self) -> usize {
        self.states.len() - 1
    }
}

/// Local exhaustive reverse search followed by the check-value sieve.
///
/// `check` and `expected_len` come from the protected suffix. An error-free
/// read yields itself as the only candidate.
pub fn repair(
    codec: &Codec,
    read: &[Nucleotide],
    start: WalkState,
    check: &CheckValue,
    expected_len: usize,
    limits: &RepairLimits,
) -> Result<CandidateSet> {
    let k = codec.k();
    let mut tally = Tally::default();
    let mut seen: FxHashSet<Seq> = FxHashSet::default();
    let mut found: FxHashSet<Seq> = FxHashSet::default();
    let mut search = Vec::new();
    let mut queue = VecDeque::new();

    let mut states = Vec::with_capacity(read.len() + 1);
    states.push(start);
    extend_walk(codec, &mut states, read.len(), |idx| read[idx], &mut tally);

    seen.insert(read.to_vec());
    queue.push_back(Item { seq: read.to_vec(), states, relaxed: 0 });

    let mut expansions = 0usize;
    while let Some(item) = queue.pop_front() {
        expansions += 1;
        if expansions > limits.max_expansions {
            return Err(Error::CandidateOverflow { limit: limits.max_candidates });
        }
        let j = item.valid_prefix();
        if j == item.seq.len() {
            if found.insert(item.seq.clone()) {
                search.push(item.seq);
                if search.len() > limits.max_candidates {
                    return Err(Error::CandidateOverflow { limit: limits.max_candidates });
                }
            }
            continue;
        }
        let mut strong = Vec::new();
        let mut weak = Vec::new();
        for i in (j.saturating_sub(k)..=j).rev() {
            let s = item.states[i];
            let arcs = codec.arcs(s);
            let current = item.seq[i];
            let mut edits: Vec<Edit> = arcs.as_slice().iter().filter(|&&n| n != current).map(|&n| Edit::Sub(i, n)).collect();
            edits.extend(arcs.as_slice().iter().map(|&n| Edit::Ins(i, n)));
            edits.push(Edit::Del(i));
            for edit in edits {
                let fail = if matches!(edit, Edit::Ins(..)) { j + 1 } else { j };
                try_edit(codec, &item, edit, fail, limits, &mut strong, &mut weak, &mut tally);
            }
        }
        let next = if strong.is_empty() { weak } else { strong };
        for child in next {
            if seen.insert(child.seq.clone()) {
                queue.push_back(child);
            }
        }
    }

    let repaired: Vec<Seq> = search
        .iter()
        .filter(|y| y.len() == expected_len && CheckValue::compute(y, k) == *check)
        .cloned()
        .collect();
    let counters = RepairCounters {
        vertex_accesses: tally.nodes.len() as u64,
        search_candidates: search.len() as u64,
        sieved_candidates: repaired.len() as u64,
        reads: 1,
        walk_steps: tally.steps,
    };
    Ok(CandidateSet { search, repaired, counters })
}

/// Walks the edited sequence from position `i`. It is strong when valid
/// through `fail + lookahead` (or to its end) and weak, within the relaxed
/// depth, when it only gets past `fail`.
#[allow(clippy::too_many_arguments)]
fn try_edit(
    codec: &Codec,
    item: &Item,
    edit: Edit,
    fail: usize,
    limits: &RepairLimits,
    strong: &mut Vec<Item>,
    weak: &mut Vec<Item>,
    tally: &mut Tally,
) {
    let i = match edit {
        Edit::Sub(i, _) | Edit::Ins(i, _) | Edit::Del(i) => i,
    };
    let len = edit.len_after(item.seq.len());
    let mut s = item.states[i];
    let mut valid = i;
    while valid < len {
        match codec.step(s, edit.symbol(&item.seq, valid)) {
            Some(next) => {
                tally.steps += 1;
                tally.nodes.insert((valid, next));
                s = next;
                valid += 1;
            }
            None => break,
        }
    }
    let relaxed = if valid == len || valid > fail + limits.lookahead {
        0
    } else if valid > fail && item.relaxed < limits.relaxed_depth {
        item.relaxed + 1
    } else {
        return;
    };
    let seq = edit.apply(&item.seq);
    let mut states = Vec::with_capacity(len + 1);
    states.extend_from_slice(&item.states[..=i]);
    for idx in i..valid {
        let next = codec.step(states[idx], seq[idx]).expect("replays a checked walk");
        states.push(next);
    }
    let child = Item { seq, states, relaxed };
    if relaxed == 0 {
        strong.push(child);
    } else {
        weak.push(child);
    }
}

#[derive(Default)]
struct Tally {
    nodes: FxHashSet<(usize, WalkState)>,
    steps: u64,
}

fn extend_walk(
    codec: &Codec,
    states: &mut Vec<WalkState>,
    len: usize,
    symbol: impl Fn(usize) -> Nucleotide,
    tally: &mut Tally,
) {
    let mut s = *states.last().expect("walk has a start");
    for idx in states.len() - 1..len {
        match codec.step(s, symbol(idx)) {
            Some(next) => {
                tally.steps += 1;
                tally.nodes.insert((idx, next));
                states.push(next);
                s = next;
            }
            None => break,
        }
    }
}

/// Outcome of repairing many corrupted random walks.
#[derive(Clone, Debug, PartialEq)]
pub struct RepairProfile {
    pub error_rate: f64,
    pub trials: usize,
    /// Reads whose sieve kept exactly the original.
    pub unique_correct: usize,
    /// Reads whose sieve kept the original among others.
    pub ambiguous: usize,
    /// Corrupted reads that are not walks.
    pub detected: usize,
    /// Corrupted reads differing from the original.
    pub corrupted: usize,
    pub overflowed: usize,
    /// Reads for which the sieve kept at least one candidate.
    pub resolved: usize,
    /// Mean search candidates over resolved reads.
    pub mean_search: f64,
    /// Mean sieved candidates over resolved reads.
    pub mean_sieved: f64,
    pub mean_accesses: f64,
    pub median_accesses: f64,
    pub totals: RepairCounters,
    pub seconds: f64,
}

impl RepairProfile {
    pub fn correction_rate(&self) -> f64 {
        self.unique_correct as f64 / self.trials as f64
    }

    /// Share of corrupted reads flagged as invalid walks.
    pub fn detection_rate(&self) -> f64 {
        if self.corrupted == 0 {
            return 1.0;
        }
        self.detected as f64 / self.corrupted as f64
    }

    pub fn nucleotides_per_second(&self) -> f64 {
        (self.trials * PROFILE_READ_LEN) as f64 / self.seconds.max(1e-9)
    }
}

struct Trial {
    outcome: Option<(bool, bool, RepairCounters)>,
    detected: bool,
    corrupted: bool,
}

/// Repairs `trials` random walks of [`PROFILE_READ_LEN`] nucleotides, each
/// from a uniformly drawn vertex and corrupted through `spec`. Trial `t`
/// draws everything from [`derived_rng`]`(spec.seed, t)`.
pub fn repair_counters_profile(codec: &Codec, spec: &ChannelSpec, trials: usize, limits: &RepairLimits) -> Result<RepairProfile> {
    if trials == 0 {
        return Err(Error::invalid("profile needs at least one trial"));
    }
    let clock = Instant::now();
    let runs: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Trial> {
            let mut rng = derived_rng(spec.seed, t as u64);
            let start = WalkState::Vertex(codec.random_vertex(&mut rng));
            let truth = codec.random_walk(start, PROFILE_READ_LEN, &mut rng)?;
            let check = CheckValue::compute(&truth, codec.k());
            let (read, _) = corrupt_with(&truth, spec, &mut rng);
            let corrupted = read != truth;
            let detected = corrupted && !detect(codec, &read, start).valid;
            let outcome = match repair(codec, &read, start, &check, truth.len(), limits) {
                Ok(c) => Some((c.unique() == Some(&truth), c.repaired.len() > 1 && c.repaired.contains(&truth), c.counters)),
                Err(Error::CandidateOverflow { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(Trial { outcome, detected, corrupted })
        })
        .collect::<Result<_>>()?;
    let seconds = clock.elapsed().as_secs_f64();

    let mut totals = RepairCounters::default();
    let mut accesses = Vec::with_capacity(trials);
    let (mut unique_correct, mut ambiguous, mut overflowed, mut resolved) = (0, 0, 0, 0);
    let (mut search, mut sieved) = (0u64, 0u64);
    for run in &runs {
        match run.outcome {
            Some((unique, amb, c)) => {
                unique_correct += unique as usize;
                ambiguous += amb as usize;
                totals += c;
                accesses.push(c.vertex_accesses as f64);
                if c.sieved_candidates > 0 {
                    resolved += 1;
                    search += c.search_candidates;
                    sieved += c.sieved_candidates;
                }
            }
            None => overflowed += 1,
        }
    }
    accesses.sort_by(f64::total_cmp);
    let mean_of = |total: u64, n: usize| if n == 0 { 0.0 } else { total as f64 / n as f64 };
    Ok(RepairProfile {
        error_rate: spec.error_rate,
        trials,
        unique_correct,
        ambiguous,
        detected: runs.iter().filter(|r| r.detected).count(),
        corrupted: runs.iter().filter(|r| r.corrupted).count(),
        overflowed,
        resolved,
        mean_search: mean_of(search, resolved),
        mean_sieved: mean_of(sieved, resolved),
        mean_accesses: accesses.iter().sum::<f64>() / accesses.len().max(1) as f64,
        median_accesses: median(&accesses),
        totals,
        seconds,
    })
}

fn median(sorted: &[f64]) -> f64 {
    match sorted.len() {
        0 => 0.0,
        n if n % 2 == 1 => sorted[n / 2],
        n => (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0,
    }
}
