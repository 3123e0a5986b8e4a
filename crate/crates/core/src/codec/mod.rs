//! Transcoding between bit strings and walks on the coding digraph.
//!
//! A message becomes the integer `2^m + value`; at each step the working
//! vertex's out-degree `p` is the radix, `pi mod p` selects the arc whose
//! nucleotide is emitted, and `pi / p` carries on. Decoding reads the digit
//! and radix of every step back and evaluates them by Horner's rule.

mod check;
mod message;

pub use check::CheckValue;
pub use message::Message;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::digraph::{Accessor, ArcBinding, ArcList};
use crate::error::{Error, Result};
use crate::nucleotide::{kmer_from_index, kmer_index, parse_seq, seq_to_string, Nucleotide, Seq};
use message::{join_digits, split_digit};

/// Position of a walk: either a vertex of the digraph, or a node of the
/// prefix trie used before the first full k-mer has been emitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WalkState {
    Prefix { depth: u8, prefix: u32 },
    Vertex(u32),
}

/// Where encoding starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartPolicy {
    /// Walk from this vertex; its k-mer is stored in front of the payload.
    Fixed(u32),
    /// Walk from the root of a trie over the digraph's vertices, so the
    /// first `k` payload symbols spell the first vertex and no prefix is stored.
    Virtual,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    /// Start vertex under [`StartPolicy::Fixed`], `None` for a trie start.
    pub start: Option<u32>,
    pub payload: Seq,
    pub check: CheckValue,
}

#[derive(Clone, Debug)]
pub struct Codec {
    acc: Accessor,
    binding: ArcBinding,
    policy: StartPolicy,
    // trie[d][p]: some vertex starts with the d-symbol prefix p (0 < d < k)
    trie: Vec<Vec<bool>>,
}

/// Lowest-index vertex among those of maximal out-degree.
pub fn default_start(acc: &Accessor) -> Option<u32> {
    let mut best: Option<(usize, u32)> = None;
    for v in acc.vertices() {
        let d = acc.degree(v);
        if best.map_or(true, |(bd, _)| d > bd) {
            best = Some((d, v));
        }
    }
    best.map(|(_, v)| v)
}

impl Codec {
    pub fn new(acc: Accessor, binding: ArcBinding, policy: StartPolicy) -> Result<Codec> {
        if acc.is_empty() {
            return Err(Error::invalid("codec over an empty digraph"));
        }
        let trie = match policy {
            StartPolicy::Fixed(v) => {
                if !acc.contains(v) {
                    return Err(Error::invalid(format!("start vertex {v} has no outgoing arc")));
                }
                Vec::new()
            }
            StartPolicy::Virtual => build_trie(&acc),
        };
        Ok(Codec { acc, binding, policy, trie })
    }

    /// Fixed start at [`default_start`].
    pub fn with_default_start(acc: Accessor, binding: ArcBinding) -> Result<Codec> {
        let v = default_start(&acc).ok_or_else(|| Error::invalid("codec over an empty digraph"))?;
        Codec::new(acc, binding, StartPolicy::Fixed(v))
    }

    pub fn k(&self) -> usize {
        self.acc.k()
    }

    pub fn accessor(&self) -> &Accessor {
        &self.acc
    }

    pub fn binding(&self) -> ArcBinding {
        self.binding
    }

    pub fn policy(&self) -> StartPolicy {
        self.policy
    }

    pub fn initial_state(&self) -> WalkState {
        match self.policy {
            StartPolicy::Fixed(v) => WalkState::Vertex(v),
            StartPolicy::Virtual => WalkState::Prefix { depth: 0, prefix: 0 },
        }
    }

    /// State a codeword's walk begins in.
    pub fn start_state(&self, start: Option<u32>) -> Result<WalkState> {
        match start {
            Some(v) if self.acc.contains(v) => Ok(WalkState::Vertex(v)),
            Some(v) => Err(Error::invalid(format!("start vertex {v} is not in the digraph"))),
            None => Ok(WalkState::Prefix { depth: 0, prefix: 0 }),
        }
    }

    /// Outgoing arcs in digit order.
    #[inline]
    pub fn arcs(&self, state: WalkState) -> ArcList {
        match state {
            WalkState::Vertex(v) => self.binding.arcs(&self.acc, v),
            WalkState::Prefix { depth, prefix } => {
                let mut row = [crate::digraph::ABSENT; 4];
                for c in 0..4u32 {
                    if self.prefix_step(depth as usize, prefix, c).is_some() {
                        row[c as usize] = 0;
                    }
                }
                ArcList::from_row(&row)
            }
        }
    }

    #[inline]
    pub fn step(&self, state: WalkState, n: Nucleotide) -> Option<WalkState> {
        match state {
            WalkState::Vertex(v) => self.acc.successor(v, n).map(WalkState::Vertex),
            WalkState::Prefix { depth, prefix } => self.prefix_step(depth as usize, prefix, n.digit() as u32),
        }
    }

    fn prefix_step(&self, depth: usize, prefix: u32, c: u32) -> Option<WalkState> {
        let q = (prefix << 2) | c;
        if depth + 1 == self.k() {
            self.acc.contains(q).then_some(WalkState::Vertex(q))
        } else {
            self.trie[depth + 1][q as usize].then_some(WalkState::Prefix { depth: depth as u8 + 1, prefix: q })
        }
    }

    /// Walks `seq` from `state`; `Err(j)` names the first symbol without a
    /// matching arc.
    pub fn walk(&self, mut state: WalkState, seq: &[Nucleotide]) -> std::result::Result<WalkState, usize> {
        for (j, &n) in seq.iter().enumerate() {
            state = self.step(state, n).ok_or(j)?;
        }
        Ok(state)
    }

    /// Mixed-radix expansion of `pi >= 0` along the digraph from `state`.
    pub fn encode_integer(&self, pi: &BigUint, mut state: WalkState) -> Result<Seq> {
        let mut pi = pi.clone();
        let mut out = Vec::new();
        // out-degree-1 steps do not shrink pi; a cycle of them would never end
        let mut idle = 0usize;
        let idle_limit = self.acc.vertex_count() + self.k() + 1;
        while !pi.is_zero() {
            let arcs = self.arcs(state);
            if arcs.is_empty() || idle > idle_limit {
                return Err(Error::EncodingStuck { position: out.len() });
            }
            let p = arcs.len() as u32;
            idle = if p == 1 { idle + 1 } else { 0 };
            let r = split_digit(&mut pi, p);
            let n = arcs.get(r as usize).expect("digit below out-degree");
            out.push(n);
            state = self.step(state, n).expect("arc from the arc list");
        }
        Ok(out)
    }

    /// Inverse of [`Codec::encode_integer`].
    pub fn decode_integer(&self, payload: &[Nucleotide], mut state: WalkState) -> Result<BigUint> {
        let mut digits = Vec::with_capacity(payload.len());
        for (j, &n) in payload.iter().enumerate() {
            let arcs = self.arcs(state);
            let r = arcs.digit_of(n).ok_or(Error::Path { position: j })?;
            digits.push((r as u32, arcs.len() as u32));
            state = self.step(state, n).expect("arc from the arc list");
        }
        Ok(join_digits(&digits))
    }

    pub fn encode(&self, msg: &Message) -> Result<Codeword> {
        self.encode_from(msg, self.initial_state())
    }

    pub fn encode_from(&self, msg: &Message, state: WalkState) -> Result<Codeword> {
        let payload = self.encode_integer(&msg.to_integer(), state)?;
        let check = CheckValue::compute(&payload, self.k());
        let start = match state {
            WalkState::Vertex(v) => Some(v),
            WalkState::Prefix { depth: 0, .. } => None,
            WalkState::Prefix { .. } => return Err(Error::invalid("encoding must start at a vertex or the trie root")),
        };
        Ok(Codeword { start, payload, check })
    }

    /// Decodes after verifying the check value.
    pub fn decode(&self, cw: &Codeword) -> Result<Message> {
        if CheckValue::compute(&cw.payload, self.k()) != cw.check {
            return Err(Error::Integrity);
        }
        self.decode_payload(&cw.payload, self.start_state(cw.start)?)
    }

    pub fn decode_payload(&self, payload: &[Nucleotide], state: WalkState) -> Result<Message> {
        let pi = self.decode_integer(payload, state)?;
        Message::from_integer(&pi)
    }

    /// `<start k-mer><payload><check suffix>`, the start k-mer omitted under
    /// a trie start.
    pub fn format_record(&self, cw: &Codeword) -> String {
        let mut s = String::with_capacity(cw.payload.len() + 2 * self.k() + 1);
        if let Some(v) = cw.start {
            s.push_str(&seq_to_string(&kmer_from_index(v, self.k())));
        }
        s.push_str(&seq_to_string(&cw.payload));
        s.push_str(&seq_to_string(&cw.check.to_symbols()));
        s
    }

    pub fn parse_record(&self, line: &str) -> Result<Codeword> {
        let seq = parse_seq(line.trim())?;
        let k = self.k();
        let prefix = match self.policy {
            StartPolicy::Fixed(_) => k,
            StartPolicy::Virtual => 0,
        };
        if seq.len() < prefix + k + 1 {
            return Err(Error::invalid(format!("record of {} symbols is shorter than its frame", seq.len())));
        }
        let start = (prefix > 0).then(|| kmer_index(&seq[..k]));
        let split = seq.len() - (k + 1);
        let check = CheckValue::from_symbols(&seq[split..], k)?;
        Ok(Codeword { start, payload: seq[prefix..split].to_vec(), check })
    }

    /// Uniformly random walk of `len` steps from `state`.
    pub fn random_walk<R: Rng>(&self, mut state: WalkState, len: usize, rng: &mut R) -> Result<Seq> {
        let mut out = Vec::with_capacity(len);
        for position in 0..len {
            let arcs = self.arcs(state);
            if arcs.is_empty() {
                return Err(Error::EncodingStuck { position });
            }
            let n = arcs.get(rng.gen_range(0..arcs.len())).expect("in range");
            out.push(n);
            state = self.step(state, n).expect("arc from the arc list");
        }
        Ok(out)
    }

    /// A vertex drawn uniformly from the digraph.
    pub fn random_vertex<R: Rng>(&self, rng: &mut R) -> u32 {
        let n = self.acc.vertex_count() as u32;
        loop {
            let v = rng.gen_range(0..n);
            if self.acc.contains(v) {
                return v;
            }
        }
    }
}

fn build_trie(acc: &Accessor) -> Vec<Vec<bool>> {
    let k = acc.k();
    let mut trie: Vec<Vec<bool>> = (0..k).map(|d| vec![false; 1 << (2 * d)]).collect();
    for v in acc.vertices() {
        for (d, level) in trie.iter_mut().enumerate().skip(1) {
            level[(v >> (2 * (k - d))) as usize] = true;
        }
    }
    trie
}

/// Information density `m / mean payload length` over `trials` uniformly
/// random `m`-bit messages.
pub fn measure_density(codec: &Codec, m: usize, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::invalid("density needs at least one trial"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0usize;
    for _ in 0..trials {
        let bits = (0..m).map(|_| rng.gen::<bool>()).collect();
        total += codec.encode(&Message::from_bits(bits))?.payload.len();
    }
    Ok(m as f64 * trials as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nucleotide::parse_seq;

    fn graph(k: usize, kmers: &[&str]) -> Accessor {
        let vs: Vec<u32> = kmers.iter().map(|s| kmer_index(&parse_seq(s).unwrap())).collect();
        Accessor::from_vertices(k, &vs).unwrap()
    }

    fn dna(s: &str) -> Seq {
        parse_seq(s).unwrap()
    }

    #[test]
    fn worked_example_through_trie() {
        let acc = graph(2, &["AA", "AC", "CA", "CG", "CT", "GA", "GT", "TA"]);
        let codec = Codec::new(acc, ArcBinding::Canonical, StartPolicy::Virtual).unwrap();
        let y = codec.encode_integer(&BigUint::from(42u32), codec.initial_state()).unwrap();
        assert_eq!(seq_to_string(&y), "GACT");
        assert_eq!(codec.decode_integer(&y, codec.initial_state()).unwrap(), BigUint::from(42u32));
    }

    #[test]
    fn balanced_pairs_from_ac() {
        let acc = graph(2, &["AC", "AG", "CA", "CT", "GA", "GT", "TC", "TG"]);
        let codec = Codec::new(acc, ArcBinding::Canonical, StartPolicy::Fixed(1)).unwrap();
        let y = codec.encode_integer(&BigUint::from(5u32), WalkState::Vertex(1)).unwrap();
        assert_eq!(seq_to_string(&y), "TCT");
        assert_eq!(codec.decode_integer(&y, WalkState::Vertex(1)).unwrap(), BigUint::from(5u32));
        assert!(codec.encode_integer(&BigUint::zero(), WalkState::Vertex(1)).unwrap().is_empty());
    }

    #[test]
    fn round_trip_with_leading_zeros() {
        let codec = Codec::with_default_start(Accessor::complete(3).unwrap(), ArcBinding::Keyed(9)).unwrap();
        for s in ["", "0", "1", "0000", "00010110", "1111111111111111111"] {
            let msg = Message::parse(s).unwrap();
            let cw = codec.encode(&msg).unwrap();
            assert_eq!(codec.decode(&cw).unwrap(), msg);
        }
    }

    #[test]
    fn off_path_and_tampered_payloads_rejected() {
        let acc = graph(2, &["AC", "AG", "CA", "CT", "GA", "GT", "TC", "TG"]);
        let codec = Codec::new(acc, ArcBinding::Canonical, StartPolicy::Fixed(1)).unwrap();
        assert!(matches!(codec.decode_integer(&dna("TCC"), WalkState::Vertex(1)), Err(Error::Path { position: 2 })));
        let mut cw = codec.encode(&Message::parse("1011").unwrap()).unwrap();
        cw.check.sum_residue = (cw.check.sum_residue + 1) % 4;
        assert!(matches!(codec.decode(&cw), Err(Error::Integrity)));
    }

    #[test]
    fn record_round_trip() {
        let codec = Codec::with_default_start(Accessor::complete(4).unwrap(), ArcBinding::Canonical).unwrap();
        let cw = codec.encode(&Message::from_bytes(b"hi")).unwrap();
        let line = codec.format_record(&cw);
        assert_eq!(line.len(), 4 + cw.payload.len() + 5);
        assert_eq!(codec.parse_record(&line).unwrap(), cw);
        assert!(codec.parse_record("ACG").is_err());
    }

    #[test]
    fn complete_graph_density_is_two() {
        let codec = Codec::with_default_start(Accessor::complete(2).unwrap(), ArcBinding::Canonical).unwrap();
        let d = measure_density(&codec, 2000, 20, 1).unwrap();
        assert!((d - 2.0).abs() < 0.01, "{d}");
    }

    #[test]
    fn degree_one_cycle_is_stuck() {
        let acc = graph(2, &["AC", "CA"]);
        let codec = Codec::new(acc, ArcBinding::Canonical, StartPolicy::Fixed(1)).unwrap();
        assert!(matches!(codec.encode(&Message::parse("1").unwrap()), Err(Error::EncodingStuck { .. })));
    }

    #[test]
    fn default_start_prefers_high_degree() {
        let acc = graph(2, &["AA", "AC", "CA", "CG", "CT", "GA", "GT", "TA"]);
        // AC has arcs to CA, CG, CT
        assert_eq!(default_start(&acc), Some(1));
    }
}
