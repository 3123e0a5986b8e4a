//! Regional biochemical constraint sets over quaternary strings.
//!
//! A [`ConstraintSet`] bundles a homopolymer run-length limit, a windowed GC
//! content interval and a set of forbidden motifs, all evaluated on windows of
//! the observed length `k`. Screening works on packed k-mer indices so that
//! the full `4^k` vertex set can be scanned quickly.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::nucleotide::{kmer_index, parse_seq, reverse_complement, seq_to_string, Nucleotide, Seq};

pub const MAX_OBSERVED_LENGTH: usize = 12;

/// Motifs that raise error rates on nanopore sequencers.
pub const ONT_MOTIFS: [&str; 4] = ["AGA", "GAG", "CTC", "TCT"];

/// Motif raising error rates on Illumina sequencers.
pub const ILLUMINA_MOTIFS: [&str; 1] = ["GGC"];

/// Start and stop codons.
pub const CODON_MOTIFS: [&str; 6] = ["ATG", "GTG", "TTG", "TAG", "TAA", "TGA"];

/// Restriction enzyme recognition sites.
pub const RESTRICTION_SITES: [&str; 13] = [
    "AGCT", "GACGC", "CAGCAG", "GATATC", "GGTACC", "CTGCAG", "GAGCTC", "GTCGAC", "AGTACT", "ACTAGT",
    "GCATGC", "AGGCCT", "TCTAGA",
];

#[derive(Clone, Debug)]
pub struct ConstraintSet {
    k: usize,
    max_homopolymer: Option<usize>,
    gc_range: Option<(f64, f64)>,
    motifs: Vec<Seq>,
    reverse_complements: bool,
    gc_bounds: Option<(u32, u32)>,
    motif_filters: Vec<MotifFilter>,
}

/// All forbidden motifs of one length, as a bitset over their packed indices.
#[derive(Clone, Debug)]
struct MotifFilter {
    len: usize,
    bits: Vec<u64>,
}

impl MotifFilter {
    #[inline]
    fn contains(&self, index: u32) -> bool {
        (self.bits[(index >> 6) as usize] >> (index & 63)) & 1 == 1
    }
}

impl ConstraintSet {
    /// An unconstrained set with observed length `k`.
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_OBSERVED_LENGTH {
            return Err(Error::invalid(format!("observed length must be in 1..={MAX_OBSERVED_LENGTH}, got {k}")));
        }
        Ok(ConstraintSet {
            k,
            max_homopolymer: None,
            gc_range: None,
            motifs: Vec::new(),
            reverse_complements: true,
            gc_bounds: None,
            motif_filters: Vec::new(),
        })
    }

    pub fn with_max_homopolymer(mut self, h: usize) -> Result<Self> {
        if h == 0 || h > self.k {
            return Err(Error::invalid(format!("homopolymer limit must be in 1..={}, got {h}", self.k)));
        }
        self.max_homopolymer = Some(h);
        Ok(self)
    }

    /// GC fraction bounds, applied as the integer interval
    /// `[ceil(min*k), floor(max*k)]` on G+C counts per window.
    pub fn with_gc_range(mut self, min: f64, max: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&min) || !(0.0..=1.0).contains(&max) || min > max {
            return Err(Error::invalid(format!("GC bounds must satisfy 0 <= min <= max <= 1, got [{min}, {max}]")));
        }
        let k = self.k as f64;
        // tolerate representation error such as 0.3 * 10 = 3.0000000000000004
        let lo = (min * k - 1e-9).ceil().max(0.0) as u32;
        let hi = (max * k + 1e-9).floor() as u32;
        if lo > hi {
            return Err(Error::invalid(format!(
                "GC range [{min}, {max}] admits no integer G+C count for k = {}",
                self.k
            )));
        }
        self.gc_range = Some((min, max));
        self.gc_bounds = Some((lo, hi));
        Ok(self)
    }

    pub fn with_motifs<I, S>(mut self, motifs: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for m in motifs {
            let seq = parse_seq(m.as_ref())?;
            if seq.is_empty() {
                return Err(Error::invalid("empty motif"));
            }
            if seq.len() > self.k {
                return Err(Error::invalid(format!(
                    "motif {} is longer than the observed length {}",
                    m.as_ref(),
                    self.k
                )));
            }
            if !self.motifs.contains(&seq) {
                self.motifs.push(seq);
            }
        }
        self.rebuild_filters();
        Ok(self)
    }

    /// Whether motifs are also forbidden on the reverse-complement strand
    /// (default: yes).
    pub fn with_reverse_complements(mut self, on: bool) -> Self {
        self.reverse_complements = on;
        self.rebuild_filters();
        self
    }

    fn rebuild_filters(&mut self) {
        let mut filters: Vec<MotifFilter> = Vec::new();
        for m in self.effective_motifs() {
            let len = m.len();
            let idx = kmer_index(&m);
            let filter = match filters.iter_mut().find(|f| f.len == len) {
                Some(f) => f,
                None => {
                    let words = ((1usize << (2 * len)) + 63) / 64;
                    filters.push(MotifFilter { len, bits: vec![0; words] });
                    filters.last_mut().unwrap()
                }
            };
            filter.bits[(idx >> 6) as usize] |= 1 << (idx & 63);
        }
        filters.sort_by_key(|f| f.len);
        self.motif_filters = filters;
    }

    /// Motifs as configured plus, when enabled, their reverse complements.
    pub fn effective_motifs(&self) -> Vec<Seq> {
        let mut out = self.motifs.clone();
        if self.reverse_complements {
            for m in &self.motifs {
                let rc = reverse_complement(m);
                if !out.contains(&rc) {
                    out.push(rc);
                }
            }
        }
        out
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_homopolymer(&self) -> Option<usize> {
        self.max_homopolymer
    }

    pub fn gc_range(&self) -> Option<(f64, f64)> {
        self.gc_range
    }

    pub fn gc_count_bounds(&self) -> Option<(u32, u32)> {
        self.gc_bounds
    }

    pub fn motifs(&self) -> &[Seq] {
        &self.motifs
    }

    pub fn reverse_complements(&self) -> bool {
        self.reverse_complements
    }

    pub fn is_unconstrained(&self) -> bool {
        self.max_homopolymer.is_none() && self.gc_bounds.is_none() && self.motif_filters.is_empty()
    }

    /// Validity of a packed k-mer index (`index < 4^k`).
    pub fn kmer_index_is_valid(&self, index: u32) -> bool {
        let k = self.k;
        if let Some(h) = self.max_homopolymer {
            if h < k && longest_run(index, k) > h {
                return false;
            }
        }
        if let Some((lo, hi)) = self.gc_bounds {
            let gc = ((index ^ (index >> 1)) & LOW_BITS & digit_mask(k)).count_ones();
            if gc < lo || gc > hi {
                return false;
            }
        }
        for f in &self.motif_filters {
            let mask = (1u32 << (2 * f.len)) - 1;
            for shift in 0..=(k - f.len) {
                if f.contains((index >> (2 * shift)) & mask) {
                    return false;
                }
            }
        }
        true
    }

    pub fn kmer_is_valid(&self, kmer: &[Nucleotide]) -> Result<bool> {
        if kmer.len() != self.k {
            return Err(Error::invalid(format!("k-mer has length {}, expected {}", kmer.len(), self.k)));
        }
        Ok(self.kmer_index_is_valid(kmer_index(kmer)))
    }

    /// Every length-k window of `seq` passes [`Self::kmer_is_valid`].
    pub fn sequence_is_valid(&self, seq: &[Nucleotide]) -> Result<bool> {
        let k = self.k;
        if seq.len() < k {
            return Err(Error::invalid(format!("sequence of length {} is shorter than k = {k}", seq.len())));
        }
        let mask = digit_mask(k);
        let mut index = kmer_index(&seq[..k]);
        if !self.kmer_index_is_valid(index) {
            return Ok(false);
        }
        for n in &seq[k..] {
            index = ((index << 2) | n.digit() as u32) & mask;
            if !self.kmer_index_is_valid(index) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn from_config_str(text: &str) -> Result<Self> {
        let cfg: ConstraintConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.build()
    }

    pub fn from_config_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_str(&text)
    }

    /// Resolves `set01`..`set12`, `high-compatibility`, or a config file path.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match builtin_by_name(name_or_path) {
            Some(cs) => Ok(cs),
            None => Self::from_config_file(name_or_path),
        }
    }

    /// Renders the set as a config document accepted by [`Self::from_config_str`].
    pub fn to_config_string(&self) -> String {
        let mut out = format!("observed_length = {}\n", self.k);
        if let Some(h) = self.max_homopolymer {
            out += &format!("max_homopolymer = {h}\n");
        }
        if let Some((lo, hi)) = self.gc_range {
            out += &format!("gc_min = {lo}\ngc_max = {hi}\n");
        }
        if !self.motifs.is_empty() {
            let list: Vec<String> = self.motifs.iter().map(|m| format!("\"{}\"", seq_to_string(m))).collect();
            out += &format!("motifs = [{}]\n", list.join(", "));
        }
        out += &format!("reverse_complement_motifs = {}\n", self.reverse_complements);
        out
    }
}

const LOW_BITS: u32 = 0x5555_5555;

#[inline]
fn digit_mask(k: usize) -> u32 {
    if k >= 16 {
        u32::MAX
    } else {
        (1u32 << (2 * k)) - 1
    }
}

fn longest_run(index: u32, k: usize) -> usize {
    let mut best = 1;
    let mut run = 1;
    let mut prev = index & 3;
    for p in 1..k {
        let d = (index >> (2 * p)) & 3;
        if d == prev {
            run += 1;
            best = best.max(run);
        } else {
            run = 1;
            prev = d;
        }
    }
    best
}

/// Key/value document describing a constraint set.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintConfig {
    pub observed_length: usize,
    pub max_homopolymer: Option<usize>,
    pub gc_min: Option<f64>,
    pub gc_max: Option<f64>,
    #[serde(default)]
    pub motifs: Vec<String>,
    pub reverse_complement_motifs: Option<bool>,
}

impl ConstraintConfig {
    pub fn build(&self) -> Result<ConstraintSet> {
        let mut cs = ConstraintSet::new(self.observed_length)?;
        if let Some(h) = self.max_homopolymer {
            cs = cs.with_max_homopolymer(h)?;
        }
        match (self.gc_min, self.gc_max) {
            (None, None) => {}
            (lo, hi) => cs = cs.with_gc_range(lo.unwrap_or(0.0), hi.unwrap_or(1.0))?,
        }
        cs = cs.with_motifs(&self.motifs)?;
        Ok(cs.with_reverse_complements(self.reverse_complement_motifs.unwrap_or(true)))
    }
}

#[derive(Clone, Debug)]
pub struct NamedConstraintSet {
    pub name: String,
    pub set: ConstraintSet,
}

/// The twelve representative sets `set01`..`set12`, all at `k = 10`, in
/// order of increasing capacity.
pub fn builtin_constraint_sets() -> Vec<NamedConstraintSet> {
    type Spec = (Option<usize>, Option<(f64, f64)>, &'static [&'static str]);
    const SPECS: [Spec; 12] = [
        (Some(2), Some((0.5, 0.5)), &RESTRICTION_SITES),
        (Some(1), None, &[]),
        (None, Some((0.1, 0.3)), &[]),
        (Some(2), Some((0.4, 0.6)), &ONT_MOTIFS),
        (Some(2), Some((0.4, 0.6)), &[]),
        (None, Some((0.5, 0.7)), &[]),
        (Some(3), Some((0.4, 0.6)), &[]),
        (Some(4), Some((0.4, 0.6)), &[]),
        (Some(3), None, &[]),
        (Some(4), None, &[]),
        (Some(5), None, &[]),
        (Some(6), None, &[]),
    ];
    SPECS
        .iter()
        .enumerate()
        .map(|(i, (h, gc, motifs))| {
            let mut cs = ConstraintSet::new(10).expect("k = 10");
            if let Some(h) = h {
                cs = cs.with_max_homopolymer(*h).expect("valid builtin");
            }
            if let Some((lo, hi)) = gc {
                cs = cs.with_gc_range(*lo, *hi).expect("valid builtin");
            }
            cs = cs.with_motifs(motifs.iter()).expect("valid builtin");
            NamedConstraintSet { name: format!("set{:02}", i + 1), set: cs }
        })
        .collect()
}

/// Homopolymer run at most 2, GC exactly 50% per 10-mer, and sequencing,
/// codon and restriction-site motifs forbidden on both strands.
pub fn high_compatibility() -> ConstraintSet {
    let motifs = ILLUMINA_MOTIFS
        .iter()
        .chain(ONT_MOTIFS.iter())
        .chain(CODON_MOTIFS.iter())
        .chain(RESTRICTION_SITES.iter());
    ConstraintSet::new(10)
        .and_then(|cs| cs.with_max_homopolymer(2))
        .and_then(|cs| cs.with_gc_range(0.5, 0.5))
        .and_then(|cs| cs.with_motifs(motifs))
        .expect("valid builtin")
}

pub fn builtin_by_name(name: &str) -> Option<ConstraintSet> {
    if name == "high-compatibility" || name == "hc" {
        return Some(high_compatibility());
    }
    builtin_constraint_sets().into_iter().find(|s| s.name == name).map(|s| s.set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nucleotide::{kmer_from_index, parse_seq};

    fn dna(s: &str) -> Seq {
        parse_seq(s).unwrap()
    }

    #[test]
    fn homopolymer_run_over_limit_rejected() {
        let cs = ConstraintSet::new(4).unwrap().with_max_homopolymer(1).unwrap();
        assert!(!cs.kmer_is_valid(&dna("AATT")).unwrap());
        assert!(cs.kmer_is_valid(&dna("ACGT")).unwrap());
    }

    #[test]
    fn balanced_kmer_accepted() {
        let cs = ConstraintSet::new(4)
            .unwrap()
            .with_max_homopolymer(2)
            .unwrap()
            .with_gc_range(0.4, 0.6)
            .unwrap();
        assert!(cs.kmer_is_valid(&dna("ACGT")).unwrap());
        assert!(cs.kmer_is_valid(&dna("ACCA")).unwrap());
        assert!(!cs.kmer_is_valid(&dna("GCGC")).unwrap());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let cs = ConstraintSet::new(4).unwrap();
        assert!(matches!(cs.kmer_is_valid(&dna("ACG")), Err(Error::InvalidArgument(_))));
        assert!(matches!(cs.sequence_is_valid(&dna("ACG")), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn sequences_checked_per_window() {
        let cs = ConstraintSet::new(2).unwrap().with_max_homopolymer(2).unwrap();
        assert!(cs.sequence_is_valid(&dna("ACACAC")).unwrap());
        let cs10 = ConstraintSet::new(10).unwrap().with_max_homopolymer(2).unwrap();
        assert!(!cs10.sequence_is_valid(&dna("AAAGCTAGCTAG")).unwrap());
    }

    #[test]
    fn motif_longer_than_k_rejected() {
        let err = ConstraintSet::new(3).unwrap().with_motifs(["ACGT"]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(ConstraintSet::new(0).is_err());
        assert!(ConstraintSet::new(13).is_err());
        assert!(ConstraintSet::new(4).unwrap().with_max_homopolymer(5).is_err());
        assert!(ConstraintSet::new(4).unwrap().with_gc_range(0.6, 0.4).is_err());
        // exactly 50% cannot be met by an odd window
        assert!(ConstraintSet::new(5).unwrap().with_gc_range(0.5, 0.5).is_err());
    }

    #[test]
    fn empty_set_accepts_everything() {
        let cs = ConstraintSet::new(3).unwrap();
        assert!(cs.is_unconstrained());
        assert!((0..64).all(|i| cs.kmer_index_is_valid(i)));
    }

    #[test]
    fn reverse_complement_motifs_screened() {
        let cs = ConstraintSet::new(5).unwrap().with_motifs(["GACGC"]).unwrap();
        assert!(!cs.kmer_is_valid(&dna("GCGTC")).unwrap());
        let plain = cs.clone().with_reverse_complements(false);
        assert!(plain.kmer_is_valid(&dna("GCGTC")).unwrap());
        assert!(!plain.kmer_is_valid(&dna("GACGC")).unwrap());
    }

    #[test]
    fn gc_bounds_are_inclusive_integer_interval() {
        let cs = ConstraintSet::new(10).unwrap().with_gc_range(0.1, 0.3).unwrap();
        assert_eq!(cs.gc_count_bounds(), Some((1, 3)));
        let cs = ConstraintSet::new(10).unwrap().with_gc_range(0.5, 0.7).unwrap();
        assert_eq!(cs.gc_count_bounds(), Some((5, 7)));
    }

    #[test]
    fn builtin_rows() {
        let sets = builtin_constraint_sets();
        assert_eq!(sets.len(), 12);
        let s02 = &sets[1].set;
        assert_eq!((s02.max_homopolymer(), s02.gc_range(), s02.motifs().len()), (Some(1), None, 0));
        let s12 = &sets[11].set;
        assert_eq!((s12.max_homopolymer(), s12.gc_range(), s12.motifs().len()), (Some(6), None, 0));
        assert!(sets.iter().all(|s| s.set.k() == 10));
        assert_eq!(sets[3].set.motifs().len(), 4);
    }

    #[test]
    fn config_round_trip() {
        let cs = high_compatibility();
        let back = ConstraintSet::from_config_str(&cs.to_config_string()).unwrap();
        assert_eq!(back.effective_motifs().len(), cs.effective_motifs().len());
        for i in (0..1 << 20).step_by(997) {
            assert_eq!(back.kmer_index_is_valid(i), cs.kmer_index_is_valid(i), "{}", seq_to_string(&kmer_from_index(i, 10)));
        }
    }

    #[test]
    fn config_requires_observed_length() {
        assert!(matches!(ConstraintSet::from_config_str("max_homopolymer = 2"), Err(Error::Config(_))));
        let cs = ConstraintSet::from_config_str("observed_length = 6\ngc_min = 0.5\ngc_max = 0.5\nmotifs = [\"ACG\"]").unwrap();
        assert_eq!(cs.gc_count_bounds(), Some((3, 3)));
    }
}
