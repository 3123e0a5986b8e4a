//! The coding digraph as a compressed successor table ("accessor").
//!
//! Vertices are the `4^k` k-mers. Row `i` of the table holds, for each
//! appended nucleotide `c`, the index of the successor vertex
//! `(i * 4 + c) mod 4^k`, or [`ABSENT`] when that arc is not in the graph.
//! The table takes `4^(k+1)` entries, never a `4^k x 4^k` adjacency matrix.

mod binding;
mod io;

pub use binding::{bind, ArcBinding, ArcList};
pub use io::{load, read_digraph, save, write_digraph, MAGIC, VERSION};

use crate::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::nucleotide::Nucleotide;

pub const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accessor {
    k: usize,
    table: Vec<u32>,
}

/// Output of [`generate`]: the trimmed accessor and the surviving-vertex
/// count after screening (`rounds[0]`) and after each trimming round.
#[derive(Clone, Debug)]
pub struct Generated {
    pub accessor: Accessor,
    pub rounds: Vec<usize>,
}

impl Generated {
    pub fn screened_vertices(&self) -> usize {
        self.rounds[0]
    }

    pub fn final_vertices(&self) -> usize {
        *self.rounds.last().expect("at least the screening count")
    }

    /// Counts as tabulated per trimming pass: the survivors of every pass,
    /// starting with the first (which removes nothing when the screened
    /// graph already meets the threshold).
    pub fn pass_counts(&self) -> Vec<usize> {
        if self.rounds.len() == 1 {
            self.rounds.clone()
        } else {
            self.rounds[1..].to_vec()
        }
    }
}

impl Accessor {
    /// The full de Bruijn graph of order `k`.
    pub fn complete(k: usize) -> Result<Self> {
        Self::induced(k, |_| true)
    }

    /// Subgraph induced by the vertices for which `present` holds.
    pub fn induced(k: usize, present: impl Fn(u32) -> bool) -> Result<Self> {
        check_k(k)?;
        let n = 1usize << (2 * k);
        let alive: Vec<bool> = (0..n as u32).map(&present).collect();
        let mut table = vec![ABSENT; n * 4];
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            for c in 0..4 {
                let j = ((i << 2) | c) & (n - 1);
                if alive[j] {
                    table[i * 4 + c] = j as u32;
                }
            }
        }
        Ok(Accessor { k, table })
    }

    /// Subgraph induced by an explicit vertex list.
    pub fn from_vertices(k: usize, vertices: &[u32]) -> Result<Self> {
        check_k(k)?;
        let n = 1u32 << (2 * k);
        if let Some(v) = vertices.iter().find(|&&v| v >= n) {
            return Err(Error::invalid(format!("vertex index {v} out of range for k = {k}")));
        }
        let mut alive = vec![false; n as usize];
        for &v in vertices {
            alive[v as usize] = true;
        }
        Self::induced(k, |v| alive[v as usize])
    }

    /// Builds an accessor from raw rows, validating the successor law.
    pub fn from_table(k: usize, table: Vec<u32>) -> Result<Self> {
        check_k(k)?;
        let n = 1usize << (2 * k);
        if table.len() != n * 4 {
            return Err(Error::invalid(format!("table has {} entries, expected {}", table.len(), n * 4)));
        }
        let acc = Accessor { k, table };
        acc.validate()?;
        Ok(acc)
    }

    /// Checks `j mod 4 = c` and `floor(j / 4) = i mod 4^(k-1)` for every
    /// present entry `(i, c) = j`, and that arcs land on vertices with rows.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertex_count();
        for i in 0..n {
            for c in 0..4 {
                let j = self.table[i * 4 + c];
                if j == ABSENT {
                    continue;
                }
                let expected = ((i << 2) | c) & (n - 1);
                if j as usize != expected {
                    return Err(Error::Format(format!(
                        "entry ({i}, {c}) = {j} violates the successor law (expected {expected})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `4^k`, the size of the vertex index space.
    pub fn vertex_count(&self) -> usize {
        1 << (2 * self.k)
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// Bytes held by the successor table.
    pub fn memory_bytes(&self) -> usize {
        self.table.len() * std::mem::size_of::<u32>()
    }

    #[inline]
    pub fn row(&self, v: u32) -> &[u32] {
        let i = v as usize * 4;
        &self.table[i..i + 4]
    }

    #[inline]
    pub fn successor(&self, v: u32, n: Nucleotide) -> Option<u32> {
        let j = self.table[v as usize * 4 + n as usize];
        (j != ABSENT).then_some(j)
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        self.row(v).iter().filter(|&&j| j != ABSENT).count()
    }

    pub fn out_degree(&self, v: u32) -> Result<usize> {
        if v as usize >= self.vertex_count() {
            return Err(Error::invalid(format!("vertex {v} out of range (4^k = {})", self.vertex_count())));
        }
        Ok(self.degree(v))
    }

    /// A vertex belongs to the graph when it has at least one outgoing arc.
    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        (v as usize) < self.vertex_count() && self.row(v).iter().any(|&j| j != ABSENT)
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.vertex_count() as u32).filter(move |&v| self.contains(v))
    }

    pub fn arc_count(&self) -> usize {
        self.table.iter().filter(|&&j| j != ABSENT).count()
    }

    pub fn is_empty(&self) -> bool {
        self.table.iter().all(|&j| j == ABSENT)
    }

    /// Predecessor candidates of `v`: `f * 4^(k-1) + floor(v / 4)`.
    #[inline]
    pub fn predecessors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        let base = v >> 2;
        let shift = 2 * (self.k - 1);
        let col = (v & 3) as usize;
        (0..4u32)
            .map(move |f| (f << shift) | base)
            .filter(move |&u| self.table[u as usize * 4 + col] == v)
    }

    fn delete_vertex(&mut self, v: u32) {
        let base = v as usize * 4;
        self.table[base..base + 4].fill(ABSENT);
        let col = (v & 3) as usize;
        let shift = 2 * (self.k - 1);
        for f in 0..4u32 {
            let u = ((f << shift) | (v >> 2)) as usize;
            if self.table[u * 4 + col] == v {
                self.table[u * 4 + col] = ABSENT;
            }
        }
    }

    /// Number of vertices with a nonempty row.
    pub fn present_count(&self) -> usize {
        self.vertices().count()
    }

    /// Every present vertex reaches every other along arcs.
    pub fn is_strongly_connected(&self) -> bool {
        let Some(root) = self.vertices().next() else {
            return false;
        };
        let total = self.present_count();
        let forward = self.reach(root, |acc, v, out| {
            out.extend(acc.row(v).iter().copied().filter(|&j| j != ABSENT));
        });
        if forward != total {
            return false;
        }
        let backward = self.reach(root, |acc, v, out| out.extend(acc.predecessors(v)));
        backward == total
    }

    fn reach(&self, root: u32, next: impl Fn(&Accessor, u32, &mut Vec<u32>)) -> usize {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![root];
        seen[root as usize] = true;
        let mut count = 0;
        let mut buf = Vec::with_capacity(4);
        while let Some(v) = stack.pop() {
            count += 1;
            buf.clear();
            next(self, v, &mut buf);
            for &w in &buf {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        count
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > crate::constraints::MAX_OBSERVED_LENGTH {
        return Err(Error::invalid(format!("observed length {k} not supported")));
    }
    Ok(())
}

/// Screens the de Bruijn graph with `cs` and trims vertices of out-degree
/// below `min_out_degree` until stable.
///
/// Arcs join surviving vertices only. Any substring of length at most `k`
/// of a `(k+1)`-mer lies inside one of its two k-mer windows, so when both
/// endpoints pass screening the junction cannot introduce a motif, and (for
/// `h < k`) cannot introduce an over-long homopolymer.
pub fn generate(cs: &ConstraintSet, min_out_degree: usize) -> Result<Generated> {
    if !(1..=4).contains(&min_out_degree) {
        return Err(Error::invalid(format!("minimum out-degree must be in 1..=4, got {min_out_degree}")));
    }
    let k = cs.k();
    let mut acc = Accessor::induced(k, |v| cs.kmer_index_is_valid(v))?;
    if let Some(h) = cs.max_homopolymer() {
        if h == k {
            // a run of k+1 only shows up across the junction
            let n = acc.vertex_count();
            for i in 0..n {
                let last = i & 3;
                let homo = (0..k).all(|p| (i >> (2 * p)) & 3 == last);
                if homo {
                    acc.table[i * 4 + last] = ABSENT;
                }
            }
        }
    }
    let screened = (0..acc.vertex_count() as u32).filter(|&v| cs.kmer_index_is_valid(v)).count();
    let mut rounds = vec![screened];
    if screened == 0 {
        return Err(Error::GenerationFailed { round: 0, remaining: 0 });
    }
    let alive: Vec<bool> = (0..acc.vertex_count() as u32).map(|v| cs.kmer_index_is_valid(v)).collect();
    let trimmed = trim_alive(&mut acc, alive, min_out_degree);
    for (round, &count) in trimmed.iter().enumerate() {
        if count == 0 {
            return Err(Error::GenerationFailed { round: round + 1, remaining: *rounds.last().unwrap() });
        }
        rounds.push(count);
    }
    Ok(Generated { accessor: acc, rounds })
}

/// Repeatedly removes, all at once per round, every vertex whose out-degree
/// is below `threshold`. Returns the surviving count after each round that
/// removed something.
pub fn trim_rounds(acc: &mut Accessor, threshold: usize) -> Vec<usize> {
    let alive: Vec<bool> = (0..acc.vertex_count() as u32).map(|v| acc.contains(v) || has_incoming(acc, v)).collect();
    trim_alive(acc, alive, threshold)
}

fn trim_alive(acc: &mut Accessor, mut alive: Vec<bool>, threshold: usize) -> Vec<usize> {
    let n = acc.vertex_count() as u32;
    let mut counts = Vec::new();
    loop {
        let doomed: Vec<u32> = (0..n).filter(|&v| alive[v as usize] && acc.degree(v) < threshold).collect();
        if doomed.is_empty() {
            break;
        }
        for &v in &doomed {
            acc.delete_vertex(v);
            alive[v as usize] = false;
        }
        counts.push(alive.iter().filter(|&&a| a).count());
    }
    counts
}

fn has_incoming(acc: &Accessor, v: u32) -> bool {
    acc.predecessors(v).next().is_some()
}

/// Number of directed walks of exactly `stride` arcs from any root to each
/// vertex. Stride 0 yields the root indicator. Counts saturate at `u64::MAX`.
pub fn layer_search(acc: &Accessor, roots: &[u32], stride: usize) -> Result<Vec<u64>> {
    if roots.is_empty() {
        return Err(Error::invalid("layer search needs at least one root"));
    }
    let n = acc.vertex_count();
    let mut layer = vec![0u64; n];
    for &r in roots {
        if r as usize >= n {
            return Err(Error::invalid(format!("root {r} out of range")));
        }
        layer[r as usize] = layer[r as usize].saturating_add(1);
    }
    let mut next = vec![0u64; n];
    for _ in 0..stride {
        next.fill(0);
        for (v, &count) in layer.iter().enumerate() {
            if count == 0 {
                continue;
            }
            for &j in acc.row(v as u32) {
                if j != ABSENT {
                    next[j as usize] = next[j as usize].saturating_add(count);
                }
            }
        }
        std::mem::swap(&mut layer, &mut next);
    }
    Ok(layer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nucleotide::{kmer_index, parse_seq};

    fn idx(s: &str) -> u32 {
        kmer_index(&parse_seq(s).unwrap())
    }

    /// The 8-vertex GC-balanced 2-mer graph used throughout the docs.
    pub(crate) fn balanced_pairs() -> Accessor {
        let vs: Vec<u32> = ["AC", "AG", "CA", "CT", "GA", "GT", "TC", "TG"].iter().map(|s| idx(s)).collect();
        Accessor::from_vertices(2, &vs).unwrap()
    }

    #[test]
    fn published_accessor_rows() {
        let acc = balanced_pairs();
        let expected: [[i64; 4]; 16] = [
            [-1, -1, -1, -1],
            [4, -1, -1, 7],
            [8, -1, -1, 11],
            [-1, -1, -1, -1],
            [-1, 1, 2, -1],
            [-1, -1, -1, -1],
            [-1, -1, -1, -1],
            [-1, 13, 14, -1],
            [-1, 1, 2, -1],
            [-1, -1, -1, -1],
            [-1, -1, -1, -1],
            [-1, 13, 14, -1],
            [-1, -1, -1, -1],
            [4, -1, -1, 7],
            [8, -1, -1, 11],
            [-1, -1, -1, -1],
        ];
        for (i, row) in expected.iter().enumerate() {
            let got: Vec<i64> = acc.row(i as u32).iter().map(|&j| if j == ABSENT { -1 } else { j as i64 }).collect();
            assert_eq!(got, row.to_vec(), "row {i}");
        }
        assert_eq!(acc.out_degree(1).unwrap(), 2);
        assert_eq!(acc.out_degree(0).unwrap(), 0);
        assert!(acc.out_degree(16).is_err());
    }

    #[test]
    fn complete_graph_has_out_degree_four() {
        let acc = Accessor::complete(3).unwrap();
        assert!((0..64).all(|v| acc.out_degree(v).unwrap() == 4));
        let g = generate(&ConstraintSet::new(3).unwrap(), 2).unwrap();
        assert_eq!(g.accessor, acc);
        assert_eq!(g.rounds, vec![64]);
    }

    #[test]
    fn successor_law_enforced() {
        let mut table = Accessor::complete(2).unwrap().table().to_vec();
        table[5] = 3;
        assert!(Accessor::from_table(2, table).is_err());
    }

    #[test]
    fn layer_search_single_step() {
        let acc = balanced_pairs();
        let l1 = layer_search(&acc, &[idx("AC")], 1).unwrap();
        let hits: Vec<(usize, u64)> = l1.iter().copied().enumerate().filter(|&(_, c)| c > 0).collect();
        assert_eq!(hits, vec![(idx("CA") as usize, 1), (idx("CT") as usize, 1)]);
        let l0 = layer_search(&acc, &[idx("AC")], 0).unwrap();
        assert_eq!(l0.iter().sum::<u64>(), 1);
        let full = layer_search(&Accessor::complete(2).unwrap(), &[0], 1).unwrap();
        assert_eq!(full.iter().filter(|&&c| c == 1).count(), 4);
        assert!(layer_search(&acc, &[], 1).is_err());
    }

    #[test]
    fn trimming_reaches_fixed_point() {
        let cs = ConstraintSet::new(4).unwrap().with_max_homopolymer(1).unwrap().with_motifs(["ACG", "TG"]).unwrap();
        let mut g = generate(&cs, 2).unwrap();
        assert!(g.accessor.vertices().all(|v| g.accessor.degree(v) >= 2));
        assert!(trim_rounds(&mut g.accessor, 2).is_empty());
    }

    #[test]
    fn empty_after_trim_is_generation_failure() {
        // every 2-mer with two distinct letters, but a cycle is impossible with only A/C... use motifs to kill all cycles
        let cs = ConstraintSet::new(2).unwrap().with_reverse_complements(false).with_motifs(["AA", "CC", "GG", "TT", "CA", "GA", "GC", "TA", "TC", "TG"]).unwrap();
        match generate(&cs, 1) {
            Err(Error::GenerationFailed { round, remaining }) => {
                assert!(round >= 1);
                assert!(remaining > 0);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn homopolymer_limit_equal_to_k_screens_junctions() {
        let cs = ConstraintSet::new(3).unwrap().with_max_homopolymer(3).unwrap();
        let g = generate(&cs, 1).unwrap();
        let aaa = idx("AAA");
        assert_eq!(g.accessor.successor(aaa, Nucleotide::A), None);
        assert_eq!(g.accessor.degree(aaa), 3);
    }

    #[test]
    fn strong_connectivity() {
        assert!(balanced_pairs().is_strongly_connected());
        let cycle: Vec<u32> = ["AC", "CG", "GT", "TA"].iter().map(|s| idx(s)).collect();
        assert!(Accessor::from_vertices(2, &cycle).unwrap().is_strongly_connected());
        let path: Vec<u32> = ["AC", "CG", "GT"].iter().map(|s| idx(s)).collect();
        assert!(!Accessor::from_vertices(2, &path).unwrap().is_strongly_connected());
    }
}
