use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spiderweb::channel::{corrupt_with, ChannelSpec, EditKind, ErrorCountMode};
use spiderweb::nucleotide::{Nucleotide, Seq};

fn levenshtein(a: &[Nucleotide], b: &[Nucleotide]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(x != y)).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

fn seq_strategy() -> impl Strategy<Value = Seq> {
    prop::collection::vec((0u8..4).prop_map(Nucleotide::from_digit), 1..250)
}

proptest! {
    #[test]
    fn fixed_count_accounting(seq in seq_strategy(), rate in 0.0f64..=0.08, seed in any::<u64>(), weights in prop::sample::select(vec![[1.0 / 3.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.5, 0.25, 0.25]])) {
        let spec = ChannelSpec::new(rate).unwrap().with_weights(weights).unwrap();
        let (out, edits) = corrupt_with(&seq, &spec, &mut ChaCha8Rng::seed_from_u64(seed));
        let ins = edits.iter().filter(|e| e.1 == EditKind::Insertion).count();
        let del = edits.iter().filter(|e| e.1 == EditKind::Deletion).count();
        prop_assert_eq!(out.len() + del, seq.len() + ins);
        prop_assert!(levenshtein(&seq, &out) <= edits.len());
        let slots = if weights[1] > 0.0 { seq.len() + 1 } else { seq.len() };
        prop_assert_eq!(edits.len(), spec.error_count(seq.len()).min(slots));
    }

    #[test]
    fn per_nucleotide_accounting(seq in seq_strategy(), rate in 0.0f64..=0.08, seed in any::<u64>()) {
        let spec = ChannelSpec::new(rate).unwrap().with_mode(ErrorCountMode::PerNucleotide);
        let (out, edits) = corrupt_with(&seq, &spec, &mut ChaCha8Rng::seed_from_u64(seed));
        let ins = edits.iter().filter(|e| e.1 == EditKind::Insertion).count();
        let del = edits.iter().filter(|e| e.1 == EditKind::Deletion).count();
        prop_assert_eq!(out.len() + del, seq.len() + ins);
        prop_assert!(levenshtein(&seq, &out) <= edits.len());
    }
}
