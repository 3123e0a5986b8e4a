use std::collections::BTreeSet;
use std::sync::LazyLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spiderweb::channel::{corrupt_with, ChannelSpec, EditKind};
use spiderweb::codec::{CheckValue, Codec, StartPolicy};
use spiderweb::constraints::high_compatibility;
use spiderweb::corrector::{detect, repair, RepairLimits};
use spiderweb::digraph::{generate, Accessor, ArcBinding};
use spiderweb::nucleotide::{kmer_index, parse_seq, Nucleotide, Seq};

fn toy() -> Codec {
    let vs: Vec<u32> = ["AA", "AC", "CA", "CG", "CT", "GA", "GT", "TA"].iter().map(|s| kmer_index(&parse_seq(s).unwrap())).collect();
    let start = kmer_index(&parse_seq("AC").unwrap());
    Codec::new(Accessor::from_vertices(2, &vs).unwrap(), ArcBinding::Canonical, StartPolicy::Fixed(start)).unwrap()
}

static HC: LazyLock<Codec> =
    LazyLock::new(|| Codec::with_default_start(generate(&high_compatibility(), 1).unwrap().accessor, ArcBinding::Canonical).unwrap());

fn single_edits(read: &[Nucleotide]) -> BTreeSet<Seq> {
    let mut out = BTreeSet::new();
    for i in 0..=read.len() {
        for n in Nucleotide::ALL {
            let mut s = read.to_vec();
            s.insert(i, n);
            out.insert(s);
            if i < read.len() && read[i] != n {
                let mut s = read.to_vec();
                s[i] = n;
                out.insert(s);
            }
        }
        if i < read.len() {
            let mut s = read.to_vec();
            s.remove(i);
            out.insert(s);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn single_edit_search_matches_exhaustive_oracle(len in 1usize..=12, seed in any::<u64>()) {
        let c = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = c.initial_state();
        let y = c.random_walk(start, len, &mut rng).unwrap();
        let spec = ChannelSpec::new(0.0).unwrap();
        let spec = ChannelSpec { error_rate: 1.0 / (2.0 * len as f64) + 1e-6, ..spec };
        let (read, edits) = corrupt_with(&y, &spec, &mut rng);
        prop_assume!(edits.len() == 1);
        prop_assume!(c.walk(start, &read).is_err());
        let got = repair(&c, &read, start, &CheckValue::compute(&y, 2), y.len(), &RepairLimits::default()).unwrap();
        let search: BTreeSet<Seq> = got.search.iter().cloned().collect();
        let oracle: BTreeSet<Seq> = single_edits(&read).into_iter().filter(|s| c.walk(start, s).is_ok()).collect();
        prop_assert_eq!(search, oracle);
    }

    #[test]
    fn repaired_candidates_are_sound_and_local(seed in any::<u64>(), rate in prop::sample::select(vec![0.005, 0.01, 0.02, 0.04])) {
        let c = &*HC;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = c.initial_state();
        let y = c.random_walk(start, 200, &mut rng).unwrap();
        let (read, _) = corrupt_with(&y, &ChannelSpec::new(rate).unwrap(), &mut rng);
        let check = CheckValue::compute(&y, c.k());
        let Ok(got) = repair(c, &read, start, &check, y.len(), &RepairLimits::default()) else { return Ok(()); };
        for z in &got.repaired {
            prop_assert!(c.walk(start, z).is_ok());
            prop_assert_eq!(z.len(), y.len());
            prop_assert_eq!(CheckValue::compute(z, c.k()), check);
        }
        if let Some(j) = detect(c, &read, start).first_error_position {
            let untouched = j.saturating_sub(c.k());
            for z in &got.search {
                prop_assert_eq!(&z[..untouched.min(z.len())], &read[..untouched.min(z.len())]);
            }
        }
    }
}

fn apply(y: &[Nucleotide], p: usize, kind: EditKind, rng: &mut ChaCha8Rng) -> Seq {
    let mut s = y.to_vec();
    match kind {
        EditKind::Substitution => s[p] = Nucleotide::from_digit(s[p].digit() + rng.gen_range(1..4)),
        EditKind::Insertion => s.insert(p, Nucleotide::from_digit(rng.gen_range(0..4))),
        EditKind::Deletion => {
            s.remove(p);
        }
    }
    s
}

#[test]
fn separated_edits_are_repaired_in_turn() {
    let c = &*HC;
    let k = c.k();
    let mut rng = ChaCha8Rng::seed_from_u64(2021);
    let kinds = [EditKind::Substitution, EditKind::Insertion, EditKind::Deletion];
    let (mut found, mut detected) = (0, 0);
    for _ in 0..500 {
        let start = c.initial_state();
        let y = c.random_walk(start, 200, &mut rng).unwrap();
        let first = rng.gen_range(0..200 - 2 * k - 1);
        let second = rng.gen_range(first + 2 * k..200);
        let read = apply(&y, second, kinds[rng.gen_range(0..3)], &mut rng);
        let read = apply(&read, first, kinds[rng.gen_range(0..3)], &mut rng);
        if c.walk(start, &read).is_ok() {
            continue;
        }
        detected += 1;
        let got = repair(c, &read, start, &CheckValue::compute(&y, k), y.len(), &RepairLimits::default()).unwrap();
        if got.search.contains(&y) {
            found += 1;
        }
    }
    let rate = found as f64 / detected as f64;
    // a substitution can land on another valid path and go unseen
    assert!(rate >= 0.93, "{found}/{detected}");
}
