use std::collections::BTreeSet;

use i3rab::parser::{is_projective, oracle_sequence, replay, Transition};
use i3rab::{parse_treebank, Sentence, Token};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLD: &str = include_str!("../data/sample_i3rab.conll");
const LABELS: &[&str] = &["TOPIC", "GEN", "ADJ", "AGENT", "OBJ", "P", "COORD", "END"];

fn gold_arcs(s: &Sentence) -> BTreeSet<(usize, usize, String)> {
    s.tokens().iter().map(|t| (t.head, t.id, t.deprel.clone())).collect()
}

fn assert_oracle_reproduces(s: &Sentence) {
    let seq = oracle_sequence(s).unwrap();
    let c = replay(s.len(), &seq).unwrap();
    assert!(c.is_terminal());
    assert_eq!(c.arcs(), gold_arcs(s));
    let shifts = seq.iter().filter(|t| **t == Transition::Shift).count();
    let rights = seq.iter().filter(|t| matches!(t, Transition::RightArc(_))).count();
    assert_eq!(shifts + rights, s.len());
}

#[test]
fn oracle_on_bundled_corpus() {
    let tb = parse_treebank(GOLD).unwrap();
    let mut checked = 0;
    for s in tb.iter().filter(|s| is_projective(s)) {
        assert_oracle_reproduces(s);
        checked += 1;
    }
    assert_eq!(checked, tb.len());
}

/// Fills `heads` for the span `lo..=hi` hanging under `parent`: a random
/// word heads the span and the words on each side are cut into contiguous
/// sub-spans headed by it.
fn grow(rng: &mut ChaCha8Rng, heads: &mut [usize], lo: usize, hi: usize, parent: usize) {
    let r = rng.random_range(lo..=hi);
    heads[r] = parent;
    let mut attach_runs = |rng: &mut ChaCha8Rng, a: usize, b: usize| {
        let mut start = a;
        while start <= b {
            let end = rng.random_range(start..=b);
            grow(rng, heads, start, end, r);
            start = end + 1;
        }
    };
    if r > lo {
        attach_runs(rng, lo, r - 1);
    }
    if r < hi {
        attach_runs(rng, r + 1, hi);
    }
}

fn random_projective(rng: &mut ChaCha8Rng) -> Sentence {
    let n = rng.random_range(1..=25);
    let mut heads = vec![0; n + 1];
    if rng.random_bool(0.7) {
        grow(rng, &mut heads, 1, n, 0);
    } else {
        let mut start = 1;
        while start <= n {
            let end = rng.random_range(start..=n);
            grow(rng, &mut heads, start, end, 0);
            start = end + 1;
        }
    }
    let tokens = (1..=n)
        .map(|i| {
            let label = LABELS[rng.random_range(0..LABELS.len())];
            Token::new(i, format!("w{i}"))
                .with_pos("N", "N-")
                .with_head(heads[i], label)
        })
        .collect();
    Sentence::new(tokens).unwrap()
}

#[test]
fn oracle_on_random_projective_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let s = random_projective(&mut rng);
        assert!(is_projective(&s), "generator produced {:?}", s.heads());
        assert_oracle_reproduces(&s);
    }
}

#[test]
fn crossing_arcs_are_rejected() {
    let heads = [0, 3, 0, 2, 1];
    let tokens = (1..=4)
        .map(|i| Token::new(i, format!("w{i}")).with_head(heads[i], "GEN"))
        .collect();
    let s = Sentence::new(tokens).unwrap();
    assert!(!is_projective(&s));
    assert!(oracle_sequence(&s).is_err());
}
