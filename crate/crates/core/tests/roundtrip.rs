use i3rab::{emit_treebank, parse_treebank};
use proptest::prelude::*;

const PADT: &str = include_str!("../data/sample_padt.conll");
const I3RAB: &str = include_str!("../data/sample_i3rab.conll");

#[test]
fn bundled_corpus_round_trips() {
    for doc in [PADT, I3RAB] {
        let tb = parse_treebank(doc).unwrap();
        assert_eq!(emit_treebank(&tb), doc);
    }
}

#[test]
fn crlf_and_loose_markers_normalize() {
    let loose = "1\tكان\tكان\tV\tVP\tMood=I Person=3\t0\tVB\t-\t-\r\n\r\n";
    let tb = parse_treebank(loose).unwrap();
    let canonical = "1\tكان\tكان\tV\tVP\tMood=I|Person=3\t0\tVB\t_\t_\n\n";
    assert_eq!(emit_treebank(&tb), canonical);
    assert_eq!(emit_treebank(&parse_treebank(canonical).unwrap()), canonical);
}

fn word() -> impl Strategy<Value = String> {
    prop_oneof![
        "[\u{0621}-\u{064A}]{1,7}",
        "[a-zA-Z][a-zA-Z0-9.,]{0,5}",
        Just(".".to_string()),
        Just("*هو".to_string()),
    ]
}

fn optional(s: impl Strategy<Value = String>) -> impl Strategy<Value = String> {
    prop_oneof![1 => Just("_".to_string()), 3 => s]
}

fn feats() -> impl Strategy<Value = String> {
    proptest::collection::btree_map("[A-Z][a-z]{0,6}", "[A-Za-z0-9]{1,3}", 0..4).prop_map(|m| {
        if m.is_empty() {
            "_".to_string()
        } else {
            m.into_iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join("|")
        }
    })
}

fn sentence() -> impl Strategy<Value = String> {
    (1usize..12, any::<bool>(), 1u32..10_000).prop_flat_map(|(n, with_id, sid)| {
        let rows = proptest::collection::vec(
            (
                word(),
                optional(word()),
                optional("[A-Z]"),
                optional("[A-Z]-"),
                feats(),
                0..=n,
                optional("[A-Z]{2,6}(-[A-Z]{2,4})?"),
                prop_oneof![Just(None), (0..=n).prop_map(Some)],
                optional("[A-Z]{2,5}"),
            ),
            n,
        );
        rows.prop_map(move |rows| {
            let mut out = String::new();
            if with_id {
                out.push_str(&format!("# sent_id = {sid}\n"));
            }
            for (i, (form, lemma, cpos, pos, feats, head, rel, phead, prel)) in rows.into_iter().enumerate() {
                let phead = phead.map_or("_".to_string(), |h| h.to_string());
                out.push_str(&format!(
                    "{}\t{form}\t{lemma}\t{cpos}\t{pos}\t{feats}\t{head}\t{rel}\t{phead}\t{prel}\n",
                    i + 1
                ));
            }
            out.push('\n');
            out
        })
    })
}

fn document() -> impl Strategy<Value = String> {
    proptest::collection::vec(sentence(), 1..6).prop_map(|v| v.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fuzzed_canonical_files_round_trip(doc in document()) {
        let tb = parse_treebank(&doc).unwrap();
        prop_assert_eq!(emit_treebank(&tb), doc);
    }
}
