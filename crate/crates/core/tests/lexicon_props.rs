mod support;

use std::collections::BTreeMap;

use proptest::prelude::*;
use support::{oracle_counts, NOTE_SEPARATORS, NOTE_WORDS};
use testinj::lexicon::{count_matches, expand_lexicon, stem, Lexicon, SynonymDatabase, Term, TermCategory};

const VOCAB: &[&str] = &["patient", "claims", "denies", "pain", "tells", "me", "drug", "seeking", "non-compliant", "agitated"];

fn term_strategy() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(VOCAB).prop_map(String::from), 1..=3)
}

fn lexicon_strategy() -> impl Strategy<Value = Lexicon> {
    prop::collection::vec(prop::collection::btree_set(term_strategy(), 1..6), 4).prop_map(|sets| {
        let terms = TermCategory::ALL
            .into_iter()
            .zip(sets)
            .map(|(c, s)| (c, s.into_iter().map(|t| Term::new(t).unwrap()).collect()))
            .collect::<BTreeMap<_, _>>();
        Lexicon::new(terms).unwrap()
    })
}

fn text_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec((prop::sample::select(NOTE_WORDS), prop::sample::select(NOTE_SEPARATORS), any::<bool>()), 0..25)
        .prop_map(|parts| {
            parts
                .into_iter()
                .map(|(w, s, upper)| format!("{}{}", if upper { w.to_uppercase() } else { w.to_string() }, s))
                .collect()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn counts_match_scanning_oracle(lex in lexicon_strategy(), text in text_strategy()) {
        prop_assert_eq!(count_matches(&text, &lex).0, oracle_counts(&text, &lex));
    }

    #[test]
    fn sentence_break_makes_counts_additive(lex in lexicon_strategy(), a in text_strategy(), b in text_strategy()) {
        let joined = count_matches(&format!("{a}. {b}"), &lex);
        let (ca, cb) = (count_matches(&a, &lex), count_matches(&b, &lex));
        for c in TermCategory::ALL {
            prop_assert_eq!(joined[c], ca[c] + cb[c]);
        }
    }

    #[test]
    fn expansion_is_a_superset(lex in lexicon_strategy(), syns in prop::collection::vec(prop::sample::select(VOCAB), 0..8)) {
        let db = SynonymDatabase::from_lists(VOCAB.iter().map(|w| (*w, syns.clone())));
        let expanded = expand_lexicon(&lex, &db);
        prop_assert!(expanded.is_superset_of(&lex));
        for c in TermCategory::ALL {
            // Every single-token term gains at most its stem and five synonyms.
            let singles = lex.terms(c).iter().filter(|t| t.is_single()).count();
            prop_assert!(expanded.terms(c).len() <= lex.terms(c).len() * 2 + singles * 5);
        }
    }
}

#[test]
fn stemming_twice_changes_only_known_tokens() {
    // Porter's algorithm is not idempotent in general; these base-lexicon
    // tokens keep shrinking when stemmed twice.
    const SHRINK_AGAIN: &[&str] = &[
        "abuse", "abuser", "abuses", "abusing", "belligerent", "defensive", "degenerate", "disagreeably", "disease",
        "endorses", "exaggerates", "malinger", "malingerer", "malingering", "malingers", "refuse", "refused", "refuses",
    ];
    let lex = Lexicon::base();
    let mut unstable = Vec::new();
    for c in TermCategory::ALL {
        for t in lex.terms(c) {
            for tok in t.tokens() {
                let once = stem(tok);
                if stem(&once) != once && !unstable.contains(tok) {
                    unstable.push(tok.clone());
                }
            }
        }
    }
    unstable.sort();
    assert_eq!(unstable, SHRINK_AGAIN);
}

proptest! {
    #[test]
    fn found_spans_agree_with_counts(words in prop::collection::vec((0..NOTE_WORDS.len(), 0..NOTE_SEPARATORS.len()), 0..40)) {
        let lex = Lexicon::base();
        let text: String = words.iter().map(|&(w, s)| format!("{}{}", NOTE_WORDS[w], NOTE_SEPARATORS[s])).collect();
        let hits = testinj::lexicon::find_matches(&text, &lex);
        let counts = testinj::lexicon::count_matches(&text, &lex);
        for c in TermCategory::ALL {
            prop_assert_eq!(hits.iter().filter(|m| m.category == c).count() as u64, counts[c]);
        }
        for m in &hits {
            let covered = testinj::lexicon::tokenize(&text[m.start..m.end]);
            prop_assert!(lex.terms(m.category).iter().any(|t| t.tokens() == covered.as_slice()));
        }
    }
}
