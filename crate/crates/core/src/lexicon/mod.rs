//! Unjust-term lexicon: loading, expansion and exact n-gram matching.

mod porter;
pub mod wordnet;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use porter::stem;
pub use wordnet::{parse_wordnet, SynonymDatabase};

use crate::{Error, Result};

/// Longest term, in tokens.
pub const MAX_TERM_TOKENS: usize = 3;

/// Synonyms added per single-token term during expansion.
pub const SYNONYMS_PER_TERM: usize = 5;

const BASE_LEXICON: &str = include_str!("../../data/base_lexicon.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermCategory {
    Evidential,
    Judgemental,
    Negative,
    Stigmatizing,
}

impl TermCategory {
    pub const ALL: [TermCategory; 4] = [
        TermCategory::Evidential,
        TermCategory::Judgemental,
        TermCategory::Negative,
        TermCategory::Stigmatizing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TermCategory::Evidential => "evidential",
            TermCategory::Judgemental => "judgemental",
            TermCategory::Negative => "negative",
            TermCategory::Stigmatizing => "stigmatizing",
        }
    }

    /// Column name used in binary datasets.
    pub fn column(self) -> &'static str {
        match self {
            TermCategory::Evidential => "evidentials",
            TermCategory::Judgemental => "judgementals",
            TermCategory::Negative => "negatives",
            TermCategory::Stigmatizing => "stigmatizing",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TermCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TermCategory {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "evidential" | "evidentials" => Ok(TermCategory::Evidential),
            "judgemental" | "judgementals" | "judgmental" | "judgmentals" => Ok(TermCategory::Judgemental),
            "negative" | "negatives" => Ok(TermCategory::Negative),
            "stigmatizing" | "stigmatising" => Ok(TermCategory::Stigmatizing),
            other => Err(format!("unknown term category `{other}`")),
        }
    }
}

/// One value per term category, indexed by [`TermCategory`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerCategory<T>(pub [T; 4]);

impl<T> Index<TermCategory> for PerCategory<T> {
    type Output = T;
    fn index(&self, c: TermCategory) -> &T {
        &self.0[c.index()]
    }
}

impl<T> IndexMut<TermCategory> for PerCategory<T> {
    fn index_mut(&mut self, c: TermCategory) -> &mut T {
        &mut self.0[c.index()]
    }
}

impl<T: Copy> PerCategory<T> {
    pub fn from_fn(f: impl Fn(TermCategory) -> T) -> Self {
        PerCategory(TermCategory::ALL.map(f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (TermCategory, T)> + '_ {
        TermCategory::ALL.into_iter().map(move |c| (c, self[c]))
    }
}

/// Per-category match counts.
pub type CategoryCounts = PerCategory<u64>;

fn valid_token(tok: &str) -> bool {
    !tok.is_empty()
        && !tok.starts_with('-')
        && !tok.ends_with('-')
        && tok.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

/// A lexicon entry: one to three lowercase tokens.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term(Vec<String>);

impl Term {
    pub fn new<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Result<Self> {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() || tokens.len() > MAX_TERM_TOKENS {
            return Err(Error::Validation(format!(
                "term must have 1 to {MAX_TERM_TOKENS} tokens, got {}",
                tokens.len()
            )));
        }
        if let Some(bad) = tokens.iter().find(|t| !valid_token(t)) {
            return Err(Error::Validation(format!("invalid term token `{bad}`")));
        }
        Ok(Term(tokens))
    }

    /// Parses a whitespace-separated phrase; the phrase is lowercased first.
    pub fn parse(phrase: &str) -> Result<Self> {
        let lower = phrase.to_lowercase();
        Term::new(lower.split_whitespace())
    }

    /// Converts a WordNet lemma (`word_word`) into a term, if representable.
    pub fn from_lemma(lemma: &str) -> Option<Self> {
        Term::new(lemma.to_lowercase().split('_').filter(|t| !t.is_empty())).ok()
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn is_single(&self) -> bool {
        self.0.len() == 1
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

/// Category to term set. A term may belong to several categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    terms: BTreeMap<TermCategory, BTreeSet<Term>>,
}

impl Lexicon {
    /// Builds a lexicon; every category must be non-empty.
    pub fn new(terms: BTreeMap<TermCategory, BTreeSet<Term>>) -> Result<Self> {
        for c in TermCategory::ALL {
            if terms.get(&c).is_none_or(BTreeSet::is_empty) {
                return Err(Error::Validation(format!("lexicon category `{c}` is empty")));
            }
        }
        Ok(Lexicon { terms })
    }

    /// The base lexicon of unjust terms shipped with the crate.
    pub fn base() -> Self {
        Lexicon::from_tsv("base_lexicon.tsv", BASE_LEXICON).expect("bundled lexicon parses")
    }

    /// Parses `category<TAB>term` lines. `#` starts a comment line; blank
    /// lines are ignored. Repeated entries within a category collapse.
    pub fn from_tsv(source_name: &str, text: &str) -> Result<Self> {
        let mut terms: BTreeMap<TermCategory, BTreeSet<Term>> = BTreeMap::new();
        let mut seen_any = false;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((cat, term)) = line.split_once('\t') else {
                return Err(Error::parse(source_name, lineno, 1, "expected `category<TAB>term`"));
            };
            let category: TermCategory = cat.parse().map_err(|m| Error::parse(source_name, lineno, 1, m))?;
            let term = Term::parse(term)
                .map_err(|e| Error::parse(source_name, lineno, cat.len() + 2, e.to_string()))?;
            terms.entry(category).or_default().insert(term);
            seen_any = true;
        }
        if !seen_any {
            return Err(Error::parse(source_name, 1, 1, "lexicon source contains no entries"));
        }
        Lexicon::new(terms).map_err(|e| Error::parse(source_name, text.lines().count().max(1), 1, e.to_string()))
    }

    /// TSV export sorted by (category, term).
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (cat, terms) in &self.terms {
            for t in terms {
                out.push_str(cat.name());
                out.push('\t');
                out.push_str(&t.to_string());
                out.push('\n');
            }
        }
        out
    }

    pub fn terms(&self, category: TermCategory) -> &BTreeSet<Term> {
        &self.terms[&category]
    }

    pub fn contains(&self, category: TermCategory, phrase: &str) -> bool {
        Term::parse(phrase).is_ok_and(|t| self.terms(category).contains(&t))
    }

    pub fn sizes(&self) -> PerCategory<usize> {
        PerCategory::from_fn(|c| self.terms(c).len())
    }

    /// True when every term of `other` is present in the same category here.
    pub fn is_superset_of(&self, other: &Lexicon) -> bool {
        TermCategory::ALL.iter().all(|c| self.terms(*c).is_superset(other.terms(*c)))
    }
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() || c == '-'
}

/// Characters after which an n-gram may not continue.
fn is_sentence_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | ';')
}

fn push_token(raw: &str, out: &mut Vec<String>) {
    let tok = raw.trim_matches('-');
    if !tok.is_empty() {
        out.push(tok.to_lowercase());
    }
}

/// Lowercased tokens: maximal runs of letters, digits and hyphens, with
/// leading/trailing hyphens trimmed.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for raw in text.split(|c: char| !is_token_char(c)) {
        push_token(raw, &mut out);
    }
    out
}

/// Tokens grouped by sentence; matching never spans a sentence terminator.
fn sentences(text: &str) -> Vec<Vec<String>> {
    text.split(is_sentence_terminator).map(tokenize).filter(|s| !s.is_empty()).collect()
}

type Spanned = (Vec<String>, Vec<(usize, usize)>);

/// Like [`sentences`], keeping the byte range of every token.
fn spanned_sentences(text: &str) -> Vec<Spanned> {
    let mut out = Vec::new();
    let mut tokens = Vec::new();
    let mut spans = Vec::new();
    let mut start = None;
    let flush_token = |start: &mut Option<usize>, end: usize, tokens: &mut Vec<String>, spans: &mut Vec<(usize, usize)>| {
        if let Some(s) = start.take() {
            let raw = &text[s..end];
            let lead = raw.len() - raw.trim_start_matches('-').len();
            let trimmed = raw.trim_matches('-');
            if !trimmed.is_empty() {
                tokens.push(trimmed.to_lowercase());
                spans.push((s + lead, s + lead + trimmed.len()));
            }
        }
    };
    for (i, c) in text.char_indices() {
        if is_token_char(c) {
            start.get_or_insert(i);
            continue;
        }
        flush_token(&mut start, i, &mut tokens, &mut spans);
        if is_sentence_terminator(c) && !tokens.is_empty() {
            out.push((std::mem::take(&mut tokens), std::mem::take(&mut spans)));
        }
    }
    flush_token(&mut start, text.len(), &mut tokens, &mut spans);
    if !tokens.is_empty() {
        out.push((tokens, spans));
    }
    out
}

/// One lexicon hit: the category and the byte range it covers in the text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermMatch {
    pub category: TermCategory,
    pub start: usize,
    pub end: usize,
}

/// Precompiled matcher for repeated counting against one lexicon.
#[derive(Debug, Clone)]
pub struct Matcher {
    sets: [HashSet<Vec<String>>; 4],
}

impl Matcher {
    pub fn new(lex: &Lexicon) -> Self {
        Matcher {
            sets: TermCategory::ALL.map(|c| lex.terms(c).iter().map(|t| t.tokens().to_vec()).collect()),
        }
    }

    /// Greedy longest-match, non-overlapping within a category. Calls
    /// `hit(first_token, len)` for each match.
    fn scan(set: &HashSet<Vec<String>>, tokens: &[String], mut hit: impl FnMut(usize, usize)) {
        let mut i = 0;
        while i < tokens.len() {
            let longest = (1..=MAX_TERM_TOKENS.min(tokens.len() - i))
                .rev()
                .find(|&len| set.contains(&tokens[i..i + len]));
            match longest {
                Some(len) => {
                    hit(i, len);
                    i += len;
                }
                None => i += 1,
            }
        }
    }

    pub fn count(&self, text: &str) -> CategoryCounts {
        let mut counts = CategoryCounts::default();
        for sentence in sentences(text) {
            for c in TermCategory::ALL {
                Self::scan(&self.sets[c.index()], &sentence, |_, _| counts[c] += 1);
            }
        }
        counts
    }

    /// Every counted occurrence with its byte range, ordered by position
    /// then category. Categories may overlap each other.
    pub fn find(&self, text: &str) -> Vec<TermMatch> {
        let mut out = Vec::new();
        for (tokens, spans) in spanned_sentences(text) {
            for c in TermCategory::ALL {
                Self::scan(&self.sets[c.index()], &tokens, |i, len| {
                    out.push(TermMatch { category: c, start: spans[i].0, end: spans[i + len - 1].1 });
                });
            }
        }
        out.sort_by_key(|m| (m.start, m.category));
        out
    }
}

/// Lexicon occurrences in `text` with byte ranges; see [`Matcher::find`].
pub fn find_matches(text: &str, lex: &Lexicon) -> Vec<TermMatch> {
    Matcher::new(lex).find(text)
}

/// Per-category occurrence counts of lexicon terms in `text`.
pub fn count_matches(text: &str, lex: &Lexicon) -> CategoryCounts {
    Matcher::new(lex).count(text)
}

/// Adds, per category, the Porter stem of every term and the first
/// [`SYNONYMS_PER_TERM`] representable synonyms of every single-token term.
/// Multi-token terms get only their token-wise stemmed variant.
pub fn expand_lexicon(lex: &Lexicon, syn: &SynonymDatabase) -> Lexicon {
    let mut terms = lex.terms.clone();
    for (cat, base) in &lex.terms {
        let out = terms.get_mut(cat).expect("same categories");
        for term in base {
            if let Ok(stemmed) = Term::new(term.tokens().iter().map(|t| stem(t))) {
                out.insert(stemmed);
            }
            if term.is_single() {
                let word = &term.tokens()[0];
                out.extend(
                    syn.synonyms(word)
                        .iter()
                        .filter_map(|s| Term::from_lemma(s))
                        .take(SYNONYMS_PER_TERM),
                );
            }
        }
    }
    Lexicon { terms }
}
