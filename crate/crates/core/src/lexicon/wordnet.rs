//! Reader for the WordNet 3.x plain-text database (`index.*` / `data.*`).
//!
//! Only synset membership is extracted. Pointers, frames and glosses are
//! skipped after the word list has been read.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::{Error, Result};

/// File suffixes read by [`SynonymDatabase::from_dir`], in lookup order.
pub const POS_FILES: [&str; 4] = ["noun", "verb", "adj", "adv"];

/// Lemma to ordered synonym list.
///
/// Synonyms follow the order of senses in the index files, then member order
/// within each synset. The lemma itself and repeats are dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymDatabase {
    synonyms: BTreeMap<String, Vec<String>>,
}

impl SynonymDatabase {
    pub fn synonyms(&self, lemma: &str) -> &[String] {
        self.synonyms.get(lemma).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.synonyms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synonyms.is_empty()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.synonyms.keys().map(String::as_str)
    }

    /// Builds a database from explicit synonym lists (used by callers that
    /// obtain synonyms elsewhere). Self-references and repeats are removed.
    pub fn from_lists<I, L, S>(lists: I) -> Self
    where
        I: IntoIterator<Item = (L, Vec<S>)>,
        L: Into<String>,
        S: Into<String>,
    {
        let mut db = SynonymDatabase::default();
        for (lemma, syns) in lists {
            let lemma = lemma.into();
            let entry = db.synonyms.entry(lemma.clone()).or_default();
            for s in syns {
                let s = s.into();
                if s != lemma && !entry.contains(&s) {
                    entry.push(s);
                }
            }
        }
        db
    }

    /// Reads `index.{noun,verb,adj,adv}` and the matching `data.*` files from a
    /// WordNet `dict/` directory. Absent part-of-speech files are skipped; at
    /// least one index/data pair must exist.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        if !dir.is_dir() {
            return Err(Error::Validation(format!("WordNet directory {} does not exist", dir.display())));
        }
        let mut index = Vec::new();
        let mut data = Vec::new();
        for pos in POS_FILES {
            let idx = dir.join(format!("index.{pos}"));
            let dat = dir.join(format!("data.{pos}"));
            if idx.is_file() {
                index.push((idx.display().to_string(), std::fs::read_to_string(&idx)?));
            }
            if dat.is_file() {
                data.push((dat.display().to_string(), std::fs::read_to_string(&dat)?));
            }
        }
        if index.is_empty() || data.is_empty() {
            return Err(Error::Validation(format!("no WordNet index/data files in {}", dir.display())));
        }
        let index: Vec<(&str, &str)> = index.iter().map(|(n, c)| (n.as_str(), c.as_str())).collect();
        let data: Vec<(&str, &str)> = data.iter().map(|(n, c)| (n.as_str(), c.as_str())).collect();
        parse_wordnet(&index, &data)
    }
}

/// Satellite adjectives live in `data.adj` alongside head adjectives.
fn pos_class(ss_type: &str) -> Option<char> {
    match ss_type {
        "n" => Some('n'),
        "v" => Some('v'),
        "a" | "s" => Some('a'),
        "r" => Some('r'),
        _ => None,
    }
}

/// Lines belonging to the license preamble start with two spaces.
fn lines_with_offsets(content: &str) -> impl Iterator<Item = (u64, &str)> {
    let mut offset = 0u64;
    content.split_inclusive('\n').filter_map(move |raw| {
        let start = offset;
        offset += raw.len() as u64;
        let line = raw.trim_end_matches(['\n', '\r']);
        if line.starts_with("  ") || line.trim().is_empty() {
            None
        } else {
            Some((start, line))
        }
    })
}

fn normalize_word(word: &str) -> String {
    // Adjective syntactic markers: word(a), word(p), word(ip).
    let word = match word.find('(') {
        Some(i) if word.ends_with(')') => &word[..i],
        _ => word,
    };
    word.to_lowercase()
}

fn parse_data_file(name: &str, content: &str, out: &mut HashMap<(char, u64), Vec<String>>) -> Result<()> {
    for (offset, line) in lines_with_offsets(content) {
        let err = |message: String| Error::WordNet { file: name.to_string(), offset, message };
        let mut fields = line.split(' ').filter(|f| !f.is_empty());
        let mut next = |what: &str| fields.next().ok_or_else(|| err(format!("truncated record: missing {what}")));

        let declared: u64 = next("synset offset")?
            .parse()
            .map_err(|_| err("synset offset is not a decimal integer".into()))?;
        if declared != offset {
            return Err(err(format!("declared offset {declared} does not match byte position")));
        }
        next("lex_filenum")?;
        let ss_type = next("ss_type")?;
        let class = pos_class(ss_type).ok_or_else(|| err(format!("unknown ss_type `{ss_type}`")))?;
        let w_cnt_field = next("w_cnt")?;
        let w_cnt = usize::from_str_radix(w_cnt_field, 16)
            .map_err(|_| err(format!("w_cnt `{w_cnt_field}` is not hexadecimal")))?;
        if w_cnt == 0 {
            return Err(err("synset has no words".into()));
        }
        let mut words = Vec::with_capacity(w_cnt);
        for _ in 0..w_cnt {
            words.push(normalize_word(next("word")?));
            next("lex_id")?;
        }
        let p_cnt_field = next("p_cnt")?;
        let p_cnt: usize = p_cnt_field
            .parse()
            .map_err(|_| err(format!("p_cnt `{p_cnt_field}` is not a decimal integer")))?;
        for _ in 0..p_cnt {
            for what in ["pointer symbol", "pointer offset", "pointer pos", "pointer source/target"] {
                next(what)?;
            }
        }
        out.insert((class, offset), words);
    }
    Ok(())
}

/// Builds a synonym database from WordNet index and data files given as
/// `(name, content)` pairs. Index files are read in the given order, which
/// fixes the sense order of lemmas that occur under several parts of speech.
pub fn parse_wordnet(index_files: &[(&str, &str)], data_files: &[(&str, &str)]) -> Result<SynonymDatabase> {
    let mut synsets = HashMap::new();
    for (name, content) in data_files {
        parse_data_file(name, content, &mut synsets)?;
    }

    let mut synonyms: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (name, content) in index_files {
        for (offset, line) in lines_with_offsets(content) {
            let err = |message: String| Error::WordNet { file: name.to_string(), offset, message };
            let fields: Vec<&str> = line.split(' ').filter(|f| !f.is_empty()).collect();
            let field = |i: usize, what: &str| {
                fields.get(i).copied().ok_or_else(|| err(format!("truncated record: missing {what}")))
            };
            let count = |i: usize, what: &str| -> Result<usize> {
                field(i, what)?.parse().map_err(|_| err(format!("{what} is not a decimal integer")))
            };

            let lemma = field(0, "lemma")?.to_lowercase();
            let pos = field(1, "pos")?;
            let class = pos_class(pos).ok_or_else(|| err(format!("unknown pos `{pos}`")))?;
            let synset_cnt = count(2, "synset_cnt")?;
            let p_cnt = count(3, "p_cnt")?;
            // lemma pos synset_cnt p_cnt [ptr...] sense_cnt tagsense_cnt offsets...
            let first_offset = 4 + p_cnt + 2;
            count(4 + p_cnt, "sense_cnt")?;
            count(5 + p_cnt, "tagsense_cnt")?;

            let entry = synonyms.entry(lemma.clone()).or_default();
            for i in 0..synset_cnt {
                let raw = field(first_offset + i, "synset offset")?;
                let target: u64 = raw.parse().map_err(|_| err(format!("malformed synset offset `{raw}`")))?;
                let members = synsets
                    .get(&(class, target))
                    .ok_or_else(|| err(format!("synset offset {target} not found in data file for pos `{pos}`")))?;
                for m in members {
                    if *m != lemma && !entry.contains(m) {
                        entry.push(m.clone());
                    }
                }
            }
            if fields.len() != first_offset + synset_cnt {
                return Err(err(format!(
                    "expected {} fields, found {}",
                    first_offset + synset_cnt,
                    fields.len()
                )));
            }
        }
    }
    Ok(SynonymDatabase { synonyms })
}
