//! Brute-force oracles shared by the integration and acceptance tests.
//! Nothing here calls into the library's graph algorithms: separation is
//! decided by enumerating simple paths.
#![allow(dead_code)]

use std::collections::HashMap;

use testinj::graph::{Dag, EndpointMark, MixedGraph};

pub const NONE: u8 = 0;
pub const TAIL: u8 = 1;
pub const ARROW: u8 = 2;

/// `m[a][b]`: mark at `b` on edge `a`–`b` (NONE if nonadjacent).
pub type Marks = Vec<Vec<u8>>;

pub fn node_names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

fn has_directed_cycle(n: usize, directed: &[(usize, usize)]) -> bool {
    let anc = ancestor_matrix(n, directed);
    (0..n).any(|v| anc[v][v])
}

/// `anc[a][b]`: a nonempty directed path a → … → b exists.
fn ancestor_matrix(n: usize, directed: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut anc = vec![vec![false; n]; n];
    for &(a, b) in directed {
        anc[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if anc[i][k] && anc[k][j] {
                    anc[i][j] = true;
                }
            }
        }
    }
    anc
}

/// Every DAG on `n` labelled nodes as a list of directed edges.
pub fn all_dags(n: usize) -> Vec<Vec<(usize, usize)>> {
    let ps = pairs(n);
    let mut out = Vec::new();
    for code in 0..3usize.pow(ps.len() as u32) {
        let mut c = code;
        let mut edges = Vec::new();
        for &(a, b) in &ps {
            match c % 3 {
                1 => edges.push((a, b)),
                2 => edges.push((b, a)),
                _ => {}
            }
            c /= 3;
        }
        if !has_directed_cycle(n, &edges) {
            out.push(edges);
        }
    }
    out
}

pub fn dag_marks(n: usize, edges: &[(usize, usize)]) -> Marks {
    let mut m = vec![vec![NONE; n]; n];
    for &(a, b) in edges {
        m[a][b] = ARROW;
        m[b][a] = TAIL;
    }
    m
}

pub fn to_dag(n: usize, edges: &[(usize, usize)]) -> Dag {
    let names = node_names(n);
    let named: Vec<(String, String)> = edges.iter().map(|&(a, b)| (names[a].clone(), names[b].clone())).collect();
    Dag::from_edges(&names, &named).unwrap()
}

/// Whether some simple path between x and y is open given z: every
/// collider is an ancestor of z (or in z) and no non-collider is in z.
pub fn m_connected(m: &Marks, x: usize, y: usize, z: &[usize]) -> bool {
    let n = m.len();
    let directed: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| m[a][b] == ARROW && m[b][a] == TAIL)
        .collect();
    let anc = ancestor_matrix(n, &directed);
    let in_z = |v: usize| z.contains(&v);
    let an_z = |v: usize| in_z(v) || z.iter().any(|&w| anc[v][w]);

    fn dfs(
        m: &Marks,
        path: &mut Vec<usize>,
        y: usize,
        in_z: &dyn Fn(usize) -> bool,
        an_z: &dyn Fn(usize) -> bool,
    ) -> bool {
        let v = *path.last().unwrap();
        for w in 0..m.len() {
            if m[v][w] == NONE || path.contains(&w) {
                continue;
            }
            if path.len() >= 2 {
                let u = path[path.len() - 2];
                let collider = m[u][v] == ARROW && m[w][v] == ARROW;
                let open = if collider { an_z(v) } else { !in_z(v) };
                if !open {
                    continue;
                }
            }
            if w == y {
                return true;
            }
            path.push(w);
            if dfs(m, path, y, in_z, an_z) {
                return true;
            }
            path.pop();
        }
        false
    }
    dfs(m, &mut vec![x], y, &in_z, &an_z)
}

/// Independence model over nodes `0..observed`: for each pair x < y and
/// each subset Z of the other observed nodes (by bitmask), separation.
pub fn separation_model(m: &Marks, observed: usize) -> Vec<bool> {
    let mut out = Vec::new();
    for (x, y) in pairs(observed) {
        let others: Vec<usize> = (0..observed).filter(|&v| v != x && v != y).collect();
        for mask in 0..1usize << others.len() {
            let z: Vec<usize> = others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
            out.push(!m_connected(m, x, y, &z));
        }
    }
    out
}

/// Markov equivalence classes of all DAGs on `n` nodes, keyed by skeleton
/// and unshielded colliders.
pub struct CpdagOracle {
    n: usize,
    classes: HashMap<(Vec<bool>, Vec<(usize, usize, usize)>), Vec<Vec<(usize, usize)>>>,
}

impl CpdagOracle {
    fn key(n: usize, edges: &[(usize, usize)]) -> (Vec<bool>, Vec<(usize, usize, usize)>) {
        let mut adj = vec![vec![false; n]; n];
        let mut parent = vec![vec![false; n]; n];
        for &(a, b) in edges {
            adj[a][b] = true;
            adj[b][a] = true;
            parent[b][a] = true;
        }
        let skel = pairs(n).into_iter().map(|(a, b)| adj[a][b]).collect();
        let mut vs = Vec::new();
        for c in 0..n {
            for (a, b) in pairs(n) {
                if parent[c][a] && parent[c][b] && !adj[a][b] {
                    vs.push((a, c, b));
                }
            }
        }
        (skel, vs)
    }

    pub fn new(n: usize) -> Self {
        let mut classes: HashMap<_, Vec<_>> = HashMap::new();
        for d in all_dags(n) {
            classes.entry(Self::key(n, &d)).or_default().push(d);
        }
        CpdagOracle { n, classes }
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// The CPDAG: an edge is directed iff every member of the class agrees.
    pub fn cpdag(&self, edges: &[(usize, usize)]) -> MixedGraph {
        let n = self.n;
        let class = &self.classes[&Self::key(n, edges)];
        let mut g = MixedGraph::new(node_names(n)).unwrap();
        for (a, b) in pairs(n) {
            let fwd = class.iter().filter(|d| d.contains(&(a, b))).count();
            let bwd = class.iter().filter(|d| d.contains(&(b, a))).count();
            if fwd + bwd == 0 {
                continue;
            }
            if bwd == 0 {
                g.add_directed(a, b);
            } else if fwd == 0 {
                g.add_directed(b, a);
            } else {
                g.add_edge(a, b, EndpointMark::Tail, EndpointMark::Tail);
            }
        }
        g
    }
}

/// Maximal ancestral graphs (no selection variables) on `n` nodes grouped
/// by independence model.
pub struct PagOracle {
    n: usize,
    classes: HashMap<Vec<bool>, Vec<Marks>>,
}

impl PagOracle {
    pub fn new(n: usize) -> Self {
        let ps = pairs(n);
        let mut classes: HashMap<Vec<bool>, Vec<Marks>> = HashMap::new();
        for code in 0..4usize.pow(ps.len() as u32) {
            let mut c = code;
            let mut m = vec![vec![NONE; n]; n];
            let mut directed = Vec::new();
            let mut bidirected = Vec::new();
            for &(a, b) in &ps {
                match c % 4 {
                    1 => {
                        m[a][b] = ARROW;
                        m[b][a] = TAIL;
                        directed.push((a, b));
                    }
                    2 => {
                        m[b][a] = ARROW;
                        m[a][b] = TAIL;
                        directed.push((b, a));
                    }
                    3 => {
                        m[a][b] = ARROW;
                        m[b][a] = ARROW;
                        bidirected.push((a, b));
                    }
                    _ => {}
                }
                c /= 4;
            }
            let anc = ancestor_matrix(n, &directed);
            if (0..n).any(|v| anc[v][v]) || bidirected.iter().any(|&(a, b)| anc[a][b] || anc[b][a]) {
                continue;
            }
            let model = separation_model(&m, n);
            // Maximality: every nonadjacent pair is separated by some set.
            let per_pair = 1usize << (n - 2);
            let maximal = ps
                .iter()
                .enumerate()
                .all(|(i, &(a, b))| m[a][b] != NONE || model[i * per_pair..(i + 1) * per_pair].iter().any(|&s| s));
            if maximal {
                classes.entry(model).or_default().push(m);
            }
        }
        PagOracle { n, classes }
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// The PAG of the DAG `edges` on `n + 1` nodes whose last node is
    /// latent: marks shared by every MAG with the same model, circles
    /// elsewhere.
    pub fn pag_with_latent(&self, edges: &[(usize, usize)]) -> MixedGraph {
        self.pag_of_dag(self.n + 1, edges)
    }

    /// The PAG over nodes `0..n` of a DAG on `total ≥ n` nodes.
    pub fn pag_of_dag(&self, total: usize, edges: &[(usize, usize)]) -> MixedGraph {
        let n = self.n;
        let model = separation_model(&dag_marks(total, edges), n);
        let class = self.classes.get(&model).expect("every marginal DAG model is a MAG model");
        let mut g = MixedGraph::new(node_names(n)).unwrap();
        for (a, b) in pairs(n) {
            let first = &class[0];
            assert!(class.iter().all(|m| (m[a][b] == NONE) == (first[a][b] == NONE)), "equivalent MAGs share adjacencies");
            if first[a][b] == NONE {
                continue;
            }
            let mark = |x: usize, y: usize| {
                let v = first[x][y];
                if class.iter().all(|m| m[x][y] == v) {
                    if v == ARROW {
                        EndpointMark::Arrow
                    } else {
                        EndpointMark::Tail
                    }
                } else {
                    EndpointMark::Circle
                }
            };
            g.add_edge(a, b, mark(b, a), mark(a, b));
        }
        g
    }
}

/// DAG on `n_obs + 1` nodes, the last named `L` (latent).
pub fn latent_dag(n_obs: usize, edges: &[(usize, usize)]) -> Dag {
    let mut names = node_names(n_obs);
    names.push("L".into());
    let named: Vec<(String, String)> = edges.iter().map(|&(a, b)| (names[a].clone(), names[b].clone())).collect();
    Dag::from_edges(&names, &named).unwrap()
}

use testinj::corpus::{AgeGroup, Gender, Patient, PatientKey, Race};
use testinj::labeling::{Granularity, LabelConfig, OutcomeRule, ThresholdMode};
use testinj::lexicon::{Lexicon, TermCategory};

/// Sentences of lowercase tokens, scanned character by character.
pub fn oracle_sentences(text: &str) -> Vec<Vec<String>> {
    let mut sentences = vec![Vec::new()];
    let mut cur = String::new();
    let flush = |cur: &mut String, s: &mut Vec<Vec<String>>| {
        let t = cur.trim_matches('-').to_lowercase();
        if !t.is_empty() {
            s.last_mut().unwrap().push(t);
        }
        cur.clear();
    };
    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '-' {
            cur.push(ch);
        } else {
            flush(&mut cur, &mut sentences);
            if ".!?;".contains(ch) {
                sentences.push(Vec::new());
            }
        }
    }
    flush(&mut cur, &mut sentences);
    sentences
}

/// Counts per category by scanning each sentence left to right and taking
/// the longest term (up to three tokens) starting at each unmatched position.
pub fn oracle_counts(text: &str, lex: &Lexicon) -> [u64; 4] {
    let mut out = [0u64; 4];
    for (ci, cat) in TermCategory::ALL.into_iter().enumerate() {
        let terms: Vec<Vec<String>> = lex.terms(cat).iter().map(|t| t.tokens().to_vec()).collect();
        for sentence in oracle_sentences(text) {
            let mut i = 0;
            while i < sentence.len() {
                let mut best = 0;
                for t in &terms {
                    if t.len() > best && sentence.len() - i >= t.len() && sentence[i..i + t.len()] == t[..] {
                        best = t.len();
                    }
                }
                if best > 0 {
                    out[ci] += 1;
                    i += best;
                } else {
                    i += 1;
                }
            }
        }
    }
    out
}

/// Smallest observed value v with at least 90% of the values ≤ v.
fn oracle_p90(values: &[f64]) -> f64 {
    let n = values.len();
    let mut cands: Vec<f64> = values.to_vec();
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &v in &cands {
        let at_most = values.iter().filter(|&&x| x <= v).count();
        if at_most * 10 >= 9 * n {
            return v;
        }
    }
    unreachable!()
}

/// The labeled dataset (column names and rows) recomputed from scratch.
pub fn oracle_dataset(patients: &[Patient], lex: &Lexicon, config: &LabelConfig) -> (Vec<String>, Vec<Vec<u8>>) {
    let rates: Vec<[f64; 4]> = patients
        .iter()
        .map(|p| {
            let mut sum = [0u64; 4];
            for note in &p.notes {
                let c = oracle_counts(note, lex);
                for k in 0..4 {
                    sum[k] += c[k];
                }
            }
            sum.map(|s| s as f64 / p.notes.len() as f64)
        })
        .collect();
    let limit: Vec<f64> = (0..4)
        .map(|k| {
            let col: Vec<f64> = rates.iter().map(|r| r[k]).collect();
            let base = match config.policy.mode {
                ThresholdMode::Maximum => col.iter().cloned().fold(0.0, f64::max),
                ThresholdMode::Percentile90 => oracle_p90(&col),
            };
            base * config.policy.fraction
        })
        .collect();
    let mut names: Vec<String> = match config.granularity {
        Granularity::Fine => vec!["is_marginalized_gender".into(), "is_marginalized_race".into(), "is_marginalized_age".into()],
        Granularity::Coarse => vec!["is_marginalized".into()],
    };
    names.extend(["evidentials", "judgementals", "negatives", "stigmatizing", "is_testinj"].map(String::from));
    let rows = patients
        .iter()
        .zip(&rates)
        .map(|(p, r)| {
            let female = p.key.gender == Gender::Female;
            let minority = p.key.race == Race::Black || p.key.race == Race::Latino;
            let age = p.age_group != AgeGroup::Adult;
            let mut row: Vec<u8> = match config.granularity {
                Granularity::Fine => vec![female as u8, minority as u8, age as u8],
                Granularity::Coarse => vec![(female || minority || age) as u8],
            };
            let ind: Vec<bool> = (0..4).map(|k| r[k] > limit[k]).collect();
            row.extend(ind.iter().map(|&b| b as u8));
            let out = match config.outcome {
                OutcomeRule::Or => ind.iter().any(|&b| b),
                OutcomeRule::And => ind.iter().all(|&b| b),
            };
            row.push(out as u8);
            row
        })
        .collect();
    (names, rows)
}

pub const NOTE_WORDS: &[&str] = &[
    "patient", "claims", "denies", "pain", "tells", "me", "drug", "seeking", "non-compliant", "Combative",
    "insists", "states", "refused", "the", "was", "Agitated", "reports", "apparently", "noncompliant", "abuse",
];

pub const NOTE_SEPARATORS: &[&str] = &[" ", " ", " ", ", ", ". ", "; ", "\n", "! ", " -- "];

/// A random note assembled from fixed vocabulary and separators.
pub fn random_note(next: &mut impl FnMut() -> u64, max_words: u64) -> String {
    let len = next() % (max_words + 1);
    let mut s = String::new();
    for _ in 0..len {
        s.push_str(NOTE_WORDS[(next() % NOTE_WORDS.len() as u64) as usize]);
        s.push_str(NOTE_SEPARATORS[(next() % NOTE_SEPARATORS.len() as u64) as usize]);
    }
    s
}

/// Up to `max_patients` patients with random demographics and 1–3 notes.
pub fn random_population(next: &mut impl FnMut() -> u64, max_patients: u64) -> Vec<Patient> {
    let n = 1 + next() % max_patients;
    (0..n)
        .map(|i| {
            let race = [Race::Asian, Race::Black, Race::Latino, Race::White][(next() % 4) as usize];
            let gender = if next().is_multiple_of(2) { Gender::Female } else { Gender::Male };
            let age_group = [AgeGroup::Child, AgeGroup::Adult, AgeGroup::Senior][(next() % 3) as usize];
            let notes = (0..1 + next() % 3).map(|_| random_note(next, 12)).collect();
            Patient {
                key: PatientKey { patient_id: format!("p{i}"), gender, race, diagnosis: "dx".into() },
                age_group,
                notes,
            }
        })
        .collect()
}
