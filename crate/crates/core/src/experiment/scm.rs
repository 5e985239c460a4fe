use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::graph::Dag;
use crate::{BinaryDataset, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScmNode {
    pub name: String,
    pub parents: Vec<usize>,
    /// `cpt[k]` = P(node = 1 | parents), where bit `i` of `k` is the value of
    /// `parents[i]`.
    pub cpt: Vec<f64>,
}

/// A binary structural causal model. Nodes are kept in insertion order and
/// parents must be inserted before their children.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticScm {
    nodes: Vec<ScmNode>,
    pub seed: u64,
}

impl SyntheticScm {
    pub fn new(seed: u64) -> Self {
        SyntheticScm { nodes: Vec::new(), seed }
    }

    pub fn add_node(&mut self, name: &str, parents: &[&str], cpt: Vec<f64>) -> Result<usize> {
        if self.nodes.iter().any(|n| n.name == name) {
            return Err(Error::Validation(format!("duplicate SCM node `{name}`")));
        }
        let parents = parents
            .iter()
            .map(|p| {
                self.nodes.iter().position(|n| n.name == *p).ok_or_else(|| Error::UnknownNode(p.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        if parents.len() >= 16 || cpt.len() != 1 << parents.len() {
            return Err(Error::Validation(format!(
                "CPT for `{name}` needs {} rows, got {}",
                1usize << parents.len().min(16),
                cpt.len()
            )));
        }
        if let Some(p) = cpt.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Validation(format!("CPT entry {p} for `{name}` is not a probability")));
        }
        self.nodes.push(ScmNode { name: name.to_string(), parents, cpt });
        Ok(self.nodes.len() - 1)
    }

    pub fn nodes(&self) -> &[ScmNode] {
        &self.nodes
    }

    pub fn names(&self) -> Vec<String> {
        self.nodes.iter().map(|n| n.name.clone()).collect()
    }

    pub fn dag(&self) -> Result<Dag> {
        let names = self.names();
        let edges: Vec<(String, String)> = self
            .nodes
            .iter()
            .flat_map(|n| n.parents.iter().map(|&p| (self.nodes[p].name.clone(), n.name.clone())))
            .collect();
        Dag::from_edges(&names, &edges)
    }
}

/// Uniform draw in [0, 1) from the top 53 bits of one 64-bit output.
fn uniform(rng: &mut Xoshiro256PlusPlus) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Ancestral sampling. The generator is xoshiro256++ seeded through
/// SplitMix64 (`seed_from_u64`); each row draws one uniform per node in
/// insertion order, and a node is 1 when the draw is below its CPT entry.
pub fn sample(scm: &SyntheticScm, n: usize, seed: u64) -> Result<BinaryDataset> {
    if n == 0 {
        return Err(Error::Validation("sample size must be at least 1".into()));
    }
    if scm.nodes.is_empty() {
        return Err(Error::Validation("SCM has no nodes".into()));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut columns = vec![Vec::with_capacity(n); scm.nodes.len()];
    let mut row = vec![0u8; scm.nodes.len()];
    for _ in 0..n {
        for (v, node) in scm.nodes.iter().enumerate() {
            let k = node.parents.iter().enumerate().fold(0usize, |k, (i, &p)| k | (row[p] as usize) << i);
            row[v] = u8::from(uniform(&mut rng) < node.cpt[k]);
            columns[v].push(row[v]);
        }
    }
    BinaryDataset::from_columns(scm.names(), columns)
}

/// The eight-node validation scenario: race → {evidentials, stigmatizing},
/// gender → judgementals, age → judgementals (weak), evidentials → negatives
/// → stigmatizing, {judgementals, stigmatizing, evidentials} → is_testinj.
///
/// | node          | P(=1)                                                   |
/// |---------------|---------------------------------------------------------|
/// | race          | 0.20                                                    |
/// | gender        | 0.45                                                    |
/// | age           | 0.55                                                    |
/// | evidentials   | 0.30 + 0.20·race                                        |
/// | judgementals  | 0.20 + 0.10·gender + 0.006·age                          |
/// | negatives     | 0.15 + 0.25·evidentials                                 |
/// | stigmatizing  | 0.15 + 0.15·race + 0.15·negatives                       |
/// | is_testinj    | noisy-OR, leak 0.05; judgementals 0.5, stigmatizing 0.5, evidentials 0.4 |
pub fn paper_scenario_generator(seed: u64) -> SyntheticScm {
    let mut scm = SyntheticScm::new(seed);
    let mut add = |name: &str, parents: &[&str], cpt: Vec<f64>| {
        scm.add_node(name, parents, cpt).expect("scenario CPTs are well formed");
    };
    add("race", &[], vec![0.2]);
    add("gender", &[], vec![0.45]);
    add("age", &[], vec![0.55]);
    add("evidentials", &["race"], vec![0.30, 0.50]);
    add("judgementals", &["gender", "age"], vec![0.20, 0.30, 0.206, 0.306]);
    add("negatives", &["evidentials"], vec![0.15, 0.40]);
    add("stigmatizing", &["race", "negatives"], vec![0.15, 0.30, 0.30, 0.45]);
    let (leak, weights) = (0.05, [0.5, 0.5, 0.4]);
    let noisy_or = (0..8)
        .map(|k| {
            let off: f64 = (0..3).filter(|i| k >> i & 1 == 1).map(|i| 1.0 - weights[i]).product();
            1.0 - (1.0 - leak) * off
        })
        .collect();
    add("is_testinj", &["judgementals", "stigmatizing", "evidentials"], noisy_or);
    scm
}
