//! Constraint-based structure learning: PC (CPDAG output) and FCI (PAG
//! output), driven either by a statistical test on a [`BinaryDataset`] or by
//! a d-separation oracle.
//!
//! Variables are processed in lexicographic name order throughout, and the
//! adjacency search removes edges only at the end of each conditioning-size
//! level, so a run is a pure function of its inputs.

mod fci;
mod orient;
mod skeleton;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::citest::{check_alpha, CiTester, TestStatistic};
use crate::graph::{BackgroundKnowledge, Dag, MixedGraph};
use crate::{BinaryDataset, Error, Result};

pub use orient::{meek_rules, orient_v_structures};
pub use skeleton::skeleton;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Pc,
    #[default]
    Fci,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pc" => Ok(Algorithm::Pc),
            "fci" => Ok(Algorithm::Fci),
            other => Err(Error::Validation(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryConfig {
    pub alpha: f64,
    pub algorithm: Algorithm,
    /// Largest conditioning set in the adjacency search; `None` is unlimited.
    pub max_conditioning_size: Option<usize>,
    /// Largest conditioning set drawn from Possible-D-SEP (FCI only).
    pub max_pdsep_size: Option<usize>,
    pub statistic: TestStatistic,
    /// Record wall time in the run report. Off by default so reports are
    /// byte-reproducible.
    #[serde(default)]
    pub report_timing: bool,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        DiscoveryConfig {
            alpha: 0.05,
            algorithm: Algorithm::Fci,
            max_conditioning_size: None,
            max_pdsep_size: Some(4),
            statistic: TestStatistic::GSquared,
            report_timing: false,
        }
    }
}

impl DiscoveryConfig {
    pub fn new(algorithm: Algorithm, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(DiscoveryConfig { alpha, algorithm, ..DiscoveryConfig::default() })
    }
}

/// Result of one independence query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub independent: bool,
    pub statistic: Option<f64>,
    pub dof: Option<u32>,
    pub p_value: Option<f64>,
}

impl TestOutcome {
    pub fn oracle(independent: bool) -> Self {
        TestOutcome { independent, statistic: None, dof: None, p_value: None }
    }
}

/// Answers `x ⫫ y | z` over a fixed variable list.
pub trait IndependenceSource {
    fn variables(&self) -> &[String];
    fn test(&self, x: usize, y: usize, z: &[usize]) -> Result<TestOutcome>;
}

/// Statistical tests on a binary dataset.
pub struct DataSource {
    names: Vec<String>,
    tester: CiTester,
}

impl DataSource {
    pub fn new(data: &BinaryDataset, alpha: f64, statistic: TestStatistic) -> Result<Self> {
        Ok(DataSource { names: data.names().to_vec(), tester: CiTester::new(data, alpha, statistic)? })
    }
}

impl IndependenceSource for DataSource {
    fn variables(&self) -> &[String] {
        &self.names
    }

    fn test(&self, x: usize, y: usize, z: &[usize]) -> Result<TestOutcome> {
        let r = self.tester.test(x, y, z);
        Ok(TestOutcome {
            independent: r.independent,
            statistic: Some(r.statistic),
            dof: Some(r.dof),
            p_value: Some(r.p_value),
        })
    }
}

/// d-separation in a DAG, restricted to its observed nodes.
pub struct DSepOracle {
    dag: Dag,
    observed: Vec<usize>,
    names: Vec<String>,
}

impl DSepOracle {
    pub fn new(dag: Dag) -> Self {
        let observed: Vec<usize> = (0..dag.n()).collect();
        let names = dag.graph().names().to_vec();
        DSepOracle { dag, observed, names }
    }

    /// Marginalizes the named nodes out.
    pub fn with_latent(dag: Dag, latent: &[&str]) -> Result<Self> {
        for l in latent {
            dag.graph().index(l)?;
        }
        let observed: Vec<usize> =
            (0..dag.n()).filter(|&i| !latent.contains(&dag.graph().name(i))).collect();
        let names = observed.iter().map(|&i| dag.graph().name(i).to_string()).collect();
        Ok(DSepOracle { dag, observed, names })
    }
}

impl IndependenceSource for DSepOracle {
    fn variables(&self) -> &[String] {
        &self.names
    }

    fn test(&self, x: usize, y: usize, z: &[usize]) -> Result<TestOutcome> {
        let z: Vec<usize> = z.iter().map(|&i| self.observed[i]).collect();
        Ok(TestOutcome::oracle(self.dag.d_separated_idx(self.observed[x], self.observed[y], &z)))
    }
}

/// Separating sets of removed edges, keyed by the unordered pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SepsetStore {
    sets: BTreeMap<(usize, usize), Vec<usize>>,
}

impl SepsetStore {
    fn key(a: usize, b: usize) -> (usize, usize) {
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn insert(&mut self, a: usize, b: usize, z: Vec<usize>) {
        self.sets.insert(Self::key(a, b), z);
    }

    pub fn get(&self, a: usize, b: usize) -> Option<&[usize]> {
        self.sets.get(&Self::key(a, b)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &[usize])> {
        self.sets.iter().map(|(&(a, b), z)| (a, b, z.as_slice()))
    }
}

/// One performed independence test, by variable name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub x: String,
    pub y: String,
    pub z: Vec<String>,
    #[serde(flatten)]
    pub outcome: TestOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SepsetRecord {
    pub x: String,
    pub y: String,
    pub sepset: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: DiscoveryConfig,
    pub background_knowledge: BackgroundKnowledge,
    pub variables: Vec<String>,
    pub stage_edge_counts: Vec<(String, usize)>,
    pub tests_performed: usize,
    pub sepsets: Vec<SepsetRecord>,
    pub rule_firings: BTreeMap<String, usize>,
    pub conflicts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Discovery {
    /// Output graph; nodes in lexicographic order.
    pub graph: MixedGraph,
    pub sepsets: SepsetStore,
    pub trace: Vec<TraceEntry>,
    pub report: RunReport,
}

/// Wraps a source so internal index `i` is the `i`-th variable by name, and
/// records every query.
pub(crate) struct Ctx<'a> {
    src: &'a dyn IndependenceSource,
    to_source: Vec<usize>,
    pub names: Vec<String>,
    pub trace: Vec<TraceEntry>,
}

impl<'a> Ctx<'a> {
    fn new(src: &'a dyn IndependenceSource) -> Result<Self> {
        let vars = src.variables();
        let mut to_source: Vec<usize> = (0..vars.len()).collect();
        to_source.sort_by(|&a, &b| vars[a].cmp(&vars[b]));
        let names: Vec<String> = to_source.iter().map(|&i| vars[i].clone()).collect();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("duplicate variable names".into()));
        }
        if names.len() < 2 {
            return Err(Error::Validation("discovery needs at least two variables".into()));
        }
        Ok(Ctx { src, to_source, names, trace: Vec::new() })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn independent(&mut self, x: usize, y: usize, z: &[usize]) -> Result<bool> {
        let zs: Vec<usize> = z.iter().map(|&i| self.to_source[i]).collect();
        let outcome = self.src.test(self.to_source[x], self.to_source[y], &zs)?;
        self.trace.push(TraceEntry {
            x: self.names[x].clone(),
            y: self.names[y].clone(),
            z: z.iter().map(|&i| self.names[i].clone()).collect(),
            outcome,
        });
        Ok(outcome.independent)
    }
}

/// k-subsets of `items` in lexicographic order of positions.
pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

fn finish(
    ctx: Ctx<'_>,
    graph: MixedGraph,
    sepsets: SepsetStore,
    config: &DiscoveryConfig,
    bk: &BackgroundKnowledge,
    stages: Vec<(String, usize)>,
    ori: orient::Orienter,
    started: Option<Instant>,
) -> Discovery {
    let names = &ctx.names;
    let sep_records = sepsets
        .iter()
        .map(|(a, b, z)| SepsetRecord {
            x: names[a].clone(),
            y: names[b].clone(),
            sepset: z.iter().map(|&i| names[i].clone()).collect(),
        })
        .collect();
    let report = RunReport {
        config: *config,
        background_knowledge: bk.clone(),
        variables: names.clone(),
        stage_edge_counts: stages,
        tests_performed: ctx.trace.len(),
        sepsets: sep_records,
        rule_firings: ori.firings.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        conflicts: ori.conflicts,
        wall_time_ms: started.map(|t| t.elapsed().as_millis() as u64),
    };
    Discovery { graph, sepsets, trace: ctx.trace, report }
}

/// PC: adjacency search, background-knowledge pre-orientation, v-structures,
/// Meek rules to fixpoint, background-knowledge post-pass. Marks are tails and
/// arrows only; an undirected edge is tail–tail.
pub fn pc(src: &dyn IndependenceSource, config: &DiscoveryConfig, bk: &BackgroundKnowledge) -> Result<Discovery> {
    check_alpha(config.alpha)?;
    // The clock is only read on request: some targets (wasm32) have none.
    let started = config.report_timing.then(Instant::now);
    let mut ctx = Ctx::new(src)?;
    let resolved = bk.resolve(&ctx.names)?;
    let (mut g, sepsets) = skeleton::search(&mut ctx, config.max_conditioning_size)?;
    let mut stages = vec![("skeleton".to_string(), g.edge_count())];
    g.reset_marks(crate::graph::EndpointMark::Tail);

    let mut ori = orient::Orienter::new(resolved.clone(), orient::Mode::Pc);
    let pre = resolved.orient(&mut g)?;
    ori.count("background_pre", pre);
    orient::v_structures(&mut g, &sepsets, &mut ori);
    orient::meek(&mut g, &mut ori);
    let post = resolved.orient(&mut g)?;
    ori.count("background_post", post);
    stages.push(("final".to_string(), g.edge_count()));
    Ok(finish(ctx, g, sepsets, config, bk, stages, ori, started))
}

/// FCI: adjacency search, Possible-D-SEP pruning, v-structures on the
/// pruned skeleton, then rules R1–R4 and R8–R10 to fixpoint, with the same
/// background-knowledge passes as [`pc`].
pub fn fci(src: &dyn IndependenceSource, config: &DiscoveryConfig, bk: &BackgroundKnowledge) -> Result<Discovery> {
    check_alpha(config.alpha)?;
    let started = config.report_timing.then(Instant::now);
    let mut ctx = Ctx::new(src)?;
    let resolved = bk.resolve(&ctx.names)?;
    let (mut g, mut sepsets) = skeleton::search(&mut ctx, config.max_conditioning_size)?;
    let mut stages = vec![("skeleton".to_string(), g.edge_count())];

    fci::possible_dsep_prune(&mut ctx, &mut g, &mut sepsets, config.max_pdsep_size)?;
    stages.push(("possible_dsep".to_string(), g.edge_count()));

    g.reset_marks(crate::graph::EndpointMark::Circle);
    let mut ori = orient::Orienter::new(resolved.clone(), orient::Mode::Fci);
    let pre = resolved.orient(&mut g)?;
    ori.count("background_pre", pre);
    orient::v_structures(&mut g, &sepsets, &mut ori);
    fci::apply_rules(&mut g, &sepsets, &mut ori);
    let post = resolved.orient(&mut g)?;
    ori.count("background_post", post);
    stages.push(("final".to_string(), g.edge_count()));
    Ok(finish(ctx, g, sepsets, config, bk, stages, ori, started))
}

/// Runs the configured algorithm with G² (or χ²) tests on `data`.
pub fn run(data: &BinaryDataset, config: &DiscoveryConfig, bk: &BackgroundKnowledge) -> Result<Discovery> {
    for name in bk.roots.iter().chain(&bk.leaf) {
        data.column_index(name)?;
    }
    let src = DataSource::new(data, config.alpha, config.statistic)?;
    match config.algorithm {
        Algorithm::Pc => pc(&src, config, bk),
        Algorithm::Fci => fci(&src, config, bk),
    }
}

/// Writes the test trace as CSV: `x,y,Z,statistic,dof,p,independent`, with
/// `Z` joined by `;`.
pub fn write_trace_csv<W: std::io::Write>(trace: &[TraceEntry], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["x", "y", "Z", "statistic", "dof", "p", "independent"])?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for t in trace {
        wtr.write_record([
            t.x.clone(),
            t.y.clone(),
            t.z.join(";"),
            opt(t.outcome.statistic.map(|s| s.to_string())),
            opt(t.outcome.dof.map(|d| d.to_string())),
            opt(t.outcome.p_value.map(|p| p.to_string())),
            t.outcome.independent.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
