//! α-sweeps, data doubling, coarse relabeling and the synthetic scenario
//! used to validate the discovery pipeline.

mod scm;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discovery::{self, DiscoveryConfig};
use crate::graph::{connected_nonisolated, BackgroundKnowledge, GraphJson};
use crate::labeling::{COARSE_COLUMN, OUTCOME_COLUMN};
use crate::{BinaryDataset, Error, Result};

pub use scm::{paper_scenario_generator, sample, ScmNode, SyntheticScm};

pub const DEFAULT_GRID: [f64; 13] = [0.001, 0.005, 0.01, 0.02, 0.05, 0.08, 0.12, 0.2, 0.3, 0.4, 0.5, 0.57, 0.6];

/// Demographic columns of the synthetic scenario.
pub const SCENARIO_DEMOGRAPHICS: [&str; 3] = ["race", "gender", "age"];

/// Every row duplicated once: the original block followed by a copy.
pub fn double_data(data: &BinaryDataset) -> BinaryDataset {
    data.doubled()
}

/// Replaces the named demographic columns by one `is_marginalized` column
/// holding their OR, placed where the first of them was.
pub fn coarsen(data: &BinaryDataset, demographics: &[&str]) -> Result<BinaryDataset> {
    let idx = demographics.iter().map(|d| data.column_index(d)).collect::<Result<Vec<_>>>()?;
    let first = *idx.iter().min().ok_or_else(|| Error::Validation("no demographic columns given".into()))?;
    let merged: Vec<u8> =
        (0..data.n_rows()).map(|r| idx.iter().fold(0, |acc, &c| acc | data.column(c)[r])).collect();
    let mut names = Vec::new();
    let mut columns = Vec::new();
    for (c, name) in data.names().iter().enumerate() {
        if c == first {
            names.push(COARSE_COLUMN.to_string());
            columns.push(merged.clone());
        } else if !idx.contains(&c) {
            names.push(name.clone());
            columns.push(data.column(c).to_vec());
        }
    }
    BinaryDataset::from_columns(names, columns)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub edge_count: usize,
    pub graph: GraphJson,
    /// Feature has at least one incident edge.
    pub connected: BTreeMap<String, bool>,
    /// Feature reaches the outcome along edges, ignoring marks.
    pub path_to_outcome: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSweepResult {
    pub grid: Vec<f64>,
    pub features: Vec<String>,
    pub outcome: Option<String>,
    pub points: Vec<SweepPoint>,
    /// First grid α at which each feature is connected; `None` if never.
    pub minimal_alpha: BTreeMap<String, Option<f64>>,
    pub minimal_alpha_path: BTreeMap<String, Option<f64>>,
}

impl AlphaSweepResult {
    /// Minimal connecting α with "never" mapped to +∞, for ordering.
    pub fn minimal(&self, feature: &str) -> f64 {
        self.minimal_alpha.get(feature).copied().flatten().unwrap_or(f64::INFINITY)
    }

    /// Fixed-width connectivity table: one row per α, one column per feature
    /// (`x` connected, `p` also has a path to the outcome).
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>8}  {:>5}", "alpha", "edges");
        for f in &self.features {
            let _ = write!(out, "  {f:>12}");
        }
        out.push('\n');
        for p in &self.points {
            let _ = write!(out, "{:>8}  {:>5}", p.alpha, p.edge_count);
            for f in &self.features {
                let cell = match (p.connected[f], p.path_to_outcome[f]) {
                    (true, true) => "x p",
                    (true, false) => "x",
                    _ => ".",
                };
                let _ = write!(out, "  {cell:>12}");
            }
            out.push('\n');
        }
        let _ = write!(out, "{:>8}  {:>5}", "min", "");
        for f in &self.features {
            let cell = self.minimal_alpha[f].map_or("never".to_string(), |a| a.to_string());
            let _ = write!(out, "  {cell:>12}");
        }
        out.push('\n');
        out
    }
}

pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Validation("α grid is empty".into()));
    }
    if grid.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
        return Err(Error::Validation("α grid values must lie in (0, 1)".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("α grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Runs discovery at each grid α (concurrently) and records which features
/// are connected. The outcome is `is_testinj` when present.
pub fn alpha_sweep(
    data: &BinaryDataset,
    grid: &[f64],
    config: &DiscoveryConfig,
    bk: &BackgroundKnowledge,
    features: &[&str],
) -> Result<AlphaSweepResult> {
    check_grid(grid)?;
    for f in features {
        data.column_index(f)?;
    }
    let outcome = data.column_index(OUTCOME_COLUMN).ok().map(|_| OUTCOME_COLUMN.to_string());
    let points = grid
        .par_iter()
        .map(|&alpha| {
            let cfg = DiscoveryConfig { alpha, ..*config };
            let g = discovery::run(data, &cfg, bk)?.graph;
            let mut connected = BTreeMap::new();
            let mut path = BTreeMap::new();
            for &f in features {
                connected.insert(f.to_string(), connected_nonisolated(&g, f)?);
                let reaches = match &outcome {
                    Some(o) => g.connected(g.index(f)?, g.index(o)?),
                    None => false,
                };
                path.insert(f.to_string(), reaches);
            }
            Ok(SweepPoint { alpha, edge_count: g.edge_count(), graph: g.to_json(), connected, path_to_outcome: path })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = |pick: fn(&SweepPoint) -> &BTreeMap<String, bool>| -> BTreeMap<String, Option<f64>> {
        features
            .iter()
            .map(|&f| (f.to_string(), points.iter().find(|p| pick(p)[f]).map(|p| p.alpha)))
            .collect()
    };
    let minimal_alpha = first(|p| &p.connected);
    let minimal_alpha_path = first(|p| &p.path_to_outcome);
    Ok(AlphaSweepResult {
        grid: grid.to_vec(),
        features: features.iter().map(|f| f.to_string()).collect(),
        outcome,
        points,
        minimal_alpha,
        minimal_alpha_path,
    })
}

/// Background knowledge used for the scenario: demographics are roots and
/// `is_testinj` is the leaf. Columns absent from `data` are skipped.
pub fn scenario_knowledge(data: &BinaryDataset) -> BackgroundKnowledge {
    let has = |c: &str| data.column_index(c).is_ok();
    let roots: Vec<&str> =
        SCENARIO_DEMOGRAPHICS.iter().copied().chain([COARSE_COLUMN]).filter(|c| has(c)).collect();
    let leaf: Vec<&str> = [OUTCOME_COLUMN].into_iter().filter(|c| has(c)).collect();
    BackgroundKnowledge::new(roots, leaf).expect("roots and leaf are disjoint")
}
