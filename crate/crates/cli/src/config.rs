//! Command-line arguments and the optional TOML config file. Every flag may
//! also be given in the file; a flag on the command line wins.
//!
//! ```toml
//! out = "results"
//! seed = 7
//!
//! [search]            # shared by discover and sweep
//! data = "results/dataset.csv"
//! algorithm = "fci"
//!
//! [discover]
//! alpha = 0.12
//! ```

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use testinj::citest::TestStatistic;
use testinj::discovery::Algorithm;
use testinj::labeling::{Granularity, OutcomeRule, ThresholdMode};

use crate::Failure;

#[derive(Debug, Parser)]
#[command(name = "testinj", version, about = "Unjust-vocabulary labeling and causal discovery over clinical notes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for anything random (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand the base lexicon with WordNet synonyms; writes lexicon.tsv.
    ExpandLexicon(LexiconArgs),
    /// Label patients from note CSVs; writes dataset.csv, thresholds.json, rates.csv, groups.csv.
    Label(LabelArgs),
    /// Run PC or FCI on a binary dataset; writes graph.dot, graph.json, report.json, trace.csv.
    Discover(DiscoverArgs),
    /// Run discovery over an α grid; writes sweep.json and prints the connectivity table.
    Sweep(SweepArgs),
    /// Sample the synthetic validation scenario; writes synth.csv.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmArg {
    Pc,
    Fci,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Pc => Algorithm::Pc,
            AlgorithmArg::Fci => Algorithm::Fci,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticArg {
    G2,
    Chi2,
}

impl From<StatisticArg> for TestStatistic {
    fn from(s: StatisticArg) -> Self {
        match s {
            StatisticArg::G2 => TestStatistic::GSquared,
            StatisticArg::Chi2 => TestStatistic::PearsonChiSquare,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdArg {
    Percentile90,
    Max,
}

impl From<ThresholdArg> for ThresholdMode {
    fn from(t: ThresholdArg) -> Self {
        match t {
            ThresholdArg::Percentile90 => ThresholdMode::Percentile90,
            ThresholdArg::Max => ThresholdMode::Maximum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GranularityArg {
    Fine,
    Coarse,
}

impl From<GranularityArg> for Granularity {
    fn from(g: GranularityArg) -> Self {
        match g {
            GranularityArg::Fine => Granularity::Fine,
            GranularityArg::Coarse => Granularity::Coarse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeArg {
    Or,
    And,
}

impl From<OutcomeArg> for OutcomeRule {
    fn from(o: OutcomeArg) -> Self {
        match o {
            OutcomeArg::Or => OutcomeRule::Or,
            OutcomeArg::And => OutcomeRule::And,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LexiconArgs {
    /// Base lexicon TSV (`category<TAB>term`); the bundled one if omitted.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// WordNet `dict/` directory.
    #[arg(long)]
    pub wordnet: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelArgs {
    /// Note CSV files (`patient_id,gender,ethnicity,age,diagnosis,note_text`).
    #[arg(long = "input", num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// File listing CSV paths, one per line, relative to the manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Lexicon TSV; the bundled base lexicon if omitted.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Ethnicity prefix table (`prefix<TAB>race`); the bundled one if omitted.
    #[arg(long)]
    pub race_map: Option<PathBuf>,
    /// Per-category threshold: 90th percentile or maximum of per-patient rates (default percentile90)
    #[arg(long, value_enum)]
    pub threshold: Option<ThresholdArg>,
    /// Fraction of the threshold a rate must exceed (default 0.10).
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Three demographic flags, or one merged is_marginalized flag (default fine)
    #[arg(long, value_enum)]
    pub granularity: Option<GranularityArg>,
    /// How category indicators combine into is_testinj.
    #[arg(long, value_enum)]
    pub outcome: Option<OutcomeArg>,
}

/// Discovery settings shared by `discover` and `sweep`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchArgs {
    /// Binary dataset CSV (header row of column names, 0/1 cells).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Discovery algorithm (default fci)
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,
    /// Independence test statistic (default g2)
    #[arg(long, value_enum)]
    pub statistic: Option<StatisticArg>,
    /// Largest conditioning set in the adjacency search (default unlimited).
    #[arg(long)]
    pub max_conditioning: Option<usize>,
    /// Largest conditioning set drawn from Possible-D-SEP (default 4).
    #[arg(long)]
    pub max_pdsep: Option<usize>,
    /// Root variables. Default: the demographic columns present.
    #[arg(long, value_delimiter = ',')]
    pub roots: Option<Vec<String>>,
    /// Leaf variables. Default: is_testinj when present.
    #[arg(long, value_delimiter = ',')]
    pub leaf: Option<Vec<String>>,
    /// Run without background knowledge.
    #[arg(long)]
    pub no_knowledge: bool,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscoverArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub search: SearchArgs,
    /// Significance level (default 0.05).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Include wall time in report.json (makes it non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub search: SearchArgs,
    /// Ascending α values; the built-in 13-point grid if omitted.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Features whose connectivity is tracked. Default: the demographic columns present.
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Duplicate every row before sweeping.
    #[arg(long)]
    pub double: bool,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthArgs {
    /// Number of rows (default 50000).
    #[arg(long)]
    pub n: Option<usize>,
    /// Merge race, gender and age into is_marginalized.
    #[arg(long)]
    pub coarse: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(rename = "expand-lexicon")]
    pub expand_lexicon: LexiconArgs,
    pub label: LabelArgs,
    pub search: SearchArgs,
    pub discover: DiscoverArgs,
    pub sweep: SweepArgs,
    pub synth: SynthArgs,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Fills every `None` field of a command-line struct from the file.
pub trait Merge {
    fn merge(self, file: Self) -> Self;
}

macro_rules! merge_options {
    ($ty:ty { $($field:ident),* } $(, flags { $($flag:ident),* })?) => {
        impl Merge for $ty {
            // `..self` carries fields the macro is not told about.
            #[allow(clippy::needless_update)]
            fn merge(self, file: Self) -> Self {
                Self {
                    $($field: self.$field.or(file.$field),)*
                    $($($flag: self.$flag || file.$flag,)*)?
                    ..self
                }
            }
        }
    };
}

merge_options!(LexiconArgs { lexicon, wordnet });
merge_options!(LabelArgs { manifest, lexicon, race_map, threshold, fraction, granularity, outcome });
merge_options!(SearchArgs { data, algorithm, statistic, max_conditioning, max_pdsep, roots, leaf }, flags { no_knowledge });
merge_options!(SynthArgs { n }, flags { coarse });

impl LabelArgs {
    pub fn merged(self, file: Self) -> Self {
        let inputs = if self.inputs.is_empty() { file.inputs.clone() } else { self.inputs.clone() };
        LabelArgs { inputs, ..Merge::merge(self, file) }
    }
}

impl Merge for DiscoverArgs {
    fn merge(self, file: Self) -> Self {
        DiscoverArgs {
            search: self.search.merge(file.search),
            alpha: self.alpha.or(file.alpha),
            timing: self.timing || file.timing,
        }
    }
}

impl Merge for SweepArgs {
    fn merge(self, file: Self) -> Self {
        SweepArgs {
            search: self.search.merge(file.search),
            grid: self.grid.or(file.grid),
            features: self.features.or(file.features),
            double: self.double || file.double,
        }
    }
}
