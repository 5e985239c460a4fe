use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use testinj::corpus::{self, RaceCoding};
use testinj::discovery::{self, DiscoveryConfig};
use testinj::experiment::{self, DEFAULT_GRID};
use testinj::graph::{emit_dot, BackgroundKnowledge};
use testinj::labeling::{self, LabelConfig, ThresholdPolicy, ThresholdMode, COARSE_COLUMN, OUTCOME_COLUMN};
use testinj::lexicon::{expand_lexicon as expand, Lexicon, SynonymDatabase, TermCategory};
use testinj::BinaryDataset;

use crate::config::{DiscoverArgs, LabelArgs, LexiconArgs, SearchArgs, SweepArgs, SynthArgs};
use crate::Failure;

/// Demographic columns recognised by default, in reporting order.
const DEMOGRAPHIC_COLUMNS: [&str; 7] = [
    "race",
    "gender",
    "age",
    labeling::RACE_COLUMN,
    labeling::GENDER_COLUMN,
    labeling::AGE_COLUMN,
    COARSE_COLUMN,
];

pub struct Context {
    pub out: PathBuf,
    pub seed: u64,
}

impl Context {
    fn create(&self, name: &str) -> Result<BufWriter<File>, Failure> {
        fs::create_dir_all(&self.out)
            .map_err(|e| Failure::Usage(format!("cannot create output directory {}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        let f = File::create(&path).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
        Ok(BufWriter::new(f))
    }

    fn write(&self, name: &str, contents: &[u8]) -> Result<(), Failure> {
        let mut w = self.create(name)?;
        w.write_all(contents).and_then(|_| w.flush()).map_err(|e| Failure::Internal(e.to_string()))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn finish(w: BufWriter<File>) -> Result<(), Failure> {
        w.into_inner().map(drop).map_err(|e| Failure::Internal(e.to_string()))
    }
}

fn existing(path: &Path, what: &str) -> Result<(), Failure> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{what} {} does not exist", path.display())))
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_lexicon(path: Option<&Path>) -> Result<Lexicon, Failure> {
    match path {
        None => Ok(Lexicon::base()),
        Some(p) => {
            existing(p, "lexicon")?;
            Ok(Lexicon::from_tsv(&p.display().to_string(), &read_text(p)?)?)
        }
    }
}

fn usage(e: testinj::Error) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn expand_lexicon(ctx: &Context, args: LexiconArgs) -> Result<(), Failure> {
    let dir = args.wordnet.ok_or_else(|| Failure::Usage("--wordnet <DIR> is required".into()))?;
    if !dir.is_dir() {
        return Err(Failure::Usage(format!("WordNet directory {} does not exist", dir.display())));
    }
    let base = load_lexicon(args.lexicon.as_deref())?;
    let syn = SynonymDatabase::from_dir(&dir)?;
    let expanded = expand(&base, &syn);
    if !expanded.is_superset_of(&base) {
        return Err(Failure::Internal("expanded lexicon lost base terms".into()));
    }
    ctx.write("lexicon.tsv", expanded.to_tsv().as_bytes())?;
    for (cat, n) in expanded.sizes().iter() {
        println!("{:<13} {:>4} terms ({} base)", cat.name(), n, base.sizes()[cat]);
    }
    Ok(())
}

pub fn label(ctx: &Context, args: LabelArgs) -> Result<(), Failure> {
    let mut paths = args.inputs.clone();
    if let Some(m) = &args.manifest {
        existing(m, "manifest")?;
        paths.extend(corpus::manifest_paths(m)?);
    }
    if paths.is_empty() {
        return Err(Failure::Usage("no input CSV given (use --input or --manifest)".into()));
    }
    for p in &paths {
        existing(p, "input")?;
    }
    let lex = load_lexicon(args.lexicon.as_deref())?;
    let coding = match &args.race_map {
        Some(p) => {
            existing(p, "race map")?;
            RaceCoding::from_tsv(&p.display().to_string(), &read_text(p)?)?
        }
        None => RaceCoding::default(),
    };
    let mode = args.threshold.map_or(ThresholdMode::Percentile90, Into::into);
    let policy = ThresholdPolicy::new(mode, args.fraction.unwrap_or(ThresholdPolicy::default().fraction))
        .map_err(usage)?;
    let config = LabelConfig {
        policy,
        granularity: args.granularity.map(Into::into).unwrap_or_default(),
        outcome: args.outcome.map(Into::into).unwrap_or_default(),
    };

    let records = corpus::read_all(&paths)?;
    if records.is_empty() {
        return Err(Failure::Input("input contains no records".into()));
    }
    let n_records = records.len();
    let kept = corpus::filter_records(records, &coding);
    let patients = corpus::merge_patients(&kept, &coding)?;
    let result = labeling::label(&patients, &lex, &config)?;

    let mut w = ctx.create("dataset.csv")?;
    result.dataset.write_csv(&mut w)?;
    Context::finish(w)?;
    ctx.write_json("thresholds.json", &result.thresholds_json())?;
    let mut w = ctx.create("rates.csv")?;
    result.write_rates_csv(&patients, &mut w)?;
    Context::finish(w)?;

    let mut groups = String::from("race,gender,age_group,patients\n");
    for ((race, gender, age), n) in corpus::group_counts(&patients) {
        groups.push_str(&format!("{race},{gender},{age},{n}\n"));
    }
    ctx.write("groups.csv", groups.as_bytes())?;

    println!("records    {n_records}");
    println!("kept       {}", kept.len());
    println!("patients   {}", patients.len());
    let outcome = result.dataset.column_by_name(OUTCOME_COLUMN)?;
    println!("is_testinj {}", outcome.iter().filter(|&&v| v == 1).count());
    for cat in TermCategory::ALL {
        println!("threshold  {:<13} {}", cat.name(), result.thresholds[cat]);
    }
    Ok(())
}

fn load_dataset(search: &SearchArgs) -> Result<BinaryDataset, Failure> {
    let path = search.data.as_ref().ok_or_else(|| Failure::Usage("--data <CSV> is required".into()))?;
    existing(path, "dataset")?;
    let f = File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    BinaryDataset::read_csv(f).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn present(data: &BinaryDataset, candidates: &[&str]) -> Vec<String> {
    candidates.iter().filter(|c| data.column_index(c).is_ok()).map(|c| c.to_string()).collect()
}

fn knowledge(search: &SearchArgs, data: &BinaryDataset) -> Result<BackgroundKnowledge, Failure> {
    if search.no_knowledge {
        return Ok(BackgroundKnowledge::default());
    }
    let roots = search.roots.clone().unwrap_or_else(|| present(data, &DEMOGRAPHIC_COLUMNS));
    let leaf = search.leaf.clone().unwrap_or_else(|| present(data, &[OUTCOME_COLUMN]));
    if let Some(bad) = roots.iter().chain(&leaf).find(|n| data.column_index(n).is_err()) {
        return Err(Failure::Usage(format!("background-knowledge variable `{bad}` is not a dataset column")));
    }
    BackgroundKnowledge::new(roots, leaf).map_err(usage)
}

fn discovery_config(search: &SearchArgs, alpha: f64, timing: bool) -> Result<DiscoveryConfig, Failure> {
    let defaults = DiscoveryConfig::default();
    let algorithm = search.algorithm.map_or(defaults.algorithm, Into::into);
    let mut cfg = DiscoveryConfig::new(algorithm, alpha).map_err(usage)?;
    cfg.statistic = search.statistic.map_or(defaults.statistic, Into::into);
    cfg.max_conditioning_size = search.max_conditioning.or(defaults.max_conditioning_size);
    cfg.max_pdsep_size = search.max_pdsep.or(defaults.max_pdsep_size);
    cfg.report_timing = timing;
    Ok(cfg)
}

pub fn discover(ctx: &Context, args: DiscoverArgs) -> Result<(), Failure> {
    let cfg = discovery_config(&args.search, args.alpha.unwrap_or(DiscoveryConfig::default().alpha), args.timing)?;
    let data = load_dataset(&args.search)?;
    let bk = knowledge(&args.search, &data)?;
    let result = discovery::run(&data, &cfg, &bk)?;

    ctx.write("graph.dot", emit_dot(&result.graph).as_bytes())?;
    ctx.write_json("graph.json", &result.graph.to_json())?;
    ctx.write_json("report.json", &result.report)?;
    let mut w = ctx.create("trace.csv")?;
    discovery::write_trace_csv(&result.trace, &mut w)?;
    Context::finish(w)?;

    println!(
        "{} nodes, {} edges, {} tests, {} conflicts",
        result.graph.n(),
        result.graph.edge_count(),
        result.report.tests_performed,
        result.report.conflicts.len()
    );
    Ok(())
}

pub fn sweep(ctx: &Context, args: SweepArgs) -> Result<(), Failure> {
    let grid = args.grid.clone().unwrap_or_else(|| DEFAULT_GRID.to_vec());
    experiment::check_grid(&grid).map_err(usage)?;
    let cfg = discovery_config(&args.search, grid[0], false)?;
    let mut data = load_dataset(&args.search)?;
    if args.double {
        data = experiment::double_data(&data);
    }
    let bk = knowledge(&args.search, &data)?;
    let features = args.features.clone().unwrap_or_else(|| present(&data, &DEMOGRAPHIC_COLUMNS));
    if features.is_empty() {
        return Err(Failure::Usage("no demographic feature columns found (use --features)".into()));
    }
    if let Some(bad) = features.iter().find(|f| data.column_index(f).is_err()) {
        return Err(Failure::Usage(format!("feature `{bad}` is not a dataset column")));
    }
    let features: Vec<&str> = features.iter().map(String::as_str).collect();
    let result = experiment::alpha_sweep(&data, &grid, &cfg, &bk, &features)?;
    ctx.write_json("sweep.json", &result)?;
    print!("{}", result.table());
    Ok(())
}

pub fn synth(ctx: &Context, args: SynthArgs) -> Result<(), Failure> {
    let n = args.n.unwrap_or(50_000);
    if n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let scm = experiment::paper_scenario_generator(ctx.seed);
    let mut data = experiment::sample(&scm, n, ctx.seed)?;
    if args.coarse {
        data = experiment::coarsen(&data, &experiment::SCENARIO_DEMOGRAPHICS)?;
    }
    let mut w = ctx.create("synth.csv")?;
    data.write_csv(&mut w)?;
    Context::finish(w)?;
    println!("{} rows x {} columns, seed {}", data.n_rows(), data.n_columns(), ctx.seed);
    Ok(())
}
