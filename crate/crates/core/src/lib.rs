//! Detection of testimonially unjust vocabulary in clinical notes and
//! constraint-based causal discovery (PC and FCI) over the resulting binary
//! demographic and outcome features.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! * [`lexicon`]: unjust-term lexicon, Porter stemming, WordNet synonym
//!   expansion and n-gram matching.
//! * [`corpus`]: raw record ingestion, race/age coding, filtering and merging.
//! * [`labeling`]: per-patient term rates, thresholds and the binary dataset.
//! * [`citest`]: G² / Pearson χ² conditional independence tests.
//! * [`graph`]: mixed graphs with tail/arrow/circle marks, d-separation, DOT.
//! * [`discovery`]: PC and FCI with background knowledge.
//! * [`experiment`]: α-sweeps, data doubling and the synthetic scenario SCM.

pub mod citest;
pub mod corpus;
pub mod dataset;
pub mod discovery;
mod error;
pub mod experiment;
pub mod graph;
pub mod labeling;
pub mod lexicon;

pub use dataset::BinaryDataset;
pub use error::{Error, Result};
