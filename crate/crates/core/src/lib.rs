//! Shallow indicative summarisation over a cohesion graph of atomic
//! predications.
//!
//! The library runs a three-stage pipeline:
//!
//! 1. **Interpretation** ([`ingest`], [`interpret`]): rule-based sentence
//!    segmentation and lemmatisation, extraction of atomic predications
//!    (one predicate, up to three arguments), and window-based pronoun
//!    resolution.
//! 2. **Transformation** ([`cohesion`], [`select`]): predications become
//!    nodes of an undirected weighted graph whose typed edges record
//!    repeated predicates and shared or synonymous argument heads; a
//!    greedy search picks a fixed-budget subset maximising a weighted
//!    blend of centrality, representativeness, coherence and surface
//!    markedness.
//! 3. **Generation** ([`synthesize`]): selected predications are grouped
//!    into topic clusters and rendered as a semi-text of clauses and
//!    fragments, never introducing content words absent from the source.
//!
//! [`baseline`] holds classic sentence-extraction methods (frequency
//! clusters, lead, cue phrases) plus anaphora-aware smoothing and proxy
//! evaluation metrics, [`factors`] resolves declared context factors into
//! engine parameters, and [`pipeline`] wires everything into one engine.
//! All stages are deterministic: reruns over the same input produce
//! byte-identical output.

pub mod baseline;
pub mod cohesion;
pub mod factors;
pub mod ingest;
pub mod interpret;
pub mod lexicon;
pub mod pipeline;
pub mod select;
pub mod synthesize;

pub use baseline::{
    cue_extract, evaluate, keyterms, lead_extract, luhn_extract, smooth, BaselineMethod,
    EvalReport, SentenceSelection,
};
pub use cohesion::{
    build_graph, build_graph_with, export_graph, CohesionGraph, Edge, EdgeType, EdgeWeights,
    GraphFormat, GraphStats, LinkPolicy, SynonymTable,
};
pub use factors::{
    parse_profile, resolve, serialize_profile, EngineParams, FactorProfile, ProfileError,
    ProjectionMode,
};
pub use ingest::{annotate_markedness, lemmatize, segment, Document, Markedness, Sentence, Token};
pub use interpret::{
    export_predications, extract_predications, ingest_predications, resolve_anaphors, Argument,
    InterchangeError, Predication,
};
pub use lexicon::Lexicon;
pub use pipeline::{Engine, PipelineError, PipelineOutput};
pub use select::{
    budget_from_ratio, exhaustive_select, greedy_select, project_to_sentences, score,
    ScoreBreakdown, ScoreWeights, SelectError, Selection,
};
pub use synthesize::{cluster, render, Fragment, SummaryFormat, SummaryOutput, TopicCluster};
