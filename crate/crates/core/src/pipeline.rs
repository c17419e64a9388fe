//! End-to-end driver: raw text (or pre-extracted predications) in,
//! rendered summary plus diagnostics out.
//!
//! The engine owns the lexicon and resolved parameters. Budgets for every
//! projection level derive from one compression ratio: `k` predications
//! out of the graph, `m` sentences out of the source, `n` key terms out
//! of the content vocabulary, each as `max(1, round(ratio * size))`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::baseline;
use crate::cohesion::{
    build_graph_with, CohesionGraph, GraphError, GraphStats, LinkPolicy, SynonymTable,
};
use crate::factors::{resolve, EngineParams, FactorProfile, ProfileError, ProjectionMode};
use crate::ingest::{annotate_markedness, segment, Document};
use crate::interpret::{extract_predications, resolve_anaphors, Predication};
use crate::lexicon::Lexicon;
use crate::select::{
    budget_from_ratio, greedy_select, project_to_sentences, SelectError, Selection,
};
use crate::synthesize::{cluster, render, SummaryOutput};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("no predications could be extracted from the input")]
    NoPredications,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// One summarisation run with everything downstream tools need: the
/// rendered summary, the raw selection, and the alternative projections.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub doc_id: String,
    pub summary: SummaryOutput,
    pub selection: Selection,
    pub graph_stats: GraphStats,
    pub projection: ProjectionMode,
    /// Source sentence indices ranked by selected-predication mass.
    pub sentences: Vec<usize>,
    /// Top content lemmas; empty when the run started from predications.
    pub keyterms: Vec<String>,
    pub node_count: usize,
    pub budget_k: usize,
}

pub struct Engine {
    lexicon: Lexicon,
    params: EngineParams,
    link_policy: LinkPolicy,
    synonyms: Option<SynonymTable>,
    explicit_k: Option<usize>,
}

impl Engine {
    pub fn new(lexicon: Lexicon, params: EngineParams) -> Result<Engine, PipelineError> {
        params.validate()?;
        params.edge_weights.validate()?;
        params.score_weights.validate()?;
        Ok(Engine {
            lexicon,
            params,
            link_policy: LinkPolicy::default(),
            synonyms: None,
            explicit_k: None,
        })
    }

    pub fn from_profile(
        lexicon: Lexicon,
        profile: &FactorProfile,
    ) -> Result<Engine, PipelineError> {
        Engine::new(lexicon, resolve(profile)?)
    }

    pub fn with_link_policy(mut self, policy: LinkPolicy) -> Engine {
        self.link_policy = policy;
        self
    }

    pub fn with_synonyms(mut self, table: SynonymTable) -> Engine {
        self.synonyms = Some(table);
        self
    }

    /// Fixes the predication budget instead of deriving it from the ratio.
    pub fn with_budget(mut self, k: usize) -> Engine {
        self.explicit_k = Some(k);
        self
    }

    pub fn params(&self) -> &EngineParams {
        &self.params
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    /// Full run: segmentation, extraction, anaphora, graph, selection,
    /// rendering.
    pub fn summarize_text(&self, id: &str, text: &str) -> Result<PipelineOutput, PipelineError> {
        let doc = annotate_markedness(segment(text, &self.lexicon).with_id(id), &self.lexicon);
        self.summarize_document(&doc)
    }

    /// Same as `summarize_text` for a document segmented elsewhere.
    pub fn summarize_document(&self, doc: &Document) -> Result<PipelineOutput, PipelineError> {
        let preds = resolve_anaphors(extract_predications(doc, &self.lexicon));
        self.run(&doc.id, preds, Some(doc))
    }

    /// Resumes from interchange predications, skipping interpretation.
    /// Key-term projection needs the source text, so it stays empty here.
    pub fn summarize_predications(
        &self,
        id: &str,
        preds: Vec<Predication>,
    ) -> Result<PipelineOutput, PipelineError> {
        self.run(id, preds, None)
    }

    fn run(
        &self,
        id: &str,
        preds: Vec<Predication>,
        doc: Option<&Document>,
    ) -> Result<PipelineOutput, PipelineError> {
        if preds.is_empty() {
            return Err(PipelineError::NoPredications);
        }
        let graph = build_graph_with(
            &preds,
            &self.params.edge_weights,
            self.synonyms.as_ref(),
            self.link_policy,
        )?;
        let ratio = self.params.compression_ratio;
        let k = self
            .explicit_k
            .unwrap_or_else(|| budget_from_ratio(ratio, graph.node_count()));
        let selection = greedy_select(&graph, k, &self.params.score_weights)?;
        let clusters = cluster(&selection, &graph);
        let summary = render(&clusters, &graph, self.params.output_format, id);

        let distinct_sents: BTreeSet<usize> =
            graph.nodes().iter().map(|p| p.sentence_index).collect();
        let m = budget_from_ratio(ratio, distinct_sents.len());
        let sentences = project_to_sentences(&selection, &graph, m);

        let keyterms = match doc {
            Some(d) => {
                let vocab: BTreeSet<&str> = d
                    .sentences
                    .iter()
                    .flat_map(|s| s.tokens.iter())
                    .filter(|t| t.is_content)
                    .map(|t| t.lemma.as_str())
                    .collect();
                baseline::keyterms(d, budget_from_ratio(ratio, vocab.len()))
            }
            None => Vec::new(),
        };

        Ok(PipelineOutput {
            doc_id: id.to_string(),
            summary,
            selection,
            graph_stats: graph.stats(),
            projection: self.params.projection_mode,
            sentences,
            keyterms,
            node_count: graph.node_count(),
            budget_k: k,
        })
    }

    /// Exposes the graph built for a document, for inspection commands.
    pub fn graph_for_text(
        &self,
        id: &str,
        text: &str,
    ) -> Result<(Document, CohesionGraph), PipelineError> {
        let doc = annotate_markedness(segment(text, &self.lexicon).with_id(id), &self.lexicon);
        let preds = resolve_anaphors(extract_predications(&doc, &self.lexicon));
        if preds.is_empty() {
            return Err(PipelineError::NoPredications);
        }
        let graph = build_graph_with(
            &preds,
            &self.params.edge_weights,
            self.synonyms.as_ref(),
            self.link_policy,
        )?;
        Ok((doc, graph))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpret::{export_predications, ingest_predications};

    const TEXT: &str = "The committee approved the budget in March. \
The mayor praised the budget. Local firms opposed the tax. \
The council scheduled a vote. Reporters covered the debate. \
The budget funded new roads.";

    fn engine() -> Engine {
        Engine::new(Lexicon::default(), EngineParams::default()).unwrap()
    }

    #[test]
    fn end_to_end_run_produces_summary_and_budgets() {
        let out = engine().summarize_text("d1", TEXT).unwrap();
        assert!(out.node_count > 0);
        assert_eq!(out.budget_k, budget_from_ratio(0.10, out.node_count).max(1));
        assert_eq!(
            out.selection.node_ids.len(),
            out.budget_k.min(out.node_count)
        );
        let text = out.summary.to_text();
        assert!(text.ends_with('\n'));
        assert!(!text.trim().is_empty());
        assert!(!out.sentences.is_empty());
        assert!(!out.keyterms.is_empty());
    }

    #[test]
    fn empty_input_reports_no_predications() {
        let err = engine().summarize_text("d1", "").unwrap_err();
        assert!(matches!(err, PipelineError::NoPredications));
    }

    #[test]
    fn interchange_route_matches_text_route() {
        let eng = engine();
        let direct = eng.summarize_text("d1", TEXT).unwrap();

        let doc = annotate_markedness(segment(TEXT, eng.lexicon()).with_id("d1"), eng.lexicon());
        let preds = resolve_anaphors(extract_predications(&doc, eng.lexicon()));
        let wire = export_predications(&preds);
        let back = ingest_predications(&wire).unwrap();
        let resumed = eng.summarize_predications("d1", back).unwrap();

        assert_eq!(direct.selection.node_ids, resumed.selection.node_ids);
        assert_eq!(direct.summary.to_text(), resumed.summary.to_text());
        assert_eq!(direct.sentences, resumed.sentences);
    }

    #[test]
    fn explicit_budget_overrides_ratio() {
        let out = engine().with_budget(3).summarize_text("d1", TEXT).unwrap();
        assert_eq!(out.budget_k, 3);
        assert_eq!(out.selection.node_ids.len(), 3);
    }

    #[test]
    fn repeated_runs_are_identical() {
        let a = engine().summarize_text("d1", TEXT).unwrap();
        let b = engine().summarize_text("d1", TEXT).unwrap();
        assert_eq!(a.summary.to_text(), b.summary.to_text());
        assert_eq!(a.selection.node_ids, b.selection.node_ids);
        assert_eq!(a.sentences, b.sentences);
        assert_eq!(a.keyterms, b.keyterms);
    }

    #[test]
    fn keyterm_budget_tracks_vocabulary_size() {
        let out = engine().summarize_text("d1", TEXT).unwrap();
        let vocab: BTreeSet<String> = segment(TEXT, engine().lexicon())
            .sentences
            .iter()
            .flat_map(|s| s.tokens.iter())
            .filter(|t| t.is_content)
            .map(|t| t.lemma.clone())
            .collect();
        assert_eq!(out.keyterms.len(), budget_from_ratio(0.10, vocab.len()));
    }
}
