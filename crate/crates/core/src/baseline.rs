//! Classical sentence-extraction baselines and summary evaluation.
//!
//! Three extractors share one selection shape: significant-word clustering
//! (Luhn), lead sentences, and cue-phrase scoring. `smooth` patches
//! anaphor-initial selections by pulling in predecessors. `evaluate`
//! reports cheap proxy metrics, not a quality judgement.

use serde::Serialize;
use thiserror::Error;

use crate::cohesion::GraphStats;
use crate::ingest::{Document, Sentence};
use crate::lexicon::Lexicon;
use crate::select::SCORE_EPS;
use crate::synthesize::SummaryOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineMethod {
    Luhn,
    Lead,
    Cue,
}

impl std::str::FromStr for BaselineMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "luhn" => Ok(BaselineMethod::Luhn),
            "lead" => Ok(BaselineMethod::Lead),
            "cue" => Ok(BaselineMethod::Cue),
            other => Err(format!("unknown baseline method '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceSelection {
    pub method: BaselineMethod,
    /// Selected sentence indices in source order.
    pub indices: Vec<usize>,
    /// Score of each selected sentence, aligned with `indices`.
    pub scores: Vec<f64>,
}

fn take_top(
    method: BaselineMethod,
    mut ranked: Vec<(usize, f64)>,
    m: usize,
    tie_keys: impl Fn(usize) -> f64,
) -> SentenceSelection {
    ranked.sort_by(|a, b| {
        let primary = if a.1 > b.1 + SCORE_EPS {
            std::cmp::Ordering::Less
        } else if b.1 > a.1 + SCORE_EPS {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        };
        primary
            .then_with(|| {
                let (ta, tb) = (tie_keys(a.0), tie_keys(b.0));
                if ta > tb + SCORE_EPS {
                    std::cmp::Ordering::Less
                } else if tb > ta + SCORE_EPS {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .then_with(|| a.0.cmp(&b.0))
    });
    let mut chosen: Vec<(usize, f64)> = ranked.into_iter().take(m).collect();
    chosen.sort_by_key(|(i, _)| *i);
    SentenceSelection {
        method,
        indices: chosen.iter().map(|(i, _)| *i).collect(),
        scores: chosen.iter().map(|(_, s)| *s).collect(),
    }
}

/// Frequency map of content lemmas across the document body.
fn content_frequencies(doc: &Document) -> std::collections::BTreeMap<String, usize> {
    let mut freq = std::collections::BTreeMap::new();
    for s in &doc.sentences {
        for t in &s.tokens {
            if t.is_content {
                *freq.entry(t.lemma.clone()).or_default() += 1;
            }
        }
    }
    freq
}

/// Top lemmas by frequency, ties alphabetical.
fn rank_lemmas(freq: &std::collections::BTreeMap<String, usize>) -> Vec<&str> {
    let mut items: Vec<(&str, usize)> = freq.iter().map(|(l, c)| (l.as_str(), *c)).collect();
    items.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    items.into_iter().map(|(l, _)| l).collect()
}

/// Highest cluster score for one sentence: significant-token groups with
/// gaps of at most `max_gap` insignificant tokens between them, scored as
/// `significant_count^2 / cluster_token_length`.
fn luhn_sentence_score(
    sentence: &Sentence,
    significant: &std::collections::BTreeSet<&str>,
    max_gap: usize,
) -> f64 {
    let positions: Vec<usize> = sentence
        .tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_content && significant.contains(t.lemma.as_str()))
        .map(|(i, _)| i)
        .collect();
    let mut best = 0.0_f64;
    let mut start = 0;
    while start < positions.len() {
        let mut end = start;
        while end + 1 < positions.len() && positions[end + 1] - positions[end] - 1 <= max_gap {
            end += 1;
        }
        let count = end - start + 1;
        let length = positions[end] - positions[start] + 1;
        best = best.max((count * count) as f64 / length as f64);
        start = end + 1;
    }
    best
}

const LUHN_MAX_GAP: usize = 4;
const LUHN_SIGNIFICANT_SHARE: f64 = 0.1;

/// Luhn extraction: the top tenth of distinct content lemmas (at least
/// one) count as significant; sentences are scored by their densest
/// significant cluster. A document with no content lemmas falls back to
/// lead extraction.
pub fn luhn_extract(doc: &Document, m: usize) -> SentenceSelection {
    let freq = content_frequencies(doc);
    if freq.is_empty() {
        return lead_extract(doc, m);
    }
    let distinct = freq.len();
    let take = ((LUHN_SIGNIFICANT_SHARE * distinct as f64).ceil() as usize).max(1);
    let significant: std::collections::BTreeSet<&str> =
        rank_lemmas(&freq).into_iter().take(take).collect();
    let ranked: Vec<(usize, f64)> = doc
        .sentences
        .iter()
        .map(|s| (s.index, luhn_sentence_score(s, &significant, LUHN_MAX_GAP)))
        .collect();
    take_top(BaselineMethod::Luhn, ranked, m, |_| 0.0)
}

/// First `min(m, n)` sentences.
pub fn lead_extract(doc: &Document, m: usize) -> SentenceSelection {
    let chosen: Vec<usize> = (0..doc.sentences.len().min(m)).collect();
    SentenceSelection {
        method: BaselineMethod::Lead,
        scores: vec![1.0; chosen.len()],
        indices: chosen,
    }
}

/// Top `m` sentences by cue score, ties by location then position.
pub fn cue_extract(doc: &Document, m: usize) -> SentenceSelection {
    let ranked: Vec<(usize, f64)> = doc
        .sentences
        .iter()
        .map(|s| (s.index, s.markedness.cue_score))
        .collect();
    let locations: Vec<f64> = doc
        .sentences
        .iter()
        .map(|s| s.markedness.location_score)
        .collect();
    take_top(BaselineMethod::Cue, ranked, m, move |i| locations[i])
}

fn anaphor_initial(sentence: &Sentence) -> bool {
    sentence
        .tokens
        .iter()
        .find(|t| t.is_content || t.is_pronoun)
        .map(|t| t.is_pronoun)
        .unwrap_or(false)
}

/// Adds the predecessor of every selected sentence that opens with a
/// pronoun, cascading until the selection is anaphora-closed; hence
/// idempotent. Added sentences carry score 0.
pub fn smooth(sel: &SentenceSelection, doc: &Document) -> SentenceSelection {
    let mut scores: std::collections::BTreeMap<usize, f64> = sel
        .indices
        .iter()
        .copied()
        .zip(sel.scores.iter().copied())
        .collect();
    let mut frontier: Vec<usize> = sel.indices.clone();
    while let Some(idx) = frontier.pop() {
        if idx == 0 {
            continue;
        }
        let sentence = &doc.sentences[idx];
        if anaphor_initial(sentence) && !scores.contains_key(&(idx - 1)) {
            scores.insert(idx - 1, 0.0);
            frontier.push(idx - 1);
        }
    }
    SentenceSelection {
        method: sel.method,
        indices: scores.keys().copied().collect(),
        scores: scores.values().copied().collect(),
    }
}

/// Top `n` content lemmas by frequency, ties alphabetical.
pub fn keyterms(doc: &Document, n: usize) -> Vec<String> {
    let freq = content_frequencies(doc);
    rank_lemmas(&freq)
        .into_iter()
        .take(n)
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    /// Fraction of the document's top-10 keyterms present in the summary.
    pub term_coverage: f64,
    /// Jaccard similarity of engine and baseline sentence sets.
    pub jaccard_vs_baseline: f64,
    /// Summary tokens over document tokens.
    pub compression_ratio: f64,
    pub component_stats: Option<GraphStats>,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("summary belongs to document '{summary}', not '{document}'")]
    DocumentMismatch { summary: String, document: String },
}

fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let sa: std::collections::BTreeSet<usize> = a.iter().copied().collect();
    let sb: std::collections::BTreeSet<usize> = b.iter().copied().collect();
    if sa.is_empty() && sb.is_empty() {
        return 1.0;
    }
    let inter = sa.intersection(&sb).count() as f64;
    let union = sa.union(&sb).count() as f64;
    inter / union
}

const COVERAGE_KEYTERMS: usize = 10;

/// Proxy metrics for one summarisation run.
pub fn evaluate(
    summary: &SummaryOutput,
    doc: &Document,
    engine_sents: &[usize],
    baseline_sents: &[usize],
    component_stats: Option<GraphStats>,
    lexicon: &Lexicon,
) -> Result<EvalReport, EvalError> {
    if summary.source_doc_id != doc.id {
        return Err(EvalError::DocumentMismatch {
            summary: summary.source_doc_id.clone(),
            document: doc.id.clone(),
        });
    }
    let terms = keyterms(doc, COVERAGE_KEYTERMS);
    let summary_lemmas: std::collections::BTreeSet<String> = summary
        .fragments
        .iter()
        .flat_map(|f| {
            f.text.split_whitespace().map(|w| {
                crate::ingest::lemmatize(w.trim_matches(|c: char| !c.is_alphanumeric()), lexicon)
            })
        })
        .collect();
    let term_coverage = if terms.is_empty() {
        1.0
    } else {
        terms.iter().filter(|t| summary_lemmas.contains(*t)).count() as f64 / terms.len() as f64
    };
    let doc_tokens = doc.token_count();
    let compression_ratio = if doc_tokens == 0 {
        0.0
    } else {
        summary.token_count() as f64 / doc_tokens as f64
    };
    Ok(EvalReport {
        term_coverage,
        jaccard_vs_baseline: jaccard(engine_sents, baseline_sents),
        compression_ratio,
        component_stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{annotate_markedness, segment};

    fn doc(text: &str) -> Document {
        let lex = Lexicon::default();
        annotate_markedness(segment(text, &lex), &lex).with_id("t")
    }

    #[test]
    fn lead_takes_first_sentences() {
        let d = doc("One came. Two went. Three stayed.");
        let sel = lead_extract(&d, 2);
        assert_eq!(sel.indices, vec![0, 1]);
    }

    #[test]
    fn lead_handles_m_beyond_length() {
        let d = doc("One came.");
        assert_eq!(lead_extract(&d, 5).indices, vec![0]);
    }

    #[test]
    fn zero_budget_selects_nothing() {
        let d = doc("One came. Two went.");
        assert!(luhn_extract(&d, 0).indices.is_empty());
        assert!(lead_extract(&d, 0).indices.is_empty());
        assert!(cue_extract(&d, 0).indices.is_empty());
    }

    #[test]
    fn all_stopword_document_falls_back_to_lead() {
        let d = doc("It is. They were.");
        let sel = luhn_extract(&d, 1);
        assert_eq!(sel.method, BaselineMethod::Lead);
        assert_eq!(sel.indices, vec![0]);
    }

    #[test]
    fn cue_ranks_bonus_sentences_first() {
        let d = doc("Rain fell on roofs. In conclusion, the budget passed. Dogs barked loudly.");
        let sel = cue_extract(&d, 1);
        assert_eq!(sel.indices, vec![1]);
        assert_eq!(sel.scores, vec![1.0]);
    }

    #[test]
    fn smooth_pulls_in_predecessor() {
        let d = doc(
            "The plan grew. The city voted late. The budget passed. The mayor sang. It failed.",
        );
        let sel = SentenceSelection {
            method: BaselineMethod::Lead,
            indices: vec![4],
            scores: vec![1.0],
        };
        let smoothed = smooth(&sel, &d);
        assert_eq!(smoothed.indices, vec![3, 4]);
        let again = smooth(&smoothed, &d);
        assert_eq!(again.indices, smoothed.indices);
    }

    #[test]
    fn smooth_cascades_through_pronoun_chains() {
        let d = doc("The budget passed. It grew. It failed.");
        let sel = SentenceSelection {
            method: BaselineMethod::Lead,
            indices: vec![2],
            scores: vec![1.0],
        };
        let smoothed = smooth(&sel, &d);
        assert_eq!(smoothed.indices, vec![0, 1, 2]);
        assert_eq!(smooth(&smoothed, &d).indices, smoothed.indices);
    }

    #[test]
    fn keyterms_rank_by_frequency_then_alphabet() {
        let d = doc("The budget grew. The budget passed. Roads waited.");
        let terms = keyterms(&d, 2);
        assert_eq!(terms[0], "budget");
        assert_eq!(terms.len(), 2);
        let all = keyterms(&d, 50);
        assert!(all.len() < 50);
    }

    #[test]
    fn jaccard_of_identical_sets_is_one() {
        assert_eq!(jaccard(&[1, 2], &[2, 1]), 1.0);
        assert_eq!(jaccard(&[], &[]), 1.0);
        assert_eq!(jaccard(&[1], &[2]), 0.0);
    }

    #[test]
    fn evaluate_rejects_mismatched_document() {
        let d = doc("The budget passed.");
        let summary = SummaryOutput {
            source_doc_id: "other".into(),
            format: crate::synthesize::SummaryFormat::Running,
            cluster_labels: vec![],
            fragments: vec![],
        };
        let lex = Lexicon::default();
        assert!(evaluate(&summary, &d, &[], &[], None, &lex).is_err());
    }
}
