//! Shallow predication extraction and the line-delimited interchange
//! format.
//!
//! A predication is an atomic `pred(arg0, arg1, arg2)` unit read off one
//! clause. Extraction is deliberately crude: clause splits happen at
//! coordinating conjunctions and at `,` `;` `:`; a verb is a content token
//! found in the verb lexicon or carrying -ed/-ing morphology; arguments are
//! the noun runs nearest the verb. Sentences without a verb contribute one
//! argument-only fragment per noun run. Imperfect parses are kept, flagged
//! incomplete, rather than dropped.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Document, Markedness, Sentence, Token};
use crate::lexicon::Lexicon;

pub const MAX_ARGS: usize = 3;
/// A pronoun may look back at most this many sentences for an antecedent.
pub const ANAPHORA_WINDOW: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Argument {
    /// Lemma of the head word; empty for an unresolved pronoun placeholder.
    pub head: String,
    pub surface: String,
    pub role: usize,
    /// Surface form of the pronoun this argument was resolved from.
    pub resolved_from: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predication {
    pub id: usize,
    pub predicate: Option<String>,
    pub args: Vec<Argument>,
    pub sentence_index: usize,
    pub complete: bool,
    pub markedness: Markedness,
}

impl Predication {
    pub fn is_unresolved(arg: &Argument) -> bool {
        arg.head.is_empty()
    }

    /// Complete iff a predicate is present, at least one argument exists
    /// and no argument is an unresolved pronoun.
    pub fn compute_complete(&self) -> bool {
        self.predicate.is_some()
            && !self.args.is_empty()
            && !self.args.iter().any(Self::is_unresolved)
    }

    /// Whitespace token count of the rendered content: one for the
    /// predicate plus the tokens of each argument surface.
    pub fn content_token_count(&self) -> usize {
        let pred = usize::from(self.predicate.is_some());
        let args: usize = self
            .args
            .iter()
            .map(|a| {
                let text = if a.surface.is_empty() {
                    &a.head
                } else {
                    &a.surface
                };
                text.split_whitespace().count()
            })
            .sum();
        pred + args
    }

    /// Compact display form used in graph exports: `pred(h0, h1)`.
    pub fn signature(&self) -> String {
        let heads = self
            .args
            .iter()
            .map(|a| {
                if a.head.is_empty() {
                    "?"
                } else {
                    a.head.as_str()
                }
            })
            .collect::<Vec<_>>()
            .join(", ");
        match &self.predicate {
            Some(p) => format!("{p}({heads})"),
            None => format!("({heads})"),
        }
    }
}

const CONJUNCTIONS: [&str; 4] = ["and", "but", "or", "nor"];

fn is_conjunction(token: &Token) -> bool {
    CONJUNCTIONS.contains(&token.lemma.as_str())
}

fn is_verb(token: &Token, lexicon: &Lexicon) -> bool {
    if !token.is_content {
        return false;
    }
    let lower = token.surface.to_lowercase();
    if lexicon.verbs.contains(&token.lemma) {
        return true;
    }
    if lexicon.is_nonverb_surface(&lower) {
        return false;
    }
    // Inflection counts only if lemmatisation actually stripped it, so
    // false endings (speed, breed) stay nominal.
    lower.chars().count() >= 5
        && (lower.ends_with("ed") || lower.ends_with("ing"))
        && token.lemma != lower
}

/// A maximal run of adjacent argument-candidate tokens. Pronouns always
/// form their own run. `head` is the lemma of the last token: the head of
/// an English noun phrase sits at its right edge.
struct NounRun {
    start: usize,
    head: String,
    surface: String,
    pronoun: Option<String>,
}

fn clause_ranges(sentence: &Sentence) -> Vec<(usize, usize)> {
    let toks = &sentence.tokens;
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 0..toks.len() {
        let mut split_after = false;
        if is_conjunction(&toks[i]) {
            if i > start {
                ranges.push((start, i));
            }
            start = i + 1;
            continue;
        }
        if i + 1 < toks.len() {
            let gap = &sentence.text
                [toks[i].span.1 - sentence.span.0..toks[i + 1].span.0 - sentence.span.0];
            if gap.contains([',', ';', ':']) {
                split_after = true;
            }
        }
        if split_after {
            ranges.push((start, i + 1));
            start = i + 1;
        }
    }
    if start < toks.len() {
        ranges.push((start, toks.len()));
    }
    ranges
}

fn noun_runs(sentence: &Sentence, range: (usize, usize), verbs: &[bool]) -> Vec<NounRun> {
    let toks = &sentence.tokens;
    let mut runs: Vec<NounRun> = Vec::new();
    let mut i = range.0;
    while i < range.1 {
        let t = &toks[i];
        if t.is_pronoun {
            runs.push(NounRun {
                start: i,
                head: String::new(),
                surface: t.surface.clone(),
                pronoun: Some(t.surface.clone()),
            });
            i += 1;
            continue;
        }
        if !t.is_content || verbs[i] {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < range.1 && toks[j + 1].is_content && !verbs[j + 1] && !toks[j + 1].is_pronoun
        {
            j += 1;
        }
        let surface = sentence.text
            [toks[i].span.0 - sentence.span.0..toks[j].span.1 - sentence.span.0]
            .to_string();
        runs.push(NounRun {
            start: i,
            head: toks[j].lemma.clone(),
            surface,
            pronoun: None,
        });
        i = j + 1;
    }
    runs
}

fn run_to_arg(run: &NounRun, role: usize) -> Argument {
    match &run.pronoun {
        Some(p) => Argument {
            head: String::new(),
            surface: p.clone(),
            role,
            resolved_from: None,
        },
        None => Argument {
            head: run.head.clone(),
            surface: run.surface.clone(),
            role,
            resolved_from: None,
        },
    }
}

/// Extracts predications from every sentence, ids in reading order.
pub fn extract_predications(doc: &Document, lexicon: &Lexicon) -> Vec<Predication> {
    let mut out = Vec::new();
    for sentence in &doc.sentences {
        let verbs: Vec<bool> = sentence
            .tokens
            .iter()
            .map(|t| is_verb(t, lexicon))
            .collect();
        for range in clause_ranges(sentence) {
            let runs = noun_runs(sentence, range, &verbs);
            let verb_positions: Vec<usize> = (range.0..range.1).filter(|&i| verbs[i]).collect();
            let mut used = vec![false; runs.len()];
            if verb_positions.is_empty() {
                for run in &runs {
                    let mut p = Predication {
                        id: out.len(),
                        predicate: None,
                        args: vec![run_to_arg(run, 0)],
                        sentence_index: sentence.index,
                        complete: false,
                        markedness: sentence.markedness,
                    };
                    p.complete = p.compute_complete();
                    out.push(p);
                }
                continue;
            }
            for &v in &verb_positions {
                let mut args = Vec::new();
                if let Some((ri, run)) = runs.iter().enumerate().rfind(|(_, r)| r.start < v)
                {
                    args.push(run_to_arg(run, 0));
                    used[ri] = true;
                }
                let objects = runs
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.start > v)
                    .take(MAX_ARGS - 1)
                    .enumerate();
                for (offset, (ri, run)) in objects {
                    args.push(run_to_arg(run, offset + 1));
                    used[ri] = true;
                }
                let mut p = Predication {
                    id: out.len(),
                    predicate: Some(sentence.tokens[v].lemma.clone()),
                    args,
                    sentence_index: sentence.index,
                    complete: false,
                    markedness: sentence.markedness,
                };
                p.complete = p.compute_complete();
                out.push(p);
            }
            for (ri, run) in runs.iter().enumerate() {
                if used[ri] {
                    continue;
                }
                let mut p = Predication {
                    id: out.len(),
                    predicate: None,
                    args: vec![run_to_arg(run, 0)],
                    sentence_index: sentence.index,
                    complete: false,
                    markedness: sentence.markedness,
                };
                p.complete = p.compute_complete();
                out.push(p);
            }
        }
    }
    out
}

/// Replaces each pronoun argument with the most recent non-pronoun argument
/// head seen in the same or the previous [`ANAPHORA_WINDOW`] sentences.
/// Pronouns without an antecedent in the window stay unresolved and keep
/// their predication incomplete.
pub fn resolve_anaphors(preds: Vec<Predication>) -> Vec<Predication> {
    // (sentence, head) pool of antecedent candidates, in reading order.
    let mut pool: Vec<(usize, String)> = Vec::new();
    let mut out = Vec::with_capacity(preds.len());
    for mut p in preds {
        let sent = p.sentence_index;
        for arg in &mut p.args {
            if Predication::is_unresolved(arg) && arg.resolved_from.is_none() {
                let found = pool
                    .iter()
                    .rev()
                    .find(|(s, _)| *s + ANAPHORA_WINDOW >= sent)
                    .map(|(_, h)| h.clone());
                if let Some(head) = found {
                    arg.resolved_from = Some(arg.surface.clone());
                    arg.surface = head.clone();
                    arg.head = head;
                }
            } else if !arg.head.is_empty() && arg.resolved_from.is_none() {
                pool.push((sent, arg.head.clone()));
            }
        }
        p.complete = p.compute_complete();
        out.push(p);
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct ArgRecord {
    head: String,
    surface: String,
    role: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct PredRecord {
    id: usize,
    pred: Option<String>,
    args: Vec<ArgRecord>,
    sent: usize,
    complete: bool,
}

#[derive(Debug, Error)]
pub enum InterchangeError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: duplicate predication id {id}")]
    DuplicateId { line: usize, id: usize },
}

/// Serialises predications as line-delimited JSON, one object per line,
/// LF terminated. Markedness and resolution traces are not part of the
/// interchange: it carries what an external clause parser could supply.
pub fn export_predications(preds: &[Predication]) -> String {
    let mut out = String::new();
    for p in preds {
        let rec = PredRecord {
            id: p.id,
            pred: p.predicate.clone(),
            args: p
                .args
                .iter()
                .map(|a| ArgRecord {
                    head: a.head.clone(),
                    surface: a.surface.clone(),
                    role: a.role,
                })
                .collect(),
            sent: p.sentence_index,
            complete: p.complete,
        };
        out.push_str(&serde_json::to_string(&rec).expect("serializable record"));
        out.push('\n');
    }
    out
}

/// Parses the interchange format produced by [`export_predications`].
pub fn ingest_predications(input: &str) -> Result<Vec<Predication>, InterchangeError> {
    let mut out: Vec<Predication> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: PredRecord =
            serde_json::from_str(raw).map_err(|e| InterchangeError::Malformed {
                line,
                reason: e.to_string(),
            })?;
        if !seen.insert(rec.id) {
            return Err(InterchangeError::DuplicateId { line, id: rec.id });
        }
        if rec.args.len() > MAX_ARGS {
            return Err(InterchangeError::Malformed {
                line,
                reason: format!("more than {MAX_ARGS} arguments"),
            });
        }
        if rec.pred.is_none() && rec.args.is_empty() {
            return Err(InterchangeError::Malformed {
                line,
                reason: "neither predicate nor arguments present".into(),
            });
        }
        for a in &rec.args {
            if a.role >= MAX_ARGS {
                return Err(InterchangeError::Malformed {
                    line,
                    reason: format!("argument role {} out of range", a.role),
                });
            }
            if a.head.is_empty() && a.surface.is_empty() {
                return Err(InterchangeError::Malformed {
                    line,
                    reason: "argument with empty head and empty surface".into(),
                });
            }
        }
        let complete_possible = rec.pred.is_some()
            && !rec.args.is_empty()
            && rec.args.iter().all(|a| !a.head.is_empty());
        if rec.complete && !complete_possible {
            return Err(InterchangeError::Malformed {
                line,
                reason: "complete flag set on a structurally incomplete predication".into(),
            });
        }
        out.push(Predication {
            id: rec.id,
            predicate: rec.pred,
            args: rec
                .args
                .into_iter()
                .map(|a| Argument {
                    head: a.head,
                    surface: a.surface,
                    role: a.role,
                    resolved_from: None,
                })
                .collect(),
            sentence_index: rec.sent,
            complete: rec.complete,
            markedness: Markedness::default(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::segment;

    fn parse(text: &str) -> Vec<Predication> {
        let lex = Lexicon::default();
        let doc = segment(text, &lex);
        resolve_anaphors(extract_predications(&doc, &lex))
    }

    #[test]
    fn simple_transitive_clause() {
        let preds = parse("The committee approved the budget.");
        assert_eq!(preds.len(), 1);
        let p = &preds[0];
        assert_eq!(p.predicate.as_deref(), Some("approve"));
        assert_eq!(p.args.len(), 2);
        assert_eq!(p.args[0].head, "committee");
        assert_eq!(p.args[1].head, "budget");
        assert!(p.complete);
    }

    #[test]
    fn verbless_sentence_yields_fragment() {
        let preds = parse("Quarterly results.");
        assert_eq!(preds.len(), 1);
        let p = &preds[0];
        assert!(p.predicate.is_none());
        assert_eq!(p.args.len(), 1);
        assert_eq!(p.args[0].head, "result");
        assert!(!p.complete);
    }

    #[test]
    fn coordination_splits_clauses() {
        let preds = parse("Prices rose and exports fell.");
        assert_eq!(preds.len(), 2);
        assert_eq!(preds[0].predicate.as_deref(), Some("rise"));
        assert_eq!(preds[0].args[0].head, "price");
        assert_eq!(preds[1].predicate.as_deref(), Some("fall"));
        assert_eq!(preds[1].args[0].head, "export");
    }

    #[test]
    fn pronoun_resolves_to_recent_head() {
        let preds = parse("The budget passed. It pleased staff.");
        let p = preds
            .iter()
            .find(|p| p.predicate.as_deref() == Some("please"))
            .unwrap();
        assert_eq!(p.args[0].head, "budget");
        assert_eq!(p.args[0].resolved_from.as_deref(), Some("It"));
        assert!(p.complete);
    }

    #[test]
    fn document_initial_pronoun_stays_unresolved() {
        let preds = parse("It failed.");
        assert_eq!(preds.len(), 1);
        let p = &preds[0];
        assert_eq!(p.predicate.as_deref(), Some("fail"));
        assert!(Predication::is_unresolved(&p.args[0]));
        assert!(!p.complete);
    }

    #[test]
    fn antecedent_outside_window_stays_unresolved() {
        let preds = parse("The budget passed. Rain came. Wind blew hard. Snow arrived. It failed.");
        let p = preds.last().unwrap();
        assert_eq!(p.predicate.as_deref(), Some("fail"));
        // budget is 4 sentences back; snow/wind heads intervene, so the
        // pronoun resolves to the latest in-window head instead.
        assert!(p.args[0].resolved_from.is_some());
        assert_ne!(p.args[0].head, "budget");
    }

    #[test]
    fn ids_strictly_increase_in_reading_order() {
        let preds = parse("Prices rose and exports fell. The committee approved the budget.");
        let mut last = None;
        for p in &preds {
            if let Some((s, id)) = last {
                assert!(p.sentence_index >= s);
                assert!(p.id > id);
            }
            last = Some((p.sentence_index, p.id));
        }
    }

    #[test]
    fn extra_clause_does_not_disturb_first_clause() {
        let a = parse("Prices rose.");
        let b = parse("Prices rose and exports fell.");
        assert_eq!(a[0].predicate, b[0].predicate);
        assert_eq!(a[0].args, b[0].args);
    }

    #[test]
    fn round_trip_preserves_interchange_fields() {
        let preds = parse("The budget passed. It pleased staff. Quarterly results.");
        let exported = export_predications(&preds);
        let back = ingest_predications(&exported).unwrap();
        assert_eq!(back.len(), preds.len());
        for (a, b) in preds.iter().zip(&back) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.predicate, b.predicate);
            assert_eq!(a.sentence_index, b.sentence_index);
            assert_eq!(a.complete, b.complete);
            assert_eq!(a.args.len(), b.args.len());
            for (x, y) in a.args.iter().zip(&b.args) {
                assert_eq!((&x.head, &x.surface, x.role), (&y.head, &y.surface, y.role));
            }
        }
        // Re-export is byte identical.
        assert_eq!(export_predications(&back), exported);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = ingest_predications("{\"id\":0,\"pred\":\"run\",\"args\":[],\"complete\":false}")
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
        assert!(msg.contains("sent"), "{msg}");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let line = "{\"id\":7,\"pred\":\"run\",\"args\":[{\"head\":\"dog\",\"surface\":\"dog\",\"role\":0}],\"sent\":0,\"complete\":true}";
        let input = format!("{line}\n{line}\n");
        let err = ingest_predications(&input).unwrap_err();
        assert!(matches!(
            err,
            InterchangeError::DuplicateId { id: 7, line: 2 }
        ));
    }
}
