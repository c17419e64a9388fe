//! Topic clustering of selected predications and semi-text rendering.
//!
//! Clusters are the transitive closure of the shared-argument-head
//! relation over the selected nodes. Rendering is template based: a
//! complete predication becomes `Arg0 pred Arg1 [Arg2].`; fragments are
//! bare head phrases, with adjacent fragments joined by `"; "`. The output
//! adds only punctuation and headers, never new content words.

use serde::{Deserialize, Serialize};

use crate::cohesion::{CohesionGraph, UnionFind};
use crate::interpret::Predication;
use crate::select::Selection;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicCluster {
    /// Most frequent argument head among members; ties alphabetical.
    pub label: String,
    /// Member node ids ordered by (sentence index, id).
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SummaryFormat {
    Running,
    Headed,
}

impl std::str::FromStr for SummaryFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "running" => Ok(SummaryFormat::Running),
            "headed" => Ok(SummaryFormat::Headed),
            other => Err(format!("unknown summary format '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fragment {
    pub text: String,
    pub complete: bool,
    /// Index into the cluster list this fragment renders.
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryOutput {
    pub source_doc_id: String,
    pub format: SummaryFormat,
    pub cluster_labels: Vec<String>,
    pub fragments: Vec<Fragment>,
}

/// Groups the selected predications by shared argument heads.
/// Clusters are ordered by their earliest member sentence.
pub fn cluster(sel: &Selection, g: &CohesionGraph) -> Vec<TopicCluster> {
    let members: Vec<&Predication> = sel.node_ids.iter().filter_map(|&id| g.node(id)).collect();
    let mut uf = UnionFind::new(members.len());
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let share = members[i]
                .args
                .iter()
                .any(|a| !a.head.is_empty() && members[j].args.iter().any(|b| b.head == a.head));
            if share {
                uf.union(i, j);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<&Predication>> =
        std::collections::BTreeMap::new();
    for (i, m) in members.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(m);
    }
    let mut clusters: Vec<TopicCluster> = groups
        .into_values()
        .map(|mut ms| {
            ms.sort_by_key(|p| (p.sentence_index, p.id));
            let mut counts: std::collections::BTreeMap<&str, usize> =
                std::collections::BTreeMap::new();
            for p in &ms {
                for a in &p.args {
                    if !a.head.is_empty() {
                        *counts.entry(a.head.as_str()).or_default() += 1;
                    }
                }
            }
            let label = counts
                .iter()
                .max_by(|(la, ca), (lb, cb)| ca.cmp(cb).then_with(|| lb.cmp(la)))
                .map(|(l, _)| l.to_string())
                .or_else(|| ms[0].predicate.clone())
                .unwrap_or_default();
            TopicCluster {
                label,
                members: ms.iter().map(|p| p.id).collect(),
            }
        })
        .collect();
    clusters.sort_by_key(|c| {
        let first = c.members[0];
        let p = g.node(first).expect("member exists");
        (p.sentence_index, p.id)
    });
    clusters
}

fn capitalise(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

fn arg_text(p: &Predication, role_zero: bool) -> Vec<&str> {
    p.args
        .iter()
        .filter(|a| (a.role == 0) == role_zero)
        .map(|a| {
            if a.surface.is_empty() {
                a.head.as_str()
            } else {
                a.surface.as_str()
            }
        })
        .filter(|t| !t.is_empty())
        .collect()
}

fn render_complete(p: &Predication) -> String {
    let mut parts: Vec<&str> = arg_text(p, true);
    if let Some(pred) = &p.predicate {
        parts.push(pred);
    }
    parts.extend(arg_text(p, false));
    let mut text = capitalise(&parts.join(" "));
    text.push('.');
    text
}

/// Bare phrase for an incomplete predication: available argument heads in
/// role order with the predicate lemma after the subject slot.
fn render_fragment(p: &Predication) -> String {
    let mut parts: Vec<&str> = Vec::new();
    for a in &p.args {
        if a.role == 0 && !a.head.is_empty() {
            parts.push(a.head.as_str());
        }
    }
    if let Some(pred) = &p.predicate {
        parts.push(pred);
    }
    for a in &p.args {
        if a.role != 0 && !a.head.is_empty() {
            parts.push(a.head.as_str());
        }
    }
    parts.join(" ")
}

/// Renders clusters into ordered fragments. Consecutive incomplete members
/// of a cluster merge into one `"; "`-joined fragment.
pub fn render(
    clusters: &[TopicCluster],
    g: &CohesionGraph,
    format: SummaryFormat,
    doc_id: &str,
) -> SummaryOutput {
    let mut fragments = Vec::new();
    for (ci, c) in clusters.iter().enumerate() {
        let mut pending: Vec<String> = Vec::new();
        for &id in &c.members {
            let p = g.node(id).expect("member exists");
            if p.complete {
                if !pending.is_empty() {
                    fragments.push(Fragment {
                        text: pending.join("; "),
                        complete: false,
                        cluster: ci,
                    });
                    pending.clear();
                }
                fragments.push(Fragment {
                    text: render_complete(p),
                    complete: true,
                    cluster: ci,
                });
            } else {
                let text = render_fragment(p);
                if !text.is_empty() {
                    pending.push(text);
                }
            }
        }
        if !pending.is_empty() {
            fragments.push(Fragment {
                text: pending.join("; "),
                complete: false,
                cluster: ci,
            });
        }
    }
    SummaryOutput {
        source_doc_id: doc_id.to_string(),
        format,
        cluster_labels: clusters.iter().map(|c| c.label.clone()).collect(),
        fragments,
    }
}

impl SummaryOutput {
    /// Final text. Running format is a single paragraph; headed format
    /// puts a `== label ==` line before each cluster's fragments.
    pub fn to_text(&self) -> String {
        match self.format {
            SummaryFormat::Running => {
                let mut s = self
                    .fragments
                    .iter()
                    .map(|f| f.text.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                s.push('\n');
                s
            }
            SummaryFormat::Headed => {
                let mut s = String::new();
                for (ci, label) in self.cluster_labels.iter().enumerate() {
                    s.push_str(&format!("== {label} ==\n"));
                    for f in self.fragments.iter().filter(|f| f.cluster == ci) {
                        s.push_str(&f.text);
                        s.push('\n');
                    }
                }
                s
            }
        }
    }

    /// Whitespace tokens across fragments; headers are not counted.
    pub fn token_count(&self) -> usize {
        self.fragments
            .iter()
            .map(|f| f.text.split_whitespace().count())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohesion::{build_graph, EdgeWeights};
    use crate::ingest::segment;
    use crate::interpret::{extract_predications, resolve_anaphors};
    use crate::lexicon::Lexicon;
    use crate::select::{greedy_select, ScoreWeights};

    fn summarise(text: &str, k: usize, format: SummaryFormat) -> (SummaryOutput, usize) {
        let lex = Lexicon::default();
        let doc = segment(text, &lex);
        let preds = resolve_anaphors(extract_predications(&doc, &lex));
        let g = build_graph(&preds, &EdgeWeights::default(), None).unwrap();
        let sel = greedy_select(&g, k, &ScoreWeights::default()).unwrap();
        let clusters = cluster(&sel, &g);
        let content: usize = sel
            .node_ids
            .iter()
            .map(|&id| g.node(id).unwrap().content_token_count())
            .sum();
        (render(&clusters, &g, format, "t"), content)
    }

    #[test]
    fn complete_predication_renders_as_clause() {
        let (out, _) = summarise(
            "The committee approved the budget.",
            1,
            SummaryFormat::Running,
        );
        assert_eq!(out.to_text(), "Committee approve budget.\n");
    }

    #[test]
    fn fragment_renders_bare_heads() {
        let (out, _) = summarise("Quarterly results.", 1, SummaryFormat::Running);
        assert_eq!(out.to_text(), "result\n");
    }

    #[test]
    fn adjacent_fragments_join_with_semicolons() {
        let (out, _) = summarise(
            "Quarterly results. Annual results.",
            2,
            SummaryFormat::Running,
        );
        assert_eq!(out.to_text(), "result; result\n");
    }

    #[test]
    fn headed_format_emits_cluster_headers() {
        let (out, _) = summarise(
            "The committee approved the budget. The budget covered roads.",
            2,
            SummaryFormat::Headed,
        );
        let text = out.to_text();
        assert!(text.starts_with("== budget ==\n"), "{text}");
        assert!(text.contains("Committee approve budget."));
    }

    #[test]
    fn rendering_adds_no_content_tokens() {
        let (out, content) = summarise(
            "The committee approved the annual budget. The budget covered gravel roads. Prices rose and exports fell.",
            3,
            SummaryFormat::Running,
        );
        assert!(out.token_count() <= content);
    }

    #[test]
    fn clusters_group_by_shared_head() {
        let lex = Lexicon::default();
        let doc = segment(
            "The committee approved the budget. The budget covered roads. Cats slept.",
            &lex,
        );
        let preds = resolve_anaphors(extract_predications(&doc, &lex));
        let g = build_graph(&preds, &EdgeWeights::default(), None).unwrap();
        let all: Vec<usize> = g.nodes().iter().map(|n| n.id).collect();
        let sel = greedy_select(&g, all.len(), &ScoreWeights::default()).unwrap();
        let clusters = cluster(&sel, &g);
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters[0].label, "budget");
        assert_eq!(clusters[0].members.len(), 2);
    }
}
