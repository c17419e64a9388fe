//! Node-set scoring and selection over the cohesion graph.
//!
//! A candidate set is scored on four axes, each normalised to `[0, 1]`:
//!
//! - centrality: mean weighted degree of members over the graph maximum;
//! - representativeness: closed-neighbourhood coverage `|N[S]| / |V|`;
//! - coherence: internal edge mass against the densest possible set,
//!   `sum_internal / (W_max * C(|S|, 2))`, with singletons fully coherent;
//! - prior: mean surface markedness `(location + max(cue, 0)) / 2`.
//!
//! The total is the weighted combination under [`ScoreWeights`]. Because
//! every axis is a ratio of like-scaled quantities, uniformly scaling all
//! edge weights leaves scores and hence selections unchanged.
//!
//! `greedy_select` grows the set one node at a time, always taking the
//! node whose addition maximises the enlarged set's total score.
//! `exhaustive_select` is the brute-force reference used in tests and
//! diagnostics. Score comparisons use a small epsilon so that float noise
//! cannot override the deterministic tie order (lower sentence index, then
//! lower node id).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohesion::CohesionGraph;

/// Tolerance under which two set scores count as tied.
pub const SCORE_EPS: f64 = 1e-9;

/// Largest node count `exhaustive_select` will enumerate.
pub const EXHAUSTIVE_LIMIT: usize = 20;

pub(crate) fn approx_gt(a: f64, b: f64) -> bool {
    a > b + SCORE_EPS
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights {
            alpha: 1.0 / 3.0,
            beta: 1.0 / 3.0,
            gamma: 1.0 / 3.0,
            delta: 0.0,
        }
    }
}

impl ScoreWeights {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self, SelectError> {
        let w = ScoreWeights {
            alpha,
            beta,
            gamma,
            delta,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), SelectError> {
        if self.alpha < 0.0 || self.beta < 0.0 || self.gamma < 0.0 {
            return Err(SelectError::InvalidWeights(
                "alpha, beta, gamma must be non-negative".into(),
            ));
        }
        if (self.alpha + self.beta + self.gamma - 1.0).abs() > 1e-9 {
            return Err(SelectError::InvalidWeights(
                "alpha + beta + gamma must equal 1".into(),
            ));
        }
        if self.delta < 0.0 {
            return Err(SelectError::InvalidWeights(
                "delta must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub centrality: f64,
    pub representativeness: f64,
    pub coherence: f64,
    pub prior: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Selected node ids, ascending.
    pub node_ids: Vec<usize>,
    pub breakdown: ScoreBreakdown,
    pub budget_k: usize,
}

#[derive(Debug, Error)]
pub enum SelectError {
    #[error("cannot score an empty node set")]
    EmptySet,
    #[error("unknown node id {0}")]
    UnknownNode(usize),
    #[error("duplicate node id {0} in set")]
    DuplicateNode(usize),
    #[error("budget k must be at least 1")]
    InvalidBudget,
    #[error("graph with {0} nodes exceeds the exhaustive limit of {1}")]
    GraphTooLarge(usize, usize),
    #[error("invalid score weights: {0}")]
    InvalidWeights(String),
}

struct Scorer<'a> {
    g: &'a CohesionGraph,
    w: ScoreWeights,
    d_max: f64,
    w_max: f64,
}

impl<'a> Scorer<'a> {
    fn new(g: &'a CohesionGraph, w: ScoreWeights) -> Scorer<'a> {
        Scorer {
            g,
            w,
            d_max: g.max_weighted_degree(),
            w_max: g.max_edge_weight(),
        }
    }

    /// `ids` must be valid, deduplicated node ids.
    fn breakdown(&self, ids: &[usize]) -> ScoreBreakdown {
        let n = ids.len() as f64;

        let centrality = if self.d_max > 0.0 {
            ids.iter()
                .map(|&v| self.g.weighted_degree(v) / self.d_max)
                .sum::<f64>()
                / n
        } else {
            0.0
        };

        let mut covered: std::collections::BTreeSet<usize> = ids.iter().copied().collect();
        for &v in ids {
            covered.extend(self.g.neighbors(v).map(|(u, _)| u));
        }
        let representativeness = covered.len() as f64 / self.g.node_count() as f64;

        let coherence = if ids.len() == 1 {
            1.0
        } else if self.w_max > 0.0 {
            let members: std::collections::BTreeSet<usize> = ids.iter().copied().collect();
            let internal: f64 = self
                .g
                .edges()
                .iter()
                .filter(|e| members.contains(&e.a) && members.contains(&e.b))
                .map(|e| e.weight)
                .sum();
            let pairs = ids.len() * (ids.len() - 1) / 2;
            internal / (self.w_max * pairs as f64)
        } else {
            0.0
        };

        let prior = ids
            .iter()
            .map(|&v| {
                let m = self.g.node(v).expect("validated id").markedness;
                (m.location_score + m.cue_score.max(0.0)) / 2.0
            })
            .sum::<f64>()
            / n;

        let total = self.w.alpha * centrality
            + self.w.beta * representativeness
            + self.w.gamma * coherence
            + self.w.delta * prior;

        ScoreBreakdown {
            centrality,
            representativeness,
            coherence,
            prior,
            total,
        }
    }
}

fn validate_set(g: &CohesionGraph, ids: &[usize]) -> Result<(), SelectError> {
    if ids.is_empty() {
        return Err(SelectError::EmptySet);
    }
    let mut seen = std::collections::BTreeSet::new();
    for &v in ids {
        if g.index_of(v).is_none() {
            return Err(SelectError::UnknownNode(v));
        }
        if !seen.insert(v) {
            return Err(SelectError::DuplicateNode(v));
        }
    }
    Ok(())
}

/// Scores a node set. Rejects empty sets, unknown ids and duplicates.
pub fn score(
    g: &CohesionGraph,
    ids: &[usize],
    w: &ScoreWeights,
) -> Result<ScoreBreakdown, SelectError> {
    w.validate()?;
    validate_set(g, ids)?;
    Ok(Scorer::new(g, *w).breakdown(ids))
}

/// Node ids in tie-break order: lower sentence index first, then lower id.
fn candidate_order(g: &CohesionGraph) -> Vec<usize> {
    let mut order: Vec<(usize, usize)> =
        g.nodes().iter().map(|n| (n.sentence_index, n.id)).collect();
    order.sort_unstable();
    order.into_iter().map(|(_, id)| id).collect()
}

/// Grows a set greedily until it holds `min(k, |V|)` nodes.
pub fn greedy_select(
    g: &CohesionGraph,
    k: usize,
    w: &ScoreWeights,
) -> Result<Selection, SelectError> {
    w.validate()?;
    if k == 0 {
        return Err(SelectError::InvalidBudget);
    }
    let scorer = Scorer::new(g, *w);
    let order = candidate_order(g);
    let target = k.min(g.node_count());

    let mut selected: Vec<usize> = Vec::with_capacity(target);
    while selected.len() < target {
        let mut best: Option<(f64, usize)> = None;
        for &v in &order {
            if selected.contains(&v) {
                continue;
            }
            let mut trial = selected.clone();
            trial.push(v);
            let s = scorer.breakdown(&trial).total;
            // Strict improvement only: earlier candidates win ties.
            if best.is_none_or(|(bs, _)| approx_gt(s, bs)) {
                best = Some((s, v));
            }
        }
        let (_, v) = best.expect("at least one candidate remains");
        selected.push(v);
    }
    selected.sort_unstable();
    let breakdown = scorer.breakdown(&selected);
    Ok(Selection {
        node_ids: selected,
        breakdown,
        budget_k: k,
    })
}

fn combinations(pool: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(
        pool: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if cur.len() == k {
            f(cur);
            return;
        }
        let need = k - cur.len();
        for i in start..=pool.len().saturating_sub(need) {
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, f);
            cur.pop();
        }
    }
    let mut cur = Vec::with_capacity(k);
    rec(pool, k, 0, &mut cur, f);
}

/// True argmax over all `min(k, |V|)`-subsets. Guarded to small graphs;
/// intended for tests and diagnostics. Ties resolve to the subset that is
/// lexicographically least in tie-break order.
pub fn exhaustive_select(
    g: &CohesionGraph,
    k: usize,
    w: &ScoreWeights,
) -> Result<Selection, SelectError> {
    w.validate()?;
    if k == 0 {
        return Err(SelectError::InvalidBudget);
    }
    if g.node_count() > EXHAUSTIVE_LIMIT {
        return Err(SelectError::GraphTooLarge(g.node_count(), EXHAUSTIVE_LIMIT));
    }
    let scorer = Scorer::new(g, *w);
    let order = candidate_order(g);
    let target = k.min(g.node_count());

    let mut best: Option<(f64, Vec<usize>)> = None;
    combinations(&order, target, &mut |subset| {
        let s = scorer.breakdown(subset).total;
        if best.as_ref().is_none_or(|(bs, _)| approx_gt(s, *bs)) {
            best = Some((s, subset.to_vec()));
        }
    });
    let (_, mut ids) = best.expect("non-empty graph");
    ids.sort_unstable();
    let breakdown = scorer.breakdown(&ids);
    Ok(Selection {
        node_ids: ids,
        breakdown,
        budget_k: k,
    })
}

/// Derives a sentence budget or node budget from a compression ratio.
pub fn budget_from_ratio(ratio: f64, n: usize) -> usize {
    ((ratio * n as f64).round() as usize).max(1)
}

/// Ranks sentences by how many selected predications they carry (ties:
/// higher summed weighted degree, then earlier position) and returns the
/// top `min(m, #sentences)` indices in source order.
pub fn project_to_sentences(sel: &Selection, g: &CohesionGraph, m: usize) -> Vec<usize> {
    let selected: std::collections::BTreeSet<usize> = sel.node_ids.iter().copied().collect();
    let mut per_sentence: std::collections::BTreeMap<usize, (usize, f64)> =
        std::collections::BTreeMap::new();
    for n in g.nodes() {
        per_sentence.entry(n.sentence_index).or_insert((0, 0.0));
    }
    for &id in &selected {
        if let Some(node) = g.node(id) {
            let entry = per_sentence.entry(node.sentence_index).or_insert((0, 0.0));
            entry.0 += 1;
            entry.1 += g.weighted_degree(id);
        }
    }
    let mut ranked: Vec<(usize, usize, f64)> = per_sentence
        .into_iter()
        .map(|(sent, (count, deg))| (sent, count, deg))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| {
                if approx_gt(b.2, a.2) {
                    std::cmp::Ordering::Greater
                } else if approx_gt(a.2, b.2) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .then_with(|| a.0.cmp(&b.0))
    });
    let mut top: Vec<usize> = ranked
        .into_iter()
        .take(m)
        .map(|(sent, _, _)| sent)
        .collect();
    top.sort_unstable();
    top
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohesion::{build_graph, CohesionGraph, Edge, EdgeType, EdgeWeights};
    use crate::ingest::Markedness;
    use crate::interpret::{Argument, Predication};

    fn node(id: usize, sent: usize) -> Predication {
        Predication {
            id,
            predicate: Some(format!("p{id}")),
            args: vec![Argument {
                head: format!("h{id}"),
                surface: format!("h{id}"),
                role: 0,
                resolved_from: None,
            }],
            sentence_index: sent,
            complete: true,
            markedness: Markedness::default(),
        }
    }

    fn edge(a: usize, b: usize, w: f64) -> Edge {
        let mut types = std::collections::BTreeSet::new();
        types.insert(EdgeType::SimilarArgumentInter);
        Edge {
            a,
            b,
            types,
            weight: w,
        }
    }

    fn path_graph() -> CohesionGraph {
        // a - b - c - d with unit weights, one node per sentence.
        let nodes = (0..4).map(|i| node(i, i)).collect();
        let edges = vec![edge(0, 1, 1.0), edge(1, 2, 1.0), edge(2, 3, 1.0)];
        CohesionGraph::from_parts(nodes, edges).unwrap()
    }

    #[test]
    fn edgeless_singleton_scores() {
        let nodes = (0..3).map(|i| node(i, i)).collect();
        let g = CohesionGraph::from_parts(nodes, vec![]).unwrap();
        let b = score(&g, &[0], &ScoreWeights::default()).unwrap();
        assert_eq!(b.centrality, 0.0);
        assert!((b.representativeness - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(b.coherence, 1.0);
    }

    #[test]
    fn path_pair_scores_one() {
        let g = path_graph();
        let b = score(&g, &[1, 2], &ScoreWeights::default()).unwrap();
        assert!((b.centrality - 1.0).abs() < 1e-12);
        assert!((b.representativeness - 1.0).abs() < 1e-12);
        assert!((b.coherence - 1.0).abs() < 1e-12);
        assert!((b.total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn greedy_picks_path_centre() {
        let g = path_graph();
        let sel = greedy_select(&g, 2, &ScoreWeights::default()).unwrap();
        assert_eq!(sel.node_ids, vec![1, 2]);
        let ex = exhaustive_select(&g, 2, &ScoreWeights::default()).unwrap();
        assert_eq!(ex.node_ids, sel.node_ids);
    }

    #[test]
    fn empty_set_rejected() {
        let g = path_graph();
        assert!(matches!(
            score(&g, &[], &ScoreWeights::default()),
            Err(SelectError::EmptySet)
        ));
    }

    #[test]
    fn duplicate_and_unknown_rejected() {
        let g = path_graph();
        assert!(matches!(
            score(&g, &[1, 1], &ScoreWeights::default()),
            Err(SelectError::DuplicateNode(1))
        ));
        assert!(matches!(
            score(&g, &[99], &ScoreWeights::default()),
            Err(SelectError::UnknownNode(99))
        ));
    }

    #[test]
    fn k_at_least_node_count_selects_all() {
        let g = path_graph();
        let sel = greedy_select(&g, 10, &ScoreWeights::default()).unwrap();
        assert_eq!(sel.node_ids, vec![0, 1, 2, 3]);
        let ex = exhaustive_select(&g, 4, &ScoreWeights::default()).unwrap();
        assert_eq!(ex.node_ids, vec![0, 1, 2, 3]);
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(ScoreWeights::new(0.5, 0.2, 0.2, 0.0).is_err());
        assert!(ScoreWeights::new(0.5, 0.25, 0.25, 0.1).is_ok());
    }

    #[test]
    fn scaling_leaves_selection_and_breakdown_unchanged() {
        let nodes: Vec<Predication> = (0..6).map(|i| node(i, i / 2)).collect();
        let edges = vec![
            edge(0, 1, 0.8),
            edge(1, 2, 1.3),
            edge(2, 3, 0.5),
            edge(3, 4, 1.0),
            edge(1, 4, 0.4),
        ];
        let g1 = CohesionGraph::from_parts(nodes.clone(), edges.clone()).unwrap();
        for c in [0.5, 2.0, 10.0] {
            let scaled: Vec<Edge> = edges.iter().map(|e| edge(e.a, e.b, e.weight * c)).collect();
            let g2 = CohesionGraph::from_parts(nodes.clone(), scaled).unwrap();
            let w = ScoreWeights::default();
            let s1 = greedy_select(&g1, 3, &w).unwrap();
            let s2 = greedy_select(&g2, 3, &w).unwrap();
            assert_eq!(s1.node_ids, s2.node_ids, "c = {c}");
            let b1 = s1.breakdown;
            let b2 = s2.breakdown;
            assert!((b1.total - b2.total).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_ranks_by_selected_count() {
        let lex = crate::lexicon::Lexicon::default();
        let doc = crate::ingest::segment(
            "The committee approved the budget and praised the budget plan. Rain fell. The budget covered roads.",
            &lex,
        );
        let preds =
            crate::interpret::resolve_anaphors(crate::interpret::extract_predications(&doc, &lex));
        let g = build_graph(&preds, &EdgeWeights::default(), None).unwrap();
        let sel = greedy_select(&g, 3, &ScoreWeights::default()).unwrap();
        let top = project_to_sentences(&sel, &g, 1);
        assert_eq!(top.len(), 1);
        let all = project_to_sentences(&sel, &g, 99);
        assert_eq!(all.len(), 3);
        assert_eq!(all, vec![0, 1, 2]);
    }
}
