//! The cohesion graph: predications as nodes, typed undirected edges for
//! the three cohesion devices.
//!
//! Edge types:
//! - `CommonPredicate`: both predications share the same predicate lemma.
//! - `SharedArgumentIntra`: same sentence, at least one shared argument head.
//! - `SimilarArgumentInter`: different sentences, a shared argument head or
//!   a synonym-equivalent pair. The synonym variant is the weak link and
//!   its weight contribution is discounted.
//!
//! At most one edge joins a pair of nodes; its weight is the sum of the
//! contributions of every type that fired. No self loops.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interpret::Predication;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeType {
    CommonPredicate,
    SharedArgumentIntra,
    SimilarArgumentInter,
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeType::CommonPredicate => "pred",
            EdgeType::SharedArgumentIntra => "intra",
            EdgeType::SimilarArgumentInter => "inter",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeWeights {
    pub w_pred: f64,
    pub w_intra: f64,
    pub w_inter: f64,
    pub synonym_discount: f64,
}

impl Default for EdgeWeights {
    fn default() -> Self {
        EdgeWeights {
            w_pred: 0.8,
            w_intra: 1.0,
            w_inter: 0.5,
            synonym_discount: 0.8,
        }
    }
}

impl EdgeWeights {
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.w_pred <= 0.0 || self.w_intra <= 0.0 || self.w_inter <= 0.0 {
            return Err(GraphError::InvalidWeights(
                "edge weights must be positive".into(),
            ));
        }
        if !(self.synonym_discount > 0.0 && self.synonym_discount <= 1.0) {
            return Err(GraphError::InvalidWeights(
                "synonym discount must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// Multiplies the three type weights by `c`, leaving the discount alone.
    pub fn scaled(&self, c: f64) -> EdgeWeights {
        EdgeWeights {
            w_pred: self.w_pred * c,
            w_intra: self.w_intra * c,
            w_inter: self.w_inter * c,
            synonym_discount: self.synonym_discount,
        }
    }
}

/// Symmetric synonym groups. File format: one group per line, members
/// separated by whitespace; `#` comments and blank lines skipped.
#[derive(Debug, Clone, Default)]
pub struct SynonymTable {
    group_of: BTreeMap<String, usize>,
}

impl SynonymTable {
    pub fn parse(text: &str) -> SynonymTable {
        let mut group_of = BTreeMap::new();
        let mut next = 0;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let members: Vec<&str> = line.split_whitespace().collect();
            if members.len() < 2 {
                continue;
            }
            for m in members {
                group_of.insert(m.to_lowercase(), next);
            }
            next += 1;
        }
        SynonymTable { group_of }
    }

    pub fn same_group(&self, a: &str, b: &str) -> bool {
        match (self.group_of.get(a), self.group_of.get(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub types: BTreeSet<EdgeType>,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub component_count: usize,
    /// Fraction of edges carrying the cross-sentence type; a health signal
    /// for inter-sentence linkage, reported rather than asserted on.
    pub inter_edge_fraction: f64,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph needs at least one predication")]
    EmptyNodeList,
    #[error("duplicate node id {0}")]
    DuplicateNodeId(usize),
    #[error("invalid edge: {0}")]
    InvalidEdge(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
}

#[derive(Debug, Clone)]
pub struct CohesionGraph {
    nodes: Vec<Predication>,
    edges: Vec<Edge>,
    index_of: HashMap<usize, usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
    max_edge_weight: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LinkPolicy {
    /// Restrict `CommonPredicate` to pairs from different sentences.
    pub pred_cross_only: bool,
}

fn heads(p: &Predication) -> BTreeSet<&str> {
    p.args
        .iter()
        .filter(|a| !a.head.is_empty())
        .map(|a| a.head.as_str())
        .collect()
}

fn link(
    p: &Predication,
    q: &Predication,
    w: &EdgeWeights,
    synonyms: Option<&SynonymTable>,
    policy: LinkPolicy,
) -> Option<(BTreeSet<EdgeType>, f64)> {
    let mut types = BTreeSet::new();
    let mut weight = 0.0;
    let same_sentence = p.sentence_index == q.sentence_index;

    if let (Some(pp), Some(qp)) = (&p.predicate, &q.predicate) {
        if pp == qp && !(policy.pred_cross_only && same_sentence) {
            types.insert(EdgeType::CommonPredicate);
            weight += w.w_pred;
        }
    }

    let hp = heads(p);
    let hq = heads(q);
    let shared = hp.intersection(&hq).next().is_some();
    if same_sentence {
        if shared {
            types.insert(EdgeType::SharedArgumentIntra);
            weight += w.w_intra;
        }
    } else if shared {
        types.insert(EdgeType::SimilarArgumentInter);
        weight += w.w_inter;
    } else if let Some(table) = synonyms {
        let synonym = hp.iter().any(|a| hq.iter().any(|b| table.same_group(a, b)));
        if synonym {
            types.insert(EdgeType::SimilarArgumentInter);
            weight += w.w_inter * w.synonym_discount;
        }
    }

    if types.is_empty() {
        None
    } else {
        Some((types, weight))
    }
}

/// Derives the cohesion graph from a predication list by examining every
/// unordered pair under the three linking rules.
pub fn build_graph(
    preds: &[Predication],
    weights: &EdgeWeights,
    synonyms: Option<&SynonymTable>,
) -> Result<CohesionGraph, GraphError> {
    build_graph_with(preds, weights, synonyms, LinkPolicy::default())
}

pub fn build_graph_with(
    preds: &[Predication],
    weights: &EdgeWeights,
    synonyms: Option<&SynonymTable>,
    policy: LinkPolicy,
) -> Result<CohesionGraph, GraphError> {
    weights.validate()?;
    if preds.is_empty() {
        return Err(GraphError::EmptyNodeList);
    }
    let mut edges = Vec::new();
    for i in 0..preds.len() {
        for j in i + 1..preds.len() {
            if let Some((types, weight)) = link(&preds[i], &preds[j], weights, synonyms, policy) {
                let (a, b) = if preds[i].id <= preds[j].id {
                    (preds[i].id, preds[j].id)
                } else {
                    (preds[j].id, preds[i].id)
                };
                edges.push(Edge {
                    a,
                    b,
                    types,
                    weight,
                });
            }
        }
    }
    CohesionGraph::from_parts(preds.to_vec(), edges)
}

impl CohesionGraph {
    /// Assembles a graph from explicit parts, validating node id uniqueness
    /// and edge well-formedness. `build_graph` is the primary constructor;
    /// this one serves diagnostics and synthetic test topologies, so edge
    /// weights are taken as given.
    pub fn from_parts(nodes: Vec<Predication>, mut edges: Vec<Edge>) -> Result<Self, GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::EmptyNodeList);
        }
        let mut index_of = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index_of.insert(n.id, i).is_some() {
                return Err(GraphError::DuplicateNodeId(n.id));
            }
        }
        let mut seen_pairs = BTreeSet::new();
        for e in &mut edges {
            if e.a > e.b {
                std::mem::swap(&mut e.a, &mut e.b);
            }
            if e.a == e.b {
                return Err(GraphError::InvalidEdge(format!("self loop on {}", e.a)));
            }
            if !index_of.contains_key(&e.a) || !index_of.contains_key(&e.b) {
                return Err(GraphError::InvalidEdge(format!(
                    "edge ({}, {}) references a missing node",
                    e.a, e.b
                )));
            }
            if !seen_pairs.insert((e.a, e.b)) {
                return Err(GraphError::InvalidEdge(format!(
                    "duplicate edge ({}, {})",
                    e.a, e.b
                )));
            }
            if e.types.is_empty() {
                return Err(GraphError::InvalidEdge(format!(
                    "edge ({}, {}) carries no type",
                    e.a, e.b
                )));
            }
            if e.weight <= 0.0 {
                return Err(GraphError::InvalidEdge(format!(
                    "edge ({}, {}) has non-positive weight",
                    e.a, e.b
                )));
            }
        }
        edges.sort_by_key(|e| (e.a, e.b));

        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut degrees = vec![0.0; nodes.len()];
        let mut max_edge_weight = 0.0_f64;
        for e in &edges {
            let ia = index_of[&e.a];
            let ib = index_of[&e.b];
            adjacency[ia].push((ib, e.weight));
            adjacency[ib].push((ia, e.weight));
            degrees[ia] += e.weight;
            degrees[ib] += e.weight;
            max_edge_weight = max_edge_weight.max(e.weight);
        }
        Ok(CohesionGraph {
            nodes,
            edges,
            index_of,
            adjacency,
            degrees,
            max_edge_weight,
        })
    }

    pub fn nodes(&self) -> &[Predication] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, id: usize) -> Option<usize> {
        self.index_of.get(&id).copied()
    }

    pub fn node(&self, id: usize) -> Option<&Predication> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    /// Weighted degree by node id.
    pub fn weighted_degree(&self, id: usize) -> f64 {
        self.index_of(id).map(|i| self.degrees[i]).unwrap_or(0.0)
    }

    pub fn max_weighted_degree(&self) -> f64 {
        self.degrees.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_edge_weight(&self) -> f64 {
        self.max_edge_weight
    }

    pub fn neighbors(&self, id: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.index_of(id).into_iter().flat_map(move |i| {
            self.adjacency[i]
                .iter()
                .map(|&(j, w)| (self.nodes[j].id, w))
        })
    }

    pub fn edge_weight(&self, a: usize, b: usize) -> Option<f64> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by_key(&(a, b), |e| (e.a, e.b))
            .ok()
            .map(|i| self.edges[i].weight)
    }

    /// Connected components as sorted node-id lists, ordered by smallest
    /// contained id.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.nodes.len());
        for e in &self.edges {
            uf.union(self.index_of[&e.a], self.index_of[&e.b]);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(n.id);
        }
        let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    pub fn stats(&self) -> GraphStats {
        let inter = self
            .edges
            .iter()
            .filter(|e| e.types.contains(&EdgeType::SimilarArgumentInter))
            .count();
        GraphStats {
            node_count: self.node_count(),
            edge_count: self.edge_count(),
            component_count: self.components().len(),
            inter_edge_fraction: if self.edges.is_empty() {
                0.0
            } else {
                inter as f64 / self.edges.len() as f64
            },
        }
    }
}

/// Plain union-find with path compression and union by rank.
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    Dot,
}

#[derive(Serialize)]
struct NodeOut<'a> {
    id: usize,
    pred: &'a Option<String>,
    args: Vec<ArgOut<'a>>,
    sent: usize,
    complete: bool,
}

#[derive(Serialize)]
struct ArgOut<'a> {
    head: &'a str,
    surface: &'a str,
    role: usize,
}

#[derive(Serialize)]
struct EdgeOut {
    a: usize,
    b: usize,
    types: Vec<String>,
    w: f64,
}

#[derive(Serialize)]
struct GraphOut<'a> {
    nodes: Vec<NodeOut<'a>>,
    edges: Vec<EdgeOut>,
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Serialises the graph. Nodes are ordered by id and edges by `(a, b)` in
/// both formats, so equal graphs export byte-identically.
pub fn export_graph(g: &CohesionGraph, format: GraphFormat) -> String {
    let mut node_order: Vec<&Predication> = g.nodes().iter().collect();
    node_order.sort_by_key(|n| n.id);
    match format {
        GraphFormat::Json => {
            let out = GraphOut {
                nodes: node_order
                    .iter()
                    .map(|n| NodeOut {
                        id: n.id,
                        pred: &n.predicate,
                        args: n
                            .args
                            .iter()
                            .map(|a| ArgOut {
                                head: &a.head,
                                surface: &a.surface,
                                role: a.role,
                            })
                            .collect(),
                        sent: n.sentence_index,
                        complete: n.complete,
                    })
                    .collect(),
                edges: g
                    .edges()
                    .iter()
                    .map(|e| EdgeOut {
                        a: e.a,
                        b: e.b,
                        types: e.types.iter().map(|t| t.to_string()).collect(),
                        w: e.weight,
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&out).expect("serializable graph");
            s.push('\n');
            s
        }
        GraphFormat::Dot => {
            let mut s = String::from("graph cohesion {\n");
            for n in &node_order {
                s.push_str(&format!(
                    "  {} [label=\"{}\"];\n",
                    n.id,
                    dot_escape(&n.signature())
                ));
            }
            for e in g.edges() {
                let types = e
                    .types
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join("+");
                s.push_str(&format!(
                    "  {} -- {} [label=\"{} w={:.2}\"];\n",
                    e.a, e.b, types, e.weight
                ));
            }
            s.push_str("}\n");
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::segment;
    use crate::interpret::{extract_predications, resolve_anaphors};
    use crate::lexicon::Lexicon;

    fn preds(text: &str) -> Vec<Predication> {
        let lex = Lexicon::default();
        resolve_anaphors(extract_predications(&segment(text, &lex), &lex))
    }

    #[test]
    fn shared_argument_across_sentences() {
        let ps = preds("The committee approved the budget. The budget covered roads.");
        let g = build_graph(&ps, &EdgeWeights::default(), None).unwrap();
        assert_eq!(g.edge_count(), 1);
        let e = &g.edges()[0];
        assert!(e.types.contains(&EdgeType::SimilarArgumentInter));
        assert_eq!(e.weight, 0.5);
    }

    #[test]
    fn combined_types_sum_weights() {
        // Same predicate and a shared head across different sentences.
        let ps = preds("The committee approved the budget. The board approved the budget.");
        let g = build_graph(&ps, &EdgeWeights::default(), None).unwrap();
        assert_eq!(g.edge_count(), 1);
        let e = &g.edges()[0];
        assert!(e.types.contains(&EdgeType::CommonPredicate));
        assert!(e.types.contains(&EdgeType::SimilarArgumentInter));
        assert!((e.weight - 1.3).abs() < 1e-12);
    }

    #[test]
    fn synonym_match_is_discounted() {
        let ps = preds("The film opened. The movie closed early.");
        let table = SynonymTable::parse("film movie picture\n");
        let g = build_graph(&ps, &EdgeWeights::default(), Some(&table)).unwrap();
        let e = g
            .edges()
            .iter()
            .find(|e| e.types.contains(&EdgeType::SimilarArgumentInter))
            .expect("synonym edge");
        assert!((e.weight - 0.4).abs() < 1e-12);
    }

    #[test]
    fn no_match_no_edge() {
        let ps = preds("Dogs ran. Cats slept.");
        let g = build_graph(&ps, &EdgeWeights::default(), None).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn pred_cross_only_policy() {
        let ps = preds("Taxes rose and prices rose.");
        let g_all = build_graph(&ps, &EdgeWeights::default(), None).unwrap();
        assert!(g_all
            .edges()
            .iter()
            .any(|e| e.types.contains(&EdgeType::CommonPredicate)));
        let g_cross = build_graph_with(
            &ps,
            &EdgeWeights::default(),
            None,
            LinkPolicy {
                pred_cross_only: true,
            },
        )
        .unwrap();
        assert!(!g_cross
            .edges()
            .iter()
            .any(|e| e.types.contains(&EdgeType::CommonPredicate)));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut ps = preds("Dogs ran. Cats slept.");
        let id = ps[0].id;
        ps[1].id = id;
        let err = build_graph(&ps, &EdgeWeights::default(), None).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateNodeId(_)));
    }

    #[test]
    fn components_ordered_by_smallest_id() {
        let ps = preds("Dogs ran. Cats slept. Dogs jumped high.");
        let g = build_graph(&ps, &EdgeWeights::default(), None).unwrap();
        let comps = g.components();
        assert_eq!(comps.len(), 2);
        assert!(comps[0][0] < comps[1][0]);
        let all: usize = comps.iter().map(Vec::len).sum();
        assert_eq!(all, g.node_count());
    }

    #[test]
    fn dot_export_has_one_edge_statement_per_edge() {
        let ps = preds("The committee approved the budget. The budget covered roads.");
        let g = build_graph(&ps, &EdgeWeights::default(), None).unwrap();
        let dot = export_graph(&g, GraphFormat::Dot);
        assert_eq!(dot.matches(" -- ").count(), 1);
        assert!(dot.starts_with("graph cohesion {"));
        assert!(dot.trim_end().ends_with('}'));
    }

    #[test]
    fn json_export_is_deterministic() {
        let ps = preds("Prices rose. Prices fell. Prices rose again.");
        let g1 = build_graph(&ps, &EdgeWeights::default(), None).unwrap();
        let g2 = build_graph(&ps, &EdgeWeights::default(), None).unwrap();
        assert_eq!(
            export_graph(&g1, GraphFormat::Json),
            export_graph(&g2, GraphFormat::Json)
        );
    }

    #[test]
    fn adding_a_predication_never_weakens_existing_links() {
        let full = preds(
            "The committee approved the budget. The budget covered roads. The committee met.",
        );
        let prefix = &full[..full.len() - 1];
        let g_full = build_graph(&full, &EdgeWeights::default(), None).unwrap();
        let g_prefix = build_graph(prefix, &EdgeWeights::default(), None).unwrap();
        for e in g_prefix.edges() {
            let w = g_full.edge_weight(e.a, e.b).expect("edge kept");
            assert!(w >= e.weight - 1e-12);
        }
    }
}
