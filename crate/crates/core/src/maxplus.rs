//! Max-plus spectral theory on weighted block graphs.
//!
//! For a locally constant potential on a finite block graph the ergodic
//! maximizing value is the maximum cycle mean, calibrated sub-actions are
//! max-plus eigenvectors of the reversed graph, and the minimal sub-action
//! is the longest normalized backward walk. Everything here is generic over
//! [`Scalar`] so the same code runs exactly on rationals or approximately
//! on `f64`.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::num::{max_all, min_all, Scalar};
use crate::shift::{BlockGraph, MarkovGraph, ShiftError, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MaxPlusError {
    #[error("the graph has no cycle")]
    NoCycle,
    #[error("the graph is not strongly connected ({components} components)")]
    NotStronglyConnected { components: usize },
    #[error("a positive normalized cycle reaches vertex {vertex:?}; beta is below the maximum cycle mean")]
    PositiveCycle { vertex: Word },
    #[error("edge {edge:?} has positive defect {defect}")]
    InvalidSubAction { edge: Word, defect: String },
    #[error("sub-action has {found} values for {expected} vertices")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("horizon must be at least 1")]
    InvalidHorizon,
    #[error("policy iteration did not settle after {0} rounds")]
    PolicyIterationStalled(usize),
    #[error("policy iteration ended with non-constant cycle values")]
    NonConstantValue,
}

impl MaxPlusError {
    pub fn code(&self) -> &'static str {
        match self {
            MaxPlusError::NoCycle => "maxplus::NoCycle",
            MaxPlusError::NotStronglyConnected { .. } => "maxplus::NotStronglyConnected",
            MaxPlusError::PositiveCycle { .. } => "maxplus::PositiveCycle",
            MaxPlusError::InvalidSubAction { .. } => "maxplus::InvalidSubAction",
            MaxPlusError::DimensionMismatch { .. } => "maxplus::DimensionMismatch",
            MaxPlusError::InvalidHorizon => "maxplus::InvalidHorizon",
            MaxPlusError::PolicyIterationStalled(_) => "maxplus::PolicyIterationStalled",
            MaxPlusError::NonConstantValue => "maxplus::NonConstantValue",
        }
    }
}

/// A block graph with the potential's value on every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBlockGraph<S> {
    graph: BlockGraph,
    weights: Vec<S>,
}

impl<S: Scalar> WeightedBlockGraph<S> {
    pub fn new(graph: BlockGraph, weights: Vec<S>) -> Self {
        assert_eq!(graph.edge_count(), weights.len(), "one weight per edge");
        WeightedBlockGraph { graph, weights }
    }

    /// Builds and trims a graph from `(edge word, weight)` pairs.
    pub fn from_weighted_words<I>(order: usize, words: I) -> Result<Self, ShiftError>
    where
        I: IntoIterator<Item = (Word, S)>,
    {
        let pairs: Vec<(Word, S)> = words.into_iter().collect();
        let graph = BlockGraph::from_edge_words(order, pairs.iter().map(|(w, _)| w.clone()))?;
        let mut weights: Vec<Option<S>> = vec![None; graph.edge_count()];
        for (w, s) in pairs {
            if let Some(e) = graph.edge_of(&w) {
                weights[e] = Some(s);
            }
        }
        Ok(WeightedBlockGraph {
            graph,
            weights: weights.into_iter().map(|w| w.expect("weighted")).collect(),
        })
    }

    /// Order-2 graph of a Markov graph with a weight per transition.
    pub fn from_markov<F: Fn(u32, u32) -> S>(g: &MarkovGraph, weight: F) -> Result<Self, ShiftError> {
        Self::from_weighted_words(2, g.edges().map(|(i, j)| (vec![i, j], weight(i, j))))
    }

    pub fn graph(&self) -> &BlockGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, edge: usize) -> &S {
        &self.weights[edge]
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Subgraph on the edges accepted by `keep`, trimmed, weights carried.
    pub fn filter_edges<F: FnMut(usize) -> bool>(&self, mut keep: F) -> Self {
        let graph = self.graph.filter_edges(|i, _| keep(i));
        let weights = graph
            .edges()
            .iter()
            .map(|e| {
                let old = self.graph.edge_of(&e.word).expect("edge of parent graph");
                self.weights[old].clone()
            })
            .collect();
        WeightedBlockGraph { graph, weights }
    }

    /// Subgraph induced by a vertex subset.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut inside = vec![false; self.vertex_count()];
        for &v in vertices {
            inside[v] = true;
        }
        let edges = self.graph.edges();
        self.filter_edges(|e| inside[edges[e].source] && inside[edges[e].target])
    }

    /// Strongly connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components(
            self.vertex_count(),
            self.graph.edges().iter().map(|e| (e.source, e.target)),
        )
    }

    /// Components that carry at least one cycle.
    pub fn cyclic_components(&self) -> Vec<Vec<usize>> {
        let comps = self.components();
        let mut id = vec![usize::MAX; self.vertex_count()];
        for (c, comp) in comps.iter().enumerate() {
            for &v in comp {
                id[v] = c;
            }
        }
        let mut cyclic = vec![false; comps.len()];
        for e in self.graph.edges() {
            if id[e.source] == id[e.target] {
                cyclic[id[e.source]] = true;
            }
        }
        comps
            .into_iter()
            .zip(cyclic)
            .filter_map(|(c, keep)| keep.then_some(c))
            .collect()
    }

    /// Largest cyclic component as its own graph (ties: smallest vertex).
    pub fn largest_component(&self) -> Option<Self> {
        let comps = self.cyclic_components();
        let best = comps
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
            .map(|(_, c)| c.clone())?;
        Some(self.induced(&best))
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.vertex_count() > 0 && self.components().len() == 1 && self.edge_count() > 0
    }
}

/// Tarjan components of a graph given by its edge list.
pub(crate) fn components<I: Iterator<Item = (usize, usize)>>(n: usize, edges: I) -> Vec<Vec<usize>> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    for _ in 0..n {
        g.add_node(());
    }
    for (a, b) in edges {
        g.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|v| v.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    comps.sort_unstable_by_key(|c| c[0]);
    comps
}

/// A function on the vertices of a block graph together with the value
/// `beta` it certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct SubAction<S> {
    pub values: Vec<S>,
    pub beta: S,
}

impl<S: Scalar> SubAction<S> {
    pub fn constant(n: usize, c: S, beta: S) -> Self {
        SubAction {
            values: vec![c; n],
            beta,
        }
    }

    pub fn max(&self) -> S {
        max_all(&self.values).unwrap_or_else(S::zero)
    }

    pub fn min(&self) -> S {
        min_all(&self.values).unwrap_or_else(S::zero)
    }

    /// `osc(u) = max u - min u`.
    pub fn osc(&self) -> S {
        self.max() - self.min()
    }

    /// `u - c`.
    pub fn shifted(&self, c: &S) -> Self {
        SubAction {
            values: self.values.iter().map(|v| v.clone() - c.clone()).collect(),
            beta: self.beta.clone(),
        }
    }

    /// `A(e) + u(source) - u(target) - beta`.
    pub fn defect(&self, g: &WeightedBlockGraph<S>, edge: usize) -> S {
        let e = &g.graph().edges()[edge];
        g.weight(edge).clone() + self.values[e.source].clone()
            - self.values[e.target].clone()
            - self.beta.clone()
    }

    /// `Var_k(u)` over vertex words agreeing on their first `k` letters.
    pub fn variation(&self, g: &WeightedBlockGraph<S>, k: usize) -> S {
        let words = g.graph().vertices();
        let mut best = S::zero();
        for (a, wa) in words.iter().enumerate() {
            for (b, wb) in words.iter().enumerate() {
                if wa.len() > k && wa[..k] == wb[..k] {
                    best = best.max_of(self.values[a].clone() - self.values[b].clone());
                }
            }
        }
        best
    }

    fn check_len(&self, g: &WeightedBlockGraph<S>) -> Result<(), MaxPlusError> {
        if self.values.len() != g.vertex_count() {
            return Err(MaxPlusError::DimensionMismatch {
                expected: g.vertex_count(),
                found: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Maximum mean weight over directed cycles: Karp's recurrence on every
/// cyclic component, maximized.
pub fn max_cycle_mean<S: Scalar>(g: &WeightedBlockGraph<S>) -> Result<S, MaxPlusError> {
    let mut best: Option<S> = None;
    for comp in g.cyclic_components() {
        let m = karp_component(g, &comp);
        best = Some(match best {
            Some(b) => b.max_of(m),
            None => m,
        });
    }
    best.ok_or(MaxPlusError::NoCycle)
}

fn karp_component<S: Scalar>(g: &WeightedBlockGraph<S>, comp: &[usize]) -> S {
    let n = comp.len();
    let mut local = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in comp.iter().enumerate() {
        local[v] = i;
    }
    let edges: Vec<(usize, usize, &S)> = g
        .graph()
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| local[e.source] != usize::MAX && local[e.target] != usize::MAX)
        .map(|(i, e)| (local[e.source], local[e.target], g.weight(i)))
        .collect();

    // walk[k][v]: heaviest walk of exactly k edges from comp[0] to v
    let mut walk: Vec<Vec<Option<S>>> = vec![vec![None; n]; n + 1];
    walk[0][0] = Some(S::zero());
    for k in 1..=n {
        let (done, rest) = walk.split_at_mut(k);
        let prev = &done[k - 1];
        let cur = &mut rest[0];
        for &(u, v, w) in &edges {
            if let Some(d) = &prev[u] {
                let cand = d.clone() + w.clone();
                if cur[v].as_ref().is_none_or(|c| cand > *c) {
                    cur[v] = Some(cand);
                }
            }
        }
    }

    let mut best: Option<S> = None;
    for (v, last) in walk[n].iter().enumerate() {
        let Some(full) = last else { continue };
        let worst = (0..n)
            .filter_map(|k| {
                walk[k][v]
                    .as_ref()
                    .map(|dk| (full.clone() - dk.clone()) / S::from_count(n - k))
            })
            .reduce(|a, b| a.min_of(b));
        if let Some(w) = worst {
            best = Some(match best {
                Some(b) => b.max_of(w),
                None => w,
            });
        }
    }
    best.expect("a cyclic component has a closed walk of every large length")
}

const POLICY_ROUNDS: usize = 100_000;

/// Calibrated sub-action by Howard policy iteration on the reversed graph.
///
/// Every vertex selects one incoming edge; each round evaluates the cycles
/// of the selected functional graph and then improves the selection, first
/// on cycle means and then on biases. The result is shifted so `max u = 0`.
pub fn calibrated_subaction<S: Scalar>(g: &WeightedBlockGraph<S>) -> Result<SubAction<S>, MaxPlusError> {
    if g.edge_count() == 0 {
        return Err(MaxPlusError::NoCycle);
    }
    let comps = g.components().len();
    if comps != 1 {
        return Err(MaxPlusError::NotStronglyConnected { components: comps });
    }
    let n = g.vertex_count();
    let graph = g.graph();
    let source = |e: usize| graph.edges()[e].source;

    // start from the heaviest in-edge at every vertex
    let mut policy: Vec<usize> = (0..n)
        .map(|v| {
            let ins = graph.in_edges(v);
            let mut best = ins[0];
            for &e in &ins[1..] {
                if *g.weight(e) > *g.weight(best) {
                    best = e;
                }
            }
            best
        })
        .collect();
    let mut bias = vec![S::zero(); n];
    let mut eta = vec![S::zero(); n];

    for _ in 0..POLICY_ROUNDS {
        evaluate_policy(g, &policy, &mut eta, &mut bias);

        // improve cycle means first
        let mut changed = false;
        let mut next = policy.clone();
        for v in 0..n {
            let ins = graph.in_edges(v);
            let top = max_all(ins.iter().map(|&e| &eta[source(e)])).expect("in-edge");
            if eta[v].definitely_lt(&top) {
                next[v] = *ins
                    .iter()
                    .find(|&&e| top.approx_le(&eta[source(e)]))
                    .expect("maximizer");
                changed = true;
            }
        }
        if !changed {
            for v in 0..n {
                let value = |e: usize| {
                    g.weight(e).clone() + bias[source(e)].clone() - eta[v].clone()
                };
                let candidates: Vec<(usize, S)> = graph
                    .in_edges(v)
                    .iter()
                    .filter(|&&e| eta[source(e)].approx_eq(&eta[v]))
                    .map(|&e| (e, value(e)))
                    .collect();
                let top = max_all(candidates.iter().map(|(_, s)| s)).expect("policy edge qualifies");
                if bias[v].definitely_lt(&top) {
                    next[v] = candidates
                        .iter()
                        .find(|(_, s)| top.approx_le(s))
                        .map(|(e, _)| *e)
                        .expect("maximizer");
                    changed = true;
                }
            }
        }
        if !changed {
            let beta = eta[0].clone();
            if eta.iter().any(|e| !e.approx_eq(&beta)) {
                return Err(MaxPlusError::NonConstantValue);
            }
            let top = max_all(&bias).expect("nonempty");
            let u = SubAction {
                values: bias,
                beta,
            };
            return Ok(u.shifted(&top));
        }
        policy = next;
    }
    Err(MaxPlusError::PolicyIterationStalled(POLICY_ROUNDS))
}

/// Cycle means and biases of the functional graph `v -> source(policy[v])`.
/// A cycle's smallest vertex keeps its previous bias so values persist
/// across rounds while the cycle does.
fn evaluate_policy<S: Scalar>(
    g: &WeightedBlockGraph<S>,
    policy: &[usize],
    eta: &mut [S],
    bias: &mut [S],
) {
    let n = policy.len();
    let edges = g.graph().edges();
    let pred = |v: usize| edges[policy[v]].source;

    // 0 = unseen, 1 = on current chain, 2 = done
    let mut state = vec![0u8; n];
    let mut chain = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        chain.clear();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            chain.push(v);
            v = pred(v);
        }
        if state[v] == 1 {
            // new cycle: the chain suffix starting at v
            let pos = chain.iter().position(|&x| x == v).expect("on chain");
            let cycle = &chain[pos..];
            let total = cycle
                .iter()
                .map(|&c| g.weight(policy[c]).clone())
                .fold(S::zero(), |a, b| a + b);
            let mean = total / S::from_count(cycle.len());
            let root = *cycle.iter().min().expect("nonempty cycle");
            for &c in cycle {
                eta[c] = mean.clone();
            }
            // walk the cycle forward from the root: successor of x is the
            // vertex whose predecessor is x
            let k = cycle.len();
            let at = cycle.iter().position(|&x| x == root).expect("root on cycle");
            // cycle[i+1] = pred(cycle[i]), so forward order is reversed
            for step in 1..k {
                let x = cycle[(at + k - step) % k];
                let p = pred(x);
                bias[x] = g.weight(policy[x]).clone() + bias[p].clone() - mean.clone();
            }
            for &c in cycle {
                state[c] = 2;
            }
            chain.truncate(pos);
        }
        // remaining chain vertices hang off finished vertices
        while let Some(x) = chain.pop() {
            let p = pred(x);
            eta[x] = eta[p].clone();
            bias[x] = g.weight(policy[x]).clone() + bias[p].clone() - eta[x].clone();
            state[x] = 2;
        }
    }
}

/// `u_A(w)`: heaviest normalized backward walk ending at `w`, the empty
/// walk included. `|V|` Jacobi rounds of Bellman relaxation from zero, then
/// one more round that must change nothing.
pub fn minimal_subaction<S: Scalar>(
    g: &WeightedBlockGraph<S>,
    beta: &S,
) -> Result<SubAction<S>, MaxPlusError> {
    let n = g.vertex_count();
    if g.edge_count() == 0 {
        return Err(MaxPlusError::NoCycle);
    }
    let normalized: Vec<S> = g.weights().iter().map(|w| w.clone() - beta.clone()).collect();
    let edges = g.graph().edges();
    let relax = |u: &[S]| -> Vec<S> {
        let mut next = u.to_vec();
        for (e, edge) in edges.iter().enumerate() {
            let cand = u[edge.source].clone() + normalized[e].clone();
            if cand > next[edge.target] {
                next[edge.target] = cand;
            }
        }
        next
    };
    let mut u = vec![S::zero(); n];
    for _ in 0..n {
        u = relax(&u);
    }
    let check = relax(&u);
    if let Some(v) = (0..n).find(|&v| u[v].definitely_lt(&check[v])) {
        return Err(MaxPlusError::PositiveCycle {
            vertex: g.graph().vertices()[v].clone(),
        });
    }
    Ok(SubAction {
        values: u,
        beta: beta.clone(),
    })
}

/// `(1/k) max S_k A`: heaviest walk with exactly `k` edges, averaged.
pub fn finite_horizon_bound<S: Scalar>(g: &WeightedBlockGraph<S>, k: usize) -> Result<S, MaxPlusError> {
    if k == 0 {
        return Err(MaxPlusError::InvalidHorizon);
    }
    let n = g.vertex_count();
    let mut layer: Vec<Option<S>> = vec![Some(S::zero()); n];
    for _ in 0..k {
        let mut next: Vec<Option<S>> = vec![None; n];
        for (e, edge) in g.graph().edges().iter().enumerate() {
            if let Some(d) = &layer[edge.source] {
                let cand = d.clone() + g.weight(e).clone();
                if next[edge.target].as_ref().is_none_or(|c| cand > *c) {
                    next[edge.target] = Some(cand);
                }
            }
        }
        layer = next;
    }
    let best = layer
        .into_iter()
        .flatten()
        .reduce(|a, b| a.max_of(b))
        .ok_or(MaxPlusError::NoCycle)?;
    Ok(best / S::from_count(k))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalClass {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Tight edges, the critical edges among them (those on a tight cycle),
/// and the strongly connected classes of the critical subgraph. The
/// critical edges generate the subshift `Omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalStructure<S> {
    pub beta: S,
    pub tight_edges: Vec<usize>,
    pub critical_edges: Vec<usize>,
    pub classes: Vec<CriticalClass>,
}

impl<S> CriticalStructure<S> {
    pub fn is_critical(&self, edge: usize) -> bool {
        self.critical_edges.binary_search(&edge).is_ok()
    }

    pub fn is_tight(&self, edge: usize) -> bool {
        self.tight_edges.binary_search(&edge).is_ok()
    }
}

/// Edges with `|defect| <= tol`, and those among them lying on a cycle of
/// such edges grouped into classes.
fn tight_cycles<S: Scalar>(
    g: &WeightedBlockGraph<S>,
    tight: &[usize],
) -> (Vec<usize>, Vec<CriticalClass>) {
    let edges = g.graph().edges();
    let comps = components(
        g.vertex_count(),
        tight.iter().map(|&e| (edges[e].source, edges[e].target)),
    );
    let mut id = vec![0usize; g.vertex_count()];
    for (c, comp) in comps.iter().enumerate() {
        for &v in comp {
            id[v] = c;
        }
    }
    let critical: Vec<usize> = tight
        .iter()
        .copied()
        .filter(|&e| id[edges[e].source] == id[edges[e].target])
        .collect();
    let mut class_edges: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
    for &e in &critical {
        class_edges[id[edges[e].source]].push(e);
    }
    let classes = comps
        .into_iter()
        .zip(class_edges)
        .filter(|(_, es)| !es.is_empty())
        .map(|(vertices, edges)| CriticalClass { vertices, edges })
        .collect();
    (critical, classes)
}

pub fn critical_structure<S: Scalar>(
    g: &WeightedBlockGraph<S>,
    u: &SubAction<S>,
) -> Result<CriticalStructure<S>, MaxPlusError> {
    u.check_len(g)?;
    let mut tight = Vec::new();
    for e in 0..g.edge_count() {
        let d = u.defect(g, e);
        if !d.approx_le(&S::zero()) {
            return Err(MaxPlusError::InvalidSubAction {
                edge: g.graph().edges()[e].word.clone(),
                defect: d.canonical(),
            });
        }
        if d.approx_eq(&S::zero()) {
            tight.push(e);
        }
    }
    let (critical_edges, classes) = tight_cycles(g, &tight);
    Ok(CriticalStructure {
        beta: u.beta.clone(),
        tight_edges: tight,
        critical_edges,
        classes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Valid => "VALID",
            Verdict::Invalid => "INVALID",
        }
    }
}

/// Audit of a candidate sub-action: defects bound `beta` from above, a
/// tight cycle pins it from below.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport<S> {
    pub max_defect: S,
    /// Edge attaining `max_defect`.
    pub worst_edge: Option<usize>,
    pub defects_nonpositive: bool,
    pub tight_cycle: bool,
    pub osc: S,
    pub verdict: Verdict,
}

pub fn check_certificate<S: Scalar>(
    g: &WeightedBlockGraph<S>,
    u: &SubAction<S>,
) -> Result<CertificateReport<S>, MaxPlusError> {
    u.check_len(g)?;
    let defects: Vec<S> = (0..g.edge_count()).map(|e| u.defect(g, e)).collect();
    let worst_edge = (0..defects.len()).reduce(|a, b| if defects[b] > defects[a] { b } else { a });
    let max_defect = worst_edge.map(|e| defects[e].clone()).unwrap_or_else(S::zero);
    let defects_nonpositive = defects.iter().all(|d| d.approx_le(&S::zero()));
    let tight: Vec<usize> = (0..defects.len())
        .filter(|&e| defects[e].approx_eq(&S::zero()))
        .collect();
    let tight_cycle = !tight_cycles(g, &tight).0.is_empty();
    let verdict = if defects_nonpositive && tight_cycle {
        Verdict::Valid
    } else {
        Verdict::Invalid
    };
    Ok(CertificateReport {
        max_defect,
        worst_edge,
        defects_nonpositive,
        tight_cycle,
        osc: u.osc(),
        verdict,
    })
}

/// Whether every vertex has an incoming edge of zero defect.
pub fn is_calibrated<S: Scalar>(g: &WeightedBlockGraph<S>, u: &SubAction<S>) -> bool {
    (0..g.vertex_count()).all(|v| {
        g.graph()
            .in_edges(v)
            .iter()
            .any(|&e| u.defect(g, e).approx_eq(&S::zero()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rational, Rational};

    fn graph(words: &[(&[u32], i64)]) -> WeightedBlockGraph<Rational> {
        WeightedBlockGraph::from_weighted_words(2, words.iter().map(|(w, v)| (w.to_vec(), int(*v))))
            .unwrap()
    }

    fn e1() -> WeightedBlockGraph<Rational> {
        graph(&[(&[0, 0], 0), (&[0, 1], 0), (&[1, 0], 1), (&[1, 1], 1)])
    }

    fn e2() -> WeightedBlockGraph<Rational> {
        graph(&[(&[0, 1], 2), (&[1, 0], 4), (&[1, 2], 0), (&[2, 2], 5), (&[2, 0], 0)])
    }

    fn e4() -> WeightedBlockGraph<Rational> {
        graph(&[(&[0, 1], 10), (&[1, 0], 0)])
    }

    fn values(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn edge_words(g: &WeightedBlockGraph<Rational>, es: &[usize]) -> Vec<Word> {
        es.iter().map(|&e| g.graph().edges()[e].word.clone()).collect()
    }

    #[test]
    fn max_cycle_means() {
        assert_eq!(max_cycle_mean(&e1()).unwrap(), int(1));
        assert_eq!(max_cycle_mean(&e2()).unwrap(), int(5));
        assert_eq!(max_cycle_mean(&e4()).unwrap(), int(5));
        assert_eq!(max_cycle_mean(&graph(&[(&[3, 3], -7)])).unwrap(), int(-7));
        // two components, the lighter one first
        let g = graph(&[(&[0, 0], 1), (&[0, 1], 9), (&[1, 2], 2), (&[2, 1], 3)]);
        assert_eq!(max_cycle_mean(&g).unwrap(), rational(5, 2));
    }

    #[test]
    fn empty_graph_has_no_cycle() {
        let g = graph(&[(&[0, 1], 1)]);
        assert_eq!(g.vertex_count(), 0);
        assert_eq!(max_cycle_mean(&g), Err(MaxPlusError::NoCycle));
    }

    #[test]
    fn calibrated_e1() {
        let u = calibrated_subaction(&e1()).unwrap();
        assert_eq!(u.values, values(&[0, 0]));
        assert_eq!(u.beta, int(1));
    }

    #[test]
    fn calibrated_e2() {
        let g = e2();
        let u = calibrated_subaction(&g).unwrap();
        assert_eq!(u.values, values(&[-5, -8, 0]));
        assert_eq!(u.beta, int(5));
        assert!(is_calibrated(&g, &u));
        let defects: Vec<Rational> = (0..g.edge_count()).map(|e| u.defect(&g, e)).collect();
        // edges sorted: 01, 10, 12, 20, 22
        assert_eq!(defects, values(&[0, -4, -13, 0, 0]));
    }

    #[test]
    fn calibrated_self_loop() {
        let g = graph(&[(&[4, 4], 3)]);
        let u = calibrated_subaction(&g).unwrap();
        assert_eq!(u.values, values(&[0]));
        assert_eq!(u.beta, int(3));
    }

    #[test]
    fn calibrated_rejects_multiple_components() {
        let g = graph(&[(&[0, 0], 1), (&[0, 1], 0), (&[1, 1], 0)]);
        assert_eq!(
            calibrated_subaction(&g),
            Err(MaxPlusError::NotStronglyConnected { components: 2 })
        );
    }

    #[test]
    fn calibrated_in_float_mode() {
        let g: WeightedBlockGraph<f64> = WeightedBlockGraph::from_weighted_words(
            2,
            [(vec![0, 1], 2.0), (vec![1, 0], 4.0), (vec![1, 2], 0.0), (vec![2, 2], 5.0), (vec![2, 0], 0.0)],
        )
        .unwrap();
        let u = calibrated_subaction(&g).unwrap();
        assert_eq!(u.values, vec![-5.0, -8.0, 0.0]);
        assert_eq!(u.beta, 5.0);
    }

    #[test]
    fn minimal_subactions() {
        assert_eq!(minimal_subaction(&e2(), &int(5)).unwrap().values, values(&[0, 0, 0]));
        assert_eq!(minimal_subaction(&e4(), &int(5)).unwrap().values, values(&[0, 5]));
        // beta equal to the heaviest edge makes every normalized weight <= 0
        let g = graph(&[(&[0, 0], 2), (&[0, 1], 1), (&[1, 0], -3)]);
        assert_eq!(minimal_subaction(&g, &int(2)).unwrap().values, values(&[0, 0]));
    }

    #[test]
    fn minimal_subaction_detects_low_beta() {
        assert_eq!(
            minimal_subaction(&e4(), &int(4)),
            Err(MaxPlusError::PositiveCycle { vertex: vec![1] })
        );
    }

    #[test]
    fn finite_horizons() {
        assert_eq!(finite_horizon_bound(&e1(), 3).unwrap(), int(1));
        assert_eq!(finite_horizon_bound(&e4(), 1).unwrap(), int(10));
        assert_eq!(finite_horizon_bound(&e4(), 2).unwrap(), int(5));
        assert_eq!(finite_horizon_bound(&e4(), 3).unwrap(), rational(20, 3));
        assert_eq!(finite_horizon_bound(&e2(), 2).unwrap(), int(5));
        assert_eq!(finite_horizon_bound(&e2(), 0), Err(MaxPlusError::InvalidHorizon));
    }

    #[test]
    fn critical_e2() {
        let g = e2();
        let u = SubAction {
            values: values(&[-5, -8, 0]),
            beta: int(5),
        };
        let cs = critical_structure(&g, &u).unwrap();
        assert_eq!(edge_words(&g, &cs.tight_edges), vec![vec![0, 1], vec![2, 0], vec![2, 2]]);
        assert_eq!(edge_words(&g, &cs.critical_edges), vec![vec![2, 2]]);
        assert_eq!(cs.classes.len(), 1);
        assert_eq!(cs.classes[0].vertices, vec![2]);
    }

    #[test]
    fn critical_e4_is_the_two_cycle() {
        let g = e4();
        let u = minimal_subaction(&g, &int(5)).unwrap();
        let cs = critical_structure(&g, &u).unwrap();
        assert_eq!(cs.tight_edges, vec![0, 1]);
        assert_eq!(cs.critical_edges, vec![0, 1]);
        assert_eq!(cs.classes[0].vertices, vec![0, 1]);
    }

    #[test]
    fn critical_e1_is_the_fixed_point() {
        let g = e1();
        let u = SubAction::constant(2, int(0), int(1));
        let cs = critical_structure(&g, &u).unwrap();
        assert_eq!(edge_words(&g, &cs.tight_edges), vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(edge_words(&g, &cs.critical_edges), vec![vec![1, 1]]);
    }

    #[test]
    fn critical_structure_rejects_positive_defect() {
        let u = SubAction::constant(3, int(0), int(4));
        assert!(matches!(
            critical_structure(&e2(), &u),
            Err(MaxPlusError::InvalidSubAction { .. })
        ));
    }

    #[test]
    fn certificates() {
        let g = e2();
        let u = SubAction {
            values: values(&[-5, -8, 0]),
            beta: int(5),
        };
        let r = check_certificate(&g, &u).unwrap();
        assert_eq!(r.verdict, Verdict::Valid);
        assert_eq!(r.osc, int(8));

        let r = check_certificate(&g, &SubAction::constant(3, int(0), int(4))).unwrap();
        assert_eq!(r.verdict, Verdict::Invalid);
        assert_eq!(r.max_defect, int(1));
        assert_eq!(g.graph().edges()[r.worst_edge.unwrap()].word, vec![2, 2]);

        let r = check_certificate(&g, &SubAction::constant(3, int(0), int(5))).unwrap();
        assert_eq!(r.verdict, Verdict::Valid);

        // heaviest edge on no cycle of that mean
        let h = graph(&[(&[0, 1], 3), (&[1, 0], 0), (&[0, 0], 1)]);
        let r = check_certificate(&h, &SubAction::constant(2, int(0), int(3))).unwrap();
        assert!(r.defects_nonpositive);
        assert_eq!(r.verdict, Verdict::Invalid);

        let short = SubAction::constant(2, int(0), int(5));
        assert!(matches!(
            check_certificate(&g, &short),
            Err(MaxPlusError::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn largest_component_restriction() {
        let g = graph(&[(&[0, 0], 1), (&[0, 1], 0), (&[1, 2], 2), (&[2, 1], 3), (&[2, 3], 0), (&[3, 1], 1)]);
        let big = g.largest_component().unwrap();
        assert_eq!(big.graph().vertices(), &[vec![1], vec![2], vec![3]]);
        assert!(big.is_strongly_connected());
        assert_eq!(big.edge_count(), 4);
    }

    #[test]
    fn subaction_variation_on_words() {
        let g = WeightedBlockGraph::from_weighted_words(
            3,
            [
                (vec![0, 0, 0], int(0)),
                (vec![0, 0, 1], int(1)),
                (vec![0, 1, 0], int(2)),
                (vec![0, 1, 1], int(3)),
                (vec![1, 0, 0], int(4)),
                (vec![1, 0, 1], int(5)),
                (vec![1, 1, 0], int(6)),
                (vec![1, 1, 1], int(7)),
            ],
        )
        .unwrap();
        let u = SubAction {
            values: values(&[0, 3, 1, 2]),
            beta: int(0),
        };
        // 00/01 differ by 3, 10/11 by 1
        assert_eq!(u.variation(&g, 1), int(3));
        assert_eq!(u.variation(&g, 2), int(0));
    }
}
