//! Finite truncations of countable Markov shifts.
//!
//! A [`MarkovGraph`] is the transition structure `M` restricted to a finite
//! set of symbols. Trimming keeps the symbols that admit an infinite forward
//! itinerary, [`compute_primitivity`] verifies a finite-primitivity
//! certificate `(F, K0)`, and [`lift_blocks`] recodes the shift into its
//! order-`m` block presentation so that range-`m` potentials live on edges.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::num::Scalar;
use crate::potential::CountableModel;

pub type Symbol = u32;

/// A finite word over the alphabet.
pub type Word = Vec<Symbol>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShiftError {
    #[error("transition ({0}, {1}) uses a symbol outside the vertex set")]
    EdgeOutsideAlphabet(Symbol, Symbol),
    #[error("symbol {0} of the connecting set is not an essential vertex")]
    ConnectingSetNotInGraph(Symbol),
    #[error("no uniform connection length K0 <= {cap} through the connecting set")]
    NotFinitelyPrimitive { cap: usize },
    #[error("block order must be at least 2, got {0}")]
    InvalidOrder(usize),
    #[error("the shift has no essential words")]
    EmptyShift,
    #[error("truncation level {level} exceeds the explicit region bound {i_max}")]
    BeyondExplicitRegion { level: Symbol, i_max: Symbol },
    #[error("transition row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
}

impl ShiftError {
    pub fn code(&self) -> &'static str {
        match self {
            ShiftError::EdgeOutsideAlphabet(..) => "shift::EdgeOutsideAlphabet",
            ShiftError::ConnectingSetNotInGraph(_) => "shift::ConnectingSetNotInGraph",
            ShiftError::NotFinitelyPrimitive { .. } => "shift::NotFinitelyPrimitive",
            ShiftError::InvalidOrder(_) => "shift::InvalidOrder",
            ShiftError::EmptyShift => "shift::EmptyShift",
            ShiftError::BeyondExplicitRegion { .. } => "shift::BeyondExplicitRegion",
            ShiftError::MalformedRow { .. } => "shift::MalformedRow",
        }
    }
}

/// Strictly increasing list of symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SymbolSet(Vec<Symbol>);

impl SymbolSet {
    pub fn new<I: IntoIterator<Item = Symbol>>(symbols: I) -> Self {
        let set: BTreeSet<Symbol> = symbols.into_iter().collect();
        SymbolSet(set.into_iter().collect())
    }

    /// `{0, ..., max}`.
    pub fn up_to(max: Symbol) -> Self {
        SymbolSet((0..=max).collect())
    }

    pub fn empty() -> Self {
        SymbolSet(Vec::new())
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.0.binary_search(&s).is_ok()
    }

    pub fn position(&self, s: Symbol) -> Option<usize> {
        self.0.binary_search(&s).ok()
    }

    pub fn max(&self) -> Option<Symbol> {
        self.0.last().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }

    pub fn is_subset(&self, other: &SymbolSet) -> bool {
        self.iter().all(|s| other.contains(s))
    }
}

impl fmt::Display for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Transition structure on a finite symbol set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovGraph {
    vertices: SymbolSet,
    edges: BTreeSet<(Symbol, Symbol)>,
}

impl MarkovGraph {
    pub fn new<I>(vertices: SymbolSet, edges: I) -> Result<Self, ShiftError>
    where
        I: IntoIterator<Item = (Symbol, Symbol)>,
    {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if !vertices.contains(i) || !vertices.contains(j) {
                return Err(ShiftError::EdgeOutsideAlphabet(i, j));
            }
            set.insert((i, j));
        }
        Ok(MarkovGraph {
            vertices,
            edges: set,
        })
    }

    pub fn empty() -> Self {
        MarkovGraph {
            vertices: SymbolSet::empty(),
            edges: BTreeSet::new(),
        }
    }

    /// Every transition allowed.
    pub fn full(vertices: SymbolSet) -> Self {
        let edges = vertices
            .iter()
            .flat_map(|i| vertices.iter().map(move |j| (i, j)))
            .collect();
        MarkovGraph { vertices, edges }
    }

    /// Dense 0/1 rows over the symbols `0..rows.len()`.
    pub fn from_rows<R: AsRef<str>>(rows: &[R]) -> Result<Self, ShiftError> {
        let n = rows.len();
        let mut edges = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(ShiftError::MalformedRow {
                    row: i,
                    reason: format!("expected {n} entries, found {}", row.len()),
                });
            }
            for (j, c) in row.bytes().enumerate() {
                match c {
                    b'1' => edges.push((i as Symbol, j as Symbol)),
                    b'0' => {}
                    _ => {
                        return Err(ShiftError::MalformedRow {
                            row: i,
                            reason: format!("entry {j} is not 0 or 1"),
                        })
                    }
                }
            }
        }
        let top = n.checked_sub(1).map(|m| m as Symbol);
        let vertices = top.map(SymbolSet::up_to).unwrap_or_default();
        MarkovGraph::new(vertices, edges)
    }

    pub fn vertices(&self) -> &SymbolSet {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Symbol, Symbol)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: Symbol, j: Symbol) -> bool {
        self.edges.contains(&(i, j))
    }

    pub fn successors(&self, i: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        self.edges
            .range((i, Symbol::MIN)..=(i, Symbol::MAX))
            .map(|&(_, j)| j)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Keeps symbols `<= max` and the transitions among them. Not trimmed.
    pub fn restrict(&self, max: Symbol) -> MarkovGraph {
        MarkovGraph {
            vertices: SymbolSet::new(self.vertices.iter().filter(|&s| s <= max)),
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|&(i, j)| i <= max && j <= max)
                .collect(),
        }
    }

    /// Subgraph induced by `keep`.
    pub fn induced(&self, keep: &SymbolSet) -> MarkovGraph {
        MarkovGraph {
            vertices: SymbolSet::new(self.vertices.iter().filter(|&s| keep.contains(s))),
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|&(i, j)| keep.contains(i) && keep.contains(j))
                .collect(),
        }
    }

    pub fn is_subgraph_of(&self, other: &MarkovGraph) -> bool {
        self.vertices.is_subset(&other.vertices) && self.edges.is_subset(&other.edges)
    }

    /// Allowed words of length `len` (empty for `len == 0`).
    pub fn words(&self, len: usize) -> Vec<Word> {
        if len == 0 {
            return Vec::new();
        }
        let mut layer: Vec<Word> = self.vertices.iter().map(|s| vec![s]).collect();
        for _ in 1..len {
            layer = layer
                .iter()
                .flat_map(|w| {
                    let last = *w.last().expect("nonempty word");
                    self.successors(last).map(move |j| {
                        let mut next = w.clone();
                        next.push(j);
                        next
                    })
                })
                .collect();
        }
        layer
    }

    pub fn allows(&self, word: &[Symbol]) -> bool {
        word.iter().all(|&s| self.vertices.contains(s))
            && word.windows(2).all(|p| self.has_edge(p[0], p[1]))
    }

    pub fn trim_essential(&self) -> MarkovGraph {
        trim_essential(self)
    }
}

/// Iterated sink removal: the symbols admitting an infinite forward
/// itinerary, with the transitions among them.
pub fn trim_essential(g: &MarkovGraph) -> MarkovGraph {
    let mut alive: BTreeSet<Symbol> = g.vertices.iter().collect();
    loop {
        let dead: Vec<Symbol> = alive
            .iter()
            .copied()
            .filter(|&i| !g.successors(i).any(|j| alive.contains(&j)))
            .collect();
        if dead.is_empty() {
            break;
        }
        for s in dead {
            alive.remove(&s);
        }
    }
    let keep = SymbolSet::new(alive);
    g.induced(&keep)
}

/// Finite-primitivity witness: every ordered pair of essential symbols is
/// joined by a path with exactly `k0` interior symbols, all in `connecting`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitivityCertificate {
    pub connecting: SymbolSet,
    pub k0: usize,
}

impl PrimitivityCertificate {
    /// `I_F`, the largest connecting symbol.
    pub fn i_f(&self) -> Option<Symbol> {
        self.connecting.max()
    }

    /// Exhaustive re-check of the certificate against `g` (trimmed).
    pub fn holds_for(&self, g: &MarkovGraph) -> bool {
        connects_all(g, &self.connecting, self.k0)
    }
}

fn connects_all(g: &MarkovGraph, f: &SymbolSet, k0: usize) -> bool {
    let v = g.vertices();
    let n = v.len();
    let adj = |a: usize, b: usize| g.has_edge(v.as_slice()[a], v.as_slice()[b]);
    let in_f: Vec<bool> = v.iter().map(|s| f.contains(s)).collect();

    // reach[i][l]: some path i -> l1 -> ... -> lk = l with every l_t in F
    let mut reach: Vec<Vec<bool>> = Vec::new();
    for k in 1..=k0 {
        let next: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|l| {
                        in_f[l]
                            && if k == 1 {
                                adj(i, l)
                            } else {
                                (0..n).any(|p| reach[i][p] && adj(p, l))
                            }
                    })
                    .collect()
            })
            .collect();
        reach = next;
    }
    (0..n).all(|i| {
        (0..n).all(|j| {
            if k0 == 0 {
                adj(i, j)
            } else {
                (0..n).any(|l| reach[i][l] && adj(l, j))
            }
        })
    })
}

/// Smallest uniform connection length `K0 <= k0_cap` through `connecting`.
pub fn compute_primitivity(
    g: &MarkovGraph,
    connecting: &SymbolSet,
    k0_cap: usize,
) -> Result<PrimitivityCertificate, ShiftError> {
    if let Some(s) = connecting.iter().find(|&s| !g.vertices().contains(s)) {
        return Err(ShiftError::ConnectingSetNotInGraph(s));
    }
    (0..=k0_cap)
        .find(|&k| connects_all(g, connecting, k))
        .map(|k0| PrimitivityCertificate {
            connecting: connecting.clone(),
            k0,
        })
        .ok_or(ShiftError::NotFinitelyPrimitive { cap: k0_cap })
}

/// Default connecting set: the shortest prefix `{s in V : s <= c}` of the
/// essential symbols that certifies finite primitivity.
pub fn default_certificate(
    g: &MarkovGraph,
    k0_cap: usize,
) -> Result<PrimitivityCertificate, ShiftError> {
    for c in g.vertices().iter() {
        let f = SymbolSet::new(g.vertices().iter().filter(|&s| s <= c));
        if let Ok(cert) = compute_primitivity(g, &f, k0_cap) {
            return Ok(cert);
        }
    }
    Err(ShiftError::NotFinitelyPrimitive { cap: k0_cap })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEdge {
    pub source: usize,
    pub target: usize,
    pub word: Word,
}

/// Order-`m` block presentation: vertices are allowed `(m-1)`-words, edges
/// allowed `m`-words from prefix to suffix. Vertices and edges are sorted
/// lexicographically by word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGraph {
    order: usize,
    vertices: Vec<Word>,
    edges: Vec<BlockEdge>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    vertex_index: BTreeMap<Word, usize>,
    edge_index: BTreeMap<Word, usize>,
}

impl BlockGraph {
    /// Builds the graph spanned by `edge_words` and trims it.
    pub fn from_edge_words<I>(order: usize, edge_words: I) -> Result<Self, ShiftError>
    where
        I: IntoIterator<Item = Word>,
    {
        if order < 2 {
            return Err(ShiftError::InvalidOrder(order));
        }
        let mut words: BTreeSet<Word> = edge_words.into_iter().collect();
        debug_assert!(words.iter().all(|w| w.len() == order));
        // trim: drop edges whose suffix has no outgoing edge
        loop {
            let sources: BTreeSet<&[Symbol]> = words.iter().map(|w| &w[..order - 1]).collect();
            let dead: Vec<Word> = words
                .iter()
                .filter(|w| !sources.contains(&w[1..]))
                .cloned()
                .collect();
            if dead.is_empty() {
                break;
            }
            for w in dead {
                words.remove(&w);
            }
        }
        let vertex_set: BTreeSet<Word> = words
            .iter()
            .flat_map(|w| [w[..order - 1].to_vec(), w[1..].to_vec()])
            .collect();
        let vertices: Vec<Word> = vertex_set.into_iter().collect();
        let vertex_index: BTreeMap<Word, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let edges: Vec<BlockEdge> = words
            .into_iter()
            .map(|w| BlockEdge {
                source: vertex_index[&w[..order - 1]],
                target: vertex_index[&w[1..]],
                word: w,
            })
            .collect();
        let edge_index = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.word.clone(), i))
            .collect();
        let mut in_edges = vec![Vec::new(); vertices.len()];
        let mut out_edges = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            in_edges[e.target].push(i);
            out_edges[e.source].push(i);
        }
        Ok(BlockGraph {
            order,
            vertices,
            edges,
            in_edges,
            out_edges,
            vertex_index,
            edge_index,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vertices(&self) -> &[Word] {
        &self.vertices
    }

    pub fn edges(&self) -> &[BlockEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge indices into `v`, sorted by source word.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Edge indices out of `v`, sorted by target word.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn vertex_of(&self, word: &[Symbol]) -> Option<usize> {
        self.vertex_index.get(word).copied()
    }

    pub fn edge_of(&self, word: &[Symbol]) -> Option<usize> {
        self.edge_index.get(word).copied()
    }

    /// Symbols appearing in any vertex word.
    pub fn symbols(&self) -> SymbolSet {
        SymbolSet::new(self.vertices.iter().flatten().copied())
    }

    /// Subgraph on the edges accepted by `keep`, trimmed again.
    pub fn filter_edges<F: FnMut(usize, &BlockEdge) -> bool>(
        &self,
        mut keep: F,
    ) -> BlockGraph {
        let words: Vec<Word> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, e)| keep(*i, e))
            .map(|(_, e)| e.word.clone())
            .collect();
        BlockGraph::from_edge_words(self.order, words).expect("order already validated")
    }
}

/// Higher-block recoding of the trimmed shift.
pub fn lift_blocks(g: &MarkovGraph, order: usize) -> Result<BlockGraph, ShiftError> {
    if order < 2 {
        return Err(ShiftError::InvalidOrder(order));
    }
    let trimmed = trim_essential(g);
    let bg = BlockGraph::from_edge_words(order, trimmed.words(order))?;
    if bg.is_empty() {
        return Err(ShiftError::EmptyShift);
    }
    Ok(bg)
}

/// `Sigma_I`: the model's explicit graph cut to symbols `<= level`, trimmed.
pub fn truncate<S: Scalar>(
    model: &CountableModel<S>,
    level: Symbol,
) -> Result<MarkovGraph, ShiftError> {
    if level > model.i_max() {
        return Err(ShiftError::BeyondExplicitRegion {
            level,
            i_max: model.i_max(),
        });
    }
    Ok(trim_essential(&model.graph().restrict(level)))
}
