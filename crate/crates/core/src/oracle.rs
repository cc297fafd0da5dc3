//! Brute-force reference values for small graphs.
//!
//! Nothing here calls into [`crate::maxplus`]; the only shared pieces are
//! the graph types. Cycle means come from enumerating every simple cycle,
//! walk suprema from enumerating the full set of walk sums layer by layer
//! (a set per vertex and length, so distinct walks with equal sums are
//! merged but no maximum is taken before the last step).

use crate::maxplus::WeightedBlockGraph;
use crate::num::Scalar;
use crate::shift::{trim_essential, MarkovGraph, SymbolSet};

/// Largest vertex count the oracles accept.
pub const MAX_VERTICES: usize = 12;
/// Largest walk length the horizon oracle accepts.
pub const MAX_HORIZON: usize = 24;
const MAX_SET_ENTRIES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for the oracle: {0}")]
    TooLarge(String),
    #[error("the graph has no cycle")]
    NoCycle,
    #[error("invalid horizon: {0}")]
    InvalidHorizon(String),
}

impl OracleError {
    pub fn code(&self) -> &'static str {
        match self {
            OracleError::TooLarge(_) => "oracle::TooLarge",
            OracleError::NoCycle => "oracle::NoCycle",
            OracleError::InvalidHorizon(_) => "oracle::InvalidHorizon",
        }
    }
}

fn guard<S: Scalar>(g: &WeightedBlockGraph<S>) -> Result<(), OracleError> {
    if g.vertex_count() > MAX_VERTICES {
        return Err(OracleError::TooLarge(format!(
            "{} vertices (limit {MAX_VERTICES})",
            g.vertex_count()
        )));
    }
    Ok(())
}

/// Every simple directed cycle as an edge sequence starting at its
/// smallest vertex.
pub fn simple_cycles<S: Scalar>(g: &WeightedBlockGraph<S>) -> Result<Vec<Vec<usize>>, OracleError> {
    guard(g)?;
    let graph = g.graph();
    let n = graph.vertex_count();
    let mut out = Vec::new();
    for start in 0..n {
        let mut on_path = vec![false; n];
        let mut path: Vec<usize> = Vec::new();
        extend(graph, start, start, &mut on_path, &mut path, &mut out);
    }
    Ok(out)
}

fn extend(
    graph: &crate::shift::BlockGraph,
    start: usize,
    at: usize,
    on_path: &mut [bool],
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    on_path[at] = true;
    for &e in graph.out_edges(at) {
        let t = graph.edges()[e].target;
        path.push(e);
        if t == start {
            out.push(path.clone());
        } else if t > start && !on_path[t] {
            extend(graph, start, t, on_path, path, out);
        }
        path.pop();
    }
    on_path[at] = false;
}

/// Maximum over all simple cycles of the mean edge weight.
pub fn brute_beta<S: Scalar>(g: &WeightedBlockGraph<S>) -> Result<S, OracleError> {
    simple_cycles(g)?
        .into_iter()
        .map(|c| {
            let total = c.iter().fold(S::zero(), |a, &e| a + g.weight(e).clone());
            total / S::from_count(c.len())
        })
        .reduce(|a, b| if b > a { b } else { a })
        .ok_or(OracleError::NoCycle)
}

fn dedup<S: Scalar>(mut xs: Vec<S>) -> Vec<S> {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("comparable scalars"));
    xs.dedup_by(|a, b| a.approx_eq(b));
    xs
}

/// One layer step: sums of walks one edge longer, keyed by end vertex.
fn step<S: Scalar>(
    g: &WeightedBlockGraph<S>,
    layer: &[Vec<S>],
    shift: &S,
) -> Result<Vec<Vec<S>>, OracleError> {
    let mut next: Vec<Vec<S>> = vec![Vec::new(); g.vertex_count()];
    for (e, edge) in g.graph().edges().iter().enumerate() {
        for s in &layer[edge.source] {
            next[edge.target].push(s.clone() + g.weight(e).clone() - shift.clone());
        }
    }
    let next: Vec<Vec<S>> = next.into_iter().map(dedup).collect();
    let size: usize = next.iter().map(Vec::len).sum();
    if size > MAX_SET_ENTRIES {
        return Err(OracleError::TooLarge(format!("{size} distinct walk sums")));
    }
    Ok(next)
}

/// `sup { S_k(A - beta)(y) : k <= horizon, sigma^k y = w }` per vertex `w`,
/// the empty walk contributing `0`.
pub fn brute_minimal_subaction<S: Scalar>(
    g: &WeightedBlockGraph<S>,
    beta: &S,
    horizon: usize,
) -> Result<Vec<S>, OracleError> {
    guard(g)?;
    if horizon < g.vertex_count() {
        return Err(OracleError::InvalidHorizon(format!(
            "horizon {horizon} is below the vertex count {}",
            g.vertex_count()
        )));
    }
    let n = g.vertex_count();
    let mut layer: Vec<Vec<S>> = vec![vec![S::zero()]; n];
    let mut best: Vec<S> = vec![S::zero(); n];
    for _ in 0..horizon {
        layer = step(g, &layer, beta)?;
        for v in 0..n {
            for s in &layer[v] {
                if *s > best[v] {
                    best[v] = s.clone();
                }
            }
        }
    }
    Ok(best)
}

/// `(1/k) max S_k A` over all walks with exactly `k` edges.
pub fn brute_finite_horizon<S: Scalar>(g: &WeightedBlockGraph<S>, k: usize) -> Result<S, OracleError> {
    guard(g)?;
    if k == 0 {
        return Err(OracleError::InvalidHorizon("k must be at least 1".into()));
    }
    if k > MAX_HORIZON {
        return Err(OracleError::TooLarge(format!("k = {k} (limit {MAX_HORIZON})")));
    }
    let mut layer: Vec<Vec<S>> = vec![vec![S::zero()]; g.vertex_count()];
    for _ in 0..k {
        layer = step(g, &layer, &S::zero())?;
    }
    layer
        .into_iter()
        .flatten()
        .reduce(|a, b| if b > a { b } else { a })
        .map(|m| m / S::from_count(k))
        .ok_or(OracleError::NoCycle)
}

/// 64-bit linear congruential generator; outputs are the high 32 bits.
#[derive(Debug, Clone)]
pub struct Lcg(u64);

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    pub fn next_u32(&mut self) -> u32 {
        self.0 = self
            .0
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        (self.0 >> 32) as u32
    }

    /// Uniform in `0..n` by rejection of the incomplete top block.
    pub fn below(&mut self, n: u32) -> u32 {
        assert!(n > 0);
        let zone = (1u64 << 32) / n as u64 * n as u64;
        loop {
            let x = self.next_u32() as u64;
            if x < zone {
                return (x % n as u64) as u32;
            }
        }
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u32) as i64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomInstance<S> {
    pub graph: WeightedBlockGraph<S>,
    /// Seed that produced `graph`.
    pub seed: u64,
    /// Seeds skipped because their graph trimmed to nothing.
    pub skips: u64,
}

/// Reproducible random trimmed graph with integer weights.
///
/// From `Lcg::new(seed)`: the vertex count is `1 + below(max_vertices)`,
/// the edge density in percent is `25 + below(51)`, then for every ordered
/// pair `(i, j)` in row-major order an edge exists when `below(100)` falls
/// under the density, and an existing edge draws its weight with
/// `range(lo, hi)`. Trimming follows; an empty result retries with
/// `seed + 1`.
pub fn random_instance<S: Scalar>(
    seed: u64,
    max_vertices: u32,
    weight_range: (i64, i64),
) -> RandomInstance<S> {
    let (lo, hi) = weight_range;
    let mut skips = 0;
    let mut current = seed;
    loop {
        let mut rng = Lcg::new(current);
        let n = 1 + rng.below(max_vertices.max(1));
        let density = 25 + rng.below(51);
        let mut edges = Vec::new();
        let mut weight = std::collections::BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                if rng.below(100) < density {
                    edges.push((i, j));
                    weight.insert((i, j), rng.range(lo, hi));
                }
            }
        }
        let g = MarkovGraph::new(SymbolSet::up_to(n - 1), edges).expect("edges inside alphabet");
        let trimmed = trim_essential(&g);
        if !trimmed.is_empty() {
            let graph = WeightedBlockGraph::from_markov(&trimmed, |i, j| {
                S::from_i64(weight[&(i, j)]).expect("integer weight")
            })
            .expect("order 2");
            return RandomInstance {
                graph,
                seed: current,
                skips,
            };
        }
        skips += 1;
        current = current.wrapping_add(1);
    }
}
