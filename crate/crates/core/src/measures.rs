//! Invariant measures as edge-frequency vectors on a block graph.
//!
//! For a potential of range at most the block order, `integral A dmu` only
//! depends on the masses of edge cylinders, so a measure is a map from edge
//! words to frequencies obeying mass one and flow balance.

use std::collections::{BTreeMap, VecDeque};

use crate::maxplus::{CriticalStructure, WeightedBlockGraph};
use crate::num::Scalar;
use crate::shift::{BlockGraph, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("edge {0:?} is not an edge of the graph")]
    UnsupportedEdge(Word),
    #[error("edges do not form a simple directed cycle: {0}")]
    NotACycle(&'static str),
    #[error("measure is not invariant: {0}")]
    NotInvariant(String),
    #[error("the critical structure has no class")]
    EmptyCritical,
    #[error("support and integral disagree: support in Omega = {in_omega}, integral = {integral}, beta = {beta}")]
    CharacterizationViolation {
        in_omega: bool,
        integral: String,
        beta: String,
    },
}

impl MeasureError {
    pub fn code(&self) -> &'static str {
        match self {
            MeasureError::UnsupportedEdge(_) => "measures::UnsupportedEdge",
            MeasureError::NotACycle(_) => "measures::NotACycle",
            MeasureError::NotInvariant(_) => "measures::NotInvariant",
            MeasureError::EmptyCritical => "measures::EmptyCritical",
            MeasureError::CharacterizationViolation { .. } => "measures::CharacterizationViolation",
        }
    }
}

/// A simple directed cycle, stored as its edge words in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicOrbit {
    edges: Vec<Word>,
}

impl PeriodicOrbit {
    /// Validates a sequence of edge indices of `g` as a simple cycle.
    pub fn new(g: &BlockGraph, edges: &[usize]) -> Result<Self, MeasureError> {
        if edges.is_empty() {
            return Err(MeasureError::NotACycle("empty edge sequence"));
        }
        let all = g.edges();
        if edges.iter().any(|&e| e >= all.len()) {
            return Err(MeasureError::NotACycle("edge index out of range"));
        }
        for (a, b) in edges.iter().zip(edges.iter().cycle().skip(1)) {
            if all[*a].target != all[*b].source {
                return Err(MeasureError::NotACycle("consecutive edges do not chain"));
            }
        }
        let mut seen: Vec<usize> = edges.iter().map(|&e| all[e].source).collect();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != edges.len() {
            return Err(MeasureError::NotACycle("a vertex repeats"));
        }
        Ok(PeriodicOrbit {
            edges: edges.iter().map(|&e| all[e].word.clone()).collect(),
        })
    }

    pub fn edges(&self) -> &[Word] {
        &self.edges
    }

    pub fn period(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantMeasure<S> {
    pub edge_freq: BTreeMap<Word, S>,
}

impl<S: Scalar> InvariantMeasure<S> {
    pub fn support(&self) -> impl Iterator<Item = &Word> {
        self.edge_freq
            .iter()
            .filter(|(_, f)| **f > S::zero())
            .map(|(w, _)| w)
    }

    pub fn mass(&self) -> S {
        self.edge_freq.values().cloned().fold(S::zero(), |a, b| a + b)
    }

    /// Mass one, nonnegative frequencies, and in-flow equal to out-flow at
    /// every vertex word.
    pub fn check_invariant(&self) -> Result<(), MeasureError> {
        if let Some((w, f)) = self.edge_freq.iter().find(|(_, f)| **f < S::zero()) {
            return Err(MeasureError::NotInvariant(format!(
                "edge {w:?} has negative mass {}",
                f.canonical()
            )));
        }
        if !self.mass().approx_eq(&S::one()) {
            return Err(MeasureError::NotInvariant(format!(
                "total mass {}",
                self.mass().canonical()
            )));
        }
        let mut balance: BTreeMap<&[u32], S> = BTreeMap::new();
        for (w, f) in &self.edge_freq {
            let out = balance.entry(&w[..w.len() - 1]).or_insert_with(S::zero);
            *out = out.clone() + f.clone();
            let inn = balance.entry(&w[1..]).or_insert_with(S::zero);
            *inn = inn.clone() - f.clone();
        }
        if let Some((v, b)) = balance.iter().find(|(_, b)| !b.approx_eq(&S::zero())) {
            return Err(MeasureError::NotInvariant(format!(
                "vertex {v:?} has flow imbalance {}",
                b.canonical()
            )));
        }
        Ok(())
    }

    /// `t mu + (1 - t) nu`.
    pub fn blend(&self, t: &S, other: &Self) -> Self {
        let mut edge_freq: BTreeMap<Word, S> = BTreeMap::new();
        let s = S::one() - t.clone();
        for (w, f) in &self.edge_freq {
            edge_freq.insert(w.clone(), t.clone() * f.clone());
        }
        for (w, f) in &other.edge_freq {
            let slot = edge_freq.entry(w.clone()).or_insert_with(S::zero);
            *slot = slot.clone() + s.clone() * f.clone();
        }
        InvariantMeasure { edge_freq }
    }
}

/// Uniform measure on the edges of a periodic orbit.
pub fn cycle_measure<S: Scalar>(c: &PeriodicOrbit) -> InvariantMeasure<S> {
    let mass = S::one() / S::from_count(c.period());
    InvariantMeasure {
        edge_freq: c.edges().iter().map(|w| (w.clone(), mass.clone())).collect(),
    }
}

/// `integral A dmu = sum_e mu(e) A(e)`.
pub fn integrate<S: Scalar>(mu: &InvariantMeasure<S>, g: &WeightedBlockGraph<S>) -> Result<S, MeasureError> {
    let mut total = S::zero();
    for (w, f) in &mu.edge_freq {
        let e = g
            .graph()
            .edge_of(w)
            .ok_or_else(|| MeasureError::UnsupportedEdge(w.clone()))?;
        total = total + f.clone() * g.weight(e).clone();
    }
    Ok(total)
}

/// One critical class with a canonical ergodic maximizing measure on it.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximizingClass<S> {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub cycle: PeriodicOrbit,
    pub measure: InvariantMeasure<S>,
    pub integral: S,
}

/// Shortest cycle inside `allowed` edges, lexicographically smallest
/// among shortest by vertex sequence starting at its smallest vertex.
pub fn shortest_cycle(g: &BlockGraph, allowed: &[usize]) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let mut ok = vec![false; g.edge_count()];
    for &e in allowed {
        ok[e] = true;
    }
    let edges = g.edges();
    let mut best: Option<(Vec<usize>, Vec<usize>)> = None; // (vertex seq, edge seq)
    for s in 0..n {
        // BFS from s over vertices >= s; sorted adjacency and FIFO order give
        // every vertex its lexicographically smallest shortest path
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        let mut closing: Option<usize> = None;
        while let Some(v) = queue.pop_front() {
            if let Some((bv, _)) = &best {
                if dist[v] + 1 > bv.len() {
                    break;
                }
            }
            for &e in g.out_edges(v) {
                if !ok[e] {
                    continue;
                }
                let t = edges[e].target;
                if t == s {
                    closing = Some(e);
                    break;
                }
                if t > s && dist[t] == usize::MAX {
                    dist[t] = dist[v] + 1;
                    parent[t] = Some(e);
                    queue.push_back(t);
                }
            }
            if closing.is_some() {
                break;
            }
        }
        let Some(last) = closing else { continue };
        let mut edge_seq = vec![last];
        let mut v = edges[last].source;
        while v != s {
            let e = parent[v].expect("BFS tree edge");
            edge_seq.push(e);
            v = edges[e].source;
        }
        edge_seq.reverse();
        let vertex_seq: Vec<usize> = edge_seq.iter().map(|&e| edges[e].source).collect();
        let better = match &best {
            None => true,
            Some((bv, _)) => (vertex_seq.len(), &vertex_seq) < (bv.len(), bv),
        };
        if better {
            best = Some((vertex_seq, edge_seq));
        }
    }
    best.map(|(_, e)| e)
}

/// For each critical class, the cycle measure of its shortest
/// (lexicographically smallest) cycle; each integrates to `beta`.
pub fn maximizing_set<S: Scalar>(
    g: &WeightedBlockGraph<S>,
    cs: &CriticalStructure<S>,
) -> Result<Vec<MaximizingClass<S>>, MeasureError> {
    if cs.classes.is_empty() {
        return Err(MeasureError::EmptyCritical);
    }
    cs.classes
        .iter()
        .map(|class| {
            let edges = shortest_cycle(g.graph(), &class.edges).ok_or(MeasureError::EmptyCritical)?;
            let cycle = PeriodicOrbit::new(g.graph(), &edges)?;
            let measure = cycle_measure(&cycle);
            let integral = integrate(&measure, g)?;
            if !integral.approx_eq(&cs.beta) {
                return Err(MeasureError::CharacterizationViolation {
                    in_omega: true,
                    integral: integral.canonical(),
                    beta: cs.beta.canonical(),
                });
            }
            Ok(MaximizingClass {
                vertices: class.vertices.clone(),
                edges: class.edges.clone(),
                cycle,
                measure,
                integral,
            })
        })
        .collect()
}

/// `supp(mu)` inside the critical edges; fails if this disagrees with
/// `integral A dmu = beta`.
pub fn verify_maximizing<S: Scalar>(
    mu: &InvariantMeasure<S>,
    g: &WeightedBlockGraph<S>,
    cs: &CriticalStructure<S>,
) -> Result<bool, MeasureError> {
    let mut in_omega = true;
    for w in mu.support() {
        let e = g
            .graph()
            .edge_of(w)
            .ok_or_else(|| MeasureError::UnsupportedEdge(w.clone()))?;
        in_omega &= cs.is_critical(e);
    }
    let integral = integrate(mu, g)?;
    let maximizing = integral.approx_eq(&cs.beta);
    if in_omega != maximizing {
        return Err(MeasureError::CharacterizationViolation {
            in_omega,
            integral: integral.canonical(),
            beta: cs.beta.canonical(),
        });
    }
    Ok(in_omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxplus::{calibrated_subaction, critical_structure, minimal_subaction, SubAction};
    use crate::num::{int, rational, Rational};

    fn graph(words: &[(&[u32], i64)]) -> WeightedBlockGraph<Rational> {
        WeightedBlockGraph::from_weighted_words(2, words.iter().map(|(w, v)| (w.to_vec(), int(*v))))
            .unwrap()
    }

    fn e2() -> WeightedBlockGraph<Rational> {
        graph(&[(&[0, 1], 2), (&[1, 0], 4), (&[1, 2], 0), (&[2, 2], 5), (&[2, 0], 0)])
    }

    fn e4() -> WeightedBlockGraph<Rational> {
        graph(&[(&[0, 1], 10), (&[1, 0], 0)])
    }

    fn orbit(g: &WeightedBlockGraph<Rational>, words: &[&[u32]]) -> PeriodicOrbit {
        let es: Vec<usize> = words.iter().map(|w| g.graph().edge_of(w).unwrap()).collect();
        PeriodicOrbit::new(g.graph(), &es).unwrap()
    }

    #[test]
    fn cycle_measures() {
        let g = e2();
        let loop2: InvariantMeasure<Rational> = cycle_measure(&orbit(&g, &[&[2, 2]]));
        assert_eq!(loop2.edge_freq, [(vec![2, 2], int(1))].into_iter().collect());
        let tri: InvariantMeasure<Rational> = cycle_measure(&orbit(&g, &[&[0, 1], &[1, 2], &[2, 0]]));
        assert!(tri.edge_freq.values().all(|f| *f == rational(1, 3)));
        tri.check_invariant().unwrap();
        let two: InvariantMeasure<Rational> = cycle_measure(&orbit(&e4(), &[&[0, 1], &[1, 0]]));
        assert_eq!(two.edge_freq[&vec![0, 1]], rational(1, 2));
        two.check_invariant().unwrap();
    }

    #[test]
    fn rejects_non_cycles() {
        let g = e2();
        let a = g.graph().edge_of(&[0, 1]).unwrap();
        let b = g.graph().edge_of(&[2, 2]).unwrap();
        assert!(PeriodicOrbit::new(g.graph(), &[a, b]).is_err());
        assert!(PeriodicOrbit::new(g.graph(), &[]).is_err());
        assert!(PeriodicOrbit::new(g.graph(), &[99]).is_err());
        let c = g.graph().edge_of(&[1, 0]).unwrap();
        // 0 -> 1 -> 0 -> 1 -> 0 repeats vertices
        assert!(PeriodicOrbit::new(g.graph(), &[a, c, a, c]).is_err());
    }

    #[test]
    fn integrals() {
        let g = e2();
        let loop2 = cycle_measure::<Rational>(&orbit(&g, &[&[2, 2]]));
        assert_eq!(integrate(&loop2, &g).unwrap(), int(5));
        let two = cycle_measure::<Rational>(&orbit(&g, &[&[0, 1], &[1, 0]]));
        assert_eq!(integrate(&two, &g).unwrap(), int(3));
        let e4 = e4();
        let m = cycle_measure::<Rational>(&orbit(&e4, &[&[0, 1], &[1, 0]]));
        assert_eq!(integrate(&m, &e4).unwrap(), int(5));
        assert_eq!(
            integrate(&loop2, &e4),
            Err(MeasureError::UnsupportedEdge(vec![2, 2]))
        );
    }

    #[test]
    fn imbalance_is_detected() {
        let mu: InvariantMeasure<Rational> = InvariantMeasure {
            edge_freq: [(vec![0, 1], int(1))].into_iter().collect(),
        };
        assert!(matches!(mu.check_invariant(), Err(MeasureError::NotInvariant(_))));
    }

    #[test]
    fn maximizing_sets() {
        let g = e2();
        let u = calibrated_subaction(&g).unwrap();
        let cs = critical_structure(&g, &u).unwrap();
        let set = maximizing_set(&g, &cs).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set[0].vertices, vec![2]);
        assert_eq!(set[0].integral, int(5));
        assert_eq!(set[0].measure.edge_freq[&vec![2, 2]], int(1));

        let g = e4();
        let cs = critical_structure(&g, &minimal_subaction(&g, &int(5)).unwrap()).unwrap();
        let set = maximizing_set(&g, &cs).unwrap();
        assert_eq!(set[0].vertices, vec![0, 1]);
        assert_eq!(set[0].cycle.period(), 2);
        assert_eq!(set[0].integral, int(5));

        let g = graph(&[(&[0, 0], 7), (&[0, 1], 0), (&[1, 0], 0), (&[1, 1], 7)]);
        let cs = critical_structure(&g, &calibrated_subaction(&g).unwrap()).unwrap();
        let set = maximizing_set(&g, &cs).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.iter().all(|c| c.integral == int(7)));
    }

    #[test]
    fn shortest_cycle_prefers_short_then_lexicographic() {
        let g = graph(&[(&[0, 1], 0), (&[1, 0], 0), (&[1, 2], 0), (&[2, 0], 0), (&[2, 1], 0), (&[0, 2], 0)]);
        let all: Vec<usize> = (0..g.edge_count()).collect();
        let c = shortest_cycle(g.graph(), &all).unwrap();
        let words: Vec<Word> = c.iter().map(|&e| g.graph().edges()[e].word.clone()).collect();
        assert_eq!(words, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn verification_matches_integrals() {
        let g = e2();
        let cs = critical_structure(
            &g,
            &SubAction {
                values: vec![int(-5), int(-8), int(0)],
                beta: int(5),
            },
        )
        .unwrap();
        let loop2 = cycle_measure::<Rational>(&orbit(&g, &[&[2, 2]]));
        assert_eq!(verify_maximizing(&loop2, &g, &cs), Ok(true));
        let two = cycle_measure::<Rational>(&orbit(&g, &[&[0, 1], &[1, 0]]));
        assert_eq!(verify_maximizing(&two, &g, &cs), Ok(false));
        let blend = loop2.blend(&rational(1, 2), &two);
        blend.check_invariant().unwrap();
        assert_eq!(integrate(&blend, &g).unwrap(), int(4));
        assert_eq!(verify_maximizing(&blend, &g, &cs), Ok(false));
    }

    #[test]
    fn inconsistent_structure_is_reported() {
        let g = e2();
        // a critical structure claiming the 01 cycle is critical
        let forged = CriticalStructure {
            beta: int(5),
            tight_edges: vec![0, 1],
            critical_edges: vec![0, 1],
            classes: vec![],
        };
        let two = cycle_measure::<Rational>(&orbit(&g, &[&[0, 1], &[1, 0]]));
        assert!(matches!(
            verify_maximizing(&two, &g, &forged),
            Err(MeasureError::CharacterizationViolation { .. })
        ));
        assert_eq!(maximizing_set(&g, &forged), Err(MeasureError::EmptyCritical));
    }
}
