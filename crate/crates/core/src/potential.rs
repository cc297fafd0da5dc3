//! Finite-range potentials, their variations, and the countable models built
//! around them.

use std::collections::BTreeMap;

use crate::maxplus::WeightedBlockGraph;
use crate::num::{max_all, min_all, powi, Scalar};
use crate::shift::{
    trim_essential, BlockGraph, MarkovGraph, PrimitivityCertificate, Symbol, SymbolSet, Word,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PotentialError {
    #[error("potential range must be at least 1")]
    ZeroRange,
    #[error("word {0:?} is not allowed by the transition structure")]
    DisallowedWord(Word),
    #[error("word {0:?} has length {1}, expected the potential range")]
    WrongLength(Word, usize),
    #[error("word {0:?} appears twice in the table")]
    DuplicateWord(Word),
    #[error("allowed word {0:?} has no weight")]
    MissingWord(Word),
    #[error("itinerary of length {len} is shorter than range - 1 = {need}")]
    ShortItinerary { len: usize, need: usize },
    #[error("no table word starts with a connecting symbol")]
    EmptyConnectingSet,
    #[error("the table is empty")]
    EmptyTable,
    #[error("block order {order} is below the potential range {range}")]
    OrderBelowRange { order: usize, range: usize },
    #[error("invalid Hoelder model: {0}")]
    InvalidHoelder(&'static str),
    #[error("invalid tail: {0}")]
    InvalidTail(&'static str),
}

impl PotentialError {
    pub fn code(&self) -> &'static str {
        match self {
            PotentialError::ZeroRange => "potential::ZeroRange",
            PotentialError::DisallowedWord(_) => "potential::DisallowedWord",
            PotentialError::WrongLength(..) => "potential::WrongLength",
            PotentialError::DuplicateWord(_) => "potential::DuplicateWord",
            PotentialError::MissingWord(_) => "potential::MissingWord",
            PotentialError::ShortItinerary { .. } => "potential::ShortItinerary",
            PotentialError::EmptyConnectingSet => "potential::EmptyConnectingSet",
            PotentialError::EmptyTable => "potential::EmptyTable",
            PotentialError::OrderBelowRange { .. } => "potential::OrderBelowRange",
            PotentialError::InvalidHoelder(_) => "potential::InvalidHoelder",
            PotentialError::InvalidTail(_) => "potential::InvalidTail",
        }
    }
}

/// A potential depending on the first `range` coordinates, stored as a
/// weight per allowed word of that length.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<S> {
    range: usize,
    weights: BTreeMap<Word, S>,
    graph: MarkovGraph,
}

impl<S: Scalar> Potential<S> {
    /// Every allowed word of the trimmed graph must be weighted; words that
    /// are allowed but not essential may be weighted too.
    pub fn new<I>(graph: &MarkovGraph, range: usize, table: I) -> Result<Self, PotentialError>
    where
        I: IntoIterator<Item = (Word, S)>,
    {
        if range == 0 {
            return Err(PotentialError::ZeroRange);
        }
        let mut weights = BTreeMap::new();
        for (word, value) in table {
            if word.len() != range {
                let len = word.len();
                return Err(PotentialError::WrongLength(word, len));
            }
            if !graph.allows(&word) {
                return Err(PotentialError::DisallowedWord(word));
            }
            if weights.contains_key(&word) {
                return Err(PotentialError::DuplicateWord(word));
            }
            weights.insert(word, value);
        }
        if let Some(missing) = trim_essential(graph)
            .words(range)
            .into_iter()
            .find(|w| !weights.contains_key(w))
        {
            return Err(PotentialError::MissingWord(missing));
        }
        Ok(Potential {
            range,
            weights,
            graph: graph.clone(),
        })
    }

    /// Tabulates `f` on every allowed word of length `range`.
    pub fn from_fn<F: Fn(&[Symbol]) -> S>(graph: &MarkovGraph, range: usize, f: F) -> Self {
        assert!(range >= 1, "potential range must be at least 1");
        let weights = graph
            .words(range)
            .into_iter()
            .map(|w| {
                let v = f(&w);
                (w, v)
            })
            .collect();
        Potential {
            range,
            weights,
            graph: graph.clone(),
        }
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn graph(&self) -> &MarkovGraph {
        &self.graph
    }

    pub fn weights(&self) -> &BTreeMap<Word, S> {
        &self.weights
    }

    pub fn value(&self, word: &[Symbol]) -> Option<&S> {
        self.weights.get(word)
    }

    /// Smallest block order carrying this potential on edges.
    pub fn block_order(&self) -> usize {
        self.range.max(2)
    }

    /// `S_k A` along an itinerary of length `k + range - 1`.
    pub fn birkhoff_sum(&self, itinerary: &[Symbol]) -> Result<S, PotentialError> {
        let need = self.range - 1;
        if itinerary.len() < need {
            return Err(PotentialError::ShortItinerary {
                len: itinerary.len(),
                need,
            });
        }
        if !self.graph.allows(itinerary) {
            return Err(PotentialError::DisallowedWord(itinerary.to_vec()));
        }
        let mut sum = S::zero();
        for w in itinerary.windows(self.range) {
            let v = self
                .weights
                .get(w)
                .ok_or_else(|| PotentialError::MissingWord(w.to_vec()))?;
            sum = sum + v.clone();
        }
        Ok(sum)
    }

    /// `Var_k(A)`: largest `A(x) - A(y)` over words agreeing on their first
    /// `k` letters. Zero for `k >= range`.
    pub fn variation(&self, k: usize) -> S {
        assert!(k >= 1, "Var_k is defined for k >= 1");
        if k >= self.range {
            return S::zero();
        }
        let mut groups: BTreeMap<&[Symbol], (S, S)> = BTreeMap::new();
        for (w, v) in &self.weights {
            groups
                .entry(&w[..k])
                .and_modify(|(lo, hi)| {
                    *lo = lo.clone().min_of(v.clone());
                    *hi = hi.clone().max_of(v.clone());
                })
                .or_insert_with(|| (v.clone(), v.clone()));
        }
        groups
            .into_values()
            .map(|(lo, hi)| hi - lo)
            .reduce(|a, b| a.max_of(b))
            .unwrap_or_else(S::zero)
    }

    /// Largest weight among words starting with `symbol`.
    pub fn sup_on_cylinder(&self, symbol: Symbol) -> Option<S> {
        max_all(
            self.weights
                .range(vec![symbol]..)
                .take_while(|(w, _)| w[0] == symbol)
                .map(|(_, v)| v),
        )
    }

    pub fn summarize(
        &self,
        cert: &PrimitivityCertificate,
    ) -> Result<VariationSummary<S>, PotentialError> {
        summarize(self, &cert.connecting)
    }

    /// Attaches the weights to a block graph of order at least `range`.
    pub fn weigh(&self, graph: BlockGraph) -> Result<WeightedBlockGraph<S>, PotentialError> {
        if graph.order() < self.range {
            return Err(PotentialError::OrderBelowRange {
                order: graph.order(),
                range: self.range,
            });
        }
        let weights = graph
            .edges()
            .iter()
            .map(|e| {
                self.weights
                    .get(&e.word[..self.range])
                    .cloned()
                    .ok_or_else(|| PotentialError::MissingWord(e.word[..self.range].to_vec()))
            })
            .collect::<Result<Vec<S>, _>>()?;
        Ok(WeightedBlockGraph::new(graph, weights))
    }
}

pub fn birkhoff_sum<S: Scalar>(p: &Potential<S>, itinerary: &[Symbol]) -> Result<S, PotentialError> {
    p.birkhoff_sum(itinerary)
}

pub fn variation<S: Scalar>(p: &Potential<S>, k: usize) -> S {
    p.variation(k)
}

/// The scalar constants feeding every bound: `Var_k`, `Var`, `sup A` and
/// `inf A` over the connecting cylinders.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationSummary<S> {
    /// `Var_1, ..., Var_{range-1}`.
    pub var_k: Vec<S>,
    pub var_total: S,
    pub sup: S,
    pub inf_on_f: S,
    /// `sup A - inf A`; diagnostic only.
    pub var_0: S,
}

impl<S: Scalar> VariationSummary<S> {
    /// `Var_k`, zero beyond the stored range.
    pub fn var(&self, k: usize) -> S {
        assert!(k >= 1);
        self.var_k.get(k - 1).cloned().unwrap_or_else(S::zero)
    }

    /// `sum_{j=1}^{k} Var_j`.
    pub fn var_prefix(&self, k: usize) -> S {
        self.var_k
            .iter()
            .take(k)
            .cloned()
            .fold(S::zero(), |a, b| a + b)
    }

    /// `sum_{j>=k} Var_j`.
    pub fn var_tail(&self, k: usize) -> S {
        self.var_k
            .iter()
            .skip(k.saturating_sub(1))
            .cloned()
            .fold(S::zero(), |a, b| a + b)
    }

    /// `Var(A) + K0 (sup A - inf A|F)`: the oscillation bound for calibrated
    /// sub-actions.
    pub fn oscillation_bound(&self, k0: usize) -> S {
        self.var_total.clone() + S::from_count(k0) * (self.sup.clone() - self.inf_on_f.clone())
    }
}

pub fn summarize<S: Scalar>(
    p: &Potential<S>,
    connecting: &SymbolSet,
) -> Result<VariationSummary<S>, PotentialError> {
    let sup = max_all(p.weights.values()).ok_or(PotentialError::EmptyTable)?;
    let inf = min_all(p.weights.values()).ok_or(PotentialError::EmptyTable)?;
    let inf_on_f = min_all(
        p.weights
            .iter()
            .filter(|(w, _)| connecting.contains(w[0]))
            .map(|(_, v)| v),
    )
    .ok_or(PotentialError::EmptyConnectingSet)?;
    let var_k: Vec<S> = (1..p.range).map(|k| p.variation(k)).collect();
    let var_total = var_k.iter().cloned().fold(S::zero(), |a, b| a + b);
    Ok(VariationSummary {
        var_k,
        var_total,
        var_0: sup.clone() - inf,
        sup,
        inf_on_f,
    })
}

/// Declared Hoelder regularity: `Var_k(A) <= h * lambda^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoelderModel<S> {
    pub h: S,
    pub lambda: S,
}

impl<S: Scalar> HoelderModel<S> {
    pub fn new(h: S, lambda: S) -> Result<Self, PotentialError> {
        if h < S::zero() {
            return Err(PotentialError::InvalidHoelder("H must be nonnegative"));
        }
        if !(lambda > S::zero() && lambda < S::one()) {
            return Err(PotentialError::InvalidHoelder("lambda must lie in (0, 1)"));
        }
        Ok(HoelderModel { h, lambda })
    }

    /// `h * lambda^k`.
    pub fn var_k_bound(&self, k: usize) -> S {
        self.h.clone() * powi(&self.lambda, k)
    }

    /// `h * lambda / (1 - lambda)`, the geometric bound on `Var(A)`.
    pub fn var_bound(&self) -> S {
        self.h.clone() * self.lambda.clone() / (S::one() - self.lambda.clone())
    }

    /// `h / (1 - lambda) * lambda^k`, the bound on `Var_k` of the minimal
    /// sub-action.
    pub fn subaction_var_bound(&self, k: usize) -> S {
        self.h.clone() / (S::one() - self.lambda.clone()) * powi(&self.lambda, k)
    }

    /// Whether the declared bound dominates every computed `Var_k` of `p`.
    pub fn dominates(&self, p: &Potential<S>) -> bool {
        (1..p.range()).all(|k| p.variation(k).approx_le(&self.var_k_bound(k)))
    }
}

pub fn hoelder_var_bound<S: Scalar>(h: &HoelderModel<S>) -> S {
    h.var_bound()
}

/// Upper bound `tau(i) >= sup A|[i]` for symbols beyond the explicit region.
#[derive(Debug, Clone, PartialEq)]
pub enum Tail<S> {
    /// `tau(i) = slope * i + offset`.
    Affine { slope: S, offset: S },
    /// Step function through the listed points, continued with `slope`
    /// after the last one.
    Table { entries: BTreeMap<Symbol, S>, slope: S },
}

impl<S: Scalar> Tail<S> {
    pub fn table(entries: BTreeMap<Symbol, S>, slope: S) -> Result<Self, PotentialError> {
        if entries.is_empty() {
            return Err(PotentialError::InvalidTail("table tail needs at least one entry"));
        }
        Ok(Tail::Table { entries, slope })
    }

    pub fn value(&self, i: Symbol) -> S {
        match self {
            Tail::Affine { slope, offset } => slope.clone() * S::from_count(i as usize) + offset.clone(),
            Tail::Table { entries, slope } => {
                let (&last_key, last) = entries.iter().next_back().expect("nonempty table");
                if i >= last_key {
                    return last.clone() + slope.clone() * S::from_count((i - last_key) as usize);
                }
                match entries.range(..=i).next_back() {
                    Some((_, v)) => v.clone(),
                    None => entries.values().next().expect("nonempty table").clone(),
                }
            }
        }
    }

    pub fn is_nonincreasing(&self) -> bool {
        match self {
            Tail::Affine { slope, .. } => *slope <= S::zero(),
            Tail::Table { entries, slope } => {
                *slope <= S::zero()
                    && entries
                        .values()
                        .zip(entries.values().skip(1))
                        .all(|(a, b)| b <= a)
            }
        }
    }

    /// `sup { tau(i) : i >= from }`, or `None` when the tail grows without
    /// bound.
    pub fn sup_from(&self, from: Symbol) -> Option<S> {
        match self {
            Tail::Affine { slope, .. } => (*slope <= S::zero()).then(|| self.value(from)),
            Tail::Table { entries, slope } => {
                if *slope > S::zero() {
                    return None;
                }
                let later = entries.range(from..).map(|(_, v)| v);
                max_all(later.chain(std::iter::once(&self.value(from))))
            }
        }
    }

    /// `tau(i) -> -infinity`.
    pub fn decays(&self) -> bool {
        match self {
            Tail::Affine { slope, .. } | Tail::Table { slope, .. } => *slope < S::zero(),
        }
    }
}

/// A countable Markov shift given by an explicit region `{0, ..., i_max}`,
/// a tail bound beyond it, and declared global constants.
///
/// With `tail == None` the model is a finite-alphabet shift.
#[derive(Debug, Clone, PartialEq)]
pub struct CountableModel<S> {
    potential: Potential<S>,
    i_max: Symbol,
    tail: Option<Tail<S>>,
    declared_sup: S,
    declared_var_total: S,
}

impl<S: Scalar> CountableModel<S> {
    pub fn new(
        potential: Potential<S>,
        i_max: Symbol,
        tail: Option<Tail<S>>,
        declared_sup: S,
        declared_var_total: S,
    ) -> Self {
        CountableModel {
            potential,
            i_max,
            tail,
            declared_sup,
            declared_var_total,
        }
    }

    /// Finite-alphabet model whose declared constants are the computed ones.
    pub fn finite(potential: Potential<S>) -> Self {
        let sup = max_all(potential.weights.values()).unwrap_or_else(S::zero);
        let var = (1..potential.range())
            .map(|k| potential.variation(k))
            .fold(S::zero(), |a, b| a + b);
        let i_max = potential.graph().vertices().max().unwrap_or(0);
        CountableModel::new(potential, i_max, None, sup, var)
    }

    pub fn graph(&self) -> &MarkovGraph {
        self.potential.graph()
    }

    pub fn potential(&self) -> &Potential<S> {
        &self.potential
    }

    pub fn i_max(&self) -> Symbol {
        self.i_max
    }

    pub fn tail(&self) -> Option<&Tail<S>> {
        self.tail.as_ref()
    }

    pub fn declared_sup(&self) -> &S {
        &self.declared_sup
    }

    pub fn declared_var_total(&self) -> &S {
        &self.declared_var_total
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_none()
    }
}

/// First invariant of a [`CountableModel`] found broken.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation<S> {
    SymbolBeyondRegion { symbol: Symbol, i_max: Symbol },
    EmptyTable,
    SupUnderstated { declared: S, explicit: S },
    VariationUnderstated { declared: S, explicit: S },
    TailNotMonotone,
    TailDoesNotDecay,
    TailBelowSup { symbol: Symbol, tail: S, sup: S },
}

impl<S> Violation<S> {
    /// Violations about the shape of the tail only; a directly supplied
    /// truncation level does not need a monotone decaying tail.
    pub fn concerns_tail_shape(&self) -> bool {
        matches!(self, Violation::TailNotMonotone | Violation::TailDoesNotDecay)
    }
}

impl<S: Scalar> std::fmt::Display for Violation<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::SymbolBeyondRegion { symbol, i_max } => {
                write!(f, "symbol {symbol} lies beyond i_max = {i_max}")
            }
            Violation::EmptyTable => write!(f, "the potential table is empty"),
            Violation::SupUnderstated { declared, explicit } => write!(
                f,
                "declared sup A = {} is below the explicit sup {}",
                declared.canonical(),
                explicit.canonical()
            ),
            Violation::VariationUnderstated { declared, explicit } => write!(
                f,
                "declared Var(A) = {} is below the explicit variation sum {}",
                declared.canonical(),
                explicit.canonical()
            ),
            Violation::TailNotMonotone => write!(f, "tail bound is not nonincreasing"),
            Violation::TailDoesNotDecay => write!(f, "tail bound does not tend to -infinity"),
            Violation::TailBelowSup { symbol, tail, sup } => write!(
                f,
                "tail bound {} at symbol {symbol} is below sup A|[{symbol}] = {}",
                tail.canonical(),
                sup.canonical()
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<S> {
    pub violation: Option<Violation<S>>,
    pub explicit_sup: S,
    pub explicit_var_total: S,
}

impl<S> ValidationReport<S> {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn validate_countable<S: Scalar>(model: &CountableModel<S>) -> ValidationReport<S> {
    let p = model.potential();
    let explicit_sup = max_all(p.weights().values()).unwrap_or_else(S::zero);
    let explicit_var_total = (1..p.range())
        .map(|k| p.variation(k))
        .fold(S::zero(), |a, b| a + b);
    let violation = first_violation(model, &explicit_sup, &explicit_var_total);
    ValidationReport {
        violation,
        explicit_sup,
        explicit_var_total,
    }
}

fn first_violation<S: Scalar>(
    model: &CountableModel<S>,
    explicit_sup: &S,
    explicit_var: &S,
) -> Option<Violation<S>> {
    if let Some(symbol) = model.graph().vertices().iter().find(|&s| s > model.i_max()) {
        return Some(Violation::SymbolBeyondRegion {
            symbol,
            i_max: model.i_max(),
        });
    }
    if model.potential.weights.is_empty() {
        return Some(Violation::EmptyTable);
    }
    if !explicit_sup.approx_le(model.declared_sup()) {
        return Some(Violation::SupUnderstated {
            declared: model.declared_sup().clone(),
            explicit: explicit_sup.clone(),
        });
    }
    if !explicit_var.approx_le(model.declared_var_total()) {
        return Some(Violation::VariationUnderstated {
            declared: model.declared_var_total().clone(),
            explicit: explicit_var.clone(),
        });
    }
    let tail = model.tail()?;
    for symbol in model.graph().vertices().iter() {
        if let Some(sup) = model.potential().sup_on_cylinder(symbol) {
            let bound = tail.value(symbol);
            if !sup.approx_le(&bound) {
                return Some(Violation::TailBelowSup {
                    symbol,
                    tail: bound,
                    sup,
                });
            }
        }
    }
    if !tail.is_nonincreasing() {
        return Some(Violation::TailNotMonotone);
    }
    if !tail.decays() {
        return Some(Violation::TailDoesNotDecay);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rational, Rational};
    use crate::shift::SymbolSet;

    fn e1() -> Potential<Rational> {
        let g = MarkovGraph::full(SymbolSet::up_to(1));
        Potential::from_fn(&g, 1, |w| int(w[0] as i64))
    }

    pub(crate) fn e2() -> Potential<Rational> {
        let g = MarkovGraph::new(
            SymbolSet::up_to(2),
            [(0, 1), (1, 0), (1, 2), (2, 2), (2, 0)],
        )
        .unwrap();
        let table = [
            (vec![0, 1], 2),
            (vec![1, 0], 4),
            (vec![1, 2], 0),
            (vec![2, 2], 5),
            (vec![2, 0], 0),
        ];
        Potential::new(&g, 2, table.into_iter().map(|(w, v)| (w, int(v)))).unwrap()
    }

    fn e3(tail: Tail<Rational>) -> CountableModel<Rational> {
        let g = MarkovGraph::full(SymbolSet::up_to(8));
        let p = Potential::from_fn(&g, 1, |w| int(-(w[0] as i64)));
        CountableModel::new(p, 8, Some(tail), int(0), int(0))
    }

    #[test]
    fn birkhoff_sums() {
        assert_eq!(e1().birkhoff_sum(&[1, 1, 1]).unwrap(), int(3));
        assert_eq!(e2().birkhoff_sum(&[0, 1, 0]).unwrap(), int(6));
        assert_eq!(e1().birkhoff_sum(&[]).unwrap(), int(0));
        assert_eq!(e2().birkhoff_sum(&[2]).unwrap(), int(0));
        assert_eq!(
            e2().birkhoff_sum(&[0, 2]),
            Err(PotentialError::DisallowedWord(vec![0, 2]))
        );
        assert!(matches!(
            e2().birkhoff_sum(&[]),
            Err(PotentialError::ShortItinerary { len: 0, need: 1 })
        ));
    }

    #[test]
    fn variations() {
        assert_eq!(e1().variation(1), int(0));
        assert_eq!(e2().variation(1), int(5));
        assert_eq!(e2().variation(2), int(0));
        assert_eq!(e2().variation(7), int(0));
    }

    #[test]
    fn summaries() {
        let s = summarize(&e2(), &SymbolSet::up_to(2)).unwrap();
        assert_eq!((s.sup.clone(), s.inf_on_f.clone(), s.var_total.clone()), (int(5), int(0), int(5)));
        assert_eq!(s.oscillation_bound(2), int(15));
        let s = summarize(&e1(), &SymbolSet::new([0])).unwrap();
        assert_eq!((s.sup, s.inf_on_f, s.var_total), (int(1), int(0), int(0)));

        let g = MarkovGraph::full(SymbolSet::up_to(3));
        let c = Potential::from_fn(&g, 2, |_| rational(-7, 3));
        let s = summarize(&c, &SymbolSet::new([1])).unwrap();
        assert_eq!(s.sup, rational(-7, 3));
        assert_eq!(s.inf_on_f, rational(-7, 3));
        assert_eq!(s.var_total, int(0));
        assert_eq!(s.var_0, int(0));
    }

    #[test]
    fn table_must_be_total_and_allowed() {
        let g = MarkovGraph::full(SymbolSet::up_to(1));
        let err = Potential::new(&g, 1, [(vec![0], int(1))]).unwrap_err();
        assert_eq!(err, PotentialError::MissingWord(vec![1]));
        let g2 = e2().graph().clone();
        let err = Potential::new(&g2, 2, [(vec![0, 0], int(1))]).unwrap_err();
        assert_eq!(err, PotentialError::DisallowedWord(vec![0, 0]));
        let err = Potential::new(&g2, 2, [(vec![0], int(1))]).unwrap_err();
        assert!(matches!(err, PotentialError::WrongLength(..)));
        let err =
            Potential::new(&g, 1, [(vec![0], int(1)), (vec![0], int(2))]).unwrap_err();
        assert_eq!(err, PotentialError::DuplicateWord(vec![0]));
    }

    #[test]
    fn hoelder_bounds() {
        let h = HoelderModel::new(int(2), rational(1, 2)).unwrap();
        assert_eq!(hoelder_var_bound(&h), int(2));
        let h = HoelderModel::new(int(1), rational(9, 10)).unwrap();
        assert_eq!(hoelder_var_bound(&h), int(9));
        let h = HoelderModel::new(int(0), rational(1, 3)).unwrap();
        assert_eq!(hoelder_var_bound(&h), int(0));
        assert!(HoelderModel::new(int(1), int(1)).is_err());
        assert!(HoelderModel::new(int(-1), rational(1, 2)).is_err());

        // Var_1(E2) = 5 <= 10 * (1/2)
        let h = HoelderModel::new(int(10), rational(1, 2)).unwrap();
        assert!(h.dominates(&e2()));
        assert!(h.var_bound() >= summarize(&e2(), &SymbolSet::up_to(2)).unwrap().var_total);
        let h = HoelderModel::new(int(9), rational(1, 2)).unwrap();
        assert!(!h.dominates(&e2()));
    }

    #[test]
    fn tails() {
        let t = Tail::Affine {
            slope: int(-1),
            offset: int(5),
        };
        assert_eq!(t.value(7), int(-2));
        let entries: BTreeMap<Symbol, Rational> =
            [(3, int(0)), (5, int(-4))].into_iter().collect();
        let t = Tail::table(entries, int(-2)).unwrap();
        assert_eq!(t.value(0), int(0));
        assert_eq!(t.value(4), int(0));
        assert_eq!(t.value(5), int(-4));
        assert_eq!(t.value(8), int(-10));
        assert!(t.is_nonincreasing() && t.decays());
        assert_eq!(t.sup_from(4), Some(int(0)));
        assert_eq!(t.sup_from(6), Some(int(-6)));
        let bumpy = Tail::table([(3, int(-5)), (6, int(-1))].into_iter().collect(), int(-1)).unwrap();
        assert!(!bumpy.is_nonincreasing());
        assert_eq!(bumpy.sup_from(4), Some(int(-1)));
        let rising = Tail::Affine {
            slope: int(1),
            offset: int(0),
        };
        assert_eq!(rising.sup_from(0), None);
        assert!(Tail::<Rational>::table(BTreeMap::new(), int(-1)).is_err());
    }

    #[test]
    fn validates_e3() {
        let ok = e3(Tail::Affine {
            slope: int(-1),
            offset: int(0),
        });
        let report = validate_countable(&ok);
        assert!(report.is_valid(), "{:?}", report.violation);
        assert_eq!(report.explicit_sup, int(0));

        let flat = e3(Tail::Affine {
            slope: int(0),
            offset: int(1),
        });
        let v = validate_countable(&flat).violation.unwrap();
        assert_eq!(v, Violation::TailDoesNotDecay);
        assert!(v.concerns_tail_shape());

        let g = MarkovGraph::full(SymbolSet::up_to(8));
        let p = Potential::from_fn(&g, 1, |w| int(-(w[0] as i64)));
        let low = CountableModel::new(
            p,
            8,
            Some(Tail::Affine {
                slope: int(-1),
                offset: int(0),
            }),
            int(-1),
            int(0),
        );
        let report = validate_countable(&low);
        assert!(matches!(report.violation, Some(Violation::SupUnderstated { .. })));
    }

    #[test]
    fn tail_must_dominate_explicit_cylinders() {
        let model = e3(Tail::Affine {
            slope: int(-2),
            offset: int(0),
        });
        let v = validate_countable(&model).violation.unwrap();
        assert!(matches!(v, Violation::TailBelowSup { symbol: 1, .. }), "{v}");
        assert!(!v.concerns_tail_shape());
    }
}
