//! Coercive truncation: the level `Î` past which no symbol can carry
//! maximizing mass, the scan of `beta(I)` confirming the plateau, and the
//! threshold beyond which every sub-action defect is uniformly negative.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::maxplus::{
    critical_structure, max_cycle_mean, minimal_subaction, CriticalStructure, MaxPlusError,
    SubAction, WeightedBlockGraph,
};
use crate::num::Scalar;
use crate::potential::{CountableModel, PotentialError, VariationSummary};
use crate::shift::{lift_blocks, truncate, PrimitivityCertificate, ShiftError, Symbol};

pub const DEFAULT_WINDOW: u32 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TruncationError {
    #[error("tail bound cannot establish the truncation inequality: {0}")]
    NoCoerciveTail(&'static str),
    #[error("level {need} is needed but the explicit region ends at {i_max}")]
    ExplicitRegionTooSmall { need: Symbol, i_max: Symbol },
    #[error("the connecting set is empty")]
    NoConnectingSet,
    #[error("level {level} does not satisfy the truncation inequality: {reason}")]
    InequalityFails { level: Symbol, reason: String },
    #[error("plateau violated: {0}")]
    PlateauViolation(String),
    #[error("no threshold within the explicit region for eta = {eta}")]
    NoThreshold { eta: String },
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    MaxPlus(#[from] MaxPlusError),
}

impl TruncationError {
    pub fn code(&self) -> &'static str {
        match self {
            TruncationError::NoCoerciveTail(_) => "truncation::NoCoerciveTail",
            TruncationError::ExplicitRegionTooSmall { .. } => "truncation::ExplicitRegionTooSmall",
            TruncationError::NoConnectingSet => "truncation::NoConnectingSet",
            TruncationError::InequalityFails { .. } => "truncation::InequalityFails",
            TruncationError::PlateauViolation(_) => "truncation::PlateauViolation",
            TruncationError::NoThreshold { .. } => "truncation::NoThreshold",
            TruncationError::Shift(e) => e.code(),
            TruncationError::Potential(e) => e.code(),
            TruncationError::MaxPlus(e) => e.code(),
        }
    }
}

/// `inf A|F - [Var(A) + K0 (sup A - inf A|F)]`, with the model's declared
/// global `sup A` and `Var(A)`.
pub fn threshold<S: Scalar>(
    model: &CountableModel<S>,
    summary: &VariationSummary<S>,
    cert: &PrimitivityCertificate,
) -> S {
    let inf_f = summary.inf_on_f.clone();
    let spread = S::from_count(cert.k0) * (model.declared_sup().clone() - inf_f.clone());
    inf_f - (model.declared_var_total().clone() + spread)
}

/// The truncation level with the slack left in its defining inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct IHat<S> {
    pub level: Symbol,
    pub threshold: S,
    /// `threshold - sup A|[i > level]`; `None` for finite-alphabet models.
    pub margin: Option<S>,
}

fn i_f(cert: &PrimitivityCertificate) -> Result<Symbol, TruncationError> {
    cert.i_f().ok_or(TruncationError::NoConnectingSet)
}

fn block_order<S: Scalar>(model: &CountableModel<S>) -> usize {
    model.potential().range().max(2)
}

fn check_region<S: Scalar>(model: &CountableModel<S>, level: Symbol) -> Result<(), TruncationError> {
    if model.is_finite() {
        return Ok(());
    }
    let need = level + model.potential().range() as Symbol - 1;
    if need > model.i_max() {
        return Err(TruncationError::ExplicitRegionTooSmall {
            need,
            i_max: model.i_max(),
        });
    }
    Ok(())
}

/// Smallest `Î > I_F` with `tau(Î + 1)` strictly below the threshold; a
/// nonincreasing tail makes that single check cover every `i > Î`.
///
/// A finite-alphabet model returns its largest symbol.
pub fn compute_i_hat<S: Scalar>(
    model: &CountableModel<S>,
    summary: &VariationSummary<S>,
    cert: &PrimitivityCertificate,
) -> Result<IHat<S>, TruncationError> {
    let i_f = i_f(cert)?;
    let bound = threshold(model, summary, cert);
    let Some(tail) = model.tail() else {
        return Ok(IHat {
            level: model.graph().vertices().max().unwrap_or(i_f).max(i_f),
            threshold: bound,
            margin: None,
        });
    };
    if !tail.is_nonincreasing() {
        return Err(TruncationError::NoCoerciveTail("tail is not nonincreasing"));
    }
    if !tail.decays() {
        return Err(TruncationError::NoCoerciveTail("tail does not tend to -infinity"));
    }
    let last = (model.i_max() + 1).saturating_sub(model.potential().range() as Symbol);
    for level in i_f + 1..=last {
        let next = tail.value(level + 1);
        if next.definitely_lt(&bound) {
            return Ok(IHat {
                level,
                margin: Some(bound.clone() - next),
                threshold: bound,
            });
        }
    }
    Err(TruncationError::ExplicitRegionTooSmall {
        need: last + 1,
        i_max: model.i_max(),
    })
}

/// Checks a supplied level against the inequality directly: explicit
/// cylinder suprema for `level < i <= I_max`, the tail beyond. The tail
/// only has to be bounded above past the explicit region.
pub fn verify_i_hat<S: Scalar>(
    model: &CountableModel<S>,
    summary: &VariationSummary<S>,
    cert: &PrimitivityCertificate,
    level: Symbol,
) -> Result<IHat<S>, TruncationError> {
    let i_f = i_f(cert)?;
    let bound = threshold(model, summary, cert);
    let fails = |reason: String| TruncationError::InequalityFails { level, reason };
    if level <= i_f {
        return Err(fails(format!("the level must exceed I_F = {i_f}")));
    }
    check_region(model, level)?;
    let mut worst: Option<S> = None;
    for i in model.graph().vertices().iter().filter(|&i| i > level) {
        if let Some(sup) = model.potential().sup_on_cylinder(i) {
            if !sup.definitely_lt(&bound) {
                return Err(fails(format!(
                    "sup A|[{i}] = {} is not below {}",
                    sup.canonical(),
                    bound.canonical()
                )));
            }
            worst = Some(match worst {
                Some(w) if w >= sup => w,
                _ => sup,
            });
        }
    }
    if let Some(tail) = model.tail() {
        let beyond = tail
            .sup_from(model.i_max() + 1)
            .ok_or_else(|| fails("the tail is unbounded above".into()))?;
        if !beyond.definitely_lt(&bound) {
            return Err(fails(format!(
                "the tail reaches {} beyond the explicit region, not below {}",
                beyond.canonical(),
                bound.canonical()
            )));
        }
        worst = Some(match worst {
            Some(w) if w >= beyond => w,
            _ => beyond,
        });
    }
    Ok(IHat {
        level,
        margin: worst.map(|w| bound.clone() - w),
        threshold: bound,
    })
}

/// `Sigma_I` lifted to the block order of the potential and weighted.
pub fn level_graph<S: Scalar>(
    model: &CountableModel<S>,
    level: Symbol,
) -> Result<WeightedBlockGraph<S>, TruncationError> {
    let g = truncate(model, level)?;
    let blocks = lift_blocks(&g, block_order(model))?;
    Ok(model.potential().weigh(blocks)?)
}

/// `beta(Sigma_I)` together with its critical structure, read off the
/// minimal sub-action.
pub fn solve_level<S: Scalar>(
    g: &WeightedBlockGraph<S>,
) -> Result<(SubAction<S>, CriticalStructure<S>), TruncationError> {
    let beta = max_cycle_mean(g)?;
    let u = minimal_subaction(g, &beta)?;
    let cs = critical_structure(g, &u)?;
    Ok((u, cs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport<S> {
    pub i_f: Symbol,
    pub i_hat: IHat<S>,
    pub window: u32,
    pub beta_by_level: BTreeMap<Symbol, S>,
    /// `beta(I)` nondecreasing over the scan.
    pub monotone: bool,
    /// `beta(I) = beta(Î)` on `[Î, Î + window]`.
    pub plateau_ok: bool,
    /// Critical classes of `Sigma_{Î + window}` use only symbols `<= Î`.
    pub localized: bool,
    /// `beta(I) >= inf A|F` at every scanned level.
    pub lower_bound_ok: bool,
    pub beta: S,
    /// `Sigma_Î` and its critical structure.
    pub omega_graph: WeightedBlockGraph<S>,
    pub omega: CriticalStructure<S>,
}

impl<S: Scalar> TruncationReport<S> {
    pub fn all_ok(&self) -> bool {
        self.monotone && self.plateau_ok && self.localized && self.lower_bound_ok
    }

    /// First failed assertion as a [`TruncationError::PlateauViolation`].
    pub fn check(&self) -> Result<(), TruncationError> {
        let failure = [
            (self.monotone, "beta(I) decreases between scanned levels"),
            (self.plateau_ok, "beta(I) is not constant on the scan window"),
            (self.localized, "a critical class uses a symbol above I_hat"),
            (self.lower_bound_ok, "beta(I) falls below inf A on the connecting cylinders"),
        ]
        .into_iter()
        .find(|(ok, _)| !ok);
        match failure {
            Some((_, what)) => Err(TruncationError::PlateauViolation(what.into())),
            None => Ok(()),
        }
    }
}

/// Evaluates every level `I_F..=Î + window` (in parallel) and records the
/// plateau assertions without failing on them.
pub fn scan_levels<S: Scalar>(
    model: &CountableModel<S>,
    summary: &VariationSummary<S>,
    cert: &PrimitivityCertificate,
    i_hat: IHat<S>,
    window: u32,
) -> Result<TruncationReport<S>, TruncationError> {
    let i_f = i_f(cert)?;
    let top = i_hat.level + if model.is_finite() { 0 } else { window };
    check_region(model, top)?;
    let levels: Vec<Symbol> = (i_f..=top).collect();
    let solved: Vec<(Symbol, WeightedBlockGraph<S>, CriticalStructure<S>)> = levels
        .par_iter()
        .map(|&level| {
            let g = level_graph(model, level)?;
            let (_, cs) = solve_level(&g)?;
            Ok((level, g, cs))
        })
        .collect::<Result<_, TruncationError>>()?;

    let beta_by_level: BTreeMap<Symbol, S> = solved
        .iter()
        .map(|(level, _, cs)| (*level, cs.beta.clone()))
        .collect();
    let betas: Vec<&S> = beta_by_level.values().collect();
    let monotone = betas.windows(2).all(|w| w[0].approx_le(w[1]));
    let beta = beta_by_level[&i_hat.level].clone();
    let plateau_ok = beta_by_level
        .range(i_hat.level..)
        .all(|(_, b)| b.approx_eq(&beta));
    let lower_bound_ok = betas.iter().all(|b| summary.inf_on_f.approx_le(b));

    let (_, top_graph, top_cs) = solved.last().expect("at least one level");
    let localized = top_cs.classes.iter().all(|class| {
        class.vertices.iter().all(|&v| {
            top_graph.graph().vertices()[v]
                .iter()
                .all(|&s| s <= i_hat.level)
        })
    });
    let (_, omega_graph, omega) = solved
        .into_iter()
        .find(|(level, _, _)| *level == i_hat.level)
        .expect("I_hat is scanned");
    Ok(TruncationReport {
        i_f,
        i_hat,
        window,
        beta_by_level,
        monotone,
        plateau_ok,
        localized,
        lower_bound_ok,
        beta,
        omega_graph,
        omega,
    })
}

/// [`scan_levels`] that fails with `PlateauViolation` on any broken
/// assertion.
pub fn plateau_scan<S: Scalar>(
    model: &CountableModel<S>,
    summary: &VariationSummary<S>,
    cert: &PrimitivityCertificate,
    i_hat: IHat<S>,
    window: u32,
) -> Result<TruncationReport<S>, TruncationError> {
    let report = scan_levels(model, summary, cert, i_hat, window)?;
    report.check()?;
    Ok(report)
}

/// Smallest `I` such that every explicit edge leaving a symbol `i > I` has
/// defect `< -eta`, and `tau(i) + osc(u) - beta < -eta` for every `i` past
/// the explicit region. `g` is the lifted `Sigma_{I_max}` carrying `u`.
pub fn support_bound_check<S: Scalar>(
    model: &CountableModel<S>,
    g: &WeightedBlockGraph<S>,
    u: &SubAction<S>,
    eta: &S,
) -> Result<Symbol, TruncationError> {
    let no_threshold = || TruncationError::NoThreshold { eta: eta.canonical() };
    let tail = model.tail().ok_or_else(no_threshold)?;
    let limit = -eta.clone();
    let beyond = tail.sup_from(model.i_max() + 1).ok_or_else(no_threshold)?;
    if !(beyond + u.osc() - u.beta.clone()).definitely_lt(&limit) {
        return Err(no_threshold());
    }
    // smallest I clearing every edge that leaves a symbol above it
    let mut level: Symbol = 0;
    for e in 0..g.edge_count() {
        let first = g.graph().edges()[e].word[0];
        if first > level && !u.defect(g, e).definitely_lt(&limit) {
            level = first;
        }
    }
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rational, Rational};
    use crate::potential::{summarize, Potential, Tail};
    use crate::shift::{compute_primitivity, MarkovGraph, SymbolSet};

    fn affine(slope: i64, offset: i64) -> Tail<Rational> {
        Tail::Affine {
            slope: int(slope),
            offset: int(offset),
        }
    }

    fn e3_with(i_max: u32, tail: Tail<Rational>) -> CountableModel<Rational> {
        let g = MarkovGraph::full(SymbolSet::up_to(i_max));
        let p = Potential::from_fn(&g, 1, |w| int(-(w[0] as i64)));
        CountableModel::new(p, i_max, Some(tail), int(0), int(0))
    }

    fn setup(model: &CountableModel<Rational>, f: &[u32]) -> (VariationSummary<Rational>, PrimitivityCertificate) {
        let g = truncate(model, model.i_max()).unwrap();
        let cert = compute_primitivity(&g, &SymbolSet::new(f.iter().copied()), 32).unwrap();
        let summary = summarize(model.potential(), &cert.connecting).unwrap();
        (summary, cert)
    }

    /// Direct scan of the defining inequality over candidate levels.
    fn brute_i_hat(tau: impl Fn(u32) -> Rational, bound: Rational, i_f: u32) -> u32 {
        (i_f + 1..).find(|&l| (l + 1..l + 200).all(|i| tau(i) < bound)).unwrap()
    }

    #[test]
    fn e3_i_hat_is_one() {
        let model = e3_with(8, affine(-1, 0));
        let (summary, cert) = setup(&model, &[0]);
        let i_hat = compute_i_hat(&model, &summary, &cert).unwrap();
        assert_eq!(i_hat.level, 1);
        assert_eq!(i_hat.threshold, int(0));
        assert_eq!(i_hat.margin, Some(int(2)));
        assert_eq!(brute_i_hat(|i| -int(i as i64), int(0), 0), 1);
    }

    #[test]
    fn shifted_tail_gives_five() {
        let model = e3_with(8, affine(-1, 5));
        let (summary, cert) = setup(&model, &[0]);
        let i_hat = compute_i_hat(&model, &summary, &cert).unwrap();
        assert_eq!(i_hat.level, 5);
        assert_eq!(brute_i_hat(|i| int(5 - i as i64), int(0), 0), 5);
    }

    #[test]
    fn flat_tail_is_rejected() {
        let model = e3_with(8, affine(0, 0));
        let (summary, cert) = setup(&model, &[0]);
        assert!(matches!(
            compute_i_hat(&model, &summary, &cert),
            Err(TruncationError::NoCoerciveTail(_))
        ));
    }

    #[test]
    fn small_region_is_reported() {
        let model = e3_with(4, affine(-1, 5));
        let (summary, cert) = setup(&model, &[0]);
        assert!(matches!(
            compute_i_hat(&model, &summary, &cert),
            Err(TruncationError::ExplicitRegionTooSmall { i_max: 4, .. })
        ));
    }

    #[test]
    fn e3_plateau() {
        let model = e3_with(8, affine(-1, 0));
        let (summary, cert) = setup(&model, &[0]);
        let i_hat = compute_i_hat(&model, &summary, &cert).unwrap();
        let report = plateau_scan(&model, &summary, &cert, i_hat, 3).unwrap();
        assert_eq!(report.beta_by_level.len(), 5);
        assert!(report.beta_by_level.values().all(|b| *b == int(0)));
        assert_eq!(report.omega.critical_edges.len(), 1);
        let e = report.omega.critical_edges[0];
        assert_eq!(report.omega_graph.graph().edges()[e].word, vec![0, 0]);
    }

    #[test]
    fn peak_at_two() {
        // A = -|x0 - 2|, F = {0} connects directly on the full shift
        let g = MarkovGraph::full(SymbolSet::up_to(10));
        let p = Potential::from_fn(&g, 1, |w| -int((w[0] as i64 - 2).abs()));
        let model = CountableModel::new(p, 10, Some(affine(-1, 2)), int(0), int(0));
        let (summary, cert) = setup(&model, &[0]);
        assert_eq!(cert.k0, 0);
        let i_hat = compute_i_hat(&model, &summary, &cert).unwrap();
        // threshold is inf A|F = -2, and 2 - (I + 1) < -2 first at I = 4
        assert_eq!(i_hat.level, 4);
        let report = plateau_scan(&model, &summary, &cert, i_hat, 2).unwrap();
        assert_eq!(report.beta, int(0));
        assert_eq!(report.beta_by_level[&1], int(-1));
        let words: Vec<_> = report
            .omega
            .critical_edges
            .iter()
            .map(|&e| report.omega_graph.graph().edges()[e].word.clone())
            .collect();
        assert_eq!(words, vec![vec![2, 2]]);
    }

    #[test]
    fn finite_model_is_degenerate() {
        let g = MarkovGraph::new(SymbolSet::up_to(2), [(0, 1), (1, 0), (1, 2), (2, 2), (2, 0)]).unwrap();
        let table = [(vec![0, 1], 2), (vec![1, 0], 4), (vec![1, 2], 0), (vec![2, 2], 5), (vec![2, 0], 0)];
        let p = Potential::new(&g, 2, table.into_iter().map(|(w, v)| (w, int(v)))).unwrap();
        let model = CountableModel::finite(p);
        let (summary, cert) = setup(&model, &[0, 1, 2]);
        let i_hat = compute_i_hat(&model, &summary, &cert).unwrap();
        assert_eq!(i_hat.level, 2);
        assert_eq!(i_hat.margin, None);
        let report = plateau_scan(&model, &summary, &cert, i_hat, 3).unwrap();
        assert_eq!(report.beta_by_level.len(), 1);
        assert_eq!(report.beta, int(5));
    }

    #[test]
    fn supplied_level_with_bumpy_potential() {
        // cylinder sups are not monotone in the symbol
        let g = MarkovGraph::full(SymbolSet::up_to(9));
        let bumps = [0, -5, 0, -7, -3, -9, -8, -9, -10, -11];
        let p = Potential::from_fn(&g, 1, |w| int(bumps[w[0] as usize]));
        let model = CountableModel::new(p, 9, Some(affine(-1, 2)), int(0), int(0));
        assert!(crate::potential::validate_countable(&model).is_valid());
        let (summary, cert) = setup(&model, &[0]);
        let given = verify_i_hat(&model, &summary, &cert, 2).unwrap();
        assert_eq!(given.margin, Some(int(3)));
        assert!(matches!(
            verify_i_hat(&model, &summary, &cert, 1),
            Err(TruncationError::InequalityFails { level: 1, .. })
        ));
        let report = plateau_scan(&model, &summary, &cert, given, 3).unwrap();
        assert!(report.all_ok());
        assert_eq!(report.beta, int(0));
    }

    fn zero_on(g: &WeightedBlockGraph<Rational>) -> SubAction<Rational> {
        SubAction::constant(g.vertex_count(), int(0), int(0))
    }

    #[test]
    fn support_bound_for_e3() {
        let model = e3_with(8, affine(-1, 0));
        let g = level_graph(&model, 8).unwrap();
        assert_eq!(support_bound_check(&model, &g, &zero_on(&g), &rational(1, 2)), Ok(0));
        assert!(matches!(
            support_bound_check(&model, &g, &zero_on(&g), &int(10)),
            Err(TruncationError::NoThreshold { .. })
        ));
        let wide = e3_with(14, affine(-1, 0));
        let g = level_graph(&wide, 14).unwrap();
        assert_eq!(support_bound_check(&wide, &g, &zero_on(&g), &int(10)), Ok(10));
    }

    #[test]
    fn finite_model_has_no_threshold() {
        let g = MarkovGraph::full(SymbolSet::up_to(1));
        let p = Potential::from_fn(&g, 1, |w| int(w[0] as i64));
        let model = CountableModel::finite(p);
        let wg = level_graph(&model, 1).unwrap();
        assert!(matches!(
            support_bound_check(&model, &wg, &zero_on(&wg), &int(1)),
            Err(TruncationError::NoThreshold { .. })
        ));
    }
}
