//! End-to-end runs behind the command line: analyze a configured model,
//! audit an external sub-action, compare fast solvers with the oracles.

use rayon::prelude::*;

use crate::config::{config_hash, AnalysisConfig, ConfigError, OutputSpec};
use crate::maxplus::{
    calibrated_subaction, check_certificate, critical_structure, finite_horizon_bound,
    is_calibrated, max_cycle_mean, minimal_subaction, CertificateReport, MaxPlusError, SubAction,
    Verdict, WeightedBlockGraph,
};
use crate::measures::{maximizing_set, verify_maximizing, MaximizingClass, MeasureError};
use crate::num::{max_all, Mode, Rational, Scalar};
use crate::oracle::{
    brute_beta, brute_finite_horizon, brute_minimal_subaction, random_instance, OracleError,
};
use crate::potential::{
    summarize, validate_countable, CountableModel, HoelderModel, PotentialError, ValidationReport,
    VariationSummary,
};
use crate::report;
use crate::shift::{
    compute_primitivity, default_certificate, truncate, PrimitivityCertificate, ShiftError, Symbol,
};
use crate::truncation::{
    compute_i_hat, level_graph, scan_levels, support_bound_check, verify_i_hat, TruncationError,
    TruncationReport,
};

/// Exit status: every check passed / certificate valid / oracles agree.
pub const EXIT_OK: i32 = 0;
/// Exit status of `verify` on an invalid certificate and of `oracle` on a
/// disagreement.
pub const EXIT_REJECTED: i32 = 1;
/// Exit status for unreadable input or an invalid model.
pub const EXIT_INPUT: i32 = 2;
/// Exit status of `analyze` when an internal check fails.
pub const EXIT_FALSIFIED: i32 = 3;
/// Exit status of `oracle` when the instance exceeds the oracle guards.
pub const EXIT_TOO_LARGE: i32 = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid model: {0}")]
    Model(String),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Truncation(#[from] TruncationError),
    #[error(transparent)]
    MaxPlus(#[from] MaxPlusError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("sub-action file: {0}")]
    SubActionFile(String),
}

impl PipelineError {
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::Config(e) => e.code(),
            PipelineError::Model(_) => "potential::InvalidModel",
            PipelineError::Shift(e) => e.code(),
            PipelineError::Potential(e) => e.code(),
            PipelineError::Truncation(e) => e.code(),
            PipelineError::MaxPlus(e) => e.code(),
            PipelineError::Measure(e) => e.code(),
            PipelineError::Oracle(e) => e.code(),
            PipelineError::SubActionFile(_) => "cli::SubActionFile",
        }
    }

    /// Input and model problems exit with 2, oracle guards with 4, and
    /// failures inside the solvers with 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Oracle(OracleError::TooLarge(_)) => EXIT_TOO_LARGE,
            PipelineError::MaxPlus(_)
            | PipelineError::Measure(_)
            | PipelineError::Truncation(TruncationError::MaxPlus(_))
            | PipelineError::Truncation(TruncationError::PlateauViolation(_)) => EXIT_FALSIFIED,
            _ => EXIT_INPUT,
        }
    }
}

/// Command-line overrides of config fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalyzeOptions {
    pub plateau_window: Option<u32>,
    pub mode: Option<Mode>,
    pub eta: Option<Rational>,
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name,
            pass,
            detail: detail.into(),
        }
    }
}

/// Where the truncation level came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelSource {
    Computed,
    Supplied,
    Finite,
}

impl LevelSource {
    pub fn as_str(self) -> &'static str {
        match self {
            LevelSource::Computed => "computed",
            LevelSource::Supplied => "supplied",
            LevelSource::Finite => "finite",
        }
    }
}

/// Everything an analysis run computes, before serialization.
#[derive(Debug, Clone)]
pub struct Analysis<S> {
    pub config_hash: String,
    pub model: CountableModel<S>,
    pub validation: ValidationReport<S>,
    pub cert: PrimitivityCertificate,
    pub k0_cap: usize,
    /// Computed on the explicit region.
    pub summary: VariationSummary<S>,
    /// `summary` with the declared global `sup A` and `Var(A)`.
    pub constants: VariationSummary<S>,
    pub source: LevelSource,
    pub truncation: TruncationReport<S>,
    pub calibrated: SubAction<S>,
    pub minimal: SubAction<S>,
    pub certificate: CertificateReport<S>,
    pub tight_edges: Vec<usize>,
    pub critical_edges: Vec<usize>,
    pub classes: Vec<MaximizingClass<S>>,
    pub horizon: Vec<(usize, S)>,
    pub eta: S,
    pub support: Option<Result<Symbol, TruncationError>>,
    pub hoelder: Option<HoelderModel<S>>,
    pub checks: Vec<Check>,
}

impl<S: Scalar> Analysis<S> {
    /// Lifted `Sigma_Î`, where every reported sub-action lives.
    pub fn graph(&self) -> &WeightedBlockGraph<S> {
        &self.truncation.omega_graph
    }

    pub fn beta(&self) -> &S {
        &self.truncation.beta
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn le_detail<S: Scalar>(lhs: &S, rhs: &S) -> (bool, String) {
    (lhs.approx_le(rhs), format!("{} <= {}", lhs.canonical(), rhs.canonical()))
}

/// The full pipeline: validate, certify, truncate, solve, re-check.
pub fn analyze<S: Scalar>(
    cfg: &AnalysisConfig,
    hash: String,
    opts: &AnalyzeOptions,
) -> Result<Analysis<S>, PipelineError> {
    let model = cfg.model::<S>()?;
    let validation = validate_countable(&model);
    if let Some(v) = &validation.violation {
        if !(cfg.i_hat.is_some() && v.concerns_tail_shape()) {
            return Err(PipelineError::Model(v.to_string()));
        }
    }
    let hoelder = cfg.hoelder::<S>()?;
    let eta = S::from_rational(opts.eta.as_ref().unwrap_or(&cfg.eta.0));
    if eta <= S::zero() {
        return Err(ConfigError::Invalid("eta must be positive".into()).into());
    }
    let window = opts.plateau_window.unwrap_or(cfg.plateau_window);
    let horizon = opts.horizon.unwrap_or(cfg.horizon);
    if horizon == 0 {
        return Err(ConfigError::Invalid("horizon must be at least 1".into()).into());
    }

    let top = truncate(&model, model.i_max())?;
    if top.is_empty() {
        return Err(ShiftError::EmptyShift.into());
    }
    let cert = match cfg.connecting_set() {
        Some(f) => compute_primitivity(&top, &f, cfg.k0_cap)?,
        None => default_certificate(&top, cfg.k0_cap)?,
    };
    let summary = summarize(model.potential(), &cert.connecting)?;
    let constants = VariationSummary {
        sup: model.declared_sup().clone(),
        var_total: model.declared_var_total().clone(),
        ..summary.clone()
    };

    let (i_hat, source) = match cfg.i_hat {
        Some(level) => (verify_i_hat(&model, &summary, &cert, level)?, LevelSource::Supplied),
        None if model.is_finite() => (compute_i_hat(&model, &summary, &cert)?, LevelSource::Finite),
        None => (compute_i_hat(&model, &summary, &cert)?, LevelSource::Computed),
    };
    let truncation = scan_levels(&model, &summary, &cert, i_hat, window)?;
    let g = truncation.omega_graph.clone();
    let beta = truncation.beta.clone();

    let calibrated = calibrated_subaction(&g)?;
    let minimal = minimal_subaction(&g, &beta)?;
    let certificate = check_certificate(&g, &calibrated)?;
    let cs = critical_structure(&g, &calibrated)?;
    let classes = maximizing_set(&g, &cs)?;
    let horizon_table = (1..=horizon)
        .map(|k| Ok((k, finite_horizon_bound(&g, k)?)))
        .collect::<Result<Vec<_>, MaxPlusError>>()?;

    let support = if model.is_finite() {
        None
    } else {
        let top_graph = level_graph(&model, model.i_max())?;
        let top_beta = max_cycle_mean(&top_graph)?;
        let u = minimal_subaction(&top_graph, &top_beta)?;
        Some(support_bound_check(&model, &top_graph, &u, &eta))
    };

    let mut analysis = Analysis {
        config_hash: hash,
        model,
        validation,
        cert,
        k0_cap: cfg.k0_cap,
        summary,
        constants,
        source,
        truncation,
        calibrated,
        minimal,
        certificate,
        tight_edges: cs.tight_edges.clone(),
        critical_edges: cs.critical_edges.clone(),
        classes,
        horizon: horizon_table,
        eta,
        support,
        hoelder,
        checks: Vec::new(),
    };
    analysis.checks = run_checks(&analysis)?;
    Ok(analysis)
}

/// Re-checks every inequality the report states.
fn run_checks<S: Scalar>(a: &Analysis<S>) -> Result<Vec<Check>, PipelineError> {
    let g = a.graph();
    let beta = a.beta();
    let k0 = a.cert.k0;
    let c = &a.constants;
    let t = &a.truncation;
    let mut checks = Vec::new();

    checks.push(Check::new(
        "model.validation",
        true,
        match &a.validation.violation {
            None => "all model invariants hold".to_string(),
            Some(v) => format!("{v}; accepted because the truncation level is supplied"),
        },
    ));

    let level_graph_markov = truncate(&a.model, t.i_hat.level)?;
    let top = truncate(&a.model, a.model.i_max())?;
    checks.push(Check::new(
        "primitivity.certificate",
        a.cert.holds_for(&top) && a.cert.holds_for(&level_graph_markov),
        format!("F = {}, K0 = {}", a.cert.connecting, k0),
    ));

    let (pass, detail) = match &t.i_hat.margin {
        Some(m) => (
            m > &S::zero() && t.i_hat.level > t.i_f,
            format!(
                "I_hat = {} > I_F = {}, margin {}",
                t.i_hat.level,
                t.i_f,
                m.canonical()
            ),
        ),
        None => (true, format!("finite alphabet, I_hat = {}", t.i_hat.level)),
    };
    checks.push(Check::new("truncation.inequality", pass, detail));
    checks.push(Check::new(
        "truncation.monotone",
        t.monotone,
        "beta(I) nondecreasing over the scan",
    ));
    checks.push(Check::new(
        "truncation.plateau",
        t.plateau_ok,
        format!("beta(I) = {} on [I_hat, I_hat + {}]", beta.canonical(), t.window),
    ));
    checks.push(Check::new(
        "truncation.localization",
        t.localized,
        "critical classes at the top scanned level use symbols <= I_hat",
    ));
    checks.push(Check::new(
        "truncation.lower_bound",
        t.lower_bound_ok,
        format!("beta(I) >= inf A|F = {}", c.inf_on_f.canonical()),
    ));

    let cal = &a.certificate;
    checks.push(Check::new(
        "calibrated.subaction",
        cal.defects_nonpositive,
        format!("max defect {}", cal.max_defect.canonical()),
    ));
    checks.push(Check::new(
        "calibrated.calibration",
        is_calibrated(g, &a.calibrated),
        "every vertex has a zero-defect in-edge",
    ));
    checks.push(Check::new(
        "certificate.verdict",
        cal.verdict == Verdict::Valid && a.calibrated.beta.approx_eq(beta),
        format!("{}, beta {}", cal.verdict.as_str(), a.calibrated.beta.canonical()),
    ));
    let (pass, detail) = le_detail(&cal.osc, &c.oscillation_bound(k0));
    checks.push(Check::new("oscillation.bound", pass, detail));

    let u_a = &a.minimal;
    checks.push(Check::new(
        "minimal.nonnegative",
        u_a.values.iter().all(|v| S::zero().approx_le(v)),
        format!("min u_A = {}", u_a.min().canonical()),
    ));
    let min_cert = check_certificate(g, u_a)?;
    checks.push(Check::new(
        "minimal.subaction",
        min_cert.defects_nonpositive && min_cert.tight_cycle,
        format!("max defect {}", min_cert.max_defect.canonical()),
    ));
    let floor = a.calibrated.min();
    checks.push(Check::new(
        "minimal.below_calibrated",
        u_a.values
            .iter()
            .zip(&a.calibrated.values)
            .all(|(m, u)| m.approx_le(&(u.clone() - floor.clone()))),
        "u_A <= u - min u",
    ));
    let spread = S::from_count(k0) * (c.sup.clone() - beta.clone());
    let bound = max_all([c.oscillation_bound(k0), spread].iter()).expect("two values");
    let (pass, detail) = le_detail(&u_a.max(), &bound);
    checks.push(Check::new("minimal.bound", pass, detail));
    let order = g.graph().order();
    let mut regular = true;
    let mut details = Vec::new();
    for k in 1..order {
        let var = u_a.variation(g, k);
        let tail = c.var_tail(k);
        regular &= var.approx_le(&tail);
        details.push(format!("Var_{k}(u_A) = {} <= {}", var.canonical(), tail.canonical()));
        if let Some(h) = &a.hoelder {
            let hb = h.subaction_var_bound(k);
            regular &= var.approx_le(&hb);
            details.push(format!("<= H lambda^{k}/(1 - lambda) = {}", hb.canonical()));
        }
    }
    checks.push(Check::new("minimal.regularity", regular, details.join("; ")));
    if let Some(h) = &a.hoelder {
        let (pass, detail) = le_detail(&a.summary.var_total, &h.var_bound());
        checks.push(Check::new(
            "hoelder.dominates",
            pass && h.dominates(a.model.potential()),
            detail,
        ));
    }

    checks.push(Check::new(
        "omega.consistent",
        a.critical_edges == t.omega.critical_edges,
        "critical edges agree for the calibrated and minimal sub-actions",
    ));
    let mut maximizing = true;
    for class in &a.classes {
        maximizing &= class.integral.approx_eq(beta);
        let cs = &t.omega;
        maximizing &= matches!(verify_maximizing(&class.measure, g, cs), Ok(true));
    }
    checks.push(Check::new(
        "measures.maximizing",
        maximizing,
        format!("{} critical class(es), each measure integrates to beta", a.classes.len()),
    ));

    let upper = a.horizon.iter().all(|(_, v)| beta.approx_le(v));
    checks.push(Check::new(
        "finite_horizon.upper",
        upper,
        format!("sup S_k A / k >= beta for k = 1..{}", a.horizon.len()),
    ));
    let mut rate = true;
    for (k, v) in a.horizon.iter().filter(|(k, _)| *k > k0) {
        let rhs = (c.var_prefix(*k) + S::from_count(k0) * (c.sup.clone() - c.inf_on_f.clone()))
            / S::from_count(*k);
        rate &= (v.clone() - beta.clone()).approx_le(&rhs);
    }
    checks.push(Check::new(
        "finite_horizon.rate",
        rate,
        format!("for k > K0 = {k0}"),
    ));
    Ok(checks)
}

/// Analysis output ready to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOutput {
    pub report: String,
    pub beta_csv: String,
    pub horizon_csv: String,
    pub passed: bool,
    pub exit_code: i32,
    pub output: Option<OutputSpec>,
}

fn finish<S: Scalar>(a: &Analysis<S>, output: Option<OutputSpec>) -> AnalyzeOutput {
    let passed = a.passed();
    AnalyzeOutput {
        report: report::to_canonical_json(&report::render(a)),
        beta_csv: report::beta_csv(a),
        horizon_csv: report::horizon_csv(a),
        passed,
        exit_code: if passed { EXIT_OK } else { EXIT_FALSIFIED },
        output,
    }
}

pub fn run_analyze(config_text: &str, opts: &AnalyzeOptions) -> Result<AnalyzeOutput, PipelineError> {
    let cfg = AnalysisConfig::from_json(config_text)?;
    let hash = config_hash(config_text.as_bytes());
    let output = cfg.output.clone();
    match opts.mode.unwrap_or(cfg.mode) {
        Mode::Exact => Ok(finish(&analyze::<Rational>(&cfg, hash, opts)?, output)),
        Mode::Float => Ok(finish(&analyze::<f64>(&cfg, hash, opts)?, output)),
    }
}

/// A sub-action read from a file, either bare or inside an analysis report.
#[derive(Debug, Clone, PartialEq)]
pub struct SubActionFile {
    pub level: Option<Symbol>,
    pub beta: String,
    pub values: Vec<(String, String)>,
    /// Present when the file is a full report.
    pub report: Option<serde_json::Value>,
}

fn parse_subaction_file(text: &str) -> Result<SubActionFile, PipelineError> {
    let bad = |m: String| PipelineError::SubActionFile(m);
    let root: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let (obj, level, is_report) = match root.get("calibrated_subaction") {
        Some(inner) => (inner.clone(), root.get("level").cloned(), true),
        None => (root.clone(), root.get("level").cloned(), false),
    };
    let level = match level {
        None => None,
        Some(v) => Some(
            v.as_u64()
                .and_then(|l| Symbol::try_from(l).ok())
                .ok_or_else(|| bad("`level` must be a nonnegative integer".into()))?,
        ),
    };
    let rat = |v: &serde_json::Value, what: &str| -> Result<String, PipelineError> {
        v.as_str()
            .map(str::to_string)
            .ok_or_else(|| bad(format!("{what} must be a number string")))
    };
    let beta = rat(
        obj.get("beta").ok_or_else(|| bad("missing `beta`".into()))?,
        "beta",
    )?;
    let map = obj
        .get("u")
        .and_then(|u| u.as_object())
        .ok_or_else(|| bad("missing object `u`".into()))?;
    let values = map
        .iter()
        .map(|(k, v)| Ok((k.clone(), rat(v, &format!("u[{k}]"))?)))
        .collect::<Result<Vec<_>, PipelineError>>()?;
    Ok(SubActionFile {
        level,
        beta,
        values,
        report: is_report.then_some(root),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutput {
    pub text: String,
    pub valid: bool,
    pub exit_code: i32,
}

/// Exact `p/q` strings in any mode; decimal strings in float mode.
fn parse_value<S: Scalar>(text: &str, what: &str) -> Result<S, PipelineError> {
    if let Ok(r) = crate::num::parse_rational(text) {
        return Ok(S::from_rational(&r));
    }
    if S::MODE == Mode::Float {
        if let Some(v) = text.parse::<f64>().ok().and_then(S::from_f64) {
            return Ok(v);
        }
    }
    Err(PipelineError::SubActionFile(format!("{what}: invalid number `{text}`")))
}

fn verify_with<S: Scalar>(
    cfg: &AnalysisConfig,
    file: &SubActionFile,
) -> Result<VerifyOutput, PipelineError> {
    let model = cfg.model::<S>()?;
    let level = file.level.unwrap_or(model.i_max());
    let g = level_graph(&model, level)?;
    let mut values: Vec<Option<S>> = vec![None; g.vertex_count()];
    for (key, v) in &file.values {
        let word = report::parse_word(key)
            .ok_or_else(|| PipelineError::SubActionFile(format!("bad vertex key `{key}`")))?;
        let idx = g.graph().vertex_of(&word).ok_or_else(|| {
            PipelineError::SubActionFile(format!("`{key}` is not a vertex at level {level}"))
        })?;
        values[idx] = Some(parse_value(v, &format!("u[{key}]"))?);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                PipelineError::SubActionFile(format!(
                    "no value for vertex `{}`",
                    report::word_key(&g.graph().vertices()[i])
                ))
            })
        })
        .collect::<Result<Vec<S>, _>>()?;
    let u = SubAction {
        values,
        beta: parse_value(&file.beta, "beta")?,
    };
    let cert = check_certificate(&g, &u)?;
    let mut audit = Vec::new();
    if let Some(rep) = &file.report {
        audit = report::audit(rep, &g, &u)?;
    }
    let valid = cert.verdict == Verdict::Valid && audit.iter().all(|c| c.pass);
    let text = report::to_canonical_json(&report::render_verify(&g, &u, &cert, level, &audit));
    Ok(VerifyOutput {
        text,
        valid,
        exit_code: if valid { EXIT_OK } else { EXIT_REJECTED },
    })
}

pub fn run_verify(config_text: &str, subaction_text: &str) -> Result<VerifyOutput, PipelineError> {
    let cfg = AnalysisConfig::from_json(config_text)?;
    let file = parse_subaction_file(subaction_text)?;
    match cfg.mode {
        Mode::Exact => verify_with::<Rational>(&cfg, &file),
        Mode::Float => verify_with::<f64>(&cfg, &file),
    }
}

/// One fast-versus-brute comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub instance: String,
    pub quantity: String,
    pub fast: String,
    pub brute: String,
    pub equal: bool,
}

fn compare_values<S: Scalar>(instance: &str, quantity: String, fast: &S, brute: &S) -> Comparison {
    Comparison {
        instance: instance.to_string(),
        quantity,
        fast: fast.canonical(),
        brute: brute.canonical(),
        equal: fast.approx_eq(brute),
    }
}

/// Compares `beta`, `u_A` (horizon `2|V|`) and the horizon bounds for
/// `k <= 6` against the oracles.
pub fn compare_with_oracles<S: Scalar>(
    instance: &str,
    g: &WeightedBlockGraph<S>,
) -> Result<Vec<Comparison>, PipelineError> {
    let mut rows = Vec::new();
    let brute = brute_beta(g)?;
    let fast = max_cycle_mean(g)?;
    rows.push(compare_values(instance, "beta".into(), &fast, &brute));
    let fast_u = minimal_subaction(g, &fast)?;
    let brute_u = brute_minimal_subaction(g, &brute, 2 * g.vertex_count())?;
    for (v, (f, b)) in fast_u.values.iter().zip(&brute_u).enumerate() {
        let key = report::word_key(&g.graph().vertices()[v]);
        rows.push(compare_values(instance, format!("u_A[{key}]"), f, b));
    }
    for k in 1..=6 {
        let f = finite_horizon_bound(g, k)?;
        let b = brute_finite_horizon(g, k)?;
        rows.push(compare_values(instance, format!("horizon[{k}]"), &f, &b));
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutput {
    pub text: String,
    pub all_equal: bool,
    pub exit_code: i32,
}

fn oracle_with<S: Scalar>(cfg: &AnalysisConfig, seeds: u64) -> Result<OracleOutput, PipelineError> {
    let model = cfg.model::<S>()?;
    let g = level_graph(&model, model.i_max())?;
    let mut rows = compare_with_oracles("config", &g)?;
    let random: Vec<Vec<Comparison>> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let inst = random_instance::<S>(seed, 7, (-9, 9));
            compare_with_oracles(&format!("seed {}", inst.seed), &inst.graph)
        })
        .collect::<Result<_, _>>()?;
    rows.extend(random.into_iter().flatten());
    let all_equal = rows.iter().all(|r| r.equal);
    Ok(OracleOutput {
        text: report::comparison_table(&rows),
        all_equal,
        exit_code: if all_equal { EXIT_OK } else { EXIT_REJECTED },
    })
}

pub fn run_oracle(config_text: &str, seeds: u64) -> Result<OracleOutput, PipelineError> {
    let cfg = AnalysisConfig::from_json(config_text)?;
    match cfg.mode {
        Mode::Exact => oracle_with::<Rational>(&cfg, seeds),
        Mode::Float => oracle_with::<f64>(&cfg, seeds),
    }
}
