//! Analysis configuration: a versioned JSON document describing the shift,
//! the potential, its tail, and the run parameters.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::num::{parse_rational, Mode, Rational, Scalar};
use crate::potential::{CountableModel, HoelderModel, Potential, PotentialError, Tail};
use crate::shift::{MarkovGraph, ShiftError, Symbol, SymbolSet, Word};
use crate::truncation::DEFAULT_WINDOW;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_K0_CAP: usize = 32;
pub const DEFAULT_HORIZON: usize = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("unsupported schema version {0} (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Parse(_) => "config::Parse",
            ConfigError::Schema(_) => "config::Schema",
            ConfigError::Invalid(_) => "config::Invalid",
            ConfigError::Shift(e) => e.code(),
            ConfigError::Potential(e) => e.code(),
        }
    }
}

/// A rational written as `"p/q"` or an integer string.
#[derive(Clone, PartialEq, Eq)]
pub struct Q(pub Rational);

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map(Q).map_err(de::Error::custom)
    }
}

impl Serialize for Q {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        s.serialize_str(&self.0.canonical())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub schema: u32,
    pub graph: GraphSpec,
    pub potential: PotentialSpec,
    #[serde(default)]
    pub connecting_set: Option<Vec<Symbol>>,
    #[serde(default = "default_k0_cap")]
    pub k0_cap: usize,
    /// Absent for a finite-alphabet model.
    #[serde(default)]
    pub tail: Option<TailSpec>,
    #[serde(default)]
    pub declared: Option<DeclaredSpec>,
    #[serde(default)]
    pub hoelder: Option<HoelderSpec>,
    #[serde(default = "default_window")]
    pub plateau_window: u32,
    #[serde(default = "default_eta")]
    pub eta: Q,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Truncation level to check directly instead of deriving it from the
    /// tail.
    #[serde(default)]
    pub i_hat: Option<Symbol>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

fn default_k0_cap() -> usize {
    DEFAULT_K0_CAP
}

fn default_window() -> u32 {
    DEFAULT_WINDOW
}

fn default_eta() -> Q {
    Q(crate::num::rational(1, 2))
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    /// Alphabet `{0, ..., symbols - 1}`.
    pub symbols: u32,
    pub transitions: Transitions,
}

/// `"full"`, dense 0/1 row strings, or explicit `[i, j]` pairs.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Transitions {
    Keyword(String),
    Rows(Vec<String>),
    Edges(Vec<(Symbol, Symbol)>),
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub range: usize,
    pub table: Vec<WordValue>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WordValue {
    pub word: Word,
    pub value: Q,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum TailSpec {
    Affine { slope: Q, offset: Q },
    Table { entries: Vec<SymbolValue>, slope: Q },
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolValue {
    pub symbol: Symbol,
    pub value: Q,
}

/// Global constants valid for the whole countable system.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredSpec {
    pub sup: Q,
    pub var_total: Q,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HoelderSpec {
    pub h: Q,
    pub lambda: Q,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub report: Option<String>,
    #[serde(default)]
    pub csv: Option<String>,
}

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: AnalysisConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(ConfigError::Schema(cfg.schema));
        }
        if cfg.eta.0 <= Rational::from_integer(0.into()) {
            return Err(ConfigError::Invalid("eta must be positive".into()));
        }
        if cfg.horizon == 0 {
            return Err(ConfigError::Invalid("horizon must be at least 1".into()));
        }
        if cfg.tail.is_some() != cfg.declared.is_some() {
            return Err(ConfigError::Invalid(
                "a tail and the declared constants must be given together".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn markov_graph(&self) -> Result<MarkovGraph, ConfigError> {
        let n = self.graph.symbols;
        if n == 0 {
            return Err(ConfigError::Invalid("graph.symbols must be positive".into()));
        }
        let vertices = SymbolSet::up_to(n - 1);
        match &self.graph.transitions {
            Transitions::Keyword(k) if k == "full" => Ok(MarkovGraph::full(vertices)),
            Transitions::Keyword(k) => Err(ConfigError::Invalid(format!(
                "unknown transitions keyword `{k}` (expected \"full\")"
            ))),
            Transitions::Rows(rows) => {
                if rows.len() != n as usize {
                    return Err(ConfigError::Invalid(format!(
                        "{} rows given for {n} symbols",
                        rows.len()
                    )));
                }
                Ok(MarkovGraph::from_rows(rows)?)
            }
            Transitions::Edges(edges) => Ok(MarkovGraph::new(vertices, edges.iter().copied())?),
        }
    }

    pub fn potential<S: Scalar>(&self) -> Result<Potential<S>, ConfigError> {
        let g = self.markov_graph()?;
        let table = self
            .potential
            .table
            .iter()
            .map(|wv| (wv.word.clone(), S::from_rational(&wv.value.0)));
        Ok(Potential::new(&g, self.potential.range, table)?)
    }

    pub fn tail<S: Scalar>(&self) -> Result<Option<Tail<S>>, ConfigError> {
        let conv = |q: &Q| S::from_rational(&q.0);
        Ok(match &self.tail {
            None => None,
            Some(TailSpec::Affine { slope, offset }) => Some(Tail::Affine {
                slope: conv(slope),
                offset: conv(offset),
            }),
            Some(TailSpec::Table { entries, slope }) => {
                let mut map = BTreeMap::new();
                for e in entries {
                    if map.insert(e.symbol, conv(&e.value)).is_some() {
                        return Err(ConfigError::Invalid(format!(
                            "tail entry for symbol {} appears twice",
                            e.symbol
                        )));
                    }
                }
                Some(Tail::table(map, conv(slope))?)
            }
        })
    }

    pub fn model<S: Scalar>(&self) -> Result<CountableModel<S>, ConfigError> {
        let potential = self.potential::<S>()?;
        match (self.tail::<S>()?, &self.declared) {
            (Some(tail), Some(d)) => Ok(CountableModel::new(
                potential,
                self.graph.symbols - 1,
                Some(tail),
                S::from_rational(&d.sup.0),
                S::from_rational(&d.var_total.0),
            )),
            _ => Ok(CountableModel::finite(potential)),
        }
    }

    pub fn hoelder<S: Scalar>(&self) -> Result<Option<HoelderModel<S>>, ConfigError> {
        self.hoelder
            .as_ref()
            .map(|h| HoelderModel::new(S::from_rational(&h.h.0), S::from_rational(&h.lambda.0)))
            .transpose()
            .map_err(ConfigError::from)
    }

    pub fn connecting_set(&self) -> Option<SymbolSet> {
        self.connecting_set.as_ref().map(|f| SymbolSet::new(f.iter().copied()))
    }
}

/// Hex SHA-256 of the raw config bytes.
pub fn config_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::int;

    const E2: &str = r#"{
        "schema": 1,
        "graph": {"symbols": 3, "transitions": [[0,1],[1,0],[1,2],[2,2],[2,0]]},
        "potential": {"range": 2, "table": [
            {"word": [0,1], "value": "2"}, {"word": [1,0], "value": "4"},
            {"word": [1,2], "value": "0"}, {"word": [2,2], "value": "5"},
            {"word": [2,0], "value": "0"}
        ]},
        "connecting_set": [0,1,2]
    }"#;

    #[test]
    fn parses_e2() {
        let cfg = AnalysisConfig::from_json(E2).unwrap();
        assert_eq!(cfg.k0_cap, 32);
        assert_eq!(cfg.plateau_window, 3);
        assert_eq!(cfg.mode, Mode::Exact);
        let model = cfg.model::<Rational>().unwrap();
        assert!(model.is_finite());
        assert_eq!(model.potential().value(&[2, 2]), Some(&int(5)));
        assert_eq!(model.graph().edge_count(), 5);
    }

    #[test]
    fn rows_and_full() {
        let rows = E2.replace(
            "[[0,1],[1,0],[1,2],[2,2],[2,0]]",
            r#"["010", "101", "101"]"#,
        );
        let g = AnalysisConfig::from_json(&rows).unwrap().markov_graph().unwrap();
        assert_eq!(g.edge_count(), 5);
        let full = E2.replace("[[0,1],[1,0],[1,2],[2,2],[2,0]]", r#""full""#);
        let cfg = AnalysisConfig::from_json(&full).unwrap();
        assert_eq!(cfg.markov_graph().unwrap().edge_count(), 9);
        // the table no longer covers every allowed word
        assert!(matches!(cfg.model::<Rational>(), Err(ConfigError::Potential(_))));
    }

    #[test]
    fn rejects_unknown_keys_with_location() {
        let bad = E2.replace("\"connecting_set\"", "\"connecting\"");
        let err = AnalysisConfig::from_json(&bad).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn rejects_bad_numbers_and_schema() {
        let bad = E2.replace("\"value\": \"4\"", "\"value\": \"4.5\"");
        assert!(AnalysisConfig::from_json(&bad).unwrap_err().to_string().contains("line"));
        let bad = E2.replace("\"value\": \"4\"", "\"value\": 4");
        assert!(AnalysisConfig::from_json(&bad).is_err());
        let bad = E2.replace("\"schema\": 1", "\"schema\": 2");
        assert_eq!(AnalysisConfig::from_json(&bad), Err(ConfigError::Schema(2)));
    }

    #[test]
    fn tail_needs_declared_constants() {
        let bad = E2.replace(
            "\"connecting_set\"",
            r#""tail": {"type": "affine", "slope": "-1", "offset": "0"}, "connecting_set""#,
        );
        assert!(matches!(AnalysisConfig::from_json(&bad), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn table_tail() {
        let text = E2.replace(
            "\"connecting_set\"",
            r#""tail": {"type": "table", "entries": [{"symbol": 3, "value": "-1"}], "slope": "-1/2"},
               "declared": {"sup": "5", "var_total": "5"}, "connecting_set""#,
        );
        let cfg = AnalysisConfig::from_json(&text).unwrap();
        let model = cfg.model::<Rational>().unwrap();
        assert_eq!(model.i_max(), 2);
        assert_eq!(model.tail().unwrap().value(5), int(-2));
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            config_hash(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
