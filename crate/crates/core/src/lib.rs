//! Ergodic optimization on finite truncations of countable Markov shifts.
//!
//! Potentials of finite range are recoded as edge weights of a higher-block
//! graph. The ergodic maximizing value is then a maximum cycle mean,
//! calibrated sub-actions are max-plus eigenvectors, and maximizing
//! measures live on the critical graph. For coercive countable models the
//! [`truncation`] module finds the level beyond which nothing changes.
//!
//! Every algorithm is generic over [`Scalar`], implemented for exact
//! rationals and for `f64`; the aliases below fix the exact choice.
//!
//! ```
//! use weakkam::{int, max_cycle_mean, ExactGraph};
//!
//! let g = ExactGraph::from_weighted_words(
//!     2,
//!     [(vec![0, 1], int(10)), (vec![1, 0], int(0))],
//! )
//! .unwrap();
//! assert_eq!(max_cycle_mean(&g).unwrap(), int(5));
//! ```

pub mod config;
pub mod maxplus;
pub mod measures;
pub mod num;
pub mod oracle;
pub mod pipeline;
pub mod potential;
pub mod report;
pub mod shift;
pub mod truncation;

pub use maxplus::{
    calibrated_subaction, check_certificate, critical_structure, finite_horizon_bound,
    max_cycle_mean, minimal_subaction, CertificateReport, CriticalStructure, MaxPlusError,
    SubAction, Verdict, WeightedBlockGraph,
};
pub use measures::{cycle_measure, integrate, maximizing_set, verify_maximizing, InvariantMeasure, PeriodicOrbit};
pub use num::{int, parse_rational, rational, Mode, Rational, Scalar};
pub use potential::{CountableModel, HoelderModel, Potential, Tail, VariationSummary};
pub use shift::{
    compute_primitivity, lift_blocks, trim_essential, truncate, BlockGraph, MarkovGraph,
    PrimitivityCertificate, Symbol, SymbolSet, Word,
};
pub use truncation::{compute_i_hat, plateau_scan, support_bound_check, TruncationReport};

pub type ExactGraph = WeightedBlockGraph<Rational>;
pub type FloatGraph = WeightedBlockGraph<f64>;
pub type ExactPotential = Potential<Rational>;
pub type FloatPotential = Potential<f64>;
pub type ExactModel = CountableModel<Rational>;
pub type FloatModel = CountableModel<f64>;
pub type ExactSubAction = SubAction<Rational>;
pub type FloatSubAction = SubAction<f64>;
