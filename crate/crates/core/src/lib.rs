//! Exact posterior inference for two-layer noisy/leaky OR-gate diagnostic
//! networks.
//!
//! Diseases are marginally independent binary causes; findings are binary
//! effects, conditionally independent given the diseases, each produced by a
//! leaky noisy-OR of its linked diseases. Given findings observed present
//! (F+) and absent (F-), [`score`] computes p(F+, F-) and every disease
//! posterior in O(n·m- + n·2^m+) with the quickscore inclusion-exclusion
//! algorithm. [`oracle`] computes the same quantities by enumerating all
//! 2^n disease instances and serves as ground truth.
//!
//! ```
//! use quickscore::{score, Evidence, Network};
//!
//! let network = Network::builder()
//!     .disease("flu", 0.1)
//!     .disease("cold", 0.2)
//!     .finding("fever", 0.0, [("flu", 0.8), ("cold", 0.5)])
//!     .finding("ache", 0.0, [("flu", 0.3)])
//!     .build()?;
//! let evidence = Evidence::new().with_positive(["fever"]).with_negative(["ache"]);
//! let result = score(&network, &evidence)?;
//! assert!((result.joint - 0.1474).abs() < 1e-12);
//! assert!((result.posteriors[0] - 0.0574 / 0.1474).abs() < 1e-12);
//! # Ok::<(), quickscore::Error>(())
//! ```

pub mod bench;
pub mod cli;
pub mod corpus;
pub mod engine;
mod error;
pub mod model;
pub mod oracle;
pub mod sum;

pub use engine::{negative_marginal, score, InferenceResult, Quickscore, Session, SubsetOrder};
pub use error::{CapKind, Error, Result};
pub use model::{
    finding_absent_given_instance, fold_leak_as_virtual_disease, validate, Disease,
    DiseaseInstance, Evidence, Network, Polarity, ValidationReport,
};
pub use oracle::{oracle_joint, oracle_posteriors, Oracle, OracleResult};
