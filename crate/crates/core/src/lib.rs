//! Spectral topic estimation, citation-based topic ranking and bibliometric
//! statistics for academic corpora.
//!
//! The pipeline runs from a raw corpus to a word-frequency matrix
//! ([`corpus`]), through the spectral topic estimator ([`spectral`]) and
//! per-document topic weights ([`weights`]), to topic export scores and
//! citation graphs between topics ([`ranking`]). [`metrics`] holds the
//! descriptive statistics and [`synth`] the generators used to test the
//! estimators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod glm;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod ranking;
pub mod spectral;
pub mod synth;
pub mod weights;

pub use corpus::{CitationGraph, DocumentTermMatrix, PaperMeta, PreprocessConfig, Vocabulary};
pub use error::{Error, ErrorCategory, Result};
pub use ranking::{tr_score, ExportScores, PairSelection, TrScoreOptions};
pub use spectral::{estimate_topic_matrix, select_k_scree, FitOptions, TopicModelFit};
pub use weights::{estimate_weights_ridge, estimate_weights_wls, TopicWeights};
