//! Core algorithms for query performance prediction (QPP) experiments.
//!
//! This crate holds everything that does not touch the filesystem: corpus
//! term statistics, Dirichlet-smoothed language-model scoring, the classic
//! pre- and post-retrieval predictors, rank-correlation and sARE evaluation,
//! and balanced factorial ANOVA with omega-squared effect sizes.
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm`
//! feature when building without `std` to provide float math.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod anova;
pub mod corpus;
pub mod evaluation;
pub mod lm;
mod math;
pub mod porter;
pub mod predictors;
pub mod run;
pub mod special;

pub use corpus::{CorpusStats, CorpusStatsBuilder, Document, StopwordFilter, TokenizationConfig};
pub use lm::{LanguageModel, Query};
pub use predictors::{
    Aggregation, IdfVariant, PredictionTable, Predictor, PredictorSpec, ScoreSource, UefBase,
};
pub use run::{RankedList, Run, RunEntry, RunType};
