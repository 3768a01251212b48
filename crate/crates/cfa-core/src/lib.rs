//! Combinatorial fusion analysis of multiple scoring systems.
//!
//! This crate combines k scoring systems over a shared item set using four
//! operators: average score combination (ASC), average rank combination
//! (ARC), and their diversity-weighted variants (WSCDS, WRCDS), where the
//! weights are each system's cognitive diversity strength. Around that core
//! it provides:
//!
//! - tie-aware rank derivation and rank-score functions ([`scoring`]);
//! - cognitive diversity and diversity strength ([`diversity`]);
//! - subset enumeration and fused rankings ([`fusion`]);
//! - the bubble-sort Cayley graph, weak orders and the Kemeny-Snell metric
//!   at desk scale ([`kemeny`]);
//! - ROUGE-L and a pluggable unit scorer ([`metrics`]);
//! - a question-answer unit-selection pipeline with CSV reports
//!   ([`pipeline`]);
//! - a seeded synthetic-matrix generator and diversity-vs-accuracy study
//!   ([`simulate`]).

pub mod diversity;
pub mod error;
pub mod fusion;
pub mod kemeny;
pub mod metrics;
pub mod pipeline;
pub mod scoring;
pub mod simulate;

pub use error::{Error, Result};
pub use scoring::{
    derive_ranking, normalize_scores, rank_score_function, Item, RankScoreFunction, Ranking,
    ScoreMatrix, ScoringSystem, TiePolicy,
};
