//! Cultural distances, capital-to-capital geodesics, migrant-stock derived
//! flow estimates, and the nonparametric test batteries built on top of them.
//!
//! The crate is organised around a pipeline:
//!
//! 1. [`ingest`] loads and validates the input tables (culture scores,
//!    capitals, bilateral migrant stocks, population series) into a
//!    [`ingest::Corpus`].
//! 2. [`culture`] and [`geodesy`] provide the two distance measures.
//! 3. [`flows`] converts five-wave migrant stocks into average annual flows
//!    normalised per million inhabitants.
//! 4. [`npstat`] is the distribution-free statistics engine (quantiles,
//!    robust summaries, Mann-Whitney U, Wilcoxon signed-rank).
//! 5. [`analysis`] stratifies country pairs by cultural proximity, runs the
//!    per-country test batteries and assembles the report datasets.

pub mod analysis;
pub mod country;
pub mod culture;
pub mod flows;
pub mod geodesy;
pub mod ingest;
pub mod npstat;

pub use country::CountryCode;
