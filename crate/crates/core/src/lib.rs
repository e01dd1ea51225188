//! Main-idea detection for explanation essays.
//!
//! A pyramid content model is built from a handful of exemplar essays: their
//! clauses are embedded into a vector space and grouped into content units,
//! the heaviest of which correspond one-to-one with the main ideas of a
//! rubric. A student essay is segmented into clauses, embedded the same way,
//! and matched against the pyramid through a conflict graph solved by greedy
//! maximal independent set selection. The result is a per-idea checklist.
//!
//! The crate is organised as a pipeline:
//!
//! - [`corpus`]: essays, rubrics, gold labels and their file formats.
//! - [`segmenter`]: sentence and clause segmentation.
//! - [`embedding`]: tf-idf term matrices, WTMF training, fold-in, refinement,
//!   external vectors and space concatenation.
//! - [`pyramid`]: content-unit grouping, candidate enumeration, rubric
//!   labelling and pyramid selection.
//! - [`assessment`]: match hypergraph, greedy MIS and the feedback checklist.
//! - [`analytics`]: accuracy scoring, grid search and diagnostic tables.

pub mod analytics;
pub mod assessment;
pub mod corpus;
pub mod embedding;
pub mod pyramid;
pub mod segmenter;

mod hashing;

pub use assessment::{Assessment, AssessmentConfig, FeedbackChecklist};
pub use corpus::{Corpus, Essay, GoldLabels, MainIdea, Role, Rubric};
pub use embedding::{ClauseKey, ClauseVector, EmbeddingSpace, WtmfConfig};
pub use pyramid::{ContentUnit, Pyramid};
pub use segmenter::{Clause, RuleSegmenter, Segmenter, Sentence};
