//! The (pyramid, space, rubric) triple every assessment needs.

use std::fs;
use std::path::Path;

use ideacheck::corpus::{load_pyramid, load_rubric, CorpusError};
use ideacheck::embedding::EmbeddingError;
use ideacheck::{EmbeddingSpace, Pyramid, Rubric};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("vector dictionary {path}: {source}")]
    Space {
        path: String,
        #[source]
        source: EmbeddingError,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("pyramid was built over space {pyramid}, but the dictionary is {space}")]
    SpaceMismatch { pyramid: String, space: String },
    #[error("pyramid is not labelled for this rubric (pyramid rubric {pyramid}, rubric {rubric}); rebuild it with build-pyramid")]
    RubricMismatch { pyramid: String, rubric: String },
    #[error("pyramid vectors have dimension {pyramid}, space has {space}")]
    Dimension { pyramid: usize, space: usize },
}

#[derive(Debug, Clone)]
pub struct Bundle {
    pub pyramid: Pyramid,
    pub space: EmbeddingSpace,
    pub rubric: Rubric,
}

pub fn load_space(path: &Path) -> Result<EmbeddingSpace, BundleError> {
    let data = fs::read_to_string(path).map_err(|source| BundleError::Io {
        path: path.display().to_string(),
        source,
    })?;
    EmbeddingSpace::read_dictionary(&data).map_err(|source| BundleError::Space {
        path: path.display().to_string(),
        source,
    })
}

/// The rubric at `path`, or the built-in roller-coaster rubric.
pub fn rubric_or_default(path: Option<&Path>) -> Result<Rubric, BundleError> {
    Ok(match path {
        Some(p) => load_rubric(p)?,
        None => Rubric::roller_coaster(),
    })
}

impl Bundle {
    pub fn new(pyramid: Pyramid, space: EmbeddingSpace, rubric: Rubric) -> Result<Self, BundleError> {
        if pyramid.embedding_space_id != space.id() {
            return Err(BundleError::SpaceMismatch {
                pyramid: pyramid.embedding_space_id.clone(),
                space: space.id().to_string(),
            });
        }
        let hash = pyramid.rubric_hash.clone().unwrap_or_default();
        if hash != rubric.hash() || !pyramid.is_rubric_ready(&rubric) {
            return Err(BundleError::RubricMismatch {
                pyramid: if hash.is_empty() { "none".into() } else { hash },
                rubric: rubric.hash(),
            });
        }
        if pyramid.dimension() != space.dimension() {
            return Err(BundleError::Dimension {
                pyramid: pyramid.dimension(),
                space: space.dimension(),
            });
        }
        Ok(Bundle {
            pyramid,
            space,
            rubric,
        })
    }

    pub fn load(pyramid: &Path, space: &Path, rubric: Option<&Path>) -> Result<Self, BundleError> {
        Bundle::new(load_pyramid(pyramid)?, load_space(space)?, rubric_or_default(rubric)?)
    }
}
