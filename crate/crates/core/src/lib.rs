//! Venue recommendation for research papers built on correspondence
//! analysis, topic models and tf-idf content features.
//!
//! Numeric code is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the scalar for common use.

pub mod ca_core;
pub mod corpus;
pub mod evaluation;
pub mod lda;
pub mod linalg;
pub mod pipeline;
pub mod recommenders;
pub mod scalar;
pub mod similarity;
pub mod table;
pub mod text_features;

pub use ca_core::{ca_fit, CaError, CaModel, Projection};
pub use corpus::{Corpus, CorpusError, CorpusFormat, PaperRecord, SynthConfig, VenueCatalog};
pub use evaluation::{evaluate, EvalError, EvalReport, MetricValues, RelevanceScheme, ResultTable, SchemeKind};
pub use lda::{LdaConfig, LdaError, LdaModel};
pub use pipeline::{ModelBundle, PipelineError, TrainParams};
pub use recommenders::{LinearMap, Method, RankedRecommendation, RecommendError, Representation};
pub use scalar::Real;
pub use similarity::{SimilarityError, SimilarityKind};
pub use table::{ContingencyTable, TableError};
pub use text_features::{DocTermMatrix, TextError, Vocabulary};

pub type ContingencyTableF64 = ContingencyTable<f64>;
pub type ContingencyTableF32 = ContingencyTable<f32>;
pub type CaModelF64 = CaModel<f64>;
pub type CaModelF32 = CaModel<f32>;
pub type DocTermMatrixF64 = DocTermMatrix<f64>;
pub type DocTermMatrixF32 = DocTermMatrix<f32>;
pub type RecommendationF64 = RankedRecommendation<f64>;
pub type RecommendationF32 = RankedRecommendation<f32>;
pub type ModelBundleF64 = ModelBundle<f64>;
pub type ModelBundleF32 = ModelBundle<f32>;
