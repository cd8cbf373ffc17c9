//! End-to-end orchestration: train a method into a [`ModelBundle`], produce
//! recommendations for a test corpus, and evaluate them.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ca_core::{CaError, CaModel};
use crate::corpus::{
    author_conference_matrix, paper_conference_matrix, paper_conference_rows, Corpus, CorpusError, VenueCatalog,
};
use crate::evaluation::{evaluate, EvalError, EvalReport, RelevanceScheme, ResultTable, SchemeKind};
use crate::lda::{topic_labels, LdaConfig, LdaError, LdaModel};
use crate::recommenders::{
    m1_fit, m1_recommend, m2_fit, m2_recommend, m3_fit, m3_recommend, m4_recommend, m5_recommend, m6_recommend,
    LinearMapModel, Method, RankedRecommendation, RecommendError, Representation,
};
use crate::scalar::Real;
use crate::similarity::SimilarityKind;
use crate::table::ContingencyTable;
use crate::text_features::{build_vocabulary, tfidf_matrix, word_conference_matrix, DocTermMatrix, TextError, Vocabulary, Weighting};

pub const BUNDLE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Lda(#[from] LdaError),
    #[error(transparent)]
    Ca(#[from] CaError),
    #[error(transparent)]
    Recommend(#[from] RecommendError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("bundle lacks `{0}` needed by its method")]
    MethodInputMissing(&'static str),
    #[error("bundle format version {found} is not supported (expected {BUNDLE_FORMAT_VERSION})")]
    Version { found: u32 },
    #[error("test corpus is empty")]
    EmptyTestCorpus,
    #[error("test corpus venue catalog differs from the one the model was trained on")]
    CatalogMismatch,
    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON on line {line}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

impl PipelineError {
    /// Errors caused by bad user input, as opposed to failures while running.
    pub fn is_validation(&self) -> bool {
        match self {
            Self::Corpus(CorpusError::Io { .. }) => false,
            Self::Corpus(_) | Self::Text(_) | Self::Eval(_) => true,
            Self::Lda(e) => matches!(e, LdaError::InvalidConfig(_) | LdaError::EmptyCorpus),
            Self::Ca(e) => matches!(
                e,
                CaError::DimsTooLarge { .. } | CaError::ZeroGrandTotal | CaError::LabelMismatch { .. } | CaError::Version(_)
            ),
            Self::Recommend(e) => !matches!(e, RecommendError::Ca(CaError::SvdFailed)),
            Self::InvalidParam(_)
            | Self::MethodInputMissing(_)
            | Self::Version { .. }
            | Self::EmptyTestCorpus
            | Self::CatalogMismatch
            | Self::Json { .. } => true,
            Self::Io { .. } => false,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Everything `train` needs besides the corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub method: Method,
    pub representation: Representation,
    /// CA dimensions for m1 and m2.
    pub dims: usize,
    /// m3 paper-space dimensions.
    pub dims_paper: usize,
    /// m3 venue-space dimensions.
    pub dims_conf: usize,
    /// Minimum document frequency for a vocabulary term.
    pub min_df: usize,
    pub lda: LdaConfig,
    /// Fold-in sweeps per unseen document.
    pub infer_iterations: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            method: Method::M4Content,
            representation: Representation::Tfidf,
            dims: 10,
            dims_paper: 10,
            dims_conf: 10,
            min_df: 1,
            lda: LdaConfig::default(),
            infer_iterations: 100,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.method.uses_content() && self.representation == Representation::None {
            return Err(PipelineError::InvalidParam(format!(
                "method {} needs a tfidf or topics representation",
                self.method
            )));
        }
        if self.dims == 0 || self.dims_paper == 0 || self.dims_conf == 0 {
            return Err(PipelineError::InvalidParam("dimensions must be at least 1".into()));
        }
        if self.min_df == 0 {
            return Err(PipelineError::InvalidParam("min-df must be at least 1".into()));
        }
        if self.representation == Representation::Topics {
            self.lda.validate()?;
        }
        Ok(())
    }

    /// Representation actually used: methods without content ignore it.
    pub fn effective_representation(&self) -> Representation {
        if self.method.uses_content() {
            self.representation
        } else {
            Representation::None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub method: Method,
    pub representation: Representation,
    pub params: TrainParams,
    pub n_train_papers: usize,
}

/// Trained state for one method. Components a method does not use are
/// absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ModelBundle<T: Real> {
    pub format_version: u32,
    pub manifest: Manifest,
    pub catalog: VenueCatalog,
    pub vocabulary: Option<Vocabulary>,
    pub lda: Option<LdaModel>,
    /// Feature x venue centroids.
    pub word_conf: Option<ContingencyTable<T>>,
    pub ca: Option<CaModel<T>>,
    pub linear_map: Option<LinearMapModel<T>>,
    /// Author x venue counts of the training corpus.
    pub author_history: Option<ContingencyTable<T>>,
    pub train_paper_conf: Option<ContingencyTable<T>>,
    pub train_features: Option<DocTermMatrix<T>>,
}

impl<T: Real> ModelBundle<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bundle serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, PipelineError> {
        #[derive(Deserialize)]
        struct Header {
            format_version: u32,
        }
        let header: Header = serde_json::from_str(s).map_err(|source| PipelineError::Json { line: 1, source })?;
        if header.format_version != BUNDLE_FORMAT_VERSION {
            return Err(PipelineError::Version {
                found: header.format_version,
            });
        }
        let mut bundle: Self = serde_json::from_str(s).map_err(|source| PipelineError::Json { line: 1, source })?;
        bundle.vocabulary = bundle.vocabulary.map(Vocabulary::reindexed);
        Ok(bundle)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), PipelineError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(io_err(path))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(io_err(path))?)
    }

    fn require<'a, C>(c: &'a Option<C>, name: &'static str) -> Result<&'a C, PipelineError> {
        c.as_ref().ok_or(PipelineError::MethodInputMissing(name))
    }
}

fn lda_docs(corpus: &Corpus, vocab: &Vocabulary) -> Vec<Vec<usize>> {
    corpus.papers().iter().map(|p| vocab.token_ids(&p.abstract_text)).collect()
}

fn paper_ids(corpus: &Corpus) -> Vec<String> {
    corpus.papers().iter().map(|p| p.paper_id.clone()).collect()
}

/// Fits everything `params.method` needs on the training corpus.
pub fn train<T: Real>(corpus: &Corpus, params: &TrainParams) -> Result<ModelBundle<T>, PipelineError> {
    params.validate()?;
    if corpus.is_empty() {
        return Err(CorpusError::Invalid("training corpus is empty".into()).into());
    }
    let method = params.method;
    let representation = params.effective_representation();
    let mut bundle = ModelBundle {
        format_version: BUNDLE_FORMAT_VERSION,
        manifest: Manifest {
            method,
            representation,
            params: params.clone(),
            n_train_papers: corpus.len(),
        },
        catalog: corpus.catalog().clone(),
        vocabulary: None,
        lda: None,
        word_conf: None,
        ca: None,
        linear_map: None,
        author_history: None,
        train_paper_conf: None,
        train_features: None,
    };

    let features = if method.uses_content() {
        let vocab = build_vocabulary(corpus, params.min_df)?;
        let features = match representation {
            Representation::Topics => {
                let lda = LdaModel::fit(lda_docs(corpus, &vocab), vocab.len(), params.lda.clone())?;
                let m = lda.doc_topic_matrix::<T>(&paper_ids(corpus));
                bundle.lda = Some(lda);
                m
            }
            _ => tfidf_matrix::<T>(corpus, &vocab),
        };
        bundle.vocabulary = Some(vocab);
        Some(features)
    } else {
        None
    };

    match method {
        Method::M1AuthorCa => {
            let history = author_conference_matrix::<T>(corpus);
            bundle.ca = Some(m1_fit(&history, params.dims)?);
            bundle.author_history = Some(history);
        }
        Method::M2ComposedCa | Method::M3LinearMap | Method::M4Content => {
            let features = features.expect("content method");
            let word_conf = word_conference_matrix(&features, corpus);
            match method {
                Method::M2ComposedCa => bundle.ca = Some(m2_fit(&features, &word_conf, params.dims)?),
                Method::M3LinearMap => {
                    bundle.linear_map = Some(m3_fit(
                        &features,
                        &word_conf,
                        &corpus.truth(),
                        params.dims_paper,
                        params.dims_conf,
                    )?)
                }
                _ => {}
            }
            bundle.word_conf = Some(word_conf);
        }
        Method::M5Collaborative | Method::M6Hybrid => {
            bundle.train_paper_conf = Some(paper_conference_matrix::<T>(corpus, corpus));
            bundle.author_history = Some(author_conference_matrix::<T>(corpus));
            if method == Method::M6Hybrid {
                bundle.train_features = features;
            }
        }
    }
    Ok(bundle)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecommendOptions {
    /// Treat every test author as unknown (all-zero history).
    pub null_authors: bool,
}

fn test_features<T: Real>(bundle: &ModelBundle<T>, test: &Corpus) -> Result<DocTermMatrix<T>, PipelineError> {
    let vocab = ModelBundle::<T>::require(&bundle.vocabulary, "vocabulary")?;
    match bundle.manifest.representation {
        Representation::Topics => {
            let lda = ModelBundle::<T>::require(&bundle.lda, "lda")?;
            let params = &bundle.manifest.params;
            let k = lda.n_topics();
            let mut values = DMatrix::<T>::zeros(test.len(), k);
            for (i, p) in test.papers().iter().enumerate() {
                let seed = params.lda.seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                match lda.infer_document::<T>(&vocab.token_ids(&p.abstract_text), params.infer_iterations, seed) {
                    Ok(mix) => values.set_row(i, &nalgebra::RowDVector::from_vec(mix)),
                    Err(LdaError::AllTokensUnknown) => {
                        log::warn!("paper `{}` has no in-vocabulary tokens; zero topic row", p.paper_id)
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(DocTermMatrix {
                rows: paper_ids(test),
                cols: topic_labels(k),
                values,
                weighting: Weighting::Topics,
            })
        }
        _ => Ok(tfidf_matrix::<T>(test, vocab)),
    }
}

fn history_for_test<T: Real>(history: &ContingencyTable<T>, null_authors: bool) -> ContingencyTable<T> {
    if null_authors {
        let zero = DMatrix::zeros(history.nrows(), history.ncols());
        ContingencyTable::new(history.row_labels().to_vec(), history.col_labels().to_vec(), zero)
            .expect("same labels")
    } else {
        history.clone()
    }
}

/// One ranking per test paper, in corpus order.
pub fn recommend<T: Real>(
    bundle: &ModelBundle<T>,
    test: &Corpus,
    kind: SimilarityKind,
    options: RecommendOptions,
) -> Result<Vec<RankedRecommendation<T>>, PipelineError> {
    if test.is_empty() {
        return Err(PipelineError::EmptyTestCorpus);
    }
    if test.catalog() != &bundle.catalog {
        return Err(PipelineError::CatalogMismatch);
    }
    let method = bundle.manifest.method;
    let recs = match method {
        Method::M1AuthorCa => {
            let ca = ModelBundle::<T>::require(&bundle.ca, "ca")?;
            let history = history_for_test(
                ModelBundle::<T>::require(&bundle.author_history, "author_history")?,
                options.null_authors,
            );
            let row_of: BTreeMap<&str, usize> = history
                .row_labels()
                .iter()
                .enumerate()
                .map(|(i, a)| (a.as_str(), i))
                .collect();
            test.papers()
                .iter()
                .map(|p| {
                    let mut rows = DMatrix::<T>::zeros(p.author_ids.len(), history.ncols());
                    for (r, a) in p.author_ids.iter().enumerate() {
                        if let Some(&h) = row_of.get(a.as_str()) {
                            rows.set_row(r, &history.counts().row(h));
                        }
                    }
                    m1_recommend(ca, &p.paper_id, &rows, kind)
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        Method::M2ComposedCa => {
            let ca = ModelBundle::<T>::require(&bundle.ca, "ca")?;
            let word_conf = ModelBundle::<T>::require(&bundle.word_conf, "word_conf")?;
            m2_recommend(ca, &test_features(bundle, test)?, word_conf, kind)?
        }
        Method::M3LinearMap => {
            let lm = ModelBundle::<T>::require(&bundle.linear_map, "linear_map")?;
            m3_recommend(lm, &test_features(bundle, test)?, kind)?
        }
        Method::M4Content => {
            let word_conf = ModelBundle::<T>::require(&bundle.word_conf, "word_conf")?;
            m4_recommend(&test_features(bundle, test)?, word_conf, kind)?
        }
        Method::M5Collaborative => {
            let train_pc = ModelBundle::<T>::require(&bundle.train_paper_conf, "train_paper_conf")?;
            let history = history_for_test(
                ModelBundle::<T>::require(&bundle.author_history, "author_history")?,
                options.null_authors,
            );
            m5_recommend(train_pc, &paper_conference_rows(test, &history), kind)?
        }
        Method::M6Hybrid => {
            let train_pc = ModelBundle::<T>::require(&bundle.train_paper_conf, "train_paper_conf")?;
            let train_features = ModelBundle::<T>::require(&bundle.train_features, "train_features")?;
            m6_recommend(train_pc, train_features, &test_features(bundle, test)?, kind)?
        }
    };
    let degenerate = recs.iter().filter(|r| r.degenerate).count();
    if degenerate > 0 {
        log::warn!("{degenerate} of {} test papers had a degenerate query vector", recs.len());
    }
    Ok(recs)
}

pub fn write_recommendations<T: Real, W: Write>(recs: &[RankedRecommendation<T>], mut out: W) -> std::io::Result<()> {
    for r in recs {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_recommendations<T: Real, R: BufRead>(input: R) -> Result<Vec<RankedRecommendation<T>>, PipelineError> {
    let mut recs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|source| PipelineError::Io {
            path: "<recommendations>".into(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        recs.push(serde_json::from_str(&line).map_err(|source| PipelineError::Json { line: i + 1, source })?);
    }
    Ok(recs)
}

/// Evaluates recommendations under each requested scheme.
pub fn evaluate_schemes<T: Real>(
    recs: &[RankedRecommendation<T>],
    test: &Corpus,
    schemes: &[SchemeKind],
    k: usize,
) -> Result<Vec<EvalReport>, PipelineError> {
    let truth = test.truth();
    schemes
        .iter()
        .map(|&s| Ok(evaluate(recs, &truth, &RelevanceScheme::new(s, test.catalog().clone()), k)?))
        .collect()
}

/// Settings of a full train, recommend and evaluate run.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub test_year: i32,
    pub params: TrainParams,
    pub similarities: Vec<SimilarityKind>,
    pub schemes: Vec<SchemeKind>,
    pub k: usize,
    pub options: RecommendOptions,
}

impl Experiment {
    pub fn new(test_year: i32, params: TrainParams) -> Self {
        Self {
            test_year,
            params,
            similarities: SimilarityKind::ALL.to_vec(),
            schemes: SchemeKind::ALL.to_vec(),
            k: 5,
            options: RecommendOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome<T: Real> {
    pub table: ResultTable,
    pub reports: Vec<(SimilarityKind, EvalReport)>,
    pub recommendations: Vec<(SimilarityKind, Vec<RankedRecommendation<T>>)>,
}

impl<T: Real> ExperimentOutcome<T> {
    pub fn report(&self, kind: SimilarityKind, scheme: SchemeKind) -> Option<&EvalReport> {
        self.reports
            .iter()
            .find(|(k, r)| *k == kind && r.scheme == scheme)
            .map(|(_, r)| r)
    }
}

pub fn run_experiment<T: Real>(corpus: &Corpus, experiment: &Experiment) -> Result<ExperimentOutcome<T>, PipelineError> {
    let (train_set, test_set) = corpus.split_by_year(experiment.test_year)?;
    let bundle = train::<T>(&train_set, &experiment.params)?;
    let mut outcome = ExperimentOutcome {
        table: ResultTable::default(),
        reports: Vec::new(),
        recommendations: Vec::new(),
    };
    for &kind in &experiment.similarities {
        let recs = recommend(&bundle, &test_set, kind, experiment.options)?;
        for report in evaluate_schemes(&recs, &test_set, &experiment.schemes, experiment.k)? {
            outcome.table.push(kind.to_string(), &report);
            outcome.reports.push((kind, report));
        }
        outcome.recommendations.push((kind, recs));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_synthetic_corpus, SynthConfig};

    fn small() -> Corpus {
        generate_synthetic_corpus(&SynthConfig {
            n_venues: 8,
            venues_per_sig: 4,
            n_train: 160,
            n_test: 40,
            ..SynthConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn every_method_runs_and_round_trips() {
        let corpus = small();
        let (train_set, test_set) = corpus.split_by_year(2010).unwrap();
        for method in Method::ALL {
            for representation in [Representation::Tfidf, Representation::Topics] {
                let params = TrainParams {
                    method,
                    representation,
                    dims: 5,
                    dims_paper: 5,
                    dims_conf: 5,
                    lda: LdaConfig {
                        n_topics: 8,
                        n_iterations: 20,
                        seed: 3,
                        ..LdaConfig::default()
                    },
                    infer_iterations: 10,
                    ..TrainParams::default()
                };
                let bundle = train::<f64>(&train_set, &params).unwrap();
                let back = ModelBundle::<f64>::from_json(&bundle.to_json()).unwrap();
                assert_eq!(back.to_json(), bundle.to_json());
                let recs = recommend(&back, &test_set, SimilarityKind::Cosine, RecommendOptions::default()).unwrap();
                assert_eq!(recs.len(), test_set.len());
                assert!(recs.iter().all(|r| r.ranking.len() == 8));
                assert_eq!(recs, recommend(&bundle, &test_set, SimilarityKind::Cosine, RecommendOptions::default()).unwrap());
            }
        }
    }

    #[test]
    fn content_method_needs_representation() {
        let params = TrainParams {
            method: Method::M2ComposedCa,
            representation: Representation::None,
            ..TrainParams::default()
        };
        assert!(matches!(params.validate(), Err(PipelineError::InvalidParam(_))));
    }

    #[test]
    fn unsupported_bundle_version() {
        let err = ModelBundle::<f64>::from_json(r#"{"format_version": 99}"#).unwrap_err();
        assert!(matches!(err, PipelineError::Version { found: 99 }));
        assert!(err.is_validation());
    }

    #[test]
    fn recommendations_jsonl_round_trip() {
        let corpus = small();
        let outcome = run_experiment::<f64>(
            &corpus,
            &Experiment::new(2010, TrainParams { dims: 5, ..TrainParams::default() }),
        )
        .unwrap();
        let recs = &outcome.recommendations[0].1;
        let mut buf = Vec::new();
        write_recommendations(recs, &mut buf).unwrap();
        assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), recs.len());
        let back: Vec<RankedRecommendation<f64>> = read_recommendations(buf.as_slice()).unwrap();
        assert_eq!(&back, recs);
        assert_eq!(outcome.table.columns.len(), 6);
    }
}
