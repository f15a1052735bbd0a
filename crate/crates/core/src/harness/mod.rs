//! Randomized corpora, closed-form tables and the verification suites.

pub mod corpus;
pub mod golden;
pub mod report;
pub mod suite;

use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::operators::OpError;

pub use corpus::{generate_corpus, generate_corpus_on, FieldCorpus};
pub use golden::{GoldenForm, GoldenInputs, GoldenOp, GoldenTable};
pub use report::{emit_report, Diagnostic, Metric, Record, VerificationReport, SCHEMA_VERSION};
pub use suite::{golden_spherical_suite, golden_suite, identity_suite, Identity, Scope, SuiteConfig};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("corpus count must be at least 1")]
    EmptyCorpus,
    #[error("could not generate a field that evaluates cleanly on chart `{0}`")]
    Screening(String),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid report: {0}")]
    Report(String),
    #[error("golden forms: {0}")]
    Fixture(String),
}
