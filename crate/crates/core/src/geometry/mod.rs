//! Orthogonal curvilinear charts, local frames, and quaternion-valued
//! fields written in those frames.

mod chart;
pub mod definition;
mod field;

use thiserror::Error;

use crate::expr::EvalError;

pub use chart::{
    builtin_chart, Chart, ChartSpec, FramePoint, OrthogonalityReport, BUILTIN_CHARTS, DEGENERATE_METRIC, FRAME_TOL,
    ORTHOGONALITY_TOL,
};
pub use definition::{parse_point, DefinitionFile};
pub use field::{frame_quaternion_to_cartesian, vector_to_cartesian, ComplexExpr, FieldSpec, QuatField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("point {point:?} is outside the domain of chart `{chart}`")]
    OutOfDomain { chart: String, point: [f64; 3] },
    #[error("metric coefficient h{} = {value:e} is degenerate at {point:?} on chart `{chart}`", index + 1)]
    DegenerateMetric {
        chart: String,
        point: [f64; 3],
        index: usize,
        value: f64,
    },
    #[error("frame of chart `{chart}` is not orthonormal at {point:?}: {detail}")]
    FrameNotOrthonormal {
        chart: String,
        point: [f64; 3],
        detail: String,
    },
    #[error("chart `{chart}` failed the orthogonality check (max |u_i.u_j| = {:e}, min h = {:e})", report.max_off_diagonal, report.min_metric)]
    NotOrthogonal { chart: String, report: OrthogonalityReport },
    #[error("chart `{0}` has not passed an orthogonality check")]
    ChartNotValidated(String),
    #[error("invalid definition: {0}")]
    Definition(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
