use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("point ({u}, {v}) in chart {chart} is outside the field domain (margin {margin})")]
    Domain {
        u: f64,
        v: f64,
        chart: usize,
        margin: f64,
    },

    #[error("metric is singular or not positive definite at ({u}, {v}): det = {det}")]
    SingularMetric { u: f64, v: f64, det: f64 },

    #[error("invalid group element: det a = {0} must be positive")]
    InvalidElement(f64),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numerical integration failed: {0}")]
    Integration(String),

    #[error("paths are not comparable: {0}")]
    Incomparable(String),

    #[error("degenerate area form: density {0} below guard")]
    DegenerateAreaForm(f64),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
