use thiserror::Error;

use crate::expr::ParseError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    /// Division by zero or a function evaluated outside its domain.
    #[error("degenerate value: {0}")]
    DegenerateValue(String),
    #[error("domain error: {0}")]
    Domain(String),
    /// A derivative was requested beyond the stored jet order.
    #[error("insufficient jet order: need {needed}, have {have}")]
    Order { needed: u8, have: u8 },
    /// Metric or almost complex structure violates its defining identities.
    #[error("structure error: {0}")]
    Structure(String),
    #[error("no adapted frame: {0}")]
    DegenerateFrame(String),
    #[error("chart error: {0}")]
    Chart(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("invalid manifold spec: {0}")]
    Spec(String),
    #[error("unknown manifold `{0}`")]
    UnknownManifold(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
