use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApolyError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed a-poly: {0}")]
    Malformed(String),
    #[error("degenerate feature: {0}")]
    DegenerateFeature(String),
    #[error("vertex {0} has no coordinates")]
    MissingVertex(String),
    #[error("bijection does not cover vertex {0}")]
    IncompleteBijection(String),
}
