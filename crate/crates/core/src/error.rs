use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("field mismatch: cannot combine real and complex subspaces")]
    FieldMismatch,
    #[error("forward image is not Lagrangian (dim {dim}, expected {expected}, isotropy residual {residual:e})")]
    NonLagrangianResult {
        dim: usize,
        expected: usize,
        residual: f64,
    },
    #[error("input is not Lagrangian: {0}")]
    NonLagrangianInput(String),
    #[error("Dirac morphism is not strong for this structure")]
    NotStrong,
    #[error("matrix is not orthogonal (residual {0:e})")]
    NotOrthogonal(f64),
    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not skew (residual {0:e})")]
    NotSkew(f64),
    #[error("2-form is degenerate (smallest singular value {0:e})")]
    SingularForm(f64),
    #[error("operator is not invertible (smallest |eigenvalue| {0:e})")]
    SingularOperator(f64),
    #[error("kernel of J1 + J2 has odd dimension {0}")]
    OddKernel(usize),
    #[error("wedge window {0} exceeds the supported maximum of 12")]
    WindowTooLarge(usize),
    #[error("element is not in the group (residual {0:e})")]
    NotInGroup(f64),
    #[error("moment condition is inconsistent (least-squares residual {0:e})")]
    InconsistentMomentCondition(f64),
    #[error("not a regular point: {0}")]
    NotRegular(String),
    #[error("action is not free at this point (generator rank {rank} < {expected})")]
    NotFree { rank: usize, expected: usize },
    #[error("points belong to different group contexts")]
    ContextMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
