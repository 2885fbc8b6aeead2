use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponent is not affine in kappa: {0}")]
    NonAffineExponent(String),
    #[error("symbol `{0}` is not classified in this context")]
    UnclassifiedSymbol(String),
    #[error("`{0}` is not an internal coordinate of this context")]
    NotInternal(String),
    #[error("prolongation order {order} exceeds the limit {limit}")]
    OrderLimit { order: u32, limit: u32 },
    #[error("invalid symbol name `{0}`")]
    BadSymbol(String),
    #[error("expression is not linear in `{0}`")]
    NonLinear(String),
    #[error("linear system is singular")]
    Singular,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("exact division failed")]
    NotDivisible,
    #[error("form degree exceeds 3")]
    DegreeOverflow,
    #[error("cancellation failure: {0}")]
    CancellationFailure(String),
    #[error("no admissible sample point found within the retry bound")]
    SamplingExhausted,
    #[error("fractional power of a negative value")]
    FractionalPowerOfNegative,
    #[error("cannot evaluate: {0}")]
    Evaluation(String),
}

pub type Result<T> = core::result::Result<T, KernelError>;
