use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("division not exact: remainder has degree {remainder_degree}")]
    NotExact { remainder_degree: usize },
    #[error("interval endpoint is a root of the polynomial")]
    EndpointIsRoot,
    #[error("invalid interval: lo must be strictly below hi")]
    EmptyInterval,
    #[error("square root of a negative rational")]
    NegativeSqrt,
    #[error("tolerance must be strictly positive")]
    ToleranceNotPositive,
    #[error("cannot isolate roots of the zero polynomial")]
    ZeroPolynomial,
}
