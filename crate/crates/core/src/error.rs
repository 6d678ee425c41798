use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeP(u64),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("modulus has degree {got}, expected {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("extension degrees must be positive (e={e}, n={n})")]
    BadDegree { e: u32, n: u32 },
    #[error("field of order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: u128, max: u64 },
    #[error("operands belong to different field contexts")]
    CtxMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("coordinate {value} out of range for F_{p}")]
    BadCoordinate { value: u64, p: u64 },
    #[error("element has {got} coordinates, field has {expected}")]
    CoordinateLength { expected: usize, got: usize },

    #[error("coefficient {index} does not lie in the subfield F_q")]
    CoefficientOutsideSubfield { index: usize },
    #[error("linearized polynomial has {got} coefficients, expected at most {expected}")]
    LinPolyLength { expected: usize, got: usize },
    #[error("gcd criterion needs coefficients in F_q")]
    NotSubfieldCoefficients,

    #[error("map is not surjective onto {0}")]
    NotSurjective(&'static str),
    #[error("diagram does not commute at {0}")]
    NotCommuting(String),
    #[error("|S| = {s} differs from |S_bar| = {sbar}")]
    SizeMismatch { s: usize, sbar: usize },
    #[error("point {0} is outside the map's domain")]
    OutsideDomain(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("recipe parameter d={d} is invalid for n={n}")]
    BadDivisor { d: usize, n: u32 },
    #[error("anti-symmetric recipes need odd characteristic")]
    EvenCharacteristicForAnti,
    #[error("recipe contract violated: {0}")]
    RecipeContractViolated(String),
    #[error("exponent t={0} must be even")]
    OddT(i64),
    #[error("exponent {name}={value} must be nonnegative")]
    NegativeExponent { name: &'static str, value: i64 },
    #[error("delta does not satisfy {0}")]
    BadDelta(&'static str),
    #[error("gamma must be a nonzero element of F_q")]
    GammaZero,
    #[error("alpha/beta must satisfy x^(q^k) = -x")]
    BadAlphaBeta,
    #[error("beta must satisfy beta^q = -beta")]
    BadBeta,
    #[error("field degree n={n} is not supported by this family: {need}")]
    BadN { n: u32, need: &'static str },
    #[error("a must be a nonzero element of F_q")]
    ZeroA,
    #[error("coefficients a and b must be nonzero")]
    ZeroCoefficient,
    #[error("linearized polynomial has trivial kernel")]
    TrivialKernel,
    #[error("kernel element must be nonzero with L(a) = 0")]
    BadKernelElement,
    #[error("h does not satisfy h^q = h")]
    HContractViolated,
    #[error("{0}")]
    BadParameter(String),

    #[error("field order {order} exceeds scan cap {cap}")]
    FieldTooLarge { order: u64, cap: u64 },
    #[error("map is not bijective")]
    NotBijective,
    #[error("instance hypothesis unsatisfied: {0}")]
    HypothesisUnsatisfied(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
