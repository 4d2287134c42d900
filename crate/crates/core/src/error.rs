use std::fmt;

use thiserror::Error;

/// A hypothesis some criterion relies on, reported when it fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hypothesis {
    /// The degree must be at least 3.
    DegreeAtLeastThree,
    /// The Matsumura–Monsky type condition on (n, a, d).
    MatsumuraMonsky,
    /// The prime divides the degree.
    PrimeDividesDegree { p: u64 },
    /// The prime divides `d - a_i`.
    PrimeDividesDegreeMinusWeight { p: u64, index: usize },
    /// Every weight must divide the degree.
    WeightsDivideDegree,
    /// Every weight must be coprime to the degree.
    WeightsCoprimeToDegree,
    /// The weighted projective space must be well-formed.
    WellFormed,
    /// The linear automorphism group must be finite.
    FiniteLinearAutomorphisms,
    /// The hypersurface must not be a linear cone.
    NotLinearCone,
    /// The order must be a prime (not a higher prime power).
    PrimeOrder,
    /// The prime must exceed the degree.
    PrimeExceedsDegree,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::DegreeAtLeastThree => write!(f, "degree must be at least 3"),
            Hypothesis::MatsumuraMonsky => {
                write!(f, "n = 2 requires a_0 + a_1 + a_2 + a_3 != d")
            }
            Hypothesis::PrimeDividesDegree { p } => write!(f, "p = {p} divides d"),
            Hypothesis::PrimeDividesDegreeMinusWeight { p, index } => {
                write!(f, "p = {p} divides d - a_{index}")
            }
            Hypothesis::WeightsDivideDegree => write!(f, "every weight must divide d"),
            Hypothesis::WeightsCoprimeToDegree => {
                write!(f, "every weight must be coprime to d")
            }
            Hypothesis::WellFormed => write!(f, "weights are not well-formed"),
            Hypothesis::FiniteLinearAutomorphisms => {
                write!(f, "linear automorphism group is infinite (d < 2 max(a) or tie)")
            }
            Hypothesis::NotLinearCone => write!(f, "hypersurface is a linear cone (some a_i = d)"),
            Hypothesis::PrimeOrder => write!(f, "order must be prime"),
            Hypothesis::PrimeExceedsDegree => write!(f, "prime must exceed d"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid weighted family: {0}")]
    InvalidFamily(String),

    #[error("cannot normalize: gcd {gcd} of the weights other than a_{index} does not divide d = {degree}")]
    NotNormalizable { index: usize, gcd: u64, degree: u64 },

    #[error("weights are not well-formed")]
    NotWellFormed,

    #[error("{what} budget of {limit} exceeded")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("monomial system is empty")]
    EmptySystem,

    #[error("monomial of degree {found} does not have the family degree {expected}")]
    WrongDegree { expected: u64, found: u64 },

    #[error("coefficient of monomial {monomial:?} vanishes modulo {prime}")]
    CoefficientCollision { monomial: Vec<u32>, prime: u64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(Hypothesis),

    #[error("no Klein hypersurface exists for these weights and degree")]
    NoKleinHypersurface,

    #[error("deterministic primality is not available for {0}")]
    PrimalityOutOfRange(String),

    #[error("too many variables ({0}); subset criteria support at most 20")]
    TooManyVariables(usize),

    #[error("internal certificate check failed: {0}")]
    InconsistentCertificate(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
