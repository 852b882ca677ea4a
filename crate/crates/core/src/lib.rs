//! Exact Zariski decompositions of effective Q-divisors on surfaces, computed
//! from an intersection matrix and a coefficient vector.
//!
//! The positive part is the componentwise-maximal nef subdivisor, found by an
//! exact rational simplex over the nef polytope. Every result carries
//! certificates for nefness, orthogonality and negative definiteness that are
//! re-checked by exact arithmetic before it is returned.

pub mod cli;
pub mod divisor;
pub mod engine;
pub mod linalg;
pub mod lp;

pub use divisor::{
    leq_divisor, restrict, support, validate_configuration, CurveConfiguration, Divisor,
    DivisorError, SupportSet,
};
pub use engine::{
    case2_kernel_recursion, find_nef_witness, fujita_oracle, is_nef, maximal_nef_subdivisor,
    nef_join, verify_decomposition, zariski_decompose, EngineError, NefWitness, OracleOutcome,
    Violation, ZariskiResult,
};
pub use linalg::{
    inertia, is_negative_definite, is_negative_semidefinite, kernel_basis, solve_linear,
    InertiaCertificate, KernelBasis, Matrix,
};
pub use lp::{lp_feasible_point, lp_maximize, LpOutcome, LpProblem, LpStatus};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Integer as a rational.
pub fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}
