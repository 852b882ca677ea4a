//! Zariski decomposition `D = P + N` with `P` the maximal nef subdivisor of
//! `D`, together with the nef-join, the nef-witness search and an
//! independent Fujita-style iteration used as a cross-check.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::divisor::{
    self, leq_divisor, support, CurveConfiguration, Divisor, DivisorError, SupportSet,
};
use crate::linalg::{self, inertia, kernel_basis, solve_linear, InertiaCertificate, LinalgError};
use crate::lp::{self, LpError, LpOutcome, LpProblem, LpStatus};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("divisor is not effective")]
    NotEffective,
    #[error("unexpected LP status {0:?}")]
    UnexpectedLpStatus(LpStatus),
    #[error("certificate failure: {0}")]
    CertificateFailure(Violation),
    #[error("input divisor is not nef")]
    InputNotNef,
    #[error("join of nef divisors is not nef")]
    JoinNotNef,
    #[error("no nef witness found on a support that is not negative definite")]
    WitnessNotFound,
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolated(String),
}

/// First property of a claimed decomposition that fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DimensionMismatch,
    SumMismatch { index: usize },
    PositivePartNotEffective { index: usize },
    NegativePartNotEffective { index: usize },
    NotNef { index: usize, product: Rational },
    NotNegativeDefinite { counts: (usize, usize, usize) },
    NotOrthogonal { index: usize, product: Rational },
}

impl Violation {
    /// Short label for the property that fails.
    pub fn property(&self) -> &'static str {
        match self {
            Violation::DimensionMismatch => "dimension",
            Violation::SumMismatch { .. } => "sum",
            Violation::PositivePartNotEffective { .. }
            | Violation::NegativePartNotEffective { .. } => "effectivity",
            Violation::NotNef { .. } => "(i)",
            Violation::NotNegativeDefinite { .. } => "(ii)",
            Violation::NotOrthogonal { .. } => "(iii)",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch => write!(f, "parts have the wrong number of components"),
            Violation::SumMismatch { index } => {
                write!(f, "sum fails: P + N differs from D at component {index}")
            }
            Violation::PositivePartNotEffective { index } => {
                write!(
                    f,
                    "effectivity fails: P has a negative coefficient at component {index}"
                )
            }
            Violation::NegativePartNotEffective { index } => {
                write!(
                    f,
                    "effectivity fails: N has a negative coefficient at component {index}"
                )
            }
            Violation::NotNef { index, product } => {
                write!(f, "(i) fails: P is not nef, P.C{index} = {product}")
            }
            Violation::NotNegativeDefinite { counts: (p, z, m) } => write!(
                f,
                "(ii) fails: intersection matrix of N has inertia ({p}, {z}, {m})"
            ),
            Violation::NotOrthogonal { index, product } => {
                write!(f, "(iii) fails: P.C{index} = {product} on a component of N")
            }
        }
    }
}

/// `(P, N)` with certificates for the three defining properties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZariskiResult {
    pub positive_part: Divisor,
    pub negative_part: Divisor,
    /// `P · C_j` for every component.
    pub nef_certificate: Vec<Rational>,
    /// `(j, P · C_j)` for `j` in the support of `N`.
    pub orthogonality_certificate: Vec<(usize, Rational)>,
    /// Inertia of the intersection matrix on the support of `N`; `None` when
    /// `N = 0`.
    pub negativity_certificate: Option<InertiaCertificate>,
    /// LP metadata from the computation of `P`; absent for results not
    /// produced by the LP.
    pub solver: Option<SolverInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverInfo {
    pub pivots: usize,
    pub basis: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NefWitness {
    pub coefficients: Vec<Rational>,
    pub products: Vec<Rational>,
}

impl NefWitness {
    /// Exact re-substitution: `x ≥ 0`, `x ≠ 0` and `Sx ≥ 0` with the stored
    /// products.
    pub fn verify(&self, config: &CurveConfiguration) -> bool {
        let x = &self.coefficients;
        if x.len() != config.len()
            || x.iter().any(Signed::is_negative)
            || x.iter().all(Zero::is_zero)
        {
            return false;
        }
        match config.matrix().mul_vec(x) {
            Ok(products) => products == self.products && products.iter().all(|p| !p.is_negative()),
            Err(_) => false,
        }
    }
}

/// `(S·x ≥ 0, S·x)`.
pub fn is_nef(
    config: &CurveConfiguration,
    x: &Divisor,
) -> Result<(bool, Vec<Rational>), EngineError> {
    if x.len() != config.len() {
        return Err(DivisorError::DimensionMismatch {
            expected: config.len(),
            actual: x.len(),
        }
        .into());
    }
    let products = config.matrix().mul_vec(x.coefficients())?;
    let nef = products.iter().all(|p| !p.is_negative());
    Ok((nef, products))
}

fn require_effective(d: &Divisor) -> Result<(), EngineError> {
    if d.is_effective() {
        Ok(())
    } else {
        Err(EngineError::NotEffective)
    }
}

/// The polytope `K = {0 ⪯ x ⪯ a, Sx ≥ 0}` with objective `weights · x`.
pub fn nef_polytope_problem(
    config: &CurveConfiguration,
    d: &Divisor,
    weights: Vec<Rational>,
) -> LpProblem {
    let r = config.len();
    LpProblem {
        objective: weights,
        constraint_matrix: config.matrix().clone(),
        rhs: vec![Rational::zero(); r],
        lower_bounds: vec![Rational::zero(); r],
        upper_bounds: d.coefficients().iter().cloned().map(Some).collect(),
    }
}

/// Optimizes `weights · x` over the nef polytope of `D`, working on the
/// support of `D` and re-expanding. Components outside the support only add
/// nonnegative products, so dropping their rows loses nothing.
pub fn optimize_over_nef_polytope(
    config: &CurveConfiguration,
    d: &Divisor,
    weights: &[Rational],
) -> Result<(Divisor, LpOutcome), EngineError> {
    require_effective(d)?;
    if d.len() != config.len() || weights.len() != config.len() {
        return Err(DivisorError::DimensionMismatch {
            expected: config.len(),
            actual: d.len().min(weights.len()),
        }
        .into());
    }
    let supp = support(d);
    if supp.is_empty() {
        let outcome = LpOutcome {
            status: LpStatus::Optimal,
            point: Some(vec![]),
            objective_value: Some(Rational::zero()),
            basis: vec![],
            pivots: 0,
        };
        return Ok((Divisor::zero(config.len()), outcome));
    }
    let sub = divisor::restrict(config, &supp)?;
    let sub_weights = Divisor::new(weights.to_vec())
        .restrict(&supp)
        .into_coefficients();
    let problem = nef_polytope_problem(&sub, &d.restrict(&supp), sub_weights);
    let outcome = lp::lp_maximize(&problem)?;
    let point = match (&outcome.status, &outcome.point) {
        (LpStatus::Optimal, Some(p)) => p.clone(),
        (status, _) => return Err(EngineError::UnexpectedLpStatus(*status)),
    };
    Ok((Divisor::new(point).expand(&supp, config.len()), outcome))
}

/// Componentwise maximal point of `K`, found as the optimum of `Σ x_i`.
pub fn maximal_nef_subdivisor(
    config: &CurveConfiguration,
    d: &Divisor,
) -> Result<Divisor, EngineError> {
    let ones = vec![Rational::one(); config.len()];
    Ok(optimize_over_nef_polytope(config, d, &ones)?.0)
}

/// Checks `D = P + N`, effectivity and properties (i)-(iii) exactly,
/// returning the certificates on success.
pub fn verify_decomposition(
    config: &CurveConfiguration,
    d: &Divisor,
    p: &Divisor,
    n: &Divisor,
) -> Result<ZariskiResult, Violation> {
    let r = config.len();
    if d.len() != r || p.len() != r || n.len() != r {
        return Err(Violation::DimensionMismatch);
    }
    for i in 0..r {
        if &p[i] + &n[i] != d[i] {
            return Err(Violation::SumMismatch { index: i });
        }
    }
    if let Some(index) = (0..r).find(|&i| p[i].is_negative()) {
        return Err(Violation::PositivePartNotEffective { index });
    }
    if let Some(index) = (0..r).find(|&i| n[i].is_negative()) {
        return Err(Violation::NegativePartNotEffective { index });
    }
    let products = config
        .matrix()
        .mul_vec(p.coefficients())
        .map_err(|_| Violation::DimensionMismatch)?;
    if let Some(index) = (0..r).find(|&j| products[j].is_negative()) {
        return Err(Violation::NotNef {
            index,
            product: products[index].clone(),
        });
    }
    let supp_n = support(n);
    let negativity = if supp_n.is_empty() {
        None
    } else {
        let sub = divisor::restrict(config, &supp_n).map_err(|_| Violation::DimensionMismatch)?;
        let cert = inertia(sub.matrix()).map_err(|_| Violation::DimensionMismatch)?;
        if !cert.is_negative_definite() || !cert.certifies(sub.matrix()) {
            return Err(Violation::NotNegativeDefinite {
                counts: cert.counts(),
            });
        }
        Some(cert)
    };
    let orthogonality: Vec<(usize, Rational)> = supp_n
        .indices()
        .iter()
        .map(|&j| (j, products[j].clone()))
        .collect();
    if let Some((index, product)) = orthogonality.iter().find(|(_, v)| !v.is_zero()) {
        return Err(Violation::NotOrthogonal {
            index: *index,
            product: product.clone(),
        });
    }
    Ok(ZariskiResult {
        positive_part: p.clone(),
        negative_part: n.clone(),
        nef_certificate: products,
        orthogonality_certificate: orthogonality,
        negativity_certificate: negativity,
        solver: None,
    })
}

/// `D = P + N` with `P` the maximal nef subdivisor; every certificate is
/// re-verified before returning.
pub fn zariski_decompose(
    config: &CurveConfiguration,
    d: &Divisor,
) -> Result<ZariskiResult, EngineError> {
    let ones = vec![Rational::one(); config.len()];
    let (p, outcome) = optimize_over_nef_polytope(config, d, &ones)?;
    let n = d.checked_sub(&p)?;
    let mut result =
        verify_decomposition(config, d, &p, &n).map_err(EngineError::CertificateFailure)?;
    result.solver = Some(SolverInfo {
        pivots: outcome.pivots,
        basis: outcome.basis,
    });
    Ok(result)
}

/// Componentwise maximum of two effective nef divisors.
pub fn nef_join(
    config: &CurveConfiguration,
    x1: &Divisor,
    x2: &Divisor,
) -> Result<Divisor, EngineError> {
    for x in [x1, x2] {
        require_effective(x)?;
        if !is_nef(config, x)?.0 {
            return Err(EngineError::InputNotNef);
        }
    }
    let joined = Divisor::new(
        x1.coefficients()
            .iter()
            .zip(x2.coefficients())
            .map(|(a, b)| a.max(b).clone())
            .collect(),
    );
    if !is_nef(config, &joined)?.0 {
        return Err(EngineError::JoinNotNef);
    }
    debug_assert!(
        leq_divisor(x1, &joined).unwrap_or(false) && leq_divisor(x2, &joined).unwrap_or(false)
    );
    Ok(joined)
}

/// Which branch produced a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessPath {
    /// Not negative semidefinite: LP feasibility on `{x ≥ 0, Σx = 1, Sx ≥ 0}`.
    Indefinite,
    /// Negative semidefinite but singular: kernel recursion.
    Kernel,
}

/// An effective nonzero nef divisor supported on the configuration, or
/// `None` when its intersection matrix is negative definite.
pub fn find_nef_witness(config: &CurveConfiguration) -> Result<Option<NefWitness>, EngineError> {
    Ok(find_nef_witness_with_path(config)?.map(|(w, _)| w))
}

pub fn find_nef_witness_with_path(
    config: &CurveConfiguration,
) -> Result<Option<(NefWitness, WitnessPath)>, EngineError> {
    let r = config.len();
    for component in config.connected_components() {
        let sub = divisor::restrict(config, &component)?;
        let s = sub.matrix();
        if linalg::is_negative_definite(s)? {
            continue;
        }
        let (local, path) = if !linalg::is_negative_semidefinite(s)? {
            let k = sub.len();
            let zeros = vec![Rational::zero(); k];
            let x = lp::lp_feasible_point(
                s,
                &zeros,
                &zeros,
                &vec![None; k],
                &vec![Rational::one(); k],
                &Rational::one(),
            )?
            .ok_or(EngineError::WitnessNotFound)?;
            (x, WitnessPath::Indefinite)
        } else {
            let kernel = kernel_basis(s);
            let r_vec = kernel.vectors.into_iter().next().ok_or_else(|| {
                EngineError::InternalInvariantViolated("singular matrix with empty kernel".into())
            })?;
            (
                case2_kernel_recursion(&sub, r_vec)?.coefficients,
                WitnessPath::Kernel,
            )
        };
        let coefficients = Divisor::new(local)
            .expand(&component, r)
            .into_coefficients();
        let products = config.matrix().mul_vec(&coefficients)?;
        let witness = NefWitness {
            coefficients,
            products,
        };
        if !witness.verify(config) {
            return Err(EngineError::InternalInvariantViolated(
                "witness failed re-verification".into(),
            ));
        }
        return Ok(Some((witness, path)));
    }
    Ok(None)
}

/// Kernel recursion on a negative semidefinite, singular configuration:
/// `R` or `−R` is returned when effective; otherwise `R = R′ − R″` and the
/// search continues on the support of `R′`, where `R′² = 0`.
pub fn case2_kernel_recursion(
    config: &CurveConfiguration,
    kernel_vector: Vec<Rational>,
) -> Result<NefWitness, EngineError> {
    let s = config.matrix();
    let r = config.len();
    if kernel_vector.len() != r {
        return Err(DivisorError::DimensionMismatch {
            expected: r,
            actual: kernel_vector.len(),
        }
        .into());
    }
    if kernel_vector.iter().all(Zero::is_zero)
        || s.mul_vec(&kernel_vector)?.iter().any(|v| !v.is_zero())
    {
        return Err(EngineError::InternalInvariantViolated(
            "expected a nonzero kernel vector".into(),
        ));
    }
    let candidate = if kernel_vector.iter().all(|v| !v.is_negative()) {
        Some(kernel_vector.clone())
    } else if kernel_vector.iter().all(|v| !v.is_positive()) {
        Some(kernel_vector.iter().map(|v| -v).collect())
    } else {
        None
    };
    if let Some(x) = candidate {
        let products = s.mul_vec(&x)?;
        return Ok(NefWitness {
            coefficients: x,
            products,
        });
    }

    let positive: Vec<Rational> = kernel_vector
        .iter()
        .map(|v| {
            if v.is_positive() {
                v.clone()
            } else {
                Rational::zero()
            }
        })
        .collect();
    if !s.quadratic_form(&positive)?.is_zero() {
        return Err(EngineError::InternalInvariantViolated(
            "positive part of a kernel vector has nonzero self-intersection".into(),
        ));
    }
    let inner = support(&Divisor::new(positive));
    let sub = divisor::restrict(config, &inner)?;
    let next = kernel_basis(sub.matrix())
        .vectors
        .into_iter()
        .next()
        .ok_or_else(|| {
            EngineError::InternalInvariantViolated("restricted matrix is nonsingular".into())
        })?;
    let local = case2_kernel_recursion(&sub, next)?;
    let coefficients = Divisor::new(local.coefficients)
        .expand(&inner, r)
        .into_coefficients();
    let products = s.mul_vec(&coefficients)?;
    Ok(NefWitness {
        coefficients,
        products,
    })
}

/// Why the Fujita-style iteration gave up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleInapplicable {
    NotNegativeDefinite(SupportSet),
    NegativeCoefficient(SupportSet),
    ExceedsDivisor(SupportSet),
}

impl fmt::Display for OracleInapplicable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleInapplicable::NotNegativeDefinite(s) => {
                write!(f, "active set {s} is not negative definite")
            }
            OracleInapplicable::NegativeCoefficient(s) => {
                write!(f, "solved N on {s} has a negative coefficient")
            }
            OracleInapplicable::ExceedsDivisor(s) => write!(f, "solved N on {s} exceeds D"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Decomposed(ZariskiResult),
    Inapplicable(OracleInapplicable),
}

impl OracleOutcome {
    pub fn into_result(self) -> Option<ZariskiResult> {
        match self {
            OracleOutcome::Decomposed(r) => Some(r),
            OracleOutcome::Inapplicable(_) => None,
        }
    }
}

/// Classical iteration: grow the active set from components with
/// `D · C < 0`, solve `N · C_i = D · C_i` on it, and repeat with the
/// components where `D − N` fails to be nef.
pub fn fujita_oracle(
    config: &CurveConfiguration,
    d: &Divisor,
) -> Result<OracleOutcome, EngineError> {
    require_effective(d)?;
    let r = config.len();
    let (_, d_products) = is_nef(config, d)?;
    let mut active: Vec<usize> = (0..r).filter(|&i| d_products[i].is_negative()).collect();
    let mut n = Divisor::zero(r);

    // The active set grows strictly, so at most r solves happen.
    for _ in 0..=r {
        if !active.is_empty() {
            let set = SupportSet::new(active.clone(), r)?;
            let sub = divisor::restrict(config, &set)?;
            if !linalg::is_negative_definite(sub.matrix())? {
                return Ok(OracleOutcome::Inapplicable(
                    OracleInapplicable::NotNegativeDefinite(set),
                ));
            }
            let rhs: Vec<Rational> = active.iter().map(|&i| d_products[i].clone()).collect();
            let local = solve_linear(sub.matrix(), &rhs)?.ok_or_else(|| {
                EngineError::InternalInvariantViolated(
                    "negative definite system is inconsistent".into(),
                )
            })?;
            if local.iter().any(Signed::is_negative) {
                return Ok(OracleOutcome::Inapplicable(
                    OracleInapplicable::NegativeCoefficient(set),
                ));
            }
            n = Divisor::new(local).expand(&set, r);
            if !leq_divisor(&n, d)? {
                return Ok(OracleOutcome::Inapplicable(
                    OracleInapplicable::ExceedsDivisor(set),
                ));
            }
        }
        let p = d.checked_sub(&n)?;
        let (nef, products) = is_nef(config, &p)?;
        if nef {
            return verify_decomposition(config, d, &p, &n)
                .map(OracleOutcome::Decomposed)
                .map_err(EngineError::CertificateFailure);
        }
        let before = active.len();
        for j in (0..r).filter(|&j| products[j].is_negative()) {
            if active.contains(&j) {
                return Err(EngineError::InternalInvariantViolated(format!(
                    "active component {j} has P.C < 0"
                )));
            }
            active.push(j);
        }
        active.sort_unstable();
        assert!(active.len() > before, "active set must grow");
    }
    Err(EngineError::InternalInvariantViolated(
        "Fujita iteration exceeded r steps".into(),
    ))
}
