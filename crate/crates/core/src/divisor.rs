//! Curve configurations, Q-divisors over them, and the subdivisor order.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivisorError {
    #[error("configuration has no components")]
    EmptyConfiguration,
    #[error("intersection matrix is {rows}x{cols}, expected {expected}x{expected}")]
    NotSquare {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("intersection matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("negative off-diagonal intersection number at ({0}, {1})")]
    NegativeOffDiagonal(usize, usize),
    #[error("duplicate component name `{0}`")]
    DuplicateName(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("support set is empty")]
    EmptySupport,
    #[error("support index {index} out of range for {len} components")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid rational `{0}`")]
    InvalidRational(String),
}

/// Parses `"p/q"` or an integer string into a reduced rational.
pub fn parse_rational(text: &str) -> Result<Rational, DivisorError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(DivisorError::InvalidRational(text.to_string()));
    }
    trimmed
        .parse::<Rational>()
        .map_err(|_| DivisorError::InvalidRational(text.to_string()))
}

/// Canonical string form: bare integer when the denominator is 1, else `p/q`.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Named components and their exact intersection matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveConfiguration {
    names: Vec<String>,
    matrix: Matrix,
}

impl CurveConfiguration {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// `C_i · C_j`.
    pub fn intersection(&self, i: usize, j: usize) -> &Rational {
        self.matrix.get(i, j)
    }

    /// Connected components of the dual graph (edge when `C_i · C_j > 0`),
    /// each returned as a sorted support, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<SupportSet> {
        let r = self.len();
        let mut seen = vec![false; r];
        let mut components = Vec::new();
        for start in 0..r {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut members = BTreeSet::new();
            while let Some(i) = stack.pop() {
                members.insert(i);
                for j in 0..r {
                    if !seen[j] && i != j && self.matrix.get(i, j).is_positive() {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            components.push(SupportSet {
                indices: members.into_iter().collect(),
            });
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }
}

/// Checks the standing hypotheses on a configuration; never repairs input.
pub fn validate_configuration(
    names: Vec<String>,
    matrix: Matrix,
) -> Result<CurveConfiguration, DivisorError> {
    let r = names.len();
    if r == 0 {
        return Err(DivisorError::EmptyConfiguration);
    }
    if matrix.rows() != r || matrix.cols() != r {
        return Err(DivisorError::NotSquare {
            rows: matrix.rows(),
            cols: matrix.cols(),
            expected: r,
        });
    }
    let mut seen = BTreeSet::new();
    for name in &names {
        if !seen.insert(name.as_str()) {
            return Err(DivisorError::DuplicateName(name.clone()));
        }
    }
    for i in 0..r {
        for j in (i + 1)..r {
            if matrix.get(i, j) != matrix.get(j, i) {
                return Err(DivisorError::NotSymmetric(i, j));
            }
        }
    }
    for i in 0..r {
        for j in 0..r {
            if i != j && matrix.get(i, j).is_negative() {
                return Err(DivisorError::NegativeOffDiagonal(i.min(j), i.max(j)));
            }
        }
    }
    Ok(CurveConfiguration { names, matrix })
}

/// Exact rational coefficient vector over a configuration's components.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Divisor {
    coefficients: Vec<Rational>,
}

impl Divisor {
    pub fn new(coefficients: Vec<Rational>) -> Self {
        Divisor { coefficients }
    }

    pub fn zero(len: usize) -> Self {
        Divisor {
            coefficients: vec![Rational::zero(); len],
        }
    }

    pub fn from_integers(values: &[i64]) -> Self {
        Divisor::new(
            values
                .iter()
                .map(|&v| Rational::from_integer(v.into()))
                .collect(),
        )
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Rational> {
        self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    pub fn is_effective(&self) -> bool {
        self.coefficients.iter().all(|c| !c.is_negative())
    }

    pub fn scale(&self, factor: &Rational) -> Divisor {
        Divisor::new(self.coefficients.iter().map(|c| c * factor).collect())
    }

    pub fn checked_add(&self, other: &Divisor) -> Result<Divisor, DivisorError> {
        same_len(self.len(), other.len())?;
        Ok(Divisor::new(
            self.coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn checked_sub(&self, other: &Divisor) -> Result<Divisor, DivisorError> {
        same_len(self.len(), other.len())?;
        Ok(Divisor::new(
            self.coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    /// Scatters `self` (indexed by `support`) back onto `len` components.
    pub fn expand(&self, support: &SupportSet, len: usize) -> Divisor {
        let mut out = vec![Rational::zero(); len];
        for (value, &i) in self.coefficients.iter().zip(support.indices()) {
            out[i] = value.clone();
        }
        Divisor::new(out)
    }

    /// Coefficients at the positions in `support`, in order.
    pub fn restrict(&self, support: &SupportSet) -> Divisor {
        Divisor::new(
            support
                .indices()
                .iter()
                .map(|&i| self.coefficients[i].clone())
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for Divisor {
    type Output = Rational;

    fn index(&self, i: usize) -> &Rational {
        &self.coefficients[i]
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.coefficients.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

fn same_len(expected: usize, actual: usize) -> Result<(), DivisorError> {
    if expected == actual {
        Ok(())
    } else {
        Err(DivisorError::DimensionMismatch { expected, actual })
    }
}

/// `Q ⪯ P`: every coefficient of `Q` is at most the matching one of `P`.
pub fn leq_divisor(q: &Divisor, p: &Divisor) -> Result<bool, DivisorError> {
    same_len(p.len(), q.len())?;
    Ok(q.coefficients
        .iter()
        .zip(&p.coefficients)
        .all(|(a, b)| a <= b))
}

/// Strictly increasing set of component indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn new(mut indices: Vec<usize>, len: usize) -> Result<Self, DivisorError> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&index) = indices.iter().find(|&&i| i >= len) {
            return Err(DivisorError::IndexOutOfRange { index, len });
        }
        Ok(SupportSet { indices })
    }

    pub fn full(len: usize) -> Self {
        SupportSet {
            indices: (0..len).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Maps indices of a restricted configuration back through `self`.
    pub fn lift(&self, inner: &SupportSet) -> SupportSet {
        SupportSet {
            indices: inner.indices.iter().map(|&k| self.indices[k]).collect(),
        }
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", i)?;
        }
        write!(f, "}}")
    }
}

/// Indices with nonzero coefficient.
pub fn support(d: &Divisor) -> SupportSet {
    SupportSet {
        indices: d
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect(),
    }
}

/// Principal sub-configuration on `s`.
pub fn restrict(
    config: &CurveConfiguration,
    s: &SupportSet,
) -> Result<CurveConfiguration, DivisorError> {
    if s.is_empty() {
        return Err(DivisorError::EmptySupport);
    }
    if let Some(&index) = s.indices().iter().find(|&&i| i >= config.len()) {
        return Err(DivisorError::IndexOutOfRange {
            index,
            len: config.len(),
        });
    }
    Ok(CurveConfiguration {
        names: s
            .indices()
            .iter()
            .map(|&i| config.names[i].clone())
            .collect(),
        matrix: config.matrix.principal_submatrix(s.indices()),
    })
}
