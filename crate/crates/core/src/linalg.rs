//! Exact rational linear algebra: dense matrices, linear solves, kernels and
//! inertia by symmetric congruence.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds from rows; all rows must share a length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    actual: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: n,
            cols,
            data,
        })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| Rational::from_integer(v.into()))
                        .collect()
                })
                .collect(),
        )
        .expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// First `(i, j)` with `i < j` and `M[i][j] != M[j][i]`, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        (0..self.rows)
            .flat_map(|i| ((i + 1)..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != self.get(j, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.asymmetry().is_none()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn principal_submatrix(&self, indices: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(indices.len(), indices.len());
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    /// Simultaneous row/column permutation: entry `(a, b)` of the result is
    /// `M[perm[a]][perm[b]]`.
    pub fn permuted(&self, perm: &[usize]) -> Matrix {
        self.principal_submatrix(perm)
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if !a.is_zero() {
                        acc += a * other.get(k, j);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// `xᵀ M x`.
    pub fn quadratic_form(&self, x: &[Rational]) -> Result<Rational, LinalgError> {
        Ok(dot(x, &self.mul_vec(x)?))
    }

    fn ensure_symmetric(&self) -> Result<(), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        match self.asymmetry() {
            Some((i, j)) => Err(LinalgError::NotSymmetric(i, j)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// One congruence `M ← E M Eᵀ` with `E = I + factor·e_target·e_sourceᵀ`:
/// row `source` scaled by `factor` is added to row `target`, then the same
/// for columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CongruenceStep {
    pub target: usize,
    pub source: usize,
    pub factor: Rational,
}

impl CongruenceStep {
    pub fn apply(&self, m: &mut Matrix) {
        let n = m.rows();
        let (t, s) = (self.target, self.source);
        for j in 0..n {
            let v = m.get(t, j) + &self.factor * m.get(s, j);
            m.set(t, j, v);
        }
        for i in 0..n {
            let v = m.get(i, t) + &self.factor * m.get(i, s);
            m.set(i, t, v);
        }
    }
}

impl fmt::Display for CongruenceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{} += ({})*R{}", self.target, self.factor, self.source)
    }
}

/// Signature of a symmetric matrix plus the congruences that diagonalize it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InertiaCertificate {
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
    pub transcript: Vec<CongruenceStep>,
}

impl InertiaCertificate {
    pub fn dimension(&self) -> usize {
        self.n_plus + self.n_zero + self.n_minus
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.n_plus, self.n_zero, self.n_minus)
    }

    pub fn is_negative_definite(&self) -> bool {
        self.n_plus == 0 && self.n_zero == 0
    }

    /// Replays the transcript on `m`; returns the resulting matrix.
    pub fn replay(&self, m: &Matrix) -> Matrix {
        let mut out = m.clone();
        for step in &self.transcript {
            step.apply(&mut out);
        }
        out
    }

    /// True when replay on `m` gives a diagonal matrix whose sign counts
    /// equal the certified ones.
    pub fn certifies(&self, m: &Matrix) -> bool {
        if !m.is_square() || m.rows() != self.dimension() {
            return false;
        }
        if self
            .transcript
            .iter()
            .any(|s| s.target == s.source || s.target >= m.rows() || s.source >= m.rows())
        {
            return false;
        }
        let d = self.replay(m);
        d.is_diagonal() && diagonal_signs(&d) == self.counts()
    }
}

impl fmt::Display for InertiaCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n_plus, self.n_zero, self.n_minus)
    }
}

fn diagonal_signs(d: &Matrix) -> (usize, usize, usize) {
    let mut counts = (0, 0, 0);
    for i in 0..d.rows() {
        let v = d.get(i, i);
        if v.is_positive() {
            counts.0 += 1;
        } else if v.is_zero() {
            counts.1 += 1;
        } else {
            counts.2 += 1;
        }
    }
    counts
}

/// Inertia `(n₊, n₀, n₋)` by congruence diagonalization.
///
/// Pivots on the first remaining index with a nonzero diagonal entry. When
/// every remaining diagonal entry vanishes but some `S[i][j]` does not, the
/// congruence adding `j` into `i` makes `S[i][i] = 2·S[i][j] ≠ 0` first.
pub fn inertia(s: &Matrix) -> Result<InertiaCertificate, LinalgError> {
    s.ensure_symmetric()?;
    let n = s.rows();
    let mut m = s.clone();
    let mut done = vec![false; n];
    let mut transcript = Vec::new();

    loop {
        let remaining: Vec<usize> = (0..n).filter(|&i| !done[i]).collect();
        let pivot = match remaining.iter().copied().find(|&i| !m.get(i, i).is_zero()) {
            Some(p) => p,
            None => {
                let pair = remaining.iter().copied().find_map(|i| {
                    remaining
                        .iter()
                        .copied()
                        .find(|&j| j != i && !m.get(i, j).is_zero())
                        .map(|j| (i, j))
                });
                match pair {
                    Some((i, j)) => {
                        let step = CongruenceStep {
                            target: i,
                            source: j,
                            factor: Rational::one(),
                        };
                        step.apply(&mut m);
                        transcript.push(step);
                        i
                    }
                    None => break,
                }
            }
        };
        let p = m.get(pivot, pivot).clone();
        for &j in &remaining {
            if j == pivot || m.get(j, pivot).is_zero() {
                continue;
            }
            let step = CongruenceStep {
                target: j,
                source: pivot,
                factor: -(m.get(j, pivot) / &p),
            };
            step.apply(&mut m);
            transcript.push(step);
        }
        done[pivot] = true;
    }

    let (n_plus, n_zero, n_minus) = diagonal_signs(&m);
    Ok(InertiaCertificate {
        n_plus,
        n_zero,
        n_minus,
        transcript,
    })
}

pub fn is_negative_definite(s: &Matrix) -> Result<bool, LinalgError> {
    Ok(inertia(s)?.is_negative_definite())
}

pub fn is_negative_semidefinite(s: &Matrix) -> Result<bool, LinalgError> {
    s.ensure_symmetric()?;
    let n = s.rows();
    for i in 0..n {
        let d = s.get(i, i);
        if d.is_positive() {
            return Ok(false);
        }
        if d.is_zero() && (0..n).any(|j| !s.get(i, j).is_zero()) {
            return Ok(false);
        }
    }
    Ok(inertia(s)?.n_plus == 0)
}

/// Reduced row echelon form in place; returns the pivot column of each
/// pivot row.
fn row_reduce(m: &mut Matrix, pivot_limit: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..pivot_limit {
        if row == m.rows() {
            break;
        }
        let Some(found) = (row..m.rows()).find(|&i| !m.get(i, col).is_zero()) else {
            continue;
        };
        if found != row {
            for j in 0..m.cols() {
                let a = m.get(row, j).clone();
                let b = m.get(found, j).clone();
                m.set(row, j, b);
                m.set(found, j, a);
            }
        }
        let inv = m.get(row, col).recip();
        for j in 0..m.cols() {
            let v = m.get(row, j) * &inv;
            m.set(row, j, v);
        }
        for i in 0..m.rows() {
            if i == row || m.get(i, col).is_zero() {
                continue;
            }
            let f = m.get(i, col).clone();
            for j in 0..m.cols() {
                let v = m.get(i, j) - &f * m.get(row, j);
                m.set(i, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Basis of `{v : Sv = 0}`, one vector per free column of the echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelBasis {
    pub vectors: Vec<Vec<Rational>>,
}

impl KernelBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

pub fn kernel_basis(s: &Matrix) -> KernelBasis {
    let mut m = s.clone();
    let pivots = row_reduce(&mut m, s.cols());
    let free = (0..s.cols()).filter(|c| !pivots.contains(c));
    let vectors = free
        .map(|f| {
            let mut v = vec![Rational::zero(); s.cols()];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(r, f).clone();
            }
            v
        })
        .collect();
    KernelBasis { vectors }
}

pub fn rank(m: &Matrix) -> usize {
    let mut work = m.clone();
    row_reduce(&mut work, m.cols()).len()
}

/// Some solution of `A x = b` with free variables set to zero, or `None`
/// when the system is inconsistent.
pub fn solve_linear(a: &Matrix, b: &[Rational]) -> Result<Option<Vec<Rational>>, LinalgError> {
    if a.rows() != b.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows(),
            actual: b.len(),
        });
    }
    let n = a.cols();
    let mut aug = Matrix::zeros(a.rows(), n + 1);
    for i in 0..a.rows() {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n, b[i].clone());
    }
    let pivots = row_reduce(&mut aug, n);
    if (pivots.len()..a.rows()).any(|i| !aug.get(i, n).is_zero()) {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.get(r, n).clone();
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_integers(rows)
    }

    #[test]
    fn inertia_examples() {
        assert_eq!(inertia(&m(&[&[0]])).unwrap().counts(), (0, 1, 0));
        assert_eq!(
            inertia(&m(&[&[-2, 1], &[1, -2]])).unwrap().counts(),
            (0, 0, 2)
        );
        assert_eq!(
            inertia(&m(&[&[1, 0], &[0, -1]])).unwrap().counts(),
            (1, 0, 1)
        );
        assert_eq!(
            inertia(&m(&[&[1, 2], &[3, 4]])),
            Err(LinalgError::NotSymmetric(0, 1))
        );
    }

    #[test]
    fn zero_diagonal_pivot() {
        // Hyperbolic plane: needs the off-diagonal congruence first.
        let h = m(&[&[0, 1], &[1, 0]]);
        let cert = inertia(&h).unwrap();
        assert_eq!(cert.counts(), (1, 0, 1));
        assert_eq!(cert.transcript[0].factor, rat(1));
        assert!(cert.certifies(&h));
    }

    #[test]
    fn definiteness_examples() {
        assert!(is_negative_definite(&m(&[&[-1]])).unwrap());
        assert!(is_negative_definite(&m(&[&[-2, 1], &[1, -2]])).unwrap());
        assert!(!is_negative_definite(&m(&[&[-2, 2], &[2, -2]])).unwrap());

        assert!(is_negative_semidefinite(&m(&[&[-2, 2], &[2, -2]])).unwrap());
        assert!(!is_negative_semidefinite(&m(&[&[0, 1], &[1, -2]])).unwrap());
        assert!(is_negative_semidefinite(&m(&[&[0]])).unwrap());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(
            kernel_basis(&m(&[&[-2, 2], &[2, -2]])).vectors,
            vec![vec![rat(1), rat(1)]]
        );
        assert!(kernel_basis(&m(&[&[-1]])).is_empty());
        assert_eq!(
            kernel_basis(&m(&[&[0, 0], &[0, -1]])).vectors,
            vec![vec![rat(1), rat(0)]]
        );
    }

    #[test]
    fn solve_examples() {
        assert_eq!(
            solve_linear(&m(&[&[-2]]), &[rat(-1)]).unwrap(),
            Some(vec!["1/2".parse().unwrap()])
        );
        assert_eq!(
            solve_linear(&m(&[&[-2, 1], &[1, -2]]), &[rat(-1), rat(-1)]).unwrap(),
            Some(vec![rat(1), rat(1)])
        );
        assert_eq!(
            solve_linear(&m(&[&[1, 1], &[1, 1]]), &[rat(0), rat(1)]).unwrap(),
            None
        );
        assert!(matches!(
            solve_linear(&m(&[&[1]]), &[rat(0), rat(1)]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn underdetermined_solve_sets_free_to_zero() {
        let x = solve_linear(&m(&[&[1, 1, 0]]), &[rat(3)]).unwrap().unwrap();
        assert_eq!(x, vec![rat(3), rat(0), rat(0)]);
    }

    fn symmetric_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..=5).prop_flat_map(|n| {
            proptest::collection::vec((-4i64..=4, 1i64..=3), n * n).prop_map(move |entries| {
                let mut a = Matrix::zeros(n, n);
                for i in 0..n {
                    for j in i..n {
                        let (p, q) = entries[i * n + j];
                        let v = Rational::new(p.into(), q.into());
                        a.set(i, j, v.clone());
                        a.set(j, i, v);
                    }
                }
                a
            })
        })
    }

    fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
        Just((0..n).collect::<Vec<_>>()).prop_shuffle()
    }

    proptest! {
        #[test]
        fn transcript_replays_to_certified_diagonal(s in symmetric_matrix()) {
            let cert = inertia(&s).unwrap();
            prop_assert_eq!(cert.dimension(), s.rows());
            prop_assert!(cert.certifies(&s));
        }

        #[test]
        fn kernel_is_exact_and_maximal(s in symmetric_matrix()) {
            let basis = kernel_basis(&s);
            let cert = inertia(&s).unwrap();
            prop_assert_eq!(basis.len(), cert.n_zero);
            for v in &basis.vectors {
                prop_assert!(s.mul_vec(v).unwrap().iter().all(Zero::is_zero));
            }
            prop_assert_eq!(rank(&Matrix::from_rows(basis.vectors.clone()).unwrap_or(Matrix::zeros(0, 0))), basis.len());
            // Any further kernel vector is dependent.
            if let Some(first) = basis.vectors.first() {
                let mut extended = basis.vectors.clone();
                extended.push(first.iter().map(|x| x * rat(2)).collect());
                prop_assert_eq!(rank(&Matrix::from_rows(extended).unwrap()), basis.len());
            }
        }

        #[test]
        fn definiteness_is_permutation_invariant(
            (s, perm) in symmetric_matrix().prop_flat_map(|s| {
                let n = s.rows();
                (Just(s), permutation(n))
            })
        ) {
            let p = s.permuted(&perm);
            let nd = is_negative_definite(&s).unwrap();
            let nsd = is_negative_semidefinite(&s).unwrap();
            prop_assert_eq!(nd, is_negative_definite(&p).unwrap());
            prop_assert_eq!(nsd, is_negative_semidefinite(&p).unwrap());
            prop_assert!(!nd || nsd);
        }

        #[test]
        fn nonsingular_solve_is_exact(s in symmetric_matrix(), seed in proptest::collection::vec(-5i64..=5, 5)) {
            let b: Vec<Rational> = seed.iter().take(s.rows()).map(|&v| rat(v)).collect();
            if let Some(x) = solve_linear(&s, &b).unwrap() {
                prop_assert_eq!(s.mul_vec(&x).unwrap(), b);
            } else {
                prop_assert!(rank(&s) < s.rows());
            }
        }
    }
}
