//! Exact bounded-variable primal simplex over the rationals.
//!
//! Problems have the shape
//!
//! ```text
//! maximize  c·x
//! subject to A x ≥ rhs,   lower ≤ x ≤ upper
//! ```
//!
//! where every lower bound is finite and upper bounds may be absent. Each
//! inequality row gets a surplus variable `s ≥ 0` with `A x − s = rhs`. Phase
//! one minimizes the sum of one artificial per row; phase two optimizes the
//! real objective. Entering and leaving choices follow Bland's rule (lowest
//! eligible index), so runs terminate and are reproducible.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{dot, Matrix};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    MalformedProblem(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    /// Rows are left-hand sides of `≥` constraints.
    pub constraint_matrix: Matrix,
    pub rhs: Vec<Rational>,
    pub lower_bounds: Vec<Rational>,
    /// `None` means no upper bound on that coordinate.
    pub upper_bounds: Vec<Option<Rational>>,
}

impl LpProblem {
    fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        let a = &self.constraint_matrix;
        if a.rows() > 0 && a.cols() != n {
            return Err(malformed(format!(
                "constraint matrix has {} columns for {} variables",
                a.cols(),
                n
            )));
        }
        if a.rows() != self.rhs.len() {
            return Err(malformed(format!(
                "{} constraint rows but {} right-hand sides",
                a.rows(),
                self.rhs.len()
            )));
        }
        if self.lower_bounds.len() != n || self.upper_bounds.len() != n {
            return Err(malformed(
                "bound vectors do not match variable count".into(),
            ));
        }
        for (j, (lo, hi)) in self.lower_bounds.iter().zip(&self.upper_bounds).enumerate() {
            if let Some(hi) = hi {
                if lo > hi {
                    return Err(malformed(format!("lower bound exceeds upper bound at {j}")));
                }
            }
        }
        Ok(())
    }

    /// Exact feasibility check of `x` against every row and bound.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.objective.len()
            && x.iter()
                .zip(&self.lower_bounds)
                .zip(&self.upper_bounds)
                .all(|((v, lo), hi)| v >= lo && hi.as_ref().is_none_or(|h| v <= h))
            && (0..self.constraint_matrix.rows())
                .all(|i| dot(self.constraint_matrix.row(i), x) >= self.rhs[i])
    }
}

fn malformed(msg: String) -> LpError {
    LpError::MalformedProblem(msg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub point: Option<Vec<Rational>>,
    pub objective_value: Option<Rational>,
    /// Basic variable of each row at termination. Indices below the variable
    /// count are structural, then one surplus per `≥` row, then artificials.
    pub basis: Vec<usize>,
    pub pivots: usize,
}

impl LpOutcome {
    fn without_point(status: LpStatus, basis: Vec<usize>, pivots: usize) -> Self {
        LpOutcome {
            status,
            point: None,
            objective_value: None,
            basis,
            pivots,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

enum Step {
    Optimal,
    Unbounded,
    Moved,
}

struct Tableau {
    /// `B⁻¹ [A | −I | I]`, one row per constraint.
    table: Matrix,
    lower: Vec<Rational>,
    upper: Vec<Option<Rational>>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Current value of every variable.
    value: Vec<Rational>,
    pivots: usize,
}

impl Tableau {
    /// Rows `A x ≥ rhs` (first `ineq` rows) followed by equality rows.
    fn new(
        rows: &Matrix,
        rhs: &[Rational],
        inequalities: usize,
        lower: &[Rational],
        upper: &[Option<Rational>],
    ) -> Self {
        let n = lower.len();
        let m = rows.rows();
        let width = n + inequalities + m;
        let mut table = Matrix::zeros(m, width);
        let mut value: Vec<Rational> = lower.to_vec();
        value.extend(std::iter::repeat_n(Rational::zero(), inequalities + m));
        let mut lo = lower.to_vec();
        lo.extend(std::iter::repeat_n(Rational::zero(), inequalities + m));
        let mut hi = upper.to_vec();
        hi.extend(std::iter::repeat_n(None, inequalities + m));
        let mut state = vec![VarState::AtLower; width];
        let mut basis = Vec::with_capacity(m);

        for i in 0..m {
            let residual = &rhs[i] - dot(rows.row(i), lower);
            let sign = if residual.is_negative() {
                -Rational::one()
            } else {
                Rational::one()
            };
            for j in 0..n {
                table.set(i, j, rows.get(i, j) * &sign);
            }
            if i < inequalities {
                table.set(i, n + i, -sign.clone());
            }
            let art = n + inequalities + i;
            table.set(i, art, Rational::one());
            value[art] = residual * sign;
            state[art] = VarState::Basic(i);
            basis.push(art);
        }

        Tableau {
            table,
            lower: lo,
            upper: hi,
            state,
            basis,
            value,
            pivots: 0,
        }
    }

    fn width(&self) -> usize {
        self.table.cols()
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.upper[j].as_ref() == Some(&self.lower[j])
    }

    fn reduced_cost(&self, cost: &[Rational], j: usize) -> Rational {
        let mut d = cost[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            let t = self.table.get(i, j);
            if !t.is_zero() && !cost[b].is_zero() {
                d -= &cost[b] * t;
            }
        }
        d
    }

    /// One Bland-rule iteration maximizing `cost · value`.
    fn step(&mut self, cost: &[Rational]) -> Step {
        let entering = (0..self.width()).find_map(|j| {
            if self.is_fixed(j) {
                return None;
            }
            match self.state[j] {
                VarState::Basic(_) => None,
                VarState::AtLower => {
                    (self.reduced_cost(cost, j).is_positive()).then_some((j, Rational::one()))
                }
                VarState::AtUpper => {
                    (self.reduced_cost(cost, j).is_negative()).then_some((j, -Rational::one()))
                }
            }
        });
        let Some((j, sigma)) = entering else {
            return Step::Optimal;
        };

        // Basic variable in row i moves by delta_i per unit step.
        let deltas: Vec<Rational> = (0..self.basis.len())
            .map(|i| -(&sigma * self.table.get(i, j)))
            .collect();
        let mut best: Option<(Rational, usize)> = None;
        for (i, delta) in deltas.iter().enumerate() {
            let b = self.basis[i];
            let limit = if delta.is_negative() {
                Some((&self.value[b] - &self.lower[b]) / -delta)
            } else if delta.is_positive() {
                self.upper[b].as_ref().map(|u| (u - &self.value[b]) / delta)
            } else {
                None
            };
            if let Some(limit) = limit {
                let better = match &best {
                    None => true,
                    Some((t, r)) => limit < *t || (limit == *t && b < self.basis[*r]),
                };
                if better {
                    best = Some((limit, i));
                }
            }
        }
        let flip = self.upper[j].as_ref().map(|u| u - &self.lower[j]);

        let (t, leaving) = match (flip, best) {
            (None, None) => return Step::Unbounded,
            (Some(f), Some((t, r))) if t < f => (t, Some(r)),
            (Some(f), _) => (f, None),
            (None, Some((t, r))) => (t, Some(r)),
        };

        for (i, delta) in deltas.iter().enumerate() {
            if !delta.is_zero() {
                let b = self.basis[i];
                self.value[b] += delta * &t;
            }
        }
        self.value[j] += &sigma * &t;

        match leaving {
            None => {
                self.state[j] = match self.state[j] {
                    VarState::AtLower => VarState::AtUpper,
                    _ => VarState::AtLower,
                };
                self.value[j] = match self.state[j] {
                    VarState::AtUpper => self.upper[j].clone().expect("finite upper"),
                    _ => self.lower[j].clone(),
                };
            }
            Some(r) => {
                let out = self.basis[r];
                let to_lower = deltas[r].is_negative();
                self.state[out] = if to_lower {
                    VarState::AtLower
                } else {
                    VarState::AtUpper
                };
                // Snap exactly onto the bound the leaving variable reached.
                self.value[out] = if to_lower {
                    self.lower[out].clone()
                } else {
                    self.upper[out].clone().expect("finite upper")
                };
                self.pivot(r, j);
            }
        }
        Step::Moved
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let width = self.width();
        let inv = self.table.get(r, j).recip();
        for c in 0..width {
            let v = self.table.get(r, c) * &inv;
            self.table.set(r, c, v);
        }
        for i in 0..self.table.rows() {
            if i == r || self.table.get(i, j).is_zero() {
                continue;
            }
            let f = self.table.get(i, j).clone();
            for c in 0..width {
                let pc = self.table.get(r, c);
                if !pc.is_zero() {
                    let v = self.table.get(i, c) - &f * pc;
                    self.table.set(i, c, v);
                }
            }
        }
        self.basis[r] = j;
        self.state[j] = VarState::Basic(r);
        self.pivots += 1;
    }

    fn run(&mut self, cost: &[Rational]) -> bool {
        loop {
            match self.step(cost) {
                Step::Optimal => return true,
                Step::Unbounded => return false,
                Step::Moved => {}
            }
        }
    }

    /// Phase one; returns false when the minimum total infeasibility is
    /// strictly positive.
    fn phase_one(&mut self, artificial_start: usize) -> bool {
        let width = self.width();
        let cost: Vec<Rational> = (0..width)
            .map(|j| {
                if j >= artificial_start {
                    -Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        // Bounded below by zero, so phase one never reports unbounded.
        self.run(&cost);
        let infeasibility: Rational = self.value[artificial_start..].iter().sum();
        if infeasibility.is_positive() {
            return false;
        }
        for j in artificial_start..width {
            self.upper[j] = Some(Rational::zero());
        }
        true
    }
}

/// Maximizes `objective · x` exactly. An optimal point is a basic feasible
/// solution of the equality form.
pub fn lp_maximize(problem: &LpProblem) -> Result<LpOutcome, LpError> {
    problem.validate()?;
    let n = problem.objective.len();
    let m = problem.constraint_matrix.rows();
    let rows = if m == 0 {
        Matrix::zeros(0, n)
    } else {
        problem.constraint_matrix.clone()
    };
    let mut tab = Tableau::new(
        &rows,
        &problem.rhs,
        m,
        &problem.lower_bounds,
        &problem.upper_bounds,
    );
    if !tab.phase_one(n + m) {
        return Ok(LpOutcome::without_point(
            LpStatus::Infeasible,
            tab.basis.clone(),
            tab.pivots,
        ));
    }
    let mut cost = problem.objective.clone();
    cost.resize(tab.width(), Rational::zero());
    if !tab.run(&cost) {
        return Ok(LpOutcome::without_point(
            LpStatus::Unbounded,
            tab.basis.clone(),
            tab.pivots,
        ));
    }
    let point = tab.value[..n].to_vec();
    debug_assert!(problem.is_feasible(&point));
    let objective_value = dot(&problem.objective, &point);
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        point: Some(point),
        objective_value: Some(objective_value),
        basis: tab.basis,
        pivots: tab.pivots,
    })
}

/// Finds `x` with `A x ≥ rhs`, bounds respected and `w · x = level`, or
/// `None` when phase one proves no such point exists.
pub fn lp_feasible_point(
    a: &Matrix,
    rhs: &[Rational],
    lower: &[Rational],
    upper: &[Option<Rational>],
    normalization: &[Rational],
    level: &Rational,
) -> Result<Option<Vec<Rational>>, LpError> {
    let n = lower.len();
    if normalization.len() != n {
        return Err(malformed(
            "normalization length differs from variable count".into(),
        ));
    }
    if normalization.iter().all(Zero::is_zero) {
        return Err(malformed("normalization vector is zero".into()));
    }
    let check = LpProblem {
        objective: vec![Rational::zero(); n],
        constraint_matrix: if a.rows() == 0 {
            Matrix::zeros(0, n)
        } else {
            a.clone()
        },
        rhs: rhs.to_vec(),
        lower_bounds: lower.to_vec(),
        upper_bounds: upper.to_vec(),
    };
    check.validate()?;

    let m = a.rows();
    let mut rows = check.constraint_matrix.to_rows();
    rows.push(normalization.to_vec());
    let rows = Matrix::from_rows(rows).expect("rectangular rows");
    let mut all_rhs = rhs.to_vec();
    all_rhs.push(level.clone());

    let mut tab = Tableau::new(&rows, &all_rhs, m, lower, upper);
    if !tab.phase_one(n + m) {
        return Ok(None);
    }
    let point = tab.value[..n].to_vec();
    debug_assert!(check.is_feasible(&point) && dot(normalization, &point) == *level);
    Ok(Some(point))
}
