use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::lp::LpError;
use crate::scalar::Scalar;

/// `min c^T z  s.t.  A z <= b,  E z = d,  l <= z <= u`.
///
/// Missing bound vectors mean the variable is free on that side; individual
/// entries may also be infinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram<T> {
    pub cost: Vec<T>,
    pub ineq_lhs: Matrix<T>,
    pub ineq_rhs: Vec<T>,
    pub eq_lhs: Matrix<T>,
    pub eq_rhs: Vec<T>,
    pub lower: Option<Vec<T>>,
    pub upper: Option<Vec<T>>,
}

/// A [`LinearProgram`] plus the quadratic term `1/2 z^T Q z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticProgram<T> {
    pub lp: LinearProgram<T>,
    pub quadratic: Matrix<T>,
}

impl<T: Scalar> LinearProgram<T> {
    /// An unconstrained program in `n` free variables with zero cost.
    pub fn new(n: usize) -> Self {
        LinearProgram {
            cost: vec![T::zero(); n],
            ineq_lhs: Matrix::zeros(0, n),
            ineq_rhs: Vec::new(),
            eq_lhs: Matrix::zeros(0, n),
            eq_rhs: Vec::new(),
            lower: None,
            upper: None,
        }
    }

    pub fn with_cost(mut self, cost: Vec<T>) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_ineq(mut self, lhs: Matrix<T>, rhs: Vec<T>) -> Self {
        self.ineq_lhs = if lhs.rows == 0 { Matrix::zeros(0, self.n_vars()) } else { lhs };
        self.ineq_rhs = rhs;
        self
    }

    pub fn with_eq(mut self, lhs: Matrix<T>, rhs: Vec<T>) -> Self {
        self.eq_lhs = if lhs.rows == 0 { Matrix::zeros(0, self.n_vars()) } else { lhs };
        self.eq_rhs = rhs;
        self
    }

    pub fn with_bounds(mut self, lower: Option<Vec<T>>, upper: Option<Vec<T>>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn n_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn n_ineq(&self) -> usize {
        self.ineq_rhs.len()
    }

    pub fn n_eq(&self) -> usize {
        self.eq_rhs.len()
    }

    pub fn lower_bound(&self, j: usize) -> T {
        self.lower.as_ref().map_or(T::neg_infinity(), |l| l[j])
    }

    pub fn upper_bound(&self, j: usize) -> T {
        self.upper.as_ref().map_or(T::infinity(), |u| u[j])
    }

    /// Number of finite bound entries; each counts as one constraint in
    /// width accounting.
    pub fn finite_bounds(&self) -> usize {
        let count = |b: &Option<Vec<T>>| b.as_ref().map_or(0, |v| v.iter().filter(|x| x.is_finite()).count());
        count(&self.lower) + count(&self.upper)
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.n_vars();
        let dims_ok = self.ineq_lhs.cols == n
            && self.ineq_lhs.rows == self.ineq_rhs.len()
            && self.eq_lhs.cols == n
            && self.eq_lhs.rows == self.eq_rhs.len()
            && self.lower.as_ref().map_or(true, |l| l.len() == n)
            && self.upper.as_ref().map_or(true, |u| u.len() == n);
        if !dims_ok {
            return Err(LpError::DimensionMismatch(format!(
                "n_z={n}, ineq {}x{} / {}, eq {}x{} / {}",
                self.ineq_lhs.rows,
                self.ineq_lhs.cols,
                self.ineq_rhs.len(),
                self.eq_lhs.rows,
                self.eq_lhs.cols,
                self.eq_rhs.len()
            )));
        }
        let nan = self.cost.iter().chain(&self.ineq_lhs.data).chain(&self.ineq_rhs).chain(&self.eq_lhs.data).chain(&self.eq_rhs).any(|v| !v.is_finite());
        if nan {
            return Err(LpError::NonFinite);
        }
        for j in 0..n {
            let (l, u) = (self.lower_bound(j), self.upper_bound(j));
            if l.is_nan() || u.is_nan() || l > u || l == T::infinity() || u == T::neg_infinity() {
                return Err(LpError::InvalidBounds(j));
            }
        }
        Ok(())
    }

    pub fn objective(&self, z: &[T]) -> T {
        crate::linalg::dot(&self.cost, z)
    }
}

impl<T: Scalar> QuadraticProgram<T> {
    pub fn new(lp: LinearProgram<T>, quadratic: Matrix<T>) -> Self {
        QuadraticProgram { lp, quadratic }
    }

    pub fn validate(&self) -> Result<(), LpError> {
        self.lp.validate()?;
        let n = self.lp.n_vars();
        if self.quadratic.rows != n || self.quadratic.cols != n {
            return Err(LpError::DimensionMismatch(format!(
                "quadratic is {}x{}, expected {n}x{n}",
                self.quadratic.rows, self.quadratic.cols
            )));
        }
        if self.quadratic.data.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite);
        }
        Ok(())
    }

    pub fn objective(&self, z: &[T]) -> T {
        let qz = self.quadratic.matvec(z);
        self.lp.objective(z) + T::lit(0.5) * crate::linalg::dot(z, &qz)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of an LP or QP solve.
///
/// Dual sign convention: with Lagrangian
/// `c^T z + lam^T (A z - b) + mu^T (E z - d) - nu_l^T (z - l) + nu_u^T (z - u)`
/// the optimality conditions are `c + Q z + A^T lam + E^T mu - nu_l + nu_u = 0`
/// with `lam, nu_l, nu_u >= 0`. `duals` stores `lam` followed by `mu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult<T> {
    pub status: SolveStatus,
    pub primal: Vec<T>,
    pub duals: Vec<T>,
    pub bound_duals_lower: Vec<T>,
    pub bound_duals_upper: Vec<T>,
    /// Inequality rows with `|slack| <= active_tol`, ascending.
    pub active_set: Vec<usize>,
    pub objective: T,
}

impl<T: Scalar> SolveResult<T> {
    pub(crate) fn non_optimal(status: SolveStatus, n: usize, m: usize) -> Self {
        SolveResult {
            status,
            primal: vec![T::nan(); n],
            duals: vec![T::nan(); m],
            bound_duals_lower: vec![T::zero(); n],
            bound_duals_upper: vec![T::zero(); n],
            active_set: Vec::new(),
            objective: match status {
                SolveStatus::Unbounded => T::neg_infinity(),
                _ => T::infinity(),
            },
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Solver tolerances. Defaults are calibrated for `f64`; `Scalar::tol`
/// floors them near machine precision for `f32`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub feas: f64,
    pub active: f64,
    pub kkt: f64,
    pub definiteness: f64,
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { feas: 1e-9, active: 1e-7, kkt: 1e-8, definiteness: 1e-10, rank: 1e-10 }
    }
}

impl Tolerances {
    /// All tolerances scaled relative to the defaults so that `kkt` equals
    /// the given value.
    pub fn with_kkt(kkt: f64) -> Self {
        let s = kkt / 1e-8;
        let d = Self::default();
        Tolerances { feas: d.feas * s, active: d.active * s, kkt, definiteness: d.definiteness, rank: d.rank }
    }
}

/// Fills `active_set` from the primal and returns it; shared by the LP and
/// QP paths.
pub(crate) fn active_rows<T: Scalar>(lp: &LinearProgram<T>, z: &[T], active_tol: T) -> Vec<usize> {
    (0..lp.n_ineq())
        .filter(|&i| (lp.ineq_rhs[i] - crate::linalg::dot(lp.ineq_lhs.row(i), z)).abs() <= active_tol)
        .collect()
}
