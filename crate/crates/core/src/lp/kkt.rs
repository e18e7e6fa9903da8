use serde::{Deserialize, Serialize};

use crate::linalg::{dot, Matrix};
use crate::lp::problem::{LinearProgram, QuadraticProgram, SolveResult};
use crate::scalar::Scalar;

/// Borrowed view of either problem kind.
#[derive(Clone, Copy, Debug)]
pub enum ProblemRef<'a, T> {
    Lp(&'a LinearProgram<T>),
    Qp(&'a QuadraticProgram<T>),
}

impl<'a, T> From<&'a LinearProgram<T>> for ProblemRef<'a, T> {
    fn from(lp: &'a LinearProgram<T>) -> Self {
        ProblemRef::Lp(lp)
    }
}

impl<'a, T> From<&'a QuadraticProgram<T>> for ProblemRef<'a, T> {
    fn from(qp: &'a QuadraticProgram<T>) -> Self {
        ProblemRef::Qp(qp)
    }
}

impl<'a, T> ProblemRef<'a, T> {
    fn parts(&self) -> (&'a LinearProgram<T>, Option<&'a Matrix<T>>) {
        match *self {
            ProblemRef::Lp(lp) => (lp, None),
            ProblemRef::Qp(qp) => (&qp.lp, Some(&qp.quadratic)),
        }
    }
}

/// Infinity-norm residuals of the optimality conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktReport<T> {
    pub stationarity: T,
    pub primal_feasibility: T,
    pub dual_feasibility: T,
    pub complementarity: T,
    pub pass: bool,
}

impl<T: Scalar> KktReport<T> {
    pub fn max_residual(&self) -> T {
        self.stationarity.max(self.primal_feasibility).max(self.dual_feasibility).max(self.complementarity)
    }
}

pub fn check_kkt<'a, T: Scalar, P: Into<ProblemRef<'a, T>>>(problem: P, result: &SolveResult<T>, tol: T) -> KktReport<T> {
    let (lp, q) = problem.into().parts();
    let z = &result.primal;
    let (m1, n) = (lp.n_ineq(), lp.n_vars());
    let lam = &result.duals[..m1];
    let mu = &result.duals[m1..];

    let mut grad = lp.cost.clone();
    if let Some(q) = q {
        for (g, v) in grad.iter_mut().zip(q.matvec(z)) {
            *g = *g + v;
        }
    }
    let at = lp.ineq_lhs.tr_matvec(lam);
    let et = lp.eq_lhs.tr_matvec(mu);
    let mut stat = T::zero();
    for j in 0..n {
        let r = grad[j] + at[j] + et[j] - result.bound_duals_lower[j] + result.bound_duals_upper[j];
        stat = stat.max(r.abs());
    }

    let mut feas = T::zero();
    let mut comp = T::zero();
    for i in 0..m1 {
        let slack = lp.ineq_rhs[i] - dot(lp.ineq_lhs.row(i), z);
        feas = feas.max(-slack);
        comp = comp.max((lam[i] * slack).abs());
    }
    for i in 0..lp.n_eq() {
        feas = feas.max((dot(lp.eq_lhs.row(i), z) - lp.eq_rhs[i]).abs());
    }
    for j in 0..n {
        let (l, u) = (lp.lower_bound(j), lp.upper_bound(j));
        if l.is_finite() {
            feas = feas.max(l - z[j]);
            comp = comp.max((result.bound_duals_lower[j] * (z[j] - l)).abs());
        }
        if u.is_finite() {
            feas = feas.max(z[j] - u);
            comp = comp.max((result.bound_duals_upper[j] * (u - z[j])).abs());
        }
    }

    let dual = lam
        .iter()
        .chain(&result.bound_duals_lower)
        .chain(&result.bound_duals_upper)
        .fold(T::zero(), |m, &v| m.max(-v));

    let mut report = KktReport { stationarity: stat, primal_feasibility: feas, dual_feasibility: dual, complementarity: comp, pass: false };
    let worst = report.max_residual();
    report.pass = worst <= tol && !worst.is_nan() && z.iter().all(|v| v.is_finite());
    report
}
