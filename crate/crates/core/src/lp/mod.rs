//! LP/QP problems with desk-scale solvers and KKT certificates.

mod dpp;
mod format;
mod kkt;
mod problem;
mod qp;
mod simplex;

pub use dpp::{
    parse_constraint, validate_dpp, validate_dpp_text, Atom, BilinearConstraintTemplate, CoefExpr, DppReport, ParamMonomial,
    Relation, TemplateTerm, Violation, ViolationKind,
};
pub use format::{parse_problem, problem_to_json, BoundsDoc, Problem, ProblemDoc};
pub use kkt::{check_kkt, KktReport, ProblemRef};
pub use problem::{LinearProgram, QuadraticProgram, SolveResult, SolveStatus, Tolerances};
pub use qp::{min_eigenvalue, solve_qp, solve_qp_with};
pub use simplex::{solve_lp, solve_lp_with};

pub(crate) use simplex::scalar_kernel;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite coefficient in problem data")]
    NonFinite,
    #[error("invalid bounds for variable {0}")]
    InvalidBounds(usize),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("quadratic term is not symmetric")]
    NotSymmetric,
    #[error("quadratic term is not positive definite (min eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

impl<T: crate::scalar::Scalar> Problem<T> {
    pub fn solve(&self, tol: &Tolerances) -> Result<SolveResult<T>, LpError> {
        match self {
            Problem::Lp(lp) => solve_lp_with(lp, tol),
            Problem::Qp(qp) => solve_qp_with(qp, tol),
        }
    }

    pub fn as_ref(&self) -> ProblemRef<'_, T> {
        match self {
            Problem::Lp(lp) => ProblemRef::Lp(lp),
            Problem::Qp(qp) => ProblemRef::Qp(qp),
        }
    }
}
