//! JSON problem documents.
//!
//! ```json
//! { "cost": [-1], "ineq_lhs": [[0.5]], "ineq_rhs": [0.25],
//!   "bounds": { "lower": [0], "upper": [null] } }
//! ```
//!
//! Matrices are row-major arrays of rows; `null` in a bound vector means
//! unbounded on that side. An optional `quadratic` matrix turns the document
//! into a QP.

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::lp::problem::{LinearProgram, QuadraticProgram};
use crate::lp::LpError;
use crate::scalar::Scalar;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BoundsDoc<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<Option<T>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<Option<T>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct ProblemDoc<T> {
    pub cost: Vec<T>,
    #[serde(default)]
    pub ineq_lhs: Vec<Vec<T>>,
    #[serde(default)]
    pub ineq_rhs: Vec<T>,
    #[serde(default)]
    pub eq_lhs: Vec<Vec<T>>,
    #[serde(default)]
    pub eq_rhs: Vec<T>,
    #[serde(default)]
    pub bounds: BoundsDoc<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<Vec<Vec<T>>>,
}

/// A parsed document: LP unless a quadratic term is present.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem<T> {
    Lp(LinearProgram<T>),
    Qp(QuadraticProgram<T>),
}

fn matrix<T: Scalar>(rows: &[Vec<T>], cols: usize, what: &str) -> Result<Matrix<T>, LpError> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(LpError::DimensionMismatch(format!("{what}: every row needs {cols} entries")));
    }
    Ok(Matrix::from_rows_with_cols(rows, cols))
}

fn bound_vec<T: Scalar>(v: &Option<Vec<Option<T>>>, inf: T) -> Option<Vec<T>> {
    v.as_ref().map(|v| v.iter().map(|b| b.unwrap_or(inf)).collect())
}

fn bound_doc<T: Scalar>(v: &Option<Vec<T>>) -> Option<Vec<Option<T>>> {
    v.as_ref().map(|v| v.iter().map(|b| if b.is_finite() { Some(*b) } else { None }).collect())
}

impl<T: Scalar> ProblemDoc<T> {
    pub fn into_problem(self) -> Result<Problem<T>, LpError> {
        let n = self.cost.len();
        let lp = LinearProgram {
            ineq_lhs: matrix(&self.ineq_lhs, n, "ineq_lhs")?,
            ineq_rhs: self.ineq_rhs,
            eq_lhs: matrix(&self.eq_lhs, n, "eq_lhs")?,
            eq_rhs: self.eq_rhs,
            lower: bound_vec(&self.bounds.lower, T::neg_infinity()),
            upper: bound_vec(&self.bounds.upper, T::infinity()),
            cost: self.cost,
        };
        lp.validate()?;
        match self.quadratic {
            None => Ok(Problem::Lp(lp)),
            Some(q) => {
                let qp = QuadraticProgram::new(lp, matrix(&q, n, "quadratic")?);
                qp.validate()?;
                Ok(Problem::Qp(qp))
            }
        }
    }

    pub fn from_lp(lp: &LinearProgram<T>) -> Self {
        ProblemDoc {
            cost: lp.cost.clone(),
            ineq_lhs: lp.ineq_lhs.to_rows(),
            ineq_rhs: lp.ineq_rhs.clone(),
            eq_lhs: lp.eq_lhs.to_rows(),
            eq_rhs: lp.eq_rhs.clone(),
            bounds: BoundsDoc { lower: bound_doc(&lp.lower), upper: bound_doc(&lp.upper) },
            quadratic: None,
        }
    }
}

pub fn parse_problem<T: Scalar>(text: &str) -> Result<Problem<T>, LpError> {
    let doc: ProblemDoc<T> = serde_json::from_str(text).map_err(|e| LpError::Parse(e.to_string()))?;
    doc.into_problem()
}

pub fn problem_to_json<T: Scalar>(problem: &Problem<T>) -> String {
    let doc = match problem {
        Problem::Lp(lp) => ProblemDoc::from_lp(lp),
        Problem::Qp(qp) => {
            let mut d = ProblemDoc::from_lp(&qp.lp);
            d.quadratic = Some(qp.quadratic.to_rows());
            d
        }
    };
    serde_json::to_string_pretty(&doc).expect("problem documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let p: Problem<f64> = parse_problem(
            r#"{ "cost": [-1], "ineq_lhs": [[0.5]], "ineq_rhs": [0.25],
                 "bounds": { "lower": [0], "upper": [null] } }"#,
        )
        .unwrap();
        let Problem::Lp(lp) = &p else { panic!("expected LP") };
        assert_eq!(lp.upper_bound(0), f64::INFINITY);
        let back: Problem<f64> = parse_problem(&problem_to_json(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn ragged_rows_rejected() {
        let r = parse_problem::<f64>(r#"{ "cost": [1, 2], "ineq_lhs": [[1]], "ineq_rhs": [0] }"#);
        assert!(matches!(r, Err(LpError::DimensionMismatch(_))));
    }
}
