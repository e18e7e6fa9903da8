use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::lp::{Atom, BilinearConstraintTemplate, CoefExpr, LinearProgram, ParamMonomial, Problem, QuadraticProgram, Relation, TemplateTerm};
use crate::scalar::Scalar;

/// Where a coefficient sensitivity reads its value from: an input slot fed
/// by an edge, or a stored trainable parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Input {
    Slot(usize),
    Param(usize),
}

/// Scalar affine expression `constant + sum w_k * input_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Affine<T> {
    pub constant: T,
    pub terms: Vec<(Input, T)>,
}

impl<T: Scalar> Affine<T> {
    pub fn constant(c: T) -> Self {
        Affine { constant: c, terms: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// `w * slot + c`.
    pub fn slot(slot: usize, w: T, c: T) -> Self {
        Affine { constant: c, terms: vec![(Input::Slot(slot), w)] }
    }

    pub fn plus(mut self, input: Input, w: T) -> Self {
        self.terms.push((input, w));
        self
    }

    pub fn scaled(mut self, s: T) -> Self {
        self.constant = self.constant * s;
        for t in &mut self.terms {
            t.1 = t.1 * s;
        }
        self
    }

    pub fn eval(&self, slots: &[T], theta: &[T]) -> T {
        self.terms.iter().fold(self.constant, |acc, &(inp, w)| {
            acc + w * match inp {
                Input::Slot(s) => slots[s],
                Input::Param(p) => theta[p],
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AffineTerm<T> {
    /// Row-major entry index.
    pub entry: usize,
    pub input: Input,
    pub weight: T,
}

/// Dense coefficient block whose entries are affine in slots and parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AffineArray<T> {
    pub rows: usize,
    pub cols: usize,
    pub base: Vec<T>,
    pub terms: Vec<AffineTerm<T>>,
}

impl<T: Scalar> AffineArray<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        AffineArray { rows, cols, base: vec![T::zero(); rows * cols], terms: Vec::new() }
    }

    pub fn constant(m: &Matrix<T>) -> Self {
        AffineArray { rows: m.rows, cols: m.cols, base: m.data.clone(), terms: Vec::new() }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn set(&mut self, r: usize, c: usize, a: &Affine<T>) {
        let e = r * self.cols + c;
        self.base[e] = a.constant;
        self.terms.retain(|t| t.entry != e);
        self.terms.extend(a.terms.iter().map(|&(input, weight)| AffineTerm { entry: e, input, weight }));
    }

    fn push_row(&mut self, row: &[Affine<T>]) {
        debug_assert_eq!(row.len(), self.cols);
        self.rows += 1;
        self.base.extend(std::iter::repeat(T::zero()).take(self.cols));
        for (c, a) in row.iter().enumerate() {
            self.set(self.rows - 1, c, a);
        }
    }

    pub fn instantiate_into(&self, slots: &[T], theta: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend_from_slice(&self.base);
        for t in &self.terms {
            let v = match t.input {
                Input::Slot(s) => slots[s],
                Input::Param(p) => theta[p],
            };
            out[t.entry] = out[t.entry] + t.weight * v;
        }
    }

    pub fn instantiate(&self, slots: &[T], theta: &[T]) -> Matrix<T> {
        let mut data = Vec::new();
        self.instantiate_into(slots, theta, &mut data);
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    fn entry_expr(&self, e: usize) -> Affine<T> {
        Affine {
            constant: self.base[e],
            terms: self.terms.iter().filter(|t| t.entry == e).map(|t| (t.input, t.weight)).collect(),
        }
    }

    fn max_input(&self) -> (usize, usize) {
        self.terms.iter().fold((0, 0), |(s, p), t| match t.input {
            Input::Slot(i) => (s.max(i + 1), p),
            Input::Param(i) => (s, p.max(i + 1)),
        })
    }
}

/// Parametric LP/QP template: every coefficient block is affine in the
/// node's input slots and its stored parameters `theta`.
///
/// `min (1/2) z^T Q z + c^T z  s.t.  A z <= b,  E z = d,  l <= z <= u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ParamProgram<T> {
    pub n_z: usize,
    pub n_slots: usize,
    pub theta: Vec<T>,
    pub cost: AffineArray<T>,
    pub quadratic: Option<AffineArray<T>>,
    pub ineq_lhs: AffineArray<T>,
    pub ineq_rhs: AffineArray<T>,
    pub eq_lhs: AffineArray<T>,
    pub eq_rhs: AffineArray<T>,
    #[serde(serialize_with = "crate::net::serial::opt_bounds::serialize", deserialize_with = "crate::net::serial::opt_bounds::lower")]
    pub lower: Option<Vec<T>>,
    #[serde(serialize_with = "crate::net::serial::opt_bounds::serialize", deserialize_with = "crate::net::serial::opt_bounds::upper")]
    pub upper: Option<Vec<T>>,
}

impl<T: Scalar> ParamProgram<T> {
    pub fn new(n_z: usize, n_slots: usize) -> Self {
        ParamProgram {
            n_z,
            n_slots,
            theta: Vec::new(),
            cost: AffineArray::zeros(1, n_z),
            quadratic: None,
            ineq_lhs: AffineArray::zeros(0, n_z),
            ineq_rhs: AffineArray::zeros(0, 1),
            eq_lhs: AffineArray::zeros(0, n_z),
            eq_rhs: AffineArray::zeros(0, 1),
            lower: None,
            upper: None,
        }
    }

    pub fn m1(&self) -> usize {
        self.ineq_lhs.rows
    }

    pub fn m2(&self) -> usize {
        self.eq_lhs.rows
    }

    pub fn is_qp(&self) -> bool {
        self.quadratic.is_some()
    }

    pub fn finite_bounds(&self) -> usize {
        let count = |b: &Option<Vec<T>>| b.as_ref().map_or(0, |v| v.iter().filter(|x| x.is_finite()).count());
        count(&self.lower) + count(&self.upper)
    }

    /// Constraint count used for width accounting: rows plus finite bounds.
    pub fn n_constraints(&self) -> usize {
        self.m1() + self.m2() + self.finite_bounds()
    }

    pub fn set_cost(&mut self, j: usize, a: Affine<T>) -> &mut Self {
        self.cost.set(0, j, &a);
        self
    }

    /// Constant quadratic term.
    pub fn set_quadratic(&mut self, q: &Matrix<T>) -> &mut Self {
        self.quadratic = Some(AffineArray::constant(q));
        self
    }

    pub fn push_ineq(&mut self, lhs: Vec<Affine<T>>, rhs: Affine<T>) -> &mut Self {
        self.ineq_lhs.push_row(&lhs);
        self.ineq_rhs.push_row(&[rhs]);
        self
    }

    /// `lhs . z >= rhs`, stored negated as a `<=` row.
    pub fn push_ge(&mut self, lhs: Vec<Affine<T>>, rhs: Affine<T>) -> &mut Self {
        let neg = -T::one();
        self.push_ineq(lhs.into_iter().map(|a| a.scaled(neg)).collect(), rhs.scaled(neg))
    }

    pub fn push_eq(&mut self, lhs: Vec<Affine<T>>, rhs: Affine<T>) -> &mut Self {
        self.eq_lhs.push_row(&lhs);
        self.eq_rhs.push_row(&[rhs]);
        self
    }

    pub fn set_bounds(&mut self, lower: Option<Vec<T>>, upper: Option<Vec<T>>) -> &mut Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    /// Writes the instantiated LP into `lp`, reusing its allocations.
    pub fn instantiate_into(&self, slots: &[T], lp: &mut LinearProgram<T>) {
        let th = &self.theta;
        self.cost.instantiate_into(slots, th, &mut lp.cost);
        self.ineq_lhs.instantiate_into(slots, th, &mut lp.ineq_lhs.data);
        lp.ineq_lhs.rows = self.ineq_lhs.rows;
        lp.ineq_lhs.cols = self.n_z;
        self.ineq_rhs.instantiate_into(slots, th, &mut lp.ineq_rhs);
        self.eq_lhs.instantiate_into(slots, th, &mut lp.eq_lhs.data);
        lp.eq_lhs.rows = self.eq_lhs.rows;
        lp.eq_lhs.cols = self.n_z;
        self.eq_rhs.instantiate_into(slots, th, &mut lp.eq_rhs);
        lp.lower.clone_from(&self.lower);
        lp.upper.clone_from(&self.upper);
    }

    pub fn instantiate(&self, slots: &[T]) -> Problem<T> {
        let mut lp = LinearProgram::new(self.n_z);
        self.instantiate_into(slots, &mut lp);
        match &self.quadratic {
            None => Problem::Lp(lp),
            Some(q) => Problem::Qp(QuadraticProgram::new(lp, q.instantiate(slots, &self.theta))),
        }
    }

    /// Highest slot and parameter index referenced, plus one.
    pub fn referenced_inputs(&self) -> (usize, usize) {
        let arrays = [&self.cost, &self.ineq_lhs, &self.ineq_rhs, &self.eq_lhs, &self.eq_rhs];
        let mut acc = arrays.iter().fold((0, 0), |(s, p), a| {
            let (s2, p2) = a.max_input();
            (s.max(s2), p.max(p2))
        });
        if let Some(q) = &self.quadratic {
            let (s2, p2) = q.max_input();
            acc = (acc.0.max(s2), acc.1.max(p2));
        }
        acc
    }

    /// Expresses the program as bilinear templates: slot `i` is parameter
    /// `s{i}`, stored parameter `k` is `theta{k}`, variable `j` is `z{j}`.
    pub fn dpp_templates(&self) -> (Vec<BilinearConstraintTemplate>, BilinearConstraintTemplate) {
        let coef = |a: &Affine<T>| CoefExpr {
            monomials: std::iter::once(ParamMonomial { coeff: a.constant.to_f64_lossy(), params: vec![], opaque: vec![] })
                .chain(a.terms.iter().map(|&(inp, w)| ParamMonomial {
                    coeff: w.to_f64_lossy(),
                    params: vec![match inp {
                        Input::Slot(s) => format!("s{s}"),
                        Input::Param(p) => format!("theta{p}"),
                    }],
                    opaque: vec![],
                }))
                .collect(),
        };
        let var = |j: usize| vec![Atom::Var(format!("z{j}"))];
        let rows = |lhs: &AffineArray<T>, rhs: &AffineArray<T>, rel: Relation| -> Vec<BilinearConstraintTemplate> {
            (0..lhs.rows)
                .map(|r| BilinearConstraintTemplate {
                    terms: (0..self.n_z).map(|j| TemplateTerm { coef: coef(&lhs.entry_expr(r * self.n_z + j)), factor: var(j) }).collect(),
                    relation: Some(rel),
                    rhs: coef(&rhs.entry_expr(r)),
                })
                .collect()
        };
        let mut templates = rows(&self.ineq_lhs, &self.ineq_rhs, Relation::Le);
        templates.extend(rows(&self.eq_lhs, &self.eq_rhs, Relation::Eq));
        let mut obj_terms: Vec<TemplateTerm> =
            (0..self.n_z).map(|j| TemplateTerm { coef: coef(&self.cost.entry_expr(j)), factor: var(j) }).collect();
        if let Some(q) = &self.quadratic {
            if q.is_constant() {
                obj_terms.push(TemplateTerm {
                    coef: CoefExpr::constant(0.5),
                    factor: vec![Atom::Func { name: "quad_form".into(), vars: (0..self.n_z).map(|j| format!("z{j}")).collect(), params: vec![] }],
                });
            } else {
                for i in 0..self.n_z {
                    for j in 0..self.n_z {
                        let e = q.entry_expr(i * self.n_z + j);
                        if e.terms.is_empty() && e.constant == T::zero() {
                            continue;
                        }
                        obj_terms.push(TemplateTerm { coef: coef(&e), factor: vec![Atom::Var(format!("z{i}")), Atom::Var(format!("z{j}"))] });
                    }
                }
            }
        }
        let objective = BilinearConstraintTemplate { terms: obj_terms, relation: None, rhs: CoefExpr::default() };
        (templates, objective)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instantiation_is_affine_in_each_slot() {
        // (s0 - 1) z <= 2 s1 + 0.5
        let mut p = ParamProgram::<f64>::new(1, 2);
        p.push_ineq(vec![Affine::slot(0, 1.0, -1.0)], Affine::slot(1, 2.0, 0.5));
        let at = |s: &[f64]| match p.instantiate(s) {
            Problem::Lp(lp) => (lp.ineq_lhs.data[0], lp.ineq_rhs[0]),
            _ => unreachable!(),
        };
        let (a, b) = (at(&[0.0, 0.0]), at(&[2.0, 4.0]));
        let mid = at(&[1.0, 2.0]);
        assert_eq!(mid, ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0));
        assert_eq!(at(&[3.0, 1.0]), (2.0, 2.5));
    }

    #[test]
    fn templates_pass_dpp() {
        let mut p = ParamProgram::<f64>::new(1, 2);
        p.set_cost(0, Affine::constant(-1.0));
        p.push_ge(vec![Affine::slot(0, 1.0, 0.0)], Affine::slot(1, 1.0, 0.0));
        let (t, o) = p.dpp_templates();
        assert!(crate::lp::validate_dpp(&t, &o).compliant);
    }
}
