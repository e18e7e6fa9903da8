//! Closed-form LP nodes: division, products, bumps, cell indicators and
//! max-affine epigraphs.

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::net::{Affine, Input, NetError, NetNode, NetworkBuilder, ParamProgram, Selector, SolutionNetwork, Source};
use crate::scalar::Scalar;

fn unit_box<T: Scalar>(p: &mut ParamProgram<T>) {
    let n = p.n_z;
    p.set_bounds(Some(vec![T::zero(); n]), Some(vec![T::one(); n]));
}

/// `coef * z = rhs` as the pair `coef z <= rhs`, `-coef z <= -rhs`.
fn pin<T: Scalar>(p: &mut ParamProgram<T>, coef: Affine<T>, rhs: Affine<T>) {
    p.push_ineq(vec![coef.clone()], rhs.clone());
    p.push_ge(vec![coef], rhs);
}

/// `(x2 - a2) / (x1 - a1)` from slots `(x1, x2)`.
pub fn inverse_node<T: Scalar>(a1: T, a2: T) -> NetNode<T> {
    let mut p = ParamProgram::new(1, 2);
    p.set_cost(0, Affine::constant(-T::one()));
    pin(&mut p, Affine::slot(0, T::one(), -a1), Affine::slot(1, T::one(), -a2));
    NetNode::new("inverse", p, Selector::identity(1)).with_guard(Affine::slot(0, T::one(), -a1), "x1 - a1")
}

/// `1 / (x - a)` from one slot.
pub fn reciprocal_node<T: Scalar>(a: T) -> NetNode<T> {
    let mut p = ParamProgram::new(1, 1);
    p.set_cost(0, Affine::constant(-T::one()));
    pin(&mut p, Affine::slot(0, T::one(), -a), Affine::constant(T::one()));
    NetNode::new("reciprocal", p, Selector::identity(1)).with_guard(Affine::slot(0, T::one(), -a), "x - a")
}

/// `(y - a) / w` from slots `(w, y)`; paired with [`reciprocal_node`] this
/// multiplies.
pub fn divide_node<T: Scalar>(a: T) -> NetNode<T> {
    let mut p = ParamProgram::new(1, 2);
    p.set_cost(0, Affine::constant(-T::one()));
    pin(&mut p, Affine::slot(0, T::one(), T::zero()), Affine::slot(1, T::one(), -a));
    NetNode::new("divide", p, Selector::identity(1)).with_guard(Affine::slot(0, T::one(), T::zero()), "w")
}

/// Appends the two-node product `(u - a1)(v - a2)` where `u`, `v` are
/// scalar components of existing sources. Returns the id of the second node.
pub fn append_product<T: Scalar>(
    b: &mut NetworkBuilder<T>,
    u: (Source, usize),
    a1: T,
    v: (Source, usize),
    a2: T,
) -> Result<usize, NetError> {
    let r = b.add_node(reciprocal_node(a1));
    b.connect_component(u.0, u.1, r, 0)?;
    let d = b.add_node(divide_node(a2));
    b.connect_component(Source::Node(r), 0, d, 0)?;
    b.connect_component(v.0, v.1, d, 1)?;
    Ok(d)
}

/// Two chained nodes computing `(x1 - a1)(x2 - a2)` for any sign of the
/// inputs, away from `x1 = a1`.
pub fn product_subnet<T: Scalar>(a1: T, a2: T) -> SolutionNetwork<T> {
    let mut b = NetworkBuilder::new(2, 1);
    let d = append_product(&mut b, (Source::Input, 0), a1, (Source::Input, 1), a2).expect("fixed wiring");
    b.readout_component(Source::Node(d), 0, 0, T::one()).expect("fixed wiring");
    b.build().expect("fixed wiring")
}

/// Inequality-only product `x1 x2`, valid for inputs in `(0, 1]`.
pub fn product_subnet_unit<T: Scalar>() -> SolutionNetwork<T> {
    let mut b = NetworkBuilder::new(2, 1);
    let mut p = ParamProgram::new(1, 1);
    p.set_cost(0, Affine::constant(-T::one()));
    p.push_ineq(vec![Affine::slot(0, T::one(), T::zero())], Affine::constant(T::one()));
    let r = b.add_node(NetNode::new("reciprocal_le", p, Selector::identity(1)).with_guard(Affine::slot(0, T::one(), T::zero()), "x1"));
    let mut p = ParamProgram::new(1, 2);
    p.set_cost(0, Affine::constant(-T::one()));
    p.push_ineq(vec![Affine::slot(0, T::one(), T::zero())], Affine::slot(1, T::one(), T::zero()));
    let d = b.add_node(NetNode::new("divide_le", p, Selector::identity(1)).with_guard(Affine::slot(0, T::one(), T::zero()), "w"));
    b.connect_component(Source::Input, 0, r, 0).expect("fixed wiring");
    b.connect_component(Source::Node(r), 0, d, 0).expect("fixed wiring");
    b.connect_component(Source::Input, 1, d, 1).expect("fixed wiring");
    b.readout_component(Source::Node(d), 0, 0, T::one()).expect("fixed wiring");
    b.build().expect("fixed wiring")
}

/// `1` on `[-1, 1]`, `0` elsewhere.
pub fn bump_node<T: Scalar>() -> NetNode<T> {
    let mut p = ParamProgram::new(1, 1);
    p.set_cost(0, Affine::constant(-T::one()));
    unit_box(&mut p);
    p.push_ineq(vec![Affine::slot(0, T::one(), -T::one())], Affine::zero());
    p.push_ge(vec![Affine::slot(0, T::one(), T::one())], Affine::zero());
    NetNode::new("bump", p, Selector::identity(1))
}

/// `1` on the union of the closed intervals, `0` elsewhere.
///
/// One indicator variable per interval plus an output `w <= sum z_i`, all in
/// `[0, 1]`.
pub fn multi_bump_node<T: Scalar>(intervals: &[(T, T)]) -> Result<NetNode<T>, NetError> {
    if intervals.is_empty() || intervals.iter().any(|&(a, b)| !(a <= b)) {
        return Err(NetError::InvalidEdge("intervals must be non-empty with a <= b".into()));
    }
    let k = intervals.len();
    let mut p = ParamProgram::new(k + 1, 1);
    unit_box(&mut p);
    let zero_row = || vec![Affine::zero(); k + 1];
    for (i, &(a, b)) in intervals.iter().enumerate() {
        p.set_cost(i, Affine::constant(-T::one()));
        let mut row = zero_row();
        row[i] = Affine::slot(0, T::one(), -b);
        p.push_ineq(row, Affine::zero());
        let mut row = zero_row();
        row[i] = Affine::slot(0, T::one(), -a);
        p.push_ge(row, Affine::zero());
    }
    p.set_cost(k, Affine::constant(-T::one()));
    let mut row = vec![Affine::constant(-T::one()); k + 1];
    row[k] = Affine::constant(T::one());
    p.push_ineq(row, Affine::zero());
    Ok(NetNode::new("multi_bump", p, Selector::pick(k + 1, k)))
}

/// `r / n`, correctly rounded, so adjacent cells share their face exactly
/// and the last face is exactly one.
pub fn grid_face<T: Scalar>(r: usize, n: usize) -> T {
    T::from_usize(r).expect("index fits") / T::from_usize(n).expect("grid size fits")
}

/// Indicator of the closed grid cell `prod [m_i / N, (m_i + 1) / N]`.
pub fn box_indicator_node<T: Scalar>(m: &[usize], n: usize) -> Result<NetNode<T>, NetError> {
    if n == 0 || m.iter().any(|&mi| mi >= n) {
        return Err(NetError::InvalidEdge(format!("cell {m:?} outside a grid of size {n}")));
    }
    let nx = m.len();
    let mut p = ParamProgram::new(1, nx);
    p.set_cost(0, Affine::constant(-T::one()));
    unit_box(&mut p);
    for (i, &mi) in m.iter().enumerate() {
        let (lo, hi): (T, T) = (grid_face(mi, n), grid_face(mi + 1, n));
        p.push_ineq(vec![Affine::slot(i, T::one(), -hi)], Affine::zero());
        p.push_ge(vec![Affine::slot(i, T::one(), -lo)], Affine::zero());
    }
    Ok(NetNode::new(format!("cell{m:?}"), p, Selector::identity(1)))
}

/// Indicator of `{x : a_j . x <= b_j for all j}`.
pub fn polyhedral_indicator_node<T: Scalar>(halfspaces: &[(Vec<T>, T)]) -> Result<NetNode<T>, NetError> {
    let Some(nx) = halfspaces.first().map(|h| h.0.len()) else {
        return Err(NetError::InvalidEdge("need at least one halfspace".into()));
    };
    if halfspaces.iter().any(|h| h.0.len() != nx) {
        return Err(NetError::InvalidEdge("halfspaces have different dimensions".into()));
    }
    let mut p = ParamProgram::new(1, nx);
    p.set_cost(0, Affine::constant(-T::one()));
    unit_box(&mut p);
    for (a, b) in halfspaces {
        let mut coef = Affine::constant(-*b);
        for (i, &ai) in a.iter().enumerate() {
            if ai != T::zero() {
                coef = coef.plus(Input::Slot(i), ai);
            }
        }
        p.push_ineq(vec![coef], Affine::zero());
    }
    Ok(NetNode::new("polyhedron", p, Selector::identity(1)))
}

/// `h(x) = max_k p_k . x + q_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MaxAffineFunction<T> {
    pub planes: Vec<(Vec<T>, T)>,
}

impl<T: Scalar> MaxAffineFunction<T> {
    pub fn new(planes: Vec<(Vec<T>, T)>) -> Result<Self, NetError> {
        let Some(nx) = planes.first().map(|p| p.0.len()) else {
            return Err(NetError::InvalidEdge("a max-affine function needs at least one plane".into()));
        };
        if planes.iter().any(|p| p.0.len() != nx) {
            return Err(NetError::InvalidEdge("planes have different dimensions".into()));
        }
        Ok(MaxAffineFunction { planes })
    }

    /// The constant function `c` on `R^nx`.
    pub fn constant(nx: usize, c: T) -> Self {
        MaxAffineFunction { planes: vec![(vec![T::zero(); nx], c)] }
    }

    pub fn n_x(&self) -> usize {
        self.planes[0].0.len()
    }

    pub fn k(&self) -> usize {
        self.planes.len()
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.planes
            .iter()
            .map(|(p, q)| *q + crate::linalg::dot(p, x))
            .fold(T::neg_infinity(), T::max)
    }

    /// Largest `||p_k||_inf`.
    pub fn lipschitz(&self) -> T {
        self.planes.iter().map(|(p, _)| crate::linalg::norm_inf(p)).fold(T::zero(), T::max)
    }
}

/// `h1 - h2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MaxAffinePair<T> {
    pub h1: MaxAffineFunction<T>,
    pub h2: MaxAffineFunction<T>,
}

impl<T: Scalar> MaxAffinePair<T> {
    pub fn new(h1: MaxAffineFunction<T>, h2: MaxAffineFunction<T>) -> Result<Self, NetError> {
        if h1.n_x() != h2.n_x() {
            return Err(NetError::InvalidEdge("h1 and h2 have different input dimensions".into()));
        }
        Ok(MaxAffinePair { h1, h2 })
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.h1.eval(x) - self.h2.eval(x)
    }
}

/// Epigraph LP `min t s.t. p_k . x + q_k <= t`.
pub fn maxaffine_to_lp<T: Scalar>(h: &MaxAffineFunction<T>) -> NetNode<T> {
    let mut p = ParamProgram::new(1, h.n_x());
    p.set_cost(0, Affine::constant(T::one()));
    for (pk, qk) in &h.planes {
        let mut rhs = Affine::constant(-*qk);
        for (i, &v) in pk.iter().enumerate() {
            if v != T::zero() {
                rhs = rhs.plus(Input::Slot(i), -v);
            }
        }
        p.push_ineq(vec![Affine::constant(-T::one())], rhs);
    }
    NetNode::new("epigraph", p, Selector::identity(1))
}

/// Sizes of the single-LP difference form, reported next to the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DcCounts {
    /// `K1 + K2 + 1`, which is `2K + 1` for equal plane counts.
    pub constraints: usize,
    /// `n_x + 3`: the inputs plus `t1, t2, t3`.
    pub variables: usize,
    /// `n_x + 1`, the count stated for the general approximation result.
    pub variables_single: usize,
}

pub fn dc_counts<T: Scalar>(pair: &MaxAffinePair<T>) -> DcCounts {
    let nx = pair.h1.n_x();
    DcCounts { constraints: pair.h1.k() + pair.h2.k() + 1, variables: nx + 3, variables_single: nx + 1 }
}

/// Two epigraph nodes with readout `t1 - t2`.
pub fn dc_difference_net<T: Scalar>(pair: &MaxAffinePair<T>) -> SolutionNetwork<T> {
    let nx = pair.h1.n_x();
    let mut b = NetworkBuilder::new(nx, 1);
    let n1 = b.add_node(maxaffine_to_lp(&pair.h1));
    let n2 = b.add_node(maxaffine_to_lp(&pair.h2));
    b.connect_all(Source::Input, n1, 0).expect("fixed wiring");
    b.connect_all(Source::Input, n2, 0).expect("fixed wiring");
    b.readout(Source::Node(n1), Matrix::from_rows(&[vec![T::one()]])).expect("fixed wiring");
    b.readout(Source::Node(n2), Matrix::from_rows(&[vec![-T::one()]])).expect("fixed wiring");
    b.build().expect("fixed wiring")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{validate_dpp, Tolerances};

    fn at(node: &NetNode<f64>, x: &[f64]) -> f64 {
        node.evaluate(x, &Tolerances::default()).unwrap()[0]
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(at(&inverse_node(0.0, 0.0), &[0.5, 1.0]), 2.0);
        assert_eq!(at(&inverse_node(0.0, 0.0), &[1.0, 1.0]), 1.0);
        assert_eq!(at(&inverse_node(0.5, 0.25), &[1.0, 1.25]), 2.0);
        let e = inverse_node(0.0, 0.0).evaluate(&[0.0, 1.0], &Tolerances::default());
        assert!(matches!(e, Err(NetError::DomainBoundary { .. })));
    }

    #[test]
    fn product_examples() {
        let net = product_subnet(0.0, 0.0);
        assert_eq!(net.evaluate(&[0.5, 0.25]).unwrap(), vec![0.125]);
        assert_eq!(net.evaluate(&[1.0, 1.0]).unwrap(), vec![1.0]);
        assert!(matches!(net.evaluate(&[0.0, 0.3]), Err(NetError::DomainBoundary { .. })));
        let unit = product_subnet_unit::<f64>();
        assert_eq!(unit.evaluate(&[0.5, 0.25]).unwrap(), vec![0.125]);
    }

    #[test]
    fn bump_examples() {
        let b = bump_node();
        assert_eq!(at(&b, &[0.5]), 1.0);
        assert_eq!(at(&b, &[1.0]), 1.0);
        assert_eq!(at(&b, &[-1.0]), 1.0);
        assert_eq!(at(&b, &[1.5]), 0.0);
        assert_eq!(b.program.n_constraints(), 4);
    }

    #[test]
    fn multi_bump_examples() {
        let m = multi_bump_node(&[(0.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(at(&m, &[2.5]), 1.0);
        assert_eq!(at(&m, &[1.5]), 0.0);
        assert_eq!(at(&m, &[0.0]), 1.0);
        let point = multi_bump_node(&[(1.0, 1.0)]).unwrap();
        assert_eq!(at(&point, &[1.0]), 1.0);
        assert_eq!(at(&point, &[1.0 + 1e-6]), 0.0);
    }

    #[test]
    fn indicator_examples() {
        let c = box_indicator_node(&[0, 0], 2).unwrap();
        assert_eq!(at(&c, &[0.2, 0.2]), 1.0);
        assert_eq!(at(&c, &[0.9, 0.9]), 0.0);
        assert_eq!(at(&c, &[0.5, 0.1]), 1.0);
        assert_eq!((c.program.n_z, c.program.n_constraints()), (1, 6));
        let s = polyhedral_indicator_node(&[(vec![-1.0, 0.0], 0.0), (vec![0.0, -1.0], 0.0), (vec![1.0, 1.0], 1.0)]).unwrap();
        assert_eq!(at(&s, &[0.2, 0.2]), 1.0);
        assert_eq!(at(&s, &[0.8, 0.8]), 0.0);
    }

    #[test]
    fn maxaffine_examples() {
        let h = MaxAffineFunction::new(vec![(vec![1.0], 0.0), (vec![-1.0], 1.0)]).unwrap();
        assert!((at(&maxaffine_to_lp(&h), &[0.3]) - 0.7).abs() < 1e-15);
        let single = MaxAffineFunction::new(vec![(vec![2.0, -1.0], 0.5)]).unwrap();
        assert_eq!(at(&maxaffine_to_lp(&single), &[1.0, 3.0]), 2.0 - 3.0 + 0.5);
        let pair = MaxAffinePair::new(h.clone(), MaxAffineFunction::constant(1, 0.0)).unwrap();
        assert!((dc_difference_net(&pair).evaluate(&[0.3]).unwrap()[0] - 0.7).abs() < 1e-15);
        let counts = dc_counts(&MaxAffinePair::new(h.clone(), h).unwrap());
        assert_eq!((counts.constraints, counts.variables, counts.variables_single), (5, 4, 2));
    }

    #[test]
    fn every_gadget_is_dpp() {
        let h = MaxAffineFunction::new(vec![(vec![1.0, 0.5], 0.0), (vec![-1.0, 0.0], 1.0)]).unwrap();
        let nodes = vec![
            inverse_node(0.3, -0.2),
            reciprocal_node(0.1),
            divide_node(0.2),
            bump_node(),
            multi_bump_node(&[(0.0, 1.0), (2.0, 3.0)]).unwrap(),
            box_indicator_node(&[1, 0, 2], 3).unwrap(),
            polyhedral_indicator_node(&[(vec![1.0, 1.0], 1.0)]).unwrap(),
            maxaffine_to_lp(&h),
        ];
        for n in nodes {
            let (t, o) = n.program.dpp_templates();
            let rep = validate_dpp(&t, &o);
            assert!(rep.compliant, "{}: {:?}", n.name, rep.violations);
        }
    }
}
