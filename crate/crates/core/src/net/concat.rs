use crate::linalg::Matrix;
use crate::net::program::{AffineArray, AffineTerm, Input, ParamProgram};
use crate::net::{Guard, NetError, NetNode, Selector};
use crate::scalar::Scalar;

fn shift_input(i: Input, ds: usize, dp: usize) -> Input {
    match i {
        Input::Slot(s) => Input::Slot(s + ds),
        Input::Param(p) => Input::Param(p + dp),
    }
}

fn embed<T: Scalar>(dst: &mut AffineArray<T>, src: &AffineArray<T>, ro: usize, co: usize, ds: usize, dp: usize) {
    for r in 0..src.rows {
        for c in 0..src.cols {
            dst.base[(r + ro) * dst.cols + c + co] = src.base[r * src.cols + c];
        }
    }
    dst.terms.extend(src.terms.iter().map(|t| AffineTerm {
        entry: (t.entry / src.cols + ro) * dst.cols + t.entry % src.cols + co,
        input: shift_input(t.input, ds, dp),
        weight: t.weight,
    }));
}

/// Merges nodes into one block-diagonal node whose slots, variables,
/// constraints and outputs are the stacked ones of the inputs.
pub fn concatenate<T: Scalar>(nodes: &[NetNode<T>]) -> Result<NetNode<T>, NetError> {
    let Some(first) = nodes.first() else {
        return Err(NetError::InvalidEdge("nothing to concatenate".into()));
    };
    if nodes.len() == 1 {
        return Ok(first.clone());
    }
    let qp = first.program.is_qp();
    if nodes.iter().any(|v| v.program.is_qp() != qp) {
        return Err(NetError::MixedProgramKinds);
    }
    let sum = |f: &dyn Fn(&NetNode<T>) -> usize| nodes.iter().map(f).sum::<usize>();
    let n_z = sum(&|v| v.program.n_z);
    let n_slots = sum(&|v| v.n_slots());
    let (m1, m2) = (sum(&|v| v.program.m1()), sum(&|v| v.program.m2()));
    let n_out = sum(&|v| v.out_dim());

    let mut p = ParamProgram::new(n_z, n_slots);
    p.ineq_lhs = AffineArray::zeros(m1, n_z);
    p.ineq_rhs = AffineArray::zeros(m1, 1);
    p.eq_lhs = AffineArray::zeros(m2, n_z);
    p.eq_rhs = AffineArray::zeros(m2, 1);
    if qp {
        p.quadratic = Some(AffineArray::zeros(n_z, n_z));
    }
    let has_lower = nodes.iter().any(|v| v.program.lower.is_some());
    let has_upper = nodes.iter().any(|v| v.program.upper.is_some());
    let mut lower = vec![T::neg_infinity(); n_z];
    let mut upper = vec![T::infinity(); n_z];
    let mut selector = Selector { matrix: Matrix::zeros(n_out, n_z), offset: Vec::with_capacity(n_out) };
    let mut guards = Vec::new();
    let (mut zo, mut so, mut po, mut r1, mut r2, mut oo) = (0, 0, 0, 0, 0, 0);
    for v in nodes {
        let q = &v.program;
        embed(&mut p.cost, &q.cost, 0, zo, so, po);
        embed(&mut p.ineq_lhs, &q.ineq_lhs, r1, zo, so, po);
        embed(&mut p.ineq_rhs, &q.ineq_rhs, r1, 0, so, po);
        embed(&mut p.eq_lhs, &q.eq_lhs, r2, zo, so, po);
        embed(&mut p.eq_rhs, &q.eq_rhs, r2, 0, so, po);
        if let (Some(dst), Some(src)) = (p.quadratic.as_mut(), q.quadratic.as_ref()) {
            embed(dst, src, zo, zo, so, po);
        }
        p.theta.extend_from_slice(&q.theta);
        for j in 0..q.n_z {
            let l = q.lower.as_ref().map_or(T::neg_infinity(), |l| l[j]);
            let u = q.upper.as_ref().map_or(T::infinity(), |u| u[j]);
            if l.is_nan() || u.is_nan() || l > u {
                return Err(NetError::IncompatibleBounds(format!("node {} variable {j}: [{l}, {u}]", v.name)));
            }
            lower[zo + j] = l;
            upper[zo + j] = u;
        }
        for r in 0..v.out_dim() {
            for j in 0..q.n_z {
                selector.matrix[(oo + r, zo + j)] = v.selector.matrix[(r, j)];
            }
        }
        selector.offset.extend_from_slice(&v.selector.offset);
        guards.extend(v.guards.iter().map(|g| {
            let mut expr = g.expr.clone();
            expr.terms.iter_mut().for_each(|t| t.0 = shift_input(t.0, so, po));
            Guard { expr, label: format!("{}/{}", v.name, g.label) }
        }));
        zo += q.n_z;
        so += v.n_slots();
        po += q.theta.len();
        r1 += q.m1();
        r2 += q.m2();
        oo += v.out_dim();
    }
    p.lower = has_lower.then_some(lower);
    p.upper = has_upper.then_some(upper);
    let name = nodes.iter().map(|v| v.name.as_str()).collect::<Vec<_>>().join("+");
    Ok(NetNode { name, program: p, selector, guards })
}
