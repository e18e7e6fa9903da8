//! Whole-network composition.

use super::graph::{NetNode, NetworkBuilder, Selector, SolutionNetwork, Source};
use super::program::{Affine, Input, ParamProgram};
use super::NetError;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

fn eta_of<T: Scalar>(nets: &[&SolutionNetwork<T>]) -> T {
    nets.iter().map(|n| n.guard_eta()).fold(T::zero(), |a, b| a.max(b))
}

/// Copies `net`'s nodes and edges into `b`, with `input` standing in for the
/// network input. Returns the node offset.
fn splice<T: Scalar>(b: &mut NetworkBuilder<T>, net: &SolutionNetwork<T>, input: Source) -> Result<usize, NetError> {
    let base = b.node_count();
    for node in net.nodes() {
        b.add_node(node.clone());
    }
    for e in net.edges() {
        b.connect(remap(e.source, input, base), e.target + base, e.slot, e.matrix.clone(), e.offset.clone())?;
    }
    Ok(base)
}

fn remap(s: Source, input: Source, base: usize) -> Source {
    match s {
        Source::Input => input,
        Source::Node(v) => Source::Node(v + base),
    }
}

/// Networks sharing one input, outputs stacked in order.
pub fn parallel<T: Scalar>(nets: &[&SolutionNetwork<T>]) -> Result<SolutionNetwork<T>, NetError> {
    let Some(first) = nets.first() else {
        return Err(NetError::InvalidEdge("nothing to compose".into()));
    };
    let n_in = first.n_inputs();
    if nets.iter().any(|n| n.n_inputs() != n_in) {
        return Err(NetError::InvalidEdge("parallel networks must share the input dimension".into()));
    }
    let out: usize = nets.iter().map(|n| n.out_dim()).sum();
    let mut b = NetworkBuilder::new(n_in, out).guard_eta(eta_of(nets));
    let mut offset = Vec::with_capacity(out);
    let mut row = 0;
    for net in nets {
        let base = splice(&mut b, net, Source::Input)?;
        let r = net.readout_spec();
        for t in &r.terms {
            let mut m = Matrix::zeros(out, t.matrix.cols);
            for i in 0..t.matrix.rows {
                for j in 0..t.matrix.cols {
                    m[(row + i, j)] = t.matrix[(i, j)];
                }
            }
            b.readout(remap(t.source, Source::Input, base), m)?;
        }
        offset.extend_from_slice(&r.offset);
        row += net.out_dim();
    }
    b.readout_offset(offset)?;
    b.build()
}

/// `second(first(x))`. The first network's readout is materialized by one
/// equality-pinned relay node, since a slot takes exactly one edge.
pub fn series<T: Scalar>(first: &SolutionNetwork<T>, second: &SolutionNetwork<T>) -> Result<SolutionNetwork<T>, NetError> {
    let m = first.out_dim();
    if second.n_inputs() != m {
        return Err(NetError::InvalidEdge(format!("first network has {m} outputs, second takes {} inputs", second.n_inputs())));
    }
    let mut b = NetworkBuilder::new(first.n_inputs(), second.out_dim()).guard_eta(eta_of(&[first, second]));
    let base = splice(&mut b, first, Source::Input)?;
    let r = first.readout_spec();
    let mut p = ParamProgram::new(m, m * r.terms.len());
    for i in 0..m {
        let mut lhs = vec![Affine::zero(); m];
        lhs[i] = Affine::constant(T::one());
        let rhs = (0..r.terms.len()).fold(Affine::constant(r.offset[i]), |a, k| a.plus(Input::Slot(k * m + i), T::one()));
        p.push_eq(lhs, rhs);
    }
    let relay = b.add_node(NetNode::new("relay", p, Selector::identity(m)));
    for (k, t) in r.terms.iter().enumerate() {
        b.connect(remap(t.source, Source::Input, base), relay, k * m, t.matrix.clone(), vec![T::zero(); m])?;
    }
    let base2 = splice(&mut b, second, Source::Node(relay))?;
    for t in &second.readout_spec().terms {
        b.readout(remap(t.source, Source::Node(relay), base2), t.matrix.clone())?;
    }
    b.readout_offset(second.readout_spec().offset.clone())?;
    b.build()
}
