use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::lp::{check_kkt, scalar_kernel, solve_lp_with, solve_qp_with, LinearProgram, QuadraticProgram, SolveStatus, Tolerances};
use crate::net::program::{Affine, Input, ParamProgram};
use crate::net::NetError;
use crate::scalar::Scalar;

pub const DEFAULT_GUARD_ETA: f64 = 1e-9;

/// Node output `matrix * z + offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Selector<T> {
    pub matrix: Matrix<T>,
    pub offset: Vec<T>,
}

impl<T: Scalar> Selector<T> {
    pub fn identity(n: usize) -> Self {
        Selector { matrix: Matrix::identity(n), offset: vec![T::zero(); n] }
    }

    /// Picks primal coordinate `j` out of `n`.
    pub fn pick(n: usize, j: usize) -> Self {
        let mut matrix = Matrix::zeros(1, n);
        matrix[(0, j)] = T::one();
        Selector { matrix, offset: vec![T::zero()] }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }
}

/// Rejects slot values where `|expr| <= eta`: the program's solution is not
/// pinned down there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Guard<T> {
    pub expr: Affine<T>,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NetNode<T> {
    pub name: String,
    pub program: ParamProgram<T>,
    pub selector: Selector<T>,
    #[serde(default)]
    pub guards: Vec<Guard<T>>,
}

impl<T: Scalar> NetNode<T> {
    pub fn new(name: impl Into<String>, program: ParamProgram<T>, selector: Selector<T>) -> Self {
        NetNode { name: name.into(), program, selector, guards: Vec::new() }
    }

    pub fn with_guard(mut self, expr: Affine<T>, label: impl Into<String>) -> Self {
        self.guards.push(Guard { expr, label: label.into() });
        self
    }

    pub fn n_slots(&self) -> usize {
        self.program.n_slots
    }

    pub fn out_dim(&self) -> usize {
        self.selector.dim()
    }

    pub fn validate(&self) -> Result<(), NetError> {
        let p = &self.program;
        let bad = |what: &str| Err(NetError::InvalidEdge(format!("node {}: {what}", self.name)));
        let shape = |a: &crate::net::AffineArray<T>, r: Option<usize>, c: usize| {
            r.map_or(true, |r| a.rows == r) && a.cols == c && a.base.len() == a.rows * a.cols && a.terms.iter().all(|t| t.entry < a.base.len())
        };
        if !shape(&p.cost, Some(1), p.n_z)
            || !shape(&p.ineq_lhs, None, p.n_z)
            || !shape(&p.ineq_rhs, Some(p.ineq_lhs.rows), 1)
            || !shape(&p.eq_lhs, None, p.n_z)
            || !shape(&p.eq_rhs, Some(p.eq_lhs.rows), 1)
            || p.quadratic.as_ref().map_or(false, |q| !shape(q, Some(p.n_z), p.n_z))
            || p.lower.as_ref().map_or(false, |l| l.len() != p.n_z)
            || p.upper.as_ref().map_or(false, |u| u.len() != p.n_z)
        {
            return bad("program blocks have inconsistent shapes");
        }
        let (s, th) = p.referenced_inputs();
        if s > p.n_slots || th > p.theta.len() {
            return bad("program references a missing slot or parameter");
        }
        if self.selector.matrix.cols != p.n_z || self.selector.offset.len() != self.selector.dim() {
            return bad("selector does not match n_z");
        }
        for g in &self.guards {
            for &(inp, _) in &g.expr.terms {
                match inp {
                    Input::Slot(i) if i >= p.n_slots => return bad("guard references a missing slot"),
                    Input::Param(i) if i >= p.theta.len() => return bad("guard references a missing parameter"),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Solves the instantiated program at the given slot values.
    pub fn evaluate(&self, slots: &[T], tol: &Tolerances) -> Result<Vec<T>, NetError> {
        let mut ws = Workspace::default();
        let mut out = vec![T::zero(); self.out_dim()];
        self.eval_into(0, slots, &mut ws, tol, None, T::lit(DEFAULT_GUARD_ETA), &mut out)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn eval_into(
        &self,
        id: usize,
        slots: &[T],
        ws: &mut Workspace<T>,
        tol: &Tolerances,
        audit: Option<&mut Audit<T>>,
        eta: T,
        out: &mut [T],
    ) -> Result<(), NetError> {
        let p = &self.program;
        for g in &self.guards {
            let v = g.expr.eval(slots, &p.theta);
            if v.abs() <= eta {
                return Err(NetError::DomainBoundary { node: id, label: g.label.clone(), value: v.to_f64_lossy() });
            }
        }
        p.instantiate_into(slots, &mut ws.lp);
        let lp = &ws.lp;
        let infeasible = || NetError::NodeInfeasible { node: id, name: self.name.clone() };
        let unbounded = || NetError::NodeUnbounded { node: id, name: self.name.clone() };
        ws.z.clear();
        if p.n_z == 1 && p.quadratic.is_none() && audit.is_none() {
            let (status, z, _) = scalar_kernel(
                lp.cost[0],
                &lp.ineq_lhs.data,
                &lp.ineq_rhs,
                &lp.eq_lhs.data,
                &lp.eq_rhs,
                lp.lower_bound(0),
                lp.upper_bound(0),
                T::tol(tol.feas),
            );
            match status {
                SolveStatus::Optimal => ws.z.push(z),
                SolveStatus::Infeasible => return Err(infeasible()),
                SolveStatus::Unbounded => return Err(unbounded()),
            }
        } else {
            let (res, report) = match &p.quadratic {
                None => {
                    let r = solve_lp_with(lp, tol)?;
                    let rep = (audit.is_some() && r.is_optimal()).then(|| check_kkt(lp, &r, T::tol(tol.kkt)));
                    (r, rep)
                }
                Some(q) => {
                    let qp = QuadraticProgram::new(lp.clone(), q.instantiate(slots, &p.theta));
                    let r = solve_qp_with(&qp, tol)?;
                    let rep = (audit.is_some() && r.is_optimal()).then(|| check_kkt(&qp, &r, T::tol(tol.kkt)));
                    (r, rep)
                }
            };
            match res.status {
                SolveStatus::Optimal => ws.z.extend_from_slice(&res.primal),
                SolveStatus::Infeasible => return Err(infeasible()),
                SolveStatus::Unbounded => return Err(unbounded()),
            }
            if let (Some(a), Some(rep)) = (audit, report) {
                a.solves += 1;
                a.max_residual = a.max_residual.max(rep.max_residual());
                if !rep.pass {
                    a.failures += 1;
                }
            }
        }
        let sel = &self.selector;
        for (r, o) in out.iter_mut().enumerate() {
            *o = sel.offset[r] + sel.matrix.row(r).iter().zip(&ws.z).fold(T::zero(), |acc, (&m, &z)| acc + m * z);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    Input,
    Node(usize),
}

/// Feeds `matrix * value(source) + offset` into slots
/// `slot..slot + matrix.rows` of `target`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NetEdge<T> {
    pub source: Source,
    pub target: usize,
    pub slot: usize,
    pub matrix: Matrix<T>,
    pub offset: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ReadoutTerm<T> {
    pub source: Source,
    pub matrix: Matrix<T>,
}

/// Network output `offset + sum matrix_k * value(source_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Readout<T> {
    pub terms: Vec<ReadoutTerm<T>>,
    pub offset: Vec<T>,
}

/// Per-solve KKT audit collected during evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Audit<T> {
    pub solves: usize,
    pub failures: usize,
    pub max_residual: T,
}

impl<T: Scalar> Default for Audit<T> {
    fn default() -> Self {
        Audit { solves: 0, failures: 0, max_residual: T::zero() }
    }
}

/// Scratch buffers reused across evaluations.
#[derive(Clone, Debug)]
pub struct Workspace<T> {
    slots: Vec<T>,
    outputs: Vec<T>,
    lp: LinearProgram<T>,
    z: Vec<T>,
    node_out: Vec<T>,
}

impl<T: Scalar> Default for Workspace<T> {
    fn default() -> Self {
        Workspace { slots: Vec::new(), outputs: Vec::new(), lp: LinearProgram::new(0), z: Vec::new(), node_out: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerStats {
    pub layer: usize,
    pub nodes: usize,
    /// Sum of `n_z` over the layer.
    pub variables: usize,
    /// Sum of rows plus finite bounds over the layer.
    pub constraints: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Complexity {
    pub depth: usize,
    pub layers: Vec<LayerStats>,
    pub total_variables: usize,
    pub total_constraints: usize,
    pub nodes: usize,
}

/// All intermediate values of one evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeTrace<T> {
    pub slots: Vec<Vec<T>>,
    pub outputs: Vec<Vec<T>>,
    pub output: Vec<T>,
}

/// Mutable construction stage; [`NetworkBuilder::build`] validates and
/// freezes it.
#[derive(Clone, Debug)]
pub struct NetworkBuilder<T> {
    n_inputs: usize,
    out_dim: usize,
    nodes: Vec<NetNode<T>>,
    edges: Vec<NetEdge<T>>,
    readout: Vec<ReadoutTerm<T>>,
    offset: Vec<T>,
    eta: T,
}

impl<T: Scalar> NetworkBuilder<T> {
    pub fn new(n_inputs: usize, out_dim: usize) -> Self {
        NetworkBuilder {
            n_inputs,
            out_dim,
            nodes: Vec::new(),
            edges: Vec::new(),
            readout: Vec::new(),
            offset: vec![T::zero(); out_dim],
            eta: T::lit(DEFAULT_GUARD_ETA),
        }
    }

    pub fn guard_eta(mut self, eta: T) -> Self {
        self.eta = eta;
        self
    }

    pub fn add_node(&mut self, node: NetNode<T>) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn source_dim(&self, s: Source) -> Option<usize> {
        match s {
            Source::Input => Some(self.n_inputs),
            Source::Node(u) => self.nodes.get(u).map(|n| n.out_dim()),
        }
    }

    /// Rejects edges that would close a cycle or reference missing nodes.
    pub fn connect(&mut self, source: Source, target: usize, slot: usize, matrix: Matrix<T>, offset: Vec<T>) -> Result<(), NetError> {
        let Some(sd) = self.source_dim(source) else {
            return Err(NetError::InvalidEdge(format!("unknown source {source:?}")));
        };
        if target >= self.nodes.len() {
            return Err(NetError::InvalidEdge(format!("unknown target {target}")));
        }
        if matrix.cols != sd || offset.len() != matrix.rows || slot + matrix.rows > self.nodes[target].n_slots() {
            return Err(NetError::InvalidEdge(format!("edge into node {target} slot {slot} has mismatched dimensions")));
        }
        if let Source::Node(u) = source {
            if u == target || self.reaches(target, u) {
                return Err(NetError::Cycle);
            }
        }
        self.edges.push(NetEdge { source, target, slot, matrix, offset });
        Ok(())
    }

    /// Feeds component `index` of `source` into a single slot.
    pub fn connect_component(&mut self, source: Source, index: usize, target: usize, slot: usize) -> Result<(), NetError> {
        let sd = self.source_dim(source).ok_or_else(|| NetError::InvalidEdge(format!("unknown source {source:?}")))?;
        let mut m = Matrix::zeros(1, sd);
        if index >= sd {
            return Err(NetError::InvalidEdge(format!("component {index} out of range")));
        }
        m[(0, index)] = T::one();
        self.connect(source, target, slot, m, vec![T::zero()])
    }

    /// Feeds the whole output of `source` into consecutive slots.
    pub fn connect_all(&mut self, source: Source, target: usize, slot: usize) -> Result<(), NetError> {
        let sd = self.source_dim(source).ok_or_else(|| NetError::InvalidEdge(format!("unknown source {source:?}")))?;
        self.connect(source, target, slot, Matrix::identity(sd), vec![T::zero(); sd])
    }

    fn reaches(&self, from: usize, to: usize) -> bool {
        let mut stack = vec![from];
        let mut seen = vec![false; self.nodes.len()];
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            if std::mem::replace(&mut seen[u], true) {
                continue;
            }
            stack.extend(self.edges.iter().filter(|e| e.source == Source::Node(u)).map(|e| e.target));
        }
        false
    }

    pub fn readout(&mut self, source: Source, matrix: Matrix<T>) -> Result<(), NetError> {
        let sd = self.source_dim(source).ok_or_else(|| NetError::InvalidEdge(format!("unknown source {source:?}")))?;
        if matrix.rows != self.out_dim || matrix.cols != sd {
            return Err(NetError::InvalidEdge("readout matrix has mismatched dimensions".into()));
        }
        self.readout.push(ReadoutTerm { source, matrix });
        Ok(())
    }

    /// Adds `weight * value(source)[index]` to output coordinate `out`.
    pub fn readout_component(&mut self, source: Source, index: usize, out: usize, weight: T) -> Result<(), NetError> {
        let sd = self.source_dim(source).ok_or_else(|| NetError::InvalidEdge(format!("unknown source {source:?}")))?;
        if index >= sd || out >= self.out_dim {
            return Err(NetError::InvalidEdge("readout component out of range".into()));
        }
        let mut m = Matrix::zeros(self.out_dim, sd);
        m[(out, index)] = weight;
        self.readout(source, m)
    }

    pub fn readout_offset(&mut self, offset: Vec<T>) -> Result<(), NetError> {
        if offset.len() != self.out_dim {
            return Err(NetError::InvalidEdge("readout offset has wrong length".into()));
        }
        self.offset = offset;
        Ok(())
    }

    pub fn build(self) -> Result<SolutionNetwork<T>, NetError> {
        SolutionNetwork::freeze(self.n_inputs, self.out_dim, self.nodes, self.edges, Readout { terms: self.readout, offset: self.offset }, self.eta)
    }
}

/// Frozen, validated network. Evaluation takes `&self` and is re-entrant.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionNetwork<T> {
    n_inputs: usize,
    out_dim: usize,
    nodes: Vec<NetNode<T>>,
    edges: Vec<NetEdge<T>>,
    readout: Readout<T>,
    eta: T,
    order: Vec<usize>,
    layers: Vec<usize>,
    in_edges: Vec<Vec<usize>>,
    slot_off: Vec<usize>,
    out_off: Vec<usize>,
}

impl<T: Scalar> SolutionNetwork<T> {
    pub(crate) fn freeze(
        n_inputs: usize,
        out_dim: usize,
        nodes: Vec<NetNode<T>>,
        edges: Vec<NetEdge<T>>,
        readout: Readout<T>,
        eta: T,
    ) -> Result<Self, NetError> {
        let n = nodes.len();
        for node in &nodes {
            node.validate()?;
        }
        let dim = |s: Source| match s {
            Source::Input => Some(n_inputs),
            Source::Node(u) => nodes.get(u).map(|v| v.out_dim()),
        };
        let mut fed: Vec<Vec<u8>> = nodes.iter().map(|v| vec![0; v.n_slots()]).collect();
        let mut in_edges = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            let sd = dim(e.source).ok_or_else(|| NetError::InvalidEdge(format!("edge {k}: unknown source")))?;
            if e.target >= n {
                return Err(NetError::InvalidEdge(format!("edge {k}: unknown target")));
            }
            if e.matrix.cols != sd
                || e.matrix.data.len() != e.matrix.rows * e.matrix.cols
                || e.offset.len() != e.matrix.rows
                || e.slot + e.matrix.rows > nodes[e.target].n_slots()
            {
                return Err(NetError::InvalidEdge(format!("edge {k}: mismatched dimensions")));
            }
            for f in &mut fed[e.target][e.slot..e.slot + e.matrix.rows] {
                *f += 1;
            }
            in_edges[e.target].push(k);
        }
        for (v, f) in fed.iter().enumerate() {
            if let Some(s) = f.iter().position(|&c| c != 1) {
                return Err(NetError::InvalidEdge(format!("node {v} slot {s} is fed by {} edges", f[s])));
            }
        }
        for (k, t) in readout.terms.iter().enumerate() {
            let sd = dim(t.source).ok_or_else(|| NetError::InvalidEdge(format!("readout term {k}: unknown source")))?;
            if t.matrix.rows != out_dim || t.matrix.cols != sd || t.matrix.data.len() != out_dim * sd {
                return Err(NetError::InvalidEdge(format!("readout term {k}: mismatched dimensions")));
            }
        }
        if readout.offset.len() != out_dim {
            return Err(NetError::InvalidEdge("readout offset has wrong length".into()));
        }

        // Kahn's algorithm; a leftover node means a cycle.
        let mut indeg = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for e in &edges {
            if let Source::Node(u) = e.source {
                indeg[e.target] += 1;
                succ[u].push(e.target);
            }
        }
        let mut ready: std::collections::VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        let mut layers = vec![1usize; n];
        while let Some(u) = ready.pop_front() {
            order.push(u);
            for &v in &succ[u] {
                layers[v] = layers[v].max(layers[u] + 1);
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.push_back(v);
                }
            }
        }
        if order.len() != n {
            return Err(NetError::Cycle);
        }
        let prefix = |sizes: &mut dyn Iterator<Item = usize>| {
            let mut acc = 0;
            let mut off: Vec<usize> = sizes
                .map(|s| {
                    let o = acc;
                    acc += s;
                    o
                })
                .collect();
            off.push(acc);
            off
        };
        let slot_off = prefix(&mut nodes.iter().map(|v| v.n_slots()));
        let out_off = prefix(&mut nodes.iter().map(|v| v.out_dim()));
        Ok(SolutionNetwork { n_inputs, out_dim, nodes, edges, readout, eta, order, layers, in_edges, slot_off, out_off })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn nodes(&self) -> &[NetNode<T>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[NetEdge<T>] {
        &self.edges
    }

    pub fn readout_spec(&self) -> &Readout<T> {
        &self.readout
    }

    pub fn guard_eta(&self) -> T {
        self.eta
    }

    /// Longest hop distance from the inputs, starting at 1.
    pub fn layer(&self, node: usize) -> usize {
        self.layers[node]
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    /// Per-layer variable and constraint widths.
    pub fn widths(&self) -> Complexity {
        let depth = self.layers.iter().copied().max().unwrap_or(0);
        let mut layers: Vec<LayerStats> = (1..=depth).map(|layer| LayerStats { layer, nodes: 0, variables: 0, constraints: 0 }).collect();
        for (v, node) in self.nodes.iter().enumerate() {
            let l = &mut layers[self.layers[v] - 1];
            l.nodes += 1;
            l.variables += node.program.n_z;
            l.constraints += node.program.n_constraints();
        }
        Complexity {
            depth,
            total_variables: layers.iter().map(|l| l.variables).sum(),
            total_constraints: layers.iter().map(|l| l.constraints).sum(),
            nodes: self.nodes.len(),
            layers,
        }
    }

    pub fn evaluate(&self, x: &[T]) -> Result<Vec<T>, NetError> {
        self.evaluate_in(x, &mut Workspace::default())
    }

    pub fn evaluate_in(&self, x: &[T], ws: &mut Workspace<T>) -> Result<Vec<T>, NetError> {
        self.run(x, ws, &Tolerances::default(), None)
    }

    pub fn evaluate_with(&self, x: &[T], ws: &mut Workspace<T>, tol: &Tolerances) -> Result<Vec<T>, NetError> {
        self.run(x, ws, tol, None)
    }

    /// Evaluates with the general solver on every node and KKT-checks each
    /// solve at `tol.kkt`.
    pub fn evaluate_audited(&self, x: &[T], tol: &Tolerances, audit: &mut Audit<T>) -> Result<Vec<T>, NetError> {
        self.run(x, &mut Workspace::default(), tol, Some(audit))
    }

    pub fn evaluate_nodes(&self, x: &[T]) -> Result<NodeTrace<T>, NetError> {
        let mut ws = Workspace::default();
        let output = self.run(x, &mut ws, &Tolerances::default(), None)?;
        let n = self.nodes.len();
        Ok(NodeTrace {
            slots: (0..n).map(|v| ws.slots[self.slot_off[v]..self.slot_off[v + 1]].to_vec()).collect(),
            outputs: (0..n).map(|v| ws.outputs[self.out_off[v]..self.out_off[v + 1]].to_vec()).collect(),
            output,
        })
    }

    fn value<'a>(&self, s: Source, x: &'a [T], outputs: &'a [T]) -> &'a [T] {
        match s {
            Source::Input => x,
            Source::Node(u) => &outputs[self.out_off[u]..self.out_off[u + 1]],
        }
    }

    fn run(&self, x: &[T], ws: &mut Workspace<T>, tol: &Tolerances, mut audit: Option<&mut Audit<T>>) -> Result<Vec<T>, NetError> {
        if x.len() != self.n_inputs {
            return Err(NetError::InputDimension { expected: self.n_inputs, got: x.len() });
        }
        let n = self.nodes.len();
        ws.slots.clear();
        ws.slots.resize(self.slot_off[n], T::zero());
        ws.outputs.clear();
        ws.outputs.resize(self.out_off[n], T::zero());
        let mut slots = std::mem::take(&mut ws.slots);
        let mut outputs = std::mem::take(&mut ws.outputs);
        let result = (|| {
            for &v in &self.order {
                let s0 = self.slot_off[v];
                for &k in &self.in_edges[v] {
                    let e = &self.edges[k];
                    let src = self.value(e.source, x, &outputs);
                    for r in 0..e.matrix.rows {
                        slots[s0 + e.slot + r] = e.offset[r] + e.matrix.row(r).iter().zip(src).fold(T::zero(), |acc, (&m, &s)| acc + m * s);
                    }
                }
                let (o0, o1) = (self.out_off[v], self.out_off[v + 1]);
                let mut out = std::mem::take(&mut ws.node_out);
                out.clear();
                out.resize(o1 - o0, T::zero());
                let r = self.nodes[v].eval_into(v, &slots[s0..self.slot_off[v + 1]], ws, tol, audit.as_deref_mut(), self.eta, &mut out);
                outputs[o0..o1].copy_from_slice(&out);
                ws.node_out = out;
                r?;
            }
            let mut y = self.readout.offset.clone();
            for t in &self.readout.terms {
                let src = self.value(t.source, x, &outputs);
                for (r, yr) in y.iter_mut().enumerate() {
                    *yr = *yr + t.matrix.row(r).iter().zip(src).fold(T::zero(), |acc, (&m, &s)| acc + m * s);
                }
            }
            Ok(y)
        })();
        ws.slots = slots;
        ws.outputs = outputs;
        result
    }
}
