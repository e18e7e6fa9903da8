//! `optnet/1` JSON documents.

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::net::program::ParamProgram;
use crate::net::{Guard, NetEdge, NetError, NetNode, Readout, Selector, SolutionNetwork, Source};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: &str = "optnet/1";

/// Bound vectors with `null` for infinite entries.
pub(crate) mod opt_bounds {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::scalar::Scalar;

    pub fn serialize<T: Scalar, S: Serializer>(v: &Option<Vec<T>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(|x| x.is_finite().then_some(*x)).collect::<Vec<_>>())
            .serialize(s)
    }

    fn read<'de, T: Scalar, D: Deserializer<'de>>(d: D, inf: T) -> Result<Option<Vec<T>>, D::Error> {
        let raw: Option<Vec<Option<T>>> = Option::deserialize(d)?;
        Ok(raw.map(|v| v.into_iter().map(|x| x.unwrap_or(inf)).collect()))
    }

    pub fn lower<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<T>>, D::Error> {
        read(d, T::neg_infinity())
    }

    pub fn upper<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<T>>, D::Error> {
        read(d, T::infinity())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct NodeDoc<T> {
    id: usize,
    name: String,
    program: ParamProgram<T>,
    selector: Selector<T>,
    #[serde(default)]
    guards: Vec<Guard<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct EdgeDoc<T> {
    src: Source,
    dst: usize,
    slot: usize,
    matrix: Matrix<T>,
    offset: Vec<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct NetworkDoc<T> {
    version: String,
    inputs: usize,
    outputs: usize,
    guard_eta: T,
    nodes: Vec<NodeDoc<T>>,
    edges: Vec<EdgeDoc<T>>,
    readout: Readout<T>,
}

pub fn network_to_json<T: Scalar>(net: &SolutionNetwork<T>) -> String {
    let doc = NetworkDoc {
        version: FORMAT_VERSION.to_string(),
        inputs: net.n_inputs(),
        outputs: net.out_dim(),
        guard_eta: net.guard_eta(),
        nodes: net
            .nodes()
            .iter()
            .enumerate()
            .map(|(id, v)| NodeDoc { id, name: v.name.clone(), program: v.program.clone(), selector: v.selector.clone(), guards: v.guards.clone() })
            .collect(),
        edges: net
            .edges()
            .iter()
            .map(|e| EdgeDoc { src: e.source, dst: e.target, slot: e.slot, matrix: e.matrix.clone(), offset: e.offset.clone() })
            .collect(),
        readout: net.readout_spec().clone(),
    };
    serde_json::to_string(&doc).expect("network documents always serialize")
}

pub fn network_from_json<T: Scalar>(text: &str) -> Result<SolutionNetwork<T>, NetError> {
    let schema = |m: String| NetError::SchemaViolation(m);
    let doc: NetworkDoc<T> = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    if doc.version != FORMAT_VERSION {
        return Err(schema(format!("unsupported version {:?}", doc.version)));
    }
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for (k, n) in doc.nodes.into_iter().enumerate() {
        if n.id != k {
            return Err(schema(format!("node ids must be 0..n in order, found {} at position {k}", n.id)));
        }
        nodes.push(NetNode { name: n.name, program: n.program, selector: n.selector, guards: n.guards });
    }
    let edges = doc
        .edges
        .into_iter()
        .map(|e| NetEdge { source: e.src, target: e.dst, slot: e.slot, matrix: e.matrix, offset: e.offset })
        .collect();
    SolutionNetwork::freeze(doc.inputs, doc.outputs, nodes, edges, doc.readout, doc.guard_eta).map_err(|e| match e {
        NetError::SchemaViolation(m) => schema(m),
        other => schema(other.to_string()),
    })
}
