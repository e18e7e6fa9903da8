//! Piecewise Taylor networks on a uniform grid over the unit box: one cell
//! indicator and one monomial chain per multi-index per cell, gated and
//! summed by the readout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gadgets::{box_indicator_node, grid_face};
use crate::linalg::Matrix;
use crate::net::{Affine, NetError, NetNode, NetworkBuilder, ParamProgram, Selector, SolutionNetwork, Source, Workspace};
use crate::scalar::{robust_ceil, Scalar};
use crate::target::{binomial, factorial, multi_indices, Target};

pub const DEFAULT_NODE_CAP: usize = 250_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaylorError {
    #[error("no derivative oracle available for analytic mode")]
    OracleUnavailable,
    #[error("invalid grid spec: {0}")]
    InvalidSpec(String),
    #[error("network would need {nodes} nodes, above the cap of {cap}")]
    ScaleExceeded { nodes: usize, cap: usize },
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference { h: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorGridSpec {
    pub n_x: usize,
    pub k: usize,
    pub eps: f64,
    /// Cells per axis.
    pub grid: usize,
    pub mode: DerivativeMode,
    /// Bound on the derivatives of the target; coefficients are divided by
    /// it before compilation and the readout multiplies it back.
    pub derivative_bound: f64,
    pub node_cap: usize,
}

/// `ceil(n_x (1 / (k! eps))^(1/k))`, at least one.
pub fn grid_size(n_x: usize, k: usize, eps: f64) -> usize {
    let v = n_x as f64 * (1.0 / (factorial(k) * eps)).powf(1.0 / k as f64);
    (robust_ceil(v) as usize).max(1)
}

/// `n_x^k / k! * N^-k`.
pub fn error_bound(n_x: usize, k: usize, grid: usize) -> f64 {
    (n_x as f64).powi(k as i32) / factorial(k) * (grid as f64).powi(-(k as i32))
}

/// Step used when no analytic oracle is supplied.
pub fn default_fd_step(eps: f64) -> f64 {
    1e-4f64.max(eps.sqrt() / 10.0)
}

impl TaylorGridSpec {
    pub fn new(n_x: usize, k: usize, eps: f64) -> Result<Self, TaylorError> {
        if n_x == 0 || k == 0 || !(eps > 0.0) || !eps.is_finite() {
            return Err(TaylorError::InvalidSpec(format!("need n_x >= 1, k >= 1, eps > 0 (got {n_x}, {k}, {eps})")));
        }
        Ok(TaylorGridSpec {
            n_x,
            k,
            eps,
            grid: grid_size(n_x, k, eps),
            mode: DerivativeMode::Analytic,
            derivative_bound: 1.0,
            node_cap: DEFAULT_NODE_CAP,
        })
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn finite_differences(self) -> Self {
        let h = default_fd_step(self.eps);
        self.with_mode(DerivativeMode::FiniteDifference { h })
    }

    pub fn with_derivative_bound(mut self, b: f64) -> Self {
        self.derivative_bound = b;
        self
    }

    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = cap;
        self
    }

    pub fn cells(&self) -> usize {
        self.grid.pow(self.n_x as u32)
    }

    pub fn monomials(&self) -> usize {
        binomial(self.k + self.n_x, self.n_x)
    }

    /// Bound for the compiled function, including the derivative scale.
    pub fn error_bound(&self) -> f64 {
        self.derivative_bound * error_bound(self.n_x, self.k, self.grid)
    }

    /// First-layer `(constraints, variables)`:
    /// `(2 n_x + 2 + 2 C) N^n_x` and `(1 + C) N^n_x`.
    pub fn first_layer(&self) -> (usize, usize) {
        let (c, cells) = (self.monomials(), self.cells());
        ((2 * self.n_x + 2 + 2 * c) * cells, (1 + c) * cells)
    }

    pub fn node_count(&self) -> usize {
        let chain: usize = multi_indices(self.n_x, self.k)
            .iter()
            .map(|n| {
                let d = n.iter().sum::<u32>() as usize;
                if d <= 1 {
                    1
                } else {
                    2 * d - 2
                }
            })
            .sum();
        self.cells() * (2 + chain)
    }

    fn validate(&self) -> Result<(), TaylorError> {
        if self.grid == 0 || self.n_x == 0 || self.k == 0 || !(self.derivative_bound > 0.0) {
            return Err(TaylorError::InvalidSpec("grid, n_x, k and derivative_bound must be positive".into()));
        }
        if let DerivativeMode::FiniteDifference { h } = self.mode {
            if !(h > 0.0) {
                return Err(TaylorError::InvalidSpec("finite-difference step must be positive".into()));
            }
        }
        let nodes = self.node_count();
        if nodes > self.node_cap {
            return Err(TaylorError::ScaleExceeded { nodes, cap: self.node_cap });
        }
        Ok(())
    }
}

/// Center `(2 m_i + 1) / (2 N)` of a grid cell.
pub fn cell_center(m: &[usize], grid: usize) -> Vec<f64> {
    m.iter().map(|&mi| (2 * mi + 1) as f64 / (2 * grid) as f64).collect()
}

/// Central stencil for the `d`-th derivative on offsets `-p..=p`, exact for
/// polynomials of degree `<= 2p`.
fn central_stencil(d: usize) -> Vec<(i32, f64)> {
    if d == 0 {
        return vec![(0, 1.0)];
    }
    let p = (d / 2 + 2) as i32;
    let offs: Vec<i32> = (-p..=p).collect();
    let s = offs.len();
    let mut a = Matrix::<f64>::zeros(s, s);
    for q in 0..s {
        for (j, &o) in offs.iter().enumerate() {
            a[(q, j)] = (o as f64).powi(q as i32);
        }
    }
    let mut rhs = vec![0.0; s];
    rhs[d] = factorial(d);
    let w = a.solve(&rhs).expect("Vandermonde on distinct nodes is invertible");
    offs.into_iter().zip(w).filter(|(_, w)| *w != 0.0).collect()
}

/// Taylor coefficients `D^n f(center) / n!` for `|n| <= k`, in
/// [`multi_indices`] order.
pub fn taylor_coeffs(f: &dyn Target, center: &[f64], k: usize, mode: DerivativeMode) -> Result<Vec<f64>, TaylorError> {
    match mode {
        DerivativeMode::Analytic => f.taylor(center, k).ok_or(TaylorError::OracleUnavailable),
        DerivativeMode::FiniteDifference { h } => {
            let stencils: Vec<Vec<(i32, f64)>> = (0..=k).map(central_stencil).collect();
            let mut cache = std::collections::HashMap::new();
            let mut x = center.to_vec();
            let out = multi_indices(center.len(), k)
                .into_iter()
                .map(|n| {
                    let mut acc = 0.0;
                    let mut pos = vec![0usize; n.len()];
                    'outer: loop {
                        let mut w = 1.0;
                        let mut key = Vec::with_capacity(n.len());
                        for (i, &ni) in n.iter().enumerate() {
                            let (o, wi) = stencils[ni as usize][pos[i]];
                            w *= wi;
                            key.push(o);
                            x[i] = center[i] + o as f64 * h;
                        }
                        let fx = *cache.entry(key).or_insert_with(|| f.eval(&x));
                        acc += w * fx;
                        for i in (0..n.len()).rev() {
                            pos[i] += 1;
                            if pos[i] < stencils[n[i] as usize].len() {
                                continue 'outer;
                            }
                            pos[i] = 0;
                        }
                        break;
                    }
                    let order: u32 = n.iter().sum();
                    let nfact: f64 = n.iter().map(|&v| factorial(v as usize)).product();
                    acc / h.powi(order as i32) / nfact
                })
                .collect();
            Ok(out)
        }
    }
}

fn pinned<T: Scalar>(name: &str, n_slots: usize, coef: Affine<T>, rhs: Affine<T>) -> NetNode<T> {
    let mut p = ParamProgram::new(1, n_slots);
    p.set_cost(0, Affine::constant(-T::one()));
    p.push_ineq(vec![coef.clone()], rhs.clone());
    p.push_ge(vec![coef], rhs);
    NetNode::new(name, p, Selector::identity(1))
}

/// Appends the nodes producing `prod_i (x_i - c_i)^(n_i)` and returns the
/// source holding it. Factors are taken left to right over coordinates;
/// every factor is guarded against `x_i = c_i`.
pub fn append_monomial<T: Scalar>(b: &mut NetworkBuilder<T>, center: &[T], n: &[u32]) -> Result<Source, NetError> {
    let factors: Vec<usize> = n.iter().enumerate().flat_map(|(i, &ni)| std::iter::repeat(i).take(ni as usize)).collect();
    let one = T::one();
    match factors.len() {
        0 => Ok(Source::Node(b.add_node(pinned("const", 0, Affine::constant(one), Affine::constant(one))))),
        1 => {
            let i = factors[0];
            let v = b.add_node(pinned("factor", 1, Affine::constant(one), Affine::slot(0, one, -center[i])));
            b.connect_component(Source::Input, i, v, 0)?;
            Ok(Source::Node(v))
        }
        _ => {
            let i0 = factors[0];
            let head = pinned("recip", 1, Affine::slot(0, one, -center[i0]), Affine::constant(one))
                .with_guard(Affine::slot(0, one, -center[i0]), format!("x{i0} at center"));
            let mut recip = b.add_node(head);
            b.connect_component(Source::Input, i0, recip, 0)?;
            let mut acc = recip;
            for (j, &i) in factors.iter().enumerate().skip(1) {
                if j > 1 {
                    recip = b.add_node(pinned("recip", 1, Affine::slot(0, one, T::zero()), Affine::constant(one)));
                    b.connect_component(Source::Node(acc), 0, recip, 0)?;
                }
                let div = pinned("mul", 2, Affine::slot(0, one, T::zero()), Affine::slot(1, one, -center[i]))
                    .with_guard(Affine::slot(1, one, -center[i]), format!("x{i} at center"));
                acc = b.add_node(div);
                b.connect_component(Source::Node(recip), 0, acc, 0)?;
                b.connect_component(Source::Input, i, acc, 1)?;
            }
            Ok(Source::Node(acc))
        }
    }
}

/// Network for `P_m(x) = prod_i (x_i - (2 m_i + 1) / (2N))^(n_i)`.
pub fn monomial_chain<T: Scalar>(m: &[usize], n: &[u32], grid: usize) -> Result<SolutionNetwork<T>, NetError> {
    if m.len() != n.len() || grid == 0 || m.iter().any(|&mi| mi >= grid) {
        return Err(NetError::InvalidEdge("cell index and multi-index must match the grid".into()));
    }
    let center: Vec<T> = cell_center(m, grid).into_iter().map(T::lit).collect();
    let mut b = NetworkBuilder::new(m.len(), 1);
    let src = append_monomial(&mut b, &center, n)?;
    b.readout_component(src, 0, 0, T::one())?;
    b.build()
}

/// Node ids belonging to one grid cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellNodes {
    pub cell: Vec<usize>,
    pub indicator: usize,
    pub gate: usize,
    pub monomials: Vec<usize>,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct TaylorNet<T> {
    pub network: SolutionNetwork<T>,
    pub spec: TaylorGridSpec,
    pub cells: Vec<CellNodes>,
}

fn next_cell(m: &mut [usize], grid: usize) -> bool {
    for v in m.iter_mut().rev() {
        *v += 1;
        if *v < grid {
            return true;
        }
        *v = 0;
    }
    false
}

/// Compiles `sum_m I_m(x) h_m(x)` where `h_m` is the degree-`k` Taylor
/// polynomial of the target at the center of cell `m`.
///
/// Each cell's gate node solves `(1 - I_m / 2) z = h_m`, so `z - h_m` equals
/// `I_m h_m` and the readout sums those differences.
pub fn build_taylor_net<T: Scalar>(f: &dyn Target, spec: &TaylorGridSpec) -> Result<TaylorNet<T>, TaylorError> {
    spec.validate()?;
    if f.dim() != spec.n_x {
        return Err(TaylorError::InvalidSpec(format!("target has dimension {}, spec {}", f.dim(), spec.n_x)));
    }
    let (nx, grid) = (spec.n_x, spec.grid);
    let idx = multi_indices(nx, spec.k);
    let scale = spec.derivative_bound;
    let mut b = NetworkBuilder::new(nx, 1);
    let mut cells = Vec::with_capacity(spec.cells());
    let mut m = vec![0usize; nx];
    let half = T::lit(0.5);
    loop {
        let center = cell_center(&m, grid);
        let coeffs: Vec<f64> = taylor_coeffs(f, &center, spec.k, spec.mode)?.into_iter().map(|c| c / scale).collect();
        let ct: Vec<T> = center.iter().map(|&c| T::lit(c)).collect();
        let mut ind_node = box_indicator_node(&m, grid)?;
        for (i, &mi) in m.iter().enumerate() {
            for r in [mi, mi + 1] {
                if (1..grid).contains(&r) {
                    ind_node = ind_node.with_guard(Affine::slot(i, T::one(), -grid_face::<T>(r, grid)), format!("x{i} on face {r}/{grid}"));
                }
            }
        }
        let ind = b.add_node(ind_node);
        b.connect_all(Source::Input, ind, 0)?;
        let mut monos = Vec::with_capacity(idx.len());
        for n in &idx {
            let Source::Node(v) = append_monomial(&mut b, &ct, n)? else { unreachable!() };
            monos.push(v);
        }
        let rhs = coeffs.iter().enumerate().fold(Affine::zero(), |acc, (j, &c)| {
            if c == 0.0 {
                acc
            } else {
                acc.plus(crate::net::Input::Slot(1 + j), T::lit(c))
            }
        });
        let gate = b.add_node(pinned("gate", 1 + idx.len(), Affine::slot(0, -half, T::one()), rhs));
        b.connect_component(Source::Node(ind), 0, gate, 0)?;
        for (j, &v) in monos.iter().enumerate() {
            b.connect_component(Source::Node(v), 0, gate, 1 + j)?;
        }
        b.readout(Source::Node(gate), Matrix::from_rows(&[vec![T::lit(scale)]]))?;
        for (j, &v) in monos.iter().enumerate() {
            if coeffs[j] != 0.0 {
                b.readout(Source::Node(v), Matrix::from_rows(&[vec![T::lit(-scale * coeffs[j])]]))?;
            }
        }
        cells.push(CellNodes { cell: m.clone(), indicator: ind, gate, monomials: monos, coeffs });
        if !next_cell(&mut m, grid) {
            break;
        }
    }
    Ok(TaylorNet { network: b.build()?, spec: spec.clone(), cells })
}

/// Evaluation points: `per_axis` per coordinate, either `linspace(0, 1)` or
/// strictly interior `(i + 1) / (per_axis + 1)`.
pub fn grid_points(n_x: usize, per_axis: usize, interior: bool) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..per_axis)
        .map(|i| {
            if interior {
                (i + 1) as f64 / (per_axis + 1) as f64
            } else if per_axis == 1 {
                0.5
            } else {
                i as f64 / (per_axis - 1) as f64
            }
        })
        .collect();
    let mut out = Vec::with_capacity(per_axis.pow(n_x as u32));
    let mut m = vec![0usize; n_x];
    loop {
        out.push(m.iter().map(|&i| axis[i]).collect());
        if !next_cell(&mut m, per_axis) {
            break;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridError {
    pub points: usize,
    pub sup: f64,
    pub mse: f64,
    pub nudged: usize,
}

impl<T: Scalar> TaylorNet<T> {
    /// Moves coordinates off shared cell faces and off monomial singular
    /// sets; returns the number of coordinates moved.
    pub fn nudge(&self, x: &mut [T]) -> usize {
        let grid = self.spec.grid;
        let band = T::tol(2e-9);
        let shift = band + band;
        let gt = T::from_usize(grid).expect("grid fits");
        let mut moved = 0;
        for xi in x.iter_mut() {
            let r = (*xi * gt).round().to_usize().unwrap_or(0);
            if (1..grid).contains(&r) && (*xi - grid_face::<T>(r, grid)).abs() <= band {
                *xi = grid_face::<T>(r, grid) + shift;
                moved += 1;
            }
            let m = (*xi * gt - T::lit(0.5)).round().to_usize().unwrap_or(0).min(grid - 1);
            let c = T::lit(cell_center(&[m], grid)[0]);
            if (*xi - c).abs() <= band {
                *xi = c + shift;
                moved += 1;
            }
        }
        moved
    }

    pub fn evaluate(&self, x: &[T]) -> Result<T, NetError> {
        self.evaluate_in(x, &mut Workspace::default()).map(|(v, _)| v)
    }

    /// Value and number of nudged coordinates.
    pub fn evaluate_in(&self, x: &[T], ws: &mut Workspace<T>) -> Result<(T, usize), NetError> {
        let mut xs = x.to_vec();
        let moved = self.nudge(&mut xs);
        Ok((self.network.evaluate_in(&xs, ws)?[0], moved))
    }

    /// Error against the target over [`grid_points`].
    pub fn grid_error(&self, f: &dyn Target, per_axis: usize, interior: bool) -> Result<GridError, NetError> {
        let mut ws = Workspace::default();
        let mut e = GridError { points: 0, sup: 0.0, mse: 0.0, nudged: 0 };
        for p in grid_points(self.spec.n_x, per_axis, interior) {
            let xt: Vec<T> = p.iter().map(|&v| T::lit(v)).collect();
            let (v, moved) = self.evaluate_in(&xt, &mut ws)?;
            let d = (v.to_f64_lossy() - f.eval(&p)).abs();
            e.sup = e.sup.max(d);
            e.mse += d * d;
            e.points += 1;
            e.nudged += moved;
        }
        e.mse /= e.points as f64;
        Ok(e)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorReport {
    pub spec: TaylorGridSpec,
    pub cells: usize,
    pub monomials: usize,
    pub depth: usize,
    pub depth_bound: usize,
    pub first_layer_constraints: usize,
    pub first_layer_variables: usize,
    pub formula_constraints: usize,
    pub formula_variables: usize,
    pub total_constraints: usize,
    pub total_variables: usize,
    pub nodes: usize,
    pub error_bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_error: Option<f64>,
}

pub fn report_complexity<T: Scalar>(net: &TaylorNet<T>) -> TaylorReport {
    let w = net.network.widths();
    let first = w.layers.first().copied();
    let (fc, fv) = net.spec.first_layer();
    TaylorReport {
        spec: net.spec.clone(),
        cells: net.spec.cells(),
        monomials: net.spec.monomials(),
        depth: w.depth,
        depth_bound: 2 * net.spec.k,
        first_layer_constraints: first.map_or(0, |l| l.constraints),
        first_layer_variables: first.map_or(0, |l| l.variables),
        formula_constraints: fc,
        formula_variables: fv,
        total_constraints: w.total_constraints,
        total_variables: w.total_variables,
        nodes: w.nodes,
        error_bound: net.spec.error_bound(),
        measured_error: None,
    }
}
