//! Explicit piecewise-affine solutions of parametric LPs and QPs: affine
//! laws per active set, critical regions, condition numbers and
//! covering-number bounds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::lp::{solve_lp, LinearProgram, LpError, Problem, QuadraticProgram};
use crate::target::binomial;

pub const MAX_M1: usize = 12;
pub const MAX_NZ: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpError {
    #[error("invalid parametric program: {0}")]
    InvalidSpec(String),
    #[error("desk scale exceeded: m1 = {m1}, n_z = {n_z} (limits {MAX_M1}, {MAX_NZ})")]
    ScaleExceeded { m1: usize, n_z: usize },
    #[error("active set {0:?} is rank deficient")]
    RankDeficient(Vec<usize>),
    #[error("no critical region contains the point")]
    NoRegion,
    #[error(transparent)]
    Solver(#[from] LpError),
}

/// `min (1/2 A0 z + U0x x + U0t theta + b0)^T z` subject to
/// `A1 z <= b1 + U1x x + U1t theta` and `A2 z = b2 + U2x x + U2t theta`.
/// `a0 = None` is the LP case, which additionally needs `m1 + m2 >= n_z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamQp {
    pub n_x: usize,
    pub n_theta: usize,
    pub n_z: usize,
    pub a0: Option<Matrix<f64>>,
    pub u0x: Matrix<f64>,
    pub u0t: Matrix<f64>,
    pub b0: Vec<f64>,
    pub a1: Matrix<f64>,
    pub b1: Vec<f64>,
    pub u1x: Matrix<f64>,
    pub u1t: Matrix<f64>,
    pub a2: Matrix<f64>,
    pub b2: Vec<f64>,
    pub u2x: Matrix<f64>,
    pub u2t: Matrix<f64>,
}

fn hstack(parts: &[&Matrix<f64>]) -> Matrix<f64> {
    let rows = parts[0].rows;
    let cols = parts.iter().map(|m| m.cols).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut off = 0;
    for m in parts {
        for i in 0..rows {
            for j in 0..m.cols {
                out[(i, off + j)] = m[(i, j)];
            }
        }
        off += m.cols;
    }
    out
}

fn column(v: &[f64]) -> Matrix<f64> {
    Matrix::from_rows_with_cols(&v.iter().map(|&x| vec![x]).collect::<Vec<_>>(), 1)
}

fn pinv(m: &Matrix<f64>) -> Matrix<f64> {
    if m.rows == 0 || m.cols == 0 {
        return Matrix::zeros(m.cols, m.rows);
    }
    m.pinv(1e-10)
}

fn rank(m: &Matrix<f64>) -> usize {
    if m.rows == 0 || m.cols == 0 {
        0
    } else {
        m.rank(1e-10)
    }
}

impl ParamQp {
    /// A problem with zero cost and no constraints.
    pub fn new(n_x: usize, n_theta: usize, n_z: usize) -> Self {
        ParamQp {
            n_x,
            n_theta,
            n_z,
            a0: None,
            u0x: Matrix::zeros(n_z, n_x),
            u0t: Matrix::zeros(n_z, n_theta),
            b0: vec![0.0; n_z],
            a1: Matrix::zeros(0, n_z),
            b1: Vec::new(),
            u1x: Matrix::zeros(0, n_x),
            u1t: Matrix::zeros(0, n_theta),
            a2: Matrix::zeros(0, n_z),
            b2: Vec::new(),
            u2x: Matrix::zeros(0, n_x),
            u2t: Matrix::zeros(0, n_theta),
        }
    }

    pub fn with_quadratic(mut self, a0: Matrix<f64>) -> Self {
        self.a0 = Some(a0);
        self
    }

    pub fn with_cost(mut self, u0x: Matrix<f64>, u0t: Matrix<f64>, b0: Vec<f64>) -> Self {
        (self.u0x, self.u0t, self.b0) = (u0x, u0t, b0);
        self
    }

    pub fn with_ineq(mut self, a1: Matrix<f64>, b1: Vec<f64>, u1x: Matrix<f64>, u1t: Matrix<f64>) -> Self {
        (self.a1, self.b1, self.u1x, self.u1t) = (a1, b1, u1x, u1t);
        self
    }

    pub fn with_eq(mut self, a2: Matrix<f64>, b2: Vec<f64>, u2x: Matrix<f64>, u2t: Matrix<f64>) -> Self {
        (self.a2, self.b2, self.u2x, self.u2t) = (a2, b2, u2x, u2t);
        self
    }

    pub fn m1(&self) -> usize {
        self.a1.rows
    }

    pub fn m2(&self) -> usize {
        self.a2.rows
    }

    pub fn is_qp(&self) -> bool {
        self.a0.is_some()
    }

    pub fn validate(&self) -> Result<(), MpError> {
        let (nx, nt, nz, m1, m2) = (self.n_x, self.n_theta, self.n_z, self.m1(), self.m2());
        let shape = |m: &Matrix<f64>, r: usize, c: usize, name: &str| {
            if (m.rows, m.cols) == (r, c) || (r == 0 && m.rows == 0) {
                Ok(())
            } else {
                Err(MpError::InvalidSpec(format!("{name} is {}x{}, expected {r}x{c}", m.rows, m.cols)))
            }
        };
        shape(&self.u0x, nz, nx, "U0x")?;
        shape(&self.u0t, nz, nt, "U0t")?;
        shape(&self.a1, m1, nz, "A1")?;
        shape(&self.u1x, m1, nx, "U1x")?;
        shape(&self.u1t, m1, nt, "U1t")?;
        shape(&self.a2, m2, nz, "A2")?;
        shape(&self.u2x, m2, nx, "U2x")?;
        shape(&self.u2t, m2, nt, "U2t")?;
        if self.b0.len() != nz || self.b1.len() != m1 || self.b2.len() != m2 {
            return Err(MpError::InvalidSpec("offset vector lengths do not match".into()));
        }
        if let Some(a0) = &self.a0 {
            shape(a0, nz, nz, "A0")?;
            if !a0.is_symmetric(1e-12) {
                return Err(MpError::InvalidSpec("A0 is not symmetric".into()));
            }
            if crate::lp::min_eigenvalue(a0)? <= 1e-10 {
                return Err(MpError::InvalidSpec("A0 is not positive definite".into()));
            }
        }
        if self.a0.is_none() && m1 + m2 < nz {
            return Err(MpError::InvalidSpec(format!("need m1 + m2 >= n_z, got {m1} + {m2} < {nz}")));
        }
        Ok(())
    }

    fn check_scale(&self) -> Result<(), MpError> {
        if self.m1() > MAX_M1 || self.n_z > MAX_NZ {
            return Err(MpError::ScaleExceeded { m1: self.m1(), n_z: self.n_z });
        }
        Ok(())
    }

    /// The concrete program at `(x, theta)`.
    pub fn instantiate(&self, x: &[f64], theta: &[f64]) -> Problem<f64> {
        let aff = |u: &Matrix<f64>, v: &Matrix<f64>, b: &[f64]| -> Vec<f64> {
            let (ux, vt) = (u.matvec(x), v.matvec(theta));
            (0..b.len()).map(|i| b[i] + ux.get(i).copied().unwrap_or(0.0) + vt.get(i).copied().unwrap_or(0.0)).collect()
        };
        let lp = LinearProgram::new(self.n_z)
            .with_cost(aff(&self.u0x, &self.u0t, &self.b0))
            .with_ineq(self.a1.clone(), aff(&self.u1x, &self.u1t, &self.b1))
            .with_eq(self.a2.clone(), aff(&self.u2x, &self.u2t, &self.b2));
        match &self.a0 {
            Some(a0) => Problem::Qp(QuadraticProgram::new(lp, a0.clone())),
            None => Problem::Lp(lp),
        }
    }

    fn param_maps(&self) -> (Matrix<f64>, Matrix<f64>, Matrix<f64>) {
        let c = hstack(&[&self.u0x, &self.u0t, &column(&self.b0)]);
        let h1 = if self.m1() == 0 {
            Matrix::zeros(0, self.n_x + self.n_theta + 1)
        } else {
            hstack(&[&self.u1x, &self.u1t, &column(&self.b1)])
        };
        let h2 = if self.m2() == 0 {
            Matrix::zeros(0, self.n_x + self.n_theta + 1)
        } else {
            hstack(&[&self.u2x, &self.u2t, &column(&self.b2)])
        };
        (c, h1, h2)
    }
}

/// Affine law of one active set, over the stacked parameter `p = [x; theta; 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitLaw {
    pub active: Vec<usize>,
    /// `n_z x (n_x + n_theta + 1)`.
    pub primal: Matrix<f64>,
    /// Multipliers of the active inequalities, `|active| x (n_x + n_theta + 1)`.
    pub duals: Matrix<f64>,
    /// Multipliers of the equalities, `m2 x (n_x + n_theta + 1)`.
    pub eq_duals: Matrix<f64>,
    pub rank_deficient: bool,
    n_x: usize,
    n_theta: usize,
}

impl ExplicitLaw {
    /// The slope `A~(iota)` with respect to `x`.
    pub fn slope(&self) -> Matrix<f64> {
        let mut s = Matrix::zeros(self.primal.rows, self.n_x);
        for i in 0..s.rows {
            for j in 0..self.n_x {
                s[(i, j)] = self.primal[(i, j)];
            }
        }
        s
    }

    /// `b~(theta)` as `(theta coefficients, constant)`.
    pub fn bias_coefficients(&self) -> (Matrix<f64>, Vec<f64>) {
        let mut t = Matrix::zeros(self.primal.rows, self.n_theta);
        for i in 0..t.rows {
            for j in 0..self.n_theta {
                t[(i, j)] = self.primal[(i, self.n_x + j)];
            }
        }
        let c = (0..self.primal.rows).map(|i| self.primal[(i, self.n_x + self.n_theta)]).collect();
        (t, c)
    }

    pub fn bias(&self, theta: &[f64]) -> Vec<f64> {
        let p: Vec<f64> = vec![0.0; self.n_x].into_iter().chain(theta.iter().copied()).chain([1.0]).collect();
        self.primal.matvec(&p)
    }

    pub fn eval(&self, x: &[f64], theta: &[f64]) -> Vec<f64> {
        self.primal.matvec(&stack(x, theta))
    }

    pub fn eval_duals(&self, x: &[f64], theta: &[f64]) -> Vec<f64> {
        self.duals.matvec(&stack(x, theta))
    }

    /// Full multiplier vector in solver layout: one entry per inequality
    /// (zero when inactive) followed by the equalities.
    pub fn solver_duals(&self, m1: usize, x: &[f64], theta: &[f64]) -> Vec<f64> {
        let p = stack(x, theta);
        let mut out = vec![0.0; m1];
        for (&i, v) in self.active.iter().zip(self.duals.matvec(&p)) {
            out[i] = v;
        }
        out.extend(self.eq_duals.matvec(&p));
        out
    }
}

fn stack(x: &[f64], theta: &[f64]) -> Vec<f64> {
    x.iter().chain(theta).copied().chain([1.0]).collect()
}

/// Affine primal and dual laws when the inequalities in `active` and all
/// equalities hold with equality.
pub fn explicit_law(spec: &ParamQp, active: &[usize]) -> Result<ExplicitLaw, MpError> {
    if active.iter().any(|&i| i >= spec.m1()) || active.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MpError::InvalidSpec(format!("active set {active:?} must be ascending indices below m1")));
    }
    let (c, h1, h2) = spec.param_maps();
    let g = spec.a1.select_rows(active).vstack(&spec.a2);
    let h = h1.select_rows(active).vstack(&h2);
    let r = g.rows;
    let k = active.len();
    let (primal, nu, deficient) = match &spec.a0 {
        Some(a0) => {
            let a0inv = a0.inverse().ok_or_else(|| MpError::InvalidSpec("A0 is singular".into()))?;
            if r == 0 {
                (a0inv.matmul(&c).scale(-1.0), Matrix::zeros(0, c.cols), false)
            } else {
                let gai = g.matmul(&a0inv);
                let s = gai.matmul(&g.transpose());
                let deficient = rank(&s) < r;
                let sinv = if deficient { pinv(&s) } else { s.inverse().unwrap_or_else(|| pinv(&s)) };
                let nu = sinv.matmul(&gai.matmul(&c).add(&h)).scale(-1.0);
                let z = a0inv.matmul(&c.add(&g.transpose().matmul(&nu))).scale(-1.0);
                (z, nu, deficient)
            }
        }
        None => {
            let square = r == spec.n_z && rank(&g) == spec.n_z;
            if square {
                let ginv = g.inverse().ok_or_else(|| MpError::RankDeficient(active.to_vec()))?;
                (ginv.matmul(&h), ginv.transpose().matmul(&c).scale(-1.0), false)
            } else {
                (pinv(&g).matmul(&h), pinv(&g.transpose()).matmul(&c).scale(-1.0), true)
            }
        }
    };
    let duals = nu.select_rows(&(0..k).collect::<Vec<_>>());
    let eq_duals = nu.select_rows(&(k..r).collect::<Vec<_>>());
    Ok(ExplicitLaw { active: active.to_vec(), primal, duals, eq_duals, rank_deficient: deficient, n_x: spec.n_x, n_theta: spec.n_theta })
}

/// `{x : a . x <= b}` rows.
pub type Halfspaces = Vec<(Vec<f64>, f64)>;

fn contains(h: &Halfspaces, x: &[f64]) -> bool {
    h.iter().all(|(a, b)| crate::linalg::dot(a, x) <= b + 1e-9 * (1.0 + b.abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalRegion {
    pub active: Vec<usize>,
    pub law: ExplicitLaw,
    /// Slope and offset of the law at the enumeration's `theta`.
    pub slope: Matrix<f64>,
    pub offset: Vec<f64>,
    pub halfspaces: Halfspaces,
    pub center: Vec<f64>,
    pub radius: f64,
    /// Active sets with an identical law, merged into this region.
    pub merged: Vec<Vec<usize>>,
    #[serde(default)]
    pub extra_pieces: Vec<Halfspaces>,
}

impl CriticalRegion {
    pub fn contains(&self, x: &[f64]) -> bool {
        contains(&self.halfspaces, x) || self.extra_pieces.iter().any(|h| contains(h, x))
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut z = self.slope.matvec(x);
        for (zi, o) in z.iter_mut().zip(&self.offset) {
            *zi += o;
        }
        z
    }

    /// Points inside the inscribed ball around the Chebyshev center.
    pub fn interior_samples(&self, count: usize, rng: &mut impl rand::Rng) -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| {
                let dir: Vec<f64> = (0..self.center.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let n = crate::linalg::norm2(&dir).max(1e-300);
                let r = 0.99 * self.radius * rng.gen::<f64>();
                self.center.iter().zip(&dir).map(|(c, d)| c + r * d / n).collect()
            })
            .collect()
    }
}

/// One row of the per-subset summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetSummary {
    pub active: Vec<usize>,
    pub spectral_norm: f64,
    pub retained: bool,
    pub rank_deficient: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub theta: Vec<f64>,
    pub x_lo: Vec<f64>,
    pub x_hi: Vec<f64>,
    pub regions: Vec<CriticalRegion>,
    pub examined: Vec<SubsetSummary>,
}

impl Enumeration {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("regions serialize")
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("active_set,size,spectral_norm,retained,rank_deficient\n");
        for e in &self.examined {
            let set: Vec<String> = e.active.iter().map(|i| i.to_string()).collect();
            s.push_str(&format!("{},{},{},{},{}\n", set.join(" "), e.active.len(), e.spectral_norm, e.retained, e.rank_deficient));
        }
        s
    }
}

/// Subsets of `0..m` with at most `max` elements, by size then
/// lexicographically.
pub fn active_sets(m: usize, max: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 0..=max.min(m) {
        rec(0, m, size, &mut Vec::new(), &mut out);
    }
    out
}

fn max_active(spec: &ParamQp) -> Option<usize> {
    spec.n_z.checked_sub(spec.m2())
}

/// Largest inscribed ball of the polyhedron; `None` when empty.
fn chebyshev(h: &Halfspaces, n: usize) -> Result<Option<(Vec<f64>, f64)>, MpError> {
    let mut rows = Vec::with_capacity(h.len());
    let mut rhs = Vec::with_capacity(h.len());
    for (a, b) in h {
        let mut row = a.clone();
        row.push(crate::linalg::norm2(a));
        rows.push(row);
        rhs.push(*b);
    }
    let mut cost = vec![0.0; n + 1];
    cost[n] = -1.0;
    let mut upper = vec![f64::INFINITY; n + 1];
    upper[n] = 1.0;
    let lp = LinearProgram::new(n + 1)
        .with_cost(cost)
        .with_ineq(Matrix::from_rows_with_cols(&rows, n + 1), rhs)
        .with_bounds(None, Some(upper));
    let r = solve_lp(&lp)?;
    if !r.is_optimal() {
        return Ok(None);
    }
    Ok(Some((r.primal[..n].to_vec(), r.primal[n])))
}

/// Region of `law` inside the box at fixed `theta`, or `None` when a
/// constant row is violated.
fn region_halfspaces(spec: &ParamQp, law: &ExplicitLaw, theta: &[f64], lo: &[f64], hi: &[f64]) -> Option<Halfspaces> {
    let nx = spec.n_x;
    let (_, h1, _) = spec.param_maps();
    let mut out: Halfspaces = Vec::new();
    let mut push = |row: Vec<f64>| -> bool {
        let a = row[..nx].to_vec();
        let b = -(crate::linalg::dot(&row[nx..nx + spec.n_theta], theta) + row[nx + spec.n_theta]);
        let scale = 1.0 + crate::linalg::norm_inf(&row);
        if crate::linalg::norm_inf(&a) <= 1e-12 * scale {
            return b >= -1e-9 * scale;
        }
        out.push((a, b));
        true
    };
    for j in 0..spec.m1() {
        if law.active.contains(&j) {
            continue;
        }
        let a1z = Matrix::from_rows(&[spec.a1.row(j).to_vec()]).matmul(&law.primal);
        let row: Vec<f64> = (0..a1z.cols).map(|c| a1z[(0, c)] - h1[(j, c)]).collect();
        if !push(row) {
            return None;
        }
    }
    for i in 0..law.active.len() {
        let row: Vec<f64> = law.duals.row(i).iter().map(|v| -v).collect();
        if !push(row) {
            return None;
        }
    }
    for k in 0..nx {
        let mut e = vec![0.0; nx];
        e[k] = 1.0;
        out.push((e.clone(), hi[k]));
        e[k] = -1.0;
        out.push((e, -lo[k]));
    }
    Some(out)
}

fn same_law(a: &Matrix<f64>, b: &Matrix<f64>) -> bool {
    a.data.iter().zip(&b.data).all(|(x, y)| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())))
}

/// Critical regions over the box `[x_lo, x_hi]` at fixed `theta`.
///
/// A region is kept when its inscribed ball has radius at least `1e-7`;
/// rank-deficient active sets are examined but never kept.
pub fn enumerate_regions(spec: &ParamQp, theta: &[f64], x_lo: &[f64], x_hi: &[f64]) -> Result<Enumeration, MpError> {
    spec.validate()?;
    spec.check_scale()?;
    if theta.len() != spec.n_theta || x_lo.len() != spec.n_x || x_hi.len() != spec.n_x {
        return Err(MpError::InvalidSpec("theta or box dimension mismatch".into()));
    }
    let mut regions: Vec<CriticalRegion> = Vec::new();
    let mut examined = Vec::new();
    let Some(max) = max_active(spec) else {
        return Ok(Enumeration { theta: theta.to_vec(), x_lo: x_lo.to_vec(), x_hi: x_hi.to_vec(), regions, examined });
    };
    for active in active_sets(spec.m1(), max) {
        let law = explicit_law(spec, &active)?;
        let mut summary =
            SubsetSummary { active: active.clone(), spectral_norm: law.slope().spectral_norm(), retained: false, rank_deficient: law.rank_deficient };
        if !law.rank_deficient {
            if let Some(h) = region_halfspaces(spec, &law, theta, x_lo, x_hi) {
                if let Some((center, radius)) = chebyshev(&h, spec.n_x)? {
                    let duals_ok = law.eval_duals(&center, theta).iter().all(|&l| l >= -1e-8);
                    if radius >= 1e-7 && duals_ok {
                        summary.retained = true;
                        let p0 = stack(&vec![0.0; spec.n_x], theta);
                        let offset = law.primal.matvec(&p0);
                        let slope = law.slope();
                        let dup = regions.iter_mut().find(|r| same_law(&r.slope, &slope) && r.offset.iter().zip(&offset).all(|(a, b)| (a - b).abs() <= 1e-9 * (1.0 + a.abs())));
                        match dup {
                            Some(r) => {
                                r.merged.push(active.clone());
                                r.extra_pieces.push(h);
                            }
                            None => regions.push(CriticalRegion {
                                active: active.clone(),
                                law,
                                slope,
                                offset,
                                halfspaces: h,
                                center,
                                radius,
                                merged: Vec::new(),
                                extra_pieces: Vec::new(),
                            }),
                        }
                    }
                }
            }
        }
        examined.push(summary);
    }
    Ok(Enumeration { theta: theta.to_vec(), x_lo: x_lo.to_vec(), x_hi: x_hi.to_vec(), regions, examined })
}

/// Law of the first region containing `x`.
pub fn explicit_eval(regions: &[CriticalRegion], x: &[f64]) -> Result<Vec<f64>, MpError> {
    regions.iter().find(|r| r.contains(x)).map(|r| r.eval(x)).ok_or(MpError::NoRegion)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaReport {
    pub kappa: f64,
    pub argmax: Vec<usize>,
    pub sets: Vec<SubsetSummary>,
}

/// `max ||A~(iota)||_2` over `|iota| <= n_z - m2`, pseudo-inverses standing
/// in for singular stacks.
pub fn kappa(spec: &ParamQp) -> Result<KappaReport, MpError> {
    spec.validate()?;
    spec.check_scale()?;
    let mut rep = KappaReport { kappa: 0.0, argmax: Vec::new(), sets: Vec::new() };
    let Some(max) = max_active(spec) else {
        return Ok(rep);
    };
    for active in active_sets(spec.m1(), max) {
        let law = explicit_law(spec, &active)?;
        let norm = law.slope().spectral_norm();
        if norm > rep.kappa {
            rep.kappa = norm;
            rep.argmax = active.clone();
        }
        rep.sets.push(SubsetSummary { active, spectral_norm: norm, retained: false, rank_deficient: law.rank_deficient });
    }
    Ok(rep)
}

/// `sum_{0 <= i <= n_z - m2} C(m1, i)`.
pub fn count_regions(m1: usize, n_z: usize, m2: usize) -> u64 {
    match n_z.checked_sub(m2) {
        None => 0,
        Some(top) => (0..=top.min(m1)).map(|i| binomial(m1, i) as u64).sum(),
    }
}

/// `kappa^2 / eps^2 * count_regions`, without the absorbed constant.
pub fn covering_bound_pwa(eps: f64, kappa: f64, m1: usize, n_z: usize, m2: usize) -> f64 {
    (kappa / eps).powi(2) * count_regions(m1, n_z, m2) as f64
}

/// `n (1/eps)^(1/k) + k^n_x ln(1/eps)`, without the absorbed constant.
pub fn covering_bound_smooth(eps: f64, k: usize, n_x: usize, n: usize) -> f64 {
    n as f64 * (1.0 / eps).powf(1.0 / k as f64) + (k as f64).powi(n_x as i32) * (1.0 / eps).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eye(n: usize) -> Matrix<f64> {
        Matrix::identity(n)
    }

    #[test]
    fn lp_identity_law() {
        let spec = ParamQp::new(2, 0, 2).with_ineq(eye(2), vec![0.0; 2], eye(2), Matrix::zeros(2, 0));
        let law = explicit_law(&spec, &[0, 1]).unwrap();
        assert_eq!(law.slope(), eye(2));
        assert!(!law.rank_deficient);
    }

    #[test]
    fn qp_unconstrained_law() {
        let a0 = Matrix::from_f64_rows(&[&[2.0, 0.0], &[0.0, 4.0]]);
        let u0x = Matrix::from_f64_rows(&[&[1.0], &[2.0]]);
        let spec = ParamQp::new(1, 0, 2).with_quadratic(a0).with_cost(u0x, Matrix::zeros(2, 0), vec![0.0; 2]).with_ineq(
            Matrix::from_f64_rows(&[&[1.0, 0.0], &[0.0, 1.0]]),
            vec![1.0, 1.0],
            Matrix::zeros(2, 1),
            Matrix::zeros(2, 0),
        );
        let law = explicit_law(&spec, &[]).unwrap();
        assert_eq!(law.slope(), Matrix::from_f64_rows(&[&[-0.5], &[-0.5]]));
    }

    #[test]
    fn counts_and_bounds() {
        assert_eq!(count_regions(3, 2, 0), 7);
        assert_eq!(count_regions(2, 5, 0), 4);
        assert_eq!(count_regions(0, 3, 0), 1);
        assert!((covering_bound_pwa(0.1, 1.0, 3, 2, 0) - 700.0).abs() < 1e-9);
        assert_eq!(covering_bound_pwa(0.1, 0.0, 3, 2, 0), 0.0);
        assert!((covering_bound_smooth(0.01, 2, 2, 0) - 4.0 * 100f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn subsets_in_order() {
        assert_eq!(active_sets(3, 2), vec![vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]]);
    }
}
