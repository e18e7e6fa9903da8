//! Max-affine approximation of smooth functions through a quadratic DC
//! split and tangent planes at farthest-point anchor nets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gadgets::{dc_counts, dc_difference_net, DcCounts, MaxAffineFunction, MaxAffinePair};
use crate::net::{NetError, SolutionNetwork};
use crate::scalar::{robust_ceil, Scalar};
use crate::target::Target;

pub const DEFAULT_PLANE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DcError {
    #[error("split is not convex with rho = {rho}: midpoint excess {excess:e}")]
    CurvatureTooSmall { rho: f64, excess: f64 },
    #[error("anchor budget of {anchors} reached at cover radius {radius} (target {target})")]
    BudgetExhausted { anchors: usize, radius: f64, target: f64 },
    #[error("plane budget {planes} exceeds the cap of {cap}")]
    ExceedsCap { planes: u64, cap: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn unit(n_x: usize) -> Self {
        Domain { lo: vec![0.0; n_x], hi: vec![1.0; n_x] }
    }

    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, DcError> {
        if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(DcError::InvalidInput("box needs lo < hi in every coordinate".into()));
        }
        Ok(Domain { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn diameter(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }

    /// Tensor grid with `per_axis` points per coordinate, faces included,
    /// last coordinate fastest.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let axes: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..per_axis)
                    .map(|j| {
                        if per_axis == 1 {
                            0.5 * (self.lo[i] + self.hi[i])
                        } else {
                            self.lo[i] + (self.hi[i] - self.lo[i]) * (j as f64 / (per_axis - 1) as f64)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut out = Vec::with_capacity(per_axis.pow(n as u32));
        let mut idx = vec![0usize; n];
        loop {
            out.push((0..n).map(|i| axes[i][idx[i]]).collect());
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < per_axis {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(&a, &b)| rng.gen_range(a..=b)).collect()
    }
}

/// Convex function with a fixed subgradient selection.
pub trait ConvexOracle {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;
}

fn gradient(f: &dyn Target, x: &[f64]) -> Vec<f64> {
    if let Some(c) = f.taylor(x, 1) {
        return c[1..=x.len()].to_vec();
    }
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = 1e-6 * x[i].abs().max(1.0);
            y[i] = x[i] + h;
            let fp = f.eval(&y);
            y[i] = x[i] - h;
            let fm = f.eval(&y);
            y[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// `f = phi1 - phi2` with `phi2 = rho/2 ||x - lo||^2` and `phi1 = f + phi2`,
/// where `lo` is the lower corner of the domain.
pub struct DcDecomposition<'a> {
    pub f: &'a dyn Target,
    pub rho: f64,
    pub domain: Domain,
}

/// One half of a [`DcDecomposition`].
pub struct SplitPart<'a, 'b> {
    pub dc: &'b DcDecomposition<'a>,
    pub first: bool,
}

impl<'a> DcDecomposition<'a> {
    fn quad(&self, x: &[f64]) -> f64 {
        0.5 * self.rho * x.iter().zip(&self.domain.lo).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
    }

    pub fn phi1(&self, x: &[f64]) -> f64 {
        self.f.eval(x) + self.quad(x)
    }

    pub fn phi2(&self, x: &[f64]) -> f64 {
        self.quad(x)
    }

    pub fn part(&self, first: bool) -> SplitPart<'a, '_> {
        SplitPart { dc: self, first }
    }
}

impl ConvexOracle for SplitPart<'_, '_> {
    fn dim(&self) -> usize {
        self.dc.domain.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        if self.first {
            self.dc.phi1(x)
        } else {
            self.dc.phi2(x)
        }
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let q = x.iter().zip(&self.dc.domain.lo).map(|(a, b)| self.dc.rho * (a - b));
        if self.first {
            gradient(self.dc.f, x).into_iter().zip(q).map(|(g, q)| g + q).collect()
        } else {
            q.collect()
        }
    }
}

/// Largest midpoint excess `phi(mid) - (phi(a) + phi(b)) / 2` over random
/// segments of log-uniform length, relative to the values involved.
pub fn convexity_excess(phi: &dyn ConvexOracle, domain: &Domain, segments: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diam = domain.diameter();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..segments {
        let a = domain.sample(&mut rng);
        let len = diam * 10f64.powf(rng.gen_range(-3.0..0.0));
        let dir: Vec<f64> = (0..a.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(1e-300);
        let b: Vec<f64> = a
            .iter()
            .zip(&dir)
            .enumerate()
            .map(|(i, (&ai, &di))| (ai + len * di / norm).clamp(domain.lo[i], domain.hi[i]))
            .collect();
        let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let (fa, fb, fm) = (phi.value(&a), phi.value(&b), phi.value(&m));
        let scale = 1.0 + fa.abs() + fb.abs();
        worst = worst.max((fm - 0.5 * (fa + fb)) / scale);
    }
    worst
}

/// Splits `f` and checks both halves for convexity on 10^3 segments each.
pub fn dc_split<'a>(f: &'a dyn Target, rho: f64, domain: Domain) -> Result<DcDecomposition<'a>, DcError> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(DcError::InvalidInput(format!("rho must be finite and non-negative, got {rho}")));
    }
    if f.dim() != domain.dim() {
        return Err(DcError::InvalidInput("target and domain dimensions differ".into()));
    }
    let dc = DcDecomposition { f, rho, domain };
    let excess = convexity_excess(&dc.part(true), &dc.domain, 1000, 17).max(convexity_excess(&dc.part(false), &dc.domain, 1000, 18));
    if excess > 1e-12 {
        return Err(DcError::CurvatureTooSmall { rho, excess });
    }
    Ok(dc)
}

/// `1.5 max ||H f||_inf` over a `20^n_x` probe grid, from central second
/// differences. Estimates below `1e-6` are treated as zero curvature.
pub fn estimate_rho(f: &dyn Target, domain: &Domain) -> f64 {
    let n = domain.dim();
    let probes: Vec<Vec<f64>> = Domain::unit(n)
        .grid(20)
        .into_iter()
        .map(|u| u.iter().enumerate().map(|(i, &v)| domain.lo[i] + (domain.hi[i] - domain.lo[i]) * (0.025 + 0.95 * v)).collect())
        .collect();
    let h: Vec<f64> = (0..n).map(|i| 1e-4 * (domain.hi[i] - domain.lo[i])).collect();
    let mut worst: f64 = 0.0;
    let mut y = vec![0.0; n];
    for x in &probes {
        let f0 = f.eval(x);
        let mut at = |d: &[(usize, f64)]| {
            y.copy_from_slice(x);
            for &(i, s) in d {
                y[i] += s * h[i];
            }
            f.eval(&y)
        };
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                let hij = if i == j {
                    (at(&[(i, 1.0)]) - 2.0 * f0 + at(&[(i, -1.0)])) / (h[i] * h[i])
                } else {
                    (at(&[(i, 1.0), (j, 1.0)]) - at(&[(i, 1.0), (j, -1.0)]) - at(&[(i, -1.0), (j, 1.0)]) + at(&[(i, -1.0), (j, -1.0)]))
                        / (4.0 * h[i] * h[j])
                };
                row += hij.abs();
            }
            worst = worst.max(row);
        }
    }
    let rho = 1.5 * worst;
    if rho < 1e-6 {
        0.0
    } else {
        rho
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneBudget {
    /// `(eps / (144 n_x L))^(-n_x / 2)` before rounding.
    pub raw: f64,
    pub planes: u64,
    /// `1 / (2L)`.
    pub t: f64,
}

pub fn plane_budget(n_x: usize, l: f64, eps: f64) -> PlaneBudget {
    let raw = (eps / (144.0 * n_x as f64 * l)).powf(-(n_x as f64) / 2.0);
    let planes = robust_ceil(raw).clamp(1.0, u64::MAX as f64) as u64;
    PlaneBudget { raw, planes, t: 1.0 / (2.0 * l) }
}

/// Anchors selected in image space `nu(x) = x + t grad phi(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnchorNet {
    pub t: f64,
    pub anchors: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub subgradients: Vec<Vec<f64>>,
    /// Achieved cover radius of the image sample, plus the sample fill.
    pub radius: f64,
    pub target: f64,
    /// Half-diagonal of the image of one sample cell, already included in
    /// `radius` and subtracted from the greedy target.
    pub fill: f64,
}

impl AnchorNet {
    pub fn image(&self, k: usize) -> Vec<f64> {
        self.anchors[k].iter().zip(&self.subgradients[k]).map(|(x, g)| x + self.t * g).collect()
    }

    pub fn tangents(&self) -> MaxAffineFunction<f64> {
        let mut planes: Vec<(Vec<f64>, f64)> = Vec::with_capacity(self.anchors.len());
        for ((x, v), g) in self.anchors.iter().zip(&self.values).zip(&self.subgradients) {
            let q = v - crate::linalg::dot(g, x);
            let p = g.clone();
            let dup = planes.iter().any(|(pp, qq)| {
                let s = 1e-13 * (1.0 + q.abs() + crate::linalg::norm_inf(&p));
                (qq - q).abs() <= s && pp.iter().zip(&p).all(|(a, b)| (a - b).abs() <= s)
            });
            if !dup {
                planes.push((p, q));
            }
        }
        MaxAffineFunction { planes }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetOptions {
    pub samples_per_axis: usize,
    pub budget: usize,
}

impl NetOptions {
    pub fn for_dim(n_x: usize) -> Self {
        let samples_per_axis = match n_x {
            1 => 4001,
            2 => 201,
            3 => 41,
            _ => 15,
        };
        NetOptions { samples_per_axis, budget: usize::MAX }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Farthest-point greedy from sample 0; stops once every image is within
/// `target` of a chosen one or `budget` anchors are taken. Returns the
/// chosen indices and the achieved radius.
fn greedy(images: &[Vec<f64>], target: f64, budget: usize) -> (Vec<usize>, f64) {
    let mut chosen = vec![0usize];
    let mut d = vec![f64::INFINITY; images.len()];
    loop {
        let last = &images[*chosen.last().expect("non-empty")];
        for (di, im) in d.iter_mut().zip(images) {
            *di = di.min(dist2(im, last));
        }
        let max = d.iter().cloned().fold(0.0, f64::max);
        let radius = max.sqrt();
        if radius <= target || chosen.len() >= budget {
            return (chosen, radius);
        }
        let tie = max * (1.0 - 1e-12);
        let next = d.iter().position(|&v| v >= tie).expect("max exists");
        chosen.push(next);
    }
}

fn sample_fill(images: &[Vec<f64>], per_axis: usize, n: usize) -> f64 {
    if per_axis < 2 {
        return f64::INFINITY;
    }
    let mut stride = 1;
    let mut axis_max = vec![0.0f64; n];
    for i in (0..n).rev() {
        for (p, im) in images.iter().enumerate() {
            if (p / stride) % per_axis + 1 < per_axis {
                axis_max[i] = axis_max[i].max(dist2(im, &images[p + stride]));
            }
        }
        stride *= per_axis;
    }
    0.5 * axis_max.iter().sum::<f64>().sqrt()
}

/// `sqrt(eps)`-net of the image set of `phi` over the domain.
pub fn anchor_net(phi: &dyn ConvexOracle, domain: &Domain, t: f64, eps: f64, opts: NetOptions) -> Result<AnchorNet, DcError> {
    if !(t > 0.0) || !(eps > 0.0) {
        return Err(DcError::InvalidInput("t and eps must be positive".into()));
    }
    let xs = domain.grid(opts.samples_per_axis);
    let grads: Vec<Vec<f64>> = xs.iter().map(|x| phi.subgradient(x)).collect();
    let images: Vec<Vec<f64>> = xs.iter().zip(&grads).map(|(x, g)| x.iter().zip(g).map(|(a, b)| a + t * b).collect()).collect();
    let fill = sample_fill(&images, opts.samples_per_axis, domain.dim());
    let target = eps.sqrt();
    if fill >= target {
        return Err(DcError::InvalidInput(format!("sample fill {fill} is not below the cover radius {target}")));
    }
    let (idx, r) = greedy(&images, target - fill, opts.budget.max(1));
    let radius = r + fill;
    if radius > target {
        return Err(DcError::BudgetExhausted { anchors: idx.len(), radius, target });
    }
    Ok(build_net(phi, &xs, &grads, &idx, t, radius, target, fill))
}

#[allow(clippy::too_many_arguments)]
fn build_net(phi: &dyn ConvexOracle, xs: &[Vec<f64>], grads: &[Vec<f64>], idx: &[usize], t: f64, radius: f64, target: f64, fill: f64) -> AnchorNet {
    AnchorNet {
        t,
        anchors: idx.iter().map(|&i| xs[i].clone()).collect(),
        values: idx.iter().map(|&i| phi.value(&xs[i])).collect(),
        subgradients: idx.iter().map(|&i| grads[i].clone()).collect(),
        radius,
        target,
        fill,
    }
}

/// Exactly `min(budget, samples)` greedy anchors, with no radius target.
pub fn anchor_net_with_budget(phi: &dyn ConvexOracle, domain: &Domain, t: f64, budget: usize, opts: NetOptions) -> AnchorNet {
    let xs = domain.grid(opts.samples_per_axis);
    let grads: Vec<Vec<f64>> = xs.iter().map(|x| phi.subgradient(x)).collect();
    let images: Vec<Vec<f64>> = xs.iter().zip(&grads).map(|(x, g)| x.iter().zip(g).map(|(a, b)| a + t * b).collect()).collect();
    let fill = sample_fill(&images, opts.samples_per_axis, domain.dim());
    let (idx, r) = greedy(&images, 0.0, budget.max(1));
    build_net(phi, &xs, &grads, &idx, t, r + fill, 0.0, fill)
}

/// Exact maxima over a tensor grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub per_axis: usize,
    pub points: usize,
    /// `max |f - (h1 - h2)|`.
    pub sup_error: f64,
    /// `max (phi1 - h1) + (phi2 - h2)`, an upper bound on `sup_error`.
    pub gap_bound: f64,
    /// `max h_i - phi_i`; tangent planes keep this at rounding level.
    pub tangent_violation: f64,
}

pub fn certify(dc: &DcDecomposition, pair: &MaxAffinePair<f64>, per_axis: usize) -> Certificate {
    let pts = dc.domain.grid(per_axis);
    let mut c = Certificate { per_axis, points: pts.len(), sup_error: 0.0, gap_bound: 0.0, tangent_violation: f64::NEG_INFINITY };
    for x in &pts {
        let (h1, h2) = (pair.h1.eval(x), pair.h2.eval(x));
        let (p1, p2) = (dc.phi1(x), dc.phi2(x));
        c.sup_error = c.sup_error.max((dc.f.eval(x) - (h1 - h2)).abs());
        c.gap_bound = c.gap_bound.max((p1 - h1) + (p2 - h2));
        c.tangent_violation = c.tangent_violation.max((h1 - p1).max(h2 - p2));
    }
    c
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Curvature for the split; estimated when absent.
    pub rho: Option<f64>,
    pub domain: Option<Domain>,
    pub net: Option<NetOptions>,
    /// Certification grid points per axis.
    pub certify_per_axis: Option<usize>,
    pub plane_cap: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { rho: None, domain: None, net: None, certify_per_axis: None, plane_cap: DEFAULT_PLANE_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DcFit {
    pub eps: f64,
    pub rho: f64,
    pub domain: Domain,
    /// Largest subgradient norm of either half over the sample.
    pub lipschitz: f64,
    pub t: f64,
    pub budget: PlaneBudget,
    pub pair: MaxAffinePair<f64>,
    pub nets: [AnchorNet; 2],
    pub certificate: Certificate,
}

impl DcFit {
    pub fn planes(&self) -> (usize, usize) {
        (self.pair.h1.k(), self.pair.h2.k())
    }

    pub fn certified(&self) -> bool {
        self.certificate.sup_error <= self.eps
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit serializes")
    }
}

fn default_certify(n_x: usize) -> usize {
    match n_x {
        1 => 1000,
        2 => 100,
        3 => 22,
        _ => 10,
    }
}

fn prepare<'a>(f: &'a dyn Target, opts: &FitOptions) -> Result<(DcDecomposition<'a>, NetOptions, f64, f64), DcError> {
    let domain = opts.domain.clone().unwrap_or_else(|| Domain::unit(f.dim()));
    let rho = match opts.rho {
        Some(r) => r,
        None => estimate_rho(f, &domain),
    };
    let dc = dc_split(f, rho, domain)?;
    let net = opts.net.unwrap_or_else(|| NetOptions::for_dim(f.dim()));
    let mut l: f64 = 0.0;
    for x in dc.domain.grid(net.samples_per_axis) {
        for part in [true, false] {
            l = l.max(crate::linalg::norm2(&dc.part(part).subgradient(&x)));
        }
    }
    let t = if l > 0.0 { 1.0 / (2.0 * l) } else { 1.0 };
    Ok((dc, net, l, t))
}

fn finish(dc: &DcDecomposition, eps: f64, l: f64, t: f64, budget: PlaneBudget, nets: [AnchorNet; 2], per_axis: usize) -> DcFit {
    let pair = MaxAffinePair { h1: nets[0].tangents(), h2: nets[1].tangents() };
    let certificate = certify(dc, &pair, per_axis);
    DcFit { eps, rho: dc.rho, domain: dc.domain.clone(), lipschitz: l, t, budget, pair, nets, certificate }
}

/// Fits `h1 - h2` to `f` with each half's anchors covering its image set at
/// radius `sqrt(eps t)`, which bounds the uniform error by `eps`.
pub fn fit_maxaffine(f: &dyn Target, eps: f64, opts: &FitOptions) -> Result<DcFit, DcError> {
    if !(eps > 0.0) {
        return Err(DcError::InvalidInput("eps must be positive".into()));
    }
    let (dc, mut net, l, t) = prepare(f, opts)?;
    let budget = plane_budget(dc.domain.dim(), l.max(f64::MIN_POSITIVE), eps);
    if budget.planes > opts.plane_cap {
        return Err(DcError::ExceedsCap { planes: budget.planes, cap: opts.plane_cap });
    }
    net.budget = net.budget.min(budget.planes as usize);
    let nets = [anchor_net(&dc.part(true), &dc.domain, t, eps * t, net)?, anchor_net(&dc.part(false), &dc.domain, t, eps * t, net)?];
    let per_axis = opts.certify_per_axis.unwrap_or_else(|| default_certify(dc.domain.dim()));
    Ok(finish(&dc, eps, l, t, budget, nets, per_axis))
}

/// Fit with exactly `anchors` greedy anchors per half.
pub fn fit_with_budget(f: &dyn Target, eps: f64, anchors: usize, opts: &FitOptions) -> Result<DcFit, DcError> {
    let (dc, net, l, t) = prepare(f, opts)?;
    let budget = plane_budget(dc.domain.dim(), l.max(f64::MIN_POSITIVE), eps);
    let nets = [
        anchor_net_with_budget(&dc.part(true), &dc.domain, t, anchors, net),
        anchor_net_with_budget(&dc.part(false), &dc.domain, t, anchors, net),
    ];
    let per_axis = opts.certify_per_axis.unwrap_or_else(|| default_certify(dc.domain.dim()));
    Ok(finish(&dc, eps, l, t, budget, nets, per_axis))
}

/// Network form of a fitted pair, with the single-LP sizes.
pub struct Emission<T> {
    pub counts: DcCounts,
    pub network: SolutionNetwork<T>,
}

pub fn emit_lp<T: Scalar>(pair: &MaxAffinePair<f64>) -> Emission<T> {
    let conv = |h: &MaxAffineFunction<f64>| MaxAffineFunction {
        planes: h.planes.iter().map(|(p, q)| (p.iter().map(|&v| T::lit(v)).collect(), T::lit(*q))).collect(),
    };
    let pt = MaxAffinePair { h1: conv(&pair.h1), h2: conv(&pair.h2) };
    Emission { counts: dc_counts(&pt), network: dc_difference_net(&pt) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::target::JetTarget;

    #[test]
    fn budget_examples() {
        let b = plane_budget(1, 1.0, 0.01);
        assert_eq!((b.planes, b.t), (120, 0.5));
        assert_eq!(plane_budget(1, 1.0, 144.0).planes, 1);
        assert_eq!(plane_budget(2, 1.0, 0.01).planes, 28_800);
        assert_eq!(plane_budget(2, 1.0, 1e-4).planes, 2_880_000);
    }

    #[test]
    fn split_examples() {
        let sq = JetTarget::new(1, |x| &x[0] * &x[0]);
        let dc = dc_split(&sq, 0.0, Domain::unit(1)).unwrap();
        assert_eq!((dc.phi1(&[0.3]), dc.phi2(&[0.3])), (0.09, 0.0));
        let neg = JetTarget::new(1, |x| -(&x[0] * &x[0]));
        let dc = dc_split(&neg, 2.0, Domain::unit(1)).unwrap();
        assert_eq!((dc.phi1(&[0.3]), dc.phi2(&[0.3])), (0.0, 0.09));
        assert!(matches!(dc_split(&neg, 1.0, Domain::unit(1)), Err(DcError::CurvatureTooSmall { .. })));
    }

    #[test]
    fn greedy_stops_at_target() {
        let images: Vec<Vec<f64>> = (0..=10).map(|i| vec![i as f64]).collect();
        let (idx, r) = greedy(&images, 2.0, usize::MAX);
        assert!(r <= 2.0);
        assert_eq!(idx[..2], [0, 10]);
    }
}
