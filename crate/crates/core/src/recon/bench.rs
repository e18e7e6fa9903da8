//! Smooth benchmark functions reconstructed by Taylor networks on a
//! rescaled box.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use super::ReconError;
use crate::target::{Jet, JetTarget, Target};
use crate::taylor::{build_taylor_net, TaylorGridSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Benchmark {
    Alpine,
    Parsopoulos,
    Trid,
    Powell,
}

impl Benchmark {
    pub const ALL: [Benchmark; 4] = [Benchmark::Alpine, Benchmark::Parsopoulos, Benchmark::Trid, Benchmark::Powell];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Alpine => "alpine",
            Benchmark::Parsopoulos => "parsopoulos",
            Benchmark::Trid => "trid",
            Benchmark::Powell => "powell",
        }
    }

    pub fn parse(s: &str) -> Option<Benchmark> {
        Benchmark::ALL.into_iter().find(|b| b.name().eq_ignore_ascii_case(s))
    }

    pub fn dim(self) -> usize {
        match self {
            Benchmark::Powell => 4,
            _ => 2,
        }
    }

    /// Per-axis interval. Alpine starts at 0.1 because `sqrt` is not smooth
    /// at 0.
    pub fn interval(self) -> (f64, f64) {
        match self {
            Benchmark::Alpine => (0.1, 10.0),
            Benchmark::Parsopoulos => (-5.0, 5.0),
            Benchmark::Trid => (-20.0, 20.0),
            Benchmark::Powell => (-4.0, 5.0),
        }
    }

    /// Dense evaluation grid, points per axis.
    pub fn grid_per_axis(self) -> usize {
        if self.dim() == 2 {
            100
        } else {
            10
        }
    }

    pub fn eval_jet(self, x: &[Jet]) -> Jet {
        match self {
            Benchmark::Alpine => x.iter().map(|xi| xi.sqrt() * xi.sin()).reduce(|a, b| a * b).expect("non-empty input"),
            Benchmark::Parsopoulos => x[0].cos().powi(2) + x[1].sin().powi(2),
            Benchmark::Trid => {
                let sq = x.iter().map(|xi| (xi.clone() - 1.0).powi(2)).reduce(|a, b| a + b).expect("non-empty input");
                x.windows(2).fold(sq, |acc, w| acc - w[1].clone() * &w[0])
            }
            Benchmark::Powell => {
                (x[2].clone() - x[0].clone() * 10.0).powi(2)
                    + (x[1].clone() - &x[3]).powi(2) * 5.0
                    + (x[0].clone() - x[1].clone() * 2.0).powi(4)
                    + (x[2].clone() - &x[3]).powi(4) * 10.0
            }
        }
    }

    /// Value on the original domain.
    pub fn eval(self, x: &[f64]) -> f64 {
        JetTarget::new(self.dim(), move |u: &[Jet]| self.eval_jet(u)).eval(x)
    }

    /// The function composed with the affine map from the unit box.
    pub fn unit_target(self) -> JetTarget {
        let (lo, hi) = self.interval();
        JetTarget::on_box(vec![lo; self.dim()], vec![hi; self.dim()], move |x: &[Jet]| self.eval_jet(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub name: String,
    pub dim: usize,
    pub k: usize,
    pub n: usize,
    pub domain_lo: f64,
    pub domain_hi: f64,
    pub grid_per_axis: usize,
    pub mse: f64,
    pub build_seconds: f64,
}

pub const SWEEP_HEADER: &str = "name,dim,k,N,domain_lo,domain_hi,grid_per_axis,mse,build_seconds";

impl SweepRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:e},{:.3}",
            self.name, self.dim, self.k, self.n, self.domain_lo, self.domain_hi, self.grid_per_axis, self.mse, self.build_seconds
        )
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(s, "{}", r.csv());
    }
    s
}

/// MSE of the Taylor network of order `k` on an `n^dim` grid against the
/// target, over the benchmark's dense grid (box faces included).
pub fn recon_point(target: &dyn Target, name: &str, (lo, hi): (f64, f64), k: usize, n: usize, per_axis: usize) -> Result<SweepRow, ReconError> {
    let spec = TaylorGridSpec::new(target.dim(), k, 1.0)?.with_grid(n);
    let start = Instant::now();
    let net = build_taylor_net::<f64>(target, &spec)?;
    let build_seconds = start.elapsed().as_secs_f64();
    let err = net.grid_error(target, per_axis, false)?;
    Ok(SweepRow { name: name.into(), dim: target.dim(), k, n, domain_lo: lo, domain_hi: hi, grid_per_axis: per_axis, mse: err.mse, build_seconds })
}

pub fn recon_testfn(b: Benchmark, k: usize, grids: &[usize]) -> Result<Vec<SweepRow>, ReconError> {
    let target = b.unit_target();
    grids.iter().map(|&n| recon_point(&target, b.name(), b.interval(), k, n, b.grid_per_axis())).collect()
}
