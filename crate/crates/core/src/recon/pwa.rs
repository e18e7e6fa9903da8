//! Piecewise-affine image interpolation on a triangulated pixel grid, and its
//! realization as a two-layer solution network.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::image::Image;
use super::ReconError;
use crate::gadgets::polyhedral_indicator_node;
use crate::linalg::Matrix;
use crate::net::{Affine, Input, NetNode, NetworkBuilder, ParamProgram, Selector, SolutionNetwork, Source, Workspace};

/// Halfspace `a . (x, y) <= b` in pixel coordinates (`x` is the column).
pub type Halfspace = ([f64; 2], f64);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Triangle {
    pub halfspaces: [Halfspace; 3],
    /// Per channel `(gx, gy, b)` with value `gx x + gy y + b`.
    pub affine: Vec<[f64; 3]>,
}

impl Triangle {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.halfspaces.iter().all(|(a, b)| a[0] * x + a[1] * y <= *b)
    }

    pub fn value(&self, c: usize, x: f64, y: f64) -> f64 {
        let [gx, gy, b] = self.affine[c];
        gx * x + gy * y + b
    }
}

/// Each grid square `[j, j+1] x [i, i+1]` is cut along its main diagonal
/// into an upper-right and a lower-left triangle; each triangle carries the
/// affine map through its three corner pixels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangularPwa {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub triangles: Vec<Triangle>,
}

impl TriangularPwa {
    pub fn fit(img: &Image) -> Result<Self, ReconError> {
        if img.width < 2 || img.height < 2 {
            return Err(ReconError::UnsupportedFormat(format!("{}x{} image; need at least 2x2", img.width, img.height)));
        }
        if img.channels != 1 && img.channels != 3 {
            return Err(ReconError::UnsupportedFormat(format!("{} channels; need 1 or 3", img.channels)));
        }
        let mut triangles = Vec::with_capacity(2 * (img.width - 1) * (img.height - 1));
        for i in 0..img.height - 1 {
            for j in 0..img.width - 1 {
                let (fi, fj) = (i as f64, j as f64);
                let (p00, p01, p10, p11) = (img.pixel(i, j), img.pixel(i, j + 1), img.pixel(i + 1, j), img.pixel(i + 1, j + 1));
                let fit = |gx: f64, gy: f64, v: f64| [gx, gy, v - gx * fj - gy * fi];
                // corners (j, i), (j+1, i), (j+1, i+1)
                triangles.push(Triangle {
                    halfspaces: [([0.0, -1.0], -fi), ([1.0, 0.0], fj + 1.0), ([-1.0, 1.0], fi - fj)],
                    affine: (0..img.channels).map(|c| fit(p01[c] - p00[c], p11[c] - p01[c], p00[c])).collect(),
                });
                // corners (j, i), (j, i+1), (j+1, i+1)
                triangles.push(Triangle {
                    halfspaces: [([-1.0, 0.0], -fj), ([0.0, 1.0], fi + 1.0), ([1.0, -1.0], fj - fi)],
                    affine: (0..img.channels).map(|c| fit(p11[c] - p10[c], p10[c] - p00[c], p00[c])).collect(),
                });
            }
        }
        Ok(TriangularPwa { width: img.width, height: img.height, channels: img.channels, triangles })
    }

    /// Direct interpolation: mean of the affine pieces whose triangle holds
    /// the point.
    pub fn eval(&self, x: f64, y: f64) -> Option<Vec<f64>> {
        let mut acc = vec![0.0; self.channels];
        let mut n = 0;
        for t in self.triangles.iter().filter(|t| t.contains(x, y)) {
            n += 1;
            for (c, a) in acc.iter_mut().enumerate() {
                *a += t.value(c, x, y);
            }
        }
        (n > 0).then(|| acc.into_iter().map(|a| a / n as f64).collect())
    }

    pub fn n_rows(&self) -> usize {
        3 * self.triangles.len()
    }

    /// Network over inputs `(x, y)` with outputs `sum_t I_t h_t` per channel
    /// followed by `sum_t I_t`, over the triangles for which `active` holds
    /// (all of them when `None`).
    pub fn network(&self, active: Option<&[bool]>) -> Result<SolutionNetwork<f64>, ReconError> {
        let ch = self.channels;
        let mut b = NetworkBuilder::new(2, ch + 1);
        let mut input_out = Matrix::zeros(ch + 1, 2);
        let mut offset = vec![0.0; ch + 1];
        for (t, tri) in self.triangles.iter().enumerate() {
            if active.is_some_and(|a| !a[t]) {
                continue;
            }
            let rows: Vec<(Vec<f64>, f64)> = tri.halfspaces.iter().map(|(a, c)| (a.to_vec(), *c)).collect();
            let ind = b.add_node(polyhedral_indicator_node(&rows)?);
            b.connect_all(Source::Input, ind, 0)?;
            for c in 0..ch {
                let [gx, gy, c0] = tri.affine[c];
                let gate = b.add_node(gate_node(gx, gy, c0));
                b.connect_component(Source::Node(ind), 0, gate, 0)?;
                b.connect_component(Source::Input, 0, gate, 1)?;
                b.connect_component(Source::Input, 1, gate, 2)?;
                b.readout_component(Source::Node(gate), 0, c, 1.0)?;
                input_out[(c, 0)] -= gx;
                input_out[(c, 1)] -= gy;
                offset[c] -= c0;
            }
            b.readout_component(Source::Node(ind), 0, ch, 1.0)?;
        }
        b.readout(Source::Input, input_out)?;
        b.readout_offset(offset)?;
        Ok(b.build()?)
    }
}

/// Slots `(I, x, y)`; solves `(1 - I/2) z = h(x, y)` with
/// `h = gx x + gy y + c0`, so that `z - h = I h`.
fn gate_node(gx: f64, gy: f64, c0: f64) -> NetNode<f64> {
    let mut p = ParamProgram::new(1, 3);
    p.set_cost(0, Affine::constant(-1.0));
    let h = Affine::constant(c0).plus(Input::Slot(1), gx).plus(Input::Slot(2), gy);
    p.push_ineq(vec![Affine::slot(0, -0.5, 1.0)], h.clone());
    p.push_ge(vec![Affine::slot(0, -0.5, 1.0)], h);
    NetNode::new("gate", p, Selector::identity(1))
}

/// A triangulated image together with its network.
pub struct ImageFit {
    pub pwa: TriangularPwa,
    pub network: SolutionNetwork<f64>,
    pub mean: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reconstruction {
    #[serde(skip)]
    pub image: Image,
    /// Against the rendered 8-bit image.
    pub mse: f64,
    /// Against the network output before quantization.
    pub raw_mse: f64,
    /// Pixels where no indicator fired and the global mean was used.
    pub fallback_pixels: usize,
}

pub fn fit_image_pwa(img: &Image) -> Result<ImageFit, ReconError> {
    let pwa = TriangularPwa::fit(img)?;
    let network = pwa.network(None)?;
    Ok(ImageFit { pwa, network, mean: img.mean() })
}

/// Evaluates `network` at every pixel corner and renders
/// `sum I_t h_t / sum I_t` clamped to `[0, 1]`, then quantized to 8 bits;
/// pixels with no active indicator get `mean`.
pub fn reconstruct(network: &SolutionNetwork<f64>, reference: &Image, mean: &[f64]) -> Result<Reconstruction, ReconError> {
    let ch = reference.channels;
    let mut out = Image::new(reference.width, reference.height, ch);
    let mut ws = Workspace::default();
    let mut fallback_pixels = 0;
    for r in 0..reference.height {
        for c in 0..reference.width {
            let v = network.evaluate_in(&[c as f64, r as f64], &mut ws)?;
            let n = v[ch];
            for k in 0..ch {
                let px = if n > 0.5 { v[k] / n } else { mean[k] };
                out.set(r, c, k, px.clamp(0.0, 1.0));
            }
            if n <= 0.5 {
                fallback_pixels += 1;
            }
        }
    }
    let raw_mse = reference.mse(&out);
    for v in &mut out.data {
        *v = (*v * 255.0).round() / 255.0;
    }
    let mse = reference.mse(&out);
    Ok(Reconstruction { image: out, mse, raw_mse, fallback_pixels })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DropResult {
    pub keep: f64,
    pub seed: u64,
    pub kept_rows: usize,
    pub total_rows: usize,
    /// Triangles whose three halfspace rows all survived.
    pub kept_triangles: usize,
    pub mse: f64,
    pub raw_mse: f64,
    pub fallback_pixels: usize,
    #[serde(skip)]
    pub image: Image,
}

/// Keeps `round(keep * rows)` of the indicator halfspace rows, chosen
/// uniformly under `seed`. A triangle missing any of its rows no longer
/// indicates a cell, so its gate is removed; the image is re-rendered from
/// the remaining network.
pub fn drop_constraints(fit: &ImageFit, reference: &Image, keep: f64, seed: u64) -> Result<DropResult, ReconError> {
    if !(keep > 0.0 && keep <= 1.0) {
        return Err(ReconError::InvalidInput(format!("keep fraction {keep} outside (0, 1]")));
    }
    let total = fit.pwa.n_rows();
    let kept = ((keep * total as f64).round() as usize).min(total);
    let mut rows = vec![false; total];
    for i in sample(&mut ChaCha8Rng::seed_from_u64(seed), total, kept) {
        rows[i] = true;
    }
    let active: Vec<bool> = rows.chunks(3).map(|r| r.iter().all(|&k| k)).collect();
    let kept_triangles = active.iter().filter(|&&a| a).count();
    let net = if kept == total { None } else { Some(fit.pwa.network(Some(&active))?) };
    let rec = reconstruct(net.as_ref().unwrap_or(&fit.network), reference, &fit.mean)?;
    Ok(DropResult {
        keep,
        seed,
        kept_rows: kept,
        total_rows: total,
        kept_triangles,
        mse: rec.mse,
        raw_mse: rec.raw_mse,
        fallback_pixels: rec.fallback_pixels,
        image: rec.image,
    })
}

/// Mean MSE over `seeds` consecutive seeds starting at `seed`.
pub fn mean_drop_mse(fit: &ImageFit, reference: &Image, keep: f64, seed: u64, seeds: usize) -> Result<f64, ReconError> {
    let mut s = 0.0;
    for k in 0..seeds as u64 {
        s += drop_constraints(fit, reference, keep, seed + k)?.mse;
    }
    Ok(s / seeds as f64)
}
