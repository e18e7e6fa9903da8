//! 8-bit PGM/PPM images with intensities stored in `[0, 1]`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ReconError;

#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    /// Row-major, channels interleaved.
    pub data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize) -> Self {
        Image { width, height, channels, data: vec![0.0; width * height * channels] }
    }

    pub fn get(&self, row: usize, col: usize, c: usize) -> f64 {
        self.data[(row * self.width + col) * self.channels + c]
    }

    pub fn set(&mut self, row: usize, col: usize, c: usize, v: f64) {
        self.data[(row * self.width + col) * self.channels + c] = v;
    }

    pub fn pixel(&self, row: usize, col: usize) -> &[f64] {
        let i = (row * self.width + col) * self.channels;
        &self.data[i..i + self.channels]
    }

    pub fn mean(&self) -> Vec<f64> {
        let n = (self.width * self.height) as f64;
        (0..self.channels).map(|c| self.data.iter().skip(c).step_by(self.channels).sum::<f64>() / n).collect()
    }

    /// Per-channel mean squared error, averaged over channels.
    pub fn mse(&self, other: &Image) -> f64 {
        assert_eq!((self.width, self.height, self.channels), (other.width, other.height, other.channels));
        let per_channel: Vec<f64> = (0..self.channels)
            .map(|c| {
                let s: f64 = (c..self.data.len()).step_by(self.channels).map(|i| (self.data[i] - other.data[i]).powi(2)).sum();
                s / (self.width * self.height) as f64
            })
            .collect();
        per_channel.iter().sum::<f64>() / self.channels as f64
    }

    pub fn decode(bytes: &[u8]) -> Result<Image, ReconError> {
        let mut pos = 0;
        let mut fields = Vec::with_capacity(4);
        while fields.len() < 4 {
            while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
                if bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                } else {
                    pos += 1;
                }
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(ReconError::UnsupportedFormat("truncated header".into()));
            }
            fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
        let channels = match fields[0].as_str() {
            "P5" => 1,
            "P6" => 3,
            m => return Err(ReconError::UnsupportedFormat(format!("magic {m}; only binary P5/P6 are read"))),
        };
        let num = |s: &str| s.parse::<usize>().map_err(|_| ReconError::UnsupportedFormat(format!("bad header field {s:?}")));
        let (w, h, maxval) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
        if maxval == 0 || maxval > 255 {
            return Err(ReconError::UnsupportedFormat(format!("maxval {maxval}; only 8-bit images are read")));
        }
        pos += 1;
        let n = w * h * channels;
        if bytes.len() < pos + n {
            return Err(ReconError::UnsupportedFormat(format!("expected {n} bytes of pixel data, found {}", bytes.len().saturating_sub(pos))));
        }
        let data = bytes[pos..pos + n].iter().map(|&b| b as f64 / maxval as f64).collect();
        Ok(Image { width: w, height: h, channels, data })
    }

    /// Binary PGM for one channel, PPM for three; values are clamped and
    /// rounded to 8 bits.
    pub fn encode(&self) -> Result<Vec<u8>, ReconError> {
        let magic = match self.channels {
            1 => "P5",
            3 => "P6",
            c => return Err(ReconError::UnsupportedFormat(format!("{c} channels"))),
        };
        let mut out = format!("{magic}\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.data.iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Image, ReconError> {
        Image::decode(&std::fs::read(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), ReconError> {
        Ok(std::fs::write(path, self.encode()?)?)
    }
}

const BUNDLED: &[u8] = include_bytes!("../../data/texture32.ppm");

/// The 32x32 RGB test texture shipped with the crate.
pub fn bundled_texture() -> Image {
    Image::decode(BUNDLED).expect("bundled texture is a valid PPM")
}

/// Generator for the bundled texture: two oriented gratings, a radial ripple
/// and seeded grain, quantized to 8 bits.
pub fn synthetic_texture(size: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = Image::new(size, size, 3);
    let s = size as f64;
    for r in 0..size {
        for c in 0..size {
            let (x, y) = (c as f64 / s, r as f64 / s);
            let grating = (9.0 * x + 4.0 * y).sin();
            let cross = (3.0 * x - 11.0 * y).cos();
            let d = ((x - 0.6).powi(2) + (y - 0.4).powi(2)).sqrt();
            let ripple = (25.0 * d).sin() * (-3.0 * d).exp();
            let base = [0.5 + 0.22 * grating + 0.12 * ripple, 0.45 + 0.18 * cross + 0.15 * ripple, 0.4 + 0.15 * grating * cross + 0.2 * y];
            for (ch, b) in base.iter().enumerate() {
                let v: f64 = b + rng.gen_range(-0.06..0.06);
                img.set(r, c, ch, (v.clamp(0.0, 1.0) * 255.0).round() / 255.0);
            }
        }
    }
    img
}
