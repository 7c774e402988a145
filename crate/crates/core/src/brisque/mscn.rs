use crate::error::{Error, Result};
use crate::image::FloatPlane;

/// Half-width of the 7x7 local window.
pub const WINDOW_RADIUS: usize = 3;
/// Width of the Gaussian local window, in pixels.
pub const WINDOW_SIGMA: f64 = 7.0 / 6.0;
/// Divisive stabilizer on the [0, 255] scale.
pub const STABILIZER: f64 = 1.0;

/// Mean-subtracted contrast-normalized coefficients of a luminance plane.
#[derive(Debug, Clone, PartialEq)]
pub struct MscnPlane(FloatPlane);

impl MscnPlane {
    pub fn plane(&self) -> &FloatPlane {
        &self.0
    }

    pub fn into_plane(self) -> FloatPlane {
        self.0
    }
}

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
pub fn window_taps() -> [f64; 2 * WINDOW_RADIUS + 1] {
    let mut taps = [0.0; 2 * WINDOW_RADIUS + 1];
    for (i, t) in taps.iter_mut().enumerate() {
        let d = i as f64 - WINDOW_RADIUS as f64;
        *t = (-d * d / (2.0 * WINDOW_SIGMA * WINDOW_SIGMA)).exp();
    }
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Symmetric (edge-repeating) mirror: -1 -> 0, -2 -> 1, n -> n-1.
#[inline]
pub(crate) fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let j = if i < 0 {
        -i - 1
    } else if i >= n {
        2 * n - i - 1
    } else {
        i
    };
    j as usize
}

/// Separable window sum of `values` with mirrored borders.
fn blur(width: usize, height: usize, values: &[f64], taps: &[f64]) -> Vec<f64> {
    let r = WINDOW_RADIUS as isize;
    let mut rows = vec![0.0; values.len()];
    for y in 0..height {
        let line = &values[y * width..(y + 1) * width];
        for x in 0..width {
            rows[y * width + x] = taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * line[mirror(x as isize + k as isize - r, width)])
                .sum();
        }
    }
    let mut out = vec![0.0; values.len()];
    for y in 0..height {
        for x in 0..width {
            out[y * width + x] = taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * rows[mirror(y as isize + k as isize - r, height) * width + x])
                .sum();
        }
    }
    out
}

/// `(I - mu) / (sigma + 1)` with `mu` and `sigma` the Gaussian-weighted local
/// mean and standard deviation.
pub fn mscn_map(luma: &FloatPlane) -> Result<MscnPlane> {
    let (w, h) = (luma.width(), luma.height());
    if w < 3 || h < 3 {
        return Err(Error::Size(format!("MSCN needs at least 3x3, got {w}x{h}")));
    }
    let taps = window_taps();
    let values = luma.values();
    let mu = blur(w, h, values, &taps);
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    let mu_sq = blur(w, h, &sq, &taps);
    let out = values
        .iter()
        .zip(mu.iter().zip(&mu_sq))
        .map(|(&i, (&m, &m2))| {
            let sigma = (m2 - m * m).max(0.0).sqrt();
            (i - m) / (sigma + STABILIZER)
        })
        .collect();
    Ok(MscnPlane(FloatPlane::new(w, h, out)?))
}

/// Neighbor products of MSCN coefficients, one plane per orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedProducts {
    pub horizontal: FloatPlane,
    pub vertical: FloatPlane,
    pub main_diagonal: FloatPlane,
    pub anti_diagonal: FloatPlane,
}

impl PairedProducts {
    /// H, V, D1, D2.
    pub fn planes(&self) -> [&FloatPlane; 4] {
        [
            &self.horizontal,
            &self.vertical,
            &self.main_diagonal,
            &self.anti_diagonal,
        ]
    }
}

pub fn paired_products(m: &MscnPlane) -> Result<PairedProducts> {
    let p = m.plane();
    let (w, h) = (p.width(), p.height());
    if w < 2 || h < 2 {
        return Err(Error::Size(format!("paired products need at least 2x2, got {w}x{h}")));
    }
    Ok(PairedProducts {
        horizontal: FloatPlane::from_fn(w - 1, h, |x, y| p.get(x, y) * p.get(x + 1, y)),
        vertical: FloatPlane::from_fn(w, h - 1, |x, y| p.get(x, y) * p.get(x, y + 1)),
        main_diagonal: FloatPlane::from_fn(w - 1, h - 1, |x, y| p.get(x, y) * p.get(x + 1, y + 1)),
        anti_diagonal: FloatPlane::from_fn(w - 1, h - 1, |x, y| p.get(x + 1, y) * p.get(x, y + 1)),
    })
}
