//! Full-reference metrics: mean squared error and PSNR.

use std::fmt;

use crate::error::{Error, Result};
use crate::image::Image;

/// Peak value for 8-bit samples.
pub const MAX_VALUE: f64 = 255.0;

/// A PSNR in decibels, or `Undefined` when the two images are identical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsnrScore {
    Db(f64),
    Undefined,
}

impl PsnrScore {
    pub fn value(self) -> Option<f64> {
        match self {
            PsnrScore::Db(v) => Some(v),
            PsnrScore::Undefined => None,
        }
    }
}

/// `NA` for undefined, otherwise four fractional digits.
impl fmt::Display for PsnrScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsnrScore::Db(v) => write!(f, "{v:.4}"),
            PsnrScore::Undefined => f.write_str("NA"),
        }
    }
}

fn check_shapes(reference: &Image, distorted: &Image) -> Result<()> {
    if !reference.same_shape(distorted) {
        return Err(Error::Argument(format!(
            "shape mismatch: {}x{}x{} vs {}x{}x{}",
            reference.width(),
            reference.height(),
            reference.channels(),
            distorted.width(),
            distorted.height(),
            distorted.channels()
        )));
    }
    Ok(())
}

/// Mean over every scalar element (all channels pooled) of the squared
/// difference.
pub fn mse(reference: &Image, distorted: &Image) -> Result<f64> {
    check_shapes(reference, distorted)?;
    let sum: u64 = reference
        .pixels()
        .iter()
        .zip(distorted.pixels())
        .map(|(&a, &b)| {
            let d = i64::from(a) - i64::from(b);
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / reference.pixels().len() as f64)
}

pub fn psnr(reference: &Image, distorted: &Image) -> Result<PsnrScore> {
    let e = mse(reference, distorted)?;
    if e == 0.0 {
        return Ok(PsnrScore::Undefined);
    }
    Ok(PsnrScore::Db(10.0 * (MAX_VALUE * MAX_VALUE / e).log10()))
}
