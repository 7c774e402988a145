use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{quantize, Image};
use crate::rng::RngStream;

/// How a Gaussian noise index maps to the noise distribution on the
/// normalized [0, 1] pixel scale.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaussMode {
    /// The index is the variance.
    #[default]
    Variance,
    /// The index is the standard deviation.
    Stddev,
}

impl GaussMode {
    pub fn name(self) -> &'static str {
        match self {
            GaussMode::Variance => "variance",
            GaussMode::Stddev => "stddev",
        }
    }

    pub fn sigma(self, strength: f64) -> f64 {
        match self {
            GaussMode::Variance => strength.sqrt(),
            GaussMode::Stddev => strength,
        }
    }
}

impl fmt::Display for GaussMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GaussMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "variance" | "var" => Ok(GaussMode::Variance),
            "stddev" | "std" => Ok(GaussMode::Stddev),
            other => Err(Error::Argument(format!(
                "unknown gauss mode `{other}` (expected variance or stddev)"
            ))),
        }
    }
}

/// Impulse noise: each scalar element is, with probability `amount`,
/// replaced by 255 or 0 with equal odds.
pub fn apply_salt_pepper(img: &Image, amount: f64, rng: &mut RngStream) -> Result<Image> {
    if !(0.0..=1.0).contains(&amount) {
        return Err(Error::Argument(format!("salt & pepper amount {amount} outside [0, 1]")));
    }
    if amount == 0.0 {
        return Ok(img.clone());
    }
    let pixels = img
        .pixels()
        .iter()
        .map(|&v| {
            if rng.uniform() < amount {
                if rng.uniform() < 0.5 {
                    255
                } else {
                    0
                }
            } else {
                v
            }
        })
        .collect();
    Ok(img.with_pixels(pixels))
}

/// Additive zero-mean Gaussian noise on the [0, 1] scale, clamped and
/// re-quantized to 8 bits.
pub fn apply_gaussian(img: &Image, strength: f64, rng: &mut RngStream, mode: GaussMode) -> Result<Image> {
    if !strength.is_finite() || strength < 0.0 {
        return Err(Error::Argument(format!(
            "gaussian strength {strength} must be finite and >= 0"
        )));
    }
    if strength == 0.0 {
        return Ok(img.clone());
    }
    let sigma = mode.sigma(strength);
    let pixels = img
        .pixels()
        .iter()
        .map(|&v| {
            let x = f64::from(v) / 255.0 + sigma * rng.standard_normal();
            quantize(x.clamp(0.0, 1.0) * 255.0)
        })
        .collect();
    Ok(img.with_pixels(pixels))
}
