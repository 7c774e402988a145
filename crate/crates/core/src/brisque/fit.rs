//! Moment-matching fits of the generalized Gaussian (GGD) and its
//! asymmetric variant (AGGD).
//!
//! Both estimators invert the generalized Gaussian ratio
//! `rho(a) = G(1/a) G(3/a) / G(2/a)^2` on a fixed shape grid
//! `a = 0.2, 0.201, ..., 10`. `rho` decreases strictly along the grid, so
//! the nearest grid point is found by bisection.

use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const ALPHA_MIN: f64 = 0.2;
pub const ALPHA_MAX: f64 = 10.0;
pub const ALPHA_STEP: f64 = 0.001;

/// Second moments below this are treated as an all-zero sample.
pub const DEGENERATE_POWER: f64 = 1e-10;

/// Shape value used when the sample carries no signal.
const FALLBACK_ALPHA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GgdFit {
    pub alpha: f64,
    pub sigma_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggdFit {
    pub alpha: f64,
    pub eta: f64,
    pub sigma_l_sq: f64,
    pub sigma_r_sq: f64,
}

pub fn generalized_gaussian_ratio(alpha: f64) -> f64 {
    (ln_gamma(1.0 / alpha) + ln_gamma(3.0 / alpha) - 2.0 * ln_gamma(2.0 / alpha)).exp()
}

pub struct ShapeGrid {
    alphas: Vec<f64>,
    ratios: Vec<f64>,
}

impl ShapeGrid {
    fn build() -> Self {
        let n = ((ALPHA_MAX - ALPHA_MIN) / ALPHA_STEP).round() as usize + 1;
        let alphas: Vec<f64> = (0..n).map(|k| ALPHA_MIN + k as f64 * ALPHA_STEP).collect();
        let ratios = alphas.iter().map(|&a| generalized_gaussian_ratio(a)).collect();
        ShapeGrid { alphas, ratios }
    }

    pub fn get() -> &'static ShapeGrid {
        static GRID: OnceLock<ShapeGrid> = OnceLock::new();
        GRID.get_or_init(ShapeGrid::build)
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    /// Index minimizing `|rho(alpha) - target|`; ties go to the lower index.
    pub fn nearest_index(&self, target: f64) -> usize {
        // first index whose ratio is <= target
        let i = self.ratios.partition_point(|&r| r > target);
        if i == 0 {
            return 0;
        }
        if i == self.ratios.len() {
            return i - 1;
        }
        let below = (self.ratios[i - 1] - target).abs();
        let above = (self.ratios[i] - target).abs();
        if above < below {
            i
        } else {
            i - 1
        }
    }

    pub fn invert(&self, target: f64) -> f64 {
        self.alphas[self.nearest_index(target)]
    }
}

fn non_empty(samples: &[f64]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::Argument("cannot fit an empty sample".into()));
    }
    Ok(())
}

pub fn ggd_fit(samples: &[f64]) -> Result<GgdFit> {
    non_empty(samples)?;
    let n = samples.len() as f64;
    let power = samples.iter().map(|x| x * x).sum::<f64>() / n;
    if power < DEGENERATE_POWER {
        return Ok(GgdFit {
            alpha: FALLBACK_ALPHA,
            sigma_sq: 0.0,
        });
    }
    let mean_abs = samples.iter().map(|x| x.abs()).sum::<f64>() / n;
    let rho_hat = power / (mean_abs * mean_abs);
    Ok(GgdFit {
        alpha: ShapeGrid::get().invert(rho_hat),
        sigma_sq: power,
    })
}

pub fn aggd_fit(samples: &[f64]) -> Result<AggdFit> {
    non_empty(samples)?;
    let n = samples.len() as f64;
    let power = samples.iter().map(|x| x * x).sum::<f64>() / n;
    if power < DEGENERATE_POWER {
        return Ok(AggdFit {
            alpha: FALLBACK_ALPHA,
            eta: 0.0,
            sigma_l_sq: 0.0,
            sigma_r_sq: 0.0,
        });
    }
    let (mut left_sum, mut left_n, mut right_sum, mut right_n) = (0.0, 0usize, 0.0, 0usize);
    for &x in samples {
        if x < 0.0 {
            left_sum += x * x;
            left_n += 1;
        } else if x > 0.0 {
            right_sum += x * x;
            right_n += 1;
        }
    }
    let side = |sum: f64, count: usize| if count == 0 { 0.0 } else { sum / count as f64 };
    let sigma_l_sq = side(left_sum, left_n);
    let sigma_r_sq = side(right_sum, right_n);
    let (sigma_l, sigma_r) = (sigma_l_sq.sqrt(), sigma_r_sq.sqrt());

    let mean_abs = samples.iter().map(|x| x.abs()).sum::<f64>() / n;
    let r_hat = mean_abs * mean_abs / power;
    // The correction is symmetric in gamma <-> 1/gamma; using the ratio <= 1
    // keeps it finite when one side is empty.
    let gamma = sigma_l.min(sigma_r) / sigma_l.max(sigma_r);
    let r_norm = r_hat * (gamma.powi(3) + 1.0) * (gamma + 1.0) / (gamma * gamma + 1.0).powi(2);

    let alpha = ShapeGrid::get().invert(1.0 / r_norm);
    let eta = (sigma_r - sigma_l)
        * (ln_gamma(2.0 / alpha) - ln_gamma(1.0 / alpha)).exp()
        * (0.5 * (ln_gamma(1.0 / alpha) - ln_gamma(3.0 / alpha))).exp();
    Ok(AggdFit {
        alpha,
        eta,
        sigma_l_sq,
        sigma_r_sq,
    })
}
