//! BRISQUE: natural-scene-statistics features and the SVR quality score.
//!
//! Feature order per scale: `[ggd_alpha, ggd_sigma_sq]`, then for each of
//! the H, V, D1 and D2 products `[alpha, eta, sigma_l_sq, sigma_r_sq]`.
//! The second scale repeats this on the 2x2 box-downsampled luminance.

mod fit;
mod mscn;

use std::path::Path;

pub use fit::{aggd_fit, generalized_gaussian_ratio, ggd_fit, AggdFit, GgdFit, ShapeGrid};
pub use mscn::{mscn_map, paired_products, window_taps, MscnPlane, PairedProducts, STABILIZER, WINDOW_SIGMA};

use crate::error::{Error, Result};
use crate::image::{box_downsample2, FloatPlane, Image};
use crate::svr::{parse_range_file, parse_svr_model, scale_features, svr_predict, FeatureRange, SvrModel, FEATURE_DIM};

/// Smallest accepted side; the second scale is then at least 7x7.
pub const MIN_SIDE: usize = 14;

pub const FEATURES_PER_SCALE: usize = 18;

/// Score range reported by [`brisque_score`].
pub const SCORE_MIN: f64 = 0.0;
pub const SCORE_MAX: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrisqueFeatures(pub [f64; FEATURE_DIM]);

impl BrisqueFeatures {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Column names in feature order, e.g. `s1_ggd_alpha`, `s2_d2_sigma_r_sq`.
    pub fn names() -> Vec<String> {
        let mut names = Vec::with_capacity(FEATURE_DIM);
        for scale in 1..=2 {
            names.push(format!("s{scale}_ggd_alpha"));
            names.push(format!("s{scale}_ggd_sigma_sq"));
            for o in ["h", "v", "d1", "d2"] {
                for p in ["alpha", "eta", "sigma_l_sq", "sigma_r_sq"] {
                    names.push(format!("s{scale}_{o}_{p}"));
                }
            }
        }
        names
    }
}

fn scale_features_into(luma: &FloatPlane, out: &mut [f64]) -> Result<()> {
    let m = mscn_map(luma)?;
    let g = ggd_fit(m.plane().values())?;
    out[0] = g.alpha;
    out[1] = g.sigma_sq;
    let products = paired_products(&m)?;
    for (k, plane) in products.planes().into_iter().enumerate() {
        let a = aggd_fit(plane.values())?;
        out[2 + 4 * k..6 + 4 * k].copy_from_slice(&[a.alpha, a.eta, a.sigma_l_sq, a.sigma_r_sq]);
    }
    Ok(())
}

pub fn extract_features(luma: &FloatPlane) -> Result<BrisqueFeatures> {
    let (w, h) = (luma.width(), luma.height());
    if w < MIN_SIDE || h < MIN_SIDE {
        return Err(Error::Size(format!(
            "BRISQUE needs at least {MIN_SIDE}x{MIN_SIDE}, got {w}x{h}"
        )));
    }
    let mut values = [0.0; FEATURE_DIM];
    scale_features_into(luma, &mut values[..FEATURES_PER_SCALE])?;
    let half = box_downsample2(luma)?;
    scale_features_into(&half, &mut values[FEATURES_PER_SCALE..])?;
    Ok(BrisqueFeatures(values))
}

/// A loaded SVR model together with its feature-scaling sidecar.
#[derive(Debug, Clone)]
pub struct BrisqueModel {
    pub svr: SvrModel,
    pub range: FeatureRange,
}

impl BrisqueModel {
    pub fn new(svr: SvrModel, range: FeatureRange) -> Result<Self> {
        if range.bounds.len() != FEATURE_DIM {
            return Err(Error::Model(format!(
                "range file has {} entries, expected {FEATURE_DIM}",
                range.bounds.len()
            )));
        }
        if let Some(sv) = svr.support_vectors.iter().find(|sv| sv.features.len() != FEATURE_DIM) {
            return Err(Error::Model(format!(
                "support vector of dimension {}, expected {FEATURE_DIM}",
                sv.features.len()
            )));
        }
        Ok(Self { svr, range })
    }

    pub fn load(model_path: &Path, range_path: &Path) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        Self::new(
            parse_svr_model(&read(model_path)?)?,
            parse_range_file(&read(range_path)?)?,
        )
    }

    pub fn score(&self, img: &Image) -> Result<f64> {
        brisque_score(img, &self.svr, &self.range)
    }
}

/// Gray-converts `img`, extracts features, scales them and evaluates the
/// SVR. The result is clamped to `[0, 100]`; higher means worse.
pub fn brisque_score(img: &Image, model: &SvrModel, range: &FeatureRange) -> Result<f64> {
    let features = extract_features(&img.luma_plane())?;
    let scaled = scale_features(features.values(), range)?;
    let raw = svr_predict(&scaled, model)?;
    Ok(raw.clamp(SCORE_MIN, SCORE_MAX))
}
