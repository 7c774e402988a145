//! Inputs shared by the benchmarks.

use iqa_core::svr::{SupportVector, SvrType, FEATURE_DIM};
use iqa_core::{FeatureRange, Image, SvrModel};

/// A deterministic high-entropy image, MNIST-sized for one channel and
/// CIFAR-sized for three.
pub fn textured(channels: usize, salt: u64) -> Image {
    let side = if channels == 1 { 28 } else { 32 };
    let px = (0..side * side * channels)
        .map(|i| ((i as u64 ^ salt).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 56) as u8)
        .collect();
    Image::new(side, side, channels, px).expect("valid shape")
}

/// An RBF model with `svs` support vectors, about the size of the
/// published BRISQUE model when `svs` is 774.
pub fn synthetic_model(svs: usize) -> (SvrModel, FeatureRange) {
    let support_vectors = (0..svs)
        .map(|k| SupportVector {
            coef: if k % 2 == 0 { 1.0 } else { -1.0 },
            features: (0..FEATURE_DIM)
                .map(|f| ((k * 31 + f * 7) % 200) as f64 / 100.0 - 1.0)
                .collect(),
        })
        .collect();
    let model = SvrModel {
        svm_type: SvrType::EpsilonSvr,
        gamma: 0.05,
        rho: -40.0,
        support_vectors,
    };
    let range = FeatureRange {
        lower: -1.0,
        upper: 1.0,
        bounds: vec![(0.0, 10.0); FEATURE_DIM],
    };
    (model, range)
}
