//! Robustness benchmarking of image quality metrics on small images.
//!
//! The crate covers the whole pipeline: dataset decoding and seeded
//! sampling, a deterministic perturbation engine (salt & pepper, Gaussian
//! noise, rotation), the PSNR and BRISQUE metrics, and summary reporting.

pub mod brisque;
pub mod dataset;
pub mod error;
pub mod image;
pub mod perturb;
pub mod psnr;
pub mod rng;
pub mod stats;
pub mod svr;

pub use brisque::{brisque_score, extract_features, BrisqueFeatures, BrisqueModel};
pub use dataset::{DatasetId, ManifestEntry, SampleManifest};
pub use error::{Error, Result};
pub use image::{FloatPlane, Image};
pub use perturb::{apply_condition, Condition, GaussMode, ImageKey, PerturbationStep};
pub use psnr::{psnr, PsnrScore};
pub use stats::{GroupSpec, Metric, ScoreRecord, SummaryStats, TableSpec};
pub use svr::{FeatureRange, SvrModel};
