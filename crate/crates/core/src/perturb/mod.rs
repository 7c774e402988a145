//! The perturbation engine: salt & pepper, Gaussian noise, rotation and their
//! ordered composition into named conditions.

mod condition;
mod noise;
mod rotate;

pub use condition::{build_registry, is_registered, parse_condition, Condition, PerturbationStep, REGISTRY_NAMES};
pub use noise::{apply_gaussian, apply_salt_pepper, GaussMode};
pub use rotate::rotate;

use crate::error::Result;
use crate::image::Image;
use crate::rng::{RngStream, StreamKey};

/// Identifies the image a condition is applied to; combined with the
/// condition name and step index it keys every random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageKey<'a> {
    pub seed: u64,
    pub dataset: &'a str,
    pub image_id: u64,
}

/// Applies the steps of `cond` in order.
pub fn apply_condition(img: &Image, cond: &Condition, key: ImageKey<'_>, mode: GaussMode) -> Result<Image> {
    let mut out = img.clone();
    for (step_index, step) in cond.steps().iter().enumerate() {
        if step.is_identity() {
            continue;
        }
        let rng = || {
            RngStream::for_step(&StreamKey {
                seed: key.seed,
                dataset: key.dataset,
                image_id: key.image_id,
                condition: cond.name(),
                step: step_index,
            })
        };
        out = match *step {
            PerturbationStep::SaltPepper(amount) => apply_salt_pepper(&out, amount, &mut rng())?,
            PerturbationStep::Gaussian(strength) => apply_gaussian(&out, strength, &mut rng(), mode)?,
            PerturbationStep::Rotate(angle) => rotate(&out, angle),
        };
    }
    Ok(out)
}
