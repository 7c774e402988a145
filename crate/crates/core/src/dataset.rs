//! Raw dataset containers (MNIST IDX, CIFAR-10 binary batches), seeded
//! sampling, sample manifests and lossless PNG persistence.

use std::fmt;
use std::fs;
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;

use image::{ColorType, DynamicImage, ImageFormat, ImageReader};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::rng::RngStream;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

pub const CIFAR_SIDE: usize = 32;
pub const CIFAR_PLANE: usize = CIFAR_SIDE * CIFAR_SIDE;
/// One label byte followed by planar R, G and B.
pub const CIFAR_RECORD: usize = 1 + 3 * CIFAR_PLANE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetId {
    Mnist,
    Cifar10,
}

impl DatasetId {
    pub const ALL: [DatasetId; 2] = [DatasetId::Mnist, DatasetId::Cifar10];

    pub fn name(self) -> &'static str {
        match self {
            DatasetId::Mnist => "mnist",
            DatasetId::Cifar10 => "cifar10",
        }
    }

    /// (width, height, channels) of every image in the dataset.
    pub fn shape(self) -> (usize, usize, usize) {
        match self {
            DatasetId::Mnist => (28, 28, 1),
            DatasetId::Cifar10 => (32, 32, 3),
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            DatasetId::Mnist => "MNIST",
            DatasetId::Cifar10 => "CIFAR-10",
        }
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mnist" => Ok(DatasetId::Mnist),
            "cifar10" | "cifar-10" => Ok(DatasetId::Cifar10),
            other => Err(Error::Argument(format!("unknown dataset `{other}`"))),
        }
    }
}

fn be_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn idx_header(bytes: &[u8], magic: u32, header_len: usize) -> Result<()> {
    if bytes.len() < header_len {
        return Err(Error::Length {
            expected: header_len,
            found: bytes.len(),
        });
    }
    let found = be_u32(bytes, 0);
    if found != magic {
        return Err(Error::Format(format!(
            "bad IDX magic 0x{found:08x}, expected 0x{magic:08x}"
        )));
    }
    Ok(())
}

/// Parses an IDX image file (magic `0x00000803`, big-endian n, rows, cols).
pub fn parse_idx(bytes: &[u8]) -> Result<Vec<Image>> {
    idx_header(bytes, IDX_IMAGES_MAGIC, 16)?;
    let n = be_u32(bytes, 4) as usize;
    let rows = be_u32(bytes, 8) as usize;
    let cols = be_u32(bytes, 12) as usize;
    let size = rows * cols;
    let expected = 16 + n * size;
    if bytes.len() != expected {
        return Err(Error::Length {
            expected,
            found: bytes.len(),
        });
    }
    if size == 0 && n > 0 {
        return Err(Error::Format(format!("degenerate image size {rows}x{cols}")));
    }
    bytes[16..]
        .chunks_exact(size.max(1))
        .take(n)
        .map(|px| Image::gray(cols, rows, px.to_vec()))
        .collect()
}

/// Parses an IDX label file (magic `0x00000801`).
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    idx_header(bytes, IDX_LABELS_MAGIC, 8)?;
    let n = be_u32(bytes, 4) as usize;
    if bytes.len() != 8 + n {
        return Err(Error::Length {
            expected: 8 + n,
            found: bytes.len(),
        });
    }
    Ok(bytes[8..].to_vec())
}

/// Parses a CIFAR-10 binary batch into (label, interleaved RGB image) pairs.
pub fn parse_cifar10_batch(bytes: &[u8]) -> Result<Vec<(u8, Image)>> {
    if !bytes.len().is_multiple_of(CIFAR_RECORD) {
        let records = bytes.len().div_ceil(CIFAR_RECORD).max(1);
        return Err(Error::Length {
            expected: records * CIFAR_RECORD,
            found: bytes.len(),
        });
    }
    bytes
        .chunks_exact(CIFAR_RECORD)
        .enumerate()
        .map(|(i, rec)| {
            let label = rec[0];
            if label > 9 {
                return Err(Error::Format(format!("record {i}: label {label} out of range 0..=9")));
            }
            let (r, rest) = rec[1..].split_at(CIFAR_PLANE);
            let (g, b) = rest.split_at(CIFAR_PLANE);
            let mut px = Vec::with_capacity(3 * CIFAR_PLANE);
            for k in 0..CIFAR_PLANE {
                px.extend_from_slice(&[r[k], g[k], b[k]]);
            }
            Ok((label, Image::rgb(CIFAR_SIDE, CIFAR_SIDE, px)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image_id: u64,
    pub label: u8,
    pub file: String,
}

/// Provenance record of one seeded draw, serialized as JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleManifest {
    pub dataset: DatasetId,
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
}

impl SampleManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: SampleManifest = serde_json::from_str(text)?;
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = m.entries.iter().find(|e| !seen.insert(e.image_id)) {
            return Err(Error::Format(format!(
                "duplicate image_id {} in manifest",
                dup.image_id
            )));
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Relative path of a pristine image inside a dataset's output directory.
pub fn pristine_file_name(dataset: DatasetId, image_id: u64) -> String {
    format!("pristine/{dataset}_{image_id}.png")
}

/// Draws `n` distinct indices from `0..population` with a seeded partial
/// Fisher-Yates shuffle. The order of the result is the draw order.
pub fn sample_indices(dataset: DatasetId, population: usize, n: usize, seed: u64) -> Result<Vec<usize>> {
    if n > population {
        return Err(Error::Argument(format!(
            "cannot sample {n} images from a population of {population}"
        )));
    }
    let mut rng = RngStream::for_sampling(seed, dataset.name());
    let mut idx: Vec<usize> = (0..population).collect();
    for i in 0..n {
        let j = i + rng.below((population - i) as u64) as usize;
        idx.swap(i, j);
    }
    idx.truncate(n);
    Ok(idx)
}

/// Samples `n` images and returns the manifest alongside the chosen images.
pub fn sample_images(
    dataset: DatasetId,
    images: &[Image],
    labels: &[u8],
    n: usize,
    seed: u64,
) -> Result<(SampleManifest, Vec<Image>)> {
    if labels.len() != images.len() {
        return Err(Error::Argument(format!(
            "{} images but {} labels",
            images.len(),
            labels.len()
        )));
    }
    let picks = sample_indices(dataset, images.len(), n, seed)?;
    let entries = picks
        .iter()
        .map(|&i| ManifestEntry {
            image_id: i as u64,
            label: labels[i],
            file: pristine_file_name(dataset, i as u64),
        })
        .collect();
    let chosen = picks.iter().map(|&i| images[i].clone()).collect();
    Ok((SampleManifest { dataset, seed, entries }, chosen))
}

/// Encodes `img` as 8-bit gray or RGB PNG.
pub fn write_image_png(img: &Image, path: &Path) -> Result<()> {
    let color = if img.channels() == 1 {
        ColorType::L8
    } else {
        ColorType::Rgb8
    };
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let encoder = image::codecs::png::PngEncoder::new(BufWriter::new(file));
    image::ImageEncoder::write_image(
        encoder,
        img.pixels(),
        img.width() as u32,
        img.height() as u32,
        color.into(),
    )
    .map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_image_png(path: &Path) -> Result<Image> {
    let decoded = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    if decoded.format() != Some(ImageFormat::Png) {
        return Err(Error::Format(format!("{} is not a PNG file", path.display())));
    }
    let dynamic = decoded.decode().map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    let (w, h) = (dynamic.width() as usize, dynamic.height() as usize);
    match dynamic {
        DynamicImage::ImageLuma8(buf) => Image::gray(w, h, buf.into_raw()),
        DynamicImage::ImageRgb8(buf) => Image::rgb(w, h, buf.into_raw()),
        _ => Err(Error::UnsupportedDepth(path.to_path_buf())),
    }
}
