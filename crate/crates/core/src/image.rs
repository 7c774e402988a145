//! In-memory 8-bit images and the floating-point luminance plane used by the
//! metric code.

use crate::error::{Error, Result};

/// BT.601 luma weights.
const LUMA_R: f64 = 0.299;
const LUMA_G: f64 = 0.587;
const LUMA_B: f64 = 0.114;

/// Row-major 8-bit image with 1 (gray) or 3 (interleaved RGB) channels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for Image {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Image")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Size(format!("image must be at least 1x1, got {width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::Argument(format!("channels must be 1 or 3, got {channels}")));
        }
        let expected = width * height * channels;
        if pixels.len() != expected {
            return Err(Error::Length {
                expected,
                found: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            pixels,
        })
    }

    pub fn gray(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 1, pixels)
    }

    pub fn rgb(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 3, pixels)
    }

    /// Image with every element set to `value`.
    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Same geometry, new buffer. Callers guarantee the length.
    pub(crate) fn with_pixels(&self, pixels: Vec<u8>) -> Self {
        debug_assert_eq!(pixels.len(), self.pixels.len());
        Self {
            width: self.width,
            height: self.height,
            channels: self.channels,
            pixels,
        }
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    /// Element at column `x`, row `y`, channel `c`.
    pub fn at(&self, x: usize, y: usize, c: usize) -> u8 {
        self.pixels[(y * self.width + x) * self.channels + c]
    }

    /// Single luminance plane: the gray values themselves, or BT.601 luma
    /// for RGB input.
    pub fn luma_plane(&self) -> FloatPlane {
        let gray = match self.channels {
            1 => self.clone(),
            _ => rgb_to_luma(self).expect("3-channel image"),
        };
        FloatPlane {
            width: gray.width,
            height: gray.height,
            values: gray.pixels.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

/// Converts RGB to a single luma channel, `round(0.299 R + 0.587 G + 0.114 B)`.
pub fn rgb_to_luma(img: &Image) -> Result<Image> {
    if img.channels != 3 {
        return Err(Error::Argument(format!(
            "rgb_to_luma needs a 3-channel image, got {} channel(s)",
            img.channels
        )));
    }
    let pixels = img
        .pixels
        .chunks_exact(3)
        .map(|px| {
            let y = LUMA_R * f64::from(px[0]) + LUMA_G * f64::from(px[1]) + LUMA_B * f64::from(px[2]);
            quantize(y)
        })
        .collect();
    Image::gray(img.width, img.height, pixels)
}

/// Round half away from zero and clamp into the 8-bit range.
pub(crate) fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Row-major plane of real-valued samples.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPlane {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl FloatPlane {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::Length {
                expected: width * height,
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("non-finite sample at index {bad}")));
        }
        Ok(Self { width, height, values })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self { width, height, values }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Halves each dimension by averaging 2x2 blocks; a trailing odd row or
/// column is dropped.
pub fn box_downsample2(p: &FloatPlane) -> Result<FloatPlane> {
    if p.width < 2 || p.height < 2 {
        return Err(Error::Size(format!(
            "box_downsample2 needs at least 2x2, got {}x{}",
            p.width, p.height
        )));
    }
    let (w, h) = (p.width / 2, p.height / 2);
    Ok(FloatPlane::from_fn(w, h, |x, y| {
        let (sx, sy) = (2 * x, 2 * y);
        (p.get(sx, sy) + p.get(sx + 1, sy) + p.get(sx, sy + 1) + p.get(sx + 1, sy + 1)) / 4.0
    }))
}
