use crate::image::{quantize, Image};

/// Rotates about the pixel-grid center `((w-1)/2, (h-1)/2)` on a same-size
/// canvas. Positive angles turn the content clockwise as displayed (y axis
/// pointing down). Output pixels are inverse-mapped and bilinearly
/// interpolated; source positions outside the raster read as 0.
pub fn rotate(img: &Image, angle_deg: f64) -> Image {
    if angle_deg % 360.0 == 0.0 {
        return img.clone();
    }
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let (sin, cos) = angle_deg.to_radians().sin_cos();

    let sample = |x: isize, y: isize, c: usize| -> f64 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            f64::from(img.at(x as usize, y as usize, c))
        }
    };

    let mut out = Vec::with_capacity(w * h * ch);
    for y in 0..h {
        for x in 0..w {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            let sx = cx + dx * cos + dy * sin;
            let sy = cy - dx * sin + dy * cos;
            let (fx0, fy0) = (sx.floor(), sy.floor());
            let (fx, fy) = (sx - fx0, sy - fy0);
            let (x0, y0) = (fx0 as isize, fy0 as isize);
            for c in 0..ch {
                let v = (1.0 - fx) * (1.0 - fy) * sample(x0, y0, c)
                    + fx * (1.0 - fy) * sample(x0 + 1, y0, c)
                    + (1.0 - fx) * fy * sample(x0, y0 + 1, c)
                    + fx * fy * sample(x0 + 1, y0 + 1, c);
                out.push(quantize(v));
            }
        }
    }
    img.with_pixels(out)
}
