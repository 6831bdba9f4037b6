//! Image descriptor extractors.
//!
//! These are compact stand-ins registered under the MPEG-7 descriptor names:
//! a 2x2 grid of mean colours for colour layout and an angular foreground
//! histogram for contour shape. They are deterministic and cheap, which is
//! all the query engine relies on.

use std::f64::consts::PI;

use crate::datamodel::ImageRaster;
use crate::error::{Error, Result};

pub const COLOR_LAYOUT_DIM: usize = 12;
pub const CONTOUR_SHAPE_BINS: usize = 16;
const GRID: u32 = 2;
const FOREGROUND_LUMINANCE: f64 = 128.0;

fn non_empty(img: &ImageRaster) -> Result<()> {
    if img.is_empty() {
        return Err(Error::runtime("cannot extract a descriptor from an empty raster"));
    }
    Ok(())
}

/// Pixel range `[start, end)` of grid cell `i` along an axis of `len`
/// pixels. Cells never come out empty; on tiny rasters they overlap.
fn cell_range(i: u32, len: u32) -> (u32, u32) {
    let start = (i * len / GRID).min(len - 1);
    let end = ((i + 1) * len / GRID).max(start + 1);
    (start, end)
}

/// Mean R, G, B of each cell of a 2x2 grid, cells in row-major order.
pub fn color_layout(img: &ImageRaster) -> Result<Vec<f64>> {
    non_empty(img)?;
    let mut out = Vec::with_capacity(COLOR_LAYOUT_DIM);
    for gy in 0..GRID {
        let (y0, y1) = cell_range(gy, img.height());
        for gx in 0..GRID {
            let (x0, x1) = cell_range(gx, img.width());
            let mut sum = [0u64; 3];
            for y in y0..y1 {
                for x in x0..x1 {
                    let p = img.pixel(x, y);
                    for c in 0..3 {
                        sum[c] += p[c] as u64;
                    }
                }
            }
            let n = ((y1 - y0) * (x1 - x0)) as f64;
            out.extend(sum.iter().map(|&s| s as f64 / n));
        }
    }
    Ok(out)
}

pub fn luminance(p: [u8; 3]) -> f64 {
    0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64
}

/// Normalized 16-bin histogram of foreground pixel angles around the
/// foreground centroid. Foreground is luminance >= 128; a raster without
/// foreground yields the zero vector.
pub fn contour_shape(img: &ImageRaster) -> Result<Vec<f64>> {
    non_empty(img)?;
    let mut fg = Vec::new();
    for y in 0..img.height() {
        for x in 0..img.width() {
            if luminance(img.pixel(x, y)) >= FOREGROUND_LUMINANCE {
                fg.push((x as f64 + 0.5, y as f64 + 0.5));
            }
        }
    }
    let mut hist = vec![0.0; CONTOUR_SHAPE_BINS];
    if fg.is_empty() {
        return Ok(hist);
    }
    let n = fg.len() as f64;
    let cx = fg.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = fg.iter().map(|p| p.1).sum::<f64>() / n;
    for (x, y) in &fg {
        let angle = (y - cy).atan2(x - cx);
        let bin = ((angle + PI) / (2.0 * PI) * CONTOUR_SHAPE_BINS as f64).floor() as usize;
        hist[bin.min(CONTOUR_SHAPE_BINS - 1)] += 1.0;
    }
    for h in &mut hist {
        *h /= n;
    }
    Ok(hist)
}
