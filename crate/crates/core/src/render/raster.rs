//! Tile-based front-to-back compositing.

use rayon::prelude::*;

use super::{project_gaussian, Framebuffer, RenderCamera, Splat2D};
use crate::scalar::Real;
use crate::scene::{Gaussian3D, SkyModel};

pub const TILE_SIZE: u32 = 16;
pub const ALPHA_MAX: f64 = 0.99;
pub const ALPHA_MIN: f64 = 1.0 / 255.0;
pub const TRANSMITTANCE_MIN: f64 = 1e-4;

/// Opacity contributed by `splat` at pixel coordinate `(x, y)`, or `None`
/// when the pixel is outside the support ellipse or below [`ALPHA_MIN`].
/// Both renderers go through this function so their culling agrees.
#[inline]
pub fn splat_alpha(splat: &Splat2D<f64>, x: f64, y: f64) -> Option<f64> {
    let dx = x - splat.mean2d.x;
    let dy = y - splat.mean2d.y;
    let c = &splat.conic;
    let power = c[(0, 0)] * dx * dx + (c[(0, 1)] + c[(1, 0)]) * dx * dy + c[(1, 1)] * dy * dy;
    let cutoff = super::project::SIGMA_CUTOFF;
    if !(power >= 0.0) || power > cutoff * cutoff {
        return None;
    }
    let alpha = (splat.opacity * (-0.5 * power).exp()).min(ALPHA_MAX);
    (alpha >= ALPHA_MIN).then_some(alpha)
}

/// Projects, culls and depth-sorts (ties by input index).
pub fn project_sorted<T: Real>(
    gaussians: &[Gaussian3D<T>],
    cam: &RenderCamera<T>,
) -> Vec<Splat2D<f64>> {
    let mut splats: Vec<(usize, Splat2D<f64>)> = gaussians
        .par_iter()
        .enumerate()
        .filter_map(|(i, g)| project_gaussian(g, cam).map(|s| (i, s.cast())))
        .collect();
    splats.sort_by(|a, b| a.1.depth.total_cmp(&b.1.depth).then(a.0.cmp(&b.0)));
    splats.into_iter().map(|(_, s)| s).collect()
}

struct TileGrid {
    cols: u32,
    rows: u32,
}

/// Splat indices per tile, in depth order.
fn bin_splats(splats: &[Splat2D<f64>], width: u32, height: u32) -> (TileGrid, Vec<Vec<u32>>) {
    let grid = TileGrid {
        cols: width.div_ceil(TILE_SIZE),
        rows: height.div_ceil(TILE_SIZE),
    };
    let mut bins = vec![Vec::new(); (grid.cols * grid.rows) as usize];
    let ts = TILE_SIZE as f64;
    for (i, s) in splats.iter().enumerate() {
        let e = s.extent() * (1.0 + 1e-9) + nalgebra::Vector2::repeat(1e-9);
        let clamp_col = |v: f64| (v / ts).floor().clamp(0.0, (grid.cols - 1) as f64) as u32;
        let clamp_row = |v: f64| (v / ts).floor().clamp(0.0, (grid.rows - 1) as f64) as u32;
        let (x0, x1) = (s.mean2d.x - e.x, s.mean2d.x + e.x);
        let (y0, y1) = (s.mean2d.y - e.y, s.mean2d.y + e.y);
        if x1 < 0.0 || y1 < 0.0 || x0 > (width - 1) as f64 || y0 > (height - 1) as f64 {
            continue;
        }
        for row in clamp_row(y0)..=clamp_row(y1) {
            for col in clamp_col(x0)..=clamp_col(x1) {
                bins[(row * grid.cols + col) as usize].push(i as u32);
            }
        }
    }
    (grid, bins)
}

/// Renders already projected and sorted splats with the tiled fast path.
pub fn rasterize(splats: &[Splat2D<f64>], width: u32, height: u32, sky: &SkyModel) -> Framebuffer {
    let (grid, bins) = bin_splats(splats, width, height);
    let sky32 = sky.color.map(|c| c as f32);
    let tiles: Vec<(u32, Vec<f32>, Vec<f32>)> = (0..grid.cols * grid.rows)
        .into_par_iter()
        .map(|tile| {
            let (col, row) = (tile % grid.cols, tile / grid.cols);
            let x0 = col * TILE_SIZE;
            let y0 = row * TILE_SIZE;
            let x1 = (x0 + TILE_SIZE).min(width);
            let y1 = (y0 + TILE_SIZE).min(height);
            let n = ((x1 - x0) * (y1 - y0)) as usize;
            let mut rgb = Vec::with_capacity(3 * n);
            let mut alpha = Vec::with_capacity(n);
            let bin = &bins[tile as usize];
            for y in y0..y1 {
                for x in x0..x1 {
                    let mut transmittance = 1.0f32;
                    let mut color = [0.0f32; 3];
                    for &si in bin {
                        let s = &splats[si as usize];
                        let Some(a) = splat_alpha(s, x as f64, y as f64) else {
                            continue;
                        };
                        let a = a as f32;
                        let w = a * transmittance;
                        for c in 0..3 {
                            color[c] += w * s.rgb[c] as f32;
                        }
                        transmittance *= 1.0 - a;
                        if transmittance < TRANSMITTANCE_MIN as f32 {
                            break;
                        }
                    }
                    for c in 0..3 {
                        rgb.push(color[c] + transmittance * sky32[c]);
                    }
                    alpha.push(1.0 - transmittance);
                }
            }
            (tile, rgb, alpha)
        })
        .collect();

    let mut fb = Framebuffer::new(width, height);
    for (tile, rgb, alpha) in tiles {
        let (col, row) = (tile % grid.cols, tile / grid.cols);
        let x0 = col * TILE_SIZE;
        let y0 = row * TILE_SIZE;
        let x1 = (x0 + TILE_SIZE).min(width);
        let tw = (x1 - x0) as usize;
        for (k, a) in alpha.iter().enumerate() {
            let x = x0 + (k % tw) as u32;
            let y = y0 + (k / tw) as u32;
            let i = fb.index(x, y);
            fb.alpha[i] = *a;
            fb.rgb[3 * i..3 * i + 3].copy_from_slice(&rgb[3 * k..3 * k + 3]);
        }
    }
    fb
}

/// Tile-based renderer: projects every Gaussian, bins splats into 16x16
/// tiles and composites front to back in `f32`, stopping once the
/// transmittance falls below [`TRANSMITTANCE_MIN`].
pub fn render<T: Real>(
    gaussians: &[Gaussian3D<T>],
    cam: &RenderCamera<T>,
    sky: &SkyModel,
) -> Framebuffer {
    let splats = project_sorted(gaussians, cam);
    rasterize(&splats, cam.intrinsics.width, cam.intrinsics.height, sky)
}
