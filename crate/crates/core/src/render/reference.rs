//! Brute-force renderer used as the correctness oracle for [`super::render`].

use super::raster::{project_sorted, splat_alpha};
use super::{Framebuffer, RenderCamera, Splat2D};
use crate::scalar::Real;
use crate::scene::{Gaussian3D, SkyModel};

/// Per-pixel compositing record.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelTrace {
    /// `(splat index in depth order, weight)` for every contributing splat.
    pub weights: Vec<(usize, f64)>,
    pub rgb: [f64; 3],
    pub transmittance: f64,
}

/// Composites every splat at one pixel in `f64`, without early termination.
pub fn composite_pixel(splats: &[Splat2D<f64>], x: f64, y: f64, sky: &SkyModel) -> PixelTrace {
    let mut transmittance = 1.0;
    let mut rgb = [0.0; 3];
    let mut weights = Vec::new();
    for (i, s) in splats.iter().enumerate() {
        let Some(a) = splat_alpha(s, x, y) else {
            continue;
        };
        let w = a * transmittance;
        for c in 0..3 {
            rgb[c] += w * s.rgb[c];
        }
        weights.push((i, w));
        transmittance *= 1.0 - a;
    }
    for c in 0..3 {
        rgb[c] += transmittance * sky.color[c];
    }
    PixelTrace {
        weights,
        rgb,
        transmittance,
    }
}

pub fn render_reference<T: Real>(
    gaussians: &[Gaussian3D<T>],
    cam: &RenderCamera<T>,
    sky: &SkyModel,
) -> Framebuffer {
    let splats = project_sorted(gaussians, cam);
    let (w, h) = (cam.intrinsics.width, cam.intrinsics.height);
    let mut fb = Framebuffer::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let px = composite_pixel(&splats, x as f64, y as f64, sky);
            let i = fb.index(x, y);
            fb.alpha[i] = (1.0 - px.transmittance) as f32;
            for c in 0..3 {
                fb.rgb[3 * i + c] = px.rgb[c] as f32;
            }
        }
    }
    fb
}
