//! Gaussian splat rendering: EWA projection, a tiled fast path, a
//! brute-force reference and rig-level image generation.

mod framebuffer;
mod project;
pub mod raster;
mod reference;
mod rig;

use std::path::PathBuf;

pub use framebuffer::{decode_png_rgb8, encode_channel, Framebuffer};
pub use project::{
    perspective_jacobian, project_gaussian, RenderCamera, Splat2D, LOW_PASS, SIGMA_CUTOFF,
};
pub use raster::{project_sorted, rasterize, render, splat_alpha, TILE_SIZE};
pub use reference::{composite_pixel, render_reference, PixelTrace};
pub use rig::{image_path, render_rig, RenderManifest, RenderOptions, RenderRecord, MANIFEST_FILE};

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("png: {0}")]
    Png(String),
    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
}
