use std::io::Write;

use super::RenderError;

/// Linear RGB image plus accumulated opacity, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Framebuffer {
    pub width: u32,
    pub height: u32,
    pub rgb: Vec<f32>,
    pub alpha: Vec<f32>,
}

impl Framebuffer {
    pub fn new(width: u32, height: u32) -> Self {
        let n = width as usize * height as usize;
        Self {
            width,
            height,
            rgb: vec![0.0; 3 * n],
            alpha: vec![0.0; n],
        }
    }

    #[inline]
    pub fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    pub fn pixel(&self, x: u32, y: u32) -> [f32; 3] {
        let i = 3 * self.index(x, y);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    pub fn alpha_at(&self, x: u32, y: u32) -> f32 {
        self.alpha[self.index(x, y)]
    }

    /// Largest per-channel absolute difference; infinite on size mismatch.
    pub fn max_abs_diff(&self, other: &Framebuffer) -> f32 {
        if (self.width, self.height) != (other.width, other.height) {
            return f32::INFINITY;
        }
        self.rgb
            .iter()
            .zip(&other.rgb)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f32::max)
    }

    /// 8-bit values: gamma 2.2 encode, then round half up.
    pub fn to_srgb8(&self) -> Vec<u8> {
        self.rgb.iter().map(|&v| encode_channel(v)).collect()
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, RenderError> {
        let mut buf = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut buf, self.width, self.height);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            enc.set_source_gamma(png::ScaledFloat::new(1.0 / 2.2));
            let mut writer = enc
                .write_header()
                .map_err(|e| RenderError::Png(e.to_string()))?;
            writer
                .write_image_data(&self.to_srgb8())
                .map_err(|e| RenderError::Png(e.to_string()))?;
            writer
                .finish()
                .map_err(|e| RenderError::Png(e.to_string()))?;
        }
        Ok(buf)
    }

    pub fn write_png(&self, path: &std::path::Path) -> Result<(), RenderError> {
        let bytes = self.encode_png()?;
        let mut f = std::fs::File::create(path).map_err(|source| RenderError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        f.write_all(&bytes).map_err(|source| RenderError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

pub fn encode_channel(v: f32) -> u8 {
    let v = f64::from(v).clamp(0.0, 1.0);
    (255.0 * v.powf(1.0 / 2.2) + 0.5).floor() as u8
}

/// Decodes an 8-bit RGB PNG into `(width, height, bytes)`.
pub fn decode_png_rgb8(bytes: &[u8]) -> Result<(u32, u32, Vec<u8>), RenderError> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| RenderError::Png(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| RenderError::Png("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| RenderError::Png(e.to_string()))?;
    buf.truncate(info.buffer_size());
    Ok((info.width, info.height, buf))
}
