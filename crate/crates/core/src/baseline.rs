//! Single-precision z-buffer, emulating the fixed-function point pipeline.
//!
//! Depth goes through the classic perspective warp and is stored as `f32`,
//! so distant surfaces a millimeter apart often land on the same value and
//! the survivor is decided by submission order (z-fighting). Used as the
//! precision and timing reference for the integer pipelines.

use std::time::Instant;

use crate::camera::Camera;
use crate::fragment::{decode_rgb, encode_rgb};
use crate::image::ImageRGB8;
use crate::point::PointCloud;
use crate::raster::{check_target, elapsed_ns, RenderError, RenderStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DepthMode {
    /// near -> 0, far -> 1, closer wins when smaller.
    #[default]
    Standard,
    /// near -> 1, far -> 0, closer wins when larger.
    Reversed,
}

impl DepthMode {
    pub fn clear_depth(self) -> f32 {
        match self {
            DepthMode::Standard => 1.0,
            DepthMode::Reversed => 0.0,
        }
    }

    /// `true` if `candidate` should replace `stored`. Equal depths pass, so the
    /// later point wins a tie.
    #[inline]
    fn passes(self, candidate: f32, stored: f32) -> bool {
        match self {
            DepthMode::Standard => candidate <= stored,
            DepthMode::Reversed => candidate >= stored,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("view depth must be positive, got {0}")]
pub struct NonPositiveDepth(pub f64);

/// Window-space depth in `[0, 1]` for a view distance `z_view`, evaluated in
/// f64 and rounded once to f32.
pub fn ndc_depth_f32(z_view: f64, near: f64, far: f64, mode: DepthMode) -> Result<f32, NonPositiveDepth> {
    if !(z_view > 0.0) {
        return Err(NonPositiveDepth(z_view));
    }
    // ((f+n)/(f-n) - 2fn/((f-n)z) + 1)/2 rearranged so both clip planes land
    // exactly on 0 and 1.
    let d = far * (z_view - near) / ((far - near) * z_view);
    Ok(match mode {
        DepthMode::Standard => d as f32,
        DepthMode::Reversed => (1.0 - d) as f32,
    })
}

const EMPTY: u32 = u32::MAX;

/// Per-pixel f32 depth and 24-bit color.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatDepthBuffer {
    width: u32,
    height: u32,
    mode: DepthMode,
    depth: Vec<f32>,
    color: Vec<u32>,
}

impl FloatDepthBuffer {
    pub fn new(width: u32, height: u32, mode: DepthMode) -> Self {
        let n = width as usize * height as usize;
        Self { width, height, mode, depth: vec![mode.clear_depth(); n], color: vec![EMPTY; n] }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn mode(&self) -> DepthMode {
        self.mode
    }

    pub fn depth(&self, x: u32, y: u32) -> f32 {
        self.depth[y as usize * self.width as usize + x as usize]
    }

    /// `None` if no point has been written to the pixel.
    pub fn color(&self, x: u32, y: u32) -> Option<u32> {
        let c = self.color[y as usize * self.width as usize + x as usize];
        (c != EMPTY).then_some(c)
    }

    pub fn clear(&mut self) {
        self.depth.fill(self.mode.clear_depth());
        self.color.fill(EMPTY);
    }

    pub fn is_clear(&self) -> bool {
        self.color.iter().all(|&c| c == EMPTY) && self.depth.iter().all(|&d| d == self.mode.clear_depth())
    }

    pub fn to_image(&self, background_rgb: u32) -> ImageRGB8 {
        let mut image = ImageRGB8::new(self.width, self.height);
        let background = decode_rgb(background_rgb);
        for (px, &c) in image.pixels_mut().chunks_exact_mut(3).zip(&self.color) {
            px.copy_from_slice(&if c == EMPTY { background } else { decode_rgb(c) });
        }
        image
    }
}

/// Sequential z-buffer rasterization. Points outside `[near, far]` are culled.
pub fn rasterize_zbuffer(
    cloud: &PointCloud,
    camera: &Camera,
    buffer: &mut FloatDepthBuffer,
) -> Result<RenderStats, RenderError> {
    check_target(camera, buffer.width, buffer.height)?;
    let started = Instant::now();
    let projector = camera.projector();
    let (near, far, mode) = (camera.near, camera.far, buffer.mode);
    let mut written = 0;
    for p in cloud.points() {
        let Some(hit) = projector.project(p) else { continue };
        if hit.depth < near || hit.depth > far {
            continue;
        }
        let Ok(d) = ndc_depth_f32(hit.depth, near, far, mode) else { continue };
        let i = hit.pixel_index(camera.width);
        if mode.passes(d, buffer.depth[i]) {
            buffer.depth[i] = d;
            buffer.color[i] = encode_rgb(p.r, p.g, p.b);
            written += 1;
        }
    }
    Ok(RenderStats::single(cloud.len() as u64, written, started))
}

/// Rasterize, read back the image and clear. Two timed passes.
pub fn render_zbuffer(
    cloud: &PointCloud,
    camera: &Camera,
    buffer: &mut FloatDepthBuffer,
    background_rgb: u32,
) -> Result<(ImageRGB8, RenderStats), RenderError> {
    let mut stats = rasterize_zbuffer(cloud, camera, buffer)?;
    let started = Instant::now();
    let image = buffer.to_image(background_rgb);
    buffer.clear();
    stats.pass_ns.push(elapsed_ns(started));
    Ok((image, stats))
}
