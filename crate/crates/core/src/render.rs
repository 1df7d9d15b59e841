//! Whole-frame pipelines over reusable buffers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baseline::{render_zbuffer, DepthMode, FloatDepthBuffer};
use crate::camera::Camera;
use crate::depthmap::DepthMapper;
use crate::framebuffer::Framebuffer64;
use crate::image::ImageRGB8;
use crate::parallel::Workers;
use crate::point::PointCloud;
use crate::raster::{rasterize_atomicmin, resolve_and_clear, RenderError, RenderStats};
use crate::splat::{render_splat_into, AccumBuffer, Epsilon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[serde(rename = "atomicmin")]
    AtomicMin,
    Splat,
    #[serde(alias = "baseline")]
    BaselineStandard,
    BaselineReversed,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::AtomicMin, Method::Splat, Method::BaselineStandard, Method::BaselineReversed];

    pub fn name(self) -> &'static str {
        match self {
            Method::AtomicMin => "atomicmin",
            Method::Splat => "splat",
            Method::BaselineStandard => "baseline-standard",
            Method::BaselineReversed => "baseline-reversed",
        }
    }

    pub fn is_baseline(self) -> bool {
        matches!(self, Method::BaselineStandard | Method::BaselineReversed)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(Method::BaselineStandard),
            _ => Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
                format!("unknown method {s:?} (expected atomicmin, splat, baseline-standard or baseline-reversed)")
            }),
        }
    }
}

/// Everything besides the cloud and camera that determines the image.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderSettings {
    pub mapper: DepthMapper,
    pub epsilon: Epsilon,
    pub background_rgb: u32,
    pub workers: Workers,
}

impl Default for RenderSettings {
    fn default() -> Self {
        Self { mapper: DepthMapper::default(), epsilon: Epsilon::DEFAULT, background_rgb: 0, workers: Workers::default() }
    }
}

/// Owns the per-method buffers for one image size so repeated frames do not
/// reallocate. Every buffer is left cleared after each frame.
pub struct Renderer {
    width: u32,
    height: u32,
    fb: Framebuffer64,
    acc: Option<AccumBuffer>,
    zbuffer: Option<FloatDepthBuffer>,
}

impl Renderer {
    pub fn new(width: u32, height: u32) -> Self {
        Self { width, height, fb: Framebuffer64::new(width, height), acc: None, zbuffer: None }
    }

    /// Renders one frame. `pass_ns` has two entries for atomicmin and the
    /// baselines (raster, resolve) and three for splat.
    pub fn render(
        &mut self,
        method: Method,
        cloud: &PointCloud,
        camera: &Camera,
        settings: &RenderSettings,
    ) -> Result<(ImageRGB8, RenderStats), RenderError> {
        let workers = settings.workers;
        match method {
            Method::AtomicMin => {
                let mut stats = rasterize_atomicmin(cloud, camera, &settings.mapper, &self.fb, workers)?;
                let (image, resolve) = resolve_and_clear(&self.fb, settings.background_rgb, workers);
                stats.pass_ns.extend(resolve.pass_ns);
                Ok((image, stats))
            }
            Method::Splat => {
                let (w, h) = (self.width, self.height);
                let acc = self.acc.get_or_insert_with(|| AccumBuffer::new(w, h));
                render_splat_into(
                    cloud,
                    camera,
                    &settings.mapper,
                    settings.epsilon,
                    settings.background_rgb,
                    &mut self.fb,
                    acc,
                    workers,
                )
            }
            Method::BaselineStandard | Method::BaselineReversed => {
                let mode = if method == Method::BaselineStandard { DepthMode::Standard } else { DepthMode::Reversed };
                if self.zbuffer.as_ref().map(FloatDepthBuffer::mode) != Some(mode) {
                    self.zbuffer = Some(FloatDepthBuffer::new(self.width, self.height, mode));
                }
                let buffer = self.zbuffer.as_mut().expect("allocated above");
                render_zbuffer(cloud, camera, buffer, settings.background_rgb)
            }
        }
    }
}

/// One-shot render with freshly allocated buffers.
pub fn render(
    method: Method,
    cloud: &PointCloud,
    camera: &Camera,
    settings: &RenderSettings,
) -> Result<(ImageRGB8, RenderStats), RenderError> {
    Renderer::new(camera.width, camera.height).render(method, cloud, camera, settings)
}
