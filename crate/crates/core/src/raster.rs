//! Atomic-min rasterization and the resolve-and-clear pass.

use std::time::Instant;

use crate::camera::{Camera, CameraError};
use crate::depthmap::DepthMapper;
use crate::fragment::{decode_rgb, encode_rgb, PackedFragment};
use crate::framebuffer::Framebuffer64;
use crate::image::ImageRGB8;
use crate::parallel::{for_each_range_mut, sum_over_chunks, Workers};
use crate::point::PointCloud;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error("buffer is {buffer_width}x{buffer_height} but the camera renders {camera_width}x{camera_height}")]
    DimensionMismatch { buffer_width: u32, buffer_height: u32, camera_width: u32, camera_height: u32 },
    #[error(transparent)]
    Camera(#[from] CameraError),
}

pub(crate) fn check_target(camera: &Camera, width: u32, height: u32) -> Result<(), RenderError> {
    camera.validate()?;
    if camera.width != width || camera.height != height {
        return Err(RenderError::DimensionMismatch {
            buffer_width: width,
            buffer_height: height,
            camera_width: camera.width,
            camera_height: camera.height,
        });
    }
    Ok(())
}

/// Counters and wall-clock timings for one or more passes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenderStats {
    pub points_in: u64,
    /// Points that survived projection and quantization (and, for the splat
    /// accumulation pass, the depth test).
    pub fragments_written: u64,
    /// Nanoseconds per pass, in execution order.
    pub pass_ns: Vec<u64>,
}

impl RenderStats {
    pub(crate) fn single(points_in: u64, fragments_written: u64, started: Instant) -> Self {
        Self { points_in, fragments_written, pass_ns: vec![elapsed_ns(started)] }
    }

    pub fn total_ns(&self) -> u64 {
        self.pass_ns.iter().sum()
    }
}

pub(crate) fn elapsed_ns(started: Instant) -> u64 {
    started.elapsed().as_nanos().min(u64::MAX as u128) as u64
}

/// Writes the closest fragment of every visible point into `fb`.
///
/// Each point is projected, its depth quantized, and the packed
/// (depth, color) word merged with `fetch_min`. Points behind the camera,
/// outside the image, or outside the mapper's range are culled. The result is
/// identical for any point order or worker count.
pub fn rasterize_atomicmin(
    cloud: &PointCloud,
    camera: &Camera,
    mapper: &DepthMapper,
    fb: &Framebuffer64,
    workers: Workers,
) -> Result<RenderStats, RenderError> {
    check_target(camera, fb.width(), fb.height())?;
    let started = Instant::now();
    let projector = camera.projector();
    let capacity = mapper.capacity();
    let width = camera.width;
    let written = sum_over_chunks(cloud.points(), workers, |_, chunk| {
        let mut n = 0;
        for p in chunk {
            let Some(hit) = projector.project(p) else { continue };
            let Some(index) = mapper.quantize(hit.depth) else { continue };
            if index >= capacity {
                continue;
            }
            let Ok(frag) = PackedFragment::pack(index, encode_rgb(p.r, p.g, p.b)) else { continue };
            fb.atomic_min(hit.pixel_index(width), frag);
            n += 1;
        }
        n
    });
    Ok(RenderStats::single(cloud.len() as u64, written, started))
}

/// Converts the framebuffer to an image and resets every cell to
/// [`PackedFragment::CLEAR`] in the same sweep. Untouched cells get
/// `background_rgb`.
pub fn resolve_and_clear(fb: &Framebuffer64, background_rgb: u32, workers: Workers) -> (ImageRGB8, RenderStats) {
    let started = Instant::now();
    let mut image = ImageRGB8::new(fb.width(), fb.height());
    let background = decode_rgb(background_rgb);
    for_each_range_mut(fb.len(), image.pixels_mut(), 3, workers, |range, out| {
        for (px, i) in out.chunks_exact_mut(3).zip(range) {
            let cell = fb.take(i);
            let rgb = if cell == PackedFragment::CLEAR { background } else { decode_rgb(cell.rgb()) };
            px.copy_from_slice(&rgb);
        }
    });
    (image, RenderStats::single(0, 0, started))
}
