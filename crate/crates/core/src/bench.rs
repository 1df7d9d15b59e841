//! Benchmark harness: per-pass wall-clock timings for each method and point
//! ordering over an orbiting camera, written as CSV.
//!
//! Point order never changes the atomicmin or splat images, only how fast
//! they are produced, so the harness renders every ordering and keeps the
//! images available for comparison.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use glam::DVec3;
use serde::Serialize;

use crate::camera::Camera;
use crate::image::ImageRGB8;
use crate::io::{self, generate, IoError, SceneSpec};
use crate::point::PointCloud;
use crate::raster::RenderError;
use crate::render::{Method, RenderSettings, Renderer};
use crate::rng::SplitMix64;

/// Fisher-Yates driven by SplitMix64: for i from n-1 down to 1, swap i with
/// `next_u64() % (i + 1)`.
pub fn shuffle_points(cloud: &PointCloud, seed: u64) -> PointCloud {
    let mut rng = SplitMix64::new(seed);
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    for i in (1..order.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    cloud.permuted(&order)
}

/// Spreads the low 21 bits of `v` so bit k lands on bit 3k.
fn spread3(v: u64) -> u64 {
    let mut x = v & 0x1F_FFFF;
    x = (x | x << 32) & 0x001F_0000_0000_FFFF;
    x = (x | x << 16) & 0x001F_0000_FF00_00FF;
    x = (x | x << 8) & 0x100F_00F0_0F00_F00F;
    x = (x | x << 4) & 0x10C3_0C30_C30C_30C3;
    x = (x | x << 2) & 0x1249_2492_4924_9249;
    x
}

/// 63-bit Morton key with x in the lowest bit of each triple.
pub fn morton_key(x: u32, y: u32, z: u32) -> u64 {
    spread3(x as u64) | spread3(y as u64) << 1 | spread3(z as u64) << 2
}

/// Stable sort by Morton key of coordinates quantized to 21 bits over the bounds.
pub fn morton_sort(cloud: &PointCloud) -> PointCloud {
    let Some(bounds) = cloud.bounds() else { return cloud.clone() };
    const MAX: f64 = ((1u32 << 21) - 1) as f64;
    let extent = bounds.extent();
    let quantize = |v: f64, lo: f64, ext: f64| -> u32 {
        if ext > 0.0 {
            ((v - lo) / ext * MAX).floor().clamp(0.0, MAX) as u32
        } else {
            0
        }
    };
    let mut keyed: Vec<(u64, usize)> = cloud
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let x = quantize(p.x, bounds.min.x, extent.x);
            let y = quantize(p.y, bounds.min.y, extent.y);
            let z = quantize(p.z, bounds.min.z, extent.z);
            (morton_key(x, y, z), i)
        })
        .collect();
    keyed.sort_by_key(|&(k, _)| k);
    let order: Vec<usize> = keyed.into_iter().map(|(_, i)| i).collect();
    cloud.permuted(&order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointOrder {
    Original,
    Shuffled(u64),
    Morton,
}

impl PointOrder {
    pub fn apply(self, cloud: &PointCloud) -> PointCloud {
        match self {
            PointOrder::Original => cloud.clone(),
            PointOrder::Shuffled(seed) => shuffle_points(cloud, seed),
            PointOrder::Morton => morton_sort(cloud),
        }
    }
}

impl fmt::Display for PointOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointOrder::Original => f.write_str("original"),
            PointOrder::Shuffled(seed) => write!(f, "shuffled({seed})"),
            PointOrder::Morton => f.write_str("morton"),
        }
    }
}

impl FromStr for PointOrder {
    type Err = String;

    /// `original`, `morton`, `shuffled` (seed 0), `shuffled(N)` or `shuffled:N`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("unknown ordering {s:?} (expected original, shuffled, shuffled(SEED) or morton)");
        match s {
            "original" => Ok(PointOrder::Original),
            "morton" => Ok(PointOrder::Morton),
            "shuffled" => Ok(PointOrder::Shuffled(0)),
            _ => {
                let seed = s
                    .strip_prefix("shuffled(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| s.strip_prefix("shuffled:"))
                    .ok_or_else(bad)?;
                seed.trim().parse().map(PointOrder::Shuffled).map_err(|_| bad())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SceneSource {
    File(PathBuf),
    Generated(SceneSpec),
}

impl SceneSource {
    pub fn load(&self) -> Result<PointCloud, IoError> {
        match self {
            SceneSource::File(path) => io::read_cloud(path),
            SceneSource::Generated(spec) => Ok(generate(spec)),
        }
    }

    /// Report label; generated scenes are marked synthetic.
    pub fn label(&self) -> String {
        match self {
            SceneSource::File(path) => {
                path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
            }
            SceneSource::Generated(spec) => format!("synthetic-{}-{}", spec.kind, spec.count),
        }
    }
}

/// Camera path circling `center` at constant elevation. Frame `k` sits at
/// azimuth `2*pi*k/frames`, so frame indices wrap after one revolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orbit {
    /// `None` centers on the cloud's bounds.
    pub center: Option<DVec3>,
    /// `None` picks 1.2x the bounds diagonal.
    pub radius: Option<f64>,
    pub elevation_deg: f64,
    pub frames: u32,
}

impl Default for Orbit {
    fn default() -> Self {
        Self { center: None, radius: None, elevation_deg: 20.0, frames: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub scene: SceneSource,
    pub width: u32,
    pub height: u32,
    pub fov_y: f64,
    /// Baseline clip planes; `None` derives them from the orbit radius.
    pub near: Option<f64>,
    pub far: Option<f64>,
    pub orbit: Orbit,
    pub methods: Vec<Method>,
    pub orderings: Vec<PointOrder>,
    pub warmup_frames: u32,
    pub measured_frames: u32,
    pub settings: RenderSettings,
    /// Keep every measured frame's image in the report.
    pub keep_images: bool,
}

impl BenchConfig {
    pub fn new(scene: SceneSource) -> Self {
        Self {
            scene,
            width: 512,
            height: 512,
            fov_y: 60.0,
            near: None,
            far: None,
            orbit: Orbit::default(),
            methods: vec![Method::AtomicMin, Method::Splat, Method::BaselineStandard],
            orderings: vec![PointOrder::Original, PointOrder::Shuffled(0), PointOrder::Morton],
            warmup_frames: 2,
            measured_frames: 8,
            settings: RenderSettings::default(),
            keep_images: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("measured frames must be at least 1")]
    NoFrames,
    #[error("orbit needs at least one frame")]
    EmptyOrbit,
    #[error("no methods selected")]
    NoMethods,
    #[error("no orderings selected")]
    NoOrderings,
    #[error("scene has no points to frame the camera around; give an explicit orbit center and radius")]
    EmptyScene,
    #[error("failed to load scene: {0}")]
    Scene(#[from] IoError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// The camera rig resolved against a loaded cloud.
#[derive(Debug, Clone, Copy)]
pub struct CameraPath {
    center: DVec3,
    radius: f64,
    elevation: f64,
    frames: u32,
    template: Camera,
}

impl CameraPath {
    pub fn resolve(config: &BenchConfig, cloud: &PointCloud) -> Result<Self, BenchError> {
        if config.orbit.frames == 0 {
            return Err(BenchError::EmptyOrbit);
        }
        let bounds = cloud.bounds();
        let center = match (config.orbit.center, bounds) {
            (Some(c), _) => c,
            (None, Some(b)) => b.center(),
            (None, None) => return Err(BenchError::EmptyScene),
        };
        let radius = match (config.orbit.radius, bounds) {
            (Some(r), _) => r,
            (None, Some(b)) => (b.extent().length() * 1.2).max(1e-3),
            (None, None) => return Err(BenchError::EmptyScene),
        };
        let near = config.near.unwrap_or(radius * 1e-3);
        let far = config.far.unwrap_or(radius * 10.0);
        let template = Camera::look_at(center, center, DVec3::Y, config.fov_y, config.width, config.height)
            .with_clip(near, far);
        Ok(Self { center, radius, elevation: config.orbit.elevation_deg.to_radians(), frames: config.orbit.frames, template })
    }

    pub fn camera(&self, frame: u32) -> Camera {
        let azimuth = std::f64::consts::TAU * (frame % self.frames) as f64 / self.frames as f64;
        let (se, ce) = self.elevation.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        let mut cam = self.template;
        cam.eye = self.center + DVec3::new(ce * sa, se, ce * ca) * self.radius;
        cam
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub scene: String,
    pub method: String,
    pub ordering: String,
    pub frame: u32,
    pub pass1_ns: u64,
    pub pass2_ns: u64,
    pub pass3_ns: u64,
    pub total_ms: f64,
    pub fragments: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub method: Method,
    pub ordering: PointOrder,
    pub min_ms: f64,
    pub median_ms: f64,
    pub mean_ms: f64,
}

#[derive(Debug, Clone)]
pub struct BenchImage {
    pub method: Method,
    pub ordering: PointOrder,
    pub frame: u32,
    pub image: ImageRGB8,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summaries: Vec<Summary>,
    pub images: Vec<BenchImage>,
    pub path: CameraPath,
}

impl BenchReport {
    pub fn summary(&self, method: Method, ordering: PointOrder) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.method == method && s.ordering == ordering)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{:<18} {:<16} {:>10} {:>10} {:>10}", "method", "ordering", "min_ms", "median_ms", "mean_ms")?;
        for s in &self.summaries {
            writeln!(
                out,
                "{:<18} {:<16} {:>10.3} {:>10.3} {:>10.3}",
                s.method.name(),
                s.ordering.to_string(),
                s.min_ms,
                s.median_ms,
                s.mean_ms
            )?;
        }
        // Informational only: relative to the float z-buffer on the same ordering.
        for s in &self.summaries {
            if s.method.is_baseline() {
                continue;
            }
            if let Some(b) = self.summaries.iter().find(|b| b.method.is_baseline() && b.ordering == s.ordering) {
                writeln!(out, "{} vs {} ({}): {:.2}x", s.method, b.method, s.ordering, b.median_ms / s.median_ms)?;
            }
        }
        Ok(())
    }
}

fn summarize(method: Method, ordering: PointOrder, totals: &mut [f64]) -> Summary {
    totals.sort_by(f64::total_cmp);
    let n = totals.len();
    let median = if n % 2 == 1 { totals[n / 2] } else { (totals[n / 2 - 1] + totals[n / 2]) / 2.0 };
    Summary {
        method,
        ordering,
        min_ms: totals[0],
        median_ms: median,
        mean_ms: totals.iter().sum::<f64>() / n as f64,
    }
}

pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    let cloud = config.scene.load()?;
    run_benchmark_on(config, &cloud)
}

/// Same as [`run_benchmark`] with the scene already loaded.
pub fn run_benchmark_on(config: &BenchConfig, cloud: &PointCloud) -> Result<BenchReport, BenchError> {
    if config.measured_frames == 0 {
        return Err(BenchError::NoFrames);
    }
    if config.methods.is_empty() {
        return Err(BenchError::NoMethods);
    }
    if config.orderings.is_empty() {
        return Err(BenchError::NoOrderings);
    }
    let path = CameraPath::resolve(config, cloud)?;
    let scene = config.scene.label();
    let mut renderer = Renderer::new(config.width, config.height);
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut images = Vec::new();
    for &method in &config.methods {
        for &ordering in &config.orderings {
            let ordered = ordering.apply(cloud);
            for frame in 0..config.warmup_frames {
                renderer.render(method, &ordered, &path.camera(frame), &config.settings)?;
            }
            let mut totals = Vec::with_capacity(config.measured_frames as usize);
            for frame in 0..config.measured_frames {
                let (image, stats) = renderer.render(method, &ordered, &path.camera(frame), &config.settings)?;
                let pass = |i: usize| stats.pass_ns.get(i).copied().unwrap_or(0);
                let (p1, p2, p3) = (pass(0), pass(1), pass(2));
                let total_ms = (p1 + p2 + p3) as f64 / 1e6;
                totals.push(total_ms);
                rows.push(BenchRow {
                    scene: scene.clone(),
                    method: method.name().to_string(),
                    ordering: ordering.to_string(),
                    frame,
                    pass1_ns: p1,
                    pass2_ns: p2,
                    pass3_ns: p3,
                    total_ms,
                    fragments: stats.fragments_written,
                    workers: config.settings.workers.get(),
                });
                if config.keep_images {
                    images.push(BenchImage { method, ordering, frame, image });
                }
            }
            summaries.push(summarize(method, ordering, &mut totals));
        }
    }
    Ok(BenchReport { rows, summaries, images, path })
}
