//! C interface to `pointraster`.
//!
//! Objects are opaque handles created by `pr_*_new`/`pr_*_load`/... and
//! released with the matching `pr_*_free`. Every fallible function returns a
//! [`PrStatus`]; on failure a human-readable message is kept per thread and
//! can be fetched with [`pr_last_error_message`]. Panics never cross the
//! boundary: they are reported as `PR_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use pointraster::io::{generate, read_cloud, SceneKind, SceneSpec};
use pointraster::{
    oracle_closest, oracle_splat, Camera, DepthMapper, DepthRange, Epsilon, Method, PackedFragment, Point,
    PointCloud, RenderError, RenderSettings, Renderer, Workers,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Io = 4,
    Parse = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrMethod {
    Atomicmin = 0,
    Splat = 1,
    BaselineStandard = 2,
    BaselineReversed = 3,
}

impl From<PrMethod> for Method {
    fn from(m: PrMethod) -> Self {
        match m {
            PrMethod::Atomicmin => Method::AtomicMin,
            PrMethod::Splat => Method::Splat,
            PrMethod::BaselineStandard => Method::BaselineStandard,
            PrMethod::BaselineReversed => Method::BaselineReversed,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrScene {
    RandomCube = 0,
    ZfightPlanes = 1,
    SphereShell = 2,
}

/// Pinhole camera; `fov_y` in degrees. `near`/`far` are used by the baselines only.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrCamera {
    pub eye: [f64; 3],
    pub target: [f64; 3],
    pub up: [f64; 3],
    pub fov_y: f64,
    pub width: u32,
    pub height: u32,
    pub near: f64,
    pub far: f64,
}

impl From<&PrCamera> for Camera {
    fn from(c: &PrCamera) -> Self {
        Camera {
            eye: c.eye.into(),
            target: c.target.into(),
            up: c.up.into(),
            fov_y: c.fov_y,
            width: c.width,
            height: c.height,
            near: c.near,
            far: c.far,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrDepthRange {
    pub lo: f64,
    pub hi: f64,
    pub unit: f64,
}

/// Splat tolerance `epsilon_num / epsilon_den`, background as 0xRRGGBB, and
/// worker count (0 = available parallelism).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrRenderOptions {
    pub epsilon_num: u64,
    pub epsilon_den: u64,
    pub background_rgb: u32,
    pub workers: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PrRenderStats {
    pub points_in: u64,
    pub fragments_written: u64,
    /// Up to three pass timings; unused entries are 0.
    pub pass_ns: [u64; 3],
    pub pass_count: u32,
}

pub struct PrCloud(PointCloud);

pub struct PrMapper(DepthMapper);

pub struct PrRenderer {
    inner: Renderer,
    width: u32,
    height: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(PrStatus, String);

fn fail(status: PrStatus, msg: impl ToString) -> Failure {
    Failure(status, msg.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PrStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (PrStatus::Ok, String::new()),
        Ok(Err(Failure(status, msg))) => (status, msg),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            (PrStatus::Panic, msg)
        }
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
    status
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(PrStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(PrStatus::NullPointer, format!("{name} is null")))
}

fn render_failure(e: RenderError) -> Failure {
    match e {
        RenderError::DimensionMismatch { .. } => fail(PrStatus::DimensionMismatch, e),
        RenderError::Camera(_) => fail(PrStatus::InvalidArgument, e),
    }
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length plus one, so a
/// return value greater than `len` means truncation. `buf` may be null to
/// query the size.
#[no_mangle]
pub unsafe extern "C" fn pr_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Packs a 40-bit depth index and 0xRRGGBB color into one 64-bit fragment.
#[no_mangle]
pub unsafe extern "C" fn pr_pack_fragment(depth_index: u64, rgb: u32, out_packed: *mut u64) -> PrStatus {
    guard(|| {
        let slot = out(out_packed, "out_packed")?;
        if rgb > 0xFF_FFFF {
            return Err(fail(PrStatus::InvalidArgument, format!("color {rgb:#x} exceeds 24 bits")));
        }
        *slot = PackedFragment::pack(depth_index, rgb).map_err(|e| fail(PrStatus::InvalidArgument, e))?.value();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pr_unpack_fragment(packed: u64, out_depth_index: *mut u64, out_rgb: *mut u32) -> PrStatus {
    guard(|| {
        let (d, c) = (out(out_depth_index, "out_depth_index")?, out(out_rgb, "out_rgb")?);
        (*d, *c) = PackedFragment(packed).unpack();
        Ok(())
    })
}

/// The packed value of an empty framebuffer cell.
#[no_mangle]
pub extern "C" fn pr_clear_fragment() -> u64 {
    PackedFragment::CLEAR.value()
}

#[no_mangle]
pub unsafe extern "C" fn pr_mapper_uniform(unit: f64, out_mapper: *mut *mut PrMapper) -> PrStatus {
    guard(|| {
        let slot = out(out_mapper, "out_mapper")?;
        let mapper = DepthMapper::uniform(unit).map_err(|e| fail(PrStatus::InvalidArgument, e))?;
        *slot = Box::into_raw(Box::new(PrMapper(mapper)));
        Ok(())
    })
}

/// Piecewise mapping over `count` contiguous ranges, ordered by `lo`.
#[no_mangle]
pub unsafe extern "C" fn pr_mapper_piecewise(
    ranges: *const PrDepthRange,
    count: usize,
    out_mapper: *mut *mut PrMapper,
) -> PrStatus {
    guard(|| {
        let slot = out(out_mapper, "out_mapper")?;
        let rows: &[PrDepthRange] = if count == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(deref(ranges, "ranges")?, count)
        };
        let rows = rows.iter().map(|r| DepthRange::new(r.lo, r.hi, r.unit)).collect();
        let mapper = DepthMapper::piecewise(rows).map_err(|e| fail(PrStatus::InvalidArgument, e))?;
        *slot = Box::into_raw(Box::new(PrMapper(mapper)));
        Ok(())
    })
}

/// Depth index for `depth` meters; `PR_STATUS_INVALID_ARGUMENT` when the
/// depth is outside the mapping.
#[no_mangle]
pub unsafe extern "C" fn pr_mapper_quantize(mapper: *const PrMapper, depth: f64, out_index: *mut u64) -> PrStatus {
    guard(|| {
        let (m, slot) = (deref(mapper, "mapper")?, out(out_index, "out_index")?);
        *slot = m.0.quantize(depth).ok_or_else(|| fail(PrStatus::InvalidArgument, format!("depth {depth} is outside the mapping")))?;
        Ok(())
    })
}

/// Lower edge, in meters, of the bin with index `index`.
#[no_mangle]
pub unsafe extern "C" fn pr_mapper_reconstruct(mapper: *const PrMapper, index: u64, out_depth: *mut f64) -> PrStatus {
    guard(|| {
        let (m, slot) = (deref(mapper, "mapper")?, out(out_depth, "out_depth")?);
        *slot = m.0.reconstruct(index).map_err(|e| fail(PrStatus::InvalidArgument, e))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pr_mapper_free(mapper: *mut PrMapper) {
    if !mapper.is_null() {
        drop(Box::from_raw(mapper));
    }
}

/// Builds a cloud from `count` xyz triples and, when `rgb` is not null,
/// `count` RGB triples (otherwise white).
#[no_mangle]
pub unsafe extern "C" fn pr_cloud_from_arrays(
    xyz: *const f64,
    rgb: *const u8,
    count: usize,
    out_cloud: *mut *mut PrCloud,
) -> PrStatus {
    guard(|| {
        let slot = out(out_cloud, "out_cloud")?;
        let mut points = Vec::with_capacity(count);
        if count > 0 {
            let xyz = std::slice::from_raw_parts(deref(xyz, "xyz")?, count * 3);
            let rgb = if rgb.is_null() { None } else { Some(std::slice::from_raw_parts(rgb, count * 3)) };
            for i in 0..count {
                let [r, g, b] = rgb.map_or([255; 3], |c| [c[3 * i], c[3 * i + 1], c[3 * i + 2]]);
                points.push(Point::new(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2], r, g, b));
            }
        }
        let cloud = PointCloud::from_points(points).map_err(|e| fail(PrStatus::InvalidArgument, e))?;
        *slot = Box::into_raw(Box::new(PrCloud(cloud)));
        Ok(())
    })
}

/// Reads a .las, .ply or .xyz file (UTF-8 path).
#[no_mangle]
pub unsafe extern "C" fn pr_cloud_load(path: *const c_char, out_cloud: *mut *mut PrCloud) -> PrStatus {
    guard(|| {
        let slot = out(out_cloud, "out_cloud")?;
        let path = CStr::from_ptr(deref(path, "path")?)
            .to_str()
            .map_err(|_| fail(PrStatus::InvalidArgument, "path is not valid UTF-8"))?;
        let cloud = read_cloud(Path::new(path)).map_err(|e| {
            let status = match e {
                pointraster::io::IoError::Io { .. } | pointraster::io::IoError::UnsupportedExtension { .. } => PrStatus::Io,
                _ => PrStatus::Parse,
            };
            fail(status, e)
        })?;
        *slot = Box::into_raw(Box::new(PrCloud(cloud)));
        Ok(())
    })
}

/// Synthetic scene with the generator's default extent, separation and distance.
#[no_mangle]
pub unsafe extern "C" fn pr_cloud_generate(scene: PrScene, count: u64, seed: u64, out_cloud: *mut *mut PrCloud) -> PrStatus {
    guard(|| {
        let slot = out(out_cloud, "out_cloud")?;
        let kind = match scene {
            PrScene::RandomCube => SceneKind::RandomCube,
            PrScene::ZfightPlanes => SceneKind::ZfightPlanes,
            PrScene::SphereShell => SceneKind::SphereShell,
        };
        let cloud = generate(&SceneSpec::new(kind).with_count(count).with_seed(seed));
        *slot = Box::into_raw(Box::new(PrCloud(cloud)));
        Ok(())
    })
}

/// Number of points, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn pr_cloud_len(cloud: *const PrCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn pr_cloud_free(cloud: *mut PrCloud) {
    if !cloud.is_null() {
        drop(Box::from_raw(cloud));
    }
}

/// Reusable framebuffers for `width` x `height` images.
#[no_mangle]
pub unsafe extern "C" fn pr_renderer_new(width: u32, height: u32, out_renderer: *mut *mut PrRenderer) -> PrStatus {
    guard(|| {
        let slot = out(out_renderer, "out_renderer")?;
        if width == 0 || height == 0 {
            return Err(fail(PrStatus::InvalidArgument, "image size must be at least 1x1"));
        }
        *slot = Box::into_raw(Box::new(PrRenderer { inner: Renderer::new(width, height), width, height }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pr_renderer_free(renderer: *mut PrRenderer) {
    if !renderer.is_null() {
        drop(Box::from_raw(renderer));
    }
}

/// Defaults: tolerance 101/100, black background, all available workers.
#[no_mangle]
pub extern "C" fn pr_render_options_default() -> PrRenderOptions {
    PrRenderOptions { epsilon_num: 101, epsilon_den: 100, background_rgb: 0, workers: 0 }
}

unsafe fn settings(mapper: *const PrMapper, options: *const PrRenderOptions) -> Result<RenderSettings, Failure> {
    let o = options.as_ref().copied().unwrap_or_else(|| pr_render_options_default());
    if o.background_rgb > 0xFF_FFFF {
        return Err(fail(PrStatus::InvalidArgument, format!("background {:#x} exceeds 24 bits", o.background_rgb)));
    }
    Ok(RenderSettings {
        mapper: mapper.as_ref().map_or_else(DepthMapper::millimeters, |m| m.0.clone()),
        epsilon: Epsilon::new(o.epsilon_num, o.epsilon_den).map_err(|e| fail(PrStatus::InvalidArgument, e))?,
        background_rgb: o.background_rgb,
        workers: if o.workers == 0 { Workers::available() } else { Workers::new(o.workers as usize) },
    })
}

unsafe fn image_target<'a>(camera: &Camera, out_rgb: *mut u8, out_len: usize) -> Result<&'a mut [u8], Failure> {
    let needed = camera.width as usize * camera.height as usize * 3;
    if out_rgb.is_null() {
        return Err(fail(PrStatus::NullPointer, "out_rgb is null"));
    }
    if out_len < needed {
        return Err(fail(PrStatus::BufferTooSmall, format!("out_rgb holds {out_len} bytes, image needs {needed}")));
    }
    Ok(std::slice::from_raw_parts_mut(out_rgb, needed))
}

/// Renders `cloud` into `out_rgb` (row-major RGB8, top row first, at least
/// width*height*3 bytes). `mapper` null means 1 mm uniform; `options` null
/// means [`pr_render_options_default`]; `out_stats` may be null. The
/// camera's size must match the renderer's.
#[no_mangle]
pub unsafe extern "C" fn pr_render(
    renderer: *mut PrRenderer,
    method: PrMethod,
    cloud: *const PrCloud,
    camera: *const PrCamera,
    mapper: *const PrMapper,
    options: *const PrRenderOptions,
    out_rgb: *mut u8,
    out_len: usize,
    out_stats: *mut PrRenderStats,
) -> PrStatus {
    guard(|| {
        let r = out(renderer, "renderer")?;
        let cloud = deref(cloud, "cloud")?;
        let camera = Camera::from(deref(camera, "camera")?);
        if (camera.width, camera.height) != (r.width, r.height) {
            return Err(fail(
                PrStatus::DimensionMismatch,
                format!("camera is {}x{}, renderer is {}x{}", camera.width, camera.height, r.width, r.height),
            ));
        }
        let settings = settings(mapper, options)?;
        let target = image_target(&camera, out_rgb, out_len)?;
        let (image, stats) = r.inner.render(method.into(), &cloud.0, &camera, &settings).map_err(render_failure)?;
        target.copy_from_slice(image.as_bytes());
        if let Some(s) = out_stats.as_mut() {
            let mut pass_ns = [0; 3];
            for (slot, ns) in pass_ns.iter_mut().zip(&stats.pass_ns) {
                *slot = *ns;
            }
            *s = PrRenderStats {
                points_in: stats.points_in,
                fragments_written: stats.fragments_written,
                pass_ns,
                pass_count: stats.pass_ns.len() as u32,
            };
        }
        Ok(())
    })
}

/// Sequential reference image for `PR_METHOD_ATOMICMIN` or `PR_METHOD_SPLAT`,
/// bit-identical to [`pr_render`] for the same inputs.
#[no_mangle]
pub unsafe extern "C" fn pr_render_oracle(
    method: PrMethod,
    cloud: *const PrCloud,
    camera: *const PrCamera,
    mapper: *const PrMapper,
    options: *const PrRenderOptions,
    out_rgb: *mut u8,
    out_len: usize,
) -> PrStatus {
    guard(|| {
        let cloud = deref(cloud, "cloud")?;
        let camera = Camera::from(deref(camera, "camera")?);
        camera.validate().map_err(|e| fail(PrStatus::InvalidArgument, e))?;
        let s = settings(mapper, options)?;
        let target = image_target(&camera, out_rgb, out_len)?;
        let image = match method {
            PrMethod::Atomicmin => oracle_closest(&cloud.0, &camera, &s.mapper, s.background_rgb),
            PrMethod::Splat => oracle_splat(&cloud.0, &camera, &s.mapper, s.epsilon, s.background_rgb),
            _ => return Err(fail(PrStatus::InvalidArgument, "oracles exist for atomicmin and splat only")),
        };
        target.copy_from_slice(image.as_bytes());
        Ok(())
    })
}
