//! High-quality splatting in three passes.
//!
//! 1. depth pass: atomic-min rasterization, keeping only the closest depth index per pixel;
//! 2. accumulation: every fragment within a relative depth tolerance of that
//!    closest depth adds its color to per-pixel sums and bumps a counter;
//! 3. resolve: the average color per pixel, then the accumulator is cleared.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use crate::camera::Camera;
use crate::depthmap::DepthMapper;
use crate::fragment::decode_rgb;
use crate::framebuffer::Framebuffer64;
use crate::image::ImageRGB8;
use crate::parallel::{for_each_range_mut, sum_over_chunks, Workers};
use crate::point::PointCloud;
use crate::raster::{check_target, rasterize_atomicmin, RenderError, RenderStats};

/// Depth tolerance as the exact ratio `num / den`: a fragment passes when its
/// depth is at most `num / den` times the closest depth in its pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Epsilon {
    num: u64,
    den: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("depth tolerance {num}/{den} must have den > 0 and num >= den")]
pub struct InvalidEpsilon {
    pub num: u64,
    pub den: u64,
}

impl Epsilon {
    /// One percent.
    pub const DEFAULT: Epsilon = Epsilon { num: 101, den: 100 };

    pub fn new(num: u64, den: u64) -> Result<Self, InvalidEpsilon> {
        if den == 0 || num < den {
            return Err(InvalidEpsilon { num, den });
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }
}

impl Default for Epsilon {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl std::str::FromStr for Epsilon {
    type Err = String;

    /// `NUM/DEN`, for example `101/100`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = s.split_once('/').ok_or_else(|| format!("expected NUM/DEN, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("expected NUM/DEN, got {s:?}"));
        Epsilon::new(parse(num)?, parse(den)?).map_err(|e| e.to_string())
    }
}

impl std::fmt::Display for Epsilon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// The accumulation-pass acceptance test, bound to one mapper.
enum DepthGate<'a> {
    /// Integer form: `den * index <= num * closest`.
    Exact { num: u128, den: u128 },
    /// Reconstructed lower-edge depths compared in f64.
    Linear { mapper: &'a DepthMapper, factor: f64 },
}

impl<'a> DepthGate<'a> {
    fn new(mapper: &'a DepthMapper, eps: Epsilon) -> Self {
        if mapper.is_uniform() {
            DepthGate::Exact { num: eps.num as u128, den: eps.den as u128 }
        } else {
            DepthGate::Linear { mapper, factor: eps.num as f64 / eps.den as f64 }
        }
    }

    #[inline]
    fn accepts(&self, index: u64, closest: u64) -> bool {
        match *self {
            DepthGate::Exact { num, den } => den * index as u128 <= num * closest as u128,
            DepthGate::Linear { mapper, factor } => {
                // A closest index past capacity only comes from a cell the depth
                // pass never touched; treat it as infinitely far.
                let Ok(d_min) = mapper.reconstruct(closest) else { return true };
                let Ok(d) = mapper.reconstruct(index) else { return false };
                d <= d_min * factor
            }
        }
    }
}

#[derive(Default)]
struct AccumCell {
    r: AtomicU64,
    g: AtomicU64,
    b: AtomicU64,
    count: AtomicU64,
}

/// Per-pixel color sums and fragment counts.
pub struct AccumBuffer {
    width: u32,
    height: u32,
    cells: Vec<AccumCell>,
}

/// Plain snapshot of one accumulator cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AccumValue {
    pub sum: [u64; 3],
    pub count: u64,
}

impl AccumBuffer {
    pub fn new(width: u32, height: u32) -> Self {
        let cells = (0..width as usize * height as usize).map(|_| AccumCell::default()).collect();
        Self { width, height, cells }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    fn add(&self, index: usize, rgb: [u8; 3]) {
        let c = &self.cells[index];
        c.r.fetch_add(rgb[0] as u64, Ordering::Relaxed);
        c.g.fetch_add(rgb[1] as u64, Ordering::Relaxed);
        c.b.fetch_add(rgb[2] as u64, Ordering::Relaxed);
        c.count.fetch_add(1, Ordering::Relaxed);
    }

    pub fn get(&self, x: u32, y: u32) -> AccumValue {
        let c = &self.cells[y as usize * self.width as usize + x as usize];
        AccumValue {
            sum: [c.r.load(Ordering::Relaxed), c.g.load(Ordering::Relaxed), c.b.load(Ordering::Relaxed)],
            count: c.count.load(Ordering::Relaxed),
        }
    }

    #[inline]
    fn take(&self, index: usize) -> AccumValue {
        let c = &self.cells[index];
        AccumValue {
            sum: [c.r.swap(0, Ordering::Relaxed), c.g.swap(0, Ordering::Relaxed), c.b.swap(0, Ordering::Relaxed)],
            count: c.count.swap(0, Ordering::Relaxed),
        }
    }

    pub fn snapshot(&self) -> Vec<AccumValue> {
        (0..self.height).flat_map(|y| (0..self.width).map(move |x| (x, y))).map(|(x, y)| self.get(x, y)).collect()
    }

    pub fn clear(&mut self) {
        for c in &mut self.cells {
            *c = AccumCell::default();
        }
    }

    pub fn is_clear(&self) -> bool {
        self.snapshot().iter().all(|v| *v == AccumValue::default())
    }
}

impl std::fmt::Debug for AccumBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AccumBuffer").field("width", &self.width).field("height", &self.height).finish()
    }
}

/// Pass 1. Same contract as [`rasterize_atomicmin`].
pub fn splat_depth_pass(
    cloud: &PointCloud,
    camera: &Camera,
    mapper: &DepthMapper,
    fb: &Framebuffer64,
    workers: Workers,
) -> Result<RenderStats, RenderError> {
    rasterize_atomicmin(cloud, camera, mapper, fb, workers)
}

/// Pass 2. `fb` must hold the depth pass over the same cloud, camera and mapper.
/// `fragments_written` counts accepted fragments.
pub fn splat_accumulate(
    cloud: &PointCloud,
    camera: &Camera,
    mapper: &DepthMapper,
    epsilon: Epsilon,
    fb: &Framebuffer64,
    acc: &AccumBuffer,
    workers: Workers,
) -> Result<RenderStats, RenderError> {
    check_target(camera, fb.width(), fb.height())?;
    check_target(camera, acc.width(), acc.height())?;
    let started = Instant::now();
    let projector = camera.projector();
    let capacity = mapper.capacity();
    let gate = DepthGate::new(mapper, epsilon);
    let width = camera.width;
    let accepted = sum_over_chunks(cloud.points(), workers, |_, chunk| {
        let mut n = 0;
        for p in chunk {
            let Some(hit) = projector.project(p) else { continue };
            let Some(index) = mapper.quantize(hit.depth) else { continue };
            if index >= capacity {
                continue;
            }
            let pixel = hit.pixel_index(width);
            if gate.accepts(index, fb.load(pixel).depth_index()) {
                acc.add(pixel, [p.r, p.g, p.b]);
                n += 1;
            }
        }
        n
    });
    Ok(RenderStats::single(cloud.len() as u64, accepted, started))
}

/// Round-half-up integer mean.
#[inline]
pub(crate) fn mean_channel(sum: u64, count: u64) -> u8 {
    ((sum + count / 2) / count) as u8
}

/// Pass 3. Averages each pixel's accepted colors and clears `acc`.
pub fn splat_resolve(acc: &AccumBuffer, background_rgb: u32, workers: Workers) -> (ImageRGB8, RenderStats) {
    let started = Instant::now();
    let mut image = ImageRGB8::new(acc.width(), acc.height());
    let background = decode_rgb(background_rgb);
    for_each_range_mut(acc.cells.len(), image.pixels_mut(), 3, workers, |range, out| {
        for (px, i) in out.chunks_exact_mut(3).zip(range) {
            let v = acc.take(i);
            if v.count == 0 {
                px.copy_from_slice(&background);
            } else {
                for (o, s) in px.iter_mut().zip(v.sum) {
                    *o = mean_channel(s, v.count);
                }
            }
        }
    });
    (image, RenderStats::single(0, 0, started))
}

/// Runs all three passes and leaves both buffers cleared.
#[allow(clippy::too_many_arguments)]
pub(crate) fn render_splat_into(
    cloud: &PointCloud,
    camera: &Camera,
    mapper: &DepthMapper,
    epsilon: Epsilon,
    background_rgb: u32,
    fb: &mut Framebuffer64,
    acc: &AccumBuffer,
    workers: Workers,
) -> Result<(ImageRGB8, RenderStats), RenderError> {
    let depth = splat_depth_pass(cloud, camera, mapper, fb, workers)?;
    let accum = splat_accumulate(cloud, camera, mapper, epsilon, fb, acc, workers)?;
    let started = Instant::now();
    let (image, _) = splat_resolve(acc, background_rgb, workers);
    fb.clear();
    let resolve_ns = crate::raster::elapsed_ns(started);
    let stats = RenderStats {
        points_in: depth.points_in,
        fragments_written: accum.fragments_written,
        pass_ns: vec![depth.pass_ns[0], accum.pass_ns[0], resolve_ns],
    };
    Ok((image, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depthmap::DepthRange;
    use crate::point::Point;
    use glam::DVec3;

    fn camera() -> Camera {
        Camera::look_at(DVec3::ZERO, DVec3::NEG_Z, DVec3::Y, 60.0, 8, 8)
    }

    fn on_axis(depth: f64, rgb: [u8; 3]) -> Point {
        Point::new(0.0, 0.0, -depth, rgb[0], rgb[1], rgb[2])
    }

    fn run(cloud: &PointCloud, mapper: &DepthMapper, eps: Epsilon) -> (Framebuffer64, AccumBuffer, RenderStats) {
        let fb = Framebuffer64::new(8, 8);
        let acc = AccumBuffer::new(8, 8);
        splat_depth_pass(cloud, &camera(), mapper, &fb, Workers::new(3)).unwrap();
        let stats = splat_accumulate(cloud, &camera(), mapper, eps, &fb, &acc, Workers::new(3)).unwrap();
        (fb, acc, stats)
    }

    #[test]
    fn one_percent_window_by_hand() {
        // Indices 1000, 1005, 1011 at mm resolution: 100*i <= 101*1000 admits
        // 100000 and 100500 (<= 101000) but not 101100.
        let mm = DepthMapper::millimeters();
        let cloud = PointCloud::from_points(vec![
            on_axis(1.0115, [90, 0, 0]),
            on_axis(1.0005, [10, 0, 0]),
            on_axis(1.0055, [20, 0, 0]),
        ])
        .unwrap();
        let (fb, acc, stats) = run(&cloud, &mm, Epsilon::DEFAULT);
        assert_eq!(fb.get(4, 4).depth_index(), 1000);
        assert_eq!(acc.get(4, 4), AccumValue { sum: [30, 0, 0], count: 2 });
        assert_eq!(stats.fragments_written, 2);
    }

    #[test]
    fn single_fragment_always_passes() {
        let mm = DepthMapper::millimeters();
        let cloud = PointCloud::from_points(vec![on_axis(3.217, [7, 8, 9])]).unwrap();
        let (fb, acc, _) = run(&cloud, &mm, Epsilon::DEFAULT);
        assert_eq!(fb.get(4, 4).depth_index(), mm.quantize(3.217).unwrap());
        assert_eq!(acc.get(4, 4), AccumValue { sum: [7, 8, 9], count: 1 });
    }

    #[test]
    fn empty_cloud_depth_pass_is_clear() {
        let (fb, acc, _) = run(&PointCloud::new(), &DepthMapper::millimeters(), Epsilon::DEFAULT);
        assert!(fb.is_clear());
        assert!(acc.is_clear());
    }

    #[test]
    fn clear_cell_accepts_under_both_gates() {
        let cloud = PointCloud::from_points(vec![on_axis(2.0, [1, 2, 3])]).unwrap();
        for mapper in [
            DepthMapper::millimeters(),
            DepthMapper::piecewise(vec![DepthRange::new(0.0, 100.0, 0.01)]).unwrap(),
        ] {
            let fb = Framebuffer64::new(8, 8);
            let acc = AccumBuffer::new(8, 8);
            splat_accumulate(&cloud, &camera(), &mapper, Epsilon::DEFAULT, &fb, &acc, Workers::ONE).unwrap();
            assert_eq!(acc.get(4, 4).count, 1);
        }
    }

    #[test]
    fn piecewise_gate_uses_reconstructed_depths() {
        // Bins of 1 cm: closest edge 2.00 m, threshold 2.02 m.
        let mapper = DepthMapper::piecewise(vec![DepthRange::new(0.0, 100.0, 0.01)]).unwrap();
        let cloud = PointCloud::from_points(vec![
            on_axis(2.004, [10, 0, 0]),
            on_axis(2.025, [20, 0, 0]),
            on_axis(2.031, [40, 0, 0]),
        ])
        .unwrap();
        let (_, acc, _) = run(&cloud, &mapper, Epsilon::DEFAULT);
        assert_eq!(acc.get(4, 4), AccumValue { sum: [30, 0, 0], count: 2 });
    }

    #[test]
    fn resolve_rounds_half_up() {
        let acc = AccumBuffer::new(3, 1);
        acc.add(0, [10, 20, 40]);
        acc.add(0, [20, 40, 40]);
        for _ in 0..3 {
            acc.add(2, [3, 3, 4]);
        }
        acc.add(2, [1, 1, 0]);
        acc.add(2, [0, 0, 0]);
        // pixel 2: sums (10, 10, 12) over 5 -> (2, 2, 2) since (10+2)/5 = 2, (12+2)/5 = 2
        let (img, _) = splat_resolve(&acc, 0x010203, Workers::new(2));
        assert_eq!(img.pixel(0, 0), [15, 30, 40]);
        assert_eq!(img.pixel(1, 0), [1, 2, 3]);
        assert_eq!(img.pixel(2, 0), [2, 2, 2]);
        assert!(acc.is_clear());
        assert_eq!(mean_channel(10, 3), 3);
        assert_eq!(mean_channel(3, 2), 2);
    }

    #[test]
    fn epsilon_validation() {
        assert_eq!(Epsilon::new(101, 100), Ok(Epsilon::DEFAULT));
        assert!(Epsilon::new(1, 0).is_err());
        assert!(Epsilon::new(99, 100).is_err());
        assert_eq!(Epsilon::DEFAULT.to_string(), "101/100");
        assert_eq!("101/100".parse::<Epsilon>(), Ok(Epsilon::DEFAULT));
        assert!("101".parse::<Epsilon>().is_err());
        assert!("1/2".parse::<Epsilon>().is_err());
    }
}
