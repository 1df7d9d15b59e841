//! Acceptance criteria. Runs without the libtest harness so each criterion
//! reports exactly one PASS/FAIL line; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use glam::DVec3;
use pointraster::bench::{run_benchmark_on, BenchConfig, Orbit, PointOrder, SceneSource};
use pointraster::io::{generate, ppm_bytes, read_las, read_xyz, write_xyz, SceneKind, SceneSpec};
use pointraster::{
    ndc_depth_f32, oracle_closest, oracle_splat, project, rasterize_atomicmin, render, resolve_and_clear,
    shuffle_points, AccumBuffer, Camera, DepthMapper, DepthMode, DepthRange, Epsilon, Framebuffer64, ImageRGB8,
    Method, PackedFragment, Point, PointCloud, RenderSettings, Renderer, SplitMix64, Workers,
};

const CLEAR: u64 = 0xFFFF_FFFF_FF00_0000;
const SIZES: [(u32, u32); 2] = [(64, 64), (257, 131)];
const WORKER_COUNTS: [usize; 3] = [1, 4, 8];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Case {
    cloud: PointCloud,
    camera: Camera,
    mapper: DepthMapper,
    background: u32,
}

fn uniform_in(rng: &mut SplitMix64, lo: f64, hi: f64) -> f64 {
    lo + rng.next_f64() * (hi - lo)
}

/// Random scene, size, camera and depth mapping. Scene `i` alternates image sizes.
fn random_case(i: usize, rng: &mut SplitMix64) -> Case {
    let kind = SceneKind::ALL[(rng.next_u64() % 3) as usize];
    let count = 10f64.powf(uniform_in(rng, 3.0, 5.0)).round() as u64;
    let cloud = generate(&SceneSpec::new(kind).with_count(count).with_seed(rng.next_u64()));
    let b = cloud.bounds().expect("non-empty");
    let radius = b.extent().length() * 0.5;
    let dir = DVec3::new(uniform_in(rng, -1.0, 1.0), uniform_in(rng, -1.0, 1.0), uniform_in(rng, 0.2, 1.0)).normalize();
    let eye = b.center() + dir * radius * uniform_in(rng, 1.2, 4.0);
    let target = b.center() + DVec3::new(uniform_in(rng, -0.2, 0.2), uniform_in(rng, -0.2, 0.2), 0.0) * radius;
    let (w, h) = SIZES[i % 2];
    let camera = Camera::look_at(eye, target, DVec3::Y, uniform_in(rng, 25.0, 90.0), w, h);
    let depth = (eye - target).length();
    let mapper = match rng.next_u64() % 3 {
        0 => DepthMapper::millimeters(),
        1 => DepthMapper::uniform(depth * 1e-4).unwrap(),
        _ => DepthMapper::piecewise(vec![
            DepthRange::new(0.0, depth, depth * 1e-5),
            DepthRange::new(depth, depth * 100.0, depth * 1e-3),
        ])
        .unwrap(),
    };
    Case { cloud, camera, mapper, background: (rng.next_u64() & 0xFF_FFFF) as u32 }
}

fn oracle_matrix(method: Method) -> Outcome {
    let mut rng = SplitMix64::new(if method == Method::AtomicMin { 0xA70 } else { 0x5B1A7 });
    let mut renders = 0;
    for i in 0..20 {
        let case = random_case(i, &mut rng);
        let expected = match method {
            Method::AtomicMin => oracle_closest(&case.cloud, &case.camera, &case.mapper, case.background),
            _ => oracle_splat(&case.cloud, &case.camera, &case.mapper, Epsilon::new(101, 100).unwrap(), case.background),
        };
        let blank = ImageRGB8::filled(case.camera.width, case.camera.height, case.background);
        ensure(expected != blank, || format!("scene {i} renders nothing"))?;
        for workers in WORKER_COUNTS {
            let settings = RenderSettings {
                mapper: case.mapper.clone(),
                epsilon: Epsilon::DEFAULT,
                background_rgb: case.background,
                workers: Workers::new(workers),
            };
            let (image, _) = render(method, &case.cloud, &case.camera, &settings).map_err(|e| e.to_string())?;
            if let Some((x, y)) = image.first_difference(&expected) {
                return Err(format!(
                    "scene {i} ({} points, {}x{}), {workers} workers: pixel ({x}, {y}) is {:?}, oracle {:?}",
                    case.cloud.len(),
                    case.camera.width,
                    case.camera.height,
                    image.pixel(x, y),
                    expected.pixel(x, y)
                ));
            }
            renders += 1;
        }
    }
    Ok(format!("20 scenes x 3 worker counts, {renders} renders bit-identical"))
}

fn criterion_1() -> Outcome {
    oracle_matrix(Method::AtomicMin)
}

fn criterion_2() -> Outcome {
    oracle_matrix(Method::Splat)
}

fn criterion_3() -> Outcome {
    let cloud = generate(&SceneSpec::new(SceneKind::SphereShell).with_count(100_000).with_seed(99));
    let camera = Camera::look_at(DVec3::new(0.4, 0.6, 2.6), DVec3::ZERO, DVec3::Y, 50.0, 257, 131);
    let settings = RenderSettings { workers: Workers::new(8), ..Default::default() };
    let mut renderer = Renderer::new(257, 131);
    for method in [Method::AtomicMin, Method::Splat] {
        let (reference, _) = renderer.render(method, &cloud, &camera, &settings).map_err(|e| e.to_string())?;
        for seed in 1..=10 {
            let permuted = shuffle_points(&cloud, seed);
            let (image, _) = renderer.render(method, &permuted, &camera, &settings).map_err(|e| e.to_string())?;
            ensure(image == reference, || format!("{method} differs under permutation seed {seed}"))?;
        }
    }
    Ok("10 permutations of 100000 points, atomicmin and splat unchanged".into())
}

fn criterion_4() -> Outcome {
    // 10x10 image, 90 degree fov, eye at the origin looking down -Z: the
    // pixel centered at (i, j) is hit by x = ndc_x * depth, y = ndc_y * depth.
    let (w, h) = (10u32, 10u32);
    let camera = Camera::look_at(DVec3::ZERO, DVec3::NEG_Z, DVec3::Y, 90.0, w, h);
    let mapper = DepthMapper::millimeters();
    let mut rng = SplitMix64::new(4);
    let mut points = Vec::new();
    let mut expected = Vec::new();
    for j in 0..h {
        for i in 0..w {
            let index = 1000 + rng.next_u64() % 49_000;
            let depths = [(index as f64 + 0.25) * 1e-3, (index as f64 + 0.75) * 1e-3];
            let colors = [(rng.next_u64() & 0xFF_FFFF) as u32, (rng.next_u64() & 0xFF_FFFF) as u32];
            let ndc_x = (i as f64 + 0.5) / w as f64 * 2.0 - 1.0;
            let ndc_y = 1.0 - (j as f64 + 0.5) / h as f64 * 2.0;
            for (d, c) in depths.iter().zip(colors) {
                let [r, g, b] = [(c >> 16) as u8, (c >> 8) as u8, c as u8];
                let p = Point::new(ndc_x * d, ndc_y * d, -d, r, g, b);
                let hit = project(&camera, &p).ok_or("constructed point culled")?;
                ensure((hit.x, hit.y) == (i, j), || format!("constructed point landed at ({}, {})", hit.x, hit.y))?;
                ensure(mapper.quantize(hit.depth) == Some(index), || format!("depth {d} not in bin {index}"))?;
                points.push(p);
            }
            expected.push(PackedFragment::pack(index, colors[0].min(colors[1])).unwrap().value());
        }
    }
    let forward = PointCloud::from_points(points.clone()).unwrap();
    let backward = PointCloud::from_points(points.chunks(2).flat_map(|p| [p[1], p[0]]).collect()).unwrap();
    let fb = Framebuffer64::new(w, h);
    for cloud in [&forward, &backward] {
        for workers in WORKER_COUNTS {
            rasterize_atomicmin(cloud, &camera, &mapper, &fb, Workers::new(workers)).map_err(|e| e.to_string())?;
            ensure(fb.snapshot() == expected, || format!("wrong survivor with {workers} workers"))?;
            let (image, _) = resolve_and_clear(&fb, 0, Workers::new(workers));
            ensure(image == oracle_closest(cloud, &camera, &mapper, 0), || "oracle disagrees".into())?;
        }
    }
    Ok("100 equal-index pairs, smaller color kept in both submission orders".into())
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    let cloud = generate(&SceneSpec::new(SceneKind::RandomCube).with_count(50_000));
    for (w, h) in SIZES.into_iter().chain([(1, 1), (3, 200)]) {
        let camera = Camera::look_at(DVec3::new(0.0, 0.0, 3.0), DVec3::ZERO, DVec3::Y, 60.0, w, h);
        let fb = Framebuffer64::new(w, h);
        for workers in WORKER_COUNTS {
            let stats = rasterize_atomicmin(&cloud, &camera, &DepthMapper::millimeters(), &fb, Workers::new(workers))
                .map_err(|e| e.to_string())?;
            ensure(stats.fragments_written > 0, || format!("{w}x{h}: nothing drawn"))?;
            resolve_and_clear(&fb, 0x123456, Workers::new(workers));
            ensure(fb.snapshot().iter().all(|&c| c == CLEAR), || format!("{w}x{h}: cell left dirty"))?;
            checked += 1;
        }
        // The full splat pipeline must leave its buffers clear too.
        let mut fb = Framebuffer64::new(w, h);
        let acc = AccumBuffer::new(w, h);
        let settings = RenderSettings::default();
        let mut renderer = Renderer::new(w, h);
        renderer.render(Method::Splat, &cloud, &camera, &settings).map_err(|e| e.to_string())?;
        pointraster::splat_depth_pass(&cloud, &camera, &settings.mapper, &fb, settings.workers).map_err(|e| e.to_string())?;
        pointraster::splat_accumulate(&cloud, &camera, &settings.mapper, settings.epsilon, &fb, &acc, settings.workers)
            .map_err(|e| e.to_string())?;
        pointraster::splat_resolve(&acc, 0, settings.workers);
        ensure(acc.is_clear(), || format!("{w}x{h}: accumulation buffer left dirty"))?;
        fb.clear();
        ensure(fb.is_clear(), || format!("{w}x{h}: clear() left a cell dirty"))?;
    }
    Ok(format!("{checked} resolves over 4 image sizes, every cell {CLEAR:#018x}"))
}

fn criterion_6() -> Outcome {
    // Default zfight scene: 400 m patches at 1000 m and 1000.001 m, red in front.
    let spec = SceneSpec::new(SceneKind::ZfightPlanes);
    let cloud = generate(&spec);
    let camera = Camera::look_at(DVec3::ZERO, DVec3::NEG_Z, DVec3::Y, 20.0, 128, 128).with_clip(0.1, 10_000.0);
    let (w, h) = (camera.width as usize, camera.height as usize);
    let red = [255u8, 0, 0];

    // Per pixel: the f32 depths each plane would store.
    let mut near_depth: Vec<Option<f32>> = vec![None; w * h];
    let mut far_depth: Vec<Option<f32>> = vec![None; w * h];
    for p in cloud.points() {
        let Some(hit) = project(&camera, p) else { continue };
        let d = ndc_depth_f32(hit.depth, camera.near, camera.far, DepthMode::Standard).unwrap();
        let slot = if [p.r, p.g, p.b] == red { &mut near_depth } else { &mut far_depth };
        slot[hit.y as usize * w + hit.x as usize] = Some(d);
    }
    let both: Vec<usize> = (0..w * h).filter(|&i| near_depth[i].is_some() && far_depth[i].is_some()).collect();
    let identical = both.iter().filter(|&&i| near_depth[i] == far_depth[i]).count();
    let identical_frac = identical as f64 / both.len() as f64;
    ensure(both.len() > w * h / 2, || format!("only {} pixels see both planes", both.len()))?;
    ensure(identical_frac >= 0.99, || format!("float32 separates the planes at {:.2}% of pixels", 100.0 * (1.0 - identical_frac)))?;

    let settings = RenderSettings { mapper: DepthMapper::millimeters(), ..Default::default() };
    let (baseline, _) = render(Method::BaselineStandard, &cloud, &camera, &settings).map_err(|e| e.to_string())?;
    let (atomic, _) = render(Method::AtomicMin, &cloud, &camera, &settings).map_err(|e| e.to_string())?;
    let at = |img: &ImageRGB8, i: usize| img.pixel((i % w) as u32, (i / w) as u32);
    let covered: Vec<usize> = (0..w * h).filter(|&i| near_depth[i].is_some()).collect();
    let atomic_red = covered.iter().filter(|&&i| at(&atomic, i) == red).count() as f64 / covered.len() as f64;
    let baseline_blue = both.iter().filter(|&&i| at(&baseline, i) != red).count() as f64 / both.len() as f64;
    ensure(atomic_red >= 0.999, || format!("atomicmin shows the near plane at only {:.3}% of pixels", 100.0 * atomic_red))?;
    ensure(baseline_blue > 0.1, || format!("baseline shows the far plane at only {:.1}% of pixels", 100.0 * baseline_blue))?;
    Ok(format!(
        "float32 ties {:.2}% of {} two-plane pixels (baseline {:.1}% far color); atomicmin {:.2}% near color",
        100.0 * identical_frac,
        both.len(),
        100.0 * baseline_blue,
        100.0 * atomic_red
    ))
}

fn paper_ranges() -> Vec<DepthRange> {
    vec![
        DepthRange::new(0.0, 10.0, 1e-9),
        DepthRange::new(10.0, 10_000.0, 1e-6),
        DepthRange::new(10_000.0, 10_000_000.0, 1e-3),
    ]
}

fn criterion_7() -> Outcome {
    let piecewise = DepthMapper::piecewise(paper_ranges()).map_err(|e| e.to_string())?;
    // 10 m / 1 nm + 9990 m / 1 um + 9990 km / 1 mm
    let derived: u64 = 10_000_000_000 + 9_990_000_000 + 9_990_000_000;
    ensure(piecewise.capacity() == derived, || format!("capacity {} != {derived}", piecewise.capacity()))?;
    ensure(piecewise.capacity() <= 30_000_000_000 && 30_000_000_000u64 <= 1 << 40, || "capacity bounds".into())?;

    let mm = DepthMapper::millimeters();
    let far = mm.quantize(1e9).ok_or("1e9 m not representable")?;
    ensure(far == 1_000_000_000_000, || format!("1e9 m -> {far}"))?;
    let packed = PackedFragment::pack(far, 0xFFFFFF).map_err(|e| e.to_string())?;
    ensure(packed.unpack() == (far, 0xFFFFFF), || "pack round trip".into())?;
    ensure(mm.quantize(3.217) == Some(3217), || "3.217 m".into())?;
    Ok(format!("piecewise capacity {derived}, 1e9 m at mm -> index {far} < 2^40"))
}

fn criterion_8() -> Outcome {
    const SAMPLES: usize = 1_000_000;
    let mappers = [
        ("uniform 1 mm", DepthMapper::millimeters()),
        ("uniform 0.37 m", DepthMapper::uniform(0.37).unwrap()),
        ("uniform 1 um", DepthMapper::uniform(1e-6).unwrap()),
        ("three-range", DepthMapper::piecewise(paper_ranges()).unwrap()),
        (
            "uneven",
            DepthMapper::piecewise(vec![
                DepthRange::new(0.5, 1.7, 0.003),
                DepthRange::new(1.7, 33.3, 0.0071),
                DepthRange::new(33.3, 5000.0, 0.9),
            ])
            .unwrap(),
        ),
    ];
    let mut rng = SplitMix64::new(8);
    let mut total = 0;
    for (name, mapper) in &mappers {
        let capacity = mapper.capacity();
        let (lo, hi) = match mapper {
            DepthMapper::Piecewise(p) => (p.ranges()[0].lo, p.ranges().last().unwrap().hi),
            DepthMapper::Uniform(u) => (0.0, u.unit() * capacity as f64),
        };
        // Log-uniform so every range and magnitude gets samples.
        let mut depths: Vec<f64> = (0..SAMPLES)
            .map(|_| {
                let r = rng.next_f64();
                if lo > 0.0 { lo * (r * (hi / lo).ln()).exp() } else { hi * 10f64.powf(-12.0 * r) }
            })
            .filter(|d| *d < hi)
            .collect();
        depths.sort_by(f64::total_cmp);
        let mut prev = 0u64;
        for &d in &depths {
            let i = mapper.quantize(d).ok_or_else(|| format!("{name}: {d} unmapped"))?;
            ensure(i >= prev, || format!("{name}: monotonicity broken at {d}"))?;
            prev = i;
            let edge = mapper.reconstruct(i).map_err(|e| e.to_string())?;
            ensure(edge <= d, || format!("{name}: lower edge {edge} above {d}"))?;
            if i + 1 < capacity {
                let next = mapper.reconstruct(i + 1).map_err(|e| e.to_string())?;
                ensure(d < next, || format!("{name}: {d} not below next edge {next}"))?;
            }
        }
        for _ in 0..SAMPLES {
            let i = rng.next_u64() % capacity;
            let d = mapper.reconstruct(i).map_err(|e| e.to_string())?;
            ensure(mapper.quantize(d) == Some(i), || format!("{name}: index {i} -> {d} -> {:?}", mapper.quantize(d)))?;
        }
        total += depths.len() + SAMPLES;
    }
    Ok(format!("{} mappings, {total} samples, zero violations", mappers.len()))
}

fn criterion_9() -> Outcome {
    let spec = SceneSpec::new(SceneKind::RandomCube).with_count(1_000_000).with_seed(9);
    let cloud = generate(&spec);
    let mut config = BenchConfig::new(SceneSource::Generated(spec));
    config.width = 256;
    config.height = 256;
    config.methods = vec![Method::AtomicMin, Method::Splat, Method::BaselineStandard];
    config.orderings = vec![PointOrder::Original, PointOrder::Shuffled(7), PointOrder::Morton];
    config.warmup_frames = 1;
    config.measured_frames = 3;
    config.orbit = Orbit { frames: 3, ..Orbit::default() };
    config.keep_images = true;
    let report = run_benchmark_on(&config, &cloud).map_err(|e| e.to_string())?;

    let mut csv = Vec::new();
    report.write_csv(&mut csv).map_err(|e| e.to_string())?;
    let csv = String::from_utf8(csv).unwrap();
    let mut lines = csv.lines();
    ensure(
        lines.next() == Some("scene,method,ordering,frame,pass1_ns,pass2_ns,pass3_ns,total_ms,fragments,workers"),
        || "CSV header".into(),
    )?;
    ensure(lines.count() == 27, || "expected 27 data rows".into())?;
    for method in ["atomicmin", "splat", "baseline-standard"] {
        for ordering in ["original", "shuffled(7)", "morton"] {
            let n = report.rows.iter().filter(|r| r.method == method && r.ordering == ordering).count();
            ensure(n == 3, || format!("{method}/{ordering}: {n} rows"))?;
        }
    }
    for o in &config.orderings {
        let total = |m: Method| report.rows.iter().filter(|r| r.method == m.name() && r.ordering == o.to_string()).map(|r| r.total_ms).sum::<f64>();
        let (splat, atomic) = (total(Method::Splat), total(Method::AtomicMin));
        ensure(splat >= 0.8 * atomic, || format!("{o}: splat {splat:.2} ms < 0.8 x atomicmin {atomic:.2} ms"))?;
    }

    for img in &report.images {
        let ordered = img.ordering.apply(&cloud);
        let (standalone, _) = render(img.method, &ordered, &report.path.camera(img.frame), &config.settings).map_err(|e| e.to_string())?;
        ensure(standalone == img.image, || format!("{}/{} frame {} differs from standalone render", img.method, img.ordering, img.frame))?;
        if !img.method.is_baseline() {
            let original = report.images.iter().find(|o| o.method == img.method && o.frame == img.frame && o.ordering == PointOrder::Original).unwrap();
            ensure(original.image == img.image, || format!("{} image depends on ordering {}", img.method, img.ordering))?;
        }
    }
    let median = |m: Method, o: PointOrder| report.summary(m, o).map_or(f64::NAN, |s| s.median_ms);
    Ok(format!(
        "27 rows; median ms atomicmin {:.1}/{:.1}/{:.1}, splat {:.1}/{:.1}/{:.1} (original/shuffled/morton); {} images match standalone",
        median(Method::AtomicMin, PointOrder::Original),
        median(Method::AtomicMin, PointOrder::Shuffled(7)),
        median(Method::AtomicMin, PointOrder::Morton),
        median(Method::Splat, PointOrder::Original),
        median(Method::Splat, PointOrder::Shuffled(7)),
        median(Method::Splat, PointOrder::Morton),
        report.images.len()
    ))
}

fn criterion_10() -> Outcome {
    // XYZ: values across magnitudes survive to 15 significant digits.
    let mut rng = SplitMix64::new(10);
    let points: Vec<Point> = (0..10_000)
        .map(|_| {
            let mut v = || (rng.next_f64() - 0.5) * 10f64.powi((rng.next_u64() % 16) as i32 - 6);
            Point::new(v(), v(), v(), 1, 2, 3)
        })
        .collect();
    let cloud = PointCloud::from_points(points).unwrap();
    let mut text = Vec::new();
    write_xyz(&cloud, &mut text).map_err(|e| e.to_string())?;
    let back = read_xyz(&String::from_utf8(text).unwrap()).map_err(|e| e.to_string())?;
    ensure(back.len() == cloud.len(), || "point count".into())?;
    for (a, b) in cloud.points().iter().zip(back.points()) {
        for (u, v) in [(a.x, b.x), (a.y, b.y), (a.z, b.z)] {
            ensure((u - v).abs() <= u.abs() * 1e-15, || format!("{u} read back as {v}"))?;
        }
    }

    // LAS 1.2, point format 2, one record, built byte by byte.
    let mut las = vec![0u8; 227 + 26];
    las[..4].copy_from_slice(b"LASF");
    las[24] = 1;
    las[25] = 2;
    las[94..96].copy_from_slice(&227u16.to_le_bytes());
    las[96..100].copy_from_slice(&227u32.to_le_bytes());
    las[104] = 2;
    las[105..107].copy_from_slice(&26u16.to_le_bytes());
    las[107..111].copy_from_slice(&1u32.to_le_bytes());
    let scale = [0.01f64, 0.01, 0.001];
    let offset = [1000.0f64, 2000.0, -5.0];
    for k in 0..3 {
        las[131 + 8 * k..139 + 8 * k].copy_from_slice(&scale[k].to_le_bytes());
        las[155 + 8 * k..163 + 8 * k].copy_from_slice(&offset[k].to_le_bytes());
    }
    let raw = [12_345i32, -678, 4_200];
    let rec = &mut las[227..];
    for k in 0..3 {
        rec[4 * k..4 * k + 4].copy_from_slice(&raw[k].to_le_bytes());
    }
    rec[12..14].copy_from_slice(&1234u16.to_le_bytes());
    for (k, c) in [0xAB12u16, 0x3400, 0xFFFF].into_iter().enumerate() {
        rec[20 + 2 * k..22 + 2 * k].copy_from_slice(&c.to_le_bytes());
    }
    let decoded = read_las(&las).map_err(|e| e.to_string())?;
    let expected = Point::new(12_345.0 * 0.01 + 1000.0, -678.0 * 0.01 + 2000.0, 4_200.0 * 0.001 - 5.0, 0xAB, 0x34, 0xFF);
    ensure(decoded.points() == [expected], || format!("LAS decoded {:?}", decoded.points()))?;

    let red = ImageRGB8::filled(1, 1, 0xFF0000);
    ensure(ppm_bytes(&red) == b"P6\n1 1\n255\n\xff\x00\x00", || "PPM bytes".into())?;
    Ok("XYZ 30000 coordinates within 1e-15 relative; LAS format 2 exact; PPM 1x1 byte-exact".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence, atomicmin", criterion_1, Duration::from_secs(60)),
        ("oracle equivalence, splat", criterion_2, Duration::from_secs(120)),
        ("order independence", criterion_3, Duration::MAX),
        ("tie rule", criterion_4, Duration::MAX),
        ("clear contract", criterion_5, Duration::MAX),
        ("depth precision, zfight planes", criterion_6, Duration::MAX),
        ("capacity arithmetic", criterion_7, Duration::MAX),
        ("depthmap properties", criterion_8, Duration::MAX),
        ("benchmark harness smoke", criterion_9, Duration::from_secs(120)),
        ("IO round trips", criterion_10, Duration::MAX),
    ];
    // Keep assertion panics from interleaving with the report.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, check, budget)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = started.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > budget => Err(format!("took {:.1}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs())),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {:>2} {name}: {detail} [{:.2}s]", n + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
