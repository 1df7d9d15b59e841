//! Command-line front end: `render`, `verify`, `bench`, `generate`, `info`.
//!
//! Every flag can also be given in a TOML file passed with `--config`; values
//! from the file take precedence over flags. Layout:
//!
//! ```toml
//! output = "out.ppm"
//!
//! [scene]            # or `input = "cloud.las"`
//! kind = "zfight-planes"
//! count = 100000
//!
//! [camera]
//! width = 640
//! eye = [0.0, 0.0, 0.0]
//! target = [0.0, 0.0, -1.0]
//!
//! [render]
//! method = "splat"
//! unit = 0.001       # or ranges = [[0.0, 10.0, 0.001], [10.0, 1000.0, 0.01]]
//! epsilon = "101/100"
//! background = "000000"
//! workers = 8
//!
//! [bench]
//! methods = ["atomicmin", "splat", "baseline"]
//! orderings = ["original", "shuffled(7)", "morton"]
//! frames = 8
//! ```
//!
//! Exit codes: 0 success, 1 usage or configuration, 2 IO or parse failure,
//! 3 verification mismatch.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use glam::DVec3;
use serde::Deserialize;

use crate::bench::{self, BenchConfig, BenchError, Orbit, PointOrder, SceneSource};
use crate::camera::Camera;
use crate::depthmap::{DepthMapper, DepthRange};
use crate::image::ImageRGB8;
use crate::io::{self, SceneKind, SceneSpec};
use crate::oracle::{oracle_closest, oracle_splat};
use crate::parallel::Workers;
use crate::point::PointCloud;
use crate::raster::{RenderError, RenderStats};
use crate::render::{render, Method, RenderSettings};
use crate::splat::Epsilon;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Mismatch(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn io_err(msg: impl fmt::Display) -> CliError {
    CliError::Io(msg.to_string())
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        usage(e)
    }
}

impl From<io::IoError> for CliError {
    fn from(e: io::IoError) -> Self {
        io_err(e)
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Scene(_) | BenchError::Csv(_) => io_err(e),
            _ => usage(e),
        }
    }
}

/// `x,y,z`, or a three-element array in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(from = "[f64; 3]")]
pub struct Vec3Arg(pub DVec3);

impl From<[f64; 3]> for Vec3Arg {
    fn from(v: [f64; 3]) -> Self {
        Vec3Arg(DVec3::from_array(v))
    }
}

impl FromStr for Vec3Arg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("expected X,Y,Z, got {s:?}"))?;
        <[f64; 3]>::try_from(parts).map(Vec3Arg::from).map_err(|_| format!("expected X,Y,Z, got {s:?}"))
    }
}

/// `lo:hi:unit`, or `[lo, hi, unit]` in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(from = "[f64; 3]")]
pub struct RangeArg(pub DepthRange);

impl From<[f64; 3]> for RangeArg {
    fn from([lo, hi, unit]: [f64; 3]) -> Self {
        RangeArg(DepthRange::new(lo, hi, unit))
    }
}

impl FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected LO:HI:UNIT, got {s:?}");
        let parts: Vec<f64> = s.split(':').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        <[f64; 3]>::try_from(parts).map(RangeArg::from).map_err(|_| bad())
    }
}

/// Hex `RRGGBB`, optionally prefixed with `#`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(try_from = "String")]
pub struct Rgb(pub u32);

impl FromStr for Rgb {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let hex = s.strip_prefix('#').unwrap_or(s);
        if hex.len() != 6 {
            return Err(format!("expected RRGGBB, got {s:?}"));
        }
        u32::from_str_radix(hex, 16).map(Rgb).map_err(|_| format!("expected RRGGBB, got {s:?}"))
    }
}

impl TryFrom<String> for Rgb {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Deserializes any `FromStr` type from a string.
fn de_parsed<'de, D, T>(d: D) -> Result<Option<T>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    let s = String::deserialize(d)?;
    s.parse().map(Some).map_err(serde::de::Error::custom)
}

fn de_parsed_list<'de, D, T>(d: D) -> Result<Vec<T>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    Vec::<String>::deserialize(d)?.iter().map(|s| s.parse().map_err(serde::de::Error::custom)).collect()
}

macro_rules! overlay {
    ($base:ident, $over:ident; $($field:ident),*) => {
        Self { $($field: $over.$field.or($base.$field)),* }
    };
}

#[derive(Args, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SceneOpts {
    /// Point cloud file (.las, .ply, .xyz); `-` reads XYZ from stdin.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Synthetic scene: random-cube, zfight-planes or sphere-shell.
    #[arg(long, value_name = "KIND")]
    #[serde(rename = "kind")]
    pub scene: Option<SceneKind>,
    /// Number of generated points.
    #[arg(long)]
    pub count: Option<u64>,
    /// Generator seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cube edge, sphere diameter or patch edge (meters).
    #[arg(long)]
    pub extent: Option<f64>,
    /// Gap between the zfight patches (meters).
    #[arg(long)]
    pub separation: Option<f64>,
    /// Distance of the nearer zfight patch (meters).
    #[arg(long)]
    pub distance: Option<f64>,
}

impl SceneOpts {
    fn overlay(self, over: Self) -> Self {
        overlay!(self, over; input, scene, count, seed, extent, separation, distance)
    }

    fn has_generator_params(&self) -> bool {
        self.count.is_some() || self.seed.is_some() || self.extent.is_some() || self.separation.is_some() || self.distance.is_some()
    }

    pub fn source(&self) -> Result<SceneSource, CliError> {
        match (&self.input, self.scene) {
            (Some(_), Some(_)) => Err(usage("give either an input file or a scene, not both")),
            (None, None) => Err(usage("no input: give --input PATH or --scene KIND")),
            (Some(path), None) => {
                if self.has_generator_params() {
                    return Err(usage("--count, --seed, --extent, --separation and --distance only apply to --scene"));
                }
                Ok(SceneSource::File(path.clone()))
            }
            (None, Some(kind)) => {
                let mut spec = SceneSpec::new(kind);
                spec.count = self.count.unwrap_or(spec.count);
                spec.seed = self.seed.unwrap_or(spec.seed);
                spec.extent = self.extent.unwrap_or(spec.extent);
                spec.separation = self.separation.unwrap_or(spec.separation);
                spec.distance = self.distance.unwrap_or(spec.distance);
                if !(spec.extent.is_finite() && spec.separation.is_finite() && spec.distance.is_finite()) {
                    return Err(usage("scene extent, separation and distance must be finite"));
                }
                Ok(SceneSource::Generated(spec))
            }
        }
    }
}

#[derive(Args, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CameraOpts {
    #[arg(long)]
    pub width: Option<u32>,
    #[arg(long)]
    pub height: Option<u32>,
    /// Vertical field of view in degrees.
    #[arg(long)]
    pub fov: Option<f64>,
    /// Eye position X,Y,Z. Defaults to a view that frames the whole cloud.
    #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
    pub eye: Option<Vec3Arg>,
    /// Look-at point. Defaults to the cloud's center.
    #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
    pub target: Option<Vec3Arg>,
    #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
    pub up: Option<Vec3Arg>,
    /// Near clip distance for the float z-buffer baselines.
    #[arg(long)]
    pub near: Option<f64>,
    /// Far clip distance for the float z-buffer baselines.
    #[arg(long)]
    pub far: Option<f64>,
}

pub const DEFAULT_SIZE: u32 = 512;
pub const DEFAULT_FOV: f64 = 60.0;

impl CameraOpts {
    fn overlay(self, over: Self) -> Self {
        overlay!(self, over; width, height, fov, eye, target, up, near, far)
    }

    /// Resolves the camera, placing the eye on +Z of the target so the cloud's
    /// bounding sphere fits the view when no eye is given.
    pub fn camera_for(&self, cloud: &PointCloud) -> Result<Camera, CliError> {
        let width = self.width.unwrap_or(DEFAULT_SIZE);
        let height = self.height.unwrap_or(DEFAULT_SIZE);
        let fov = self.fov.unwrap_or(DEFAULT_FOV);
        let (center, radius) = match cloud.bounds() {
            Some(b) => (b.center(), (b.extent().length() * 0.5).max(1e-6)),
            None => (DVec3::ZERO, 1.0),
        };
        let target = self.target.map_or(center, |v| v.0);
        let eye = match self.eye {
            Some(v) => v.0,
            None => {
                let half_y = (fov * 0.5).to_radians();
                let half_x = (half_y.tan() * width.max(1) as f64 / height.max(1) as f64).atan();
                let half = half_y.min(half_x);
                target + DVec3::Z * (radius / half.sin() + (target - center).length())
            }
        };
        let up = self.up.map_or(DVec3::Y, |v| v.0);
        let defaults = Camera::look_at(eye, target, up, fov, width, height);
        let camera = defaults.with_clip(self.near.unwrap_or(defaults.near), self.far.unwrap_or(defaults.far));
        camera.validate().map_err(usage)?;
        Ok(camera)
    }
}

#[derive(Args, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PipelineOpts {
    /// atomicmin, splat, baseline-standard (or baseline), baseline-reversed.
    #[arg(long)]
    pub method: Option<Method>,
    /// Uniform depth unit in meters (default 0.001).
    #[arg(long)]
    pub unit: Option<f64>,
    /// Piecewise depth range; repeat for each contiguous row.
    #[arg(long = "range", value_name = "LO:HI:UNIT")]
    #[serde(default)]
    pub ranges: Vec<RangeArg>,
    /// Splat depth tolerance as NUM/DEN.
    #[arg(long, value_name = "NUM/DEN")]
    #[serde(default, deserialize_with = "de_parsed")]
    pub epsilon: Option<Epsilon>,
    /// Background color.
    #[arg(long, value_name = "RRGGBB")]
    pub background: Option<Rgb>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
}

impl PipelineOpts {
    fn overlay(self, over: Self) -> Self {
        Self {
            method: over.method.or(self.method),
            unit: over.unit.or(self.unit),
            ranges: if over.ranges.is_empty() { self.ranges } else { over.ranges },
            epsilon: over.epsilon.or(self.epsilon),
            background: over.background.or(self.background),
            workers: over.workers.or(self.workers),
        }
    }

    pub fn mapper(&self) -> Result<DepthMapper, CliError> {
        match (self.unit, self.ranges.is_empty()) {
            (Some(_), false) => Err(usage("give either a uniform unit or depth ranges, not both")),
            (Some(unit), true) => DepthMapper::uniform(unit).map_err(usage),
            (None, false) => DepthMapper::piecewise(self.ranges.iter().map(|r| r.0).collect()).map_err(usage),
            (None, true) => Ok(DepthMapper::millimeters()),
        }
    }

    pub fn settings(&self) -> Result<RenderSettings, CliError> {
        let workers = match self.workers {
            Some(0) => return Err(usage("workers must be at least 1")),
            Some(n) => Workers::new(n),
            None => Workers::available(),
        };
        Ok(RenderSettings {
            mapper: self.mapper()?,
            epsilon: self.epsilon.unwrap_or_default(),
            background_rgb: self.background.map_or(0, |c| c.0),
            workers,
        })
    }
}

#[derive(Args, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerifyOpts {
    /// Tolerance handed to the splat oracle; defaults to --epsilon. A
    /// different value is a negative control and should fail.
    #[arg(long, value_name = "NUM/DEN")]
    #[serde(default, deserialize_with = "de_parsed")]
    pub oracle_epsilon: Option<Epsilon>,
}

#[derive(Args, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BenchOpts {
    /// Comma-separated methods (default atomicmin,splat,baseline).
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub methods: Vec<Method>,
    /// Comma-separated orderings: original, shuffled(SEED) or shuffled:SEED, morton.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "de_parsed_list")]
    pub orderings: Vec<PointOrder>,
    /// Discarded frames before measuring.
    #[arg(long)]
    pub warmup: Option<u32>,
    /// Measured frames per method and ordering.
    #[arg(long)]
    pub frames: Option<u32>,
    /// Camera positions per orbit revolution.
    #[arg(long)]
    pub orbit_frames: Option<u32>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Orbit elevation in degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub elevation: Option<f64>,
    #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
    pub center: Option<Vec3Arg>,
}

impl BenchOpts {
    fn overlay(self, over: Self) -> Self {
        Self {
            methods: if over.methods.is_empty() { self.methods } else { over.methods },
            orderings: if over.orderings.is_empty() { self.orderings } else { over.orderings },
            warmup: over.warmup.or(self.warmup),
            frames: over.frames.or(self.frames),
            orbit_frames: over.orbit_frames.or(self.orbit_frames),
            radius: over.radius.or(self.radius),
            elevation: over.elevation.or(self.elevation),
            center: over.center.or(self.center),
        }
    }
}

/// Contents of a `--config` file.
#[derive(Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub output: Option<PathBuf>,
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub scene: SceneOpts,
    #[serde(default)]
    pub camera: CameraOpts,
    #[serde(default)]
    pub render: PipelineOpts,
    #[serde(default)]
    pub verify: VerifyOpts,
    #[serde(default)]
    pub bench: BenchOpts,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut config: FileConfig = toml::from_str(text).map_err(|e| usage(format!("invalid config: {e}")))?;
        if config.input.is_some() {
            if config.scene.input.is_some() {
                return Err(usage("invalid config: input given both at top level and in [scene]"));
            }
            config.scene.input = config.input.take();
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }
}

#[derive(Parser, Debug)]
#[command(name = "pointraster", version, about = "Point cloud rasterizer with 64-bit atomic-min framebuffers")]
pub struct Cli {
    /// TOML file whose values override the flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Render a cloud to a PPM image.
    Render(RenderArgs),
    /// Render with the parallel pipeline and its oracle and compare bit for bit.
    Verify(VerifyArgs),
    /// Time every method and point ordering over an orbiting camera; writes CSV.
    Bench(BenchArgs),
    /// Write a synthetic scene as .xyz or .ply.
    Generate(GenerateArgs),
    /// Print point count, bounds and color statistics.
    Info(InfoArgs),
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[command(flatten)]
    pub scene: SceneOpts,
    #[command(flatten)]
    pub camera: CameraOpts,
    #[command(flatten)]
    pub pipeline: PipelineOpts,
    /// Output PPM path; `-` writes to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub scene: SceneOpts,
    #[command(flatten)]
    pub camera: CameraOpts,
    #[command(flatten)]
    pub pipeline: PipelineOpts,
    #[command(flatten)]
    pub verify: VerifyOpts,
    /// Also write the verified image here.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub scene: SceneOpts,
    #[command(flatten)]
    pub camera: CameraOpts,
    #[command(flatten)]
    pub pipeline: PipelineOpts,
    #[command(flatten)]
    pub bench: BenchOpts,
    /// CSV output path (default stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub scene: SceneOpts,
    /// Output path, .xyz or .ply; `-` writes XYZ to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InfoArgs {
    #[command(flatten)]
    pub scene: SceneOpts,
}

/// Fully resolved settings for `render` and `verify`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderConfig {
    pub source: SceneSource,
    pub output: Option<PathBuf>,
    pub camera: CameraOpts,
    pub method: Method,
    pub settings: RenderSettings,
}

impl RenderConfig {
    fn resolve(scene: SceneOpts, camera: CameraOpts, pipeline: PipelineOpts, output: Option<PathBuf>) -> Result<Self, CliError> {
        Ok(Self {
            source: scene.source()?,
            output,
            camera,
            method: pipeline.method.unwrap_or(Method::AtomicMin),
            settings: pipeline.settings()?,
        })
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Render(a) => {
            let output = file.output.or(a.output);
            let config = RenderConfig::resolve(a.scene.overlay(file.scene), a.camera.overlay(file.camera), a.pipeline.overlay(file.render), output)?;
            cmd_render(&config, out)
        }
        Command::Verify(a) => {
            let output = file.output.or(a.output);
            let oracle_epsilon = file.verify.oracle_epsilon.or(a.verify.oracle_epsilon);
            let config = RenderConfig::resolve(a.scene.overlay(file.scene), a.camera.overlay(file.camera), a.pipeline.overlay(file.render), output)?;
            cmd_verify(&config, oracle_epsilon, out)
        }
        Command::Bench(a) => {
            let output = file.output.or(a.output);
            let camera = a.camera.overlay(file.camera);
            let pipeline = a.pipeline.overlay(file.render);
            let config = bench_config(a.scene.overlay(file.scene), &camera, &pipeline, a.bench.overlay(file.bench))?;
            cmd_bench(&config, output.as_deref(), out)
        }
        Command::Generate(a) => {
            let output = file.output.or(a.output);
            cmd_generate(&a.scene.overlay(file.scene), output.as_deref(), out)
        }
        Command::Info(a) => cmd_info(&a.scene.overlay(file.scene).source()?, out),
    }
}

fn load(source: &SceneSource) -> Result<PointCloud, CliError> {
    source.load().map_err(io_err)
}

fn write_out(out: &mut dyn Write, text: fmt::Arguments<'_>) -> Result<(), CliError> {
    out.write_fmt(text).map_err(|e| io_err(format!("stdout: {e}")))
}

fn write_stats(out: &mut dyn Write, method: Method, points: usize, stats: &RenderStats, workers: Workers) -> Result<(), CliError> {
    let passes: Vec<String> = stats.pass_ns.iter().map(|ns| format!("{:.3}", *ns as f64 / 1e6)).collect();
    write_out(
        out,
        format_args!(
            "method: {method}\npoints: {points}\nfragments: {}\nworkers: {}\npass_ms: {}\ntotal_ms: {:.3}\n",
            stats.fragments_written,
            workers.get(),
            passes.join(" "),
            stats.total_ns() as f64 / 1e6
        ),
    )
}

pub fn cmd_render(config: &RenderConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let output = config.output.as_deref().ok_or_else(|| usage("render needs --output PATH"))?;
    let cloud = load(&config.source)?;
    let camera = config.camera.camera_for(&cloud)?;
    let (image, stats) = render(config.method, &cloud, &camera, &config.settings)?;
    io::write_ppm_file(output, &image)?;
    // Keep stdout clean when the image goes there.
    let mut stderr = std::io::stderr();
    let sink: &mut dyn Write = if output.as_os_str() == "-" { &mut stderr } else { out };
    write_stats(sink, config.method, cloud.len(), &stats, config.settings.workers)?;
    write_out(sink, format_args!("output: {}\n", output.display()))
}

/// Renders `config` through the parallel pipeline and the oracle.
pub fn verify_images(
    config: &RenderConfig,
    cloud: &PointCloud,
    oracle_epsilon: Option<Epsilon>,
) -> Result<(ImageRGB8, ImageRGB8, RenderStats), CliError> {
    let camera = config.camera.camera_for(cloud)?;
    let s = &config.settings;
    let expected = match config.method {
        Method::AtomicMin => oracle_closest(cloud, &camera, &s.mapper, s.background_rgb),
        Method::Splat => oracle_splat(cloud, &camera, &s.mapper, oracle_epsilon.unwrap_or(s.epsilon), s.background_rgb),
        m => return Err(usage(format!("verify supports atomicmin and splat, not {m}"))),
    };
    let (image, stats) = render(config.method, cloud, &camera, s)?;
    Ok((image, expected, stats))
}

pub fn cmd_verify(config: &RenderConfig, oracle_epsilon: Option<Epsilon>, out: &mut dyn Write) -> Result<(), CliError> {
    let cloud = load(&config.source)?;
    let (image, expected, _) = verify_images(config, &cloud, oracle_epsilon)?;
    if let Some(path) = &config.output {
        io::write_ppm_file(path, &image)?;
    }
    let label = format!("{} {}x{} points={} workers={}", config.method, image.width(), image.height(), cloud.len(), config.settings.workers.get());
    match image.first_difference(&expected) {
        None => write_out(out, format_args!("match: {label}\n")),
        Some((x, y)) => {
            let (got, want) = (image.pixel(x, y), expected.pixel(x, y));
            write_out(out, format_args!("mismatch: {label}\nfirst difference at ({x}, {y}): pipeline {got:?} oracle {want:?}\n"))?;
            Err(CliError::Mismatch(format!("images differ at pixel ({x}, {y})")))
        }
    }
}

fn bench_config(scene: SceneOpts, camera: &CameraOpts, pipeline: &PipelineOpts, opts: BenchOpts) -> Result<BenchConfig, CliError> {
    if camera.eye.is_some() || camera.target.is_some() || camera.up.is_some() {
        return Err(usage("bench moves the camera along an orbit; use --center, --radius and --elevation instead of --eye/--target/--up"));
    }
    let mut config = BenchConfig::new(scene.source()?);
    config.width = camera.width.unwrap_or(config.width);
    config.height = camera.height.unwrap_or(config.height);
    config.fov_y = camera.fov.unwrap_or(config.fov_y);
    config.near = camera.near;
    config.far = camera.far;
    config.settings = pipeline.settings()?;
    if !opts.methods.is_empty() {
        config.methods = opts.methods;
    } else if let Some(m) = pipeline.method {
        config.methods = vec![m];
    }
    if !opts.orderings.is_empty() {
        config.orderings = opts.orderings;
    }
    config.warmup_frames = opts.warmup.unwrap_or(config.warmup_frames);
    config.measured_frames = opts.frames.unwrap_or(config.measured_frames);
    let default_orbit = Orbit::default();
    config.orbit = Orbit {
        center: opts.center.map(|v| v.0),
        radius: opts.radius,
        elevation_deg: opts.elevation.unwrap_or(default_orbit.elevation_deg),
        frames: opts.orbit_frames.unwrap_or(default_orbit.frames),
    };
    Ok(config)
}

pub fn cmd_bench(config: &BenchConfig, csv_path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let report = bench::run_benchmark(config)?;
    let mut stderr = std::io::stderr();
    let summary_sink: &mut dyn Write = match csv_path {
        Some(path) if path.as_os_str() != "-" => {
            let file = std::fs::File::create(path).map_err(|e| io_err(format!("{}: {e}", path.display())))?;
            report.write_csv(std::io::BufWriter::new(file)).map_err(|e| io_err(format!("{}: {e}", path.display())))?;
            out
        }
        _ => {
            report.write_csv(&mut *out).map_err(|e| io_err(format!("stdout: {e}")))?;
            &mut stderr
        }
    };
    write_out(summary_sink, format_args!("scene: {}\nworkers: {}\n", config.scene.label(), config.settings.workers.get()))?;
    report.write_summary(summary_sink).map_err(|e| io_err(format!("summary: {e}")))
}

pub fn cmd_generate(scene: &SceneOpts, output: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = match scene.source()? {
        SceneSource::Generated(spec) => spec,
        SceneSource::File(_) => return Err(usage("generate needs --scene KIND, not --input")),
    };
    let output = output.ok_or_else(|| usage("generate needs --output PATH"))?;
    let cloud = io::generate(&spec);
    io::write_cloud(output, &cloud)?;
    if output.as_os_str() != "-" {
        write_out(out, format_args!("wrote {} points ({}, seed {}) to {}\n", cloud.len(), spec.kind, spec.seed, output.display()))?;
    }
    Ok(())
}

pub fn cmd_info(source: &SceneSource, out: &mut dyn Write) -> Result<(), CliError> {
    let cloud = load(source)?;
    write_out(out, format_args!("source: {}\npoints: {}\n", source.label(), cloud.len()))?;
    let Some(b) = cloud.bounds() else {
        return write_out(out, format_args!("bounds: none\n"));
    };
    let v = |d: DVec3| format!("{} {} {}", d.x, d.y, d.z);
    let n = cloud.len() as f64;
    let mean = |f: fn(&crate::point::Point) -> u8| cloud.points().iter().map(|p| f(p) as f64).sum::<f64>() / n;
    write_out(
        out,
        format_args!(
            "bounds_min: {}\nbounds_max: {}\ncenter: {}\nextent: {}\nmean_rgb: {:.1} {:.1} {:.1}\n",
            v(b.min),
            v(b.max),
            v(b.center()),
            v(b.extent()),
            mean(|p| p.r),
            mean(|p| p.g),
            mean(|p| p.b)
        ),
    )
}
