//! Point cloud rasterization with packed 64-bit depth/color fragments resolved
//! by atomic minimum, an approximate-depth splatting variant, and a float
//! z-buffer baseline for comparison.
//!
//! ```
//! use pointraster::{render, Camera, Method, Point, PointCloud, RenderSettings};
//! use glam::DVec3;
//!
//! let cloud = PointCloud::from_points(vec![Point::new(0.0, 0.0, -2.0, 255, 0, 0)]).unwrap();
//! let camera = Camera::look_at(DVec3::ZERO, DVec3::NEG_Z, DVec3::Y, 60.0, 8, 8);
//! let (image, _) = render(Method::AtomicMin, &cloud, &camera, &RenderSettings::default()).unwrap();
//! assert_eq!(image.pixel(4, 4), [255, 0, 0]);
//! ```

// NaN-rejecting range checks read best as !(x > 0.0).
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod bench;
pub mod camera;
pub mod cli;
pub mod depthmap;
pub mod fragment;
pub mod framebuffer;
pub mod image;
pub mod io;
pub mod oracle;
pub mod parallel;
pub mod point;
pub mod raster;
pub mod render;
pub mod rng;
pub mod splat;

pub use baseline::{ndc_depth_f32, rasterize_zbuffer, render_zbuffer, DepthMode, FloatDepthBuffer};
pub use bench::{morton_sort, run_benchmark, shuffle_points, BenchConfig, BenchReport, PointOrder};
pub use camera::{project, Camera, CameraError, Projected, Projector};
pub use depthmap::{DepthMapError, DepthMapper, DepthRange, PiecewiseMapping, UniformMapping};
pub use fragment::{decode_rgb, encode_rgb, pack_fragment, unpack_fragment, PackedFragment};
pub use framebuffer::Framebuffer64;
pub use image::ImageRGB8;
pub use oracle::{oracle_closest, oracle_splat};
pub use parallel::Workers;
pub use point::{Bounds, Point, PointCloud};
pub use raster::{rasterize_atomicmin, resolve_and_clear, RenderError, RenderStats};
pub use render::{render, Method, RenderSettings, Renderer};
pub use rng::SplitMix64;
pub use splat::{splat_accumulate, splat_depth_pass, splat_resolve, AccumBuffer, Epsilon};
