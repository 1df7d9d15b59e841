//! Sequential reference renderers.
//!
//! These share only projection and quantization with the parallel kernels.
//! Fragment selection, the depth tolerance test and averaging are written
//! out again over explicit per-pixel fragment lists, so comparing images
//! exercises the atomic paths themselves.

use crate::camera::Camera;
use crate::depthmap::DepthMapper;
use crate::fragment::decode_rgb;
use crate::image::ImageRGB8;
use crate::point::PointCloud;
use crate::splat::Epsilon;

struct Fragment {
    index: u64,
    rgb: [u8; 3],
}

fn gather(cloud: &PointCloud, camera: &Camera, mapper: &DepthMapper) -> Vec<Vec<Fragment>> {
    let mut pixels: Vec<Vec<Fragment>> = (0..camera.pixel_count()).map(|_| Vec::new()).collect();
    let projector = camera.projector();
    for p in cloud.points() {
        let Some(hit) = projector.project(p) else { continue };
        let Some(index) = mapper.quantize(hit.depth) else { continue };
        if index >= mapper.capacity() {
            continue;
        }
        pixels[hit.pixel_index(camera.width)].push(Fragment { index, rgb: [p.r, p.g, p.b] });
    }
    pixels
}

fn paint(camera: &Camera, background_rgb: u32, pixels: Vec<Option<[u8; 3]>>) -> ImageRGB8 {
    let mut image = ImageRGB8::new(camera.width, camera.height);
    let background = decode_rgb(background_rgb);
    for (i, px) in pixels.into_iter().enumerate() {
        let (x, y) = ((i % camera.width as usize) as u32, (i / camera.width as usize) as u32);
        image.set_pixel(x, y, px.unwrap_or(background));
    }
    image
}

/// Closest fragment per pixel; equal depth resolves to the smaller color.
pub fn oracle_closest(cloud: &PointCloud, camera: &Camera, mapper: &DepthMapper, background_rgb: u32) -> ImageRGB8 {
    let pixels = gather(cloud, camera, mapper)
        .into_iter()
        .map(|frags| frags.iter().map(|f| (f.index, f.rgb)).min().map(|(_, rgb)| rgb))
        .collect();
    paint(camera, background_rgb, pixels)
}

/// Mean color of every fragment within `epsilon` of the closest depth.
pub fn oracle_splat(
    cloud: &PointCloud,
    camera: &Camera,
    mapper: &DepthMapper,
    epsilon: Epsilon,
    background_rgb: u32,
) -> ImageRGB8 {
    let pixels = gather(cloud, camera, mapper)
        .into_iter()
        .map(|frags| {
            let closest = frags.iter().map(|f| f.index).min()?;
            let accepted: Vec<&Fragment> = frags
                .iter()
                .filter(|f| within_tolerance(mapper, epsilon, f.index, closest))
                .collect();
            let n = accepted.len() as u64;
            let mut out = [0u8; 3];
            for (c, o) in out.iter_mut().enumerate() {
                let sum: u64 = accepted.iter().map(|f| f.rgb[c] as u64).sum();
                *o = ((2 * sum + n) / (2 * n)) as u8;
            }
            Some(out)
        })
        .collect();
    paint(camera, background_rgb, pixels)
}

fn within_tolerance(mapper: &DepthMapper, epsilon: Epsilon, index: u64, closest: u64) -> bool {
    match mapper {
        DepthMapper::Uniform(_) => {
            (index as u128) * (epsilon.den() as u128) <= (closest as u128) * (epsilon.num() as u128)
        }
        DepthMapper::Piecewise(_) => {
            let d = mapper.reconstruct(index).expect("fragment index within capacity");
            let d_min = mapper.reconstruct(closest).expect("fragment index within capacity");
            d <= d_min * (epsilon.num() as f64 / epsilon.den() as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Point;
    use glam::DVec3;

    fn camera() -> Camera {
        Camera::look_at(DVec3::ZERO, DVec3::NEG_Z, DVec3::Y, 60.0, 5, 3)
    }

    #[test]
    fn empty_cloud_is_background() {
        let img = oracle_closest(&PointCloud::new(), &camera(), &DepthMapper::millimeters(), 0x123456);
        assert_eq!(img, ImageRGB8::filled(5, 3, 0x123456));
        let img = oracle_splat(&PointCloud::new(), &camera(), &DepthMapper::millimeters(), Epsilon::DEFAULT, 0);
        assert_eq!(img, ImageRGB8::filled(5, 3, 0));
    }

    #[test]
    fn equal_index_smaller_color() {
        let cloud = PointCloud::from_points(vec![
            Point::new(0.0, 0.0, -2.0004, 0, 0, 0x20),
            Point::new(0.0, 0.0, -2.0009, 0, 0, 0x01),
            Point::new(0.0, 0.0, -2.0001, 0, 0, 0x10),
            Point::new(0.0, 0.0, -2.0011, 0, 0, 0x00),
        ])
        .unwrap();
        // The first three share index 2000; the last is one bin farther.
        let img = oracle_closest(&cloud, &camera(), &DepthMapper::millimeters(), 0);
        assert_eq!(img.pixel(2, 1), [0, 0, 0x01]);
    }

    #[test]
    fn splat_window_by_hand() {
        let cloud = PointCloud::from_points(vec![
            Point::new(0.0, 0.0, -1.0005, 10, 0, 0),
            Point::new(0.0, 0.0, -1.0055, 21, 0, 0),
            Point::new(0.0, 0.0, -1.0115, 200, 0, 0),
        ])
        .unwrap();
        let img = oracle_splat(&cloud, &camera(), &DepthMapper::millimeters(), Epsilon::DEFAULT, 0);
        // (10 + 21) / 2 = 15.5 rounds up
        assert_eq!(img.pixel(2, 1), [16, 0, 0]);
        let single = PointCloud::from_points(vec![Point::new(0.0, 0.0, -4.0, 3, 4, 5)]).unwrap();
        let img = oracle_splat(&single, &camera(), &DepthMapper::millimeters(), Epsilon::DEFAULT, 0);
        assert_eq!(img.pixel(2, 1), [3, 4, 5]);
    }
}
