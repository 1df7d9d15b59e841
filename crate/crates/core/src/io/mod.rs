//! Point cloud ingestion, image output and synthetic scenes.

pub mod las;
pub mod ply;
pub mod ppm;
pub mod scene;
pub mod xyz;

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

pub use las::{read_las, LasError};
pub use ply::{read_ply, write_ply, PlyError};
pub use ppm::{ppm_bytes, write_ppm};
pub use scene::{generate, SceneKind, SceneSpec};
pub use xyz::{read_xyz, write_xyz, XyzError};

use crate::point::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    Las,
    Ply,
    Xyz,
}

impl CloudFormat {
    /// By extension, case-insensitive. `-` means XYZ on stdin/stdout.
    pub fn from_path(path: &Path) -> Option<Self> {
        if path.as_os_str() == "-" {
            return Some(CloudFormat::Xyz);
        }
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "las" => Some(CloudFormat::Las),
            "ply" => Some(CloudFormat::Ply),
            "xyz" | "txt" => Some(CloudFormat::Xyz),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: unsupported file extension")]
    UnsupportedExtension { path: PathBuf },
    #[error("{path}: {source}")]
    Las { path: PathBuf, source: LasError },
    #[error("{path}: {source}")]
    Ply { path: PathBuf, source: PlyError },
    #[error("{path}: {source}")]
    Xyz { path: PathBuf, source: XyzError },
}

fn read_all(path: &Path) -> Result<Vec<u8>, IoError> {
    let io = |source| IoError::Io { path: path.to_path_buf(), source };
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).map_err(io)?;
        Ok(buf)
    } else {
        fs::read(path).map_err(io)
    }
}

/// Loads a cloud, picking the reader by extension.
pub fn read_cloud(path: &Path) -> Result<PointCloud, IoError> {
    let format = CloudFormat::from_path(path).ok_or_else(|| IoError::UnsupportedExtension { path: path.into() })?;
    let data = read_all(path)?;
    let p = || path.to_path_buf();
    match format {
        CloudFormat::Las => read_las(&data).map_err(|source| IoError::Las { path: p(), source }),
        CloudFormat::Ply => read_ply(&data).map_err(|source| IoError::Ply { path: p(), source }),
        CloudFormat::Xyz => read_xyz(&String::from_utf8_lossy(&data)).map_err(|source| IoError::Xyz { path: p(), source }),
    }
}

/// Writes `.xyz` or `.ply`. There is no LAS writer.
pub fn write_cloud(path: &Path, cloud: &PointCloud) -> Result<(), IoError> {
    let io = |source| IoError::Io { path: path.to_path_buf(), source };
    match CloudFormat::from_path(path) {
        Some(CloudFormat::Xyz) if path.as_os_str() == "-" => write_xyz(cloud, &mut std::io::stdout().lock()).map_err(io),
        Some(CloudFormat::Xyz) => {
            let mut f = fs::File::create(path).map_err(io)?;
            write_xyz(cloud, &mut f).map_err(io)
        }
        Some(CloudFormat::Ply) => {
            let mut f = std::io::BufWriter::new(fs::File::create(path).map_err(io)?);
            write_ply(cloud, &mut f).and_then(|_| f.flush()).map_err(io)
        }
        _ => Err(IoError::UnsupportedExtension { path: path.into() }),
    }
}

/// Writes a PPM file, or to stdout for `-`.
pub fn write_ppm_file(path: &Path, image: &crate::image::ImageRGB8) -> Result<(), IoError> {
    let io = |source| IoError::Io { path: path.to_path_buf(), source };
    if path.as_os_str() == "-" {
        let mut out = std::io::stdout().lock();
        write_ppm(image, &mut out).and_then(|_| out.flush()).map_err(io)
    } else {
        fs::write(path, ppm_bytes(image)).map_err(io)
    }
}
