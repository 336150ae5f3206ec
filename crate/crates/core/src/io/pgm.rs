//! 8-bit binary PGM export of image volumes.
//!
//! One PGM per scan position, laid out with array elements as columns and
//! depth bins as rows. PGM is used because anything can open it; the
//! lossless complex record is written alongside for quantitative work.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{ContainerError, ReconError};
use crate::recon::{magnitude_db, ImageVolume};
use crate::scalar::Scalar;

/// Write a binary (P5) PGM.
pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> std::io::Result<()> {
    assert_eq!(pixels.len(), width * height);
    let mut file = fs::File::create(path)?;
    write!(file, "P5\n{width} {height}\n255\n")?;
    file.write_all(pixels)?;
    Ok(())
}

/// Failure modes of image emission.
#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error(transparent)]
    Recon(#[from] ReconError),
    #[error(transparent)]
    Container(#[from] ContainerError),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Emit an image volume as one PGM per x-slice (via the dB display mapping)
/// plus a lossless `IMGV` container, all under `prefix`.
///
/// Returns the paths written, container first.
pub fn emit_image<T: Scalar>(
    image: &ImageVolume<T>,
    dynamic_range_db: T,
    prefix: &Path,
    x_start: f64,
    x_step: f64,
) -> Result<Vec<PathBuf>, EmitError> {
    let display = magnitude_db(image, dynamic_range_db)?;
    let (n_x, n_y, n_z) = display.dim();

    let mut paths = Vec::with_capacity(n_x + 1);
    let container = prefix.with_extension("fbec");
    super::container::write_image(&container, image, x_start, x_step)?;
    paths.push(container);

    let stem = prefix
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_string());
    let dir = prefix.parent().unwrap_or(Path::new("."));
    for ix in 0..n_x {
        let mut pixels = Vec::with_capacity(n_y * n_z);
        for iz in 0..n_z {
            for iy in 0..n_y {
                let unit = display[[ix, iy, iz]].to_f64();
                pixels.push((unit * 255.0).round().clamp(0.0, 255.0) as u8);
            }
        }
        let path = dir.join(format!("{stem}_x{ix:03}.pgm"));
        write_pgm(&path, n_y, n_z, &pixels)?;
        paths.push(path);
    }
    Ok(paths)
}
