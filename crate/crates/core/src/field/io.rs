//! Serialization for point clouds and SDF grids.
//!
//! Point clouds: ASCII, one `x y z nx ny nz` line per point.
//! Grids: `SDFG` magic, u32 version, u32 resolution, 3x f32 origin,
//! f32 cell size, then resolution^3 little-endian f32 scalars with x
//! fastest.

use super::{FieldError, PointCloud, SdfGrid};
use crate::geom::Vec3;
use std::io::{Read, Write};
use std::path::Path;

pub fn write_xyz(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<(), FieldError> {
    use std::fmt::Write as _;
    let mut text = String::with_capacity(cloud.len() * 64);
    for (p, n) in cloud.points.iter().zip(&cloud.normals) {
        let _ = writeln!(
            text,
            "{:.6} {:.6} {:.6} {:.6} {:.6} {:.6}",
            p.x, p.y, p.z, n.x, n.y, n.z
        );
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_xyz(path: impl AsRef<Path>) -> Result<PointCloud, FieldError> {
    let text = std::fs::read_to_string(path)?;
    let mut points = Vec::new();
    let mut normals = Vec::new();
    for (li, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
        let vals = vals.map_err(|_| FieldError::Format(format!("line {}: bad number", li + 1)))?;
        if vals.len() != 6 {
            return Err(FieldError::Format(format!(
                "line {}: expected 6 fields, got {}",
                li + 1,
                vals.len()
            )));
        }
        points.push(Vec3::new(vals[0], vals[1], vals[2]));
        let n = Vec3::new(vals[3], vals[4], vals[5]);
        // Values were printed at finite precision; re-normalize.
        normals.push(n.normalized().unwrap_or(Vec3::new(0.0, 0.0, 1.0)));
    }
    let cloud = PointCloud { points, normals };
    cloud.validate()?;
    Ok(cloud)
}

const SDF_MAGIC: &[u8; 4] = b"SDFG";
const SDF_VERSION: u32 = 1;

pub fn write_sdf_grid(grid: &SdfGrid, path: impl AsRef<Path>) -> Result<(), FieldError> {
    let mut out = Vec::with_capacity(24 + grid.values.len() * 4);
    out.extend_from_slice(SDF_MAGIC);
    out.extend_from_slice(&SDF_VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.resolution as u32).to_le_bytes());
    for c in [grid.origin.x, grid.origin.y, grid.origin.z] {
        out.extend_from_slice(&(c as f32).to_le_bytes());
    }
    out.extend_from_slice(&(grid.cell_size as f32).to_le_bytes());
    for v in &grid.values {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

pub fn read_sdf_grid(path: impl AsRef<Path>) -> Result<SdfGrid, FieldError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 24 || &bytes[0..4] != SDF_MAGIC {
        return Err(FieldError::Format("not an SDFG file".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f32_at = |o: usize| f32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != SDF_VERSION {
        return Err(FieldError::Format(format!("unsupported SDFG version {version}")));
    }
    let resolution = u32_at(8) as usize;
    let origin = Vec3::new(f32_at(12) as f64, f32_at(16) as f64, f32_at(20) as f64);
    let cell_size = f32_at(24) as f64;
    let n = resolution * resolution * resolution;
    let data_start = 28;
    if bytes.len() != data_start + 4 * n {
        return Err(FieldError::Format(format!(
            "expected {} scalar bytes, found {}",
            4 * n,
            bytes.len() - data_start
        )));
    }
    let values = (0..n)
        .map(|i| f32_at(data_start + 4 * i) as f64)
        .collect();
    Ok(SdfGrid { resolution, origin, cell_size, values })
}
