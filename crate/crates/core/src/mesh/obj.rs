//! ASCII Wavefront OBJ subset: `v x y z` and `f i j k...` records with
//! 1-based indices. `f i/t/n` forms are accepted and the extras ignored;
//! polygons with more than three vertices are fan-triangulated. Floats are
//! written with 6 decimal places.

use super::{Mesh, MeshError};
use crate::geom::Vec3;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ObjError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: face index {index} out of range (have {n_vertices} vertices)")]
    FaceIndex { line: usize, index: i64, n_vertices: usize },
    #[error("invalid mesh: {0}")]
    Mesh(#[from] MeshError),
}

pub fn load_obj(path: impl AsRef<Path>) -> Result<Mesh, ObjError> {
    let file = std::fs::File::open(path)?;
    read_obj(BufReader::new(file))
}

pub fn read_obj<R: BufRead>(reader: R) -> Result<Mesh, ObjError> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();

    for (li, line) in reader.lines().enumerate() {
        let line_no = li + 1;
        let line = line?;
        let mut tokens = line.split_whitespace();
        let Some(kind) = tokens.next() else { continue };
        match kind {
            "v" => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    let tok = tokens.next().ok_or_else(|| ObjError::Parse {
                        line: line_no,
                        message: "vertex record needs 3 coordinates".into(),
                    })?;
                    *c = tok.parse().map_err(|_| ObjError::Parse {
                        line: line_no,
                        message: format!("bad coordinate {tok:?}"),
                    })?;
                }
                vertices.push(Vec3::from(coords));
            }
            "f" => {
                let mut idx = Vec::new();
                for tok in tokens {
                    // "i", "i/t", "i//n", "i/t/n": only the position index matters.
                    let first = tok.split('/').next().unwrap_or("");
                    let i: i64 = first.parse().map_err(|_| ObjError::Parse {
                        line: line_no,
                        message: format!("bad face index {tok:?}"),
                    })?;
                    if i < 1 || i as usize > vertices.len() {
                        return Err(ObjError::FaceIndex {
                            line: line_no,
                            index: i,
                            n_vertices: vertices.len(),
                        });
                    }
                    idx.push((i - 1) as usize);
                }
                if idx.len() < 3 {
                    return Err(ObjError::Parse {
                        line: line_no,
                        message: format!("face has {} vertices; need >= 3", idx.len()),
                    });
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            // Comments and unsupported records are skipped.
            _ => {}
        }
    }

    Ok(Mesh::new(vertices, faces)?)
}

pub fn save_obj(mesh: &Mesh, path: impl AsRef<Path>) -> Result<(), ObjError> {
    mesh.validate()?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(write_obj(mesh).as_bytes())?;
    Ok(())
}

/// Renders the mesh as OBJ text. Deterministic, so repeated saves are
/// byte-identical.
pub fn write_obj(mesh: &Mesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {:.6} {:.6} {:.6}", v.x, v.y, v.z);
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}
