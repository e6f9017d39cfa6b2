//! File formats: a self-describing flat binary float64 container for
//! matrices and vectors, 16-bit PGM for images, and a plain-text sidecar
//! table for dictionary metadata.
//!
//! Binary layout: 8-byte magic `RWL1BIN\0`, `u32` version (1), `u64` rows,
//! `u64` cols, then `rows * cols` little-endian `f64` values in row-major
//! order. Vectors are stored as single-column matrices.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::analysis::{AtomPhase, Dictionary};
use crate::error::{Error, Result};
use crate::tv::ImageGrid;

const MAGIC: &[u8; 8] = b"RWL1BIN\0";
const VERSION: u32 = 1;

pub fn write_matrix(path: &Path, matrix: &Array2<f64>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(matrix.nrows() as u64).to_le_bytes())?;
    out.write_all(&(matrix.ncols() as u64).to_le_bytes())?;
    for v in matrix.iter() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let mut input = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "{}: bad magic, not a flat float64 file",
            path.display()
        )));
    }
    let mut word4 = [0u8; 4];
    input.read_exact(&mut word4)?;
    let version = u32::from_le_bytes(word4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let mut word8 = [0u8; 8];
    input.read_exact(&mut word8)?;
    let rows = u64::from_le_bytes(word8) as usize;
    input.read_exact(&mut word8)?;
    let cols = u64::from_le_bytes(word8) as usize;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        input.read_exact(&mut word8)?;
        data.push(f64::from_le_bytes(word8));
    }
    Array2::from_shape_vec((rows, cols), data)
        .map_err(|e| Error::Format(format!("shape error: {e}")))
}

pub fn write_vector(path: &Path, vector: &Array1<f64>) -> Result<()> {
    let as_matrix = vector
        .clone()
        .into_shape_with_order((vector.len(), 1))
        .expect("vector reshape");
    write_matrix(path, &as_matrix)
}

pub fn read_vector(path: &Path) -> Result<Array1<f64>> {
    let matrix = read_matrix(path)?;
    if matrix.ncols() == 1 {
        Ok(matrix.column(0).to_owned())
    } else if matrix.nrows() == 1 {
        Ok(matrix.row(0).to_owned())
    } else {
        Err(Error::Format(format!(
            "expected a vector, found {} x {}",
            matrix.nrows(),
            matrix.ncols()
        )))
    }
}

/// Whitespace-separated text matrix (one row per line); a fallback input
/// format for the one-shot solver CLI.
pub fn read_text_matrix(path: &Path) -> Result<Array2<f64>> {
    let input = BufReader::new(File::open(path)?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in input.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            trimmed.split_whitespace().map(str::parse::<f64>).collect();
        let row = row.map_err(|e| Error::Format(format!("bad number: {e}")))?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Format("ragged rows in text matrix".into()));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format("empty text matrix".into()));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(Array2::from_shape_fn((r, c), |(i, j)| rows[i][j]))
}

/// Read a matrix in either format, keyed on the `.txt`/`.csv` extension.
pub fn read_matrix_auto(path: &Path) -> Result<Array2<f64>> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("txt") | Some("csv") => read_text_matrix(path),
        _ => read_matrix(path),
    }
}

pub fn read_vector_auto(path: &Path) -> Result<Array1<f64>> {
    let matrix = read_matrix_auto(path)?;
    if matrix.ncols() == 1 {
        Ok(matrix.column(0).to_owned())
    } else if matrix.nrows() == 1 {
        Ok(matrix.row(0).to_owned())
    } else {
        Err(Error::Format(format!(
            "expected a vector, found {} x {}",
            matrix.nrows(),
            matrix.ncols()
        )))
    }
}

/// 16-bit binary PGM with values clamped from `[0, 1]`.
pub fn write_pgm(path: &Path, img: &ImageGrid) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{} {}\n65535\n", img.n, img.n)?;
    for v in img.pixels.iter() {
        let level = (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
        // PGM stores 16-bit samples most significant byte first.
        out.write_all(&level.to_be_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Image as a flat binary matrix.
pub fn write_image_f64(path: &Path, img: &ImageGrid) -> Result<()> {
    write_matrix(path, &img.pixels)
}

pub fn read_image_f64(path: &Path) -> Result<ImageGrid> {
    ImageGrid::new(read_matrix(path)?)
}

/// Dictionary export: the atom matrix in the flat binary format plus a
/// text sidecar with one row per atom (`index shift frequency scale phase`).
pub fn write_dictionary(matrix_path: &Path, sidecar_path: &Path, dict: &Dictionary) -> Result<()> {
    write_matrix(matrix_path, dict.atoms())?;
    let mut out = BufWriter::new(File::create(sidecar_path)?);
    writeln!(out, "# index shift frequency scale phase")?;
    for (i, p) in dict.params().iter().enumerate() {
        let phase = match p.phase {
            AtomPhase::Cosine => "cos",
            AtomPhase::Sine => "sin",
        };
        writeln!(out, "{} {} {} {} {}", i, p.shift, p.frequency, p.scale, phase)?;
    }
    out.flush()?;
    Ok(())
}
