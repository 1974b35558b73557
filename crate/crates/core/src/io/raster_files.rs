//! Binary grid files and bundle directories.
//!
//! Every grid file starts with a 16-byte header: a 4-byte magic, the
//! resolution as little-endian `u32`, and meters-per-pixel as little-endian
//! `f64`. The payload follows row-major, little-endian: `f64` values for
//! orientation (three per pixel), angle and height, `i32` for labels.

use std::fs;
use std::path::{Path, PathBuf};

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::io::json::{facets_from_json, facets_to_json};
use crate::raster::{RasterBundle, CH_BG, CH_LR, CH_TB};
use crate::scalar::Scalar;

pub const MAGIC_ORIENTATION: &[u8; 4] = b"RKOR";
pub const MAGIC_ANGLE: &[u8; 4] = b"RKAN";
pub const MAGIC_HEIGHT: &[u8; 4] = b"RKHT";
pub const MAGIC_LABELS: &[u8; 4] = b"RKLB";
const HEADER_LEN: usize = 16;

pub const ORIENTATION_FILE: &str = "orientation.bin";
pub const ANGLE_FILE: &str = "angle.bin";
pub const HEIGHT_FILE: &str = "height.bin";
pub const LABELS_FILE: &str = "labels.bin";
pub const FACETS_FILE: &str = "facets.json";
pub const ORIENTATION_PREVIEW: &str = "orientation.png";
pub const ANGLE_PREVIEW: &str = "angle.pgm";

fn header(magic: &[u8; 4], n: usize, mpp: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + n * n * 24);
    out.extend_from_slice(magic);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&mpp.to_le_bytes());
    out
}

/// Checks magic and length; returns resolution, meters-per-pixel and payload.
fn split<'a>(bytes: &'a [u8], magic: &[u8; 4], bytes_per_pixel: usize) -> Result<(usize, f64, &'a [u8])> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != magic {
        return Err(Error::Format(format!("expected a {} grid file", String::from_utf8_lossy(magic))));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let mpp = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != n * n * bytes_per_pixel {
        return Err(Error::Format(format!("grid payload of {} bytes for resolution {n}", payload.len())));
    }
    Ok((n, mpp, payload))
}

fn f64s(payload: &[u8]) -> impl Iterator<Item = f64> + '_ {
    payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()))
}

pub fn encode_orientation<T: Scalar>(g: &Grid<[T; 3]>, mpp: T) -> Vec<u8> {
    let mut out = header(MAGIC_ORIENTATION, g.width(), mpp.to_f64_lossy());
    for px in g.data() {
        for c in px {
            out.extend_from_slice(&c.to_f64_lossy().to_le_bytes());
        }
    }
    out
}

pub fn decode_orientation<T: Scalar>(bytes: &[u8]) -> Result<(Grid<[T; 3]>, T)> {
    let (n, mpp, payload) = split(bytes, MAGIC_ORIENTATION, 24)?;
    let vals: Vec<T> = f64s(payload).map(T::of).collect();
    let data = vals.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Ok((Grid::from_vec(n, n, data).expect("length checked"), T::of(mpp)))
}

/// Scalar channel (`MAGIC_ANGLE` or `MAGIC_HEIGHT`).
pub fn encode_scalar<T: Scalar>(magic: &[u8; 4], g: &Grid<T>, mpp: T) -> Vec<u8> {
    let mut out = header(magic, g.width(), mpp.to_f64_lossy());
    for v in g.data() {
        out.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
    }
    out
}

pub fn decode_scalar<T: Scalar>(magic: &[u8; 4], bytes: &[u8]) -> Result<(Grid<T>, T)> {
    let (n, mpp, payload) = split(bytes, magic, 8)?;
    let data = f64s(payload).map(T::of).collect();
    Ok((Grid::from_vec(n, n, data).expect("length checked"), T::of(mpp)))
}

pub fn encode_labels<T: Scalar>(g: &Grid<i32>, mpp: T) -> Vec<u8> {
    let mut out = header(MAGIC_LABELS, g.width(), mpp.to_f64_lossy());
    for v in g.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_labels(bytes: &[u8]) -> Result<(Grid<i32>, f64)> {
    let (n, mpp, payload) = split(bytes, MAGIC_LABELS, 4)?;
    let data = payload.chunks_exact(4).map(|c| i32::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((Grid::from_vec(n, n, data).expect("length checked"), mpp))
}

pub fn encode_png_rgb(g: &Grid<[u8; 3]>) -> Vec<u8> {
    let raw: Vec<u8> = g.data().iter().flatten().copied().collect();
    let mut out = Vec::new();
    PngEncoder::new(&mut out)
        .write_image(&raw, g.width() as u32, g.height() as u32, ExtendedColorType::Rgb8)
        .expect("in-memory PNG encoding cannot fail");
    out
}

/// Probabilities scaled to bytes, one channel per color.
pub fn orientation_preview<T: Scalar>(g: &Grid<[T; 3]>) -> Grid<[u8; 3]> {
    let byte = |v: T| (v.max(T::zero()).min(T::one()) * T::of(255.0)).round().to_u8().unwrap_or(255);
    g.map(|o| [byte(o[CH_LR]), byte(o[CH_TB]), byte(o[CH_BG])])
}

/// Binary PGM, angle 0 to pi/2 mapped onto 0 to 255.
pub fn angle_preview_pgm<T: Scalar>(g: &Grid<T>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", g.width(), g.height()).into_bytes();
    let scale = T::of(255.0) / T::FRAC_PI_2();
    out.extend(g.data().iter().map(|a| (*a * scale).round().max(T::zero()).min(T::of(255.0)).to_u8().unwrap_or(0)));
    out
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Writes the four channel files, the facet table and two previews into
/// `dir` (created if missing). Returns the written paths in a fixed order.
pub fn write_bundle<T: Scalar>(dir: &Path, b: &RasterBundle<T>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mpp = b.meters_per_pixel;
    let files: Vec<(&str, Vec<u8>)> = vec![
        (ORIENTATION_FILE, encode_orientation(&b.orientation, mpp)),
        (ANGLE_FILE, encode_scalar(MAGIC_ANGLE, &b.angle, mpp)),
        (HEIGHT_FILE, encode_scalar(MAGIC_HEIGHT, &b.height, mpp)),
        (LABELS_FILE, encode_labels(&b.labels, mpp)),
        (FACETS_FILE, facets_to_json(&b.facets).into_bytes()),
        (ORIENTATION_PREVIEW, encode_png_rgb(&orientation_preview(&b.orientation))),
        (ANGLE_PREVIEW, angle_preview_pgm(&b.angle)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let path = dir.join(name);
        write_file(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}

pub fn read_bundle<T: Scalar>(dir: &Path) -> Result<RasterBundle<T>> {
    let (orientation, mpp) = decode_orientation::<T>(&read_file(&dir.join(ORIENTATION_FILE))?)?;
    let (angle, _) = decode_scalar::<T>(MAGIC_ANGLE, &read_file(&dir.join(ANGLE_FILE))?)?;
    let (height, _) = decode_scalar::<T>(MAGIC_HEIGHT, &read_file(&dir.join(HEIGHT_FILE))?)?;
    let (labels, _) = decode_labels(&read_file(&dir.join(LABELS_FILE))?)?;
    let facets_path = dir.join(FACETS_FILE);
    let facets_text = String::from_utf8(read_file(&facets_path)?).map_err(|e| Error::Format(e.to_string()))?;
    let b = RasterBundle { meters_per_pixel: mpp, orientation, angle, height, labels, facets: facets_from_json(&facets_text)? };
    b.check_shape()?;
    Ok(b)
}

/// Orientation grid from a bundle directory or a single orientation file.
pub fn read_orientation<T: Scalar>(path: &Path) -> Result<(Grid<[T; 3]>, T)> {
    let file = if path.is_dir() { path.join(ORIENTATION_FILE) } else { path.to_path_buf() };
    decode_orientation(&read_file(&file)?)
}
