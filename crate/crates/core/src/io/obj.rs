//! Wavefront OBJ export. Facets are triangulated by ear clipping; the image
//! `y` axis is flipped so that the mesh is right-handed with `z` up.

use std::fmt::Write;

use crate::model::RoofModel;
use crate::scalar::Scalar;

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn signed_area(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        a.0 * b.1 - b.0 * a.1
    })
    .sum::<f64>()
        / 2.0
}

fn inside_triangle(p: (f64, f64), a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> bool {
    cross(a, b, p) >= 0.0 && cross(b, c, p) >= 0.0 && cross(c, a, p) >= 0.0
}

/// Triangles (as index triples into `pts`) covering a simple polygon, all
/// wound counter-clockwise. Falls back to a fan if no ear can be found,
/// which only happens for self-intersecting input.
pub fn ear_clip(pts: &[(f64, f64)]) -> Vec<[usize; 3]> {
    let n = pts.len();
    if n < 3 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..n).collect();
    if signed_area(pts) < 0.0 {
        idx.reverse();
    }
    let mut tris = Vec::with_capacity(n - 2);
    while idx.len() > 3 {
        let m = idx.len();
        let ear = (0..m).find(|&k| {
            let (ia, ib, ic) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (a, b, c) = (pts[ia], pts[ib], pts[ic]);
            cross(a, b, c) > 0.0
                && idx.iter().all(|&j| j == ia || j == ib || j == ic || pts[j] == a || pts[j] == b || pts[j] == c || !inside_triangle(pts[j], a, b, c))
        });
        match ear {
            Some(k) => {
                tris.push([idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]]);
                idx.remove(k);
            }
            None => {
                // Drop a collinear vertex if there is one, otherwise fan out.
                if let Some(k) = (0..m).find(|&k| cross(pts[idx[(k + m - 1) % m]], pts[idx[k]], pts[idx[(k + 1) % m]]) == 0.0) {
                    idx.remove(k);
                    continue;
                }
                for k in 1..m - 1 {
                    tris.push([idx[0], idx[k], idx[k + 1]]);
                }
                return tris;
            }
        }
    }
    if cross(pts[idx[0]], pts[idx[1]], pts[idx[2]]) != 0.0 {
        tris.push([idx[0], idx[1], idx[2]]);
    }
    tris
}

/// OBJ text with one object per facet. Vertices are written as
/// `x -y z`; 2D models get `z = 0`.
pub fn model_to_obj<T: Scalar>(m: &RoofModel<T>) -> String {
    let mut out = String::from("# roofkit\n");
    let mut base = 1;
    for (k, f) in m.facets.iter().enumerate() {
        let _ = writeln!(out, "o facet_{k}");
        // `+ 0.0` turns -0 into 0
        let flipped: Vec<(f64, f64)> = f.vertices.iter().map(|v| (v.x.to_f64_lossy(), -v.y.to_f64_lossy() + 0.0)).collect();
        for (v, (x, y)) in f.vertices.iter().zip(&flipped) {
            let z = v.z.map_or(0.0, |z| z.to_f64_lossy());
            let _ = writeln!(out, "v {x} {y} {z}");
        }
        for [a, b, c] in ear_clip(&flipped) {
            let _ = writeln!(out, "f {} {} {}", base + a, base + b, base + c);
        }
        base += f.vertices.len();
    }
    out
}
