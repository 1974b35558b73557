//! Recursive minimum matching distance between sets of polygonal roof
//! models: vertex, facet, model and set levels, each matched greedily with a
//! fixed penalty for unmatched elements.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Dim, Facet, RoofModel, Vertex};
use crate::scalar::Scalar;

/// Side of the normalization square, meters.
pub const SQUARE_SIDE: f64 = 16.0;

/// Diagonal of the normalization square.
pub fn default_penalty() -> f64 {
    SQUARE_SIDE * std::f64::consts::SQRT_2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmmdConfig<T = f64> {
    pub penalty: T,
    pub dim: Dim,
    pub square_side: T,
}

impl<T: Scalar> Default for RmmdConfig<T> {
    fn default() -> Self {
        Self { penalty: T::of(default_penalty()), dim: Dim::Two, square_side: T::of(SQUARE_SIDE) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult<T = f64> {
    /// `(row, col, cost)` in selection order.
    pub pairs: Vec<(usize, usize, T)>,
    pub unmatched_a: Vec<usize>,
    /// Sum of matched costs.
    pub total: T,
}

/// Repeatedly takes the smallest remaining entry, ties broken by
/// `(row, col)`, and removes its row and column.
pub fn greedy_match<T: Scalar>(cost: &[Vec<T>]) -> MatchResult<T> {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    let mut entries: Vec<(T, usize, usize)> =
        (0..rows).flat_map(|i| (0..cols).map(move |j| (cost[i][j], i, j))).collect();
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut row_used = vec![false; rows];
    let mut col_used = vec![false; cols];
    let mut pairs = Vec::with_capacity(rows.min(cols));
    let mut total = T::zero();
    for (c, i, j) in entries {
        if pairs.len() == rows.min(cols) {
            break;
        }
        if row_used[i] || col_used[j] {
            continue;
        }
        row_used[i] = true;
        col_used[j] = true;
        total = total + c;
        pairs.push((i, j, c));
    }
    let unmatched_a = (0..rows).filter(|&i| !row_used[i]).collect();
    MatchResult { pairs, unmatched_a, total }
}

pub fn vertex_distance<T: Scalar>(a: &Vertex<T>, b: &Vertex<T>, dim: Dim) -> T {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = match dim {
        Dim::Two => T::zero(),
        Dim::Three => a.z.unwrap_or_else(T::zero) - b.z.unwrap_or_else(T::zero),
    };
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Matched-plus-penalty cost of one level, normalized by the size of the
/// first collection.
fn level_distance<T: Scalar>(cost: &[Vec<T>], len_a: usize, penalty: T) -> T {
    let m = greedy_match(cost);
    (m.total + penalty * T::of_usize(m.unmatched_a.len())) / T::of_usize(len_a)
}

pub fn facet_distance<T: Scalar>(f1: &Facet<T>, f2: &Facet<T>, cfg: &RmmdConfig<T>) -> T {
    let cost: Vec<Vec<T>> = f1
        .vertices
        .iter()
        .map(|a| f2.vertices.iter().map(|b| vertex_distance(a, b, cfg.dim)).collect())
        .collect();
    level_distance(&cost, f1.vertices.len(), cfg.penalty)
}

pub fn symmetric_facet_cost<T: Scalar>(f1: &Facet<T>, f2: &Facet<T>, cfg: &RmmdConfig<T>) -> T {
    (facet_distance(f1, f2, cfg) + facet_distance(f2, f1, cfg)) * T::half()
}

pub fn model_distance<T: Scalar>(m1: &RoofModel<T>, m2: &RoofModel<T>, cfg: &RmmdConfig<T>) -> T {
    let cost: Vec<Vec<T>> = m1
        .facets
        .iter()
        .map(|a| m2.facets.iter().map(|b| symmetric_facet_cost(a, b, cfg)).collect())
        .collect();
    level_distance(&cost, m1.facets.len(), cfg.penalty)
}

pub fn symmetric_model_cost<T: Scalar>(m1: &RoofModel<T>, m2: &RoofModel<T>, cfg: &RmmdConfig<T>) -> T {
    (model_distance(m1, m2, cfg) + model_distance(m2, m1, cfg)) * T::half()
}

/// `|s1| x |s2|` symmetric model costs, rows computed in parallel.
pub fn model_cost_matrix<T: Scalar>(s1: &[RoofModel<T>], s2: &[RoofModel<T>], cfg: &RmmdConfig<T>) -> Vec<Vec<T>> {
    s1.par_iter()
        .map(|a| s2.iter().map(|b| symmetric_model_cost(a, b, cfg)).collect())
        .collect()
}

/// Asymmetric distance from the reference set `s1` to `s2`. Models are
/// expected to be normalized already.
pub fn set_distance<T: Scalar>(s1: &[RoofModel<T>], s2: &[RoofModel<T>], cfg: &RmmdConfig<T>) -> Result<T> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::EmptySet);
    }
    let cost = model_cost_matrix(s1, s2, cfg);
    Ok(level_distance(&cost, s1.len(), cfg.penalty))
}

/// For every model of `s1`, the index and cost of its cheapest model in
/// `s2` (first index on ties).
pub fn nearest_neighbors<T: Scalar>(s1: &[RoofModel<T>], s2: &[RoofModel<T>], cfg: &RmmdConfig<T>) -> Vec<(usize, T)> {
    model_cost_matrix(s1, s2, cfg)
        .into_iter()
        .map(|row| {
            row.into_iter()
                .enumerate()
                .fold((usize::MAX, T::infinity()), |best, (j, c)| if c < best.1 { (j, c) } else { best })
        })
        .collect()
}

/// Uniformly scales the footprint bounding box to fit `square_side` and
/// centers it in `[0, square_side]^2`. Heights are scaled by the same factor.
pub fn normalize_model<T: Scalar>(m: &RoofModel<T>, square_side: T) -> Result<RoofModel<T>> {
    let mut verts = m.vertices().peekable();
    if verts.peek().is_none() {
        return Err(Error::EmptyModel);
    }
    let (mut x0, mut y0, mut x1, mut y1) = (T::infinity(), T::infinity(), T::neg_infinity(), T::neg_infinity());
    for v in verts {
        x0 = x0.min(v.x);
        y0 = y0.min(v.y);
        x1 = x1.max(v.x);
        y1 = y1.max(v.y);
    }
    let (w, h) = (x1 - x0, y1 - y0);
    let extent = w.max(h);
    if !(extent > T::zero()) {
        return Err(Error::ZeroExtentModel);
    }
    let s = square_side / extent;
    let ox = (square_side - w * s) * T::half();
    let oy = (square_side - h * s) * T::half();
    let facets = m
        .facets
        .iter()
        .map(|f| Facet {
            vertices: f
                .vertices
                .iter()
                .map(|v| Vertex { x: (v.x - x0) * s + ox, y: (v.y - y0) * s + oy, z: v.z.map(|z| z * s) })
                .collect(),
            plane_angle: f.plane_angle,
        })
        .collect();
    Ok(RoofModel { facets })
}
