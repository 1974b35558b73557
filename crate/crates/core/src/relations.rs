//! Relation detection, ground-truth snapping and probabilistic colinearity
//! enforcement with image warping.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{RelationVector, RoofGraph, RoofPrimitive, Side};
use crate::raster::{rasterize_primitive, RasterBundle, RasterConfig, BACKGROUND, CH_BG};
use crate::scalar::{within, Scalar};
use crate::vectorize::vectorize_box;

pub const DEFAULT_TOL_PX: f64 = 1.0;
pub const DEFAULT_TOL_DEG: f64 = 18.0;

/// `[left, top, right, bottom]`.
pub type BoxCoords<T> = [T; 4];

pub(crate) fn box_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Top => 1,
        Side::Right => 2,
        Side::Bottom => 3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T = f64> {
    pub px: T,
    pub deg: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Self { px: T::of(DEFAULT_TOL_PX), deg: T::of(DEFAULT_TOL_DEG) }
    }
}

/// Hard relation vector between two primitives. Boundaries are compared
/// side by side (left with left, never left with right); facet groups are
/// compared in degrees and only when both primitives have that group.
/// Both comparisons are inclusive.
pub fn detect_relations<T: Scalar>(a: &RoofPrimitive<T>, b: &RoofPrimitive<T>, tol: Tolerances<T>) -> RelationVector<T> {
    let flag = |hit: bool| if hit { T::one() } else { T::zero() };
    let mut v = RelationVector::zeros();
    for side in Side::ALL {
        v.set_colinear(side, flag(within(a.coord(side), b.coord(side), tol.px)));
    }
    let deg_close = |x: T, y: T| within(x.to_degrees(), y.to_degrees(), tol.deg);
    v.parallel_lr = flag(a.ptype.has_lr_facets() && b.ptype.has_lr_facets() && deg_close(a.angle_lr, b.angle_lr));
    v.parallel_tb = flag(a.ptype.has_tb_facets() && b.ptype.has_tb_facets() && deg_close(a.angle_tb, b.angle_tb));
    v
}

/// Recomputes every pair's relation vector from the primitives.
pub fn detect_graph<T: Scalar>(graph: &RoofGraph<T>, tol: Tolerances<T>) -> RoofGraph<T> {
    let mut out = graph.clone();
    out.relations = graph
        .pairs()
        .map(|(i, j)| ((i, j), detect_relations(&graph.primitives[i], &graph.primitives[j], tol)))
        .collect();
    out
}

/// For every relation entry above 0.5, overwrites the higher-indexed
/// primitive's coordinate (or angle) with the lower-indexed one's. Pairs are
/// visited in lexicographic order, so chains collapse onto their first
/// member.
pub fn snap_ground_truth<T: Scalar>(graph: &RoofGraph<T>) -> RoofGraph<T> {
    let mut out = graph.clone();
    let half = T::half();
    for (&(i, j), v) in &graph.relations {
        let src = out.primitives[i];
        let dst = &mut out.primitives[j];
        for side in Side::ALL {
            if v.colinear(side) > half {
                dst.set_coord(side, src.coord(side));
            }
        }
        if v.parallel_lr > half {
            dst.angle_lr = src.angle_lr;
        }
        if v.parallel_tb > half {
            dst.angle_tb = src.angle_tb;
        }
    }
    out
}

/// `ReLU(2p - 1)`: relations at or below even odds carry no weight.
pub fn enforcement_weight<T: Scalar>(p: T) -> T {
    (T::two() * p - T::one()).max(T::zero())
}

/// One simultaneous pass of weighted averaging per side: each primitive's
/// coordinate becomes the mean of all primitives' coordinates, weighted 1
/// for itself and `enforcement_weight(p)` for the others. Missing pairs
/// weigh zero.
pub fn enforce_colinearity<T: Scalar>(
    boxes: &[BoxCoords<T>],
    relations: &BTreeMap<(usize, usize), RelationVector<T>>,
) -> Vec<BoxCoords<T>> {
    let n = boxes.len();
    let weight = |i: usize, j: usize, side: Side| -> T {
        if i == j {
            return T::one();
        }
        let key = if i < j { (i, j) } else { (j, i) };
        relations.get(&key).map_or(T::zero(), |v| enforcement_weight(v.colinear(side)))
    };
    (0..n)
        .map(|i| {
            let mut out = boxes[i];
            for side in Side::ALL {
                let k = box_index(side);
                let own = boxes[i][k];
                let ws: Vec<T> = (0..n).map(|j| weight(i, j, side)).collect();
                // The weighted mean of equal values is that value; skip the
                // arithmetic so fixed points stay bit-exact.
                if (0..n).all(|j| ws[j] == T::zero() || boxes[j][k] == own) {
                    continue;
                }
                // Summation runs in global index order so that primitives with
                // identical weight sets get bit-identical results.
                let (mut num, mut den) = (T::zero(), T::zero());
                for j in 0..n {
                    if ws[j] > T::zero() {
                        num = num + ws[j] * boxes[j][k];
                        den = den + ws[j];
                    }
                }
                out[k] = num / den;
            }
            out
        })
        .collect()
}

/// Repeats [`enforce_colinearity`] until no coordinate moves more than
/// `tol` or `max_iter` passes have run. Returns the boxes and the pass count.
pub fn enforce_colinearity_fixed_point<T: Scalar>(
    boxes: &[BoxCoords<T>],
    relations: &BTreeMap<(usize, usize), RelationVector<T>>,
    max_iter: usize,
    tol: T,
) -> (Vec<BoxCoords<T>>, usize) {
    let mut cur = boxes.to_vec();
    for it in 1..=max_iter {
        let next = enforce_colinearity(&cur, relations);
        let moved = cur
            .iter()
            .zip(&next)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (*x - *y).abs()))
            .fold(T::zero(), T::max);
        cur = next;
        if moved <= tol {
            return (cur, it);
        }
    }
    (cur, max_iter)
}

/// Non-uniform scale plus translation, `x' = scale_x * x + translate_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectTransform<T = f64> {
    pub scale_x: T,
    pub scale_y: T,
    pub translate_x: T,
    pub translate_y: T,
}

impl<T: Scalar> RectTransform<T> {
    pub fn identity() -> Self {
        Self { scale_x: T::one(), scale_y: T::one(), translate_x: T::zero(), translate_y: T::zero() }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn apply(&self, x: T, y: T) -> (T, T) {
        (self.scale_x * x + self.translate_x, self.scale_y * y + self.translate_y)
    }

    pub fn apply_inverse(&self, x: T, y: T) -> (T, T) {
        ((x - self.translate_x) / self.scale_x, (y - self.translate_y) / self.scale_y)
    }
}

/// Transform mapping the corners of `original` onto those of `adjusted`.
pub fn rect_transform<T: Scalar>(original: BoxCoords<T>, adjusted: BoxCoords<T>) -> Result<RectTransform<T>> {
    let [l, t, r, b] = original;
    let [l2, t2, r2, b2] = adjusted;
    if !(r > l && b > t) || !(r2 > l2 && b2 > t2) {
        return Err(Error::DegenerateTransform);
    }
    let scale_x = (r2 - l2) / (r - l);
    let scale_y = (b2 - t2) / (b - t);
    Ok(RectTransform { scale_x, scale_y, translate_x: l2 - scale_x * l, translate_y: t2 - scale_y * t })
}

/// Inverse-mapped bilinear resampling: `out(p) = in(t^-1(p))` at pixel
/// centers. Taps outside the image read background. Orientation
/// probabilities are renormalized after blending; samples that land exactly
/// on a pixel are copied unchanged. Labels use the nearest tap.
pub fn warp_bundle<T: Scalar>(bundle: &RasterBundle<T>, t: &RectTransform<T>) -> RasterBundle<T> {
    if t.is_identity() {
        return bundle.clone();
    }
    let n = bundle.resolution();
    let mut out = RasterBundle::background(n, bundle.meters_per_pixel);
    out.facets = bundle.facets.clone();
    let half = T::half();
    let mut bg = [T::zero(); 3];
    bg[CH_BG] = T::one();
    let fetch = |x: isize, y: isize| {
        if x < 0 || y < 0 || x as usize >= n || y as usize >= n {
            (bg, T::zero(), T::zero(), BACKGROUND)
        } else {
            let (x, y) = (x as usize, y as usize);
            (bundle.orientation.get(x, y), bundle.angle.get(x, y), bundle.height.get(x, y), bundle.labels.get(x, y))
        }
    };
    for py in 0..n {
        for px in 0..n {
            let (u, v) = t.apply_inverse(T::of_usize(px) + half, T::of_usize(py) + half);
            let (su, sv) = (u - half, v - half);
            let (x0, y0) = (su.floor(), sv.floor());
            let (fx, fy) = (su - x0, sv - y0);
            let (xi, yi) = (x0.to_isize().unwrap_or(isize::MIN / 2), y0.to_isize().unwrap_or(isize::MIN / 2));
            if fx == T::zero() && fy == T::zero() {
                let (o, a, h, l) = fetch(xi, yi);
                out.orientation.set(px, py, o);
                out.angle.set(px, py, a);
                out.height.set(px, py, h);
                out.labels.set(px, py, l);
                continue;
            }
            let taps = [
                (xi, yi, (T::one() - fx) * (T::one() - fy)),
                (xi + 1, yi, fx * (T::one() - fy)),
                (xi, yi + 1, (T::one() - fx) * fy),
                (xi + 1, yi + 1, fx * fy),
            ];
            let mut o = [T::zero(); 3];
            let (mut a, mut h) = (T::zero(), T::zero());
            for &(x, y, w) in &taps {
                if w == T::zero() {
                    continue;
                }
                let (to, ta, th, _) = fetch(x, y);
                for c in 0..3 {
                    o[c] = o[c] + w * to[c];
                }
                a = a + w * ta;
                h = h + w * th;
            }
            let s = o[0] + o[1] + o[2];
            if s > T::zero() {
                o = o.map(|c| c / s);
            }
            let nearest = fetch(
                xi + if fx >= half { 1 } else { 0 },
                yi + if fy >= half { 1 } else { 0 },
            );
            out.orientation.set(px, py, o);
            out.angle.set(px, py, a);
            out.height.set(px, py, h);
            out.labels.set(px, py, nearest.3);
        }
    }
    out
}

/// How enforced geometry images are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnforceMode {
    /// Warp the input images by the per-primitive rectangle transform.
    #[default]
    Bilinear,
    /// Re-rasterize the adjusted primitives.
    Exact,
}

/// Vectorizes each primitive's box from its orientation image, enforces
/// colinearity, and produces relationship-enforced images. Types and angles
/// are taken from the graph; parallelism is not enforced.
pub fn enforce_graph<T: Scalar>(
    graph: &RoofGraph<T>,
    bundles: &[RasterBundle<T>],
    mode: EnforceMode,
    wall_height: T,
) -> Result<(RoofGraph<T>, Vec<RasterBundle<T>>)> {
    if bundles.len() != graph.len() {
        return Err(Error::SizeMismatch(format!("{} bundles for {} primitives", bundles.len(), graph.len())));
    }
    let original: Vec<BoxCoords<T>> = bundles
        .iter()
        .map(|b| vectorize_box(&b.orientation).map(|(l, r, t, bt)| [l, t, r, bt]))
        .collect::<Result<_>>()?;
    let adjusted = enforce_colinearity(&original, &graph.relations);

    let mut out_graph = graph.clone();
    for (p, bx) in out_graph.primitives.iter_mut().zip(&adjusted) {
        *p = RoofPrimitive::new(*bx, p.ptype, p.angle_lr, p.angle_tb);
    }
    let cfg = RasterConfig::for_graph(graph, wall_height);
    let images = match mode {
        EnforceMode::Bilinear => original
            .iter()
            .zip(&adjusted)
            .zip(bundles)
            .map(|((o, a), b)| rect_transform(*o, *a).map(|t| warp_bundle(b, &t)))
            .collect::<Result<Vec<_>>>()?,
        EnforceMode::Exact => out_graph
            .primitives
            .iter()
            .enumerate()
            .map(|(i, p)| rasterize_primitive(p, &cfg).map(|b| b.owned_by(i)))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok((out_graph, images))
}
