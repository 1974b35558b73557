//! Rasterization of roof primitives into geometry images, height-based
//! compositing, coplanar facet merging, polygon extraction and normal maps.

use std::collections::BTreeMap;

use log::warn;

use crate::contour;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{Dim, Facet, RoofGraph, RoofModel, RoofPrimitive, Side, Symmetry, Vertex};
use crate::scalar::Scalar;

/// Orientation channel holding left/right-facing probability.
pub const CH_LR: usize = 0;
/// Orientation channel holding top/bottom-facing probability.
pub const CH_TB: usize = 1;
/// Orientation channel holding background probability.
pub const CH_BG: usize = 2;

pub const DEFAULT_WALL_HEIGHT: f64 = 3.0;

/// Label value of background pixels.
pub const BACKGROUND: i32 = -1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterConfig<T = f64> {
    pub resolution: usize,
    pub meters_per_pixel: T,
    pub wall_height: T,
}

impl<T: Scalar> Default for RasterConfig<T> {
    fn default() -> Self {
        Self {
            resolution: crate::model::DEFAULT_RESOLUTION,
            meters_per_pixel: T::of(crate::model::DEFAULT_METERS_PER_PIXEL),
            wall_height: T::of(DEFAULT_WALL_HEIGHT),
        }
    }
}

impl<T: Scalar> RasterConfig<T> {
    pub fn for_graph(graph: &RoofGraph<T>, wall_height: T) -> Self {
        Self { resolution: graph.resolution, meters_per_pixel: graph.meters_per_pixel, wall_height }
    }
}

/// Planar roof facet rising from one boundary of a primitive.
///
/// The height at a point is `wall_height + tan(angle) * d`, where `d` is the
/// distance in meters from the owning boundary toward the interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacetPlane<T = f64> {
    pub owner_primitive: usize,
    pub side: Side,
    pub angle: T,
    /// `[left, top, right, bottom]` of the owning rectangle, in pixels.
    pub support: [T; 4],
    pub wall_height: T,
    pub meters_per_pixel: T,
    slope: T,
}

impl<T: Scalar> FacetPlane<T> {
    /// Distance in pixels from the owning boundary toward the interior.
    pub fn inward_distance(&self, x: T, y: T) -> T {
        let [l, t, r, b] = self.support;
        match self.side {
            Side::Left => x - l,
            Side::Right => r - x,
            Side::Top => y - t,
            Side::Bottom => b - y,
        }
    }

    pub fn height_at(&self, x: T, y: T) -> T {
        self.wall_height + self.slope * self.inward_distance(x, y) * self.meters_per_pixel
    }
}

/// Facet planes of a primitive: two for gables, four for hips. The roof
/// surface is the pointwise minimum over the planes.
pub fn facet_planes<T: Scalar>(p: &RoofPrimitive<T>, wall_height: T, meters_per_pixel: T) -> Vec<FacetPlane<T>> {
    p.ptype
        .sides()
        .iter()
        .map(|&side| {
            let angle = p.angle_for(side);
            FacetPlane {
                owner_primitive: 0,
                side,
                angle,
                support: p.bbox(),
                wall_height,
                meters_per_pixel,
                slope: angle.tan(),
            }
        })
        .collect()
}

/// Identity of a facet instance referenced by the label image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacetInfo<T = f64> {
    pub primitive: usize,
    pub side: Side,
    pub angle: T,
}

/// Geometry images of one primitive or a whole roof.
///
/// `labels` indexes into `facets`; [`BACKGROUND`] marks empty pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterBundle<T = f64> {
    pub meters_per_pixel: T,
    pub orientation: Grid<[T; 3]>,
    pub angle: Grid<T>,
    pub height: Grid<T>,
    pub labels: Grid<i32>,
    pub facets: Vec<FacetInfo<T>>,
}

impl<T: Scalar> RasterBundle<T> {
    pub fn background(resolution: usize, meters_per_pixel: T) -> Self {
        let n = resolution;
        let mut bg = [T::zero(); 3];
        bg[CH_BG] = T::one();
        Self {
            meters_per_pixel,
            orientation: Grid::filled(n, n, bg),
            angle: Grid::filled(n, n, T::zero()),
            height: Grid::filled(n, n, T::zero()),
            labels: Grid::filled(n, n, BACKGROUND),
            facets: Vec::new(),
        }
    }

    pub fn resolution(&self) -> usize {
        self.orientation.width()
    }

    /// Reassigns every facet to primitive `index`.
    pub fn owned_by(mut self, index: usize) -> Self {
        for f in &mut self.facets {
            f.primitive = index;
        }
        self
    }

    pub fn facet_of(&self, x: usize, y: usize) -> Option<&FacetInfo<T>> {
        let l = self.labels.get(x, y);
        (l >= 0).then(|| &self.facets[l as usize])
    }

    /// Count of pixels carrying a facet label.
    pub fn footprint(&self) -> usize {
        self.labels.data().iter().filter(|&&l| l >= 0).count()
    }

    pub fn check_shape(&self) -> Result<()> {
        let n = self.orientation.width();
        let ok = self.orientation.height() == n
            && self.orientation.same_shape(&self.angle)
            && self.orientation.same_shape(&self.height)
            && self.orientation.same_shape(&self.labels);
        if !ok {
            return Err(Error::SizeMismatch("bundle channels differ in size".into()));
        }
        if let Some(&bad) = self.labels.data().iter().find(|&&l| l < BACKGROUND || l >= self.facets.len() as i32) {
            return Err(Error::Format(format!("label {bad} has no facet entry")));
        }
        Ok(())
    }

    /// Applies an image symmetry to every channel. Orientation channels swap
    /// when the axes are exchanged, and facet sides follow the symmetry.
    pub fn transformed(&self, sym: Symmetry) -> Self {
        let n = self.resolution();
        let mut out = Self::background(n, self.meters_per_pixel);
        for y in 0..n {
            for x in 0..n {
                let (tx, ty) = sym.apply_pixel(x, y, n);
                let mut o = self.orientation.get(x, y);
                if sym.swaps_axes() {
                    o.swap(CH_LR, CH_TB);
                }
                out.orientation.set(tx, ty, o);
                out.angle.set(tx, ty, self.angle.get(x, y));
                out.height.set(tx, ty, self.height.get(x, y));
                out.labels.set(tx, ty, self.labels.get(x, y));
            }
        }
        out.facets = self.facets.iter().map(|f| FacetInfo { side: sym.map_side(f.side), ..*f }).collect();
        out
    }
}

fn sort_facets<T: Scalar>(bundle: &mut RasterBundle<T>) {
    let mut order: Vec<usize> = (0..bundle.facets.len()).collect();
    order.sort_by_key(|&i| (bundle.facets[i].primitive, bundle.facets[i].side));
    let mut remap = vec![0i32; order.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new as i32;
    }
    bundle.facets = order.iter().map(|&i| bundle.facets[i]).collect();
    for l in bundle.labels.data_mut() {
        if *l >= 0 {
            *l = remap[*l as usize];
        }
    }
}

/// Rasterizes one primitive. Each pixel whose center lies in the box takes
/// the facet with the lowest height there; ties go to top/bottom facets.
pub fn rasterize_primitive<T: Scalar>(p: &RoofPrimitive<T>, cfg: &RasterConfig<T>) -> Result<RasterBundle<T>> {
    p.check(0)?;
    let n = cfg.resolution;
    let nf = T::of_usize(n);
    if p.left < T::zero() || p.top < T::zero() || p.right > nf || p.bottom > nf {
        return Err(Error::BoxOutsideImage { resolution: n });
    }
    let planes = facet_planes(p, cfg.wall_height, cfg.meters_per_pixel);
    let mut out = RasterBundle::background(n, cfg.meters_per_pixel);
    out.facets = planes.iter().map(|pl| FacetInfo { primitive: 0, side: pl.side, angle: pl.angle }).collect();

    let half = T::half();
    let span = |lo: T, hi: T| {
        // pixel i is inside iff lo <= i + 0.5 < hi
        let first = (lo - half).ceil().max(T::zero()).to_usize().unwrap_or(0);
        let last = (hi - half).ceil().min(nf).to_usize().unwrap_or(0);
        first..last.max(first)
    };
    for y in span(p.top, p.bottom) {
        let cy = T::of_usize(y) + half;
        for x in span(p.left, p.right) {
            let cx = T::of_usize(x) + half;
            let (best, h) = planes
                .iter()
                .enumerate()
                .map(|(k, pl)| (k, pl.height_at(cx, cy)))
                .fold((usize::MAX, T::infinity()), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            let plane = &planes[best];
            let mut o = [T::zero(); 3];
            o[if plane.side.is_lr() { CH_LR } else { CH_TB }] = T::one();
            out.orientation.set(x, y, o);
            out.angle.set(x, y, plane.angle.cos());
            out.height.set(x, y, h);
            out.labels.set(x, y, best as i32);
        }
    }
    sort_facets(&mut out);
    Ok(out)
}

/// Rasterizes every primitive of a graph, each bundle owned by its index.
pub fn rasterize_graph<T: Scalar>(graph: &RoofGraph<T>, wall_height: T) -> Result<Vec<RasterBundle<T>>> {
    let cfg = RasterConfig::for_graph(graph, wall_height);
    graph
        .primitives
        .iter()
        .enumerate()
        .map(|(i, p)| {
            rasterize_primitive(p, &cfg).map(|b| b.owned_by(i)).map_err(|e| match e {
                Error::DegenerateRectangle { .. } => Error::DegenerateRectangle { index: i },
                Error::AngleOutOfRange { .. } => Error::AngleOutOfRange { index: i },
                other => other,
            })
        })
        .collect()
}

/// Combines per-primitive bundles: each pixel shows the occupying facet with
/// the greatest height, ties going to the lower primitive index. The facet
/// table of the result is sorted by `(primitive, side)`, so the output does
/// not depend on the order of `bundles`.
pub fn composite_roof<T: Scalar>(bundles: &[RasterBundle<T>]) -> Result<RasterBundle<T>> {
    let first = bundles.first().ok_or(Error::EmptyBundleList)?;
    let n = first.resolution();
    for b in bundles {
        b.check_shape()?;
        if b.resolution() != n {
            return Err(Error::SizeMismatch(format!("{} vs {}", b.resolution(), n)));
        }
    }
    if bundles.len() == 1 {
        return Ok(first.clone());
    }

    let mut table: BTreeMap<(usize, Side), FacetInfo<T>> = BTreeMap::new();
    for b in bundles {
        for f in &b.facets {
            if table.insert((f.primitive, f.side), *f).is_some() {
                return Err(Error::DuplicateOwner(f.primitive));
            }
        }
    }
    let index: BTreeMap<(usize, Side), i32> = table.keys().enumerate().map(|(i, &k)| (k, i as i32)).collect();

    let mut out = RasterBundle::background(n, first.meters_per_pixel);
    out.facets = table.values().copied().collect();
    for y in 0..n {
        for x in 0..n {
            let mut winner: Option<(&RasterBundle<T>, &FacetInfo<T>, T)> = None;
            for b in bundles {
                let Some(f) = b.facet_of(x, y) else { continue };
                let h = b.height.get(x, y);
                let better = match winner {
                    None => true,
                    Some((_, wf, wh)) => h > wh || (h == wh && f.primitive < wf.primitive),
                };
                if better {
                    winner = Some((b, f, h));
                }
            }
            if let Some((b, f, h)) = winner {
                out.orientation.set(x, y, b.orientation.get(x, y));
                out.angle.set(x, y, b.angle.get(x, y));
                out.height.set(x, y, h);
                out.labels.set(x, y, index[&(f.primitive, f.side)]);
            }
        }
    }
    Ok(out)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = i;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    /// Keeps the smaller root so representatives are deterministic.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
    }
}

/// Gives coplanar facets one label. Facets on side `s` of primitives `i` and
/// `j` are coplanar when the pair's relation marks boundary `s` colinear and
/// the matching facet group parallel (both probabilities above 0.5). Merging
/// is transitive; each merged group keeps its smallest label.
pub fn merge_coplanar<T: Scalar>(composite: &RasterBundle<T>, graph: &RoofGraph<T>) -> RasterBundle<T> {
    let mut uf = UnionFind((0..composite.facets.len()).collect());
    let lookup: BTreeMap<(usize, Side), usize> =
        composite.facets.iter().enumerate().map(|(i, f)| ((f.primitive, f.side), i)).collect();
    let half = T::half();
    for (&(i, j), v) in &graph.relations {
        for side in Side::ALL {
            if v.colinear(side) > half && v.parallel_for(side) > half {
                if let (Some(&a), Some(&b)) = (lookup.get(&(i, side)), lookup.get(&(j, side))) {
                    uf.union(a, b);
                }
            }
        }
    }
    let mut out = composite.clone();
    for l in out.labels.data_mut() {
        if *l >= 0 {
            *l = uf.find(*l as usize) as i32;
        }
    }
    out
}

/// Extracts one polygon per connected region of each facet label. Vertices
/// are pixel centers in meters; 3D vertices take their height from the
/// height map at the corner pixel. Regions with fewer than three corners are
/// dropped with a warning.
pub fn extract_facet_polygons<T: Scalar>(composite: &RasterBundle<T>, dim: Dim) -> Result<RoofModel<T>> {
    composite.check_shape()?;
    let n = composite.resolution();
    let mut present: Vec<i32> = composite.labels.data().iter().copied().filter(|&l| l >= 0).collect();
    if present.is_empty() {
        return Err(Error::AllBackground);
    }
    present.sort_unstable();
    present.dedup();

    let mpp = composite.meters_per_pixel;
    let half = T::half();
    let mut facets = Vec::new();
    for label in present {
        let mask = Grid::from_fn(n, n, |x, y| composite.labels.get(x, y) == label);
        let info = composite.facets[label as usize];
        for poly in contour::mask_polygons(&mask) {
            if poly.len() < 3 {
                warn!(
                    "dropping facet region of primitive {} ({} side) with {} corner(s)",
                    info.primitive,
                    info.side,
                    poly.len()
                );
                continue;
            }
            let vertices = poly
                .iter()
                .map(|&(px, py)| {
                    let x = (T::of_usize(px as usize) + half) * mpp;
                    let y = (T::of_usize(py as usize) + half) * mpp;
                    match dim {
                        Dim::Two => Vertex::xy(x, y),
                        Dim::Three => Vertex::xyz(x, y, composite.height.get(px as usize, py as usize)),
                    }
                })
                .collect();
            facets.push(Facet::new(vertices, info.angle));
        }
    }
    if facets.is_empty() {
        return Err(Error::EmptyModel);
    }
    Ok(RoofModel::new(facets))
}

/// Unit normal of a facet rising from `side` at `angle`, in image axes with
/// `z` up. A left facet rises toward `+x`, so its normal leans toward `-x`.
pub fn facet_normal<T: Scalar>(side: Side, angle: T) -> [T; 3] {
    let (s, c) = (angle.sin(), angle.cos());
    let z = T::zero();
    match side {
        Side::Left => [-s, z, c],
        Side::Right => [s, z, c],
        Side::Top => [z, -s, c],
        Side::Bottom => [z, s, c],
    }
}

/// Surface-normal image: `(n + 1) / 2` scaled to `[0, 255]` per channel,
/// background pure white.
pub fn render_normal_map<T: Scalar>(composite: &RasterBundle<T>) -> Grid<[u8; 3]> {
    let n = composite.resolution();
    let scale = T::of(255.0);
    let to_byte = |v: T| ((v + T::one()) * T::half() * scale).round().max(T::zero()).min(scale).to_u8().unwrap_or(255);
    Grid::from_fn(n, n, |x, y| match composite.facet_of(x, y) {
        None => [255, 255, 255],
        Some(f) => facet_normal(f.side, f.angle).map(to_byte),
    })
}
