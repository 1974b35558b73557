//! Seeded procedural roof-graph generator. Stands in for a learned model:
//! draws a primitive count from the reference statistics, places
//! overlapping integer boxes, snaps some boundaries and angles onto earlier
//! primitives, and emits the detected relations.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{PrimitiveType, RoofGraph, RoofPrimitive, DEFAULT_METERS_PER_PIXEL, DEFAULT_RESOLUTION};
use crate::raster::{rasterize_primitive, RasterConfig, DEFAULT_WALL_HEIGHT};
use crate::relations::{detect_graph, snap_ground_truth, Tolerances};
use crate::scalar::Scalar;
use crate::vectorize::classify_type;

/// Primitive counts the distribution is defined over.
pub const COUNTS: [usize; 4] = [2, 3, 4, 5];
pub const DEFAULT_COUNT_DISTRIBUTION: [f64; 4] = [0.30, 0.51, 0.14, 0.05];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapPolicy {
    #[default]
    RequireOverlap,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub count_distribution: [f64; 4],
    /// Radians, inclusive.
    pub angle_range: (f64, f64),
    pub min_box_side: usize,
    pub max_box_side: usize,
    pub overlap_policy: OverlapPolicy,
    /// Types drawn uniformly.
    pub allowed_types: Vec<PrimitiveType>,
    pub snap_probability: f64,
    pub seed: u64,
    pub resolution: usize,
    pub meters_per_pixel: f64,
    pub wall_height: f64,
    pub tolerances: Tolerances<f64>,
    pub max_attempts: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            count_distribution: DEFAULT_COUNT_DISTRIBUTION,
            angle_range: (15f64.to_radians(), 45f64.to_radians()),
            min_box_side: 4,
            max_box_side: 20,
            overlap_policy: OverlapPolicy::RequireOverlap,
            allowed_types: PrimitiveType::ALL.to_vec(),
            snap_probability: 0.5,
            seed: 0,
            resolution: DEFAULT_RESOLUTION,
            meters_per_pixel: DEFAULT_METERS_PER_PIXEL,
            wall_height: DEFAULT_WALL_HEIGHT,
            tolerances: Tolerances::default(),
            max_attempts: 1000,
        }
    }
}

impl SamplerConfig {
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.count_distribution.iter().any(|p| !(*p >= 0.0)) {
            return bad("count distribution has a negative entry");
        }
        if (self.count_distribution.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("count distribution must sum to 1");
        }
        let (lo, hi) = self.angle_range;
        if !(lo > 0.0 && lo <= hi && hi < std::f64::consts::FRAC_PI_2) {
            return bad("angle range must lie inside (0, pi/2)");
        }
        if self.min_box_side < 2 || self.min_box_side > self.max_box_side || self.max_box_side > self.resolution {
            return bad("box side limits must satisfy 2 <= min <= max <= resolution");
        }
        if !(0.0..=1.0).contains(&self.snap_probability) {
            return bad("snap probability must lie in [0, 1]");
        }
        if self.allowed_types.is_empty() {
            return bad("no primitive types allowed");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be positive");
        }
        Ok(())
    }

    /// Generator for sample `stream` of this config's seed.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

pub fn sample_count<R: Rng + ?Sized>(rng: &mut R, cfg: &SamplerConfig) -> Result<usize> {
    let dist = WeightedIndex::new(cfg.count_distribution).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(COUNTS[dist.sample(rng)])
}

fn overlaps(a: &[i64; 4], b: &[i64; 4]) -> bool {
    a[0] < b[2] && b[0] < a[2] && a[1] < b[3] && b[1] < a[3]
}

fn draw_box<R: Rng + ?Sized>(rng: &mut R, cfg: &SamplerConfig, placed: &[[i64; 4]]) -> Option<[i64; 4]> {
    let n = cfg.resolution as i64;
    let (lo, hi) = (cfg.min_box_side as i64, cfg.max_box_side as i64);
    let w = rng.gen_range(lo..=hi);
    let h = rng.gen_range(lo..=hi);
    let l = rng.gen_range(0..=n - w);
    let t = rng.gen_range(0..=n - h);
    let mut b = [l, t, l + w, t + h];
    if !placed.is_empty() {
        // index order matches [left, top, right, bottom]
        for k in 0..4 {
            if rng.gen_bool(cfg.snap_probability) {
                let src = placed[rng.gen_range(0..placed.len())][k];
                let mut c = b;
                c[k] = src;
                if c[2] - c[0] >= 2 && c[3] - c[1] >= 2 {
                    b = c;
                }
            }
        }
        if cfg.overlap_policy == OverlapPolicy::RequireOverlap && !placed.iter().any(|p| overlaps(p, &b)) {
            return None;
        }
    }
    Some(b)
}

fn draw_angle<R: Rng + ?Sized>(rng: &mut R, cfg: &SamplerConfig, existing: &[f64]) -> f64 {
    if !existing.is_empty() && rng.gen_bool(cfg.snap_probability) {
        existing[rng.gen_range(0..existing.len())]
    } else {
        rng.gen_range(cfg.angle_range.0..=cfg.angle_range.1)
    }
}

/// A hip is kept only if its raster classifies back to the same type, i.e.
/// its minority facet group is a large enough share of the footprint.
fn type_recoverable<T: Scalar>(p: &RoofPrimitive<T>, cfg: &RasterConfig<T>) -> bool {
    if !p.ptype.is_hip() {
        return true;
    }
    rasterize_primitive(p, cfg)
        .and_then(|b| classify_type(&b.orientation))
        .is_ok_and(|t| t == p.ptype)
}

fn draw_primitives<R: Rng + ?Sized>(rng: &mut R, cfg: &SamplerConfig, count: usize) -> Option<Vec<RoofPrimitive<f64>>> {
    let rcfg = RasterConfig { resolution: cfg.resolution, meters_per_pixel: cfg.meters_per_pixel, wall_height: cfg.wall_height };
    let mut boxes: Vec<[i64; 4]> = Vec::with_capacity(count);
    let mut prims: Vec<RoofPrimitive<f64>> = Vec::with_capacity(count);
    for _ in 0..count {
        let mut placed = None;
        for _ in 0..64 {
            let Some(b) = draw_box(rng, cfg, &boxes) else { continue };
            let ptype = cfg.allowed_types[rng.gen_range(0..cfg.allowed_types.len())];
            let lr_pool: Vec<f64> = prims.iter().filter(|p| p.ptype.has_lr_facets()).map(|p| p.angle_lr).collect();
            let tb_pool: Vec<f64> = prims.iter().filter(|p| p.ptype.has_tb_facets()).map(|p| p.angle_tb).collect();
            let angle_lr = if ptype.has_lr_facets() { draw_angle(rng, cfg, &lr_pool) } else { 0.0 };
            let angle_tb = if ptype.has_tb_facets() { draw_angle(rng, cfg, &tb_pool) } else { 0.0 };
            let p = RoofPrimitive::new(b.map(|c| c as f64), ptype, angle_lr, angle_tb);
            if type_recoverable(&p, &rcfg) {
                placed = Some((b, p));
                break;
            }
        }
        let (b, p) = placed?;
        boxes.push(b);
        prims.push(p);
    }
    Some(prims)
}

/// Alternates detection and snapping until snapping changes nothing, so
/// the emitted relations are exactly what detection finds on the emitted
/// primitives.
fn settle<T: Scalar>(mut g: RoofGraph<T>, tol: Tolerances<T>) -> Option<RoofGraph<T>> {
    for _ in 0..32 {
        g = detect_graph(&g, tol);
        let snapped = snap_ground_truth(&g);
        if snapped.primitives == g.primitives {
            return Some(g);
        }
        g = snapped;
    }
    None
}

fn acceptable<T: Scalar>(g: &RoofGraph<T>, cfg: &SamplerConfig) -> bool {
    let rcfg = RasterConfig::for_graph(g, T::of(cfg.wall_height));
    let two = T::two();
    g.check().is_ok()
        && g.primitives.iter().all(|p| p.width() >= two && p.height() >= two && type_recoverable(p, &rcfg))
}

fn sample_with<T: Scalar, R: Rng + ?Sized>(rng: &mut R, cfg: &SamplerConfig, stream: u64) -> Result<RoofGraph<T>> {
    cfg.check()?;
    let count = sample_count(rng, cfg)?;
    let tol = Tolerances { px: T::of(cfg.tolerances.px), deg: T::of(cfg.tolerances.deg) };
    for _ in 0..cfg.max_attempts {
        let Some(prims) = draw_primitives(rng, cfg, count) else { continue };
        let g = RoofGraph::with_primitives(cfg.resolution, cfg.meters_per_pixel, prims).cast::<T>();
        if let Some(g) = settle(g, tol) {
            if acceptable(&g, cfg) {
                return Ok(g);
            }
        }
    }
    Err(Error::PlacementFailed { seed: cfg.seed, stream, attempts: cfg.max_attempts })
}

/// One graph from an explicit generator. Errors report `cfg.seed` with
/// stream 0.
pub fn sample_graph<T: Scalar, R: Rng + ?Sized>(rng: &mut R, cfg: &SamplerConfig) -> Result<RoofGraph<T>> {
    sample_with(rng, cfg, 0)
}

/// Sample `stream` of the config's seed; independent of every other stream.
pub fn sample_stream<T: Scalar>(cfg: &SamplerConfig, stream: u64) -> Result<RoofGraph<T>> {
    sample_with(&mut cfg.rng(stream), cfg, stream)
}

/// `n` graphs on streams `0..n`, generated in parallel, returned in stream
/// order.
pub fn sample_batch<T: Scalar>(cfg: &SamplerConfig, n: usize) -> Result<Vec<RoofGraph<T>>> {
    (0..n as u64).into_par_iter().map(|s| sample_stream(cfg, s)).collect()
}

/// Which primitive types and relation entries occur in `graphs`: four type
/// flags (in `PrimitiveType::ALL` order) and six entry flags.
pub fn coverage<T: Scalar>(graphs: &[RoofGraph<T>]) -> ([bool; 4], [bool; 6]) {
    let mut types = [false; 4];
    let mut entries = [false; 6];
    for g in graphs {
        for p in &g.primitives {
            types[PrimitiveType::ALL.iter().position(|t| *t == p.ptype).unwrap_or(0)] = true;
        }
        for v in g.relations.values() {
            for (k, x) in v.to_array().iter().enumerate() {
                if *x > T::half() {
                    entries[k] = true;
                }
            }
        }
    }
    (types, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_distribution_always_two() {
        let cfg = SamplerConfig { count_distribution: [1.0, 0.0, 0.0, 0.0], ..Default::default() };
        let mut rng = cfg.rng(0);
        assert!((0..200).all(|_| sample_count(&mut rng, &cfg).unwrap() == 2));
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let cfg = SamplerConfig { seed: 7, ..Default::default() };
        let a: Vec<RoofGraph<f64>> = sample_batch(&cfg, 20).unwrap();
        let b: Vec<RoofGraph<f64>> = (0..20).map(|s| sample_stream(&cfg, s).unwrap()).collect();
        assert_eq!(a, b);
        let other = SamplerConfig { seed: 8, ..Default::default() };
        assert_ne!(a, sample_batch::<f64>(&other, 20).unwrap());
    }

    #[test]
    fn samples_are_self_consistent() {
        let cfg = SamplerConfig { seed: 11, ..Default::default() };
        for g in sample_batch::<f64>(&cfg, 300).unwrap() {
            g.check().unwrap();
            assert_eq!(detect_graph(&g, Tolerances::default()).relations, g.relations);
            assert_eq!(snap_ground_truth(&g), g);
            let rcfg = RasterConfig::for_graph(&g, 3.0);
            for p in &g.primitives {
                let b = rasterize_primitive(p, &rcfg).unwrap();
                if p.ptype.is_hip() {
                    assert_eq!(classify_type(&b.orientation).unwrap(), p.ptype);
                }
            }
        }
    }

    #[test]
    fn overlap_is_required_by_default() {
        let cfg = SamplerConfig { seed: 3, ..Default::default() };
        for g in sample_batch::<f64>(&cfg, 100).unwrap() {
            for (j, b) in g.primitives.iter().enumerate().skip(1) {
                let hit = g.primitives[..j].iter().any(|a| {
                    a.left < b.right && b.left < a.right && a.top < b.bottom && b.top < a.bottom
                });
                assert!(hit);
            }
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            SamplerConfig { count_distribution: [0.5, 0.5, 0.5, 0.0], ..Default::default() },
            SamplerConfig { angle_range: (0.0, 0.5), ..Default::default() },
            SamplerConfig { min_box_side: 1, ..Default::default() },
            SamplerConfig { snap_probability: 1.5, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(sample_stream::<f64>(&cfg, 0), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn impossible_placement_reports_seed() {
        // A 2x2 hip has only tied pixels, so it never classifies as a hip.
        let cfg = SamplerConfig {
            seed: 42,
            allowed_types: vec![PrimitiveType::HorizontalHip],
            min_box_side: 2,
            max_box_side: 2,
            resolution: 2,
            max_attempts: 3,
            ..Default::default()
        };
        match sample_stream::<f64>(&cfg, 9) {
            Err(Error::PlacementFailed { seed, stream, attempts }) => assert_eq!((seed, stream, attempts), (42, 9, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn f32_samples_are_consistent() {
        let cfg = SamplerConfig { seed: 5, ..Default::default() };
        for g in sample_batch::<f32>(&cfg, 50).unwrap() {
            assert_eq!(detect_graph(&g, Tolerances::default()).relations, g.relations);
        }
    }
}
