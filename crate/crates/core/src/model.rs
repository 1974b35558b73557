//! Roof primitives, relation graphs and polygonal roof models.
//!
//! Coordinates follow image convention: `x` grows to the right, `y` grows
//! downward, so the top boundary of a box is its smaller `y`. Boundaries are
//! continuous pixel coordinates; a box `[l, r) x [t, b)` covers the pixels
//! whose centers fall inside it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_RESOLUTION: usize = 32;
pub const DEFAULT_METERS_PER_PIXEL: f64 = 0.5;

/// One boundary of a primitive's rectangle, and the facet that rises from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Top,
    Bottom,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Top, Side::Bottom];

    /// Facets whose dominant slope runs along `x` (left/right-facing).
    pub fn is_lr(self) -> bool {
        matches!(self, Side::Left | Side::Right)
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Top => "top",
            Side::Bottom => "bottom",
        }
    }

    fn normal(self) -> (i8, i8) {
        match self {
            Side::Left => (-1, 0),
            Side::Right => (1, 0),
            Side::Top => (0, -1),
            Side::Bottom => (0, 1),
        }
    }

    fn from_normal(n: (i8, i8)) -> Side {
        match n {
            (-1, 0) => Side::Left,
            (1, 0) => Side::Right,
            (0, -1) => Side::Top,
            (0, 1) => Side::Bottom,
            _ => unreachable!("not an axis normal: {n:?}"),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrimitiveType {
    #[serde(rename = "h_gable")]
    HorizontalGable,
    #[serde(rename = "v_gable")]
    VerticalGable,
    #[serde(rename = "h_hip")]
    HorizontalHip,
    #[serde(rename = "v_hip")]
    VerticalHip,
}

impl PrimitiveType {
    pub const ALL: [PrimitiveType; 4] = [
        PrimitiveType::HorizontalGable,
        PrimitiveType::VerticalGable,
        PrimitiveType::HorizontalHip,
        PrimitiveType::VerticalHip,
    ];

    /// Horizontal types have their ridge along `x`, so their dominant facets
    /// face top and bottom.
    pub fn is_horizontal(self) -> bool {
        matches!(self, PrimitiveType::HorizontalGable | PrimitiveType::HorizontalHip)
    }

    pub fn is_hip(self) -> bool {
        matches!(self, PrimitiveType::HorizontalHip | PrimitiveType::VerticalHip)
    }

    /// Sides that carry a facet, in the order used for tie-breaking: top and
    /// bottom facets come first.
    pub fn sides(self) -> &'static [Side] {
        match self {
            PrimitiveType::HorizontalGable => &[Side::Top, Side::Bottom],
            PrimitiveType::VerticalGable => &[Side::Left, Side::Right],
            PrimitiveType::HorizontalHip | PrimitiveType::VerticalHip => {
                &[Side::Top, Side::Bottom, Side::Left, Side::Right]
            }
        }
    }

    pub fn has_lr_facets(self) -> bool {
        self != PrimitiveType::HorizontalGable
    }

    pub fn has_tb_facets(self) -> bool {
        self != PrimitiveType::VerticalGable
    }

    /// The type seen after swapping the image axes.
    pub fn axes_swapped(self) -> Self {
        match self {
            PrimitiveType::HorizontalGable => PrimitiveType::VerticalGable,
            PrimitiveType::VerticalGable => PrimitiveType::HorizontalGable,
            PrimitiveType::HorizontalHip => PrimitiveType::VerticalHip,
            PrimitiveType::VerticalHip => PrimitiveType::HorizontalHip,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            PrimitiveType::HorizontalGable => "h_gable",
            PrimitiveType::VerticalGable => "v_gable",
            PrimitiveType::HorizontalHip => "h_hip",
            PrimitiveType::VerticalHip => "v_hip",
        }
    }
}

impl fmt::Display for PrimitiveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Axis-aligned rectangle plus roof type and the two symmetric facet angles
/// (radians between the facet normal and the up direction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofPrimitive<T = f64> {
    pub left: T,
    pub right: T,
    pub top: T,
    pub bottom: T,
    pub angle_lr: T,
    pub angle_tb: T,
    pub ptype: PrimitiveType,
}

impl<T: Scalar> RoofPrimitive<T> {
    /// `bbox` is `[left, top, right, bottom]`.
    pub fn new(bbox: [T; 4], ptype: PrimitiveType, angle_lr: T, angle_tb: T) -> Self {
        Self { left: bbox[0], top: bbox[1], right: bbox[2], bottom: bbox[3], angle_lr, angle_tb, ptype }
    }

    pub fn bbox(&self) -> [T; 4] {
        [self.left, self.top, self.right, self.bottom]
    }

    pub fn coord(&self, side: Side) -> T {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
            Side::Top => self.top,
            Side::Bottom => self.bottom,
        }
    }

    pub fn set_coord(&mut self, side: Side, v: T) {
        match side {
            Side::Left => self.left = v,
            Side::Right => self.right = v,
            Side::Top => self.top = v,
            Side::Bottom => self.bottom = v,
        }
    }

    /// Facet angle used by the facet rising from `side`.
    pub fn angle_for(&self, side: Side) -> T {
        if side.is_lr() {
            self.angle_lr
        } else {
            self.angle_tb
        }
    }

    pub fn width(&self) -> T {
        self.right - self.left
    }

    pub fn height(&self) -> T {
        self.bottom - self.top
    }

    pub fn cast<U: Scalar>(&self) -> RoofPrimitive<U> {
        let c = |v: T| U::of(v.to_f64_lossy());
        RoofPrimitive {
            left: c(self.left),
            right: c(self.right),
            top: c(self.top),
            bottom: c(self.bottom),
            angle_lr: c(self.angle_lr),
            angle_tb: c(self.angle_tb),
            ptype: self.ptype,
        }
    }

    pub(crate) fn check(&self, index: usize) -> Result<()> {
        let finite = self.bbox().iter().all(|v| v.is_finite());
        if !finite || !(self.left < self.right) || !(self.top < self.bottom) {
            return Err(Error::DegenerateRectangle { index });
        }
        let angle_ok = |a: T| a >= T::zero() && a < T::FRAC_PI_2();
        if !angle_ok(self.angle_lr) || !angle_ok(self.angle_tb) {
            return Err(Error::AngleOutOfRange { index });
        }
        Ok(())
    }
}

/// Six independent relation probabilities between two primitives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RelationVector<T = f64> {
    pub colinear_left: T,
    pub colinear_right: T,
    pub colinear_top: T,
    pub colinear_bottom: T,
    pub parallel_lr: T,
    pub parallel_tb: T,
}

impl<T: Scalar> RelationVector<T> {
    pub fn zeros() -> Self {
        Self::from_array([T::zero(); 6])
    }

    pub fn ones() -> Self {
        Self::from_array([T::one(); 6])
    }

    pub fn from_array(v: [T; 6]) -> Self {
        Self {
            colinear_left: v[0],
            colinear_right: v[1],
            colinear_top: v[2],
            colinear_bottom: v[3],
            parallel_lr: v[4],
            parallel_tb: v[5],
        }
    }

    pub fn to_array(&self) -> [T; 6] {
        [
            self.colinear_left,
            self.colinear_right,
            self.colinear_top,
            self.colinear_bottom,
            self.parallel_lr,
            self.parallel_tb,
        ]
    }

    pub fn colinear(&self, side: Side) -> T {
        match side {
            Side::Left => self.colinear_left,
            Side::Right => self.colinear_right,
            Side::Top => self.colinear_top,
            Side::Bottom => self.colinear_bottom,
        }
    }

    pub fn set_colinear(&mut self, side: Side, p: T) {
        match side {
            Side::Left => self.colinear_left = p,
            Side::Right => self.colinear_right = p,
            Side::Top => self.colinear_top = p,
            Side::Bottom => self.colinear_bottom = p,
        }
    }

    /// Parallelism entry for the facet group that `side` belongs to.
    pub fn parallel_for(&self, side: Side) -> T {
        if side.is_lr() {
            self.parallel_lr
        } else {
            self.parallel_tb
        }
    }

    pub fn in_unit_range(&self) -> bool {
        self.to_array().iter().all(|&p| p >= T::zero() && p <= T::one())
    }
}

/// Primitives plus a relation vector for every unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RoofGraph<T = f64> {
    pub resolution: usize,
    pub meters_per_pixel: T,
    pub primitives: Vec<RoofPrimitive<T>>,
    /// Keyed by `(i, j)` with `i < j`.
    pub relations: BTreeMap<(usize, usize), RelationVector<T>>,
}

pub(crate) fn pair_key(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

impl<T: Scalar> RoofGraph<T> {
    pub fn new(resolution: usize, meters_per_pixel: T) -> Self {
        Self { resolution, meters_per_pixel, primitives: Vec::new(), relations: BTreeMap::new() }
    }

    /// Graph with every pair related by the zero vector.
    pub fn with_primitives(resolution: usize, meters_per_pixel: T, primitives: Vec<RoofPrimitive<T>>) -> Self {
        let mut g = Self::new(resolution, meters_per_pixel);
        g.primitives = primitives;
        for (i, j) in g.pairs() {
            g.relations.insert((i, j), RelationVector::zeros());
        }
        g
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    /// All unordered pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.primitives.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    pub fn relation(&self, i: usize, j: usize) -> Option<&RelationVector<T>> {
        self.relations.get(&pair_key(i, j))
    }

    pub fn set_relation(&mut self, i: usize, j: usize, v: RelationVector<T>) {
        self.relations.insert(pair_key(i, j), v);
    }

    /// Returns the graph if every type invariant holds, else the first
    /// violation found.
    pub fn validate(self) -> Result<Self> {
        self.check()?;
        Ok(self)
    }

    pub fn check(&self) -> Result<()> {
        if self.resolution == 0 || !(self.meters_per_pixel > T::zero()) {
            return Err(Error::InvalidGeometry(format!(
                "resolution {} / meters_per_pixel {}",
                self.resolution, self.meters_per_pixel
            )));
        }
        for (i, p) in self.primitives.iter().enumerate() {
            p.check(i)?;
        }
        let n = self.primitives.len();
        for (&(i, j), v) in &self.relations {
            if i >= j || j >= n {
                return Err(Error::InvalidRelationPair { pair: (i, j) });
            }
            if !v.in_unit_range() {
                return Err(Error::ProbabilityOutOfRange { pair: (i, j) });
            }
        }
        if let Some(pair) = self.pairs().find(|k| !self.relations.contains_key(k)) {
            return Err(Error::IncompleteRelationMap { pair });
        }
        Ok(())
    }

    pub fn cast<U: Scalar>(&self) -> RoofGraph<U> {
        let c = |v: T| U::of(v.to_f64_lossy());
        RoofGraph {
            resolution: self.resolution,
            meters_per_pixel: c(self.meters_per_pixel),
            primitives: self.primitives.iter().map(|p| p.cast()).collect(),
            relations: self
                .relations
                .iter()
                .map(|(&k, v)| (k, RelationVector::from_array(v.to_array().map(c))))
                .collect(),
        }
    }

    /// Applies a symmetry of the square image to the whole graph.
    pub fn transformed(&self, sym: Symmetry) -> Self {
        let n = T::of_usize(self.resolution);
        RoofGraph {
            resolution: self.resolution,
            meters_per_pixel: self.meters_per_pixel,
            primitives: self.primitives.iter().map(|p| sym.apply_primitive(p, n)).collect(),
            relations: self.relations.iter().map(|(&k, v)| (k, sym.apply_relation(v))).collect(),
        }
    }

    /// The eight symmetric copies used for data augmentation, identity first.
    pub fn augmented(&self) -> Vec<Self> {
        Symmetry::ALL.iter().map(|&s| self.transformed(s)).collect()
    }
}

/// Graph-level entry point mirroring [`RoofGraph::validate`].
pub fn validate_graph<T: Scalar>(graph: RoofGraph<T>) -> Result<RoofGraph<T>> {
    graph.validate()
}

pub fn transform_graph<T: Scalar>(graph: &RoofGraph<T>, sym: Symmetry) -> RoofGraph<T> {
    graph.transformed(sym)
}

/// An element of the symmetry group of the square (rotations by multiples of
/// 90 degrees and mirrors), stored as a signed permutation matrix acting on
/// image coordinates centered on the image center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symmetry {
    m: [[i8; 2]; 2],
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry { m: [[1, 0], [0, 1]] };
    /// Quarter turn clockwise on screen: `(x, y) -> (N - y, x)`.
    pub const ROT90: Symmetry = Symmetry { m: [[0, -1], [1, 0]] };
    pub const ROT180: Symmetry = Symmetry { m: [[-1, 0], [0, -1]] };
    pub const ROT270: Symmetry = Symmetry { m: [[0, 1], [-1, 0]] };
    /// `x -> N - x`; swaps left and right.
    pub const MIRROR_X: Symmetry = Symmetry { m: [[-1, 0], [0, 1]] };
    /// `y -> N - y`; swaps top and bottom.
    pub const MIRROR_Y: Symmetry = Symmetry { m: [[1, 0], [0, -1]] };
    pub const TRANSPOSE: Symmetry = Symmetry { m: [[0, 1], [1, 0]] };
    pub const ANTI_TRANSPOSE: Symmetry = Symmetry { m: [[0, -1], [-1, 0]] };

    pub const ALL: [Symmetry; 8] = [
        Symmetry::IDENTITY,
        Symmetry::ROT90,
        Symmetry::ROT180,
        Symmetry::ROT270,
        Symmetry::MIRROR_X,
        Symmetry::MIRROR_Y,
        Symmetry::TRANSPOSE,
        Symmetry::ANTI_TRANSPOSE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            s if s == Self::IDENTITY => "identity",
            s if s == Self::ROT90 => "rot90",
            s if s == Self::ROT180 => "rot180",
            s if s == Self::ROT270 => "rot270",
            s if s == Self::MIRROR_X => "mirror_x",
            s if s == Self::MIRROR_Y => "mirror_y",
            s if s == Self::TRANSPOSE => "transpose",
            _ => "anti_transpose",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    /// `self` first, then `next`.
    pub fn then(self, next: Symmetry) -> Symmetry {
        let (a, b) = (next.m, self.m);
        let mut m = [[0i8; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Symmetry { m }
    }

    pub fn inverse(self) -> Symmetry {
        // Signed permutation matrices are orthogonal.
        Symmetry { m: [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]] }
    }

    /// True when the image axes are exchanged (90 and 270 degree rotations,
    /// and the two diagonal mirrors).
    pub fn swaps_axes(self) -> bool {
        self.m[0][0] == 0
    }

    /// Maps a continuous point of an `n x n` image.
    pub fn apply_point<T: Scalar>(self, x: T, y: T, n: T) -> (T, T) {
        let c = n * T::half();
        let (u, v) = (x - c, y - c);
        let f = |k: i8| T::of(k as f64);
        (c + f(self.m[0][0]) * u + f(self.m[0][1]) * v, c + f(self.m[1][0]) * u + f(self.m[1][1]) * v)
    }

    /// Maps a pixel index of an `n x n` image.
    pub fn apply_pixel(self, x: usize, y: usize, n: usize) -> (usize, usize) {
        // Doubled coordinates keep pixel centers integral.
        let c = n as i64;
        let (u, v) = (2 * x as i64 + 1 - c, 2 * y as i64 + 1 - c);
        let nu = self.m[0][0] as i64 * u + self.m[0][1] as i64 * v;
        let nv = self.m[1][0] as i64 * u + self.m[1][1] as i64 * v;
        (((nu + c - 1) / 2) as usize, ((nv + c - 1) / 2) as usize)
    }

    pub fn map_side(self, side: Side) -> Side {
        let (x, y) = side.normal();
        Side::from_normal((self.m[0][0] * x + self.m[0][1] * y, self.m[1][0] * x + self.m[1][1] * y))
    }

    pub fn apply_primitive<T: Scalar>(self, p: &RoofPrimitive<T>, n: T) -> RoofPrimitive<T> {
        let (x0, y0) = self.apply_point(p.left, p.top, n);
        let (x1, y1) = self.apply_point(p.right, p.bottom, n);
        let (ptype, angle_lr, angle_tb) = if self.swaps_axes() {
            (p.ptype.axes_swapped(), p.angle_tb, p.angle_lr)
        } else {
            (p.ptype, p.angle_lr, p.angle_tb)
        };
        RoofPrimitive {
            left: x0.min(x1),
            right: x0.max(x1),
            top: y0.min(y1),
            bottom: y0.max(y1),
            angle_lr,
            angle_tb,
            ptype,
        }
    }

    pub fn apply_relation<T: Scalar>(self, v: &RelationVector<T>) -> RelationVector<T> {
        let mut out = *v;
        for side in Side::ALL {
            out.set_colinear(self.map_side(side), v.colinear(side));
        }
        if self.swaps_axes() {
            out.parallel_lr = v.parallel_tb;
            out.parallel_tb = v.parallel_lr;
        }
        out
    }
}

/// Dimensionality of extracted polygons and of the distance computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dim {
    /// Nadir-view polygons.
    #[default]
    Two,
    Three,
}

impl Dim {
    pub fn from_number(d: u8) -> Option<Dim> {
        match d {
            2 => Some(Dim::Two),
            3 => Some(Dim::Three),
            _ => None,
        }
    }
}

/// A polygon vertex in meters; `z` is present for 3D models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex<T = f64> {
    pub x: T,
    pub y: T,
    pub z: Option<T>,
}

impl<T: Scalar> Vertex<T> {
    pub fn xy(x: T, y: T) -> Self {
        Self { x, y, z: None }
    }

    pub fn xyz(x: T, y: T, z: T) -> Self {
        Self { x, y, z: Some(z) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facet<T = f64> {
    pub vertices: Vec<Vertex<T>>,
    pub plane_angle: T,
}

impl<T: Scalar> Facet<T> {
    pub fn new(vertices: Vec<Vertex<T>>, plane_angle: T) -> Self {
        Self { vertices, plane_angle }
    }

    pub fn from_xy(points: &[(T, T)]) -> Self {
        Self::new(points.iter().map(|&(x, y)| Vertex::xy(x, y)).collect(), T::zero())
    }

    /// Nadir-view projection.
    pub fn to_2d(&self) -> Self {
        Self::new(self.vertices.iter().map(|v| Vertex::xy(v.x, v.y)).collect(), self.plane_angle)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofModel<T = f64> {
    pub facets: Vec<Facet<T>>,
}

impl<T: Scalar> RoofModel<T> {
    pub fn new(facets: Vec<Facet<T>>) -> Self {
        Self { facets }
    }

    pub fn to_2d(&self) -> Self {
        Self::new(self.facets.iter().map(Facet::to_2d).collect())
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex<T>> {
        self.facets.iter().flat_map(|f| f.vertices.iter())
    }

    pub fn check(&self) -> Result<()> {
        if self.facets.is_empty() {
            return Err(Error::EmptyModel);
        }
        for f in &self.facets {
            if f.vertices.len() < 3 {
                return Err(Error::InvalidGeometry(format!("facet with {} vertices", f.vertices.len())));
            }
        }
        Ok(())
    }
}
