//! Structured roof geometry toolkit.
//!
//! Roofs are sets of axis-aligned rectangular primitives (gable or hip, with
//! horizontal or vertical ridge) plus pairwise colinearity/parallelism
//! relations. The crate converts between that vector form and per-primitive
//! geometry images, enforces relations on soft geometry images, extracts
//! polygonal facets, and compares sets of roof models with the recursive
//! minimum matching distance.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar for the common cases.

pub mod cli;
pub mod contour;
pub mod error;
pub mod grid;
pub mod io;
pub mod model;
pub mod raster;
pub mod relations;
pub mod rmmd;
pub mod sampler;
pub mod scalar;
pub mod vectorize;

pub use error::{Error, Result};
pub use grid::Grid;
pub use model::{Dim, Facet, PrimitiveType, RelationVector, RoofGraph, RoofModel, RoofPrimitive, Side, Symmetry, Vertex};
pub use raster::{FacetInfo, RasterBundle, RasterConfig};
pub use relations::{EnforceMode, RectTransform};
pub use rmmd::{MatchResult, RmmdConfig};
pub use sampler::SamplerConfig;
pub use scalar::Scalar;

pub type PrimitiveF32 = RoofPrimitive<f32>;
pub type PrimitiveF64 = RoofPrimitive<f64>;
pub type GraphF32 = RoofGraph<f32>;
pub type GraphF64 = RoofGraph<f64>;
pub type BundleF32 = RasterBundle<f32>;
pub type BundleF64 = RasterBundle<f64>;
pub type ModelF32 = RoofModel<f32>;
pub type ModelF64 = RoofModel<f64>;
