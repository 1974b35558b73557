//! JSON codecs for roof graphs, roof models and facet tables.
//!
//! Floats are written in shortest round-trip form, so parsing a serialized
//! value gives back the identical value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Facet, PrimitiveType, RelationVector, RoofGraph, RoofModel, RoofPrimitive, Side, Vertex};
use crate::raster::FacetInfo;
use crate::scalar::Scalar;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct GraphDoc<T> {
    resolution: usize,
    meters_per_pixel: T,
    primitives: Vec<PrimitiveDoc<T>>,
    relations: Vec<RelationDoc<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct PrimitiveDoc<T> {
    #[serde(rename = "box")]
    bbox: [T; 4],
    #[serde(rename = "type")]
    ptype: PrimitiveType,
    angle_lr: T,
    angle_tb: T,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct RelationDoc<T> {
    pair: [usize; 2],
    v: [T; 6],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct FacetDoc<T> {
    vertices: Vec<Vec<T>>,
    plane_angle: T,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct FacetInfoDoc<T> {
    primitive: usize,
    side: Side,
    angle: T,
}

fn format_err(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn graph_to_json<T: Scalar>(g: &RoofGraph<T>) -> String {
    let doc = GraphDoc {
        resolution: g.resolution,
        meters_per_pixel: g.meters_per_pixel,
        primitives: g
            .primitives
            .iter()
            .map(|p| PrimitiveDoc { bbox: p.bbox(), ptype: p.ptype, angle_lr: p.angle_lr, angle_tb: p.angle_tb })
            .collect(),
        relations: g.relations.iter().map(|(&(i, j), v)| RelationDoc { pair: [i, j], v: v.to_array() }).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph serialization cannot fail")
}

/// Parses and validates a graph document. Relations may be listed in any
/// order and with either index first.
pub fn graph_from_json<T: Scalar>(s: &str) -> Result<RoofGraph<T>> {
    let doc: GraphDoc<T> = serde_json::from_str(s).map_err(format_err)?;
    let mut g = RoofGraph::new(doc.resolution, doc.meters_per_pixel);
    g.primitives = doc
        .primitives
        .into_iter()
        .map(|p| RoofPrimitive::new(p.bbox, p.ptype, p.angle_lr, p.angle_tb))
        .collect();
    for r in doc.relations {
        let [i, j] = r.pair;
        if i == j {
            return Err(Error::InvalidRelationPair { pair: (i, j) });
        }
        if g.relation(i, j).is_some() {
            return Err(Error::Format(format!("duplicate relation for pair ({i}, {j})")));
        }
        g.set_relation(i, j, RelationVector::from_array(r.v));
    }
    g.validate()
}

pub fn model_to_json<T: Scalar>(m: &RoofModel<T>) -> String {
    let doc: Vec<FacetDoc<T>> = m
        .facets
        .iter()
        .map(|f| FacetDoc {
            vertices: f
                .vertices
                .iter()
                .map(|v| match v.z {
                    Some(z) => vec![v.x, v.y, z],
                    None => vec![v.x, v.y],
                })
                .collect(),
            plane_angle: f.plane_angle,
        })
        .collect();
    serde_json::to_string_pretty(&doc).expect("model serialization cannot fail")
}

pub fn model_from_json<T: Scalar>(s: &str) -> Result<RoofModel<T>> {
    let doc: Vec<FacetDoc<T>> = serde_json::from_str(s).map_err(format_err)?;
    let facets = doc
        .into_iter()
        .map(|f| {
            let vertices = f
                .vertices
                .into_iter()
                .map(|v| match v[..] {
                    [x, y] => Ok(Vertex::xy(x, y)),
                    [x, y, z] => Ok(Vertex::xyz(x, y, z)),
                    _ => Err(Error::Format(format!("vertex with {} coordinates", v.len()))),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Facet::new(vertices, f.plane_angle))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RoofModel::new(facets))
}

pub fn facets_to_json<T: Scalar>(facets: &[FacetInfo<T>]) -> String {
    let doc: Vec<FacetInfoDoc<T>> =
        facets.iter().map(|f| FacetInfoDoc { primitive: f.primitive, side: f.side, angle: f.angle }).collect();
    serde_json::to_string_pretty(&doc).expect("facet serialization cannot fail")
}

pub fn facets_from_json<T: Scalar>(s: &str) -> Result<Vec<FacetInfo<T>>> {
    let doc: Vec<FacetInfoDoc<T>> = serde_json::from_str(s).map_err(format_err)?;
    Ok(doc.into_iter().map(|f| FacetInfo { primitive: f.primitive, side: f.side, angle: f.angle }).collect())
}
