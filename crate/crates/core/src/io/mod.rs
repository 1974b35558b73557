//! File formats: graph and model JSON, binary raster grids, OBJ meshes,
//! image previews and run manifests.

pub mod json;
pub mod manifest;
pub mod obj;
pub mod raster_files;

pub use json::{graph_from_json, graph_to_json, model_from_json, model_to_json};
pub use manifest::{read_manifest, write_manifest, Manifest};
pub use obj::model_to_obj;
pub use raster_files::{read_bundle, write_bundle};
