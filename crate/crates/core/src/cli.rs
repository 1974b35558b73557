//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library, and maps outcomes to exit codes: 0 success, 1 domain error
//! (message on stderr), 2 usage error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::io::json::{graph_from_json, graph_to_json, model_from_json, model_to_json};
use crate::io::manifest::{write_manifest, Manifest, MANIFEST_FILE};
use crate::io::obj::model_to_obj;
use crate::io::raster_files::{encode_png_rgb, read_bundle, read_file, read_orientation, write_bundle, write_file};
use crate::model::{Dim, RoofGraph, RoofModel, RoofPrimitive};
use crate::raster::{composite_roof, extract_facet_polygons, merge_coplanar, rasterize_graph, render_normal_map, RasterBundle};
use crate::relations::{detect_graph, enforce_graph, EnforceMode, Tolerances};
use crate::rmmd::{nearest_neighbors, normalize_model, set_distance, RmmdConfig};
use crate::sampler::{sample_stream, SamplerConfig};
use crate::vectorize::{classify_type, vectorize_box, vectorize_primitive};

#[derive(Parser, Debug)]
#[command(name = "roofkit", version, about = "Structured roof geometry toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    #[arg(long, global = true, default_value_t = 32)]
    resolution: usize,
    #[arg(long, global = true, default_value_t = 0.5)]
    meters_per_pixel: f64,
    #[arg(long, global = true, default_value_t = 3.0)]
    wall_height: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_px: f64,
    #[arg(long, global = true, default_value_t = 18.0)]
    tol_deg: f64,
    #[arg(long, global = true, default_value_t = 22.627417)]
    penalty: f64,
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    dim: u8,
    #[arg(long, global = true, env = "ROOFKIT_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Bilinear,
    Exact,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw roof graphs; with --pipeline also write models, meshes and normal maps.
    Sample {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        pipeline: bool,
    },
    /// Rasterize a graph into per-primitive and composite image bundles.
    Rasterize { graph: PathBuf },
    /// Recover primitives from image bundles (or bare orientation files).
    Vectorize {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Also write the CSV table to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Recompute a graph's relations from its primitives.
    Detect { graph: PathBuf },
    /// Enforce a graph's colinearity relations on its rasterized images.
    Enforce {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Bilinear)]
        mode: ModeArg,
    },
    /// Distance from a reference set of roof models to a generated set.
    Rmmd {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        gen: PathBuf,
        /// Also print the nearest generated model for each reference model.
        #[arg(long)]
        retrieve: bool,
    },
    /// Convert a roof model to a Wavefront OBJ mesh.
    ExportObj { model: PathBuf },
    /// Render the surface-normal image of a graph as PNG.
    Render { graph: PathBuf },
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match cli.global.threads {
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Sample { n, pipeline } => cmd_sample(g, *n, *pipeline),
        Command::Rasterize { graph } => cmd_rasterize(g, graph),
        Command::Vectorize { inputs, report } => cmd_vectorize(g, inputs, report.as_deref()),
        Command::Detect { graph } => cmd_detect(g, graph),
        Command::Enforce { graph, mode } => cmd_enforce(g, graph, *mode),
        Command::Rmmd { gt, gen, retrieve } => cmd_rmmd(g, gt, gen, *retrieve),
        Command::ExportObj { model } => cmd_export_obj(g, model),
        Command::Render { graph } => cmd_render(g, graph),
    }
}

impl Global {
    fn dim(&self) -> Dim {
        Dim::from_number(self.dim).unwrap_or_default()
    }

    fn tolerances(&self) -> Tolerances<f64> {
        Tolerances { px: self.tol_px, deg: self.tol_deg }
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Run settings recorded in manifests. Thread count and output location
    /// are left out: they do not change results.
    fn config_json(&self) -> serde_json::Value {
        json!({
            "resolution": self.resolution,
            "meters_per_pixel": self.meters_per_pixel,
            "wall_height": self.wall_height,
            "tol_px": self.tol_px,
            "tol_deg": self.tol_deg,
            "penalty": self.penalty,
            "dim": self.dim,
        })
    }
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_file(path)?).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<RoofGraph<f64>> {
    graph_from_json(&read_text(path)?)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `bytes` to `root/rel` and records it in the manifest.
fn emit(root: &Path, rel: &str, bytes: &[u8], manifest: &mut Manifest) -> Result<()> {
    let path = root.join(rel);
    if let Some(parent) = path.parent() {
        create_dir(parent)?;
    }
    write_file(&path, bytes)?;
    manifest.add_output(root, Path::new(rel))
}

fn finish_manifest(root: &Path, manifest: &Manifest) -> Result<()> {
    write_manifest(&root.join(MANIFEST_FILE), manifest)
}

fn roof_composite(graph: &RoofGraph<f64>, wall_height: f64) -> Result<RasterBundle<f64>> {
    let bundles = rasterize_graph(graph, wall_height)?;
    Ok(merge_coplanar(&composite_roof(&bundles)?, graph))
}

struct SampleOutputs {
    graph: String,
    model: Option<String>,
    obj: Option<String>,
    normals: Option<Vec<u8>>,
}

fn sample_one(cfg: &SamplerConfig, stream: u64, pipeline: bool, wall: f64, dim: Dim) -> Result<SampleOutputs> {
    let graph: RoofGraph<f64> = sample_stream(cfg, stream)?;
    let mut out = SampleOutputs { graph: graph_to_json(&graph), model: None, obj: None, normals: None };
    if pipeline {
        let composite = roof_composite(&graph, wall)?;
        let model = extract_facet_polygons(&composite, dim)?;
        out.model = Some(model_to_json(&model));
        out.obj = Some(model_to_obj(&model));
        out.normals = Some(encode_png_rgb(&render_normal_map(&composite)));
    }
    Ok(out)
}

fn cmd_sample(g: &Global, n: usize, pipeline: bool) -> Result<()> {
    use rayon::prelude::*;
    let cfg = SamplerConfig {
        seed: g.seed,
        resolution: g.resolution,
        meters_per_pixel: g.meters_per_pixel,
        wall_height: g.wall_height,
        tolerances: g.tolerances(),
        max_box_side: SamplerConfig::default().max_box_side.min(g.resolution),
        ..SamplerConfig::default()
    };
    let dim = g.dim();
    let results: Vec<SampleOutputs> = (0..n as u64)
        .into_par_iter()
        .map(|s| sample_one(&cfg, s, pipeline, g.wall_height, dim))
        .collect::<Result<_>>()?;

    let root = g.out_dir();
    create_dir(&root)?;
    let mut config = g.config_json();
    config["n"] = json!(n);
    config["pipeline"] = json!(pipeline);
    let mut manifest = Manifest::new("sample", config, Some(g.seed));
    for (i, r) in results.iter().enumerate() {
        let dir = format!("sample_{i:05}");
        emit(&root, &format!("{dir}/graph.json"), r.graph.as_bytes(), &mut manifest)?;
        if let (Some(m), Some(o), Some(p)) = (&r.model, &r.obj, &r.normals) {
            emit(&root, &format!("{dir}/roof.model.json"), m.as_bytes(), &mut manifest)?;
            emit(&root, &format!("{dir}/roof.obj"), o.as_bytes(), &mut manifest)?;
            emit(&root, &format!("{dir}/normals.png"), p, &mut manifest)?;
        }
    }
    finish_manifest(&root, &manifest)?;
    println!("wrote {n} sample(s) to {}", root.display());
    Ok(())
}

fn record_bundle(root: &Path, rel: &str, b: &RasterBundle<f64>, manifest: &mut Manifest) -> Result<()> {
    for path in write_bundle(&root.join(rel), b)? {
        let rel = path.strip_prefix(root).expect("written under root").to_path_buf();
        manifest.add_output(root, &rel)?;
    }
    Ok(())
}

fn cmd_rasterize(g: &Global, graph_path: &Path) -> Result<()> {
    let graph = read_graph(graph_path)?;
    let bundles = rasterize_graph(&graph, g.wall_height)?;
    let composite = composite_roof(&bundles)?;
    let root = g.out_dir();
    create_dir(&root)?;
    let mut manifest = Manifest::new("rasterize", g.config_json(), None);
    manifest.add_input(graph_path)?;
    for (i, b) in bundles.iter().enumerate() {
        record_bundle(&root, &format!("primitive_{i:02}"), b, &mut manifest)?;
    }
    record_bundle(&root, "composite", &composite, &mut manifest)?;
    finish_manifest(&root, &manifest)?;
    println!("wrote {} primitive bundle(s) and a composite to {}", bundles.len(), root.display());
    Ok(())
}

/// Bundle directory -> full primitive; bare orientation file -> box and
/// type, angles zero.
fn vectorize_input(path: &Path) -> Result<(RoofPrimitive<f64>, f64)> {
    if path.is_dir() && path.join(crate::io::raster_files::ANGLE_FILE).exists() {
        let b: RasterBundle<f64> = read_bundle(path)?;
        return Ok((vectorize_primitive(&b)?, b.meters_per_pixel));
    }
    let (orientation, mpp) = read_orientation::<f64>(path)?;
    let (left, right, top, bottom) = vectorize_box(&orientation)?;
    let ptype = classify_type(&orientation)?;
    Ok((RoofPrimitive { left, right, top, bottom, angle_lr: 0.0, angle_tb: 0.0, ptype }, mpp))
}

fn cmd_vectorize(g: &Global, inputs: &[PathBuf], report: Option<&Path>) -> Result<()> {
    let mut csv = String::from("index,left,top,right,bottom,type,angle_lr_deg,angle_tb_deg\n");
    let mut prims = Vec::with_capacity(inputs.len());
    let mut mpp = g.meters_per_pixel;
    for (i, path) in inputs.iter().enumerate() {
        let (p, m) = vectorize_input(path)?;
        mpp = m;
        let _ = writeln!(
            csv,
            "{i},{},{},{},{},{},{},{}",
            p.left,
            p.top,
            p.right,
            p.bottom,
            p.ptype.code(),
            p.angle_lr.to_degrees(),
            p.angle_tb.to_degrees()
        );
        prims.push(p);
    }
    print!("{csv}");
    if let Some(r) = report {
        write_file(r, csv.as_bytes())?;
    }
    if let Some(out) = &g.out {
        let graph = detect_graph(&RoofGraph::with_primitives(g.resolution, mpp, prims), g.tolerances());
        create_dir(out)?;
        let mut manifest = Manifest::new("vectorize", g.config_json(), None);
        for p in inputs {
            if p.is_file() {
                manifest.add_input(p)?;
            }
        }
        emit(out, "graph.json", graph_to_json(&graph).as_bytes(), &mut manifest)?;
        finish_manifest(out, &manifest)?;
    }
    Ok(())
}

fn cmd_detect(g: &Global, graph_path: &Path) -> Result<()> {
    let graph = detect_graph(&read_graph(graph_path)?, g.tolerances());
    let mut csv = String::from("i,j,colinear_left,colinear_right,colinear_top,colinear_bottom,parallel_lr,parallel_tb\n");
    for (&(i, j), v) in &graph.relations {
        let vals: Vec<String> = v.to_array().iter().map(|x| x.to_string()).collect();
        let _ = writeln!(csv, "{i},{j},{}", vals.join(","));
    }
    print!("{csv}");
    if let Some(out) = &g.out {
        create_dir(out)?;
        let mut manifest = Manifest::new("detect", g.config_json(), None);
        manifest.add_input(graph_path)?;
        emit(out, "graph.json", graph_to_json(&graph).as_bytes(), &mut manifest)?;
        finish_manifest(out, &manifest)?;
    }
    Ok(())
}

fn cmd_enforce(g: &Global, graph_path: &Path, mode: ModeArg) -> Result<()> {
    let graph = read_graph(graph_path)?;
    let bundles = rasterize_graph(&graph, g.wall_height)?;
    let mode = match mode {
        ModeArg::Bilinear => EnforceMode::Bilinear,
        ModeArg::Exact => EnforceMode::Exact,
    };
    let (enforced, images) = enforce_graph(&graph, &bundles, mode, g.wall_height)?;
    let root = g.out_dir();
    create_dir(&root)?;
    let mut config = g.config_json();
    config["mode"] = json!(format!("{mode:?}").to_lowercase());
    let mut manifest = Manifest::new("enforce", config, None);
    manifest.add_input(graph_path)?;
    emit(&root, "graph.json", graph_to_json(&enforced).as_bytes(), &mut manifest)?;
    for (i, b) in images.iter().enumerate() {
        record_bundle(&root, &format!("primitive_{i:02}"), b, &mut manifest)?;
    }
    finish_manifest(&root, &manifest)?;
    for (i, p) in enforced.primitives.iter().enumerate() {
        println!("{i},{},{},{},{}", p.left, p.top, p.right, p.bottom);
    }
    Ok(())
}

/// `*.model.json` files under `dir`, recursively, in path order.
fn model_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let entries = fs::read_dir(&d).map_err(|e| Error::io(&d, e))?;
        for entry in entries {
            let path = entry.map_err(|e| Error::io(&d, e))?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(".model.json")) {
                out.push(path);
            }
        }
    }
    out.sort();
    Ok(out)
}

fn load_model_set(dir: &Path, dim: Dim) -> Result<(Vec<PathBuf>, Vec<RoofModel<f64>>)> {
    let files = model_files(dir)?;
    let models = files
        .iter()
        .map(|f| {
            let m: RoofModel<f64> = model_from_json(&read_text(f)?)?;
            let m = if dim == Dim::Two { m.to_2d() } else { m };
            normalize_model(&m, crate::rmmd::SQUARE_SIDE)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((files, models))
}

fn cmd_rmmd(g: &Global, gt: &Path, gen: &Path, retrieve: bool) -> Result<()> {
    let dim = g.dim();
    let (gt_files, gt_models) = load_model_set(gt, dim)?;
    let (gen_files, gen_models) = load_model_set(gen, dim)?;
    let cfg = RmmdConfig { penalty: g.penalty, dim, ..RmmdConfig::default() };
    let d = set_distance(&gt_models, &gen_models, &cfg)?;
    println!("{d:?}");
    if retrieve {
        println!("gt,nearest_gen,cost");
        for (f, (j, c)) in gt_files.iter().zip(nearest_neighbors(&gt_models, &gen_models, &cfg)) {
            println!("{},{},{c:?}", f.display(), gen_files[j].display());
        }
    }
    Ok(())
}

fn cmd_export_obj(g: &Global, model_path: &Path) -> Result<()> {
    let model: RoofModel<f64> = model_from_json(&read_text(model_path)?)?;
    model.check()?;
    let obj = model_to_obj(&model);
    match &g.out {
        Some(p) => write_file(p, obj.as_bytes()),
        None => {
            print!("{obj}");
            Ok(())
        }
    }
}

fn cmd_render(g: &Global, graph_path: &Path) -> Result<()> {
    let graph = read_graph(graph_path)?;
    let png = encode_png_rgb(&render_normal_map(&roof_composite(&graph, g.wall_height)?));
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from("normals.png"));
    write_file(&out, &png)
}
