//! Command-line front end. Every command writes JSON-lines records to the
//! given writer; files named by flags (`--json`, `--svg`, `--dot`) are
//! written alongside.

mod config;
mod reproduce;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

pub use config::RunConfig;
pub use reproduce::{reproduce_paper, ReportRow, FIGURE_EIGHT_SIGNATURES, REFERENCE_L4R6_TABLE};

use crate::cusp::{convexity_report, cusp_triangulation, develop_cusp, CuspError};
use crate::explorer::{explore, is_isolated, regeometrize, regeometrize_fan, ExplorerError, Filter};
use crate::geometry::{classify_triangulation, solve_complete_structure, volume, GeometryError};
use crate::isosig::{self, IsoSigError};
use crate::monodromy::{build, gluing_table, parse_word, Letter, WordError};
use crate::moves::{classify_move, move_sites, MoveError};
use crate::signature::canonical_signature;
use crate::triangulation::{Triangulation, TriangulationError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    IsoSig(#[from] IsoSigError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Cusp(#[from] CuspError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Explorer(#[from] ExplorerError),
}

impl CliError {
    /// Short machine-readable name, including the inner variant.
    pub fn kind(&self) -> String {
        let inner = match self {
            CliError::Config(_) => return "Config".into(),
            CliError::Io { .. } => return "Io".into(),
            CliError::Input(_) => return "Input".into(),
            CliError::Word(e) => format!("{e:?}"),
            CliError::IsoSig(e) => format!("{e:?}"),
            CliError::Triangulation(e) => format!("{e:?}"),
            CliError::Geometry(e) => format!("{e:?}"),
            CliError::Cusp(e) => format!("{e:?}"),
            CliError::Move(e) => format!("{e:?}"),
            CliError::Explorer(e) => format!("{e:?}"),
        };
        inner
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or_default()
            .to_string()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": self.kind(), "message": self.to_string() })
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

#[derive(Debug, Parser)]
#[command(name = "flipgraph", version, about = "Layered triangulations of punctured torus bundles and their geometric flips")]
pub struct Cli {
    /// TOML file with tolerances and explorer budgets.
    #[arg(long, env = "FLIPGRAPH_CONFIG", global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub eps_res: Option<f64>,
    #[arg(long, global = true)]
    pub eps_flat: Option<f64>,
    #[arg(long, global = true)]
    pub eps_deg: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the layered triangulation of a word such as L^4R^6 or LLRR.
    Build {
        word: String,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        isosig: bool,
        /// Also print the face gluing table.
        #[arg(long)]
        table: bool,
    },
    /// Solve for the complete hyperbolic structure.
    Solve {
        input: String,
        #[arg(long)]
        report: bool,
    },
    /// Develop the cusp from the complete structure.
    Cusp {
        input: String,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Emit the convexity of every shared cusp edge.
        #[arg(long)]
        report: bool,
    },
    /// Classify every 2-3 and 3-2 site.
    Moves { input: String },
    /// Decide whether the triangulation is an isolated geometric one.
    Isolated { input: String },
    /// Breadth-first search of the flip graph.
    Explore {
        input: String,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value = "geometric")]
        filter: Filter,
        #[arg(long)]
        max_nodes: Option<usize>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Search for a short move sequence to a larger geometric triangulation.
    Regeometrize {
        word: String,
        /// Restrict the search to the fan of this letter (L or R).
        #[arg(long)]
        fan: Option<String>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Encode or decode isomorphism signatures.
    Isosig {
        #[command(subcommand)]
        action: IsosigAction,
    },
    /// Run the isolation, re-geometrization and signature checks in batch.
    ReproducePaper {
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long, default_value_t = 3)]
        m_max: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum IsosigAction {
    Encode { input: String },
    Decode { signature: String },
}

impl Cli {
    /// Config file (if any) with command-line overrides applied.
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let t = &mut cfg.tolerances;
        if let Some(v) = self.eps_res {
            t.eps_res = v;
        }
        if let Some(v) = self.eps_flat {
            t.eps_flat = v;
        }
        if let Some(v) = self.eps_deg {
            t.eps_deg = v;
        }
        if let Some(v) = self.max_iter {
            t.max_iter = v;
        }
        if let Some(v) = self.seed {
            t.seed = v;
        }
        if let Command::Explore { depth, max_nodes, .. } = &self.command {
            if let Some(d) = depth {
                cfg.explorer.depth = *d;
            }
            if let Some(m) = max_nodes {
                cfg.explorer.max_nodes = *m;
            }
        }
        if self.output_dir.is_some() {
            cfg.output_dir = self.output_dir.clone();
        }
        cfg.verbosity = cfg.verbosity.max(self.verbose);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn looks_like_word(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| matches!(c, 'L' | 'R' | 'l' | 'r' | '^' | ' ') || c.is_ascii_digit())
}

/// A path to triangulation JSON, a word, or an isomorphism signature.
pub fn load_input(input: &str) -> Result<Triangulation, CliError> {
    let path = Path::new(input);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        return Ok(Triangulation::from_json(&text)?);
    }
    if looks_like_word(input) {
        return Ok(build(&parse_word(input)?)?);
    }
    Ok(isosig::decode(input)?)
}

fn emit(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    let line = serde_json::to_string(value).expect("records serialize");
    writeln!(out, "{line}").map_err(|e| io_error(Path::new("<stdout>"), e))
}

fn write_file(cfg: &RunConfig, path: &Path, contents: &str) -> Result<PathBuf, CliError> {
    let path = cfg.output_path(path);
    std::fs::write(&path, contents).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

fn parse_letter(s: &str) -> Result<Letter, CliError> {
    match s {
        "L" | "l" => Ok(Letter::L),
        "R" | "r" => Ok(Letter::R),
        other => Err(CliError::Input(format!("fan must be L or R, not {other:?}"))),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from_args<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Input(e.to_string()))?;
    run(&cli, out)
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = cli.run_config()?;
    let tol = &cfg.tolerances;
    match &cli.command {
        Command::Build { word, json, isosig, table } => {
            let w = parse_word(word)?;
            let tri = build(&w)?;
            let mut record = json!({
                "kind": "build",
                "word": w.to_exponent_string(),
                "tetrahedra": tri.size(),
                "signature": canonical_signature(&tri),
            });
            if *isosig {
                record["isosig"] = json!(isosig::encode(&tri)?);
            }
            if let Some(p) = json {
                let written = write_file(&cfg, p, &tri.to_json())?;
                record["json"] = json!(written);
            }
            emit(out, &record)?;
            if *table {
                for (t, row) in gluing_table(&tri).iter().enumerate() {
                    emit(out, &json!({ "kind": "gluing", "tet": tri.label(t), "faces": row }))?;
                }
            }
        }
        Command::Solve { input, report } => {
            let tri = load_input(input)?;
            let sol = solve_complete_structure(&tri, None, tol)?;
            let class = classify_triangulation(&tri, &sol, tol);
            let mut record = json!({
                "kind": "solve",
                "tetrahedra": tri.size(),
                "class": class,
                "shapes": sol.shapes.iter().map(|s| s.z).collect::<Vec<_>>(),
                "residual": sol.residual,
                "volume": volume(&sol),
            });
            if *report {
                record["shape_classes"] = json!(sol.classes(tol));
                record["iterations"] = json!(sol.iterations);
                record["converged"] = json!(sol.converged);
            }
            emit(out, &record)?;
        }
        Command::Cusp { input, svg, report } => {
            let tri = load_input(input)?;
            let sol = solve_complete_structure(&tri, None, tol)?;
            let ct = cusp_triangulation(&tri)?;
            for (k, cusp) in ct.cusps.iter().enumerate() {
                let dev = develop_cusp(&ct, k, &sol, tol)?;
                let mut record = json!({
                    "kind": "cusp",
                    "cusp": k,
                    "triangles": cusp.triangles.len(),
                    "vertices": cusp.vertex_count,
                    "euler_characteristic": cusp.euler_characteristic,
                    "holonomy": dev.holonomy,
                });
                if let Some(p) = svg {
                    let p = if k == 0 { p.clone() } else { p.with_extension(format!("cusp{k}.svg")) };
                    record["svg"] = json!(write_file(&cfg, &p, &dev.to_svg(tri.size()))?);
                }
                emit(out, &record)?;
                if *report {
                    for e in convexity_report(&dev, tol)? {
                        emit(out, &json!({ "kind": "cusp_edge", "cusp": k, "edge": e.edge, "neighbour": e.neighbour, "convex": e.convex }))?;
                    }
                }
            }
        }
        Command::Moves { input } => {
            let tri = load_input(input)?;
            let sol = solve_complete_structure(&tri, None, tol)?;
            for site in move_sites(&tri) {
                let record = match classify_move(&tri, &sol, site, tol) {
                    Ok(r) => json!({
                        "kind": "move",
                        "site": site,
                        "class": r.move_class,
                        "result_class": r.tri_class,
                        "new_shapes": r.new_shapes().iter().map(|s| s.z).collect::<Vec<_>>(),
                        "newton_agrees": r.newton_agrees,
                    }),
                    Err(e) => json!({ "kind": "move", "site": site, "error": e.to_string() }),
                };
                emit(out, &record)?;
            }
        }
        Command::Isolated { input } => {
            let tri = load_input(input)?;
            emit(out, &is_isolated(&tri, tol))?;
        }
        Command::Explore { input, filter, dot, .. } => {
            let tri = load_input(input)?;
            let graph = explore(&tri, *filter, &cfg.explorer, tol);
            for (sig, node) in &graph.nodes {
                emit(out, &json!({ "kind": "node", "signature": sig, "class": node.class, "tetrahedra": node.tetrahedra, "depth": node.depth }))?;
            }
            let mut record = json!({
                "kind": "graph",
                "start": graph.start,
                "nodes": graph.node_count(),
                "arcs": graph.arcs.len(),
                "depth": graph.depth,
                "complete": graph.complete,
            });
            if let Some(p) = dot {
                record["dot"] = json!(write_file(&cfg, p, &graph.to_dot())?);
            }
            emit(out, &record)?;
        }
        Command::Regeometrize { word, fan, json } => {
            let w = parse_word(word)?;
            let r = match fan {
                Some(f) => regeometrize_fan(&w, parse_letter(f)?, tol)?,
                None => regeometrize(&w, tol)?,
            };
            for m in &r.moves {
                emit(out, &json!({ "kind": "step", "move": m }))?;
            }
            let mut record = json!({
                "kind": "regeometrize",
                "word": w.to_exponent_string(),
                "fan": r.fan,
                "start_tetrahedra": r.start.size(),
                "tetrahedra": r.result.size(),
                "start_volume": r.start_volume,
                "volume": r.volume,
                "signature": canonical_signature(&r.result),
            });
            if let Some(p) = json {
                record["json"] = json!(write_file(&cfg, p, &r.result.to_json())?);
            }
            emit(out, &record)?;
        }
        Command::Isosig { action } => match action {
            IsosigAction::Encode { input } => {
                let tri = load_input(input)?;
                emit(out, &json!({ "kind": "isosig", "isosig": isosig::encode(&tri)? }))?;
            }
            IsosigAction::Decode { signature } => {
                let tri = isosig::decode(signature)?;
                let value: serde_json::Value = serde_json::from_str(&tri.to_json()).expect("valid json");
                emit(out, &value)?;
            }
        },
        Command::ReproducePaper { n_max, m_max } => {
            if *n_max == 0 || *m_max == 0 {
                return Err(CliError::Input("ranges must be at least 1".into()));
            }
            let rows = reproduce_paper(*n_max, *m_max, tol);
            let failed = rows.iter().filter(|r| !r.passed()).count();
            for row in &rows {
                emit(out, row)?;
            }
            emit(out, &json!({ "kind": "summary", "rows": rows.len(), "failed": failed }))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String, CliError> {
        let mut out = Vec::new();
        run_from_args(std::iter::once("flipgraph").chain(args.iter().copied()), &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn single_letter_word_is_rejected() {
        let err = run_args(&["build", "LLLL"]).unwrap_err();
        assert_eq!(err.kind(), "SingleLetterWord");
    }

    #[test]
    fn build_emits_one_record() {
        let out = run_args(&["build", "RL", "--isosig"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["tetrahedra"], 2);
        assert!(v["isosig"].as_str().unwrap().starts_with('c'));
    }

    #[test]
    fn input_falls_back_to_isosig() {
        let tri = load_input("cPcbbbiht").unwrap();
        assert_eq!(tri.size(), 2);
    }

    #[test]
    fn table_has_forty_faces() {
        let out = run_args(&["build", "L^4R^6", "--table"]).unwrap();
        assert_eq!(out.lines().count(), 11);
    }
}
