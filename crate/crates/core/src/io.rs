//! Hierarchy configuration files and per-node CSV matrices.
//!
//! A node matrix has one row per time index and one column per grid point; an
//! optional non-numeric first row is read as a header and ignored. A
//! configuration is a JSON document:
//!
//! ```json
//! {
//!   "nodes": [
//!     {"id": "total", "children": ["a", "b"]},
//!     {"id": "a", "data": "a.csv"},
//!     {"id": "b", "data": "b.csv"}
//!   ],
//!   "params": {"window": 10, "depth": "mbd", "method": "aggregated-median",
//!              "grid": {"start": 0.0, "end": 1.0}, "seed": 42}
//! }
//! ```
//!
//! Data paths are resolved relative to the configuration file.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::depth::DepthKind;
use crate::error::{Error, Result};
use crate::forecast::{ForecastConfig, ForecastMethod};
use crate::grid::Grid;
use crate::hierarchy::{fill_internal_series, HierarchyData, HierarchySpec, NodeDecl};
use crate::series::FunctionalTimeSeries;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
}

/// Grid placement: explicit points, or a uniform grid whose size is the column count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GridSpec {
    Points { points: Vec<f64> },
    Uniform { start: f64, end: f64 },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Uniform {
            start: 0.0,
            end: 1.0,
        }
    }
}

impl GridSpec {
    pub fn build(&self, columns: usize) -> Result<Grid> {
        match self {
            GridSpec::Uniform { start, end } => Grid::uniform(*start, *end, columns),
            GridSpec::Points { points } => {
                if points.len() != columns {
                    return Err(Error::InvalidGrid(format!(
                        "{} grid points configured for {columns} data columns",
                        points.len()
                    )));
                }
                Grid::new(points.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunParams {
    pub window: usize,
    pub depth: DepthKind,
    pub method: ForecastMethod,
    pub grid: GridSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Lower bound on the number of children of an internal node.
    pub min_children: usize,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            window: 10,
            depth: DepthKind::Mbd,
            method: ForecastMethod::AggregatedMedian,
            grid: GridSpec::default(),
            seed: None,
            min_children: 2,
        }
    }
}

impl RunParams {
    pub fn forecast_config(&self) -> ForecastConfig {
        ForecastConfig::new(self.window, self.depth, self.method)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierarchyConfig {
    pub nodes: Vec<NodeEntry>,
    #[serde(default)]
    pub params: RunParams,
}

impl HierarchyConfig {
    pub fn from_json(path: &Path, text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(path, e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        HierarchyConfig::from_json(path, &text)
    }

    pub fn spec(&self) -> Result<HierarchySpec> {
        let decls = self
            .nodes
            .iter()
            .map(|n| NodeDecl {
                id: n.id.clone(),
                children: n.children.clone(),
            })
            .collect();
        HierarchySpec::with_min_children(decls, self.params.min_children)
    }
}

/// A hierarchy read from disk together with its run parameters.
#[derive(Clone, Debug)]
pub struct LoadedHierarchy {
    pub data: HierarchyData,
    pub params: RunParams,
    pub config: HierarchyConfig,
}

/// Reads a numeric matrix; a non-numeric first row is skipped as a header.
pub fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_matrix_from(path, file)
}

pub(crate) fn read_matrix_from<R: std::io::Read>(path: &Path, reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::parse(path, format!("row {}: {e}", r + 1)))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, (usize, String)> = record
            .iter()
            .enumerate()
            .map(|(c, f)| f.parse::<f64>().map_err(|_| (c, f.to_string())))
            .collect();
        match parsed {
            Ok(values) => {
                if let Some(c) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::parse(
                        path,
                        format!("row {}, column {}: non-finite value", r + 1, c + 1),
                    ));
                }
                if let Some(first) = rows.first() {
                    if first.len() != values.len() {
                        return Err(Error::parse(
                            path,
                            format!(
                                "row {} has {} columns, expected {}",
                                r + 1,
                                values.len(),
                                first.len()
                            ),
                        ));
                    }
                }
                rows.push(values);
            }
            Err(_) if r == 0 => continue,
            Err((c, f)) => {
                return Err(Error::parse(
                    path,
                    format!("row {}, column {}: invalid number `{f}`", r + 1, c + 1),
                ))
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::parse(path, "no data rows"));
    }
    Ok(rows)
}

/// Parses a configuration, reads every referenced node matrix and completes the
/// internal nodes that have no data file by summing their children.
pub fn load_hierarchy(config_path: &Path) -> Result<LoadedHierarchy> {
    let config = HierarchyConfig::read(config_path)?;
    let spec = config.spec()?;
    let base = config_path.parent().unwrap_or_else(|| Path::new("."));

    let mut matrices: Vec<(String, PathBuf, Vec<Vec<f64>>)> = Vec::new();
    for node in &config.nodes {
        match &node.data {
            Some(rel) => {
                let path = base.join(rel);
                matrices.push((node.id.clone(), path.clone(), read_matrix(&path)?));
            }
            None if spec.is_leaf(&node.id)? => {
                return Err(Error::IncompleteData(format!(
                    "leaf node `{}` has no data file",
                    node.id
                )));
            }
            None => {}
        }
    }

    // The most common (rows, columns) shape is taken as the reference.
    let mut shapes: HashMap<(usize, usize), usize> = HashMap::new();
    for (_, _, m) in &matrices {
        *shapes.entry((m.len(), m[0].len())).or_default() += 1;
    }
    let (rows, cols) = shapes
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(s, _)| *s)
        .ok_or_else(|| Error::IncompleteData("no node has a data file".into()))?;
    for (id, path, m) in &matrices {
        if (m.len(), m[0].len()) != (rows, cols) {
            return Err(Error::ShapeMismatch {
                node: id.clone(),
                detail: format!(
                    "{} is {}x{}, other nodes are {rows}x{cols}",
                    path.display(),
                    m.len(),
                    m[0].len()
                ),
            });
        }
    }

    let grid = config.params.grid.build(cols)?;
    let mut observed = BTreeMap::new();
    for (id, _, m) in matrices {
        observed.insert(id, FunctionalTimeSeries::from_rows(grid.clone(), m)?);
    }
    let data = fill_internal_series(spec, observed, &BTreeMap::new())?;
    Ok(LoadedHierarchy {
        params: config.params.clone(),
        data,
        config,
    })
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Node matrix as CSV text, values in shortest round-trip decimal form.
pub fn matrix_csv(series: &FunctionalTimeSeries) -> String {
    let mut out = String::new();
    for c in series.curves() {
        let row: Vec<String> = c.values().iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes every node as `<id>.csv` plus a `hierarchy.json` that [`load_hierarchy`] reads back.
pub fn write_hierarchy(dir: &Path, data: &HierarchyData, params: &RunParams) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut nodes = Vec::with_capacity(data.spec().len());
    for decl in data.spec().decls() {
        let file = format!("{}.csv", decl.id);
        write_atomic(
            &dir.join(&file),
            matrix_csv(data.series(&decl.id)?).as_bytes(),
        )?;
        nodes.push(NodeEntry {
            id: decl.id,
            children: decl.children,
            data: Some(PathBuf::from(file)),
        });
    }
    let params = RunParams {
        grid: GridSpec::Points {
            points: data.grid().points().to_vec(),
        },
        min_children: params.min_children.min(min_children_of(data.spec())),
        ..params.clone()
    };
    let config = HierarchyConfig { nodes, params };
    let path = dir.join("hierarchy.json");
    let text = serde_json::to_string_pretty(&config).expect("config serializes");
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

fn min_children_of(spec: &HierarchySpec) -> usize {
    spec.internal_nodes()
        .iter()
        .filter_map(|id| spec.children(id).ok().map(|c| c.len()))
        .min()
        .unwrap_or(1)
        .max(1)
}
