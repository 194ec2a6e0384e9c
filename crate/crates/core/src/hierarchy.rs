//! Hierarchy trees and the per-node functional series they carry.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::series::{sum_series, FunctionalTimeSeries};

/// One node declaration: an id and the ids of its children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeDecl {
    pub id: String,
    pub children: Vec<String>,
}

impl NodeDecl {
    pub fn new(id: impl Into<String>, children: &[&str]) -> Self {
        NodeDecl {
            id: id.into(),
            children: children.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn leaf(id: impl Into<String>) -> Self {
        NodeDecl::new(id, &[])
    }
}

/// A validated rooted tree of named nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchySpec {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    root: usize,
}

impl HierarchySpec {
    /// Validates with the default lower bound of two children per internal node.
    pub fn new(decls: Vec<NodeDecl>) -> Result<Self> {
        HierarchySpec::with_min_children(decls, 2)
    }

    pub fn with_min_children(decls: Vec<NodeDecl>, min_children: usize) -> Result<Self> {
        let min_children = min_children.max(1);
        if decls.is_empty() {
            return Err(Error::InvalidHierarchy("no nodes declared".into()));
        }
        let mut index = HashMap::with_capacity(decls.len());
        let mut ids = Vec::with_capacity(decls.len());
        for (i, d) in decls.iter().enumerate() {
            if d.id.is_empty() {
                return Err(Error::InvalidHierarchy(format!(
                    "node #{i} has an empty id"
                )));
            }
            if index.insert(d.id.clone(), i).is_some() {
                return Err(Error::InvalidHierarchy(format!(
                    "duplicate node id `{}`",
                    d.id
                )));
            }
            ids.push(d.id.clone());
        }

        let n = decls.len();
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for (i, d) in decls.iter().enumerate() {
            for c in &d.children {
                let ci = *index.get(c).ok_or_else(|| {
                    Error::InvalidHierarchy(format!("node `{}` lists unknown child `{c}`", d.id))
                })?;
                if ci == i {
                    return Err(Error::InvalidHierarchy(format!(
                        "cycle detected: node `{c}` lists itself as a child"
                    )));
                }
                if let Some(p) = parent[ci] {
                    return Err(Error::InvalidHierarchy(format!(
                        "node `{c}` has two parents (`{}` and `{}`)",
                        ids[p], d.id
                    )));
                }
                parent[ci] = Some(i);
                children[i].push(ci);
            }
        }

        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        if roots.is_empty() {
            let cycle = trace_cycle(&parent, 0, &ids);
            return Err(Error::InvalidHierarchy(format!("cycle detected: {cycle}")));
        }
        if roots.len() > 1 {
            let names: Vec<&str> = roots.iter().map(|&i| ids[i].as_str()).collect();
            return Err(Error::InvalidHierarchy(format!(
                "expected exactly one root, found {}: {}",
                roots.len(),
                names.join(", ")
            )));
        }
        let root = roots[0];

        // Every node has one parent, so anything unreachable from the root sits on a cycle.
        let mut depth = vec![usize::MAX; n];
        let mut stack = vec![(root, 0usize)];
        while let Some((v, d)) = stack.pop() {
            depth[v] = d;
            for &c in &children[v] {
                stack.push((c, d + 1));
            }
        }
        if let Some(orphan) = (0..n).find(|&i| depth[i] == usize::MAX) {
            let cycle = trace_cycle(&parent, orphan, &ids);
            return Err(Error::InvalidHierarchy(format!("cycle detected: {cycle}")));
        }

        for (i, ch) in children.iter().enumerate() {
            if !ch.is_empty() && ch.len() < min_children {
                return Err(Error::InvalidHierarchy(format!(
                    "internal node `{}` has {} child(ren); at least {min_children} required",
                    ids[i],
                    ch.len()
                )));
            }
        }

        Ok(HierarchySpec {
            ids,
            index,
            parent,
            children,
            depth,
            root,
        })
    }

    /// A single-node hierarchy.
    pub fn single(id: impl Into<String>) -> Self {
        HierarchySpec::new(vec![NodeDecl::leaf(id)]).expect("single node is a valid tree")
    }

    /// A balanced tree with `branching[d]` children under every node at depth `d`.
    ///
    /// The root is `H`; the `i`-th node (1-based, left to right) at depth `d` is `H{d}_{i}`.
    /// `balanced(&[2, 3, 3])` gives the 27-node, 18-leaf layout used by the simulations.
    pub fn balanced(branching: &[usize]) -> Result<Self> {
        let name = |d: usize, i: usize| {
            if d == 0 {
                "H".to_string()
            } else {
                format!("H{d}_{}", i + 1)
            }
        };
        let mut decls = Vec::new();
        let mut width = 1;
        for (d, &b) in branching.iter().enumerate() {
            for i in 0..width {
                let kids: Vec<String> = (0..b).map(|c| name(d + 1, i * b + c)).collect();
                decls.push(NodeDecl {
                    id: name(d, i),
                    children: kids,
                });
            }
            width *= b;
        }
        for i in 0..width {
            decls.push(NodeDecl::leaf(name(branching.len(), i)));
        }
        HierarchySpec::with_min_children(decls, 1)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn root(&self) -> &str {
        &self.ids[self.root]
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub(crate) fn idx(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::InvalidHierarchy(format!("unknown node `{id}`")))
    }

    pub fn children(&self, id: &str) -> Result<Vec<&str>> {
        let i = self.idx(id)?;
        Ok(self.children[i]
            .iter()
            .map(|&c| self.ids[c].as_str())
            .collect())
    }

    pub fn parent(&self, id: &str) -> Result<Option<&str>> {
        let i = self.idx(id)?;
        Ok(self.parent[i].map(|p| self.ids[p].as_str()))
    }

    pub fn is_leaf(&self, id: &str) -> Result<bool> {
        Ok(self.children[self.idx(id)?].is_empty())
    }

    /// Distance from the root (root = 0).
    pub fn depth(&self, id: &str) -> Result<usize> {
        Ok(self.depth[self.idx(id)?])
    }

    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn leaves(&self) -> Vec<&str> {
        (0..self.len())
            .filter(|&i| self.children[i].is_empty())
            .map(|i| self.ids[i].as_str())
            .collect()
    }

    pub fn internal_nodes(&self) -> Vec<&str> {
        (0..self.len())
            .filter(|&i| !self.children[i].is_empty())
            .map(|i| self.ids[i].as_str())
            .collect()
    }

    /// Node indices with every child before its parent.
    pub(crate) fn bottom_up(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                order.push(v);
            } else {
                stack.push((v, true));
                for &c in self.children[v].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    pub(crate) fn children_idx(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub(crate) fn id_of(&self, i: usize) -> &str {
        &self.ids[i]
    }

    /// Node declarations in the order they were given.
    pub fn decls(&self) -> Vec<NodeDecl> {
        (0..self.len())
            .map(|i| NodeDecl {
                id: self.ids[i].clone(),
                children: self.children[i]
                    .iter()
                    .map(|&c| self.ids[c].clone())
                    .collect(),
            })
            .collect()
    }
}

fn trace_cycle(parent: &[Option<usize>], start: usize, ids: &[String]) -> String {
    let mut seen = vec![false; parent.len()];
    let mut v = start;
    while !seen[v] {
        seen[v] = true;
        match parent[v] {
            Some(p) => v = p,
            None => return format!("node `{}` is not reachable from the root", ids[start]),
        }
    }
    let mut path = vec![ids[v].as_str()];
    let mut u = parent[v].expect("on cycle");
    while u != v {
        path.push(ids[u].as_str());
        u = parent[u].expect("on cycle");
    }
    path.push(ids[v].as_str());
    path.reverse();
    path.join(" -> ")
}

/// A hierarchy with a functional time series at every node.
///
/// All series have the same length and share one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct HierarchyData {
    spec: HierarchySpec,
    series: Vec<FunctionalTimeSeries>,
}

impl HierarchyData {
    pub fn new(
        spec: HierarchySpec,
        mut series: BTreeMap<String, FunctionalTimeSeries>,
    ) -> Result<Self> {
        let mut ordered = Vec::with_capacity(spec.len());
        for id in spec.ids() {
            let s = series
                .remove(id)
                .ok_or_else(|| Error::IncompleteData(format!("node `{id}` has no series")))?;
            ordered.push(s);
        }
        if let Some(extra) = series.keys().next() {
            return Err(Error::IncompleteData(format!(
                "series given for unknown node `{extra}`"
            )));
        }
        check_shapes(&spec, &ordered)?;
        Ok(HierarchyData {
            spec,
            series: ordered,
        })
    }

    pub fn spec(&self) -> &HierarchySpec {
        &self.spec
    }

    pub fn series(&self, id: &str) -> Result<&FunctionalTimeSeries> {
        Ok(&self.series[self.spec.idx(id)?])
    }

    pub(crate) fn series_at(&self, i: usize) -> &FunctionalTimeSeries {
        &self.series[i]
    }

    /// Series length N.
    pub fn len(&self) -> usize {
        self.series[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn grid(&self) -> &Grid {
        self.series[0].grid()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FunctionalTimeSeries)> {
        self.spec
            .ids()
            .iter()
            .map(String::as_str)
            .zip(self.series.iter())
    }

    /// Applies `a·x + b` to every curve of every node.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        let series = self
            .series
            .iter()
            .map(|s| s.affine(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(HierarchyData {
            spec: self.spec.clone(),
            series,
        })
    }
}

fn check_shapes(spec: &HierarchySpec, series: &[FunctionalTimeSeries]) -> Result<()> {
    let grid = series[0].grid();
    let len = series[0].len();
    for (i, s) in series.iter().enumerate() {
        if s.grid() != grid {
            return Err(Error::ShapeMismatch {
                node: spec.id_of(i).to_string(),
                detail: format!(
                    "grid of {} points differs from `{}` ({} points)",
                    s.grid().len(),
                    spec.id_of(0),
                    grid.len()
                ),
            });
        }
        if s.len() != len {
            return Err(Error::ShapeMismatch {
                node: spec.id_of(i).to_string(),
                detail: format!(
                    "{} observations, but `{}` has {len}",
                    s.len(),
                    spec.id_of(0)
                ),
            });
        }
    }
    Ok(())
}

/// Completes a hierarchy bottom-up from its leaf series.
///
/// Each internal node without an observed series receives the sum of its children's
/// series plus its entry in `errors` (zero when absent). Observed series are kept as is.
pub fn fill_internal_series(
    spec: HierarchySpec,
    mut observed: BTreeMap<String, FunctionalTimeSeries>,
    errors: &BTreeMap<String, FunctionalTimeSeries>,
) -> Result<HierarchyData> {
    for leaf in spec.leaves() {
        if !observed.contains_key(leaf) {
            return Err(Error::IncompleteData(format!(
                "leaf node `{leaf}` has no series"
            )));
        }
    }
    for id in errors.keys() {
        if !spec.contains(id) {
            return Err(Error::IncompleteData(format!(
                "error series given for unknown node `{id}`"
            )));
        }
    }
    for v in spec.bottom_up() {
        let id = spec.id_of(v);
        if observed.contains_key(id) {
            continue;
        }
        let filled = {
            let mut parts: Vec<&FunctionalTimeSeries> = spec
                .children_idx(v)
                .iter()
                .map(|&c| &observed[spec.id_of(c)])
                .collect();
            if let Some(e) = errors.get(id) {
                parts.push(e);
            }
            sum_series(&parts).map_err(|e| Error::ShapeMismatch {
                node: id.to_string(),
                detail: e.to_string(),
            })?
        };
        observed.insert(id.to_string(), filled);
    }
    HierarchyData::new(spec, observed)
}
