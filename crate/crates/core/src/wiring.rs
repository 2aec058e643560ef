//! The mains-wiring forest over all meters of a dataset.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diag::{codes, Diagnostic, DocPath};
use crate::model::{building_path, meter_path, Dataset, ElecMeter};

/// Default depth, in meters from root to leaf, above which a tree is
/// reported as suspiciously deep.
pub const DEFAULT_DEPTH_LIMIT: usize = 6;

/// Meter identity: building instance (none for dataset-level meters) and
/// meter instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MeterRef {
    pub building: Option<u32>,
    pub meter: u32,
}

impl MeterRef {
    pub fn new(building: Option<u32>, meter: u32) -> Self {
        Self { building, meter }
    }

    pub fn path(&self) -> DocPath {
        meter_path(self.building, self.meter)
    }
}

impl fmt::Display for MeterRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.building {
            Some(b) => write!(f, "building{b}/meter{}", self.meter),
            None => write!(f, "dataset/meter{}", self.meter),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WiringError {
    #[error("no meter {0}")]
    RefNotFound(MeterRef),
}

impl WiringError {
    pub fn code(&self) -> &'static str {
        codes::REF_NOT_FOUND
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WiringForest {
    pub nodes: BTreeSet<MeterRef>,
    /// Child to parent.
    pub edges: BTreeMap<MeterRef, MeterRef>,
    /// Site meters.
    pub roots: BTreeSet<MeterRef>,
    children: BTreeMap<MeterRef, BTreeSet<MeterRef>>,
    labels: BTreeMap<MeterRef, String>,
}

impl WiringForest {
    fn check(&self, r: MeterRef) -> Result<(), WiringError> {
        if self.nodes.contains(&r) {
            Ok(())
        } else {
            Err(WiringError::RefNotFound(r))
        }
    }

    /// Direct children of `r`.
    pub fn submeters_of(&self, r: MeterRef) -> Result<BTreeSet<MeterRef>, WiringError> {
        self.check(r)?;
        Ok(self.children.get(&r).cloned().unwrap_or_default())
    }

    /// The parent of `r`, none for roots and unattached meters.
    pub fn upstream_of(&self, r: MeterRef) -> Result<Option<MeterRef>, WiringError> {
        self.check(r)?;
        Ok(self.edges.get(&r).copied())
    }

    /// The root reached by following parents, if any.
    pub fn root_of(&self, r: MeterRef) -> Result<Option<MeterRef>, WiringError> {
        self.check(r)?;
        let mut cur = r;
        while let Some(&p) = self.edges.get(&cur) {
            cur = p;
        }
        Ok(self.roots.contains(&cur).then_some(cur))
    }

    /// Meters at the top of each tree: roots, then meters left without a
    /// parent by wiring errors.
    fn tops(&self) -> Vec<(MeterRef, bool)> {
        let mut out: Vec<_> = self.roots.iter().map(|r| (*r, true)).collect();
        out.extend(
            self.nodes
                .iter()
                .filter(|n| !self.roots.contains(n) && !self.edges.contains_key(n))
                .map(|n| (*n, false)),
        );
        out
    }

    /// One line per meter, two spaces of indent per level. Root lines
    /// start with `*`; meters cut off by wiring errors start with `?`.
    pub fn render_tree(&self) -> String {
        let mut out = String::new();
        for (top, is_root) in self.tops() {
            let mut stack = vec![(top, 0usize)];
            while let Some((n, depth)) = stack.pop() {
                out.push_str(&"  ".repeat(depth));
                if depth == 0 {
                    out.push_str(if is_root { "* " } else { "? " });
                }
                out.push_str(&n.to_string());
                if let Some(label) = self.labels.get(&n) {
                    out.push_str(&format!(" ({label})"));
                }
                out.push('\n');
                if let Some(kids) = self.children.get(&n) {
                    stack.extend(kids.iter().rev().map(|k| (*k, depth + 1)));
                }
            }
        }
        out
    }

    /// Depth in meters of every node reachable from a root.
    fn depths(&self) -> BTreeMap<MeterRef, usize> {
        let mut out = BTreeMap::new();
        let mut queue: VecDeque<(MeterRef, usize)> = self.roots.iter().map(|r| (*r, 1)).collect();
        while let Some((n, d)) = queue.pop_front() {
            out.insert(n, d);
            for k in self.children.get(&n).into_iter().flatten() {
                queue.push_back((*k, d + 1));
            }
        }
        out
    }
}

fn all_meters(dataset: &Dataset) -> impl Iterator<Item = (MeterRef, &ElecMeter)> {
    dataset
        .buildings
        .iter()
        .flat_map(|b| {
            b.elec_meters
                .iter()
                .map(move |m| (MeterRef::new(Some(b.instance), m.instance), m))
        })
        .chain(
            dataset
                .dataset_meters
                .iter()
                .map(|m| (MeterRef::new(None, m.instance), m)),
        )
}

/// Builds the forest. Problems are reported and the offending edge left
/// out, so the result is always a forest.
pub fn build_wiring_forest(dataset: &Dataset) -> (WiringForest, Vec<Diagnostic>) {
    let mut forest = WiringForest::default();
    let mut diags = Vec::new();
    let mut meters = Vec::new();
    for (r, m) in all_meters(dataset) {
        if forest.nodes.insert(r) {
            meters.push((r, m));
            if let Some(d) = &m.dominant_appliance {
                forest.labels.insert(r, d.type_name.clone());
            }
        }
    }

    let mut proposed = Vec::new();
    for &(r, m) in &meters {
        let path = r.path();
        if m.site_meter {
            forest.roots.insert(r);
            continue;
        }
        let Some(upstream) = m.submeter_of else {
            diags.push(Diagnostic::error(
                codes::WIRING_NO_PARENT_OR_ROOT,
                path,
                "meter is neither a site meter nor a submeter",
            ));
            continue;
        };
        let building = match m.upstream_meter_in_building {
            Some(b) if dataset.building(b).is_none() => {
                diags.push(Diagnostic::error(
                    codes::WIRING_BAD_BUILDING,
                    path.join("upstream_meter_in_building"),
                    format!("building {b} does not exist"),
                ));
                continue;
            }
            Some(b) => Some(b),
            None => r.building,
        };
        let parent = MeterRef::new(building, upstream);
        if !forest.nodes.contains(&parent) {
            diags.push(Diagnostic::error(
                codes::WIRING_DANGLING,
                path.join("submeter_of"),
                format!("upstream meter {parent} does not exist"),
            ));
            continue;
        }
        proposed.push((r, parent));
    }

    for (child, parent) in proposed {
        let mut cur = Some(parent);
        let mut closes = false;
        while let Some(c) = cur {
            if c == child {
                closes = true;
                break;
            }
            cur = forest.edges.get(&c).copied();
        }
        if closes {
            diags.push(Diagnostic::error(
                codes::WIRING_CYCLE,
                child.path().join("submeter_of"),
                format!("{child} being downstream of {parent} closes a cycle"),
            ));
            continue;
        }
        forest.edges.insert(child, parent);
        forest.children.entry(parent).or_default().insert(child);
    }
    (forest, diags)
}

/// Forest diagnostics plus coverage warnings: buildings with meters but
/// no site meter, and trees deeper than `depth_limit` meters.
pub fn validate_wiring(dataset: &Dataset, depth_limit: usize) -> (WiringForest, Vec<Diagnostic>) {
    let (forest, mut diags) = build_wiring_forest(dataset);
    for b in &dataset.buildings {
        if !b.elec_meters.is_empty() && !b.elec_meters.iter().any(|m| m.site_meter) {
            diags.push(Diagnostic::warning(
                codes::NO_SITE_METER,
                building_path(b.instance).join("elec_meters"),
                format!("building {} has meters but no site meter", b.instance),
            ));
        }
    }
    let depths = forest.depths();
    let mut warned = BTreeSet::new();
    for (n, d) in &depths {
        if *d > depth_limit {
            let root = forest
                .root_of(*n)
                .ok()
                .flatten()
                .expect("reachable from a root");
            if warned.insert(root) {
                diags.push(Diagnostic::warning(
                    codes::DEEP_TREE,
                    n.path(),
                    format!("wiring tree under {root} is more than {depth_limit} meters deep"),
                ));
            }
        }
    }
    (forest, diags)
}
