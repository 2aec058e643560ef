//! Local invariant checks. Comparisons are written so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::HashSet;

use super::*;
use crate::diag::{codes, Diagnostic, DocPath};

/// Absolute tolerance on the sum of prior frequencies.
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-6;

/// Single-object invariant checks.
///
/// Implementations inspect only the object's own fields, never nested
/// objects (those are checked by their own impls) and never other
/// objects in the document. Each violated invariant yields one
/// diagnostic under a fixed code.
pub trait LocalInvariants {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic>;
}

fn err(out: &mut Vec<Diagnostic>, code: &'static str, path: DocPath, msg: impl Into<String>) {
    out.push(Diagnostic::error(code, path, msg));
}

fn positive(out: &mut Vec<Diagnostic>, instance: u32, path: &DocPath) {
    if instance == 0 {
        err(
            out,
            codes::INSTANCE_NOT_POSITIVE,
            path.join("instance"),
            "instance must be >= 1",
        );
    }
}

impl LocalInvariants for Dataset {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.name.trim().is_empty() {
            err(
                &mut out,
                codes::DATASET_NAME_EMPTY,
                path.join("name"),
                "dataset name is empty",
            );
        }
        for key in self.meter_devices.keys() {
            if key.trim().is_empty() {
                err(
                    &mut out,
                    codes::DEVICE_KEY_EMPTY,
                    path.join("meter_devices"),
                    "meter device key is empty",
                );
            }
        }
        let mut seen = HashSet::new();
        for b in &self.buildings {
            if !seen.insert(b.instance) {
                err(
                    &mut out,
                    codes::BUILDING_DUP_INSTANCE,
                    path.join("buildings").join(b.instance),
                    format!("building instance {} declared more than once", b.instance),
                );
            }
        }
        dup_meters(&mut out, &self.dataset_meters, path);
        out
    }
}

fn dup_meters(out: &mut Vec<Diagnostic>, meters: &[ElecMeter], path: &DocPath) {
    let mut seen = HashSet::new();
    for m in meters {
        if !seen.insert(m.instance) {
            err(
                out,
                codes::METER_DUP_INSTANCE,
                path.join("elec_meters").join(m.instance),
                format!("meter instance {} declared more than once", m.instance),
            );
        }
    }
}

impl LocalInvariants for DateRange {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if let Some(end) = &self.end {
            if self.start.normalized() > end.normalized() {
                err(
                    &mut out,
                    codes::DATE_RANGE_ORDER,
                    path.clone(),
                    format!("start {} is after end {}", self.start, end),
                );
            }
        }
        out
    }
}

impl LocalInvariants for GeoLocation {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if !(-90.0..=90.0).contains(&self.latitude) {
            err(
                &mut out,
                codes::GEO_BOUNDS,
                path.join("latitude"),
                format!("latitude {} outside [-90, 90]", self.latitude),
            );
        }
        if !(-180.0..=180.0).contains(&self.longitude) {
            err(
                &mut out,
                codes::GEO_BOUNDS,
                path.join("longitude"),
                format!("longitude {} outside [-180, 180]", self.longitude),
            );
        }
        out
    }
}

impl LocalInvariants for MeterDevice {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if let Some(p) = self.sample_period {
            if !(p > 0.0) {
                err(
                    &mut out,
                    codes::DEVICE_SAMPLE_PERIOD,
                    path.join("sample_period"),
                    format!("sample_period must be > 0, got {p}"),
                );
            }
        }
        if self.measurements.is_empty() {
            err(
                &mut out,
                codes::DEVICE_NO_MEASUREMENTS,
                path.join("measurements"),
                "device declares no measurements",
            );
        }
        let mut seen = HashSet::new();
        for (i, m) in self.measurements.iter().enumerate() {
            if !seen.insert((m.physical_quantity, m.ac_type)) {
                err(
                    &mut out,
                    codes::DEVICE_DUP_MEASUREMENT,
                    path.join("measurements").join(i),
                    format!(
                        "measurement {}{} listed twice",
                        m.physical_quantity,
                        m.ac_type.map(|a| format!("/{a}")).unwrap_or_default()
                    ),
                );
            }
        }
        out
    }
}

impl LocalInvariants for Measurement {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        match (self.physical_quantity.has_ac_type(), self.ac_type) {
            (true, None) => err(
                &mut out,
                codes::MEASUREMENT_AC_TYPE,
                path.join("ac_type"),
                format!("{} measurements require ac_type", self.physical_quantity),
            ),
            (false, Some(_)) => err(
                &mut out,
                codes::MEASUREMENT_AC_TYPE,
                path.join("ac_type"),
                format!("{} measurements take no ac_type", self.physical_quantity),
            ),
            _ => {}
        }
        if let (Some(lo), Some(hi)) = (self.lower_limit, self.upper_limit) {
            if lo > hi {
                err(
                    &mut out,
                    codes::MEASUREMENT_LIMITS,
                    path.clone(),
                    format!("lower_limit {lo} exceeds upper_limit {hi}"),
                );
            }
        }
        out
    }
}

impl LocalInvariants for Building {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        positive(&mut out, self.instance, path);
        dup_meters(&mut out, &self.elec_meters, path);
        let mut rooms = HashSet::new();
        for (i, r) in self.rooms.iter().enumerate() {
            if !rooms.insert((&r.name, r.instance)) {
                err(
                    &mut out,
                    codes::ROOM_DUP,
                    path.join("rooms").join(i),
                    format!("room {},{} declared more than once", r.name, r.instance),
                );
            }
        }
        out
    }
}

impl LocalInvariants for Room {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        positive(&mut out, self.instance, path);
        out
    }
}

impl LocalInvariants for ElecMeter {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        positive(&mut out, self.instance, path);
        match (self.site_meter, self.submeter_of) {
            (true, Some(_)) => err(
                &mut out,
                codes::METER_ROOT_AND_SUB,
                path.clone(),
                "meter is both a site meter and a submeter",
            ),
            (false, None) => err(
                &mut out,
                codes::WIRING_NO_PARENT_OR_ROOT,
                path.clone(),
                "meter sets neither site_meter nor submeter_of",
            ),
            _ => {}
        }
        if !(1..=3).contains(&self.sensors.len()) {
            err(
                &mut out,
                codes::METER_SENSOR_COUNT,
                path.join("sensors"),
                format!("meter has {} sensors, expected 1 to 3", self.sensors.len()),
            );
        }
        if self.upstream_meter_in_building.is_some() && self.submeter_of.is_none() {
            err(
                &mut out,
                codes::METER_UPSTREAM_WITHOUT_SUB,
                path.join("upstream_meter_in_building"),
                "upstream_meter_in_building requires submeter_of",
            );
        }
        if let Some(dom) = &self.dominant_appliance {
            if !self.appliances.iter().any(|a| a.reference() == *dom) {
                err(
                    &mut out,
                    codes::METER_BAD_DOMINANT,
                    path.join("dominant_appliance"),
                    format!(
                        "dominant appliance {},{} is not on this meter",
                        dom.type_name, dom.instance
                    ),
                );
            }
        }
        let mut seen = HashSet::new();
        for (i, a) in self.appliances.iter().enumerate() {
            if !seen.insert(a.reference()) {
                err(
                    &mut out,
                    codes::APPLIANCE_DUP,
                    path.join("appliances").join(i),
                    format!("appliance {},{} listed twice", a.type_name, a.instance),
                );
            }
        }
        out
    }
}

impl LocalInvariants for Sensor {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.data_location.trim().is_empty() {
            err(
                &mut out,
                codes::SENSOR_NO_LOCATION,
                path.join("data_location"),
                "sensor data_location is empty",
            );
        }
        out
    }
}

impl LocalInvariants for PreprocessingStep {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.filter.trim().is_empty() {
            err(
                &mut out,
                codes::PREPROCESSING_NO_FILTER,
                path.join("filter"),
                "preprocessing step has no filter",
            );
        }
        out
    }
}

impl LocalInvariants for Appliance {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        positive(&mut out, self.instance, path);
        if self.count.is_some() && self.multiple.is_some() {
            err(
                &mut out,
                codes::COUNT_AND_MULTIPLE,
                path.clone(),
                "count and multiple are mutually exclusive",
            );
        }
        if self.count == Some(0) {
            err(
                &mut out,
                codes::COUNT_NOT_POSITIVE,
                path.join("count"),
                "count must be >= 1",
            );
        }
        if let Some(t) = self.on_power_threshold {
            if t < 0.0 {
                err(
                    &mut out,
                    codes::NEGATIVE_THRESHOLD,
                    path.join("on_power_threshold"),
                    format!("on_power_threshold must be >= 0, got {t}"),
                );
            }
        }
        out
    }
}

impl LocalInvariants for ApplianceType {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for s in &self.subtypes {
            if !seen.insert(s) {
                err(
                    &mut out,
                    codes::SUBTYPE_DUP,
                    path.join("subtypes"),
                    format!("subtype `{s}` listed twice"),
                );
            }
        }
        out
    }
}

impl LocalInvariants for Categories {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (field, terms) in [
            ("electrical", &self.electrical),
            ("google_shopping", &self.google_shopping),
        ] {
            let mut seen = HashSet::new();
            for t in terms {
                if !seen.insert(t) {
                    err(
                        &mut out,
                        codes::CATEGORY_DUP,
                        path.join(field),
                        format!("category `{t}` listed twice"),
                    );
                }
            }
        }
        out
    }
}

impl LocalInvariants for Prior {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.distribution_of_data.is_none() && self.model.is_none() {
            err(
                &mut out,
                codes::PRIOR_EMPTY,
                path.clone(),
                "prior needs distribution_of_data or model",
            );
        }
        out
    }
}

impl LocalInvariants for DistributionData {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let freqs = self.frequencies();
        let freq_path = path.join("frequencies");
        let expected = match self {
            DistributionData::Continuous { bin_edges, .. } => {
                if bin_edges.windows(2).any(|w| !(w[0] < w[1])) {
                    err(
                        &mut out,
                        codes::PRIOR_BIN_EDGES,
                        path.join("bin_edges"),
                        "bin_edges must be strictly increasing",
                    );
                }
                bin_edges.len().saturating_sub(1)
            }
            DistributionData::Categorical { categories, .. } => categories.len(),
        };
        if freqs.len() != expected {
            err(
                &mut out,
                codes::PRIOR_SHAPE,
                freq_path.clone(),
                format!("expected {expected} frequencies, found {}", freqs.len()),
            );
        }
        if freqs.iter().any(|f| !(*f >= 0.0)) {
            err(
                &mut out,
                codes::PRIOR_NEGATIVE,
                freq_path.clone(),
                "frequencies must be non-negative",
            );
        }
        let sum: f64 = freqs.iter().sum();
        if !((sum - 1.0).abs() <= PRIOR_SUM_TOLERANCE) {
            err(
                &mut out,
                codes::PRIOR_NOT_NORMALIZED,
                freq_path,
                format!("frequencies sum to {sum}, expected 1"),
            );
        }
        out
    }
}

impl LocalInvariants for ModelSpec {
    fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.distribution_name.trim().is_empty() {
            err(
                &mut out,
                codes::MODELSPEC_NO_NAME,
                path.join("distribution_name"),
                "model distribution_name is empty",
            );
        }
        out
    }
}

/// Runs every local check over an appliance and its components.
pub(crate) fn appliance_tree(a: &Appliance, path: &DocPath, out: &mut Vec<Diagnostic>) {
    out.extend(a.check_local_invariants(path));
    for (i, r) in a.dates_active.iter().enumerate() {
        out.extend(r.check_local_invariants(&path.join("dates_active").join(i)));
    }
    for (i, c) in a.components.iter().enumerate() {
        appliance_tree(c, &path.join("components").join(i), out);
    }
}

pub(crate) fn meter_tree(m: &ElecMeter, path: &DocPath, out: &mut Vec<Diagnostic>) {
    out.extend(m.check_local_invariants(path));
    for (i, s) in m.sensors.iter().enumerate() {
        out.extend(s.check_local_invariants(&path.join("sensors").join(i)));
    }
    for (i, p) in m.preprocessing.iter().enumerate() {
        out.extend(p.check_local_invariants(&path.join("preprocessing").join(i)));
    }
    for (i, a) in m.appliances.iter().enumerate() {
        appliance_tree(a, &path.join("appliances").join(i), out);
    }
}

/// Local checks for everything owned by the dataset outside its buildings.
pub fn dataset_scope_tree(d: &Dataset) -> Vec<Diagnostic> {
    let root = DocPath::root();
    let mut out = d.check_local_invariants(&root);
    if let Some(r) = &d.temporal_coverage {
        out.extend(r.check_local_invariants(&root.join("temporal_coverage")));
    }
    if let Some(g) = &d.geo_location {
        out.extend(g.check_local_invariants(&root.join("geo_location")));
    }
    for (key, dev) in &d.meter_devices {
        let p = root.join("meter_devices").join(key);
        out.extend(dev.check_local_invariants(&p));
        for (i, m) in dev.measurements.iter().enumerate() {
            out.extend(m.check_local_invariants(&p.join("measurements").join(i)));
        }
    }
    for m in &d.dataset_meters {
        meter_tree(m, &meter_path(None, m.instance), &mut out);
    }
    out
}

/// Local checks for one building and everything it contains.
pub fn building_tree(b: &Building) -> Vec<Diagnostic> {
    let path = building_path(b.instance);
    let mut out = b.check_local_invariants(&path);
    if let Some(r) = &b.temporal_coverage {
        out.extend(r.check_local_invariants(&path.join("temporal_coverage")));
    }
    if let Some(g) = &b.geo_location {
        out.extend(g.check_local_invariants(&path.join("geo_location")));
    }
    for (i, r) in b.rooms.iter().enumerate() {
        out.extend(r.check_local_invariants(&path.join("rooms").join(i)));
    }
    for m in &b.elec_meters {
        meter_tree(m, &meter_path(Some(b.instance), m.instance), &mut out);
    }
    out
}

/// Local checks for a type-library entry and its priors.
pub fn appliance_type_tree(t: &ApplianceType, path: &DocPath) -> Vec<Diagnostic> {
    let mut out = t.check_local_invariants(path);
    out.extend(
        t.categories
            .check_local_invariants(&path.join("categories")),
    );
    for (i, c) in t.components.iter().enumerate() {
        appliance_tree(c, &path.join("components").join(i), &mut out);
    }
    for (name, priors) in &t.distributions {
        for (i, p) in priors.iter().enumerate() {
            out.extend(prior_tree(p, &prior_path(path, *name, i)));
        }
    }
    out
}

pub fn prior_tree(p: &Prior, path: &DocPath) -> Vec<Diagnostic> {
    let mut out = p.check_local_invariants(path);
    if let Some(d) = &p.distribution_of_data {
        out.extend(d.check_local_invariants(&path.join("distribution_of_data")));
    }
    if let Some(m) = &p.model {
        out.extend(m.check_local_invariants(&path.join("model")));
    }
    out
}

pub fn building_path(instance: u32) -> DocPath {
    DocPath::root().join("buildings").join(instance)
}

pub fn meter_path(building: Option<u32>, meter: u32) -> DocPath {
    match building {
        Some(b) => building_path(b),
        None => DocPath::root(),
    }
    .join("elec_meters")
    .join(meter)
}

pub fn prior_path(type_path: &DocPath, name: DistributionName, index: usize) -> DocPath {
    type_path.join("distributions").join(name).join(index)
}
