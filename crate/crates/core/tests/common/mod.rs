//! Helpers shared by the integration tests: fixture access, independent
//! reference implementations, and seeded generators.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nilm_meta::loader::{load_dataset_path, Node};
use nilm_meta::model::{Building, Dataset, ElecMeter, Sensor};
use nilm_meta::typedb::TypeLibrary;
use nilm_meta::validate::{validate_raw, ValidateOptions};
use nilm_meta::ValidationReport;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Map, Value};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/uk-dale/metadata")
}

/// Copies the fixture to a scratch folder so a test can edit it.
pub fn fixture_copy() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(fixture_dir()).unwrap() {
        let path = entry.unwrap().path();
        std::fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
    }
    dir
}

pub fn validate_dir(dir: &Path, library: &TypeLibrary) -> (Dataset, ValidationReport) {
    let raw = load_dataset_path(dir).unwrap();
    validate_raw(&raw, library, &ValidateOptions::default())
}

/// `(code, path)` of every error in the report.
pub fn errors(report: &ValidationReport) -> Vec<(String, String)> {
    report
        .diagnostics
        .iter()
        .filter(|d| d.is_error())
        .map(|d| (d.code.to_owned(), d.path.to_string()))
        .collect()
}

// ---------------------------------------------------------------------------
// Reference merger over serde_json values, written separately from the
// library's node merger.

#[derive(Debug, PartialEq, Eq)]
pub struct KindConflict;

fn kind(v: &Value) -> u8 {
    match v {
        Value::Array(_) => 1,
        Value::Object(_) => 2,
        _ => 0,
    }
}

fn dedup_concat(p: &[Value], c: &[Value]) -> Vec<Value> {
    let all: Vec<&Value> = p.iter().chain(c).collect();
    all.iter()
        .enumerate()
        .filter(|(i, v)| all.iter().position(|w| w == *v) == Some(*i))
        .map(|(_, v)| (*v).clone())
        .collect()
}

fn merge_value(p: &Value, c: &Value) -> Result<Value, KindConflict> {
    if kind(p) != kind(c) {
        return Err(KindConflict);
    }
    match (p, c) {
        (Value::Array(a), Value::Array(b)) => Ok(Value::Array(dedup_concat(a, b))),
        (Value::Object(a), Value::Object(b)) => reference_merge(a, b, &[]).map(Value::Object),
        _ => Ok(c.clone()),
    }
}

pub fn reference_merge(
    p: &Map<String, Value>,
    c: &Map<String, Value>,
    skip: &[String],
) -> Result<Map<String, Value>, KindConflict> {
    let mut keys: Vec<&String> = p.keys().chain(c.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut out = Map::new();
    for k in keys {
        let skipped = skip.contains(k);
        let v = match (p.get(k), c.get(k)) {
            (_, Some(cv)) if skipped => cv.clone(),
            (Some(_), None) if skipped => continue,
            (Some(pv), None) => pv.clone(),
            (None, Some(cv)) => cv.clone(),
            (Some(pv), Some(cv)) => merge_value(pv, cv)?,
            (None, None) => unreachable!(),
        };
        out.insert(k.clone(), v);
    }
    Ok(out)
}

/// Resolution by folding the reference merger from the root down.
pub fn reference_resolve(library: &TypeLibrary, name: &str) -> Result<Value, KindConflict> {
    let mut chain = vec![name.to_owned()];
    chain.extend(library.ancestry(name).unwrap());
    let mut acc = Map::new();
    for t in chain.iter().rev() {
        let raw = library.raw(t).unwrap().to_json();
        let own = raw.as_object().unwrap();
        let skip: Vec<String> = own
            .get("do_not_inherit")
            .and_then(Value::as_array)
            .map(|a| {
                a.iter()
                    .filter_map(|v| v.as_str().map(str::to_owned))
                    .collect()
            })
            .unwrap_or_default();
        acc = reference_merge(&acc, own, &skip)?;
        acc.remove("parent");
        acc.remove("do_not_inherit");
    }
    Ok(Value::Object(acc))
}

// ---------------------------------------------------------------------------
// Random mapping pairs.

const KEYS: &[&str] = &["a", "b", "c", "d", "e", "f"];

fn scalar(rng: &mut impl Rng) -> Value {
    match rng.gen_range(0..4) {
        0 => Value::Null,
        1 => json!(rng.gen_bool(0.5)),
        2 => json!(rng.gen_range(-3..4)),
        _ => json!(["x", "y", "z"][rng.gen_range(0..3)]),
    }
}

fn value_of_kind(rng: &mut impl Rng, k: u8, depth: usize) -> Value {
    match k {
        1 => Value::Array(
            (0..rng.gen_range(0..=5))
                .map(|_| random_value(rng, depth - 1))
                .collect(),
        ),
        2 => Value::Object(random_map(rng, depth - 1)),
        _ => scalar(rng),
    }
}

fn random_value(rng: &mut impl Rng, depth: usize) -> Value {
    let k = if depth <= 1 { 0 } else { rng.gen_range(0..3) };
    value_of_kind(rng, k, depth)
}

/// A mapping of at most `depth` levels and at most five entries per level.
pub fn random_map(rng: &mut impl Rng, depth: usize) -> Map<String, Value> {
    (0..rng.gen_range(0..=5))
        .map(|_| {
            (
                KEYS[rng.gen_range(0..KEYS.len())].to_owned(),
                random_value(rng, depth),
            )
        })
        .collect()
}

/// A child for `parent`: shared keys usually keep the parent's kind so
/// most pairs merge, and sometimes do not so conflicts are covered too.
pub fn random_child(
    rng: &mut impl Rng,
    parent: &Map<String, Value>,
    depth: usize,
    conflict_rate: f64,
) -> Map<String, Value> {
    let mut out = Map::new();
    for _ in 0..rng.gen_range(0..=5) {
        let key = KEYS[rng.gen_range(0..KEYS.len())];
        let v = match parent.get(key) {
            Some(Value::Object(inner)) if depth > 1 && !rng.gen_bool(conflict_rate) => {
                Value::Object(random_child(rng, inner, depth - 1, conflict_rate))
            }
            Some(pv) if depth > 1 && !rng.gen_bool(conflict_rate) => {
                value_of_kind(rng, kind(pv), depth)
            }
            Some(_) if !rng.gen_bool(conflict_rate) => scalar(rng),
            _ => random_value(rng, depth),
        };
        out.insert(key.to_owned(), v);
    }
    out
}

pub fn to_node(m: &Map<String, Value>) -> Node {
    Node::from_json(&Value::Object(m.clone()))
}

// ---------------------------------------------------------------------------
// Random wiring forests.

pub fn meter(instance: u32, device: &str) -> ElecMeter {
    ElecMeter {
        instance,
        device_model: device.to_owned(),
        sensors: vec![Sensor {
            data_location: format!("m{instance}.dat"),
            ..Default::default()
        }],
        ..Default::default()
    }
}

/// A dataset whose meters form a valid forest over up to three buildings,
/// with cross-building edges. Meter instances are shuffled within each
/// building so numbering does not follow tree order.
pub fn random_forest(rng: &mut impl Rng, max_meters: usize) -> Dataset {
    let n_buildings = rng.gen_range(1..=3u32);
    let total = rng.gen_range(2..=max_meters);
    let mut counts = vec![0u32; n_buildings as usize];
    let mut homes = Vec::with_capacity(total);
    for _ in 0..total {
        let b = rng.gen_range(0..n_buildings as usize);
        counts[b] += 1;
        homes.push(b);
    }
    let mut numbers: Vec<Vec<u32>> = counts.iter().map(|&c| (1..=c).collect()).collect();
    for list in &mut numbers {
        list.shuffle(rng);
    }
    let mut buildings: Vec<Building> = (1..=n_buildings)
        .map(|instance| Building {
            instance,
            ..Default::default()
        })
        .collect();
    let mut created: Vec<(usize, u32)> = Vec::new();
    for (i, b) in homes.into_iter().enumerate() {
        let instance = numbers[b].pop().unwrap();
        let mut m = meter(instance, "D");
        if i == 0 || rng.gen_bool(0.15) {
            m.site_meter = true;
        } else {
            let (pb, pm) = created[rng.gen_range(0..created.len())];
            m.submeter_of = Some(pm);
            if pb != b {
                m.upstream_meter_in_building = Some(pb as u32 + 1);
            }
        }
        buildings[b].elec_meters.push(m);
        created.push((b, instance));
    }
    Dataset {
        name: "generated".into(),
        buildings,
        ..Default::default()
    }
}

pub fn shuffled(rng: &mut impl Rng, d: &Dataset) -> Dataset {
    let mut out = d.clone();
    out.buildings.shuffle(rng);
    for b in &mut out.buildings {
        b.elec_meters.shuffle(rng);
    }
    out
}

// ---------------------------------------------------------------------------
// Random complete datasets, as documents.

const APPLIANCES: &[&str] = &[
    "fridge",
    "wine cooler",
    "cooker",
    "washing machine",
    "television",
    "radio",
    "computer",
];

fn appliance_doc(rng: &mut impl Rng, instance: u32) -> Value {
    let t = APPLIANCES[rng.gen_range(0..APPLIANCES.len())];
    let mut a = json!({"type": t, "instance": instance});
    if rng.gen_bool(0.3) {
        a["on_power_threshold"] = json!(rng.gen_range(1..50) as f64 / 2.0);
    }
    if rng.gen_bool(0.2) {
        a["dates_active"] = json!([{"start": 2012, "end": "2013-06-30"}]);
    }
    if t == "television" && rng.gen_bool(0.5) {
        a["screen_size"] = json!(rng.gen_range(19..60));
    }
    if t == "radio" && rng.gen_bool(0.5) {
        a["subtype"] = json!("digital");
    }
    if rng.gen_bool(0.2) {
        a["room"] = json!({"name": "kitchen", "instance": 1});
    }
    a
}

/// A dataset document plus building documents: `buildings` buildings,
/// each a site meter with `meters_per_building - 1` submeters in a
/// shallow tree.
pub fn random_dataset_docs(
    rng: &mut impl Rng,
    buildings: u32,
    meters_per_building: u32,
) -> (Value, BTreeMap<u32, Value>) {
    let dataset = json!({
        "name": format!("GEN-{}", rng.gen_range(0..10_000)),
        "long_name": "Generated dataset",
        "timezone": "Europe/London",
        "publication_date": 2014,
        "geo_location": {"latitude": 51.5, "longitude": -0.1, "locality": "London", "country": "GB"},
        "meter_devices": {
            "EnviR": {
                "model": "EnviR",
                "manufacturer": "Current Cost",
                "sample_period": 6,
                "measurements": [{"physical_quantity": "power", "ac_type": "apparent", "lower_limit": 0, "upper_limit": 30000}]
            },
            "EDF": {
                "model": "EDF",
                "measurements": [
                    {"physical_quantity": "power", "ac_type": "active"},
                    {"physical_quantity": "voltage"}
                ]
            }
        }
    });
    let mut docs = BTreeMap::new();
    for b in 1..=buildings {
        let mut meters = Vec::new();
        for m in 1..=meters_per_building {
            let mut meter = json!({
                "instance": m,
                "device_model": if m == 1 || rng.gen_bool(0.5) { "EnviR" } else { "EDF" },
                "sensors": [{"data_location": format!("house{b}/channel_{m}.dat")}],
            });
            if m == 1 {
                meter["site_meter"] = json!(true);
            } else {
                meter["submeter_of"] = json!(rng.gen_range(1..m.min(4)));
                let apps: Vec<Value> = (1..=rng.gen_range(0..3))
                    .map(|i| appliance_doc(rng, i))
                    .collect();
                if !apps.is_empty() {
                    meter["appliances"] = json!(apps);
                }
                if rng.gen_bool(0.2) {
                    meter["preprocessing"] = json!([{"filter": "clip", "maximum": 4000}]);
                }
            }
            meters.push(meter);
        }
        docs.insert(
            b,
            json!({
                "instance": b,
                "rooms": [{"name": "kitchen", "instance": 1}, {"name": "lounge", "instance": 1}],
                "elec_meters": meters,
            }),
        );
    }
    (dataset, docs)
}

/// Writes generated documents as a metadata folder, alternating JSON and
/// YAML-compatible JSON files.
pub fn write_dataset_dir(dir: &Path, dataset: &Value, buildings: &BTreeMap<u32, Value>) {
    std::fs::write(
        dir.join("dataset.yaml"),
        serde_json::to_string_pretty(dataset).unwrap(),
    )
    .unwrap();
    for (i, doc) in buildings {
        let ext = if i % 2 == 0 { "json" } else { "yaml" };
        std::fs::write(
            dir.join(format!("building{i}.{ext}")),
            serde_json::to_string_pretty(doc).unwrap(),
        )
        .unwrap();
    }
}
