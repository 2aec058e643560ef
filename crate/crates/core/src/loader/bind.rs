//! Binding of parsed node trees to the domain types.
//!
//! Binding never stops at the first problem: every finding becomes a
//! diagnostic and a best-effort value is still produced.

use indexmap::IndexMap;

use super::fields::{boolean, date, int, parsed, real, seq_of, string, uint, Fields, Sink};
use super::folder::RawDatasetFolder;
use super::node::{Node, Value};
use crate::diag::{codes, Diagnostic, DocPath};
use crate::model::*;
use crate::validate::SchemaFragment;

/// Binds a loaded folder to a [`Dataset`].
///
/// Unknown fields inside appliances are kept in `extras`; elsewhere they
/// produce warnings. Buildings inherit `timezone`, `geo_location` and
/// `temporal_coverage` from the dataset when they do not set them.
pub fn bind(raw: &RawDatasetFolder) -> (Dataset, Vec<Diagnostic>) {
    let mut sink = Sink {
        diags: raw.diagnostics.clone(),
    };
    let mut dataset = Dataset::default();
    let root = DocPath::root();
    if let Some(mut f) = Fields::new(&mut sink, &raw.dataset_doc, root.clone()) {
        dataset.name = f.req(&mut sink, "name", string).unwrap_or_default();
        dataset.long_name = f
            .opt(&mut sink, "long_name", string)
            .map(|s| s.trim_end().to_string());
        dataset.publication_date = f.opt(&mut sink, "publication_date", date);
        dataset.rights_list = f.strings(&mut sink, "rights_list");
        dataset.geospatial_coverage = f.opt(&mut sink, "geospatial_coverage", string);
        dataset.temporal_coverage = f.opt(&mut sink, "temporal_coverage", date_range);
        dataset.funding = f.strings(&mut sink, "funding");
        dataset.creators = f.strings(&mut sink, "creators");
        dataset.related_documents = f.strings(&mut sink, "related_documents");
        dataset.timezone = f.opt(&mut sink, "timezone", string);
        dataset.geo_location = f.opt(&mut sink, "geo_location", geo_location);
        if let Some(n) = f.raw("meter_devices") {
            dataset.meter_devices = meter_devices(&mut sink, n, &root.join("meter_devices"));
        }
        if let Some(n) = f.raw("buildings") {
            let p = root.join("buildings");
            for (i, b) in n.as_seq().unwrap_or_default().iter().enumerate() {
                if let Some(b) = building(&mut sink, b, &p, BuildingId::Inline(i)) {
                    dataset.buildings.push(b);
                }
            }
            if n.as_seq().is_none() {
                sink.mismatch(&p, n, "sequence");
            }
        }
        dataset.dataset_meters = meters(&mut sink, &mut f, &root);
        f.finish(&mut sink);
    }

    for (index, doc) in &raw.building_docs {
        if let Some(b) = building(
            &mut sink,
            doc,
            &root.join("buildings"),
            BuildingId::File(*index),
        ) {
            dataset.buildings.push(b);
        }
    }

    for b in &mut dataset.buildings {
        if b.timezone.is_none() {
            b.timezone.clone_from(&dataset.timezone);
        }
        if b.geo_location.is_none() {
            b.geo_location.clone_from(&dataset.geo_location);
        }
        if b.temporal_coverage.is_none() {
            b.temporal_coverage.clone_from(&dataset.temporal_coverage);
        }
    }
    (dataset, sink.diags)
}

enum BuildingId {
    File(u32),
    Inline(usize),
}

fn building(sink: &mut Sink, node: &Node, parent: &DocPath, id: BuildingId) -> Option<Building> {
    // Identity comes from the file name when there is one; the path uses it
    // before the inner `instance` is read.
    let (path, file_index) = match id {
        BuildingId::File(i) => (parent.join(i), Some(i)),
        BuildingId::Inline(pos) => {
            let inst = node.get("instance").and_then(Node::as_i64);
            (
                parent.join(inst.map_or(format!("[{pos}]"), |i| i.to_string())),
                None,
            )
        }
    };
    let mut f = Fields::new(sink, node, path.clone())?;
    let inner = f.opt(sink, "instance", uint);
    let instance = match (file_index, inner) {
        (Some(idx), Some(inner)) if idx != inner => {
            sink.error(
                codes::BUILDING_INDEX_MISMATCH,
                path.join("instance"),
                node.get("instance").unwrap_or(node),
                format!("file is building{idx} but instance is {inner}"),
            );
            idx
        }
        (Some(idx), _) => idx,
        (None, Some(inner)) => inner,
        (None, None) => {
            if node.get("instance").is_none() {
                f.missing(sink, "instance");
            }
            0
        }
    };
    let mut b = Building {
        instance,
        ..Default::default()
    };
    b.rooms = f.list(sink, "rooms", room);
    b.timezone = f.opt(sink, "timezone", string);
    b.geo_location = f.opt(sink, "geo_location", geo_location);
    b.temporal_coverage = f.opt(sink, "temporal_coverage", date_range);
    if let Some(n) = f.raw("meter_devices") {
        sink.error(
            codes::BUILDING_METER_DEVICES,
            path.join("meter_devices"),
            n,
            "meter devices belong in the dataset document, not a building",
        );
    }
    b.elec_meters = meters(sink, &mut f, &path);
    f.finish(sink);
    Some(b)
}

fn meters(sink: &mut Sink, f: &mut Fields<'_>, owner: &DocPath) -> Vec<ElecMeter> {
    let Some(n) = f.raw("elec_meters") else {
        return Vec::new();
    };
    let p = owner.join("elec_meters");
    let Some(items) = n.as_seq() else {
        sink.mismatch(&p, n, "sequence");
        return Vec::new();
    };
    items
        .iter()
        .enumerate()
        .filter_map(|(pos, m)| elec_meter(sink, m, &p, pos))
        .collect()
}

fn elec_meter(sink: &mut Sink, node: &Node, parent: &DocPath, pos: usize) -> Option<ElecMeter> {
    let inst = node.get("instance").and_then(Node::as_i64);
    let path = parent.join(inst.map_or(format!("[{pos}]"), |i| i.to_string()));
    let mut f = Fields::new(sink, node, path)?;
    let mut m = ElecMeter {
        instance: f.req(sink, "instance", uint).unwrap_or(0),
        device_model: f.req(sink, "device_model", string).unwrap_or_default(),
        site_meter: f.opt(sink, "site_meter", boolean).unwrap_or(false),
        submeter_of: f.opt(sink, "submeter_of", uint),
        upstream_meter_in_building: f.opt(sink, "upstream_meter_in_building", uint),
        ..Default::default()
    };
    m.sensors = f.list(sink, "sensors", sensor);
    m.appliances = f.list(sink, "appliances", appliance);
    m.dominant_appliance = f.opt(sink, "dominant_appliance", appliance_ref);
    m.preprocessing = f.list(sink, "preprocessing", preprocessing_step);
    f.finish(sink);
    Some(m)
}

fn sensor(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<Sensor> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let data_location = f.req(sink, "data_location", string).unwrap_or_default();
    let annotations = match f.raw("annotations") {
        Some(n) => match n.as_map() {
            Some(m) => m.clone(),
            None => {
                sink.mismatch(&path.join("annotations"), n, "mapping");
                IndexMap::new()
            }
        },
        None => IndexMap::new(),
    };
    f.finish(sink);
    Some(Sensor {
        data_location,
        annotations,
    })
}

fn preprocessing_step(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<PreprocessingStep> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let filter = f.req(sink, "filter", string).unwrap_or_default();
    let mut parameters = f.rest();
    parameters.retain(|k, v| {
        let scalar = !matches!(v.value, Value::Seq(_) | Value::Map(_));
        if !scalar {
            sink.mismatch(&path.join(k), v, "scalar parameter");
        }
        scalar
    });
    Some(PreprocessingStep { filter, parameters })
}

fn appliance_ref(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<ApplianceRef> {
    if let Some(s) = node.as_str() {
        return Some(ApplianceRef {
            type_name: s.to_string(),
            instance: 1,
        });
    }
    let mut f = Fields::new(sink, node, path.clone())?;
    let type_name = f.req(sink, "type", string)?;
    let instance = f.opt(sink, "instance", uint).unwrap_or(1);
    f.finish(sink);
    Some(ApplianceRef {
        type_name,
        instance,
    })
}

/// Binds one appliance (also used for type-library component lists).
pub(crate) fn appliance(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<Appliance> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let mut a = Appliance {
        type_name: f.req(sink, "type", string).unwrap_or_default(),
        instance: f.opt(sink, "instance", uint).unwrap_or(1),
        subtype: f.opt(sink, "subtype", string),
        count: f.opt(sink, "count", uint),
        multiple: f.opt(sink, "multiple", boolean),
        on_power_threshold: f.opt(sink, "on_power_threshold", real),
        manufacturer: f.opt(sink, "manufacturer", string),
        year_of_manufacture: f.opt(sink, "year_of_manufacture", int),
        room: f.opt(sink, "room", room_ref),
        main_room_light: f.opt(sink, "main_room_light", boolean),
        ..Default::default()
    };
    a.components = f.list(sink, "components", appliance);
    a.dates_active = f.list(sink, "dates_active", date_range);
    if let Some(n) = f.raw("nominal_consumption") {
        let p = path.join("nominal_consumption");
        match n.as_map() {
            Some(m) => {
                for (k, v) in m {
                    if let Some(x) = real(sink, v, &p.join(k)) {
                        a.nominal_consumption.insert(k.clone(), x);
                    }
                }
            }
            None => sink.mismatch(&p, n, "mapping"),
        }
    }
    a.extras = f.rest();
    Some(a)
}

fn room(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<Room> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let name = f.req(sink, "name", string)?;
    let instance = f.opt(sink, "instance", uint).unwrap_or(1);
    f.finish(sink);
    Some(Room { name, instance })
}

/// `kitchen`, `kitchen,2` or `{name: kitchen, instance: 2}`.
fn room_ref(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<RoomRef> {
    if let Some(s) = node.as_str() {
        return match s.rsplit_once(',') {
            Some((name, inst)) => match inst.trim().parse() {
                Ok(instance) => Some(RoomRef {
                    name: name.trim().to_string(),
                    instance,
                }),
                Err(_) => {
                    sink.mismatch(path, node, "room reference `name` or `name,instance`");
                    None
                }
            },
            None => Some(RoomRef {
                name: s.to_string(),
                instance: 1,
            }),
        };
    }
    let r = room(sink, node, path)?;
    Some(RoomRef {
        name: r.name,
        instance: r.instance,
    })
}

fn date_range(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<DateRange> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let start = f.req(sink, "start", date)?;
    let end = f.opt(sink, "end", date);
    f.finish(sink);
    Some(DateRange { start, end })
}

fn geo_location(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<GeoLocation> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let latitude = f.req(sink, "latitude", real);
    let longitude = f.req(sink, "longitude", real);
    let locality = f.opt(sink, "locality", string);
    let country = f.opt(sink, "country", string);
    f.finish(sink);
    Some(GeoLocation {
        latitude: latitude?,
        longitude: longitude?,
        locality,
        country,
    })
}

/// Accepts both a mapping keyed by model name and a sequence of devices
/// each carrying `model`.
fn meter_devices(sink: &mut Sink, node: &Node, path: &DocPath) -> IndexMap<String, MeterDevice> {
    let mut out = IndexMap::new();
    match &node.value {
        Value::Map(m) => {
            for (key, dev) in m {
                if let Some(d) = meter_device(sink, dev, &path.join(key), Some(key)) {
                    out.insert(key.clone(), d);
                }
            }
        }
        Value::Seq(items) => {
            for (i, dev) in items.iter().enumerate() {
                let p = match dev.get("model").and_then(Node::as_str) {
                    Some(model) => path.join(model),
                    None => path.join(format!("[{i}]")),
                };
                if let Some(d) = meter_device(sink, dev, &p, None) {
                    if out.contains_key(&d.model) {
                        sink.error(
                            codes::DEVICE_DUP,
                            p,
                            dev,
                            format!("meter device `{}` declared twice", d.model),
                        );
                    } else {
                        out.insert(d.model.clone(), d);
                    }
                }
            }
        }
        _ => sink.mismatch(path, node, "mapping or sequence"),
    }
    out
}

fn meter_device(
    sink: &mut Sink,
    node: &Node,
    path: &DocPath,
    key: Option<&String>,
) -> Option<MeterDevice> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let model = match key {
        Some(key) => {
            if let Some(inner) = f.opt(sink, "model", string) {
                if &inner != key {
                    sink.error(
                        codes::DEVICE_MODEL_MISMATCH,
                        path.join("model"),
                        node,
                        format!("device keyed `{key}` declares model `{inner}`"),
                    );
                }
            }
            key.clone()
        }
        None => f.req(sink, "model", string)?,
    };
    let d = MeterDevice {
        model,
        manufacturer: f.opt(sink, "manufacturer", string),
        sample_period: f.opt(sink, "sample_period", real),
        measurements: f.list(sink, "measurements", measurement),
    };
    f.finish(sink);
    Some(d)
}

fn measurement(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<Measurement> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let physical_quantity = match f.raw("physical_quantity") {
        Some(n) => parsed(
            sink,
            n,
            &path.join("physical_quantity"),
            "physical quantity",
        ),
        None => {
            f.missing(sink, "physical_quantity");
            None
        }
    };
    let ac_type = f
        .raw("ac_type")
        .and_then(|n| parsed(sink, n, &path.join("ac_type"), "AC type"));
    let m = Measurement {
        physical_quantity: physical_quantity?,
        ac_type,
        lower_limit: f.opt(sink, "lower_limit", real),
        upper_limit: f.opt(sink, "upper_limit", real),
    };
    f.finish(sink);
    Some(m)
}

/// Binds one type-library entry. Fields outside the known set are open
/// prototype properties and are not reported.
pub(crate) fn appliance_type(
    sink: &mut Sink,
    node: &Node,
    path: &DocPath,
) -> Option<ApplianceType> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let mut t = ApplianceType {
        name: f.req(sink, "name", string)?,
        parent: f.opt(sink, "parent", string),
        subtypes: f.strings(sink, "subtypes"),
        do_not_inherit: f.strings(sink, "do_not_inherit"),
        description: f.opt(sink, "description", string),
        ..Default::default()
    };
    t.categories = f.opt(sink, "categories", categories).unwrap_or_default();
    t.components = f.list(sink, "components", appliance);
    if let Some(n) = f.raw("distributions") {
        t.distributions = distributions(sink, n, &path.join("distributions"));
    }
    if let Some(n) = f.raw("additional_properties") {
        let (frag, diags) = SchemaFragment::from_node(n, &path.join("additional_properties"));
        sink.diags.extend(diags);
        t.additional_properties = frag;
    }
    Some(t)
}

fn categories(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<Categories> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let traditional = f
        .raw("traditional")
        .and_then(|n| parsed(sink, n, &path.join("traditional"), "traditional category"));
    let size = f
        .raw("size")
        .and_then(|n| parsed(sink, n, &path.join("size"), "size category"));
    let c = Categories {
        traditional,
        size,
        electrical: f.strings(sink, "electrical"),
        google_shopping: f.strings(sink, "google_shopping"),
    };
    f.finish(sink);
    Some(c)
}

fn distributions(sink: &mut Sink, node: &Node, path: &DocPath) -> DistributionSet {
    let mut out = DistributionSet::new();
    let Some(map) = node.as_map() else {
        sink.mismatch(path, node, "mapping");
        return out;
    };
    for (key, priors) in map {
        let p = path.join(key);
        match key.parse::<DistributionName>() {
            Ok(name) => {
                let list = if priors.is_null() {
                    Vec::new()
                } else {
                    seq_of(sink, priors, &p, prior)
                };
                out.insert(name, list);
            }
            Err(()) => sink.error(
                codes::BAD_DISTRIBUTION_NAME,
                p,
                priors,
                format!("`{key}` is not a distribution name"),
            ),
        }
    }
    out
}

fn prior(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<Prior> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let mut p = Prior {
        distribution_of_data: f.opt(sink, "distribution_of_data", distribution_data),
        model: f.opt(sink, "model", model_spec),
        citation: f.opt(sink, "citation", string),
        specific_to: f.opt(sink, "specific_to", string),
        training_data: f.opt(sink, "training_data", string),
        ..Default::default()
    };
    p.source = f
        .raw("source")
        .and_then(|n| parsed(sink, n, &path.join("source"), "prior source"));
    if let Some(n) = f.raw("distance") {
        sink.warning(
            codes::PRIOR_DISTANCE_AUTHORED,
            path.join("distance"),
            n,
            "distance is assigned during prior collection; authored value ignored",
        );
    }
    f.finish(sink);
    Some(p)
}

fn floats(sink: &mut Sink, f: &mut Fields<'_>, key: &str) -> Vec<f64> {
    f.list(sink, key, real)
}

fn distribution_data(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<DistributionData> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let d = if node.get("bin_edges").is_some() {
        let bin_edges = floats(sink, &mut f, "bin_edges");
        if node.get("frequencies").is_none() {
            f.missing(sink, "frequencies");
        }
        DistributionData::Continuous {
            bin_edges,
            frequencies: floats(sink, &mut f, "frequencies"),
        }
    } else if node.get("categories").is_some() {
        let categories = f.strings(sink, "categories");
        if node.get("frequencies").is_none() {
            f.missing(sink, "frequencies");
        }
        DistributionData::Categorical {
            categories,
            frequencies: floats(sink, &mut f, "frequencies"),
        }
    } else {
        f.missing(sink, "bin_edges");
        return None;
    };
    f.finish(sink);
    Some(d)
}

fn model_spec(sink: &mut Sink, node: &Node, path: &DocPath) -> Option<ModelSpec> {
    let mut f = Fields::new(sink, node, path.clone())?;
    let mut m = ModelSpec {
        distribution_name: f.req(sink, "distribution_name", string).unwrap_or_default(),
        ..Default::default()
    };
    if let Some(n) = f.raw("parameters") {
        let p = path.join("parameters");
        match n.as_map() {
            Some(map) => {
                for (k, v) in map {
                    if let Some(x) = real(sink, v, &p.join(k)) {
                        m.parameters.insert(k.clone(), x);
                    }
                }
            }
            None => sink.mismatch(&p, n, "mapping"),
        }
    }
    f.finish(sink);
    Some(m)
}

/// Binds a learnt-model document.
pub fn bind_learnt_model(node: &Node) -> (LearntModel, Vec<Diagnostic>) {
    let mut sink = Sink::default();
    let mut m = LearntModel::default();
    if let Some(mut f) = Fields::new(&mut sink, node, DocPath::root()) {
        m.model_type = f.req(&mut sink, "model_type", string).unwrap_or_default();
        m.appliance_type = f
            .req(&mut sink, "appliance_type", string)
            .unwrap_or_default();
        m.training_data = f.opt(&mut sink, "training_data", string);
        m.date_prepared = f.raw("date_prepared").map(|n| match &n.value {
            Value::Str(s) => s.clone(),
            _ => n.to_json().to_string(),
        });
        m.parameters = f.raw("parameters").cloned();
        f.finish(&mut sink);
    }
    (m, sink.diags)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::loader::{parse_document, Format};

    fn doc(s: &str) -> Node {
        parse_document(s.as_bytes(), Format::Yaml).unwrap()
    }

    fn raw(dataset: &str, buildings: &[(u32, &str)]) -> RawDatasetFolder {
        RawDatasetFolder {
            dataset_doc: doc(dataset),
            building_docs: buildings
                .iter()
                .map(|(i, s)| (*i, doc(s)))
                .collect::<BTreeMap<_, _>>(),
            diagnostics: Vec::new(),
        }
    }

    #[test]
    fn timezone_cascades_to_buildings() {
        let (d, diags) = bind(&raw(
            "name: X\ntimezone: Europe/London\n",
            &[(1, "instance: 1\n"), (2, "timezone: America/New_York\n")],
        ));
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(d.buildings[0].timezone.as_deref(), Some("Europe/London"));
        assert_eq!(d.buildings[1].timezone.as_deref(), Some("America/New_York"));
        assert_eq!(d.buildings[1].instance, 2);
    }

    #[test]
    fn missing_device_model_path() {
        let (_, diags) = bind(&raw(
            "name: X",
            &[(
                1,
                "elec_meters:\n- {instance: 1, device_model: D, site_meter: true}\n- {instance: 2, submeter_of: 1}\n",
            )],
        ));
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, codes::MISSING_REQUIRED);
        assert_eq!(
            diags[0].path.as_str(),
            "buildings/1/elec_meters/2/device_model"
        );
        assert_eq!(diags[0].span.as_ref().unwrap().line, 3);
    }

    #[test]
    fn index_mismatch_and_type_mismatch() {
        let (_, diags) = bind(&raw(
            "name: X",
            &[(1, "instance: 2\nelec_meters:\n- {instance: one}\n")],
        ));
        let codes: Vec<_> = diags.iter().map(|d| d.code).collect();
        assert!(codes.contains(&codes::BUILDING_INDEX_MISMATCH));
        assert!(codes.contains(&codes::TYPE_MISMATCH));
    }

    #[test]
    fn unknown_fields_warn_outside_appliances() {
        let (d, diags) = bind(&raw(
            "name: X\nmystery: 1\n",
            &[(
                1,
                "elec_meters:\n- instance: 1\n  device_model: D\n  site_meter: true\n  appliances:\n  - {type: television, screen_size: 40}\n",
            )],
        ));
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, codes::UNKNOWN_FIELD);
        assert_eq!(diags[0].path.as_str(), "mystery");
        let tv = &d.buildings[0].elec_meters[0].appliances[0];
        assert_eq!(tv.extras.get("screen_size"), Some(&Node::from(40)));
        assert_eq!(tv.instance, 1);
    }

    #[test]
    fn devices_as_sequence_or_mapping() {
        let (a, da) = bind(&raw(
            "name: X\nmeter_devices:\n- {model: EnviR, measurements: [{physical_quantity: power, ac_type: apparent}]}\n",
            &[],
        ));
        let (b, db) = bind(&raw(
            "name: X\nmeter_devices:\n  EnviR: {measurements: [{physical_quantity: power, ac_type: apparent}]}\n",
            &[],
        ));
        assert!(da.is_empty() && db.is_empty());
        assert_eq!(a, b);
    }

    #[test]
    fn building_meter_devices_rejected() {
        let (_, diags) = bind(&raw("name: X", &[(1, "meter_devices: {}\n")]));
        assert_eq!(diags[0].code, codes::BUILDING_METER_DEVICES);
    }

    #[test]
    fn room_reference_forms() {
        let mut sink = Sink::default();
        let p = DocPath::root();
        assert_eq!(
            room_ref(&mut sink, &Node::from("kitchen,2"), &p),
            Some(RoomRef {
                name: "kitchen".into(),
                instance: 2
            })
        );
        assert_eq!(
            room_ref(&mut sink, &doc("{name: lounge}"), &p),
            Some(RoomRef {
                name: "lounge".into(),
                instance: 1
            })
        );
        assert!(sink.diags.is_empty());
    }

    #[test]
    fn learnt_model() {
        let (m, diags) = bind_learnt_model(&doc(
            "model_type: HMM\nappliance_type: fridge\ndate_prepared: 2014-03-01\nparameters: {states: 2}\n",
        ));
        assert!(diags.is_empty());
        assert_eq!(m.model_type, "HMM");
        assert!(m.parameters.is_some());
    }
}
