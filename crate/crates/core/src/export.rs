//! Canonical JSON export: sorted keys, two-space indent, LF endings and a
//! trailing newline, so that exports diff cleanly and re-export byte for
//! byte.

use serde_json::{Map, Value};

use crate::diag::Diagnostic;
use crate::model::{meter_path, Dataset, ElecMeter};
use crate::typedb::TypeLibrary;

fn sorted(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(
                entries
                    .into_iter()
                    .map(|(k, v)| (k, sorted(v)))
                    .collect::<Map<_, _>>(),
            )
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        other => other,
    }
}

fn render(value: Value) -> String {
    let mut out = serde_json::to_string_pretty(&sorted(value)).expect("JSON value serializes");
    out.push('\n');
    out
}

/// The dataset as one self-contained document. Buildings are inline and
/// inherited building defaults are written out explicitly.
pub fn canonical_json(dataset: &Dataset) -> String {
    render(serde_json::to_value(dataset).expect("dataset serializes"))
}

/// Like [`canonical_json`], with every appliance replaced by its resolved
/// record (type properties, effective categories, expanded components and
/// collected priors). Fails with the resolution diagnostics if any
/// appliance does not resolve.
pub fn canonical_json_resolved(
    dataset: &Dataset,
    library: &TypeLibrary,
) -> Result<String, Vec<Diagnostic>> {
    let mut value = serde_json::to_value(dataset).expect("dataset serializes");
    let mut diags = Vec::new();
    if let Some(buildings) = value.get_mut("buildings").and_then(Value::as_array_mut) {
        for (b, out) in dataset.buildings.iter().zip(buildings) {
            resolve_meters(&b.elec_meters, Some(b.instance), out, library, &mut diags);
        }
    }
    resolve_meters(
        &dataset.dataset_meters,
        None,
        &mut value,
        library,
        &mut diags,
    );
    if diags.is_empty() {
        Ok(render(value))
    } else {
        Err(diags)
    }
}

fn resolve_meters(
    meters: &[ElecMeter],
    building: Option<u32>,
    container: &mut Value,
    library: &TypeLibrary,
    diags: &mut Vec<Diagnostic>,
) {
    let Some(out) = container
        .get_mut("elec_meters")
        .and_then(Value::as_array_mut)
    else {
        return;
    };
    for (m, slot) in meters.iter().zip(out) {
        let Some(apps) = slot.get_mut("appliances").and_then(Value::as_array_mut) else {
            continue;
        };
        let base = meter_path(building, m.instance).join("appliances");
        for (i, (a, a_out)) in m.appliances.iter().zip(apps).enumerate() {
            match library.resolve_appliance(a, &base.join(i)) {
                Ok(r) => *a_out = r.to_json(),
                Err(d) => diags.extend(d),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loader::{bind, parse_document, Format, RawDatasetFolder};

    fn dataset(s: &str) -> Dataset {
        let (d, diags) = bind(&RawDatasetFolder::single(
            parse_document(s.as_bytes(), Format::Yaml).unwrap(),
        ));
        assert!(diags.is_empty(), "{diags:?}");
        d
    }

    const DOC: &str = "
name: X
timezone: Europe/London
meter_devices: [{model: D, measurements: [{physical_quantity: power, ac_type: active, upper_limit: 30000}]}]
buildings:
- instance: 1
  elec_meters:
  - {instance: 1, device_model: D, site_meter: true, sensors: [{data_location: a}],
     appliances: [{type: light, components: [{type: LED lamp, count: 10}]}]}
";

    #[test]
    fn sorted_and_stable() {
        let d = dataset(DOC);
        let json = canonical_json(&d);
        assert!(json.ends_with("}\n"));
        assert!(json.find("\"buildings\"").unwrap() < json.find("\"meter_devices\"").unwrap());
        assert!(json.contains("\"timezone\": \"Europe/London\""));
        let again = dataset(&json);
        assert_eq!(again, d);
        assert_eq!(canonical_json(&again), json);
    }

    #[test]
    fn resolved_export_inlines_types() {
        let json = canonical_json_resolved(&dataset(DOC), &TypeLibrary::seed()).unwrap();
        let v: Value = serde_json::from_str(&json).unwrap();
        let a = &v["buildings"][0]["elec_meters"][0]["appliances"][0];
        assert_eq!(a["categories"]["traditional"], "lighting");
        assert_eq!(a["categories"]["electrical"][0], "LED");
        assert_eq!(a["components"][0]["type"], "LED lamp");
        let broken = dataset(&DOC.replace("type: light", "type: toaster"));
        assert!(canonical_json_resolved(&broken, &TypeLibrary::seed()).is_err());
    }
}
