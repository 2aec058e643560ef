//! Whole-dataset validation.

mod schema;

use std::collections::{BTreeSet, HashMap};

use crate::diag::{codes, dedup, Diagnostic, DocPath, ValidationReport};
use crate::loader::{bind, Node, RawDatasetFolder};
use crate::model::{
    building_path, building_tree, dataset_scope_tree, meter_path, Appliance, Building, Dataset,
    ElecMeter, LearntModel, APPLIANCE_CORE_FIELDS,
};
use crate::par::{map_ordered, Execution};
use crate::typedb::{ResolvedAppliance, TypeLibrary};
use crate::wiring::{validate_wiring, DEFAULT_DEPTH_LIMIT};

pub use schema::{
    validate_against_fragment, validate_value, Pattern, PropertyRule, SchemaFragment, SchemaKind,
};

/// Model types recognised in learnt-model documents.
pub const MODEL_TYPES: &[&str] = &[
    "HMM",
    "FHMM",
    "GMM",
    "neural_network",
    "combinatorial_optimisation",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Wiring trees deeper than this many meters draw a warning.
    pub depth_limit: usize,
    pub execution: Execution,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            depth_limit: DEFAULT_DEPTH_LIMIT,
            execution: Execution::default(),
        }
    }
}

/// Checks an appliance's non-core fields against the merged
/// `additional_properties` of its type, then its components'.
pub fn validate_appliance_extras(
    library: &TypeLibrary,
    appliance: &Appliance,
    path: &DocPath,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    extras(library, appliance, path, &mut out);
    out
}

fn extras(library: &TypeLibrary, a: &Appliance, path: &DocPath, out: &mut Vec<Diagnostic>) {
    if let Ok(schema) = library.merged_additional_schema(&a.type_name) {
        let node = Node::map(a.extras.iter().map(|(k, v)| (k.clone(), v.clone())));
        out.extend(validate_against_fragment(&node, &schema, path));
        for (key, value) in &a.extras {
            if schema.get(key).is_none() && !APPLIANCE_CORE_FIELDS.contains(&key.as_str()) {
                out.push(
                    Diagnostic::error(
                        codes::UNKNOWN_APPLIANCE_FIELD,
                        path.join(key),
                        format!(
                            "`{key}` is not a property of `{}` or its ancestors",
                            a.type_name
                        ),
                    )
                    .with_span(Some(value.span.clone())),
                );
            }
        }
    }
    for (i, c) in a.components.iter().enumerate() {
        extras(library, c, &path.join("components").join(i), out);
    }
}

/// Binds a loaded folder and validates the result; scan and binding
/// findings are part of the report.
pub fn validate_raw(
    raw: &RawDatasetFolder,
    library: &TypeLibrary,
    options: &ValidateOptions,
) -> (Dataset, ValidationReport) {
    let (dataset, bound) = bind(raw);
    let mut early = raw.diagnostics.clone();
    early.extend(bound);
    let report = validate_dataset_with(&dataset, early, library, options);
    (dataset, report)
}

pub fn validate_dataset(dataset: &Dataset, library: &TypeLibrary) -> ValidationReport {
    validate_dataset_with(dataset, Vec::new(), library, &ValidateOptions::default())
}

/// Full validation. `bound` carries findings from loading and binding,
/// which lead their scope in the report.
///
/// Findings are grouped by scope in document order: dataset-wide fields,
/// each building, dataset-level meters, then library entries the dataset
/// uses. Within a scope they follow check order.
pub fn validate_dataset_with(
    dataset: &Dataset,
    bound: Vec<Diagnostic>,
    library: &TypeLibrary,
    options: &ValidateOptions,
) -> ValidationReport {
    let mut stream = bound;
    stream.extend(dataset_scope_tree(dataset));

    let (_, wiring) = validate_wiring(dataset, options.depth_limit);
    let mut wiring_by_scope: HashMap<usize, Vec<Diagnostic>> = HashMap::new();
    for d in wiring {
        wiring_by_scope
            .entry(scope(dataset, &d.path))
            .or_default()
            .push(d);
    }

    let tasks: Vec<Task<'_>> = dataset
        .buildings
        .iter()
        .enumerate()
        .map(|(i, b)| Task::Building(i + 1, b))
        .chain((!dataset.dataset_meters.is_empty()).then_some(Task::DatasetMeters))
        .collect();
    let results = map_ordered(&tasks, options.execution, |task| {
        let wiring = wiring_by_scope
            .get(&task.scope(dataset))
            .cloned()
            .unwrap_or_default();
        task.run(dataset, library, wiring)
    });

    let mut used = BTreeSet::new();
    for (diags, types) in results {
        stream.extend(diags);
        used.extend(types);
    }
    if let Some(rest) = wiring_by_scope.remove(&0) {
        stream.extend(rest);
    }
    for t in &used {
        stream.extend(library.content_diagnostics(t).iter().cloned());
    }

    let mut keyed: Vec<(usize, Diagnostic)> = stream
        .into_iter()
        .map(|d| (scope(dataset, &d.path), d))
        .collect();
    keyed.sort_by_key(|(s, _)| *s);
    ValidationReport::new(dedup(keyed.into_iter().map(|(_, d)| d).collect()))
}

/// 0 for dataset-wide paths, 1..=n for buildings in order, n+1 for
/// dataset-level meters, n+2 for the library.
fn scope(dataset: &Dataset, path: &DocPath) -> usize {
    let n = dataset.buildings.len();
    let mut parts = path.as_str().split('/');
    match (parts.next(), parts.next()) {
        (Some("buildings"), Some(b)) => b
            .parse::<u32>()
            .ok()
            .and_then(|b| dataset.buildings.iter().position(|x| x.instance == b))
            .map_or(0, |i| i + 1),
        (Some("elec_meters"), _) => n + 1,
        (Some("library"), _) => n + 2,
        _ => 0,
    }
}

enum Task<'a> {
    Building(usize, &'a Building),
    DatasetMeters,
}

impl Task<'_> {
    fn scope(&self, dataset: &Dataset) -> usize {
        match self {
            Task::Building(i, _) => *i,
            Task::DatasetMeters => dataset.buildings.len() + 1,
        }
    }

    fn run(
        &self,
        dataset: &Dataset,
        library: &TypeLibrary,
        wiring: Vec<Diagnostic>,
    ) -> (Vec<Diagnostic>, BTreeSet<String>) {
        let (building, meters): (Option<&Building>, &[ElecMeter]) = match self {
            Task::Building(_, b) => (Some(b), &b.elec_meters),
            Task::DatasetMeters => (None, &dataset.dataset_meters),
        };
        let instance = building.map(|b| b.instance);
        let mut out = Vec::new();
        let mut used = BTreeSet::new();

        if let Some(b) = building {
            out.extend(building_tree(b));
        }
        for m in meters {
            if !m.device_model.is_empty() && !dataset.meter_devices.contains_key(&m.device_model) {
                out.push(Diagnostic::error(
                    codes::UNKNOWN_DEVICE,
                    meter_path(instance, m.instance).join("device_model"),
                    format!("no meter device `{}` in the dataset", m.device_model),
                ));
            }
        }
        out.extend(wiring);

        let appliances: Vec<(DocPath, &Appliance)> = meters
            .iter()
            .flat_map(|m| {
                let base = meter_path(instance, m.instance).join("appliances");
                m.appliances
                    .iter()
                    .enumerate()
                    .map(move |(i, a)| (base.join(i), a))
            })
            .collect();
        for (path, a) in &appliances {
            match library.resolve_appliance(a, path) {
                Ok(r) => collect_types(&r, &mut used),
                Err(d) => out.extend(d),
            }
        }
        for (path, a) in &appliances {
            out.extend(validate_appliance_extras(library, a, path));
        }
        for (path, a) in &appliances {
            rooms(building, a, path, &mut out);
        }
        if let Some(b) = building {
            if !library.rooms().is_empty() {
                for (i, r) in b.rooms.iter().enumerate() {
                    if !library.rooms().contains(&r.name) {
                        out.push(Diagnostic::error(
                            codes::ROOM_VOCAB,
                            building_path(b.instance).join("rooms").join(i).join("name"),
                            format!("`{}` is not in the room vocabulary", r.name),
                        ));
                    }
                }
            }
        }
        let mut first_meter: HashMap<(&str, u32), u32> = HashMap::new();
        for m in meters {
            for (i, a) in m.appliances.iter().enumerate() {
                let owner = *first_meter
                    .entry((a.type_name.as_str(), a.instance))
                    .or_insert(m.instance);
                if owner != m.instance {
                    out.push(Diagnostic::warning(
                        codes::SHARED_APPLIANCE,
                        meter_path(instance, m.instance).join("appliances").join(i),
                        format!(
                            "{} {} is also measured by meter {owner}",
                            a.type_name, a.instance
                        ),
                    ));
                }
            }
        }
        (out, used)
    }
}

fn collect_types(r: &ResolvedAppliance, used: &mut BTreeSet<String>) {
    used.insert(r.resolved_type.name.clone());
    used.extend(r.resolved_type.ancestry.iter().cloned());
    for c in &r.components {
        collect_types(c, used);
    }
}

fn rooms(building: Option<&Building>, a: &Appliance, path: &DocPath, out: &mut Vec<Diagnostic>) {
    if let Some(room) = &a.room {
        let known = building.is_some_and(|b| {
            b.rooms
                .iter()
                .any(|r| r.name == room.name && r.instance == room.instance)
        });
        if !known {
            out.push(Diagnostic::error(
                codes::UNKNOWN_ROOM,
                path.join("room"),
                format!(
                    "room {} {} is not declared in the building",
                    room.name, room.instance
                ),
            ));
        }
    }
    for (i, c) in a.components.iter().enumerate() {
        rooms(building, c, &path.join("components").join(i), out);
    }
}

/// Checks a learnt-model document against the vocabulary and library.
pub fn validate_learnt_model(model: &LearntModel, library: &TypeLibrary) -> Vec<Diagnostic> {
    let root = DocPath::root();
    let mut out = Vec::new();
    if !MODEL_TYPES.contains(&model.model_type.as_str()) {
        out.push(Diagnostic::error(
            codes::BAD_MODEL_TYPE,
            root.join("model_type"),
            format!(
                "`{}` is not one of {}",
                model.model_type,
                MODEL_TYPES.join(", ")
            ),
        ));
    }
    if !library.contains(&model.appliance_type) {
        out.push(Diagnostic::error(
            codes::UNKNOWN_APPLIANCE_TYPE,
            root.join("appliance_type"),
            format!("`{}` is not a known appliance type", model.appliance_type),
        ));
    }
    if let Some(date) = &model.date_prepared {
        let ok = date.parse::<crate::model::DateValue>().is_ok()
            || chrono::DateTime::parse_from_rfc3339(date).is_ok()
            || chrono::NaiveDateTime::parse_from_str(date, "%Y-%m-%dT%H:%M:%S").is_ok();
        if !ok {
            out.push(Diagnostic::error(
                codes::BAD_DATE,
                root.join("date_prepared"),
                format!("`{date}` is not a date"),
            ));
        }
    }
    if !model
        .parameters
        .as_ref()
        .is_some_and(|p| p.as_map().is_some())
    {
        out.push(Diagnostic::error(
            codes::MODEL_NO_PARAMETERS,
            root.join("parameters"),
            "parameters must be a mapping",
        ));
    }
    out
}
