mod common;

use std::fs;
use std::time::Instant;

use common::{errors, fixture_copy, fixture_dir, validate_dir};
use nilm_meta::codes;
use nilm_meta::export::{canonical_json, canonical_json_resolved};
use nilm_meta::loader::{bind, load_dataset_path, parse_document, Format, RawDatasetFolder};
use nilm_meta::model::{AcType, DateValue, PhysicalQuantity};
use nilm_meta::typedb::{LibraryDocs, TypeLibrary};
use nilm_meta::wiring::{build_wiring_forest, MeterRef};

#[test]
fn example_binds_with_listed_values() {
    let (d, report) = validate_dir(&fixture_dir(), &TypeLibrary::seed());
    assert!(report.diagnostics.is_empty(), "{}", report.to_text());
    assert_eq!(d.name, "UK-DALE");
    assert_eq!(
        d.long_name.as_deref(),
        Some("UK Domestic Appliance-Level Electricity")
    );
    let device = &d.meter_devices["EnviR"];
    assert_eq!(device.manufacturer.as_deref(), Some("Current Cost"));
    let m = &device.measurements[0];
    assert_eq!(m.physical_quantity, PhysicalQuantity::Power);
    assert_eq!(m.ac_type, Some(AcType::Apparent));
    assert_eq!((m.lower_limit, m.upper_limit), (Some(0.0), Some(30000.0)));

    let b = &d.buildings[0];
    assert_eq!(
        b.rooms.iter().map(|r| r.name.as_str()).collect::<Vec<_>>(),
        ["kitchen", "lounge"]
    );
    let meter2 = b.meter(2).unwrap();
    assert_eq!(meter2.submeter_of, Some(1));
    assert_eq!(meter2.preprocessing[0].filter, "clip");
    let light = &meter2.appliances[0];
    assert_eq!(light.type_name, "light");
    assert_eq!(light.on_power_threshold, Some(10.0));
    assert_eq!(light.main_room_light, Some(true));
    assert_eq!(light.dates_active[0].start, DateValue::Year(2012));
    let lamps = &light.components[0];
    assert_eq!(
        (lamps.count, lamps.year_of_manufacture),
        (Some(10), Some(2011))
    );
    assert_eq!(lamps.manufacturer.as_deref(), Some("Philips"));
    assert_eq!(lamps.nominal_consumption["on_power"], 10.0);
}

#[test]
fn example_validates_quickly() {
    let seed = TypeLibrary::seed();
    let start = Instant::now();
    let (_, report) = validate_dir(&fixture_dir(), &seed);
    assert!(report.is_valid());
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn example_wiring() {
    let (d, _) = validate_dir(&fixture_dir(), &TypeLibrary::seed());
    let (forest, diags) = build_wiring_forest(&d);
    assert!(diags.is_empty());
    let (m1, m2) = (MeterRef::new(Some(1), 1), MeterRef::new(Some(1), 2));
    assert_eq!(
        forest
            .submeters_of(m1)
            .unwrap()
            .into_iter()
            .collect::<Vec<_>>(),
        [m2]
    );
    assert_eq!(forest.upstream_of(m2).unwrap(), Some(m1));
    assert_eq!(
        forest.render_tree(),
        "* building1/meter1\n  building1/meter2\n"
    );
}

#[test]
fn example_resolves_light_with_lamps() {
    let (d, _) = validate_dir(&fixture_dir(), &TypeLibrary::seed());
    let seed = TypeLibrary::seed();
    let light = &d.buildings[0].meter(2).unwrap().appliances[0];
    let r = seed.resolve_appliance(light, &"x".into()).unwrap();
    assert_eq!(r.components[0].appliance.type_name, "LED lamp");
    assert_eq!(r.components[0].appliance.count, Some(10));
    assert_eq!(r.components[1].appliance.type_name, "dimmer");
    assert!(r.categories.electrical.contains(&"LED".to_owned()));
    assert_eq!(r.to_json()["on_power_threshold"], 10.0);
}

#[test]
fn example_export_round_trips() {
    let seed = TypeLibrary::seed();
    let (d, _) = validate_dir(&fixture_dir(), &seed);
    let first = canonical_json(&d);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("export.json");
    fs::write(&file, &first).unwrap();
    let (again, diags) = bind(&load_dataset_path(&file).unwrap());
    assert!(diags.is_empty(), "{diags:?}");
    assert_eq!(again, d);
    assert_eq!(canonical_json(&again), first);
    let resolved = canonical_json_resolved(&d, &seed).unwrap();
    assert!(resolved.contains("\"ancestry\""));
}

/// Applies `edit` to the building document and returns the error list.
fn mutate_building(edit: impl Fn(&str) -> String) -> Vec<(String, String)> {
    mutate_with(&TypeLibrary::seed(), edit)
}

fn mutate_with(library: &TypeLibrary, edit: impl Fn(&str) -> String) -> Vec<(String, String)> {
    let dir = fixture_copy();
    let path = dir.path().join("building1.yaml");
    let text = fs::read_to_string(&path).unwrap();
    let edited = edit(&text);
    assert_ne!(edited, text, "mutation did not apply");
    fs::write(&path, edited).unwrap();
    errors(&validate_dir(dir.path(), library).1)
}

fn one(code: &str, path: &str) -> Vec<(String, String)> {
    vec![(code.to_owned(), path.to_owned())]
}

const METER2: &str = "buildings/1/elec_meters/2";

#[test]
fn mutation_missing_device_model() {
    let got = mutate_building(|t| {
        t.replacen(
            "  device_model: EnviR\n  submeter_of: 1",
            "  submeter_of: 1",
            1,
        )
    });
    assert_eq!(
        got,
        one(codes::MISSING_REQUIRED, &format!("{METER2}/device_model"))
    );
}

#[test]
fn mutation_unknown_device() {
    let got = mutate_building(|t| {
        t.replacen(
            "device_model: EnviR\n  submeter_of",
            "device_model: NoSuchDevice\n  submeter_of",
            1,
        )
    });
    assert_eq!(
        got,
        one(codes::UNKNOWN_DEVICE, &format!("{METER2}/device_model"))
    );
}

#[test]
fn mutation_dangling_submeter() {
    let got = mutate_building(|t| t.replace("submeter_of: 1", "submeter_of: 3"));
    assert_eq!(
        got,
        one(codes::WIRING_DANGLING, &format!("{METER2}/submeter_of"))
    );
}

#[test]
fn mutation_site_meter_and_submeter() {
    let got = mutate_building(|t| {
        t.replace(
            "  submeter_of: 1\n",
            "  submeter_of: 1\n  site_meter: true\n",
        )
    });
    assert_eq!(got, one(codes::METER_ROOT_AND_SUB, METER2));
}

#[test]
fn mutation_four_sensors() {
    let got = mutate_building(|t| {
        t.replace(
            "  - data_location: house1/channel_2.dat\n",
            "  - data_location: house1/channel_2.dat\n  - data_location: a\n  - data_location: b\n  - data_location: c\n",
        )
    });
    assert_eq!(
        got,
        one(codes::METER_SENSOR_COUNT, &format!("{METER2}/sensors"))
    );
}

#[test]
fn mutation_count_and_multiple() {
    let got = mutate_building(|t| {
        t.replace(
            "      count: 10\n",
            "      count: 10\n      multiple: true\n",
        )
    });
    assert_eq!(
        got,
        one(
            codes::COUNT_AND_MULTIPLE,
            &format!("{METER2}/appliances/0/components/0")
        )
    );
}

#[test]
fn mutation_bad_subtype() {
    let got = mutate_building(|t| {
        t.replace(
            "  - type: light\n",
            "  - type: light\n    subtype: chandelier\n",
        )
    });
    assert_eq!(
        got,
        one(
            codes::BAD_SUBTYPE,
            &format!("{METER2}/appliances/0/subtype")
        )
    );
}

#[test]
fn mutation_unnormalized_prior() {
    let broken = parse_document(
        b"name: LED lamp\nparent: lamp\ncategories: {electrical: [LED]}\ndistributions:\n  on_power:\n  - distribution_of_data: {bin_edges: [0, 5, 10], frequencies: [0.5, 0.3]}\n",
        Format::Yaml,
    )
    .unwrap();
    let library = TypeLibrary::from_docs(LibraryDocs::seed().overlay(LibraryDocs {
        types: vec![broken],
        ..Default::default()
    }))
    .unwrap();
    let dir = fixture_copy();
    let got = errors(&validate_dir(dir.path(), &library).1);
    assert_eq!(
        got,
        one(
            codes::PRIOR_NOT_NORMALIZED,
            "library/LED lamp/distributions/on_power/0/distribution_of_data/frequencies"
        )
    );
}

#[test]
fn mutation_unknown_appliance_type() {
    let got = mutate_building(|t| t.replace("type: dimmer", "type: warp drive"));
    assert_eq!(
        got,
        one(
            codes::UNKNOWN_APPLIANCE_TYPE,
            &format!("{METER2}/appliances/0/components/1/type")
        )
    );
}

#[test]
fn mutation_unknown_room() {
    let got = mutate_building(|t| {
        t.replace(
            "    main_room_light: true\n",
            "    main_room_light: true\n    room: bedroom\n",
        )
    });
    assert_eq!(
        got,
        one(codes::UNKNOWN_ROOM, &format!("{METER2}/appliances/0/room"))
    );
}

#[test]
fn mutation_field_outside_type_schema() {
    let got = mutate_building(|t| {
        t.replace(
            "    main_room_light: true\n",
            "    main_room_light: true\n    screen_size: 40\n",
        )
    });
    assert_eq!(
        got,
        one(
            codes::UNKNOWN_APPLIANCE_FIELD,
            &format!("{METER2}/appliances/0/screen_size")
        )
    );
}

#[test]
fn mutation_dates_reversed() {
    let got =
        mutate_building(|t| t.replace("{start: 2012, end: 2013}", "{start: 2014, end: 2013}"));
    assert_eq!(
        got,
        one(
            codes::DATE_RANGE_ORDER,
            &format!("{METER2}/appliances/0/dates_active/0")
        )
    );
}

#[test]
fn mutation_reports_carry_spans() {
    let dir = fixture_copy();
    let path = dir.path().join("building1.yaml");
    let text = fs::read_to_string(&path)
        .unwrap()
        .replace("count: 10", "count: ten");
    fs::write(&path, text).unwrap();
    let (_, report) = validate_dir(dir.path(), &TypeLibrary::seed());
    let d = report
        .diagnostics
        .iter()
        .find(|d| d.code == codes::TYPE_MISMATCH)
        .unwrap();
    let span = d.span.as_ref().unwrap();
    assert_eq!(span.file.as_deref(), Some("building1.yaml"));
    assert_eq!(span.line, 24);
}

#[test]
fn single_document_equals_folder() {
    let dataset = fs::read_to_string(fixture_dir().join("dataset.yaml")).unwrap();
    let building = fs::read_to_string(fixture_dir().join("building1.yaml")).unwrap();
    let indented: String = building.lines().map(|l| format!("  {l}\n")).collect();
    let combined = format!("{dataset}buildings:\n-\n{indented}");
    let (single, diags) = bind(&RawDatasetFolder::single(
        parse_document(combined.as_bytes(), Format::Yaml).unwrap(),
    ));
    assert!(diags.is_empty(), "{diags:?}");
    let (folder, _) = validate_dir(&fixture_dir(), &TypeLibrary::seed());
    assert_eq!(single, folder);
}
