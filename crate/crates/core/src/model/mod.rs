//! Domain types of the metadata schema.
//!
//! Values here are plain data: binding from documents lives in
//! [`crate::loader`], per-object invariant checks in [`invariants`].

mod invariants;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use indexmap::IndexMap;
use serde::{Serialize, Serializer};

use crate::loader::Node;
use crate::validate::SchemaFragment;

pub use invariants::{
    appliance_type_tree, building_path, building_tree, dataset_scope_tree, meter_path, prior_path,
    prior_tree, LocalInvariants, PRIOR_SUM_TOLERANCE,
};

/// A calendar date, or a bare year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DateValue {
    Year(i32),
    Date(NaiveDate),
}

impl DateValue {
    /// Bare years compare as January 1 of that year.
    pub fn normalized(&self) -> NaiveDate {
        match *self {
            DateValue::Year(y) => NaiveDate::from_ymd_opt(y, 1, 1).unwrap_or(NaiveDate::MIN),
            DateValue::Date(d) => d,
        }
    }

    pub fn year(&self) -> i32 {
        self.normalized().year()
    }
}

impl PartialOrd for DateValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.normalized().cmp(&other.normalized()))
    }
}

impl FromStr for DateValue {
    type Err = chrono::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit()) {
            if let Ok(year) = s.parse() {
                return Ok(DateValue::Year(year));
            }
        }
        NaiveDate::parse_from_str(s, "%Y-%m-%d").map(DateValue::Date)
    }
}

impl fmt::Display for DateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DateValue::Year(y) => write!(f, "{y}"),
            DateValue::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
        }
    }
}

impl Serialize for DateValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            DateValue::Year(y) => s.serialize_i32(*y),
            DateValue::Date(_) => s.serialize_str(&self.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DateRange {
    pub start: DateValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end: Option<DateValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeoLocation {
    pub latitude: f64,
    pub longitude: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locality: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Dataset {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub long_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub publication_date: Option<DateValue>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rights_list: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geospatial_coverage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temporal_coverage: Option<DateRange>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub funding: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub creators: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub related_documents: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timezone: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geo_location: Option<GeoLocation>,
    /// Keyed by device model name.
    #[serde(skip_serializing_if = "IndexMap::is_empty")]
    pub meter_devices: IndexMap<String, MeterDevice>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub buildings: Vec<Building>,
    /// Meters held directly by the dataset, without a building.
    #[serde(rename = "elec_meters", skip_serializing_if = "Vec::is_empty")]
    pub dataset_meters: Vec<ElecMeter>,
}

impl Dataset {
    pub fn building(&self, instance: u32) -> Option<&Building> {
        self.buildings.iter().find(|b| b.instance == instance)
    }

    /// Meter `meter` of building `building`, or of the dataset itself
    /// when `building` is `None`.
    pub fn meter(&self, building: Option<u32>, meter: u32) -> Option<&ElecMeter> {
        let meters = match building {
            Some(b) => &self.building(b)?.elec_meters,
            None => &self.dataset_meters,
        };
        meters.iter().find(|m| m.instance == meter)
    }

    pub fn meter_count(&self) -> usize {
        self.dataset_meters.len()
            + self
                .buildings
                .iter()
                .map(|b| b.elec_meters.len())
                .sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MeterDevice {
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manufacturer: Option<String>,
    /// Seconds between samples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_period: Option<f64>,
    pub measurements: Vec<Measurement>,
}

macro_rules! string_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = ();

            fn from_str(s: &str) -> Result<Self, ()> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(()),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }
    };
}

string_enum!(PhysicalQuantity {
    Power => "power",
    Energy => "energy",
    CumulativeEnergy => "cumulative_energy",
    Voltage => "voltage",
    Current => "current",
});

impl PhysicalQuantity {
    /// Whether an AC decomposition (`ac_type`) applies.
    pub fn has_ac_type(&self) -> bool {
        matches!(
            self,
            PhysicalQuantity::Power | PhysicalQuantity::Energy | PhysicalQuantity::CumulativeEnergy
        )
    }
}

string_enum!(AcType {
    Active => "active",
    Apparent => "apparent",
    Reactive => "reactive",
});

string_enum!(
    /// The traditional appliance grouping.
    Traditional {
        Wet => "wet",
        Cold => "cold",
        ConsumerElectronics => "consumer electronics",
        Ict => "ICT",
        Cooking => "cooking",
        Lighting => "lighting",
        Heating => "heating",
    }
);

string_enum!(Size {
    Large => "large",
    Small => "small",
});

string_enum!(Source {
    Subjective => "subjective",
    Analysis => "analysis",
    Publication => "publication",
});

string_enum!(DistributionName {
    OnPower => "on_power",
    OnDuration => "on_duration",
    OffDuration => "off_duration",
    UsageHourPerDay => "usage_hour_per_day",
    UsageDayPerWeek => "usage_day_per_week",
    UsageMonthPerYear => "usage_month_per_year",
    Rooms => "rooms",
    Subtypes => "subtypes",
    ApplianceCorrelations => "appliance_correlations",
    Ownership => "ownership",
    OwnershipPerCountry => "ownership_per_country",
    OwnershipPerContinent => "ownership_per_continent",
});

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub physical_quantity: PhysicalQuantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ac_type: Option<AcType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Building {
    pub instance: u32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rooms: Vec<Room>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timezone: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geo_location: Option<GeoLocation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temporal_coverage: Option<DateRange>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub elec_meters: Vec<ElecMeter>,
}

impl Building {
    pub fn meter(&self, instance: u32) -> Option<&ElecMeter> {
        self.elec_meters.iter().find(|m| m.instance == instance)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Room {
    pub name: String,
    pub instance: u32,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ElecMeter {
    pub instance: u32,
    pub device_model: String,
    pub site_meter: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub submeter_of: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upstream_meter_in_building: Option<u32>,
    pub sensors: Vec<Sensor>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub appliances: Vec<Appliance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dominant_appliance: Option<ApplianceRef>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub preprocessing: Vec<PreprocessingStep>,
}

/// Identifies an appliance by type name and instance number.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ApplianceRef {
    #[serde(rename = "type")]
    pub type_name: String,
    pub instance: u32,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Sensor {
    pub data_location: String,
    #[serde(skip_serializing_if = "IndexMap::is_empty")]
    pub annotations: IndexMap<String, Node>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PreprocessingStep {
    pub filter: String,
    #[serde(flatten)]
    pub parameters: IndexMap<String, Node>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoomRef {
    pub name: String,
    pub instance: u32,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Appliance {
    #[serde(rename = "type")]
    pub type_name: String,
    pub instance: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subtype: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<Appliance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiple: Option<bool>,
    /// Watts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub on_power_threshold: Option<f64>,
    #[serde(skip_serializing_if = "IndexMap::is_empty")]
    pub nominal_consumption: IndexMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manufacturer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub year_of_manufacture: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub room: Option<RoomRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub main_room_light: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dates_active: Vec<DateRange>,
    /// Fields outside the core appliance schema; checked against the
    /// type's inherited `additional_properties`.
    #[serde(flatten)]
    pub extras: IndexMap<String, Node>,
}

impl Appliance {
    /// Bare appliance of the given type, instance 1.
    pub fn of_type(type_name: impl Into<String>) -> Self {
        Self {
            type_name: type_name.into(),
            instance: 1,
            ..Default::default()
        }
    }

    pub fn reference(&self) -> ApplianceRef {
        ApplianceRef {
            type_name: self.type_name.clone(),
            instance: self.instance,
        }
    }
}

/// Field names bound by the core appliance schema.
pub const APPLIANCE_CORE_FIELDS: &[&str] = &[
    "type",
    "instance",
    "subtype",
    "components",
    "count",
    "multiple",
    "on_power_threshold",
    "nominal_consumption",
    "manufacturer",
    "year_of_manufacture",
    "room",
    "main_room_light",
    "dates_active",
];

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Categories {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traditional: Option<Traditional>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<Size>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub electrical: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub google_shopping: Vec<String>,
}

impl Categories {
    /// Adds the set-valued terms of `other`; scalar taxonomies are untouched.
    pub fn absorb_sets(&mut self, other: &Categories) {
        for term in &other.electrical {
            if !self.electrical.contains(term) {
                self.electrical.push(term.clone());
            }
        }
        for term in &other.google_shopping {
            if !self.google_shopping.contains(term) {
                self.google_shopping.push(term.clone());
            }
        }
    }
}

pub type DistributionSet = BTreeMap<DistributionName, Vec<Prior>>;

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ApplianceType {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub subtypes: Vec<String>,
    pub categories: Categories,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<Appliance>,
    #[serde(
        skip_serializing_if = "BTreeMap::is_empty",
        serialize_with = "ser_distributions"
    )]
    pub distributions: DistributionSet,
    #[serde(skip_serializing_if = "SchemaFragment::is_empty")]
    pub additional_properties: SchemaFragment,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub do_not_inherit: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

fn ser_distributions<S: Serializer>(d: &DistributionSet, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(d.iter().map(|(k, v)| (k.as_str(), v)))
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Prior {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution_of_data: Option<DistributionData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<Source>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub specific_to: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub training_data: Option<String>,
    /// Generations between the declaring type and the queried type; set
    /// only by prior collection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DistributionData {
    Continuous {
        bin_edges: Vec<f64>,
        frequencies: Vec<f64>,
    },
    Categorical {
        categories: Vec<String>,
        frequencies: Vec<f64>,
    },
}

impl DistributionData {
    pub fn frequencies(&self) -> &[f64] {
        match self {
            DistributionData::Continuous { frequencies, .. }
            | DistributionData::Categorical { frequencies, .. } => frequencies,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ModelSpec {
    pub distribution_name: String,
    #[serde(skip_serializing_if = "IndexMap::is_empty")]
    pub parameters: IndexMap<String, f64>,
}

/// Pre-trained appliance model exchanged between tools.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct LearntModel {
    pub model_type: String,
    pub appliance_type: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub training_data: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub date_prepared: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameters: Option<Node>,
}
