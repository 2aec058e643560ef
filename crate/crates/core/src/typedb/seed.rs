//! Common metadata compiled into the crate.

macro_rules! seed_file {
    ($path:literal) => {
        (
            $path,
            include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/seed/", $path)),
        )
    };
}

pub(crate) const TYPES: &[(&str, &str)] = &[
    seed_file!("central_metadata/appliance_types/appliance.yaml"),
    seed_file!("central_metadata/appliance_types/computer.yaml"),
    seed_file!("central_metadata/appliance_types/computer_monitor.yaml"),
    seed_file!("central_metadata/appliance_types/cooker.yaml"),
    seed_file!("central_metadata/appliance_types/dimmer.yaml"),
    seed_file!("central_metadata/appliance_types/fluorescent_lamp.yaml"),
    seed_file!("central_metadata/appliance_types/freezer.yaml"),
    seed_file!("central_metadata/appliance_types/fridge.yaml"),
    seed_file!("central_metadata/appliance_types/fridge_freezer.yaml"),
    seed_file!("central_metadata/appliance_types/heating_element.yaml"),
    seed_file!("central_metadata/appliance_types/incandescent_lamp.yaml"),
    seed_file!("central_metadata/appliance_types/lamp.yaml"),
    seed_file!("central_metadata/appliance_types/led_lamp.yaml"),
    seed_file!("central_metadata/appliance_types/light.yaml"),
    seed_file!("central_metadata/appliance_types/motor.yaml"),
    seed_file!("central_metadata/appliance_types/radio.yaml"),
    seed_file!("central_metadata/appliance_types/television.yaml"),
    seed_file!("central_metadata/appliance_types/washing_machine.yaml"),
    seed_file!("central_metadata/appliance_types/wine_cooler.yaml"),
];

pub(crate) const ROOMS: (&str, &str) = seed_file!("vocab/rooms.yaml");
pub(crate) const TAXONOMIES: (&str, &str) = seed_file!("vocab/taxonomies.yaml");
