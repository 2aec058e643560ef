mod common;

use common::{random_dataset_docs, validate_dir, write_dataset_dir};
use nilm_meta::export::canonical_json;
use nilm_meta::loader::{bind, load_dataset_path};
use nilm_meta::typedb::TypeLibrary;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exports, re-imports the file and exports again.
pub fn reexport(json: &str) -> String {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("export.json");
    std::fs::write(&file, json).unwrap();
    let (d, diags) = bind(&load_dataset_path(&file).unwrap());
    assert!(diags.is_empty(), "{diags:?}");
    canonical_json(&d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_datasets_round_trip(seed in any::<u64>(), buildings in 1u32..4, meters in 1u32..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (dataset, docs) = random_dataset_docs(&mut rng, buildings, meters);
        let dir = tempfile::tempdir().unwrap();
        write_dataset_dir(dir.path(), &dataset, &docs);
        let (d, report) = validate_dir(dir.path(), &TypeLibrary::seed());
        prop_assert!(report.is_valid(), "{}", report.to_text());
        let first = canonical_json(&d);
        prop_assert_eq!(reexport(&first), first);
    }
}
