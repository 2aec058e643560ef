mod common;

use common::{random_forest, shuffled};
use nilm_meta::codes;
use nilm_meta::model::Dataset;
use nilm_meta::wiring::{
    build_wiring_forest, validate_wiring, MeterRef, WiringForest, DEFAULT_DEPTH_LIMIT,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn subtree(forest: &WiringForest, top: MeterRef) -> Vec<MeterRef> {
    let mut out = vec![top];
    let mut i = 0;
    while i < out.len() {
        out.extend(forest.submeters_of(out[i]).unwrap());
        i += 1;
    }
    out
}

/// Points a random non-root meter at a member of its own subtree.
pub fn with_cycle(rng: &mut impl Rng, d: &Dataset, forest: &WiringForest) -> Option<Dataset> {
    let candidates: Vec<MeterRef> = forest.edges.keys().copied().collect();
    if candidates.is_empty() {
        return None;
    }
    let x = candidates[rng.gen_range(0..candidates.len())];
    let below = subtree(forest, x);
    let y = below[rng.gen_range(0..below.len())];
    let mut out = d.clone();
    let b = out
        .buildings
        .iter_mut()
        .find(|b| Some(b.instance) == x.building)
        .unwrap();
    let m = b
        .elec_meters
        .iter_mut()
        .find(|m| m.instance == x.meter)
        .unwrap();
    m.submeter_of = Some(y.meter);
    m.upstream_meter_in_building = if y.building == x.building {
        None
    } else {
        y.building
    };
    Some(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn forest_shape(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_forest(&mut rng, 50);
        let (forest, diags) = validate_wiring(&d, usize::MAX);
        prop_assert!(diags.iter().all(|d| !d.is_error()), "{:?}", diags);
        prop_assert_eq!(forest.edges.len(), forest.nodes.len() - forest.roots.len());
        for n in &forest.nodes {
            let root = forest.root_of(*n).unwrap();
            prop_assert!(root.is_some_and(|r| forest.roots.contains(&r)));
        }
    }

    #[test]
    fn order_independent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_forest(&mut rng, 50);
        let (a, _) = build_wiring_forest(&d);
        let (b, _) = build_wiring_forest(&shuffled(&mut rng, &d));
        prop_assert_eq!(&a.nodes, &b.nodes);
        prop_assert_eq!(&a.edges, &b.edges);
        prop_assert_eq!(&a.roots, &b.roots);
        prop_assert_eq!(a.render_tree(), b.render_tree());
    }

    #[test]
    fn cycles_are_reported(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_forest(&mut rng, 50);
        let (forest, _) = build_wiring_forest(&d);
        if let Some(broken) = with_cycle(&mut rng, &d, &forest) {
            let (_, diags) = build_wiring_forest(&broken);
            prop_assert!(diags.iter().any(|d| d.code == codes::WIRING_CYCLE), "{:?}", diags);
        }
    }
}

#[test]
fn deep_chain_warns_once() {
    let mut d = Dataset::default();
    let mut b = nilm_meta::model::Building {
        instance: 1,
        ..Default::default()
    };
    for i in 1..=(DEFAULT_DEPTH_LIMIT as u32 + 3) {
        let mut m = common::meter(i, "D");
        if i == 1 {
            m.site_meter = true;
        } else {
            m.submeter_of = Some(i - 1);
        }
        b.elec_meters.push(m);
    }
    d.buildings.push(b);
    let (_, diags) = validate_wiring(&d, DEFAULT_DEPTH_LIMIT);
    let deep: Vec<_> = diags
        .iter()
        .filter(|d| d.code == codes::DEEP_TREE)
        .collect();
    assert_eq!(deep.len(), 1);
    assert_eq!(
        deep[0].path.to_string(),
        format!("buildings/1/elec_meters/{}", DEFAULT_DEPTH_LIMIT + 1)
    );
}
