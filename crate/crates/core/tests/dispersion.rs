use approx::assert_relative_eq;
use proptest::prelude::*;

use pairsource_core::dispersion::{refractive_index, wavevector_magnitude, Catalog};
use pairsource_core::phasematching::{energy_match, InteractionSpec, PhaseMatch};

#[test]
fn lithium_niobate_extraordinary_index_at_1550() {
    let cat = Catalog::builtin();
    let n = refractive_index(cat.get("PPLN").unwrap(), "e", 1550e-9).unwrap();
    assert_relative_eq!(n, 2.137_880_125_620_853, epsilon = 1e-12);
}

#[test]
fn potassium_niobate_a_index_at_810() {
    let cat = Catalog::builtin();
    let n = refractive_index(cat.get("KNbO3").unwrap(), "a", 810e-9).unwrap();
    assert_relative_eq!(n, 2.244_140_851_507_729, epsilon = 1e-12);
}

#[test]
fn lithium_niobate_pump_wavevector() {
    let cat = Catalog::builtin();
    let k = wavevector_magnitude(cat.get("PPLN").unwrap(), "e", 532e-9).unwrap();
    assert_relative_eq!(k, 26_387_455.327_199_7, max_relative = 1e-12);
}

#[test]
fn potassium_niobate_tuning_angle() {
    let cat = Catalog::builtin();
    let (_, sol) = InteractionSpec::catalog_default(cat.get("KNbO3").unwrap()).unwrap().solved().unwrap();
    match sol.solution {
        PhaseMatch::Angle { theta } => assert_relative_eq!(theta, 0.332_047_961_643_786_3, epsilon = 1e-8),
        other => panic!("expected an angle solution, got {other:?}"),
    }
}

#[test]
fn every_catalog_entry_phasematches_its_default_working_point() {
    for c in Catalog::builtin().iter() {
        let (spec, _) = InteractionSpec::catalog_default(c).unwrap().solved().unwrap();
        assert!(spec.collinear_mismatch().unwrap().abs() < 1e-6, "{}", c.name);
    }
}

proptest! {
    #[test]
    fn energy_match_is_an_involution(lp in 300e-9..1100e-9f64, frac in 1.05..1.95f64) {
        let ls = lp * frac.max(1.0 + 1e-3);
        let li = energy_match(lp, ls).unwrap();
        let back = energy_match(lp, li).unwrap();
        prop_assert!((back / ls - 1.0).abs() < 1e-12);
    }

    #[test]
    fn indices_stay_physical_inside_the_transparency_range(t in 0.0..1.0f64) {
        for c in Catalog::builtin().iter() {
            let [lo, hi] = c.transparency_range;
            let lambda = lo + t * (hi - lo);
            for axis in c.axes() {
                let n = refractive_index(c, axis, lambda).unwrap();
                prop_assert!(n > 1.0 && n < 3.0, "{} {axis} at {lambda}: {n}", c.name);
            }
        }
    }
}
