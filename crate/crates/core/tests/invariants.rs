use inacc_core::factory::{apply_filter, preset, FilterSpec, Keep};
use inacc_core::observables::analyze;
use proptest::prelude::*;

const PRESETS: [&str; 4] = ["triv-z2z2", "mnc-z2z2", "triv-z4z2", "nonmnc-z4z2"];

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn reports_are_consistent_for_filtered_random_states(
        which in 0usize..PRESETS.len(),
        seed in any::<u64>(),
        lambda in 0.01f64..=1.0,
    ) {
        let p = preset(PRESETS[which]).unwrap();
        let state = p.sampler().unwrap().sample(seed).unwrap();
        let trivial = p.group().unwrap().trivial_label();
        let state = apply_filter(&state, &FilterSpec::new(Keep::Labels(vec![trivial]), lambda).unwrap()).unwrap();
        let r = analyze(&state).unwrap();

        prop_assert!((r.p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(r.p.iter().all(|&x| x >= 0.0));
        prop_assert!(r.e_acc >= -1e-9);
        prop_assert!(r.e_inacc >= -1e-12);
        prop_assert!((r.e - r.e_acc - r.e_inacc).abs() < 1e-9);
        prop_assert!(r.bound_satisfied, "{} outside [{}, {}]", r.e_inacc, r.lower_bound, r.upper_bound);
        prop_assert!(r.residuals.fourier < 1e-10);
        for class in &r.degeneracy_classes {
            let ps: Vec<f64> = class.iter().map(|l| r.probability(l).unwrap()).collect();
            let hi = ps.iter().cloned().fold(f64::MIN, f64::max);
            let lo = ps.iter().cloned().fold(f64::MAX, f64::min);
            prop_assert!(hi - lo < 1e-8);
        }
    }
}
