use inacc_core::factory::{cluster_state, mix_seed, preset};
use inacc_core::mps::{finite_chain_state, finite_sector_analysis, gram_sector_analysis};
use inacc_core::observables::{analyze, analyze_oracle};

fn tolerance(ratio: f64, n: usize) -> f64 {
    1e-6f64.max(10.0 * ratio.powi(n as i32 / 2))
}

#[test]
fn cluster_agrees_exactly() {
    let c = cluster_state();
    let fp = analyze(&c).unwrap();
    let or = analyze_oracle(&c, 10, 5).unwrap();
    for (a, b) in fp.p.iter().zip(&or.p) {
        assert!((a - b).abs() < 1e-10);
    }
    assert!((fp.e_inacc - or.e_inacc).abs() < 1e-10);
}

#[test]
fn gram_oracle_matches_state_vector_on_preset_samples() {
    for name in ["nonmnc-z4z2-n[1,1]", "mnc-z2z2"] {
        let sampler = preset(name).unwrap().sampler().unwrap();
        let state = sampler.sample(mix_seed(17, 0)).unwrap();
        let group = state.group().clone();
        let n = if state.tensor().d() == 8 { 6 } else { 5 };
        let psi = finite_chain_state(state.tensor(), n).unwrap();
        let brute = finite_sector_analysis(&psi, state.labels(), &group, n, 3).unwrap();
        let gram = gram_sector_analysis(state.tensor(), state.labels(), &group, n, 3).unwrap();
        for (a, b) in brute.probabilities.iter().zip(&gram.probabilities) {
            assert!((a - b).abs() < 1e-10, "{name}: {a} vs {b}");
        }
        assert!((brute.e - gram.e).abs() < 1e-8, "{name}");
        assert!((brute.e_acc - gram.e_acc).abs() < 1e-8, "{name}");
    }
}

/// Complex characters of Z4 distinguish `χ_α` from `conj(χ_α)` in the
/// probability formula; agreement with the projector oracle fixes the sign.
#[test]
fn fixed_point_probabilities_match_projector_on_complex_characters() {
    let mut conjugate_deviation = 0.0f64;
    for name in ["nonmnc-z4z2", "triv-z4z2", "nonmnc-z4z2-n[1,5]"] {
        let sampler = preset(name).unwrap().sampler().unwrap();
        let group = sampler.phase.rep.group().clone();
        for i in 0..3 {
            let state = sampler.sample(mix_seed(99, i)).unwrap();
            let ev = state.tensor().transfer_spectrum().unwrap();
            let ratio = ev[1].norm() / ev[0].norm();
            let fp = analyze(&state).unwrap();
            let or = analyze_oracle(&state, 10, 5).unwrap();
            let tol = tolerance(ratio, 10);
            let dev = fp.p.iter().zip(&or.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(dev < tol, "{name} sample {i}: deviation {dev:.3e} > {tol:.3e}, p_fp={:?} p_or={:?}", fp.p, or.p);
            assert!(or.residuals.entropy_identity < 1e-8);
            for (a, alpha) in group.labels().iter().enumerate() {
                let conj = fp.p[group.label_index(&group.label_inverse(alpha))];
                conjugate_deviation = conjugate_deviation.max((conj - or.p[a]).abs());
            }
        }
    }
    assert!(conjugate_deviation > 1e-3, "conjugated convention indistinguishable ({conjugate_deviation:.3e})");
}
