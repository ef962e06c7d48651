mod common;

use chiomega_core::learner::{build_dense, build_seq_cnn, build_wide_cnn};
use common::{check_spec, layer_kind_models, GRAD_TOL};

#[test]
fn every_layer_kind_matches_finite_differences() {
    for (i, (kind, spec)) in layer_kind_models().into_iter().enumerate() {
        let r = check_spec(&spec, 20, 16, i as u64);
        assert!(r.max_rel_err <= GRAD_TOL, "{kind}: max relative error {}", r.max_rel_err);
        assert!(r.checked > 10 * r.skipped.max(1), "{kind}: {r:?}");
    }
}

#[test]
fn small_architectures_match_finite_differences() {
    let specs = [
        ("dense", build_dense(12, 0.01).unwrap()),
        ("seq_cnn", build_seq_cnn(12, 0.02).unwrap()),
        ("wide_cnn", build_wide_cnn(50, 0.01).unwrap()),
    ];
    for (i, (name, spec)) in specs.iter().enumerate() {
        let r = check_spec(spec, 3, 4, 100 + i as u64);
        assert!(r.max_rel_err <= GRAD_TOL, "{name}: max relative error {}", r.max_rel_err);
        assert!(r.checked > 0, "{name}: {r:?}");
    }
}
