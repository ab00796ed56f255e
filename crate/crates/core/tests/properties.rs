mod common;

use common::props::{
    homology_dims, lift_shift_residual, projection_after_hinge, psi_law_residual, random_surface, relabel,
};
use nalgebra::Vector3;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-10.0f64..10.0).prop_map(Vector3::from)
}

fn axis() -> impl Strategy<Value = Vector3<f64>> {
    point().prop_filter("nonzero axis", |v| v.norm() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rigid_transfers_compose_and_invert(a in point(), b in point(), c in point()) {
        prop_assert!(psi_law_residual(a, b, c) <= 1e-14);
    }

    #[test]
    fn edge_projection_kills_the_hinge_direction(l in axis()) {
        prop_assert!(projection_after_hinge(l) <= 1e-14);
    }

    #[test]
    fn homology_is_invariant_under_relabeling(seed in 0u64..10_000) {
        let s = random_surface(seed);
        prop_assert_eq!(homology_dims(&s), homology_dims(&relabel(&s, seed)));
    }

    #[test]
    fn connecting_map_ignores_the_choice_of_lift(seed in 0u64..10_000) {
        prop_assert!(lift_shift_residual(&random_surface(seed), seed) <= 1e-9);
    }
}
