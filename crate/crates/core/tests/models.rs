mod common;

use common::{flat, moebius, shape, test_surfaces, two_quads};
use nalgebra::DMatrix;
use origami_cosheaf::linalg;
use origami_cosheaf::models::constant_rigid_iso;
use origami_cosheaf::{
    build_constant_model, build_exact_sequence, build_hinge_model, build_rigid_model, build_spatial_model, Cell, Error,
    OrigamiSurface, RankPolicy, Support,
};

#[test]
fn two_quad_spatial_boundary_is_5_by_12_with_7_dim_kernel() {
    let s = two_quads::<f64>();
    let m = build_spatial_model(&s).unwrap();
    assert_eq!(m.complex.d2.shape(), (5, 12));
    assert_eq!(m.homology(2, RankPolicy::default()).dim(), 7);
}

#[test]
fn grid_3x3_hand_count() {
    // Flat: each of the four crease lines folds on its own.
    let s = flat("grid", &[3.0, 3.0]);
    assert_eq!((s.n_vertices(), s.n_edges(), s.n_faces()), (16, 24, 9));
    assert_eq!((s.interior_edges().len(), s.interior_vertices().len()), (12, 4));
    let h = build_hinge_model(&s).unwrap();
    assert_eq!(h.complex.d1.shape(), (12, 12));
    assert_eq!(h.homology(1, RankPolicy::default()).dim(), 4);
    assert_eq!(build_spatial_model(&s).unwrap().homology(2, RankPolicy::default()).dim(), 10);
    // Generic position: the twelve vertex equations pin every hinge.
    let s = shape("grid", &[3.0, 3.0]);
    assert_eq!(build_hinge_model(&s).unwrap().homology(1, RankPolicy::default()).dim(), 0);
    assert_eq!(build_spatial_model(&s).unwrap().homology(2, RankPolicy::default()).dim(), 6);
}

#[test]
fn degree_n_vertex_matches_direct_svd() {
    for n in [4usize, 5, 6] {
        let s = shape("single_vertex", &[n as f64, 20.0]);
        let h = build_hinge_model(&s).unwrap();
        // Oracle: the 3 x n matrix of hinge axes at the centre.
        let axes = DMatrix::from_fn(3, n, |r, c| s.edge_axis(s.topology().vertex_edges[0][c])[r]);
        let oracle = n - linalg::rank(&axes, RankPolicy::default());
        assert_eq!(h.homology(1, RankPolicy::default()).dim(), oracle);
        assert_eq!(oracle, n - 3);
    }
    let s = flat("single_vertex", &[4.0, 0.0]);
    assert_eq!(build_hinge_model(&s).unwrap().homology(1, RankPolicy::default()).dim(), 2);
}

#[test]
fn boundary_squares_to_zero_for_all_four_cosheaves() {
    for (name, s) in test_surfaces() {
        let models = [
            build_hinge_model(&s).unwrap(),
            build_spatial_model(&s).unwrap(),
            build_rigid_model(&s).unwrap(),
            build_constant_model(&s, 6, Support::All).unwrap(),
        ];
        for m in &models {
            assert!(m.complex.composition_residual() <= 1e-11, "{name} {:?}", m.kind);
        }
    }
}

#[test]
fn rigid_homology_counts_global_motions_and_loops() {
    for (name, s) in test_surfaces() {
        let b = s.base_homology();
        let m = build_rigid_model(&s).unwrap();
        assert_eq!(m.homology(2, RankPolicy::default()).dim(), 6 * b.b0, "{name}");
        assert_eq!(m.homology(1, RankPolicy::default()).dim(), 6 * b.b1, "{name}");
    }
}

#[test]
fn constant_se3_cosheaf_is_isomorphic_to_rigid_model() {
    let s = shape("annulus", &[2.0, 5.0, 1.0]);
    let iso = constant_rigid_iso(&s).unwrap();
    for kind in [(2, 1), (1, 0), (2, 0)] {
        assert!(iso.naturality_by_kind(kind).0 < 1e-12);
    }
    let c = build_constant_model(&s, 6, Support::Interior).unwrap();
    let r = build_rigid_model(&s).unwrap();
    for d in 0..3 {
        assert_eq!(c.homology(d, RankPolicy::default()).dim(), r.homology(d, RankPolicy::default()).dim());
    }
}

#[test]
fn exact_sequence_holds_on_every_test_surface() {
    for (name, s) in test_surfaces() {
        let seq = build_exact_sequence(&s).unwrap();
        assert!(seq.report.passed(), "{name}");
        assert_eq!(seq.report.squares.len(), 9);
        assert!(seq.report.max_exactness_residual() <= 1e-12, "{name}");
        assert!(seq.report.max_square_residual() <= 1e-12, "{name}");
    }
}

#[test]
fn broken_iota_component_is_flagged() {
    let s = two_quads::<f64>();
    let seq = build_exact_sequence(&s).unwrap();
    let e = s.interior_edges()[0];
    let bad = seq.iota.clone().with_component(Cell::Edge(e), DMatrix::from_column_slice(6, 1, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0])).unwrap();
    let report = origami_cosheaf::check_exact_sequence(&bad, &seq.pi, 1e-12).unwrap();
    assert!(!report.passed());
    assert!(report.first_violation().is_some());
}

#[test]
fn moebius_band_is_rejected() {
    let (pts, faces) = moebius();
    assert!(matches!(OrigamiSurface::build(pts, faces), Err(Error::NonOrientable { .. })));
}

#[test]
fn single_precision_smoke() {
    let s = two_quads::<f32>();
    let m = build_spatial_model(&s).unwrap();
    assert_eq!(m.complex.d2.shape(), (5, 12));
    assert_eq!(m.homology(2, RankPolicy::default()).dim(), 7);
    let models = origami_cosheaf::KinematicModelsF32::build(s, origami_cosheaf::Tolerances::default()).unwrap();
    let d = models.dimensions();
    assert_eq!((d.h2_spatial, d.h2_rigid, d.truss_kernel), (7, 6, 7));
}

#[test]
fn pinned_base_removes_global_motions() {
    let s = shape("chain", &[4.0]);
    let m = build_spatial_model(&s).unwrap().pinned(&[Cell::Face(0)]).unwrap();
    assert_eq!(m.homology(2, RankPolicy::default()).dim(), 4);
}
