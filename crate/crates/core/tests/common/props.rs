//! Property checks shared by the proptest suite and the acceptance runner.

use nalgebra::{DVector, Matrix6, Vector3};
use origami_cosheaf::io::{generate, Shape};
use origami_cosheaf::spatial::{edge_projection, hinge_embed, rigid_transfer};
use origami_cosheaf::{build_exact_sequence, connecting_map, linalg, OrigamiSurface, RankPolicy};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Max deviation from `Psi_{b,c} Psi_{a,b} = Psi_{a,c}` and `Psi_{b,a} Psi_{a,b} = I`,
/// relative to the size of the points.
pub fn psi_law_residual(a: Vector3<f64>, b: Vector3<f64>, c: Vector3<f64>) -> f64 {
    let ab = rigid_transfer(a, b);
    let composed = ab.then(&rigid_transfer(b, c));
    let direct = rigid_transfer(a, c);
    let round = ab.then(&ab.inverse());
    let scale = 1.0 + a.norm() + b.norm() + c.norm();
    let r1 = (composed.matrix - direct.matrix).abs().max();
    let r2 = (round.matrix - Matrix6::identity()).abs().max();
    r1.max(r2) / scale
}

/// `|pi_e iota_e|` for an arbitrary nonzero axis.
pub fn projection_after_hinge(axis: Vector3<f64>) -> f64 {
    let p = edge_projection(&axis).unwrap();
    let h = hinge_embed(&axis).unwrap();
    (p.matrix * h.matrix).abs().max()
}

/// A small surface chosen by `seed`; about half are left unjittered, so flat
/// vertices with extra hinge freedom are covered too.
pub fn random_surface(seed: u64) -> OrigamiSurface {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = match rng.random_range(0..5) {
        0 => Shape::Chain { n: rng.random_range(1..5) },
        1 => Shape::SingleVertex { degree: rng.random_range(4..8), fold_angle: 0.0 },
        2 => Shape::Grid { rows: 2, cols: rng.random_range(2..4) },
        3 => Shape::Annulus { rows: 1, cols: rng.random_range(6..9), hole: 1.0 },
        _ => Shape::Cylinder { rows: 1, cols: rng.random_range(4..7) },
    };
    let jitter = rng.random_bool(0.5);
    generate(shape, seed, jitter).unwrap()
}

/// Same surface with vertex ids permuted, faces shuffled, and each face
/// cycle rotated and possibly reversed.
pub fn relabel(s: &OrigamiSurface, seed: u64) -> OrigamiSurface {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut perm: Vec<usize> = (0..s.n_vertices()).collect();
    perm.shuffle(&mut rng);
    let mut pts = vec![Vector3::zeros(); s.n_vertices()];
    for (old, &new) in perm.iter().enumerate() {
        pts[new] = s.vertex_positions()[old];
    }
    let mut faces: Vec<Vec<usize>> = s
        .faces()
        .iter()
        .map(|f| {
            let mut g: Vec<usize> = f.iter().map(|&v| perm[v]).collect();
            let k = rng.random_range(0..g.len());
            g.rotate_left(k);
            if rng.random_bool(0.5) {
                g.reverse();
            }
            g
        })
        .collect();
    faces.shuffle(&mut rng);
    OrigamiSurface::build(pts, faces).unwrap()
}

/// Homology dimensions of the hinge, spatial and rigid models in every degree.
pub fn homology_dims(s: &OrigamiSurface) -> Vec<usize> {
    let seq = build_exact_sequence(s).unwrap();
    let p = RankPolicy::default();
    [&seq.hinge, &seq.spatial, &seq.rigid]
        .iter()
        .flat_map(|m| (0..3).map(move |d| m.homology(d, p).dim()))
        .collect()
}

/// Shifting a lift by `z ∈ ker pi` in degree 1 must move `iota^+ ∂ y` only by
/// a hinge boundary, so the connecting map output is unchanged. Returns the
/// worst relative violation of either statement.
pub fn lift_shift_residual(s: &OrigamiSurface, seed: u64) -> f64 {
    let seq = build_exact_sequence(s).unwrap();
    let policy = RankPolicy::default();
    let c = connecting_map(&seq.iota, &seq.pi, 1, policy).unwrap();
    let boundaries = linalg::range_basis(&seq.hinge.complex.boundary(1), policy);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let z = DVector::from_fn(c.lift_kernel.ncols(), |_, _| rng.random_range(-1.0..1.0));
        let shift = &c.lift_kernel * z;
        let w = &c.iota_pinv * (&c.boundary * &shift);
        let off = &w - &boundaries * (boundaries.transpose() * &w);
        worst = worst.max(off.norm() / shift.norm().max(1.0));
        for q in c.source_basis.basis.column_iter() {
            let y = &c.pi_pinv * q;
            let base = c.transport(&y);
            worst = worst.max((c.transport(&(&y + &shift)) - &base).norm() / base.norm().max(1.0));
        }
    }
    worst
}
