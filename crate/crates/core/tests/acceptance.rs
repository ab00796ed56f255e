//! Acceptance runner: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::props::{
    homology_dims, lift_shift_residual, projection_after_hinge, psi_law_residual, random_surface, relabel,
};
use common::{flat, shape, test_surfaces, two_quads};
use nalgebra::{DMatrix, DVector, Vector3};
use origami_cosheaf::io::generate::random_chain;
use origami_cosheaf::io::report::relative_gram_determinant;
use origami_cosheaf::serial::{check_serial, serial_chain_operators, SerialChain};
use origami_cosheaf::{
    build_constant_model, build_exact_sequence, build_hinge_model, build_rigid_model, build_spatial_model, linalg,
    KinematicModels, OrigamiSurface, RankPolicy, Support, Tolerances,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn models(s: OrigamiSurface) -> KinematicModels {
    KinematicModels::build(s, Tolerances::default()).unwrap()
}

fn random_in(basis: &DMatrix<f64>, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    basis * DVector::from_fn(basis.ncols(), |_, _| rng.random_range(-1.0..1.0))
}

fn two_panel() -> Outcome {
    let m = build_spatial_model(&two_quads::<f64>()).map_err(|e| e.to_string())?;
    let shape = m.complex.d2.shape();
    let dim = m.homology(2, RankPolicy::new(1e-9)).dim();
    ensure(shape == (5, 12) && dim == 7, format!("shape {shape:?}, dim {dim}"))?;
    Ok(format!("boundary {}x{}, dim H2 = {dim}", shape.0, shape.1))
}

fn rigid_global_motions() -> Outcome {
    for (name, s) in test_surfaces() {
        let d = build_rigid_model(&s).unwrap().homology(2, RankPolicy::default()).dim();
        ensure(d == 6, format!("{name}: dim H2 = {d}"))?;
    }
    Ok("dim H2 = 6 on every surface".into())
}

fn loop_ledger() -> Outcome {
    let mut loops = Vec::new();
    for (name, s) in test_surfaces() {
        let b1 = s.base_homology().b1;
        let d = models(s).dimensions();
        ensure(d.ker_iota_star + 6 == d.h2_spatial, format!("{name}: ker {} vs H2 {}", d.ker_iota_star, d.h2_spatial))?;
        ensure(d.h1_rigid == 6 * b1, format!("{name}: H1 {} with b1 = {b1}", d.h1_rigid))?;
        if b1 > 0 {
            loops.push(format!("{name} {}", d.h1_rigid));
        }
    }
    Ok(format!("H1 of rigid model: {}", loops.join(", ")))
}

fn truss_ledger() -> Outcome {
    let mut worst = f64::INFINITY;
    for (name, s) in test_surfaces() {
        let m = models(s);
        let d = m.dimensions();
        ensure(d.truss_kernel == d.h2_spatial, format!("{name}: truss {} vs H2 {}", d.truss_kernel, d.h2_spatial))?;
        let basis = &m.theta.spatial_basis().basis;
        let mut y = DMatrix::zeros(m.truss_dim(), basis.ncols());
        for (j, nu) in basis.column_iter().enumerate() {
            y.set_column(j, &m.eta_map(&nu.into_owned()).unwrap().values);
        }
        let g = relative_gram_determinant(&y);
        ensure(g > 1e-12, format!("{name}: Gram ratio {g:e}"))?;
        worst = worst.min(g);
    }
    Ok(format!("smallest Gram ratio {worst:.3e}"))
}

fn round_trips() -> Outcome {
    let surfaces = [
        ("two_quads", two_quads()),
        ("chain(5)", shape("chain", &[5.0])),
        ("single_vertex(4)", shape("single_vertex", &[4.0, 20.0])),
        ("single_vertex(6)", shape("single_vertex", &[6.0, 20.0])),
        ("grid(3,3)", shape("grid", &[3.0, 3.0])),
        ("flat grid(3,3)", flat("grid", &[3.0, 3.0])),
        ("miura(3,3,30)", shape("miura", &[3.0, 3.0, 30.0])),
    ];
    let mut worst: f64 = 0.0;
    for (k, (name, s)) in surfaces.into_iter().enumerate() {
        let m = models(s);
        let theta = random_in(&m.consistent_hinge_basis(), k as u64);
        let r = m.hinge_to_truss(&theta).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.passed(), format!("{name}: conversion checks failed"))?;
        let a = r.roundtrip_residual.unwrap();
        let b = r.truss.as_ref().unwrap().relative_residual();
        ensure(a <= 1e-9 && b <= 1e-9, format!("{name}: round trip {a:e}, truss {b:e}"))?;
        worst = worst.max(a).max(b);
    }
    Ok(format!("max relative residual {worst:.3e}"))
}

fn serial_chains() -> Outcome {
    let (mut rec, mut inv, mut con): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for n in 1..=8 {
        let chain = SerialChain::from_surface(random_chain::<f64>(n, 42 + n as u64).unwrap()).unwrap();
        let ops = serial_chain_operators(&chain).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let probes: Vec<_> = (0..4).map(|_| DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))).collect();
        let c = check_serial(&chain, &ops, &probes, RankPolicy::default()).unwrap();
        ensure(
            c.recurrence <= 1e-12 && c.inverse <= 1e-12 && c.connecting <= 1e-9,
            format!("n = {n}: {c:?}"),
        )?;
        rec = rec.max(c.recurrence);
        inv = inv.max(c.inverse);
        con = con.max(c.connecting);
    }
    Ok(format!("recurrence {rec:.1e}, inverse {inv:.1e}, connecting {con:.1e}"))
}

fn exactness() -> Outcome {
    let (mut ex, mut dd): (f64, f64) = (0.0, 0.0);
    for (name, s) in test_surfaces() {
        let seq = build_exact_sequence(&s).unwrap();
        let r = &seq.report;
        ensure(r.passed() && r.squares.len() == 9, format!("{name}: {:?}", r.first_violation()))?;
        let e = r.max_exactness_residual().max(r.max_square_residual());
        ensure(e <= 1e-12, format!("{name}: residual {e:e}"))?;
        ex = ex.max(e);
        let constant = build_constant_model(&s, 6, Support::All).unwrap();
        for m in [&seq.hinge, &seq.spatial, &seq.rigid, &constant] {
            let c = m.complex.composition_residual();
            ensure(c <= 1e-11, format!("{name} {:?}: dd = {c:e}", m.kind))?;
            dd = dd.max(c);
        }
    }
    Ok(format!("exactness {ex:.1e}, dd {dd:.1e}"))
}

fn single_vertex() -> Outcome {
    let p = RankPolicy::default();
    for n in [4usize, 5, 6] {
        let s = shape("single_vertex", &[n as f64, 20.0]);
        let axes = DMatrix::from_fn(3, n, |r, c| s.edge_axis(s.topology().vertex_edges[0][c])[r]);
        let oracle = n - linalg::rank(&axes, p);
        let d = build_hinge_model(&s).unwrap().homology(1, p).dim();
        ensure(d == oracle && d == n - 3, format!("degree {n}: {d} vs oracle {oracle}"))?;
    }
    let s = flat("single_vertex", &[4.0, 0.0]);
    let axes = DMatrix::from_fn(3, 4, |r, c| s.edge_axis(s.topology().vertex_edges[0][c])[r]);
    let oracle = 4 - linalg::rank(&axes, p);
    let d = build_hinge_model(&s).unwrap().homology(1, p).dim();
    ensure(d == 2 && oracle == 2, format!("flat degree 4: {d} vs oracle {oracle}"))?;
    Ok("degrees 4, 5, 6 give 1, 2, 3; flat degree 4 gives 2".into())
}

fn obstruction() -> Outcome {
    let m = models(shape("annulus", &[1.0, 8.0, 1.0]));
    let bad = m.obstructed_hinge_basis().column(0).into_owned();
    let r = m.theta_pinv(&bad).map_err(|e| e.to_string())?;
    let ob = r.obstruction.norm();
    ensure(r.obstructed && r.spatial.is_none() && ob > 1e-9, format!("obstruction {ob:e} not flagged"))?;
    let good = random_in(&m.consistent_hinge_basis(), 9);
    let r = m.hinge_to_truss(&good).map_err(|e| e.to_string())?;
    let a = r.roundtrip_residual.unwrap_or(f64::INFINITY);
    let b = r.truss.as_ref().map(|t| t.relative_residual()).unwrap_or(f64::INFINITY);
    ensure(!r.obstructed && r.passed() && a < 1e-9 && b < 1e-9, format!("consistent cycle: {a:e}, {b:e}"))?;
    Ok(format!("obstruction norm {ob:.3e}; consistent cycle residual {:.1e}", a.max(b)))
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut point = || Vector3::from_fn(|_, _| rng.random_range(-10.0..10.0));
    let (mut psi, mut proj, mut lift): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for seed in 0..100u64 {
        psi = psi.max(psi_law_residual(point(), point(), point()));
        proj = proj.max(projection_after_hinge(point()));
        let s = random_surface(seed);
        ensure(homology_dims(&s) == homology_dims(&relabel(&s, seed)), format!("relabeling changed seed {seed}"))?;
        lift = lift.max(lift_shift_residual(&s, seed));
    }
    ensure(psi <= 1e-14 && proj <= 1e-14 && lift <= 1e-9, format!("psi {psi:e}, projection {proj:e}, lift {lift:e}"))?;
    Ok(format!("100 instances each; psi {psi:.1e}, projection {proj:.1e}, lift {lift:.1e}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("two-panel surface", two_panel),
        ("rigid model global motions", rigid_global_motions),
        ("loop obstruction ledger", loop_ledger),
        ("truss kernel ledger", truss_ledger),
        ("hinge to truss round trip", round_trips),
        ("serial chains", serial_chains),
        ("exact sequence", exactness),
        ("degree-n single vertex", single_vertex),
        ("obstruction detection", obstruction),
        ("property suite", properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2} s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.2} s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
