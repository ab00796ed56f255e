//! Analysis reports: dimension ledgers and consistency checks for one surface.

use std::collections::BTreeMap;
use std::fmt::Write;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::cell_complex::{BaseHomology, OrigamiSurface};
use crate::error::Result;
use crate::io::json::{format_float, to_canonical_json};
use crate::linalg;
use crate::maps::{Dimensions, KinematicModels, Tolerances};
use crate::models::{build_constant_model, Support};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub passed: bool,
    /// The measured quantity (a residual, or a dimension difference).
    pub value: f64,
    /// The threshold the value is compared against.
    pub threshold: f64,
}

impl CheckResult {
    fn at_most(value: f64, threshold: f64) -> Self {
        Self { passed: value <= threshold, value, threshold }
    }

    fn at_least(value: f64, threshold: f64) -> Self {
        Self { passed: value >= threshold, value, threshold }
    }

    fn equal(got: usize, want: usize) -> Self {
        let gap = got.abs_diff(want) as f64;
        Self { passed: gap == 0.0, value: gap, threshold: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub interior_edges: usize,
    pub interior_vertices: usize,
    pub truss_vertices: usize,
    pub truss_bars: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub counts: Counts,
    pub betti: BaseHomology,
    pub dimensions: Dimensions,
    pub tolerance: f64,
    pub checks: BTreeMap<String, CheckResult>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

/// `det(G) / prod diag(G)` for the Gram matrix of the columns of `y`:
/// 1 for orthogonal columns, 0 for dependent ones.
pub fn relative_gram_determinant<T: Scalar>(y: &DMatrix<T>) -> f64 {
    if y.ncols() == 0 {
        return 1.0;
    }
    let g = y.transpose() * y;
    let diag: f64 = g.diagonal().iter().map(|d| d.to_f64_lossy()).product();
    if diag <= 0.0 {
        return 0.0;
    }
    let sv = linalg::FullSvd::new(y);
    // det(G) as a product of squared singular values, which stays accurate
    // where an LU determinant would underflow.
    let log_det: f64 = sv.sigma.iter().take(y.ncols()).map(|s| 2.0 * s.to_f64_lossy().max(0.0).ln()).sum();
    let log_diag: f64 = g.diagonal().iter().map(|d| d.to_f64_lossy().ln()).sum();
    (log_det - log_diag).exp()
}

/// Builds every model on `surface` and runs the ledgers and checks.
pub fn analyze<T: Scalar>(surface: OrigamiSurface<T>, tol: Tolerances<T>) -> Result<(KinematicModels<T>, AnalysisReport)> {
    let betti = surface.base_homology();
    let constant = build_constant_model(&surface, 6, Support::All)?;
    let m = KinematicModels::build(surface, tol)?;
    let dims = m.dimensions();
    let mut checks = BTreeMap::new();
    let mut put = |k: &str, c: CheckResult| {
        checks.insert(k.to_string(), c);
    };

    let seq = &m.sequence;
    put("exactness", CheckResult::at_most(seq.report.max_exactness_residual().max(seq.report.max_square_residual()), 1e-12));
    let dd = 1e-11;
    put("d_squared_hinge", CheckResult::at_most(seq.hinge.complex.composition_residual().to_f64_lossy(), dd));
    put("d_squared_spatial", CheckResult::at_most(seq.spatial.complex.composition_residual().to_f64_lossy(), dd));
    put("d_squared_rigid", CheckResult::at_most(seq.rigid.complex.composition_residual().to_f64_lossy(), dd));
    put("d_squared_constant", CheckResult::at_most(constant.complex.composition_residual().to_f64_lossy(), dd));
    put("theta_block_formula", CheckResult::at_most(m.theta.direct_agreement.to_f64_lossy(), 1e-10));
    put("rigid_h2_global_motions", CheckResult::equal(dims.h2_rigid, 6 * betti.b0));
    put("rigid_h1_loops", CheckResult::equal(dims.h1_rigid, 6 * betti.b1));
    put("hinge_kernel_ledger", CheckResult::equal(dims.ker_iota_star, dims.h2_spatial.saturating_sub(dims.h2_rigid)));
    put("theta_image_is_ker_iota_star", CheckResult::equal(dims.rank_theta, dims.ker_iota_star));
    put("truss_kernel_ledger", CheckResult::equal(dims.truss_kernel, dims.h2_spatial));

    // eta sends an H2 S basis into ker M' injectively.
    let basis = &m.theta.spatial_basis().basis;
    let mut image = DMatrix::zeros(m.truss_dim(), basis.ncols());
    let mut worst = 0.0_f64;
    let mut eta_ok = true;
    for (j, col) in basis.column_iter().enumerate() {
        match m.eta_map(&col.into_owned()) {
            Ok(y) => {
                worst = worst.max(y.relative_residual().to_f64_lossy());
                image.set_column(j, &y.values);
            }
            Err(_) => eta_ok = false,
        }
    }
    let tol_f = tol.cycle.to_f64_lossy();
    put("eta_lands_in_truss_kernel", CheckResult { passed: eta_ok && worst <= tol_f, value: worst, threshold: tol_f });
    let gram = if eta_ok { relative_gram_determinant(&image) } else { 0.0 };
    put("eta_full_rank", CheckResult::at_least(gram, 1e-12));

    let passed = checks.values().all(|c| c.passed);
    let topo = m.surface.topology();
    let counts = Counts {
        vertices: topo.n_vertices(),
        edges: topo.n_edges(),
        faces: topo.n_faces(),
        interior_edges: topo.interior_edges().len(),
        interior_vertices: topo.interior_vertices().len(),
        truss_vertices: m.linkage.n_vertices(),
        truss_bars: m.linkage.n_edges(),
    };
    let report = AnalysisReport {
        counts,
        betti,
        dimensions: dims,
        tolerance: tol.rank.to_f64_lossy(),
        checks,
        passed,
        timing_ms: None,
    };
    Ok((m, report))
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        to_canonical_json(&serde_json::to_value(self).expect("report is serializable"))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.counts;
        let d = &self.dimensions;
        let _ = writeln!(out, "surface     V={} E={} F={} (interior: {} edges, {} vertices)", c.vertices, c.edges, c.faces, c.interior_edges, c.interior_vertices);
        let _ = writeln!(out, "betti       b0={} b1={} b2={}", self.betti.b0, self.betti.b1, self.betti.b2);
        let _ = writeln!(out, "truss       {} vertices, {} bars", c.truss_vertices, c.truss_bars);
        let _ = writeln!(out, "dim H2 S    {}", d.h2_spatial);
        let _ = writeln!(out, "dim H1 H    {}", d.h1_hinge);
        let _ = writeln!(out, "dim H2 B    {}", d.h2_rigid);
        let _ = writeln!(out, "dim H1 B    {}", d.h1_rigid);
        let _ = writeln!(out, "dim ker M'  {}", d.truss_kernel);
        let _ = writeln!(out, "rank theta  {}", d.rank_theta);
        let _ = writeln!(out, "rank iota*  {} (kernel {})", d.rank_iota_star, d.ker_iota_star);
        let _ = writeln!(out, "tolerance   {}", format_float(self.tolerance));
        for (name, check) in &self.checks {
            let tag = if check.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{tag}  {name}  {} (threshold {})", format_float(check.value), format_float(check.threshold));
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(out, "time        {ms:.3} ms");
        }
        let _ = writeln!(out, "{}", if self.passed { "all checks passed" } else { "some checks FAILED" });
        out
    }
}
