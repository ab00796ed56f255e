//! Maps between the kinematic models.
//!
//! The short exact sequence `0 -> H -iota-> B -pi-> S -> 0` of cosheaves
//! yields the connecting homomorphism `theta : H2 S -> H1 H` (spatial
//! velocities to hinge rates) and the loop obstruction `iota_* : H1 H -> H1 B`.
//! Hinge solutions in `ker iota_*` are lifted back to spatial solutions with
//! the pseudoinverse of `theta`, and spatial solutions are pushed to vertex
//! velocities of the stiffened truss by `eta`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::cell_complex::{Cell, OrigamiSurface};
use crate::cosheaf::{
    check_exact_sequence, connecting_map, connecting_map_in, induced_map, induced_map_in, structural_tolerance, ConnectingMap, CosheafMap, ExactnessReport,
    InducedMap, SubspaceBasis,
};
use crate::error::{Error, Result};
use crate::linalg::{self, RankPolicy};
use crate::models::{
    build_hinge_model, build_rigid_model, build_spatial_model, stiffen, truss_kernel, CosheafModel, ModelKind,
    StiffenedLinkage,
};
use crate::scalar::Scalar;
use crate::spatial::{angular_embedding, edge_projection, eta_face_vertex, hinge_embed, linear_block, SpatialVector};

/// Thresholds used by the conversions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T: Scalar = f64> {
    /// Relative singular-value cutoff for every rank decision.
    pub rank: T,
    /// `‖iota_* θ‖ <= obstruction * ‖θ‖` counts as unobstructed.
    pub obstruction: T,
    /// Relative residual for accepting an input as a cycle or rigid motion.
    pub cycle: T,
    /// Relative disagreement allowed when `eta` reads a vertex from two faces.
    pub well_defined: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Self::with_rank(T::default_tolerance())
    }
}

impl<T: Scalar> Tolerances<T> {
    pub fn with_rank(rank: T) -> Self {
        let ten = T::lit(10.0);
        Self {
            rank,
            obstruction: T::lit(1e-8).max(rank * ten),
            cycle: T::lit(1e-8).max(rank * ten),
            well_defined: T::lit(1e-10).max(rank / ten),
        }
    }

    pub fn policy(&self) -> RankPolicy<T> {
        RankPolicy::new(self.rank)
    }
}

/// `0 -> H -> B -> S -> 0` with its verification report.
#[derive(Debug, Clone)]
pub struct ExactSequence<T: Scalar = f64> {
    pub hinge: CosheafModel<T>,
    pub rigid: CosheafModel<T>,
    pub spatial: CosheafModel<T>,
    pub iota: CosheafMap<T>,
    pub pi: CosheafMap<T>,
    pub report: ExactnessReport,
}

/// Builds and verifies the hinge/rigid/spatial sequence.
pub fn build_exact_sequence<T: Scalar>(s: &OrigamiSurface<T>) -> Result<ExactSequence<T>> {
    build_exact_sequence_pinned(s, &[])
}

/// Same, with the stalks over `pinned` faces fixed to zero (a grounded base).
pub fn build_exact_sequence_pinned<T: Scalar>(s: &OrigamiSurface<T>, pinned: &[Cell]) -> Result<ExactSequence<T>> {
    let hinge = build_hinge_model(s)?.pinned(pinned)?;
    let rigid = build_rigid_model(s)?.pinned(pinned)?;
    let spatial = build_spatial_model(s)?.pinned(pinned)?;
    let iota = CosheafMap::new(hinge.cosheaf.clone(), rigid.cosheaf.clone(), |c| match c {
        Cell::Edge(e) => hinge_embed(&s.edge_axis(e)).expect("edges have nonzero length").as_dmatrix(),
        Cell::Vertex(_) => angular_embedding(),
        Cell::Face(_) => DMatrix::zeros(6, 0),
    })?;
    let pi = CosheafMap::new(rigid.cosheaf.clone(), spatial.cosheaf.clone(), |c| match c {
        Cell::Face(_) => DMatrix::identity(6, 6),
        Cell::Edge(e) => edge_projection(&s.edge_axis(e)).expect("edges have nonzero length").as_dmatrix(),
        Cell::Vertex(_) => linear_block(),
    })?;
    let report = check_exact_sequence(&iota, &pi, structural_tolerance())?;
    if let Some(v) = report.first_violation() {
        return Err(Error::ExactnessViolation { cell: v.cell, kind: v.kind, residual: v.residual });
    }
    Ok(ExactSequence { hinge, rigid, spatial, iota, pi, report })
}

/// `theta : H2 S -> H1 H` with its cross-check against the block formula.
#[derive(Debug, Clone)]
pub struct ThetaMap<T: Scalar = f64> {
    pub connecting: ConnectingMap<T>,
    /// `[e:f] <l_e, omega_f>` assembled as a chain-level matrix.
    pub direct_chain: DMatrix<T>,
    /// Max deviation between the connecting map and the block formula on
    /// homology representatives.
    pub direct_agreement: T,
    pub rank: usize,
}

impl<T: Scalar> ThetaMap<T> {
    pub fn matrix(&self) -> &DMatrix<T> {
        &self.connecting.matrix
    }

    pub fn spatial_basis(&self) -> &SubspaceBasis<T> {
        &self.connecting.source_basis
    }

    pub fn hinge_basis(&self) -> &SubspaceBasis<T> {
        &self.connecting.target_basis
    }
}

/// Direct formula `(theta nu)_e = sum_f [e:f] <l_e, omega_f>` on chains.
pub fn theta_block_formula<T: Scalar>(s: &OrigamiSurface<T>, seq: &ExactSequence<T>) -> DMatrix<T> {
    let h = &seq.hinge.complex;
    let sp = &seq.spatial.complex;
    let mut m = DMatrix::zeros(h.dims[1], sp.dims[2]);
    let topo = s.topology();
    for (f, fe) in topo.face_edges.iter().enumerate() {
        let Some(col) = sp.offset(Cell::Face(f)) else { continue };
        for &(e, sign) in fe {
            let Some(row) = h.offset(Cell::Edge(e)) else { continue };
            let l = s.edge_axis(e) * T::from_i8(sign).unwrap();
            for k in 0..3 {
                m[(row, col + k)] = l[k];
            }
        }
    }
    m
}

pub fn theta<T: Scalar>(s: &OrigamiSurface<T>, seq: &ExactSequence<T>, policy: RankPolicy<T>) -> Result<ThetaMap<T>> {
    let connecting = connecting_map(&seq.iota, &seq.pi, 2, policy)?;
    Ok(theta_from(s, seq, connecting, policy))
}

fn theta_from<T: Scalar>(
    s: &OrigamiSurface<T>,
    seq: &ExactSequence<T>,
    connecting: ConnectingMap<T>,
    policy: RankPolicy<T>,
) -> ThetaMap<T> {
    let direct_chain = theta_block_formula(s, seq);
    let direct = connecting.target_basis.basis.transpose() * &direct_chain * &connecting.source_basis.basis;
    let direct_agreement = if direct.is_empty() { T::zero() } else { linalg::max_abs(&(direct - &connecting.matrix)) };
    let rank = linalg::rank(&connecting.matrix, policy);
    ThetaMap { connecting, direct_chain, direct_agreement, rank }
}

/// `iota_* : H1 H -> H1 B`.
pub fn iota_star<T: Scalar>(seq: &ExactSequence<T>, policy: RankPolicy<T>) -> Result<InducedMap<T>> {
    induced_map(&seq.iota, 1, policy)
}

/// A velocity assignment for one model, with its constraint residual.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSolution<T: Scalar = f64> {
    pub kind: ModelKind,
    pub values: DVector<T>,
    /// `‖A q‖` for the model's constraint matrix `A`.
    pub residual: T,
}

impl<T: Scalar> ModelSolution<T> {
    pub fn relative_residual(&self) -> T {
        let n = self.values.norm();
        if n > T::zero() {
            self.residual / n
        } else {
            self.residual
        }
    }
}

/// Outcome of a hinge -> spatial (-> truss) conversion.
#[derive(Debug, Clone)]
pub struct ConversionReport<T: Scalar = f64> {
    pub input: ModelSolution<T>,
    /// Coordinates of `iota_*(θ)` in the harmonic basis of `H1 B`.
    pub obstruction: DVector<T>,
    pub obstructed: bool,
    pub spatial: Option<ModelSolution<T>>,
    pub truss: Option<ModelSolution<T>>,
    /// `‖theta(theta^+ θ) - θ‖ / ‖θ‖`, when a spatial solution exists.
    pub roundtrip_residual: Option<T>,
    pub checks: Vec<(String, bool)>,
}

impl<T: Scalar> ConversionReport<T> {
    pub fn passed(&self) -> bool {
        !self.obstructed && self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// Everything needed to analyze and convert solutions on one surface.
#[derive(Debug, Clone)]
pub struct KinematicModels<T: Scalar = f64> {
    pub surface: Arc<OrigamiSurface<T>>,
    pub tol: Tolerances<T>,
    pub sequence: ExactSequence<T>,
    pub theta: ThetaMap<T>,
    pub iota_star: InducedMap<T>,
    pub linkage: StiffenedLinkage<T>,
    pub truss_kernel: SubspaceBasis<T>,
    pub rigid_h2: SubspaceBasis<T>,
    /// `‖∂_1‖` of the hinge complex and `‖∂_2‖` of the spatial complex.
    pub hinge_norm: T,
    pub spatial_norm: T,
}

impl<T: Scalar> KinematicModels<T> {
    pub fn build(surface: OrigamiSurface<T>, tol: Tolerances<T>) -> Result<Self> {
        let policy = tol.policy();
        let sequence = build_exact_sequence(&surface)?;
        let h1_hinge = sequence.hinge.homology(1, policy);
        let h2_spatial = sequence.spatial.homology(2, policy);
        let h1_rigid = sequence.rigid.homology(1, policy);
        let rigid_h2 = sequence.rigid.homology(2, policy);
        let connecting = connecting_map_in(&sequence.iota, &sequence.pi, 2, h2_spatial, h1_hinge.clone(), policy)?;
        let theta = theta_from(&surface, &sequence, connecting, policy);
        let iota_star = induced_map_in(&sequence.iota, 1, h1_hinge, h1_rigid);
        let linkage = stiffen(&surface)?;
        let truss_kernel = truss_kernel(&linkage, policy);
        let hinge_norm = linalg::spectral_norm(&sequence.hinge.complex.d1);
        let spatial_norm = linalg::spectral_norm(&sequence.spatial.complex.d2);
        Ok(Self {
            surface: Arc::new(surface),
            tol,
            sequence,
            theta,
            iota_star,
            linkage,
            truss_kernel,
            rigid_h2,
            hinge_norm,
            spatial_norm,
        })
    }

    pub fn hinge_dim(&self) -> usize {
        self.sequence.hinge.complex.dims[1]
    }

    pub fn spatial_dim(&self) -> usize {
        self.sequence.spatial.complex.dims[2]
    }

    pub fn truss_dim(&self) -> usize {
        3 * self.linkage.n_vertices()
    }

    /// Interior edges in hinge-chain order.
    pub fn hinge_cells(&self) -> Vec<usize> {
        let h = &self.sequence.hinge.complex;
        (0..self.surface.n_edges()).filter(|&e| h.offset(Cell::Edge(e)).is_some()).collect()
    }

    pub fn hinge_solution(&self, values: DVector<T>) -> Result<ModelSolution<T>> {
        check_len(values.len(), self.hinge_dim(), "hinge")?;
        let residual = (&self.sequence.hinge.complex.d1 * &values).norm();
        Ok(ModelSolution { kind: ModelKind::Hinge, values, residual })
    }

    pub fn spatial_solution(&self, values: DVector<T>) -> Result<ModelSolution<T>> {
        check_len(values.len(), self.spatial_dim(), "spatial")?;
        let residual = (&self.sequence.spatial.complex.d2 * &values).norm();
        Ok(ModelSolution { kind: ModelKind::Spatial, values, residual })
    }

    pub fn truss_solution(&self, values: DVector<T>) -> Result<ModelSolution<T>> {
        check_len(values.len(), self.truss_dim(), "truss")?;
        let residual = self.linkage.residual(&values).norm();
        Ok(ModelSolution { kind: ModelKind::Truss, values, residual })
    }

    /// `dim ker iota_*`.
    pub fn consistent_hinge_dim(&self) -> usize {
        let m = &self.iota_star.matrix;
        m.ncols() - linalg::rank(m, self.tol.policy())
    }

    /// Orthonormal basis of `ker iota_*` as hinge chains.
    pub fn consistent_hinge_basis(&self) -> DMatrix<T> {
        let coords = linalg::null_space(&self.iota_star.matrix, self.tol.policy());
        &self.iota_star.source_basis.basis * coords
    }

    /// Hinge chains spanning `(ker iota_*)^⊥` inside `H1 H`: loop-obstructed cycles.
    pub fn obstructed_hinge_basis(&self) -> DMatrix<T> {
        let m = &self.iota_star.matrix;
        let row_space = linalg::range_basis(&m.transpose(), self.tol.policy());
        &self.iota_star.source_basis.basis * row_space
    }

    /// `theta^+` applied to a hinge solution, with the loop-obstruction test.
    pub fn theta_pinv(&self, hinge: &DVector<T>) -> Result<ConversionReport<T>> {
        let input = self.hinge_solution(hinge.clone())?;
        let norm = hinge.norm();
        if norm > T::zero() {
            let rel = input.residual / (T::one().max(self.hinge_norm) * norm);
            if rel > self.tol.cycle {
                return Err(Error::NotACycle { model: "hinge", residual: rel.to_f64_lossy() });
            }
        }
        let lifted = self.sequence.iota.chain_matrix(1) * hinge;
        let obstruction = self.iota_star.target_basis.coordinates(&lifted);
        let obstructed = obstruction.norm() > self.tol.obstruction * norm;
        let mut report = ConversionReport {
            input,
            obstruction,
            obstructed,
            spatial: None,
            truss: None,
            roundtrip_residual: None,
            checks: Vec::new(),
        };
        if obstructed {
            return Ok(report);
        }
        let coords = self.theta.hinge_basis().coordinates(hinge);
        let theta_m = self.theta.matrix();
        let pre = linalg::pinv(theta_m, self.tol.policy()) * &coords;
        let nu = &self.theta.spatial_basis().basis * &pre;
        let back = &self.theta.hinge_basis().basis * (theta_m * &pre);
        let rt = if norm > T::zero() { (back - hinge).norm() / norm } else { T::zero() };
        report.checks.push(("theta(theta^+ x) = x".into(), rt <= self.tol.cycle));
        report.roundtrip_residual = Some(rt);
        let spatial = self.spatial_solution(nu)?;
        report.checks.push(("spatial output is a cycle".into(), spatial_is_cycle(self, &spatial)));
        report.spatial = Some(spatial);
        Ok(report)
    }

    /// `eta`: face spatial velocities to truss vertex velocities.
    pub fn eta_map(&self, spatial: &DVector<T>) -> Result<ModelSolution<T>> {
        let sol = self.spatial_solution(spatial.clone())?;
        let norm = spatial.norm();
        if norm > T::zero() {
            let rel = sol.residual / (T::one().max(self.spatial_norm) * norm);
            if rel > self.tol.cycle {
                return Err(Error::NotACycle { model: "spatial", residual: rel.to_f64_lossy() });
            }
        }
        let s = &self.surface;
        let topo = s.topology();
        let nu_at = |f: usize| {
            let v6 = spatial.fixed_rows::<6>(6 * f).into_owned();
            SpatialVector::from_stacked(&v6, s.centroid(Cell::Face(f)))
        };
        let scale = T::one().max(s.scale());
        let limit = self.tol.well_defined * scale * T::one().max(norm);
        let mut y = DVector::zeros(self.truss_dim());
        for v in 0..s.n_vertices() {
            let p = s.vertex_positions()[v];
            let faces = &topo.vertex_faces[v];
            let first = eta_face_vertex(&nu_at(faces[0]), &p);
            let mut worst = T::zero();
            for &f in &faces[1..] {
                worst = worst.max((eta_face_vertex(&nu_at(f), &p) - first).norm());
            }
            if worst > limit {
                return Err(Error::WellDefinednessViolation { vertex: v, disagreement: worst.to_f64_lossy() });
            }
            y.fixed_rows_mut::<3>(3 * v).copy_from(&first);
        }
        for (f, &a) in self.linkage.apex.iter().enumerate() {
            let vel = eta_face_vertex(&nu_at(f), &self.linkage.positions[a]);
            y.fixed_rows_mut::<3>(3 * a).copy_from(&vel);
        }
        self.truss_solution(y)
    }

    /// Recovers face spatial velocities from a truss velocity field.
    pub fn eta_inverse(&self, truss: &DVector<T>) -> Result<ModelSolution<T>> {
        check_len(truss.len(), self.truss_dim(), "truss")?;
        let nu = eta_inverse(&self.surface, &self.linkage, truss, self.tol)?;
        let sol = self.spatial_solution(nu)?;
        let norm = sol.values.norm();
        if norm > T::zero() {
            let rel = sol.residual / (T::one().max(self.spatial_norm) * norm);
            if rel > self.tol.cycle {
                return Err(Error::NotACycle { model: "spatial", residual: rel.to_f64_lossy() });
            }
        }
        Ok(sol)
    }

    /// `eta ∘ theta^+` restricted to `ker iota_*`.
    pub fn hinge_to_truss(&self, hinge: &DVector<T>) -> Result<ConversionReport<T>> {
        let mut report = self.theta_pinv(hinge)?;
        if let Some(spatial) = &report.spatial {
            let truss = self.eta_map(&spatial.values)?;
            let ok = truss.residual <= self.tol.cycle * T::one().max(truss.values.norm());
            report.checks.push(("truss output in ker M'".into(), ok));
            report.truss = Some(truss);
        }
        Ok(report)
    }
}

fn spatial_is_cycle<T: Scalar>(m: &KinematicModels<T>, sol: &ModelSolution<T>) -> bool {
    sol.residual <= m.tol.cycle * T::one().max(m.spatial_norm) * T::one().max(sol.values.norm())
}

fn check_len(got: usize, want: usize, model: &str) -> Result<()> {
    if got != want {
        return Err(Error::ShapeMismatch(format!("{model} solution has {got} entries, model has {want}")));
    }
    Ok(())
}

/// Least-squares rigid motion of each face from the velocities of its
/// vertices and apex: `y_p = beta + omega x (p - p_f)`.
pub fn eta_inverse<T: Scalar>(
    s: &OrigamiSurface<T>,
    x: &StiffenedLinkage<T>,
    y: &DVector<T>,
    tol: Tolerances<T>,
) -> Result<DVector<T>> {
    let norm = y.norm();
    let mut nu = DVector::zeros(6 * s.n_faces());
    for (f, cycle) in s.faces().iter().enumerate() {
        let pf = s.centroid(Cell::Face(f));
        let mut points: Vec<usize> = cycle.clone();
        points.push(x.apex[f]);
        let mut a = DMatrix::zeros(3 * points.len(), 6);
        let mut b = DVector::zeros(3 * points.len());
        for (i, &p) in points.iter().enumerate() {
            let r: Vector3<T> = x.positions[p] - pf;
            // omega x r = -(r x omega)
            let rx = crate::spatial::cross_op(&r);
            a.view_mut((3 * i, 0), (3, 3)).copy_from(&(-rx));
            a.view_mut((3 * i, 3), (3, 3)).fill_with_identity();
            b.fixed_rows_mut::<3>(3 * i).copy_from(&y.fixed_rows::<3>(3 * p));
        }
        let sol = linalg::lstsq(&a, &b, tol.policy());
        let res = (&a * &sol - &b).norm();
        if res > tol.cycle * T::one().max(norm) {
            return Err(Error::NonRigidMotion { face: f, residual: res.to_f64_lossy() });
        }
        nu.rows_mut(6 * f, 6).copy_from(&sol);
    }
    Ok(nu)
}

/// Standalone wrappers mirroring the method API.
pub fn theta_pinv<T: Scalar>(m: &KinematicModels<T>, hinge: &DVector<T>) -> Result<ConversionReport<T>> {
    m.theta_pinv(hinge)
}

pub fn eta_map<T: Scalar>(m: &KinematicModels<T>, spatial: &DVector<T>) -> Result<ModelSolution<T>> {
    m.eta_map(spatial)
}

pub fn hinge_to_truss<T: Scalar>(m: &KinematicModels<T>, hinge: &DVector<T>) -> Result<ConversionReport<T>> {
    m.hinge_to_truss(hinge)
}

/// Serialized-friendly summary of the dimension ledgers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    pub h2_spatial: usize,
    pub h1_hinge: usize,
    pub h2_rigid: usize,
    pub h1_rigid: usize,
    pub truss_kernel: usize,
    pub rank_theta: usize,
    pub rank_iota_star: usize,
    pub ker_iota_star: usize,
}

impl<T: Scalar> KinematicModels<T> {
    pub fn dimensions(&self) -> Dimensions {
        let rank_iota_star = linalg::rank(&self.iota_star.matrix, self.tol.policy());
        Dimensions {
            h2_spatial: self.theta.spatial_basis().dim(),
            h1_hinge: self.theta.hinge_basis().dim(),
            h2_rigid: self.rigid_h2.dim(),
            h1_rigid: self.iota_star.target_basis.dim(),
            truss_kernel: self.truss_kernel.dim(),
            rank_theta: self.theta.rank,
            rank_iota_star,
            ker_iota_star: self.iota_star.matrix.ncols() - rank_iota_star,
        }
    }
}
