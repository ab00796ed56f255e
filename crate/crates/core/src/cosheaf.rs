//! Cellular cosheaves over an origami surface and their homology.
//!
//! A cosheaf assigns a stalk `R^k` to each cell and an extension matrix to
//! each incidence `d ▷ c` (face to edge, edge to vertex, face to vertex).
//! Chains are stacked stalk vectors in cell-index order; cells with zero
//! stalks contribute no coordinates. Homology classes are represented by
//! harmonic cycles: `ker ∂_i ∩ (im ∂_{i+1})^⊥`.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::cell_complex::{Cell, Topology};
use crate::error::{Error, Result};
use crate::linalg::{self, RankPolicy};
use crate::scalar::Scalar;

/// Residual bound for functoriality and naturality of assembled models.
pub fn structural_tolerance<T: Scalar>() -> T {
    T::lit(1e-12).max(T::lit(1e3) * T::default_epsilon())
}

#[derive(Debug, Clone)]
pub struct Cosheaf<T: Scalar = f64> {
    topology: Arc<Topology>,
    stalk_dims: [Vec<usize>; 3],
    extensions: BTreeMap<(Cell, Cell), DMatrix<T>>,
}

impl<T: Scalar> Cosheaf<T> {
    /// Cosheaf with the given stalk dimensions and (for now) zero extensions.
    pub fn new(topology: Arc<Topology>, stalk_dim: impl Fn(Cell) -> usize) -> Self {
        let stalk_dims = [0, 1, 2].map(|d| (0..topology.n_cells(d)).map(|i| stalk_dim(Cell::of_dim(d, i))).collect());
        Self { topology, stalk_dims, extensions: BTreeMap::new() }
    }

    pub fn topology(&self) -> &Arc<Topology> {
        &self.topology
    }

    pub fn stalk_dim(&self, cell: Cell) -> usize {
        self.stalk_dims[cell.dim()][cell.index()]
    }

    /// Sets `F_{d▷c}`. Maps touching a zero stalk are dropped unchecked, so
    /// builders can hand over the full-support map for boundary cells.
    pub fn set_extension(&mut self, d: Cell, c: Cell, m: DMatrix<T>) -> Result<()> {
        let want = (self.stalk_dim(c), self.stalk_dim(d));
        if want.0 == 0 || want.1 == 0 {
            return Ok(());
        }
        if m.shape() != want {
            return Err(Error::ShapeMismatch(format!(
                "extension {d}▷{c} is {:?}, stalks need {:?}",
                m.shape(),
                want
            )));
        }
        self.extensions.insert((d, c), m);
        Ok(())
    }

    /// `F_{d▷c}`, zero when either stalk is trivial or no map was set.
    pub fn extension(&self, d: Cell, c: Cell) -> DMatrix<T> {
        self.extensions
            .get(&(d, c))
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(self.stalk_dim(c), self.stalk_dim(d)))
    }

    /// Chain offsets of each cell of dimension `dim`, and the total size.
    pub fn offsets(&self, dim: usize) -> (Vec<Option<usize>>, usize) {
        let mut total = 0;
        let offs = self.stalk_dims[dim]
            .iter()
            .map(|&k| {
                if k == 0 {
                    None
                } else {
                    let o = total;
                    total += k;
                    Some(o)
                }
            })
            .collect();
        (offs, total)
    }

    pub fn chain_dim(&self, dim: usize) -> usize {
        self.stalk_dims.get(dim).map_or(0, |s| s.iter().sum())
    }

    /// Worst `‖F_{e▷v} F_{f▷e} - F_{f▷v}‖_max` relative to `max(1, ‖F_{f▷v}‖_max)`.
    pub fn functoriality_residual(&self) -> (T, Option<(usize, usize, usize)>) {
        let mut worst = (T::zero(), None);
        for (f, e, v) in self.topology.flags() {
            let (cf, ce, cv) = (Cell::Face(f), Cell::Edge(e), Cell::Vertex(v));
            let direct = self.extension(cf, cv);
            let composed = self.extension(ce, cv) * self.extension(cf, ce);
            let scale = T::one().max(linalg::max_abs(&direct));
            let r = linalg::max_abs(&(composed - direct)) / scale;
            if r > worst.0 {
                worst = (r, Some((f, e, v)));
            }
        }
        worst
    }

    pub fn check_functorial(&self, tol: T) -> Result<()> {
        match self.functoriality_residual() {
            (r, Some((f, e, v))) if r > tol => Err(Error::FunctorialityViolation {
                face: Cell::Face(f),
                edge: Cell::Edge(e),
                vertex: Cell::Vertex(v),
                residual: r.to_f64_lossy(),
            }),
            _ => Ok(()),
        }
    }

    /// Copy with the stalks over `cells` set to zero (pinned cells).
    pub fn pinned(&self, cells: &[Cell]) -> Self {
        let mut out = self.clone();
        for &c in cells {
            out.stalk_dims[c.dim()][c.index()] = 0;
        }
        out.extensions.retain(|&(d, c), _| !cells.contains(&d) && !cells.contains(&c));
        out
    }

    /// Signed block boundary matrices; fails if the cosheaf is not functorial.
    pub fn assemble(&self) -> Result<ChainComplex<T>> {
        self.check_functorial(structural_tolerance())?;
        Ok(self.assemble_unchecked())
    }

    pub fn assemble_unchecked(&self) -> ChainComplex<T> {
        let offsets = [0, 1, 2].map(|d| self.offsets(d));
        let dims = [offsets[0].1, offsets[1].1, offsets[2].1];
        let mut d1 = DMatrix::zeros(dims[0], dims[1]);
        let mut d2 = DMatrix::zeros(dims[1], dims[2]);
        for (d, c, sign) in self.topology.incidences() {
            let (Some(row), Some(col)) = (offsets[c.dim()].0[c.index()], offsets[d.dim()].0[d.index()]) else {
                continue;
            };
            let block = self.extension(d, c) * T::from_i8(sign).unwrap();
            let target = if d.dim() == 2 { &mut d2 } else { &mut d1 };
            target.view_mut((row, col), block.shape()).copy_from(&block);
        }
        ChainComplex {
            dims,
            offsets: offsets.map(|(o, _)| o),
            d1,
            d2,
        }
    }
}

/// `C2 --∂2--> C1 --∂1--> C0`.
#[derive(Debug, Clone)]
pub struct ChainComplex<T: Scalar = f64> {
    pub dims: [usize; 3],
    pub offsets: [Vec<Option<usize>>; 3],
    pub d1: DMatrix<T>,
    pub d2: DMatrix<T>,
}

impl<T: Scalar> ChainComplex<T> {
    /// `∂_i : C_i -> C_{i-1}` for `i` in `0..=3` (the ends are empty maps).
    pub fn boundary(&self, i: usize) -> DMatrix<T> {
        match i {
            0 => DMatrix::zeros(0, self.dims[0]),
            1 => self.d1.clone(),
            2 => self.d2.clone(),
            3 => DMatrix::zeros(self.dims[2], 0),
            _ => panic!("boundary degree {i} out of range"),
        }
    }

    pub fn composition_residual(&self) -> T {
        linalg::max_abs(&(&self.d1 * &self.d2))
    }

    /// Offset of `cell`'s stalk inside its chain space.
    pub fn offset(&self, cell: Cell) -> Option<usize> {
        self.offsets[cell.dim()][cell.index()]
    }

    pub fn homology_basis(&self, degree: usize, policy: RankPolicy<T>) -> SubspaceBasis<T> {
        homology_basis(self, degree, policy)
    }
}

/// Orthonormal columns spanning a subspace of `R^ambient_dim`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis<T: Scalar = f64> {
    pub ambient_dim: usize,
    pub basis: DMatrix<T>,
    pub tol: T,
}

impl<T: Scalar> SubspaceBasis<T> {
    pub fn new(basis: DMatrix<T>, tol: T) -> Self {
        Self { ambient_dim: basis.nrows(), basis, tol }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Coordinates of the orthogonal projection of `x`.
    pub fn coordinates(&self, x: &DVector<T>) -> DVector<T> {
        self.basis.transpose() * x
    }

    pub fn project(&self, x: &DVector<T>) -> DVector<T> {
        &self.basis * self.coordinates(x)
    }

    /// `‖x - proj(x)‖`.
    pub fn distance(&self, x: &DVector<T>) -> T {
        (x - self.project(x)).norm()
    }

    pub fn orthonormality_residual(&self) -> T {
        let k = self.dim();
        linalg::max_abs(&(self.basis.transpose() * &self.basis - DMatrix::identity(k, k)))
    }
}

/// Harmonic representatives of `H_degree`: `ker ∂_d ∩ (im ∂_{d+1})^⊥`.
pub fn homology_basis<T: Scalar>(cc: &ChainComplex<T>, degree: usize, policy: RankPolicy<T>) -> SubspaceBasis<T> {
    assert!(degree <= 2, "homology degree must be 0, 1 or 2");
    let cycles = linalg::null_space(&cc.boundary(degree), policy);
    let up = cc.boundary(degree + 1);
    let basis = if up.ncols() == 0 || linalg::max_abs(&up) == T::zero() || cycles.ncols() == 0 {
        cycles
    } else {
        let cutoff = policy.cutoff(linalg::spectral_norm(&up));
        let coords = linalg::null_space_abs(&(up.transpose() * &cycles), cutoff);
        cycles * coords
    };
    SubspaceBasis::new(basis, policy.tol)
}

/// Rank-nullity bookkeeping of one boundary map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankNullity {
    pub rank: usize,
    pub nullity: usize,
    pub domain: usize,
}

pub fn rank_nullity<T: Scalar>(cc: &ChainComplex<T>, degree: usize, policy: RankPolicy<T>) -> RankNullity {
    let d = cc.boundary(degree);
    let rank = linalg::rank(&d, policy);
    let nullity = linalg::null_space(&d, policy).ncols();
    RankNullity { rank, nullity, domain: d.ncols() }
}

/// Stalkwise maps `phi_c : F_c -> G_c`.
#[derive(Debug, Clone)]
pub struct CosheafMap<T: Scalar = f64> {
    pub source: Arc<Cosheaf<T>>,
    pub target: Arc<Cosheaf<T>>,
    components: BTreeMap<Cell, DMatrix<T>>,
}

impl<T: Scalar> CosheafMap<T> {
    pub fn new(
        source: Arc<Cosheaf<T>>,
        target: Arc<Cosheaf<T>>,
        component: impl Fn(Cell) -> DMatrix<T>,
    ) -> Result<Self> {
        if source.topology() != target.topology() {
            return Err(Error::ShapeMismatch("cosheaf map between different surfaces".into()));
        }
        let topo = source.topology().clone();
        let mut components = BTreeMap::new();
        for d in 0..3 {
            for i in 0..topo.n_cells(d) {
                let c = Cell::of_dim(d, i);
                let want = (target.stalk_dim(c), source.stalk_dim(c));
                if want.0 == 0 || want.1 == 0 {
                    continue;
                }
                let m = component(c);
                if m.shape() != want {
                    return Err(Error::ShapeMismatch(format!(
                        "component at {c} is {:?}, stalks need {:?}",
                        m.shape(),
                        want
                    )));
                }
                components.insert(c, m);
            }
        }
        Ok(Self { source, target, components })
    }

    pub fn component(&self, c: Cell) -> DMatrix<T> {
        self.components
            .get(&c)
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(self.target.stalk_dim(c), self.source.stalk_dim(c)))
    }

    /// Replaces one component (used to build deliberately broken maps).
    pub fn with_component(mut self, c: Cell, m: DMatrix<T>) -> Result<Self> {
        let want = (self.target.stalk_dim(c), self.source.stalk_dim(c));
        if m.shape() != want {
            return Err(Error::ShapeMismatch(format!("component at {c} must be {want:?}")));
        }
        self.components.insert(c, m);
        Ok(self)
    }

    /// `‖phi_c F_{d▷c} - G_{d▷c} phi_d‖_max` for one incidence.
    pub fn naturality_residual(&self, d: Cell, c: Cell) -> T {
        let lhs = self.component(c) * self.source.extension(d, c);
        let rhs = self.target.extension(d, c) * self.component(d);
        linalg::max_abs(&(lhs - rhs))
    }

    /// Worst naturality residual over every incidence of the given kind
    /// (`(2,1)`, `(1,0)` or `(2,0)` as cell dimensions).
    pub fn naturality_by_kind(&self, kind: (usize, usize)) -> (T, Option<(Cell, Cell)>) {
        let topo = self.source.topology().clone();
        let pairs: Vec<(Cell, Cell)> = match kind {
            (2, 1) | (1, 0) => topo
                .incidences()
                .into_iter()
                .filter(|(d, c, _)| (d.dim(), c.dim()) == kind)
                .map(|(d, c, _)| (d, c))
                .collect(),
            (2, 0) => {
                let mut v: Vec<(Cell, Cell)> = topo
                    .flags()
                    .into_iter()
                    .map(|(f, _, v)| (Cell::Face(f), Cell::Vertex(v)))
                    .collect();
                v.sort();
                v.dedup();
                v
            }
            _ => Vec::new(),
        };
        let mut worst = (T::zero(), None);
        for (d, c) in pairs {
            let r = self.naturality_residual(d, c);
            if r > worst.0 || worst.1.is_none() {
                worst = (r.max(worst.0), Some((d, c)));
            }
        }
        worst
    }

    /// Block-diagonal chain map `C_i F -> C_i G`.
    pub fn chain_matrix(&self, degree: usize) -> DMatrix<T> {
        let (so, sn) = self.source.offsets(degree);
        let (to, tn) = self.target.offsets(degree);
        let mut m = DMatrix::zeros(tn, sn);
        for (i, (s, t)) in so.iter().zip(&to).enumerate() {
            if let (Some(s), Some(t)) = (s, t) {
                let block = self.component(Cell::of_dim(degree, i));
                m.view_mut((*t, *s), block.shape()).copy_from(&block);
            }
        }
        m
    }

    /// `pinv` of the chain map, computed block by block.
    pub fn chain_pinv(&self, degree: usize, policy: RankPolicy<T>) -> DMatrix<T> {
        let (so, sn) = self.source.offsets(degree);
        let (to, tn) = self.target.offsets(degree);
        let mut m = DMatrix::zeros(sn, tn);
        for (i, (s, t)) in so.iter().zip(&to).enumerate() {
            if let (Some(s), Some(t)) = (s, t) {
                let block = linalg::pinv(&self.component(Cell::of_dim(degree, i)), policy);
                m.view_mut((*s, *t), block.shape()).copy_from(&block);
            }
        }
        m
    }

    /// Orthonormal basis of the kernel of the chain map, block by block.
    pub fn chain_kernel(&self, degree: usize, policy: RankPolicy<T>) -> DMatrix<T> {
        let (so, sn) = self.source.offsets(degree);
        let mut cols: Vec<DVector<T>> = Vec::new();
        for (i, s) in so.iter().enumerate() {
            let Some(s) = s else { continue };
            let c = Cell::of_dim(degree, i);
            let k = if self.target.stalk_dim(c) == 0 {
                DMatrix::identity(self.source.stalk_dim(c), self.source.stalk_dim(c))
            } else {
                linalg::null_space(&self.component(c), policy)
            };
            for col in k.column_iter() {
                let mut v = DVector::zeros(sn);
                v.rows_mut(*s, col.len()).copy_from(&col);
                cols.push(v);
            }
        }
        if cols.is_empty() {
            DMatrix::zeros(sn, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }

    /// Identity map of a cosheaf.
    pub fn identity(f: Arc<Cosheaf<T>>) -> Self {
        Self::new(f.clone(), f.clone(), |c| DMatrix::identity(f.stalk_dim(c), f.stalk_dim(c)))
            .expect("identity has matching shapes")
    }
}

/// Per-cell outcome of an exactness check.
#[derive(Debug, Clone, PartialEq)]
pub struct CellExactness {
    pub cell: Cell,
    /// `dim F_c - rank iota_c`.
    pub injectivity_defect: usize,
    /// `dim Q_c - rank pi_c`.
    pub surjectivity_defect: usize,
    /// `‖pi_c U‖_2` with `U` an orthonormal basis of `im iota_c`.
    pub exactness_residual: f64,
    /// `rank iota_c + rank pi_c - dim G_c`.
    pub dimension_gap: isize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub cell: Cell,
    pub kind: &'static str,
    pub residual: f64,
}

/// One named commuting-square or row-exactness check.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareCheck {
    pub name: &'static str,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessReport {
    pub cells: Vec<CellExactness>,
    pub squares: Vec<SquareCheck>,
    pub violations: Vec<Violation>,
}

impl ExactnessReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.squares.iter().all(|s| s.passed)
    }

    pub fn max_exactness_residual(&self) -> f64 {
        self.cells.iter().map(|c| c.exactness_residual).fold(0.0, f64::max)
    }

    pub fn max_square_residual(&self) -> f64 {
        self.squares.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// Checks that `0 -> F -iota-> G -pi-> Q -> 0` is exact at every stalk and
/// that both maps are natural.
///
/// Produces nine named checks: naturality of each map on face▷edge,
/// edge▷vertex and face▷vertex incidences, and row exactness over faces,
/// edges and vertices.
pub fn check_exact_sequence<T: Scalar>(iota: &CosheafMap<T>, pi: &CosheafMap<T>, tol: T) -> Result<ExactnessReport> {
    let g = &iota.target;
    if g.topology() != pi.source.topology() {
        return Err(Error::ShapeMismatch("maps live over different surfaces".into()));
    }
    let topo = g.topology().clone();
    for d in 0..3 {
        for i in 0..topo.n_cells(d) {
            let c = Cell::of_dim(d, i);
            if g.stalk_dim(c) != pi.source.stalk_dim(c) {
                return Err(Error::ShapeMismatch(format!("middle stalk at {c} differs between the two maps")));
            }
        }
    }
    let policy = RankPolicy::new(tol);
    let mut cells = Vec::new();
    let mut violations = Vec::new();
    let mut row_worst = [0.0f64; 3];
    let mut row_ok = [true; 3];
    for d in 0..3 {
        for i in 0..topo.n_cells(d) {
            let c = Cell::of_dim(d, i);
            let (fd, gd, qd) = (iota.source.stalk_dim(c), g.stalk_dim(c), pi.target.stalk_dim(c));
            let ic = iota.component(c);
            let pc = pi.component(c);
            let ri = linalg::rank(&ic, policy);
            let rp = linalg::rank(&pc, policy);
            let u = linalg::range_basis(&ic, policy);
            let exact = if u.ncols() == 0 || pc.nrows() == 0 {
                0.0
            } else {
                linalg::spectral_norm(&(&pc * &u)).to_f64_lossy()
            };
            let scale = 1f64.max(linalg::spectral_norm(&pc).to_f64_lossy());
            let entry = CellExactness {
                cell: c,
                injectivity_defect: fd - ri.min(fd),
                surjectivity_defect: qd - rp.min(qd),
                exactness_residual: exact,
                dimension_gap: (ri + rp) as isize - gd as isize,
            };
            let tol64 = tol.to_f64_lossy();
            let mut ok = true;
            if entry.injectivity_defect > 0 {
                violations.push(Violation { cell: c, kind: "injectivity", residual: entry.injectivity_defect as f64 });
                ok = false;
            }
            if entry.surjectivity_defect > 0 {
                violations.push(Violation { cell: c, kind: "surjectivity", residual: entry.surjectivity_defect as f64 });
                ok = false;
            }
            if exact > tol64 * scale || entry.dimension_gap != 0 {
                violations.push(Violation { cell: c, kind: "exactness", residual: exact });
                ok = false;
            }
            row_worst[d] = row_worst[d].max(exact);
            row_ok[d] &= ok;
            cells.push(entry);
        }
    }

    let mut squares = Vec::new();
    let names = [
        ("iota face>edge", (2, 1), true),
        ("iota edge>vertex", (1, 0), true),
        ("iota face>vertex", (2, 0), true),
        ("pi face>edge", (2, 1), false),
        ("pi edge>vertex", (1, 0), false),
        ("pi face>vertex", (2, 0), false),
    ];
    for (name, kind, is_iota) in names {
        let map = if is_iota { iota } else { pi };
        let (r, at) = map.naturality_by_kind(kind);
        let scale = T::one().max(linalg::max_abs(&map.target.extension_scale(kind)));
        let passed = r <= tol * scale;
        if !passed {
            if let Some((_, c)) = at {
                violations.push(Violation { cell: c, kind: "naturality", residual: r.to_f64_lossy() });
            }
        }
        squares.push(SquareCheck { name, residual: r.to_f64_lossy(), passed });
    }
    for (d, name) in [(2, "rows exact over faces"), (1, "rows exact over edges"), (0, "rows exact over vertices")] {
        squares.push(SquareCheck { name, residual: row_worst[d], passed: row_ok[d] });
    }
    Ok(ExactnessReport { cells, squares, violations })
}

impl<T: Scalar> Cosheaf<T> {
    /// A 1x1 matrix holding the largest extension entry of one incidence kind.
    fn extension_scale(&self, kind: (usize, usize)) -> DMatrix<T> {
        let m = self
            .extensions
            .iter()
            .filter(|((d, c), _)| (d.dim(), c.dim()) == kind)
            .fold(T::zero(), |acc, (_, m)| acc.max(linalg::max_abs(m)));
        DMatrix::from_element(1, 1, m)
    }
}

/// Matrix of `phi_*` on harmonic homology bases.
#[derive(Debug, Clone)]
pub struct InducedMap<T: Scalar = f64> {
    pub matrix: DMatrix<T>,
    pub source_basis: SubspaceBasis<T>,
    pub target_basis: SubspaceBasis<T>,
}

pub fn induced_map<T: Scalar>(phi: &CosheafMap<T>, degree: usize, policy: RankPolicy<T>) -> Result<InducedMap<T>> {
    let src = phi.source.assemble()?;
    let tgt = phi.target.assemble()?;
    let source_basis = homology_basis(&src, degree, policy);
    let target_basis = homology_basis(&tgt, degree, policy);
    Ok(induced_map_in(phi, degree, source_basis, target_basis))
}

/// Same as [`induced_map`] with precomputed homology bases.
pub fn induced_map_in<T: Scalar>(
    phi: &CosheafMap<T>,
    degree: usize,
    source_basis: SubspaceBasis<T>,
    target_basis: SubspaceBasis<T>,
) -> InducedMap<T> {
    let matrix = target_basis.basis.transpose() * phi.chain_matrix(degree) * &source_basis.basis;
    InducedMap { matrix, source_basis, target_basis }
}

/// Connecting homomorphism `H_i Q -> H_{i-1} F` of a short exact sequence.
#[derive(Debug, Clone)]
pub struct ConnectingMap<T: Scalar = f64> {
    pub degree: usize,
    pub matrix: DMatrix<T>,
    pub source_basis: SubspaceBasis<T>,
    pub target_basis: SubspaceBasis<T>,
    /// `pi_i^+`, the minimum-norm lift `C_i Q -> C_i G`.
    pub pi_pinv: DMatrix<T>,
    /// `ker pi_i`, the freedom in choosing a lift.
    pub lift_kernel: DMatrix<T>,
    /// `∂_i` of the middle complex.
    pub boundary: DMatrix<T>,
    /// `iota_{i-1}^+`.
    pub iota_pinv: DMatrix<T>,
}

impl<T: Scalar> ConnectingMap<T> {
    /// Target homology coordinates reached from an arbitrary lift `y ∈ C_i G`.
    pub fn transport(&self, lift: &DVector<T>) -> DVector<T> {
        self.target_basis.coordinates(&(&self.iota_pinv * (&self.boundary * lift)))
    }

    /// Chain-level operator `iota^+ ∂ pi^+ : C_i Q -> C_{i-1} F`.
    pub fn chain_operator(&self) -> DMatrix<T> {
        &self.iota_pinv * &self.boundary * &self.pi_pinv
    }
}

pub fn connecting_map<T: Scalar>(
    iota: &CosheafMap<T>,
    pi: &CosheafMap<T>,
    degree: usize,
    policy: RankPolicy<T>,
) -> Result<ConnectingMap<T>> {
    if !(1..=2).contains(&degree) {
        return Err(Error::ShapeMismatch(format!("connecting map from degree {degree} is trivial")));
    }
    let q = pi.target.assemble()?;
    let f = iota.source.assemble()?;
    let source_basis = homology_basis(&q, degree, policy);
    let target_basis = homology_basis(&f, degree - 1, policy);
    connecting_map_in(iota, pi, degree, source_basis, target_basis, policy)
}

/// Same as [`connecting_map`] with precomputed homology bases.
pub fn connecting_map_in<T: Scalar>(
    iota: &CosheafMap<T>,
    pi: &CosheafMap<T>,
    degree: usize,
    source_basis: SubspaceBasis<T>,
    target_basis: SubspaceBasis<T>,
    policy: RankPolicy<T>,
) -> Result<ConnectingMap<T>> {
    if !(1..=2).contains(&degree) {
        return Err(Error::ShapeMismatch(format!("connecting map from degree {degree} is trivial")));
    }
    let g = pi.source.assemble_unchecked();
    let pi_chain = pi.chain_matrix(degree);
    let iota_chain = iota.chain_matrix(degree - 1);
    // Both maps are stalkwise, so their pseudoinverses are too.
    let pi_pinv = pi.chain_pinv(degree, policy);
    let iota_pinv = iota.chain_pinv(degree - 1, policy);
    let lift_kernel = pi.chain_kernel(degree, policy);
    let boundary = g.boundary(degree);
    let check = policy.tol * T::lit(10.0);
    let bnorm = T::one().max(linalg::spectral_norm(&boundary));

    let mut matrix = DMatrix::zeros(target_basis.dim(), source_basis.dim());
    for (j, qcol) in source_basis.basis.column_iter().enumerate() {
        let qv = qcol.into_owned();
        let y = &pi_pinv * &qv;
        let lift_res = (&pi_chain * &y - &qv).norm();
        if lift_res > check * T::one().max(qv.norm()) {
            return Err(Error::LiftFailure(format!(
                "class {j} has no preimage under pi (residual {:e})",
                lift_res.to_f64_lossy()
            )));
        }
        let z = &boundary * &y;
        let x = &iota_pinv * &z;
        let pre_res = (&iota_chain * &x - &z).norm();
        if pre_res > check * bnorm * T::one().max(y.norm()) {
            return Err(Error::LiftFailure(format!(
                "boundary of lifted class {j} leaves im iota (residual {:e})",
                pre_res.to_f64_lossy()
            )));
        }
        matrix.set_column(j, &target_basis.coordinates(&x));
    }
    Ok(ConnectingMap {
        degree,
        matrix,
        source_basis,
        target_basis,
        pi_pinv,
        lift_kernel,
        boundary,
        iota_pinv,
    })
}

/// Singular values of a matrix, largest first (convenience re-export).
pub fn singular_values<T: Scalar>(m: &DMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    linalg::singular_values(m)
}
