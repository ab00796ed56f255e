//! The concrete kinematic models of a rigid origami surface.
//!
//! * hinge cosheaf: a rate per interior edge, an angular velocity per
//!   interior vertex;
//! * spatial cosheaf: a spatial velocity per face, its quotient by the hinge
//!   axis per interior edge, a linear velocity per interior vertex;
//! * rigid body cosheaf: a full spatial velocity on faces and interior cells;
//! * constant cosheaves, and the stiffened truss linkage.
//!
//! Constraint stalks live only on interior edges and vertices; every face
//! carries its full stalk.

use std::collections::HashSet;
use std::sync::Arc;

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::cell_complex::{Cell, OrigamiSurface};
use crate::cosheaf::{ChainComplex, Cosheaf, CosheafMap, SubspaceBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, RankPolicy};
use crate::scalar::Scalar;
use crate::spatial::{edge_projection, eta_matrix, linear_block, rigid_transfer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Hinge,
    Spatial,
    Rigid,
    Constant,
    Truss,
}

/// A cosheaf together with its assembled chain complex.
#[derive(Debug, Clone)]
pub struct CosheafModel<T: Scalar = f64> {
    pub kind: ModelKind,
    pub cosheaf: Arc<Cosheaf<T>>,
    pub complex: ChainComplex<T>,
}

impl<T: Scalar> CosheafModel<T> {
    fn from_cosheaf(kind: ModelKind, cosheaf: Cosheaf<T>) -> Result<Self> {
        let complex = cosheaf.assemble()?;
        Ok(Self { kind, cosheaf: Arc::new(cosheaf), complex })
    }

    pub fn homology(&self, degree: usize, policy: RankPolicy<T>) -> SubspaceBasis<T> {
        self.complex.homology_basis(degree, policy)
    }

    /// Same model with the stalks over `cells` pinned to zero.
    pub fn pinned(&self, cells: &[Cell]) -> Result<Self> {
        Self::from_cosheaf(self.kind, self.cosheaf.pinned(cells))
    }
}

fn interior_dim<T: Scalar>(s: &OrigamiSurface<T>, face: usize, edge: usize, vertex: usize) -> impl Fn(Cell) -> usize + '_ {
    move |c| match c {
        Cell::Face(_) => face,
        Cell::Edge(e) if s.topology().interior_edge[e] => edge,
        Cell::Vertex(v) if s.topology().interior_vertex[v] => vertex,
        _ => 0,
    }
}

fn psi<T: Scalar>(s: &OrigamiSurface<T>, from: Cell, to: Cell) -> DMatrix<T> {
    rigid_transfer(s.centroid(from), s.centroid(to)).as_dmatrix()
}

fn column<T: Scalar>(v: &Vector3<T>) -> DMatrix<T> {
    DMatrix::from_column_slice(3, 1, v.as_slice())
}

/// Hinge cosheaf: `H_e = R`, `H_v = R^3` (axis form of so(3)), `H_{e▷v}: 1 ↦ l_e`.
pub fn hinge_cosheaf<T: Scalar>(s: &OrigamiSurface<T>) -> Result<Cosheaf<T>> {
    let topo = s.topology().clone();
    let mut c = Cosheaf::new(topo.clone(), interior_dim(s, 0, 1, 3));
    for (e, &[a, b]) in topo.edges.iter().enumerate() {
        let l = column(&s.edge_axis(e));
        for v in [a, b] {
            c.set_extension(Cell::Edge(e), Cell::Vertex(v), l.clone())?;
        }
    }
    Ok(c)
}

/// Spatial cosheaf: `S_f = R^6`, `S_e = R^5 ≅ se(3)/span[l_e, 0]`, `S_v = R^3`.
pub fn spatial_cosheaf<T: Scalar>(s: &OrigamiSurface<T>) -> Result<Cosheaf<T>> {
    let topo = s.topology().clone();
    let mut c = Cosheaf::new(topo.clone(), interior_dim(s, 6, 5, 3));
    let lin = linear_block::<T>();
    let mut proj = Vec::with_capacity(topo.n_edges());
    for e in 0..topo.n_edges() {
        proj.push(edge_projection(&s.edge_axis(e))?.as_dmatrix());
    }
    for (f, e, v) in topo.flags() {
        let (cf, ce, cv) = (Cell::Face(f), Cell::Edge(e), Cell::Vertex(v));
        c.set_extension(cf, ce, &proj[e] * psi(s, cf, ce))?;
        c.set_extension(ce, cv, &lin * psi(s, ce, cv) * proj[e].transpose())?;
        c.set_extension(cf, cv, eta_matrix(&s.centroid(cf), &s.centroid(cv)))?;
    }
    Ok(c)
}

/// Rigid body cosheaf: `R^6` on faces and interior cells, `B_{d▷c} = Psi_{d,c}`.
pub fn rigid_cosheaf<T: Scalar>(s: &OrigamiSurface<T>) -> Result<Cosheaf<T>> {
    let topo = s.topology().clone();
    let mut c = Cosheaf::new(topo.clone(), interior_dim(s, 6, 6, 6));
    for (f, e, v) in topo.flags() {
        let (cf, ce, cv) = (Cell::Face(f), Cell::Edge(e), Cell::Vertex(v));
        c.set_extension(cf, ce, psi(s, cf, ce))?;
        c.set_extension(ce, cv, psi(s, ce, cv))?;
        c.set_extension(cf, cv, psi(s, cf, cv))?;
    }
    Ok(c)
}

/// Which cells carry a stalk in a constant cosheaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    All,
    /// Faces plus interior edges and vertices (the support of the rigid model).
    Interior,
}

/// Constant cosheaf `W̄` with `W = R^w` on every cell and identity extensions.
pub fn constant_cosheaf<T: Scalar>(s: &OrigamiSurface<T>, w: usize) -> Cosheaf<T> {
    constant_cosheaf_on(s, w, Support::All)
}

pub fn constant_cosheaf_on<T: Scalar>(s: &OrigamiSurface<T>, w: usize, support: Support) -> Cosheaf<T> {
    let topo = s.topology().clone();
    let mut c = match support {
        Support::All => Cosheaf::new(topo.clone(), |_| w),
        Support::Interior => Cosheaf::new(topo.clone(), interior_dim(s, w, w, w)),
    };
    for (f, e, v) in topo.flags() {
        let (cf, ce, cv) = (Cell::Face(f), Cell::Edge(e), Cell::Vertex(v));
        for (d, cc) in [(cf, ce), (ce, cv), (cf, cv)] {
            c.set_extension(d, cc, DMatrix::identity(c.stalk_dim(cc), c.stalk_dim(d)))
                .expect("identity between equal constant stalks");
        }
    }
    c
}

pub fn build_hinge_model<T: Scalar>(s: &OrigamiSurface<T>) -> Result<CosheafModel<T>> {
    CosheafModel::from_cosheaf(ModelKind::Hinge, hinge_cosheaf(s)?)
}

pub fn build_spatial_model<T: Scalar>(s: &OrigamiSurface<T>) -> Result<CosheafModel<T>> {
    CosheafModel::from_cosheaf(ModelKind::Spatial, spatial_cosheaf(s)?)
}

pub fn build_rigid_model<T: Scalar>(s: &OrigamiSurface<T>) -> Result<CosheafModel<T>> {
    CosheafModel::from_cosheaf(ModelKind::Rigid, rigid_cosheaf(s)?)
}

pub fn build_constant_model<T: Scalar>(s: &OrigamiSurface<T>, w: usize, support: Support) -> Result<CosheafModel<T>> {
    CosheafModel::from_cosheaf(ModelKind::Constant, constant_cosheaf_on(s, w, support))
}

/// The cosheaf isomorphism `Psi_{0,c}` from the constant `se(3)` cosheaf
/// (supported like the rigid model) onto the rigid body cosheaf.
pub fn constant_rigid_iso<T: Scalar>(s: &OrigamiSurface<T>) -> Result<CosheafMap<T>> {
    let constant = Arc::new(constant_cosheaf_on(s, 6, Support::Interior));
    let rigid = Arc::new(rigid_cosheaf(s)?);
    CosheafMap::new(constant, rigid, |c| rigid_transfer(Vector3::zeros(), s.centroid(c)).as_dmatrix())
}

/// The surface braced into a truss: one apex per face plus complete graphs.
#[derive(Debug, Clone)]
pub struct StiffenedLinkage<T: Scalar = f64> {
    /// Surface vertices first, then one apex per face.
    pub positions: Vec<Vector3<T>>,
    pub n_surface_vertices: usize,
    /// Vertex index of each face's apex.
    pub apex: Vec<usize>,
    /// Unit best-fit normal of each face, oriented with the face cycle.
    pub normals: Vec<Vector3<T>>,
    /// Bars `[u, v]` with `u < v`: surface edges first (same ids), then bracing.
    pub edges: Vec<[usize; 2]>,
    /// `|E'| x 3|V'|` rigidity matrix.
    pub matrix: DMatrix<T>,
}

impl<T: Scalar> StiffenedLinkage<T> {
    pub fn n_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// `M' y` for a stacked velocity field.
    pub fn residual(&self, y: &nalgebra::DVector<T>) -> nalgebra::DVector<T> {
        &self.matrix * y
    }
}

/// Unit normal of the least-squares plane through `points`, oriented along
/// the Newell normal of the cycle. `None` if the points are collinear.
pub fn best_fit_normal<T: Scalar>(points: &[Vector3<T>], tol: T) -> Option<Vector3<T>> {
    let n = T::from_usize(points.len())?;
    let mean = points.iter().fold(Vector3::zeros(), |a, p| a + p) / n;
    let mut m = DMatrix::zeros(points.len(), 3);
    for (i, p) in points.iter().enumerate() {
        m.set_row(i, &(p - mean).transpose());
    }
    let svd = linalg::FullSvd::new(&m);
    let smax = svd.sigma_max();
    if smax <= T::zero() || svd.sigma.get(1).copied().unwrap_or_else(T::zero) <= tol * smax {
        return None;
    }
    let mut normal: Vector3<T> = Vector3::from_iterator(svd.v.column(2).iter().copied());
    let mut newell = Vector3::zeros();
    for i in 0..points.len() {
        newell += points[i].cross(&points[(i + 1) % points.len()]);
    }
    let flip = if newell.norm() > T::zero() {
        newell.dot(&normal) < T::zero()
    } else {
        normal.iter().find(|x| x.abs() > T::default_epsilon()).is_some_and(|x| *x < T::zero())
    };
    if flip {
        normal = -normal;
    }
    Some(normal.normalize())
}

/// Adds an apex `p_f + h n_f` per face (`h` = mean boundary edge length) and
/// completes `{v ◁ f} ∪ {f'}` to a complete graph, deduplicating bars.
pub fn stiffen<T: Scalar>(s: &OrigamiSurface<T>) -> Result<StiffenedLinkage<T>> {
    let topo = s.topology();
    let nv = s.n_vertices();
    let mut positions = s.vertex_positions().to_vec();
    let mut edges: Vec<[usize; 2]> = topo.edges.clone();
    let mut seen: HashSet<[usize; 2]> = edges.iter().copied().collect();
    let mut apex = Vec::with_capacity(s.n_faces());
    let mut normals = Vec::with_capacity(s.n_faces());
    for (f, cycle) in topo.faces.iter().enumerate() {
        let pts: Vec<Vector3<T>> = cycle.iter().map(|&v| s.vertex_positions()[v]).collect();
        let normal = best_fit_normal(&pts, s.tolerance()).ok_or(Error::DegenerateFace { face: f })?;
        let h = topo.face_edges[f].iter().fold(T::zero(), |acc, &(e, _)| acc + s.edge_length(e))
            / T::from_usize(cycle.len()).unwrap();
        let a = positions.len();
        positions.push(s.centroid(Cell::Face(f)) + normal * h);
        apex.push(a);
        normals.push(normal);
        let mut members = cycle.clone();
        members.push(a);
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                let (u, v) = (members[i].min(members[j]), members[i].max(members[j]));
                if seen.insert([u, v]) {
                    edges.push([u, v]);
                }
            }
        }
    }
    let mut matrix = DMatrix::zeros(edges.len(), 3 * positions.len());
    for (row, &[u, v]) in edges.iter().enumerate() {
        let l = (positions[v] - positions[u]).normalize();
        for k in 0..3 {
            matrix[(row, 3 * v + k)] = l[k];
            matrix[(row, 3 * u + k)] = -l[k];
        }
    }
    debug_assert_eq!(apex.first().copied().unwrap_or(nv), nv);
    Ok(StiffenedLinkage { positions, n_surface_vertices: nv, apex, normals, edges, matrix })
}

/// Orthonormal basis of `ker M'`.
pub fn truss_kernel<T: Scalar>(x: &StiffenedLinkage<T>, policy: RankPolicy<T>) -> SubspaceBasis<T> {
    SubspaceBasis::new(linalg::null_space(&x.matrix, policy), policy.tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn v(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z)
    }

    fn two_triangles() -> OrigamiSurface {
        OrigamiSurface::build(
            vec![v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.1), v(0.2, 1.0, 0.0), v(1.1, 1.2, 0.3)],
            vec![vec![0, 1, 2], vec![1, 3, 2]],
        )
        .unwrap()
    }

    #[test]
    fn hinge_model_of_two_triangles_is_unconstrained() {
        let m = build_hinge_model(&two_triangles()).unwrap();
        assert_eq!(m.complex.d1.shape(), (0, 1));
        assert_eq!(m.homology(1, RankPolicy::default()).dim(), 1);
    }

    #[test]
    fn zero_width_constant_cosheaf_is_empty() {
        let m = build_constant_model(&two_triangles(), 0, Support::All).unwrap();
        assert_eq!(m.complex.dims, [0, 0, 0]);
    }

    #[test]
    fn constant_cosheaf_boundary_is_signed_incidence() {
        let s = two_triangles();
        let m = build_constant_model(&s, 1, Support::All).unwrap();
        let (d1, d2) = s.topology().boundary_matrices();
        assert_eq!(m.complex.d1, d1.map(|x| x as f64));
        assert_eq!(m.complex.d2, d2.map(|x| x as f64));
    }

    #[test]
    fn stiffened_triangle_and_quad_bar_counts() {
        let tri = OrigamiSurface::build(vec![v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)], vec![vec![0, 1, 2]])
            .unwrap();
        let x = stiffen(&tri).unwrap();
        assert_eq!((x.n_vertices(), x.n_edges()), (4, 6));
        assert_eq!(truss_kernel(&x, RankPolicy::default()).dim(), 6);

        let quad = OrigamiSurface::build(
            vec![v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(1.0, 1.0, 0.0), v(0.0, 1.0, 0.0)],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        let x = stiffen(&quad).unwrap();
        // K5 on the four corners and the apex: 4 sides + 2 diagonals + 4 apex bars.
        assert_eq!(x.n_edges(), 10);
        assert_eq!(x.n_vertices(), 5);
        let apex = x.positions[x.apex[0]];
        assert!((apex - v(0.5, 0.5, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn uniform_translation_is_in_truss_kernel() {
        let x = stiffen(&two_triangles()).unwrap();
        let beta = v(0.3, -1.0, 2.0);
        let y = DVector::from_iterator(3 * x.n_vertices(), (0..x.n_vertices()).flat_map(|_| beta.iter().copied().collect::<Vec<_>>()));
        assert!(x.residual(&y).amax() < 1e-12);
    }

    #[test]
    fn collinear_points_have_no_normal() {
        assert!(best_fit_normal(&[v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(2.0, 0.0, 0.0)], 1e-9).is_none());
        let n = best_fit_normal(&[v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)], 1e-9).unwrap();
        assert!((n - v(0.0, 0.0, 1.0)).norm() < 1e-14);
    }
}
