//! Serial chains: a strip of faces `f_0, ..., f_n` joined by hinges
//! `e_1, ..., e_n`, with `e_i` between `f_{i-1}` and `f_i` and `f_0` grounded.
//!
//! Forward kinematics is the recurrence
//! `nu_i = Psi_{f_{i-1}, f_i} nu_{i-1} + Psi_{e_i, f_i} iota_{e_i} theta_i`,
//! i.e. `nu = Psi iota theta` with a block lower-triangular `Psi`. Its
//! inverse is block bidiagonal and gives the left inverse `D^+ = iota^T Psi^-1`.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::cell_complex::{Cell, OrigamiSurface};
use crate::cosheaf::connecting_map;
use crate::error::{Error, Result};
use crate::linalg::{self, RankPolicy};
use crate::maps::build_exact_sequence_pinned;
use crate::scalar::Scalar;
use crate::spatial::{hinge_embed, rigid_transfer};

/// Faces and hinges of a serial chain in kinematic order.
#[derive(Debug, Clone)]
pub struct SerialChain<T: Scalar = f64> {
    pub surface: OrigamiSurface<T>,
    /// `f_0, ..., f_n`.
    pub faces: Vec<usize>,
    /// `e_1, ..., e_n`.
    pub hinges: Vec<usize>,
    /// Unit axis of each hinge.
    pub axes: Vec<Vector3<T>>,
}

impl<T: Scalar> SerialChain<T> {
    /// Orders the faces of a strip starting from face 0.
    ///
    /// The dual graph must be a path with face 0 at one end and there may be
    /// no interior vertices.
    pub fn from_surface(surface: OrigamiSurface<T>) -> Result<Self> {
        let topo = surface.topology().clone();
        if topo.n_faces() == 0 {
            return Err(Error::InvalidInput("a serial chain needs at least one face".into()));
        }
        if let Some(v) = topo.interior_vertices().first() {
            return Err(Error::InvalidInput(format!("vertex {v} closes a loop; not a serial chain")));
        }
        let hinges_of = |f: usize| -> Vec<usize> {
            topo.face_edges[f].iter().map(|&(e, _)| e).filter(|&e| topo.interior_edge[e]).collect()
        };
        if hinges_of(0).len() > 1 {
            return Err(Error::InvalidInput("face 0 must be an end of the chain".into()));
        }
        let mut faces = vec![0];
        let mut hinges = Vec::new();
        let mut seen = vec![false; topo.n_faces()];
        seen[0] = true;
        let mut current = 0;
        loop {
            let next: Vec<(usize, usize)> = hinges_of(current)
                .into_iter()
                .filter(|e| Some(e) != hinges.last())
                .map(|e| {
                    let other = topo.edge_faces[e].iter().map(|&(g, _)| g).find(|&g| g != current).unwrap_or(current);
                    (e, other)
                })
                .collect();
            match next.as_slice() {
                [] => break,
                [(e, g)] if !seen[*g] => {
                    seen[*g] = true;
                    hinges.push(*e);
                    faces.push(*g);
                    current = *g;
                }
                _ => return Err(Error::InvalidInput(format!("face {current} branches; not a serial chain"))),
            }
        }
        if faces.len() != topo.n_faces() {
            return Err(Error::InvalidInput("surface is not a single strip".into()));
        }
        let mut axes = Vec::with_capacity(hinges.len());
        for &e in &hinges {
            let l = surface.edge_axis(e);
            if !(l.norm() > T::default_epsilon()) || !l.iter().all(|x| x.is_finite()) {
                return Err(Error::DegenerateHinge { edge: e });
            }
            axes.push(l);
        }
        Ok(Self { surface, faces, hinges, axes })
    }

    pub fn len(&self) -> usize {
        self.hinges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hinges.is_empty()
    }

    fn point(&self, c: Cell) -> Vector3<T> {
        self.surface.centroid(c)
    }

    /// `[e_i : f_i]` for each hinge.
    pub fn signs(&self) -> Vec<i8> {
        let topo = self.surface.topology();
        self.hinges.iter().zip(&self.faces[1..]).map(|(&e, &f)| topo.edge_face_sign(e, f)).collect()
    }

    /// Face velocities `nu_1..nu_n` (stacked, at face centroids) from the recurrence.
    pub fn propagate(&self, rates: &DVector<T>) -> Result<DVector<T>> {
        let n = self.len();
        if rates.len() != n {
            return Err(Error::ShapeMismatch(format!("{} rates for {n} hinges", rates.len())));
        }
        let mut out = DVector::zeros(6 * n);
        let mut prev = nalgebra::Vector6::zeros();
        for i in 0..n {
            let (fp, f, e) = (self.faces[i], self.faces[i + 1], self.hinges[i]);
            let carried = rigid_transfer(self.point(Cell::Face(fp)), self.point(Cell::Face(f))).apply(&prev);
            let hinge = hinge_embed(&self.axes[i]).map_err(|_| Error::DegenerateHinge { edge: e })?;
            let local = rigid_transfer(self.point(Cell::Edge(e)), self.point(Cell::Face(f))).apply(&hinge.apply(rates[i]));
            prev = carried + local;
            out.fixed_rows_mut::<6>(6 * i).copy_from(&prev);
        }
        Ok(out)
    }
}

/// The global operators of a serial chain.
#[derive(Debug, Clone)]
pub struct SerialOperators<T: Scalar = f64> {
    /// Block `(i, j)` is `Psi_{e_j, f_i}` for `j <= i`.
    pub psi: DMatrix<T>,
    /// Block bidiagonal: `Psi_{f_i, e_i}` on the diagonal, `-Psi_{f_{i-1}, e_i}` below.
    pub psi_inverse: DMatrix<T>,
    /// Block diagonal hinge embeddings, `6n x n`.
    pub iota: DMatrix<T>,
    /// Reindexing between edge-anchored and face-anchored block coordinates.
    pub reindex: DMatrix<T>,
    /// `D = I Psi iota`.
    pub d: DMatrix<T>,
    /// `D^+ = iota^T Psi^-1`.
    pub d_pinv: DMatrix<T>,
}

pub fn serial_chain_operators<T: Scalar>(chain: &SerialChain<T>) -> Result<SerialOperators<T>> {
    let n = chain.len();
    let face = |i: usize| chain.point(Cell::Face(chain.faces[i]));
    let edge = |i: usize| chain.point(Cell::Edge(chain.hinges[i - 1]));
    let mut psi = DMatrix::zeros(6 * n, 6 * n);
    let mut psi_inverse = DMatrix::zeros(6 * n, 6 * n);
    let mut iota = DMatrix::zeros(6 * n, n);
    for i in 1..=n {
        for j in 1..=i {
            let block = rigid_transfer(edge(j), face(i)).matrix;
            psi.fixed_view_mut::<6, 6>(6 * (i - 1), 6 * (j - 1)).copy_from(&block);
        }
        let diag = rigid_transfer(face(i), edge(i)).matrix;
        psi_inverse.fixed_view_mut::<6, 6>(6 * (i - 1), 6 * (i - 1)).copy_from(&diag);
        if i > 1 {
            let below = rigid_transfer(face(i - 1), edge(i)).matrix;
            psi_inverse.fixed_view_mut::<6, 6>(6 * (i - 1), 6 * (i - 2)).copy_from(&(-below));
        }
        let h = hinge_embed(&chain.axes[i - 1]).map_err(|_| Error::DegenerateHinge { edge: chain.hinges[i - 1] })?;
        iota.fixed_view_mut::<6, 1>(6 * (i - 1), i - 1).copy_from(&h.matrix);
    }
    let reindex = DMatrix::identity(6 * n, 6 * n);
    let d = &reindex * &psi * &iota;
    let d_pinv = iota.transpose() * &psi_inverse;
    Ok(SerialOperators { psi, psi_inverse, iota, reindex, d, d_pinv })
}

/// Residuals of the serial-chain identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerialCheck<T: Scalar = f64> {
    /// `max |recurrence - D theta|` over the probe rates.
    pub recurrence: T,
    /// `max |Psi^-1 Psi - I|`.
    pub inverse: T,
    /// `max |D^+ D - I|`.
    pub left_inverse: T,
    /// `max |D^+ - K|`, where `K` is the connecting map of the grounded chain
    /// with hinge orientation signs `[e_i : f_i]` absorbed.
    pub connecting: T,
}

impl<T: Scalar> SerialCheck<T> {
    pub fn passed(&self, algebra_tol: T, homology_tol: T) -> bool {
        self.recurrence <= algebra_tol
            && self.inverse <= algebra_tol
            && self.left_inverse <= algebra_tol
            && self.connecting <= homology_tol
    }
}

/// The connecting map `H2 S -> H1 H` of the chain with `f_0` grounded,
/// written in chain order (faces `f_1..f_n`, hinges `e_1..e_n`).
///
/// Returns the chain-level operator and an orthonormal basis of the grounded
/// spatial homology, both in chain order.
pub fn grounded_connecting_operator<T: Scalar>(
    chain: &SerialChain<T>,
    policy: RankPolicy<T>,
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let n = chain.len();
    let seq = build_exact_sequence_pinned(&chain.surface, &[Cell::Face(chain.faces[0])])?;
    let cm = connecting_map(&seq.iota, &seq.pi, 2, policy)?;
    // Face-ordered spatial chains and edge-ordered hinge chains, permuted to chain order.
    let mut p_face = DMatrix::zeros(seq.spatial.complex.dims[2], 6 * n);
    for (i, &f) in chain.faces[1..].iter().enumerate() {
        let off = seq.spatial.complex.offset(Cell::Face(f)).ok_or_else(|| Error::UnknownCellId(format!("f{f}")))?;
        p_face.view_mut((off, 6 * i), (6, 6)).fill_with_identity();
    }
    let mut p_edge = DMatrix::zeros(seq.hinge.complex.dims[1], n);
    for (i, &e) in chain.hinges.iter().enumerate() {
        let off = seq.hinge.complex.offset(Cell::Edge(e)).ok_or_else(|| Error::UnknownCellId(format!("e{e}")))?;
        p_edge[(off, i)] = T::one();
    }
    let chain_level = &cm.target_basis.basis * &cm.matrix * cm.source_basis.basis.transpose();
    let basis = p_face.transpose() * &cm.source_basis.basis;
    Ok((p_edge.transpose() * chain_level * p_face, basis))
}

/// Verifies the serial-chain identities; `probes` are hinge-rate vectors.
pub fn check_serial<T: Scalar>(
    chain: &SerialChain<T>,
    ops: &SerialOperators<T>,
    probes: &[DVector<T>],
    policy: RankPolicy<T>,
) -> Result<SerialCheck<T>> {
    let n = chain.len();
    let mut recurrence = T::zero();
    for theta in probes {
        let nu = chain.propagate(theta)?;
        recurrence = recurrence.max(linalg::max_abs(&DMatrix::from_column_slice(6 * n, 1, (nu - &ops.d * theta).as_slice())));
    }
    let inverse = linalg::max_abs(&(&ops.psi_inverse * &ops.psi - DMatrix::identity(6 * n, 6 * n)));
    let left_inverse = linalg::max_abs(&(&ops.d_pinv * &ops.d - DMatrix::identity(n, n)));
    let (k, cycles) = grounded_connecting_operator(chain, policy)?;
    let signs = DMatrix::from_diagonal(&DVector::from_iterator(n, chain.signs().into_iter().map(|s| T::from_i8(s).unwrap())));
    let connecting = linalg::max_abs(&((&signs * &ops.d_pinv - k) * cycles));
    Ok(SerialCheck { recurrence, inverse, left_inverse, connecting })
}
