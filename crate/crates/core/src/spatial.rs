//! Spatial (screw) vector algebra with identity frame rotations.
//!
//! Spatial vectors are stacked `[omega; beta]` (angular over linear). Frames
//! differ only by their base point, so rigid body operators are unipotent.

use nalgebra::{DMatrix, Matrix3, Matrix6, SMatrix, SVector, Vector3, Vector6};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Spatial velocity `[omega, beta]` measured at `anchor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialVector<T: Scalar = f64> {
    pub omega: Vector3<T>,
    pub beta: Vector3<T>,
    pub anchor: Vector3<T>,
}

impl<T: Scalar> SpatialVector<T> {
    pub fn new(omega: Vector3<T>, beta: Vector3<T>, anchor: Vector3<T>) -> Self {
        Self { omega, beta, anchor }
    }

    pub fn from_stacked(v: &Vector6<T>, anchor: Vector3<T>) -> Self {
        Self {
            omega: v.fixed_rows::<3>(0).into_owned(),
            beta: v.fixed_rows::<3>(3).into_owned(),
            anchor,
        }
    }

    pub fn stacked(&self) -> Vector6<T> {
        let mut v = Vector6::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&self.omega);
        v.fixed_rows_mut::<3>(3).copy_from(&self.beta);
        v
    }

    /// Same motion expressed at another base point.
    pub fn transfer_to(&self, point: Vector3<T>) -> Self {
        let op = rigid_transfer(self.anchor, point);
        Self::from_stacked(&op.apply(&self.stacked()), point)
    }

    pub fn is_finite(&self) -> bool {
        self.omega.iter().chain(self.beta.iter()).chain(self.anchor.iter()).all(|x| x.is_finite())
    }
}

/// Skew matrix with `cross_op(w) * a == w x a`.
pub fn cross_op<T: Scalar>(w: &Vector3<T>) -> Matrix3<T> {
    let z = T::zero();
    Matrix3::new(z, -w[2], w[1], w[2], z, -w[0], -w[1], w[0], z)
}

/// Rigid body operator `Psi_{F,G}` moving a velocity from `from_point` to `to_point`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyOp<T: Scalar = f64> {
    pub from_point: Vector3<T>,
    pub to_point: Vector3<T>,
    pub matrix: Matrix6<T>,
}

impl<T: Scalar> RigidBodyOp<T> {
    pub fn apply(&self, v: &Vector6<T>) -> Vector6<T> {
        self.matrix * v
    }

    pub fn inverse(&self) -> Self {
        rigid_transfer(self.to_point, self.from_point)
    }

    /// `other ∘ self`; requires `other.from_point == self.to_point`.
    pub fn then(&self, other: &Self) -> Self {
        Self {
            from_point: self.from_point,
            to_point: other.to_point,
            matrix: other.matrix * self.matrix,
        }
    }

    pub fn as_dmatrix(&self) -> DMatrix<T> {
        DMatrix::from_iterator(6, 6, self.matrix.iter().copied())
    }
}

/// `[[I, 0], [(p_F - p_G)_x, I]]`.
pub fn rigid_transfer<T: Scalar>(from: Vector3<T>, to: Vector3<T>) -> RigidBodyOp<T> {
    let mut m = Matrix6::identity();
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&cross_op(&(from - to)));
    RigidBodyOp { from_point: from, to_point: to, matrix: m }
}

fn unit_axis<T: Scalar>(axis: &Vector3<T>) -> Result<Vector3<T>> {
    let n = axis.norm();
    if !(n > T::default_epsilon()) || !n.is_finite() {
        return Err(Error::ZeroAxis);
    }
    Ok(axis / n)
}

/// Hinge operator `iota_e`: `theta_dot ↦ [theta_dot * l_e, 0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HingeOp<T: Scalar = f64> {
    pub axis: Vector3<T>,
    pub matrix: SVector<T, 6>,
}

impl<T: Scalar> HingeOp<T> {
    pub fn apply(&self, rate: T) -> Vector6<T> {
        self.matrix * rate
    }

    pub fn as_dmatrix(&self) -> DMatrix<T> {
        DMatrix::from_column_slice(6, 1, self.matrix.as_slice())
    }
}

/// The axis is normalized; a zero axis is rejected.
pub fn hinge_embed<T: Scalar>(axis: &Vector3<T>) -> Result<HingeOp<T>> {
    let l = unit_axis(axis)?;
    let mut m = SVector::<T, 6>::zeros();
    m.fixed_rows_mut::<3>(0).copy_from(&l);
    Ok(HingeOp { axis: l, matrix: m })
}

/// Orthonormal pair completing `l` to a right-handed triad `(a, b, l)`.
///
/// Starts from the standard basis vector least aligned with `l` (lowest index
/// on ties), so the result is a deterministic function of the axis.
pub fn complement_pair<T: Scalar>(l: &Vector3<T>) -> (Vector3<T>, Vector3<T>) {
    let k = (0..3)
        .min_by(|&i, &j| l[i].abs().partial_cmp(&l[j].abs()).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    let mut seed = Vector3::zeros();
    seed[k] = T::one();
    let a = (seed - l * l.dot(&seed)).normalize();
    let b = l.cross(&a);
    (a, b)
}

/// Edge projection `pi_e` onto `(span [l_e, 0])^⊥`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeProjection<T: Scalar = f64> {
    pub axis: Vector3<T>,
    pub matrix: SMatrix<T, 5, 6>,
}

impl<T: Scalar> EdgeProjection<T> {
    pub fn as_dmatrix(&self) -> DMatrix<T> {
        DMatrix::from_iterator(5, 6, self.matrix.iter().copied())
    }
}

/// Rows: the two angular directions orthogonal to `l_e`, then the three
/// linear coordinates unchanged.
pub fn edge_projection<T: Scalar>(axis: &Vector3<T>) -> Result<EdgeProjection<T>> {
    let l = unit_axis(axis)?;
    let (a, b) = complement_pair(&l);
    let mut m = SMatrix::<T, 5, 6>::zeros();
    m.fixed_view_mut::<1, 3>(0, 0).copy_from(&a.transpose());
    m.fixed_view_mut::<1, 3>(1, 0).copy_from(&b.transpose());
    m.fixed_view_mut::<3, 3>(2, 3).copy_from(&Matrix3::identity());
    Ok(EdgeProjection { axis: l, matrix: m })
}

/// Linear velocity of the point `p_v` carried by the rigid motion `nu`.
pub fn eta_face_vertex<T: Scalar>(nu: &SpatialVector<T>, p_v: &Vector3<T>) -> Vector3<T> {
    nu.beta + nu.omega.cross(&(p_v - nu.anchor))
}

/// `eta_{f▷v}` as a `3 x 6` matrix acting on stacked velocities at `p_f`.
pub fn eta_matrix<T: Scalar>(p_f: &Vector3<T>, p_v: &Vector3<T>) -> DMatrix<T> {
    let psi = rigid_transfer(*p_f, *p_v).matrix;
    DMatrix::from_iterator(3, 6, psi.fixed_view::<3, 6>(3, 0).iter().copied())
}

/// `[0 I]`: keeps the linear block of a spatial vector.
pub fn linear_block<T: Scalar>() -> DMatrix<T> {
    let mut m = DMatrix::zeros(3, 6);
    m.view_mut((0, 3), (3, 3)).fill_with_identity();
    m
}

/// `[I; 0]`: embeds an angular velocity as a pure rotation.
pub fn angular_embedding<T: Scalar>() -> DMatrix<T> {
    let mut m = DMatrix::zeros(6, 3);
    m.view_mut((0, 0), (3, 3)).fill_with_identity();
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v3(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z)
    }

    #[test]
    fn cross_op_layout() {
        assert_eq!(cross_op(&Vector3::<f64>::zeros()), Matrix3::zeros());
        let m = cross_op(&v3(1.0, 0.0, 0.0));
        assert_eq!(m[(1, 2)], -1.0);
        assert_eq!(m[(2, 1)], 1.0);
        assert_eq!(m.iter().filter(|x| **x != 0.0).count(), 2);
        let w = v3(0.3, -1.2, 2.0);
        assert_eq!(cross_op(&w).transpose(), -cross_op(&w));
    }

    #[test]
    fn transfer_examples() {
        let p = v3(0.4, 1.0, -2.0);
        assert_eq!(rigid_transfer(p, p).matrix, Matrix6::identity());
        let op = rigid_transfer(Vector3::zeros(), v3(1.0, 0.0, 0.0));
        let out = op.apply(&Vector6::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0));
        assert!((out - Vector6::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hinge_examples() {
        let h = hinge_embed(&v3(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(h.apply(1.0), Vector6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        let h = hinge_embed(&v3(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(h.apply(2.0), Vector6::new(0.0, 2.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(h.apply(0.0), Vector6::zeros());
        assert_eq!(hinge_embed(&Vector3::<f64>::zeros()), Err(Error::ZeroAxis));
        assert_eq!(edge_projection(&Vector3::<f64>::zeros()), Err(Error::ZeroAxis));
    }

    #[test]
    fn eta_examples() {
        let nu = SpatialVector::new(Vector3::zeros(), v3(1.0, 2.0, 3.0), v3(5.0, 5.0, 5.0));
        assert_eq!(eta_face_vertex(&nu, &v3(-3.0, 0.0, 7.0)), v3(1.0, 2.0, 3.0));
        let nu = SpatialVector::new(v3(0.0, 0.0, 1.0), Vector3::zeros(), Vector3::zeros());
        assert!((eta_face_vertex(&nu, &v3(1.0, 0.0, 0.0)) - v3(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn projection_rows_are_orthonormal_and_kill_axis() {
        let l = v3(0.2, -0.7, 0.4).normalize();
        let p = edge_projection(&l).unwrap();
        let gram = p.matrix * p.matrix.transpose();
        assert!((gram - SMatrix::<f64, 5, 5>::identity()).norm() < 1e-14);
        let mut axis6 = Vector6::zeros();
        axis6.fixed_rows_mut::<3>(0).copy_from(&l);
        assert!((p.matrix * axis6).norm() < 1e-15);
    }

    #[test]
    fn complement_pair_is_deterministic_for_axes() {
        let (a, b) = complement_pair(&v3(1.0, 0.0, 0.0));
        assert_eq!(a, v3(0.0, 1.0, 0.0));
        assert_eq!(b, v3(0.0, 0.0, 1.0));
    }
}
