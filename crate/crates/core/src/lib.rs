//! First-order kinematics of rigid origami as cosheaf homology.
//!
//! A polyhedral surface carries several linear models of its infinitesimal
//! motions: hinge rates on interior edges, spatial velocities of the faces,
//! and vertex velocities of a braced truss. Each is the homology of a
//! cosheaf chain complex on the surface, and the models are related by
//! explicit maps (`theta`, its pseudoinverse, the loop obstruction `iota_*`,
//! and `eta`).
//!
//! ```
//! use nalgebra::Vector3;
//! use origami_cosheaf::{KinematicModels, OrigamiSurface, Tolerances};
//!
//! let v = |x, y, z| Vector3::new(x, y, z);
//! let surface = OrigamiSurface::build(
//!     vec![v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(2.0, 0.0, 0.1), v(0.0, 1.0, 0.0), v(1.0, 1.0, 0.0), v(2.0, 1.0, 0.0)],
//!     vec![vec![0, 1, 4, 3], vec![1, 2, 5, 4]],
//! )
//! .unwrap();
//! let models = KinematicModels::build(surface, Tolerances::default()).unwrap();
//! assert_eq!(models.dimensions().h2_spatial, 7);
//! ```
//!
//! Everything is generic over [`Scalar`] (`f64` by default, `f32` supported).

pub mod cell_complex;
pub mod cosheaf;
pub mod error;
pub mod io;
pub mod linalg;
pub mod maps;
pub mod models;
pub mod scalar;
pub mod serial;
pub mod spatial;

pub use cell_complex::{BaseHomology, Cell, OrigamiSurface, Topology};
pub use cosheaf::{
    check_exact_sequence, connecting_map, homology_basis, induced_map, ChainComplex, ConnectingMap, Cosheaf, CosheafMap,
    ExactnessReport, InducedMap, SubspaceBasis,
};
pub use error::{Error, Result};
pub use linalg::RankPolicy;
pub use maps::{
    build_exact_sequence, build_exact_sequence_pinned, eta_map, hinge_to_truss, iota_star, theta, theta_pinv,
    ConversionReport, Dimensions, ExactSequence, KinematicModels, ModelSolution, ThetaMap, Tolerances,
};
pub use models::{
    build_constant_model, build_hinge_model, build_rigid_model, build_spatial_model, constant_cosheaf, stiffen,
    truss_kernel, CosheafModel, ModelKind, StiffenedLinkage, Support,
};
pub use scalar::Scalar;
pub use serial::{check_serial, serial_chain_operators, SerialChain, SerialCheck, SerialOperators};
pub use spatial::{RigidBodyOp, SpatialVector};

pub type OrigamiSurfaceF64 = OrigamiSurface<f64>;
pub type OrigamiSurfaceF32 = OrigamiSurface<f32>;
pub type KinematicModelsF64 = KinematicModels<f64>;
pub type KinematicModelsF32 = KinematicModels<f32>;
pub type SubspaceBasisF64 = SubspaceBasis<f64>;
pub type SubspaceBasisF32 = SubspaceBasis<f32>;
pub type ChainComplexF64 = ChainComplex<f64>;
pub type ChainComplexF32 = ChainComplex<f32>;
