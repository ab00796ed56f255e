use thiserror::Error;

use crate::cell_complex::Cell;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid surface input: {0}")]
    InvalidInput(String),
    #[error("surface is not orientable (conflict at face {face})")]
    NonOrientable { face: usize },
    #[error("non-manifold {what} {index}: {detail}")]
    NonManifold { what: &'static str, index: usize, detail: String },
    #[error("degenerate cell {cell}: affine rank {rank} < {expected}")]
    Degenerate { cell: Cell, rank: usize, expected: usize },
    #[error("hinge axis has zero length")]
    ZeroAxis,
    #[error("cosheaf is not functorial: residual {residual:e} at {face} > {edge} > {vertex}")]
    FunctorialityViolation { face: Cell, edge: Cell, vertex: Cell, residual: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("lift failure: {0}")]
    LiftFailure(String),
    #[error("exactness violated at {cell}: {kind} residual {residual:e}")]
    ExactnessViolation { cell: Cell, kind: &'static str, residual: f64 },
    #[error("input is not a cycle of the {model} model (relative residual {residual:e})")]
    NotACycle { model: &'static str, residual: f64 },
    #[error("vertex {vertex} receives inconsistent velocities from its faces (disagreement {disagreement:e})")]
    WellDefinednessViolation { vertex: usize, disagreement: f64 },
    #[error("velocity field warps face {face} (rigid fit residual {residual:e})")]
    NonRigidMotion { face: usize, residual: f64 },
    #[error("face {face} has no well-defined best-fit normal")]
    DegenerateFace { face: usize },
    #[error("hinge {edge} has a zero-length axis")]
    DegenerateHinge { edge: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error at {path} (line {line}): {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("index {index} out of range at {path} (bound {bound})")]
    IndexOutOfRange { path: String, index: usize, bound: usize },
    #[error("unknown cell id `{0}`")]
    UnknownCellId(String),
    #[error("{0}")]
    Io(String),
}
