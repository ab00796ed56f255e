//! Solution vectors keyed by cell id.
//!
//! `{"model": "hinge", "values": {"e3": [0.5], ...}}`. Hinge values live on
//! interior edges (`e<i>`, one rate), spatial values on faces (`f<i>`,
//! `[omega, beta]`), truss values on surface vertices (`v<i>`) and face
//! apexes (`a<face>`), three components each. Cells left out are zero.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cell_complex::Cell;
use crate::error::{Error, Result};
use crate::io::json::to_canonical_json;
use crate::maps::KinematicModels;
use crate::models::ModelKind;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub model: ModelKind,
    pub values: BTreeMap<String, Vec<f64>>,
}

impl SolutionFile {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes)
            .map_err(|e| Error::Parse { path: "$".into(), line: 0, message: format!("input is not UTF-8: {e}") })?;
        serde_json::from_str(text).map_err(|e| Error::Parse { path: "$".into(), line: e.line(), message: e.to_string() })
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&serde_json::to_value(self).expect("solution is serializable"))
    }

    /// Keys and block offsets of the chain vector for `kind`.
    pub fn layout<T: Scalar>(m: &KinematicModels<T>, kind: ModelKind) -> Result<Vec<(String, usize, usize)>> {
        let mut out = Vec::new();
        match kind {
            ModelKind::Hinge => {
                let h = &m.sequence.hinge.complex;
                for e in 0..m.surface.n_edges() {
                    if let Some(o) = h.offset(Cell::Edge(e)) {
                        out.push((format!("e{e}"), o, 1));
                    }
                }
            }
            ModelKind::Spatial => {
                let sp = &m.sequence.spatial.complex;
                for f in 0..m.surface.n_faces() {
                    if let Some(o) = sp.offset(Cell::Face(f)) {
                        out.push((format!("f{f}"), o, 6));
                    }
                }
            }
            ModelKind::Truss => {
                for v in 0..m.linkage.n_surface_vertices {
                    out.push((format!("v{v}"), 3 * v, 3));
                }
                for (f, &a) in m.linkage.apex.iter().enumerate() {
                    out.push((format!("a{f}"), 3 * a, 3));
                }
            }
            other => {
                return Err(Error::InvalidParams(format!("no solution layout for the {other:?} model")));
            }
        }
        Ok(out)
    }

    /// Chain vector for the file's model, checking every key.
    pub fn to_vector<T: Scalar>(&self, m: &KinematicModels<T>) -> Result<DVector<T>> {
        let layout = Self::layout(m, self.model)?;
        let len = layout.iter().map(|(_, o, w)| o + w).max().unwrap_or(0);
        let index: BTreeMap<&str, (usize, usize)> = layout.iter().map(|(k, o, w)| (k.as_str(), (*o, *w))).collect();
        let mut x = DVector::zeros(len);
        for (key, vals) in &self.values {
            let &(o, w) = index.get(key.as_str()).ok_or_else(|| Error::UnknownCellId(key.clone()))?;
            if vals.len() != w {
                return Err(Error::ShapeMismatch(format!("{key} needs {w} values, found {}", vals.len())));
            }
            if let Some(bad) = vals.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidParams(format!("{key} holds a non-finite value {bad}")));
            }
            for (k, v) in vals.iter().enumerate() {
                x[o + k] = T::lit(*v);
            }
        }
        Ok(x)
    }

    pub fn from_vector<T: Scalar>(m: &KinematicModels<T>, kind: ModelKind, x: &DVector<T>) -> Result<Self> {
        let layout = Self::layout(m, kind)?;
        let values = layout
            .into_iter()
            .map(|(k, o, w)| (k, (o..o + w).map(|i| x[i].to_f64_lossy()).collect()))
            .collect();
        Ok(Self { model: kind, values })
    }
}
