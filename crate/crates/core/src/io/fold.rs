//! The subset of the FOLD crease-pattern format used here:
//! `vertices_coords`, optional `edges_vertices`, and `faces_vertices`.
//! Any other top-level keys are carried through untouched.

use std::collections::BTreeMap;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cell_complex::OrigamiSurface;
use crate::error::{Error, Result};
use crate::io::json::to_canonical_json;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldDocument {
    /// Always three coordinates; two-dimensional input is padded with `z = 0`.
    pub vertices_coords: Vec<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges_vertices: Option<Vec<[usize; 2]>>,
    pub faces_vertices: Vec<Vec<usize>>,
    #[serde(flatten)]
    pub metadata: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
struct RawDocument {
    vertices_coords: Vec<Vec<f64>>,
    #[serde(default)]
    edges_vertices: Option<Vec<[usize; 2]>>,
    faces_vertices: Vec<Vec<usize>>,
    #[serde(flatten)]
    metadata: BTreeMap<String, Value>,
}

fn parse_error(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), line, message: message.into() }
}

/// Parses and range-checks a FOLD-subset document.
pub fn parse_fold(bytes: &[u8]) -> Result<FoldDocument> {
    let text = std::str::from_utf8(bytes).map_err(|e| parse_error("$", 0, format!("input is not UTF-8: {e}")))?;
    let raw: RawDocument = serde_json::from_str(text).map_err(|e| parse_error("$", e.line(), e.to_string()))?;
    let mut vertices_coords = Vec::with_capacity(raw.vertices_coords.len());
    for (i, c) in raw.vertices_coords.iter().enumerate() {
        let path = format!("vertices_coords[{i}]");
        let p = match c.as_slice() {
            [x, y] => [*x, *y, 0.0],
            [x, y, z] => [*x, *y, *z],
            _ => return Err(parse_error(&path, 0, format!("expected 2 or 3 coordinates, found {}", c.len()))),
        };
        vertices_coords.push(p);
    }
    let nv = vertices_coords.len();
    for (f, cycle) in raw.faces_vertices.iter().enumerate() {
        for (k, &v) in cycle.iter().enumerate() {
            if v >= nv {
                return Err(Error::IndexOutOfRange { path: format!("faces_vertices[{f}][{k}]"), index: v, bound: nv });
            }
        }
    }
    if let Some(edges) = &raw.edges_vertices {
        for (e, pair) in edges.iter().enumerate() {
            for (k, &v) in pair.iter().enumerate() {
                if v >= nv {
                    return Err(Error::IndexOutOfRange { path: format!("edges_vertices[{e}][{k}]"), index: v, bound: nv });
                }
            }
        }
    }
    Ok(FoldDocument {
        vertices_coords,
        edges_vertices: raw.edges_vertices,
        faces_vertices: raw.faces_vertices,
        metadata: raw.metadata,
    })
}

impl FoldDocument {
    pub fn to_surface<T: Scalar>(&self, tol: T) -> Result<OrigamiSurface<T>> {
        let positions = self.vertices_coords.iter().map(|p| Vector3::new(T::lit(p[0]), T::lit(p[1]), T::lit(p[2]))).collect();
        OrigamiSurface::build_with(positions, self.faces_vertices.clone(), self.edges_vertices.clone(), tol)
    }

    /// Document for a surface, with edges listed in the surface's edge order.
    pub fn from_surface<T: Scalar>(s: &OrigamiSurface<T>) -> Self {
        Self {
            vertices_coords: s
                .vertex_positions()
                .iter()
                .map(|p| [p[0].to_f64_lossy(), p[1].to_f64_lossy(), p[2].to_f64_lossy()])
                .collect(),
            edges_vertices: Some(s.edges().to_vec()),
            faces_vertices: s.faces().to_vec(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&serde_json::to_value(self).expect("document is serializable"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_TRIANGLES: &str = r#"{
        "file_creator": "hand",
        "vertices_coords": [[0,0,0],[1,0,0],[0,1,0],[1,1,0.2]],
        "faces_vertices": [[0,1,2],[1,3,2]]
    }"#;

    #[test]
    fn minimal_document_builds() {
        let doc = parse_fold(TWO_TRIANGLES.as_bytes()).unwrap();
        let s = doc.to_surface::<f64>(1e-9).unwrap();
        assert_eq!((s.n_vertices(), s.n_edges(), s.n_faces()), (4, 5, 2));
        assert_eq!(doc.metadata["file_creator"], Value::String("hand".into()));
    }

    #[test]
    fn missing_vertex_is_out_of_range() {
        let bad = r#"{"vertices_coords": [[0,0],[1,0],[0,1]], "faces_vertices": [[0,1,99]]}"#;
        match parse_fold(bad.as_bytes()) {
            Err(Error::IndexOutOfRange { index, bound, path }) => {
                assert_eq!((index, bound), (99, 3));
                assert_eq!(path, "faces_vertices[0][2]");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn planar_coordinates_are_padded() {
        let doc = parse_fold(br#"{"vertices_coords": [[0,0],[1,0],[0,1]], "faces_vertices": [[0,1,2]]}"#).unwrap();
        assert!(doc.vertices_coords.iter().all(|p| p[2] == 0.0));
    }

    #[test]
    fn syntax_errors_report_a_line() {
        match parse_fold(b"{\n\"vertices_coords\": [\n[0,0,]\n]}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_fold(b"\xff"), Err(Error::Parse { .. })));
        assert!(matches!(parse_fold(br#"{"vertices_coords": [[0]], "faces_vertices": []}"#), Err(Error::Parse { .. })));
    }

    #[test]
    fn serialization_round_trips() {
        let doc = parse_fold(TWO_TRIANGLES.as_bytes()).unwrap();
        assert_eq!(parse_fold(doc.to_json().as_bytes()).unwrap(), doc);
    }
}
