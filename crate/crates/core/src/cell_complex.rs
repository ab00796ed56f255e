//! Oriented cellular origami surfaces.
//!
//! A surface is a 2-dimensional cell complex (vertices, edges, polygonal
//! faces) together with a realization assigning a point of R^3 to every
//! cell. Edges are always oriented from the lower to the higher vertex id;
//! faces carry the orientation of their (possibly reversed) input cycle.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, RankPolicy};
use crate::scalar::Scalar;

/// A cell of the surface, ordered by dimension then index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cell {
    Vertex(usize),
    Edge(usize),
    Face(usize),
}

impl Cell {
    pub fn dim(self) -> usize {
        match self {
            Cell::Vertex(_) => 0,
            Cell::Edge(_) => 1,
            Cell::Face(_) => 2,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Cell::Vertex(i) | Cell::Edge(i) | Cell::Face(i) => i,
        }
    }

    pub fn of_dim(dim: usize, index: usize) -> Cell {
        match dim {
            0 => Cell::Vertex(index),
            1 => Cell::Edge(index),
            2 => Cell::Face(index),
            _ => panic!("cells have dimension 0, 1 or 2"),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Vertex(i) => write!(f, "v{i}"),
            Cell::Edge(i) => write!(f, "e{i}"),
            Cell::Face(i) => write!(f, "f{i}"),
        }
    }
}

/// Combinatorics of the surface: cells, signed incidences, interiority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    /// Edge endpoints `[u, v]` with `u < v`.
    pub edges: Vec<[usize; 2]>,
    /// Oriented vertex cycles.
    pub faces: Vec<Vec<usize>>,
    /// `(edge, [e:f])` in cycle order.
    pub face_edges: Vec<Vec<(usize, i8)>>,
    /// `(face, [e:f])`.
    pub edge_faces: Vec<Vec<(usize, i8)>>,
    pub vertex_edges: Vec<Vec<usize>>,
    pub vertex_faces: Vec<Vec<usize>>,
    pub interior_edge: Vec<bool>,
    pub interior_vertex: Vec<bool>,
}

impl Topology {
    pub fn n_vertices(&self) -> usize {
        self.vertex_edges.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_cells(&self, dim: usize) -> usize {
        match dim {
            0 => self.n_vertices(),
            1 => self.n_edges(),
            2 => self.n_faces(),
            _ => 0,
        }
    }

    /// `[v:e]`: +1 at the head (higher id), -1 at the tail.
    pub fn vertex_edge_sign(&self, v: usize, e: usize) -> i8 {
        let [a, b] = self.edges[e];
        if v == b {
            1
        } else if v == a {
            -1
        } else {
            0
        }
    }

    pub fn edge_face_sign(&self, e: usize, f: usize) -> i8 {
        self.face_edges[f].iter().find(|(ee, _)| *ee == e).map_or(0, |&(_, s)| s)
    }

    /// Codimension-one incidences `(higher, lower, sign)`.
    pub fn incidences(&self) -> Vec<(Cell, Cell, i8)> {
        let mut out = Vec::new();
        for (f, fe) in self.face_edges.iter().enumerate() {
            for &(e, s) in fe {
                out.push((Cell::Face(f), Cell::Edge(e), s));
            }
        }
        for (e, &[u, v]) in self.edges.iter().enumerate() {
            out.push((Cell::Edge(e), Cell::Vertex(u), -1));
            out.push((Cell::Edge(e), Cell::Vertex(v), 1));
        }
        out
    }

    /// All flags `v ◁ e ◁ f`.
    pub fn flags(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (f, fe) in self.face_edges.iter().enumerate() {
            for &(e, _) in fe {
                for v in self.edges[e] {
                    out.push((f, e, v));
                }
            }
        }
        out
    }

    pub fn is_interior(&self, cell: Cell) -> bool {
        match cell {
            Cell::Vertex(v) => self.interior_vertex[v],
            Cell::Edge(e) => self.interior_edge[e],
            Cell::Face(_) => true,
        }
    }

    pub fn interior_edges(&self) -> Vec<usize> {
        (0..self.n_edges()).filter(|&e| self.interior_edge[e]).collect()
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices()).filter(|&v| self.interior_vertex[v]).collect()
    }

    /// Signed incidence matrices `(∂1, ∂2)` of the full complex.
    pub fn boundary_matrices(&self) -> (DMatrix<i64>, DMatrix<i64>) {
        let mut d1 = DMatrix::zeros(self.n_vertices(), self.n_edges());
        for (e, &[u, v]) in self.edges.iter().enumerate() {
            d1[(u, e)] = -1;
            d1[(v, e)] = 1;
        }
        let mut d2 = DMatrix::zeros(self.n_edges(), self.n_faces());
        for (f, fe) in self.face_edges.iter().enumerate() {
            for &(e, s) in fe {
                d2[(e, f)] = s as i64;
            }
        }
        (d1, d2)
    }

    /// Faces reachable from each other across interior edges.
    pub fn dual_components(&self) -> usize {
        let mut seen = vec![false; self.n_faces()];
        let mut count = 0;
        for start in 0..self.n_faces() {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(f) = queue.pop_front() {
                for &(e, _) in &self.face_edges[f] {
                    for &(g, _) in &self.edge_faces[e] {
                        if !seen[g] {
                            seen[g] = true;
                            queue.push_back(g);
                        }
                    }
                }
            }
        }
        count
    }
}

/// Betti numbers of the underlying cell complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseHomology {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
}

/// A realized, oriented origami surface `(X, p)`.
#[derive(Debug, Clone)]
pub struct OrigamiSurface<T: Scalar = f64> {
    topology: Arc<Topology>,
    vertex_positions: Vec<Vector3<T>>,
    edge_centroids: Vec<Vector3<T>>,
    face_centroids: Vec<Vector3<T>>,
    tol: T,
}

impl<T: Scalar> OrigamiSurface<T> {
    /// Builds a surface from vertex positions and face cycles, deriving edges.
    pub fn build(positions: Vec<Vector3<T>>, faces: Vec<Vec<usize>>) -> Result<Self> {
        Self::build_with(positions, faces, None, T::default_tolerance())
    }

    /// Full constructor. When `edges` is given it fixes the edge ids (any
    /// endpoint order) and must coincide with the set of face boundary
    /// segments.
    pub fn build_with(
        positions: Vec<Vector3<T>>,
        faces: Vec<Vec<usize>>,
        edges: Option<Vec<[usize; 2]>>,
        tol: T,
    ) -> Result<Self> {
        let nv = positions.len();
        if faces.is_empty() {
            return Err(Error::InvalidInput("surface needs at least one face".into()));
        }
        if let Some(i) = positions.iter().position(|p| p.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidInput(format!("vertex {i} has a non-finite coordinate")));
        }
        for (f, cycle) in faces.iter().enumerate() {
            if cycle.len() < 3 {
                return Err(Error::InvalidInput(format!("face {f} has fewer than 3 vertices")));
            }
            if let Some(&v) = cycle.iter().find(|&&v| v >= nv) {
                return Err(Error::InvalidInput(format!("face {f} references missing vertex {v}")));
            }
            let mut sorted = cycle.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != cycle.len() {
                return Err(Error::InvalidInput(format!("face {f} repeats a vertex")));
            }
        }

        // Edge ids: given order, or sorted by endpoints.
        let mut edge_list: Vec<[usize; 2]> = Vec::new();
        let mut edge_id: HashMap<[usize; 2], usize> = HashMap::new();
        let key = |a: usize, b: usize| if a < b { [a, b] } else { [b, a] };
        match edges {
            Some(given) => {
                for (i, [a, b]) in given.into_iter().enumerate() {
                    if a >= nv || b >= nv {
                        return Err(Error::InvalidInput(format!("edge {i} references a missing vertex")));
                    }
                    if a == b {
                        return Err(Error::InvalidInput(format!("edge {i} is a loop")));
                    }
                    let k = key(a, b);
                    if edge_id.insert(k, i).is_some() {
                        return Err(Error::InvalidInput(format!("edge {i} is listed twice")));
                    }
                    edge_list.push(k);
                }
            }
            None => {
                let mut all: Vec<[usize; 2]> = faces
                    .iter()
                    .flat_map(|c| (0..c.len()).map(move |i| key(c[i], c[(i + 1) % c.len()])))
                    .collect();
                all.sort_unstable();
                all.dedup();
                for (i, k) in all.into_iter().enumerate() {
                    edge_id.insert(k, i);
                    edge_list.push(k);
                }
            }
        }
        let ne = edge_list.len();

        // Direction each face walks each of its edges, before orientation fixing.
        let mut walk: Vec<Vec<(usize, i8)>> = Vec::with_capacity(faces.len());
        let mut edge_faces_raw: Vec<Vec<usize>> = vec![Vec::new(); ne];
        for (f, cycle) in faces.iter().enumerate() {
            let mut fe = Vec::with_capacity(cycle.len());
            for i in 0..cycle.len() {
                let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                let e = *edge_id.get(&key(a, b)).ok_or_else(|| {
                    Error::InvalidInput(format!("face {f} uses segment ({a}, {b}) missing from edge list"))
                })?;
                fe.push((e, if a < b { 1 } else { -1 }));
                edge_faces_raw[e].push(f);
            }
            walk.push(fe);
        }
        for (e, fs) in edge_faces_raw.iter().enumerate() {
            match fs.len() {
                0 => return Err(Error::InvalidInput(format!("edge {e} bounds no face"))),
                1 | 2 => {}
                n => {
                    return Err(Error::NonManifold {
                        what: "edge",
                        index: e,
                        detail: format!("{n} incident faces"),
                    })
                }
            }
            if fs.len() == 2 && fs[0] == fs[1] {
                return Err(Error::NonManifold {
                    what: "edge",
                    index: e,
                    detail: "face glued to itself".into(),
                });
            }
        }

        // Consistent orientation by breadth-first propagation over the dual graph.
        let nf = faces.len();
        let mut orient: Vec<i8> = vec![0; nf];
        for start in 0..nf {
            if orient[start] != 0 {
                continue;
            }
            orient[start] = 1;
            let mut queue = VecDeque::from([start]);
            while let Some(f) = queue.pop_front() {
                for &(e, df) in &walk[f] {
                    for &g in &edge_faces_raw[e] {
                        if g == f {
                            continue;
                        }
                        let dg = walk[g].iter().find(|(ee, _)| *ee == e).map(|&(_, s)| s).unwrap_or(0);
                        let want = -df * orient[f] * dg;
                        if orient[g] == 0 {
                            orient[g] = want;
                            queue.push_back(g);
                        } else if orient[g] != want {
                            return Err(Error::NonOrientable { face: g });
                        }
                    }
                }
            }
        }
        let faces: Vec<Vec<usize>> = faces
            .into_iter()
            .zip(&orient)
            .map(|(mut c, &o)| {
                if o < 0 {
                    c.reverse();
                }
                c
            })
            .collect();
        let face_edges: Vec<Vec<(usize, i8)>> = faces
            .iter()
            .map(|c| {
                (0..c.len())
                    .map(|i| {
                        let (a, b) = (c[i], c[(i + 1) % c.len()]);
                        (edge_id[&key(a, b)], if a < b { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        let mut edge_faces: Vec<Vec<(usize, i8)>> = vec![Vec::new(); ne];
        for (f, fe) in face_edges.iter().enumerate() {
            for &(e, s) in fe {
                edge_faces[e].push((f, s));
            }
        }
        let interior_edge: Vec<bool> = edge_faces.iter().map(|fs| fs.len() == 2).collect();

        let mut vertex_edges: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (e, &[a, b]) in edge_list.iter().enumerate() {
            vertex_edges[a].push(e);
            vertex_edges[b].push(e);
        }
        let mut vertex_faces: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (f, c) in faces.iter().enumerate() {
            for &v in c {
                vertex_faces[v].push(f);
            }
        }
        if let Some(v) = vertex_faces.iter().position(|fs| fs.is_empty()) {
            return Err(Error::InvalidInput(format!("vertex {v} lies on no face")));
        }

        // Vertex links: incident edges joined through incident faces.
        let mut interior_vertex = vec![false; nv];
        for v in 0..nv {
            let local: BTreeMap<usize, usize> =
                vertex_edges[v].iter().enumerate().map(|(i, &e)| (e, i)).collect();
            let mut parent: Vec<usize> = (0..local.len()).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            for &f in &vertex_faces[v] {
                let at_v: Vec<usize> = face_edges[f]
                    .iter()
                    .map(|&(e, _)| e)
                    .filter(|&e| edge_list[e].contains(&v))
                    .collect();
                if let [a, b] = at_v[..] {
                    let (ra, rb) = (find(&mut parent, local[&a]), find(&mut parent, local[&b]));
                    parent[ra] = rb;
                }
            }
            let roots = (0..local.len()).filter(|&i| find(&mut parent, i) == i).count();
            if roots != 1 {
                return Err(Error::NonManifold {
                    what: "vertex",
                    index: v,
                    detail: format!("link has {roots} components"),
                });
            }
            interior_vertex[v] = vertex_edges[v].iter().all(|&e| interior_edge[e]);
        }

        let topology = Topology {
            edges: edge_list,
            faces,
            face_edges,
            edge_faces,
            vertex_edges,
            vertex_faces,
            interior_edge,
            interior_vertex,
        };

        let half = T::lit(0.5);
        let edge_centroids = topology
            .edges
            .iter()
            .map(|&[a, b]| (positions[a] + positions[b]) * half)
            .collect();
        let face_centroids = topology
            .faces
            .iter()
            .map(|c| {
                let sum = c.iter().fold(Vector3::zeros(), |acc, &v| acc + positions[v]);
                sum / T::from_usize(c.len()).unwrap()
            })
            .collect();

        let surface = Self {
            topology: Arc::new(topology),
            vertex_positions: positions,
            edge_centroids,
            face_centroids,
            tol,
        };
        surface.check_nondegenerate()?;
        Ok(surface)
    }

    /// Affine rank of each cell's vertex set must reach the cell dimension.
    fn check_nondegenerate(&self) -> Result<()> {
        let scale = self.scale();
        for (e, &[a, b]) in self.topology.edges.iter().enumerate() {
            let len = (self.vertex_positions[b] - self.vertex_positions[a]).norm();
            if len <= self.tol * scale {
                return Err(Error::Degenerate { cell: Cell::Edge(e), rank: 0, expected: 1 });
            }
        }
        for f in 0..self.n_faces() {
            let rank = self.cell_affine_rank(Cell::Face(f));
            if rank < 2 {
                return Err(Error::Degenerate { cell: Cell::Face(f), rank, expected: 2 });
            }
        }
        Ok(())
    }

    /// Rank of `{p_v - p_v0 : v ◁ c}` at the surface tolerance.
    pub fn cell_affine_rank(&self, cell: Cell) -> usize {
        let verts = self.cell_vertices(cell);
        if verts.len() < 2 {
            return 0;
        }
        let p0 = self.vertex_positions[verts[0]];
        let mut m = DMatrix::zeros(verts.len() - 1, 3);
        for (i, &v) in verts[1..].iter().enumerate() {
            let d = self.vertex_positions[v] - p0;
            m.set_row(i, &d.transpose());
        }
        linalg::rank(&m, RankPolicy::new(self.tol))
    }

    pub fn cell_vertices(&self, cell: Cell) -> Vec<usize> {
        match cell {
            Cell::Vertex(v) => vec![v],
            Cell::Edge(e) => self.topology.edges[e].to_vec(),
            Cell::Face(f) => self.topology.faces[f].clone(),
        }
    }

    pub fn topology(&self) -> &Arc<Topology> {
        &self.topology
    }

    pub fn tolerance(&self) -> T {
        self.tol
    }

    pub fn n_vertices(&self) -> usize {
        self.topology.n_vertices()
    }

    pub fn n_edges(&self) -> usize {
        self.topology.n_edges()
    }

    pub fn n_faces(&self) -> usize {
        self.topology.n_faces()
    }

    pub fn vertex_positions(&self) -> &[Vector3<T>] {
        &self.vertex_positions
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.topology.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.topology.edges
    }

    pub fn centroid(&self, cell: Cell) -> Vector3<T> {
        match cell {
            Cell::Vertex(v) => self.vertex_positions[v],
            Cell::Edge(e) => self.edge_centroids[e],
            Cell::Face(f) => self.face_centroids[f],
        }
    }

    /// Unit hinge axis `l_e`, pointing from the lower to the higher vertex id.
    pub fn edge_axis(&self, e: usize) -> Vector3<T> {
        let [a, b] = self.topology.edges[e];
        (self.vertex_positions[b] - self.vertex_positions[a]).normalize()
    }

    pub fn edge_length(&self, e: usize) -> T {
        let [a, b] = self.topology.edges[e];
        (self.vertex_positions[b] - self.vertex_positions[a]).norm()
    }

    /// Bounding-box diagonal of the vertex positions.
    pub fn scale(&self) -> T {
        let mut lo = self.vertex_positions[0];
        let mut hi = lo;
        for p in &self.vertex_positions {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (hi - lo).norm()
    }

    pub fn interior_edges(&self) -> Vec<usize> {
        self.topology.interior_edges()
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        self.topology.interior_vertices()
    }

    /// Same combinatorics with every position mapped through `f`.
    pub fn with_positions(&self, f: impl Fn(&Vector3<T>) -> Vector3<T>) -> Result<Self> {
        let positions = self.vertex_positions.iter().map(f).collect();
        Self::build_with(
            positions,
            self.topology.faces.clone(),
            Some(self.topology.edges.clone()),
            self.tol,
        )
    }

    /// Betti numbers `(dim H0 X, dim H1 X, dim H2 X)` of the full complex.
    pub fn base_homology(&self) -> BaseHomology {
        let (d1, d2) = self.topology.boundary_matrices();
        let r1 = exact_rank(&d1);
        let r2 = exact_rank(&d2);
        BaseHomology {
            b0: self.n_vertices() - r1,
            b1: self.n_edges() - r1 - r2,
            b2: self.n_faces() - r2,
        }
    }
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
///
/// Intermediate entries are minors of the input, so signed incidence matrices
/// stay within {-1, 0, 1}. Falls back to a floating point rank on overflow.
pub fn exact_rank(m: &DMatrix<i64>) -> usize {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<i128>> = (0..rows).map(|i| (0..cols).map(|j| m[(i, j)] as i128).collect()).collect();
    let mut prev: i128 = 1;
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col];
        for i in rank + 1..rows {
            let lead = a[i][col];
            for j in col + 1..cols {
                let num = a[i][j]
                    .checked_mul(pivot)
                    .and_then(|x| lead.checked_mul(a[rank][j]).and_then(|y| x.checked_sub(y)));
                match num {
                    Some(n) if n % prev == 0 => a[i][j] = n / prev,
                    _ => return float_rank(m),
                }
            }
            a[i][col] = 0;
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

fn float_rank(m: &DMatrix<i64>) -> usize {
    let f = m.map(|x| x as f64);
    linalg::rank(&f, RankPolicy::new(1e-9))
}
