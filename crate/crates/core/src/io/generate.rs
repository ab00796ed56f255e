//! Built-in surfaces.
//!
//! Flat and highly symmetric layouts have rank-deficient first-order models,
//! so by default every vertex is perturbed by a seeded uniform jitter of
//! `1e-3` times the mean edge length. The Miura pattern is generated partly
//! folded and is left exact.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cell_complex::OrigamiSurface;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative size of the generic-position perturbation.
pub const JITTER: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// `n` hinges joining `n + 1` quads in a strip.
    Chain { n: usize },
    /// `degree` triangles around one interior vertex; rim alternately
    /// raised and lowered by `fold_angle` degrees.
    SingleVertex { degree: usize, fold_angle: f64 },
    Grid { rows: usize, cols: usize },
    /// Polar grid: `rows` rings of `cols` quads around a hole of radius `hole`.
    Annulus { rows: usize, cols: usize, hole: f64 },
    Cylinder { rows: usize, cols: usize },
    Torus { rows: usize, cols: usize },
    /// Miura-ori with 60 degree sector angle, folded by `angle` degrees.
    Miura { rows: usize, cols: usize, angle: f64 },
}

impl Shape {
    pub const NAMES: [&'static str; 7] = ["chain", "single_vertex", "grid", "annulus", "cylinder", "torus", "miura"];

    /// Shape from a name and positional parameters; omitted parameters take
    /// defaults.
    pub fn from_params(name: &str, params: &[f64]) -> Result<Self> {
        let count = |i: usize, default: usize| -> Result<usize> {
            match params.get(i) {
                None => Ok(default),
                Some(&x) if x >= 0.0 && x.fract() == 0.0 && x < 1e6 => Ok(x as usize),
                Some(&x) => Err(Error::InvalidParams(format!("{name}: parameter {} must be a count, got {x}", i + 1))),
            }
        };
        let real = |i: usize, default: f64| params.get(i).copied().unwrap_or(default);
        let max = match name {
            "chain" => 1,
            "single_vertex" | "grid" | "cylinder" | "torus" => 2,
            "annulus" | "miura" => 3,
            _ => return Err(Error::InvalidParams(format!("unknown shape `{name}` (expected one of {})", Self::NAMES.join(", ")))),
        };
        if params.len() > max {
            return Err(Error::InvalidParams(format!("{name} takes at most {max} parameters")));
        }
        let shape = match name {
            "chain" => Shape::Chain { n: count(0, 5)? },
            "single_vertex" => Shape::SingleVertex { degree: count(0, 4)?, fold_angle: real(1, 20.0) },
            "grid" => Shape::Grid { rows: count(0, 3)?, cols: count(1, 3)? },
            "annulus" => Shape::Annulus { rows: count(0, 4)?, cols: count(1, 4)?, hole: real(2, 1.0) },
            "cylinder" => Shape::Cylinder { rows: count(0, 3)?, cols: count(1, 6)? },
            "torus" => Shape::Torus { rows: count(0, 6)?, cols: count(1, 6)? },
            _ => Shape::Miura { rows: count(0, 3)?, cols: count(1, 3)?, angle: real(2, 30.0) },
        };
        shape.validate()?;
        Ok(shape)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Shape::Chain { .. } => "chain",
            Shape::SingleVertex { .. } => "single_vertex",
            Shape::Grid { .. } => "grid",
            Shape::Annulus { .. } => "annulus",
            Shape::Cylinder { .. } => "cylinder",
            Shape::Torus { .. } => "torus",
            Shape::Miura { .. } => "miura",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        match *self {
            Shape::Chain { n: 0 } => bad("chain needs n >= 1".into()),
            Shape::SingleVertex { degree, .. } if degree < 3 => bad("single_vertex needs degree >= 3".into()),
            Shape::SingleVertex { fold_angle, .. } if !fold_angle.is_finite() || fold_angle.abs() >= 90.0 => {
                bad(format!("fold_angle must lie in (-90, 90) degrees, got {fold_angle}"))
            }
            Shape::Grid { rows, cols } if rows == 0 || cols == 0 => bad("grid needs rows, cols >= 1".into()),
            Shape::Annulus { rows, cols, hole } if rows == 0 || cols < 3 || !(hole > 0.0) || !hole.is_finite() => {
                bad("annulus needs rows >= 1, cols >= 3 and hole > 0".into())
            }
            Shape::Cylinder { rows, cols } if rows == 0 || cols < 3 => bad("cylinder needs rows >= 1, cols >= 3".into()),
            Shape::Torus { rows, cols } if rows < 3 || cols < 3 => bad("torus needs rows, cols >= 3".into()),
            Shape::Miura { rows, cols, .. } if rows == 0 || cols == 0 => bad("miura needs rows, cols >= 1".into()),
            Shape::Miura { angle, .. } if !(angle > 0.0 && angle < 90.0) => {
                bad(format!("miura fold angle must lie in (0, 90) degrees, got {angle}"))
            }
            _ => Ok(()),
        }
    }

    fn layout(&self) -> (Vec<[f64; 3]>, Vec<Vec<usize>>) {
        match *self {
            Shape::Chain { n } => chain(n),
            Shape::SingleVertex { degree, fold_angle } => single_vertex(degree, fold_angle.to_radians()),
            Shape::Grid { rows, cols } => grid(rows, cols, |i, j| [j as f64, i as f64, 0.0]),
            Shape::Annulus { rows, cols, hole } => wrapped(rows + 1, cols, false, |i, j| {
                let (r, t) = (hole + i as f64, 2.0 * PI * j as f64 / cols as f64);
                [r * t.cos(), r * t.sin(), 0.0]
            }),
            Shape::Cylinder { rows, cols } => wrapped(rows + 1, cols, false, |i, j| {
                let t = 2.0 * PI * j as f64 / cols as f64;
                [t.cos(), t.sin(), i as f64]
            }),
            Shape::Torus { rows, cols } => wrapped(rows, cols, true, |i, j| {
                let (s, t) = (2.0 * PI * i as f64 / rows as f64, 2.0 * PI * j as f64 / cols as f64);
                let r = 3.0 + s.cos();
                [r * t.cos(), r * t.sin(), s.sin()]
            }),
            Shape::Miura { rows, cols, angle } => miura(rows, cols, angle.to_radians()),
        }
    }

    fn jittered_by_default(&self) -> bool {
        !matches!(self, Shape::Miura { .. })
    }
}

fn chain(n: usize) -> (Vec<[f64; 3]>, Vec<Vec<usize>>) {
    // a_i = 2i on y = 0, b_i = 2i + 1 on y = 1; face f_i = [a_i, b_i, b_{i+1}, a_{i+1}]
    // walks its hinge a_i -> b_i in the edge's own direction.
    let mut pts = Vec::new();
    for i in 0..n + 2 {
        pts.push([i as f64, 0.0, 0.0]);
        pts.push([i as f64, 1.0, 0.0]);
    }
    let faces = (0..=n).map(|i| vec![2 * i, 2 * i + 1, 2 * i + 3, 2 * i + 2]).collect();
    (pts, faces)
}

fn single_vertex(degree: usize, fold: f64) -> (Vec<[f64; 3]>, Vec<Vec<usize>>) {
    let mut pts = vec![[0.0, 0.0, 0.0]];
    for i in 0..degree {
        let t = 2.0 * PI * i as f64 / degree as f64;
        let z = if i % 2 == 0 { fold.sin() } else { -fold.sin() };
        pts.push([fold.cos() * t.cos(), fold.cos() * t.sin(), z]);
    }
    let faces = (0..degree).map(|i| vec![0, 1 + i, 1 + (i + 1) % degree]).collect();
    (pts, faces)
}

fn grid(rows: usize, cols: usize, at: impl Fn(usize, usize) -> [f64; 3]) -> (Vec<[f64; 3]>, Vec<Vec<usize>>) {
    let id = |i: usize, j: usize| i * (cols + 1) + j;
    let pts = (0..=rows).flat_map(|i| (0..=cols).map(move |j| (i, j))).map(|(i, j)| at(i, j)).collect();
    let mut faces = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            faces.push(vec![id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)]);
        }
    }
    (pts, faces)
}

/// `rings x cols` vertices, periodic in `j`, and in `i` when `closed`.
fn wrapped(
    rings: usize,
    cols: usize,
    closed: bool,
    at: impl Fn(usize, usize) -> [f64; 3],
) -> (Vec<[f64; 3]>, Vec<Vec<usize>>) {
    let id = |i: usize, j: usize| (i % rings) * cols + j % cols;
    let pts = (0..rings).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| at(i, j)).collect();
    let strips = if closed { rings } else { rings - 1 };
    let mut faces = Vec::new();
    for i in 0..strips {
        for j in 0..cols {
            faces.push(vec![id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)]);
        }
    }
    (pts, faces)
}

fn miura(rows: usize, cols: usize, t: f64) -> (Vec<[f64; 3]>, Vec<Vec<usize>>) {
    // Unit parallelograms with sector angle gamma; the zig-zag runs along x,
    // the straight creases along y with alternating height.
    let gamma = PI / 3.0;
    let (a, b) = (1.0, 1.0);
    let k = (1.0 + (t.cos() * gamma.tan()).powi(2)).sqrt();
    let h = a * t.sin() * gamma.sin();
    let s = b * t.cos() * gamma.tan() / k;
    let l = a * (1.0 - (t.sin() * gamma.sin()).powi(2)).sqrt();
    let v = b / k;
    grid(rows, cols, |i, j| {
        let zig = if j % 2 == 1 { v } else { 0.0 };
        let up = if i % 2 == 1 { h } else { 0.0 };
        [j as f64 * s, i as f64 * l + zig, up]
    })
}

/// Builds a shape; `jitter` perturbs vertices by a seeded `1e-3` relative
/// amount (ignored for the Miura pattern).
pub fn generate<T: Scalar>(shape: Shape, seed: u64, jitter: bool) -> Result<OrigamiSurface<T>> {
    shape.validate()?;
    let (mut pts, faces) = shape.layout();
    if jitter && shape.jittered_by_default() {
        let mut lengths = 0.0;
        let mut count = 0usize;
        for f in &faces {
            for k in 0..f.len() {
                let (p, q) = (pts[f[k]], pts[f[(k + 1) % f.len()]]);
                lengths += ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
                count += 1;
            }
        }
        let amp = JITTER * lengths / count as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in &mut pts {
            for x in p.iter_mut() {
                *x += amp * rng.random_range(-1.0..1.0);
            }
        }
    }
    let positions = pts.iter().map(|p| Vector3::new(T::lit(p[0]), T::lit(p[1]), T::lit(p[2]))).collect();
    OrigamiSurface::build_with(positions, faces, None, T::default_tolerance())
}

/// A serial chain with random (seeded) vertex positions, for stress tests.
pub fn random_chain<T: Scalar>(n: usize, seed: u64) -> Result<OrigamiSurface<T>> {
    if n == 0 {
        return Err(Error::InvalidParams("chain needs n >= 1".into()));
    }
    let (mut pts, faces) = chain(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in &mut pts {
        for x in p.iter_mut() {
            *x += 0.3 * rng.random_range(-1.0..1.0);
        }
    }
    let positions = pts.iter().map(|p| Vector3::new(T::lit(p[0]), T::lit(p[1]), T::lit(p[2]))).collect();
    OrigamiSurface::build_with(positions, faces, None, T::default_tolerance())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(name: &str, params: &[f64]) -> OrigamiSurface {
        generate(Shape::from_params(name, params).unwrap(), 7, true).unwrap()
    }

    #[test]
    fn chain_is_a_strip() {
        let s = build("chain", &[5.0]);
        assert_eq!(s.n_faces(), 6);
        assert_eq!(s.interior_edges().len(), 5);
        assert!(s.interior_vertices().is_empty());
    }

    #[test]
    fn base_homology_of_closed_and_holed_shapes() {
        assert_eq!(build("annulus", &[4.0, 4.0, 1.0]).base_homology().b1, 1);
        let t = build("torus", &[6.0, 6.0]).base_homology();
        assert_eq!((t.b1, t.b2), (2, 1));
        assert_eq!(build("cylinder", &[]).base_homology().b1, 1);
        assert_eq!(build("grid", &[3.0, 3.0]).base_homology().b1, 0);
    }

    #[test]
    fn miura_faces_are_planar_parallelograms() {
        let s: OrigamiSurface = generate(Shape::from_params("miura", &[2.0, 2.0, 40.0]).unwrap(), 0, true).unwrap();
        for f in s.faces() {
            let p: Vec<_> = f.iter().map(|&v| s.vertex_positions()[v]).collect();
            assert!(((p[1] - p[0]) - (p[2] - p[3])).norm() < 1e-12);
            assert!(((p[1] - p[0]).norm() - 1.0).abs() < 1e-12);
            assert!(((p[3] - p[0]).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = build("grid", &[2.0, 2.0]);
        let b = build("grid", &[2.0, 2.0]);
        assert_eq!(a.vertex_positions(), b.vertex_positions());
    }

    #[test]
    fn bad_params_rejected() {
        assert!(matches!(Shape::from_params("chain", &[0.0]), Err(Error::InvalidParams(_))));
        assert!(matches!(Shape::from_params("torus", &[2.0, 5.0]), Err(Error::InvalidParams(_))));
        assert!(matches!(Shape::from_params("blob", &[]), Err(Error::InvalidParams(_))));
        assert!(matches!(Shape::from_params("grid", &[1.5]), Err(Error::InvalidParams(_))));
        assert!(matches!(random_chain::<f64>(0, 1), Err(Error::InvalidParams(_))));
    }
}
