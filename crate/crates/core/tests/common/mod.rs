#![allow(dead_code)]

pub mod props;

use nalgebra::Vector3;
use origami_cosheaf::io::{generate, Shape};
use origami_cosheaf::{OrigamiSurface, Scalar};

pub fn v<T: Scalar>(x: f64, y: f64, z: f64) -> Vector3<T> {
    Vector3::new(T::lit(x), T::lit(y), T::lit(z))
}

/// Two unit-ish quads sharing one hinge, slightly out of plane.
pub fn two_quads<T: Scalar>() -> OrigamiSurface<T> {
    OrigamiSurface::build(
        vec![
            v(0.0, 0.0, 0.0),
            v(1.0, 0.0, 0.0),
            v(2.0, 0.05, 0.3),
            v(0.0, 1.0, 0.0),
            v(1.0, 1.0, 0.0),
            v(2.0, 1.02, 0.28),
        ],
        vec![vec![0, 1, 4, 3], vec![1, 2, 5, 4]],
    )
    .unwrap()
}

/// A five-panel Möbius band.
pub fn moebius() -> (Vec<Vector3<f64>>, Vec<Vec<usize>>) {
    let n = 5;
    let mut pts = Vec::new();
    for i in 0..n {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let (c, s) = (t.cos(), t.sin());
        let tw = (t / 2.0).cos();
        let tz = (t / 2.0).sin();
        // a_i = centre - half width, b_i = centre + half width (twisting)
        pts.push(Vector3::new(c * (3.0 - tw), s * (3.0 - tw), -tz));
        pts.push(Vector3::new(c * (3.0 + tw), s * (3.0 + tw), tz));
    }
    let mut faces = Vec::new();
    for i in 0..n - 1 {
        faces.push(vec![2 * i, 2 * i + 1, 2 * i + 3, 2 * i + 2]);
    }
    // closing panel flips a and b
    faces.push(vec![2 * (n - 1), 2 * (n - 1) + 1, 0, 1]);
    (pts, faces)
}

pub fn shape(name: &str, params: &[f64]) -> OrigamiSurface {
    generate(Shape::from_params(name, params).unwrap(), 11, true).unwrap()
}

pub fn flat(name: &str, params: &[f64]) -> OrigamiSurface {
    generate(Shape::from_params(name, params).unwrap(), 0, false).unwrap()
}

/// The generated test surfaces, all connected.
pub fn test_surfaces() -> Vec<(&'static str, OrigamiSurface)> {
    vec![
        ("two_quads", two_quads()),
        ("chain(5)", shape("chain", &[5.0])),
        ("single_vertex(4)", shape("single_vertex", &[4.0, 20.0])),
        ("single_vertex(5)", shape("single_vertex", &[5.0, 20.0])),
        ("single_vertex(6)", shape("single_vertex", &[6.0, 20.0])),
        ("grid(3,3)", shape("grid", &[3.0, 3.0])),
        ("annulus(4,4,1)", shape("annulus", &[4.0, 4.0, 1.0])),
        ("annulus(1,8,1)", shape("annulus", &[1.0, 8.0, 1.0])),
        ("cylinder(3,6)", shape("cylinder", &[3.0, 6.0])),
        ("torus(6,6)", shape("torus", &[6.0, 6.0])),
        ("miura(3,3,30)", shape("miura", &[3.0, 3.0, 30.0])),
    ]
}
