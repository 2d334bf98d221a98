//! Independent geometric oracles shared by the integration tests.
#![allow(dead_code)]

use dsgibbs::geometry::{Observations, SimplexPoint};
use nalgebra::{DMatrix, DVector};

pub const BOUNDARY: f64 = 1e-10;

/// Barycentric weights of `u` with respect to the vertices of the `k`-th
/// subsimplex: `theta` in slot `k`, the unit vectors elsewhere.
pub fn barycentric(theta: &[f64], k: usize, u: &[f64]) -> Vec<f64> {
    let dim = theta.len();
    let v = DMatrix::from_fn(dim, dim, |row, col| {
        if col == k {
            theta[row]
        } else if row == col {
            1.0
        } else {
            0.0
        }
    });
    let rhs = DVector::from_column_slice(u);
    v.lu()
        .solve(&rhs)
        .expect("theta_k > 0 makes the vertex matrix invertible")
        .as_slice()
        .to_vec()
}

/// Constraints `a x + b y + c >= 0` on `theta = (x, y, 1 - x - y)`.
pub fn half_planes(us: &[SimplexPoint], obs: &Observations) -> Vec<[f64; 3]> {
    let mut out = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, -1.0, 1.0]];
    // theta_i as an affine form in (x, y)
    let form = |i: usize| match i {
        0 => [1.0, 0.0, 0.0],
        1 => [0.0, 1.0, 0.0],
        _ => [-1.0, -1.0, 1.0],
    };
    for (u, &k) in us.iter().zip(obs.labels()) {
        for j in 0..3 {
            if j == k {
                continue;
            }
            // u_j theta_k - u_k theta_j >= 0
            let (fk, fj) = (form(k), form(j));
            out.push([
                u.coord(j) * fk[0] - u.coord(k) * fj[0],
                u.coord(j) * fk[1] - u.coord(k) * fj[1],
                u.coord(j) * fk[2] - u.coord(k) * fj[2],
            ]);
        }
    }
    out
}

/// Feasible vertices of a bounded planar polygon by pairwise line intersection.
pub fn polygon_vertices(planes: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let mut verts = Vec::new();
    for i in 0..planes.len() {
        for j in i + 1..planes.len() {
            let [a1, b1, c1] = planes[i];
            let [a2, b2, c2] = planes[j];
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-14 {
                continue;
            }
            let x = (-c1 * b2 + c2 * b1) / det;
            let y = (-a1 * c2 + a2 * c1) / det;
            if planes.iter().all(|p| p[0] * x + p[1] * y + p[2] >= -1e-11) {
                verts.push([x, y, 1.0 - x - y]);
            }
        }
    }
    verts
}
