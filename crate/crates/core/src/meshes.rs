//! Structured meshes used by tests, campaigns and the CLI.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::complex::{build_complex, Complex};

/// The unit square split along the diagonal from (0,0) to (1,1).
pub fn unit_square() -> Arc<Complex> {
    let v = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
    let mut s = BTreeMap::new();
    s.insert(2, vec![vec![0, 1, 2], vec![0, 2, 3]]);
    build_complex(2, &v, &s).expect("valid mesh")
}

/// `n` equal segments of `[x0, x1]`.
pub fn interval(n: usize, x0: f64, x1: f64) -> Arc<Complex> {
    let v: Vec<Vec<f64>> = (0..=n)
        .map(|i| vec![x0 + (x1 - x0) * i as f64 / n as f64])
        .collect();
    let mut s = BTreeMap::new();
    s.insert(1, (0..n).map(|i| vec![i, i + 1]).collect());
    build_complex(1, &v, &s).expect("valid mesh")
}

/// Vertex coordinates and positively oriented triangles of an `nx × ny`
/// grid on `[x0, x0 + w] × [y0, y0 + h]`, two triangles per cell.
pub fn grid_data(nx: usize, ny: usize, origin: [f64; 2], size: [f64; 2]) -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
    let mut v = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            v.push(vec![
                origin[0] + size[0] * i as f64 / nx as f64,
                origin[1] + size[1] * j as f64 / ny as f64,
            ]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut t = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            t.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            t.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (v, t)
}

pub fn grid(nx: usize, ny: usize, origin: [f64; 2], size: [f64; 2]) -> Arc<Complex> {
    let (v, t) = grid_data(nx, ny, origin, size);
    let mut s = BTreeMap::new();
    s.insert(2, t);
    build_complex(2, &v, &s).expect("valid mesh")
}

/// Kuhn triangulation of an `n³` grid of cubes on `[0, size]³`, six
/// positively oriented tetrahedra per cube.
pub fn cube_grid(n: usize, size: f64) -> Arc<Complex> {
    let (v, tets) = cube_grid_data(n, size);
    let mut s = BTreeMap::new();
    s.insert(3, tets);
    build_complex(3, &v, &s).expect("valid mesh")
}

pub fn cube_grid_data(n: usize, size: f64) -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
    let mut v = Vec::new();
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                v.push(vec![
                    size * i as f64 / n as f64,
                    size * j as f64 / n as f64,
                    size * k as f64 / n as f64,
                ]);
            }
        }
    }
    let id = |c: [usize; 3]| (c[2] * (n + 1) + c[1]) * (n + 1) + c[0];
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::new();
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for (pi, p) in perms.iter().enumerate() {
                    let mut c = [i, j, k];
                    let mut t = vec![id(c)];
                    for &ax in p {
                        c[ax] += 1;
                        t.push(id(c));
                    }
                    // Odd permutations give negatively oriented paths.
                    if matches!(pi, 1 | 2 | 5) {
                        t.swap(0, 1);
                    }
                    tets.push(t);
                }
            }
        }
    }
    (v, tets)
}
