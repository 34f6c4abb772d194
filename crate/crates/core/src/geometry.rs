//! Low-level geometry in ℝⁿ, n ≤ 3: simplex volumes and orientation,
//! convex cells given by vertex sets, half-space clipping and the pulling
//! triangulation that keeps refinements conforming across shared faces.

use std::collections::HashMap;

use crate::exterior::minor;

/// Points are padded to three coordinates; only the first `dim` are used.
pub type Point = [f64; 3];

/// Relative tolerance for geometric predicates (hull facets, rank tests).
pub const GEOM_EPS: f64 = 1e-10;

/// Absolute snap applied when deduplicating clip vertices.
pub const SNAP: f64 = 1e-12;

pub fn point(coords: &[f64]) -> Point {
    let mut p = [0.0; 3];
    p[..coords.len()].copy_from_slice(coords);
    p
}

pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

pub fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn lerp(a: &Point, b: &Point, t: f64) -> Point {
    [
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
    ]
}

pub fn centroid(points: &[Point]) -> Point {
    let mut c = [0.0; 3];
    for p in points {
        for i in 0..3 {
            c[i] += p[i];
        }
    }
    let m = points.len() as f64;
    [c[0] / m, c[1] / m, c[2] / m]
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Edge vectors `p_i − p_0` as rows.
pub fn edge_vectors(points: &[Point]) -> Vec<Point> {
    points[1..].iter().map(|p| sub(p, &points[0])).collect()
}

fn gram(rows_a: &[Point], rows_b: &[Point]) -> Vec<Vec<f64>> {
    rows_a
        .iter()
        .map(|a| rows_b.iter().map(|b| dot(a, b)).collect())
        .collect()
}

fn det(m: &[Vec<f64>]) -> f64 {
    let idx: Vec<usize> = (0..m.len()).collect();
    minor(m, &idx, &idx)
}

/// k-dimensional volume of the simplex spanned by `k + 1` points.
pub fn simplex_volume(points: &[Point]) -> f64 {
    let k = points.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let e = edge_vectors(points);
    det(&gram(&e, &e)).max(0.0).sqrt() / factorial(k)
}

pub fn longest_edge(points: &[Point]) -> f64 {
    let mut l: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            l = l.max(norm(&sub(&points[i], &points[j])));
        }
    }
    l
}

/// Sign (±1, or 0 when degenerate) of the orientation of `child` relative to
/// `parent`; both are k-simplices spanning the same k-plane.
pub fn relative_orientation(parent: &[Point], child: &[Point]) -> f64 {
    if parent.len() == 1 {
        return 1.0;
    }
    let d = det(&gram(&edge_vectors(parent), &edge_vectors(child)));
    if d > 0.0 {
        1.0
    } else if d < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Orthonormal basis of the affine hull of `points`, with the first point as origin.
pub fn affine_basis(points: &[Point]) -> Vec<Point> {
    let scale = points
        .iter()
        .map(|p| norm(&sub(p, &points[0])))
        .fold(0.0, f64::max);
    let mut basis: Vec<Point> = Vec::new();
    if scale == 0.0 {
        return basis;
    }
    // Greedy: repeatedly take the point with the largest residual.
    loop {
        let mut best = None;
        let mut best_norm = GEOM_EPS * 1e2 * scale;
        for p in points {
            let mut r = sub(p, &points[0]);
            for b in &basis {
                let c = dot(&r, b);
                for i in 0..3 {
                    r[i] -= c * b[i];
                }
            }
            let nr = norm(&r);
            if nr > best_norm {
                best_norm = nr;
                best = Some(r);
            }
        }
        match best {
            Some(r) => basis.push([r[0] / best_norm, r[1] / best_norm, r[2] / best_norm]),
            None => return basis,
        }
        if basis.len() == 3 {
            return basis;
        }
    }
}

fn local_coords(points: &[Point], origin: &Point, basis: &[Point]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            let d = sub(p, origin);
            basis.iter().map(|b| dot(&d, b)).collect()
        })
        .collect()
}

/// Indices of the extreme points of a planar point set in ccw order.
fn hull_2d(pts: &[Vec<f64>], idx: &[usize], tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = idx.to_vec();
    order.sort_by(|&a, &b| {
        pts[a][0]
            .partial_cmp(&pts[b][0])
            .unwrap()
            .then(pts[a][1].partial_cmp(&pts[b][1]).unwrap())
    });
    order.dedup_by(|a, b| {
        (pts[*a][0] - pts[*b][0]).abs() <= tol && (pts[*a][1] - pts[*b][1]).abs() <= tol
    });
    if order.len() < 3 {
        return order;
    }
    let turn = |o: usize, a: usize, b: usize| {
        (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1])
            - (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0])
    };
    let area_tol = tol;
    let mut lower: Vec<usize> = Vec::new();
    for &p in &order {
        while lower.len() >= 2 {
            let l = lower.len();
            let a = lower[l - 2];
            let b = lower[l - 1];
            let len = ((pts[p][0] - pts[a][0]).powi(2) + (pts[p][1] - pts[a][1]).powi(2)).sqrt();
            if turn(a, b, p) <= area_tol * len.max(1e-300) {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(p);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &p in order.iter().rev() {
        while upper.len() >= 2 {
            let l = upper.len();
            let a = upper[l - 2];
            let b = upper[l - 1];
            let len = ((pts[p][0] - pts[a][0]).powi(2) + (pts[p][1] - pts[a][1]).powi(2)).sqrt();
            if turn(a, b, p) <= area_tol * len.max(1e-300) {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Face structure of the convex hull of a small point set.
#[derive(Clone, Debug)]
pub struct HullInfo {
    /// Affine dimension of the hull.
    pub dim: usize,
    /// Indices (into the input) of the extreme points.
    pub vertices: Vec<usize>,
    /// Facets as index sets (extreme points only).
    pub facets: Vec<Vec<usize>>,
    /// Edges of the hull as index pairs.
    pub edges: Vec<(usize, usize)>,
}

/// Convex hull of up to a few dozen points of affine dimension ≤ 3.
pub fn hull(points: &[Point]) -> HullInfo {
    let basis = affine_basis(points);
    let k = basis.len();
    let scale = points
        .iter()
        .map(|p| norm(&sub(p, &points[0])))
        .fold(0.0, f64::max)
        .max(1e-300);
    let tol = GEOM_EPS * scale;
    let loc = local_coords(points, &points[0], &basis);
    let all: Vec<usize> = (0..points.len()).collect();
    match k {
        0 => HullInfo {
            dim: 0,
            vertices: vec![0],
            facets: vec![],
            edges: vec![],
        },
        1 => {
            let lo = *all
                .iter()
                .min_by(|&&a, &&b| loc[a][0].partial_cmp(&loc[b][0]).unwrap())
                .unwrap();
            let hi = *all
                .iter()
                .max_by(|&&a, &&b| loc[a][0].partial_cmp(&loc[b][0]).unwrap())
                .unwrap();
            HullInfo {
                dim: 1,
                vertices: vec![lo, hi],
                facets: vec![vec![lo], vec![hi]],
                edges: vec![(lo, hi)],
            }
        }
        2 => {
            let ring = hull_2d(&loc, &all, tol);
            let m = ring.len();
            let edges: Vec<(usize, usize)> = (0..m).map(|i| (ring[i], ring[(i + 1) % m])).collect();
            HullInfo {
                dim: 2,
                vertices: ring.clone(),
                facets: edges.iter().map(|&(a, b)| vec![a, b]).collect(),
                edges,
            }
        }
        _ => hull_3d(&loc, tol),
    }
}

fn hull_3d(loc: &[Vec<f64>], tol: f64) -> HullInfo {
    let n = loc.len();
    let p = |i: usize| [loc[i][0], loc[i][1], loc[i][2]];
    let mut facet_sets: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let nrm = cross(&sub(&p(j), &p(i)), &sub(&p(l), &p(i)));
                let nn = norm(&nrm);
                if nn <= tol * tol.max(1e-300).sqrt().max(1e-150) && nn < 1e-300 {
                    continue;
                }
                if nn == 0.0 {
                    continue;
                }
                let unit = [nrm[0] / nn, nrm[1] / nn, nrm[2] / nn];
                let d: Vec<f64> = (0..n).map(|q| dot(&sub(&p(q), &p(i)), &unit)).collect();
                let max = d.iter().cloned().fold(f64::MIN, f64::max);
                let min = d.iter().cloned().fold(f64::MAX, f64::min);
                if max > tol && min < -tol {
                    continue;
                }
                let mut on: Vec<usize> = (0..n).filter(|&q| d[q].abs() <= tol).collect();
                on.sort_unstable();
                if !facet_sets.contains(&on) {
                    facet_sets.push(on);
                }
            }
        }
    }
    // Drop sets that are not full 2-faces (e.g. collinear triples on an edge).
    let mut facets = Vec::new();
    let mut edges = Vec::new();
    let mut vertices = Vec::new();
    for set in facet_sets {
        let sub_pts: Vec<Point> = set.iter().map(|&q| p(q)).collect();
        let basis = affine_basis(&sub_pts);
        if basis.len() != 2 {
            continue;
        }
        let sub_loc = local_coords(&sub_pts, &sub_pts[0], &basis);
        let idx: Vec<usize> = (0..set.len()).collect();
        let ring: Vec<usize> = hull_2d(&sub_loc, &idx, tol)
            .into_iter()
            .map(|q| set[q])
            .collect();
        let mut sorted = ring.clone();
        sorted.sort_unstable();
        if facets.contains(&sorted) {
            continue;
        }
        for i in 0..ring.len() {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            let e = (a.min(b), a.max(b));
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
        for &q in &ring {
            if !vertices.contains(&q) {
                vertices.push(q);
            }
        }
        facets.push(sorted);
    }
    vertices.sort_unstable();
    HullInfo {
        dim: 3,
        vertices,
        facets,
        edges,
    }
}

/// A closed half-space `{x : λ(x) ≥ s}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    normal: Point,
    threshold: f64,
}

impl HalfSpace {
    /// Panics if `normal` vanishes.
    pub fn new(normal: &[f64], threshold: f64) -> Self {
        let n = point(normal);
        assert!(norm(&n) > 0.0, "half-space functional must be nonzero");
        Self {
            normal: n,
            threshold,
        }
    }

    pub fn normal(&self) -> &Point {
        &self.normal
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// The opposite closed half-space `{λ ≤ s}`.
    pub fn flipped(&self) -> Self {
        Self {
            normal: [-self.normal[0], -self.normal[1], -self.normal[2]],
            threshold: -self.threshold,
        }
    }

    /// Signed Euclidean distance to the bounding hyperplane (positive inside).
    pub fn signed_distance(&self, p: &Point) -> f64 {
        (dot(&self.normal, p) - self.threshold) / norm(&self.normal)
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        self.signed_distance(p) >= -tol
    }
}

/// Hash lookup of points up to the coordinate snap.
#[derive(Clone, Debug, Default)]
pub struct PointIndex {
    map: HashMap<[i64; 3], usize>,
}

fn snap_key(p: &Point) -> [i64; 3] {
    [
        (p[0] / SNAP).round() as i64,
        (p[1] / SNAP).round() as i64,
        (p[2] / SNAP).round() as i64,
    ]
}

impl PointIndex {
    pub fn insert(&mut self, p: &Point, id: usize) {
        self.map.entry(snap_key(p)).or_insert(id);
    }

    /// Id of a stored point within the snap distance of `p`.
    pub fn find(&self, p: &Point, points: &[Point]) -> Option<usize> {
        let k = snap_key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(&id) = self.map.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        let q = &points[id];
                        if (0..3).all(|i| (q[i] - p[i]).abs() <= 1.5 * SNAP) {
                            return Some(id);
                        }
                    }
                }
            }
        }
        None
    }
}

/// Shared vertex store for refinements; coordinates are snapped so that the
/// same point produced from two neighbouring cells receives one id.
#[derive(Clone, Debug)]
pub struct VertexPool {
    pub points: Vec<Point>,
    /// Each vertex as a convex combination of original vertices.
    pub weights: Vec<Vec<(usize, f64)>>,
    index: PointIndex,
    edge_cache: HashMap<(usize, usize, usize), usize>,
}

impl VertexPool {
    /// Pool seeded with existing vertices (ids preserved).
    pub fn new(initial: &[Point]) -> Self {
        let mut pool = Self {
            points: Vec::new(),
            weights: Vec::new(),
            index: PointIndex::default(),
            edge_cache: HashMap::new(),
        };
        for (i, p) in initial.iter().enumerate() {
            pool.points.push(*p);
            pool.weights.push(vec![(i, 1.0)]);
            pool.index.insert(p, i);
        }
        pool
    }

    pub fn find(&self, p: &Point) -> Option<usize> {
        self.index.find(p, &self.points)
    }

    pub fn insert(&mut self, p: Point, weights: Vec<(usize, f64)>) -> usize {
        if let Some(id) = self.find(&p) {
            return id;
        }
        let id = self.points.len();
        self.points.push(p);
        self.weights.push(weights);
        self.index.insert(&p, id);
        id
    }

    fn combine(&self, a: usize, b: usize, t: f64) -> Vec<(usize, f64)> {
        let mut w: Vec<(usize, f64)> = Vec::new();
        for &(v, c) in &self.weights[a] {
            w.push((v, c * (1.0 - t)));
        }
        for &(v, c) in &self.weights[b] {
            match w.iter_mut().find(|(u, _)| *u == v) {
                Some(e) => e.1 += c * t,
                None => w.push((v, c * t)),
            }
        }
        w.retain(|&(_, c)| c != 0.0);
        w
    }

    /// Point where hyperplane `plane_key` crosses the segment between ids
    /// `a` and `b`, with signed distances `sa`, `sb` of opposite signs.
    fn split_edge(&mut self, plane_key: usize, a: usize, sa: f64, b: usize, sb: f64) -> usize {
        let (a, sa, b, sb) = if a < b { (a, sa, b, sb) } else { (b, sb, a, sa) };
        if let Some(&id) = self.edge_cache.get(&(plane_key, a, b)) {
            return id;
        }
        let t = sa / (sa - sb);
        let p = lerp(&self.points[a], &self.points[b], t);
        let w = self.combine(a, b, t);
        let id = self.insert(p, w);
        self.edge_cache.insert((plane_key, a, b), id);
        id
    }
}

/// A convex cell stored by the ids of its extreme points (sorted).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub ids: Vec<usize>,
    pub dim: usize,
}

impl Cell {
    /// Builds the hull cell of `ids`, pruning non-extreme points.
    pub fn from_ids(pool: &VertexPool, ids: &[usize]) -> Cell {
        let mut ids = ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let pts: Vec<Point> = ids.iter().map(|&i| pool.points[i]).collect();
        let h = hull(&pts);
        let mut v: Vec<usize> = h.vertices.iter().map(|&q| ids[q]).collect();
        v.sort_unstable();
        Cell { ids: v, dim: h.dim }
    }

    fn hull_info(&self, pool: &VertexPool) -> HullInfo {
        let pts: Vec<Point> = self.ids.iter().map(|&i| pool.points[i]).collect();
        hull(&pts)
    }

    pub fn facets(&self, pool: &VertexPool) -> Vec<Cell> {
        let h = self.hull_info(pool);
        h.facets
            .iter()
            .map(|f| {
                let mut ids: Vec<usize> = f.iter().map(|&q| self.ids[q]).collect();
                ids.sort_unstable();
                Cell {
                    ids,
                    dim: self.dim - 1,
                }
            })
            .collect()
    }

    pub fn edges(&self, pool: &VertexPool) -> Vec<(usize, usize)> {
        self.hull_info(pool)
            .edges
            .iter()
            .map(|&(a, b)| (self.ids[a], self.ids[b]))
            .collect()
    }

    /// Clips to the closed half-space; returns `None` when the part kept has
    /// lower dimension than the cell.
    pub fn clip(&self, pool: &mut VertexPool, h: &HalfSpace, plane_key: usize) -> Option<Cell> {
        let scale = self
            .ids
            .iter()
            .map(|&i| norm(&pool.points[i]))
            .fold(1.0, f64::max);
        let tol = SNAP * 10.0 * scale;
        let s: Vec<f64> = self
            .ids
            .iter()
            .map(|&i| {
                let d = h.signed_distance(&pool.points[i]);
                if d.abs() <= tol {
                    0.0
                } else {
                    d
                }
            })
            .collect();
        if s.iter().all(|&d| d >= 0.0) {
            return Some(self.clone());
        }
        if s.iter().all(|&d| d <= 0.0) {
            return None;
        }
        let pos = |id: usize| self.ids.iter().position(|&q| q == id).unwrap();
        let mut kept: Vec<usize> = self
            .ids
            .iter()
            .zip(&s)
            .filter(|(_, &d)| d >= 0.0)
            .map(|(&i, _)| i)
            .collect();
        for (a, b) in self.edges(pool) {
            let (sa, sb) = (s[pos(a)], s[pos(b)]);
            if (sa > 0.0 && sb < 0.0) || (sa < 0.0 && sb > 0.0) {
                kept.push(pool.split_edge(plane_key, a, sa, b, sb));
            }
        }
        let c = Cell::from_ids(pool, &kept);
        if c.dim == self.dim {
            Some(c)
        } else {
            None
        }
    }

    /// Pulling triangulation from the smallest id; faces are triangulated the
    /// same way, so two cells sharing a face induce the same simplices on it.
    pub fn triangulate(&self, pool: &VertexPool) -> Vec<Vec<usize>> {
        if self.ids.len() == self.dim + 1 || self.dim == 0 {
            return vec![self.ids.clone()];
        }
        let apex = self.ids[0];
        let mut out = Vec::new();
        for f in self.facets(pool) {
            if f.ids.contains(&apex) {
                continue;
            }
            for t in f.triangulate(pool) {
                let mut s = vec![apex];
                s.extend(t);
                out.push(s);
            }
        }
        out
    }
}

/// Arrangement cells of `cell` cut by all `planes` (each with a stable key).
pub fn arrangement_cells(
    cell: &Cell,
    pool: &mut VertexPool,
    planes: &[(usize, HalfSpace)],
) -> Vec<Cell> {
    let mut cells = vec![cell.clone()];
    for (key, h) in planes {
        let mut next = Vec::with_capacity(cells.len() * 2);
        let flipped = h.flipped();
        for c in &cells {
            if let Some(a) = c.clip(pool, h, *key) {
                next.push(a);
            }
            if let Some(b) = c.clip(pool, &flipped, *key) {
                next.push(b);
            }
        }
        cells = next;
    }
    cells
}

/// Oriented simplices subdividing the part of the simplex `points` lying in
/// the closed half-space.
pub fn clip_points(points: &[Point], h: &HalfSpace) -> Vec<Vec<Point>> {
    let k = points.len() - 1;
    let mut pool = VertexPool::new(points);
    let cell = Cell {
        ids: (0..=k).collect(),
        dim: k,
    };
    let Some(piece) = cell.clip(&mut pool, h, 0) else {
        return Vec::new();
    };
    piece
        .triangulate(&pool)
        .into_iter()
        .map(|mut t| {
            orient_like(points, &mut t, &pool);
            t.iter().map(|&v| pool.points[v]).collect()
        })
        .collect()
}

/// Orders `ids` so the simplex is oriented like `parent`.
pub fn orient_like(parent: &[Point], ids: &mut [usize], pool: &VertexPool) {
    if ids.len() < 2 {
        return;
    }
    let pts: Vec<Point> = ids.iter().map(|&i| pool.points[i]).collect();
    if relative_orientation(parent, &pts) < 0.0 {
        ids.swap(0, 1);
    }
}

/// True when the interiors of two full-dimensional simplices in ℝⁿ meet
/// (separating-axis test; touching simplices do not overlap).
pub fn interiors_overlap(a: &[Point], b: &[Point], dim: usize) -> bool {
    let scale = longest_edge(a).max(longest_edge(b));
    let mut axes: Vec<Point> = Vec::new();
    let facet_normals = |s: &[Point]| -> Vec<Point> {
        let mut out = Vec::new();
        match dim {
            1 => out.push([1.0, 0.0, 0.0]),
            2 => {
                for i in 0..3 {
                    let e = sub(&s[(i + 1) % 3], &s[i]);
                    out.push([-e[1], e[0], 0.0]);
                }
            }
            _ => {
                for i in 0..4 {
                    let f: Vec<&Point> = (0..4).filter(|&j| j != i).map(|j| &s[j]).collect();
                    out.push(cross(&sub(f[1], f[0]), &sub(f[2], f[0])));
                }
            }
        }
        out
    };
    axes.extend(facet_normals(a));
    axes.extend(facet_normals(b));
    if dim == 3 {
        for i in 0..4 {
            for j in i + 1..4 {
                let ea = sub(&a[j], &a[i]);
                for p in 0..4 {
                    for q in p + 1..4 {
                        axes.push(cross(&ea, &sub(&b[q], &b[p])));
                    }
                }
            }
        }
    }
    for ax in axes {
        let len = norm(&ax);
        if len <= GEOM_EPS * scale * scale {
            continue;
        }
        let proj = |s: &[Point]| {
            s.iter().fold((f64::MAX, f64::MIN), |(lo, hi), p| {
                let v = dot(p, &ax);
                (lo.min(v), hi.max(v))
            })
        };
        let (alo, ahi) = proj(a);
        let (blo, bhi) = proj(b);
        let tol = 1e-9 * scale * len;
        if ahi <= blo + tol || bhi <= alo + tol {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(x: f64, y: f64) -> Point {
        [x, y, 0.0]
    }

    #[test]
    fn volumes_of_standard_simplices() {
        assert!((simplex_volume(&[p2(0.0, 0.0), p2(1.0, 0.0), p2(0.0, 1.0)]) - 0.5).abs() < 1e-15);
        assert!((simplex_volume(&[p2(0.0, 0.0), p2(3.0, 4.0)]) - 5.0).abs() < 1e-15);
        let tet = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        assert!((simplex_volume(&tet) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn hull_prunes_interior_and_collinear_points() {
        let pts = vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(0.5, 0.0), p2(1.0, 1.0), p2(0.5, 0.4)];
        let h = hull(&pts);
        assert_eq!(h.dim, 2);
        let mut v = h.vertices.clone();
        v.sort();
        assert_eq!(v, vec![0, 1, 3]);
    }

    #[test]
    fn hull_of_cube_corners() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push([(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        pts.push([0.5, 0.5, 0.5]);
        let h = hull(&pts);
        assert_eq!(h.dim, 3);
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        assert_eq!(h.edges.len(), 12);
    }

    #[test]
    fn clip_triangle_corner() {
        let mut pool = VertexPool::new(&[p2(0.0, 0.0), p2(1.0, 0.0), p2(0.0, 1.0)]);
        let cell = Cell::from_ids(&pool, &[0, 1, 2]);
        let h = HalfSpace::new(&[1.0, 0.0], 0.5);
        let piece = cell.clip(&mut pool, &h, 0).unwrap();
        let area: f64 = piece
            .triangulate(&pool)
            .iter()
            .map(|t| simplex_volume(&t.iter().map(|&i| pool.points[i]).collect::<Vec<_>>()))
            .sum();
        assert!((area - 0.125).abs() < 1e-15);
        let rest = cell.clip(&mut pool, &h.flipped(), 0).unwrap();
        let tris = rest.triangulate(&pool);
        assert_eq!(tris.len(), 2);
    }

    #[test]
    fn overlap_detects_shared_edge_as_touching() {
        let a = [p2(0.0, 0.0), p2(1.0, 0.0), p2(1.0, 1.0)];
        let b = [p2(0.0, 0.0), p2(1.0, 1.0), p2(0.0, 1.0)];
        assert!(!interiors_overlap(&a, &b, 2));
        let c = [p2(0.2, 0.1), p2(2.0, 0.1), p2(0.2, 2.0)];
        assert!(interiors_overlap(&a, &c, 2));
    }
}
