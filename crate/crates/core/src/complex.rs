//! Oriented simplicial complexes and their refinements.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::MultiVector;
use crate::geometry::{
    self, arrangement_cells, interiors_overlap, orient_like, Cell, HalfSpace, Point, PointIndex,
    VertexPool,
};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Relative volume below which a simplex counts as degenerate.
pub const DEGENERACY_EPS: f64 = 1e-12;

/// Largest number of fine simplices an arrangement refinement may produce.
pub const OVERLAY_BUDGET: usize = 2_000_000;

/// Summary of the checks run while building a complex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub dim: usize,
    /// Number of simplices per degree.
    pub counts: Vec<usize>,
    pub euler_characteristic: i64,
    /// Smallest `vol / longest_edge^k` over simplices of positive degree.
    pub min_relative_volume: f64,
    /// Number of (k−2)-faces with nonzero coefficient in some ∂∂σ.
    pub boundary_boundary_defects: usize,
    /// Number of top-degree pairs handed to the exact overlap test.
    pub overlap_pairs_tested: usize,
}

/// An oriented simplicial complex in ℝⁿ, n ≤ 3.
///
/// Degree-0 simplices coincide with vertices. Lower-degree faces that were
/// not listed explicitly are appended after the listed ones, inheriting the
/// vertex order of the first simplex that produced them.
#[derive(Clone, Debug)]
pub struct Complex {
    id: u64,
    dim: usize,
    vertices: Vec<Point>,
    simplices: Vec<Vec<Vec<usize>>>,
    incidence: Vec<Vec<Vec<(usize, f64)>>>,
    cofaces: Vec<Vec<Vec<usize>>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
    volumes: Vec<Vec<f64>>,
    point_index: PointIndex,
    report: ValidationReport,
}

/// Sign of the permutation taking `from` to `to` (same vertex set).
pub fn permutation_sign(from: &[usize], to: &[usize]) -> f64 {
    let pos: Vec<usize> = from
        .iter()
        .map(|v| to.iter().position(|w| w == v).expect("same vertex set"))
        .collect();
    let mut inv = 0;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            if pos[i] > pos[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn sorted(t: &[usize]) -> Vec<usize> {
    let mut s = t.to_vec();
    s.sort_unstable();
    s
}

/// Builds and validates a complex from vertex coordinates and simplex lists
/// keyed by degree.
pub fn build_complex(
    dim: usize,
    vertices: &[Vec<f64>],
    simplices: &BTreeMap<usize, Vec<Vec<usize>>>,
) -> Result<Arc<Complex>> {
    if !(1..=3).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    for (i, v) in vertices.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "vertex {i} has {} coordinates, expected {dim}",
                v.len()
            )));
        }
    }
    let pts: Vec<Point> = vertices.iter().map(|v| geometry::point(v)).collect();
    let mut lists = vec![Vec::new(); dim + 1];
    for (&k, list) in simplices {
        if k > dim {
            return Err(Error::InvalidArgument(format!(
                "degree {k} exceeds ambient dimension {dim}"
            )));
        }
        for (s, t) in list.iter().enumerate() {
            if t.len() != k + 1 {
                return Err(Error::InvalidArgument(format!(
                    "{k}-simplex {s} lists {} vertices",
                    t.len()
                )));
            }
            if let Some(&bad) = t.iter().find(|&&v| v >= pts.len()) {
                return Err(Error::IndexOutOfRange {
                    degree: k,
                    simplex: s,
                    index: bad,
                    count: pts.len(),
                });
            }
        }
        lists[k] = list.clone();
    }
    Complex::assemble(dim, pts, lists, true).map(Arc::new)
}

impl Complex {
    fn assemble(
        dim: usize,
        vertices: Vec<Point>,
        given: Vec<Vec<Vec<usize>>>,
        check: bool,
    ) -> Result<Complex> {
        let nv = vertices.len();
        let mut simplices: Vec<Vec<Vec<usize>>> = vec![Vec::new(); dim + 1];
        let mut lookup: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::new(); dim + 1];
        for v in 0..nv {
            simplices[0].push(vec![v]);
            lookup[0].insert(vec![v], v);
        }
        for k in 1..=dim {
            for t in &given[k] {
                let key = sorted(t);
                if let Some(&first) = lookup[k].get(&key) {
                    if check && key.windows(2).all(|w| w[0] != w[1]) {
                        return Err(Error::DuplicateSimplex {
                            degree: k,
                            first,
                            second: simplices[k].len(),
                        });
                    }
                }
                lookup[k].insert(key, simplices[k].len());
                simplices[k].push(t.clone());
            }
        }

        let mut volumes: Vec<Vec<f64>> = vec![vec![1.0; nv]];
        let mut min_rel = f64::INFINITY;
        for k in 1..=dim {
            let mut vols = Vec::with_capacity(simplices[k].len());
            for (i, t) in simplices[k].iter().enumerate() {
                let p: Vec<Point> = t.iter().map(|&v| vertices[v]).collect();
                let vol = geometry::simplex_volume(&p);
                let l = geometry::longest_edge(&p);
                let rel = if l > 0.0 { vol / l.powi(k as i32) } else { 0.0 };
                if check && (rel < DEGENERACY_EPS || vol == 0.0) {
                    return Err(Error::DegenerateSimplex {
                        degree: k,
                        simplex: i,
                        volume: vol,
                    });
                }
                min_rel = min_rel.min(rel);
                vols.push(vol);
            }
            volumes.push(vols);
        }

        // Close under faces, top degree first.
        for k in (2..=dim).rev() {
            let mut i = 0;
            while i < simplices[k].len() {
                let t = simplices[k][i].clone();
                for omit in 0..=k {
                    let face: Vec<usize> = (0..=k).filter(|&j| j != omit).map(|j| t[j]).collect();
                    let key = sorted(&face);
                    if !lookup[k - 1].contains_key(&key) {
                        lookup[k - 1].insert(key, simplices[k - 1].len());
                        let p: Vec<Point> = face.iter().map(|&v| vertices[v]).collect();
                        volumes[k - 1].push(geometry::simplex_volume(&p));
                        simplices[k - 1].push(face);
                    }
                }
                i += 1;
            }
        }

        let mut incidence: Vec<Vec<Vec<(usize, f64)>>> = vec![vec![Vec::new(); nv]];
        let mut cofaces: Vec<Vec<Vec<usize>>> = (0..=dim)
            .map(|k| vec![Vec::new(); simplices[k].len()])
            .collect();
        for k in 1..=dim {
            let mut inc = Vec::with_capacity(simplices[k].len());
            for (i, t) in simplices[k].iter().enumerate() {
                let mut faces = Vec::with_capacity(k + 1);
                for omit in 0..=k {
                    let face: Vec<usize> = (0..=k).filter(|&j| j != omit).map(|j| t[j]).collect();
                    let f = lookup[k - 1][&sorted(&face)];
                    let parity = permutation_sign(&face, &simplices[k - 1][f]);
                    let sign = if omit % 2 == 0 { 1.0 } else { -1.0 } * parity;
                    faces.push((f, sign));
                    cofaces[k - 1][f].push(i);
                }
                inc.push(faces);
            }
            incidence.push(inc);
        }

        let mut point_index = PointIndex::default();
        for (i, p) in vertices.iter().enumerate() {
            point_index.insert(p, i);
        }

        let counts: Vec<usize> = simplices.iter().map(|s| s.len()).collect();
        let euler = counts
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum();
        let mut complex = Complex {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            dim,
            vertices,
            simplices,
            incidence,
            cofaces,
            lookup,
            volumes,
            point_index,
            report: ValidationReport {
                dim,
                counts,
                euler_characteristic: euler,
                min_relative_volume: if min_rel.is_finite() { min_rel } else { 0.0 },
                boundary_boundary_defects: 0,
                overlap_pairs_tested: 0,
            },
        };
        if check {
            complex.report.boundary_boundary_defects = complex.boundary_boundary_defects();
            complex.report.overlap_pairs_tested = complex.check_overlaps()?;
        }
        Ok(complex)
    }

    fn boundary_boundary_defects(&self) -> usize {
        let mut defects = 0;
        for k in 2..=self.dim {
            for i in 0..self.simplices[k].len() {
                let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
                for &(f, s) in &self.incidence[k][i] {
                    for &(g, t) in &self.incidence[k - 1][f] {
                        *acc.entry(g).or_insert(0.0) += s * t;
                    }
                }
                defects += acc.values().filter(|v| **v != 0.0).count();
            }
        }
        defects
    }

    /// Sweep-and-prune over top-degree simplices followed by an exact
    /// separating-axis test.
    fn check_overlaps(&self) -> Result<usize> {
        let n = self.dim;
        let top = &self.simplices[n];
        let boxes: Vec<(Point, Point)> = top
            .iter()
            .map(|t| {
                let mut lo = [f64::MAX; 3];
                let mut hi = [f64::MIN; 3];
                for &v in t {
                    for a in 0..3 {
                        lo[a] = lo[a].min(self.vertices[v][a]);
                        hi[a] = hi[a].max(self.vertices[v][a]);
                    }
                }
                (lo, hi)
            })
            .collect();
        let mut order: Vec<usize> = (0..top.len()).collect();
        order.sort_by(|&a, &b| boxes[a].0[0].partial_cmp(&boxes[b].0[0]).unwrap());
        let mut tested = 0;
        for (pos, &a) in order.iter().enumerate() {
            let (lo_a, hi_a) = boxes[a];
            let tol = 1e-9 * (hi_a[0] - lo_a[0]).abs().max(1e-300);
            for &b in &order[pos + 1..] {
                let (lo_b, hi_b) = boxes[b];
                if lo_b[0] >= hi_a[0] - tol {
                    break;
                }
                if (1..n).any(|ax| lo_b[ax] >= hi_a[ax] || lo_a[ax] >= hi_b[ax]) {
                    continue;
                }
                tested += 1;
                let pa = self.points(n, a);
                let pb = self.points(n, b);
                if interiors_overlap(&pa, &pb, n) {
                    let (first, second) = (a.min(b), a.max(b));
                    return Err(Error::NonManifoldOverlap {
                        degree: n,
                        first,
                        second,
                    });
                }
            }
        }
        Ok(tested)
    }

    /// Identifier shared by clones; distinct builds never share one.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    pub fn vertex_coords(&self, i: usize) -> &[f64] {
        &self.vertices[i][..self.dim]
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, |s| s.len())
    }

    pub fn simplex(&self, k: usize, i: usize) -> &[usize] {
        &self.simplices[k][i]
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        &self.simplices[k]
    }

    pub fn points(&self, k: usize, i: usize) -> Vec<Point> {
        self.simplices[k][i].iter().map(|&v| self.vertices[v]).collect()
    }

    /// Faces of a k-simplex with incidence signs.
    pub fn faces(&self, k: usize, i: usize) -> &[(usize, f64)] {
        &self.incidence[k][i]
    }

    /// (k+1)-simplices having the k-simplex `i` as a face.
    pub fn cofaces(&self, k: usize, i: usize) -> &[usize] {
        if k >= self.dim {
            return &[];
        }
        &self.cofaces[k][i]
    }

    /// Cached k-volume (no bounds check).
    pub fn volume(&self, k: usize, i: usize) -> f64 {
        self.volumes[k][i]
    }

    pub fn check_index(&self, k: usize, i: usize) -> Result<()> {
        if k > self.dim || i >= self.count(k) {
            return Err(Error::SimplexOutOfRange {
                degree: k,
                index: i,
            });
        }
        Ok(())
    }

    pub fn simplex_volume(&self, k: usize, i: usize) -> Result<f64> {
        self.check_index(k, i)?;
        Ok(self.volume(k, i))
    }

    /// Unit k-vector of the simplex, oriented by its vertex order.
    pub fn unit_tangent(&self, k: usize, i: usize) -> Result<MultiVector> {
        self.check_index(k, i)?;
        let p = self.points(k, i);
        let edges: Vec<Vec<f64>> = geometry::edge_vectors(&p)
            .iter()
            .map(|e| e[..self.dim].to_vec())
            .collect();
        let xi = MultiVector::from_vectors(self.dim, &edges);
        Ok(xi.scale(1.0 / xi.norm()))
    }

    /// Index and relative orientation of the simplex with these vertices.
    pub fn find_simplex(&self, tuple: &[usize]) -> Option<(usize, f64)> {
        let k = tuple.len().checked_sub(1)?;
        if k > self.dim {
            return None;
        }
        let i = *self.lookup[k].get(&sorted(tuple))?;
        Some((i, permutation_sign(tuple, &self.simplices[k][i])))
    }

    pub fn locate_vertex(&self, p: &Point) -> Option<usize> {
        self.point_index.find(p, &self.vertices)
    }

    /// The same simplex in `other`, matched by vertex coordinates.
    pub fn transfer(&self, k: usize, i: usize, other: &Complex) -> Option<(usize, f64)> {
        if self.id == other.id {
            return Some((i, 1.0));
        }
        let ids: Option<Vec<usize>> = self.simplices[k][i]
            .iter()
            .map(|&v| other.locate_vertex(&self.vertices[v]))
            .collect();
        other.find_simplex(&ids?)
    }

    /// A maximal simplex containing the given one.
    pub fn host(&self, k: usize, i: usize) -> (usize, usize) {
        let (mut d, mut j) = (k, i);
        while d < self.dim && !self.cofaces[d][j].is_empty() {
            j = self.cofaces[d][j][0];
            d += 1;
        }
        (d, j)
    }

    /// All maximal simplices as (degree, index).
    pub fn maximal_simplices(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..=self.dim {
            for i in 0..self.count(k) {
                if k == self.dim || self.cofaces[k][i].is_empty() {
                    out.push((k, i));
                }
            }
        }
        out
    }

    /// Oriented sub-simplices subdividing σ ∩ H.
    pub fn clip_simplex(&self, k: usize, i: usize, h: &HalfSpace) -> Result<Vec<Vec<Point>>> {
        self.check_index(k, i)?;
        Ok(geometry::clip_points(&self.points(k, i), h))
    }

    /// A complex from nondegenerate tuples whose interiors may overlap, as
    /// arises for images under maps that are not injective.
    pub(crate) fn unchecked(dim: usize, vertices: Vec<Point>, lists: Vec<Vec<Vec<usize>>>) -> Arc<Complex> {
        Arc::new(Complex::assemble(dim, vertices, lists, false).expect("unchecked assembly does not fail"))
    }

    /// Iterated barycentric subdivision.
    pub fn barycentric_subdivide(self: &Arc<Self>, levels: usize) -> Arc<Complex> {
        let mut c = self.clone();
        for _ in 0..levels {
            c = c.barycentric_refinement().fine;
        }
        c
    }

    /// One barycentric subdivision together with the coarse-to-fine map.
    pub fn barycentric_refinement(self: &Arc<Self>) -> Refinement {
        let mut points = self.vertices.clone();
        let mut bary: Vec<Vec<usize>> = vec![(0..self.num_vertices()).collect()];
        for k in 1..=self.dim {
            let mut ids = Vec::with_capacity(self.count(k));
            for i in 0..self.count(k) {
                ids.push(points.len());
                points.push(geometry::centroid(&self.points(k, i)));
            }
            bary.push(ids);
        }
        // flags[k][i]: chains of faces ending at (k, i), as barycenter ids.
        let mut flags: Vec<Vec<Vec<Vec<usize>>>> =
            vec![(0..self.num_vertices()).map(|v| vec![vec![v]]).collect()];
        for k in 1..=self.dim {
            let mut per = Vec::with_capacity(self.count(k));
            for i in 0..self.count(k) {
                let mut out = Vec::new();
                for &(f, _) in self.faces(k, i) {
                    for fl in &flags[k - 1][f] {
                        let mut t = fl.clone();
                        t.push(bary[k][i]);
                        out.push(t);
                    }
                }
                per.push(out);
            }
            flags.push(per);
        }
        let pool = VertexPool::new(&points);
        let mut pieces = vec![Vec::new(); self.dim + 1];
        for k in 0..=self.dim {
            for i in 0..self.count(k) {
                let parent = self.points(k, i);
                let list: Vec<Vec<usize>> = flags[k][i]
                    .iter()
                    .map(|t| {
                        let mut t = t.clone();
                        orient_like(&parent, &mut t, &pool);
                        t
                    })
                    .collect();
                pieces[k].push(list);
            }
        }
        Refinement::from_pieces(self.clone(), points, pieces)
    }

    /// Refinement in which no simplex crosses any of the given hyperplanes.
    pub fn split_by_hyperplanes(self: &Arc<Self>, planes: &[HalfSpace]) -> Result<Refinement> {
        let mut pool = VertexPool::new(&self.vertices);
        let mut pieces = vec![Vec::new(); self.dim + 1];
        pieces[0] = (0..self.num_vertices()).map(|v| vec![vec![v]]).collect();
        let mut total = 0usize;
        for k in 1..=self.dim {
            for i in 0..self.count(k) {
                let t = &self.simplices[k][i];
                let p = self.points(k, i);
                let scale = p.iter().map(geometry::norm).fold(1.0, f64::max);
                let tol = 10.0 * geometry::SNAP * scale;
                let crossing: Vec<(usize, HalfSpace)> = planes
                    .iter()
                    .enumerate()
                    .filter(|(_, h)| {
                        let d: Vec<f64> = p.iter().map(|q| h.signed_distance(q)).collect();
                        d.iter().any(|&x| x > tol) && d.iter().any(|&x| x < -tol)
                    })
                    .map(|(j, h)| (j, h.clone()))
                    .collect();
                if crossing.is_empty() {
                    pieces[k].push(vec![t.clone()]);
                    total += 1;
                    continue;
                }
                let cell = Cell {
                    ids: sorted(t),
                    dim: k,
                };
                let mut list = Vec::new();
                for c in arrangement_cells(&cell, &mut pool, &crossing) {
                    for mut s in c.triangulate(&pool) {
                        orient_like(&p, &mut s, &pool);
                        list.push(s);
                    }
                }
                total += list.len();
                if total > OVERLAY_BUDGET {
                    return Err(Error::OverlayFailure(format!(
                        "more than {OVERLAY_BUDGET} simplices while splitting {k}-simplex {i}"
                    )));
                }
                pieces[k].push(list);
            }
        }
        Ok(Refinement::from_pieces(self.clone(), pool.points, pieces))
    }
}

/// A subdivision of `coarse` by `fine`, with the induced chain map.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub coarse: Arc<Complex>,
    pub fine: Arc<Complex>,
    /// `pieces[k][i]`: fine k-simplices subdividing coarse k-simplex `i`,
    /// with their orientation relative to it.
    pub pieces: Vec<Vec<Vec<(usize, f64)>>>,
    /// `parent[k][j]`: the smallest coarse simplex containing fine simplex `j`.
    pub parent: Vec<Vec<(usize, usize)>>,
}

impl Refinement {
    /// The trivial refinement of a complex by itself.
    pub fn identity(complex: &Arc<Complex>) -> Refinement {
        let dim = complex.dim;
        Refinement {
            coarse: complex.clone(),
            fine: complex.clone(),
            pieces: (0..=dim)
                .map(|k| (0..complex.count(k)).map(|i| vec![(i, 1.0)]).collect())
                .collect(),
            parent: (0..=dim)
                .map(|k| (0..complex.count(k)).map(|i| (k, i)).collect())
                .collect(),
        }
    }

    fn from_pieces(
        coarse: Arc<Complex>,
        points: Vec<Point>,
        pieces: Vec<Vec<Vec<Vec<usize>>>>,
    ) -> Refinement {
        let dim = coarse.dim;
        let mut remap = vec![usize::MAX; points.len()];
        let mut used = Vec::new();
        for list in &pieces {
            for per in list {
                for t in per {
                    for &v in t {
                        if remap[v] == usize::MAX {
                            remap[v] = 0;
                            used.push(v);
                        }
                    }
                }
            }
        }
        used.sort_unstable();
        for (new, &old) in used.iter().enumerate() {
            remap[old] = new;
        }
        let fine_points: Vec<Point> = used.iter().map(|&v| points[v]).collect();
        let mapped: Vec<Vec<Vec<Vec<usize>>>> = pieces
            .iter()
            .map(|list| {
                list.iter()
                    .map(|per| {
                        per.iter()
                            .map(|t| t.iter().map(|&v| remap[v]).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut given = vec![Vec::new(); dim + 1];
        for k in 1..=dim {
            for per in &mapped[k] {
                given[k].extend(per.iter().cloned());
            }
        }
        let fine = Arc::new(
            Complex::assemble(dim, fine_points, given, false)
                .expect("unchecked assembly does not fail"),
        );
        let mut parent: Vec<Vec<(usize, usize)>> =
            (0..=dim).map(|k| vec![(usize::MAX, 0); fine.count(k)]).collect();
        let mut out_pieces = vec![Vec::new(); dim + 1];
        for k in 0..=dim {
            for (i, per) in mapped[k].iter().enumerate() {
                let mut list = Vec::with_capacity(per.len());
                for t in per {
                    let (j, s) = fine.find_simplex(t).expect("piece present in fine complex");
                    parent[k][j] = (k, i);
                    list.push((j, s));
                }
                out_pieces[k].push(list);
            }
        }
        for k in (0..dim).rev() {
            for j in 0..fine.count(k) {
                if parent[k][j].0 != usize::MAX {
                    continue;
                }
                parent[k][j] = fine
                    .cofaces(k, j)
                    .iter()
                    .map(|&c| parent[k + 1][c])
                    .min_by_key(|p| p.0)
                    .expect("interior face has a coface");
            }
        }
        Refinement {
            coarse,
            fine,
            pieces: out_pieces,
            parent,
        }
    }

    /// Coefficients of a coarse k-chain expressed on the fine complex.
    pub fn refine_coefficients(
        &self,
        k: usize,
        coeffs: impl IntoIterator<Item = (usize, f64)>,
    ) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (i, a) in coeffs {
            for &(j, s) in &self.pieces[k][i] {
                out.push((j, a * s));
            }
        }
        out
    }

    /// `self` followed by `next` (whose coarse complex is `self.fine`).
    pub fn then(&self, next: &Refinement) -> Refinement {
        let dim = self.coarse.dim;
        let pieces = (0..=dim)
            .map(|k| {
                self.pieces[k]
                    .iter()
                    .map(|per| {
                        per.iter()
                            .flat_map(|&(j, s)| next.pieces[k][j].iter().map(move |&(l, t)| (l, s * t)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let parent = (0..=dim)
            .map(|k| {
                next.parent[k]
                    .iter()
                    .map(|&(d, j)| self.parent[d][j])
                    .collect()
            })
            .collect();
        Refinement {
            coarse: self.coarse.clone(),
            fine: next.fine.clone(),
            pieces,
            parent,
        }
    }
}
