//! Polytopal bodies, their boundary surfaces, prefractal sequences and traces.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chain::Chain;
use crate::complex::{build_complex, Complex};
use crate::error::{Error, Result};
use crate::exterior::MultiVector;
use crate::flat::{cauchy_verdict, flat_distance, CauchyReport};
use crate::geometry::{self, HalfSpace, Point};
use crate::meshes;

/// Sign of the top-degree simplex `i` against the standard orientation.
pub fn orientation_sign(c: &Complex, i: usize) -> f64 {
    let n = c.dim();
    let p = c.points(n, i);
    let e = DMatrix::from_fn(n, n, |r, col| p[col + 1][r] - p[0][r]);
    if e.determinant() >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// The current of integration over a union of top-degree simplices. Each
/// coefficient is the orientation sign of its simplex, so the chain acts on
/// forms by plain integration over the region.
#[derive(Clone, Debug)]
pub struct Body {
    chain: Chain,
}

impl Body {
    /// Repeated indices are absorbed.
    pub fn from_simplices(complex: &Arc<Complex>, indices: &[usize]) -> Result<Body> {
        let n = complex.dim();
        let set: BTreeSet<usize> = indices.iter().copied().collect();
        for &i in &set {
            complex.check_index(n, i)?;
        }
        let coeffs: Vec<(usize, f64)> = set.into_iter().map(|i| (i, orientation_sign(complex, i))).collect();
        Ok(Body {
            chain: Chain::new(complex, n, coeffs)?,
        })
    }

    /// Accepts a top-degree chain whose coefficients are orientation signs.
    pub fn from_chain(chain: Chain) -> Result<Body> {
        let c = chain.complex().clone();
        if chain.degree() != c.dim() {
            return Err(Error::WrongDegree(chain.degree()));
        }
        for (i, a) in chain.iter() {
            if a != orientation_sign(&c, i) {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {a} on simplex {i} is not its orientation sign"
                )));
            }
        }
        Ok(Body { chain })
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn complex(&self) -> &Arc<Complex> {
        self.chain.complex()
    }

    pub fn simplices(&self) -> Vec<usize> {
        self.chain.support()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_zero()
    }

    /// Lebesgue measure of the region.
    pub fn mass(&self) -> f64 {
        self.chain.mass()
    }

    pub fn boundary(&self) -> Chain {
        self.chain.boundary().expect("top degree is positive")
    }

    pub fn contains_simplex(&self, i: usize) -> bool {
        self.chain.coefficient(i) != 0.0
    }
}

/// A part of a body's boundary, with the body's outward unit normal on each
/// facet of its support.
#[derive(Clone, Debug)]
pub struct Surface {
    chain: Chain,
    normals: BTreeMap<usize, Vec<f64>>,
}

impl Surface {
    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn normal(&self, facet: usize) -> Option<&[f64]> {
        self.normals.get(&facet).map(Vec::as_slice)
    }

    pub fn mass(&self) -> f64 {
        self.chain.mass()
    }

    /// The part of ∂T_P carried by the given facets.
    pub fn from_facets(body: &Body, facets: &[usize]) -> Result<Surface> {
        let full = geometric_boundary_surface(body);
        let c = body.complex();
        let n = c.dim();
        let keep: BTreeSet<usize> = facets.iter().copied().collect();
        for &f in &keep {
            c.check_index(n - 1, f)?;
        }
        let boundary = body.boundary();
        let chain = Chain::new(c, n - 1, boundary.iter().filter(|(f, _)| keep.contains(f)))?;
        let normals = full.normals.into_iter().filter(|(f, _)| keep.contains(f)).collect();
        Ok(Surface { chain, normals })
    }
}

/// Outward unit normal of top simplex `i` across its facet opposite vertex
/// position `omit`.
fn outward_normal(c: &Complex, i: usize, omit: usize) -> Vec<f64> {
    let n = c.dim();
    let p = c.points(n, i);
    let facet: Vec<Point> = (0..=n).filter(|&j| j != omit).map(|j| p[j]).collect();
    let base = &facet[0];
    let edges: Vec<Point> = facet[1..].iter().map(|q| geometry::sub(q, base)).collect();
    // Component of (opposite vertex − base) orthogonal to the facet.
    let mut v = geometry::sub(&p[omit], base);
    let mut basis: Vec<Point> = Vec::new();
    for e in edges {
        let mut u = e;
        for b in &basis {
            let d = geometry::dot(&u, b);
            for a in 0..3 {
                u[a] -= d * b[a];
            }
        }
        let l = geometry::norm(&u);
        basis.push([u[0] / l, u[1] / l, u[2] / l]);
    }
    for b in &basis {
        let d = geometry::dot(&v, b);
        for a in 0..3 {
            v[a] -= d * b[a];
        }
    }
    let l = geometry::norm(&v);
    (0..n).map(|a| -v[a] / l).collect()
}

/// The boundary surface built from outward normals: every facet of a body
/// simplex receives `⟨ν ⌟ (e₁∧…∧eₙ), τ⟩`, with τ the facet's unit tangent.
/// Facets shared by two body simplices cancel through their opposite normals.
pub fn geometric_boundary_surface(body: &Body) -> Surface {
    let c = body.complex();
    let n = c.dim();
    let vol = MultiVector::volume_element(n);
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    let mut normals = BTreeMap::new();
    for (i, a) in body.chain.iter() {
        let tuple = c.simplex(n, i);
        for omit in 0..=n {
            let face: Vec<usize> = (0..=n).filter(|&j| j != omit).map(|j| tuple[j]).collect();
            let (f, _) = c.find_simplex(&face).expect("facet present");
            let nu = outward_normal(c, i, omit);
            let tangent = MultiVector::vector(&nu).contract(&vol);
            let tau = c.unit_tangent(n - 1, f).expect("index in range");
            // Unit density on the region, whatever the simplex orientation.
            let sign = a * orientation_sign(c, i);
            *acc.entry(f).or_insert(0.0) += sign * tangent.dot(&tau);
            normals.entry(f).or_insert(nu);
        }
    }
    let coeffs: Vec<(usize, f64)> = acc.into_iter().filter(|&(_, v)| v.abs() > 1e-12).collect();
    let normals = normals.into_iter().filter(|(f, _)| coeffs.iter().any(|(g, _)| g == f)).collect();
    Surface {
        chain: Chain::new(c, n - 1, coeffs).expect("facet indices in range"),
        normals,
    }
}

/// Largest coefficient deviation between the normal-built surface and ∂T_P.
pub fn stokes_deviation(body: &Body) -> f64 {
    let geometric = geometric_boundary_surface(body);
    geometric.chain.max_deviation(&body.boundary()).expect("same complex")
}

/// A sequence of bodies on one complex with its flat-norm Cauchy certificate.
#[derive(Clone, Debug)]
pub struct GeneralizedBody {
    pub bodies: Vec<Body>,
    pub report: CauchyReport,
    pub masses: Vec<f64>,
    pub boundary_masses: Vec<f64>,
}

impl GeneralizedBody {
    pub fn new(bodies: Vec<Body>, epsilon: f64) -> Result<GeneralizedBody> {
        if bodies.len() < 2 {
            return Err(Error::InvalidArgument("a generalized body needs at least two approximants".into()));
        }
        let ambient = bodies[0].complex().clone();
        let distances = bodies
            .windows(2)
            .map(|w| flat_distance(w[1].chain(), w[0].chain(), &ambient))
            .collect::<Result<Vec<f64>>>()?;
        Ok(GeneralizedBody {
            masses: bodies.iter().map(Body::mass).collect(),
            boundary_masses: bodies.iter().map(|b| b.boundary().mass()).collect(),
            report: cauchy_verdict(distances, epsilon),
            bodies,
        })
    }

    pub fn level(&self, k: usize) -> Option<&Body> {
        self.bodies.get(k)
    }
}

/// Koch snowflake prefractals up to `max_level`, all carried by one
/// triangulation; a triangle born at level j belongs to every body of level
/// at least j.
#[derive(Clone, Debug)]
pub struct KochSnowflake {
    complex: Arc<Complex>,
    births: Vec<usize>,
    max_level: usize,
}

struct KochBuilder {
    points: Vec<Vec<f64>>,
    triangles: Vec<Vec<usize>>,
    births: Vec<usize>,
}

impl KochBuilder {
    fn add(&mut self, p: [f64; 2]) -> usize {
        self.points.push(p.to_vec());
        self.points.len() - 1
    }

    fn at(&self, i: usize) -> [f64; 2] {
        [self.points[i][0], self.points[i][1]]
    }

    /// Adds the bumps grown on segment a→b over `depth` more levels and
    /// returns the vertices left on the segment itself. Outward is to the
    /// right of a→b.
    fn edge(&mut self, a: usize, b: usize, depth: usize, level: usize) -> Vec<usize> {
        if depth == 0 {
            return vec![a, b];
        }
        let (pa, pb) = (self.at(a), self.at(b));
        let d = [pb[0] - pa[0], pb[1] - pa[1]];
        let p = self.add([pa[0] + d[0] / 3.0, pa[1] + d[1] / 3.0]);
        let q = self.add([pa[0] + 2.0 * d[0] / 3.0, pa[1] + 2.0 * d[1] / 3.0]);
        let h = 3f64.sqrt() / 6.0;
        let apex = self.add([pa[0] + d[0] / 2.0 + h * d[1], pa[1] + d[1] / 2.0 - h * d[0]]);
        let left = self.edge(a, p, depth - 1, level + 1);
        let up = self.edge(p, apex, depth - 1, level + 1);
        let down = self.edge(apex, q, depth - 1, level + 1);
        let right = self.edge(q, b, depth - 1, level + 1);
        // Strip between the sides apex→p and apex→q, closed by the base p–q.
        let l: Vec<usize> = up.iter().rev().copied().collect();
        let r = down;
        self.push(vec![l[0], l[1], r[1]], level + 1);
        let (mut i, mut j) = (1, 1);
        while i + 1 < l.len() || j + 1 < r.len() {
            let advance_left = if i + 1 == l.len() {
                false
            } else if j + 1 == r.len() {
                true
            } else {
                (i + 1) * (r.len() - 1) <= (j + 1) * (l.len() - 1)
            };
            if advance_left {
                self.push(vec![l[i], l[i + 1], r[j]], level + 1);
                i += 1;
            } else {
                self.push(vec![l[i], r[j + 1], r[j]], level + 1);
                j += 1;
            }
        }
        let mut out = left;
        out.extend(right);
        out
    }

    /// Stores the triangle counterclockwise.
    fn push(&mut self, mut t: Vec<usize>, birth: usize) {
        let (a, b, c) = (self.at(t[0]), self.at(t[1]), self.at(t[2]));
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        if det < 0.0 {
            t.swap(1, 2);
        }
        self.triangles.push(t);
        self.births.push(birth);
    }
}

impl KochSnowflake {
    /// Side one, counterclockwise base triangle with its lowest edge on y = 0.
    pub fn new(max_level: usize) -> Result<KochSnowflake> {
        if max_level > 7 {
            return Err(Error::InvalidArgument(format!("Koch level {max_level} exceeds 7")));
        }
        let mut b = KochBuilder {
            points: Vec::new(),
            triangles: Vec::new(),
            births: Vec::new(),
        };
        let v0 = b.add([0.0, 0.0]);
        let v1 = b.add([1.0, 0.0]);
        let v2 = b.add([0.5, 3f64.sqrt() / 2.0]);
        // Counterclockwise, so the right of each edge is outside.
        let mut ring = Vec::new();
        for (a, c) in [(v0, v1), (v1, v2), (v2, v0)] {
            let mut e = b.edge(a, c, max_level, 0);
            e.pop();
            ring.extend(e);
        }
        let centre = b.add([0.5, 3f64.sqrt() / 6.0]);
        for w in 0..ring.len() {
            b.push(vec![centre, ring[w], ring[(w + 1) % ring.len()]], 0);
        }
        let mut lists = BTreeMap::new();
        lists.insert(2, b.triangles);
        let complex = build_complex(2, &b.points, &lists)?;
        Ok(KochSnowflake {
            complex,
            births: b.births,
            max_level,
        })
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn births(&self) -> &[usize] {
        &self.births
    }

    pub fn body(&self, level: usize) -> Result<Body> {
        if level > self.max_level {
            return Err(Error::InvalidArgument(format!(
                "level {level} exceeds the built level {}",
                self.max_level
            )));
        }
        let ids: Vec<usize> = (0..self.births.len()).filter(|&i| self.births[i] <= level).collect();
        Body::from_simplices(&self.complex, &ids)
    }

    pub fn sequence(&self, epsilon: f64) -> Result<GeneralizedBody> {
        let bodies = (0..=self.max_level).map(|k| self.body(k)).collect::<Result<Vec<_>>>()?;
        GeneralizedBody::new(bodies, epsilon)
    }

    pub fn perimeter(level: usize) -> f64 {
        3.0 * (4.0f64 / 3.0).powi(level as i32)
    }

    pub fn area(level: usize) -> f64 {
        let a0 = 3f64.sqrt() / 4.0;
        a0 * (1.0 + 0.6 * (1.0 - (4.0f64 / 9.0).powi(level as i32)))
    }

    /// Area added in passing from `level` to `level + 1`.
    pub fn annexed_area(level: usize) -> f64 {
        3.0 * 4f64.powi(level as i32) * (3f64.sqrt() / 4.0) * 9f64.powi(-(level as i32 + 1))
    }
}

/// Barycentric coordinates of `x` in the top simplex `i`.
fn barycentric(c: &Complex, i: usize, x: &Point) -> Vec<f64> {
    let n = c.dim();
    let p = c.points(n, i);
    let e = DMatrix::from_fn(n, n, |r, col| p[col + 1][r] - p[0][r]);
    let rhs = DVector::from_fn(n, |r, _| x[r] - p[0][r]);
    let lam = e.lu().solve(&rhs).expect("nondegenerate simplex");
    let mut out = vec![1.0 - lam.sum()];
    out.extend(lam.iter());
    out
}

/// Locates points in the top simplices of a body through a uniform bucket grid.
struct Locator<'a> {
    complex: &'a Complex,
    lo: Point,
    cell: f64,
    dims: [usize; 3],
    buckets: BTreeMap<[usize; 3], Vec<usize>>,
}

impl<'a> Locator<'a> {
    fn new(body: &'a Body) -> Self {
        let c = body.complex().as_ref();
        let n = c.dim();
        let ids = body.simplices();
        let mut lo = [f64::MAX; 3];
        let mut hi = [f64::MIN; 3];
        for &i in &ids {
            for q in c.points(n, i) {
                for a in 0..n {
                    lo[a] = lo[a].min(q[a]);
                    hi[a] = hi[a].max(q[a]);
                }
            }
        }
        let span = (0..n).map(|a| hi[a] - lo[a]).fold(0.0, f64::max).max(1e-300);
        let per_axis = ((ids.len() as f64).powf(1.0 / n as f64).ceil() as usize).max(1);
        let cell = span / per_axis as f64;
        let mut dims = [1; 3];
        for a in 0..n {
            dims[a] = (((hi[a] - lo[a]) / cell).floor() as usize + 1).max(1);
        }
        let mut loc = Locator {
            complex: c,
            lo,
            cell,
            dims,
            buckets: BTreeMap::new(),
        };
        for &i in &ids {
            let pts = c.points(n, i);
            let mut a_lo = [0usize; 3];
            let mut a_hi = [0usize; 3];
            for a in 0..n {
                let mn = pts.iter().map(|q| q[a]).fold(f64::MAX, f64::min);
                let mx = pts.iter().map(|q| q[a]).fold(f64::MIN, f64::max);
                a_lo[a] = loc.axis(a, mn);
                a_hi[a] = loc.axis(a, mx);
            }
            for x in a_lo[0]..=a_hi[0] {
                for y in a_lo[1]..=a_hi[1] {
                    for z in a_lo[2]..=a_hi[2] {
                        loc.buckets.entry([x, y, z]).or_default().push(i);
                    }
                }
            }
        }
        loc
    }

    fn axis(&self, a: usize, v: f64) -> usize {
        let t = ((v - self.lo[a]) / self.cell).floor();
        (t.max(0.0) as usize).min(self.dims[a] - 1)
    }

    /// A body simplex whose closure contains `x` (up to `tol` in barycentric
    /// coordinates).
    fn find(&self, x: &Point, tol: f64) -> Option<usize> {
        let n = self.complex.dim();
        let mut key = [0usize; 3];
        for a in 0..n {
            if x[a] < self.lo[a] - self.cell || x[a] > self.lo[a] + (self.dims[a] as f64 + 1.0) * self.cell {
                return None;
            }
            key[a] = self.axis(a, x[a]);
        }
        self.buckets
            .get(&key)?
            .iter()
            .copied()
            .find(|&i| barycentric(self.complex, i, x).iter().all(|&l| l >= -tol))
    }
}

/// Box mesh around the given bounding box.
fn box_complex(n: usize, lo: Point, hi: Point) -> Arc<Complex> {
    match n {
        1 => meshes::interval(1, lo[0], hi[0]),
        2 => meshes::grid(1, 1, [lo[0], lo[1]], [hi[0] - lo[0], hi[1] - lo[1]]),
        _ => {
            let (verts, tets) = meshes::cube_grid_data(1, 1.0);
            let verts: Vec<Vec<f64>> = verts
                .iter()
                .map(|v| (0..3).map(|a| lo[a] + v[a] * (hi[a] - lo[a])).collect())
                .collect();
            let mut lists = BTreeMap::new();
            lists.insert(3, tets);
            build_complex(3, &verts, &lists).expect("box is valid")
        }
    }
}

/// Facet hyperplanes of the body's simplices, deduplicated.
fn facet_planes(body: &Body, out: &mut Vec<HalfSpace>, seen: &mut BTreeSet<Vec<i64>>) {
    let c = body.complex();
    let n = c.dim();
    for i in body.simplices() {
        let tuple = c.simplex(n, i).to_vec();
        for omit in 0..=n {
            let mut nu = outward_normal(c, i, omit);
            let base = c.vertex(tuple[(omit + 1) % (n + 1)]);
            // Canonical sign: first nonzero component positive.
            if let Some(first) = nu.iter().find(|v| v.abs() > 1e-12) {
                if *first < 0.0 {
                    nu.iter_mut().for_each(|v| *v = -*v);
                }
            }
            let s: f64 = (0..n).map(|a| nu[a] * base[a]).sum();
            let mut key: Vec<i64> = nu.iter().map(|v| (v * 1e9).round() as i64).collect();
            key.push((s * 1e9).round() as i64);
            if seen.insert(key) {
                out.push(HalfSpace::new(&nu, s));
            }
        }
    }
}

/// An overlay complex on which both bodies are unions of top simplices,
/// together with the two bodies transferred to it. Bodies already sharing a
/// complex are returned unchanged.
pub fn common_refinement(a: &Body, b: &Body) -> Result<(Arc<Complex>, Body, Body)> {
    let n = a.complex().dim();
    if b.complex().dim() != n {
        return Err(Error::ComplexMismatch);
    }
    if a.complex().id() == b.complex().id() {
        return Ok((a.complex().clone(), a.clone(), b.clone()));
    }
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    let mut any = false;
    for body in [a, b] {
        let c = body.complex();
        for i in body.simplices() {
            for q in c.points(n, i) {
                for ax in 0..n {
                    if !any {
                        lo[ax] = q[ax];
                        hi[ax] = q[ax];
                    }
                    lo[ax] = lo[ax].min(q[ax]);
                    hi[ax] = hi[ax].max(q[ax]);
                }
                any = true;
            }
        }
    }
    if !any {
        let empty = meshes::interval(1, 0.0, 1.0);
        let c = if n == 1 { empty } else { box_complex(n, [0.0; 3], [1.0; 3]) };
        return Ok((c.clone(), Body::from_simplices(&c, &[])?, Body::from_simplices(&c, &[])?));
    }
    let mut planes = Vec::new();
    let mut seen = BTreeSet::new();
    facet_planes(a, &mut planes, &mut seen);
    facet_planes(b, &mut planes, &mut seen);
    let boxed = box_complex(n, lo, hi);
    let fine = boxed.split_by_hyperplanes(&planes)?.fine;
    let transfer = |body: &Body| -> Result<Body> {
        let loc = Locator::new(body);
        let ids: Vec<usize> = (0..fine.count(n))
            .filter(|&j| {
                let x = geometry::centroid(&fine.points(n, j));
                loc.find(&x, 1e-9).is_some()
            })
            .collect();
        Body::from_simplices(&fine, &ids)
    };
    let (ta, tb) = (transfer(a)?, transfer(b)?);
    for (orig, new) in [(a, &ta), (b, &tb)] {
        let (m0, m1) = (orig.mass(), new.mass());
        if (m0 - m1).abs() > 1e-10 * m0.max(1.0) {
            return Err(Error::OverlayFailure(format!("overlay changed a volume from {m0} to {m1}")));
        }
    }
    Ok((fine, ta, tb))
}

/// The body covering the simplices common to two bodies on one complex.
pub fn intersection(a: &Body, b: &Body) -> Result<Body> {
    let (c, ta, tb) = common_refinement(a, b)?;
    let ids: Vec<usize> = ta.simplices().into_iter().filter(|&i| tb.contains_simplex(i)).collect();
    Body::from_simplices(&c, &ids)
}

/// Facets carried by top simplices of the body, i.e. lying in its closure.
fn closure_facets(body: &Body) -> BTreeSet<usize> {
    let c = body.complex();
    let n = c.dim();
    body.simplices()
        .into_iter()
        .flat_map(|i| c.faces(n, i).iter().map(|&(f, _)| f))
        .collect()
}

/// `∂T_{P∩M} − (∂T_M)↾P`, the part of ∂P inside the generator M. Fails when
/// the two boundaries share a facet.
pub fn trace(p: &Body, m: &Body) -> Result<Chain> {
    let (_, tp, tm) = common_refinement(p, m)?;
    let bp = tp.boundary();
    let bm = tm.boundary();
    if let Some((f, _)) = bp.iter().find(|&(f, _)| bm.coefficient(f) != 0.0) {
        return Err(Error::GeneratorOverlap { facet: f });
    }
    let inter = intersection(&tp, &tm)?;
    let inside = closure_facets(&tp);
    let restricted = Chain::new(
        bm.complex(),
        bm.degree(),
        bm.iter().filter(|(f, _)| inside.contains(f)),
    )?;
    inter.boundary().sub(&restricted)
}

/// `(∂T_P)↾M`: the facets of ∂P inside M, on the common refinement.
pub fn boundary_inside(p: &Body, m: &Body) -> Result<Chain> {
    let (_, tp, tm) = common_refinement(p, m)?;
    let inside = closure_facets(&tm);
    let bp = tp.boundary();
    Chain::new(bp.complex(), bp.degree(), bp.iter().filter(|(f, _)| inside.contains(f)))
}

/// Report on a Koch prefractal sequence.
#[derive(Clone, Debug, Serialize)]
pub struct KochReport {
    pub level: usize,
    pub triangles: usize,
    pub perimeters: Vec<f64>,
    pub areas: Vec<f64>,
    pub flat_distances: Vec<f64>,
    pub annexed_areas: Vec<f64>,
    pub ratios: Vec<f64>,
    pub cauchy_passed: bool,
}

pub fn koch_report(level: usize, epsilon: f64) -> Result<KochReport> {
    let snow = KochSnowflake::new(level)?;
    let seq = if level == 0 {
        None
    } else {
        Some(snow.sequence(epsilon)?)
    };
    let bodies: Vec<Body> = (0..=level).map(|k| snow.body(k)).collect::<Result<_>>()?;
    Ok(KochReport {
        level,
        triangles: snow.complex().count(2),
        perimeters: bodies.iter().map(|b| b.boundary().mass()).collect(),
        areas: bodies.iter().map(Body::mass).collect(),
        flat_distances: seq.as_ref().map_or(Vec::new(), |s| s.report.distances.clone()),
        annexed_areas: (0..level).map(KochSnowflake::annexed_area).collect(),
        ratios: seq.as_ref().map_or(Vec::new(), |s| s.report.ratios.clone()),
        cauchy_passed: seq.is_some_and(|s| s.report.passed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn square_body_and_stokes() {
        let c = meshes::unit_square();
        let b = Body::from_simplices(&c, &[0, 1, 1]).unwrap();
        assert!((b.mass() - 1.0).abs() < 1e-15);
        assert!(b.chain().iter().all(|(_, a)| a == 1.0));
        let s = geometric_boundary_surface(&b);
        assert_eq!(s.chain().support().len(), 4);
        assert!(s.chain().max_deviation(&b.boundary()).unwrap() < 1e-12);
        // Bottom edge: outward normal −e₂.
        let (bottom, _) = c.find_simplex(&[0, 1]).unwrap();
        let nu = s.normal(bottom).unwrap();
        assert!(nu[0].abs() < 1e-15 && (nu[1] + 1.0).abs() < 1e-15);
        assert!(Body::from_simplices(&c, &[]).unwrap().is_empty());
        assert!(matches!(Body::from_chain(b.boundary()), Err(Error::WrongDegree(1))));
    }

    #[test]
    fn l_shape_perimeter() {
        let c = meshes::grid(2, 2, [0.0, 0.0], [2.0, 2.0]);
        // Drop the two triangles of the top-right unit square.
        let keep: Vec<usize> = (0..c.count(2))
            .filter(|&i| {
                let x = geometry::centroid(&c.points(2, i));
                !(x[0] > 1.0 && x[1] > 1.0)
            })
            .collect();
        let b = Body::from_simplices(&c, &keep).unwrap();
        assert!((b.mass() - 3.0).abs() < 1e-12);
        assert!((b.boundary().mass() - 8.0).abs() < 1e-12);
        assert!(stokes_deviation(&b) < 1e-12);
    }

    #[test]
    fn disjoint_union_boundary() {
        let c = meshes::grid(3, 1, [0.0, 0.0], [3.0, 1.0]);
        let left: Vec<usize> = (0..c.count(2)).filter(|&i| geometry::centroid(&c.points(2, i))[0] < 1.0).collect();
        let right: Vec<usize> = (0..c.count(2)).filter(|&i| geometry::centroid(&c.points(2, i))[0] > 2.0).collect();
        let both: Vec<usize> = left.iter().chain(&right).copied().collect();
        let sum = Body::from_simplices(&c, &left)
            .unwrap()
            .boundary()
            .add(&Body::from_simplices(&c, &right).unwrap().boundary())
            .unwrap();
        let union = geometric_boundary_surface(&Body::from_simplices(&c, &both).unwrap());
        assert!(union.chain().max_deviation(&sum).unwrap() < 1e-12);
    }

    #[test]
    fn koch_levels() {
        let snow = KochSnowflake::new(3).unwrap();
        for k in 0..=3 {
            let b = snow.body(k).unwrap();
            assert!((b.boundary().mass() - KochSnowflake::perimeter(k)).abs() < 1e-9);
            assert!((b.mass() - KochSnowflake::area(k)).abs() < 1e-9);
            assert!(stokes_deviation(&b) < 1e-10);
        }
        assert!((KochSnowflake::area(1) - 0.5773502691896257).abs() < 1e-12);
        let seq = snow.sequence(0.05).unwrap();
        for (k, d) in seq.report.distances.iter().enumerate() {
            assert!((d - KochSnowflake::annexed_area(k)).abs() < 1e-9);
        }
        for r in &seq.report.ratios {
            assert!((r - 4.0 / 9.0).abs() < 1e-9);
        }
        assert!(seq.report.passed);
    }

    #[test]
    fn overlay_examples() {
        let a = meshes::unit_square();
        let b = meshes::unit_square();
        let ba = Body::from_simplices(&a, &[0, 1]).unwrap();
        let bb = Body::from_simplices(&b, &[0, 1]).unwrap();
        let (c, ta, tb) = common_refinement(&ba, &bb).unwrap();
        assert_eq!(c.count(2), 2);
        assert!((ta.mass() - 1.0).abs() < 1e-12 && (tb.mass() - 1.0).abs() < 1e-12);
        let shifted = meshes::grid(1, 1, [0.5, 0.0], [1.0, 1.0]);
        let bs = Body::from_simplices(&shifted, &[0, 1]).unwrap();
        assert!((intersection(&ba, &bs).unwrap().mass() - 0.5).abs() < 1e-12);
        let far = meshes::grid(1, 1, [3.0, 0.0], [1.0, 1.0]);
        let bf = Body::from_simplices(&far, &[0, 1]).unwrap();
        assert!(intersection(&ba, &bf).unwrap().mass() < 1e-12);
    }

    #[test]
    fn trace_of_square_by_slab() {
        let p = Body::from_simplices(&meshes::unit_square(), &[0, 1]).unwrap();
        let slab_mesh = meshes::grid(1, 1, [0.5, -1.0], [2.0, 3.0]);
        let m = Body::from_simplices(&slab_mesh, &[0, 1]).unwrap();
        let (_, p, m) = common_refinement(&p, &m).unwrap();
        let t = trace(&p, &m).unwrap();
        // Right half of ∂P: bottom 0.5 + right 1 + top 0.5.
        assert!((t.mass() - 2.0).abs() < 1e-10);
        let expected = boundary_inside(&p, &m).unwrap();
        assert!(t.max_deviation(&expected).unwrap() < 1e-10);
        // A second generator with the same intersection with ∂P.
        let wide = meshes::grid(1, 1, [0.5, -2.0], [5.0, 6.0]);
        let m2 = Body::from_simplices(&wide, &[0, 1]).unwrap();
        let t2 = trace(&p, &m2).unwrap();
        assert!((t2.mass() - t.mass()).abs() < 1e-9);
        // Generator containing P.
        let big = meshes::grid(1, 1, [-1.0, -1.0], [3.0, 3.0]);
        let all = trace(&p, &Body::from_simplices(&big, &[0, 1]).unwrap()).unwrap();
        assert!((all.mass() - 4.0).abs() < 1e-10);
        // Disjoint generator.
        let far = meshes::grid(1, 1, [3.0, 0.0], [1.0, 1.0]);
        assert!(trace(&p, &Body::from_simplices(&far, &[0, 1]).unwrap()).unwrap().mass() < 1e-12);
        // Sharing the right edge violates the precondition.
        let touching = meshes::grid(1, 1, [0.5, 0.0], [0.5, 1.0]);
        let mt = Body::from_simplices(&touching, &[0, 1]).unwrap();
        assert!(matches!(trace(&p, &mt), Err(Error::GeneratorOverlap { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn stokes_on_random_bodies(seed in any::<u64>(), dim in 1usize..=3) {
            let mut rng = random::rng(seed);
            let c = random::mesh(&mut rng, dim);
            let ids: Vec<usize> = (0..c.count(dim)).filter(|_| rng.gen_bool(0.5)).collect();
            let b = Body::from_simplices(&c, &ids).unwrap();
            prop_assert!(stokes_deviation(&b) <= 1e-10);
        }
    }
}
