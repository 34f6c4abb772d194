//! Piecewise-affine maps determined by vertex images.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::chain::Chain;
use crate::complex::{Complex, DEGENERACY_EPS};
use crate::error::{Error, Result};
use crate::flat::flat_norm;
use crate::forms::{Cochain, FormField};
use crate::geometry::{self, Point, PointIndex};
use crate::lp::SparseLp;

/// Affine data of the map on one simplex: `x ↦ a·x + b` with `a` of shape
/// `m × n`, extended constantly across normal directions.
#[derive(Clone, Debug)]
pub struct AffinePiece {
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    /// Singular values of the tangential derivative, largest first.
    pub singular_values: Vec<f64>,
}

impl AffinePiece {
    pub fn norm(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.a.nrows())
            .map(|r| (0..self.a.ncols()).map(|c| self.a[(r, c)]).collect())
            .collect()
    }
}

/// A continuous map, affine on each simplex of its source complex.
#[derive(Clone, Debug)]
pub struct PAMap {
    source: Arc<Complex>,
    target_dim: usize,
    images: Vec<Point>,
    image: Arc<Complex>,
    /// `simplex_map[k][i]`: image simplex and orientation, `None` if the
    /// image is degenerate.
    simplex_map: Vec<Vec<Option<(usize, f64)>>>,
    pieces: BTreeMap<(usize, usize), AffinePiece>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum EmbeddingWitness {
    /// A maximal simplex whose derivative loses rank.
    Degenerate {
        degree: usize,
        simplex: usize,
        singular_value: f64,
    },
    /// Two maximal simplices whose images meet outside the image of their
    /// common face.
    Intersecting {
        first: (usize, usize),
        second: (usize, usize),
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingVerdict {
    pub embedding: bool,
    /// Smallest tangential singular value over maximal simplices.
    pub c: f64,
    /// Largest singular value.
    pub d: f64,
    pub witness: Option<EmbeddingWitness>,
    pub pairs_tested: usize,
}

/// Both sides of the mass, normal and flat bounds for a pushforward.
#[derive(Clone, Debug, Serialize)]
pub struct PushforwardBoundReport {
    pub degree: usize,
    /// Lipschitz constant over the support of the chain.
    pub lip_support: f64,
    /// Lipschitz constant over the whole source complex.
    pub lip_ambient: f64,
    pub mass_lhs: f64,
    pub mass_rhs: f64,
    pub normal_lhs: f64,
    pub normal_rhs: f64,
    pub flat_lhs: f64,
    pub flat_rhs: f64,
    pub passed: bool,
}

const BOUND_SLACK: f64 = 1e-9;

fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + BOUND_SLACK * (1.0 + rhs.abs())
}

fn affine_piece(src: &[Point], img: &[Point], n: usize, m: usize) -> AffinePiece {
    let k = src.len() - 1;
    if k == 0 {
        return AffinePiece {
            a: DMatrix::zeros(m, n),
            b: img[0][..m].to_vec(),
            singular_values: Vec::new(),
        };
    }
    let e = DMatrix::from_fn(n, k, |r, c| src[c + 1][r] - src[0][r]);
    let y = DMatrix::from_fn(m, k, |r, c| img[c + 1][r] - img[0][r]);
    let g = (e.transpose() * &e)
        .try_inverse()
        .expect("nondegenerate source simplex")
        * e.transpose();
    let a = &y * g;
    // Tangential singular values: those of y·R⁻¹ where e = QR.
    let r = e.clone().qr().r();
    let rinv = r.try_inverse().expect("nondegenerate source simplex");
    let mut singular_values: Vec<f64> = (&y * rinv).svd(false, false).singular_values.iter().copied().collect();
    singular_values.sort_by(|x, y| y.total_cmp(x));
    singular_values.resize(k, 0.0);
    if n == m && src.iter().zip(img).all(|(p, q)| p[..n] == q[..m]) {
        // Fixed points: keep the identity exact rather than solved for.
        return AffinePiece {
            a: DMatrix::identity(n, n),
            b: vec![0.0; n],
            singular_values,
        };
    }
    let x0 = DMatrix::from_fn(n, 1, |r, _| src[0][r]);
    let ax0 = &a * x0;
    let b = (0..m).map(|r| img[0][r] - ax0[(r, 0)]).collect();
    AffinePiece { a, b, singular_values }
}

impl PAMap {
    /// Builds the map and its image complex. Image vertices closer than the
    /// coordinate snap are identified.
    pub fn new(source: &Arc<Complex>, images: &[Vec<f64>]) -> Result<PAMap> {
        let n = source.dim();
        if images.len() != source.num_vertices() {
            return Err(Error::InvalidArgument(format!(
                "{} images for {} vertices",
                images.len(),
                source.num_vertices()
            )));
        }
        let m = images.first().map_or(n, Vec::len);
        if images.iter().any(|y| y.len() != m) {
            return Err(Error::InvalidArgument("image points differ in length".into()));
        }
        if m > 3 {
            return Err(Error::UnsupportedDimension(m));
        }
        if m < n {
            return Err(Error::NonSimplexImage {
                source_dim: n,
                target: m,
            });
        }
        if images.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("image coordinates must be finite".into()));
        }
        let images: Vec<Point> = images.iter().map(|y| geometry::point(y)).collect();

        // Identify coincident image vertices.
        let mut index = PointIndex::default();
        let mut verts: Vec<Point> = Vec::new();
        let mut vmap = Vec::with_capacity(images.len());
        for p in &images {
            let id = match index.find(p, &verts) {
                Some(id) => id,
                None => {
                    index.insert(p, verts.len());
                    verts.push(*p);
                    verts.len() - 1
                }
            };
            vmap.push(id);
        }

        let mut lists: Vec<Vec<Vec<usize>>> = vec![Vec::new(); m + 1];
        let mut keys: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::new(); m + 1];
        let mut raw: Vec<Vec<Option<Vec<usize>>>> = vec![Vec::new(); n + 1];
        for k in 0..=n {
            for i in 0..source.count(k) {
                let tuple: Vec<usize> = source.simplex(k, i).iter().map(|&v| vmap[v]).collect();
                let mut key = tuple.clone();
                key.sort_unstable();
                key.dedup();
                let pts: Vec<Point> = tuple.iter().map(|&v| verts[v]).collect();
                let vol = geometry::simplex_volume(&pts);
                let l = geometry::longest_edge(&pts);
                let degenerate =
                    key.len() < tuple.len() || (k > 0 && (l == 0.0 || vol / l.powi(k as i32) < DEGENERACY_EPS));
                if degenerate {
                    raw[k].push(None);
                    continue;
                }
                if k > 0 && !keys[k].contains_key(&key) {
                    keys[k].insert(key, lists[k].len());
                    lists[k].push(tuple.clone());
                }
                raw[k].push(Some(tuple));
            }
        }
        let image = Complex::unchecked(m, verts, lists);
        let simplex_map = raw
            .into_iter()
            .map(|per| {
                per.into_iter()
                    .map(|t| t.map(|t| image.find_simplex(&t).expect("image simplex present")))
                    .collect()
            })
            .collect();

        let mut pieces = BTreeMap::new();
        for (d, h) in source.maximal_simplices() {
            let src = source.points(d, h);
            let img: Vec<Point> = source.simplex(d, h).iter().map(|&v| images[v]).collect();
            pieces.insert((d, h), affine_piece(&src, &img, n, m));
        }
        Ok(PAMap {
            source: source.clone(),
            target_dim: m,
            images,
            image,
            simplex_map,
            pieces,
        })
    }

    /// Samples `f` at the source vertices.
    pub fn from_fn(source: &Arc<Complex>, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<PAMap> {
        let images: Vec<Vec<f64>> = (0..source.num_vertices()).map(|v| f(source.vertex_coords(v))).collect();
        PAMap::new(source, &images)
    }

    pub fn identity(source: &Arc<Complex>) -> PAMap {
        PAMap::from_fn(source, |x| x.to_vec()).expect("identity is well formed")
    }

    pub fn source(&self) -> &Arc<Complex> {
        &self.source
    }

    /// The complex spanned by the nondegenerate image simplices.
    pub fn image_complex(&self) -> &Arc<Complex> {
        &self.image
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn image_of_vertex(&self, v: usize) -> &[f64] {
        &self.images[v][..self.target_dim]
    }

    /// Image simplex and relative orientation of source simplex `(k, i)`.
    pub fn simplex_image(&self, k: usize, i: usize) -> Result<Option<(usize, f64)>> {
        self.source.check_index(k, i)?;
        Ok(self.simplex_map[k][i])
    }

    /// Affine data on the maximal simplex hosting `(k, i)`.
    pub fn piece(&self, k: usize, i: usize) -> Result<&AffinePiece> {
        self.source.check_index(k, i)?;
        Ok(&self.pieces[&self.source.host(k, i)])
    }

    /// `F(x)` for a point of the simplex `(k, i)`.
    pub fn apply(&self, k: usize, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.piece(k, i)?;
        Ok((0..self.target_dim)
            .map(|r| p.b[r] + (0..x.len()).map(|c| p.a[(r, c)] * x[c]).sum::<f64>())
            .collect())
    }

    fn check_region(&self, region: &[(usize, usize)]) -> Result<()> {
        if region.is_empty() {
            return Err(Error::EmptyRegion);
        }
        region.iter().try_for_each(|&(k, i)| self.source.check_index(k, i))
    }

    /// Operator norm of the derivative restricted to simplex `(k, i)`.
    pub fn local_lipschitz(&self, k: usize, i: usize) -> Result<f64> {
        self.source.check_index(k, i)?;
        if k == 0 {
            return Ok(0.0);
        }
        let src = self.source.points(k, i);
        let img: Vec<Point> = self.source.simplex(k, i).iter().map(|&v| self.images[v]).collect();
        Ok(affine_piece(&src, &img, self.source.dim(), self.target_dim).norm())
    }

    /// Largest local operator norm over the region's simplices.
    pub fn lipschitz_constant(&self, region: &[(usize, usize)]) -> Result<f64> {
        self.check_region(region)?;
        region
            .iter()
            .try_fold(0.0f64, |acc, &(k, i)| Ok(acc.max(self.local_lipschitz(k, i)?)))
    }

    /// `max{sup |F|, Lip F}` over the region, the sup taken at vertices.
    pub fn lip_seminorm(&self, region: &[(usize, usize)]) -> Result<f64> {
        let lip = self.lipschitz_constant(region)?;
        let sup = region
            .iter()
            .flat_map(|&(k, i)| self.source.simplex(k, i).iter())
            .map(|&v| geometry::norm(&self.images[v]))
            .fold(0.0, f64::max);
        Ok(sup.max(lip))
    }

    /// Rank and injectivity check: every maximal simplex keeps full rank and
    /// no two image simplices meet outside the image of their common face.
    pub fn is_embedding(&self) -> EmbeddingVerdict {
        let mut c = f64::INFINITY;
        let mut d: f64 = 0.0;
        let mut witness = None;
        for (&(k, i), p) in &self.pieces {
            if k == 0 {
                continue;
            }
            let smin = *p.singular_values.last().expect("k ≥ 1");
            c = c.min(smin);
            d = d.max(p.norm());
            let scale = p.norm().max(f64::MIN_POSITIVE);
            if witness.is_none() && smin <= 1e-12 * scale {
                witness = Some(EmbeddingWitness::Degenerate {
                    degree: k,
                    simplex: i,
                    singular_value: smin,
                });
            }
        }
        if !c.is_finite() {
            c = 0.0;
        }
        let mut pairs_tested = 0;
        if witness.is_none() {
            let (w, tested) = self.find_intersecting_pair();
            witness = w;
            pairs_tested = tested;
        }
        EmbeddingVerdict {
            embedding: witness.is_none(),
            c,
            d,
            witness,
            pairs_tested,
        }
    }

    fn find_intersecting_pair(&self) -> (Option<EmbeddingWitness>, usize) {
        let keys: Vec<(usize, usize)> = self.pieces.keys().copied().collect();
        let m = self.target_dim;
        let boxes: Vec<(Point, Point)> = keys
            .iter()
            .map(|&(k, i)| {
                let mut lo = [f64::MAX; 3];
                let mut hi = [f64::MIN; 3];
                for &v in self.source.simplex(k, i) {
                    for a in 0..m {
                        lo[a] = lo[a].min(self.images[v][a]);
                        hi[a] = hi[a].max(self.images[v][a]);
                    }
                }
                (lo, hi)
            })
            .collect();
        let span = boxes
            .iter()
            .flat_map(|(lo, hi)| (0..m).map(move |a| hi[a] - lo[a]))
            .fold(0.0, f64::max);
        let tol = 1e-9 * span.max(f64::MIN_POSITIVE);
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by(|&a, &b| boxes[a].0[0].total_cmp(&boxes[b].0[0]));
        let mut tested = 0;
        for (pos, &a) in order.iter().enumerate() {
            for &b in &order[pos + 1..] {
                if boxes[b].0[0] > boxes[a].1[0] + tol {
                    break;
                }
                if (1..m).any(|ax| boxes[b].0[ax] > boxes[a].1[ax] + tol || boxes[a].0[ax] > boxes[b].1[ax] + tol) {
                    continue;
                }
                tested += 1;
                if self.images_meet_off_common_face(keys[a], keys[b]) {
                    let (first, second) = if keys[a] < keys[b] { (keys[a], keys[b]) } else { (keys[b], keys[a]) };
                    return (Some(EmbeddingWitness::Intersecting { first, second }), tested);
                }
            }
        }
        (None, tested)
    }

    /// Small LP: maximize the barycentric weight of P outside the shared face
    /// over points common to F(P) and F(Q).
    fn images_meet_off_common_face(&self, p: (usize, usize), q: (usize, usize)) -> bool {
        let m = self.target_dim;
        let tp = self.source.simplex(p.0, p.1);
        let tq = self.source.simplex(q.0, q.1);
        let pts: Vec<&Point> = tp.iter().chain(tq).map(|&v| &self.images[v]).collect();
        let center = geometry::centroid(&pts.iter().map(|p| **p).collect::<Vec<_>>());
        let scale = pts
            .iter()
            .map(|x| geometry::norm(&geometry::sub(x, &center)))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let local = |v: usize| -> Vec<f64> { (0..m).map(|a| (self.images[v][a] - center[a]) / scale).collect() };
        let rows = m + 2;
        let mut columns = Vec::new();
        let mut cost = Vec::new();
        for &v in tp {
            let mut col: Vec<(usize, f64)> = local(v).into_iter().enumerate().collect();
            col.push((m, 1.0));
            columns.push(col);
            cost.push(if tq.contains(&v) { 0.0 } else { -1.0 });
        }
        for &v in tq {
            let mut col: Vec<(usize, f64)> = local(v).into_iter().enumerate().map(|(r, x)| (r, -x)).collect();
            col.push((m + 1, 1.0));
            columns.push(col);
            cost.push(0.0);
        }
        let big = 1e6;
        let art = columns.len();
        for r in 0..rows {
            columns.push(vec![(r, 1.0)]);
            columns.push(vec![(r, -1.0)]);
            cost.extend([big, big]);
        }
        let mut rhs = vec![0.0; rows];
        rhs[m] = 1.0;
        rhs[m + 1] = 1.0;
        let initial: Vec<usize> = (0..rows).map(|r| art + 2 * r).collect();
        let lp = SparseLp {
            rows,
            columns,
            cost,
            rhs,
        };
        match lp.solve(&initial) {
            Ok(sol) => {
                let residual: f64 = sol.x[art..].iter().sum();
                let weight: f64 = tp
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !tq.contains(v))
                    .map(|(j, _)| sol.x[j])
                    .sum();
                residual <= 1e-9 && weight > 1e-9
            }
            // A failed solve cannot certify disjointness.
            Err(_) => true,
        }
    }

    fn check_source(&self, c: &Complex) -> Result<()> {
        if c.id() != self.source.id() {
            return Err(Error::ComplexMismatch);
        }
        Ok(())
    }

    /// `F#T` on the image complex. Simplices with degenerate images carry no
    /// mass and are dropped.
    pub fn pushforward(&self, t: &Chain) -> Result<Chain> {
        self.check_source(t.complex())?;
        let k = t.degree();
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, a) in t.iter() {
            if let Some((j, s)) = self.simplex_map[k][i] {
                *acc.entry(j).or_insert(0.0) += a * s;
            }
        }
        Chain::new(&self.image, k, acc.into_iter().filter(|&(_, v)| v != 0.0))
    }

    /// `F#ω`, assembled per source maximal simplex. ω must be global or live
    /// on the image complex.
    pub fn pullback_form(&self, omega: &FormField) -> Result<FormField> {
        if let Some(c) = omega.complex() {
            if c.id() != self.image.id() {
                return Err(Error::ComplexMismatch);
            }
        }
        let n = self.source.dim();
        let mut out = BTreeMap::new();
        for (&(d, h), p) in &self.pieces {
            let target = match self.simplex_map[d][h] {
                Some((j, _)) => (d, j),
                None => (0, self.simplex_map[0][self.source.simplex(d, h)[0]].expect("vertex").0),
            };
            let w = omega.on_simplex(&self.image, target.0, target.1)?;
            out.insert((d, h), w.pullback_affine(&p.rows(), &p.b, n));
        }
        Ok(FormField::Piecewise {
            complex: self.source.clone(),
            degree: omega.degree(),
            pieces: out,
        })
    }

    /// `(F#X)(σ) = X(F#σ)`.
    pub fn pullback_cochain(&self, x: &Cochain) -> Result<Cochain> {
        if x.complex().id() != self.image.id() {
            return Err(Error::ComplexMismatch);
        }
        let k = x.degree();
        let coeffs = self.simplex_map[k]
            .iter()
            .map(|im| im.map_or(0.0, |(j, s)| s * x.coefficients()[j]))
            .collect();
        Cochain::new(&self.source, k, coeffs)
    }

    /// `G ∘ F` for `G` defined on the image complex of `F`.
    pub fn then(&self, g: &PAMap) -> Result<PAMap> {
        if g.source.id() != self.image.id() {
            return Err(Error::ComplexMismatch);
        }
        let images: Vec<Vec<f64>> = (0..self.source.num_vertices())
            .map(|v| {
                let (w, _) = self.simplex_map[0][v].expect("vertices never degenerate");
                g.image_of_vertex(w).to_vec()
            })
            .collect();
        PAMap::new(&self.source, &images)
    }

    /// Mass, normal and flat bounds for `F#T`. The flat bound uses the
    /// Lipschitz constant of the whole source complex, since the optimal
    /// filling need not stay inside the support of `T`.
    pub fn check_bounds(&self, t: &Chain) -> Result<PushforwardBoundReport> {
        self.check_source(t.complex())?;
        let k = t.degree();
        let c = &self.source;
        let support: Vec<(usize, usize)> = t.support().into_iter().map(|i| (k, i)).collect();
        let lip_support = if support.is_empty() { 0.0 } else { self.lipschitz_constant(&support)? };
        let lip_ambient = self.lipschitz_constant(&c.maximal_simplices())?;
        let pow = |l: f64, e: i32| if e < 0 { 0.0 } else { l.powi(e) };
        let ki = k as i32;
        let ft = self.pushforward(t)?;
        let mass_lhs = ft.mass();
        let mass_rhs = t.mass() * pow(lip_support, ki);
        let (normal_lhs, normal_rhs) = if k == 0 {
            (mass_lhs, mass_rhs)
        } else {
            (
                ft.normal_norm()?,
                t.normal_norm()? * pow(lip_support, ki).max(pow(lip_support, ki - 1)),
            )
        };
        let flat_lhs = flat_norm(&ft, &self.image)?.value;
        let flat_rhs = flat_norm(t, c)?.value * pow(lip_ambient, ki).max(pow(lip_ambient, ki + 1));
        Ok(PushforwardBoundReport {
            degree: k,
            lip_support,
            lip_ambient,
            mass_lhs,
            mass_rhs,
            normal_lhs,
            normal_rhs,
            flat_lhs,
            flat_rhs,
            passed: holds(mass_lhs, mass_rhs) && holds(normal_lhs, normal_rhs) && holds(flat_lhs, flat_rhs),
        })
    }
}

/// Random perturbation of an affine map, used by property campaigns.
pub fn random_map(rng: &mut crate::random::CampaignRng, source: &Arc<Complex>, jitter: f64) -> PAMap {
    use rand::Rng;
    let n = source.dim();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 } + rng.gen_range(-0.4..0.4)).collect())
        .collect();
    let h = (0..source.count(1)).map(|e| source.volume(1, e)).fold(1.0, f64::min);
    let images: Vec<Vec<f64>> = (0..source.num_vertices())
        .map(|v| {
            let x = source.vertex_coords(v);
            (0..n)
                .map(|r| (0..n).map(|c| a[r][c] * x[c]).sum::<f64>() + rng.gen_range(-jitter..=jitter) * h)
                .collect()
        })
        .collect();
    PAMap::new(source, &images).expect("well-formed images")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::PolyForm;
    use crate::meshes;
    use crate::random;
    use proptest::prelude::*;

    fn whole(c: &Complex) -> Vec<(usize, usize)> {
        c.maximal_simplices()
    }

    #[test]
    fn lipschitz_constants() {
        let c = meshes::unit_square();
        let id = PAMap::identity(&c);
        assert!((id.lipschitz_constant(&whole(&c)).unwrap() - 1.0).abs() < 1e-12);
        assert!((id.lip_seminorm(&whole(&c)).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let double = PAMap::from_fn(&c, |x| vec![2.0 * x[0], 2.0 * x[1]]).unwrap();
        assert!((double.lipschitz_constant(&whole(&c)).unwrap() - 2.0).abs() < 1e-12);
        assert!((double.lip_seminorm(&whole(&c)).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let shear = PAMap::from_fn(&c, |x| vec![x[0] + x[1], x[1]]).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((shear.lipschitz_constant(&whole(&c)).unwrap() - golden).abs() < 1e-12);
        let constant = PAMap::from_fn(&c, |_| vec![3.0, 4.0]).unwrap();
        assert_eq!(constant.lipschitz_constant(&whole(&c)).unwrap(), 0.0);
        assert!((constant.lip_seminorm(&whole(&c)).unwrap() - 5.0).abs() < 1e-12);
        assert!(matches!(id.lipschitz_constant(&[]), Err(Error::EmptyRegion)));
    }

    #[test]
    fn embedding_verdicts() {
        let c = meshes::grid(2, 2, [0.0, 0.0], [1.0, 1.0]);
        let v = PAMap::identity(&c).is_embedding();
        assert!(v.embedding && (v.c - 1.0).abs() < 1e-12 && (v.d - 1.0).abs() < 1e-12);
        assert!(v.pairs_tested > 0);
        let flat = PAMap::from_fn(&c, |x| vec![x[0], 0.0]).unwrap().is_embedding();
        assert!(!flat.embedding);
        assert!(matches!(flat.witness, Some(EmbeddingWitness::Degenerate { .. })));
        let fold = PAMap::from_fn(&c, |x| vec![(x[0] - 0.5).abs(), x[1]]).unwrap().is_embedding();
        assert!(!fold.embedding);
        assert!(matches!(fold.witness, Some(EmbeddingWitness::Intersecting { .. })));
        // A curve bent back onto itself in the plane.
        let line = meshes::interval(4, 0.0, 4.0);
        let hook = PAMap::from_fn(&line, |x| {
            let t = x[0];
            if t <= 2.0 { vec![t, 0.0] } else { vec![4.0 - t, 0.0] }
        })
        .unwrap()
        .is_embedding();
        assert!(!hook.embedding);
        let arc = PAMap::from_fn(&line, |x| vec![x[0].cos(), x[0].sin()]).unwrap().is_embedding();
        assert!(arc.embedding, "{arc:?}");
        assert!(PAMap::new(&c, &vec![vec![0.0]; c.num_vertices()]).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let c = meshes::unit_square();
        let a = Chain::new(&c, 2, [(0, 1.0), (1, 1.0)]).unwrap();
        let id = PAMap::identity(&c);
        let same = id.pushforward(&a).unwrap();
        assert_eq!(same.coefficients(), a.coefficients());
        let double = PAMap::from_fn(&c, |x| vec![2.0 * x[0], 2.0 * x[1]]).unwrap();
        assert!((double.pushforward(&a).unwrap().mass() - 4.0).abs() < 1e-12);
        let dxdy = PolyForm::coordinate_differential(2, 0).wedge(&PolyForm::coordinate_differential(2, 1));
        let pulled = double.pullback_form(&FormField::Global(dxdy.clone())).unwrap();
        let p = pulled.on_simplex(&c, 2, 0).unwrap();
        assert!((p.components()[0].eval(&[0.3, 0.2]) - 4.0).abs() < 1e-12);
        // A reflection reverses orientation: the image chain integrates dx∧dy to −1.
        let mirror = PAMap::from_fn(&c, |x| vec![-x[0], x[1]]).unwrap();
        let im = mirror.pushforward(&a).unwrap();
        let v = FormField::Global(dxdy).integrate(&im).unwrap();
        assert!((v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pullback_identity_cochain() {
        let c = meshes::grid(2, 2, [0.0, 0.0], [1.0, 1.0]);
        let id = PAMap::identity(&c);
        let x = random::cochain(&mut random::rng(1), id.image_complex(), 1);
        let y = id.pullback_cochain(&x).unwrap();
        assert_eq!(x.coefficients(), y.coefficients());
        assert!(matches!(id.pullback_cochain(&Cochain::zero(&c, 1)), Err(Error::ComplexMismatch)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn naturality_and_adjunction(seed in any::<u64>(), dim in 1usize..=3) {
            let mut rng = random::rng(seed);
            let c = random::mesh(&mut rng, dim);
            let f = random_map(&mut rng, &c, 0.2);
            for k in 1..=dim {
                let t = random::chain(&mut rng, &c, k, 0.5);
                let lhs = f.pushforward(&t.boundary().unwrap()).unwrap();
                let rhs = f.pushforward(&t).unwrap().boundary().unwrap();
                prop_assert!(lhs.max_deviation(&rhs).unwrap() == 0.0 || lhs.max_deviation(&rhs).unwrap() < 1e-12);
            }
            let k = (seed as usize) % (dim + 1);
            let t = random::chain(&mut rng, &c, k, 0.5);
            let x = random::cochain(&mut rng, f.image_complex(), k);
            let lhs = f.pullback_cochain(&x).unwrap().evaluate(&t).unwrap();
            let rhs = x.evaluate(&f.pushforward(&t).unwrap()).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }

        /// Change of variables per simplex.
        #[test]
        fn pullback_form_adjointness(seed in any::<u64>(), dim in 1usize..=3) {
            let mut rng = random::rng(seed);
            let c = random::mesh(&mut rng, dim);
            let f = random_map(&mut rng, &c, 0.2);
            let k = (seed as usize) % (dim + 1);
            let t = random::chain(&mut rng, &c, k, 0.5);
            let omega = random::cochain(&mut rng, f.image_complex(), k).whitney();
            let lhs = f.pullback_form(&omega).unwrap().integrate(&t).unwrap();
            let rhs = omega.integrate(&f.pushforward(&t).unwrap()).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }

        #[test]
        fn norm_bounds(seed in any::<u64>(), dim in 1usize..=2) {
            let mut rng = random::rng(seed);
            let c = random::mesh(&mut rng, dim);
            let f = random_map(&mut rng, &c, 0.3);
            let k = (seed as usize) % (dim + 1);
            let t = random::chain(&mut rng, &c, k, 0.5);
            let rep = f.check_bounds(&t).unwrap();
            prop_assert!(rep.passed, "{:?}", rep);
        }

        #[test]
        fn composition(seed in any::<u64>(), dim in 1usize..=2) {
            let mut rng = random::rng(seed);
            let c = random::mesh(&mut rng, dim);
            let f = random_map(&mut rng, &c, 0.2);
            let g = random_map(&mut rng, f.image_complex(), 0.2);
            let gf = f.then(&g).unwrap();
            let t = random::chain(&mut rng, &c, dim, 0.5);
            let two_step = g.pushforward(&f.pushforward(&t).unwrap()).unwrap();
            let direct = gf.pushforward(&t).unwrap();
            // Compare the two images through a nonconstant global form.
            let mut omega = PolyForm::scalar(crate::poly::Poly::affine(&[1.0, 0.5, -0.25][..dim], 0.3));
            for axis in 0..dim {
                omega = omega.wedge(&PolyForm::coordinate_differential(dim, axis));
            }
            let omega = FormField::Global(omega);
            let a = omega.integrate(&two_step).unwrap();
            let b = omega.integrate(&direct).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}
