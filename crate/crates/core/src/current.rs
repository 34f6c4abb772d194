//! Currents with polynomial densities on the simplices of a complex.
//!
//! A term `t · (P ⌟ σ)` acts on a form ω by `t ∫_σ ⟨P ∧ ω, τ_σ⟩`, where τ_σ is
//! the unit tangent of σ and P is a polynomial p-form. The current has degree
//! `dim σ − p`. Interior products with cochains, products with sharp
//! functions and their boundaries are all finite sums of such terms.

use std::collections::{BTreeMap, BinaryHeap};
use std::sync::Arc;

use serde::Serialize;

use crate::chain::Chain;
use crate::complex::{Complex, Refinement};
use crate::error::{Error, Result};
use crate::forms::{Cochain, FormField, PolyForm};
use crate::geometry::{self, HalfSpace, Point};
use crate::poly::Poly;

/// Piece budget for the adaptive mass quadrature, per carrier.
const MASS_PIECES: usize = 20_000;

#[derive(Clone, Debug)]
pub struct Term {
    /// `(degree, index)` of the carrier simplex.
    pub carrier: (usize, usize),
    pub coefficient: f64,
    pub prefactor: PolyForm,
}

#[derive(Clone, Debug)]
pub struct Current {
    complex: Arc<Complex>,
    degree: usize,
    terms: Vec<Term>,
}

/// Mass of a current. `error_bound` is zero when `exact`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MassReport {
    pub value: f64,
    pub exact: bool,
    pub error_bound: f64,
}

/// A simplicial chain approximating a current of full carrier degree.
#[derive(Clone, Debug)]
pub struct Materialized {
    pub chain: Chain,
    pub refinement: Refinement,
    pub levels: usize,
    /// Largest oscillation of a density over a fine simplex, relative to the
    /// largest absolute density.
    pub oscillation: f64,
    /// Upper bound on the mass of the difference between current and chain.
    pub error_bound: f64,
}

impl Current {
    pub fn zero(complex: &Arc<Complex>, degree: usize) -> Self {
        Self {
            complex: complex.clone(),
            degree,
            terms: Vec::new(),
        }
    }

    pub fn from_chain(t: &Chain) -> Self {
        let n = t.complex().dim();
        let k = t.degree();
        Self {
            complex: t.complex().clone(),
            degree: k,
            terms: t
                .iter()
                .map(|(i, a)| Term {
                    carrier: (k, i),
                    coefficient: a,
                    prefactor: PolyForm::scalar(Poly::constant(n, 1.0)),
                })
                .collect(),
        }
    }

    /// `P ⌟ T`, with the prefactor read from the field on each carrier.
    pub fn weighted(t: &Chain, field: &FormField) -> Result<Self> {
        let c = t.complex();
        let k = t.degree();
        let p = field.degree();
        if p > k {
            return Err(Error::DegreeMismatch {
                expected: k,
                found: p,
            });
        }
        let mut terms = Vec::new();
        for (i, a) in t.iter() {
            let prefactor = field.on_simplex(c, k, i)?.into_owned();
            if !prefactor.is_zero() {
                terms.push(Term {
                    carrier: (k, i),
                    coefficient: a,
                    prefactor,
                });
            }
        }
        Ok(Self {
            complex: c.clone(),
            degree: k - p,
            terms,
        })
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn compatible(&self, other: &Current) -> Result<()> {
        if self.complex.id() != other.complex.id() {
            return Err(Error::ComplexMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Current) -> Result<Current> {
        self.compatible(other)?;
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn sub(&self, other: &Current) -> Result<Current> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Current {
        let mut out = self.clone();
        if s == 0.0 {
            out.terms.clear();
        }
        for t in &mut out.terms {
            t.coefficient *= s;
        }
        out
    }

    /// Merges the terms on each carrier into one, dropping those that cancel.
    pub fn compact(&self) -> Current {
        let mut merged: BTreeMap<(usize, usize), PolyForm> = BTreeMap::new();
        for t in &self.terms {
            let p = t.prefactor.scale(t.coefficient);
            match merged.get_mut(&t.carrier) {
                Some(acc) => *acc = acc.add(&p),
                None => {
                    merged.insert(t.carrier, p);
                }
            }
        }
        Current {
            complex: self.complex.clone(),
            degree: self.degree,
            terms: merged
                .into_iter()
                .filter(|(_, p)| !p.is_zero())
                .map(|(carrier, prefactor)| Term {
                    carrier,
                    coefficient: 1.0,
                    prefactor,
                })
                .collect(),
        }
    }

    /// `T(ω)`, exact up to rounding.
    pub fn evaluate(&self, omega: &FormField) -> Result<f64> {
        if omega.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: omega.degree(),
            });
        }
        let c = &self.complex;
        let mut total = 0.0;
        for t in &self.terms {
            let (k, i) = t.carrier;
            let w = omega.on_simplex(c, k, i)?;
            let integrand = t.prefactor.wedge(&w);
            total += t.coefficient * integrand.integrate(&c.points(k, i), c.volume(k, i), &c.unit_tangent(k, i)?);
        }
        Ok(total)
    }

    /// Boundary as an explicit sum of terms, from
    /// `∂(P ⌟ σ) = (−1)ᵖ (P ⌟ ∂σ − dP ⌟ σ)`.
    pub fn boundary(&self) -> Result<Current> {
        if self.degree == 0 {
            return Err(Error::DegreeZero);
        }
        let c = &self.complex;
        let mut terms = Vec::new();
        for t in &self.terms {
            let (k, i) = t.carrier;
            let p = t.prefactor.degree();
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            for &(f, s) in c.faces(k, i) {
                terms.push(Term {
                    carrier: (k - 1, f),
                    coefficient: sign * s * t.coefficient,
                    prefactor: t.prefactor.clone(),
                });
            }
            let dp = t.prefactor.d();
            if !dp.is_zero() {
                terms.push(Term {
                    carrier: (k, i),
                    coefficient: -sign * t.coefficient,
                    prefactor: dp,
                });
            }
        }
        Ok(Current {
            complex: c.clone(),
            degree: self.degree - 1,
            terms,
        })
    }

    /// Polynomial multivector density on each carrier, as components.
    fn densities(&self) -> Result<BTreeMap<(usize, usize), Vec<Poly>>> {
        let c = &self.complex;
        let mut out: BTreeMap<(usize, usize), Vec<Poly>> = BTreeMap::new();
        for t in &self.terms {
            let (k, i) = t.carrier;
            let comps: Vec<Poly> = t
                .prefactor
                .contract_into(&c.unit_tangent(k, i)?)
                .into_iter()
                .map(|p| p.scale(t.coefficient))
                .collect();
            match out.get_mut(&t.carrier) {
                Some(acc) => {
                    for (a, b) in acc.iter_mut().zip(comps) {
                        *a = a.add(&b);
                    }
                }
                None => {
                    out.insert(t.carrier, comps);
                }
            }
        }
        Ok(out)
    }

    /// Mass. Every multivector of the relevant degrees in dimension ≤ 3 is
    /// simple, so the mass density is the Euclidean norm of the density.
    /// A density `f·η` with `f` affine and η constant integrates exactly after
    /// cutting the carrier along `f = 0`; other affine densities are bracketed
    /// by convexity and bisected until the bracket is tight.
    pub fn mass(&self) -> Result<MassReport> {
        let c = &self.complex;
        let mut value = 0.0;
        let mut error = 0.0;
        let mut exact = true;
        for ((k, i), comps) in self.densities()? {
            let pts = c.points(k, i);
            let vol = c.volume(k, i);
            let n = c.dim();
            if comps.iter().all(|p| p.degree() <= 1) {
                if let Some(m) = rank_one_mass(&comps, &pts, vol, n) {
                    value += m;
                    continue;
                }
                let (lo, hi) = bracket_affine_norm(&comps, pts, n, 1e-6);
                value += 0.5 * (lo + hi);
                error += 0.5 * (hi - lo);
            } else {
                let (v, e) = quadrature_norm(&comps, pts, n);
                value += v;
                error += e;
            }
            exact = false;
        }
        Ok(MassReport {
            value,
            exact,
            error_bound: error,
        })
    }

    /// Simplicial chain on an iterated barycentric subdivision, with each
    /// fine coefficient the average of the density over that piece. Only
    /// scalar densities carried in the current's own degree qualify.
    pub fn materialize(&self, max_levels: usize, tol: f64) -> Result<Materialized> {
        let k = self.degree;
        if let Some(t) = self
            .terms
            .iter()
            .find(|t| t.carrier.0 != k || t.prefactor.degree() != 0)
        {
            return Err(Error::NotMaterializable(format!(
                "term on a {}-simplex with a {}-form prefactor",
                t.carrier.0,
                t.prefactor.degree()
            )));
        }
        let n = self.complex.dim();
        let mut refinement = Refinement::identity(&self.complex);
        let mut levels = 0;
        loop {
            let fine = refinement.fine.clone();
            let mut coeffs: BTreeMap<usize, f64> = BTreeMap::new();
            let mut peak: f64 = 0.0;
            let mut worst_osc: f64 = 0.0;
            let mut error = 0.0;
            for t in &self.terms {
                let p = &t.prefactor.components()[0];
                for &(j, s) in &refinement.pieces[k][t.carrier.1] {
                    let pts = fine.points(k, j);
                    let vol = fine.volume(k, j);
                    let rows: Vec<Vec<f64>> = pts.iter().map(|q| q[..n].to_vec()).collect();
                    let avg = if vol > 0.0 {
                        p.integrate_over_simplex(&rows, vol) / vol
                    } else {
                        p.eval(&rows[0])
                    };
                    *coeffs.entry(j).or_insert(0.0) += t.coefficient * s * avg;
                    let vals: Vec<f64> = lattice_values(p, &pts, n);
                    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    peak = peak.max(lo.abs()).max(hi.abs());
                    worst_osc = worst_osc.max(hi - lo);
                    error += t.coefficient.abs() * (hi - lo) * vol;
                }
            }
            let oscillation = if peak > 0.0 { worst_osc / peak } else { 0.0 };
            if oscillation <= tol || levels >= max_levels {
                let chain = Chain::new(&fine, k, coeffs)?;
                return Ok(Materialized {
                    chain,
                    refinement,
                    levels,
                    oscillation,
                    error_bound: error,
                });
            }
            refinement = refinement.then(&fine.barycentric_refinement());
            levels += 1;
        }
    }

    /// Carriers with a nonzero density.
    pub fn support(&self) -> Result<Vec<(usize, usize)>> {
        Ok(self
            .densities()?
            .into_iter()
            .filter(|(_, comps)| comps.iter().any(|p| !p.is_zero()))
            .map(|(key, _)| key)
            .collect())
    }
}

/// `X ⌟ T`, acting by `(X ⌟ T)(ω) = (X ∧ ω)(T)`.
pub fn interior_product(x: &Cochain, t: &Chain) -> Result<Current> {
    if x.complex().id() != t.complex().id() {
        return Err(Error::ComplexMismatch);
    }
    if x.degree() > t.degree() {
        return Err(Error::DegreeMismatch {
            expected: t.degree(),
            found: x.degree(),
        });
    }
    Current::weighted(t, &x.whitney())
}

fn eval_components(comps: &[Poly], x: &Point, n: usize) -> Vec<f64> {
    comps.iter().map(|p| p.eval(&x[..n])).collect()
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Exact mass when the affine density is a multiple of one constant
/// multivector on the simplex.
fn rank_one_mass(comps: &[Poly], pts: &[Point], vol: f64, n: usize) -> Option<f64> {
    let vals: Vec<Vec<f64>> = pts.iter().map(|p| eval_components(comps, p, n)).collect();
    let scale = vals.iter().map(|v| euclid(v)).fold(0.0, f64::max);
    if scale == 0.0 {
        return Some(0.0);
    }
    let eta: Vec<f64> = vals
        .iter()
        .max_by(|a, b| euclid(a).total_cmp(&euclid(b)))
        .expect("nonempty")
        .iter()
        .map(|a| a / scale)
        .collect();
    // f at each vertex; reject if some value leaves the line through η.
    let mut f = Vec::with_capacity(vals.len());
    for v in &vals {
        let a: f64 = v.iter().zip(&eta).map(|(x, e)| x * e).sum();
        let resid = euclid(&v.iter().zip(&eta).map(|(x, e)| x - a * e).collect::<Vec<_>>());
        if resid > 1e-12 * scale {
            return None;
        }
        f.push(a);
    }
    Some(integrate_abs_affine(pts, &f, vol, n))
}

/// `∫_σ |f|` for f affine with the given vertex values.
fn integrate_abs_affine(pts: &[Point], f: &[f64], vol: f64, n: usize) -> f64 {
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    if f.iter().all(|&a| a >= 0.0) || f.iter().all(|&a| a <= 0.0) {
        return vol * mean(f).abs();
    }
    // Recover f on ℝⁿ restricted to the affine hull, as g·x + c.
    let lambda = crate::forms::barycentric_polys(pts, n);
    let poly = lambda
        .iter()
        .zip(f)
        .fold(Poly::zero(n), |acc, (l, &a)| acc.add(&l.scale(a)));
    let coeffs = poly.affine_coefficients().expect("affine");
    let grad = &coeffs[1..];
    if euclid(grad) == 0.0 {
        return vol * coeffs[0].abs();
    }
    let h = HalfSpace::new(grad, -coeffs[0]);
    let mut total = 0.0;
    for (side, sign) in [(h.clone(), 1.0), (h.flipped(), -1.0)] {
        for piece in geometry::clip_points(pts, &side) {
            let v = geometry::simplex_volume(&piece);
            let c = geometry::centroid(&piece);
            total += sign * v * poly.eval(&c[..n]);
        }
    }
    total
}

/// Lower and upper bounds on `∫_σ |ξ|` for affine ξ. Convexity of the norm
/// gives `vol·|ξ(centroid)| ≤ ∫ ≤ vol·mean |ξ(vertex)|`; the piece with the
/// widest gap is bisected at its longest edge until the total gap is below
/// `rel_tol` of the upper bound or the piece budget runs out.
fn bracket_affine_norm(comps: &[Poly], pts: Vec<Point>, n: usize, rel_tol: f64) -> (f64, f64) {
    struct Piece {
        gap: f64,
        lo: f64,
        hi: f64,
        pts: Vec<Point>,
    }
    impl PartialEq for Piece {
        fn eq(&self, other: &Self) -> bool {
            self.gap == other.gap
        }
    }
    impl Eq for Piece {}
    impl PartialOrd for Piece {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Piece {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.gap.total_cmp(&other.gap)
        }
    }
    let piece = |p: Vec<Point>| {
        let v = geometry::simplex_volume(&p);
        let lo = v * euclid(&eval_components(comps, &geometry::centroid(&p), n));
        let hi = v * p.iter().map(|q| euclid(&eval_components(comps, q, n))).sum::<f64>() / p.len() as f64;
        Piece {
            gap: hi - lo,
            lo,
            hi,
            pts: p,
        }
    };
    let first = piece(pts);
    let (mut lo, mut hi) = (first.lo, first.hi);
    let mut heap = BinaryHeap::from([first]);
    while heap.len() < MASS_PIECES && hi - lo > rel_tol * hi {
        let worst = heap.pop().expect("nonempty");
        let (x, y) = bisect(&worst.pts);
        let (x, y) = (piece(x), piece(y));
        lo += x.lo + y.lo - worst.lo;
        hi += x.hi + y.hi - worst.hi;
        heap.push(x);
        heap.push(y);
    }
    // Recompute the sums to shed accumulated rounding.
    heap.iter().fold((0.0, 0.0), |(a, b), p| (a + p.lo, b + p.hi))
}

/// Centroid rule on a fixed bisection depth, for densities of higher
/// polynomial degree. The error estimate compares two depths.
fn quadrature_norm(comps: &[Poly], pts: Vec<Point>, n: usize) -> (f64, f64) {
    let rule = |depth: usize| {
        let mut level = vec![pts.clone()];
        for _ in 0..depth {
            level = level
                .iter()
                .flat_map(|p| {
                    let (a, b) = bisect(p);
                    [a, b]
                })
                .collect();
        }
        level
            .iter()
            .map(|p| geometry::simplex_volume(p) * euclid(&eval_components(comps, &geometry::centroid(p), n)))
            .sum::<f64>()
    };
    let depth = 3 * (pts.len() - 1) + 3;
    let coarse = rule(depth - (pts.len() - 1));
    let fine = rule(depth);
    (fine, (fine - coarse).abs())
}

fn bisect(p: &[Point]) -> (Vec<Point>, Vec<Point>) {
    let mut best = (0, 1);
    let mut len = -1.0;
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            let l = geometry::norm(&geometry::sub(&p[a], &p[b]));
            if l > len {
                len = l;
                best = (a, b);
            }
        }
    }
    let m = geometry::lerp(&p[best.0], &p[best.1], 0.5);
    let mut x = p.to_vec();
    let mut y = p.to_vec();
    x[best.1] = m;
    y[best.0] = m;
    (x, y)
}

/// Values at the vertices, or on a finer lattice for nonaffine densities.
fn lattice_values(p: &Poly, pts: &[Point], n: usize) -> Vec<f64> {
    let m = if p.degree() <= 1 { 0 } else { 4 };
    crate::forms::sample_points(pts, m)
        .iter()
        .map(|x| p.eval(&x[..n]))
        .collect()
}
