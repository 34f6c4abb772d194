//! Cochains, their Whitney-form realizations, and polynomial form fields.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::chain::Chain;
use crate::complex::{Complex, Refinement};
use crate::error::{Error, Result};
use crate::exterior::{binomial, blade_index, blades, compound_matrix, wedge_sign, MultiVector};
use crate::geometry::Point;
use crate::poly::Poly;

/// A differential form on ℝⁿ with polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyForm {
    dim: usize,
    degree: usize,
    comps: Vec<Poly>,
}

impl PolyForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            degree,
            comps: vec![Poly::zero(dim); binomial(dim, degree)],
        }
    }

    pub fn scalar(p: Poly) -> Self {
        Self {
            dim: p.nvars(),
            degree: 0,
            comps: vec![p],
        }
    }

    /// A constant form from covector components.
    pub fn constant(covector: &MultiVector) -> Self {
        let n = covector.dim();
        Self {
            dim: n,
            degree: covector.degree(),
            comps: covector
                .components()
                .iter()
                .map(|&c| Poly::constant(n, c))
                .collect(),
        }
    }

    pub fn from_components(dim: usize, degree: usize, comps: Vec<Poly>) -> Self {
        assert_eq!(comps.len(), binomial(dim, degree), "component count");
        Self { dim, degree, comps }
    }

    /// `dx_{axis}`.
    pub fn coordinate_differential(dim: usize, axis: usize) -> Self {
        Self::constant(&MultiVector::basis(dim, &[axis]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    /// Largest polynomial degree among the components.
    pub fn poly_degree(&self) -> usize {
        self.comps.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "form degree");
        Self {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|p| p.scale(s)).collect(),
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.mul(p)).collect(),
        }
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zero(n, self.degree + other.degree);
        if self.degree + other.degree > n {
            return out;
        }
        for (i, &a) in blades(n, self.degree).iter().enumerate() {
            if self.comps[i].is_zero() {
                continue;
            }
            for (j, &b) in blades(n, other.degree).iter().enumerate() {
                let s = wedge_sign(a, b);
                if s != 0.0 && !other.comps[j].is_zero() {
                    let idx = blade_index(n, a | b);
                    out.comps[idx] = out.comps[idx].add(&self.comps[i].mul(&other.comps[j]).scale(s));
                }
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zero(n, self.degree + 1);
        if self.degree >= n {
            return out;
        }
        for (i, &b) in blades(n, self.degree).iter().enumerate() {
            for axis in 0..n {
                let s = wedge_sign(1 << axis, b);
                if s == 0.0 {
                    continue;
                }
                let idx = blade_index(n, b | (1 << axis));
                out.comps[idx] = out.comps[idx].add(&self.comps[i].derivative(axis).scale(s));
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> MultiVector {
        MultiVector::from_components(
            self.dim,
            self.degree,
            self.comps.iter().map(|p| p.eval(&x[..self.dim])).collect(),
        )
    }

    /// Pointwise comass, which in dimension ≤ 3 is the Euclidean norm.
    pub fn comass_at(&self, x: &[f64]) -> f64 {
        self.eval(x).norm()
    }

    /// The scalar polynomial `⟨ω(x), ξ⟩`.
    pub fn pair(&self, xi: &MultiVector) -> Poly {
        assert_eq!(xi.degree(), self.degree, "pairing degree");
        self.comps
            .iter()
            .zip(xi.components())
            .fold(Poly::zero(self.dim), |acc, (p, &c)| acc.add(&p.scale(c)))
    }

    /// Polynomial multivector field `ω ⌟ ξ` for a constant multivector ξ,
    /// as components of degree `deg ξ − deg ω`.
    pub fn contract_into(&self, xi: &MultiVector) -> Vec<Poly> {
        let n = self.dim;
        let rest_deg = xi.degree() - self.degree;
        let mut out = vec![Poly::zero(n); binomial(n, rest_deg)];
        for (i, &a) in blades(n, self.degree).iter().enumerate() {
            for (j, &m) in blades(n, xi.degree()).iter().enumerate() {
                if m & a == a && xi.components()[j] != 0.0 {
                    let rest = m & !a;
                    let idx = blade_index(n, rest);
                    out[idx] = out[idx].add(&self.comps[i].scale(wedge_sign(a, rest) * xi.components()[j]));
                }
            }
        }
        out
    }

    /// Exact `∫_σ ⟨ω, ξ⟩ dHᵏ` for the simplex with the given vertices.
    pub fn integrate(&self, points: &[Point], volume: f64, tangent: &MultiVector) -> f64 {
        let pts: Vec<Vec<f64>> = points.iter().map(|p| p[..self.dim].to_vec()).collect();
        self.pair(tangent).integrate_over_simplex(&pts, volume)
    }

    /// Pullback under the affine map `x ↦ a·x + b` from ℝⁿ to ℝᵐ, where
    /// `a` is `m × n` row-major and `self` lives on ℝᵐ.
    pub fn pullback_affine(&self, a: &[Vec<f64>], b: &[f64], source_dim: usize) -> Self {
        let m = self.dim;
        let k = self.degree;
        let composed: Vec<Poly> = self
            .comps
            .iter()
            .map(|p| p.compose_affine(a, b, source_dim))
            .collect();
        let c = compound_matrix(a, m, source_dim, k);
        let comps = (0..binomial(source_dim, k))
            .map(|i| {
                (0..binomial(m, k)).fold(Poly::zero(source_dim), |acc, j| {
                    if c[j][i] == 0.0 {
                        acc
                    } else {
                        acc.add(&composed[j].scale(c[j][i]))
                    }
                })
            })
            .collect();
        Self {
            dim: source_dim,
            degree: k,
            comps,
        }
    }
}

/// Barycentric coordinates of a simplex as affine functions on ℝⁿ, using
/// `G = (EᵀE)⁻¹Eᵀ`, which also handles simplices of lower dimension.
pub fn barycentric_polys(points: &[Point], dim: usize) -> Vec<Poly> {
    let d = points.len() - 1;
    if d == 0 {
        return vec![Poly::constant(dim, 1.0)];
    }
    let e = DMatrix::from_fn(dim, d, |r, c| points[c + 1][r] - points[0][r]);
    let gram = e.transpose() * &e;
    let inv = gram.try_inverse().expect("non-degenerate simplex");
    let g = inv * e.transpose();
    let mut out = Vec::with_capacity(d + 1);
    let mut sum_grad = vec![0.0; dim];
    let mut sum_c = 0.0;
    for j in 0..d {
        let grad: Vec<f64> = (0..dim).map(|r| g[(j, r)]).collect();
        let c = -(0..dim).map(|r| grad[r] * points[0][r]).sum::<f64>();
        for r in 0..dim {
            sum_grad[r] += grad[r];
        }
        sum_c += c;
        out.push(Poly::affine(&grad, c));
    }
    let lambda0 = Poly::affine(&sum_grad.iter().map(|g| -g).collect::<Vec<_>>(), 1.0 - sum_c);
    out.insert(0, lambda0);
    out
}

/// Affine interpolant of vertex values, written as `a₀ + Σ (aⱼ − a₀) λⱼ` so
/// that equal values give an exactly constant form.
fn interpolant(points: &[Point], values: impl Iterator<Item = f64>, dim: usize) -> PolyForm {
    let values: Vec<f64> = values.collect();
    let lambda = barycentric_polys(points, dim);
    let mut grad = vec![0.0; dim];
    let mut c = values[0];
    for (l, &a) in lambda.iter().zip(&values).skip(1) {
        let diff = a - values[0];
        if diff != 0.0 {
            let coeffs = l.affine_coefficients().expect("affine");
            c += diff * coeffs[0];
            for r in 0..dim {
                grad[r] += diff * coeffs[r + 1];
            }
        }
    }
    PolyForm::scalar(Poly::affine(&grad, c))
}

/// Whitney form of the face spanned by `face` (positions into `lambda`),
/// oriented by the order of `face`.
fn whitney_basis(lambda: &[Poly], face: &[usize], dim: usize) -> PolyForm {
    let k = face.len() - 1;
    if k == 0 {
        return PolyForm::scalar(lambda[face[0]].clone());
    }
    let grads: Vec<PolyForm> = face
        .iter()
        .map(|&p| {
            let a = lambda[p].affine_coefficients().expect("affine");
            PolyForm::constant(&MultiVector::vector(&a[1..]))
        })
        .collect();
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    let mut out = PolyForm::zero(dim, k);
    for j in 0..=k {
        let mut w = PolyForm::scalar(lambda[face[j]].clone());
        for (l, g) in grads.iter().enumerate() {
            if l != j {
                w = w.wedge(g);
            }
        }
        let sign = if j % 2 == 0 { fact } else { -fact };
        out = out.add(&w.scale(sign));
    }
    out
}

/// Subsets of `0..=d` of size `k + 1`, ascending.
fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    blades(d + 1, k + 1)
        .into_iter()
        .map(crate::exterior::blade_axes)
        .collect()
}

/// A polynomial form field: either one form on all of ℝⁿ or one form per
/// maximal simplex of a complex.
#[derive(Clone, Debug)]
pub enum FormField {
    Global(PolyForm),
    Piecewise {
        complex: Arc<Complex>,
        degree: usize,
        pieces: BTreeMap<(usize, usize), PolyForm>,
    },
}

impl FormField {
    pub fn degree(&self) -> usize {
        match self {
            FormField::Global(f) => f.degree(),
            FormField::Piecewise { degree, .. } => *degree,
        }
    }

    pub fn complex(&self) -> Option<&Arc<Complex>> {
        match self {
            FormField::Global(_) => None,
            FormField::Piecewise { complex, .. } => Some(complex),
        }
    }

    /// The polynomial form valid on simplex `(k, i)` of `complex`.
    pub fn on_simplex(&self, complex: &Complex, k: usize, i: usize) -> Result<Cow<'_, PolyForm>> {
        match self {
            FormField::Global(f) => Ok(Cow::Borrowed(f)),
            FormField::Piecewise {
                complex: own,
                pieces,
                ..
            } => {
                if own.id() != complex.id() {
                    return Err(Error::ComplexMismatch);
                }
                Ok(Cow::Borrowed(&pieces[&complex.host(k, i)]))
            }
        }
    }

    fn map_pieces(&self, f: impl Fn(&PolyForm) -> PolyForm) -> FormField {
        match self {
            FormField::Global(g) => FormField::Global(f(g)),
            FormField::Piecewise { complex, pieces, .. } => {
                let pieces: BTreeMap<_, _> = pieces.iter().map(|(&k, p)| (k, f(p))).collect();
                let degree = pieces.values().next().map_or(0, PolyForm::degree);
                FormField::Piecewise {
                    complex: complex.clone(),
                    degree,
                    pieces,
                }
            }
        }
    }

    fn combine(
        &self,
        other: &FormField,
        degree: usize,
        f: impl Fn(&PolyForm, &PolyForm) -> PolyForm,
    ) -> Result<FormField> {
        match (self, other) {
            (FormField::Global(a), FormField::Global(b)) => Ok(FormField::Global(f(a, b))),
            (FormField::Piecewise { complex, pieces, .. }, FormField::Global(b)) => {
                Ok(FormField::Piecewise {
                    complex: complex.clone(),
                    degree,
                    pieces: pieces.iter().map(|(&k, a)| (k, f(a, b))).collect(),
                })
            }
            (FormField::Global(a), FormField::Piecewise { complex, pieces, .. }) => {
                Ok(FormField::Piecewise {
                    complex: complex.clone(),
                    degree,
                    pieces: pieces.iter().map(|(&k, b)| (k, f(a, b))).collect(),
                })
            }
            (
                FormField::Piecewise {
                    complex: ca,
                    pieces: pa,
                    ..
                },
                FormField::Piecewise {
                    complex: cb,
                    pieces: pb,
                    ..
                },
            ) => {
                if ca.id() != cb.id() {
                    return Err(Error::ComplexMismatch);
                }
                Ok(FormField::Piecewise {
                    complex: ca.clone(),
                    degree,
                    pieces: pa.iter().map(|(&k, a)| (k, f(a, &pb[&k]))).collect(),
                })
            }
        }
    }

    pub fn add(&self, other: &FormField) -> Result<FormField> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                found: other.degree(),
            });
        }
        self.combine(other, self.degree(), |a, b| a.add(b))
    }

    pub fn scale(&self, s: f64) -> FormField {
        self.map_pieces(|p| p.scale(s))
    }

    pub fn wedge(&self, other: &FormField) -> Result<FormField> {
        let degree = self.degree() + other.degree();
        let n = self.dim();
        if degree > n {
            return Err(Error::DegreeOverflow(degree));
        }
        self.combine(other, degree, |a, b| a.wedge(b))
    }

    /// Piecewise exterior derivative.
    pub fn d(&self) -> FormField {
        match self {
            FormField::Piecewise {
                complex,
                degree,
                pieces,
            } => FormField::Piecewise {
                complex: complex.clone(),
                degree: degree + 1,
                pieces: pieces.iter().map(|(&k, p)| (k, p.d())).collect(),
            },
            FormField::Global(g) => FormField::Global(g.d()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FormField::Global(f) => f.dim(),
            FormField::Piecewise { complex, .. } => complex.dim(),
        }
    }

    /// The same field on the fine complex of a refinement.
    pub fn on_refinement(&self, r: &Refinement) -> Result<FormField> {
        match self {
            FormField::Global(_) => Ok(self.clone()),
            FormField::Piecewise {
                complex,
                degree,
                pieces,
            } => {
                if complex.id() != r.coarse.id() {
                    return Err(Error::ComplexMismatch);
                }
                let fine = &r.fine;
                let mut out = BTreeMap::new();
                for (d, j) in fine.maximal_simplices() {
                    let (pd, pi) = r.parent[d][j];
                    out.insert((d, j), pieces[&complex.host(pd, pi)].clone());
                }
                Ok(FormField::Piecewise {
                    complex: fine.clone(),
                    degree: *degree,
                    pieces: out,
                })
            }
        }
    }

    /// `∫_T ω` for a chain of the field's degree.
    pub fn integrate(&self, t: &Chain) -> Result<f64> {
        if t.degree() != self.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                found: t.degree(),
            });
        }
        let c = t.complex();
        let k = t.degree();
        let mut total = 0.0;
        for (i, a) in t.iter() {
            let form = self.on_simplex(c, k, i)?;
            total += a * form.integrate(&c.points(k, i), c.volume(k, i), &c.unit_tangent(k, i)?);
        }
        Ok(total)
    }

    /// Supremum of the pointwise comass over sample points of every piece:
    /// the vertices, plus a barycentric lattice when components are not affine.
    pub fn sup_comass(&self, samples: &[(usize, usize)], complex: &Complex) -> Result<f64> {
        let mut best: f64 = 0.0;
        for &(k, i) in samples {
            let form = self.on_simplex(complex, k, i)?;
            let pts = complex.points(k, i);
            for x in sample_points(&pts, if form.poly_degree() <= 1 { 0 } else { 4 }) {
                best = best.max(form.comass_at(&x));
            }
        }
        Ok(best)
    }
}

/// Vertices, and for `m > 0` all points of the barycentric lattice with
/// denominator `m`.
pub fn sample_points(points: &[Point], m: usize) -> Vec<Point> {
    if m == 0 {
        return points.to_vec();
    }
    let k = points.len() - 1;
    let mut out = Vec::new();
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=left {
            cur.push(a);
            rec(left - a, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut combos = Vec::new();
    rec(m, k + 1, &mut Vec::new(), &mut combos);
    for c in combos {
        let mut p = [0.0; 3];
        for (j, &w) in c.iter().enumerate() {
            for a in 0..3 {
                p[a] += points[j][a] * w as f64 / m as f64;
            }
        }
        out.push(p);
    }
    out
}

/// A real k-cochain: one coefficient per k-simplex.
#[derive(Clone, Debug)]
pub struct Cochain {
    complex: Arc<Complex>,
    degree: usize,
    coeffs: Vec<f64>,
}

impl Cochain {
    pub fn new(complex: &Arc<Complex>, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if degree > complex.dim() {
            return Err(Error::DegreeMismatch {
                expected: complex.dim(),
                found: degree,
            });
        }
        if coeffs.len() != complex.count(degree) {
            return Err(Error::InvalidArgument(format!(
                "{}-cochain needs {} coefficients, got {}",
                degree,
                complex.count(degree),
                coeffs.len()
            )));
        }
        Ok(Self {
            complex: complex.clone(),
            degree,
            coeffs,
        })
    }

    pub fn zero(complex: &Arc<Complex>, degree: usize) -> Self {
        Self {
            complex: complex.clone(),
            degree,
            coeffs: vec![0.0; complex.count(degree)],
        }
    }

    pub fn elementary(complex: &Arc<Complex>, degree: usize, index: usize) -> Result<Self> {
        complex.check_index(degree, index)?;
        let mut c = Self::zero(complex, degree);
        c.coeffs[index] = 1.0;
        Ok(c)
    }

    /// The cochain `σ ↦ ∫_σ ω` of a form that is smooth on the whole complex.
    pub fn from_form(complex: &Arc<Complex>, form: &FormField) -> Result<Self> {
        let k = form.degree();
        let coeffs = (0..complex.count(k))
            .map(|i| form.integrate(&Chain::elementary(complex, k, i)?))
            .collect::<Result<Vec<f64>>>()?;
        Self::new(complex, k, coeffs)
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        if self.complex.id() != other.complex.id() {
            return Err(Error::ComplexMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(Cochain {
            complex: self.complex.clone(),
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Cochain {
        Cochain {
            complex: self.complex.clone(),
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    /// `X(T) = Σ tᵢ Xᵢ`.
    pub fn evaluate(&self, t: &Chain) -> Result<f64> {
        if t.complex().id() != self.complex.id() {
            return Err(Error::ComplexMismatch);
        }
        if t.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: t.degree(),
            });
        }
        Ok(t.iter().map(|(i, a)| a * self.coeffs[i]).sum())
    }

    pub fn coboundary(&self) -> Result<Cochain> {
        let k = self.degree;
        if k >= self.complex.dim() {
            return Err(Error::TopDegree(k));
        }
        let coeffs = (0..self.complex.count(k + 1))
            .map(|j| {
                self.complex
                    .faces(k + 1, j)
                    .iter()
                    .map(|&(f, s)| s * self.coeffs[f])
                    .sum()
            })
            .collect();
        Ok(Cochain {
            complex: self.complex.clone(),
            degree: k + 1,
            coeffs,
        })
    }

    /// The lowest-order Whitney form with these coefficients.
    pub fn whitney(&self) -> FormField {
        let c = &self.complex;
        let n = c.dim();
        let k = self.degree;
        let mut pieces = BTreeMap::new();
        for (d, h) in c.maximal_simplices() {
            let tuple = c.simplex(d, h);
            let mut form = PolyForm::zero(n, k);
            if k == 0 {
                form = interpolant(&c.points(d, h), tuple.iter().map(|&v| self.coeffs[v]), n);
            } else if k <= d {
                let lambda = barycentric_polys(&c.points(d, h), n);
                for face in subsets(d, k) {
                    let verts: Vec<usize> = face.iter().map(|&p| tuple[p]).collect();
                    let (idx, sign) = c.find_simplex(&verts).expect("face of a simplex");
                    let a = self.coeffs[idx] * sign;
                    if a != 0.0 {
                        form = form.add(&whitney_basis(&lambda, &face, n).scale(a));
                    }
                }
            }
            pieces.insert((d, h), form);
        }
        FormField::Piecewise {
            complex: c.clone(),
            degree: k,
            pieces,
        }
    }

    /// `X ∧ ω` through the Whitney realization of `X`.
    pub fn wedge(&self, omega: &FormField) -> Result<FormField> {
        self.whitney().wedge(omega)
    }

    /// `max{ sup |D_X|, sup |d D_X| }`; exact because both are affine on
    /// every simplex and the comass is a norm.
    pub fn flat_norm(&self) -> f64 {
        let c = &self.complex;
        let w = self.whitney();
        let dw = w.d();
        let hosts = c.maximal_simplices();
        let a = w.sup_comass(&hosts, c).expect("own complex");
        let b = dw.sup_comass(&hosts, c).expect("own complex");
        a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshes;
    use crate::random;
    use proptest::prelude::*;
    use rand::Rng;

    fn dx(dim: usize) -> FormField {
        FormField::Global(PolyForm::coordinate_differential(dim, 0))
    }

    fn random_cochain(rng: &mut random::CampaignRng, c: &Arc<Complex>, k: usize) -> Cochain {
        let coeffs = (0..c.count(k)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Cochain::new(c, k, coeffs).unwrap()
    }

    fn random_affine_form(rng: &mut random::CampaignRng, n: usize, k: usize) -> PolyForm {
        let comps = (0..binomial(n, k))
            .map(|_| {
                let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                Poly::affine(&a, rng.gen_range(-1.0..1.0))
            })
            .collect();
        PolyForm::from_components(n, k, comps)
    }

    #[test]
    fn whitney_of_dx_cochain_is_dx() {
        let g = meshes::grid(3, 2, [0.0, 0.0], [1.0, 1.0]);
        let x = Cochain::from_form(&g, &dx(2)).unwrap();
        // Horizontal edges of length 1/3 carry ±1/3, the rest vanish or are diagonal.
        let w = x.whitney();
        for (d, h) in g.maximal_simplices() {
            let f = w.on_simplex(&g, d, h).unwrap();
            for p in g.points(d, h) {
                let v = f.eval(&p);
                assert!((v.components()[0] - 1.0).abs() < 1e-12);
                assert!(v.components()[1].abs() < 1e-12);
            }
        }
        assert!((x.flat_norm() - 1.0).abs() < 1e-12);
        assert_eq!(Cochain::zero(&g, 1).flat_norm(), 0.0);
        assert!(Cochain::zero(&g, 1).whitney().sup_comass(&g.maximal_simplices(), &g).unwrap() == 0.0);
    }

    #[test]
    fn whitney_duality() {
        let c = meshes::cube_grid(1, 1.0);
        for k in 0..=3 {
            for e in 0..c.count(k) {
                let x = Cochain::elementary(&c, k, e).unwrap();
                let w = x.whitney();
                for j in 0..c.count(k) {
                    let v = w.integrate(&Chain::elementary(&c, k, j).unwrap()).unwrap();
                    let expect = if j == e { 1.0 } else { 0.0 };
                    assert!((v - expect).abs() < 1e-12, "k={k} e={e} j={j} v={v}");
                }
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let sq = meshes::unit_square();
        let x = Cochain::from_form(&sq, &dx(2)).unwrap();
        let (e, s) = sq.find_simplex(&[0, 1]).unwrap();
        assert!((x.evaluate(&Chain::new(&sq, 1, [(e, s)]).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        let a = Chain::new(&sq, 2, [(0, 1.0), (1, 1.0)]).unwrap();
        assert!(x.evaluate(&a.boundary().unwrap()).unwrap().abs() < 1e-15);
        assert!(x.coboundary().unwrap().coefficients().iter().all(|v| v.abs() < 1e-15));
        assert_eq!(
            x.evaluate(&a).unwrap_err(),
            Error::DegreeMismatch {
                expected: 1,
                found: 2
            }
        );
        let top = Cochain::zero(&sq, 2);
        assert_eq!(top.coboundary().unwrap_err(), Error::TopDegree(2));
    }

    #[test]
    fn discrete_gradient() {
        let sq = meshes::unit_square();
        let f = Cochain::new(&sq, 0, vec![0.0, 1.0, 3.0, 7.0]).unwrap();
        let df = f.coboundary().unwrap();
        for i in 0..sq.count(1) {
            let t = sq.simplex(1, i);
            assert_eq!(df.coefficients()[i], f.coefficients()[t[1]] - f.coefficients()[t[0]]);
        }
    }

    #[test]
    fn wedge_examples() {
        let sq = meshes::unit_square();
        let x = Cochain::from_form(&sq, &dx(2)).unwrap();
        let dy = FormField::Global(PolyForm::coordinate_differential(2, 1));
        let a = Chain::new(&sq, 2, [(0, 1.0), (1, 1.0)]).unwrap();
        assert!((x.wedge(&dy).unwrap().integrate(&a).unwrap() - 1.0).abs() < 1e-14);
        let zero = FormField::Global(PolyForm::zero(2, 1));
        assert!(x.wedge(&zero).unwrap().integrate(&a).unwrap() == 0.0);
        let two = FormField::Global(PolyForm::zero(2, 2));
        assert_eq!(x.wedge(&two).unwrap_err(), Error::DegreeOverflow(3));
    }

    #[test]
    fn pullback_of_area_form_under_scaling() {
        let area = PolyForm::constant(&MultiVector::volume_element(2));
        let a = vec![vec![2.0, 0.0], vec![0.0, 2.0]];
        let p = area.pullback_affine(&a, &[0.0, 0.0], 2);
        assert_eq!(p.eval(&[0.3, 0.1]).components(), &[4.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn coboundary_is_adjoint_to_boundary(seed in any::<u64>(), dim in 1usize..=3) {
            let mut rng = random::rng(seed);
            let c = random::mesh(&mut rng, dim);
            for k in 0..dim {
                let x = random_cochain(&mut rng, &c, k);
                let a = random::chain(&mut rng, &c, k + 1, 0.5);
                let lhs = x.coboundary().unwrap().evaluate(&a).unwrap();
                let rhs = x.evaluate(&a.boundary().unwrap()).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-10);
                if k + 1 < dim {
                    let dd = x.coboundary().unwrap().coboundary().unwrap();
                    prop_assert!(dd.coefficients().iter().all(|v| v.abs() <= 1e-12));
                }
            }
        }

        #[test]
        fn pairing_matches_whitney_integration(seed in any::<u64>(), dim in 1usize..=3) {
            let mut rng = random::rng(seed);
            let c = random::mesh(&mut rng, dim);
            let k = rng.gen_range(0..=dim);
            let x = random_cochain(&mut rng, &c, k);
            let t = random::chain(&mut rng, &c, k, 0.6);
            let exact = x.whitney().integrate(&t).unwrap();
            prop_assert!((exact - x.evaluate(&t).unwrap()).abs() <= 1e-10);
        }

        #[test]
        fn leibniz_rule_and_wedge_comass(seed in any::<u64>(), dim in 2usize..=3) {
            let mut rng = random::rng(seed);
            let c = random::mesh(&mut rng, dim);
            let k = rng.gen_range(0..dim);
            let r = rng.gen_range(0..dim - k);
            let x = random_cochain(&mut rng, &c, k);
            let phi = x.whitney();
            let omega = FormField::Global(random_affine_form(&mut rng, dim, r));
            let lhs = phi.wedge(&omega).unwrap().d();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = phi.d().wedge(&omega).unwrap().add(&phi.wedge(&omega.d()).unwrap().scale(sign)).unwrap();
            let hosts = c.maximal_simplices();
            for &(d, h) in &hosts {
                let l = lhs.on_simplex(&c, d, h).unwrap();
                let rr = rhs.on_simplex(&c, d, h).unwrap();
                for p in sample_points(&c.points(d, h), 3) {
                    let diff = l.eval(&p).add(&rr.eval(&p).scale(-1.0)).norm();
                    prop_assert!(diff <= 1e-9);
                }
            }
            let wedge = phi.wedge(&omega).unwrap();
            let bound = binomial(k + r, k) as f64
                * phi.sup_comass(&hosts, &c).unwrap()
                * omega.sup_comass(&hosts, &c).unwrap();
            prop_assert!(wedge.sup_comass(&hosts, &c).unwrap() <= bound + 1e-9);
        }

        #[test]
        fn cochain_duality_with_flat_norm(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let c = random::mesh(&mut rng, 2);
            let x = random_cochain(&mut rng, &c, 1);
            let a = random::chain(&mut rng, &c, 1, 0.5);
            let f = crate::flat::flat_norm(&a, &c).unwrap().value;
            prop_assert!(x.evaluate(&a).unwrap().abs() <= x.flat_norm() * f + 1e-8);
        }
    }
}
