//! Real polyhedral chains on a fixed complex.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::complex::{Complex, Refinement};
use crate::error::{Error, Result};
use crate::geometry::{self, HalfSpace};

/// A k-chain: sparse real coefficients on the k-simplices of one complex.
#[derive(Clone, Debug)]
pub struct Chain {
    complex: Arc<Complex>,
    degree: usize,
    coeffs: BTreeMap<usize, f64>,
}

impl PartialEq for Chain {
    fn eq(&self, other: &Self) -> bool {
        self.complex.id() == other.complex.id()
            && self.degree == other.degree
            && self.coeffs == other.coeffs
    }
}

impl Chain {
    pub fn zero(complex: &Arc<Complex>, degree: usize) -> Self {
        Self {
            complex: complex.clone(),
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// Sums repeated indices; rejects indices outside the complex.
    pub fn new(
        complex: &Arc<Complex>,
        degree: usize,
        coeffs: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Self> {
        if degree > complex.dim() {
            return Err(Error::DegreeMismatch {
                expected: complex.dim(),
                found: degree,
            });
        }
        let mut c = Self::zero(complex, degree);
        for (i, a) in coeffs {
            complex.check_index(degree, i)?;
            c.accumulate(i, a);
        }
        Ok(c)
    }

    pub(crate) fn from_raw(
        complex: &Arc<Complex>,
        degree: usize,
        coeffs: impl IntoIterator<Item = (usize, f64)>,
    ) -> Self {
        let mut c = Self::zero(complex, degree);
        for (i, a) in coeffs {
            c.accumulate(i, a);
        }
        c
    }

    /// The chain `1·σ` for a single simplex.
    pub fn elementary(complex: &Arc<Complex>, degree: usize, index: usize) -> Result<Self> {
        Self::new(complex, degree, [(index, 1.0)])
    }

    fn accumulate(&mut self, i: usize, a: f64) {
        if a == 0.0 {
            return;
        }
        let v = self.coeffs.entry(i).or_insert(0.0);
        *v += a;
        if *v == 0.0 {
            self.coeffs.remove(&i);
        }
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, f64> {
        &self.coeffs
    }

    pub fn coefficient(&self, i: usize) -> f64 {
        self.coeffs.get(&i).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().map(|(&i, &a)| (i, a))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn same_complex(&self, other: &Chain) -> bool {
        self.complex.id() == other.complex.id()
    }

    fn compatible(&self, other: &Chain) -> Result<()> {
        if !self.same_complex(other) {
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

    pub fn add(&self, other: &Chain) -> Result<Chain> {
        self.compatible(other)?;
        let mut c = self.clone();
        for (i, a) in other.iter() {
            c.accumulate(i, a);
        }
        Ok(c)
    }

    pub fn sub(&self, other: &Chain) -> Result<Chain> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Chain {
        Chain::from_raw(&self.complex, self.degree, self.iter().map(|(i, a)| (i, s * a)))
    }

    pub fn boundary(&self) -> Result<Chain> {
        if self.degree == 0 {
            return Err(Error::DegreeZero);
        }
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, a) in self.iter() {
            for &(f, s) in self.complex.faces(self.degree, i) {
                *acc.entry(f).or_insert(0.0) += s * a;
            }
        }
        Ok(Chain::from_raw(&self.complex, self.degree - 1, acc))
    }

    /// Σ |aᵢ| vol(σᵢ).
    pub fn mass(&self) -> f64 {
        self.iter()
            .map(|(i, a)| a.abs() * self.complex.volume(self.degree, i))
            .sum()
    }

    pub fn normal_norm(&self) -> Result<f64> {
        Ok(self.mass() + self.boundary()?.mass())
    }

    /// Indices of simplices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    /// Largest coefficientwise difference.
    pub fn max_deviation(&self, other: &Chain) -> Result<f64> {
        Ok(self
            .sub(other)?
            .iter()
            .map(|(_, a)| a.abs())
            .fold(0.0, f64::max))
    }

    /// The same chain written on the fine complex of `r`.
    pub fn refine(&self, r: &Refinement) -> Result<Chain> {
        if r.coarse.id() != self.complex.id() {
            return Err(Error::ComplexMismatch);
        }
        Ok(Chain::from_raw(
            &r.fine,
            self.degree,
            r.refine_coefficients(self.degree, self.iter()),
        ))
    }

    /// Moves the chain onto another complex containing all its simplices.
    pub fn transfer(&self, target: &Arc<Complex>) -> Result<Chain> {
        if target.id() == self.complex.id() {
            return Ok(self.clone());
        }
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (i, a) in self.iter() {
            let (j, s) = self
                .complex
                .transfer(self.degree, i, target)
                .ok_or(Error::AmbientTooSmall {
                    degree: self.degree,
                })?;
            out.push((j, s * a));
        }
        Ok(Chain::from_raw(target, self.degree, out))
    }

    fn keep_side(&self, h: &HalfSpace, closed: bool) -> Chain {
        let c = &self.complex;
        let kept = self.iter().filter(|&(i, _)| {
            let p = c.points(self.degree, i);
            let scale = p.iter().map(geometry::norm).fold(1.0, f64::max);
            let d = h.signed_distance(&geometry::centroid(&p));
            let tol = 1e-9 * scale;
            if closed {
                d >= -tol
            } else {
                d < -tol
            }
        });
        Chain::from_raw(c, self.degree, kept.collect::<Vec<_>>())
    }

    /// Restriction to the closed half-space, on a complex split along its
    /// bounding hyperplane.
    pub fn restrict(&self, h: &HalfSpace) -> Result<Chain> {
        let r = self.complex.split_by_hyperplanes(std::slice::from_ref(h))?;
        Ok(self.refine(&r)?.keep_side(h, true))
    }

    /// Restriction to the open complement of the half-space.
    pub fn restrict_complement(&self, h: &HalfSpace) -> Result<Chain> {
        let r = self.complex.split_by_hyperplanes(std::slice::from_ref(h))?;
        Ok(self.refine(&r)?.keep_side(h, false))
    }

    /// Restriction to a closed half-space of a chain whose complex already
    /// has no simplex crossing its hyperplane.
    pub fn restrict_split(&self, h: &HalfSpace) -> Chain {
        self.keep_side(h, true)
    }

    /// M(∂A↾H − ∂(A↾H)).
    pub fn restriction_defect(&self, h: &HalfSpace) -> Result<f64> {
        if self.degree == 0 {
            return Err(Error::DegreeZero);
        }
        let r = self.complex.split_by_hyperplanes(std::slice::from_ref(h))?;
        let fine = self.refine(&r)?;
        let a = fine.boundary()?.keep_side(h, true);
        let b = fine.keep_side(h, true).boundary()?;
        Ok(a.sub(&b)?.mass())
    }
}
