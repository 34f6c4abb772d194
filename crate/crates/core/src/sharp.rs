//! Piecewise-linear scalar fields and their products with chains.

use std::sync::Arc;

use serde::Serialize;

use crate::chain::Chain;
use crate::complex::Complex;
use crate::current::Current;
use crate::error::{Error, Result};
use crate::flat::flat_norm;
use crate::forms::{barycentric_polys, Cochain, FormField};

/// A continuous scalar field, affine on every simplex, given by its vertex
/// values.
#[derive(Clone, Debug)]
pub struct SharpField {
    complex: Arc<Complex>,
    values: Vec<f64>,
}

/// Slack allowed on both sides of the product-norm inequalities.
pub const PROP_SLACK: f64 = 1e-6;

/// Both sides of the normal- and flat-norm product bounds.
#[derive(Clone, Debug, Serialize)]
pub struct ProductBoundReport {
    /// Degree of the chain.
    pub r: usize,
    pub sup_phi: f64,
    pub lip_phi: f64,
    pub normal_lhs: f64,
    pub normal_rhs: f64,
    /// Whether both masses in `N(φA)` were computed exactly.
    pub normal_exact: bool,
    pub flat_lhs: f64,
    pub flat_rhs: f64,
    /// Mass of the difference between `φA` and the chain whose flat norm is
    /// reported as `flat_lhs`.
    pub flat_error_bound: f64,
    pub materialize_levels: usize,
    pub passed: bool,
}

/// Subdivision depth and oscillation target used when `φA` must become a
/// simplicial chain.
#[derive(Clone, Copy, Debug)]
pub struct MaterializeOptions {
    pub max_levels: usize,
    pub tol: f64,
}

impl Default for MaterializeOptions {
    fn default() -> Self {
        Self {
            max_levels: 2,
            tol: 1e-3,
        }
    }
}

fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + PROP_SLACK * (1.0 + rhs.abs())
}

impl SharpField {
    pub fn new(complex: &Arc<Complex>, values: Vec<f64>) -> Result<Self> {
        if values.len() != complex.num_vertices() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} vertices",
                values.len(),
                complex.num_vertices()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("value at vertex {i} is not finite")));
        }
        Ok(Self {
            complex: complex.clone(),
            values,
        })
    }

    /// Samples `f` at the vertices.
    pub fn from_fn(complex: &Arc<Complex>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..complex.num_vertices()).map(|v| f(complex.vertex_coords(v))).collect();
        Self {
            complex: complex.clone(),
            values,
        }
    }

    pub fn constant(complex: &Arc<Complex>, c: f64) -> Self {
        Self {
            complex: complex.clone(),
            values: vec![c; complex.num_vertices()],
        }
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The field as a piecewise 0-form.
    pub fn form(&self) -> FormField {
        Cochain::new(&self.complex, 0, self.values.clone())
            .expect("one value per vertex")
            .whitney()
    }

    /// Gradient of the affine interpolant on simplex `(k, i)`, tangent to it.
    pub fn gradient(&self, k: usize, i: usize) -> Result<Vec<f64>> {
        self.complex.check_index(k, i)?;
        let n = self.complex.dim();
        let lambda = barycentric_polys(&self.complex.points(k, i), n);
        let mut g = vec![0.0; n];
        for (l, &v) in lambda.iter().zip(self.complex.simplex(k, i)) {
            let a = l.affine_coefficients().expect("affine");
            for (gj, aj) in g.iter_mut().zip(&a[1..]) {
                *gj += self.values[v] * aj;
            }
        }
        Ok(g)
    }

    fn check_region(&self, region: &[(usize, usize)]) -> Result<()> {
        if region.is_empty() {
            return Err(Error::EmptyRegion);
        }
        for &(k, i) in region {
            self.complex.check_index(k, i)?;
        }
        Ok(())
    }

    /// Largest |φ| over the vertices of the region's simplices.
    pub fn sup(&self, region: &[(usize, usize)]) -> Result<f64> {
        self.check_region(region)?;
        Ok(region
            .iter()
            .flat_map(|&(k, i)| self.complex.simplex(k, i).iter().map(|&v| self.values[v].abs()))
            .fold(0.0, f64::max))
    }

    /// Largest gradient norm over the region's simplices.
    pub fn lip(&self, region: &[(usize, usize)]) -> Result<f64> {
        self.check_region(region)?;
        let mut best: f64 = 0.0;
        for &(k, i) in region {
            let g = self.gradient(k, i)?;
            best = best.max(g.iter().map(|a| a * a).sum::<f64>().sqrt());
        }
        Ok(best)
    }

    /// `max{sup |φ|, Lip φ}` over the region.
    pub fn lip_seminorm(&self, region: &[(usize, usize)]) -> Result<f64> {
        Ok(self.sup(region)?.max(self.lip(region)?))
    }

    fn same_complex(&self, a: &Chain) -> Result<()> {
        if a.complex().id() != self.complex.id() {
            return Err(Error::ComplexMismatch);
        }
        Ok(())
    }

    /// `φA`, as a current with density φ on the carriers of A.
    pub fn multiply(&self, a: &Chain) -> Result<Current> {
        self.same_complex(a)?;
        Current::weighted(a, &self.form())
    }

    /// `φ∂A − dφ ⌟ A`.
    pub fn boundary_product(&self, a: &Chain) -> Result<Current> {
        self.same_complex(a)?;
        if a.degree() == 0 {
            return Err(Error::DegreeZero);
        }
        let phi = self.form();
        let first = Current::weighted(&a.boundary()?, &phi)?;
        let second = Current::weighted(a, &phi.d())?;
        first.sub(&second)
    }

    /// Evaluates both sides of
    /// `N(φA) ≤ (sup|φ| + r·Lip φ)·N(A)` and
    /// `F(φA) ≤ (sup|φ| + (r+1)·Lip φ)·F(A)`,
    /// with sup and Lip taken over `region` (all maximal simplices when
    /// `None`). Flat norms are taken on the subdivision that materializes φA.
    pub fn check_product_bounds(
        &self,
        a: &Chain,
        region: Option<&[(usize, usize)]>,
        opts: MaterializeOptions,
    ) -> Result<ProductBoundReport> {
        self.same_complex(a)?;
        let whole = self.complex.maximal_simplices();
        let region = region.unwrap_or(&whole);
        let sup_phi = self.sup(region)?;
        let lip_phi = self.lip(region)?;
        let r = a.degree();

        let pa = self.multiply(a)?;
        let mass_pa = pa.mass()?;
        let (normal_a, bd_pa) = if r == 0 {
            (a.mass(), None)
        } else {
            (a.normal_norm()?, Some(self.boundary_product(a)?.mass()?))
        };
        let normal_lhs = mass_pa.value + bd_pa.map_or(0.0, |m| m.value);
        let normal_exact = mass_pa.exact && bd_pa.is_none_or(|m| m.exact);
        let normal_rhs = (sup_phi + r as f64 * lip_phi) * normal_a;

        let mat = pa.materialize(opts.max_levels, opts.tol)?;
        let fine = &mat.refinement.fine;
        let flat_lhs = flat_norm(&mat.chain, fine)?.value;
        let flat_a = flat_norm(&a.refine(&mat.refinement)?, fine)?.value;
        let flat_rhs = (sup_phi + (r + 1) as f64 * lip_phi) * flat_a;

        Ok(ProductBoundReport {
            r,
            sup_phi,
            lip_phi,
            normal_lhs,
            normal_rhs,
            normal_exact,
            flat_lhs,
            flat_rhs,
            flat_error_bound: mat.error_bound,
            materialize_levels: mat.levels,
            passed: holds(normal_lhs, normal_rhs) && holds(flat_lhs, flat_rhs),
        })
    }
}
