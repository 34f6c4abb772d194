//! Configurations, virtual velocities, Cauchy fluxes and their cochain
//! representation, strain, virtual power and stress.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::chain::Chain;
use crate::complex::Complex;
use crate::current::Current;
use crate::error::{Error, Result};
use crate::forms::{Cochain, FormField};
use crate::lipschitz::{EmbeddingVerdict, EmbeddingWitness, PAMap};
use crate::sharp::SharpField;

/// Tolerance on agreement of two extensions of the unit test field.
pub const EXTENSION_TOL: f64 = 1e-9;
/// Tolerance on the virtual-power identity and frame agreement.
pub const POWER_TOL: f64 = 1e-8;

/// A piecewise affine embedding of the body complex into space of the same
/// dimension.
#[derive(Clone, Debug)]
pub struct Configuration {
    map: PAMap,
    verdict: EmbeddingVerdict,
}

impl Configuration {
    pub fn new(map: PAMap) -> Result<Configuration> {
        let n = map.source().dim();
        if map.target_dim() != n {
            return Err(Error::InvalidArgument(format!(
                "configuration maps dimension {n} into dimension {}",
                map.target_dim()
            )));
        }
        let verdict = map.is_embedding();
        if !verdict.embedding {
            let why = match &verdict.witness {
                Some(EmbeddingWitness::Degenerate { degree, simplex, singular_value }) => {
                    format!("simplex {simplex} of degree {degree} collapses (σ_min = {singular_value:e})")
                }
                Some(EmbeddingWitness::Intersecting { first, second }) => {
                    format!("images of simplices {first:?} and {second:?} intersect")
                }
                None => "no witness".to_string(),
            };
            return Err(Error::NotAnEmbedding(why));
        }
        Ok(Configuration { map, verdict })
    }

    pub fn identity(body: &Arc<Complex>) -> Configuration {
        Configuration::new(PAMap::identity(body)).expect("identity embeds")
    }

    pub fn map(&self) -> &PAMap {
        &self.map
    }

    pub fn verdict(&self) -> &EmbeddingVerdict {
        &self.verdict
    }

    pub fn body(&self) -> &Arc<Complex> {
        self.map.source()
    }

    /// The image complex κ{B}.
    pub fn image(&self) -> &Arc<Complex> {
        self.map.image_complex()
    }

    pub fn dim(&self) -> usize {
        self.map.target_dim()
    }

    /// `κ#T`.
    pub fn push(&self, t: &Chain) -> Result<Chain> {
        self.map.pushforward(t)
    }

    /// Jacobian determinant of κ on each top simplex of the body.
    pub fn jacobians(&self) -> Result<Vec<(usize, f64)>> {
        let n = self.dim();
        (0..self.body().count(n))
            .map(|i| Ok((i, self.map.piece(n, i)?.a.determinant())))
            .collect()
    }

    /// Carries a cochain labelled by the body mesh to the image mesh.
    pub fn spatial_cochain(&self, x: &Cochain) -> Result<Cochain> {
        if x.complex().id() != self.body().id() {
            return Err(Error::ComplexMismatch);
        }
        let k = x.degree();
        let mut coeffs = vec![0.0; self.image().count(k)];
        for (i, &a) in x.coefficients().iter().enumerate() {
            let (j, s) = self.map.simplex_image(k, i)?.expect("embeddings keep every simplex");
            coeffs[j] = s * a;
        }
        Cochain::new(self.image(), k, coeffs)
    }

    /// Carries vertex values labelled by the body mesh to the image mesh.
    pub fn spatial_velocity(&self, components: &[SharpField]) -> Result<VirtualVelocity> {
        let fields = components
            .iter()
            .map(|f| {
                if f.complex().id() != self.body().id() {
                    return Err(Error::ComplexMismatch);
                }
                let mut vals = vec![0.0; self.image().count(0)];
                for (v, &a) in f.values().iter().enumerate() {
                    let (w, _) = self.map.simplex_image(0, v)?.expect("vertex image");
                    vals[w] = a;
                }
                SharpField::new(self.image(), vals)
            })
            .collect::<Result<Vec<_>>>()?;
        VirtualVelocity::new(fields)
    }

    /// Fails on the first top simplex with J ≤ 0.
    pub fn check_orientation(&self) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for (i, j) in self.jacobians()? {
            if j <= 0.0 {
                return Err(Error::OrientationReversal { simplex: i, jacobian: j });
            }
            lo = lo.min(j);
            hi = hi.max(j);
        }
        Ok((lo, hi))
    }
}

/// One PL field per spatial component, on the image complex.
#[derive(Clone, Debug)]
pub struct VirtualVelocity {
    components: Vec<SharpField>,
}

impl VirtualVelocity {
    pub fn new(components: Vec<SharpField>) -> Result<VirtualVelocity> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("a velocity needs components".into()))?;
        let c = first.complex().clone();
        if components.len() != c.dim() {
            return Err(Error::InvalidArgument(format!(
                "{} velocity components in dimension {}",
                components.len(),
                c.dim()
            )));
        }
        if components.iter().any(|f| f.complex().id() != c.id()) {
            return Err(Error::ComplexMismatch);
        }
        Ok(VirtualVelocity { components })
    }

    pub fn from_fn(complex: &Arc<Complex>, f: impl Fn(&[f64]) -> Vec<f64>) -> VirtualVelocity {
        let n = complex.dim();
        let values: Vec<Vec<f64>> = (0..complex.count(0)).map(|v| f(&complex.vertex(v)[..n])).collect();
        let components = (0..n)
            .map(|i| SharpField::new(complex, values.iter().map(|x| x[i]).collect()).expect("finite values"))
            .collect();
        VirtualVelocity { components }
    }

    pub fn constant(complex: &Arc<Complex>, value: &[f64]) -> VirtualVelocity {
        VirtualVelocity::from_fn(complex, |_| value.to_vec())
    }

    /// Extends vertex values given on part of the mesh by zero elsewhere.
    pub fn extend_by_zero(complex: &Arc<Complex>, values: &BTreeMap<usize, Vec<f64>>) -> Result<VirtualVelocity> {
        let n = complex.dim();
        let mut comps = vec![vec![0.0; complex.count(0)]; n];
        for (&v, x) in values {
            complex.check_index(0, v)?;
            if x.len() != n {
                return Err(Error::InvalidArgument(format!("velocity at vertex {v} has {} components", x.len())));
            }
            for i in 0..n {
                comps[i][v] = x[i];
            }
        }
        VirtualVelocity::new(
            comps
                .into_iter()
                .map(|c| SharpField::new(complex, c))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn components(&self) -> &[SharpField] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &SharpField {
        &self.components[i]
    }

    pub fn complex(&self) -> &Arc<Complex> {
        self.components[0].complex()
    }

    pub fn add(&self, other: &VirtualVelocity) -> Result<VirtualVelocity> {
        self.combine(other, 1.0, 1.0)
    }

    pub fn combine(&self, other: &VirtualVelocity, a: f64, b: f64) -> Result<VirtualVelocity> {
        if self.complex().id() != other.complex().id() {
            return Err(Error::ComplexMismatch);
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(u, v)| {
                let vals = u.values().iter().zip(v.values()).map(|(x, y)| a * x + b * y).collect();
                SharpField::new(u.complex(), vals)
            })
            .collect::<Result<Vec<_>>>()?;
        VirtualVelocity::new(comps)
    }
}

type FluxFn = dyn Fn(usize, &Chain, &SharpField) -> Result<f64> + Send + Sync;

/// A flux given by its component evaluators `Φⁱ(T, u)` on (n−1)-chains of
/// the image complex, together with declared balance constants.
#[derive(Clone)]
pub struct CauchyFlux {
    complex: Arc<Complex>,
    s: f64,
    b: f64,
    eval: Arc<FluxFn>,
}

impl fmt::Debug for CauchyFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CauchyFlux")
            .field("dim", &self.complex.dim())
            .field("s", &self.s)
            .field("b", &self.b)
            .finish_non_exhaustive()
    }
}

impl CauchyFlux {
    pub fn new(
        complex: &Arc<Complex>,
        s: f64,
        b: f64,
        eval: impl Fn(usize, &Chain, &SharpField) -> Result<f64> + Send + Sync + 'static,
    ) -> CauchyFlux {
        CauchyFlux {
            complex: complex.clone(),
            s,
            b,
            eval: Arc::new(eval),
        }
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn declared(&self) -> (f64, f64) {
        (self.s, self.b)
    }

    fn check(&self, t: &Chain) -> Result<()> {
        if t.complex().id() != self.complex.id() {
            return Err(Error::ComplexMismatch);
        }
        let n = self.complex.dim();
        if t.degree() + 1 != n {
            return Err(Error::DegreeMismatch {
                expected: n - 1,
                found: t.degree(),
            });
        }
        Ok(())
    }

    /// `Φⁱ(T, u)`.
    pub fn component(&self, i: usize, t: &Chain, u: &SharpField) -> Result<f64> {
        self.check(t)?;
        if u.complex().id() != self.complex.id() {
            return Err(Error::ComplexMismatch);
        }
        if i >= self.complex.dim() {
            return Err(Error::InvalidArgument(format!(
                "flux component {i} in dimension {}",
                self.complex.dim()
            )));
        }
        (self.eval)(i, t, u)
    }

    /// `Φ(T, v) = Σᵢ Φⁱ(T, vᵢ)`.
    pub fn evaluate(&self, t: &Chain, v: &VirtualVelocity) -> Result<f64> {
        (0..self.complex.dim()).map(|i| self.component(i, t, v.component(i))).sum()
    }

    /// `λΦ`, with constants scaled by |λ|.
    pub fn scale(&self, lambda: f64) -> CauchyFlux {
        let inner = self.eval.clone();
        CauchyFlux {
            complex: self.complex.clone(),
            s: self.s * lambda.abs(),
            b: self.b * lambda.abs(),
            eval: Arc::new(move |i, t, u| Ok(lambda * inner(i, t, u)?)),
        }
    }
}

fn check_tuple(x: &[Cochain]) -> Result<Arc<Complex>> {
    let first = x
        .first()
        .ok_or_else(|| Error::InvalidArgument("an empty cochain tuple".into()))?;
    let c = first.complex().clone();
    let n = c.dim();
    if x.len() != n {
        return Err(Error::InvalidArgument(format!("{} cochains in dimension {n}", x.len())));
    }
    for xi in x {
        if xi.complex().id() != c.id() {
            return Err(Error::ComplexMismatch);
        }
        if xi.degree() + 1 != n {
            return Err(Error::DegreeMismatch {
                expected: n - 1,
                found: xi.degree(),
            });
        }
    }
    Ok(c)
}

/// The flux `Φ(T, v) = Σᵢ Xᵢ(vᵢ T)` of a tuple of flat (n−1)-cochains, with
/// `s = C` and `b = (n+1)C` for `C = maxᵢ F(Xᵢ)`.
pub fn flux_from_cochains(x: &[Cochain]) -> Result<CauchyFlux> {
    let c = check_tuple(x)?;
    let n = c.dim();
    let norm = x.iter().map(Cochain::flat_norm).fold(0.0, f64::max);
    let forms: Vec<FormField> = x.iter().map(Cochain::whitney).collect();
    Ok(CauchyFlux::new(&c, norm, norm * (n + 1) as f64, move |i, t, u| {
        u.multiply(t)?.evaluate(&forms[i])
    }))
}

/// Cochains recovered from a flux, with the flat-norm audit.
#[derive(Clone, Debug)]
pub struct FluxRecovery {
    pub cochains: Vec<Cochain>,
    pub flat_norms: Vec<f64>,
    /// `max{s, b}` as declared by the flux.
    pub bound: f64,
    pub within_bound: bool,
}

/// `αⁱ(σ) = Φⁱ(σ, 1)` on every facet σ, cross-checked against the hat
/// extension equal to one on σ and vanishing at all other vertices.
pub fn cochains_from_flux(flux: &CauchyFlux, complex: &Arc<Complex>) -> Result<FluxRecovery> {
    if complex.id() != flux.complex.id() {
        return Err(Error::ComplexMismatch);
    }
    let n = complex.dim();
    let one = SharpField::constant(complex, 1.0);
    let mut cochains = Vec::with_capacity(n);
    for i in 0..n {
        let mut coeffs = Vec::with_capacity(complex.count(n - 1));
        for f in 0..complex.count(n - 1) {
            let sigma = Chain::elementary(complex, n - 1, f)?;
            let first = flux.component(i, &sigma, &one)?;
            let mut hat = vec![0.0; complex.count(0)];
            for &v in complex.simplex(n - 1, f) {
                hat[v] = 1.0;
            }
            let second = flux.component(i, &sigma, &SharpField::new(complex, hat)?)?;
            if (first - second).abs() > EXTENSION_TOL * first.abs().max(1.0) {
                return Err(Error::ExtensionDependence {
                    component: i,
                    facet: f,
                    first,
                    second,
                });
            }
            coeffs.push(first);
        }
        cochains.push(Cochain::new(complex, n - 1, coeffs)?);
    }
    let flat_norms: Vec<f64> = cochains.iter().map(Cochain::flat_norm).collect();
    let bound = flux.s.max(flux.b);
    let within_bound = flat_norms.iter().all(|&f| f <= bound * (1.0 + 1e-9) + 1e-12);
    Ok(FluxRecovery {
        cochains,
        flat_norms,
        bound,
        within_bound,
    })
}

/// Empirical balance constants with the samples attaining them.
#[derive(Clone, Debug, Serialize)]
pub struct BalanceEstimate {
    pub s_empirical: f64,
    pub b_empirical: f64,
    pub s_declared: f64,
    pub b_declared: f64,
    pub s_witness: Option<usize>,
    pub b_witness: Option<usize>,
}

fn region_of(t: &Chain) -> Vec<(usize, usize)> {
    t.support().into_iter().map(|i| (t.degree(), i)).collect()
}

/// Largest ratios `|Φⁱ(S, vᵢ)| / (‖vᵢ‖ M(S))` over surfaces S and
/// `|Φⁱ(∂P, vᵢ)| / (‖vᵢ‖ M(P))` over bodies P; the velocity norm is taken on
/// the support of the chain. Sample numbers enumerate (chain, velocity)
/// pairs, chain-major.
pub fn estimate_balance_constants(
    flux: &CauchyFlux,
    surfaces: &[Chain],
    bodies: &[Chain],
    velocities: &[VirtualVelocity],
) -> Result<BalanceEstimate> {
    if velocities.is_empty() || (surfaces.is_empty() && bodies.is_empty()) {
        return Err(Error::InvalidArgument("balance estimation needs samples".into()));
    }
    let n = flux.complex.dim();
    let ratio = |t: &Chain, region: &[(usize, usize)], mass: f64, v: &VirtualVelocity| -> Result<f64> {
        let mut worst: f64 = 0.0;
        if region.is_empty() {
            return Ok(worst);
        }
        for i in 0..n {
            let value = flux.component(i, t, v.component(i))?.abs();
            let scale = v.component(i).lip_seminorm(region)? * mass;
            if value > 0.0 {
                worst = worst.max(if scale > 0.0 { value / scale } else { f64::INFINITY });
            }
        }
        Ok(worst)
    };
    let mut est = BalanceEstimate {
        s_empirical: 0.0,
        b_empirical: 0.0,
        s_declared: flux.s,
        b_declared: flux.b,
        s_witness: None,
        b_witness: None,
    };
    for (a, s) in surfaces.iter().enumerate() {
        let region = region_of(s);
        for (k, v) in velocities.iter().enumerate() {
            let r = ratio(s, &region, s.mass(), v)?;
            if r > est.s_empirical {
                est.s_empirical = r;
                est.s_witness = Some(a * velocities.len() + k);
            }
        }
    }
    for (a, p) in bodies.iter().enumerate() {
        if p.degree() != n {
            return Err(Error::WrongDegree(p.degree()));
        }
        let region = region_of(p);
        let boundary = p.boundary()?;
        for (k, v) in velocities.iter().enumerate() {
            let r = ratio(&boundary, &region, p.mass(), v)?;
            if r > est.b_empirical {
                est.b_empirical = r;
                est.b_witness = Some(a * velocities.len() + k);
            }
        }
    }
    let exceeds = |emp: f64, dec: f64| emp > dec * (1.0 + 1e-9) + 1e-12;
    if exceeds(est.s_empirical, flux.s) {
        return Err(Error::DeclaredConstantViolated {
            name: "s",
            declared: flux.s,
            observed: est.s_empirical,
            sample: est.s_witness.unwrap_or(0),
        });
    }
    if exceeds(est.b_empirical, flux.b) {
        return Err(Error::DeclaredConstantViolated {
            name: "b",
            declared: flux.b,
            observed: est.b_empirical,
            sample: est.b_witness.unwrap_or(0),
        });
    }
    Ok(est)
}

fn check_velocity(config: &Configuration, v: &VirtualVelocity) -> Result<()> {
    if v.complex().id() != config.image().id() {
        return Err(Error::ComplexMismatch);
    }
    Ok(())
}

/// `εᵢ = vᵢ ∂κ#T − ∂(vᵢ κ#T)` for each component, with cancelling terms
/// merged away.
pub fn strain(config: &Configuration, t: &Chain, v: &VirtualVelocity) -> Result<Vec<Current>> {
    check_velocity(config, v)?;
    let a = config.push(t)?;
    let da = a.boundary()?;
    v.components()
        .iter()
        .map(|vi| Ok(vi.multiply(&da)?.sub(&vi.multiply(&a)?.boundary()?)?.compact()))
        .collect()
}

/// The three terms of the virtual-power identity, evaluated in space.
#[derive(Clone, Debug, Serialize)]
pub struct VirtualPowerReport {
    /// `Σᵢ Xᵢ(vᵢ κ#∂T)`.
    pub surface_power: f64,
    /// `−Σᵢ dXᵢ(vᵢ κ#T)`.
    pub body_power: f64,
    /// `Σᵢ Xᵢ(εᵢ)`.
    pub internal_power: f64,
    pub residual: f64,
    pub passed: bool,
}

pub fn virtual_power_report(
    x: &[Cochain],
    config: &Configuration,
    t: &Chain,
    v: &VirtualVelocity,
) -> Result<VirtualPowerReport> {
    let c = check_tuple(x)?;
    if c.id() != config.image().id() {
        return Err(Error::ComplexMismatch);
    }
    check_velocity(config, v)?;
    let a = config.push(t)?;
    let da = a.boundary()?;
    let eps = strain(config, t, v)?;
    let (mut surface, mut body, mut internal) = (0.0, 0.0, 0.0);
    for (i, xi) in x.iter().enumerate() {
        let vi = v.component(i);
        surface += vi.multiply(&da)?.evaluate(&xi.whitney())?;
        body -= vi.multiply(&a)?.evaluate(&xi.coboundary()?.whitney())?;
        internal += eps[i].evaluate(&xi.whitney())?;
    }
    let residual = (surface + body - internal).abs();
    Ok(VirtualPowerReport {
        surface_power: surface,
        body_power: body,
        internal_power: internal,
        residual,
        passed: residual <= POWER_TOL,
    })
}

/// Power terms recomputed as material-frame integrals, compared with the
/// spatial evaluation, and the Piola–Kirchhoff stress.
#[derive(Clone, Debug, Serialize)]
pub struct StressReport {
    pub min_jacobian: f64,
    pub max_jacobian: f64,
    pub spatial: VirtualPowerReport,
    /// `∫_∂T κ^#(vᵢ D_Xᵢ)`, summed.
    pub material_surface_power: f64,
    /// `−∫_T κ^#(vᵢ dD_Xᵢ)`, summed.
    pub material_body_power: f64,
    /// `∫_T κ^#(dvᵢ ∧ D_Xᵢ)`, summed.
    pub material_internal_power: f64,
    pub max_deviation: f64,
    pub passed: bool,
    /// `κ^#D_Xᵢ` on the body complex.
    #[serde(skip)]
    pub piola_kirchhoff: Vec<FormField>,
    /// `D_Xᵢ` on the image complex.
    #[serde(skip)]
    pub cauchy: Vec<FormField>,
}

pub fn stress_report(x: &[Cochain], config: &Configuration, t: &Chain, v: &VirtualVelocity) -> Result<StressReport> {
    let (min_jacobian, max_jacobian) = config.check_orientation()?;
    let spatial = virtual_power_report(x, config, t, v)?;
    let map = config.map();
    let dt = t.boundary()?;
    let cauchy: Vec<FormField> = x.iter().map(Cochain::whitney).collect();
    let (mut surface, mut body, mut internal) = (0.0, 0.0, 0.0);
    let mut piola_kirchhoff = Vec::with_capacity(x.len());
    for (i, d) in cauchy.iter().enumerate() {
        let vi = v.component(i).form();
        surface += map.pullback_form(&vi.wedge(d)?)?.integrate(&dt)?;
        body -= map.pullback_form(&vi.wedge(&d.d())?)?.integrate(t)?;
        internal += map.pullback_form(&vi.d().wedge(d)?)?.integrate(t)?;
        piola_kirchhoff.push(map.pullback_form(d)?);
    }
    let max_deviation = [
        (surface - spatial.surface_power).abs(),
        (body - spatial.body_power).abs(),
        (internal - spatial.internal_power).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(StressReport {
        min_jacobian,
        max_jacobian,
        passed: spatial.passed && max_deviation <= POWER_TOL,
        spatial,
        material_surface_power: surface,
        material_body_power: body,
        material_internal_power: internal,
        max_deviation,
        piola_kirchhoff,
        cauchy,
    })
}

/// Largest coefficient difference between the Piola–Kirchhoff stress and
/// the Cauchy stress read on the matching image simplex. Meaningful when κ is
/// the identity.
pub fn piola_cauchy_deviation(report: &StressReport, config: &Configuration) -> Result<f64> {
    let (body, image) = (config.body(), config.image());
    let mut worst: f64 = 0.0;
    for (pk, d) in report.piola_kirchhoff.iter().zip(&report.cauchy) {
        for (k, i) in body.maximal_simplices() {
            let Some((j, _)) = config.map().simplex_image(k, i)? else {
                continue;
            };
            let a = pk.on_simplex(body, k, i)?;
            let b = d.on_simplex(image, k, j)?;
            for (p, q) in a.components().iter().zip(b.components()) {
                worst = worst.max(p.sub(q).max_abs_coefficient());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::Body;
    use crate::forms::PolyForm;
    use crate::lipschitz::random_map;
    use crate::meshes;
    use crate::random;
    use proptest::prelude::*;

    fn cochain_of(c: &Arc<Complex>, form: PolyForm) -> Cochain {
        Cochain::from_form(c, &FormField::Global(form)).unwrap()
    }

    fn square_tuple(c: &Arc<Complex>, first: PolyForm) -> Vec<Cochain> {
        vec![cochain_of(c, first), Cochain::zero(c, 1)]
    }

    #[test]
    fn configuration_checks() {
        let c = meshes::unit_square();
        let id = Configuration::identity(&c);
        assert_eq!(id.check_orientation().unwrap(), (1.0, 1.0));
        let fold = PAMap::from_fn(&c, |x| vec![x[0], 0.0]).unwrap();
        assert!(matches!(Configuration::new(fold), Err(Error::NotAnEmbedding(_))));
        let mirror = Configuration::new(PAMap::from_fn(&c, |x| vec![-x[0], x[1]]).unwrap()).unwrap();
        assert!(matches!(mirror.check_orientation(), Err(Error::OrientationReversal { .. })));
    }

    #[test]
    fn top_edge_flux() {
        let c = meshes::unit_square();
        let (top, _) = c.find_simplex(&[3, 2]).unwrap();
        let edge = Chain::elementary(&c, 1, top).unwrap();
        let v = VirtualVelocity::constant(&c, &[1.0, 0.0]);
        let dy = flux_from_cochains(&square_tuple(&c, PolyForm::coordinate_differential(2, 1))).unwrap();
        assert!(dy.evaluate(&edge, &v).unwrap().abs() < 1e-15);
        let dx = flux_from_cochains(&square_tuple(&c, PolyForm::coordinate_differential(2, 0))).unwrap();
        assert!((dx.evaluate(&edge, &v).unwrap().abs() - 1.0).abs() < 1e-14);
        let zero = flux_from_cochains(&[Cochain::zero(&c, 1), Cochain::zero(&c, 1)]).unwrap();
        assert_eq!(zero.declared(), (0.0, 0.0));
        assert_eq!(zero.evaluate(&edge, &v).unwrap(), 0.0);
    }

    #[test]
    fn round_trip_and_zero() {
        let mut rng = random::rng(5);
        let c = random::mesh(&mut rng, 2);
        let x = vec![random::cochain(&mut rng, &c, 1), random::cochain(&mut rng, &c, 1)];
        let back = cochains_from_flux(&flux_from_cochains(&x).unwrap(), &c).unwrap();
        for (a, b) in x.iter().zip(&back.cochains) {
            for (p, q) in a.coefficients().iter().zip(b.coefficients()) {
                assert!((p - q).abs() <= 1e-9);
            }
        }
        assert!(back.within_bound);
        let zero = CauchyFlux::new(&c, 0.0, 0.0, |_, _, _| Ok(0.0));
        let rec = cochains_from_flux(&zero, &c).unwrap();
        assert!(rec.cochains.iter().all(|x| x.coefficients().iter().all(|&a| a == 0.0)));
    }

    #[test]
    fn adversarial_fluxes_are_caught() {
        let c = meshes::grid(4, 4, [0.0, 0.0], [1.0, 1.0]);
        // Depends on the test field away from the facet.
        let nonlocal = CauchyFlux::new(&c, 1.0, 1.0, |_, t, u| Ok(t.iter().map(|(_, a)| a).sum::<f64>() * u.values()[0]));
        assert!(matches!(cochains_from_flux(&nonlocal, &c), Err(Error::ExtensionDependence { .. })));
        // Counts facets instead of measuring them.
        let counting = CauchyFlux::new(&c, 1.0, 1.0, |_, t, u| {
            let cx = t.complex();
            Ok(t.iter()
                .map(|(f, a)| {
                    let vs = cx.simplex(t.degree(), f);
                    a * vs.iter().map(|&v| u.values()[v]).sum::<f64>() / vs.len() as f64
                })
                .sum())
        });
        let rec = cochains_from_flux(&counting, &c).unwrap();
        assert!(!rec.within_bound);
    }

    #[test]
    fn balance_constants() {
        let mut rng = random::rng(9);
        let c = random::mesh(&mut rng, 2);
        let x = vec![random::cochain(&mut rng, &c, 1), random::cochain(&mut rng, &c, 1)];
        let flux = flux_from_cochains(&x).unwrap();
        let surfaces: Vec<Chain> = (0..6).map(|_| random::chain(&mut rng, &c, 1, 0.3)).collect();
        let bodies: Vec<Chain> = (0..6)
            .map(|_| {
                let ids: Vec<usize> = (0..c.count(2)).filter(|_| rand::Rng::gen_bool(&mut rng, 0.4)).collect();
                Body::from_simplices(&c, &ids).unwrap().chain().clone()
            })
            .collect();
        let vel: Vec<VirtualVelocity> = (0..4)
            .map(|_| {
                let (a, b) = (rand::Rng::gen_range(&mut rng, -1.0..1.0), rand::Rng::gen_range(&mut rng, -1.0..1.0));
                VirtualVelocity::from_fn(&c, |p| vec![a * p[1] + 0.3, b * p[0] * p[0]])
            })
            .collect();
        let est = estimate_balance_constants(&flux, &surfaces, &bodies, &vel).unwrap();
        assert!(est.s_empirical <= flux.declared().0 * (1.0 + 1e-9));
        let doubled = estimate_balance_constants(&flux.scale(2.0), &surfaces, &bodies, &vel).unwrap();
        assert!((doubled.s_empirical - 2.0 * est.s_empirical).abs() <= 1e-12 * est.s_empirical.max(1.0));
        assert!((doubled.b_empirical - 2.0 * est.b_empirical).abs() <= 1e-12 * est.b_empirical.max(1.0));
        let zero = flux_from_cochains(&[Cochain::zero(&c, 1), Cochain::zero(&c, 1)]).unwrap();
        let z = estimate_balance_constants(&zero, &surfaces, &bodies, &vel).unwrap();
        assert_eq!((z.s_empirical, z.b_empirical), (0.0, 0.0));
        let liar = CauchyFlux::new(&c, 1e-6, 1e-6, {
            let f = flux.clone();
            move |i, t, u| f.component(i, t, u)
        });
        assert!(matches!(
            estimate_balance_constants(&liar, &surfaces, &bodies, &vel),
            Err(Error::DeclaredConstantViolated { .. })
        ));
    }

    #[test]
    fn strain_examples() {
        let c = meshes::unit_square();
        let id = Configuration::identity(&c);
        let square = Body::from_simplices(&c, &[0, 1]).unwrap();
        let rigid = VirtualVelocity::constant(id.image(), &[0.7, -1.3]);
        for e in strain(&id, square.chain(), &rigid).unwrap() {
            assert!(e.is_zero());
        }
        let v = VirtualVelocity::from_fn(id.image(), |p| vec![p[0], 0.0]);
        let eps = strain(&id, square.chain(), &v).unwrap();
        let dy = FormField::Global(PolyForm::coordinate_differential(2, 1));
        assert!((eps[0].evaluate(&dy).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn virtual_power_on_square() {
        let c = meshes::unit_square();
        let id = Configuration::identity(&c);
        let square = Body::from_simplices(&c, &[0, 1]).unwrap();
        let img = id.image().clone();
        let x = square_tuple(&img, PolyForm::coordinate_differential(2, 1));
        let v = VirtualVelocity::from_fn(&img, |p| vec![p[1], 0.0]);
        let r = virtual_power_report(&x, &id, square.chain(), &v).unwrap();
        // D = dy is closed: body power vanishes, and ∫_∂□ y dy = 0 = ∫_□ dy∧dy.
        assert!(r.body_power.abs() < 1e-14);
        assert!(r.surface_power.abs() < 1e-14);
        assert!(r.internal_power.abs() < 1e-14);
        // D = x dy: ∫_∂□ y·x dy = −1/2 and −∫_□ y dx∧dy = −1/2; internal ∫ dy∧x dy = 0.
        let xdy = PolyForm::coordinate_differential(2, 1).mul_poly(&crate::poly::Poly::affine(&[1.0, 0.0], 0.0));
        let x2 = vec![Cochain::from_form(&img, &FormField::Global(xdy)).unwrap(), Cochain::zero(&img, 1)];
        let r = virtual_power_report(&x2, &id, square.chain(), &v).unwrap();
        assert!(r.residual <= 1e-9);
        assert!((r.surface_power - r.internal_power + r.body_power).abs() <= 1e-9);
    }

    #[test]
    fn stress_identity_and_scaling() {
        let mut rng = random::rng(21);
        let c = meshes::grid(2, 2, [0.0, 0.0], [1.0, 1.0]);
        let body = Body::from_simplices(&c, &[0, 1, 2, 5]).unwrap();
        let id = Configuration::identity(&c);
        let x = vec![random::cochain(&mut rng, id.image(), 1), random::cochain(&mut rng, id.image(), 1)];
        let v = VirtualVelocity::from_fn(id.image(), |p| vec![p[0] * p[1], 1.0 - p[0]]);
        let r = stress_report(&x, &id, body.chain(), &v).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(piola_cauchy_deviation(&r, &id).unwrap() <= 1e-14);

        let scaling = Configuration::new(PAMap::from_fn(&c, |p| vec![2.0 * p[0], 2.0 * p[1]]).unwrap()).unwrap();
        let (lo, hi) = scaling.check_orientation().unwrap();
        assert!((lo - 4.0).abs() < 1e-12 && (hi - 4.0).abs() < 1e-12);
        let img = scaling.image();
        let xs = vec![random::cochain(&mut rng, img, 1), random::cochain(&mut rng, img, 1)];
        let vs = VirtualVelocity::from_fn(img, |p| vec![p[1], p[0] * 0.5]);
        let r = stress_report(&xs, &scaling, body.chain(), &vs).unwrap();
        assert!(r.max_deviation <= 1e-9, "{r:?}");
        // A constant (n−1)-form pulls back through the cofactor of 2·I.
        let dy = FormField::Global(PolyForm::coordinate_differential(2, 1));
        let pulled = scaling.map().pullback_form(&dy).unwrap();
        let w = pulled.on_simplex(&c, 2, 0).unwrap();
        assert!((w.eval(&[0.2, 0.1]).components()[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn relabelling_onto_the_image() {
        let c = meshes::grid(2, 2, [0.0, 0.0], [1.0, 1.0]);
        let config = Configuration::new(PAMap::from_fn(&c, |p| vec![p[0] + 0.2 * p[1], 1.5 * p[1]]).unwrap()).unwrap();
        let mut rng = random::rng(4);
        let x = random::cochain(&mut rng, &c, 1);
        let y = config.spatial_cochain(&x).unwrap();
        let edge = Chain::elementary(&c, 1, 3).unwrap();
        let pushed = config.push(&edge).unwrap();
        assert!((y.evaluate(&pushed).unwrap() - x.evaluate(&edge).unwrap()).abs() < 1e-15);
        let phi = SharpField::from_fn(&c, |p| p[0]);
        let v = config.spatial_velocity(&[phi.clone(), phi]).unwrap();
        for w in 0..c.count(0) {
            let (j, _) = config.map().simplex_image(0, w).unwrap().unwrap();
            assert_eq!(v.component(0).values()[j], c.vertex(w)[0]);
        }
    }

    #[test]
    fn zero_extension_is_lipschitz() {
        let c = meshes::grid(3, 3, [0.0, 0.0], [1.0, 1.0]);
        let mut values = BTreeMap::new();
        for v in 0..c.count(0) {
            let p = c.vertex(v);
            if p[0] <= 1.0 / 3.0 + 1e-12 {
                values.insert(v, vec![p[1], 1.0]);
            }
        }
        let v = VirtualVelocity::extend_by_zero(&c, &values).unwrap();
        let all: Vec<(usize, usize)> = (0..c.count(2)).map(|i| (2, i)).collect();
        for comp in v.components() {
            assert!(comp.lip_seminorm(&all).unwrap().is_finite());
        }
        for (&k, val) in &values {
            assert_eq!(v.component(0).values()[k], val[0]);
        }
    }

    fn campaign_case(seed: u64, dim: usize) -> Option<(Vec<Cochain>, Configuration, Chain, VirtualVelocity)> {
        let mut rng = random::rng(seed);
        let c = random::mesh(&mut rng, dim);
        let config = Configuration::new(random_map(&mut rng, &c, 0.1)).ok()?;
        let img = config.image().clone();
        let x: Vec<Cochain> = (0..dim).map(|_| random::cochain(&mut rng, &img, dim - 1)).collect();
        let ids: Vec<usize> = (0..c.count(dim)).filter(|_| rand::Rng::gen_bool(&mut rng, 0.5)).collect();
        let t = Body::from_simplices(&c, &ids).ok()?.chain().clone();
        let coeffs: Vec<Vec<f64>> = (0..dim).map(|_| (0..=dim).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect()).collect();
        let v = VirtualVelocity::from_fn(&img, |p| {
            coeffs.iter().map(|a| a[0] + (0..dim).map(|j| a[j + 1] * p[j]).sum::<f64>()).collect()
        });
        Some((x, config, t, v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn virtual_power_identity(seed in any::<u64>(), dim in 1usize..=3) {
            if let Some((x, config, t, v)) = campaign_case(seed, dim) {
                let r = virtual_power_report(&x, &config, &t, &v).unwrap();
                prop_assert!(r.residual <= POWER_TOL, "{:?}", r);
                if config.check_orientation().is_ok() {
                    let s = stress_report(&x, &config, &t, &v).unwrap();
                    prop_assert!(s.max_deviation <= POWER_TOL, "{:?}", s);
                }
            }
        }

        #[test]
        fn flux_linear_and_additive(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let c = random::mesh(&mut rng, 2);
            let x = vec![random::cochain(&mut rng, &c, 1), random::cochain(&mut rng, &c, 1)];
            let flux = flux_from_cochains(&x).unwrap();
            let s1 = random::chain(&mut rng, &c, 1, 0.3);
            let s2 = random::chain(&mut rng, &c, 1, 0.3);
            let u = VirtualVelocity::from_fn(&c, |p| vec![p[0] - p[1], 0.5 * p[0]]);
            let w = VirtualVelocity::from_fn(&c, |p| vec![1.0, p[1] * p[1]]);
            let combo = u.combine(&w, 2.0, -0.5).unwrap();
            let lhs = flux.evaluate(&s1, &combo).unwrap();
            let rhs = 2.0 * flux.evaluate(&s1, &u).unwrap() - 0.5 * flux.evaluate(&s1, &w).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9);
            let sum = flux.evaluate(&s1.add(&s2).unwrap(), &u).unwrap();
            let parts = flux.evaluate(&s1, &u).unwrap() + flux.evaluate(&s2, &u).unwrap();
            prop_assert!((sum - parts).abs() <= 1e-9);
        }
    }
}
