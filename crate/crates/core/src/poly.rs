//! Small multivariate polynomials (at most three variables) with exact
//! integration over simplices.

use std::collections::BTreeMap;

type Exponent = [u8; 3];

/// Polynomial in `nvars ≤ 3` variables with real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, f64>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term([0; 3], c);
        p
    }

    /// `coeffs · x + c`.
    pub fn affine(coeffs: &[f64], c: f64) -> Self {
        let mut p = Self::constant(coeffs.len(), c);
        for (i, &a) in coeffs.iter().enumerate() {
            let mut e = [0; 3];
            e[i] = 1;
            p.add_term(e, a);
        }
        p
    }

    fn add_term(&mut self, e: Exponent, c: f64) {
        if c == 0.0 {
            return;
        }
        let v = self.terms.entry(e).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Constant and linear coefficients `[c, a₁, …, a_n]` when the degree is ≤ 1.
    pub fn affine_coefficients(&self) -> Option<Vec<f64>> {
        if self.degree() > 1 {
            return None;
        }
        let mut out = vec![0.0; self.nvars + 1];
        for (e, &c) in &self.terms {
            match e.iter().position(|&x| x == 1) {
                None => out[0] = c,
                Some(i) => out[i + 1] = c,
            }
        }
        Some(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (&e, &c) in &other.terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut p = Self::zero(self.nvars);
        if s != 0.0 {
            for (&e, &c) in &self.terms {
                p.add_term(e, c * s);
            }
        }
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero(self.nvars.max(other.nvars));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                p.add_term(e, ca * cb);
            }
        }
        p
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            if e[var] > 0 {
                let mut f = *e;
                f[var] -= 1;
                p.add_term(f, c * e[var] as f64);
            }
        }
        p
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = *c;
                for i in 0..self.nvars {
                    v *= x[i].powi(e[i] as i32);
                }
                v
            })
            .sum()
    }

    /// Substitutes `x_j = Σᵢ a[j][i] yᵢ + b[j]`, returning a polynomial in the
    /// `new_vars` variables `y`.
    pub fn compose_affine(&self, a: &[Vec<f64>], b: &[f64], new_vars: usize) -> Self {
        let subs: Vec<Poly> = (0..self.nvars)
            .map(|j| Poly::affine(&a[j][..new_vars], b[j]))
            .collect();
        let mut out = Poly::zero(new_vars);
        for (e, &c) in &self.terms {
            let mut term = Poly::constant(new_vars, c);
            for j in 0..self.nvars {
                for _ in 0..e[j] {
                    term = term.mul(&subs[j]);
                }
            }
            out = out.add(&term);
        }
        out.nvars = new_vars;
        out
    }

    /// Integral over the reference simplex `{λ ≥ 0, Σλ ≤ 1}` in `nvars` variables.
    pub fn integrate_reference(&self) -> f64 {
        let k = self.nvars;
        self.terms
            .iter()
            .map(|(e, c)| {
                let total: usize = e[..k].iter().map(|&x| x as usize).sum();
                let num: f64 = e[..k].iter().map(|&x| factorial(x as usize)).product();
                c * num / factorial(k + total)
            })
            .sum()
    }

    /// Exact integral of `self` (in ambient coordinates) over the simplex with
    /// the given vertices, with respect to k-dimensional Hausdorff measure.
    pub fn integrate_over_simplex(&self, points: &[Vec<f64>], volume: f64) -> f64 {
        let k = points.len() - 1;
        if k == 0 {
            return self.eval(&points[0]);
        }
        let n = self.nvars;
        let a: Vec<Vec<f64>> = (0..n)
            .map(|j| (1..=k).map(|i| points[i][j] - points[0][j]).collect())
            .collect();
        let local = self.compose_affine(&a, &points[0][..n], k);
        local.integrate_reference() * factorial(k) * volume
    }
}
