//! Exterior algebra of ℝⁿ for n ≤ 3.
//!
//! A basis blade is a bitmask over the coordinate axes; blades of a fixed
//! degree are ordered lexicographically, so `{0,1} < {0,2} < {1,2}` in ℝ³.
//! The same component layout is used for multivectors and for covectors,
//! and the pairing of a covector with a multivector is the plain dot product
//! of components (the basis is orthonormal).
//!
//! In dimension at most three every homogeneous multivector is simple, so
//! mass and comass both reduce to the Euclidean norm of the components.

use std::fmt;

/// Binomial coefficient for the tiny arguments used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Blades of degree `k` in dimension `n`, in lexicographic order.
pub fn blades(n: usize, k: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(binomial(n, k));
    fn rec(start: usize, n: usize, left: usize, mask: u8, out: &mut Vec<u8>) {
        if left == 0 {
            out.push(mask);
            return;
        }
        for i in start..n {
            rec(i + 1, n, left - 1, mask | (1 << i), out);
        }
    }
    rec(0, n, k, 0, &mut out);
    out
}

/// Position of `mask` among the blades of its degree.
pub fn blade_index(n: usize, mask: u8) -> usize {
    let k = mask.count_ones() as usize;
    blades(n, k)
        .iter()
        .position(|&b| b == mask)
        .expect("blade mask outside the ambient dimension")
}

/// Axis indices of a blade, ascending.
pub fn blade_axes(mask: u8) -> Vec<usize> {
    (0..8).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of `e_a ∧ e_b` relative to `e_{a ∪ b}`; zero when the blades share an axis.
pub fn wedge_sign(a: u8, b: u8) -> f64 {
    if a & b != 0 {
        return 0.0;
    }
    let mut swaps = 0;
    for i in blade_axes(a) {
        swaps += blade_axes(b).iter().filter(|&&j| j < i).count();
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A homogeneous element of Λ_k ℝⁿ (or of its dual, by the same layout).
#[derive(Clone, PartialEq)]
pub struct MultiVector {
    dim: usize,
    degree: usize,
    comps: Vec<f64>,
}

impl fmt::Debug for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiVector(n={}, k={}, {:?})", self.dim, self.degree, self.comps)
    }
}

impl MultiVector {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            degree,
            comps: vec![0.0; binomial(dim, degree)],
        }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        Self {
            dim,
            degree: 0,
            comps: vec![value],
        }
    }

    pub fn from_components(dim: usize, degree: usize, comps: Vec<f64>) -> Self {
        assert_eq!(comps.len(), binomial(dim, degree), "component count");
        Self { dim, degree, comps }
    }

    /// The basis blade `e_{i₁} ∧ … ∧ e_{i_k}` for ascending axes.
    pub fn basis(dim: usize, axes: &[usize]) -> Self {
        let mask = axes.iter().fold(0u8, |m, &i| m | (1 << i));
        let mut v = Self::zero(dim, axes.len());
        v.comps[blade_index(dim, mask)] = 1.0;
        v
    }

    /// `e₁ ∧ … ∧ eₙ`.
    pub fn volume_element(dim: usize) -> Self {
        Self::basis(dim, &(0..dim).collect::<Vec<_>>())
    }

    pub fn vector(v: &[f64]) -> Self {
        Self {
            dim: v.len(),
            degree: 1,
            comps: v.to_vec(),
        }
    }

    /// Wedge product of 1-vectors.
    pub fn from_vectors(dim: usize, vectors: &[Vec<f64>]) -> Self {
        vectors
            .iter()
            .fold(Self::scalar(dim, 1.0), |acc, v| acc.wedge(&Self::vector(&v[..dim])))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[f64] {
        &self.comps
    }

    pub fn norm(&self) -> f64 {
        self.comps.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.degree, other.degree);
        self.comps.iter().zip(&other.comps).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        Self {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zero(n, self.degree + other.degree);
        if self.degree + other.degree > n {
            return out;
        }
        let ba = blades(n, self.degree);
        let bb = blades(n, other.degree);
        for (i, &ma) in ba.iter().enumerate() {
            if self.comps[i] == 0.0 {
                continue;
            }
            for (j, &mb) in bb.iter().enumerate() {
                let s = wedge_sign(ma, mb);
                if s != 0.0 {
                    out.comps[blade_index(n, ma | mb)] += s * self.comps[i] * other.comps[j];
                }
            }
        }
        out
    }

    /// Interior product `self ⌟ xi` of a covector into a multivector, defined
    /// by `⟨β, α ⌟ ξ⟩ = ⟨α ∧ β, ξ⟩`.
    pub fn contract(&self, xi: &Self) -> Self {
        let n = self.dim;
        assert!(self.degree <= xi.degree, "contraction degree");
        let mut out = Self::zero(n, xi.degree - self.degree);
        let ba = blades(n, self.degree);
        for (i, &ma) in ba.iter().enumerate() {
            for (j, &mi) in blades(n, xi.degree).iter().enumerate() {
                if ma & mi == ma {
                    let rest = mi & !ma;
                    out.comps[blade_index(n, rest)] +=
                        wedge_sign(ma, rest) * self.comps[i] * xi.comps[j];
                }
            }
        }
        out
    }
}

/// Determinant of the minor of a row-major `rows × cols` matrix.
pub fn minor(mat: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> f64 {
    match rows.len() {
        0 => 1.0,
        1 => mat[rows[0]][cols[0]],
        2 => {
            mat[rows[0]][cols[0]] * mat[rows[1]][cols[1]]
                - mat[rows[0]][cols[1]] * mat[rows[1]][cols[0]]
        }
        3 => {
            let m = |r: usize, c: usize| mat[rows[r]][cols[c]];
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        }
        _ => panic!("minor larger than 3×3"),
    }
}

/// Matrix of the induced map Λ_k ℝⁿ → Λ_k ℝᵐ for a linear map given as an
/// `m × n` row-major matrix: entry `(J, I)` is the `J, I` minor.
pub fn compound_matrix(mat: &[Vec<f64>], m: usize, n: usize, k: usize) -> Vec<Vec<f64>> {
    let rows = blades(m, k);
    let cols = blades(n, k);
    rows.iter()
        .map(|&rj| {
            cols.iter()
                .map(|&ci| minor(mat, &blade_axes(rj), &blade_axes(ci)))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blade_ordering_is_lexicographic() {
        assert_eq!(blades(3, 2), vec![0b011, 0b101, 0b110]);
        assert_eq!(blades(3, 0), vec![0]);
        assert_eq!(binomial(3, 2), 3);
    }

    #[test]
    fn wedge_is_anticommutative_on_vectors() {
        let a = MultiVector::vector(&[1.0, 2.0, 3.0]);
        let b = MultiVector::vector(&[-1.0, 0.5, 2.0]);
        let ab = a.wedge(&b);
        let ba = b.wedge(&a);
        for (x, y) in ab.components().iter().zip(ba.components()) {
            assert!((x + y).abs() < 1e-15);
        }
    }

    #[test]
    fn contraction_of_normal_gives_ccw_tangent() {
        // ν = e₁ on the right edge of the unit square gives tangent e₂.
        let nu = MultiVector::vector(&[1.0, 0.0]);
        let t = nu.contract(&MultiVector::volume_element(2));
        assert_eq!(t.components(), &[0.0, 1.0]);
        // ν = e₂ (top edge) gives −e₁.
        let nu = MultiVector::vector(&[0.0, 1.0]);
        let t = nu.contract(&MultiVector::volume_element(2));
        assert_eq!(t.components(), &[-1.0, 0.0]);
    }

    #[test]
    fn contraction_matches_defining_identity() {
        let alpha = MultiVector::vector(&[0.3, -1.2, 0.7]);
        let xi = MultiVector::from_vectors(3, &[vec![1.0, 2.0, 0.5], vec![0.0, -1.0, 4.0]]);
        let beta = MultiVector::vector(&[2.0, 0.1, -0.4]);
        let lhs = beta.dot(&alpha.contract(&xi));
        let rhs = alpha.wedge(&beta).dot(&xi);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn compound_of_scaling_is_power() {
        let m = vec![vec![2.0, 0.0], vec![0.0, 2.0]];
        let c = compound_matrix(&m, 2, 2, 2);
        assert_eq!(c, vec![vec![4.0]]);
    }
}
