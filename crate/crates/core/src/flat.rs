//! Flat norms of chains relative to an ambient complex.

use std::sync::Arc;

use serde::Serialize;

use crate::chain::Chain;
use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::forms::Cochain;
use crate::lp::SparseLp;

/// An optimal splitting `T = R + ∂S`.
#[derive(Clone, Debug)]
pub struct FlatDecomposition {
    /// `M(R) + M(S)`.
    pub value: f64,
    pub r: Chain,
    /// Degree k+1; always zero for top-degree chains.
    pub s: Chain,
    /// Optimal value reported by the LP, before `R` is recomputed.
    pub lp_objective: f64,
    pub iterations: usize,
}

/// Flat norm of `t` among fillings by (k+1)-chains of `ambient`.
pub fn flat_norm(t: &Chain, ambient: &Arc<Complex>) -> Result<FlatDecomposition> {
    let t = t.transfer(ambient)?;
    let k = t.degree();
    let n = ambient.dim();
    if k == n || t.is_zero() {
        let value = t.mass();
        return Ok(FlatDecomposition {
            value,
            s: Chain::zero(ambient, k + 1),
            r: t,
            lp_objective: value,
            iterations: 0,
        });
    }
    let rows = ambient.count(k);
    let fillers = ambient.count(k + 1);
    // Columns: r⁺, r⁻ for every k-simplex, then s⁺, s⁻ for every (k+1)-simplex.
    let mut columns = Vec::with_capacity(2 * rows + 2 * fillers);
    let mut cost = Vec::with_capacity(columns.capacity());
    for i in 0..rows {
        let w = ambient.volume(k, i);
        columns.push(vec![(i, 1.0)]);
        columns.push(vec![(i, -1.0)]);
        cost.extend([w, w]);
    }
    for j in 0..fillers {
        let w = ambient.volume(k + 1, j);
        let col: Vec<(usize, f64)> = ambient.faces(k + 1, j).to_vec();
        columns.push(col.iter().map(|&(i, s)| (i, -s)).collect());
        columns.push(col);
        cost.extend([w, w]);
    }
    let mut rhs = vec![0.0; rows];
    for (i, a) in t.iter() {
        rhs[i] = a;
    }
    let initial: Vec<usize> = (0..rows)
        .map(|i| if rhs[i] >= 0.0 { 2 * i } else { 2 * i + 1 })
        .collect();
    let lp = SparseLp {
        rows,
        columns,
        cost,
        rhs,
    };
    let sol = lp.solve(&initial)?;
    // Column 2r+2j+1 carries +∂σⱼ, i.e. the filling s⁺; the other is s⁻.
    let base = 2 * rows;
    let s_coeffs: Vec<(usize, f64)> = (0..fillers)
        .map(|j| (j, sol.x[base + 2 * j + 1] - sol.x[base + 2 * j]))
        .filter(|&(_, v)| v != 0.0)
        .collect();
    let s = Chain::new(ambient, k + 1, s_coeffs)?;
    let r = t.sub(&s.boundary()?)?;
    let value = r.mass() + s.mass();
    if !(value.is_finite() && (value - sol.objective).abs() <= 1e-6 * (1.0 + value)) {
        return Err(Error::LpNumericalFailure(format!(
            "objective {} disagrees with decomposition {}",
            sol.objective, value
        )));
    }
    Ok(FlatDecomposition {
        value,
        r,
        s,
        lp_objective: sol.objective,
        iterations: sol.iterations,
    })
}

/// `F(A − B)`.
pub fn flat_distance(a: &Chain, b: &Chain, ambient: &Arc<Complex>) -> Result<f64> {
    let d = a.transfer(ambient)?.sub(&b.transfer(ambient)?)?;
    Ok(flat_norm(&d, ambient)?.value)
}

/// Flat norm of a cochain: the larger of the sup-comass of its Whitney
/// form and of that form's exterior derivative.
pub fn cochain_flat_norm(x: &Cochain) -> f64 {
    x.flat_norm()
}

/// Successive flat distances of a sequence and the verdict on convergence.
#[derive(Clone, Debug, Serialize)]
pub struct CauchyReport {
    pub distances: Vec<f64>,
    /// `d_{i+1} / d_i`, zero where both vanish.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub epsilon: f64,
    pub passed: bool,
}

/// Passes when the last successive distance is at most `epsilon` and the
/// distances shrink by a uniform factor below one.
pub fn certify_cauchy(seq: &[Chain], ambient: &Arc<Complex>, epsilon: f64) -> Result<CauchyReport> {
    if seq.len() < 2 {
        return Err(Error::InvalidArgument(
            "a Cauchy certificate needs at least two chains".into(),
        ));
    }
    let distances = seq
        .windows(2)
        .map(|w| flat_distance(&w[1], &w[0], ambient))
        .collect::<Result<Vec<f64>>>()?;
    Ok(cauchy_verdict(distances, epsilon))
}

pub(crate) fn cauchy_verdict(distances: Vec<f64>, epsilon: f64) -> CauchyReport {
    let zero = |d: f64| d <= 1e-12;
    let ratios: Vec<f64> = distances
        .windows(2)
        .map(|w| match (zero(w[0]), zero(w[1])) {
            (_, true) => 0.0,
            (true, false) => f64::INFINITY,
            _ => w[1] / w[0],
        })
        .collect();
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let last = *distances.last().expect("nonempty");
    let passed = last <= epsilon && max_ratio < 1.0;
    CauchyReport {
        distances,
        ratios,
        max_ratio,
        epsilon,
        passed,
    }
}
