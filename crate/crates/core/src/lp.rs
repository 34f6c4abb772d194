//! Revised primal simplex for `min cᵀx  s.t.  Ax = b, x ≥ 0` with sparse
//! columns and a product-form basis inverse.
//!
//! The caller supplies a starting basis made of signed unit columns that is
//! primal feasible, so no phase one is needed. Pricing is Dantzig's rule;
//! after a run of degenerate pivots the solver switches to Bland's rule
//! until the objective moves again, which rules out cycling.

use crate::error::{Error, Result};

/// Feasibility and optimality tolerance.
pub const LP_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const DROP_TOL: f64 = 1e-14;
const REINVERT_EVERY: usize = 100;
const DEGENERATE_RUN: usize = 30;

/// Problem data; columns are sparse `(row, value)` lists.
#[derive(Clone, Debug)]
pub struct SparseLp {
    pub rows: usize,
    pub columns: Vec<Vec<(usize, f64)>>,
    pub cost: Vec<f64>,
    pub rhs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Simplex multipliers `y` with `yᵀB = c_B`.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

struct Eta {
    row: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

struct Basis {
    /// Initial signed identity; rows with no unit column use +1.
    diag: Vec<f64>,
    etas: Vec<Eta>,
    /// Variable basic in each row position.
    heading: Vec<usize>,
}

impl Basis {
    fn ftran(&self, x: &mut [f64]) {
        for (xi, d) in x.iter_mut().zip(&self.diag) {
            *xi *= d;
        }
        for eta in &self.etas {
            let xr = x[eta.row];
            if xr == 0.0 {
                continue;
            }
            let xr = xr / eta.pivot;
            for &(i, u) in &eta.entries {
                x[i] -= u * xr;
            }
            x[eta.row] = xr;
        }
    }

    fn btran(&self, z: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut acc = z[eta.row];
            for &(i, u) in &eta.entries {
                acc -= z[i] * u;
            }
            z[eta.row] = acc / eta.pivot;
        }
        for (zi, d) in z.iter_mut().zip(&self.diag) {
            *zi *= d;
        }
    }

    /// Appends the eta for column `u` (already FTRAN'd) pivoting on `row`.
    fn push(&mut self, row: usize, u: &[f64]) {
        let entries = u
            .iter()
            .enumerate()
            .filter(|&(i, &v)| i != row && v.abs() > DROP_TOL)
            .map(|(i, &v)| (i, v))
            .collect();
        self.etas.push(Eta {
            row,
            pivot: u[row],
            entries,
        });
    }
}

fn unit_row(col: &[(usize, f64)]) -> Option<(usize, f64)> {
    match col {
        [(r, v)] if v.abs() == 1.0 => Some((*r, *v)),
        _ => None,
    }
}

impl SparseLp {
    fn dense_column(&self, j: usize) -> Vec<f64> {
        let mut a = vec![0.0; self.rows];
        for &(i, v) in &self.columns[j] {
            a[i] += v;
        }
        a
    }

    /// Rebuilds the product form from scratch for the current basic set.
    fn reinvert(&self, basic: &[usize]) -> Result<Basis> {
        let m = self.rows;
        let mut basis = Basis {
            diag: vec![1.0; m],
            etas: Vec::new(),
            heading: vec![usize::MAX; m],
        };
        let mut structural = Vec::new();
        for &j in basic {
            match unit_row(&self.columns[j]) {
                Some((r, v)) if basis.heading[r] == usize::MAX => {
                    basis.heading[r] = j;
                    basis.diag[r] = v;
                }
                _ => structural.push(j),
            }
        }
        for j in structural {
            let mut u = self.dense_column(j);
            basis.ftran(&mut u);
            let mut best = None;
            let mut best_abs = PIVOT_TOL;
            for (r, &v) in u.iter().enumerate() {
                if basis.heading[r] == usize::MAX && v.abs() > best_abs {
                    best_abs = v.abs();
                    best = Some(r);
                }
            }
            let r = best.ok_or_else(|| Error::LpNumericalFailure("singular basis".into()))?;
            basis.push(r, &u);
            basis.heading[r] = j;
        }
        if basis.heading.iter().any(|&h| h == usize::MAX) {
            return Err(Error::LpNumericalFailure("basis does not span".into()));
        }
        Ok(basis)
    }

    fn primal_values(&self, basis: &Basis) -> Vec<f64> {
        let mut x = self.rhs.clone();
        basis.ftran(&mut x);
        x
    }

    /// Solves from the given feasible basis of signed unit columns (one per row).
    pub fn solve(&self, initial: &[usize]) -> Result<LpSolution> {
        let m = self.rows;
        let ncols = self.columns.len();
        if initial.len() != m {
            return Err(Error::LpNumericalFailure("initial basis has wrong size".into()));
        }
        let mut basis = self.reinvert(initial)?;
        let mut xb = self.primal_values(&basis);
        if xb.iter().any(|&v| v < -LP_TOL) {
            return Err(Error::LpNumericalFailure("initial basis is infeasible".into()));
        }
        let cost_scale = self.cost.iter().fold(1.0f64, |a, c| a.max(c.abs()));
        let opt_tol = LP_TOL * cost_scale;
        let mut is_basic = vec![false; ncols];
        for &j in &basis.heading {
            is_basic[j] = true;
        }
        let mut iterations = 0;
        let mut degenerate = 0;
        let mut since_reinvert = 0;
        let max_iter = 50 * (m + ncols) + 1000;
        loop {
            let mut y: Vec<f64> = basis.heading.iter().map(|&j| self.cost[j]).collect();
            basis.btran(&mut y);
            let bland = degenerate >= DEGENERATE_RUN;
            let mut entering = None;
            let mut best = -opt_tol;
            for j in 0..ncols {
                if is_basic[j] {
                    continue;
                }
                let d = self.cost[j] - self.columns[j].iter().map(|&(i, v)| y[i] * v).sum::<f64>();
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                let mut x = vec![0.0; ncols];
                for (r, &j) in basis.heading.iter().enumerate() {
                    x[j] = xb[r].max(0.0);
                }
                let objective = x.iter().zip(&self.cost).map(|(a, c)| a * c).sum();
                return Ok(LpSolution {
                    x,
                    objective,
                    duals: y,
                    iterations,
                });
            };
            let mut u = self.dense_column(q);
            basis.ftran(&mut u);
            let mut leave: Option<usize> = None;
            let mut theta = f64::INFINITY;
            for r in 0..m {
                if u[r] <= PIVOT_TOL {
                    continue;
                }
                let t = xb[r].max(0.0) / u[r];
                let take = match leave {
                    None => true,
                    Some(_) if t < theta - 1e-12 => true,
                    Some(l) if t <= theta + 1e-12 => {
                        if bland {
                            basis.heading[r] < basis.heading[l]
                        } else {
                            u[r] > u[l]
                        }
                    }
                    _ => false,
                };
                if take {
                    leave = Some(r);
                    theta = theta.min(t);
                }
            }
            let r = leave.ok_or_else(|| Error::LpNumericalFailure("problem is unbounded".into()))?;
            let theta = xb[r].max(0.0) / u[r];
            for i in 0..m {
                if i != r && u[i] != 0.0 {
                    xb[i] -= theta * u[i];
                    if xb[i] < 0.0 && xb[i] > -LP_TOL {
                        xb[i] = 0.0;
                    }
                }
            }
            xb[r] = theta;
            degenerate = if theta <= 1e-12 { degenerate + 1 } else { 0 };
            is_basic[basis.heading[r]] = false;
            is_basic[q] = true;
            basis.push(r, &u);
            basis.heading[r] = q;
            iterations += 1;
            since_reinvert += 1;
            if since_reinvert >= REINVERT_EVERY {
                let heading = basis.heading.clone();
                basis = self.reinvert(&heading)?;
                xb = self.primal_values(&basis);
                if xb.iter().any(|&v| v < -1e3 * LP_TOL) {
                    return Err(Error::LpNumericalFailure("lost primal feasibility".into()));
                }
                since_reinvert = 0;
            }
            if iterations > max_iter {
                return Err(Error::LpNumericalFailure("iteration limit reached".into()));
            }
        }
    }
}
