//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Solves `min c^T x` subject to linear rows `a^T x {<=, >=, =} b` and
//! `x >= 0`. Sized for the Afriat system at desk scale (a few thousand rows).

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Minimized.
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible { phase_one_residual: f64 },
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Largest amount by which `x` breaks a row or the sign constraints.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().map(|v| -v).fold(0.0, f64::max);
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

struct Tableau {
    /// `rows x (cols + 1)`, last column is the right-hand side.
    t: Vec<Vec<f64>>,
    /// Reduced costs, last entry is minus the objective value.
    z: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = line[col];
            if f != 0.0 {
                for (v, pv) in line.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                line[col] = 0.0;
            }
        }
        let f = self.z[col];
        if f != 0.0 {
            for (v, pv) in self.z.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.z[col] = 0.0;
        }
        self.basis[row] = col;
    }

    fn set_objective(&mut self, costs: &[f64]) {
        self.z = vec![0.0; self.cols + 1];
        self.z[..costs.len()].copy_from_slice(costs);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = self.z[b];
            if cb != 0.0 {
                for (v, tv) in self.z.iter_mut().zip(&self.t[r]) {
                    *v -= cb * tv;
                }
            }
        }
    }

    /// Runs Bland's-rule pivots over columns `< allowed`. Returns `false` when unbounded.
    fn optimize(&mut self, allowed: usize, max_iter: usize) -> Result<bool> {
        for _ in 0..max_iter {
            let Some(col) = (0..allowed).find(|&c| self.z[c] < -PIVOT_EPS) else {
                return Ok(true);
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for (r, line) in self.t.iter().enumerate() {
                let a = line[col];
                if a > PIVOT_EPS {
                    let ratio = line[self.cols] / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bvar)) => {
                            ratio < br - PIVOT_EPS
                                || (ratio <= br + PIVOT_EPS && self.basis[r] < bvar)
                        }
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, row, _)) = best else {
                return Ok(false);
            };
            self.pivot(row, col);
        }
        Err(Error::Numerical(format!(
            "simplex exceeded {max_iter} iterations"
        )))
    }
}

/// Two-phase simplex. `feasibility_tol` bounds the phase-one objective accepted as feasible.
pub fn solve(lp: &LinearProgram, feasibility_tol: f64) -> Result<LpOutcome> {
    let n = lp.num_vars;
    if lp.objective.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: lp.objective.len(),
        });
    }
    for c in &lp.constraints {
        if c.coeffs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.coeffs.len(),
            });
        }
        if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite LP coefficient".into()));
        }
    }

    // Normalize to nonnegative right-hand sides.
    let rows: Vec<(Vec<f64>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), rel, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let art_start = n + n_slack;
    let cols = art_start + n_art;

    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0; m];
    let (mut slack, mut art) = (n, art_start);
    for (r, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        t[r][..n].copy_from_slice(coeffs);
        t[r][cols] = *rhs;
        match rel {
            Relation::Le => {
                t[r][slack] = 1.0;
                basis[r] = slack;
                slack += 1;
            }
            Relation::Ge => {
                t[r][slack] = -1.0;
                slack += 1;
                t[r][art] = 1.0;
                basis[r] = art;
                art += 1;
            }
            Relation::Eq => {
                t[r][art] = 1.0;
                basis[r] = art;
                art += 1;
            }
        }
    }
    let mut tab = Tableau {
        t,
        z: Vec::new(),
        basis,
        cols,
    };
    let max_iter = 50 * (m + cols).max(10);

    if n_art > 0 {
        let mut phase_one = vec![0.0; cols];
        phase_one[art_start..].iter_mut().for_each(|v| *v = 1.0);
        tab.set_objective(&phase_one);
        tab.optimize(cols, max_iter)?;
        let residual = -tab.z[cols];
        if residual > feasibility_tol {
            return Ok(LpOutcome::Infeasible {
                phase_one_residual: residual,
            });
        }
        // Drive remaining artificials out of the basis; rows with no usable
        // pivot are redundant and dropped.
        let mut r = 0;
        while r < tab.t.len() {
            if tab.basis[r] >= art_start {
                match (0..art_start).find(|&c| tab.t[r][c].abs() > 1e-9) {
                    Some(c) => tab.pivot(r, c),
                    None => {
                        tab.t.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    tab.set_objective(&lp.objective);
    if !tab.optimize(art_start, max_iter)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.t[r][cols].max(0.0);
        }
    }
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpOutcome::Optimal { x, objective })
}
