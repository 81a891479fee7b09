use serde::Serialize;

use crate::combinatorics::for_each_permutation;
use crate::domain::Matrix;
use crate::error::{Error, Result};

/// Largest size [`brute_force_assignment`] enumerates.
pub const ASSIGNMENT_ORACLE_CAP: usize = 10;

/// A permutation `row -> column` and its total cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    pub permutation: Vec<usize>,
    pub value: f64,
}

pub fn permutation_value(cost: &Matrix, perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum()
}

fn require_square(cost: &Matrix) -> Result<()> {
    if cost.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: cost.rows(),
            found: cost.cols(),
        })
    }
}

/// Exhaustive minimum over all permutations; the lexicographically first
/// minimizer wins ties.
pub fn brute_force_assignment(cost: &Matrix) -> Result<Assignment> {
    require_square(cost)?;
    let n = cost.rows();
    if n > ASSIGNMENT_ORACLE_CAP {
        return Err(Error::CapExceeded {
            size: n,
            cap: ASSIGNMENT_ORACLE_CAP,
        });
    }
    let mut best = Assignment {
        permutation: (0..n).collect(),
        value: f64::INFINITY,
    };
    for_each_permutation(n, |perm| {
        let v = permutation_value(cost, perm);
        if v < best.value {
            best.value = v;
            best.permutation.copy_from_slice(perm);
        }
    });
    if n == 0 {
        best.value = 0.0;
    }
    Ok(best)
}

/// Values of every permutation, in lexicographic order.
pub fn all_permutation_values(cost: &Matrix) -> Result<Vec<(Vec<usize>, f64)>> {
    require_square(cost)?;
    let n = cost.rows();
    if n > ASSIGNMENT_ORACLE_CAP {
        return Err(Error::CapExceeded {
            size: n,
            cap: ASSIGNMENT_ORACLE_CAP,
        });
    }
    let mut out = Vec::new();
    for_each_permutation(n, |perm| {
        out.push((perm.to_vec(), permutation_value(cost, perm)))
    });
    Ok(out)
}

/// Optimal assignment together with row and column duals `u_i + v_j <= C_ij`,
/// tight on the chosen cells.
#[derive(Debug, Clone, PartialEq)]
pub struct HungarianSolution {
    pub assignment: Assignment,
    pub row_duals: Vec<f64>,
    pub col_duals: Vec<f64>,
}

/// Hungarian method with shortest augmenting paths, `O(n^3)`.
pub fn hungarian(cost: &Matrix) -> Result<HungarianSolution> {
    require_square(cost)?;
    if cost.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite assignment cost".into()));
    }
    let n = cost.rows();
    // 1-based; index 0 is a virtual column used to seed each augmentation
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let i0 = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = col0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    col1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            owner[col0] = owner[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut permutation = vec![0; n];
    for j in 1..=n {
        permutation[owner[j] - 1] = j - 1;
    }
    let value = permutation_value(cost, &permutation);
    Ok(HungarianSolution {
        assignment: Assignment { permutation, value },
        row_duals: u[1..].to_vec(),
        col_duals: v[1..].to_vec(),
    })
}

/// Minimum-cost permutation of a square cost matrix.
pub fn solve_assignment(cost: &Matrix) -> Result<Assignment> {
    Ok(hungarian(cost)?.assignment)
}
