//! Network simplex specialized to the bipartite transportation problem.
//!
//! The basis is a spanning tree on `k` row nodes and `l` column nodes with
//! exactly `k + l - 1` cells (degenerate cells carry zero flow). Potentials
//! are read off the tree; the entering cell is the first one, in row-major
//! order, with negative reduced cost, and ties for the leaving cell go to the
//! smallest cell index.

use std::collections::VecDeque;

use crate::domain::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TransportSolution {
    pub flow: Matrix,
    pub row_potentials: Vec<f64>,
    pub col_potentials: Vec<f64>,
    pub pivots: usize,
}

/// Minimizes `sum C_ij x_ij` over `x >= 0` with row sums `supply` and column
/// sums `demand`. Both vectors must be strictly positive with equal totals.
pub fn transportation_simplex(
    cost: &Matrix,
    supply: &[f64],
    demand: &[f64],
) -> Result<TransportSolution> {
    let (k, l) = (supply.len(), demand.len());
    if cost.rows() != k || cost.cols() != l {
        return Err(Error::DimensionMismatch {
            expected: k * l,
            found: cost.rows() * cost.cols(),
        });
    }
    if k == 0 || l == 0 {
        return Err(Error::Empty("transport marginals"));
    }
    let scale = cost.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let eps = 1e-12 * scale;

    let mut flow = Matrix::zeros(k, l);
    let mut basic = vec![false; k * l];
    let mut basis: Vec<(usize, usize)> = Vec::with_capacity(k + l - 1);

    // north-west corner start
    let mut rs = supply.to_vec();
    let mut cs = demand.to_vec();
    let (mut i, mut j) = (0, 0);
    loop {
        let q = rs[i].min(cs[j]).max(0.0);
        flow[(i, j)] = q;
        rs[i] -= q;
        cs[j] -= q;
        basic[i * l + j] = true;
        basis.push((i, j));
        if i == k - 1 && j == l - 1 {
            // absorb rounding left over from unequal floating totals
            flow[(i, j)] += rs[i].max(cs[j]).max(0.0);
            break;
        }
        if j == l - 1 || (i < k - 1 && rs[i] <= cs[j]) {
            i += 1;
        } else {
            j += 1;
        }
    }

    let max_pivots = 100 * (k * l).max(16);
    let mut pivots = 0;
    loop {
        let (u, v) = tree_potentials(cost, &basis, k, l);
        let entering = (0..k * l)
            .filter(|&c| !basic[c])
            .map(|c| (c / l, c % l))
            .find(|&(r, c)| cost[(r, c)] - u[r] - v[c] < -eps);
        let Some((ei, ej)) = entering else {
            return Ok(TransportSolution {
                flow,
                row_potentials: u,
                col_potentials: v,
                pivots,
            });
        };
        if pivots == max_pivots {
            return Err(Error::Numerical(format!(
                "network simplex did not converge in {max_pivots} pivots"
            )));
        }
        pivots += 1;

        let path = tree_path(&basis, k, l, ej, ei);
        // entering cell gains flow; signs alternate around the cycle
        let minus: Vec<(usize, usize)> = path.iter().copied().step_by(2).collect();
        let plus: Vec<(usize, usize)> = path.iter().copied().skip(1).step_by(2).collect();
        let (theta, leaving) = minus
            .iter()
            .map(|&(r, c)| (flow[(r, c)], (r, c)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .expect("cycle has a decreasing cell");
        let theta = theta.max(0.0);
        for &(r, c) in &minus {
            flow[(r, c)] = (flow[(r, c)] - theta).max(0.0);
        }
        for &(r, c) in &plus {
            flow[(r, c)] += theta;
        }
        flow[(ei, ej)] = theta;
        flow[leaving] = 0.0;
        basic[leaving.0 * l + leaving.1] = false;
        basic[ei * l + ej] = true;
        let pos = basis
            .iter()
            .position(|&b| b == leaving)
            .expect("leaving cell is basic");
        basis[pos] = (ei, ej);
    }
}

/// Row potentials `u` and column potentials `v` with `u_i + v_j = C_ij` on the tree, `u_0 = 0`.
fn tree_potentials(
    cost: &Matrix,
    basis: &[(usize, usize)],
    k: usize,
    l: usize,
) -> (Vec<f64>, Vec<f64>) {
    let adj = adjacency(basis, k, l);
    let mut pot = vec![f64::NAN; k + l];
    pot[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        for &(r, c) in &adj[node] {
            let other = if node < k { k + c } else { r };
            if pot[other].is_nan() {
                pot[other] = cost[(r, c)] - pot[node];
                queue.push_back(other);
            }
        }
    }
    (pot[..k].to_vec(), pot[k..].to_vec())
}

fn adjacency(basis: &[(usize, usize)], k: usize, l: usize) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); k + l];
    for &(r, c) in basis {
        adj[r].push((r, c));
        adj[k + c].push((r, c));
    }
    adj
}

/// Cells on the tree path from column node `col` to row node `row`.
fn tree_path(
    basis: &[(usize, usize)],
    k: usize,
    l: usize,
    col: usize,
    row: usize,
) -> Vec<(usize, usize)> {
    let adj = adjacency(basis, k, l);
    let start = k + col;
    let mut parent: Vec<Option<(usize, (usize, usize))>> = vec![None; k + l];
    let mut seen = vec![false; k + l];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == row {
            break;
        }
        for &(r, c) in &adj[node] {
            let other = if node < k { k + c } else { r };
            if !seen[other] {
                seen[other] = true;
                parent[other] = Some((node, (r, c)));
                queue.push_back(other);
            }
        }
    }
    let mut cells = Vec::new();
    let mut node = row;
    while let Some((prev, cell)) = parent[node] {
        cells.push(cell);
        node = prev;
    }
    cells.reverse();
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn value(cost: &Matrix, flow: &Matrix) -> f64 {
        cost.iter().zip(flow.iter()).map(|(c, x)| c * x).sum()
    }

    #[test]
    fn textbook_instance() {
        // classic 3x4 example with optimum 743
        let cost = Matrix::from_rows(vec![
            vec![19.0, 30.0, 50.0, 10.0],
            vec![70.0, 30.0, 40.0, 60.0],
            vec![40.0, 8.0, 70.0, 20.0],
        ])
        .unwrap();
        let s = transportation_simplex(&cost, &[7.0, 9.0, 18.0], &[5.0, 8.0, 7.0, 14.0]).unwrap();
        assert_relative_eq!(value(&cost, &s.flow), 743.0, epsilon = 1e-9);
        for i in 0..3 {
            for j in 0..4 {
                let reduced = cost[(i, j)] - s.row_potentials[i] - s.col_potentials[j];
                assert!(reduced >= -1e-9);
                if s.flow[(i, j)] > 1e-12 {
                    assert!(reduced.abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn single_cells_and_columns() {
        let cost = Matrix::from_rows(vec![vec![2.0]]).unwrap();
        let s = transportation_simplex(&cost, &[1.0], &[1.0]).unwrap();
        assert_eq!(s.flow[(0, 0)], 1.0);
        assert_eq!(s.row_potentials[0] + s.col_potentials[0], 2.0);

        let cost = Matrix::from_rows(vec![vec![1.0], vec![3.0]]).unwrap();
        let s = transportation_simplex(&cost, &[0.5, 0.5], &[1.0]).unwrap();
        assert_eq!(s.flow.to_rows(), vec![vec![0.5], vec![0.5]]);
    }

    #[test]
    fn degenerate_uniform_instance() {
        // every north-west step is degenerate on a uniform square instance
        let cost = Matrix::from_fn(4, 4, |i, j| ((i + j) % 4) as f64);
        let w = [0.25; 4];
        let s = transportation_simplex(&cost, &w, &w).unwrap();
        assert_relative_eq!(value(&cost, &s.flow), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(transportation_simplex(&Matrix::zeros(2, 2), &[1.0], &[0.5, 0.5]).is_err());
    }
}
