//! Revealed-preference graph and the HARP / GARP consistency checks.
//!
//! The graph has one node per observation. The edge `i -> j` carries
//! `a_ij = ln b(X^j, P^i) - ln b(X^i, P^i)`: the log cost increment of buying
//! bundle `j` at the prices of observation `i`. A dataset admits a positive
//! homogeneous utility exactly when no cycle has negative total weight.

use std::collections::VecDeque;

use serde::Serialize;

use crate::combinatorics::{
    canonical_rotation, for_each_permutation, for_each_simple_cycle, permutation_cycles,
};
use crate::domain::{dot, log_cost, Dataset, InnerProduct, Kernel, Matrix};
use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest instance the exhaustive oracles will enumerate.
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

/// Edge weights of the revealed-preference graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossLogMatrix {
    a: Matrix,
}

impl CrossLogMatrix {
    /// Wraps an arbitrary square matrix of finite weights with a zero diagonal.
    pub fn from_matrix(a: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: a.cols(),
            });
        }
        if a.rows() == 0 {
            return Err(Error::Empty("cross log matrix"));
        }
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let v = a[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        coordinate: i * a.cols() + j,
                        value: v,
                    });
                }
            }
            if a[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry {i} is {} (must be 0)",
                    a[(i, i)]
                )));
            }
        }
        Ok(Self { a })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[(i, j)]
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.a
    }

    /// Sum of `a` along `c0 -> c1 -> ... -> c0`.
    pub fn cycle_sum(&self, cycle: &[usize]) -> f64 {
        if cycle.len() < 2 {
            return 0.0;
        }
        cycle
            .iter()
            .zip(cycle.iter().cycle().skip(1))
            .map(|(&i, &j)| self.a[(i, j)])
            .sum()
    }
}

pub fn cross_log_matrix(data: &Dataset, kernel: &dyn Kernel) -> CrossLogMatrix {
    let n = data.len();
    let mut costs = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // dimensions are validated by Dataset
            costs[(i, j)] = log_cost(data.bundle(j), data.prices(i), kernel)
                .expect("dataset dimensions are consistent");
        }
    }
    let a = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            costs[(i, j)] - costs[(i, i)]
        }
    });
    CrossLogMatrix { a }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Rationalizable,
    Violated,
}

/// A directed cycle `indices[0] -> indices[1] -> ... -> indices[0]` and its weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cycle {
    pub indices: Vec<usize>,
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Cycle>,
    /// Smallest weight over cycles of length at least two, when the checker
    /// computes it. A value in `[-tolerance, tolerance]` marks boundary data
    /// that only satisfies the cycle inequalities with equality.
    pub min_cycle_sum: Option<f64>,
}

impl Verdict {
    fn satisfied(min_cycle_sum: Option<f64>) -> Self {
        Self {
            status: Status::Rationalizable,
            witness: None,
            min_cycle_sum,
        }
    }

    fn violated(witness: Cycle) -> Self {
        Self {
            status: Status::Violated,
            min_cycle_sum: Some(witness.sum),
            witness: Some(witness),
        }
    }

    pub fn is_rationalizable(&self) -> bool {
        self.status == Status::Rationalizable
    }

    /// True when rationalizable only with some cycle held at equality.
    pub fn is_boundary(&self, tolerance: f64) -> bool {
        self.is_rationalizable() && self.min_cycle_sum.is_some_and(|s| s <= tolerance)
    }
}

/// Decides HARP by Floyd–Warshall relaxation on the cross log matrix.
pub fn check_harp(data: &Dataset, kernel: &dyn Kernel, tolerance: f64) -> Verdict {
    harp_on_matrix(&cross_log_matrix(data, kernel), tolerance)
}

/// Floyd–Warshall negative-cycle detection on any cross log matrix.
///
/// Relaxation stops the first time a closed walk of weight `< -tolerance`
/// appears; the walk is split into simple cycles and the most negative one is
/// returned as the witness.
pub fn harp_on_matrix(a: &CrossLogMatrix, tolerance: f64) -> Verdict {
    match floyd_warshall(a, tolerance) {
        Closure::Complete(dist) => {
            let n = a.n();
            let mut min_sum: Option<f64> = None;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let s = dist[(i, j)] + a.get(j, i);
                        min_sum = Some(min_sum.map_or(s, |m: f64| m.min(s)));
                    }
                }
            }
            Verdict::satisfied(min_sum)
        }
        Closure::NegativeWalk(walk) => {
            let best = split_closed_walk(&walk)
                .into_iter()
                .map(|c| Cycle {
                    sum: a.cycle_sum(&c),
                    indices: canonical_rotation(&c),
                })
                .min_by(|x, y| x.sum.total_cmp(&y.sum));
            match best {
                Some(cycle) if cycle.sum < -tolerance => Verdict::violated(cycle),
                _ => match bellman_ford_cycle(a, tolerance) {
                    Some(cycle) => Verdict::violated(cycle),
                    None => Verdict::satisfied(best.map(|c| c.sum)),
                },
            }
        }
    }
}

enum Closure {
    Complete(Matrix),
    NegativeWalk(Vec<usize>),
}

fn floyd_warshall(a: &CrossLogMatrix, tolerance: f64) -> Closure {
    let n = a.n();
    let mut dist = a.as_matrix().clone();
    // next[(i, j)]: first hop after i on the current best i -> j path.
    let mut next: Vec<usize> = (0..n * n).map(|ij| ij % n).collect();
    let mut unresolved = false;
    for k in 0..n {
        for i in 0..n {
            let dik = dist[(i, k)];
            for j in 0..n {
                let candidate = dik + dist[(k, j)];
                if candidate >= dist[(i, j)] {
                    continue;
                }
                if i == j {
                    if candidate < -tolerance {
                        match closed_walk(&next, n, i, k) {
                            Some(walk) => return Closure::NegativeWalk(walk),
                            None => unresolved = true,
                        }
                    }
                    // diagonal stays at zero
                    continue;
                }
                dist[(i, j)] = candidate;
                next[i * n + j] = next[i * n + k];
            }
        }
    }
    if unresolved {
        // an empty walk sends the caller to the Bellman–Ford fallback
        return Closure::NegativeWalk(Vec::new());
    }
    Closure::Complete(dist)
}

fn path(next: &[usize], n: usize, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut out = vec![from];
    let mut u = from;
    while u != to {
        u = next[u * n + to];
        out.push(u);
        if out.len() > n + 1 {
            return None;
        }
    }
    Some(out)
}

/// Vertices of the closed walk `i -> ... -> k -> ... -> i`, without the final return to `i`.
fn closed_walk(next: &[usize], n: usize, i: usize, k: usize) -> Option<Vec<usize>> {
    let mut walk = path(next, n, i, k)?;
    let back = path(next, n, k, i)?;
    walk.extend(&back[1..back.len() - 1]);
    Some(walk)
}

/// Splits a closed walk into simple cycles whose weights add up to the walk's.
fn split_closed_walk(walk: &[usize]) -> Vec<Vec<usize>> {
    let mut cycles = Vec::new();
    let mut stack: Vec<usize> = Vec::with_capacity(walk.len());
    for &v in walk.iter().chain(walk.first()) {
        if let Some(p) = stack.iter().position(|&u| u == v) {
            let cycle = stack[p..].to_vec();
            if cycle.len() >= 2 {
                cycles.push(cycle);
            }
            stack.truncate(p + 1);
        } else {
            stack.push(v);
        }
    }
    cycles
}

/// Fallback witness search: Bellman–Ford from a virtual source, then a walk
/// back along predecessors until a vertex repeats.
fn bellman_ford_cycle(a: &CrossLogMatrix, tolerance: f64) -> Option<Cycle> {
    let n = a.n();
    let mut dist = vec![0.0_f64; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last = None;
    for _ in 0..=n {
        last = None;
        for u in 0..n {
            for v in 0..n {
                if u != v && dist[u] + a.get(u, v) < dist[v] {
                    dist[v] = dist[u] + a.get(u, v);
                    pred[v] = Some(u);
                    last = Some(v);
                }
            }
        }
        last?;
    }
    let mut v = last?;
    for _ in 0..n {
        v = pred[v]?;
    }
    let mut cycle = vec![v];
    let mut u = pred[v]?;
    while u != v {
        cycle.push(u);
        u = pred[u]?;
    }
    // predecessor links run against edge direction
    cycle.reverse();
    let sum = a.cycle_sum(&cycle);
    (sum < -tolerance).then(|| Cycle {
        indices: canonical_rotation(&cycle),
        sum,
    })
}

/// Exhaustive oracle: evaluates every simple cycle of length `2..=n`.
pub fn brute_force_cycle_check(
    data: &Dataset,
    kernel: &dyn Kernel,
    tolerance: f64,
) -> Result<Verdict> {
    brute_force_cycle_check_capped(data, kernel, tolerance, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_cycle_check_capped(
    data: &Dataset,
    kernel: &dyn Kernel,
    tolerance: f64,
    cap: usize,
) -> Result<Verdict> {
    if data.len() > cap {
        return Err(Error::CapExceeded {
            size: data.len(),
            cap,
        });
    }
    let a = cross_log_matrix(data, kernel);
    let mut min_cycle: Option<Cycle> = None;
    for_each_simple_cycle(a.n(), |c| {
        let sum = a.cycle_sum(c);
        if min_cycle.as_ref().is_none_or(|m| sum < m.sum) {
            min_cycle = Some(Cycle {
                indices: c.to_vec(),
                sum,
            });
        }
    });
    Ok(match min_cycle {
        Some(c) if c.sum < -tolerance => Verdict::violated(c),
        other => Verdict::satisfied(other.map(|c| c.sum)),
    })
}

/// Checks `sum_i c(x_i, y_i) <= sum_i c(x_i, y_sigma(i)) + tolerance` over every
/// permutation `sigma` of the given pairs, for an arbitrary cost.
///
/// A violation is reported as the most negative cycle of the worst
/// permutation, oriented like [`CrossLogMatrix`]: along `i -> j` the bundle
/// `x_j` is priced at `y_i`.
pub fn check_cyclical_monotonicity<X, Y>(
    points: &[(X, Y)],
    cost: impl Fn(&X, &Y) -> f64,
    tolerance: f64,
) -> Result<Verdict> {
    check_cyclical_monotonicity_capped(points, cost, tolerance, DEFAULT_ENUMERATION_CAP)
}

pub fn check_cyclical_monotonicity_capped<X, Y>(
    points: &[(X, Y)],
    cost: impl Fn(&X, &Y) -> f64,
    tolerance: f64,
    cap: usize,
) -> Result<Verdict> {
    let n = points.len();
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    let c = Matrix::from_fn(n, n, |i, j| cost(&points[i].0, &points[j].1));
    let diagonal: f64 = (0..n).map(|i| c[(i, i)]).sum();
    // excess of the best non-identity permutation over the diagonal pairing
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_permutation(n, |sigma| {
        if sigma.iter().enumerate().all(|(i, &s)| i == s) {
            return;
        }
        let total: f64 = sigma.iter().enumerate().map(|(i, &s)| c[(i, s)]).sum();
        let excess = total - diagonal;
        if best.as_ref().is_none_or(|(b, _)| excess < *b) {
            best = Some((excess, sigma.to_vec()));
        }
    });
    let Some((excess, sigma)) = best else {
        return Ok(Verdict::satisfied(None));
    };
    if excess >= -tolerance {
        return Ok(Verdict::satisfied(Some(excess)));
    }
    let witness = permutation_cycles(&sigma)
        .into_iter()
        .map(|cyc| {
            let sum = cyc.iter().map(|&i| c[(i, sigma[i])] - c[(i, i)]).sum();
            let mut oriented = cyc;
            oriented.reverse();
            Cycle {
                indices: canonical_rotation(&oriented),
                sum,
            }
        })
        .min_by(|x, y| x.sum.total_cmp(&y.sum))
        .expect("non-identity permutation has a cycle");
    Ok(Verdict {
        status: Status::Violated,
        witness: Some(witness),
        min_cycle_sum: Some(excess),
    })
}

/// GARP via Warshall's transitive closure of the direct revealed-preference relation.
///
/// `i R0 j` iff `<P^i, X^i> >= <P^i, X^j> - tolerance`; a violation is a pair
/// with `i R j` and `<P^j, X^j> > <P^j, X^i> + tolerance`. The witness sum is
/// measured on the inner-product cross log matrix.
pub fn check_garp(data: &Dataset, tolerance: f64) -> Verdict {
    let n = data.len();
    let spend = Matrix::from_fn(n, n, |i, j| {
        dot(data.bundle(j).as_slice(), data.prices(i).as_slice())
    });
    let direct: Vec<bool> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            spend[(i, i)] >= spend[(i, j)] - tolerance
        })
        .collect();
    let mut reach = direct.clone();
    for k in 0..n {
        for i in 0..n {
            if !reach[i * n + k] {
                continue;
            }
            for j in 0..n {
                if reach[k * n + j] {
                    reach[i * n + j] = true;
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && reach[i * n + j] && spend[(j, j)] > spend[(j, i)] + tolerance {
                let cycle = relation_path(&direct, n, i, j).expect("closure implies a direct path");
                let a = cross_log_matrix(data, &InnerProduct);
                let sum = a.cycle_sum(&cycle);
                return Verdict::violated(Cycle {
                    indices: canonical_rotation(&cycle),
                    sum,
                });
            }
        }
    }
    Verdict::satisfied(None)
}

/// Shortest path `from -> ... -> to` in a boolean adjacency relation.
fn relation_path(adj: &[bool], n: usize, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; n];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut out = vec![to];
            let mut v = to;
            while v != from {
                v = parent[v];
                out.push(v);
            }
            out.reverse();
            return Some(out);
        }
        for v in 0..n {
            if adj[u * n + v] && parent[v] == usize::MAX {
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}
