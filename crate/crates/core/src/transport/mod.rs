//! Discrete Monge–Kantorovich problem with cost `ln b(x, p)`.
//!
//! Observations become a uniform coupling between bundles and prices. The
//! diagonal coupling `X^i -> P^i` is optimal exactly when the data satisfy
//! HARP, and its support is then c-cyclically monotone.

mod assignment;
mod network_simplex;

use serde::Serialize;

pub use assignment::{
    all_permutation_values, brute_force_assignment, hungarian, permutation_value, solve_assignment,
    Assignment, HungarianSolution, ASSIGNMENT_ORACLE_CAP,
};
pub use network_simplex::{transportation_simplex, TransportSolution};

use crate::domain::{log_cost, Bundle, Dataset, Kernel, Matrix, PriceVector, SharedKernel};
use crate::error::{Error, Result};
use crate::rationality::{check_cyclical_monotonicity, check_harp};

/// Marginal sums must match one within this bound.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Plan entries above this are part of the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Plan values closer than this are treated as tied.
pub const VALUE_TIE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct TransportInstance {
    sources: Vec<Bundle>,
    source_weights: Vec<f64>,
    targets: Vec<PriceVector>,
    target_weights: Vec<f64>,
    cost: Matrix,
    kernel: SharedKernel,
}

fn check_weights(weights: &[f64]) -> Result<f64> {
    for (coordinate, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "weight {coordinate} must be finite and nonnegative, got {w}"
            )));
        }
    }
    Ok(weights.iter().sum())
}

impl TransportInstance {
    pub fn new(
        sources: Vec<Bundle>,
        source_weights: Vec<f64>,
        targets: Vec<PriceVector>,
        target_weights: Vec<f64>,
        kernel: SharedKernel,
    ) -> Result<Self> {
        if sources.is_empty() || targets.is_empty() {
            return Err(Error::Empty("transport instance"));
        }
        for (len, expected) in [
            (source_weights.len(), sources.len()),
            (target_weights.len(), targets.len()),
        ] {
            if len != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    found: len,
                });
            }
        }
        let source_mass = check_weights(&source_weights)?;
        let target_mass = check_weights(&target_weights)?;
        if (source_mass - 1.0).abs() > MASS_TOLERANCE || (target_mass - 1.0).abs() > MASS_TOLERANCE
        {
            return Err(Error::Unbalanced {
                source_mass,
                target_mass,
            });
        }
        let mut cost = Matrix::zeros(sources.len(), targets.len());
        for (i, x) in sources.iter().enumerate() {
            for (j, y) in targets.iter().enumerate() {
                let c = log_cost(x, y, kernel.as_ref())?;
                if !c.is_finite() {
                    return Err(Error::NonFinite {
                        coordinate: i * targets.len() + j,
                        value: c,
                    });
                }
                cost[(i, j)] = c;
            }
        }
        Ok(Self {
            sources,
            source_weights,
            targets,
            target_weights,
            cost,
            kernel,
        })
    }

    /// Uniform weights `1/n` on the bundles and on the price vectors.
    pub fn from_dataset(data: &Dataset, kernel: SharedKernel) -> Result<Self> {
        let n = data.len();
        let w = vec![1.0 / n as f64; n];
        Self::new(
            data.bundles().cloned().collect(),
            w.clone(),
            data.price_vectors().cloned().collect(),
            w,
            kernel,
        )
    }

    pub fn sources(&self) -> &[Bundle] {
        &self.sources
    }

    pub fn targets(&self) -> &[PriceVector] {
        &self.targets
    }

    pub fn source_weights(&self) -> &[f64] {
        &self.source_weights
    }

    pub fn target_weights(&self) -> &[f64] {
        &self.target_weights
    }

    pub fn cost(&self) -> &Matrix {
        &self.cost
    }

    pub fn kernel(&self) -> &dyn Kernel {
        self.kernel.as_ref()
    }

    pub fn kernel_tag(&self) -> String {
        self.kernel.tag()
    }

    /// Same weights, every source and target scaled to unit Euclidean norm.
    pub fn project_to_sphere(&self) -> Result<Self> {
        Self::new(
            self.sources.iter().map(Bundle::normalized).collect(),
            self.source_weights.clone(),
            self.targets.iter().map(PriceVector::normalized).collect(),
            self.target_weights.clone(),
            self.kernel.clone(),
        )
    }

    fn is_uniform_square(&self) -> bool {
        let n = self.source_weights.len();
        if n != self.target_weights.len() {
            return false;
        }
        let w = 1.0 / n as f64;
        self.source_weights
            .iter()
            .chain(&self.target_weights)
            .all(|&x| (x - w).abs() <= 1e-15)
    }
}

/// A plan with the prescribed marginals and its total cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coupling {
    pub plan: Matrix,
    pub value: f64,
}

impl Coupling {
    pub fn new(plan: Matrix, inst: &TransportInstance) -> Result<Self> {
        if plan.rows() != inst.cost.rows() || plan.cols() != inst.cost.cols() {
            return Err(Error::DimensionMismatch {
                expected: inst.cost.rows() * inst.cost.cols(),
                found: plan.rows() * plan.cols(),
            });
        }
        let value = plan.iter().zip(inst.cost.iter()).map(|(p, c)| p * c).sum();
        Ok(Self { plan, value })
    }

    /// Uniform plan concentrated on `i -> perm[i]`.
    pub fn from_permutation(perm: &[usize], inst: &TransportInstance) -> Result<Self> {
        let n = perm.len();
        let mut plan = Matrix::zeros(inst.cost.rows(), inst.cost.cols());
        for (i, &j) in perm.iter().enumerate() {
            plan[(i, j)] = 1.0 / n as f64;
        }
        Self::new(plan, inst)
    }

    /// The plan pairing each bundle with its own price vector.
    pub fn diagonal(inst: &TransportInstance) -> Result<Self> {
        let perm: Vec<usize> = (0..inst.cost.rows()).collect();
        Self::from_permutation(&perm, inst)
    }

    /// Largest deviation of row or column sums from the instance marginals.
    pub fn marginal_error(&self, inst: &TransportInstance) -> f64 {
        let rows = (0..self.plan.rows())
            .map(|i| (self.plan.row(i).iter().sum::<f64>() - inst.source_weights[i]).abs());
        let cols = (0..self.plan.cols()).map(|j| {
            ((0..self.plan.rows())
                .map(|i| self.plan[(i, j)])
                .sum::<f64>()
                - inst.target_weights[j])
                .abs()
        });
        rows.chain(cols).fold(0.0, f64::max)
    }

    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for i in 0..self.plan.rows() {
            for j in 0..self.plan.cols() {
                if self.plan[(i, j)] > SUPPORT_THRESHOLD {
                    cells.push((i, j));
                }
            }
        }
        cells
    }
}

/// Kantorovich potentials `phi_i + psi_j <= C_ij`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPotentials {
    pub source: Vec<f64>,
    pub target: Vec<f64>,
}

impl DualPotentials {
    pub fn objective(&self, inst: &TransportInstance) -> f64 {
        let a: f64 = self
            .source
            .iter()
            .zip(&inst.source_weights)
            .map(|(p, w)| p * w)
            .sum();
        let b: f64 = self
            .target
            .iter()
            .zip(&inst.target_weights)
            .map(|(p, w)| p * w)
            .sum();
        a + b
    }

    /// Largest `phi_i + psi_j - C_ij` (`<= 0` when dual feasible).
    pub fn max_infeasibility(&self, cost: &Matrix) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (i, phi) in self.source.iter().enumerate() {
            for (j, psi) in self.target.iter().enumerate() {
                worst = worst.max(phi + psi - cost[(i, j)]);
            }
        }
        worst
    }

    /// Largest `|phi_i + psi_j - C_ij|` over the plan's support.
    pub fn max_slackness_gap(&self, plan: &Coupling, cost: &Matrix) -> f64 {
        plan.support()
            .into_iter()
            .map(|(i, j)| (self.source[i] + self.target[j] - cost[(i, j)]).abs())
            .fold(0.0, f64::max)
    }
}

/// Optimal coupling and dual potentials.
///
/// Square instances with uniform weights go to the Hungarian method; all
/// others to the network simplex. Zero-weight sources and targets are removed
/// before solving and receive the tightest feasible potentials afterwards.
pub fn solve_discrete_ot(inst: &TransportInstance) -> Result<(Coupling, DualPotentials)> {
    let rows: Vec<usize> = (0..inst.sources.len())
        .filter(|&i| inst.source_weights[i] > 0.0)
        .collect();
    let cols: Vec<usize> = (0..inst.targets.len())
        .filter(|&j| inst.target_weights[j] > 0.0)
        .collect();
    let reduced = Matrix::from_fn(rows.len(), cols.len(), |a, b| inst.cost[(rows[a], cols[b])]);

    let (flow, row_pot, col_pot) = if inst.is_uniform_square() {
        let h = hungarian(&reduced)?;
        let n = rows.len();
        let mut flow = Matrix::zeros(n, n);
        for (i, &j) in h.assignment.permutation.iter().enumerate() {
            flow[(i, j)] = 1.0 / n as f64;
        }
        (flow, h.row_duals, h.col_duals)
    } else {
        let supply: Vec<f64> = rows.iter().map(|&i| inst.source_weights[i]).collect();
        let demand: Vec<f64> = cols.iter().map(|&j| inst.target_weights[j]).collect();
        let s = transportation_simplex(&reduced, &supply, &demand)?;
        (s.flow, s.row_potentials, s.col_potentials)
    };

    let (k, l) = (inst.sources.len(), inst.targets.len());
    let mut plan = Matrix::zeros(k, l);
    let mut phi = vec![f64::NAN; k];
    let mut psi = vec![f64::NAN; l];
    for (a, &i) in rows.iter().enumerate() {
        phi[i] = row_pot[a];
        for (b, &j) in cols.iter().enumerate() {
            plan[(i, j)] = flow[(a, b)];
        }
    }
    for (b, &j) in cols.iter().enumerate() {
        psi[j] = col_pot[b];
    }
    for (i, p) in phi.iter_mut().enumerate() {
        if p.is_nan() {
            *p = cols
                .iter()
                .map(|&j| inst.cost[(i, j)] - psi[j])
                .fold(f64::INFINITY, f64::min);
        }
    }
    for (j, q) in psi.iter_mut().enumerate() {
        if q.is_nan() {
            *q = (0..k)
                .map(|i| inst.cost[(i, j)] - phi[i])
                .fold(f64::INFINITY, f64::min);
        }
    }
    Ok((
        Coupling::new(plan, inst)?,
        DualPotentials {
            source: phi,
            target: psi,
        },
    ))
}

/// Identity versus optimal assignment for the uniform bundle/price coupling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalReport {
    /// `sum_i ln b(X^i, P^i)`.
    pub identity_value: f64,
    pub optimal_value: f64,
    pub optimal_permutation: Vec<usize>,
    pub diagonal_optimal: bool,
}

pub fn diagonal_report(
    data: &Dataset,
    kernel: SharedKernel,
    tolerance: f64,
) -> Result<DiagonalReport> {
    let inst = TransportInstance::from_dataset(data, kernel)?;
    let identity: Vec<usize> = (0..data.len()).collect();
    let identity_value = permutation_value(&inst.cost, &identity);
    let best = solve_assignment(&inst.cost)?;
    Ok(DiagonalReport {
        identity_value,
        optimal_value: best.value,
        diagonal_optimal: identity_value <= best.value + tolerance,
        optimal_permutation: best.permutation,
    })
}

/// True iff pairing every bundle with its own prices solves the transport problem.
pub fn is_diagonal_optimal(data: &Dataset, kernel: SharedKernel, tolerance: f64) -> Result<bool> {
    Ok(diagonal_report(data, kernel, tolerance)?.diagonal_optimal)
}

/// Runs the permutation test for c-cyclical monotonicity on the plan's support.
pub fn check_support_cyclical_monotonicity(
    plan: &Coupling,
    inst: &TransportInstance,
    tolerance: f64,
) -> Result<bool> {
    let support = plan.support();
    let verdict = check_cyclical_monotonicity(&support, |&i, &j| inst.cost[(i, j)], tolerance)?;
    Ok(verdict.is_rationalizable())
}

/// `|LHS - RHS|` for
/// `sum pi ln b(x/|x|, y/|y|) = sum pi ln b(x, y) - sum mu ln|x| - sum nu ln|y|`.
pub fn cost_decomposition_check(plan: &Coupling, inst: &TransportInstance) -> f64 {
    let xs: Vec<Bundle> = inst.sources.iter().map(Bundle::normalized).collect();
    let ys: Vec<PriceVector> = inst.targets.iter().map(PriceVector::normalized).collect();
    let mut lhs = 0.0;
    let mut transport = 0.0;
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            let p = plan.plan[(i, j)];
            if p != 0.0 {
                lhs += p * inst.kernel.eval(x.as_slice(), y.as_slice()).ln();
                transport += p * inst.cost[(i, j)];
            }
        }
    }
    let source_norms: f64 = inst
        .sources
        .iter()
        .zip(&inst.source_weights)
        .map(|(x, w)| w * x.norm().ln())
        .sum();
    let target_norms: f64 = inst
        .targets
        .iter()
        .zip(&inst.target_weights)
        .map(|(y, w)| w * y.norm().ln())
        .sum();
    (lhs - (transport - source_norms - target_norms)).abs()
}

fn optimal_set(values: &[(Vec<usize>, f64)]) -> Vec<Vec<usize>> {
    let min = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    values
        .iter()
        .filter(|(_, v)| *v <= min + VALUE_TIE_TOLERANCE)
        .map(|(p, _)| p.clone())
        .collect()
}

/// True iff the optimal permutations for the original and sphere-projected
/// costs coincide (ties within [`VALUE_TIE_TOLERANCE`]).
pub fn projection_preserves_optimum(data: &Dataset, kernel: SharedKernel) -> Result<bool> {
    let inst = TransportInstance::from_dataset(data, kernel)?;
    let projected = inst.project_to_sphere()?;
    let original = all_permutation_values(&inst.cost)?;
    let sphere = all_permutation_values(&projected.cost)?;
    Ok(optimal_set(&original) == optimal_set(&sphere))
}

/// The three equivalent statements, evaluated independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub harp: bool,
    pub diagonal_optimal: bool,
    pub diagonal_support_monotone: bool,
}

impl EquivalenceReport {
    pub fn consistent(&self) -> bool {
        self.harp == self.diagonal_optimal && self.harp == self.diagonal_support_monotone
    }
}

pub fn rationalizability_equivalence(
    data: &Dataset,
    kernel: SharedKernel,
    tolerance: f64,
) -> Result<EquivalenceReport> {
    let harp = check_harp(data, kernel.as_ref(), tolerance).is_rationalizable();
    let diagonal_optimal = is_diagonal_optimal(data, kernel.clone(), tolerance)?;
    let inst = TransportInstance::from_dataset(data, kernel)?;
    let diagonal = Coupling::diagonal(&inst)?;
    let diagonal_support_monotone =
        check_support_cyclical_monotonicity(&diagonal, &inst, tolerance)?;
    Ok(EquivalenceReport {
        harp,
        diagonal_optimal,
        diagonal_support_monotone,
    })
}
