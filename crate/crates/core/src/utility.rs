//! Rationalizing utilities: the homogeneous min-of-linear model built from
//! shortest-path potentials, and the piecewise-linear concave model built from
//! a solution of the Afriat inequalities.

use serde::Serialize;

use crate::domain::{dot, Bundle, Dataset, Kernel, SharedKernel};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome, Relation};
use crate::rationality::{cross_log_matrix, harp_on_matrix, CrossLogMatrix, Status};
use crate::sampling::{log_uniform_vec, seeded};

pub const DEFAULT_VERIFY_SAMPLES: usize = 1000;

/// Range of each coordinate of the random bundles used by the verifiers.
pub const SAMPLE_RANGE: (f64, f64) = (1e-2, 1e2);

/// A utility function defined on the positive orthant.
pub trait Utility {
    fn dimension(&self) -> usize;

    /// Evaluates at a raw point. Callers guarantee positivity and dimension.
    fn value_at(&self, z: &[f64]) -> f64;

    /// The budget functional `b(z, p)` the model is rationalizing against.
    fn expenditure(&self, z: &[f64], p: &[f64]) -> f64 {
        dot(z, p)
    }
}

pub fn evaluate_utility(model: &dyn Utility, z: &Bundle) -> Result<f64> {
    if z.dim() != model.dimension() {
        return Err(Error::DimensionMismatch {
            expected: model.dimension(),
            found: z.dim(),
        });
    }
    Ok(model.value_at(z.as_slice()))
}

/// Shortest-path distances from node 0 in the complete digraph weighted by `a`.
///
/// The result satisfies `v_j - v_i <= a_ij` for all pairs, which places every
/// observation in the c-superdifferential of `v`.
pub fn shortest_path_potentials(a: &CrossLogMatrix, tolerance: f64) -> Result<Vec<f64>> {
    let verdict = harp_on_matrix(a, tolerance);
    if let (Status::Violated, Some(w)) = (verdict.status, verdict.witness) {
        return Err(Error::NegativeCycle(w));
    }
    let n = a.n();
    let mut dist: Vec<f64> = (0..n).map(|j| a.get(0, j)).collect();
    dist[0] = 0.0;
    for _ in 1..n {
        let mut changed = false;
        for j in 0..n {
            for k in 1..n {
                let candidate = dist[j] + a.get(j, k);
                if candidate < dist[k] {
                    dist[k] = candidate;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(dist)
}

/// `u(z) = min_i exp(v_i - d_i) b(z, P^i)` with `d_i = ln b(X^i, P^i)`.
#[derive(Debug, Clone)]
pub struct HomogeneousUtility {
    data: Dataset,
    kernel: SharedKernel,
    potentials: Vec<f64>,
    normalizers: Vec<f64>,
}

impl HomogeneousUtility {
    /// Wraps arbitrary potentials without checking the potential inequalities.
    /// Use [`build_homogeneous_utility`] for a model guaranteed to rationalize.
    pub fn from_potentials(
        data: Dataset,
        kernel: SharedKernel,
        potentials: Vec<f64>,
    ) -> Result<Self> {
        if potentials.len() != data.len() {
            return Err(Error::DimensionMismatch {
                expected: data.len(),
                found: potentials.len(),
            });
        }
        let normalizers = data
            .observations()
            .iter()
            .map(|o| kernel.eval(o.bundle.as_slice(), o.prices.as_slice()).ln())
            .collect();
        Ok(Self {
            data,
            kernel,
            potentials,
            normalizers,
        })
    }

    pub fn potentials(&self) -> &[f64] {
        &self.potentials
    }

    pub fn normalizers(&self) -> &[f64] {
        &self.normalizers
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    pub fn kernel(&self) -> &dyn Kernel {
        self.kernel.as_ref()
    }

    fn piece(&self, i: usize, z: &[f64]) -> f64 {
        self.potentials[i] - self.normalizers[i]
            + self.kernel.eval(z, self.data.prices(i).as_slice()).ln()
    }

    /// `ln u(z)`.
    pub fn log_value(&self, z: &[f64]) -> f64 {
        (0..self.data.len())
            .map(|i| self.piece(i, z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the active linear piece at `z` and the gap (in `ln u`) to the runner-up.
    pub fn active_piece(&self, z: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        let mut second = f64::INFINITY;
        for i in 0..self.data.len() {
            let v = self.piece(i, z);
            if v < best.1 {
                second = best.1;
                best = (i, v);
            } else if v < second {
                second = v;
            }
        }
        (best.0, second - best.1)
    }

    /// Largest coordinate step that moves no piece of `ln u` by more than a quarter
    /// of the active margin, so a central difference at `z` stays on one piece.
    /// `None` when `z` sits on a kink or the kernel is not the inner product.
    pub fn single_piece_step(&self, z: &[f64]) -> Option<f64> {
        if !self.kernel.is_inner_product() {
            return None;
        }
        let (_, margin) = self.active_piece(z);
        if margin.is_nan() || margin <= 0.0 {
            return None;
        }
        let mut h = z.iter().copied().fold(f64::INFINITY, f64::min) / 2.0;
        let budget = 1.0 - (-margin / 4.0).exp();
        for i in 0..self.data.len() {
            let p = self.data.prices(i).as_slice();
            let total: f64 = z.iter().zip(p).map(|(a, b)| a * b).sum();
            for pk in p {
                h = h.min(budget * total / pk);
            }
        }
        Some(h)
    }
}

impl Utility for HomogeneousUtility {
    fn dimension(&self) -> usize {
        self.data.dimension()
    }

    fn value_at(&self, z: &[f64]) -> f64 {
        self.log_value(z).exp()
    }

    fn expenditure(&self, z: &[f64], p: &[f64]) -> f64 {
        self.kernel.eval(z, p)
    }
}

/// Builds the homogeneous rationalizing utility, or returns the violating cycle.
pub fn build_homogeneous_utility(
    data: &Dataset,
    kernel: SharedKernel,
    tolerance: f64,
) -> Result<HomogeneousUtility> {
    let a = cross_log_matrix(data, kernel.as_ref());
    let potentials = shortest_path_potentials(&a, tolerance)?;
    HomogeneousUtility::from_potentials(data.clone(), kernel, potentials)
}

/// Levels `y` and multipliers `s` of the Afriat inequalities
/// `y_j - y_i <= s_i <P^i, X^j - X^i>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AfriatSolution {
    pub levels: Vec<f64>,
    pub multipliers: Vec<f64>,
}

impl AfriatSolution {
    /// Largest `y_j - y_i - s_i <P^i, X^j - X^i>` over all pairs (`<= 0` when feasible).
    pub fn max_residual(&self, data: &Dataset) -> f64 {
        let n = data.len();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            let p = data.prices(i).as_slice();
            let own = dot(data.bundle(i).as_slice(), p);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let delta = dot(data.bundle(j).as_slice(), p) - own;
                let r = self.levels[j] - self.levels[i] - self.multipliers[i] * delta;
                worst = worst.max(r);
            }
        }
        if n < 2 {
            0.0
        } else {
            worst
        }
    }

    pub fn is_feasible(&self, data: &Dataset, tolerance: f64) -> bool {
        self.levels.len() == data.len()
            && self.multipliers.len() == data.len()
            && self.multipliers.iter().all(|&s| s > 0.0)
            && self.max_residual(data) <= tolerance
    }

    /// Rescales `(y, s) -> (y / min s, s / min s)` so that every multiplier is at least one.
    pub fn normalized(mut self) -> Self {
        let min_s = self
            .multipliers
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_s.is_finite() && min_s > 0.0 && min_s < 1.0 {
            self.levels.iter_mut().for_each(|y| *y /= min_s);
            self.multipliers.iter_mut().for_each(|s| *s /= min_s);
        }
        self
    }
}

/// `u(x) = min_i { y_i + s_i <P^i, x - X^i> }`.
#[derive(Debug, Clone)]
pub struct AfriatUtility {
    solution: AfriatSolution,
    data: Dataset,
    own_spend: Vec<f64>,
}

impl AfriatUtility {
    pub fn new(solution: AfriatSolution, data: Dataset) -> Result<Self> {
        for len in [solution.levels.len(), solution.multipliers.len()] {
            if len != data.len() {
                return Err(Error::DimensionMismatch {
                    expected: data.len(),
                    found: len,
                });
            }
        }
        let own_spend = data
            .observations()
            .iter()
            .map(|o| dot(o.bundle.as_slice(), o.prices.as_slice()))
            .collect();
        Ok(Self {
            solution,
            data,
            own_spend,
        })
    }

    pub fn solution(&self) -> &AfriatSolution {
        &self.solution
    }
}

impl Utility for AfriatUtility {
    fn dimension(&self) -> usize {
        self.data.dimension()
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        (0..self.data.len())
            .map(|i| {
                let spend = dot(x, self.data.prices(i).as_slice());
                self.solution.levels[i] + self.solution.multipliers[i] * (spend - self.own_spend[i])
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Finds a feasible point of the Afriat inequalities with `s_i >= 1` by the
/// two-phase simplex. The first feasible vertex is returned; it is not unique.
pub fn afriat_solve(data: &Dataset, tolerance: f64) -> Result<AfriatSolution> {
    let n = data.len();
    // variables: y_0..y_{n-1} >= 0 (levels are shift invariant), t_i = s_i - 1 >= 0
    let mut program = LinearProgram::new(2 * n);
    let mut scale: f64 = 1.0;
    for i in 0..n {
        let p = data.prices(i).as_slice();
        let own = dot(data.bundle(i).as_slice(), p);
        for j in 0..n {
            if i == j {
                continue;
            }
            let delta = dot(data.bundle(j).as_slice(), p) - own;
            scale = scale.max(delta.abs());
            let mut row = vec![0.0; 2 * n];
            row[j] += 1.0;
            row[i] -= 1.0;
            row[n + i] = -delta;
            program.add(row, Relation::Le, delta);
        }
    }
    match lp::solve(&program, tolerance)? {
        LpOutcome::Optimal { x, .. } => {
            let solution = AfriatSolution {
                levels: x[..n].to_vec(),
                multipliers: x[n..].iter().map(|t| 1.0 + t).collect(),
            };
            let residual = solution.max_residual(data);
            let bound =
                tolerance * scale.max(solution.levels.iter().fold(1.0, |m, y| m.max(y.abs())));
            if residual > bound {
                return Err(Error::Numerical(format!(
                    "simplex point violates the Afriat inequalities by {residual:e}"
                )));
            }
            Ok(solution)
        }
        LpOutcome::Infeasible { phase_one_residual } => Err(Error::AfriatInfeasible {
            residual: phase_one_residual,
        }),
        LpOutcome::Unbounded => Err(Error::Numerical(
            "feasibility program reported unbounded".into(),
        )),
    }
}

/// `y_i = exp(v_i)`, `s_i = exp(v_i) / <P^i, X^i>`, before normalization.
pub fn afriat_from_homogeneous_unnormalized(model: &HomogeneousUtility) -> Result<AfriatSolution> {
    if !model.kernel().is_inner_product() {
        return Err(Error::InvalidParameter(format!(
            "the Afriat bridge needs the inner-product kernel, model uses {}",
            model.kernel().tag()
        )));
    }
    let data = model.dataset();
    let levels: Vec<f64> = model.potentials().iter().map(|v| v.exp()).collect();
    let multipliers = levels
        .iter()
        .zip(data.observations())
        .map(|(y, o)| y / dot(o.bundle.as_slice(), o.prices.as_slice()))
        .collect();
    Ok(AfriatSolution {
        levels,
        multipliers,
    })
}

/// Afriat levels and multipliers read off a homogeneous model, scaled so `min s_i >= 1`.
pub fn afriat_from_homogeneous(model: &HomogeneousUtility) -> Result<AfriatSolution> {
    Ok(afriat_from_homogeneous_unnormalized(model)?.normalized())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalizationReport {
    pub data_point_checks: usize,
    pub sample_checks: usize,
    /// Largest relative excess of a budget-feasible utility over the chosen bundle's.
    pub max_violation: f64,
    pub violations: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub passed: bool,
}

/// Checks that every `X^i` maximizes the model over its budget set.
///
/// Each candidate `Z` is rescaled onto the budget boundary
/// `b(Z, P^i) = b(X^i, P^i)` and compared with `u(X^i)`, relative to the
/// largest `|u|` over the observed bundles; for a homogeneous
/// model this is exactly `u(X^i)/b(X^i,P^i) >= u(Z)/b(Z,P^i)`. Candidates are
/// every observed bundle plus `samples` log-uniform random bundles per observation.
pub fn verify_rationalization(
    model: &dyn Utility,
    data: &Dataset,
    samples: usize,
    tolerance: f64,
    seed: u64,
) -> RationalizationReport {
    let mut rng = seeded(seed);
    let m = data.dimension();
    let mut max_violation = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut data_point_checks = 0;
    let mut sample_checks = 0;
    let magnitude = data
        .bundles()
        .map(|x| model.value_at(x.as_slice()).abs())
        .fold(0.0, f64::max);
    let scale = if magnitude > 0.0 { magnitude } else { 1.0 };
    for i in 0..data.len() {
        let p = data.prices(i).as_slice();
        let x = data.bundle(i).as_slice();
        let budget = model.expenditure(x, p);
        let own = model.value_at(x);
        let mut check = |z: &[f64]| {
            let lambda = budget / model.expenditure(z, p);
            let scaled: Vec<f64> = z.iter().map(|v| v * lambda).collect();
            let excess = (model.value_at(&scaled) - own) / scale;
            max_violation = max_violation.max(excess);
            if excess > tolerance {
                violations += 1;
            }
        };
        for j in 0..data.len() {
            check(data.bundle(j).as_slice());
            data_point_checks += 1;
        }
        for _ in 0..samples {
            let z = log_uniform_vec(&mut rng, m, SAMPLE_RANGE.0, SAMPLE_RANGE.1);
            check(&z);
            sample_checks += 1;
        }
    }
    RationalizationReport {
        data_point_checks,
        sample_checks,
        max_violation,
        violations,
        tolerance,
        seed,
        passed: violations == 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperdifferentialReport {
    pub checks: usize,
    pub max_violation: f64,
    pub violations: usize,
    pub passed: bool,
}

/// Verifies `v(z) <= v(X^i) + c(z, P^i) - c(X^i, P^i)` for `v = ln u`, at all
/// observed bundles and `samples` random bundles per observation.
pub fn check_superdifferential(
    model: &HomogeneousUtility,
    data: &Dataset,
    cost: impl Fn(&[f64], &[f64]) -> f64,
    samples: usize,
    tolerance: f64,
    seed: u64,
) -> SuperdifferentialReport {
    let mut rng = seeded(seed);
    let m = data.dimension();
    let mut max_violation = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut checks = 0;
    for i in 0..data.len() {
        let p = data.prices(i).as_slice();
        let x = data.bundle(i).as_slice();
        let anchor = model.log_value(x) - cost(x, p);
        let mut check = |z: &[f64]| {
            let excess = model.log_value(z) - cost(z, p) - anchor;
            max_violation = max_violation.max(excess);
            if excess > tolerance {
                violations += 1;
            }
            checks += 1;
        };
        for j in 0..data.len() {
            check(data.bundle(j).as_slice());
        }
        for _ in 0..samples {
            let z = log_uniform_vec(&mut rng, m, SAMPLE_RANGE.0, SAMPLE_RANGE.1);
            check(&z);
        }
    }
    SuperdifferentialReport {
        checks,
        max_violation,
        violations,
        passed: violations == 0,
    }
}
