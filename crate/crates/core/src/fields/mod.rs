//! Smooth demand fields on the positive orthant: discrete closed-path sums of
//! the cost along a loop, potentiality of the field, and the inverse-demand
//! relation `p(x) / <x, p(x)> = grad v(x)`.

mod generate;

use std::f64::consts::TAU;

use rand::Rng;
use serde::Serialize;

use crate::domain::{dot, Bundle};
use crate::error::{Error, Result};
use crate::sampling::{log_uniform, seeded};

pub use generate::{
    ces_demand, cobb_douglas_demand, expenditures, gen_ces, gen_cobb_douglas, gen_log_uniform,
    inject_violation, GeneratorConfig, DEFAULT_INJECTION_STRENGTH,
};

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Default bound on `|sum|` at the finest resolution of a potentiality check.
pub const DEFAULT_PATH_THRESHOLD: f64 = 1e-2;

/// Path sums at or below this magnitude count as exact zeros.
pub const ZERO_FLOOR: f64 = 1e-13;

/// Resolutions used when none are given.
pub const DEFAULT_RESOLUTIONS: [usize; 2] = [100, 1000];

/// `c(x, y) = ln <x, y>`.
pub fn log_inner_cost(x: &[f64], y: &[f64]) -> f64 {
    dot(x, y).ln()
}

/// A price map `x -> p(x)` that is strictly positive on the positive orthant.
pub trait SmoothDemandField: Send + Sync {
    fn dimension(&self) -> usize;

    fn prices(&self, x: &[f64]) -> Vec<f64>;

    fn tag(&self) -> String;

    /// `p(x) / <x, p(x)>`, invariant under rescaling of `p`.
    fn normalized(&self, x: &[f64]) -> Vec<f64> {
        let p = self.prices(x);
        let s = dot(x, &p);
        p.into_iter().map(|v| v / s).collect()
    }
}

fn check_weights(weights: &[f64], what: &str) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidParameter(format!("{what} must be nonempty")));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "{what} must be positive and finite, got {w}"
        )));
    }
    Ok(())
}

/// Inverse demand of `u(x) = prod x_k^alpha_k` at unit income: `p_k = alpha_k / x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CobbDouglasField {
    alpha: Vec<f64>,
}

impl CobbDouglasField {
    /// Exponents must be positive and sum to one.
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        check_weights(&alpha, "Cobb-Douglas exponents")?;
        let total: f64 = alpha.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "Cobb-Douglas exponents must sum to 1, got {total}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn symmetric(m: usize) -> Result<Self> {
        Self::new(vec![1.0 / m as f64; m])
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `v(x) = sum alpha_k ln x_k`.
    pub fn log_utility(&self, x: &[f64]) -> f64 {
        self.alpha.iter().zip(x).map(|(a, v)| a * v.ln()).sum()
    }

    pub fn log_gradient(&self, x: &[f64]) -> Vec<f64> {
        self.alpha.iter().zip(x).map(|(a, v)| a / v).collect()
    }
}

impl SmoothDemandField for CobbDouglasField {
    fn dimension(&self) -> usize {
        self.alpha.len()
    }

    fn prices(&self, x: &[f64]) -> Vec<f64> {
        self.log_gradient(x)
    }

    fn tag(&self) -> String {
        format!("cobb-douglas(alpha={:?})", self.alpha)
    }
}

/// Inverse demand of `u(x) = (sum a_k x_k^rho)^(1/rho)`: `p_k = a_k x_k^(rho-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CesField {
    rho: f64,
    weights: Vec<f64>,
}

impl CesField {
    pub fn new(rho: f64, weights: Vec<f64>) -> Result<Self> {
        check_ces(rho)?;
        check_weights(&weights, "CES weights")?;
        Ok(Self { rho, weights })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `v(x) = ln u(x)`.
    pub fn log_utility(&self, x: &[f64]) -> f64 {
        let s: f64 = self
            .weights
            .iter()
            .zip(x)
            .map(|(a, v)| a * v.powf(self.rho))
            .sum();
        s.ln() / self.rho
    }

    pub fn log_gradient(&self, x: &[f64]) -> Vec<f64> {
        let s: f64 = self
            .weights
            .iter()
            .zip(x)
            .map(|(a, v)| a * v.powf(self.rho))
            .sum();
        self.weights
            .iter()
            .zip(x)
            .map(|(a, v)| a * v.powf(self.rho - 1.0) / s)
            .collect()
    }
}

pub(crate) fn check_ces(rho: f64) -> Result<()> {
    if !rho.is_finite() || rho >= 1.0 || rho == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "CES parameter must satisfy rho < 1 and rho != 0, got {rho}"
        )));
    }
    Ok(())
}

impl SmoothDemandField for CesField {
    fn dimension(&self) -> usize {
        self.weights.len()
    }

    fn prices(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(x)
            .map(|(a, v)| a * v.powf(self.rho - 1.0))
            .collect()
    }

    fn tag(&self) -> String {
        format!("ces(rho={}, weights={:?})", self.rho, self.weights)
    }
}

/// `p(x) = (x_2^2, 1, ..., 1)`. Its normalized field has nonzero curl
/// `2 / (x_1 x_2 + 1)^2` in the first coordinate plane, so it is not a gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistField {
    m: usize,
}

impl TwistField {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(
                "twist field needs at least two goods".into(),
            ));
        }
        Ok(Self { m })
    }
}

impl SmoothDemandField for TwistField {
    fn dimension(&self) -> usize {
        self.m
    }

    fn prices(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![1.0; self.m];
        p[0] = x[1] * x[1];
        p
    }

    fn tag(&self) -> String {
        format!("twist(m={})", self.m)
    }
}

/// Shape of a loop in the positive orthant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathShape {
    Constant {
        point: Vec<f64>,
    },
    /// Ellipse in the plane of coordinates `axes`, all other coordinates fixed at `center`.
    Ellipse {
        center: Vec<f64>,
        axes: (usize, usize),
        radii: (f64, f64),
    },
}

/// A loop `gamma: [0, 1] -> R^m_{++}` sampled at `resolution` equally spaced parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedPath {
    shape: PathShape,
    reversed: bool,
    resolution: usize,
}

impl ClosedPath {
    pub fn constant(point: Bundle) -> Self {
        Self {
            shape: PathShape::Constant {
                point: point.into_inner(),
            },
            reversed: false,
            resolution: DEFAULT_RESOLUTIONS[1],
        }
    }

    pub fn ellipse(center: Bundle, axes: (usize, usize), radii: (f64, f64)) -> Result<Self> {
        let c = center.as_slice();
        let (a, b) = axes;
        if a == b || a >= c.len() || b >= c.len() {
            return Err(Error::InvalidParameter(format!(
                "ellipse axes {axes:?} invalid in dimension {}",
                c.len()
            )));
        }
        for (k, r) in [(a, radii.0), (b, radii.1)] {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "radius must be positive, got {r}"
                )));
            }
            if r >= c[k] {
                return Err(Error::DomainExit { coordinate: k });
            }
        }
        Ok(Self {
            shape: PathShape::Ellipse {
                center: center.into_inner(),
                axes,
                radii,
            },
            reversed: false,
            resolution: DEFAULT_RESOLUTIONS[1],
        })
    }

    pub fn circle(center: Bundle, axes: (usize, usize), radius: f64) -> Result<Self> {
        Self::ellipse(center, axes, (radius, radius))
    }

    pub fn with_resolution(mut self, n: usize) -> Self {
        self.resolution = n;
        self
    }

    /// The same loop traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        Self {
            reversed: !self.reversed,
            ..self.clone()
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn shape(&self) -> &PathShape {
        &self.shape
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn dimension(&self) -> usize {
        match &self.shape {
            PathShape::Constant { point } => point.len(),
            PathShape::Ellipse { center, .. } => center.len(),
        }
    }

    /// `gamma(t)`.
    pub fn point(&self, t: f64) -> Vec<f64> {
        match &self.shape {
            PathShape::Constant { point } => point.clone(),
            PathShape::Ellipse {
                center,
                axes,
                radii,
            } => {
                let angle = if self.reversed { -TAU * t } else { TAU * t };
                let mut x = center.clone();
                x[axes.0] += radii.0 * angle.cos();
                x[axes.1] += radii.1 * angle.sin();
                x
            }
        }
    }

    /// `gamma(i / N)` for `i = 0..N`; the closing point is the first one.
    pub fn samples(&self) -> Vec<Vec<f64>> {
        let n = self.resolution;
        (0..n).map(|i| self.point(i as f64 / n as f64)).collect()
    }

    pub fn label(&self) -> String {
        let dir = if self.reversed { " reversed" } else { "" };
        match &self.shape {
            PathShape::Constant { point } => format!("constant {point:?}"),
            PathShape::Ellipse {
                center,
                axes,
                radii,
            } => format!("ellipse center={center:?} axes={axes:?} radii={radii:?}{dir}"),
        }
    }
}

/// Three fixed loops in the first coordinate plane, all other coordinates at 1.
pub fn standard_loops(m: usize) -> Result<Vec<ClosedPath>> {
    if m < 2 {
        return Err(Error::InvalidParameter(
            "loops need at least two goods".into(),
        ));
    }
    let at = |a: f64, b: f64| {
        let mut c = vec![1.0; m];
        c[0] = a;
        c[1] = b;
        Bundle::new(c)
    };
    Ok(vec![
        ClosedPath::circle(at(2.0, 2.0)?, (0, 1), 0.3)?,
        ClosedPath::ellipse(at(1.0, 3.0)?, (0, 1), (0.5, 0.8))?,
        ClosedPath::ellipse(at(4.0, 1.5)?, (0, 1), (1.0, 0.6))?,
    ])
}

/// Random ellipses in random coordinate planes with centers log-uniform in
/// `[0.5, 5]` and radii between 10% and 80% of the center coordinate.
pub fn random_loops(m: usize, count: usize, seed: u64) -> Result<Vec<ClosedPath>> {
    if m < 2 {
        return Err(Error::InvalidParameter(
            "loops need at least two goods".into(),
        ));
    }
    let mut rng = seeded(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let center: Vec<f64> = (0..m).map(|_| log_uniform(&mut rng, 0.5, 5.0)).collect();
        let a = rng.random_range(0..m);
        let b = (a + rng.random_range(1..m)) % m;
        let ra = center[a] * rng.random_range(0.1..0.8);
        let rb = center[b] * rng.random_range(0.1..0.8);
        out.push(ClosedPath::ellipse(Bundle::new(center)?, (a, b), (ra, rb))?);
    }
    Ok(out)
}

/// `sum_i [c(x_{i+1}, p(x_i)) - c(x_i, p(x_i))]` over the sampled loop, with `x_N = x_0`.
pub fn discrete_path_sum<C>(
    path: &ClosedPath,
    field: &dyn SmoothDemandField,
    cost: C,
) -> Result<f64>
where
    C: Fn(&[f64], &[f64]) -> f64,
{
    let n = path.resolution();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "path resolution must be at least 2, got {n}"
        )));
    }
    if path.dimension() != field.dimension() {
        return Err(Error::DimensionMismatch {
            expected: field.dimension(),
            found: path.dimension(),
        });
    }
    let xs = path.samples();
    let mut sum = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let next = &xs[(i + 1) % n];
        let p = field.prices(x);
        sum += cost(next, &p) - cost(x, &p);
    }
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathDecay {
    pub label: String,
    pub sums: Vec<f64>,
    /// `|sum(N_k)| / |sum(N_{k+1})|` for consecutive resolutions.
    pub decay_ratios: Vec<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialityReport {
    pub field: String,
    pub resolutions: Vec<usize>,
    pub threshold: f64,
    pub paths: Vec<PathDecay>,
    pub passed: bool,
}

/// Evaluates every loop at every resolution. A loop passes when each
/// refinement from `N_a` to `N_b` shrinks `|sum|` by at least `(N_b / N_a) / 2`
/// (or both sums are zero) and the finest sum is within `threshold`.
pub fn potentiality_check<C>(
    field: &dyn SmoothDemandField,
    paths: &[ClosedPath],
    cost: C,
    resolutions: &[usize],
    threshold: f64,
) -> Result<PotentialityReport>
where
    C: Fn(&[f64], &[f64]) -> f64,
{
    if resolutions.is_empty() {
        return Err(Error::Empty("resolutions"));
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "resolutions must be strictly increasing".into(),
        ));
    }
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let sums = resolutions
            .iter()
            .map(|&n| discrete_path_sum(&path.clone().with_resolution(n), field, &cost))
            .collect::<Result<Vec<_>>>()?;
        let mut passed = sums.last().is_some_and(|s| s.abs() <= threshold);
        let mut decay_ratios = Vec::with_capacity(sums.len().saturating_sub(1));
        for k in 1..sums.len() {
            let (prev, cur) = (sums[k - 1].abs(), sums[k].abs());
            decay_ratios.push(prev / cur);
            let required = resolutions[k] as f64 / resolutions[k - 1] as f64 / 2.0;
            let zero = prev <= ZERO_FLOOR && cur <= ZERO_FLOOR;
            passed &= zero || cur * required <= prev;
        }
        out.push(PathDecay {
            label: path.label(),
            sums,
            decay_ratios,
            passed,
        });
    }
    Ok(PotentialityReport {
        field: field.tag(),
        resolutions: resolutions.to_vec(),
        threshold,
        passed: out.iter().all(|p| p.passed),
        paths: out,
    })
}

/// Central differences `(f(x + h e_k) - f(x - h e_k)) / 2h`.
pub fn numeric_gradient<F>(f: F, x: &Bundle, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {h}"
        )));
    }
    let base = x.as_slice();
    if let Some(k) = base.iter().position(|v| *v - h <= 0.0) {
        return Err(Error::DomainExit { coordinate: k });
    }
    let mut z = base.to_vec();
    let mut grad = Vec::with_capacity(base.len());
    for k in 0..base.len() {
        z[k] = base[k] + h;
        let up = f(&z);
        z[k] = base[k] - h;
        let down = f(&z);
        z[k] = base[k];
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseDemandReport {
    pub field: String,
    pub points: usize,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `|| p(x) / <x, p(x)> - grad v(x) ||_inf <= tolerance` at each point.
pub fn check_inverse_demand<G>(
    gradient: G,
    field: &dyn SmoothDemandField,
    points: &[Bundle],
    tolerance: f64,
) -> Result<InverseDemandReport>
where
    G: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut residuals = Vec::with_capacity(points.len());
    for x in points {
        if x.dim() != field.dimension() {
            return Err(Error::DimensionMismatch {
                expected: field.dimension(),
                found: x.dim(),
            });
        }
        let g = gradient(x.as_slice())?;
        let r = field
            .normalized(x.as_slice())
            .iter()
            .zip(&g)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        residuals.push(r);
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(InverseDemandReport {
        field: field.tag(),
        points: points.len(),
        residuals,
        max_residual,
        tolerance,
        passed: max_residual <= tolerance,
    })
}

/// Points log-uniform in `[lo, hi]^m`.
pub fn sample_points(m: usize, count: usize, lo: f64, hi: f64, seed: u64) -> Result<Vec<Bundle>> {
    let mut rng = seeded(seed);
    (0..count)
        .map(|_| Bundle::new((0..m).map(|_| log_uniform(&mut rng, lo, hi)).collect()))
        .collect()
}
