//! Seeded synthetic datasets: demand generated by Cobb-Douglas and CES
//! utilities, unstructured log-uniform data, and violation injection.

use rand::Rng;
use serde::Serialize;

use super::{check_ces, check_weights, CobbDouglasField};
use crate::domain::{dot, Bundle, Dataset, InnerProduct, PriceVector};
use crate::error::{Error, Result};
use crate::rationality::cross_log_matrix;
use crate::sampling::{log_uniform, log_uniform_vec, seeded};

/// Strength 1 swaps the two bundles completely.
pub const DEFAULT_INJECTION_STRENGTH: f64 = 1.0;

/// Log-uniform ranges for sampled prices and incomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorConfig {
    pub price_range: (f64, f64),
    pub income_range: (f64, f64),
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            price_range: (0.1, 10.0),
            income_range: (1.0, 10.0),
        }
    }
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        for (lo, hi) in [self.price_range, self.income_range] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "sampling range ({lo}, {hi}) must satisfy 0 < lo <= hi < inf"
                )));
            }
        }
        Ok(())
    }
}

/// `x_k = alpha_k w / p_k`.
pub fn cobb_douglas_demand(alpha: &[f64], prices: &PriceVector, income: f64) -> Result<Bundle> {
    let field = CobbDouglasField::new(alpha.to_vec())?;
    if prices.dim() != alpha.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.len(),
            found: prices.dim(),
        });
    }
    Bundle::new(
        field
            .alpha()
            .iter()
            .zip(prices.as_slice())
            .map(|(a, p)| a * income / p)
            .collect(),
    )
}

/// `x_k = w a_k^s p_k^-s / sum_j a_j^s p_j^(1-s)` with `s = 1 / (1 - rho)`.
pub fn ces_demand(rho: f64, weights: &[f64], prices: &PriceVector, income: f64) -> Result<Bundle> {
    check_ces(rho)?;
    check_weights(weights, "CES weights")?;
    if prices.dim() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: prices.dim(),
        });
    }
    let sigma = 1.0 / (1.0 - rho);
    let p = prices.as_slice();
    let denom: f64 = weights
        .iter()
        .zip(p)
        .map(|(a, pk)| a.powf(sigma) * pk.powf(1.0 - sigma))
        .sum();
    Bundle::new(
        weights
            .iter()
            .zip(p)
            .map(|(a, pk)| income * a.powf(sigma) * pk.powf(-sigma) / denom)
            .collect(),
    )
}

fn generate<D>(
    n: usize,
    m: usize,
    config: &GeneratorConfig,
    seed: u64,
    demand: D,
) -> Result<Dataset>
where
    D: Fn(&PriceVector, f64) -> Result<Bundle>,
{
    config.validate()?;
    let mut rng = seeded(seed);
    let (plo, phi) = config.price_range;
    let (wlo, whi) = config.income_range;
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let p = PriceVector::new(log_uniform_vec(&mut rng, m, plo, phi))?;
        let w = log_uniform(&mut rng, wlo, whi);
        pairs.push((demand(&p, w)?, p));
    }
    Dataset::new(pairs)
}

/// `n` Cobb-Douglas demand observations at sampled prices and incomes.
pub fn gen_cobb_douglas(
    n: usize,
    m: usize,
    alpha: &[f64],
    config: &GeneratorConfig,
    seed: u64,
) -> Result<Dataset> {
    if alpha.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: alpha.len(),
        });
    }
    CobbDouglasField::new(alpha.to_vec())?;
    generate(n, m, config, seed, |p, w| cobb_douglas_demand(alpha, p, w))
}

/// `n` CES demand observations at sampled prices and incomes.
pub fn gen_ces(
    n: usize,
    m: usize,
    rho: f64,
    weights: &[f64],
    config: &GeneratorConfig,
    seed: u64,
) -> Result<Dataset> {
    if weights.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: weights.len(),
        });
    }
    check_ces(rho)?;
    check_weights(weights, "CES weights")?;
    generate(n, m, config, seed, |p, w| ces_demand(rho, weights, p, w))
}

/// Bundles and prices with every coordinate log-uniform in `[lo, hi]`, no structure.
pub fn gen_log_uniform(n: usize, m: usize, lo: f64, hi: f64, seed: u64) -> Result<Dataset> {
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "range ({lo}, {hi}) must satisfy 0 < lo <= hi < inf"
        )));
    }
    let mut rng = seeded(seed);
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let x = Bundle::new(log_uniform_vec(&mut rng, m, lo, hi))?;
        let p = PriceVector::new(log_uniform_vec(&mut rng, m, lo, hi))?;
        pairs.push((x, p));
    }
    Dataset::new(pairs)
}

/// Moves bundle `X^i` toward `X^j` and `X^j` toward `X^i` geometrically by
/// `strength`, where `i` is drawn from `seed` and `j` maximizes the two-cycle
/// sum `a_ij + a_ji`. A full swap negates that sum, so any partner with a
/// strictly positive two-cycle yields a HARP violation.
pub fn inject_violation(data: &Dataset, strength: f64, seed: u64) -> Result<Dataset> {
    let n = data.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "violation injection needs at least two observations, got {n}"
        )));
    }
    if !strength.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "strength must be finite, got {strength}"
        )));
    }
    let a = cross_log_matrix(data, &InnerProduct);
    let i = seeded(seed).random_range(0..n);
    let j = (0..n)
        .filter(|&j| j != i)
        .max_by(|&x, &y| {
            (a.get(i, x) + a.get(x, i))
                .total_cmp(&(a.get(i, y) + a.get(y, i)))
                .then(y.cmp(&x))
        })
        .expect("n >= 2");
    let blend = |from: &Bundle, to: &Bundle| -> Result<Bundle> {
        Bundle::new(
            from.as_slice()
                .iter()
                .zip(to.as_slice())
                .map(|(u, v)| u.powf(1.0 - strength) * v.powf(strength))
                .collect(),
        )
    };
    let xi = blend(data.bundle(i), data.bundle(j))?;
    let xj = blend(data.bundle(j), data.bundle(i))?;
    let pairs = (0..n)
        .map(|k| {
            let x = match k {
                k if k == i => xi.clone(),
                k if k == j => xj.clone(),
                _ => data.bundle(k).clone(),
            };
            (x, data.prices(k).clone())
        })
        .collect();
    Dataset::new(pairs)
}

/// Total expenditure `<X^i, P^i>` for each observation.
pub fn expenditures(data: &Dataset) -> Vec<f64> {
    data.observations()
        .iter()
        .map(|o| dot(o.bundle.as_slice(), o.prices.as_slice()))
        .collect()
}
