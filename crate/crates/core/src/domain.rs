//! Consumption data, the log cost and bi-homogeneous kernels.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

fn validate_positive(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Empty("vector of dimension 0"));
    }
    for (coordinate, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { coordinate, value });
        }
        if value <= 0.0 {
            return Err(Error::NonPositive { coordinate, value });
        }
    }
    Ok(())
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

macro_rules! positive_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize)]
        #[serde(transparent)]
        pub struct $name(Vec<f64>);

        impl $name {
            /// Rejects empty vectors and any coordinate that is not finite and `> 0`.
            pub fn new(values: Vec<f64>) -> Result<Self> {
                validate_positive(&values)?;
                Ok(Self(values))
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }

            /// Multiplies every coordinate by `t > 0`.
            pub fn scaled(&self, t: f64) -> Result<Self> {
                Self::new(self.0.iter().map(|v| v * t).collect())
            }

            pub fn norm(&self) -> f64 {
                self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
            }

            /// Divides by the Euclidean norm.
            pub fn normalized(&self) -> Self {
                let norm = self.norm();
                Self(self.0.iter().map(|v| v / norm).collect())
            }
        }

        impl AsRef<[f64]> for $name {
            fn as_ref(&self) -> &[f64] {
                &self.0
            }
        }

        impl TryFrom<Vec<f64>> for $name {
            type Error = Error;

            fn try_from(values: Vec<f64>) -> Result<Self> {
                Self::new(values)
            }
        }
    };
}

positive_vector!(
    /// Quantities of each good; strictly positive.
    Bundle
);

positive_vector!(
    /// Unit prices of each good; strictly positive.
    PriceVector
);

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub index: usize,
    pub bundle: Bundle,
    pub prices: PriceVector,
}

/// An ordered, nonempty list of observations sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    observations: Vec<Observation>,
    dimension: usize,
}

impl Dataset {
    pub fn new(pairs: Vec<(Bundle, PriceVector)>) -> Result<Self> {
        let dimension = match pairs.first() {
            Some((bundle, _)) => bundle.dim(),
            None => return Err(Error::Empty("dataset without observations")),
        };
        let mut observations = Vec::with_capacity(pairs.len());
        for (index, (bundle, prices)) in pairs.into_iter().enumerate() {
            check_dims(dimension, bundle.dim())?;
            check_dims(dimension, prices.dim())?;
            observations.push(Observation {
                index,
                bundle,
                prices,
            });
        }
        Ok(Self {
            observations,
            dimension,
        })
    }

    /// Builds a dataset from raw `(quantities, prices)` rows.
    pub fn from_rows<I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<f64>, Vec<f64>)>,
    {
        let pairs = rows
            .into_iter()
            .map(|(q, p)| Ok((Bundle::new(q)?, PriceVector::new(p)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn bundle(&self, i: usize) -> &Bundle {
        &self.observations[i].bundle
    }

    pub fn prices(&self, i: usize) -> &PriceVector {
        &self.observations[i].prices
    }

    pub fn bundles(&self) -> impl Iterator<Item = &Bundle> {
        self.observations.iter().map(|o| &o.bundle)
    }

    pub fn price_vectors(&self) -> impl Iterator<Item = &PriceVector> {
        self.observations.iter().map(|o| &o.prices)
    }

    /// Returns a copy whose observations are listed in `order`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: order.len(),
            });
        }
        Self::new(
            order
                .iter()
                .map(|&i| (self.bundle(i).clone(), self.prices(i).clone()))
                .collect(),
        )
    }

    /// Returns a copy with every bundle and price vector scaled to unit Euclidean norm.
    pub fn project_to_sphere(&self) -> Self {
        let observations = self
            .observations
            .iter()
            .map(|o| Observation {
                index: o.index,
                bundle: o.bundle.normalized(),
                prices: o.prices.normalized(),
            })
            .collect();
        Self {
            observations,
            dimension: self.dimension,
        }
    }
}

/// A positive function `b(x, p)` that is homogeneous of degree one in each argument.
pub trait Kernel: Send + Sync + fmt::Debug {
    fn eval(&self, x: &[f64], p: &[f64]) -> f64;

    fn tag(&self) -> String;

    /// True when `eval` is the plain dot product.
    fn is_inner_product(&self) -> bool {
        false
    }
}

/// The standard inner product.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InnerProduct;

impl Kernel for InnerProduct {
    fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        dot(x, p)
    }

    fn tag(&self) -> String {
        "inner".to_owned()
    }

    fn is_inner_product(&self) -> bool {
        true
    }
}

/// `b(x, p) = sum_k w_k x_k p_k` with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedInnerProduct {
    weights: Vec<f64>,
}

impl WeightedInnerProduct {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        validate_positive(&weights)?;
        Ok(Self { weights })
    }
}

impl Kernel for WeightedInnerProduct {
    fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(x.iter().zip(p))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    fn tag(&self) -> String {
        format!("weighted-inner{:?}", self.weights)
    }
}

/// `b(x, p) = (sum_k (x_k p_k)^r)^(1/r)` for `r > 0`; bi-homogeneous for every `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMeanKernel {
    exponent: f64,
}

impl PowerMeanKernel {
    pub fn new(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "power-mean exponent must be positive, got {exponent}"
            )));
        }
        Ok(Self { exponent })
    }
}

impl Kernel for PowerMeanKernel {
    fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        let r = self.exponent;
        x.iter()
            .zip(p)
            .map(|(a, b)| (a * b).powf(r))
            .sum::<f64>()
            .powf(1.0 / r)
    }

    fn tag(&self) -> String {
        format!("power-mean({})", self.exponent)
    }
}

pub type SharedKernel = Arc<dyn Kernel>;

pub fn default_kernel() -> SharedKernel {
    Arc::new(InnerProduct)
}

pub(crate) fn dot(x: &[f64], p: &[f64]) -> f64 {
    x.iter().zip(p).map(|(a, b)| a * b).sum()
}

/// `sum_j x_j p_j`.
pub fn inner(x: &Bundle, p: &PriceVector) -> Result<f64> {
    check_dims(x.dim(), p.dim())?;
    Ok(dot(x.as_slice(), p.as_slice()))
}

/// `ln b(x, p)`; for the default kernel, `ln <x, p>`.
pub fn log_cost(x: &Bundle, p: &PriceVector, kernel: &dyn Kernel) -> Result<f64> {
    check_dims(x.dim(), p.dim())?;
    Ok(kernel.eval(x.as_slice(), p.as_slice()).ln())
}

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            check_dims(cols, row.len())?;
            data.extend(row);
        }
        Ok(Self {
            rows: n,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.data.iter()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}
