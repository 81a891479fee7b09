#![allow(dead_code)]

use proptest::prelude::*;
use revpref_core::{Dataset, Matrix};

/// Coordinates `exp(U(ln lo, ln hi))`.
pub fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

/// Datasets with `n` in `ns`, `m` in `ms`, every coordinate log-uniform in `[0.1, 10]`.
pub fn dataset(
    ns: std::ops::RangeInclusive<usize>,
    ms: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Dataset> {
    (ns, ms).prop_flat_map(|(n, m)| {
        prop::collection::vec(
            (
                prop::collection::vec(log_uniform(0.1, 10.0), m),
                prop::collection::vec(log_uniform(0.1, 10.0), m),
            ),
            n,
        )
        .prop_map(|rows| Dataset::from_rows(rows).unwrap())
    })
}

pub fn square_matrix(ns: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Matrix> {
    ns.prop_flat_map(|n| {
        prop::collection::vec(-10.0..10.0f64, n * n)
            .prop_map(move |v| Matrix::from_fn(n, n, |i, j| v[i * n + j]))
    })
}

/// Strictly positive weights summing to one.
pub fn simplex(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..1.0f64, k).prop_map(|w| {
        let s: f64 = w.iter().sum();
        let mut out: Vec<f64> = w.iter().map(|v| v / s).collect();
        let rest: f64 = out[1..].iter().sum();
        out[0] = 1.0 - rest;
        out
    })
}
