mod common;

use approx::assert_relative_eq;
use proptest::prelude::*;
use revpref_core::lp::{self, LinearProgram, LpOutcome, Relation};
use revpref_core::transport::{
    all_permutation_values, hungarian, permutation_value, transportation_simplex,
};
use revpref_core::{
    brute_force_assignment, check_support_cyclical_monotonicity, cost_decomposition_check,
    default_kernel, projection_preserves_optimum, solve_assignment, solve_discrete_ot, Bundle,
    Coupling, Matrix, PriceVector, TransportInstance,
};

/// Minimum of the transportation LP, solved as a generic LP.
fn lp_oracle(cost: &Matrix, supply: &[f64], demand: &[f64]) -> f64 {
    let (k, l) = (supply.len(), demand.len());
    let mut program = LinearProgram::new(k * l);
    program.objective = cost.iter().copied().collect();
    for (i, s) in supply.iter().enumerate() {
        let mut row = vec![0.0; k * l];
        row[i * l..(i + 1) * l].iter_mut().for_each(|v| *v = 1.0);
        program.add(row, Relation::Eq, *s);
    }
    for (j, d) in demand.iter().enumerate() {
        let mut row = vec![0.0; k * l];
        (0..k).for_each(|i| row[i * l + j] = 1.0);
        program.add(row, Relation::Eq, *d);
    }
    match lp::solve(&program, 1e-12).unwrap() {
        LpOutcome::Optimal { objective, .. } => objective,
        other => panic!("transport LP must be solvable, got {other:?}"),
    }
}

fn instance() -> impl Strategy<Value = TransportInstance> {
    (1usize..=5, 1usize..=5, 2usize..=3).prop_flat_map(|(k, l, m)| {
        (
            prop::collection::vec(prop::collection::vec(common::log_uniform(0.1, 10.0), m), k),
            common::simplex(k),
            prop::collection::vec(prop::collection::vec(common::log_uniform(0.1, 10.0), m), l),
            common::simplex(l),
        )
            .prop_map(|(xs, mu, ys, nu)| {
                TransportInstance::new(
                    xs.into_iter().map(|v| Bundle::new(v).unwrap()).collect(),
                    mu,
                    ys.into_iter()
                        .map(|v| PriceVector::new(v).unwrap())
                        .collect(),
                    nu,
                    default_kernel(),
                )
                .unwrap()
            })
    })
}

fn plan_value(cost: &Matrix, flow: &Matrix) -> f64 {
    cost.iter().zip(flow.iter()).map(|(c, x)| c * x).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn hungarian_matches_enumeration(cost in common::square_matrix(1..=8)) {
        let fast = solve_assignment(&cost).unwrap();
        let slow = brute_force_assignment(&cost).unwrap();
        prop_assert!((fast.value - slow.value).abs() <= 1e-10);
        prop_assert!((permutation_value(&cost, &fast.permutation) - fast.value).abs() <= 1e-12);
    }

    #[test]
    fn hungarian_duals_certify_optimality(cost in common::square_matrix(1..=10)) {
        let s = hungarian(&cost).unwrap();
        let n = cost.rows();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(s.row_duals[i] + s.col_duals[j] <= cost[(i, j)] + 1e-9);
            }
        }
        let dual: f64 = s.row_duals.iter().chain(&s.col_duals).sum();
        prop_assert!((dual - s.assignment.value).abs() <= 1e-9);
    }

    #[test]
    fn network_simplex_matches_lp(
        (cost, supply, demand) in (1usize..=4, 1usize..=5).prop_flat_map(|(k, l)| (
            prop::collection::vec(-5.0..5.0f64, k * l).prop_map(move |v| Matrix::from_fn(k, l, |i, j| v[i * l + j])),
            common::simplex(k),
            common::simplex(l),
        ))
    ) {
        let s = transportation_simplex(&cost, &supply, &demand).unwrap();
        let oracle = lp_oracle(&cost, &supply, &demand);
        prop_assert!((plan_value(&cost, &s.flow) - oracle).abs() <= 1e-9);
        for (i, w) in supply.iter().enumerate() {
            prop_assert!((s.flow.row(i).iter().sum::<f64>() - w).abs() <= 1e-12);
        }
    }

    #[test]
    fn strong_duality_and_slackness(inst in instance()) {
        let (plan, duals) = solve_discrete_ot(&inst).unwrap();
        prop_assert!(plan.marginal_error(&inst) <= 1e-12);
        prop_assert!(duals.max_infeasibility(inst.cost()) <= 1e-9);
        prop_assert!(duals.max_slackness_gap(&plan, inst.cost()) <= 1e-9);
        prop_assert!((duals.objective(&inst) - plan.value).abs() <= 1e-9);
        if plan.support().len() <= 8 {
            prop_assert!(check_support_cyclical_monotonicity(&plan, &inst, 1e-9).unwrap());
        }
        prop_assert!(cost_decomposition_check(&plan, &inst) <= 1e-12);
    }

    #[test]
    fn decomposition_holds_for_product_plans(inst in instance()) {
        let mu = inst.source_weights();
        let nu = inst.target_weights();
        let product = Matrix::from_fn(mu.len(), nu.len(), |i, j| mu[i] * nu[j]);
        let plan = Coupling::new(product, &inst).unwrap();
        prop_assert!(cost_decomposition_check(&plan, &inst) <= 1e-12);
    }

    #[test]
    fn projection_shifts_every_permutation_equally(data in common::dataset(2..=6, 2..=4)) {
        let inst = TransportInstance::from_dataset(&data, default_kernel()).unwrap();
        let sphere = inst.project_to_sphere().unwrap();
        let shift: f64 = data.bundles().map(|x| x.norm().ln()).sum::<f64>()
            + data.price_vectors().map(|p| p.norm().ln()).sum::<f64>();
        let a = all_permutation_values(inst.cost()).unwrap();
        let b = all_permutation_values(sphere.cost()).unwrap();
        for ((pa, va), (pb, vb)) in a.iter().zip(&b) {
            prop_assert_eq!(pa, pb);
            prop_assert!((va - shift - vb).abs() <= 1e-11);
        }
        prop_assert!(projection_preserves_optimum(&data, default_kernel()).unwrap());
    }
}

#[test]
fn zero_weights_are_dropped() {
    let b = |v: &[f64]| Bundle::new(v.to_vec()).unwrap();
    let p = |v: &[f64]| PriceVector::new(v.to_vec()).unwrap();
    let inst = TransportInstance::new(
        vec![b(&[1.0, 2.0]), b(&[3.0, 1.0]), b(&[2.0, 2.0])],
        vec![0.5, 0.0, 0.5],
        vec![p(&[1.0, 1.0]), p(&[2.0, 0.5])],
        vec![0.25, 0.75],
        default_kernel(),
    )
    .unwrap();
    let (plan, duals) = solve_discrete_ot(&inst).unwrap();
    assert!(plan.plan.row(1).iter().all(|v| *v == 0.0));
    assert!(duals
        .source
        .iter()
        .chain(&duals.target)
        .all(|v| v.is_finite()));
    assert!(duals.max_infeasibility(inst.cost()) <= 1e-12);
    let supply = [0.5, 0.5];
    let reduced = Matrix::from_fn(2, 2, |i, j| inst.cost()[([0, 2][i], j)]);
    assert_relative_eq!(
        plan.value,
        lp_oracle(&reduced, &supply, &[0.25, 0.75]),
        epsilon = 1e-12
    );
}
