//! Rationalizability of consumer-choice data by homogeneous and general
//! utility functions, and its equivalent optimal-transport formulation with
//! cost `ln <x, p>`.

pub mod combinatorics;
pub mod domain;
pub mod error;
pub mod fields;
pub mod lp;
pub mod rationality;
pub mod sampling;
pub mod transport;
pub mod utility;

pub use domain::{
    default_kernel, inner, log_cost, Bundle, Dataset, InnerProduct, Kernel, Matrix, Observation,
    PowerMeanKernel, PriceVector, SharedKernel, WeightedInnerProduct,
};
pub use error::{Error, Result};
pub use fields::{
    check_inverse_demand, discrete_path_sum, gen_ces, gen_cobb_douglas, gen_log_uniform,
    inject_violation, numeric_gradient, potentiality_check, CesField, ClosedPath, CobbDouglasField,
    SmoothDemandField, TwistField,
};
pub use rationality::{
    brute_force_cycle_check, check_cyclical_monotonicity, check_garp, check_harp, cross_log_matrix,
    CrossLogMatrix, Cycle, Status, Verdict, DEFAULT_TOLERANCE,
};
pub use transport::{
    brute_force_assignment, check_support_cyclical_monotonicity, cost_decomposition_check,
    diagonal_report, is_diagonal_optimal, projection_preserves_optimum,
    rationalizability_equivalence, solve_assignment, solve_discrete_ot, Assignment, Coupling,
    DiagonalReport, DualPotentials, EquivalenceReport, TransportInstance,
};
pub use utility::{
    afriat_from_homogeneous, afriat_solve, build_homogeneous_utility, check_superdifferential,
    evaluate_utility, shortest_path_potentials, verify_rationalization, AfriatSolution,
    AfriatUtility, HomogeneousUtility, RationalizationReport, Utility,
};
