use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use revpref_core::fields::{
    check_inverse_demand, log_inner_cost, random_loops, sample_points, standard_loops, CesField,
    ClosedPath, CobbDouglasField, GeneratorConfig, SmoothDemandField, TwistField,
};
use revpref_core::utility::{afriat_from_homogeneous, SuperdifferentialReport};
use revpref_core::{
    afriat_solve, brute_force_cycle_check, build_homogeneous_utility, check_garp, check_harp,
    check_superdifferential, check_support_cyclical_monotonicity, cost_decomposition_check,
    default_kernel, diagonal_report, gen_ces, gen_cobb_douglas, inject_violation,
    potentiality_check, solve_discrete_ot, verify_rationalization, AfriatUtility, Bundle, Coupling,
    Cycle, Error, InnerProduct, RationalizationReport, TransportInstance, Utility, Verdict,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{CheckMethod, FieldKind, FieldsArgs, GenerateArgs, UtilityArgs};
use crate::error::CliError;
use crate::format::{human, human_list};
use crate::io::{self, Format, LabeledDataset, TransportInput};

/// Largest support the permutation test enumerates in a transport report.
const SUPPORT_CHECK_CAP: usize = 8;

/// Result of one command on one input.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// False for a method-level negative verdict (exit code 1).
    pub satisfied: bool,
    pub json: Value,
    pub text: String,
}

fn file_label(path: &Path) -> String {
    path.display().to_string()
}

fn load(path: &Path) -> Result<LabeledDataset, CliError> {
    io::parse_dataset(path, Format::from_path(path))
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn witness_json(cycle: &Cycle, ids: &[String]) -> Value {
    json!({
        "cycle": cycle.indices.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "ids": cycle.indices.iter().map(|&i| ids[i].clone()).collect::<Vec<_>>(),
        "sum": cycle.sum,
    })
}

fn witness_text(cycle: &Cycle, ids: &[String]) -> String {
    let positions: Vec<String> = cycle.indices.iter().map(|i| (i + 1).to_string()).collect();
    let names: Vec<&str> = cycle.indices.iter().map(|&i| ids[i].as_str()).collect();
    format!(
        "witness cycle [{}] (ids {}), sum {}",
        positions.join(", "),
        names.join(" -> "),
        human(cycle.sum)
    )
}

fn status_word(satisfied: bool) -> &'static str {
    if satisfied {
        "rationalizable"
    } else {
        "violated"
    }
}

pub fn check(path: &Path, method: CheckMethod, tolerance: f64) -> Result<Outcome, CliError> {
    let ds = load(path)?;
    let (name, verdict): (&str, Verdict) = match method {
        CheckMethod::Harp => ("harp", check_harp(&ds.data, &InnerProduct, tolerance)),
        CheckMethod::Garp => ("garp", check_garp(&ds.data, tolerance)),
        CheckMethod::BruteForce => (
            "brute_force",
            brute_force_cycle_check(&ds.data, &InnerProduct, tolerance)?,
        ),
    };
    let ok = verdict.is_rationalizable();
    let json = json!({
        "command": "check",
        "method": name,
        "file": file_label(path),
        "observations": ds.data.len(),
        "dimension": ds.data.dimension(),
        "tolerance": tolerance,
        "status": verdict.status,
        "witness": verdict.witness.as_ref().map(|c| witness_json(c, &ds.ids)),
        "min_cycle_sum": verdict.min_cycle_sum,
        "boundary": verdict.is_boundary(tolerance),
    });
    let mut text = format!(
        "{}: {} ({name}, n={}, m={}, tolerance {})\n",
        file_label(path),
        status_word(ok),
        ds.data.len(),
        ds.data.dimension(),
        human(tolerance)
    );
    if let Some(c) = &verdict.witness {
        let _ = writeln!(text, "  {}", witness_text(c, &ds.ids));
    } else if let Some(s) = verdict.min_cycle_sum {
        let _ = writeln!(text, "  smallest cycle sum {}", human(s));
    }
    Ok(Outcome {
        satisfied: ok,
        json,
        text,
    })
}

fn values_at_data(model: &dyn Utility, ds: &LabeledDataset) -> Vec<f64> {
    ds.data
        .bundles()
        .map(|x| model.value_at(x.as_slice()))
        .collect()
}

fn verification_text(text: &mut String, r: &RationalizationReport) {
    let _ = writeln!(
        text,
        "  verification: {} ({} data-point and {} sampled checks, max excess {}, seed {})",
        pass_fail(r.passed),
        r.data_point_checks,
        r.sample_checks,
        human(r.max_violation),
        r.seed
    );
}

fn superdifferential_text(text: &mut String, r: &SuperdifferentialReport) {
    let _ = writeln!(
        text,
        "  superdifferential: {} ({} checks, max violation {})",
        pass_fail(r.passed),
        r.checks,
        human(r.max_violation)
    );
}

pub fn utility(
    path: &Path,
    args: &UtilityArgs,
    tolerance: f64,
    seed: u64,
) -> Result<Outcome, CliError> {
    let ds = load(path)?;
    if args.afriat {
        afriat_report(path, &ds, args.verify_samples, tolerance, seed)
    } else {
        homogeneous_report(path, &ds, args.verify_samples, tolerance, seed)
    }
}

fn homogeneous_report(
    path: &Path,
    ds: &LabeledDataset,
    samples: usize,
    tolerance: f64,
    seed: u64,
) -> Result<Outcome, CliError> {
    let mut json = json!({
        "command": "utility",
        "model": "homogeneous",
        "file": file_label(path),
        "tolerance": tolerance,
        "seed": seed,
        "verify_samples": samples,
    });
    let model = match build_homogeneous_utility(&ds.data, default_kernel(), tolerance) {
        Ok(m) => m,
        Err(Error::NegativeCycle(c)) => {
            json["status"] = json!("violated");
            json["witness"] = witness_json(&c, &ds.ids);
            let text = format!(
                "{}: not rationalizable by a homogeneous utility\n  {}\n",
                file_label(path),
                witness_text(&c, &ds.ids)
            );
            return Ok(Outcome {
                satisfied: false,
                json,
                text,
            });
        }
        Err(e) => return Err(e.into()),
    };
    let values = values_at_data(&model, ds);
    let verification = verify_rationalization(&model, &ds.data, samples, tolerance, seed);
    let sd = check_superdifferential(&model, &ds.data, log_inner_cost, samples, tolerance, seed);
    let ok = verification.passed && sd.passed;
    json["status"] = json!("rationalizable");
    json["potentials"] = json!(model.potentials());
    json["normalizers"] = json!(model.normalizers());
    json["values"] = json!(values);
    json["verification"] = json!(verification);
    json["superdifferential"] = json!(sd);
    json["verified"] = json!(ok);
    let mut text = format!(
        "{}: homogeneous utility u(z) = min_i exp(v_i - d_i) <z, P^i>\n",
        file_label(path)
    );
    let _ = writeln!(text, "  potentials v = {}", human_list(model.potentials()));
    let _ = writeln!(text, "  u(X^i) = {}", human_list(&values));
    verification_text(&mut text, &verification);
    superdifferential_text(&mut text, &sd);
    Ok(Outcome {
        satisfied: ok,
        json,
        text,
    })
}

fn afriat_report(
    path: &Path,
    ds: &LabeledDataset,
    samples: usize,
    tolerance: f64,
    seed: u64,
) -> Result<Outcome, CliError> {
    let mut json = json!({
        "command": "utility",
        "model": "afriat",
        "file": file_label(path),
        "tolerance": tolerance,
        "seed": seed,
        "verify_samples": samples,
    });
    let solution = match afriat_solve(&ds.data, tolerance) {
        Ok(s) => s,
        Err(Error::AfriatInfeasible { residual }) => {
            json["status"] = json!("violated");
            json["phase_one_residual"] = json!(residual);
            let garp = check_garp(&ds.data, tolerance);
            json["witness"] = json!(garp.witness.as_ref().map(|c| witness_json(c, &ds.ids)));
            let mut text = format!(
                "{}: the Afriat inequalities are infeasible (phase-one residual {})\n",
                file_label(path),
                human(residual)
            );
            if let Some(c) = &garp.witness {
                let _ = writeln!(text, "  {}", witness_text(c, &ds.ids));
            }
            return Ok(Outcome {
                satisfied: false,
                json,
                text,
            });
        }
        Err(e) => return Err(e.into()),
    };
    let residual = solution.max_residual(&ds.data);
    let model = AfriatUtility::new(solution.clone(), ds.data.clone())?;
    let values = values_at_data(&model, ds);
    let verification = verify_rationalization(&model, &ds.data, samples, tolerance, seed);
    json["status"] = json!("rationalizable");
    json["levels"] = json!(solution.levels);
    json["multipliers"] = json!(solution.multipliers);
    json["max_residual"] = json!(residual);
    json["values"] = json!(values);
    json["verification"] = json!(verification);

    let mut text = format!(
        "{}: Afriat utility u(x) = min_i y_i + s_i <P^i, x - X^i>\n",
        file_label(path)
    );
    let _ = writeln!(text, "  levels y = {}", human_list(&solution.levels));
    let _ = writeln!(
        text,
        "  multipliers s = {}",
        human_list(&solution.multipliers)
    );
    let _ = writeln!(text, "  max residual {}", human(residual));
    verification_text(&mut text, &verification);

    // the homogeneous model, when it exists, gives a closed-form certificate
    match build_homogeneous_utility(&ds.data, default_kernel(), tolerance) {
        Ok(h) => {
            let cert = afriat_from_homogeneous(&h)?;
            let r = cert.max_residual(&ds.data);
            let _ = writeln!(
                text,
                "  homogeneous certificate y = {}, s = {}, max residual {}",
                human_list(&cert.levels),
                human_list(&cert.multipliers),
                human(r)
            );
            json["homogeneous_certificate"] = json!({
                "levels": cert.levels,
                "multipliers": cert.multipliers,
                "max_residual": r,
            });
        }
        Err(Error::NegativeCycle(_)) => json["homogeneous_certificate"] = Value::Null,
        Err(e) => return Err(e.into()),
    }
    json["verified"] = json!(verification.passed);
    Ok(Outcome {
        satisfied: verification.passed,
        json,
        text,
    })
}

#[derive(Debug, Serialize)]
struct SolvedPlan {
    plan: Vec<Vec<f64>>,
    value: f64,
    source_potentials: Vec<f64>,
    target_potentials: Vec<f64>,
    dual_objective: f64,
    max_dual_infeasibility: f64,
    cost_decomposition_residual: f64,
}

fn solve_plan(inst: &TransportInstance) -> Result<(SolvedPlan, Coupling), CliError> {
    let (plan, duals) = solve_discrete_ot(inst)?;
    let solved = SolvedPlan {
        plan: plan.plan.to_rows(),
        value: plan.value,
        dual_objective: duals.objective(inst),
        max_dual_infeasibility: duals.max_infeasibility(inst.cost()),
        cost_decomposition_residual: cost_decomposition_check(&plan, inst),
        source_potentials: duals.source,
        target_potentials: duals.target,
    };
    Ok((solved, plan))
}

fn plan_text(text: &mut String, s: &SolvedPlan) {
    let _ = writeln!(text, "  optimal plan value {}", human(s.value));
    for row in &s.plan {
        let _ = writeln!(text, "    {}", human_list(row));
    }
    let _ = writeln!(
        text,
        "  potentials phi = {}, psi = {}",
        human_list(&s.source_potentials),
        human_list(&s.target_potentials)
    );
    let _ = writeln!(
        text,
        "  dual objective {}, cost-decomposition residual {}",
        human(s.dual_objective),
        human(s.cost_decomposition_residual)
    );
}

pub fn transport(
    path: &Path,
    diagonal_check: bool,
    solve_only: bool,
    tolerance: f64,
) -> Result<Outcome, CliError> {
    match io::parse_transport_input(path)? {
        TransportInput::Instance(inst) => {
            if diagonal_check {
                return Err(CliError::Usage(format!(
                    "{}: --diagonal-check needs a dataset, not a transport instance",
                    file_label(path)
                )));
            }
            let (solved, _) = solve_plan(&inst)?;
            let mut text = format!(
                "{}: transport instance {}x{}\n",
                file_label(path),
                inst.sources().len(),
                inst.targets().len()
            );
            plan_text(&mut text, &solved);
            Ok(Outcome {
                satisfied: true,
                json: json!({
                    "command": "transport",
                    "mode": "solve",
                    "file": file_label(path),
                    "tolerance": tolerance,
                    "kernel": inst.kernel_tag(),
                    "solution": solved,
                }),
                text,
            })
        }
        TransportInput::Dataset(ds) => {
            let kernel = default_kernel();
            let report = diagonal_report(&ds.data, kernel.clone(), tolerance)?;
            let inst = TransportInstance::from_dataset(&ds.data, kernel)?;
            let (solved, _) = solve_plan(&inst)?;
            let diagonal = Coupling::diagonal(&inst)?;
            let diagonal_residual = cost_decomposition_check(&diagonal, &inst);
            let support_monotone = if ds.data.len() <= SUPPORT_CHECK_CAP {
                Some(check_support_cyclical_monotonicity(
                    &diagonal, &inst, tolerance,
                )?)
            } else {
                None
            };
            let mode = if solve_only {
                "solve"
            } else {
                "diagonal_check"
            };
            let satisfied = solve_only || report.diagonal_optimal;
            let perm: Vec<usize> = report.optimal_permutation.iter().map(|j| j + 1).collect();
            let json = json!({
                "command": "transport",
                "mode": mode,
                "file": file_label(path),
                "tolerance": tolerance,
                "kernel": inst.kernel_tag(),
                "identity_value": report.identity_value,
                "optimal_value": report.optimal_value,
                "optimal_permutation": perm,
                "diagonal_optimal": report.diagonal_optimal,
                "diagonal_support_monotone": support_monotone,
                "diagonal_cost_decomposition_residual": diagonal_residual,
                "solution": solved,
            });
            let mut text = format!(
                "{}: diagonal coupling {}\n",
                file_label(path),
                if report.diagonal_optimal {
                    "is optimal"
                } else {
                    "is not optimal"
                }
            );
            let _ = writeln!(
                text,
                "  identity value {}, optimal value {}, optimal permutation {:?}",
                human(report.identity_value),
                human(report.optimal_value),
                perm
            );
            plan_text(&mut text, &solved);
            Ok(Outcome {
                satisfied,
                json,
                text,
            })
        }
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let err = |source| CliError::Write {
        path: path.display().to_string(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(err)?;
    fs::rename(&tmp, path).map_err(err)
}

/// Generated dataset, serialized in the format of `--out`.
pub struct Generated {
    pub dataset: LabeledDataset,
    pub serialized: String,
    pub outcome: Option<Outcome>,
}

pub fn generate(args: &GenerateArgs, seed: u64) -> Result<Generated, CliError> {
    let cfg = GeneratorConfig::default();
    let (kind, params, dataset) = if args.inject_violation {
        let input = args
            .input
            .as_ref()
            .ok_or_else(|| CliError::Usage("--inject-violation needs --input <dataset>".into()))?;
        let source = load(input)?;
        let data = inject_violation(&source.data, args.strength, seed)?;
        (
            "inject_violation",
            json!({"input": file_label(input), "strength": args.strength}),
            LabeledDataset {
                ids: source.ids,
                data,
            },
        )
    } else if args.ces {
        let weights = args.weights.clone().unwrap_or_else(|| vec![1.0; args.m]);
        let data = gen_ces(args.n, args.m, args.rho, &weights, &cfg, seed)?;
        (
            "ces",
            json!({"rho": args.rho, "weights": weights}),
            io::label(data),
        )
    } else {
        let alpha = args
            .alpha
            .clone()
            .unwrap_or_else(|| vec![1.0 / args.m as f64; args.m]);
        let data = gen_cobb_douglas(args.n, args.m, &alpha, &cfg, seed)?;
        ("cobb_douglas", json!({"alpha": alpha}), io::label(data))
    };
    let format = args.out.as_deref().map_or(Format::Csv, Format::from_path);
    let serialized = io::serialize(&dataset, format);
    let outcome = match &args.out {
        Some(out) => {
            write_atomic(out, &serialized)?;
            Some(Outcome {
                satisfied: true,
                json: json!({
                    "command": "generate",
                    "kind": kind,
                    "parameters": params,
                    "observations": dataset.data.len(),
                    "dimension": dataset.data.dimension(),
                    "seed": seed,
                    "out": file_label(out),
                }),
                text: format!(
                    "wrote {} observations of {} goods ({kind}, seed {seed}) to {}\n",
                    dataset.data.len(),
                    dataset.data.dimension(),
                    file_label(out)
                ),
            })
        }
        None => None,
    };
    Ok(Generated {
        dataset,
        serialized,
        outcome,
    })
}

enum Field {
    CobbDouglas(CobbDouglasField),
    Ces(CesField),
    Twist(TwistField),
}

impl Field {
    fn as_dyn(&self) -> &dyn SmoothDemandField {
        match self {
            Field::CobbDouglas(f) => f,
            Field::Ces(f) => f,
            Field::Twist(f) => f,
        }
    }

    fn log_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            Field::CobbDouglas(f) => Some(f.log_gradient(x)),
            Field::Ces(f) => Some(f.log_gradient(x)),
            Field::Twist(_) => None,
        }
    }
}

fn build_field(args: &FieldsArgs) -> Result<Field, CliError> {
    Ok(match args.field {
        FieldKind::CobbDouglas => {
            let alpha = match (&args.alpha, args.m) {
                (Some(a), _) => a.clone(),
                (None, Some(m)) => vec![1.0 / m as f64; m],
                (None, None) => vec![0.5, 0.5],
            };
            Field::CobbDouglas(CobbDouglasField::new(alpha)?)
        }
        FieldKind::Ces => {
            let weights = args
                .weights
                .clone()
                .unwrap_or_else(|| vec![1.0; args.m.unwrap_or(2)]);
            Field::Ces(CesField::new(args.rho, weights)?)
        }
        FieldKind::Twist => Field::Twist(TwistField::new(args.m.unwrap_or(2))?),
    })
}

pub fn fields(args: &FieldsArgs, tolerance: f64, seed: u64) -> Result<Outcome, CliError> {
    let field = build_field(args)?;
    let f = field.as_dyn();
    let m = f.dimension();
    if args.inverse_demand {
        let points = sample_points(m, args.points, 0.1, 10.0, seed)?;
        if field.log_gradient(&vec![1.0; m]).is_none() {
            return Err(CliError::Usage(format!(
                "{} is not derived from a utility; --inverse-demand needs cobb-douglas or ces",
                f.tag()
            )));
        }
        let report = check_inverse_demand(
            |x| Ok(field.log_gradient(x).expect("utility field")),
            f,
            &points,
            tolerance,
        )?;
        let text = format!(
            "inverse demand for {}: {} ({} points, max residual {}, tolerance {})\n",
            report.field,
            pass_fail(report.passed),
            report.points,
            human(report.max_residual),
            human(tolerance)
        );
        return Ok(Outcome {
            satisfied: report.passed,
            json: json!({
                "command": "fields",
                "check": "inverse_demand",
                "seed": seed,
                "tolerance": tolerance,
                "report": report,
            }),
            text,
        });
    }

    if m < 2 && args.loops > 0 {
        return Err(CliError::Usage("loops need at least two goods".into()));
    }
    let mut paths: Vec<ClosedPath> = Vec::new();
    if args.loops > 0 {
        paths.extend(standard_loops(m)?.into_iter().take(args.loops));
        if args.loops > paths.len() {
            paths.extend(random_loops(m, args.loops - paths.len(), seed)?);
        }
    }
    if args.constant_path {
        paths.push(ClosedPath::constant(Bundle::new(vec![2.0; m])?));
    }
    if paths.is_empty() {
        return Err(CliError::Usage("no loops to evaluate".into()));
    }
    let report = potentiality_check(f, &paths, log_inner_cost, &args.resolutions, args.threshold)?;
    let mut text = format!(
        "closed-path sums for {}: {} (threshold {})\n",
        report.field,
        pass_fail(report.passed),
        human(report.threshold)
    );
    for p in &report.paths {
        let _ = writeln!(text, "  {}: {}", p.label, pass_fail(p.passed));
        for (n, s) in report.resolutions.iter().zip(&p.sums) {
            let _ = writeln!(text, "    N={n:<8} sum {}", human(*s));
        }
        if !p.decay_ratios.is_empty() {
            let _ = writeln!(text, "    decay ratios {}", human_list(&p.decay_ratios));
        }
    }
    Ok(Outcome {
        satisfied: report.passed,
        json: json!({
            "command": "fields",
            "check": "path_integral",
            "seed": seed,
            "tolerance": tolerance,
            "report": report,
        }),
        text,
    })
}
