//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use revpref_core::fields::{
    log_inner_cost, sample_points, standard_loops, GeneratorConfig, DEFAULT_PATH_THRESHOLD,
    DEFAULT_STEP,
};
use revpref_core::rationality::harp_on_matrix;
use revpref_core::sampling::{log_uniform_vec, seeded};
use revpref_core::transport::{permutation_value, ASSIGNMENT_ORACLE_CAP};
use revpref_core::{
    afriat_from_homogeneous, afriat_solve, brute_force_assignment, brute_force_cycle_check,
    build_homogeneous_utility, check_garp, check_harp, check_inverse_demand,
    cost_decomposition_check, cross_log_matrix, default_kernel, diagonal_report, gen_ces,
    gen_cobb_douglas, gen_log_uniform, numeric_gradient, potentiality_check,
    projection_preserves_optimum, rationalizability_equivalence, solve_assignment,
    solve_discrete_ot, verify_rationalization, Bundle, CesField, CobbDouglasField, Coupling,
    Dataset, Error, HomogeneousUtility, InnerProduct, Matrix, SmoothDemandField, TransportInstance,
    TwistField, Utility,
};
use serde_json::Value;

const TOL: f64 = 1e-9;
const SUITE_SIZE: u64 = 200;
const SUITE_SEED: u64 = 1_000;

struct Criterion {
    passed: bool,
    detail: String,
}

impl Criterion {
    fn new(failures: &[String], detail: String) -> Self {
        let detail = match failures.first() {
            None => detail,
            Some(first) => format!("{detail}; {} failure(s), first: {first}", failures.len()),
        };
        Self {
            passed: failures.is_empty(),
            detail,
        }
    }
}

/// `n` in [2, 7], `m` in [2, 5], coordinates log-uniform in [0.1, 10].
fn suite() -> Vec<Dataset> {
    (0..SUITE_SIZE)
        .map(|s| {
            let n = 2 + (s % 6) as usize;
            let m = 2 + ((s / 6) % 4) as usize;
            gen_log_uniform(n, m, 0.1, 10.0, SUITE_SEED + s).unwrap()
        })
        .collect()
}

/// The HARP-passing members of the random suite plus demand-generated data.
fn rationalizable_suite(random: &[Dataset]) -> Vec<Dataset> {
    let cfg = GeneratorConfig::default();
    let mut out: Vec<Dataset> = random
        .iter()
        .filter(|d| check_harp(d, &InnerProduct, TOL).is_rationalizable())
        .cloned()
        .collect();
    for s in 0..40u64 {
        let n = 2 + (s % 8) as usize;
        out.push(gen_cobb_douglas(n, 3, &[0.2, 0.3, 0.5], &cfg, s).unwrap());
        out.push(
            gen_ces(
                n,
                2,
                [-2.0, -0.5, 0.4, 0.8][s as usize % 4],
                &[1.0, 2.0],
                &cfg,
                s,
            )
            .unwrap(),
        );
    }
    out
}

fn within_time(start: Instant, budget: Duration, failures: &mut Vec<String>) -> String {
    let elapsed = start.elapsed();
    if elapsed > budget {
        failures.push(format!("took {elapsed:.2?}, budget {budget:.0?}"));
    }
    format!("{elapsed:.2?}")
}

fn criterion_1(random: &[Dataset]) -> Criterion {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut positives = 0;
    for (k, d) in random.iter().enumerate() {
        let r = rationalizability_equivalence(d, default_kernel(), TOL).unwrap();
        positives += usize::from(r.harp);
        if !r.consistent() {
            failures.push(format!("dataset {k}: {r:?}"));
        }
    }
    let t = within_time(start, Duration::from_secs(60), &mut failures);
    Criterion::new(
        &failures,
        format!(
            "HARP, diagonal optimality and diagonal-support monotonicity agree on {} datasets ({positives} rationalizable) in {t}",
            random.len()
        ),
    )
}

fn criterion_2(random: &[Dataset]) -> Criterion {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut witnesses = 0;
    for (k, d) in random.iter().enumerate() {
        let a = cross_log_matrix(d, &InnerProduct);
        let fast = harp_on_matrix(&a, TOL);
        let slow = brute_force_cycle_check(d, &InnerProduct, TOL).unwrap();
        if fast.status != slow.status {
            failures.push(format!(
                "dataset {k}: {:?} vs {:?}",
                fast.status, slow.status
            ));
        }
        for w in [&fast.witness, &slow.witness].into_iter().flatten() {
            witnesses += 1;
            let recomputed = a.cycle_sum(&w.indices);
            if !(recomputed < -TOL && (recomputed - w.sum).abs() <= 1e-9) {
                failures.push(format!(
                    "dataset {k}: witness {:?} claims {} recomputes {recomputed}",
                    w.indices, w.sum
                ));
            }
        }
    }
    let t = within_time(start, Duration::from_secs(30), &mut failures);
    Criterion::new(
        &failures,
        format!("Floyd-Warshall matches enumeration on {} datasets, {witnesses} witnesses recomputed negative, in {t}", random.len()),
    )
}

fn four_figures(x: f64, expected: f64) -> bool {
    let scale = 10f64.powi(3 - expected.abs().log10().floor() as i32);
    (x * scale).round() == (expected * scale).round()
}

fn criterion_3() -> Criterion {
    let mut failures = Vec::new();
    let violating = Dataset::from_rows(vec![
        (vec![10.0, 1.0], vec![10.0, 1.0]),
        (vec![1.0, 10.0], vec![1.0, 10.0]),
    ])
    .unwrap();
    let swapped = Dataset::from_rows(vec![
        (vec![10.0, 1.0], vec![1.0, 10.0]),
        (vec![1.0, 10.0], vec![10.0, 1.0]),
    ])
    .unwrap();
    let rv = diagonal_report(&violating, default_kernel(), TOL).unwrap();
    let rs = diagonal_report(&swapped, default_kernel(), TOL).unwrap();
    // oracle: explicit enumeration over the two permutations
    let inst = TransportInstance::from_dataset(&violating, default_kernel()).unwrap();
    let oracle = brute_force_assignment(inst.cost()).unwrap();
    let identity = permutation_value(inst.cost(), &[0, 1]);
    for (name, got, want) in [
        ("identity value", rv.identity_value, 10201f64.ln()),
        ("optimal value", rv.optimal_value, 400f64.ln()),
        ("oracle identity", identity, 10201f64.ln()),
        ("oracle optimum", oracle.value, 400f64.ln()),
    ] {
        if !four_figures(got, want) {
            failures.push(format!("{name} {got} vs {want}"));
        }
    }
    if !four_figures(rv.identity_value, 9.230) || !four_figures(rv.optimal_value, 5.991) {
        failures.push("values differ from 9.230 / 5.991 at 4 figures".into());
    }
    if rv.diagonal_optimal || !rs.diagonal_optimal {
        failures.push("diagonal verdicts not reversed by swapping".into());
    }
    let hv = check_harp(&violating, &InnerProduct, TOL).is_rationalizable();
    let hs = check_harp(&swapped, &InnerProduct, TOL).is_rationalizable();
    if hv || !hs {
        failures.push("HARP verdicts not reversed by swapping".into());
    }
    if !four_figures(rs.identity_value, 5.991) || !four_figures(rs.optimal_value, 5.991) {
        failures.push(format!(
            "swapped values {} / {}",
            rs.identity_value, rs.optimal_value
        ));
    }
    Criterion::new(
        &failures,
        format!(
            "identity ln 10201 = {:.5}, optimum ln 400 = {:.5}; swapped data reverses both verdicts",
            rv.identity_value, rv.optimal_value
        ),
    )
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn spot_points(seed: u64, m: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = seeded(seed);
    (0..count)
        .map(|_| log_uniform_vec(&mut rng, m, 0.05, 20.0))
        .collect()
}

fn criterion_4(rationalizable: &[Dataset]) -> Criterion {
    let mut failures = Vec::new();
    let mut samples = 0;
    for (k, d) in rationalizable.iter().enumerate() {
        let u = build_homogeneous_utility(d, default_kernel(), TOL).unwrap();
        let report = verify_rationalization(&u, d, 1000, TOL, k as u64);
        samples += report.sample_checks;
        if !report.passed {
            failures.push(format!("dataset {k}: {report:?}"));
        }
        for i in 0..d.len() {
            let value = u.value_at(d.bundle(i).as_slice());
            let expected = u.potentials()[i].exp();
            if relative_gap(value, expected) > 1e-12 {
                failures.push(format!(
                    "dataset {k}: u(X^{i}) = {value}, exp(v_i) = {expected}"
                ));
            }
        }
        let pts = spot_points(k as u64, d.dimension(), 20);
        for pair in pts.windows(2) {
            let (z1, z2) = (&pair[0], &pair[1]);
            let (u1, u2) = (u.value_at(z1), u.value_at(z2));
            for t in [0.1, 3.7, 25.0] {
                let tz: Vec<f64> = z1.iter().map(|v| v * t).collect();
                if relative_gap(u.value_at(&tz), t * u1) > 1e-12 {
                    failures.push(format!("dataset {k}: homogeneity fails at t = {t}"));
                }
            }
            let mid: Vec<f64> = z1.iter().zip(z2).map(|(a, b)| 0.5 * (a + b)).collect();
            if u.value_at(&mid) < 0.5 * (u1 + u2) - 1e-12 * (u1 + u2).max(1.0) {
                failures.push(format!("dataset {k}: concavity fails"));
            }
        }
    }
    Criterion::new(
        &failures,
        format!(
            "{} HARP-passing datasets verified with {samples} random budget checks; u(X^i) = exp(v_i), homogeneity and concavity to 1e-12",
            rationalizable.len()
        ),
    )
}

fn criterion_5(random: &[Dataset], rationalizable: &[Dataset]) -> Criterion {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, d) in rationalizable.iter().enumerate() {
        let u = build_homogeneous_utility(d, default_kernel(), TOL).unwrap();
        let sol = afriat_from_homogeneous(&u).unwrap();
        let r = sol.max_residual(d);
        worst = worst.max(r);
        if r > 1e-9 || sol.multipliers.iter().any(|s| *s < 1.0 - 1e-12) {
            failures.push(format!("dataset {k}: residual {r}"));
        }
    }
    let mut feasible = 0;
    for (k, d) in random.iter().enumerate() {
        let garp = check_garp(d, TOL).is_rationalizable();
        let lp = match afriat_solve(d, TOL) {
            Ok(_) => true,
            Err(Error::AfriatInfeasible { .. }) => false,
            Err(e) => {
                failures.push(format!("dataset {k}: {e}"));
                continue;
            }
        };
        feasible += usize::from(lp);
        if lp != garp {
            failures.push(format!("dataset {k}: LP feasible {lp}, GARP {garp}"));
        }
    }
    Criterion::new(
        &failures,
        format!(
            "bridge residual <= {worst:.3e} on {} datasets; LP feasibility equals GARP on {} datasets ({feasible} feasible)",
            rationalizable.len(),
            random.len()
        ),
    )
}

fn criterion_6() -> Criterion {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut rng = seeded(6);
    for k in 0..100usize {
        let n = 1 + k % 8;
        assert!(n <= ASSIGNMENT_ORACLE_CAP);
        let entries: Vec<f64> = log_uniform_vec(&mut rng, n * n, 1e-3, 1e3)
            .into_iter()
            .map(f64::ln)
            .collect();
        let cost = Matrix::from_fn(n, n, |i, j| entries[i * n + j]);
        let fast = solve_assignment(&cost).unwrap();
        let slow = brute_force_assignment(&cost).unwrap();
        if (fast.value - slow.value).abs() > 1e-10 {
            failures.push(format!("matrix {k}: {} vs {}", fast.value, slow.value));
        }
    }
    let t = within_time(start, Duration::from_secs(30), &mut failures);
    Criterion::new(
        &failures,
        format!("Hungarian equals exhaustive optimum on 100 matrices (n <= 8) in {t}"),
    )
}

fn criterion_7(random: &[Dataset]) -> Criterion {
    let mut failures = Vec::new();
    let mut plans = 0;
    let mut worst: f64 = 0.0;
    for (k, d) in random.iter().enumerate() {
        let inst = TransportInstance::from_dataset(d, default_kernel()).unwrap();
        let n = d.len();
        let product =
            Coupling::new(Matrix::from_fn(n, n, |_, _| 1.0 / (n * n) as f64), &inst).unwrap();
        let candidates = [
            Coupling::diagonal(&inst).unwrap(),
            solve_discrete_ot(&inst).unwrap().0,
            product,
        ];
        for plan in &candidates {
            plans += 1;
            let r = cost_decomposition_check(plan, &inst);
            worst = worst.max(r);
            if r > 1e-12 {
                failures.push(format!("dataset {k}: residual {r:e}"));
            }
        }
    }
    let small: Vec<&Dataset> = random.iter().filter(|d| d.len() <= 6).take(100).collect();
    for (k, d) in small.iter().enumerate() {
        if !projection_preserves_optimum(d, default_kernel()).unwrap() {
            failures.push(format!("dataset {k}: projection changes the optimal set"));
        }
    }
    Criterion::new(
        &failures,
        format!(
            "decomposition residual <= {worst:.1e} on {plans} plans; projection preserves the optimum on {} datasets (n <= 6)",
            small.len()
        ),
    )
}

fn criterion_8() -> Criterion {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut min_ratio = f64::INFINITY;
    let loops = standard_loops(2).unwrap();
    for alpha in [vec![0.5, 0.5], vec![0.2, 0.8], vec![0.7, 0.3]] {
        let cd = CobbDouglasField::new(alpha.clone()).unwrap();
        let r = potentiality_check(
            &cd,
            &loops,
            log_inner_cost,
            &[100, 1000],
            DEFAULT_PATH_THRESHOLD,
        )
        .unwrap();
        for p in &r.paths {
            min_ratio = min_ratio.min(p.decay_ratios[0]);
            if p.decay_ratios[0] < 5.0 || !p.passed {
                failures.push(format!(
                    "alpha {alpha:?}, {}: ratio {}",
                    p.label, p.decay_ratios[0]
                ));
            }
        }
    }
    let twist = TwistField::new(2).unwrap();
    let r = potentiality_check(
        &twist,
        &loops,
        log_inner_cost,
        &[100, 1000],
        DEFAULT_PATH_THRESHOLD,
    )
    .unwrap();
    let twist_max = r
        .paths
        .iter()
        .map(|p| p.decay_ratios[0])
        .fold(0.0, f64::max);
    if r.passed || r.paths.iter().any(|p| p.passed) {
        failures.push("non-potential field passed".into());
    }
    let t = within_time(start, Duration::from_secs(10), &mut failures);
    Criterion::new(
        &failures,
        format!(
            "Cobb-Douglas sums decay by >= {min_ratio:.2} from N=100 to 1000 on 3 loops; twist field decays by at most {twist_max:.2} and fails; {t}"
        ),
    )
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gradient_checks(
    u: &HomogeneousUtility,
    d: &Dataset,
    failures: &mut Vec<String>,
    tag: &str,
) -> usize {
    let mut checked = 0;
    for i in 0..d.len() {
        let x = d.bundle(i).as_slice();
        let (k, margin) = u.active_piece(x);
        if margin < 1e-6 {
            continue;
        }
        checked += 1;
        let h = DEFAULT_STEP.min(u.single_piece_step(x).unwrap());
        let g = numeric_gradient(|z| u.value_at(z), d.bundle(i), h).unwrap();
        let p = d.prices(i).as_slice();
        let cosine = dot(&g, p) / (dot(&g, &g).sqrt() * dot(p, p).sqrt());
        if k != i || cosine < 1.0 - 1e-6 {
            failures.push(format!(
                "{tag} point {i}: active piece {k}, cosine {cosine}"
            ));
        }
        let value = u.value_at(x);
        if relative_gap(dot(x, &g), value) > 1e-6 {
            failures.push(format!(
                "{tag} point {i}: Euler <x, grad u> = {}, u = {value}",
                dot(x, &g)
            ));
        }
    }
    checked
}

type Gradient<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;

fn criterion_9(rationalizable: &[Dataset]) -> Criterion {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (k, d) in rationalizable.iter().enumerate() {
        let u = build_homogeneous_utility(d, default_kernel(), TOL).unwrap();
        checked += gradient_checks(&u, d, &mut failures, &format!("dataset {k}"));
    }
    if checked == 0 {
        failures.push("no data point had a unique minimizer".into());
    }
    let mut worst: f64 = 0.0;
    let cd = CobbDouglasField::new(vec![0.2, 0.3, 0.5]).unwrap();
    let ces = CesField::new(-0.7, vec![1.0, 0.5, 2.0]).unwrap();
    let points = sample_points(3, 50, 0.1, 10.0, 9).unwrap();
    let fields: [(&dyn SmoothDemandField, Gradient); 2] = [
        (&cd, Box::new(|x: &[f64]| cd.log_gradient(x))),
        (&ces, Box::new(|x: &[f64]| ces.log_gradient(x))),
    ];
    for (field, grad) in fields {
        let r = check_inverse_demand(|x| Ok(grad(x)), field, &points, 1e-8).unwrap();
        worst = worst.max(r.max_residual);
        if !r.passed {
            failures.push(format!("{}: residual {}", r.field, r.max_residual));
        }
    }
    let ces_numeric = check_inverse_demand(
        |x| numeric_gradient(|z| ces.log_utility(z), &Bundle::new(x.to_vec())?, 1e-6),
        &ces,
        &points,
        1e-8,
    )
    .unwrap();
    if !ces_numeric.passed {
        failures.push(format!(
            "numeric CES gradient residual {}",
            ces_numeric.max_residual
        ));
    }
    Criterion::new(
        &failures,
        format!(
            "{checked} unique-minimizer data points parallel to P^i with Euler relation to 1e-6; inverse-demand residual <= {worst:.1e} at 50 points (numeric CES {:.1e})",
            ces_numeric.max_residual
        ),
    )
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_revpref")
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../datasets")
}

fn revpref(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env_remove("REVPREF_TOLERANCE")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn without_file(stdout: &[u8]) -> Vec<Value> {
    String::from_utf8_lossy(stdout)
        .lines()
        .map(|l| {
            let mut v: Value = serde_json::from_str(l).expect("JSON report line");
            v.as_object_mut().map(|m| m.remove("file"));
            v
        })
        .collect()
}

fn criterion_10() -> Criterion {
    let mut failures = Vec::new();
    let dir = corpus();
    let path = |name: &str| dir.join(name).display().to_string();

    let expectations: [(&[&str], &str, i32); 12] = [
        (&["check", "--harp"], "violating.csv", 1),
        (&["check", "--harp"], "swapped.csv", 0),
        (&["check", "--harp"], "single.csv", 0),
        (&["check", "--garp"], "garp_not_harp.csv", 0),
        (&["check", "--harp"], "garp_not_harp.csv", 1),
        (&["utility", "--homogeneous"], "violating.csv", 1),
        (
            &["utility", "--homogeneous"],
            "cobb_douglas_two_point.csv",
            0,
        ),
        (&["transport", "--diagonal-check"], "violating.csv", 1),
        (&["transport", "--diagonal-check"], "swapped.csv", 0),
        (&["transport", "--diagonal-check"], "single.csv", 0),
        (&["check"], "invalid/zero_quantity.csv", 2),
        (&["check"], "invalid/ragged.csv", 2),
    ];
    for (args, file, want) in expectations {
        let mut all: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        all.push(path(file));
        let refs: Vec<&str> = all.iter().map(String::as_str).collect();
        let got = code(&revpref(&refs));
        if got != want {
            failures.push(format!("{args:?} {file}: exit {got}, expected {want}"));
        }
    }
    if code(&revpref(&[
        "check",
        "--harp",
        "--garp",
        &path("single.csv"),
    ])) != 2
    {
        failures.push("conflicting flags not rejected with exit 2".into());
    }
    if code(&revpref(&["fields"])) != 0 || code(&revpref(&["fields", "--field", "twist"])) != 1 {
        failures.push("fields exit codes".into());
    }

    // seeded determinism of generated files and reports
    let tmp = std::env::temp_dir().join(format!("revpref-acceptance-{}", std::process::id()));
    fs::create_dir_all(&tmp).unwrap();
    for ext in ["csv", "json"] {
        let outs: Vec<PathBuf> = (0..2).map(|k| tmp.join(format!("gen{k}.{ext}"))).collect();
        for out in &outs {
            let o = revpref(&[
                "generate",
                "--cobb-douglas",
                "-n",
                "2",
                "-m",
                "2",
                "--seed",
                "7",
                "--out",
                &out.display().to_string(),
            ]);
            if code(&o) != 0 {
                failures.push(format!(
                    "generate failed: {}",
                    String::from_utf8_lossy(&o.stderr)
                ));
            }
        }
        let (a, b) = (
            fs::read(&outs[0]).unwrap_or_default(),
            fs::read(&outs[1]).unwrap_or_default(),
        );
        if a.is_empty() || a != b {
            failures.push(format!("generated {ext} files differ"));
        }
        if code(&revpref(&[
            "check",
            "--harp",
            &outs[0].display().to_string(),
        ])) != 0
        {
            failures.push(format!("generated {ext} file fails HARP"));
        }
    }
    let mut injected_failures = 0;
    for seed in 0..20 {
        let src = tmp.join(format!("cd{seed}.csv"));
        let bad = tmp.join(format!("bad{seed}.csv"));
        let s = seed.to_string();
        revpref(&[
            "generate",
            "--cobb-douglas",
            "-n",
            "6",
            "-m",
            "3",
            "--seed",
            &s,
            "--out",
            &src.display().to_string(),
        ]);
        revpref(&[
            "generate",
            "--inject-violation",
            "--input",
            &src.display().to_string(),
            "--seed",
            &s,
            "--out",
            &bad.display().to_string(),
        ]);
        if code(&revpref(&["check", "--harp", &bad.display().to_string()])) == 1 {
            injected_failures += 1;
        }
    }
    if injected_failures < 19 {
        failures.push(format!(
            "only {injected_failures}/20 injected files fail HARP"
        ));
    }
    let _ = fs::remove_dir_all(&tmp);
    for args in [
        vec![
            "utility",
            "--format",
            "json",
            "--verify-samples",
            "200",
            "--seed",
            "5",
        ],
        vec!["transport", "--format", "json", "--solve"],
        vec!["fields", "--format", "json", "--loops", "5", "--seed", "5"],
    ] {
        let mut args: Vec<String> = args.into_iter().map(String::from).collect();
        if args[0] != "fields" {
            args.push(path("cobb_douglas_n8_m3.csv"));
        }
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (revpref(&refs), revpref(&refs));
        if a.stdout.is_empty() || a.stdout != b.stdout {
            failures.push(format!("{} JSON report not byte-identical", args[0]));
        }
    }

    // CSV and JSON twins agree on every command
    let mut pairs = 0;
    let mut entries: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    let mut verdicts = BTreeMap::new();
    for csv in entries
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
    {
        let json = csv.with_extension("json");
        if !json.exists() {
            failures.push(format!("{} has no JSON twin", csv.display()));
            continue;
        }
        pairs += 1;
        for cmd in [
            vec!["check", "--harp"],
            vec!["check", "--garp"],
            vec!["check", "--brute-force"],
            vec!["utility", "--homogeneous", "--verify-samples", "50"],
            vec!["utility", "--afriat", "--verify-samples", "50"],
            vec!["transport", "--diagonal-check"],
        ] {
            let run = |file: &Path| {
                let mut args: Vec<String> = cmd.iter().map(|s| s.to_string()).collect();
                args.extend(["--format".into(), "json".into(), file.display().to_string()]);
                let refs: Vec<&str> = args.iter().map(String::as_str).collect();
                revpref(&refs)
            };
            let (a, b) = (run(csv), run(&json));
            if code(&a) != code(&b) || without_file(&a.stdout) != without_file(&b.stdout) {
                failures.push(format!("{cmd:?} disagrees on {}", csv.display()));
            }
            verdicts.insert(format!("{}", code(&a)), ());
        }
    }
    if pairs < 8 {
        failures.push(format!("corpus has only {pairs} CSV/JSON pairs"));
    }
    Criterion::new(
        &failures,
        format!(
            "exit codes, byte-identical generated files and JSON reports, CSV/JSON agreement on {pairs} corpus pairs ({injected_failures}/20 injected files rejected)"
        ),
    )
}

fn main() {
    let random = suite();
    let rationalizable = rationalizable_suite(&random);
    let criteria: Vec<(usize, Box<dyn Fn() -> Criterion>)> = vec![
        (1, Box::new(|| criterion_1(&random))),
        (2, Box::new(|| criterion_2(&random))),
        (3, Box::new(criterion_3)),
        (4, Box::new(|| criterion_4(&rationalizable))),
        (5, Box::new(|| criterion_5(&random, &rationalizable))),
        (6, Box::new(criterion_6)),
        (7, Box::new(|| criterion_7(&random))),
        (8, Box::new(criterion_8)),
        (9, Box::new(|| criterion_9(&rationalizable))),
        (10, Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (k, run) in criteria {
        let c = run();
        failed += usize::from(!c.passed);
        println!(
            "criterion {k:>2}: {} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
