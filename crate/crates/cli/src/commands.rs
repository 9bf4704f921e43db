use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use graph_hjb::ergodic::analyze;
use graph_hjb::hjb::{
    default_steps, hj_residual, hj_residual_bound, optimal_rate, solve_value_function,
};
use graph_hjb::oracle::{compare_solutions, integrate_hj_backward};
use graph_hjb::problem::load_problem;
use graph_hjb::sim::{
    default_time_steps, estimate_objective, frozen_policy_bias, ConstantPolicy, OptimalPolicy,
};
use graph_hjb::{Problem, Solution};
use serde::Serialize;

use crate::artifacts::{artifact_path, csv_bytes, fmt_f64, json_bytes, Artifacts};
use crate::policy_file::parse_constant_policy;
use crate::PolicySpec;

/// RK4 substeps per frozen step when computing the simulator's bias.
const BIAS_SUBSTEPS: usize = 4;
const CHECK_DEVIATION_TOL: f64 = 1e-6;

pub fn read_problem(path: &Path) -> Result<Problem> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    load_problem(&text).with_context(|| format!("invalid problem document {}", path.display()))
}

fn prefix_or_default(out: Option<PathBuf>, problem: &Path) -> PathBuf {
    out.unwrap_or_else(|| problem.with_extension(""))
}

pub fn solve(problem: &Path, steps: Option<usize>, out: Option<PathBuf>) -> Result<Vec<PathBuf>> {
    let p = read_problem(problem)?;
    let sol = solve_value_function(&p, steps.unwrap_or_else(|| default_steps(&p)))?;
    let prefix = prefix_or_default(out, problem);

    let n = p.n_nodes();
    let mut header = vec!["t".to_string()];
    header.extend((0..n).map(|i| format!("u_{i}")));
    let value_rows = sol.grid().iter().enumerate().map(|(k, &t)| {
        std::iter::once(fmt_f64(t))
            .chain(sol.u_at(k).iter().map(|&u| fmt_f64(u)))
            .collect()
    });
    let value = csv_bytes(&header, value_rows)?;
    let policy = csv_bytes(
        &["t", "from", "to", "lambda"].map(String::from),
        policy_rows(&p, &sol),
    )?;

    let mut files = Artifacts::default();
    files.stage(artifact_path(&prefix, "value.csv"), &value)?;
    files.stage(artifact_path(&prefix, "policy.csv"), &policy)?;
    files.commit()
}

fn policy_rows<'a>(p: &'a Problem, sol: &'a Solution) -> impl Iterator<Item = Vec<String>> + 'a {
    sol.grid().iter().enumerate().flat_map(move |(k, &t)| {
        let u = sol.u_at(k);
        p.edges().map(move |e| {
            vec![
                fmt_f64(t),
                e.from.to_string(),
                e.to.to_string(),
                fmt_f64(optimal_rate(e.b, u[e.to] - u[e.from])),
            ]
        })
    })
}

#[derive(Serialize)]
struct ErgodicDocument {
    gamma: f64,
    alpha: f64,
    f: Vec<f64>,
    phi: Vec<f64>,
    sigma: f64,
    lambda_inf: Vec<f64>,
}

pub fn ergodic(problem: &Path, out: Option<PathBuf>) -> Result<Vec<PathBuf>> {
    let p = read_problem(problem)?;
    let e = analyze(&p)?;
    let doc = ErgodicDocument {
        gamma: e.gamma,
        alpha: e.alpha,
        lambda_inf: e.asymptotic_intensities.to_flat(),
        f: e.f,
        phi: e.phi,
        sigma: e.sigma,
    };
    println!("gamma = {}", fmt_f64(doc.gamma));
    println!("alpha = {}", fmt_f64(doc.alpha));
    let mut files = Artifacts::default();
    files.stage(
        artifact_path(&prefix_or_default(out, problem), "ergodic.json"),
        &json_bytes(&doc)?,
    )?;
    files.commit()
}

pub struct SimulateArgs {
    pub policy: PolicySpec,
    pub start: usize,
    pub paths: usize,
    pub seed: u64,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
}

pub fn simulate(problem: &Path, args: SimulateArgs) -> Result<Vec<PathBuf>> {
    let p = read_problem(problem)?;
    if args.start >= p.n_nodes() {
        bail!(
            "start node {} out of range for {} nodes",
            args.start,
            p.n_nodes()
        );
    }
    let steps = args
        .steps
        .unwrap_or_else(|| default_time_steps(p.horizon()));
    let est = match &args.policy {
        PolicySpec::Optimal => {
            let n = default_steps(&p);
            let sol = solve_value_function(&p, n)?;
            let est = estimate_objective(
                &p,
                &OptimalPolicy::new(&p, &sol),
                args.start,
                args.paths,
                args.seed,
                steps,
            )?;
            let u0 = sol.initial_values()[args.start];
            let bias = frozen_policy_bias(&p, &sol, steps, BIAS_SUBSTEPS)?[args.start];
            let dev = (est.mean - u0).abs();
            // One rounding per propagation step in u.
            let rounding = n as f64 * f64::EPSILON * (1.0 + u0.abs());
            let allowed = 3.0 * est.stderr + bias.abs() + rounding;
            println!("u_{}(0) = {}", args.start, fmt_f64(u0));
            println!(
                "mean    = {} (stderr {})",
                fmt_f64(est.mean),
                fmt_f64(est.stderr)
            );
            println!("|mean - u| = {dev:.3e}, allowed {allowed:.3e} (3*stderr + |bias| + rounding, bias {bias:.3e})");
            println!(
                "{}",
                if dev <= allowed {
                    "consistent"
                } else {
                    "inconsistent"
                }
            );
            est
        }
        PolicySpec::Constant(file) => {
            let text = fs::read_to_string(file)
                .with_context(|| format!("cannot read {}", file.display()))?;
            let pol = ConstantPolicy::new(parse_constant_policy(&text, &p)?);
            let est = estimate_objective(&p, &pol, args.start, args.paths, args.seed, steps)?;
            println!(
                "mean = {} (stderr {})",
                fmt_f64(est.mean),
                fmt_f64(est.stderr)
            );
            est
        }
    };
    let mut files = Artifacts::default();
    files.stage(
        artifact_path(&prefix_or_default(args.out, problem), "sim.json"),
        &json_bytes(&est)?,
    )?;
    files.commit()
}

/// The solver's default grid resolves `B`, but RK4 on the nonlinear system
/// must also resolve the optimal exit rates, which carry `e^{u_j - u_i}`.
/// Takes 100 steps per unit of `T (1 + Λ)` with `Λ` the fastest total exit
/// rate seen on the default grid, capped at 10⁷.
fn check_steps(p: &Problem) -> Result<usize> {
    let base = default_steps(p);
    let sol = solve_value_function(p, base)?;
    let mut lam = 0.0f64;
    for u in sol.u() {
        for i in 0..p.n_nodes() {
            let exit: f64 = p
                .neighbors(i)
                .iter()
                .zip(p.offsets(i))
                .map(|(&j, &b)| optimal_rate(b, u[j] - u[i]))
                .sum();
            lam = lam.max(exit);
        }
    }
    let wanted = (100.0 * p.horizon() * (1.0 + lam)).ceil();
    Ok(base.max(wanted.min(1e7) as usize))
}

/// Returns whether both checks passed.
pub fn check(problem: &Path, steps: Option<usize>) -> Result<bool> {
    let p = read_problem(problem)?;
    let n = match steps {
        Some(n) => n,
        None => check_steps(&p)?,
    };
    let sol = solve_value_function(&p, n)?;
    let deviation = match integrate_hj_backward(&p, n) {
        Ok(oracle) => compare_solutions(&sol, &oracle)?,
        Err(e) => {
            println!("oracle failed: {e}");
            f64::INFINITY
        }
    };
    let residual = hj_residual(&sol, &p);
    let bound = hj_residual_bound(&sol, &p);
    let dev_ok = deviation <= CHECK_DEVIATION_TOL;
    let res_ok = residual <= bound;
    println!("steps: {n}");
    println!(
        "closed form vs RK4: {deviation:.3e} (tol {CHECK_DEVIATION_TOL:e}) {}",
        if dev_ok { "ok" } else { "FAIL" }
    );
    println!(
        "HJ residual: {residual:.3e} (bound {bound:.3e}) {}",
        if res_ok { "ok" } else { "FAIL" }
    );
    Ok(dev_ok && res_ok)
}
