//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//!     cargo test -p graph-hjb --test acceptance

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{random_problem, Ranges};
use graph_hjb::ergodic::analyze;
use graph_hjb::hjb::{
    argmax_intensities, build_generator_matrix, default_steps, hamiltonian, optimal_policy_at,
    running_cost, solve_value_function,
};
use graph_hjb::oracle::{compare_solutions, integrate_hj_backward};
use graph_hjb::sim::{
    estimate_objective, evaluate_fixed_policy, frozen_policy_bias, sample_path, ConstantPolicy,
    OptimalPolicy,
};
use graph_hjb::{Edge, EdgeIntensities, Problem};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = common::rng(1);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let t = [0.5, 1.0, 5.0][k % 3];
        let p = random_problem(&mut rng, &Ranges::default(), t, k % 2 == 0);
        let sol = solve_value_function(&p, 10_000).unwrap();
        let oracle = integrate_hj_backward(&p, 10_000).unwrap();
        worst = worst.max(compare_solutions(&sol, &oracle).unwrap());
    }
    outcome(
        worst <= 1e-6,
        format!("50 instances, max |u_closed - u_rk4| = {worst:.3e} (tol 1e-6)"),
    )
}

fn positivity() -> Outcome {
    let mut rng = common::rng(1);
    let mut instances: Vec<Problem> = (0..50)
        .map(|k| {
            random_problem(
                &mut rng,
                &Ranges::default(),
                [0.5, 1.0, 5.0][k % 3],
                k % 2 == 0,
            )
        })
        .collect();
    let mut rng = common::rng(2);
    let wide = Ranges {
        r: 50.0,
        ..Ranges::default()
    };
    instances.extend((0..20).map(|k| random_problem(&mut rng, &wide, 20.0, k % 2 == 0)));
    // w is held as per-node logs u = log w, so w > 0 iff every u is finite.
    // A single shared scale cannot always hold all components at once.
    let (mut points, mut bad, mut wide_span) = (0usize, 0usize, 0usize);
    for p in &instances {
        let sol = solve_value_function(p, default_steps(p)).unwrap();
        for k in 0..=sol.n_steps() {
            points += 1;
            if !sol.u_at(k).iter().all(|u| u.is_finite()) {
                bad += 1;
            } else if sol.w_at(k).is_err() {
                wide_span += 1;
            }
        }
    }
    outcome(
        bad == 0,
        format!(
            "{} instances incl. 20 with |r| ≤ 50, T = 20: {bad} of {points} grid points non-positive \
             ({wide_span} span beyond one shared float scale)",
            instances.len()
        ),
    )
}

fn envelope() -> Outcome {
    let mut rng = common::rng(3);
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_eq = 0.0f64;
    let mut triples = 0;
    while triples < 1000 {
        let p = random_problem(&mut rng, &Ranges::default(), 1.0, false);
        let i = rng.random_range(0..p.n_nodes());
        let d = p.neighbors(i).len();
        if d == 0 {
            continue;
        }
        triples += 1;
        let pv: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let best = argmax_intensities(&p, i, &pv).unwrap();
        // Half the candidates sit close to the maximizer, where the bound is tight.
        let near = triples % 2 == 0;
        let lam: Vec<f64> = best
            .iter()
            .map(|&l| match (near, rng.random_bool(0.1)) {
                (true, _) => l * (1.0 + rng.random_range(-1e-3..1e-3)),
                (false, true) => 0.0,
                (false, false) => rng.random_range(0.0..10.0),
            })
            .collect();
        let h = hamiltonian(&p, i, &pv).unwrap();
        let scale = h.abs().max(1.0);
        let objective =
            |l: &[f64]| l.iter().zip(&pv).map(|(a, b)| a * b).sum::<f64>() - running_cost(&p, i, l);
        worst_gap = worst_gap.max((objective(&lam) - h) / scale);
        worst_eq = worst_eq.max((objective(&best) - h).abs() / scale);
    }
    outcome(
        worst_gap <= 1e-12 && worst_eq <= 1e-12,
        format!("1000 triples, max (obj - H)/max(1,|H|) = {worst_gap:.3e}, argmax equality error {worst_eq:.3e} (tol 1e-12)"),
    )
}

fn simulation() -> Outcome {
    const PATHS: usize = 100_000;
    const STEPS: usize = 200;
    let mut rng = common::rng(4);
    let ranges = Ranges {
        n: (2, 6),
        ..Ranges::default()
    };
    let mut optimal_ok = 0;
    let mut tested = 0;
    let mut dominated = 0;
    let mut worst_z = 0.0f64;
    for k in 0..5 {
        let p = random_problem(&mut rng, &ranges, 1.0, true);
        let i0 = rng.random_range(0..p.n_nodes());
        let sol = solve_value_function(&p, default_steps(&p)).unwrap();
        let u0 = sol.initial_values()[i0];
        let bias = frozen_policy_bias(&p, &sol, STEPS, 50).unwrap()[i0];
        let est = estimate_objective(&p, &OptimalPolicy::new(&p, &sol), i0, PATHS, 100 + k, STEPS)
            .unwrap();
        let dev = (est.mean - u0).abs();
        worst_z = worst_z.max(dev / est.stderr);
        if dev <= 3.0 * est.stderr + bias.abs() {
            optimal_ok += 1;
        }
        for c in 0..5u64 {
            let rates = EdgeIntensities::from_fn(&p, |_, _| rng.random_range(0.0..3.0)).unwrap();
            let pol = ConstantPolicy::new(rates);
            let truth = evaluate_fixed_policy(&p, &pol).unwrap()[i0];
            if truth > u0 - 0.05 {
                continue;
            }
            tested += 1;
            let est = estimate_objective(&p, &pol, i0, PATHS, 1000 + 10 * k + c, 1).unwrap();
            if est.mean < u0 - 3.0 * est.stderr {
                dominated += 1;
            }
        }
    }
    outcome(
        optimal_ok == 5 && dominated == tested,
        format!(
            "optimal policy within 3·stderr + bias on {optimal_ok}/5 (max |dev|/stderr {worst_z:.2}); \
             {dominated}/{tested} clearly suboptimal constant policies below u - 3·stderr"
        ),
    )
}

fn ergodic_constant() -> Outcome {
    let mut rng = common::rng(5);
    let ranges = Ranges {
        n: (2, 8),
        ..Ranges::default()
    };
    let (mut gamma_err, mut res, mut positive) = (0.0f64, 0.0f64, true);
    for _ in 0..20 {
        let p = random_problem(&mut rng, &ranges, 1.0, true);
        let erg = analyze(&p).unwrap();
        let b = build_generator_matrix(&p).into_matrix();
        gamma_err = gamma_err.max((erg.gamma - common::dominant_real(&b)).abs());
        let bf = b.mul_vec(&erg.f);
        let btphi = b.transpose().mul_vec(&erg.phi);
        let scaled = |v: &[f64]| v.iter().map(|x| erg.gamma * x).collect::<Vec<_>>();
        res = res.max(max_abs_diff(&bf, &scaled(&erg.f)));
        res = res.max(max_abs_diff(&btphi, &scaled(&erg.phi)));
        positive &= erg.f.iter().chain(&erg.phi).all(|&x| x > 0.0);
    }
    outcome(
        gamma_err <= 1e-9 && res <= 1e-9 && positive,
        format!("20 instances, |γ - dense| = {gamma_err:.3e}, eigen residual = {res:.3e} (tol 1e-9), f, φ > 0: {positive}"),
    )
}

/// `ρ(σ) - |λ₂(σ)|` for `B + σI`.
fn spectral_gap(p: &Problem, sigma: f64) -> f64 {
    let m = build_generator_matrix(p).into_matrix().shifted(sigma);
    let mut mods: Vec<f64> = common::dense_eigenvalues(&m)
        .iter()
        .map(|z| z.norm())
        .collect();
    mods.sort_by(|a, b| b.total_cmp(a));
    mods[0] - mods.get(1).copied().unwrap_or(0.0)
}

/// Two-cycle with `B = [[0, 0.1], [0.1, 0]]`: spectral gap exactly 0.2.
fn boundary_gap_instance() -> Problem {
    let b = 10f64.ln() - 1.0;
    Problem::new(
        2,
        [Edge::new(0, 1, b), Edge::new(1, 0, b)],
        vec![0.0, 0.0],
        vec![1.0, -1.0],
        1.0,
    )
    .unwrap()
}

struct LimitCheck {
    gap: f64,
    errors: Vec<f64>,
    policy_gap: f64,
    monotone: bool,
}

fn ergodic_limit_check(p: &Problem) -> LimitCheck {
    const HORIZONS: [f64; 4] = [5.0, 10.0, 20.0, 40.0];
    let erg = analyze(p).unwrap();
    let mut errors = Vec::new();
    let mut floors = Vec::new();
    let mut policy_gap = 0.0;
    for t in HORIZONS {
        let q = p.with_horizon(t).unwrap();
        let sol = solve_value_function(&q, 400).unwrap();
        let u = sol.initial_values();
        let offsets: Vec<f64> = (0..q.n_nodes()).map(|i| erg.limit_offset(i)).collect();
        errors.push(
            (0..q.n_nodes())
                .map(|i| (u[i] - erg.gamma * t - offsets[i]).abs())
                .fold(0.0, f64::max),
        );
        // Rounding level of the difference of quantities of size |γ| T.
        let size = 1.0 + erg.gamma.abs() * t + offsets.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        floors.push(1e3 * f64::EPSILON * size);
        if t == 40.0 {
            policy_gap = optimal_policy_at(&sol, &q, 0.0)
                .unwrap()
                .max_abs_diff(&erg.asymptotic_intensities);
        }
    }
    let monotone = (1..errors.len()).all(|k| errors[k] < errors[k - 1] || errors[k] <= floors[k]);
    LimitCheck {
        gap: spectral_gap(p, erg.sigma),
        errors,
        policy_gap,
        monotone,
    }
}

fn ergodic_limits() -> Outcome {
    let mut rng = common::rng(6);
    let ranges = Ranges {
        n: (2, 8),
        ..Ranges::default()
    };
    let mut instances = vec![boundary_gap_instance()];
    while instances.len() < 21 {
        let p = random_problem(&mut rng, &ranges, 1.0, true);
        if spectral_gap(&p, analyze(&p).unwrap().sigma) >= 0.2 {
            instances.push(p);
        }
    }
    let checks: Vec<LimitCheck> = instances.iter().map(ergodic_limit_check).collect();
    let ok = |c: &LimitCheck| c.errors[3] <= 1e-6 && c.monotone && c.policy_gap <= 1e-6;
    let failing: Vec<String> = checks
        .iter()
        .filter(|c| !ok(c))
        .map(|c| {
            format!(
                "gap {:.3}: error {:.2e}, policy gap {:.2e}",
                c.gap, c.errors[3], c.policy_gap
            )
        })
        .collect();
    let wide = checks.iter().filter(|c| c.gap >= 0.5);
    let wide_ok = wide.clone().all(ok);
    let worst_wide = wide
        .clone()
        .map(|c| c.errors[3].max(c.policy_gap))
        .fold(0.0, f64::max);
    outcome(
        failing.is_empty(),
        format!(
            "{} instances with gap ≥ 0.2 (incl. a two-cycle at gap 0.2); failing: [{}]; \
             the {} with gap ≥ 0.5 all pass: {wide_ok} (worst {worst_wide:.2e})",
            checks.len(),
            failing.join("; "),
            wide.count(),
        ),
    )
}

fn covariance() -> Outcome {
    let mut rng = common::rng(7);
    let (mut g_err, mut g_pol, mut r_err, mut r_pol, mut r_gamma, mut r_inf) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..10 {
        let p = random_problem(&mut rng, &Ranges::default(), 2.0, k % 2 == 0);
        let sol = solve_value_function(&p, 1000).unwrap();
        let c = rng.random_range(-3.0..3.0);
        let rho = rng.random_range(-3.0..3.0);
        let pg = p
            .with_terminal_rewards(p.terminal_rewards().iter().map(|g| g + c).collect())
            .unwrap();
        let pr = p
            .with_rewards(p.rewards().iter().map(|r| r + rho).collect())
            .unwrap();
        let (sg, sr) = (
            solve_value_function(&pg, 1000).unwrap(),
            solve_value_function(&pr, 1000).unwrap(),
        );
        for (k, &t) in sol.grid().iter().enumerate() {
            for i in 0..p.n_nodes() {
                g_err = g_err.max((sg.u_at(k)[i] - sol.u_at(k)[i] - c).abs());
                r_err = r_err.max((sr.u_at(k)[i] - sol.u_at(k)[i] - rho * (2.0 - t)).abs());
            }
        }
        for t in [0.0, 0.5, 1.3, 2.0] {
            let base = optimal_policy_at(&sol, &p, t).unwrap();
            g_pol = g_pol.max(base.max_abs_diff(&optimal_policy_at(&sg, &pg, t).unwrap()));
            r_pol = r_pol.max(base.max_abs_diff(&optimal_policy_at(&sr, &pr, t).unwrap()));
        }
        if k % 2 == 0 {
            let (a, b) = (analyze(&p).unwrap(), analyze(&pr).unwrap());
            r_gamma = r_gamma.max((b.gamma - a.gamma - rho).abs());
            r_inf = r_inf.max(
                a.asymptotic_intensities
                    .max_abs_diff(&b.asymptotic_intensities),
            );
        }
    }
    outcome(
        g_err <= 1e-10 && g_pol <= 1e-10 && r_err <= 1e-9 && r_pol <= 1e-9 && r_gamma <= 1e-9 && r_inf <= 1e-9,
        format!(
            "g+c: u {g_err:.2e}, policy {g_pol:.2e} (tol 1e-10); r+ρ: u {r_err:.2e}, policy {r_pol:.2e}, \
             γ {r_gamma:.2e}, λ∞ {r_inf:.2e} (tol 1e-9)"
        ),
    )
}

fn simulation_artifact(threads: usize) -> Vec<u8> {
    let mut rng = common::rng(8);
    let p = random_problem(
        &mut rng,
        &Ranges {
            n: (4, 4),
            ..Ranges::default()
        },
        1.0,
        true,
    );
    let sol = solve_value_function(&p, 1000).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap();
    pool.install(|| {
        let pol = OptimalPolicy::new(&p, &sol);
        let est = estimate_objective(&p, &pol, 0, 20_000, 42, 100).unwrap();
        let path = sample_path(&p, &pol, 0, 42, 100).unwrap();
        let mut bytes = serde_json::to_vec(&est).unwrap();
        bytes.extend(serde_json::to_vec(&path).unwrap());
        bytes
    })
}

fn reproducibility() -> Outcome {
    let a = simulation_artifact(1);
    let b = simulation_artifact(1);
    let c = simulation_artifact(4);
    outcome(
        a == b && a == c,
        format!(
            "{} artifact bytes; identical across repeat: {}, across 1 vs 4 threads: {}",
            a.len(),
            a == b,
            a == c
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("positivity", positivity),
        ("hamiltonian envelope", envelope),
        ("verification by simulation", simulation),
        ("ergodic constant", ergodic_constant),
        ("ergodic limits", ergodic_limits),
        ("covariance laws", covariance),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        failed += usize::from(!o.pass);
        println!(
            "{} [{}] {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
