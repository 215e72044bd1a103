//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::path::Path;
use std::time::Instant;

use polyeig::{mm, problem_dir, trace};
use polyeig_core::linalg::{dot, random};
use polyeig_core::locg::{self, Diagnostics};
use polyeig_core::rate::{self, RateWindow};
use polyeig_core::{
    problems, rayleigh, verify, HermMatrix, Preconditioner, ProblemBundle, SolveOutput, SolverConfig, SolverState,
    Status, TraceRow, Variant, C64,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn range(a: usize, b: usize) -> Vec<f64> {
    (a..=b).map(|v| v as f64).collect()
}

fn hyperbolic(n: usize, seed: u64) -> ProblemBundle {
    let pos = range(1, n);
    let neg: Vec<f64> = pos.iter().rev().map(|v| -v).collect();
    problems::prescribed_hyperbolic(&pos, &neg, seed).unwrap()
}

fn pencil(n: usize, seed: u64) -> ProblemBundle {
    problems::definite_pencil(n, &range(1, n.div_ceil(2)), seed).unwrap()
}

fn exact_k(b: &ProblemBundle) -> Preconditioner {
    Preconditioner::exact_inverse(b.natural_preconditioner_matrix().unwrap()).unwrap()
}

fn config(variant: Variant, m_e: usize, tol: f64, max_iters: usize, seed: u64) -> SolverConfig {
    SolverConfig { m_e, variant, tol, max_iters, seed, ..SolverConfig::default() }
}

fn iterations(out: &SolveOutput) -> usize {
    out.trace.last().map_or(0, |r| r.iter)
}

fn converged(out: &SolveOutput) -> bool {
    matches!(out.status, Status::Converged | Status::LuckyBreakdown)
}

fn c1_global_convergence() -> Outcome {
    let b = hyperbolic(10, 1);
    let k = exact_k(&b);
    let start = Instant::now();
    let out = locg::solve(&b.polynomial, &k, &config(Variant::Locg, 1, 1e-10, 200, 1), None).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let last = out.trace.last().unwrap();
    let err = (out.lambda_hat - 1.0).abs();
    let pass = converged(&out) && err <= 1e-8 && last.normalized_residual <= 1e-10 && last.iter <= 200 && secs < 1.0;
    outcome(
        pass,
        format!("|λ̂−1| = {err:.2e}, nres = {:.2e}, {} iterations, {secs:.3} s", last.normalized_residual, last.iter),
    )
}

/// Runs for criteria 2 and 3: 20 seeds of each problem family at n = 50.
fn monotonicity_runs() -> (Vec<SolveOutput>, f64) {
    let start = Instant::now();
    let mut runs = Vec::new();
    for seed in 0..20u64 {
        for b in [hyperbolic(50, seed), pencil(50, seed)] {
            let k = exact_k(&b);
            runs.push(locg::solve(&b.polynomial, &k, &config(Variant::Locg, 1, 1e-10, 500, seed), None).unwrap());
        }
    }
    (runs, start.elapsed().as_secs_f64())
}

fn c2_monotonicity(runs: &[SolveOutput], secs: f64) -> Outcome {
    let mut bad = 0;
    let mut failed = 0;
    for out in runs {
        if !converged(out) {
            failed += 1;
        }
        for w in out.trace.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.rho > a.rho + 1e-12 * (1.0 + a.rho.abs()) {
                bad += 1;
            }
            if a.normalized_residual > 1e-8 && (b.rho >= a.rho || b.rho.is_nan()) {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0 && failed == 0 && secs < 30.0,
        format!("{} runs, {bad} violations, {failed} not converged, {secs:.2} s", runs.len()),
    )
}

fn c3_galerkin(runs: &[SolveOutput]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for r in runs.iter().flat_map(|o| &o.trace) {
        if let Some(v) = r.orth_check {
            worst = worst.max(v);
            checked += 1;
        }
    }
    outcome(checked > 0 && worst <= 1e-8, format!("{checked} steps, max ‖Z^H r‖/scale = {worst:.2e}"))
}

fn c4_linesearch() -> Outcome {
    let b = hyperbolic(10, 3);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for k in [exact_k(&b), Preconditioner::identity()] {
        let mut cfg = config(Variant::Locg, 1, 1e-13, 500, 3);
        cfg.diagnostics = Diagnostics::Cheap;
        let out = locg::solve(&b.polynomial, &k, &cfg, None).unwrap();
        for (row, step) in out.trace.iter().zip(&out.steps) {
            if (row.rho - 1.0).abs() > 1e-3 {
                continue;
            }
            let Some(ls) = step.linesearch else { continue };
            for e in [ls.rho_rel_err, ls.residual_rel_err].into_iter().flatten() {
                worst = worst.max(e);
                checked += 1;
            }
        }
    }
    outcome(checked > 0 && worst <= 1e-6, format!("{checked} identity checks, max relative error {worst:.2e}"))
}

fn c5_two_step() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (name, b) in [("hyperbolic(10)", hyperbolic(10, 5)), ("pencil(10)", pencil(10, 5))] {
        let k = exact_k(&b);
        let l1 = b.known_lambda1.unwrap();
        let pred = rate::predict(&b.polynomial, &k, l1, 1).unwrap();
        let out = locg::solve(&b.polynomial, &k, &config(Variant::Locg, 1, 1e-14, 500, 5), None).unwrap();
        match rate::two_step_rate_check(&out.trace, l1, pred.eta, RateWindow::default()) {
            Ok(rep) => {
                let max = rep.entries.iter().map(|e| e.ratio).fold(f64::NEG_INFINITY, f64::max);
                pass &= rep.violations == 0;
                details.push(format!(
                    "{name}: η² + 0.1 = {:.3}, max ratio {max:.3e} over {} entries, {} violations",
                    pred.eta_sq + 0.1,
                    rep.entries.len(),
                    rep.violations
                ));
            }
            Err(e) => {
                pass = false;
                details.push(format!("{name}: {e}"));
            }
        }
    }
    outcome(pass, details.join("; "))
}

fn c6_wiresaw_envelope() -> Outcome {
    let b = problems::wiresaw1(100, 0.1).unwrap();
    let m = b.natural_preconditioner_matrix().unwrap();
    let k = Preconditioner::inner_cg(m.clone(), 0.1, 10).unwrap();
    let start = Instant::now();
    let out = locg::solve(&b.polynomial, &k, &config(Variant::Locg, 1, 1e-13, 2000, 6), None).unwrap();
    let secs = start.elapsed().as_secs_f64();
    // the final approximation stands in for the exact eigenvalue
    let l1 = out.lambda_hat;
    let pred = rate::predict(&b.polynomial, &Preconditioner::exact_inverse(m).unwrap(), l1, 1).unwrap();
    let single = 2.0 / (pred.delta * pred.delta + pred.delta.powi(-2));
    let ratios = rate::observed_step_ratios(&out.trace, l1, RateWindow::default());
    let Some(observed) = rate::geometric_mean(&ratios) else {
        return outcome(false, format!("no asymptotic steps ({} iterations)", iterations(&out)));
    };
    let pass = observed <= 2.0 * single && observed >= 0.5 * single && secs < 60.0;
    let cg: Vec<f64> = out.steps.iter().flat_map(|s| s.cg.iter().map(|c| c.relative_residual)).collect();
    let cg_mean = rate::geometric_mean(&cg).unwrap_or(0.0);
    outcome(
        pass,
        format!(
            "observed {observed:.4} vs predicted {single:.4} (κ = {:.2}) over {} steps, {} iterations, \
             inner CG residual {cg_mean:.2} (geometric mean), {secs:.2} s",
            pred.kappa,
            ratios.len(),
            iterations(&out)
        ),
    )
}

fn random_state(f: &polyeig_core::HermMatrixPolynomial, rng: &mut random::Rng) -> Option<SolverState> {
    let x = random::complex_vector(rng, f.n());
    let prev = random::complex_vector(rng, f.n());
    let mut s = SolverState::new(f, &x).ok()?;
    s.x_prev = Some(prev);
    Some(s)
}

fn c7_locg_vs_sd() -> Outcome {
    let b = hyperbolic(100, 7);
    let k = exact_k(&b);
    let f = &b.polynomial;
    let locg_out = locg::solve(f, &k, &config(Variant::Locg, 1, 1e-8, 1000, 7), None).unwrap();
    let sd_out = locg::solve(f, &k, &config(Variant::Sd, 1, 1e-8, 1000, 7), None).unwrap();
    let (il, is) = (iterations(&locg_out), iterations(&sd_out));
    let both = converged(&locg_out) && converged(&sd_out);

    let mut rng = random::rng(70);
    let mut states = 0;
    let mut worse = 0;
    let identity = Preconditioner::identity();
    while states < 50 {
        let Some(s) = random_state(f, &mut rng) else { continue };
        states += 1;
        let lo = locg::step(f, &identity, &s, &config(Variant::Locg, 1, 0.0, 1, 0)).unwrap().0.rho();
        let sd = locg::step(f, &identity, &s, &config(Variant::Sd, 1, 0.0, 1, 0)).unwrap().0.rho();
        if lo > sd + 1e-12 * (1.0 + sd.abs()) {
            worse += 1;
        }
    }
    outcome(
        both && il <= is && worse == 0,
        format!("LOCG {il} vs SD {is} iterations to 1e-8; one-step dominance failed on {worse}/{states} states"),
    )
}

fn c8_block_size() -> Outcome {
    let b = hyperbolic(100, 8);
    let k = exact_k(&b);
    let one = locg::solve(&b.polynomial, &k, &config(Variant::Locg, 1, 1e-8, 1000, 8), None).unwrap();
    let two = locg::solve(&b.polynomial, &k, &config(Variant::Locg, 2, 1e-8, 1000, 8), None).unwrap();
    let (i1, i2) = (iterations(&one), iterations(&two));
    outcome(converged(&one) && converged(&two) && i2 <= i1, format!("LOCG(1,2) {i2} vs LOCG(1,1) {i1} iterations"))
}

fn oracle_problems() -> Vec<(String, ProblemBundle)> {
    vec![
        ("wiresaw1(20)".into(), problems::wiresaw1(20, 0.1).unwrap()),
        ("wiresaw1(50)".into(), problems::wiresaw1(50, 0.1).unwrap()),
        ("hyperbolic(10)".into(), hyperbolic(10, 9)),
        ("hyperbolic(50)".into(), hyperbolic(50, 9)),
        ("pencil(10)".into(), pencil(10, 9)),
        ("pencil(50)".into(), pencil(50, 9)),
    ]
}

fn c9_oracles(set: &[(String, ProblemBundle)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count_mismatch = 0;
    let mut probes = 0;
    let mut errors = Vec::new();
    let mut rng = random::rng(9);
    for (name, b) in set {
        let f = &b.polynomial;
        let eigs = match verify::brute_force_eigs(f) {
            Ok(e) => e,
            Err(e) => {
                errors.push(format!("{name}: {e}"));
                continue;
            }
        };
        let interval = f.interval();
        let inside: Vec<f64> = eigs.iter().copied().filter(|v| interval.contains(*v)).collect();
        let (Some(&l1), Some(&top)) = (inside.first(), inside.last()) else {
            errors.push(format!("{name}: no eigenvalue in the interval"));
            continue;
        };
        match verify::bisect_lambda1(f, None, 1e-11) {
            Ok(bis) => worst = worst.max((bis - l1).abs()),
            Err(e) => errors.push(format!("{name}: {e}")),
        }
        let lo = interval.lower;
        let hi = top + 0.1 * (top - lo);
        let mut done = 0;
        while done < 20 {
            let mu = random::uniform(&mut rng, lo, hi);
            if !interval.contains(mu) || eigs.iter().any(|v| (v - mu).abs() <= 1e-8 * (1.0 + mu.abs())) {
                continue;
            }
            done += 1;
            probes += 1;
            let brute = inside.iter().filter(|&&v| v <= mu).count();
            if verify::count_eigs_upto(f, mu).ok() != Some(brute) {
                count_mismatch += 1;
            }
        }
    }
    outcome(
        errors.is_empty() && worst <= 1e-9 && count_mismatch == 0,
        format!(
            "{} problems, max |bisect − brute| = {worst:.2e}, {count_mismatch}/{probes} count mismatches{}",
            set.len(),
            if errors.is_empty() { String::new() } else { format!(", errors: {}", errors.join("; ")) }
        ),
    )
}

/// Ridders' extrapolated central difference of `g` at 0, starting from step
/// `h`. Returns `None` if `g` fails at any sample.
fn ridders(g: impl Fn(f64) -> Option<f64>, h: f64) -> Option<f64> {
    const SHRINK: f64 = 1.4;
    const LEVELS: usize = 10;
    let central = |h: f64| Some((g(h)? - g(-h)?) / (2.0 * h));
    let mut table = vec![vec![0.0; LEVELS]; LEVELS];
    let mut h = h;
    table[0][0] = central(h)?;
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    for i in 1..LEVELS {
        h /= SHRINK;
        table[0][i] = central(h)?;
        let mut fac = SHRINK * SHRINK;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= SHRINK * SHRINK;
            let e = (table[j][i] - table[j - 1][i]).abs().max((table[j][i] - table[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    Some(best)
}

fn c10_gradient() -> Outcome {
    let set = [hyperbolic(10, 10), pencil(10, 10), problems::wiresaw1(10, 0.3).unwrap()];
    let mut rng = random::rng(10);
    let mut pairs = 0;
    let mut worst: f64 = 0.0;
    while pairs < 100 {
        let f = &set[pairs % set.len()].polynomial;
        let x = random::complex_vector(&mut rng, f.n());
        let Ok(e) = rayleigh::evaluate(f, &x) else { continue };
        pairs += 1;
        let g = e.gradient();
        let xn = dot(&x, &x).re.sqrt();
        for _ in 0..5 {
            let d = random::complex_vector(&mut rng, f.n());
            let h = 1e-2 * xn / dot(&d, &d).re.sqrt();
            let along = |s: f64| {
                let y: Vec<C64> = x.iter().zip(&d).map(|(a, b)| a + b * s).collect();
                rayleigh::rayleigh_quotient(f, &y).ok()
            };
            let Some(fd) = ridders(along, h).or_else(|| ridders(along, 1e-3 * h)) else {
                worst = f64::INFINITY;
                continue;
            };
            let an = dot(&g, &d).re;
            worst = worst.max((fd - an).abs() / an.abs());
        }
    }
    outcome(worst <= 1e-6, format!("{pairs} pairs × 5 directions, max relative error {worst:.2e}"))
}

fn same_bits(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits()
}

fn same_opt(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => same_bits(a, b),
        (None, None) => true,
        _ => false,
    }
}

/// Bitwise on the stored lower triangle, numerically equal everywhere (the
/// upper triangle is implied and may differ in the sign of a zero).
fn same_matrix(a: &HermMatrix, b: &HermMatrix) -> bool {
    let n = a.n();
    n == b.n()
        && a == b
        && (0..n).all(|i| {
            (0..=i).all(|j| {
                let (x, y) = (a[(i, j)], b[(i, j)]);
                same_bits(x.re, y.re) && same_bits(x.im, y.im)
            })
        })
}

fn same_row(a: &TraceRow, b: &TraceRow, with_time: bool) -> bool {
    a.iter == b.iter
        && same_bits(a.rho, b.rho)
        && same_opt(a.abs_err, b.abs_err)
        && same_opt(a.delta, b.delta)
        && same_bits(a.residual_norm, b.residual_norm)
        && same_bits(a.normalized_residual, b.normalized_residual)
        && a.subspace_dim == b.subspace_dim
        && same_opt(a.orth_check, b.orth_check)
        && same_opt(a.linesearch_rho_check, b.linesearch_rho_check)
        && (!with_time || same_bits(a.wall_time_s, b.wall_time_s))
}

fn c11_round_trips(set: &[(String, ProblemBundle)]) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut matrices = 0;
    let mut traces = 0;
    let mut bad = Vec::new();
    for (k, (name, b)) in set.iter().enumerate() {
        let pdir = dir.path().join(format!("p{k}"));
        problem_dir::write_problem(b, &pdir).unwrap();
        let back = problem_dir::read_problem(&pdir).unwrap();
        for (c, d) in b.polynomial.coeffs().iter().zip(back.polynomial.coeffs()) {
            matrices += 1;
            if !same_matrix(c, d) {
                bad.push(format!("{name} coefficient"));
            }
        }
        if back.metadata != b.metadata
            || back.kind != b.kind
            || !same_opt(back.known_lambda1, b.known_lambda1)
            || back.polynomial.interval() != b.polynomial.interval()
        {
            bad.push(format!("{name} metadata"));
        }

        let k_inv = exact_k(b);
        let mut cfg = config(Variant::Locg, 1, 1e-10, 300, k as u64);
        cfg.reference_lambda1 = b.known_lambda1;
        let start = Instant::now();
        let run = || {
            locg::solve_with_clock(&b.polynomial, &k_inv, &cfg, None, &mut || start.elapsed().as_secs_f64()).unwrap()
        };
        let (first, second) = (run(), run());
        let path = dir.path().join(format!("t{k}.csv"));
        trace::write_trace(&first.trace, &path).unwrap();
        let read = trace::read_trace(&path).unwrap();
        traces += 1;
        if read.len() != first.trace.len() || !read.iter().zip(&first.trace).all(|(a, b)| same_row(a, b, true)) {
            bad.push(format!("{name} trace"));
        }
        if second.trace.len() != first.trace.len()
            || !second.trace.iter().zip(&first.trace).all(|(a, b)| same_row(a, b, false))
        {
            bad.push(format!("{name} determinism"));
        }
    }
    let single = HermMatrix::from_real_diag(&[1.0, 2.0]);
    let path = dir.path().join("diag.mtx");
    mm::write_matrix_market(&single, Path::new(&path)).unwrap();
    matrices += 1;
    if !same_matrix(&mm::read_matrix_market(&path).unwrap(), &single) {
        bad.push("diag(1,2)".into());
    }
    outcome(
        bad.is_empty(),
        format!("{matrices} matrices, {traces} traces{}", if bad.is_empty() { String::new() } else { format!(", mismatches: {}", bad.join(", ")) }),
    )
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut record = |name: &'static str, o: Outcome| {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o));
    };
    record("1 global convergence", c1_global_convergence());
    let (runs, secs) = monotonicity_runs();
    record("2 monotonicity", c2_monotonicity(&runs, secs));
    record("3 Galerkin orthogonality", c3_galerkin(&runs));
    record("4 line-search identities", c4_linesearch());
    record("5 two-step rate bound", c5_two_step());
    record("6 per-step prediction envelope", c6_wiresaw_envelope());
    record("7 LOCG dominates SD", c7_locg_vs_sd());
    record("8 block size effect", c8_block_size());
    let set = oracle_problems();
    record("9 oracle agreement", c9_oracles(&set));
    record("10 gradient check", c10_gradient());
    record("11 format round trips", c11_round_trips(&set));
    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
