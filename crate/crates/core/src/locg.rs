//! `LOCG(1, m_e)` and `SD(1, m_e)` for the smallest positive-type eigenvalue.
//!
//! Each step minimizes `ρ` over the span of the current iterate, the Krylov
//! vectors `(K F(ρ_i))^j x_i` for `j = 1..m_e`, and (for LOCG) the previous
//! iterate, by Rayleigh–Ritz projection.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::{axpy, dot, inertia, norm, random, C64};
use crate::matpoly::HermMatrixPolynomial;
use crate::precond::{CgStats, Preconditioner};
use crate::rayleigh::{self, RayleighEvaluation};
use crate::ritz::{self, constraint_normalize};
use crate::{Error, Result};

/// Relative drop tolerance when orthonormalizing the search space.
pub const DROP_TOL: f64 = 1e-12;
/// Normalized residual below which the iterate is an eigenvector to working
/// precision.
pub const LUCKY_TOL: f64 = 1e-14;
const START_DRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Search space includes the previous iterate.
    Locg,
    /// Steepest descent: current iterate and Krylov vectors only.
    Sd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Diagnostics {
    Off,
    /// Orthogonality and line-search identity checks.
    Cheap,
    /// Additionally the positivity hypothesis `Z^H F'(ρ_i) Z ≻ 0`.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub m_e: usize,
    pub variant: Variant,
    /// Stop once the normalized residual is at most `tol`.
    pub tol: f64,
    pub max_iters: usize,
    /// Seeds the random start and any re-randomized Krylov direction.
    pub seed: u64,
    pub diagnostics: Diagnostics,
    /// `λ₁` for the `abs_err` trace column, when known.
    pub reference_lambda1: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            m_e: 1,
            variant: Variant::Locg,
            tol: 1e-10,
            max_iters: 500,
            seed: 0,
            diagnostics: Diagnostics::Cheap,
            reference_lambda1: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Running,
    Converged,
    /// The start vector was already an eigenvector.
    LuckyBreakdown,
    MaxIters,
    Failed(Error),
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub iter: usize,
    /// Current iterate, normalized by [`constraint_normalize`].
    pub x: Vec<C64>,
    pub x_prev: Option<Vec<C64>>,
    pub rho_prev: Option<f64>,
    pub eval: RayleighEvaluation,
    pub status: Status,
}

impl SolverState {
    pub fn new(f: &HermMatrixPolynomial, x: &[C64]) -> Result<Self> {
        if x.len() != f.n() {
            return Err(Error::DimensionMismatch { expected: f.n(), got: x.len() });
        }
        if norm(x) == 0.0 {
            return Err(Error::NotInDomain);
        }
        let x = constraint_normalize(f, x);
        let eval = rayleigh::evaluate(f, &x)?;
        Ok(SolverState { iter: 0, x, x_prev: None, rho_prev: None, eval, status: Status::Running })
    }

    pub fn rho(&self) -> f64 {
        self.eval.rho
    }
}

/// One trace line per iterate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub rho: f64,
    pub abs_err: Option<f64>,
    /// `ρ_i − ρ_{i+1}`; absent on the final row.
    pub delta: Option<f64>,
    pub residual_norm: f64,
    pub normalized_residual: f64,
    pub subspace_dim: usize,
    /// `‖Z_i^H r_{i+1}‖ / (scale(ρ_{i+1}) ‖x_{i+1}‖)`
    pub orth_check: Option<f64>,
    /// Relative error of `ρ_{i+1} − ρ_i = d^H F(ρ_{i+1}) d / (x_i^H Φ x_i)`.
    pub linesearch_rho_check: Option<f64>,
    pub wall_time_s: f64,
}

/// Relative errors of the two-iterate identities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinesearchCheck {
    /// `None` when `|ρ_{i+1} − ρ_i|` is below what double precision resolves.
    pub rho_rel_err: Option<f64>,
    /// `‖r(x̃) − r(x) − F̌ d‖ / ‖r(x̃) − r(x)‖`, `None` when not resolvable.
    pub residual_rel_err: Option<f64>,
    /// `max |v^H r(x̃)| / (‖v‖ scale ‖x̃‖)` over the supplied span.
    pub orthogonality: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepInfo {
    pub iter: usize,
    pub subspace_dim: usize,
    pub orth_check: f64,
    pub linesearch: Option<LinesearchCheck>,
    /// Whether `Z^H F'(ρ_i) Z ≻ 0` held.
    pub positivity: Option<bool>,
    /// `ρ_i − ρ_{i+1} ≥ √(ρ_{i−1} − ρ_i)`
    pub exceptional: bool,
    pub rerandomized: bool,
    pub cg: Vec<CgStats>,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub lambda_hat: f64,
    pub x_hat: Vec<C64>,
    pub status: Status,
    pub trace: Vec<TraceRow>,
    pub steps: Vec<StepInfo>,
}

/// Orthonormal basis of `{x_i, K F(ρ_i) x_i, …, (K F(ρ_i))^{m_e} x_i}` plus
/// `extra`, built incrementally. Krylov generation stops early once a new
/// direction is numerically dependent.
pub fn build_subspace(
    f: &HermMatrixPolynomial,
    k: &Preconditioner,
    state: &SolverState,
    m_e: usize,
    extra: &[&[C64]],
) -> Result<(Vec<Vec<C64>>, Vec<CgStats>)> {
    let rho = state.rho();
    let mut basis: Vec<Vec<C64>> = vec![crate::linalg::normalized(&state.x)];
    let mut stats = Vec::new();
    let scale = f.residual_scale(rho);
    let mut v = basis[0].clone();
    for _ in 0..m_e {
        let fv = f.apply(rho, &v);
        if norm(&fv) <= LUCKY_TOL * scale * norm(&v) {
            break;
        }
        let (w, cg) = k.apply_with_stats(&fv)?;
        stats.extend(cg);
        match push_orthonormal(&mut basis, &w) {
            Some(q) => v = q,
            None => break,
        }
    }
    for e in extra {
        push_orthonormal(&mut basis, e);
    }
    Ok((basis, stats))
}

fn push_orthonormal(basis: &mut Vec<Vec<C64>>, v: &[C64]) -> Option<Vec<C64>> {
    let orig = norm(v);
    if !(orig > 0.0) || !orig.is_finite() {
        return None;
    }
    let mut w = v.to_vec();
    for _ in 0..2 {
        for q in basis.iter() {
            let c = dot(q, &w);
            axpy(-c, q, &mut w);
        }
    }
    let rem = norm(&w);
    if rem <= DROP_TOL * orig {
        return None;
    }
    for x in w.iter_mut() {
        *x /= rem;
    }
    basis.push(w.clone());
    Some(w)
}

/// One iteration. A state whose residual is already below tolerance comes
/// back unchanged with status `LuckyBreakdown`.
pub fn step(
    f: &HermMatrixPolynomial,
    k: &Preconditioner,
    state: &SolverState,
    config: &SolverConfig,
) -> Result<(SolverState, StepInfo)> {
    if config.m_e == 0 {
        return Err(Error::InvalidArgument("m_e must be at least 1"));
    }
    let mut info = StepInfo { iter: state.iter, ..StepInfo::default() };
    if state.eval.normalized_residual <= config.tol.max(LUCKY_TOL) {
        let mut same = state.clone();
        same.status = Status::LuckyBreakdown;
        info.subspace_dim = 1;
        return Ok((same, info));
    }
    let extra: Vec<&[C64]> = match (config.variant, &state.x_prev) {
        (Variant::Locg, Some(p)) => vec![p.as_slice()],
        _ => Vec::new(),
    };
    let (mut basis, cg) = build_subspace(f, k, state, config.m_e, &extra)?;
    info.cg = cg;
    let selection = match ritz::select_smallest_proper(&ritz::project(f, &basis)?) {
        Ok(s) => s,
        Err(Error::NoRitzValue) => {
            // replace the Krylov part by a seeded random direction once
            let mut rng = random::rng(config.seed ^ (state.iter as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let r = random::complex_vector(&mut rng, f.n());
            basis = vec![crate::linalg::normalized(&state.x)];
            push_orthonormal(&mut basis, &r);
            for e in &extra {
                push_orthonormal(&mut basis, e);
            }
            info.rerandomized = true;
            ritz::select_smallest_proper(&ritz::project(f, &basis)?)?
        }
        Err(e) => return Err(e),
    };
    info.subspace_dim = basis.len();

    let x_new = constraint_normalize(f, &selection.x);
    let eval = rayleigh::evaluate(f, &x_new)?;
    let rho = state.rho();
    if eval.rho > rho + 1e-12 * (1.0 + rho.abs()) {
        return Err(Error::AssumptionViolated("Rayleigh functional increased"));
    }
    let next = SolverState {
        iter: state.iter + 1,
        x: x_new,
        x_prev: Some(state.x.clone()),
        rho_prev: Some(rho),
        eval,
        status: Status::Running,
    };

    let raw = f.apply(next.rho(), &next.x);
    let denom = f.coefficient_scale(next.rho()) * norm(&next.x);
    info.orth_check = norm(&basis.iter().map(|z| dot(z, &raw)).collect::<Vec<_>>()) / denom;
    if config.diagnostics != Diagnostics::Off {
        info.linesearch = check_linesearch_identities(f, state, &next, &basis).ok();
    }
    if config.diagnostics == Diagnostics::Full {
        let g = f.eval_derivative(rho).congruence(&basis);
        info.positivity = Some(inertia(&g)?.positive == basis.len());
    }
    if let Some(before) = state.rho_prev {
        info.exceptional = rho - next.rho() >= (before - rho).max(0.0).sqrt();
    }
    Ok((next, info))
}

/// Verifies the two-iterate identities between `prev` and `next`.
///
/// `next.x` is rescaled to `x̃ = c·x_next` with `x^H Φ x̃ = x^H Φ x`, where
/// `Φ = Φ(ρ_next, ρ_prev)`, and `d = x̃ − x`. Then
/// `ρ_next − ρ_prev = d^H F(ρ_next) d / (x^H Φ x)` and
/// `r(x̃) − r(x) = (I − P^H) F(ρ_next) (I − P) d`.
pub fn check_linesearch_identities(
    f: &HermMatrixPolynomial,
    prev: &SolverState,
    next: &SolverState,
    span: &[Vec<C64>],
) -> Result<LinesearchCheck> {
    let (rho0, rho1) = (prev.rho(), next.rho());
    let x = &prev.x;
    let r1 = f.apply(rho1, &next.x);
    let scale = f.coefficient_scale(rho1);
    let orthogonality = span
        .iter()
        .map(|v| dot(v, &r1).norm() / (norm(v) * scale * norm(&next.x)))
        .fold(0.0, f64::max);
    if rho0 == rho1 {
        return Ok(LinesearchCheck { rho_rel_err: Some(0.0), residual_rel_err: Some(0.0), orthogonality });
    }
    let phi_x = f.apply_divided_difference(rho1, rho0, x);
    let num = dot(x, &phi_x).re;
    let cross = dot(&phi_x, &next.x);
    if !(cross.norm() > 1e-14 * num.abs()) {
        return Err(Error::DegenerateProjector);
    }
    let c = C64::new(num, 0.0) / cross;
    let xt: Vec<C64> = next.x.iter().map(|v| v * c).collect();
    let d: Vec<C64> = xt.iter().zip(x).map(|(a, b)| a - b).collect();
    let xx = dot(x, x).re;

    let lhs = rho1 - rho0;
    let rhs = dot(&d, &f.apply(rho1, &d)).re / num;
    let resolvable = 1e-8 * f.coefficient_scale(rho0) * xx / prev.eval.sigma;
    let rho_rel_err = (lhs.abs() >= resolvable).then(|| (lhs - rhs).abs() / lhs.abs().max(rhs.abs()));

    let projector = f.oblique_projection(x, rho1, rho0)?;
    let r0 = f.apply(rho0, x);
    let rt: Vec<C64> = r1.iter().map(|v| v * c).collect();
    let dr: Vec<C64> = rt.iter().zip(&r0).map(|(a, b)| a - b).collect();
    let fd = f.deflated_apply(rho1, &projector, &d);
    let diff = norm(&dr.iter().zip(&fd).map(|(a, b)| a - b).collect::<Vec<_>>());
    let size = norm(&dr);
    let residual_rel_err = (size >= 1e-8 * scale * xx.sqrt()).then(|| diff / size);

    Ok(LinesearchCheck { rho_rel_err, residual_rel_err, orthogonality })
}

fn start_state(f: &HermMatrixPolynomial, config: &SolverConfig, x0: Option<&[C64]>) -> Result<SolverState> {
    if let Some(x0) = x0 {
        return SolverState::new(f, x0);
    }
    let mut rng = random::rng(config.seed);
    for _ in 0..START_DRAWS {
        let x = random::complex_vector(&mut rng, f.n());
        match SolverState::new(f, &x) {
            Ok(s) => return Ok(s),
            Err(Error::NotInDomain) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoAdmissibleStart(START_DRAWS))
}

/// Runs the iteration with all trace timestamps equal to zero.
pub fn solve(
    f: &HermMatrixPolynomial,
    k: &Preconditioner,
    config: &SolverConfig,
    x0: Option<&[C64]>,
) -> Result<SolveOutput> {
    solve_with_clock(f, k, config, x0, &mut || 0.0)
}

/// As [`solve`], stamping each trace row with `clock()` seconds.
pub fn solve_with_clock(
    f: &HermMatrixPolynomial,
    k: &Preconditioner,
    config: &SolverConfig,
    x0: Option<&[C64]>,
    clock: &mut dyn FnMut() -> f64,
) -> Result<SolveOutput> {
    if config.m_e == 0 {
        return Err(Error::InvalidArgument("m_e must be at least 1"));
    }
    if !(config.tol >= 0.0) {
        return Err(Error::InvalidArgument("tolerance must be nonnegative"));
    }
    let t0 = clock();
    let mut state = start_state(f, config, x0)?;
    let mut trace = Vec::new();
    let mut steps = Vec::new();
    let row = |s: &SolverState, t: f64| TraceRow {
        iter: s.iter,
        rho: s.rho(),
        abs_err: config.reference_lambda1.map(|l| s.rho() - l),
        delta: None,
        residual_norm: s.eval.residual_norm,
        normalized_residual: s.eval.normalized_residual,
        subspace_dim: 0,
        orth_check: None,
        linesearch_rho_check: None,
        wall_time_s: t,
    };
    let status = loop {
        if state.eval.normalized_residual <= config.tol.max(LUCKY_TOL) {
            trace.push(row(&state, clock() - t0));
            break if state.iter == 0 { Status::LuckyBreakdown } else { Status::Converged };
        }
        if state.iter >= config.max_iters {
            trace.push(row(&state, clock() - t0));
            break Status::MaxIters;
        }
        match step(f, k, &state, config) {
            Ok((next, info)) => {
                let mut r = row(&state, clock() - t0);
                r.delta = Some(state.rho() - next.rho());
                r.subspace_dim = info.subspace_dim;
                r.orth_check = Some(info.orth_check);
                r.linesearch_rho_check = info.linesearch.and_then(|l| l.rho_rel_err);
                trace.push(r);
                steps.push(info);
                state = next;
            }
            Err(e) => {
                trace.push(row(&state, clock() - t0));
                break Status::Failed(e);
            }
        }
    };
    state.status = status.clone();
    Ok(SolveOutput { lambda_hat: state.rho(), x_hat: state.x, status, trace, steps })
}
