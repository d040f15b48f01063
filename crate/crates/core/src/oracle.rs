//! Numerical maximization of `Tr[Σ R₁]` over symmetric instruments, used as
//! an independent check on the closed-form optimum.
//!
//! The feasible set is
//!
//! ```text
//! R₁ ⪰ 0,  Tr[R₁] = 1,  Tr[(𝟙⊗σ_x) R₁] = 0,  Tr[(𝟙⊗σ_z) R₁] = (2P_t − 1)/cos 2α
//! ```
//!
//! with `R₂ = (σ_x⊗σ_x) R₁ (σ_x⊗σ_x)` implied. Positivity is structural:
//! `R₁ = L L†` with `L` lower triangular (complex, or real when
//! `restrict_real` is set). The three equalities are handled by an augmented
//! Lagrangian whose quadratic penalty weight walks the configured schedule;
//! each subproblem is solved by L-BFGS with an Armijo backtracking line
//! search on hand-derived gradients.
//!
//! Restarts are independent. Restart `k` draws its initial factor from
//! ChaCha8 stream `k` under the configured seed, so the outcome does not
//! depend on thread scheduling.

use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_4;

use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::choi::ChoiOperator;
use crate::qubit::{min_eigenvalue_hermitian, re, tensor, Complex64, ComplexMatrix, StatePair};
use crate::tradeoff::{check_t, probability_at, tradeoff_point};
use crate::{Error, Result};

/// Constraint residual below which a candidate counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-6;
/// How far below the closed form the oracle may land before it is reported
/// as beating the lower bound.
pub const SUPEROPTIMALITY_TOL: f64 = 1e-5;

/// Extra multiplier rounds at the final penalty weight once the schedule is exhausted.
const EXTRA_ROUNDS: usize = 20;
const LBFGS_MEMORY: usize = 10;
const GRADIENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleConfig {
    pub restarts: usize,
    /// Iteration budget of each inner solve.
    pub max_iterations: usize,
    pub penalty_weight_schedule: Vec<f64>,
    pub convergence_tol: f64,
    pub seed: u64,
    pub restrict_real: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iterations: 5000,
            penalty_weight_schedule: vec![1e2, 1e4, 1e6],
            convergence_tol: 1e-10,
            seed: 0,
            restrict_real: false,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if self.penalty_weight_schedule.is_empty()
            || self
                .penalty_weight_schedule
                .iter()
                .any(|w| !(w.is_finite() && *w > 0.0))
        {
            return Err(Error::InvalidConfig(
                "penalty weights must be a nonempty list of positive numbers".into(),
            ));
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "convergence_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Diagnostics of a single restart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartSummary {
    pub index: usize,
    pub objective: f64,
    pub max_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub best_r1: ChoiOperator,
    pub achieved_d: f64,
    /// Positivity defect, `Tr R₁ − 1`, `σ_x` condition, `σ_z` condition.
    pub constraint_residuals: [f64; 4],
    pub best_restart: usize,
    pub restarts: Vec<RestartSummary>,
    pub converged: bool,
}

impl OracleResult {
    pub fn max_residual(&self) -> f64 {
        max_abs(&self.constraint_residuals)
    }

    pub fn feasible(&self) -> bool {
        self.max_residual() <= FEASIBILITY_TOL
    }

    /// Inner iterations spent by the winning restart.
    pub fn iterations(&self) -> usize {
        self.restarts[self.best_restart].iterations
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `Σ = Σ_i |ψ_i⟩⟨ψ_i| ⊗ |ψ_i⟩⟨ψ_i|*`, so that `D = 1 − Tr[Σ R₁]`.
pub fn sigma_objective(pair: &StatePair) -> ComplexMatrix {
    pair.states()
        .iter()
        .map(|psi| {
            let p = psi.projector();
            tensor(&p, &p.conj()).expect("2x2 projectors")
        })
        .fold(ComplexMatrix::zeros4(), |acc, m| &acc + &m)
}

fn check_nondegenerate(pair: &StatePair) -> Result<()> {
    if pair.alpha >= FRAC_PI_4 {
        return Err(Error::Degenerate(
            "α = π/4: the σ_z condition divides by cos 2α = 0",
        ));
    }
    Ok(())
}

/// Right-hand side of the `σ_z` condition, `(2P_t − 1)/cos 2α`, which equals `t`.
pub fn sigma_z_target(pair: &StatePair, t: f64) -> Result<f64> {
    check_nondegenerate(pair)?;
    Ok((2.0 * probability_at(pair.alpha, t)? - 1.0) / (2.0 * pair.alpha).cos())
}

fn condition_operators() -> [ComplexMatrix; 3] {
    let id = ComplexMatrix::identity2();
    [
        ComplexMatrix::identity4(),
        tensor(&id, &ComplexMatrix::sigma_x()).unwrap(),
        tensor(&id, &ComplexMatrix::sigma_z()).unwrap(),
    ]
}

/// Residuals of the four feasibility conditions for `R₁`.
pub fn constraint_residuals(r1: &ChoiOperator, pair: &StatePair, t: f64) -> Result<[f64; 4]> {
    let target = sigma_z_target(pair, t)?;
    let [id, sx, sz] = condition_operators();
    let m = r1.matrix();
    let min = min_eigenvalue_hermitian(m)?;
    Ok([
        (-min).max(0.0),
        id.trace_product(m).re - 1.0,
        sx.trace_product(m).re,
        sz.trace_product(m).re - target,
    ])
}

const LOWER: [(usize, usize); 10] = [
    (0, 0),
    (1, 0),
    (1, 1),
    (2, 0),
    (2, 1),
    (2, 2),
    (3, 0),
    (3, 1),
    (3, 2),
    (3, 3),
];

struct Problem {
    sigma: ComplexMatrix,
    conditions: [ComplexMatrix; 3],
    targets: [f64; 3],
    real: bool,
    /// Entries of `LOWER` that are free parameters.
    active: Vec<usize>,
}

struct Evaluation {
    value: f64,
    grad: Vec<f64>,
}

impl Problem {
    fn new(pair: &StatePair, t: f64, real: bool) -> Result<Self> {
        // At t = 1 the input marginal of R₁ is forced to |0⟩⟨0|, so R₁ vanishes
        // on the odd rows (input index 1). Those rows of L are pinned to zero;
        // otherwise the feasible set has no interior and the penalty iteration
        // only approaches it at rate 1/w.
        let active = (0..LOWER.len())
            .filter(|&k| t < 1.0 || LOWER[k].0.is_multiple_of(2))
            .collect();
        Ok(Self {
            sigma: sigma_objective(pair),
            conditions: condition_operators(),
            targets: [1.0, 0.0, sigma_z_target(pair, t)?],
            real,
            active,
        })
    }

    fn width(&self) -> usize {
        if self.real {
            1
        } else {
            2
        }
    }

    fn dim(&self) -> usize {
        self.width() * self.active.len()
    }

    fn factor(&self, x: &[f64]) -> ComplexMatrix {
        let w = self.width();
        let mut l = ComplexMatrix::zeros4();
        for (slot, &k) in self.active.iter().enumerate() {
            let im = if self.real { 0.0 } else { x[w * slot + 1] };
            l[LOWER[k]] = Complex64::new(x[w * slot], im);
        }
        l
    }

    fn unfactor(&self, l: &ComplexMatrix) -> Vec<f64> {
        self.pack(l, 1.0)
    }

    fn pack(&self, m: &ComplexMatrix, scale: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for &k in &self.active {
            let z = m[LOWER[k]] * scale;
            out.push(z.re);
            if !self.real {
                out.push(z.im);
            }
        }
        out
    }

    /// Gradient of `Tr[M L L†]` with respect to the packed parameters is `2 M L`.
    fn pack_gradient(&self, m: &ComplexMatrix, l: &ComplexMatrix) -> Vec<f64> {
        self.pack(&(m * l), 2.0)
    }

    fn objective(&self, r: &ComplexMatrix) -> f64 {
        self.sigma.trace_product(r).re
    }

    fn violations(&self, r: &ComplexMatrix) -> [f64; 3] {
        std::array::from_fn(|k| self.conditions[k].trace_product(r).re - self.targets[k])
    }

    /// Negated augmented Lagrangian `−(f − λ·c − (w/2)|c|²)` and its gradient.
    fn penalized(&self, x: &[f64], lambda: &[f64; 3], weight: f64) -> Evaluation {
        let l = self.factor(x);
        let r = &l * &l.adjoint();
        let c = self.violations(&r);
        let mut value = self.objective(&r);
        let mut m = self.sigma.clone();
        for k in 0..3 {
            value -= lambda[k] * c[k] + 0.5 * weight * c[k] * c[k];
            m = &m - &self.conditions[k].scale_real(lambda[k] + weight * c[k]);
        }
        let grad = self.pack_gradient(&m, &l).into_iter().map(|g| -g).collect();
        Evaluation {
            value: -value,
            grad,
        }
    }

    /// Least-squares multipliers matching `∇f ≈ Σ λ_k ∇c_k` at `x`.
    fn estimate_multipliers(&self, x: &[f64]) -> [f64; 3] {
        let l = self.factor(x);
        let gf = self.pack_gradient(&self.sigma, &l);
        let gc: Vec<Vec<f64>> = self
            .conditions
            .iter()
            .map(|c| self.pack_gradient(c, &l))
            .collect();
        let normal = Matrix3::from_fn(|i, j| dot(&gc[i], &gc[j]));
        let rhs = Vector3::from_fn(|i, _| dot(&gc[i], &gf));
        // Condition gradients can be linearly dependent (at t = 1 the trace and
        // σ_z conditions coincide on the reduced face).
        let cutoff = 1e-12 * normal.norm().max(1e-300);
        match normal.pseudo_inverse(cutoff) {
            Ok(pinv) => {
                let s = pinv * rhs;
                [s[0], s[1], s[2]]
            }
            Err(_) => [0.0; 3],
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Minimizes `f` from `x` with L-BFGS and Armijo backtracking. Returns the
/// number of iterations taken.
fn lbfgs(x: &mut Vec<f64>, f: impl Fn(&[f64]) -> Evaluation, max_iterations: usize) -> usize {
    let mut cur = f(x);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(LBFGS_MEMORY);
    let mut stalled = 0;
    for iter in 0..max_iterations {
        if max_abs(&cur.grad) <= GRADIENT_TOL {
            return iter;
        }
        // Two-loop recursion.
        let mut q = cur.grad.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let scale = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|qi| *qi *= scale);
        } else {
            let scale = 1.0 / max_abs(&cur.grad).max(1.0);
            q.iter_mut().for_each(|qi| *qi *= scale);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut dir: Vec<f64> = q.into_iter().map(|v| -v).collect();
        let mut slope = dot(&dir, &cur.grad);
        if slope >= 0.0 {
            history.clear();
            dir = cur.grad.iter().map(|g| -g).collect();
            slope = -dot(&cur.grad, &cur.grad);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let ev = f(&trial);
            if ev.value <= cur.value + 1e-4 * step * slope {
                accepted = Some((trial, ev));
                break;
            }
            step *= 0.5;
        }
        let Some((next, ev)) = accepted else {
            // No decrease representable in floating point.
            return iter + 1;
        };

        let s: Vec<f64> = next.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = ev.grad.iter().zip(&cur.grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-20 {
            if history.len() == LBFGS_MEMORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        let change = (cur.value - ev.value).abs();
        stalled = if change <= 1e-16 * cur.value.abs().max(1.0) {
            stalled + 1
        } else {
            0
        };
        *x = next;
        cur = ev;
        if stalled >= 5 {
            return iter + 1;
        }
    }
    max_iterations
}

struct RestartOutcome {
    summary: RestartSummary,
    r1: ChoiOperator,
    residuals: [f64; 4],
}

fn solve_from(
    problem: &Problem,
    pair: &StatePair,
    t: f64,
    cfg: &OracleConfig,
    index: usize,
    mut x: Vec<f64>,
) -> Result<RestartOutcome> {
    let mut lambda = problem.estimate_multipliers(&x);
    let mut iterations = 0;
    let mut converged = false;
    let r_of = |x: &[f64]| {
        let l = problem.factor(x);
        &l * &l.adjoint()
    };
    let mut prev_obj = problem.objective(&r_of(&x));

    let last = *cfg.penalty_weight_schedule.last().unwrap();
    let weights = cfg
        .penalty_weight_schedule
        .iter()
        .copied()
        .chain(std::iter::repeat_n(last, EXTRA_ROUNDS));
    for w in weights {
        iterations += lbfgs(
            &mut x,
            |x| problem.penalized(x, &lambda, w),
            cfg.max_iterations,
        );
        let r = r_of(&x);
        let c = problem.violations(&r);
        for k in 0..3 {
            lambda[k] += w * c[k];
        }
        let obj = problem.objective(&r);
        let settled = (obj - prev_obj).abs() < cfg.convergence_tol;
        prev_obj = obj;
        if settled && max_abs(&c) < FEASIBILITY_TOL * 1e-3 {
            converged = true;
            break;
        }
    }

    let r1 = ChoiOperator::from_factor(&problem.factor(&x));
    let residuals = constraint_residuals(&r1, pair, t)?;
    let max_residual = max_abs(&residuals);
    Ok(RestartOutcome {
        summary: RestartSummary {
            index,
            objective: problem.objective(r1.matrix()),
            max_residual,
            iterations,
            converged: converged && max_residual <= FEASIBILITY_TOL,
        },
        r1,
        residuals,
    })
}

fn random_start(problem: &Problem, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut x: Vec<f64> = (0..problem.dim())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    // Scale so that Tr[L L†] = 1.
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    x
}

fn pick_best(outcomes: Vec<RestartOutcome>) -> OracleResult {
    let best = outcomes
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            let fa = a.summary.max_residual <= FEASIBILITY_TOL;
            let fb = b.summary.max_residual <= FEASIBILITY_TOL;
            fa.cmp(&fb)
                .then(a.summary.objective.total_cmp(&b.summary.objective))
                // Prefer the lower index on exact ties.
                .then(ib.cmp(ia))
        })
        .map(|(i, _)| i)
        .expect("at least one restart");
    let chosen = &outcomes[best];
    OracleResult {
        best_r1: chosen.r1.clone(),
        achieved_d: 1.0 - chosen.summary.objective,
        constraint_residuals: chosen.residuals,
        best_restart: best,
        converged: chosen.summary.converged,
        restarts: outcomes.into_iter().map(|o| o.summary).collect(),
    }
}

fn check_inputs(pair: &StatePair, t: f64, cfg: &OracleConfig) -> Result<f64> {
    cfg.validate()?;
    check_nondegenerate(pair)?;
    check_t(t)
}

/// Maximizes `Tr[Σ R₁]` over the feasible set from `cfg.restarts` random
/// starting factors. Non-convergence is reported through
/// [`OracleResult::converged`], not as an error.
pub fn maximize(pair: &StatePair, t: f64, cfg: &OracleConfig) -> Result<OracleResult> {
    let t = check_inputs(pair, t, cfg)?;
    let problem = Problem::new(pair, t, cfg.restrict_real)?;
    let outcomes = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            solve_from(
                &problem,
                pair,
                t,
                cfg,
                k,
                random_start(&problem, cfg.seed, k),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pick_best(outcomes))
}

/// Single solve warm-started from `start` (factored by pivot-free Cholesky).
pub fn maximize_from(
    pair: &StatePair,
    t: f64,
    cfg: &OracleConfig,
    start: &ChoiOperator,
) -> Result<OracleResult> {
    let t = check_inputs(pair, t, cfg)?;
    let problem = Problem::new(pair, t, cfg.restrict_real)?;
    let x = problem.unfactor(&psd_cholesky(start.matrix()));
    let outcome = solve_from(&problem, pair, t, cfg, 0, x)?;
    Ok(pick_best(vec![outcome]))
}

/// Lower-triangular `L` with `L L† = m` for positive semidefinite `m`;
/// columns with a vanishing pivot are left at zero.
fn psd_cholesky(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let scale = (0..n).map(|i| m[(i, i)].re.abs()).fold(0.0, f64::max);
    let mut l = ComplexMatrix::zeros4();
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 1e-13 * scale.max(1.0) {
            continue;
        }
        let pivot = d.sqrt();
        l[(j, j)] = re(pivot);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / pivot;
        }
    }
    l
}

/// Oracle-versus-closed-form comparison at one `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationPoint {
    pub t: f64,
    pub d_closed: f64,
    pub d_oracle: f64,
    pub gap: f64,
    pub constraint_residuals: [f64; 4],
    pub feasible: bool,
    pub superoptimal: bool,
    pub converged: bool,
    pub iterations: usize,
    pub best_restart: usize,
    pub restart_objectives: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub alpha: f64,
    pub tol: f64,
    pub feasibility_tol: f64,
    pub superoptimality_tol: f64,
    pub points: Vec<VerificationPoint>,
    pub all_pass: bool,
}

/// Runs [`maximize`] at every `t` and compares against the closed form.
///
/// A point passes when the gap is within `tol`, the oracle's answer is
/// feasible, and it does not beat the closed-form lower bound by more than
/// [`SUPEROPTIMALITY_TOL`].
pub fn verify_closed_form(
    pair: &StatePair,
    t_grid: &[f64],
    cfg: &OracleConfig,
    tol: f64,
) -> Result<VerificationReport> {
    if t_grid.is_empty() {
        return Err(Error::InvalidConfig("empty t grid".into()));
    }
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let closed = tradeoff_point(pair.alpha, t)?;
        let res = maximize(pair, t, cfg)?;
        let gap = (res.achieved_d - closed.d).abs();
        let feasible = res.feasible();
        let superoptimal = res.achieved_d < closed.d - SUPEROPTIMALITY_TOL;
        points.push(VerificationPoint {
            t: closed.t,
            d_closed: closed.d,
            d_oracle: res.achieved_d,
            gap,
            constraint_residuals: res.constraint_residuals,
            feasible,
            superoptimal,
            converged: res.converged,
            iterations: res.iterations(),
            best_restart: res.best_restart,
            restart_objectives: res.restarts.iter().map(|r| r.objective).collect(),
            pass: gap <= tol && feasible && !superoptimal,
        });
    }
    let all_pass = points.iter().all(|p| p.pass);
    Ok(VerificationReport {
        alpha: pair.alpha,
        tol,
        feasibility_tol: FEASIBILITY_TOL,
        superoptimality_tol: SUPEROPTIMALITY_TOL,
        points,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choi::{instrument_choi, omega_projector};
    use crate::qubit::{eigh, symmetric_pair};
    use crate::tradeoff::optimal_instrument;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_8;

    #[test]
    fn sigma_objective_examples() {
        let s = sigma_objective(&symmetric_pair(0.0).unwrap());
        let mut want = ComplexMatrix::zeros4();
        want[(0, 0)] = re(1.0);
        want[(3, 3)] = re(1.0);
        assert_eq!(s, want);

        for k in 0..=10 {
            let pair = symmetric_pair(FRAC_PI_4 * k as f64 / 10.0).unwrap();
            assert_abs_diff_eq!(sigma_objective(&pair).trace().re, 2.0, epsilon = 1e-12);
        }

        let (vals, _) = eigh(&sigma_objective(&symmetric_pair(FRAC_PI_8).unwrap())).unwrap();
        assert_abs_diff_eq!(vals[3], 1.5, epsilon = 1e-12);
        assert!(vals[0] >= -1e-12);
    }

    #[test]
    fn closed_form_optimum_is_feasible() {
        for alpha in [0.1, FRAC_PI_8, 0.6] {
            let pair = symmetric_pair(alpha).unwrap();
            for t in [0.0, 0.3, 0.5, 0.9, 1.0] {
                let r1 = &instrument_choi(&optimal_instrument(alpha, t).unwrap())[0];
                let res = constraint_residuals(r1, &pair, t).unwrap();
                assert!(max_abs(&res) <= 1e-10, "{res:?} at α={alpha}, t={t}");
                let d = 1.0 - sigma_objective(&pair).trace_product(r1.matrix()).re;
                assert_abs_diff_eq!(d, tradeoff_point(alpha, t).unwrap().d, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn sigma_z_target_equals_t() {
        for alpha in [0.05, 0.3, 0.7] {
            let pair = symmetric_pair(alpha).unwrap();
            for t in [0.0, 0.25, 1.0] {
                assert_abs_diff_eq!(sigma_z_target(&pair, t).unwrap(), t, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn half_identity_is_feasible_at_t_zero() {
        let pair = symmetric_pair(0.4).unwrap();
        let r = constraint_residuals(&omega_projector().scale(0.5), &pair, 0.0).unwrap();
        for v in r {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn degenerate_alpha_rejected() {
        let pair = symmetric_pair(FRAC_PI_4).unwrap();
        assert!(matches!(
            constraint_residuals(&omega_projector().scale(0.5), &pair, 0.0),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            maximize(&pair, 0.5, &OracleConfig::default()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn invalid_config_rejected() {
        let pair = symmetric_pair(0.3).unwrap();
        for cfg in [
            OracleConfig {
                restarts: 0,
                ..Default::default()
            },
            OracleConfig {
                penalty_weight_schedule: vec![],
                ..Default::default()
            },
            OracleConfig {
                convergence_tol: 0.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                maximize(&pair, 0.5, &cfg),
                Err(Error::InvalidConfig(_))
            ));
        }
        assert!(verify_closed_form(&pair, &[], &OracleConfig::default(), 1e-4).is_err());
    }

    #[test]
    fn warm_start_at_closed_form_is_stationary() {
        let pair = symmetric_pair(FRAC_PI_8).unwrap();
        for t in [0.25, 0.5, 1.0] {
            let r1 = &instrument_choi(&optimal_instrument(FRAC_PI_8, t).unwrap())[0];
            let res = maximize_from(&pair, t, &OracleConfig::default(), r1).unwrap();
            assert!(
                res.iterations() <= 2,
                "{} iterations at t={t}",
                res.iterations()
            );
            assert!(res.converged);
            assert_abs_diff_eq!(
                res.achieved_d,
                tradeoff_point(FRAC_PI_8, t).unwrap().d,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn psd_cholesky_handles_rank_deficiency() {
        let r1 = &instrument_choi(&optimal_instrument(0.3, 0.7).unwrap())[0];
        let l = psd_cholesky(r1.matrix());
        assert!((&l * &l.adjoint()).max_abs_diff(r1.matrix()) < 1e-12);
    }

    #[test]
    fn maximize_matches_closed_form() {
        let pair = symmetric_pair(FRAC_PI_8).unwrap();
        let cfg = OracleConfig::default();
        for (t, want) in [
            (1.0, 0.066_987_298_107_780_68),
            (0.5, 0.001_123_085_848_768_856_6),
        ] {
            let res = maximize(&pair, t, &cfg).unwrap();
            assert!(res.feasible(), "{:?}", res.constraint_residuals);
            assert_abs_diff_eq!(res.achieved_d, want, epsilon = 1e-4);
        }
        let res = maximize(&pair, 0.0, &cfg).unwrap();
        assert_abs_diff_eq!(res.achieved_d, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn maximize_is_deterministic() {
        let pair = symmetric_pair(0.3).unwrap();
        let cfg = OracleConfig {
            restarts: 4,
            seed: 99,
            ..Default::default()
        };
        assert_eq!(
            maximize(&pair, 0.6, &cfg).unwrap(),
            maximize(&pair, 0.6, &cfg).unwrap()
        );
    }

    #[test]
    fn real_restriction_agrees() {
        let pair = symmetric_pair(0.3).unwrap();
        for t in [0.3, 0.8] {
            let complex = maximize(&pair, t, &OracleConfig::default()).unwrap();
            let real = maximize(
                &pair,
                t,
                &OracleConfig {
                    restrict_real: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_abs_diff_eq!(complex.achieved_d, real.achieved_d, epsilon = 1e-4);
        }
    }
}
