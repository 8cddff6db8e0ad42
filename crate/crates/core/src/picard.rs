//! Successive-approximation solver for the transformed shallow water system
//!
//! ```text
//! dt u + (u . grad) u - nu lap u = nu grad(ln(1+h)) . grad u - grad h
//! dt h + (u . grad) h            = -div u - h div u
//! ```
//!
//! Each iterate freezes the previous velocity and height in the transport and
//! forcing terms, so every step is one linear transport-diffusion solve for
//! the velocity and one linear transport solve for the height. The module
//! also houses the norm-budget admission gate, the closed-form existence-time
//! selection, contraction diagnostics for the iterate differences, a
//! stability (uniqueness) experiment, and windowed long-horizon runs.

use std::sync::Arc;

use crate::bony::compose_log1p;
use crate::error::{Error, Result};
use crate::linear::{
    step_transport, step_transport_diffusion, LinearProblem, ProblemKind, StepOptions, Trajectory,
};
use crate::littlewood_paley::{besov_total, chemin_lerner_norm, BesovIndex, DyadicPartition};
use crate::spectral::{Exponent, Grid, SpectralField};

/// Which form of the iteration scheme to run. The default treats diffusion
/// implicitly in the unknown iterate and forces with `-grad h`; the alternate
/// form moves the diffusion of the previous iterate and `+grad h` to the
/// forcing side (kept for comparison runs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeVariant {
    DiffusionOnUnknown,
    AsPrinted,
}

impl std::str::FromStr for SchemeVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diffusion-on-unknown" => Ok(SchemeVariant::DiffusionOnUnknown),
            "as-printed" => Ok(SchemeVariant::AsPrinted),
            other => Err(Error::Config(format!("unknown scheme variant '{other}'"))),
        }
    }
}

/// Solver parameters. `c0` is the frozen calibration constant; the budget
/// thresholds and time-selection constraints are instantiated from it.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SolverConfig {
    /// Viscosity, in (0, 1).
    pub nu: f64,
    /// Regularity exponent, in (1, 2].
    pub s: f64,
    /// Calibrated constant, >= 1.
    pub c0: f64,
    /// Auxiliary time exponent; must satisfy 2/rho < s - 1.
    pub rho: f64,
    /// Regularity slack used by the product estimates.
    pub epsilon: f64,
    /// Cauchy tolerance on iterate differences (H^(s-1) tilde norms).
    pub cauchy_tol: f64,
    /// Slack over the ideal contraction factor 1/2.
    pub ratio_tol: f64,
    /// Ratios are only asserted for iterates beyond this index.
    pub burn_in: usize,
    pub max_iters: usize,
    /// Time steps per solve window; all iterates share these samples.
    pub steps_per_window: usize,
    pub scheme: SchemeVariant,
}

impl SolverConfig {
    /// Build a config with the default derived parameters
    /// `rho = 4/(s-1)` and `epsilon = min(0.01, (s - 1 - 2/rho)/2)`.
    pub fn new(nu: f64, s: f64, c0: f64) -> Result<SolverConfig> {
        let rho = 4.0 / (s - 1.0);
        let epsilon = (0.01f64).min((s - 1.0 - 2.0 / rho) / 2.0);
        let config = SolverConfig {
            nu,
            s,
            c0,
            rho,
            epsilon,
            cauchy_tol: 1e-9,
            ratio_tol: 0.1,
            burn_in: 2,
            max_iters: 24,
            steps_per_window: 32,
            scheme: SchemeVariant::DiffusionOnUnknown,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::Config(format!("nu must lie in (0, 1), got {}", self.nu)));
        }
        if !(self.s > 1.0 && self.s <= 2.0) {
            return Err(Error::Config(format!("s must lie in (1, 2], got {}", self.s)));
        }
        if !(2.0 / self.rho < self.s - 1.0) {
            return Err(Error::Config(format!(
                "rho = {} violates 2/rho < s - 1 (s = {})",
                self.rho, self.s
            )));
        }
        if !(self.c0 >= 1.0) {
            return Err(Error::Config(format!("c0 must be >= 1, got {}", self.c0)));
        }
        if self.steps_per_window < 2 {
            return Err(Error::Config("steps_per_window must be >= 2".into()));
        }
        if !(self.cauchy_tol > 0.0) {
            return Err(Error::Config("cauchy_tol must be positive".into()));
        }
        Ok(())
    }

    /// Instantiation of the existential constant in the time-selection
    /// constraints (monotone aggregate of the calibrated constant).
    pub fn big_c(&self) -> f64 {
        self.c0 * self.c0 * self.c0
    }

    /// Smallness threshold for long-horizon runs.
    pub fn eta(&self) -> f64 {
        (self.nu / (16.0 * self.c0 * self.c0)).min(1.0 / (16.0 * self.c0))
    }

    /// Time exponent of the intermediate-regularity velocity norm.
    pub fn mid_rho(&self) -> f64 {
        4.0 / (3.0 - self.s)
    }
}

/// Norm budget derived from the initial data.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct NormBudget {
    /// Velocity budget `8 nu^-1 c0 ||u0||_(H^s)`.
    pub e1: f64,
    /// Height budget `4 ||h0||_(H^s)`.
    pub e2: f64,
    pub u0_norm: f64,
    pub h0_norm: f64,
}

impl NormBudget {
    /// First violated budget inequality for a set of tracked norms, if any.
    pub fn violation(&self, norms: &StateNorms) -> Option<String> {
        let tol = 1.0 + 1e-9;
        let checks = [
            ("sup-in-time H^s velocity norm", norms.u_linf_hs, self.e1),
            ("L^2-in-time H^(s+1) velocity norm", norms.u_l2_hs1, self.e1),
            ("intermediate velocity norm", norms.u_mid, self.e1),
            ("sup-in-time H^s height norm", norms.h_linf_hs, self.e2),
        ];
        for (name, value, bound) in checks {
            if value > bound * tol {
                return Some(format!("{name} {value:.6e} exceeds budget {bound:.6e}"));
            }
        }
        None
    }
}

/// The four tracked norms of one iterate.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct StateNorms {
    /// Tilde L^inf_t H^s of u.
    pub u_linf_hs: f64,
    /// Tilde L^2_t H^(s+1) of u.
    pub u_l2_hs1: f64,
    /// Tilde L^(4/(3-s))_t H^((s+3)/2) of u.
    pub u_mid: f64,
    /// Tilde L^inf_t H^s of h.
    pub h_linf_hs: f64,
}

/// Difference norms against the previous iterate.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct DiffNorms {
    /// Tilde L^inf_t H^(s-1) of u_n - u_(n-1).
    pub u_linf: f64,
    /// Tilde L^2_t H^s of u_n - u_(n-1).
    pub u_l2: f64,
    /// Tilde L^inf_t H^(s-1) of h_n - h_(n-1).
    pub h_linf: f64,
}

impl DiffNorms {
    pub fn max(&self) -> f64 {
        self.u_linf.max(self.u_l2).max(self.h_linf)
    }
}

/// One iterate of the approximation sequence.
#[derive(Debug, Clone)]
pub struct IterationState {
    pub n: usize,
    pub u: Trajectory,
    pub h: Trajectory,
    pub norms: StateNorms,
    /// None for the first iterate.
    pub diff_norms: Option<DiffNorms>,
    /// Set when the tracked norms exceed the admitted budget.
    pub falsification: Option<String>,
}

/// Admit an initial-data pair and derive its norm budget. Rejects data whose
/// height norm exceeds the smallness threshold `1/(8 c0)`.
pub fn admit_initial_data(
    u0: &SpectralField,
    h0: &SpectralField,
    config: &SolverConfig,
) -> Result<NormBudget> {
    if u0.components() != 2 {
        return Err(Error::Dimension { expected: 2, got: u0.components() });
    }
    if h0.components() != 1 {
        return Err(Error::Dimension { expected: 1, got: h0.components() });
    }
    u0.same_grid(h0)?;
    for (name, f) in [("u0", u0), ("h0", h0)] {
        let trimmed = f.clone().dealiased();
        if (&trimmed - f).l2_norm() != 0.0 {
            return Err(Error::Admission(format!(
                "{name} carries frequencies outside the dealiased band"
            )));
        }
    }
    let u0_norm = u0.sobolev_norm(config.s);
    let h0_norm = h0.sobolev_norm(config.s);
    let threshold = 1.0 / (8.0 * config.c0);
    if h0_norm > threshold {
        return Err(Error::Admission(format!(
            "H^s norm of h0 ({h0_norm:.6e}) exceeds the smallness threshold 1/(8 c0) = {threshold:.6e}"
        )));
    }
    let h_inf = h0.linf_norm();
    if h_inf > 0.5 {
        return Err(Error::Admission(format!(
            "sup norm of h0 ({h_inf:.6e}) exceeds 1/2"
        )));
    }
    Ok(NormBudget {
        e1: 8.0 / config.nu * config.c0 * u0_norm,
        e2: 4.0 * h0_norm,
        u0_norm,
        h0_norm,
    })
}

/// A selected time horizon together with the name of the binding constraint
/// and any degenerate-data notices.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TimeSelection {
    pub t: f64,
    pub binding: String,
    pub notices: Vec<String>,
}

/// Candidate from one power constraint `coeff * T^alpha * x <= y`, solved in
/// closed form; `None` when the constraint does not bind (x = 0) or is
/// degenerate (y = 0 with x > 0, recorded as a notice).
fn power_constraint(
    name: &str,
    coeff: f64,
    alpha: f64,
    x: f64,
    y: f64,
    notices: &mut Vec<String>,
) -> Option<(String, f64)> {
    if x == 0.0 {
        return None;
    }
    if y == 0.0 {
        notices.push(format!(
            "constraint '{name}' is degenerate (zero budget on the right-hand side); \
             treated as vacuous because the terms it bounds vanish identically"
        ));
        return None;
    }
    Some((name.to_string(), (y / (coeff * x)).powf(1.0 / alpha)))
}

fn pick_min(candidates: Vec<(String, f64)>, notices: Vec<String>) -> TimeSelection {
    let (binding, t) = candidates
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    TimeSelection { t, binding, notices }
}

/// Largest local horizon satisfying the growth preconstraints and the five
/// budget constraints, each solved in closed form.
pub fn select_t_local(budget: &NormBudget, config: &SolverConfig) -> TimeSelection {
    let c = config.big_c();
    let c0 = config.c0;
    let (e1, e2) = (budget.e1, budget.e2);
    let mut notices = Vec::new();
    let mut candidates: Vec<(String, f64)> = vec![
        ("viscous growth cap".into(), 1.0 / config.nu),
        ("base horizon cap".into(), 9.0 / 64.0),
        ("unit horizon cap".into(), 1.0),
    ];
    if e1 > 0.0 {
        candidates.push((
            "exponential growth cap".into(),
            (2.0f64).ln() / (2.0 * c0 * c0 * e1),
        ));
    }
    let inv_rho = 1.0 / config.rho;
    let quarter_pow = (config.s - 1.0) / 4.0;
    for cand in [
        power_constraint("height feeds velocity budget", c, inv_rho, e2, e1 / 4.0, &mut notices),
        power_constraint("height forcing smallness", c, inv_rho, e2, 0.25, &mut notices),
        power_constraint(
            "velocity feeds height budget",
            c,
            0.5,
            (1.0 + e2) * e1,
            e2 / 2.0,
            &mut notices,
        ),
        power_constraint("height smoothing budget", c, 0.5, e2, e1 / 4.0, &mut notices),
        power_constraint("height mixed smallness", c, quarter_pow, e2, 0.25, &mut notices),
    ]
    .into_iter()
    .flatten()
    {
        candidates.push(cand);
    }
    pick_min(candidates, notices)
}

/// Largest contraction horizon `T1 <= t_local` satisfying the five geometric
/// decay constraints. The ratio constraints are vacuous when either budget is
/// zero (their terms vanish identically).
pub fn select_t_contraction(
    budget: &NormBudget,
    config: &SolverConfig,
    t_local: f64,
) -> TimeSelection {
    let c8 = 8.0 * config.big_c();
    let (e1, e2) = (budget.e1, budget.e2);
    let quarter_pow = (config.s - 1.0) / 4.0;
    let mut notices = Vec::new();
    let mut candidates: Vec<(String, f64)> = vec![("local horizon".into(), t_local)];
    let mut ratio_constraints = Vec::new();
    if e1 > 0.0 && e2 > 0.0 {
        ratio_constraints.push(power_constraint(
            "height-to-velocity ratio decay",
            c8,
            quarter_pow,
            (1.0 + e1 + e1 * e2 + e1 * e2 * e2) * e2 / e1,
            1.0,
            &mut notices,
        ));
        ratio_constraints.push(power_constraint(
            "velocity-to-height ratio decay",
            c8,
            0.5,
            e1 * (1.0 + e2) / e2,
            1.0,
            &mut notices,
        ));
    } else if e1 > 0.0 || e2 > 0.0 {
        notices.push(
            "ratio decay constraints are vacuous for a zero budget component".into(),
        );
    }
    for cand in [
        power_constraint("velocity decay", c8, quarter_pow, e1, 1.0, &mut notices),
        power_constraint("height decay", c8, quarter_pow, e2, 1.0, &mut notices),
        power_constraint("velocity smoothing decay", c8, 0.5, e1, 1.0, &mut notices),
    ]
    .into_iter()
    .chain(ratio_constraints)
    .flatten()
    {
        candidates.push(cand);
    }
    pick_min(candidates, notices)
}

/// Pointwise `1/(1 + h)`; requires the smallness regime `||h||_inf <= 1/2`.
fn reciprocal_1p(h: &SpectralField) -> Result<SpectralField> {
    let sup = h.linf_norm();
    if sup > 0.5 {
        return Err(Error::SmallnessLost(format!(
            "sup norm of h is {sup:.6e} > 1/2; 1/(1+h) leaves the calibrated regime"
        )));
    }
    let phys = h.to_physical();
    let vals: Vec<f64> = phys[0].iter().map(|&x| 1.0 / (1.0 + x)).collect();
    Ok(SpectralField::from_physical(h.grid(), &[vals])?.dealiased())
}

/// `(v . grad) f` componentwise (dealiased).
fn advection_term(v: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
    let mut parts = Vec::with_capacity(f.components());
    for c in 0..f.components() {
        let grad = f.component(c).gradient()?;
        parts.push(v.dot_product(&grad)?);
    }
    SpectralField::from_components(&parts)
}

/// `sum_k (d_k a)(d_k f^c)` per component of `f`, with scalar `a` (dealiased).
fn cross_gradient(a: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
    let ga = a.gradient()?;
    let mut parts = Vec::with_capacity(f.components());
    for c in 0..f.components() {
        let gf = f.component(c).gradient()?;
        parts.push(ga.dot_product(&gf)?);
    }
    SpectralField::from_components(&parts)
}

/// One configured solve window: admitted data, budget, selected horizons, and
/// the shared time samples every iterate is integrated on.
pub struct PicardRun<'a> {
    config: SolverConfig,
    partition: &'a DyadicPartition,
    u0: SpectralField,
    h0: SpectralField,
    budget: NormBudget,
    t_local: TimeSelection,
    t1: TimeSelection,
    times: Vec<f64>,
}

/// Result of a full local solve.
pub struct SolveOutcome {
    pub states: Vec<IterationState>,
    pub converged: bool,
    pub iterations: usize,
    /// Max interior-sample H^(s-1) residual of the velocity equation.
    pub residual_u: f64,
    /// Max interior-sample H^(s-1) residual of the height equation.
    pub residual_h: f64,
    pub falsifications: Vec<String>,
}

impl SolveOutcome {
    pub fn solution(&self) -> (&Trajectory, &Trajectory) {
        let last = self.states.last().unwrap();
        (&last.u, &last.h)
    }
}

impl<'a> PicardRun<'a> {
    pub fn new(
        u0: &SpectralField,
        h0: &SpectralField,
        config: &SolverConfig,
        partition: &'a DyadicPartition,
    ) -> Result<PicardRun<'a>> {
        Self::with_horizon(u0, h0, config, partition, None)
    }

    /// As `new`, but integrate over the given horizon instead of the selected
    /// contraction horizon (used to put two runs on a common interval).
    pub fn with_horizon(
        u0: &SpectralField,
        h0: &SpectralField,
        config: &SolverConfig,
        partition: &'a DyadicPartition,
        horizon: Option<f64>,
    ) -> Result<PicardRun<'a>> {
        config.validate()?;
        let budget = admit_initial_data(u0, h0, config)?;
        let t_local = select_t_local(&budget, config);
        let mut t1 = select_t_contraction(&budget, config, t_local.t);
        if let Some(t) = horizon {
            if !(t > 0.0) {
                return Err(Error::Config(format!("horizon must be positive, got {t}")));
            }
            t1.t = t;
            t1.binding = "horizon override".into();
        }
        let steps = config.steps_per_window;
        // must match the integrator's internal sample times bitwise
        let times: Vec<f64> = (0..=steps)
            .map(|i| if i == 0 { 0.0 } else { t1.t * i as f64 / steps as f64 })
            .collect();
        Ok(PicardRun {
            config: config.clone(),
            partition,
            u0: u0.clone(),
            h0: h0.clone(),
            budget,
            t_local,
            t1,
            times,
        })
    }

    pub fn budget(&self) -> &NormBudget {
        &self.budget
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn t_local(&self) -> &TimeSelection {
        &self.t_local
    }

    pub fn t1(&self) -> &TimeSelection {
        &self.t1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u0.grid()
    }

    fn constant_trajectory(&self, f: SpectralField) -> Trajectory {
        let fields = vec![f; self.times.len()];
        Trajectory::new(self.times.clone(), fields).unwrap()
    }

    fn state_norms(&self, u: &Trajectory, h: &Trajectory) -> StateNorms {
        let s = self.config.s;
        let p = self.partition;
        let two = Exponent::Finite(2.0);
        StateNorms {
            u_linf_hs: chemin_lerner_norm(
                u.times(),
                u.fields(),
                Exponent::Infinity,
                BesovIndex::sobolev(s),
                p,
            )
            .unwrap()
            .total,
            u_l2_hs1: chemin_lerner_norm(u.times(), u.fields(), two, BesovIndex::sobolev(s + 1.0), p)
                .unwrap()
                .total,
            u_mid: chemin_lerner_norm(
                u.times(),
                u.fields(),
                Exponent::Finite(self.config.mid_rho()),
                BesovIndex::sobolev((s + 3.0) / 2.0),
                p,
            )
            .unwrap()
            .total,
            h_linf_hs: chemin_lerner_norm(
                h.times(),
                h.fields(),
                Exponent::Infinity,
                BesovIndex::sobolev(s),
                p,
            )
            .unwrap()
            .total,
        }
    }

    fn diff_norms(&self, state: &IterationState, prev: &IterationState) -> Result<DiffNorms> {
        let du = state.u.difference(&prev.u)?;
        let dh = state.h.difference(&prev.h)?;
        let s = self.config.s;
        let p = self.partition;
        Ok(DiffNorms {
            u_linf: chemin_lerner_norm(
                du.times(),
                du.fields(),
                Exponent::Infinity,
                BesovIndex::sobolev(s - 1.0),
                p,
            )?
            .total,
            u_l2: chemin_lerner_norm(
                du.times(),
                du.fields(),
                Exponent::Finite(2.0),
                BesovIndex::sobolev(s),
                p,
            )?
            .total,
            h_linf: chemin_lerner_norm(
                dh.times(),
                dh.fields(),
                Exponent::Infinity,
                BesovIndex::sobolev(s - 1.0),
                p,
            )?
            .total,
        })
    }

    /// First iterate: constant-in-time low-frequency truncations of the data.
    pub fn initial_iterate(&self) -> IterationState {
        let u1 = self.partition.low_cutoff(&self.u0, 2);
        let h1 = self.partition.low_cutoff(&self.h0, 2);
        let u = self.constant_trajectory(u1);
        let h = self.constant_trajectory(h1);
        let norms = self.state_norms(&u, &h);
        let falsification = self.budget.violation(&norms);
        IterationState { n: 1, u, h, norms, diff_norms: None, falsification }
    }

    /// Forcing of the velocity equation at one time sample.
    fn velocity_forcing(&self, u: &SpectralField, h: &SpectralField) -> Result<SpectralField> {
        let log_term = compose_log1p(h)?;
        let mut g = cross_gradient(&log_term, u)?.scale(self.config.nu);
        match self.config.scheme {
            SchemeVariant::DiffusionOnUnknown => {
                g.axpy(-1.0, &h.gradient()?);
            }
            SchemeVariant::AsPrinted => {
                g.axpy(1.0, &h.gradient()?);
                g.axpy(self.config.nu, &u.laplacian());
            }
        }
        Ok(g)
    }

    /// Forcing of the height equation at one time sample.
    fn height_forcing(&self, u: &SpectralField, h: &SpectralField) -> Result<SpectralField> {
        let div = u.divergence()?;
        let mut g = div.scale(-1.0);
        g.axpy(-1.0, &h.pointwise_product(&div)?);
        Ok(g)
    }

    /// Advance the sequence by one iterate.
    pub fn picard_step(&self, prev: &IterationState) -> Result<IterationState> {
        let n = prev.n + 1;
        let m = self.times.len();
        let mut gu_fields = Vec::with_capacity(m);
        let mut gh_fields = Vec::with_capacity(m);
        for i in 0..m {
            let u_i = &prev.u.fields()[i];
            let h_i = &prev.h.fields()[i];
            gu_fields.push(self.velocity_forcing(u_i, h_i)?);
            gh_fields.push(self.height_forcing(u_i, h_i)?);
        }
        let gu = Trajectory::new(self.times.clone(), gu_fields)?;
        let gh = Trajectory::new(self.times.clone(), gh_fields)?;

        let init_u = self.partition.low_cutoff(&self.u0, n as i32 + 1);
        let init_h = self.partition.low_cutoff(&self.h0, n as i32 + 1);
        let dt = self.t1.t / self.config.steps_per_window as f64;
        let opts = StepOptions { cfl_safety: 0.5, min_steps: self.config.steps_per_window };

        let u = match self.config.scheme {
            SchemeVariant::DiffusionOnUnknown => {
                let problem = LinearProblem {
                    kind: ProblemKind::TransportDiffusion,
                    velocity: Some(&prev.u),
                    forcing: Some(&gu),
                    initial: init_u,
                    nu: self.config.nu,
                    horizon: self.t1.t,
                };
                step_transport_diffusion(&problem, dt, opts)?
            }
            SchemeVariant::AsPrinted => {
                let problem = LinearProblem {
                    kind: ProblemKind::Transport,
                    velocity: Some(&prev.u),
                    forcing: Some(&gu),
                    initial: init_u,
                    nu: 0.0,
                    horizon: self.t1.t,
                };
                step_transport(&problem, dt, opts)?
            }
        };
        let problem_h = LinearProblem {
            kind: ProblemKind::Transport,
            velocity: Some(&prev.u),
            forcing: Some(&gh),
            initial: init_h,
            nu: 0.0,
            horizon: self.t1.t,
        };
        let h = step_transport(&problem_h, dt, opts)?;

        let h_sup = h.fields().iter().map(|f| f.linf_norm()).fold(0.0, f64::max);
        if h_sup > 0.5 {
            return Err(Error::SmallnessLost(format!(
                "iterate {n} height reached sup norm {h_sup:.6e} > 1/2"
            )));
        }

        let norms = self.state_norms(&u, &h);
        let falsification = self.budget.violation(&norms);
        let mut state =
            IterationState { n, u, h, norms, diff_norms: None, falsification };
        state.diff_norms = Some(self.diff_norms(&state, prev)?);
        Ok(state)
    }

    /// Run exactly `count` iterates (no early Cauchy stop).
    pub fn run_iterates(&self, count: usize) -> Result<Vec<IterationState>> {
        let mut states = vec![self.initial_iterate()];
        while states.len() < count {
            let next = self.picard_step(states.last().unwrap())?;
            states.push(next);
        }
        Ok(states)
    }

    /// Iterate until the difference norms fall below the Cauchy tolerance.
    pub fn solve(&self) -> Result<SolveOutcome> {
        let mut states = vec![self.initial_iterate()];
        let mut converged = false;
        while states.len() < self.config.max_iters {
            let next = self.picard_step(states.last().unwrap())?;
            let done = next.diff_norms.map(|d| d.max() < self.config.cauchy_tol).unwrap_or(false);
            states.push(next);
            if done {
                converged = true;
                break;
            }
        }
        let falsifications: Vec<String> = states
            .iter()
            .filter_map(|st| st.falsification.clone().map(|f| format!("iterate {}: {f}", st.n)))
            .collect();
        let last = states.last().unwrap();
        let (residual_u, residual_h) = self.pde_residual(&last.u, &last.h)?;
        let iterations = states.len();
        if !converged {
            let residual = last.diff_norms.map(|d| d.max()).unwrap_or(f64::NAN);
            return Err(Error::NonConvergence { iters: iterations, residual });
        }
        Ok(SolveOutcome { states, converged, iterations, residual_u, residual_h, falsifications })
    }

    /// Max interior-sample H^(s-1) residuals of the nonlinear system along a
    /// trajectory pair (centered time differences).
    pub fn pde_residual(&self, u: &Trajectory, h: &Trajectory) -> Result<(f64, f64)> {
        let idx = BesovIndex::sobolev(self.config.s - 1.0);
        let m = self.times.len();
        let mut max_u = 0.0f64;
        let mut max_h = 0.0f64;
        for i in 1..m - 1 {
            let dt2 = self.times[i + 1] - self.times[i - 1];
            let u_i = &u.fields()[i];
            let h_i = &h.fields()[i];
            let mut res_u = (&u.fields()[i + 1] - &u.fields()[i - 1]).scale(1.0 / dt2);
            res_u.axpy(1.0, &advection_term(u_i, u_i)?);
            res_u.axpy(-self.config.nu, &u_i.laplacian());
            let log_term = compose_log1p(h_i)?;
            res_u.axpy(-self.config.nu, &cross_gradient(&log_term, u_i)?);
            res_u.axpy(1.0, &h_i.gradient()?);
            max_u = max_u.max(besov_total(&res_u, idx, self.partition));

            let mut res_h = (&h.fields()[i + 1] - &h.fields()[i - 1]).scale(1.0 / dt2);
            res_h.axpy(1.0, &advection_term(u_i, h_i)?);
            let div = u_i.divergence()?;
            res_h.axpy(1.0, &div);
            res_h.axpy(1.0, &h_i.pointwise_product(&div)?);
            max_h = max_h.max(besov_total(&res_h, idx, self.partition));
        }
        Ok((max_u, max_h))
    }
}

/// Ratio of consecutive difference norms for one iterate.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RatioRow {
    pub n: usize,
    pub u_linf: f64,
    pub u_l2: f64,
    pub h_linf: f64,
    pub flagged: bool,
}

/// One forcing-term norm check of the difference system.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TermCheck {
    pub name: String,
    pub n: usize,
    pub lhs: f64,
    pub bound: f64,
    pub flagged: bool,
}

/// Contraction diagnostics over a sequence of iterates.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ContractionReport {
    pub diff_norms: Vec<DiffNorms>,
    pub ratios: Vec<RatioRow>,
    pub term_checks: Vec<TermCheck>,
    pub ratio_flags: usize,
    pub term_flags: usize,
    pub pass: bool,
}

fn safe_ratio(num: f64, den: f64, tol: f64) -> f64 {
    if den < tol {
        0.0
    } else {
        num / den
    }
}

impl<'a> PicardRun<'a> {
    /// Difference-norm ratios and per-term bound checks for the iterate
    /// differences. Requires at least three iterates.
    pub fn contraction_report(&self, states: &[IterationState]) -> Result<ContractionReport> {
        if states.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "contraction diagnostics need >= 3 iterates, got {}",
                states.len()
            )));
        }
        let tol = self.config.cauchy_tol;
        let diff_norms: Vec<DiffNorms> =
            states.iter().skip(1).map(|st| st.diff_norms.unwrap()).collect();
        let mut ratios = Vec::new();
        let mut ratio_flags = 0;
        let limit = 0.5 + self.config.ratio_tol;
        for w in 1..diff_norms.len() {
            let n = states[w + 1].n;
            let row = RatioRow {
                n,
                u_linf: safe_ratio(diff_norms[w].u_linf, diff_norms[w - 1].u_linf, tol),
                u_l2: safe_ratio(diff_norms[w].u_l2, diff_norms[w - 1].u_l2, tol),
                h_linf: safe_ratio(diff_norms[w].h_linf, diff_norms[w - 1].h_linf, tol),
                flagged: false,
            };
            let flagged = n > self.config.burn_in
                && (row.u_linf > limit || row.u_l2 > limit || row.h_linf > limit);
            if flagged {
                ratio_flags += 1;
            }
            ratios.push(RatioRow { flagged, ..row });
        }

        let mut term_checks = Vec::new();
        let mut term_flags = 0;
        for w in 1..states.len() {
            let checks = self.term_checks(&states[w - 1], &states[w])?;
            for c in &checks {
                if c.flagged {
                    term_flags += 1;
                }
            }
            term_checks.extend(checks);
        }
        Ok(ContractionReport {
            diff_norms,
            ratios,
            term_checks,
            ratio_flags,
            term_flags,
            pass: ratio_flags == 0 && term_flags == 0,
        })
    }

    /// Evaluate the nine forcing terms of the difference system for the pair
    /// (prev, cur) and compare each tilde space-time norm against its
    /// budgeted bound with the calibrated constant.
    fn term_checks(&self, prev: &IterationState, cur: &IterationState) -> Result<Vec<TermCheck>> {
        let s = self.config.s;
        let nu = self.config.nu;
        let c = self.config.big_c();
        let (e1, e2) = (self.budget.e1, self.budget.e2);
        let t = self.t1.t;
        let d = cur.diff_norms.unwrap();
        let m = self.times.len();

        let mut f1 = Vec::with_capacity(m);
        let mut f2 = Vec::with_capacity(m);
        let mut f3 = Vec::with_capacity(m);
        let mut f4 = Vec::with_capacity(m);
        let mut f5 = Vec::with_capacity(m);
        let mut j1 = Vec::with_capacity(m);
        let mut j2 = Vec::with_capacity(m);
        let mut j3 = Vec::with_capacity(m);
        let mut j4 = Vec::with_capacity(m);
        for i in 0..m {
            let u_prev = &prev.u.fields()[i];
            let u_cur = &cur.u.fields()[i];
            let h_prev = &prev.h.fields()[i];
            let h_cur = &cur.h.fields()[i];
            let du = u_cur - u_prev;
            let dh = h_cur - h_prev;
            let log_cur = compose_log1p(h_cur)?;
            let recip_cur = reciprocal_1p(h_cur)?;
            let recip_prev = reciprocal_1p(h_prev)?;

            f1.push(advection_term(&du, u_cur)?);
            f2.push(dh.gradient()?);
            f3.push(cross_gradient(&log_cur, &du)?.scale(nu));
            f4.push(recip_cur.pointwise_product(&cross_gradient(&dh, u_prev)?)?.scale(nu));
            let drecip = &recip_cur - &recip_prev;
            f5.push(drecip.pointwise_product(&cross_gradient(h_prev, u_prev)?)?.scale(nu));

            j1.push(advection_term(&du, h_cur)?);
            let ddiv = du.divergence()?;
            j3.push(h_cur.pointwise_product(&ddiv)?);
            j2.push(ddiv);
            j4.push(dh.pointwise_product(&u_prev.divergence()?)?);
        }

        let two = Exponent::Finite(2.0);
        let quarter_pow = (s - 1.0) / 4.0;
        let specs: Vec<(&str, Vec<SpectralField>, Exponent, f64, f64)> = vec![
            // (name, fields, time exponent, space regularity, bound)
            ("velocity self-advection difference", f1, two, s - 2.0,
                c * t.sqrt() * e1 * d.u_linf),
            ("height gradient difference", f2, two, s - 2.0,
                c * t.sqrt() * d.h_linf),
            ("log-height cross-gradient difference", f3, Exponent::Finite(2.0 / s), 2.0 * s - 3.0,
                c * t.powf((s - 1.0) / 2.0) * e2 * d.u_l2),
            ("old-velocity cross-gradient difference", f4, two, s - 2.0,
                c * t.powf(quarter_pow) * e1 * (1.0 + e2) * d.h_linf),
            ("reciprocal-height difference", f5, two, s - 2.0,
                c * t.powf(quarter_pow) * e1 * e2 * (1.0 + e2) * d.h_linf),
            ("height advection difference", j1, two, s - 1.0, c * e2 * d.u_l2),
            ("divergence difference", j2, two, s - 1.0, c * d.u_l2),
            ("height-weighted divergence difference", j3, two, s - 1.0, c * e2 * d.u_l2),
            ("old-divergence height difference", j4, two, s - 1.0, c * e1 * d.h_linf),
        ];
        let mut out = Vec::with_capacity(specs.len());
        for (name, fields, rho, reg, bound) in specs {
            let lhs = chemin_lerner_norm(
                &self.times,
                &fields,
                rho,
                BesovIndex::sobolev(reg),
                self.partition,
            )?
            .total;
            let flagged = lhs > bound * (1.0 + 1e-9) + 1e-14;
            out.push(TermCheck { name: name.into(), n: cur.n, lhs, bound, flagged });
        }
        Ok(out)
    }
}

/// Two-run stability comparison on a common horizon.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StabilityReport {
    pub t1: f64,
    /// `||u0 - v0||_(H^s) + ||h0 - g0||_(H^s)`.
    pub initial_distance: f64,
    /// Tilde L^inf_t H^s distance of the velocities.
    pub u_distance: f64,
    /// Tilde L^2_t H^(s+1) distance of the velocities.
    pub u_smoothing_distance: f64,
    /// Tilde L^inf_t H^s distance of the heights.
    pub h_distance: f64,
    pub total_distance: f64,
    /// `C exp(C t1)` times the initial distance, with the calibrated C.
    pub envelope: f64,
    pub within_envelope: bool,
}

/// Solve from two admitted data sets on a common horizon and compare the
/// solutions against the exponential stability envelope.
pub fn uniqueness_experiment(
    u0: &SpectralField,
    h0: &SpectralField,
    v0: &SpectralField,
    g0: &SpectralField,
    config: &SolverConfig,
    partition: &DyadicPartition,
) -> Result<StabilityReport> {
    let run_a = PicardRun::new(u0, h0, config, partition)?;
    let run_b = PicardRun::new(v0, g0, config, partition)?;
    let t1 = run_a.t1().t.min(run_b.t1().t);
    let run_a = PicardRun::with_horizon(u0, h0, config, partition, Some(t1))?;
    let run_b = PicardRun::with_horizon(v0, g0, config, partition, Some(t1))?;
    let sol_a = run_a.solve()?;
    let sol_b = run_b.solve()?;
    let (ua, ha) = sol_a.solution();
    let (ub, hb) = sol_b.solution();
    let du = ua.difference(ub)?;
    let dh = ha.difference(hb)?;
    let s = config.s;
    let u_distance = chemin_lerner_norm(
        du.times(),
        du.fields(),
        Exponent::Infinity,
        BesovIndex::sobolev(s),
        partition,
    )?
    .total;
    let u_smoothing_distance = chemin_lerner_norm(
        du.times(),
        du.fields(),
        Exponent::Finite(2.0),
        BesovIndex::sobolev(s + 1.0),
        partition,
    )?
    .total;
    let h_distance = chemin_lerner_norm(
        dh.times(),
        dh.fields(),
        Exponent::Infinity,
        BesovIndex::sobolev(s),
        partition,
    )?
    .total;
    let initial_distance = (u0 - v0).sobolev_norm(s) + (h0 - g0).sobolev_norm(s);
    let c = config.big_c();
    let envelope = c * (c * t1).exp() * initial_distance;
    let total_distance = u_distance + u_smoothing_distance + h_distance;
    Ok(StabilityReport {
        t1,
        initial_distance,
        u_distance,
        u_smoothing_distance,
        h_distance,
        total_distance,
        envelope,
        within_envelope: total_distance <= envelope,
    })
}

/// Long-horizon run: per-window norm history and boundedness verdict.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GlobalReport {
    pub t1: f64,
    pub eta: f64,
    pub e1: f64,
    pub e2: f64,
    pub windows_requested: usize,
    pub windows_completed: usize,
    /// Sup-in-window tilde H^s velocity norm, one entry per window.
    pub u_history: Vec<f64>,
    pub h_history: Vec<f64>,
    pub bounded: bool,
    pub failure: Option<String>,
}

/// Repeatedly solve on consecutive windows, re-admitting each end state as
/// new data. Succeeds when both norms stay within twice the initial budget;
/// a re-admission rejection or budget escape is recorded, not fatal.
pub fn global_run(
    u0: &SpectralField,
    h0: &SpectralField,
    config: &SolverConfig,
    partition: &DyadicPartition,
    windows: usize,
) -> Result<GlobalReport> {
    let s = config.s;
    let eta = config.eta();
    let data_size = u0.sobolev_norm(s) + h0.sobolev_norm(s);
    if data_size > eta {
        return Err(Error::Admission(format!(
            "combined H^s data norm {data_size:.6e} exceeds the smallness threshold {eta:.6e}"
        )));
    }
    let budget0 = admit_initial_data(u0, h0, config)?;
    let t_local = select_t_local(&budget0, config);
    let t1 = select_t_contraction(&budget0, config, t_local.t);
    let u_cap = 2.0 * budget0.e1;
    let h_cap = 2.0 * budget0.e2;

    let mut u_cur = u0.clone();
    let mut h_cur = h0.clone();
    let mut u_history = Vec::with_capacity(windows);
    let mut h_history = Vec::with_capacity(windows);
    let mut failure = None;
    let mut completed = 0;
    for window in 0..windows {
        let t_start = window as f64 * t1.t;
        let run = match PicardRun::with_horizon(&u_cur, &h_cur, config, partition, Some(t1.t)) {
            Ok(run) => run,
            Err(e) => {
                failure = Some(format!("re-admission failed at t = {t_start:.6e}: {e}"));
                break;
            }
        };
        let outcome = match run.solve() {
            Ok(o) => o,
            Err(e) => {
                failure = Some(format!("window {window} failed at t = {t_start:.6e}: {e}"));
                break;
            }
        };
        let last = outcome.states.last().unwrap();
        u_history.push(last.norms.u_linf_hs);
        h_history.push(last.norms.h_linf_hs);
        if last.norms.u_linf_hs > u_cap || last.norms.h_linf_hs > h_cap {
            failure = Some(format!(
                "norms escaped twice the initial budget at t = {t_start:.6e}"
            ));
            break;
        }
        let (u_traj, h_traj) = outcome.solution();
        u_cur = u_traj.last().clone();
        h_cur = h_traj.last().clone();
        completed += 1;
    }
    Ok(GlobalReport {
        t1: t1.t,
        eta,
        e1: budget0.e1,
        e2: budget0.e2,
        windows_requested: windows,
        windows_completed: completed,
        u_history,
        h_history,
        bounded: failure.is_none() && completed == windows,
        failure,
    })
}

/// Max over supported blocks of the measured factor by which a block's
/// H^(s-1) norm can exceed `2^-j` times its H^s norm (should stay at the
/// partition's shift factor, near 1 for high blocks).
pub fn block_decrement_excess(
    f: &SpectralField,
    s: f64,
    partition: &DyadicPartition,
) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..=partition.j_max() {
        let block = partition.block(f, j);
        let low = block.sobolev_norm(s - 1.0);
        let high = block.sobolev_norm(s);
        if high == 0.0 {
            continue;
        }
        let allowed = partition.block_shift_factor(j) * (2.0f64).powi(-j) * high;
        if allowed > 0.0 {
            worst = worst.max(low / allowed);
        }
    }
    worst
}
