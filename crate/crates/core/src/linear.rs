//! Time integrators for the transport and transport-diffusion building
//! blocks, plus monitors asserting the a priori estimates along computed
//! trajectories.
//!
//! Advection and forcing advance with an explicit second-order Runge-Kutta
//! step (Heun); diffusion is applied through the exact integrating factor
//! `exp(-nu |k|^2 dt)`, so the pure heat flow is integrated exactly and a
//! zero viscosity reduces bitwise to the plain transport step.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::littlewood_paley::{besov_total, ell_r, BesovIndex, DyadicPartition};
use crate::spectral::{Exponent, Grid, SpectralField};

/// A time-sampled field trajectory with linear interpolation between samples.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Trajectory> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(Error::EmptyTrajectory);
        }
        for w in times.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config("trajectory times must strictly increase".into()));
            }
        }
        Ok(Trajectory { times, fields })
    }

    /// Constant-in-time trajectory holding one sample at t = 0.
    pub fn constant(field: SpectralField) -> Trajectory {
        Trajectory {
            times: vec![0.0],
            fields: vec![field],
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> &SpectralField {
        &self.fields[0]
    }

    pub fn last(&self) -> &SpectralField {
        self.fields.last().unwrap()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.fields[0].grid()
    }

    pub fn components(&self) -> usize {
        self.fields[0].components()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Linear interpolation in time, clamped at the ends.
    pub fn sample(&self, t: f64) -> SpectralField {
        if self.len() == 1 || t <= self.times[0] {
            return self.fields[0].clone();
        }
        if t >= *self.times.last().unwrap() {
            return self.last().clone();
        }
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.fields[i].clone(),
            Err(i) => i,
        };
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        let mut out = self.fields[i - 1].scale(1.0 - w);
        out.axpy(w, &self.fields[i]);
        out
    }

    /// Sample-wise difference of two trajectories sharing time samples.
    pub fn difference(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.len() != other.len() {
            return Err(Error::Config(format!(
                "trajectories have {} vs {} samples",
                self.len(),
                other.len()
            )));
        }
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a - b)
            .collect();
        Trajectory::new(self.times.clone(), fields)
    }
}

/// Which linear building block a problem describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Transport,
    TransportDiffusion,
}

/// One linear transport or transport-diffusion problem on [0, horizon].
pub struct LinearProblem<'a> {
    pub kind: ProblemKind,
    /// Advecting velocity (2 components); `None` means v = 0.
    pub velocity: Option<&'a Trajectory>,
    /// Forcing g; `None` means g = 0.
    pub forcing: Option<&'a Trajectory>,
    pub initial: SpectralField,
    pub nu: f64,
    pub horizon: f64,
}

impl<'a> LinearProblem<'a> {
    fn validate(&self) -> Result<()> {
        match self.kind {
            ProblemKind::Transport if self.nu != 0.0 => Err(Error::Config(
                "transport problems must have nu = 0".into(),
            )),
            ProblemKind::TransportDiffusion if self.nu <= 0.0 => Err(Error::Config(
                "transport-diffusion problems must have nu > 0".into(),
            )),
            _ => {
                if self.horizon <= 0.0 {
                    return Err(Error::Config("horizon must be positive".into()));
                }
                if let Some(v) = self.velocity {
                    if v.components() != 2 {
                        return Err(Error::Dimension {
                            expected: 2,
                            got: v.components(),
                        });
                    }
                    self.initial.same_grid(v.first())?;
                }
                if let Some(g) = self.forcing {
                    self.initial.same_grid(g.first())?;
                }
                Ok(())
            }
        }
    }

    /// Advective CFL limit `safety * dx / ||v||_inf` over the velocity samples.
    pub fn cfl_limit(&self, safety: f64) -> f64 {
        let vmax = self
            .velocity
            .map(|v| v.fields().iter().map(|f| f.linf_norm()).fold(0.0, f64::max))
            .unwrap_or(0.0);
        if vmax == 0.0 {
            f64::INFINITY
        } else {
            safety * self.initial.grid().spacing() / vmax
        }
    }
}

/// Integrator tuning knobs.
#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub cfl_safety: f64,
    /// The horizon is always resolved by at least this many steps.
    pub min_steps: usize,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions {
            cfl_safety: 0.5,
            min_steps: 64,
        }
    }
}

/// Physical-space view of a velocity sample, cached per stage time.
struct PhysicalVelocity {
    vx: Vec<f64>,
    vy: Vec<f64>,
}

fn velocity_physical(v: &SpectralField) -> PhysicalVelocity {
    let phys = v.to_physical();
    let mut it = phys.into_iter();
    PhysicalVelocity {
        vx: it.next().unwrap(),
        vy: it.next().unwrap(),
    }
}

/// -(v . grad) f + g evaluated in physical space for the advection term,
/// returned dealiased in frequency space.
fn rhs(
    f: &SpectralField,
    vel: Option<&PhysicalVelocity>,
    g: Option<&SpectralField>,
) -> SpectralField {
    let grid = f.grid();
    let mut out = SpectralField::zeros(grid, f.components());
    if let Some(v) = vel {
        for c in 0..f.components() {
            let fc = f.component(c);
            let dx = fc.partial(0).to_physical().remove(0);
            let dy = fc.partial(1).to_physical().remove(0);
            let prod: Vec<f64> = dx
                .iter()
                .zip(&dy)
                .zip(v.vx.iter().zip(&v.vy))
                .map(|((dx, dy), (vx, vy))| -(vx * dx + vy * dy))
                .collect();
            let spectral = SpectralField::from_physical(grid, &[prod]).unwrap().dealiased();
            out.coeffs_mut(c).copy_from_slice(spectral.coeffs(0));
        }
    }
    if let Some(g) = g {
        out.axpy(1.0, g);
    }
    out
}

fn apply_heat(f: &mut SpectralField, nu: f64, dt: f64) {
    if nu == 0.0 {
        return;
    }
    let grid = f.grid().clone();
    let n = grid.n();
    let mut factors = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            let k = grid.wavenumber_mag(i, j);
            factors[i * n + j] = (-nu * k * k * dt).exp();
        }
    }
    for c in 0..f.components() {
        for (z, &e) in f.coeffs_mut(c).iter_mut().zip(&factors) {
            *z *= e;
        }
    }
}

fn integrate(problem: &LinearProblem, dt: f64, opts: StepOptions) -> Result<Trajectory> {
    problem.validate()?;
    let limit = problem.cfl_limit(opts.cfl_safety);
    if dt > limit {
        return Err(Error::Cfl {
            dt,
            limit,
            suggested: 0.9 * limit,
        });
    }
    let dt_eff = dt.min(problem.horizon / opts.min_steps as f64);
    let n_steps = (problem.horizon / dt_eff).ceil().max(1.0) as usize;
    let dt = problem.horizon / n_steps as f64;

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut fields = Vec::with_capacity(n_steps + 1);
    let mut f = problem.initial.clone();
    times.push(0.0);
    fields.push(f.clone());
    for step in 0..n_steps {
        let t0 = problem.horizon * step as f64 / n_steps as f64;
        let t1 = problem.horizon * (step + 1) as f64 / n_steps as f64;
        let v0 = problem.velocity.map(|v| velocity_physical(&v.sample(t0)));
        let v1 = problem.velocity.map(|v| velocity_physical(&v.sample(t1)));
        let g0 = problem.forcing.map(|g| g.sample(t0));
        let g1 = problem.forcing.map(|g| g.sample(t1));

        // integrating-factor Heun: E = exp(-nu |k|^2 dt),
        // f+ = E (f + dt/2 k1) + dt/2 k2 with k2 = N(t1, E (f + dt k1))
        let k1 = rhs(&f, v0.as_ref(), g0.as_ref());
        let mut pred = f.clone();
        pred.axpy(dt, &k1);
        apply_heat(&mut pred, problem.nu, dt);
        let k2 = rhs(&pred, v1.as_ref(), g1.as_ref());
        f.axpy(0.5 * dt, &k1);
        apply_heat(&mut f, problem.nu, dt);
        f.axpy(0.5 * dt, &k2);

        times.push(t1);
        fields.push(f.clone());
    }
    Trajectory::new(times, fields)
}

/// Integrate a pure transport problem (2.9-type) over its horizon.
pub fn step_transport(problem: &LinearProblem, dt: f64, opts: StepOptions) -> Result<Trajectory> {
    if problem.kind != ProblemKind::Transport {
        return Err(Error::Config("expected a transport problem".into()));
    }
    integrate(problem, dt, opts)
}

/// Integrate a transport-diffusion problem with integrating-factor diffusion.
pub fn step_transport_diffusion(
    problem: &LinearProblem,
    dt: f64,
    opts: StepOptions,
) -> Result<Trajectory> {
    if problem.kind != ProblemKind::TransportDiffusion {
        return Err(Error::Config("expected a transport-diffusion problem".into()));
    }
    integrate(problem, dt, opts)
}

/// Both sides of an a priori estimate evaluated along a trajectory.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct EstimateTrace {
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Accumulated integral of the velocity-gradient norm.
    pub v_accum: Vec<f64>,
    pub flags: Vec<bool>,
}

impl EstimateTrace {
    pub fn flag_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "t,lhs,rhs,V,flag")?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.times[i], self.lhs[i], self.rhs[i], self.v_accum[i], self.flags[i] as u8
            )?;
        }
        Ok(())
    }
}

/// Gradient of a (possibly multi-component) field, stacked over components.
pub fn full_gradient(v: &SpectralField) -> SpectralField {
    let mut parts = Vec::with_capacity(2 * v.components());
    for c in 0..v.components() {
        let vc = v.component(c);
        parts.push(vc.partial(0));
        parts.push(vc.partial(1));
    }
    SpectralField::from_components(&parts).unwrap()
}

/// The velocity-gradient norm entering V: for the solver's indices
/// (s < 1 + d/p1 with p1 = 2) this is `||grad v||` in the intersection of
/// B^1_(2,inf) and L^inf, taken as the max of the two norms. For s >= 2 the
/// high-regularity branch `||grad v||_(B^(s-1)_(2,r))` applies instead.
pub fn v_prime_norm(v: &SpectralField, index: BesovIndex, partition: &DyadicPartition) -> f64 {
    let grad = full_gradient(v);
    if index.s < 2.0 {
        let besov = besov_total(
            &grad,
            BesovIndex::new(1.0, Exponent::Finite(2.0), Exponent::Infinity).unwrap(),
            partition,
        );
        besov.max(grad.linf_norm())
    } else {
        besov_total(
            &grad,
            BesovIndex::new(index.s - 1.0, Exponent::Finite(2.0), index.r).unwrap(),
            partition,
        )
    }
}

fn hypothesis_check(index: BesovIndex) -> Result<()> {
    // d = 2, p = p1 = 2: the admissible range is s > -1 (strict since r < inf)
    let p = match index.p {
        Exponent::Finite(v) => v,
        Exponent::Infinity => f64::INFINITY,
    };
    if p != 2.0 {
        return Err(Error::Hypothesis(format!("monitors support p = 2 only, got p = {p}")));
    }
    if index.s <= -1.0 {
        return Err(Error::Hypothesis(format!(
            "index s = {} outside the admissible range s > -1",
            index.s
        )));
    }
    Ok(())
}

fn accumulate_v(times: &[f64], v_prime: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0; times.len()];
    for i in 1..times.len() {
        let dt = times[i] - times[i - 1];
        acc[i] = acc[i - 1] + 0.5 * dt * (v_prime[i - 1] + v_prime[i]);
    }
    acc
}

/// Constant-independent ingredients of the transport estimate, from which
/// the bound can be re-evaluated at any candidate constant.
#[derive(Debug, Clone)]
pub struct TransportEstimateData {
    pub times: Vec<f64>,
    /// Running tilde L^inf Besov norm of the solution.
    pub lhs: Vec<f64>,
    pub v_accum: Vec<f64>,
    pub g_norm: Vec<f64>,
    pub f0_norm: f64,
}

impl TransportEstimateData {
    /// `(||f0|| + int exp(-c V) ||g||) exp(c V)` per sample.
    pub fn rhs_at(&self, c: f64) -> Vec<f64> {
        let m = self.times.len();
        let mut rhs = Vec::with_capacity(m);
        let mut g_integral = 0.0;
        for i in 0..m {
            if i > 0 {
                let dt = self.times[i] - self.times[i - 1];
                let a = (-c * self.v_accum[i - 1]).exp() * self.g_norm[i - 1];
                let b = (-c * self.v_accum[i]).exp() * self.g_norm[i];
                g_integral += 0.5 * dt * (a + b);
            }
            rhs.push((self.f0_norm + g_integral) * (c * self.v_accum[i]).exp());
        }
        rhs
    }

    pub fn trace(&self, c: f64) -> EstimateTrace {
        let rhs = self.rhs_at(c);
        let flags = self
            .lhs
            .iter()
            .zip(&rhs)
            .map(|(&l, &r)| l > r * (1.0 + 1e-9))
            .collect();
        EstimateTrace {
            times: self.times.clone(),
            lhs: self.lhs.clone(),
            rhs,
            v_accum: self.v_accum.clone(),
            flags,
        }
    }

    fn holds_at(&self, c: f64) -> bool {
        self.lhs
            .iter()
            .zip(self.rhs_at(c))
            .all(|(&l, r)| l <= r * (1.0 + 1e-9))
    }

    /// Smallest constant making the estimate hold along this trajectory
    /// (bisection; the bound is monotone in the constant).
    pub fn min_constant(&self) -> f64 {
        min_constant_by_bisection(|c| self.holds_at(c))
    }
}

pub(crate) fn min_constant_by_bisection(holds: impl Fn(f64) -> bool) -> f64 {
    let mut hi = 1.0;
    while !holds(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Gather the transport-estimate ingredients along a trajectory.
pub fn collect_transport_estimate(
    trajectory: &Trajectory,
    problem: &LinearProblem,
    index: BesovIndex,
    partition: &DyadicPartition,
) -> Result<TransportEstimateData> {
    hypothesis_check(index)?;
    let times = trajectory.times().to_vec();
    let m = times.len();

    let v_prime: Vec<f64> = match problem.velocity {
        Some(v) => times
            .iter()
            .map(|&t| v_prime_norm(&v.sample(t), index, partition))
            .collect(),
        None => vec![0.0; m],
    };
    let v_accum = accumulate_v(&times, &v_prime);
    let g_norm: Vec<f64> = match problem.forcing {
        Some(g) => times
            .iter()
            .map(|&t| besov_total(&g.sample(t), index, partition))
            .collect(),
        None => vec![0.0; m],
    };
    let f0_norm = besov_total(trajectory.first(), index, partition);

    // running tilde L^inf norm: per-block max over the prefix, then l^r
    let n_blocks = (partition.j_max() + 2) as usize;
    let mut block_max = vec![0.0f64; n_blocks];
    let mut lhs = Vec::with_capacity(m);
    for i in 0..m {
        for (b, j) in partition.block_range().enumerate() {
            let v = (2.0f64).powi(j).powf(index.s)
                * partition.block_lp_norm(&trajectory.fields()[i], j, index.p);
            block_max[b] = block_max[b].max(v);
        }
        lhs.push(ell_r(&block_max, index.r));
    }
    Ok(TransportEstimateData {
        times,
        lhs,
        v_accum,
        g_norm,
        f0_norm,
    })
}

/// Monitor the transport estimate along a trajectory: the running tilde
/// L^inf Besov norm must stay below
/// `(||f0|| + int exp(-C V) ||g||) exp(C V)` with the calibrated constant.
pub fn monitor_transport_estimate(
    trajectory: &Trajectory,
    problem: &LinearProblem,
    index: BesovIndex,
    partition: &DyadicPartition,
    c: f64,
) -> Result<EstimateTrace> {
    Ok(collect_transport_estimate(trajectory, problem, index, partition)?.trace(c))
}

/// Constant-independent ingredients of the smoothing estimate.
#[derive(Debug, Clone)]
pub struct DiffusionEstimateData {
    pub times: Vec<f64>,
    /// `nu^(1/rho)`-weighted running tilde L^rho norm at regularity s + 2/rho.
    pub lhs: Vec<f64>,
    pub v_accum: Vec<f64>,
    /// `(1 + nu t)^(1/rho)` per sample.
    pub growth: Vec<f64>,
    /// `growth * ||f0|| + forcing term` per sample (constant-independent).
    pub base: Vec<f64>,
}

impl DiffusionEstimateData {
    /// `c * exp(c * growth * V) * base` per sample.
    pub fn rhs_at(&self, c: f64) -> Vec<f64> {
        (0..self.times.len())
            .map(|i| c * (c * self.growth[i] * self.v_accum[i]).exp() * self.base[i])
            .collect()
    }

    pub fn trace(&self, c: f64) -> EstimateTrace {
        let rhs = self.rhs_at(c);
        let flags = self
            .lhs
            .iter()
            .zip(&rhs)
            .map(|(&l, &r)| l > r * (1.0 + 1e-9))
            .collect();
        EstimateTrace {
            times: self.times.clone(),
            lhs: self.lhs.clone(),
            rhs,
            v_accum: self.v_accum.clone(),
            flags,
        }
    }

    fn holds_at(&self, c: f64) -> bool {
        self.lhs
            .iter()
            .zip(self.rhs_at(c))
            .all(|(&l, r)| l <= r * (1.0 + 1e-9))
    }

    /// Smallest constant making the estimate hold along this trajectory.
    pub fn min_constant(&self) -> f64 {
        min_constant_by_bisection(|c| self.holds_at(c))
    }
}

/// Gather the smoothing-estimate ingredients along a trajectory.
pub fn collect_transport_diffusion_estimate(
    trajectory: &Trajectory,
    problem: &LinearProblem,
    index: BesovIndex,
    rho: Exponent,
    rho1: Exponent,
    partition: &DyadicPartition,
) -> Result<DiffusionEstimateData> {
    hypothesis_check(index)?;
    if let (Exponent::Finite(r1), Exponent::Finite(r)) = (rho1, rho) {
        if r1 > r {
            return Err(Error::Hypothesis(format!("need rho1 <= rho, got {r1} > {r}")));
        }
    }
    let nu = problem.nu;
    let times = trajectory.times().to_vec();
    let m = times.len();
    let inv_rho = rho.reciprocal();
    let inv_rho1 = rho1.reciprocal();

    let v_prime: Vec<f64> = match problem.velocity {
        Some(v) => times
            .iter()
            .map(|&t| v_prime_norm(&v.sample(t), index, partition))
            .collect(),
        None => vec![0.0; m],
    };
    let v_accum = accumulate_v(&times, &v_prime);

    // lhs blocks at regularity s + 2/rho
    let s_hi = index.s + 2.0 * inv_rho;
    let n_blocks = (partition.j_max() + 2) as usize;
    let mut lhs_acc = vec![0.0f64; n_blocks]; // integral of value^rho, or running max
    let mut lhs_prev = vec![0.0f64; n_blocks]; // previous sample per block
    // forcing tilde norm at regularity s - 2 + 2/rho1
    let s_g = index.s - 2.0 + 2.0 * inv_rho1;
    let g_samples: Vec<Option<SpectralField>> = match problem.forcing {
        Some(g) => times.iter().map(|&t| Some(g.sample(t))).collect(),
        None => vec![None; m],
    };
    let mut g_acc = vec![0.0f64; n_blocks];
    let mut g_prev = vec![0.0f64; n_blocks];

    let f0_norm = besov_total(trajectory.first(), index, partition);
    let mut lhs = Vec::with_capacity(m);
    let mut growth_vec = Vec::with_capacity(m);
    let mut base = Vec::with_capacity(m);
    for i in 0..m {
        let dt = if i > 0 { times[i] - times[i - 1] } else { 0.0 };
        let mut lhs_blocks = vec![0.0f64; n_blocks];
        let mut g_blocks = vec![0.0f64; n_blocks];
        for (b, j) in partition.block_range().enumerate() {
            let w_hi = (2.0f64).powi(j).powf(s_hi);
            let val = w_hi * partition.block_lp_norm(&trajectory.fields()[i], j, index.p);
            match rho {
                Exponent::Infinity => {
                    lhs_acc[b] = lhs_acc[b].max(val);
                    lhs_blocks[b] = lhs_acc[b];
                }
                Exponent::Finite(r) => {
                    if i > 0 {
                        lhs_acc[b] += 0.5 * dt * (lhs_prev[b].powf(r) + val.powf(r));
                    }
                    lhs_prev[b] = val;
                    lhs_blocks[b] = lhs_acc[b].powf(1.0 / r);
                }
            }
            if let Some(g) = &g_samples[i] {
                let w_g = (2.0f64).powi(j).powf(s_g);
                let gval = w_g * partition.block_lp_norm(g, j, index.p);
                match rho1 {
                    Exponent::Infinity => {
                        g_acc[b] = g_acc[b].max(gval);
                        g_blocks[b] = g_acc[b];
                    }
                    Exponent::Finite(r1) => {
                        if i > 0 {
                            g_acc[b] += 0.5 * dt * (g_prev[b].powf(r1) + gval.powf(r1));
                        }
                        g_prev[b] = gval;
                        g_blocks[b] = g_acc[b].powf(1.0 / r1);
                    }
                }
            }
        }
        let t = times[i];
        let growth = (1.0 + nu * t).powf(inv_rho);
        let g_term = if problem.forcing.is_some() {
            (1.0 + nu * t).powf(1.0 + inv_rho - inv_rho1)
                * nu.powf(inv_rho1 - 1.0)
                * ell_r(&g_blocks, index.r)
        } else {
            0.0
        };
        lhs.push(nu.powf(inv_rho) * ell_r(&lhs_blocks, index.r));
        growth_vec.push(growth);
        base.push(growth * f0_norm + g_term);
    }
    Ok(DiffusionEstimateData {
        times,
        lhs,
        v_accum,
        growth: growth_vec,
        base,
    })
}

/// Monitor the transport-diffusion smoothing estimate: the running
/// `nu^(1/rho)`-weighted tilde L^rho norm at regularity `s + 2/rho` against
/// the lemma's right-hand side with the calibrated constant.
pub fn monitor_transport_diffusion_estimate(
    trajectory: &Trajectory,
    problem: &LinearProblem,
    index: BesovIndex,
    rho: Exponent,
    rho1: Exponent,
    partition: &DyadicPartition,
    c: f64,
) -> Result<EstimateTrace> {
    Ok(
        collect_transport_diffusion_estimate(trajectory, problem, index, rho, rho1, partition)?
            .trace(c),
    )
}

/// Space-time norm `(int ||f(t)||_(H^s)^2 dt)^(1/2)` by trapezoid quadrature
/// on the trajectory samples (exact Sobolev spectral weights).
pub fn sobolev_spacetime_l2(trajectory: &Trajectory, s: f64) -> f64 {
    let times = trajectory.times();
    let mut integral = 0.0;
    let mut prev = trajectory.fields()[0].sobolev_norm(s).powi(2);
    for i in 1..times.len() {
        let cur = trajectory.fields()[i].sobolev_norm(s).powi(2);
        integral += 0.5 * (times[i] - times[i - 1]) * (prev + cur);
        prev = cur;
    }
    integral.sqrt()
}

/// Closed-form `(int_0^T ||e^(nu t Lap) f0||_(H^(s+1))^2 dt)^(1/2)` for the
/// pure heat flow, summed mode by mode.
pub fn heat_smoothing_oracle(f0: &SpectralField, nu: f64, t_final: f64, s: f64) -> f64 {
    let grid = f0.grid();
    let n = grid.n();
    let vol = grid.box_length() * grid.box_length();
    let mut sum = 0.0;
    for c in 0..f0.components() {
        for i in 0..n {
            for j in 0..n {
                let k = grid.wavenumber_mag(i, j);
                let a = f0.coeffs(c)[i * n + j].norm_sqr();
                if a == 0.0 {
                    continue;
                }
                let weight = (1.0 + k * k).powf(s + 1.0);
                let time_factor = if k == 0.0 {
                    t_final
                } else {
                    let lam = 2.0 * nu * k * k;
                    (1.0 - (-lam * t_final).exp()) / lam
                };
                sum += weight * a * time_factor;
            }
        }
    }
    (vol * sum).sqrt()
}
