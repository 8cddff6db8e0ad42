//! Direct semi-implicit integrator for the transformed shallow water system
//!
//! Steps the full nonlinear system without any outer iteration: the viscous
//! term is treated implicitly per Fourier mode (trapezoidal rule), all
//! nonlinear terms explicitly with a predictor-corrector pass. This is an
//! independent reference for the successive-approximation solver; it shares
//! only the spectral primitives, not the iteration machinery.

use crate::error::{Error, Result};
use crate::linear::Trajectory;
use crate::spectral::SpectralField;

/// Explicit part of the velocity equation:
/// `-(u . grad) u + nu grad(ln(1+h)) . grad u - grad h`.
fn velocity_rhs(u: &SpectralField, h: &SpectralField, nu: f64) -> Result<SpectralField> {
    let sup = h.linf_norm();
    if sup > 0.5 {
        return Err(Error::SmallnessLost(format!(
            "sup norm of h is {sup:.6e} > 1/2 during direct integration"
        )));
    }
    let phys = h.to_physical();
    let log_vals: Vec<f64> = phys[0].iter().map(|&x| (1.0 + x).ln()).collect();
    let log_h = SpectralField::from_physical(h.grid(), &[log_vals])?.dealiased();
    let glog = log_h.gradient()?;
    let gh = h.gradient()?;
    let mut parts = Vec::with_capacity(2);
    for c in 0..2 {
        let grad_c = u.component(c).gradient()?;
        let mut part = u.dot_product(&grad_c)?.scale(-1.0);
        part.axpy(nu, &glog.dot_product(&grad_c)?);
        part.axpy(-1.0, &gh.component(c));
        parts.push(part);
    }
    SpectralField::from_components(&parts)
}

/// Explicit part of the height equation: `-(u . grad) h - div u - h div u`.
fn height_rhs(u: &SpectralField, h: &SpectralField) -> Result<SpectralField> {
    let div = u.divergence()?;
    let mut out = u.dot_product(&h.gradient()?)?.scale(-1.0);
    out.axpy(-1.0, &div);
    out.axpy(-1.0, &h.pointwise_product(&div)?);
    Ok(out)
}

/// Divide each velocity mode by `1 + factor * nu |k|^2` (implicit diffusion).
fn implicit_diffusion(u: &SpectralField, nu: f64, factor: f64) -> SpectralField {
    u.apply_multiplier(|kx, ky| 1.0 / (1.0 + factor * nu * (kx * kx + ky * ky)))
}

/// Integrate the nonlinear system over [0, horizon] with `steps` uniform
/// steps. Diffusion is trapezoidal-implicit, the nonlinear terms use an
/// explicit predictor-corrector; the returned trajectories carry every step.
pub fn integrate_direct(
    u0: &SpectralField,
    h0: &SpectralField,
    nu: f64,
    horizon: f64,
    steps: usize,
) -> Result<(Trajectory, Trajectory)> {
    if u0.components() != 2 {
        return Err(Error::Dimension { expected: 2, got: u0.components() });
    }
    if h0.components() != 1 {
        return Err(Error::Dimension { expected: 1, got: h0.components() });
    }
    u0.same_grid(h0)?;
    if !(horizon > 0.0) {
        return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
    }
    if steps == 0 {
        return Err(Error::Config("steps must be positive".into()));
    }
    if !(nu > 0.0) {
        return Err(Error::Config(format!("direct integrator needs nu > 0, got {nu}")));
    }
    let dt = horizon / steps as f64;
    let mut u = u0.clone().dealiased();
    let mut h = h0.clone().dealiased();
    let mut times = vec![0.0];
    let mut u_fields = vec![u.clone()];
    let mut h_fields = vec![h.clone()];
    for step in 0..steps {
        let fu = velocity_rhs(&u, &h, nu)?;
        let fh = height_rhs(&u, &h)?;
        // predictor: backward-Euler diffusion, explicit nonlinearity
        let mut u_pred = u.clone();
        u_pred.axpy(dt, &fu);
        let u_pred = implicit_diffusion(&u_pred, nu, dt);
        let mut h_pred = h.clone();
        h_pred.axpy(dt, &fh);
        // corrector: trapezoidal in both the explicit terms and diffusion
        let fu_pred = velocity_rhs(&u_pred, &h_pred, nu)?;
        let fh_pred = height_rhs(&u_pred, &h_pred)?;
        let mut u_next = u.clone();
        u_next.axpy(0.5 * dt, &fu);
        u_next.axpy(0.5 * dt, &fu_pred);
        u_next.axpy(0.5 * dt * nu, &u.laplacian());
        let u_next = implicit_diffusion(&u_next, nu, 0.5 * dt);
        let mut h_next = h.clone();
        h_next.axpy(0.5 * dt, &fh);
        h_next.axpy(0.5 * dt, &fh_pred);
        u = u_next;
        h = h_next;
        times.push(horizon * (step + 1) as f64 / steps as f64);
        u_fields.push(u.clone());
        h_fields.push(h.clone());
    }
    Ok((
        Trajectory::new(times.clone(), u_fields)?,
        Trajectory::new(times, h_fields)?,
    ))
}
