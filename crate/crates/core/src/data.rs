//! Seeded initial-data families and the random-field corpus used for
//! calibration and verification trials.
//!
//! Every generator is deterministic in (grid, seed, parameters): the same
//! inputs reproduce bitwise identical fields.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Named initial-data family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataFamily {
    GaussianSpectrum,
    SingleMode,
    TaylorGreen,
    RandomDivfree,
}

impl std::str::FromStr for DataFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian-spectrum" => Ok(DataFamily::GaussianSpectrum),
            "single-mode" => Ok(DataFamily::SingleMode),
            "taylor-green" | "taylor-green-like" => Ok(DataFamily::TaylorGreen),
            "random-divfree" => Ok(DataFamily::RandomDivfree),
            other => Err(Error::Config(format!("unknown data family '{other}'"))),
        }
    }
}

/// Specification of one generated initial-data pair.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DataSpec {
    pub family: DataFamily,
    /// Target H^s norm of u0 (0 gives the zero field).
    pub amplitude_u: f64,
    /// Target H^s norm of h0 (0 gives the zero field).
    pub amplitude_h: f64,
    pub seed: u64,
    /// Largest integer frequency populated.
    #[serde(default = "default_max_mode")]
    pub max_mode: i64,
}

fn default_max_mode() -> i64 {
    8
}

/// Fill one scalar component with Hermitian-symmetric Gaussian coefficients
/// decaying like `(1 + |m|)^(-gamma)`.
fn fill_power_law(f: &mut SpectralField, comp: usize, rng: &mut ChaCha8Rng, max_mode: i64, gamma: f64) {
    let lim = max_mode.min(f.grid().dealias_mode_limit());
    for mx in -lim..=lim {
        for my in -lim..=lim {
            // half-plane; the conjugate pair is set together
            if mx < 0 || (mx == 0 && my <= 0) {
                continue;
            }
            let mag = ((mx * mx + my * my) as f64).sqrt();
            let w = (1.0 + mag).powf(-gamma);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let a = Complex64::new(re * w, im * w);
            f.set_coeff(comp, mx, my, a);
            f.set_coeff(comp, -mx, -my, a.conj());
        }
    }
}

/// Random real band-limited scalar field with power-law spectrum.
pub fn random_scalar(grid: &Arc<Grid>, seed: u64, max_mode: i64, gamma: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, 1);
    fill_power_law(&mut f, 0, &mut rng, max_mode, gamma);
    f
}

/// Random real band-limited field with `components` components.
pub fn random_vector(grid: &Arc<Grid>, seed: u64, components: usize, max_mode: i64, gamma: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, components);
    for c in 0..components {
        fill_power_law(&mut f, c, &mut rng, max_mode, gamma);
    }
    f
}

/// Flat-spectrum (plateau) scalar field with random phases, the rough edge
/// case of the corpus.
pub fn plateau_scalar(grid: &Arc<Grid>, seed: u64, max_mode: i64) -> SpectralField {
    random_scalar(grid, seed, max_mode, 0.0)
}

/// One field of the verification corpus: mostly power-law spectra with the
/// decay exponent drawn from `[s + 1, s + 3]`, interleaved with plateau
/// spectra and pure modes as rough-edge cases.
pub fn corpus_scalar(grid: &Arc<Grid>, seed: u64, trial: u64, s: f64) -> SpectralField {
    let trial_seed = seed
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(trial.wrapping_mul(0xd1342543de82ef95).wrapping_add(1));
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let max_mode = grid.dealias_mode_limit().min(20);
    match trial % 8 {
        0 => {
            let mx = rng.gen_range(1..=max_mode);
            let my = rng.gen_range(-max_mode..=max_mode);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            pure_mode(grid, mx, my, phase)
        }
        1 => {
            let mut f = SpectralField::zeros(grid, 1);
            fill_power_law(&mut f, 0, &mut rng, max_mode, 0.0);
            f
        }
        _ => {
            let gamma = rng.gen_range(s + 1.0..s + 3.0);
            let mut f = SpectralField::zeros(grid, 1);
            fill_power_law(&mut f, 0, &mut rng, max_mode, gamma);
            f
        }
    }
}

/// Real cosine mode `cos(m . x * 2pi/L + phase)`, unit L2 norm over the box.
pub fn pure_mode(grid: &Arc<Grid>, mx: i64, my: i64, phase: f64) -> SpectralField {
    let mut f = SpectralField::zeros(grid, 1);
    let vol = grid.box_length() * grid.box_length();
    // cos has two coefficients of magnitude 1/2; unit L2 needs amp^2*vol/2 = 1
    let amp = (2.0 / vol).sqrt();
    let a = Complex64::from_polar(amp * 0.5, phase);
    f.set_coeff(0, mx, my, a);
    f.set_coeff(0, -mx, -my, a.conj());
    f
}

/// Random band-limited field whose spectrum lives in the annulus
/// `lambda * [3/4, 8/3]` (Euclidean), for Bernstein trials.
pub fn annulus_scalar(grid: &Arc<Grid>, seed: u64, lambda: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, 1);
    let unit = grid.wavenumber_unit();
    let lim = grid.dealias_mode_limit();
    for mx in -lim..=lim {
        for my in -lim..=lim {
            if mx < 0 || (mx == 0 && my <= 0) {
                continue;
            }
            let k = ((mx * mx + my * my) as f64).sqrt() * unit;
            if k < 0.75 * lambda || k > 8.0 / 3.0 * lambda {
                continue;
            }
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let a = Complex64::new(re, im);
            f.set_coeff(0, mx, my, a);
            f.set_coeff(0, -mx, -my, a.conj());
        }
    }
    f
}

/// Random band-limited field supported in the ball of radius `lambda`.
pub fn ball_scalar(grid: &Arc<Grid>, seed: u64, lambda: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, 1);
    let unit = grid.wavenumber_unit();
    let lim = grid.dealias_mode_limit();
    for mx in -lim..=lim {
        for my in -lim..=lim {
            if mx < 0 || (mx == 0 && my <= 0) {
                continue;
            }
            let k = ((mx * mx + my * my) as f64).sqrt() * unit;
            if k > lambda {
                continue;
            }
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let a = Complex64::new(re, im);
            f.set_coeff(0, mx, my, a);
            f.set_coeff(0, -mx, -my, a.conj());
        }
    }
    f
}

/// Project a 2-component field onto its divergence-free part (Leray).
pub fn project_divfree(v: &SpectralField) -> SpectralField {
    let grid = v.grid().clone();
    let n = grid.n();
    let unit = grid.wavenumber_unit();
    let mut out = SpectralField::zeros(&grid, 2);
    for i in 0..n {
        let kx = grid.mode(i) as f64 * unit;
        for j in 0..n {
            let ky = grid.mode(j) as f64 * unit;
            let k2 = kx * kx + ky * ky;
            let a = v.coeffs(0)[i * n + j];
            let b = v.coeffs(1)[i * n + j];
            let (pa, pb) = if k2 == 0.0 {
                (a, b)
            } else {
                let dot = (a * kx + b * ky) / k2;
                (a - dot * kx, b - dot * ky)
            };
            out.coeffs_mut(0)[i * n + j] = pa;
            out.coeffs_mut(1)[i * n + j] = pb;
        }
    }
    out
}

/// Rescale so the exact spectral H^s norm equals `target` (zero target or
/// zero field gives the zero field).
pub fn scale_to_sobolev(f: &SpectralField, s: f64, target: f64) -> SpectralField {
    let current = f.sobolev_norm(s);
    if target == 0.0 || current == 0.0 {
        return SpectralField::zeros(f.grid(), f.components());
    }
    f.scale(target / current)
}

/// Generate the initial-data pair `(u0, h0)` for a spec, scaled to the
/// requested H^s norms.
pub fn generate_initial_data(grid: &Arc<Grid>, spec: &DataSpec, s: f64) -> Result<(SpectralField, SpectralField)> {
    let max_mode = spec.max_mode.min(grid.dealias_mode_limit());
    if max_mode < 1 {
        return Err(Error::Resolution("max_mode below 1 after dealias clamp".into()));
    }
    let gamma = s + 2.0;
    let u_raw = match spec.family {
        DataFamily::GaussianSpectrum => random_vector(grid, spec.seed, 2, max_mode, gamma),
        DataFamily::SingleMode => {
            let m = pure_mode(grid, 1.min(max_mode), 0, 0.0);
            SpectralField::from_components(&[m.clone(), m.scale(0.5)])?
        }
        DataFamily::TaylorGreen => taylor_green(grid, 1.min(max_mode)),
        DataFamily::RandomDivfree => {
            project_divfree(&random_vector(grid, spec.seed, 2, max_mode, gamma))
        }
    };
    let h_raw = match spec.family {
        DataFamily::SingleMode => pure_mode(grid, 1.min(max_mode), 1.min(max_mode), 0.3),
        _ => random_scalar(grid, spec.seed.wrapping_add(0x9e3779b97f4a7c15), max_mode, gamma),
    };
    let u0 = scale_to_sobolev(&u_raw, s, spec.amplitude_u);
    let h0 = scale_to_sobolev(&h_raw, s, spec.amplitude_h);
    Ok((u0, h0))
}

/// Taylor-Green-like divergence-free vortex at mode `q`.
pub fn taylor_green(grid: &Arc<Grid>, q: i64) -> SpectralField {
    let n = grid.n();
    let dx = grid.spacing();
    let unit = grid.wavenumber_unit();
    let kq = q as f64 * unit;
    let mut ux = vec![0.0; n * n];
    let mut uy = vec![0.0; n * n];
    for i in 0..n {
        let x = i as f64 * dx;
        for j in 0..n {
            let y = j as f64 * dx;
            ux[i * n + j] = (kq * x).sin() * (kq * y).cos();
            uy[i * n + j] = -(kq * x).cos() * (kq * y).sin();
        }
    }
    SpectralField::from_physical(grid, &[ux, uy]).unwrap()
}
