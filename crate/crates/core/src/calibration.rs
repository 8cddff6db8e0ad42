//! One-time measurement of the inequality constants that every downstream
//! threshold consumes.
//!
//! The calibration phase runs the whole verifier suite plus the two linear
//! estimate monitors over a seeded corpus, records every measured constant,
//! and freezes the working constant as 1.1 times the largest of them. The
//! artifact serializes to JSON together with its SHA-256 hash; later runs
//! reference the artifact by hash and fail fast when it is missing or stale.

use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::bony::{self, Band, InequalityCertificate};
use crate::data;
use crate::error::{Error, Result};
use crate::linear::{
    collect_transport_diffusion_estimate, collect_transport_estimate, step_transport,
    step_transport_diffusion, LinearProblem, ProblemKind, StepOptions, Trajectory,
};
use crate::littlewood_paley::{besov_total, BesovIndex, DyadicPartition};
use crate::spectral::{Exponent, Grid};

/// Frozen calibration artifact.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Calibration {
    pub seed: u64,
    pub trials: usize,
    pub monitor_runs: usize,
    pub grid_n: usize,
    pub box_length: f64,
    pub s: f64,
    pub certificates: Vec<InequalityCertificate>,
    /// Smallest constant validating the transport estimate over the corpus.
    pub transport_constant: f64,
    /// Smallest constant validating the smoothing estimate over the corpus.
    pub diffusion_constant: f64,
    /// Range of (block-norm Besov) / (spectral Sobolev) over the corpus.
    pub sobolev_ratio_lo: f64,
    pub sobolev_ratio_hi: f64,
    /// 1.1 x the largest measured constant, never below 1.
    pub c0: f64,
}

/// Number of corpus trials used by the default calibration.
pub const DEFAULT_TRIALS: usize = 200;
/// Number of seeded linear problems audited by each estimate monitor.
pub const DEFAULT_MONITOR_RUNS: usize = 100;

fn monitor_transport_constant(
    grid: &Arc<Grid>,
    partition: &DyadicPartition,
    s: f64,
    runs: usize,
    seed: u64,
) -> Result<f64> {
    let index = BesovIndex::sobolev(s);
    let horizon = 0.3;
    let mut worst = 0.0f64;
    for run in 0..runs {
        let base = seed.wrapping_add(0x1000).wrapping_add(run as u64 * 7);
        let f0 = data::corpus_scalar(grid, base, run as u64, s).dealiased();
        let raw_v = data::random_vector(grid, base.wrapping_add(1), 2, 6, s + 1.0);
        let vmax = raw_v.linf_norm();
        if vmax == 0.0 || f0.l2_norm() == 0.0 {
            continue;
        }
        let v = Trajectory::constant(raw_v.scale(0.2 / vmax).dealiased());
        let g_field = data::random_scalar(grid, base.wrapping_add(2), 6, s + 1.0)
            .dealiased()
            .scale(0.5);
        let forcing = Trajectory::constant(g_field);
        let problem = LinearProblem {
            kind: ProblemKind::Transport,
            velocity: Some(&v),
            forcing: if run % 2 == 1 { Some(&forcing) } else { None },
            initial: f0,
            nu: 0.0,
            horizon,
        };
        let traj = step_transport(&problem, horizon / 64.0, StepOptions::default())?;
        let c = collect_transport_estimate(&traj, &problem, index, partition)?.min_constant();
        worst = worst.max(c);
    }
    Ok(worst)
}

fn monitor_diffusion_constant(
    grid: &Arc<Grid>,
    partition: &DyadicPartition,
    s: f64,
    runs: usize,
    seed: u64,
) -> Result<f64> {
    let index = BesovIndex::sobolev(s);
    let horizon = 0.3;
    let nus = [0.1, 0.25, 0.5, 0.75, 0.9];
    let combos = [
        (Exponent::Infinity, Exponent::Finite(1.0)),
        (Exponent::Finite(2.0), Exponent::Finite(1.0)),
        (Exponent::Finite(2.0), Exponent::Finite(2.0)),
    ];
    let mut worst = 0.0f64;
    for run in 0..runs {
        let base = seed.wrapping_add(0x2000).wrapping_add(run as u64 * 11);
        let f0 = data::corpus_scalar(grid, base, run as u64, s).dealiased();
        let raw_v = data::random_vector(grid, base.wrapping_add(1), 2, 6, s + 1.0);
        let vmax = raw_v.linf_norm();
        if vmax == 0.0 || f0.l2_norm() == 0.0 {
            continue;
        }
        let v = Trajectory::constant(raw_v.scale(0.2 / vmax).dealiased());
        let g_field = data::random_scalar(grid, base.wrapping_add(2), 6, s + 1.0)
            .dealiased()
            .scale(0.5);
        let forcing = Trajectory::constant(g_field);
        let problem = LinearProblem {
            kind: ProblemKind::TransportDiffusion,
            velocity: Some(&v),
            forcing: if run % 2 == 1 { Some(&forcing) } else { None },
            initial: f0,
            nu: nus[run % nus.len()],
            horizon,
        };
        let traj = step_transport_diffusion(&problem, horizon / 64.0, StepOptions::default())?;
        let (rho, rho1) = combos[run % combos.len()];
        let c = collect_transport_diffusion_estimate(&traj, &problem, index, rho, rho1, partition)?
            .min_constant();
        worst = worst.max(c);
    }
    Ok(worst)
}

/// Run the full calibration suite and freeze the working constant.
pub fn calibrate(
    grid_n: usize,
    box_length: f64,
    s: f64,
    trials: usize,
    monitor_runs: usize,
    seed: u64,
) -> Result<Calibration> {
    let grid = Grid::new(grid_n, box_length)?;
    let partition = DyadicPartition::build_default(&grid)?;
    let unit = grid.wavenumber_unit();

    let unbounded = f64::INFINITY;
    let mut certificates = Vec::new();
    let two = Exponent::Finite(2.0);
    let inf = Exponent::Infinity;
    certificates.push(bony::verify_bernstein(
        &partition, trials, Band::Annulus(4.0 * unit), 1, two, two, seed, unbounded,
    )?);
    certificates.push(bony::verify_bernstein(
        &partition, trials, Band::Annulus(4.0 * unit), 1, two, inf, seed, unbounded,
    )?);
    certificates.push(bony::verify_bernstein(
        &partition, trials, Band::Ball(8.0 * unit), 1, two, two, seed, unbounded,
    )?);
    certificates.push(bony::verify_bernstein(
        &partition, trials, Band::Ball(8.0 * unit), 0, two, inf, seed, unbounded,
    )?);
    certificates.extend(bony::verify_product_laws(&partition, trials, s, seed, unbounded)?);
    certificates.extend(bony::verify_embedding_interpolation(
        &partition, trials, s, seed, unbounded,
    )?);
    certificates.push(bony::verify_composition(&partition, trials, s, seed, unbounded)?);
    certificates.extend(bony::verify_minkowski(&partition, trials.min(50), s, seed)?);

    // Sobolev-equivalence ratio over the corpus
    let idx = BesovIndex::sobolev(s);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for t in 0..trials {
        let u = data::corpus_scalar(&grid, seed.wrapping_add(0x3000), t as u64, s).dealiased();
        let h = u.sobolev_norm(s);
        if h < 1e-300 {
            continue;
        }
        let ratio = besov_total(&u, idx, &partition) / h;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }

    let transport_constant =
        monitor_transport_constant(&grid, &partition, s, monitor_runs, seed)?;
    let diffusion_constant =
        monitor_diffusion_constant(&grid, &partition, s, monitor_runs, seed)?;

    let mut max_measured: f64 = 1.0;
    for cert in &certificates {
        if !cert.measured_constant.is_finite() {
            return Err(Error::Calibration(format!(
                "{} produced a non-finite constant",
                cert.lemma_id
            )));
        }
        max_measured = max_measured.max(cert.measured_constant);
    }
    if !transport_constant.is_finite() || !diffusion_constant.is_finite() {
        return Err(Error::Calibration("estimate monitor constant diverged".into()));
    }
    max_measured = max_measured
        .max(transport_constant)
        .max(diffusion_constant)
        .max(hi)
        .max(if lo > 0.0 { 1.0 / lo } else { 1.0 });
    let c0 = 1.1 * max_measured;
    // stamp the frozen constant into the open-bound certificates; the
    // unit-constant inequalities (interpolation, Minkowski) keep their own
    // tight bound
    for cert in &mut certificates {
        if cert.calibrated_bound.is_infinite() {
            cert.calibrated_bound = c0;
            cert.pass = cert.measured_constant <= c0;
        }
    }

    Ok(Calibration {
        seed,
        trials,
        monitor_runs,
        grid_n,
        box_length,
        s,
        certificates,
        transport_constant,
        diffusion_constant,
        sobolev_ratio_lo: lo,
        sobolev_ratio_hi: hi,
        c0,
    })
}

/// Calibration at the default corpus size.
pub fn calibrate_default(seed: u64) -> Result<Calibration> {
    calibrate(
        64,
        2.0 * std::f64::consts::PI,
        1.5,
        DEFAULT_TRIALS,
        DEFAULT_MONITOR_RUNS,
        seed,
    )
}

#[derive(serde::Serialize, serde::Deserialize)]
struct StoredCalibration {
    calibration: Calibration,
    sha256: String,
}

impl Calibration {
    /// SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("calibration serializes");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        hex::encode(hasher.finalize())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let stored = StoredCalibration {
            calibration: self.clone(),
            sha256: self.hash(),
        };
        let json = serde_json::to_string_pretty(&stored).map_err(|e| Error::Serde(e.to_string()))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    /// Load and verify an artifact; a missing file or hash mismatch is a
    /// calibration error (runs must fail fast rather than use stale constants).
    pub fn load(path: &Path) -> Result<Calibration> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Calibration(format!("cannot read calibration artifact {path:?}: {e}"))
        })?;
        let stored: StoredCalibration =
            serde_json::from_str(&text).map_err(|e| Error::Serde(e.to_string()))?;
        let recomputed = stored.calibration.hash();
        if recomputed != stored.sha256 {
            return Err(Error::Calibration(format!(
                "calibration hash mismatch: stored {}, recomputed {}",
                stored.sha256, recomputed
            )));
        }
        Ok(stored.calibration)
    }

    /// Load an artifact and additionally require a specific hash.
    pub fn load_with_hash(path: &Path, expected: &str) -> Result<Calibration> {
        let cal = Self::load(path)?;
        let actual = cal.hash();
        if actual != expected {
            return Err(Error::Calibration(format!(
                "calibration hash {actual} does not match required {expected}"
            )));
        }
        Ok(cal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_calibration(seed: u64) -> Calibration {
        calibrate(32, 2.0 * std::f64::consts::PI, 1.5, 12, 6, seed).unwrap()
    }

    #[test]
    fn calibration_constant_at_least_one() {
        let cal = small_calibration(42);
        assert!(cal.c0 >= 1.0);
        assert!(cal.transport_constant.is_finite());
        assert!(cal.diffusion_constant.is_finite());
        assert!(cal.sobolev_ratio_lo > 0.0 && cal.sobolev_ratio_lo <= cal.sobolev_ratio_hi);
    }

    #[test]
    fn calibration_reproducible_bitwise() {
        let a = small_calibration(7);
        let b = small_calibration(7);
        assert_eq!(a.hash(), b.hash());
        for (x, y) in a.certificates.iter().zip(&b.certificates) {
            assert_eq!(x.measured_constant.to_bits(), y.measured_constant.to_bits());
        }
    }

    #[test]
    fn save_load_roundtrip_and_tamper_detection() {
        let cal = small_calibration(3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("calibration.json");
        cal.save(&path).unwrap();
        let loaded = Calibration::load(&path).unwrap();
        assert_eq!(loaded.hash(), cal.hash());
        assert!(Calibration::load_with_hash(&path, &cal.hash()).is_ok());
        assert!(Calibration::load_with_hash(&path, "deadbeef").is_err());
        // tampering with the stored constants must be detected
        let text = std::fs::read_to_string(&path).unwrap();
        let tampered = text.replacen("\"c0\":", "\"c0_x\":", 1).replacen("\"seed\":", "\"c0\": 1e9, \"seed\":", 1);
        std::fs::write(&path, tampered).unwrap();
        assert!(Calibration::load(&path).is_err());
        assert!(matches!(
            Calibration::load(&dir.path().join("missing.json")),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn certificates_all_pass_against_frozen_bound() {
        let cal = small_calibration(11);
        // re-running the suite with the frozen bound must pass everywhere
        let grid = Grid::new(cal.grid_n, cal.box_length).unwrap();
        let partition = DyadicPartition::build_default(&grid).unwrap();
        let certs = bony::verify_product_laws(&partition, cal.trials, cal.s, cal.seed, cal.c0).unwrap();
        for c in certs {
            assert!(c.pass, "{} measured {} > bound {}", c.lemma_id, c.measured_constant, c.calibrated_bound);
        }
    }
}
