//! End-to-end acceptance suite: one verdict line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::sync::Arc;
use std::time::{Duration, Instant};

use swlp::bony::{paraproduct, remainder};
use swlp::calibration::{calibrate, Calibration};
use swlp::data::{self, DataFamily, DataSpec};
use swlp::direct::integrate_direct;
use swlp::error::Error;
use swlp::linear::{
    monitor_transport_diffusion_estimate, monitor_transport_estimate, sobolev_spacetime_l2,
    step_transport, step_transport_diffusion, heat_smoothing_oracle, LinearProblem, ProblemKind,
    StepOptions, Trajectory,
};
use swlp::littlewood_paley::{chemin_lerner_norm, BesovIndex, DyadicPartition};
use swlp::picard::{global_run, uniqueness_experiment, PicardRun, SolverConfig};
use swlp::spectral::{Exponent, Grid, SpectralField};

const TAU: f64 = std::f64::consts::TAU;
const SEED: u64 = 2024;

type Verdict = Result<String, String>;

fn err<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn partition_for(n: usize) -> (Arc<Grid>, DyadicPartition) {
    let g = Grid::new(n, TAU).unwrap();
    let p = DyadicPartition::build_default(&g).unwrap();
    (g, p)
}

// ---------------------------------------------------------------- criterion 1

fn partition_exactness() -> Verdict {
    let start = Instant::now();
    let g = Grid::new(256, TAU).map_err(err)?;
    let p = DyadicPartition::build_default(&g).map_err(err)?;
    if p.j_max() < 5 {
        return Err(format!("j_max {} < 5", p.j_max()));
    }
    let dev = p.partition_sum_max_deviation();
    if dev >= 1e-10 {
        return Err(format!("partition sum deviates by {dev:.3e}"));
    }
    let (lo, hi) = p.quadratic_sum_range();
    if lo < 0.5 - 1e-12 || hi > 1.0 + 1e-12 {
        return Err(format!("quadratic sum range [{lo}, {hi}] leaves [1/2, 1]"));
    }
    let overlap = p.support_overlap();
    if overlap != 0.0 {
        return Err(format!("blocks at distance >= 2 overlap by {overlap:.3e}"));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(5) {
        return Err(format!("took {elapsed:.2?} (budget 5 s)"));
    }
    Ok(format!(
        "j_max {}, sum deviation {dev:.2e}, quadratic range [{lo:.3}, {hi:.3}], {elapsed:.2?}",
        p.j_max()
    ))
}

// ---------------------------------------------------------------- criterion 2

fn bony_identity() -> Verdict {
    let start = Instant::now();
    let (g, p) = partition_for(64);
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let u = data::random_scalar(&g, SEED.wrapping_add(trial * 2), 12, 1.0 + (trial % 5) as f64 * 0.5)
            .dealiased();
        let v = data::random_scalar(&g, SEED.wrapping_add(trial * 2 + 1), 12, 1.5).dealiased();
        let product = u.pointwise_product(&v).map_err(err)?;
        let mut recon = paraproduct(&u, &v, &p).map_err(err)?;
        recon.axpy(1.0, &paraproduct(&v, &u, &p).map_err(err)?);
        recon.axpy(1.0, &remainder(&u, &v, &p).map_err(err)?);
        let denom = product.l2_norm();
        if denom == 0.0 {
            continue;
        }
        worst = worst.max((&recon - &product).l2_norm() / denom);
    }
    if worst >= 1e-10 {
        return Err(format!("worst relative defect {worst:.3e}"));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(30) {
        return Err(format!("took {elapsed:.2?} (budget 30 s)"));
    }
    Ok(format!("100 pairs, worst relative defect {worst:.2e}, {elapsed:.2?}"))
}

// ---------------------------------------------------------------- criterion 3

fn lemma_suite(cal: &Calibration) -> Verdict {
    for cert in &cal.certificates {
        if !cert.pass {
            return Err(format!(
                "certificate {} failed: measured {} > bound {}",
                cert.lemma_id, cert.measured_constant, cert.calibrated_bound
            ));
        }
    }
    // reruns under the same seed must reproduce every constant bitwise
    let replay = calibrate(cal.grid_n, cal.box_length, cal.s, cal.trials, cal.monitor_runs, cal.seed)
        .map_err(err)?;
    if replay.certificates.len() != cal.certificates.len() {
        return Err("replay changed the certificate corpus size".into());
    }
    for (a, b) in cal.certificates.iter().zip(&replay.certificates) {
        if a.lemma_id != b.lemma_id
            || a.measured_constant.to_bits() != b.measured_constant.to_bits()
        {
            return Err(format!(
                "certificate {} did not reproduce bitwise ({} vs {})",
                a.lemma_id, a.measured_constant, b.measured_constant
            ));
        }
    }
    if replay.c0.to_bits() != cal.c0.to_bits() {
        return Err("frozen constant did not reproduce bitwise".into());
    }
    Ok(format!(
        "{} certificates pass on the {}-trial corpus, bitwise reproducible, c0 = {:.4}",
        cal.certificates.len(),
        cal.trials,
        cal.c0
    ))
}

// ---------------------------------------------------------------- criterion 4

fn linear_oracles() -> Verdict {
    // exact heat decay of a pure mode under the integrating factor
    let g = Grid::new(16, TAU).map_err(err)?;
    let f0 = data::pure_mode(&g, 2, 1, 0.4);
    let nu = 0.3;
    let t_final = 0.8;
    let problem = LinearProblem {
        kind: ProblemKind::TransportDiffusion,
        velocity: None,
        forcing: None,
        initial: f0.clone(),
        nu,
        horizon: t_final,
    };
    let traj = step_transport_diffusion(&problem, 0.1, StepOptions::default()).map_err(err)?;
    let expected = (-nu * 5.0 * t_final).exp() * f0.l2_norm();
    let heat_rel = ((traj.last().l2_norm() - expected) / expected).abs();
    if heat_rel >= 1e-10 {
        return Err(format!("heat decay off by {heat_rel:.3e}"));
    }

    // constant advection: one full box crossing returns the phase
    let f0 = data::pure_mode(&g, 1, 0, 0.0);
    let vfield =
        SpectralField::from_physical(&g, &[vec![1.0; g.num_points()], vec![0.0; g.num_points()]])
            .map_err(err)?;
    let v = Trajectory::constant(vfield);
    let problem = LinearProblem {
        kind: ProblemKind::Transport,
        velocity: Some(&v),
        forcing: None,
        initial: f0.clone(),
        nu: 0.0,
        horizon: TAU,
    };
    let traj = step_transport(&problem, 6.0e-5, StepOptions::default()).map_err(err)?;
    let out = traj.last().coeff_at(0, 1, 0);
    let phase_err = (out / f0.coeff_at(0, 1, 0)).arg().abs();
    if phase_err >= 1e-8 {
        return Err(format!("phase error {phase_err:.3e} after one crossing"));
    }

    // manufactured solution: halving dt must quarter the error
    let e1 = mms_error(64).map_err(err)?;
    let e2 = mms_error(128).map_err(err)?;
    let e3 = mms_error(256).map_err(err)?;
    let (r1, r2) = (e1 / e2, e2 / e3);
    if !(3.5..4.5).contains(&r1) || !(3.5..4.5).contains(&r2) {
        return Err(format!("convergence ratios {r1:.2}, {r2:.2} leave [3.5, 4.5]"));
    }
    Ok(format!(
        "heat {heat_rel:.1e}, phase {phase_err:.1e}, dt-halving ratios {r1:.2} and {r2:.2}"
    ))
}

/// Error against the manufactured solution f* = sin(x1 - t) cos(x2) with
/// v = (1, 0), nu = 0.2 and forcing g = 2 nu f*.
fn mms_error(n_steps: usize) -> Result<f64, Error> {
    let g = Grid::new(16, TAU)?;
    let nu = 0.2;
    let t_final = 1.0;
    let npts = g.num_points();
    let n = g.n();
    let field_at = |t: f64| {
        let mut vals = vec![0.0; npts];
        for i in 0..n {
            for j in 0..n {
                let x = TAU * i as f64 / n as f64;
                let y = TAU * j as f64 / n as f64;
                vals[i * n + j] = (x - t).sin() * y.cos();
            }
        }
        SpectralField::from_physical(&g, &[vals]).unwrap()
    };
    let times: Vec<f64> = (0..=n_steps).map(|i| t_final * i as f64 / n_steps as f64).collect();
    let forcing_fields: Vec<SpectralField> =
        times.iter().map(|&t| field_at(t).scale(2.0 * nu)).collect();
    let forcing = Trajectory::new(times, forcing_fields)?;
    let vfield = SpectralField::from_physical(&g, &[vec![1.0; npts], vec![0.0; npts]])?;
    let v = Trajectory::constant(vfield);
    let problem = LinearProblem {
        kind: ProblemKind::TransportDiffusion,
        velocity: Some(&v),
        forcing: Some(&forcing),
        initial: field_at(0.0),
        nu,
        horizon: t_final,
    };
    let opts = StepOptions { cfl_safety: 0.5, min_steps: n_steps };
    let traj = step_transport_diffusion(&problem, t_final / n_steps as f64, opts)?;
    Ok((traj.last() - &field_at(t_final)).l2_norm())
}

// ---------------------------------------------------------------- criterion 5

/// Replay the calibration monitor corpus with the frozen constant and count
/// flags; also check the rho = 2 smoothing value against its closed form.
fn estimate_monitors(cal: &Calibration) -> Verdict {
    let g = Grid::new(cal.grid_n, cal.box_length).map_err(err)?;
    let partition = DyadicPartition::build_default(&g).map_err(err)?;
    let index = BesovIndex::sobolev(cal.s);
    let horizon = 0.3;
    let mut flags = 0usize;

    // transport corpus (same recipe and seeds the calibration froze against)
    for run in 0..cal.monitor_runs {
        let base = cal.seed.wrapping_add(0x1000).wrapping_add(run as u64 * 7);
        let f0 = data::corpus_scalar(&g, base, run as u64, cal.s).dealiased();
        let raw_v = data::random_vector(&g, base.wrapping_add(1), 2, 6, cal.s + 1.0);
        let vmax = raw_v.linf_norm();
        if vmax == 0.0 || f0.l2_norm() == 0.0 {
            continue;
        }
        let v = Trajectory::constant(raw_v.scale(0.2 / vmax).dealiased());
        let g_field = data::random_scalar(&g, base.wrapping_add(2), 6, cal.s + 1.0)
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
        let traj = step_transport(&problem, horizon / 64.0, StepOptions::default()).map_err(err)?;
        flags += monitor_transport_estimate(&traj, &problem, index, &partition, cal.c0)
            .map_err(err)?
            .flag_count();
    }

    // smoothing corpus
    let nus = [0.1, 0.25, 0.5, 0.75, 0.9];
    let combos = [
        (Exponent::Infinity, Exponent::Finite(1.0)),
        (Exponent::Finite(2.0), Exponent::Finite(1.0)),
        (Exponent::Finite(2.0), Exponent::Finite(2.0)),
    ];
    for run in 0..cal.monitor_runs {
        let base = cal.seed.wrapping_add(0x2000).wrapping_add(run as u64 * 11);
        let f0 = data::corpus_scalar(&g, base, run as u64, cal.s).dealiased();
        let raw_v = data::random_vector(&g, base.wrapping_add(1), 2, 6, cal.s + 1.0);
        let vmax = raw_v.linf_norm();
        if vmax == 0.0 || f0.l2_norm() == 0.0 {
            continue;
        }
        let v = Trajectory::constant(raw_v.scale(0.2 / vmax).dealiased());
        let g_field = data::random_scalar(&g, base.wrapping_add(2), 6, cal.s + 1.0)
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
        let traj =
            step_transport_diffusion(&problem, horizon / 64.0, StepOptions::default()).map_err(err)?;
        let (rho, rho1) = combos[run % combos.len()];
        flags +=
            monitor_transport_diffusion_estimate(&traj, &problem, index, rho, rho1, &partition, cal.c0)
                .map_err(err)?
                .flag_count();
    }
    if flags != 0 {
        return Err(format!("{flags} monitor flags with the calibrated constant"));
    }

    // rho = 2 smoothing against the per-mode closed-form integral
    let g16 = Grid::new(16, TAU).map_err(err)?;
    let f0 = data::random_scalar(&g16, 9, 2, 1.0).dealiased();
    let (nu, t_final, s) = (0.5, 0.1, 1.5);
    let problem = LinearProblem {
        kind: ProblemKind::TransportDiffusion,
        velocity: None,
        forcing: None,
        initial: f0.clone(),
        nu,
        horizon: t_final,
    };
    let opts = StepOptions { cfl_safety: 0.5, min_steps: 4096 };
    let traj = step_transport_diffusion(&problem, t_final, opts).map_err(err)?;
    let numeric = sobolev_spacetime_l2(&traj, s + 1.0);
    let exact = heat_smoothing_oracle(&f0, nu, t_final, s);
    let rel = ((numeric - exact) / exact).abs();
    if rel >= 1e-8 {
        return Err(format!("smoothing norm off the closed form by {rel:.3e}"));
    }
    Ok(format!(
        "zero flags across {} monitored runs, smoothing closed form matched to {rel:.1e}",
        2 * cal.monitor_runs
    ))
}

// --------------------------------------------------------- criteria 6 and 7

fn desk_config(c0: f64) -> SolverConfig {
    let mut cfg = SolverConfig::new(0.5, 1.5, c0).unwrap();
    cfg.steps_per_window = 16;
    cfg
}

fn budget_and_contraction(cal: &Calibration) -> (Verdict, Verdict) {
    let cfg = desk_config(cal.c0);
    let (g, p) = partition_for(128);
    let mut budget_notes = Vec::new();
    let mut worst_ratio = 0.0f64;
    for seed in 1..=5u64 {
        let start = Instant::now();
        let spec = DataSpec {
            family: DataFamily::GaussianSpectrum,
            amplitude_u: 0.02,
            amplitude_h: 0.4 / (8.0 * cfg.c0),
            seed,
            max_mode: 8,
        };
        let (u0, h0) = match data::generate_initial_data(&g, &spec, cfg.s) {
            Ok(pair) => pair,
            Err(e) => return (Err(err(e)), Err("budget runs failed".into())),
        };
        let run = match PicardRun::new(&u0, &h0, &cfg, &p) {
            Ok(run) => run,
            Err(e) => return (Err(format!("config {seed} not admitted: {e}")), Err("budget runs failed".into())),
        };
        let states = match run.run_iterates(8) {
            Ok(states) => states,
            Err(e) => return (Err(format!("config {seed}: {e}")), Err("budget runs failed".into())),
        };
        for st in &states {
            if let Some(f) = &st.falsification {
                return (
                    Err(format!("config {seed}, iterate {}: {f}", st.n)),
                    Err("budget runs failed".into()),
                );
            }
        }
        let elapsed = start.elapsed();
        if elapsed > Duration::from_secs(300) {
            return (
                Err(format!("config {seed} took {elapsed:.2?} (budget 5 min)")),
                Err("budget runs failed".into()),
            );
        }
        budget_notes.push(format!("{elapsed:.1?}"));

        // criterion 7 on the same iterates
        let report = match run.contraction_report(&states) {
            Ok(r) => r,
            Err(e) => return (Ok(String::new()), Err(err(e))),
        };
        for row in &report.ratios {
            if row.n >= 3 {
                let r = row.u_linf.max(row.u_l2).max(row.h_linf);
                worst_ratio = worst_ratio.max(r);
                if r > 0.6 {
                    return (
                        Ok(format!("5 configs x 8 iterates within budget")),
                        Err(format!("config {seed}, iterate {}: ratio {r:.3} > 0.6", row.n)),
                    );
                }
            }
        }
        if report.term_flags != 0 {
            return (
                Ok(format!("5 configs x 8 iterates within budget")),
                Err(format!("config {seed}: {} difference-term bound flags", report.term_flags)),
            );
        }
    }
    (
        Ok(format!(
            "5 configs x 8 iterates, zero falsifications, per-config times {}",
            budget_notes.join(", ")
        )),
        Ok(format!("all ratios for n >= 3 at most {worst_ratio:.2e}, zero term flags")),
    )
}

// ---------------------------------------------------------------- criterion 8

fn oracle_equivalence(cal: &Calibration) -> Verdict {
    let cfg = desk_config(cal.c0);
    let (g, p) = partition_for(64);
    let spec = DataSpec {
        family: DataFamily::GaussianSpectrum,
        amplitude_u: 0.02,
        amplitude_h: 0.4 / (8.0 * cfg.c0),
        seed: 12,
        max_mode: 8,
    };
    let (u0, h0) = data::generate_initial_data(&g, &spec, cfg.s).map_err(err)?;
    let run = PicardRun::new(&u0, &h0, &cfg, &p).map_err(err)?;
    let outcome = run.solve().map_err(err)?;
    let (u_pic, h_pic) = outcome.solution();
    let (u_dir, h_dir) =
        integrate_direct(&u0, &h0, cfg.nu, run.t1().t, cfg.steps_per_window).map_err(err)?;
    let idx = BesovIndex::sobolev(cfg.s - 1.0);
    let du = u_pic.difference(&u_dir).map_err(err)?;
    let dh = h_pic.difference(&h_dir).map_err(err)?;
    let u_gap = chemin_lerner_norm(du.times(), du.fields(), Exponent::Infinity, idx, &p)
        .map_err(err)?
        .total;
    let h_gap = chemin_lerner_norm(dh.times(), dh.fields(), Exponent::Infinity, idx, &p)
        .map_err(err)?
        .total;
    let gap = u_gap.max(h_gap);
    if gap > 1e-6 {
        return Err(format!("solvers disagree by {gap:.3e} over the contraction horizon"));
    }
    Ok(format!("solvers agree to {gap:.1e} over [0, {:.3e}]", run.t1().t))
}

// ---------------------------------------------------------------- criterion 9

fn stability_scaling(cal: &Calibration) -> Verdict {
    let cfg = desk_config(cal.c0);
    let (g, p) = partition_for(32);
    let spec = DataSpec {
        family: DataFamily::GaussianSpectrum,
        amplitude_u: 0.02,
        amplitude_h: 0.4 / (8.0 * cfg.c0),
        seed: 21,
        max_mode: 6,
    };
    let (u0, h0) = data::generate_initial_data(&g, &spec, cfg.s).map_err(err)?;

    let same = uniqueness_experiment(&u0, &h0, &u0, &h0, &cfg, &p).map_err(err)?;
    if same.total_distance > 2.0 * cfg.cauchy_tol {
        return Err(format!(
            "identical data produced distance {:.3e} > 2 x cauchy_tol",
            same.total_distance
        ));
    }

    let bump_raw = data::random_vector(&g, 22, 2, 6, cfg.s + 2.0);
    let bump = data::scale_to_sobolev(&bump_raw, cfg.s, 1.0);
    let deltas = [1e-3, 1e-4, 1e-5, 1e-6];
    let mut pts = Vec::new();
    for &delta in &deltas {
        let mut v0 = u0.clone();
        v0.axpy(delta, &bump);
        let report = uniqueness_experiment(&u0, &h0, &v0, &h0, &cfg, &p).map_err(err)?;
        if !report.within_envelope {
            return Err(format!("stability envelope violated at delta {delta:e}"));
        }
        if report.total_distance <= 0.0 {
            return Err(format!("degenerate zero distance at delta {delta:e}"));
        }
        pts.push((delta.log10(), report.total_distance.log10()));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (slope - 1.0).abs() > 0.1 {
        return Err(format!("log-log slope {slope:.3} outside 1.0 +/- 0.1"));
    }
    Ok(format!(
        "identical-data distance {:.1e}, perturbation slope {slope:.3} over three decades",
        same.total_distance
    ))
}

// --------------------------------------------------------------- criterion 10

fn global_boundedness(cal: &Calibration) -> Verdict {
    let mut cfg = desk_config(cal.c0);
    cfg.steps_per_window = 8;
    cfg.max_iters = 12;
    let (g, p) = partition_for(32);
    let eta = cfg.eta();

    // data at a tenth of the smallness threshold
    let u_raw = data::random_vector(&g, 31, 2, 6, cfg.s + 2.0);
    let u0 = data::scale_to_sobolev(&u_raw, cfg.s, eta / 20.0);
    let h_raw = data::random_scalar(&g, 32, 6, cfg.s + 2.0);
    let h0 = data::scale_to_sobolev(&h_raw, cfg.s, eta / 20.0);
    let report = global_run(&u0, &h0, &cfg, &p, 100).map_err(err)?;
    if !report.bounded {
        return Err(format!(
            "run left twice the initial budget: {:?}",
            report.failure
        ));
    }

    // ten times the threshold must be rejected at the admission gate
    let u_big = data::scale_to_sobolev(&u_raw, cfg.s, 5.0 * eta);
    let h_big = data::scale_to_sobolev(&h_raw, cfg.s, 5.0 * eta);
    match global_run(&u_big, &h_big, &cfg, &p, 1) {
        Err(Error::Admission(_)) => {}
        other => {
            return Err(format!(
                "oversize data was not rejected at admission: {other:?}"
            ))
        }
    }
    Ok(format!(
        "100 windows bounded by twice the initial budget (T1 = {:.3e}); 10x data rejected",
        report.t1
    ))
}

// -------------------------------------------------------------------- driver

#[test]
fn acceptance_criteria() {
    let start = Instant::now();
    println!("freezing calibration constants (200-trial corpus)...");
    let cal = calibrate(64, TAU, 1.5, 200, 100, SEED).expect("calibration runs");

    let mut failures: Vec<String> = Vec::new();
    let mut record = |name: &str, verdict: Verdict| match verdict {
        Ok(detail) => println!("criterion {name}: PASS — {detail}"),
        Err(reason) => {
            println!("criterion {name}: FAIL — {reason}");
            failures.push(name.to_string());
        }
    };

    record("1 (partition exactness)", partition_exactness());
    record("2 (product decomposition identity)", bony_identity());
    record("3 (lemma certificate suite)", lemma_suite(&cal));
    record("4 (exact linear oracles)", linear_oracles());
    record("5 (estimate monitors)", estimate_monitors(&cal));
    let (budget, contraction) = budget_and_contraction(&cal);
    record("6 (norm budget at desk scale)", budget);
    record("7 (difference-norm contraction)", contraction);
    record("8 (oracle equivalence)", oracle_equivalence(&cal));
    record("9 (uniqueness and stability scaling)", stability_scaling(&cal));
    record("10 (long-horizon small-data boundedness)", global_boundedness(&cal));

    println!("acceptance suite finished in {:.1?}", start.elapsed());
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}

// ------------------------------------------------------------ property tests

mod properties {
    use super::*;
    use proptest::prelude::*;
    use swlp::picard::{select_t_local, NormBudget};

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        /// The selected horizon never grows when either budget grows.
        #[test]
        fn horizon_monotone_in_budgets(
            e1 in 0.0f64..10.0,
            e2 in 0.0f64..0.5,
            scale in 1.0f64..4.0,
        ) {
            let cfg = SolverConfig::new(0.5, 1.5, 2.0).unwrap();
            let base = NormBudget { e1, e2, u0_norm: 0.0, h0_norm: 0.0 };
            let t = select_t_local(&base, &cfg).t;
            prop_assert!(t > 0.0 && t <= 9.0 / 64.0);
            let bigger = NormBudget { e1: e1 * scale, e2: e2 * scale, ..base };
            prop_assert!(select_t_local(&bigger, &cfg).t <= t * (1.0 + 1e-12));
        }

        /// Besov norms are absolutely homogeneous.
        #[test]
        fn besov_norm_homogeneous(seed in 0u64..1000, a in -8.0f64..8.0) {
            let (g, p) = partition_for(16);
            let f = data::random_scalar(&g, seed, 4, 2.0).dealiased();
            let idx = BesovIndex::sobolev(1.5);
            let base = swlp::littlewood_paley::besov_total(&f, idx, &p);
            let scaled = swlp::littlewood_paley::besov_total(&f.scale(a), idx, &p);
            prop_assert!((scaled - a.abs() * base).abs() <= 1e-12 * (1.0 + base));
        }
    }
}
