//! Manifest-driven experiment runner
//!
//! Every run is fully determined by a TOML manifest plus a seed: the manifest
//! names a command, the solver configuration, an initial-data family, and the
//! frozen calibration artifact it builds on. Reruns with the same inputs
//! reproduce all JSON outputs bitwise. Commands map to the module pipelines:
//! `calibrate` freezes constants, `verify-lemmas` replays the certificate
//! corpus against them, `solve`/`contraction`/`uniqueness`/`global` drive the
//! successive-approximation solver, and `sweep` fans one key out over a list
//! of values, one worker and output subdirectory per value.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::calibration::{calibrate, Calibration};
use crate::data::{generate_initial_data, DataSpec};
use crate::error::{Error, Result};
use crate::littlewood_paley::DyadicPartition;
use crate::picard::{global_run, uniqueness_experiment, PicardRun, SchemeVariant, SolverConfig};
use crate::spectral::{Grid, SpectralField};

/// What a manifest asks the driver to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Calibrate,
    VerifyLemmas,
    Solve,
    Contraction,
    Uniqueness,
    Global,
    Sweep,
}

fn default_box_length() -> f64 {
    2.0 * std::f64::consts::PI
}

fn default_steps() -> usize {
    32
}

fn default_max_iters() -> usize {
    24
}

fn default_cauchy_tol() -> f64 {
    1e-9
}

fn default_ratio_tol() -> f64 {
    0.1
}

fn default_burn_in() -> usize {
    2
}

fn default_scheme() -> SchemeVariant {
    SchemeVariant::DiffusionOnUnknown
}

/// Solver and grid parameters as they appear in a manifest. `rho` and
/// `epsilon` fall back to their derived defaults when absent; `c0` always
/// comes from the frozen calibration, never from the manifest.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ConfigSection {
    pub grid_n: usize,
    #[serde(default = "default_box_length")]
    pub box_length: f64,
    pub nu: f64,
    pub s: f64,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default = "default_cauchy_tol")]
    pub cauchy_tol: f64,
    #[serde(default = "default_ratio_tol")]
    pub ratio_tol: f64,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_steps")]
    pub steps_per_window: usize,
    #[serde(default = "default_scheme")]
    pub scheme: SchemeVariant,
}

impl ConfigSection {
    fn solver_config(&self, c0: f64) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::new(self.nu, self.s, c0)?;
        if let Some(rho) = self.rho {
            cfg.rho = rho;
        }
        if let Some(epsilon) = self.epsilon {
            cfg.epsilon = epsilon;
        }
        cfg.cauchy_tol = self.cauchy_tol;
        cfg.ratio_tol = self.ratio_tol;
        cfg.burn_in = self.burn_in;
        cfg.max_iters = self.max_iters;
        cfg.steps_per_window = self.steps_per_window;
        cfg.scheme = self.scheme;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn default_trials() -> usize {
    200
}

fn default_monitor_runs() -> usize {
    100
}

/// Pointer to the frozen calibration artifact. Solver commands require both
/// the path and the expected hash and fail fast on any mismatch.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct CalibrationSection {
    pub path: PathBuf,
    #[serde(default)]
    pub sha256: Option<String>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_monitor_runs")]
    pub monitor_runs: usize,
}

fn default_iterates() -> usize {
    8
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ContractionSection {
    #[serde(default = "default_iterates")]
    pub iterates: usize,
}

fn default_windows() -> usize {
    100
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct GlobalSection {
    #[serde(default = "default_windows")]
    pub windows: usize,
}

fn default_deltas() -> Vec<f64> {
    vec![1e-3, 1e-4, 1e-5]
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct UniquenessSection {
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub perturbation_seed: u64,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SweepSection {
    /// Dotted path into the manifest, e.g. `config.nu`.
    pub key: String,
    pub values: Vec<toml::Value>,
    /// Command each sweep worker runs.
    pub command: Command,
}

/// One fully-specified run.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub config: ConfigSection,
    #[serde(default)]
    pub data: Option<DataSpec>,
    #[serde(default)]
    pub calibration: Option<CalibrationSection>,
    #[serde(default)]
    pub contraction: Option<ContractionSection>,
    #[serde(default)]
    pub global: Option<GlobalSection>,
    #[serde(default)]
    pub uniqueness: Option<UniquenessSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

/// Apply one `key=value` override to a parsed TOML table; the key is a
/// dotted path and the value is parsed as a TOML literal (falling back to a
/// string).
pub fn apply_override(table: &mut toml::Table, key: &str, value: &str) -> Result<()> {
    let parsed: toml::Value = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let mut cursor = table;
    for part in &parts[..parts.len() - 1] {
        cursor = cursor
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override path '{key}' crosses a non-table")))?;
    }
    cursor.insert(parts[parts.len() - 1].to_string(), parsed);
    Ok(())
}

impl RunManifest {
    pub fn from_table(table: toml::Table) -> Result<RunManifest> {
        toml::Value::Table(table)
            .try_into()
            .map_err(|e| Error::Config(format!("invalid manifest: {e}")))
    }

    pub fn parse(text: &str) -> Result<RunManifest> {
        let table: toml::Table = text
            .parse()
            .map_err(|e| Error::Config(format!("manifest is not valid TOML: {e}")))?;
        Self::from_table(table)
    }

    pub fn load(path: &Path) -> Result<RunManifest> {
        Self::parse(&fs::read_to_string(path)?)
    }

    fn data_spec(&self) -> Result<&DataSpec> {
        self.data
            .as_ref()
            .ok_or_else(|| Error::Config("manifest field 'data' is required for this command".into()))
    }

    fn calibration_section(&self) -> Result<&CalibrationSection> {
        self.calibration.as_ref().ok_or_else(|| {
            Error::Config("manifest field 'calibration' is required for this command".into())
        })
    }

    /// Load the frozen calibration, verifying its recorded hash. Fails fast
    /// when the manifest carries no hash.
    fn frozen_calibration(&self, out_dir: &Path) -> Result<Calibration> {
        let section = self.calibration_section()?;
        let hash = section.sha256.as_ref().ok_or_else(|| {
            Error::Config("manifest field 'calibration.sha256' is required; runs must pin the frozen constants".into())
        })?;
        let path = if section.path.is_absolute() {
            section.path.clone()
        } else {
            out_dir.join(&section.path)
        };
        Calibration::load_with_hash(&path, hash)
    }
}

/// Everything a finished run reports back to the caller.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RunReport {
    pub command: Command,
    pub exit_code: i32,
    /// Monitor or admission flags, each with its certificate id.
    pub flags: Vec<String>,
    pub artifacts: Vec<PathBuf>,
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let path = dir.join(name);
    let json = serde_json::to_string_pretty(value).map_err(|e| Error::Serde(e.to_string()))?;
    fs::write(&path, json)?;
    Ok(path)
}

fn write_norm_csv(
    dir: &Path,
    name: &str,
    s: f64,
    u: &crate::linear::Trajectory,
    h: &crate::linear::Trajectory,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut f = fs::File::create(&path)?;
    writeln!(f, "t,u_hs,h_hs")?;
    for i in 0..u.times().len() {
        writeln!(
            f,
            "{:e},{:e},{:e}",
            u.times()[i],
            u.fields()[i].sobolev_norm(s),
            h.fields()[i].sobolev_norm(s)
        )?;
    }
    Ok(path)
}

fn write_checkpoint(dir: &Path, name: &str, field: &SpectralField) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut f = fs::File::create(&path)?;
    field.write_checkpoint(&mut f)?;
    Ok(path)
}

/// Map an error to the process exit code contract: 2 validation, 3 invariant
/// or admission flag, 4 nonconvergence.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Admission(_) | Error::SmallnessLost(_) | Error::Hypothesis(_) => 3,
        Error::NonConvergence { .. } => 4,
        _ => 2,
    }
}

struct RunContext {
    out_dir: PathBuf,
}

impl RunContext {
    fn new(manifest: &RunManifest, out_override: Option<&Path>) -> Result<RunContext> {
        let out_dir = out_override
            .map(Path::to_path_buf)
            .or_else(|| manifest.output_dir.clone())
            .ok_or_else(|| Error::Config("no output directory (set output_dir or pass --out)".into()))?;
        fs::create_dir_all(&out_dir)?;
        Ok(RunContext { out_dir })
    }
}

/// Execute a manifest. `out_override` replaces the manifest's output
/// directory (sweep workers get per-value subdirectories automatically).
pub fn run(manifest: &RunManifest, out_override: Option<&Path>) -> Result<RunReport> {
    let ctx = RunContext::new(manifest, out_override)?;
    match manifest.command {
        Command::Calibrate => run_calibrate(manifest, &ctx),
        Command::VerifyLemmas => run_verify_lemmas(manifest, &ctx),
        Command::Solve => run_solve(manifest, &ctx),
        Command::Contraction => run_contraction(manifest, &ctx),
        Command::Uniqueness => run_uniqueness(manifest, &ctx),
        Command::Global => run_global(manifest, &ctx),
        Command::Sweep => run_sweep(manifest, &ctx),
    }
}

fn run_calibrate(manifest: &RunManifest, ctx: &RunContext) -> Result<RunReport> {
    let section = manifest.calibration_section()?;
    let cal = calibrate(
        manifest.config.grid_n,
        manifest.config.box_length,
        manifest.config.s,
        section.trials,
        section.monitor_runs,
        manifest.seed,
    )?;
    let path = if section.path.is_absolute() {
        section.path.clone()
    } else {
        ctx.out_dir.join(&section.path)
    };
    cal.save(&path)?;
    let flags: Vec<String> = cal
        .certificates
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("certificate {} failed: {} > {}", c.lemma_id, c.measured_constant, c.calibrated_bound))
        .collect();
    let summary = serde_json::json!({
        "command": "calibrate",
        "c0": cal.c0,
        "sha256": cal.hash(),
        "certificates": cal.certificates.len(),
        "flags": flags,
    });
    let summary_path = write_json(&ctx.out_dir, "calibrate_summary.json", &summary)?;
    Ok(RunReport {
        command: Command::Calibrate,
        exit_code: if flags.is_empty() { 0 } else { 3 },
        flags,
        artifacts: vec![path, summary_path],
    })
}

fn run_verify_lemmas(manifest: &RunManifest, ctx: &RunContext) -> Result<RunReport> {
    let frozen = manifest.frozen_calibration(&ctx.out_dir)?;
    let replay = calibrate(
        frozen.grid_n,
        frozen.box_length,
        frozen.s,
        frozen.trials,
        frozen.monitor_runs,
        frozen.seed,
    )?;
    let mut flags = Vec::new();
    if replay.certificates.len() != frozen.certificates.len() {
        flags.push("certificate corpus size changed since freezing".to_string());
    }
    for (old, new) in frozen.certificates.iter().zip(&replay.certificates) {
        if old.lemma_id != new.lemma_id {
            flags.push(format!("certificate order changed at {}", old.lemma_id));
            continue;
        }
        if new.measured_constant.to_bits() != old.measured_constant.to_bits() {
            flags.push(format!(
                "certificate {} no longer reproduces bitwise: {} vs frozen {}",
                old.lemma_id, new.measured_constant, old.measured_constant
            ));
        }
        if new.measured_constant > frozen.c0 && old.calibrated_bound >= frozen.c0 {
            flags.push(format!(
                "certificate {} exceeds the frozen constant: {} > {}",
                old.lemma_id, new.measured_constant, frozen.c0
            ));
        }
        if !new.pass {
            flags.push(format!("certificate {} failed its bound", new.lemma_id));
        }
    }
    let summary = serde_json::json!({
        "command": "verify-lemmas",
        "c0": frozen.c0,
        "certificates": replay.certificates,
        "flags": flags,
    });
    let path = write_json(&ctx.out_dir, "verify_lemmas.json", &summary)?;
    Ok(RunReport {
        command: Command::VerifyLemmas,
        exit_code: if flags.is_empty() { 0 } else { 3 },
        flags,
        artifacts: vec![path],
    })
}

/// Grid, partition, solver config, and initial data shared by the solver
/// commands.
struct SolverSetup {
    config: SolverConfig,
    partition: DyadicPartition,
    u0: SpectralField,
    h0: SpectralField,
}

fn solver_setup(manifest: &RunManifest, ctx: &RunContext) -> Result<SolverSetup> {
    let frozen = manifest.frozen_calibration(&ctx.out_dir)?;
    let config = manifest.config.solver_config(frozen.c0)?;
    let grid = Grid::new(manifest.config.grid_n, manifest.config.box_length)?;
    let partition = DyadicPartition::build_default(&grid)?;
    let mut spec = manifest.data_spec()?.clone();
    spec.seed = spec.seed.wrapping_add(manifest.seed);
    let (u0, h0) = generate_initial_data(&grid, &spec, config.s)?;
    Ok(SolverSetup { config, partition, u0, h0 })
}

fn run_solve(manifest: &RunManifest, ctx: &RunContext) -> Result<RunReport> {
    let setup = solver_setup(manifest, ctx)?;
    let run = PicardRun::new(&setup.u0, &setup.h0, &setup.config, &setup.partition)?;
    let outcome = run.solve()?;
    let last = outcome.states.last().unwrap();
    let summary = serde_json::json!({
        "command": "solve",
        "budget": run.budget(),
        "t_local": run.t_local(),
        "t1": run.t1(),
        "iterations": outcome.iterations,
        "converged": outcome.converged,
        "residual_u": outcome.residual_u,
        "residual_h": outcome.residual_h,
        "final_norms": last.norms,
        "flags": outcome.falsifications,
    });
    let mut artifacts = vec![write_json(&ctx.out_dir, "solve_summary.json", &summary)?];
    let (u, h) = outcome.solution();
    artifacts.push(write_norm_csv(&ctx.out_dir, "solve_norms.csv", setup.config.s, u, h)?);
    artifacts.push(write_checkpoint(&ctx.out_dir, "solution_u.chk", u.last())?);
    artifacts.push(write_checkpoint(&ctx.out_dir, "solution_h.chk", h.last())?);
    let flags = outcome.falsifications.clone();
    Ok(RunReport {
        command: Command::Solve,
        exit_code: if flags.is_empty() { 0 } else { 3 },
        flags,
        artifacts,
    })
}

fn run_contraction(manifest: &RunManifest, ctx: &RunContext) -> Result<RunReport> {
    let setup = solver_setup(manifest, ctx)?;
    let iterates = manifest.contraction.as_ref().map(|c| c.iterates).unwrap_or(8);
    let run = PicardRun::new(&setup.u0, &setup.h0, &setup.config, &setup.partition)?;
    let states = run.run_iterates(iterates)?;
    let report = run.contraction_report(&states)?;
    let mut flags: Vec<String> = states
        .iter()
        .filter_map(|st| st.falsification.clone().map(|f| format!("iterate {}: {f}", st.n)))
        .collect();
    for row in &report.ratios {
        if row.flagged {
            flags.push(format!(
                "difference ratio at iterate {} exceeds 1/2 + tolerance",
                row.n
            ));
        }
    }
    for check in &report.term_checks {
        if check.flagged {
            flags.push(format!(
                "term '{}' at iterate {} exceeds its budgeted bound",
                check.name, check.n
            ));
        }
    }
    let summary = serde_json::json!({
        "command": "contraction",
        "budget": run.budget(),
        "t1": run.t1(),
        "report": report,
        "flags": flags,
    });
    let artifacts = vec![write_json(&ctx.out_dir, "contraction_report.json", &summary)?];
    Ok(RunReport {
        command: Command::Contraction,
        exit_code: if flags.is_empty() { 0 } else { 3 },
        flags,
        artifacts,
    })
}

fn run_uniqueness(manifest: &RunManifest, ctx: &RunContext) -> Result<RunReport> {
    let setup = solver_setup(manifest, ctx)?;
    let section = manifest.uniqueness.clone().unwrap_or(UniquenessSection {
        deltas: default_deltas(),
        perturbation_seed: 0,
    });
    let bump_raw = crate::data::random_vector(
        setup.u0.grid(),
        section.perturbation_seed.wrapping_add(manifest.seed).wrapping_add(0x9e37),
        2,
        setup.u0.grid().dealias_mode_limit().min(8),
        setup.config.s + 2.0,
    );
    let bump = crate::data::scale_to_sobolev(&bump_raw, setup.config.s, 1.0);
    let mut reports = Vec::new();
    let mut flags = Vec::new();
    for &delta in &section.deltas {
        let mut v0 = setup.u0.clone();
        v0.axpy(delta, &bump);
        let report = uniqueness_experiment(
            &setup.u0,
            &setup.h0,
            &v0,
            &setup.h0,
            &setup.config,
            &setup.partition,
        )?;
        if !report.within_envelope {
            flags.push(format!(
                "stability envelope violated at delta = {delta:e}: distance {} > {}",
                report.total_distance, report.envelope
            ));
        }
        reports.push((delta, report));
    }
    // log-log least-squares slope of distance against delta
    let slope = if reports.len() >= 2 {
        let pts: Vec<(f64, f64)> = reports
            .iter()
            .filter(|(_, r)| r.total_distance > 0.0)
            .map(|(d, r)| (d.log10(), r.total_distance.log10()))
            .collect();
        if pts.len() >= 2 {
            let n = pts.len() as f64;
            let sx: f64 = pts.iter().map(|p| p.0).sum();
            let sy: f64 = pts.iter().map(|p| p.1).sum();
            let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
            let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
            Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
        } else {
            None
        }
    } else {
        None
    };
    let summary = serde_json::json!({
        "command": "uniqueness",
        "reports": reports.iter().map(|(d, r)| serde_json::json!({"delta": d, "report": r})).collect::<Vec<_>>(),
        "slope": slope,
        "flags": flags,
    });
    let artifacts = vec![write_json(&ctx.out_dir, "uniqueness_report.json", &summary)?];
    Ok(RunReport {
        command: Command::Uniqueness,
        exit_code: if flags.is_empty() { 0 } else { 3 },
        flags,
        artifacts,
    })
}

fn run_global(manifest: &RunManifest, ctx: &RunContext) -> Result<RunReport> {
    let setup = solver_setup(manifest, ctx)?;
    let windows = manifest.global.as_ref().map(|g| g.windows).unwrap_or(default_windows());
    let report = global_run(&setup.u0, &setup.h0, &setup.config, &setup.partition, windows)?;
    let mut flags = Vec::new();
    if let Some(f) = &report.failure {
        flags.push(f.clone());
    }
    let summary = serde_json::json!({
        "command": "global",
        "report": report,
        "flags": flags,
    });
    let mut artifacts = vec![write_json(&ctx.out_dir, "global_report.json", &summary)?];
    let csv_path = ctx.out_dir.join("global_history.csv");
    let mut f = fs::File::create(&csv_path)?;
    writeln!(f, "window,t_end,u_hs,h_hs")?;
    for (i, (u, h)) in report.u_history.iter().zip(&report.h_history).enumerate() {
        writeln!(f, "{},{:e},{:e},{:e}", i, (i as f64 + 1.0) * report.t1, u, h)?;
    }
    artifacts.push(csv_path);
    Ok(RunReport {
        command: Command::Global,
        exit_code: if report.bounded { 0 } else { 3 },
        flags,
        artifacts,
    })
}

fn run_sweep(manifest: &RunManifest, ctx: &RunContext) -> Result<RunReport> {
    let sweep = manifest
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("manifest field 'sweep' is required for the sweep command".into()))?;
    if sweep.command == Command::Sweep {
        return Err(Error::Config("a sweep cannot fan out into another sweep".into()));
    }
    // re-serialize the manifest so each worker can patch its own copy
    let base: toml::Table = toml::Value::try_from(manifest)
        .map_err(|e| Error::Serde(e.to_string()))?
        .as_table()
        .cloned()
        .ok_or_else(|| Error::Serde("manifest did not serialize to a table".into()))?;
    let mut jobs = Vec::new();
    for (i, value) in sweep.values.iter().enumerate() {
        let mut table = base.clone();
        table.remove("sweep");
        apply_override(&mut table, &sweep.key, &value.to_string())?;
        table.insert(
            "command".into(),
            toml::Value::try_from(sweep.command).map_err(|e| Error::Serde(e.to_string()))?,
        );
        let mut child = RunManifest::from_table(table)?;
        // workers run in their own subdirectories; pin the shared calibration
        // artifact to the parent directory so they all read the same file
        if let Some(section) = child.calibration.as_mut() {
            if !section.path.is_absolute() {
                section.path = ctx.out_dir.join(&section.path);
            }
        }
        let dir = ctx.out_dir.join(format!("sweep_{i:03}"));
        jobs.push((child, dir));
    }
    let results: Vec<Result<RunReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(child, dir)| scope.spawn(move || run(child, Some(dir.as_path()))))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut flags = Vec::new();
    let mut artifacts = Vec::new();
    let mut exit_code = 0;
    let mut entries = Vec::new();
    for (i, result) in results.into_iter().enumerate() {
        match result {
            Ok(report) => {
                exit_code = exit_code.max(report.exit_code);
                for f in &report.flags {
                    flags.push(format!("sweep_{i:03}: {f}"));
                }
                artifacts.extend(report.artifacts.clone());
                entries.push(serde_json::json!({
                    "index": i,
                    "value": sweep.values[i].to_string(),
                    "exit_code": report.exit_code,
                    "flags": report.flags,
                }));
            }
            Err(e) => {
                exit_code = exit_code.max(error_exit_code(&e));
                flags.push(format!("sweep_{i:03}: {e}"));
                entries.push(serde_json::json!({
                    "index": i,
                    "value": sweep.values[i].to_string(),
                    "exit_code": error_exit_code(&e),
                    "flags": [e.to_string()],
                }));
            }
        }
    }
    let summary = serde_json::json!({
        "command": "sweep",
        "key": sweep.key,
        "runs": entries,
        "flags": flags,
    });
    artifacts.push(write_json(&ctx.out_dir, "sweep_summary.json", &summary)?);
    Ok(RunReport { command: Command::Sweep, exit_code, flags, artifacts })
}
