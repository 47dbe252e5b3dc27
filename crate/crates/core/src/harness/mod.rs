//! Scenario runner behind the `cmpairs` binary: loads a JSON config, runs
//! one mode, writes plot-ready CSV/JSON and a verdict block.

pub mod config;
pub mod suites;
pub mod verdict;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bkp_reduced::{integrate_reduced, reduced_acceleration, reduced_rhs, second_order_residual};
use crate::dynamics::{flow_rhs, hamiltonian_magnitudes, hamiltonians, integrate_flow, CMState, Trajectory, FULL_GROUPS};
use crate::exec::{with_jobs, Execution};
use crate::lax::spectral::{compare_zero_loci, ScanSource, SpectralScan};
use crate::lax::bkp_det_drift;
use crate::pair_manifold::study::{reduction_convergence, single_pair_line_error, stickiness_report};
use crate::pair_manifold::{ReducedState, REDUCED_GROUPS};
use config::{Format, ScenarioConfig};
use suites::{random_cell_point, random_disc, rng_for, SuiteResult};
pub use verdict::{Check, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Full,
    Reduced,
    Compare,
    Spectral,
    Selftest,
    SelftestElliptic,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("numerical failure in {stage}: {source}")]
    Numerical {
        stage: String,
        #[source]
        source: crate::Error,
    },
    #[error("checks failed in {0}")]
    ChecksFailed(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::ConfigInvalid(_) => 2,
            HarnessError::Numerical { .. } | HarnessError::ChecksFailed(_) => 3,
            HarnessError::Io { .. } => 1,
        }
    }
}

fn stage(name: &str) -> impl FnOnce(crate::Error) -> HarnessError + '_ {
    move |source| HarnessError::Numerical {
        stage: name.to_string(),
        source,
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub exec: Execution,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            out_dir: PathBuf::from("cmpairs-out"),
            jobs: None,
            seed: None,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub files: Vec<PathBuf>,
    /// Human-readable lines for the terminal.
    pub lines: Vec<String>,
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::ConfigInvalid(format!("{}: {e}", path.display())))?;
    ScenarioConfig::from_json(&text).map_err(HarnessError::ConfigInvalid)
}

fn config_hash(cfg: &ScenarioConfig) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
    meta: Value,
}

impl Writer<'_> {
    fn io_err(path: &Path, e: impl std::fmt::Display) -> HarnessError {
        HarnessError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    fn json(&mut self, name: &str, mut body: Value) -> Result<(), HarnessError> {
        if let Value::Object(map) = &mut body {
            map.insert("meta".into(), self.meta.clone());
        }
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(&body).map_err(|e| Self::io_err(&path, e))?;
        fs::write(&path, text + "\n").map_err(|e| Self::io_err(&path, e))?;
        self.files.push(path);
        Ok(())
    }

    fn csv<F>(&mut self, name: &str, f: F) -> Result<(), HarnessError>
    where
        F: FnOnce(BufWriter<fs::File>) -> std::io::Result<()>,
    {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(|e| Self::io_err(&path, e))?;
        f(BufWriter::new(file)).map_err(|e| Self::io_err(&path, e))?;
        self.files.push(path);
        Ok(())
    }

    fn trajectory(&mut self, cfg: &ScenarioConfig, traj: &Trajectory, groups: &[&str]) -> Result<(), HarnessError> {
        if cfg.formats.contains(&Format::Csv) {
            self.csv("trajectory.csv", |w| traj.write_csv(w, groups))?;
        }
        if cfg.formats.contains(&Format::Json) {
            self.json("trajectory.json", json!({ "trajectory": traj.to_json(groups) }))?;
        }
        Ok(())
    }

    fn scan(&mut self, cfg: &ScenarioConfig, name: &str, scan: &SpectralScan) -> Result<(), HarnessError> {
        if cfg.formats.contains(&Format::Csv) {
            self.csv(&format!("{name}.csv"), |w| scan.write_csv(w))?;
        }
        if cfg.formats.contains(&Format::Json) {
            self.json(&format!("{name}.json"), json!({ "scan": scan }))?;
        }
        Ok(())
    }
}

/// Validates `cfg` for `mode`, runs it and writes the artifacts into
/// `opts.out_dir`. Failed checks are reported through the verdict, not as
/// an error.
pub fn run(mode: Mode, cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutcome, HarnessError> {
    cfg.validate(mode).map_err(HarnessError::ConfigInvalid)?;
    let mut cfg = cfg.clone();
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    fs::create_dir_all(&opts.out_dir).map_err(|e| Writer::io_err(&opts.out_dir, e))?;
    let mut w = Writer {
        dir: &opts.out_dir,
        files: Vec::new(),
        meta: json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "mode": mode,
            "seed": cfg.seed,
            "config_hash": config_hash(&cfg),
        }),
    };
    let exec = opts.exec;
    let (checks, lines) = with_jobs(opts.jobs, || match mode {
        Mode::Full => run_full(&cfg, &mut w),
        Mode::Reduced => run_reduced(&cfg, &mut w),
        Mode::Compare => run_compare(&cfg, &mut w, exec),
        Mode::Spectral => run_spectral(&cfg, &mut w, exec),
        Mode::Selftest => run_selftest(&cfg, &mut w, exec, &suites::SUITES.map(|s| s.0)),
        Mode::SelftestElliptic => run_selftest(&cfg, &mut w, exec, &["elliptic", "phi_expansion"]),
    })?;
    let verdict = Verdict::new(checks);
    w.json("verdict.json", json!({ "verdict": verdict }))?;
    Ok(RunOutcome {
        verdict,
        files: w.files,
        lines,
    })
}

type ModeResult = Result<(Vec<Check>, Vec<String>), HarnessError>;

fn check_lines(checks: &[Check]) -> Vec<String> {
    checks.iter().map(|c| c.to_string()).collect()
}

fn sample_times(cfg: &ScenarioConfig) -> Option<Vec<f64>> {
    cfg.samples
        .map(|n| (0..=n).map(|k| cfg.t_end * k as f64 / n as f64).collect())
}

fn run_full(cfg: &ScenarioConfig, w: &mut Writer) -> ModeResult {
    let lat = cfg.lattice().map_err(HarnessError::ConfigInvalid)?;
    let flow = cfg.flow().map_err(HarnessError::ConfigInvalid)?;
    let s0 = cfg.full_state(&lat).map_err(HarnessError::ConfigInvalid)?;
    let ts = sample_times(cfg);
    let traj = integrate_flow(&lat, flow, &s0, cfg.t_end, cfg.tol, ts.as_deref()).map_err(stage("full-flow integration"))?;
    w.trajectory(cfg, &traj, &FULL_GROUPS)?;

    let (a, b, c) = hamiltonians(&lat, &s0).map_err(stage("hamiltonians"))?;
    let h0 = [a, b, c];
    let mag = hamiltonian_magnitudes(&lat, &s0).map_err(stage("hamiltonians"))?;
    let mut abs_drift = [0.0f64; 3];
    for y in &traj.states {
        let s = CMState::from_flat(y).map_err(stage("hamiltonians"))?;
        let (a, b, c) = hamiltonians(&lat, &s).map_err(stage("hamiltonians"))?;
        for (k, h) in [a, b, c].into_iter().enumerate() {
            abs_drift[k] = abs_drift[k].max((h - h0[k]).norm());
        }
    }
    let drift: Vec<f64> = (0..3).map(|k| abs_drift[k] / h0[k].norm().max(f64::MIN_POSITIVE)).collect();
    let term_drift: Vec<f64> = (0..3).map(|k| abs_drift[k] / mag[k].max(f64::MIN_POSITIVE)).collect();
    // Relative to |H(0)| unless the terms cancel so far that kernel rounding
    // (relative 1e-12 on each term) alone would reach a tenth of the
    // threshold, as happens between pair partners.
    let mut checks: Vec<Check> = (0..3)
        .map(|k| {
            let name = format!("H{}", k + 1);
            if h0[k].norm() * cfg.conservation_tol >= 1e-11 * mag[k] {
                Check::at_most(format!("relative drift of {name}"), drift[k], cfg.conservation_tol)
            } else {
                Check::at_most(format!("drift of {name} relative to its terms"), term_drift[k], cfg.conservation_tol)
                    .with_detail(format!("|{name}(0)| cancels to {:.1e} of its terms", h0[k].norm() / mag[k]))
            }
        })
        .collect();

    let mut pairs = Value::Null;
    if let Some(eps) = cfg.embedding_epsilon() {
        let v = flow_rhs(&lat, flow, &s0).map_err(stage("pair diagnostics"))?;
        let rate = (0..s0.n_particles() / 2)
            .map(|i| (v.dx[2 * i + 1] - v.dx[2 * i]).norm())
            .fold(0.0, f64::max);
        let status = if rate * eps >= 1.0 { "destroyed" } else { "preserved" };
        checks.push(Check::report("pair separation rate at t = 0", rate).with_detail(format!("pairing {status}")));
        pairs = json!({
            "epsilon": eps,
            "separation_rate": rate,
            "scaled_rate": rate * eps,
            "status": status,
        });
    }
    w.json(
        "report.json",
        json!({
            "hamiltonians_t0": h0,
            "term_magnitudes_t0": mag,
            "max_relative_drift": drift,
            "max_drift_relative_to_terms": term_drift,
            "stats": traj.stats,
            "pairs": pairs,
        }),
    )?;
    Ok((checks.clone(), check_lines(&checks)))
}

fn run_reduced(cfg: &ScenarioConfig, w: &mut Writer) -> ModeResult {
    let lat = cfg.lattice().map_err(HarnessError::ConfigInvalid)?;
    let r0 = cfg.reduced_state().map_err(HarnessError::ConfigInvalid)?;
    let ts = sample_times(cfg);
    let traj = integrate_reduced(&lat, &r0, cfg.t_end, cfg.tol, ts.as_deref()).map_err(stage("reduced-flow integration"))?;
    w.trajectory(cfg, &traj, &REDUCED_GROUPS)?;
    let mut worst = 0.0f64;
    for y in std::iter::once(r0.to_flat()).chain(traj.states.iter().cloned()) {
        let r = ReducedState::from_flat(&y).map_err(stage("pole-equation residual"))?;
        let xdot = reduced_rhs(&lat, &r).map_err(stage("pole-equation residual"))?.dx;
        let xddot = reduced_acceleration(&lat, &r).map_err(stage("pole-equation residual"))?;
        let res = second_order_residual(&lat, &r.x, &xdot, &xddot).map_err(stage("pole-equation residual"))?;
        worst = worst.max(res.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let mut checks = vec![Check::at_most("pole-equation residual along trajectory", worst, cfg.residual_tol)];
    if r0.n_pairs() == 1 {
        let err = single_pair_line_error(&lat, &r0, cfg.t_end, cfg.tol).map_err(stage("straight-line check"))?;
        checks.push(Check::at_most("single pair vs x(0) - 6 alpha t", err, 100.0 * cfg.tol));
    }
    w.json(
        "report.json",
        json!({ "max_residual": worst, "stats": traj.stats }),
    )?;
    Ok((checks.clone(), check_lines(&checks)))
}

fn run_compare(cfg: &ScenarioConfig, w: &mut Writer, exec: Execution) -> ModeResult {
    let lat = cfg.lattice().map_err(HarnessError::ConfigInvalid)?;
    let r0 = cfg.reduced_state().map_err(HarnessError::ConfigInvalid)?;
    let stick = stickiness_report(&lat, &r0, &cfg.stickiness, exec).map_err(stage("stickiness study"))?;
    let conv = reduction_convergence(&lat, &r0, &cfg.convergence, exec).map_err(stage("convergence study"))?;
    let worst_c = stick.c_ratios.iter().copied().fold(0.0, f64::max);
    let mut rate = Check::at_least("slope of momentum-sum rate at t = 0", stick.momentum_rate_slope, cfg.stickiness.min_rate_slope);
    if stick.rate_pass && !rate.passed {
        rate = rate.with_detail("rates vanish identically");
    }
    rate.passed = stick.rate_pass;
    let mut c_stable = Check::at_most("largest C(eps/2)/C(eps)", worst_c, cfg.stickiness.max_c_growth);
    c_stable.passed = stick.c_stable_pass;
    let mut checks = vec![
        rate,
        c_stable,
        Check::report("slope of max pair-separation deviation", stick.sep_deviation_slope),
    ];
    let (lo, hi) = cfg.stickiness.destruction_band;
    for d in &stick.destruction {
        checks.push(Check::within(format!("eps = {:e}: t2 pair separation rate times eps", d.eps), d.scaled_rate, lo, hi));
    }
    checks.push(Check::at_least("convergence order of projected full flow", conv.order, cfg.convergence.min_order));
    if r0.n_pairs() == 1 {
        let err = single_pair_line_error(&lat, &r0, cfg.convergence.t_end, 1e-12).map_err(stage("straight-line check"))?;
        checks.push(Check::at_most("single pair vs x(0) - 6 alpha t", err, 1e-10));
    }
    if cfg.formats.contains(&Format::Csv) {
        w.csv("stickiness.csv", |mut f| {
            writeln!(f, "eps,max_sep_deviation,c,max_momentum_sum,steps")?;
            for r in &stick.rows {
                writeln!(f, "{},{},{},{},{}", r.eps, r.max_sep_deviation, r.c, r.max_momentum_sum, r.steps)?;
            }
            f.flush()
        })?;
        w.csv("convergence.csv", |mut f| {
            writeln!(f, "eps,x_error,alpha_error,error")?;
            for r in &conv.rows {
                writeln!(f, "{},{},{},{}", r.eps, r.x_error, r.alpha_error, r.error)?;
            }
            f.flush()
        })?;
    }
    if cfg.formats.contains(&Format::Json) {
        w.json("stickiness.json", json!({ "stickiness": stick }))?;
        w.json("convergence.json", json!({ "convergence": conv }))?;
    }
    Ok((checks.clone(), check_lines(&checks)))
}

fn run_spectral(cfg: &ScenarioConfig, w: &mut Writer, exec: Execution) -> ModeResult {
    let lat = cfg.lattice().map_err(HarnessError::ConfigInvalid)?;
    let r0 = cfg.reduced_state().map_err(HarnessError::ConfigInvalid)?;
    let limit = SpectralScan::compute(
        &lat,
        &r0,
        &cfg.z_grid,
        &cfg.lambda_grid,
        ScanSource::Limit {
            ladder: cfg.eps_ladder.clone(),
        },
        exec,
    )
    .map_err(stage("spectral limit scan"))?;
    w.scan(cfg, "spectral_limit", &limit)?;
    let bkp = SpectralScan::compute(&lat, &r0, &cfg.z_grid, &cfg.lambda_grid, ScanSource::Bkp, exec)
        .map_err(stage("BKP determinant scan"))?;
    w.scan(cfg, "spectral_bkp", &bkp)?;

    let mut rng = rng_for(cfg.seed, 0x5eed);
    let pts: Vec<(Complex64, Complex64)> = (0..cfg.spectral_points)
        .map(|_| (random_disc(&mut rng, 1.5), random_cell_point(&mut rng, &lat, 0.5, 0.2)))
        .collect();
    let drift = bkp_det_drift(&lat, &r0, &pts, cfg.t_end, cfg.tol, 20).map_err(stage("determinant conservation"))?;
    let mut checks = vec![Check::at_most("relative drift of det BKP Lax along reduced flow", drift, 1e-6)];
    let mut loci = Vec::new();
    if r0.n_pairs() >= 2 {
        for &l in &cfg.lambda_grid {
            let rep = compare_zero_loci(&lat, &r0, l, &cfg.eps_ladder).map_err(stage("zero-locus comparison"))?;
            checks.push(Check::report(format!("lambda = {l}: root mismatch R(z) vs det BKP(z)"), rep.root_mismatch));
            checks.push(Check::report(
                format!("lambda = {l}: root mismatch R(z) vs det BKP(-z)"),
                rep.reflected_root_mismatch,
            ));
            loci.push(rep);
        }
    }
    w.json(
        "report.json",
        json!({ "conservation_points": pts, "max_relative_drift": drift, "zero_loci": loci }),
    )?;
    Ok((checks.clone(), check_lines(&checks)))
}

/// Fixed-width summary table of suite results.
pub fn suite_table(results: &[SuiteResult]) -> Vec<String> {
    let mut lines = Vec::new();
    for r in results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        let ok = r.checks.iter().filter(|c| c.passed).count();
        lines.push(format!("{status}  {:<18} {:>2}/{:<2} {}", r.key, ok, r.checks.len(), r.title));
        for c in &r.checks {
            lines.push(format!("      {c}"));
        }
    }
    lines
}

fn run_selftest(cfg: &ScenarioConfig, w: &mut Writer, exec: Execution, keys: &[&str]) -> ModeResult {
    let lat = cfg.lattice().map_err(HarnessError::ConfigInvalid)?;
    let results: Vec<SuiteResult> = keys.iter().map(|k| suites::run_suite(k, &lat, cfg.seed, exec)).collect();
    w.json("selftest.json", json!({ "suites": results }))?;
    let lines = suite_table(&results);
    let checks = results
        .into_iter()
        .flat_map(|r| {
            let key = r.key;
            r.checks.into_iter().map(move |mut c| {
                c.name = format!("{key}: {}", c.name);
                c
            })
        })
        .collect();
    Ok((checks, lines))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::ConfigInvalid("x".into()).exit_code(), 2);
        let e = HarnessError::Numerical {
            stage: "s".into(),
            source: crate::Error::NoConvergence { order: 0.0 },
        };
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn mode_names() {
        assert_eq!(serde_json::to_string(&Mode::SelftestElliptic).unwrap(), "\"selftest-elliptic\"");
        let m: Mode = serde_json::from_str("\"compare\"").unwrap();
        assert_eq!(m, Mode::Compare);
    }
}
