use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::character::{
    continuum_linear_norm, estimate_decay_character, synthesize_with_character,
    synthesize_with_hhalf_character,
};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::field_file::read_field;
use crate::fit::{fit_power_law, PowerLawFit};
use crate::grid::Grid;
use crate::profile::ProfileSpec;
use crate::solver::{run_simulation, RunMetadata, SolverConfig, TimeSeries};

use super::report::{emit_report, write_two_column, FitResult, Report};
use super::{DataSpec, ExperimentConfig, ExperimentKind};

/// Name of the config copy stored next to the report.
pub const CONFIG_FILE: &str = "experiment.json";

/// One solver run of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub label: String,
    pub data_index: usize,
    pub omega: f64,
    pub seed: u64,
}

/// Solver runs implied by `config`, in report order.
pub fn plan_runs(config: &ExperimentConfig) -> Vec<RunPlan> {
    let sweep = config.kind == ExperimentKind::NscOmegaSweep;
    let mut plans = Vec::new();
    for i in 0..config.data.len() {
        for omega in config.run_omegas() {
            plans.push(RunPlan {
                label: if sweep {
                    format!("d{i}_omega{omega}")
                } else {
                    format!("d{i}")
                },
                data_index: i,
                omega,
                seed: config.seed + i as u64,
            });
        }
    }
    plans
}

/// Initial field of a lattice run together with its L² decay character.
pub fn initial_data(
    config: &ExperimentConfig,
    index: usize,
    grid: Grid,
    budget: f64,
) -> Result<(SpectralField, f64)> {
    let seed = config.seed + index as u64;
    match &config.data[index] {
        DataSpec::Synthetic(s) => {
            let amplitude = s.amplitude.unwrap_or(budget);
            let u = match (s.r_star, s.q_star) {
                (Some(r), _) => synthesize_with_character(r, grid, seed, amplitude)?,
                (None, Some(q)) => synthesize_with_hhalf_character(q, grid, seed, amplitude)?,
                (None, None) => {
                    return Err(Error::config(format!("data[{index}]"), "missing character"))
                }
            };
            Ok((u, s.r_star()))
        }
        DataSpec::FieldFile(path) => {
            let u = read_field(path)?;
            if u.grid() != grid {
                return Err(Error::config(
                    format!("data[{index}]"),
                    format!(
                        "{} holds a {:?} field, expected {grid:?}",
                        path.display(),
                        u.grid()
                    ),
                ));
            }
            let r_star = estimate_decay_character(&u, None)?.r_star;
            Ok((u, r_star))
        }
        DataSpec::Profile(_) => Err(Error::config(
            format!("data[{index}]"),
            "profiles have no lattice field",
        )),
    }
}

/// Predicted exponents `(norm, label suffix, β)` for a torus run with data of character `r*`.
pub fn predictions(kind: ExperimentKind, r_star: f64) -> Vec<(&'static str, &'static str, f64)> {
    let q_star = r_star + 0.5;
    let critical = (1.5 + q_star).min(1.0);
    match kind {
        ExperimentKind::LinearLattice => vec![
            ("l2_sq", "linear", 1.5 + r_star),
            ("hhalf_sq", "linear", 2.0 + r_star),
        ],
        ExperimentKind::NsDecay => vec![("hhalf_sq", "critical", critical)],
        ExperimentKind::NscDecay | ExperimentKind::NscOmegaSweep => {
            let mut p = vec![("hhalf_sq", "critical", critical)];
            if r_star > -1.5 {
                let l2 = (1.5 + r_star).min(2.5);
                p.push(("l2_sq", "h_half_data", l2));
                p.push(("hhalf_sq", "h_half_data", l2 + 0.5));
            }
            p
        }
        ExperimentKind::LinearContinuum | ExperimentKind::CharacterEstimation => Vec::new(),
    }
}

/// Column-style name of the squared Ḣ^s norm.
pub fn norm_name(s: f64) -> String {
    match s {
        0.0 => "l2_sq".to_string(),
        0.5 => "hhalf_sq".to_string(),
        _ => format!("h{s}_sq"),
    }
}

/// Runs the experiment, writes every artifact and the report into
/// `config.output_dir`, and returns the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let echo = dir.join(CONFIG_FILE);
    std::fs::write(&echo, config.to_json()).map_err(|e| Error::io(&echo, e))?;

    if config.kind.uses_solver() {
        let runs = plan_runs(config);
        runs.par_iter()
            .map(|plan| execute_run(config, plan, dir))
            .collect::<Result<Vec<()>>>()?;
    }
    let report = assemble(config, dir)?;
    emit_report(&report, dir)?;
    Ok(report)
}

fn execute_run(config: &ExperimentConfig, plan: &RunPlan, dir: &Path) -> Result<()> {
    let solver = config.solver_for(plan.omega)?;
    let (u0, _) = initial_data(config, plan.data_index, solver.grid, solver.epsilon_budget)?;
    let start = Instant::now();
    let series = run_simulation(&solver, &u0)?;
    let wall = start.elapsed().as_secs_f64();
    series.write_csv(&dir.join(format!("{}.csv", plan.label)))?;
    RunMetadata {
        config: solver,
        grid: solver.grid,
        seeds: vec![plan.seed],
        wall_time_seconds: wall,
        records: series.len(),
        steps: steps_of(&solver),
        smallness_violated: series.smallness_violated(),
        label: plan.label.clone(),
    }
    .write_json(&dir.join(format!("{}.json", plan.label)))
}

fn steps_of(solver: &SolverConfig) -> usize {
    ((solver.t_final / solver.dt) - 1e-9).ceil().max(1.0) as usize
}

/// Rebuilds the report of a finished experiment from the files in `dir`.
pub fn rebuild_report(dir: &Path) -> Result<Report> {
    let path = dir.join(CONFIG_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let config: ExperimentConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    config.validate()?;
    let report = assemble(&config, dir)?;
    emit_report(&report, dir)?;
    Ok(report)
}

/// Computes fits from stored series (or directly, for the cheap kinds) and
/// writes the two-column data files.
fn assemble(config: &ExperimentConfig, dir: &Path) -> Result<Report> {
    let tolerance = config.tolerance();
    let mut fits = Vec::new();
    let mut artifacts = vec![PathBuf::from(CONFIG_FILE)];
    let mut l2_spread = None;
    match config.kind {
        ExperimentKind::LinearContinuum => {
            let window = config.window()?;
            let jobs: Vec<(usize, f64)> = (0..config.data.len())
                .flat_map(|i| config.orders.iter().map(move |&s| (i, s)))
                .collect();
            let curves = jobs
                .par_iter()
                .map(|&(i, s)| continuum_curve(config, i, s, window))
                .collect::<Result<Vec<_>>>()?;
            for ((i, s), (points, r_star)) in jobs.into_iter().zip(curves) {
                let norm = norm_name(s);
                let fit = fit_power_law(&points, window)?;
                fits.push(FitResult::new(
                    &norm,
                    format!("d{i}"),
                    fit,
                    1.5 + r_star + s,
                    tolerance,
                ));
                let name = PathBuf::from(format!("d{i}_{norm}.dat"));
                write_two_column(&dir.join(&name), &points)?;
                artifacts.push(name);
            }
        }
        ExperimentKind::CharacterEstimation => {
            for (i, data) in config.data.iter().enumerate() {
                let (estimate, nominal) = match data {
                    DataSpec::Profile(p) => (
                        estimate_decay_character(&p.build()?, None)?,
                        Some(p.decay_character()),
                    ),
                    DataSpec::Synthetic(s) => {
                        let grid = config
                            .grid
                            .ok_or_else(|| Error::config("grid", "synthetic data needs a grid"))?;
                        let (u, r) = initial_data(config, i, grid, s.amplitude.unwrap_or(1.0))?;
                        (estimate_decay_character(&u, None)?, Some(r))
                    }
                    DataSpec::FieldFile(path) => {
                        (estimate_decay_character(&read_field(path)?, None)?, None)
                    }
                };
                let name = PathBuf::from(format!("d{i}_character.json"));
                let path = dir.join(&name);
                let text =
                    serde_json::to_string_pretty(&estimate).expect("estimates always serialize");
                std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
                artifacts.push(name);
                if let Some(nominal) = nominal {
                    let fit = PowerLawFit {
                        beta: estimate.r_star,
                        r_squared: estimate.r_squared,
                        window: [estimate.radii[estimate.radii.len() - 1], estimate.radii[0]],
                        samples: estimate.radii.len(),
                    };
                    fits.push(FitResult::new(
                        "r_star",
                        format!("d{i}"),
                        fit,
                        nominal,
                        tolerance,
                    ));
                }
            }
        }
        kind => {
            let window = config.window()?;
            let solver = config.solver_for(0.0)?;
            let mut l2_curves: Vec<Vec<Vec<(f64, f64)>>> = vec![Vec::new(); config.data.len()];
            for plan in plan_runs(config) {
                let csv = PathBuf::from(format!("{}.csv", plan.label));
                let series = TimeSeries::read_csv(&dir.join(&csv))?;
                artifacts.push(csv);
                artifacts.push(PathBuf::from(format!("{}.json", plan.label)));
                let r_star = match &config.data[plan.data_index] {
                    DataSpec::Synthetic(s) => s.r_star(),
                    _ => {
                        initial_data(config, plan.data_index, solver.grid, solver.epsilon_budget)?.1
                    }
                };
                for (norm, tag, predicted) in predictions(kind, r_star) {
                    let points = series.column(norm)?;
                    let fit = fit_power_law(&points, window)?;
                    fits.push(FitResult::new(
                        norm,
                        format!("{}:{tag}", plan.label),
                        fit,
                        predicted,
                        tolerance,
                    ));
                    let name = PathBuf::from(format!("{}_{norm}.dat", plan.label));
                    if !artifacts.contains(&name) {
                        write_two_column(&dir.join(&name), &points)?;
                        artifacts.push(name);
                    }
                }
                l2_curves[plan.data_index].push(series.column("l2_sq")?);
            }
            if kind == ExperimentKind::NscOmegaSweep {
                l2_spread = Some(l2_curves.iter().map(|c| spread(c)).fold(0.0, f64::max));
            }
        }
    }
    artifacts.push(PathBuf::from(super::report::REPORT_FILE));
    let mut report = Report::new(config, fits, artifacts);
    report.l2_spread = l2_spread;
    Ok(report)
}

fn continuum_curve(
    config: &ExperimentConfig,
    index: usize,
    s: f64,
    window: [f64; 2],
) -> Result<(Vec<(f64, f64)>, f64)> {
    let DataSpec::Profile(spec) = &config.data[index] else {
        return Err(Error::config(
            format!("data[{index}]"),
            "linear_continuum needs profile data",
        ));
    };
    Ok((
        continuum_series(spec, s, window, config.samples)?,
        spec.decay_character(),
    ))
}

/// `(t, ‖e^{tΔ}u₀‖²_{Ḣ^s})` at `samples` log-spaced times spanning `[t₀, t₁]`.
pub fn continuum_series(
    spec: &ProfileSpec,
    s: f64,
    [t0, t1]: [f64; 2],
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(t0 > 0.0 && t1 > t0 && t1.is_finite()) {
        return Err(Error::Domain(format!("need 0 < t₀ < t₁, got [{t0}, {t1}]")));
    }
    if samples < 2 {
        return Err(Error::Domain("need at least 2 samples".to_string()));
    }
    let profile = spec.build()?;
    let ratio = (t1 / t0).ln();
    (0..samples)
        .map(|k| {
            let t = if k + 1 == samples {
                t1
            } else {
                t0 * (ratio * k as f64 / (samples - 1) as f64).exp()
            };
            continuum_linear_norm(&profile, s, t).map(|y| (t, y))
        })
        .collect()
}

/// Largest `|y_k − y_0| / y_0` over curves sampled at the same times.
fn spread(curves: &[Vec<(f64, f64)>]) -> f64 {
    let Some(base) = curves.first() else {
        return 0.0;
    };
    curves[1..]
        .iter()
        .flat_map(|c| c.iter().zip(base).map(|(a, b)| ((a.1 - b.1) / b.1).abs()))
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::Verdict;

    fn continuum(dir: &Path, r_stars: &[f64], orders: Vec<f64>) -> ExperimentConfig {
        ExperimentConfig {
            kind: ExperimentKind::LinearContinuum,
            name: None,
            data: r_stars
                .iter()
                .map(|&r| DataSpec::Profile(ProfileSpec::PowerGauss { r_star: r }))
                .collect(),
            solver: None,
            grid: None,
            omegas: Vec::new(),
            orders,
            samples: 32,
            fit_window: Some([10.0, 1e4]),
            tolerance: None,
            output_dir: dir.to_path_buf(),
            seed: 0,
        }
    }

    #[test]
    fn continuum_verdicts_match() {
        let dir = tempfile::tempdir().unwrap();
        let report = run_experiment(&continuum(dir.path(), &[-1.0, 0.0, 1.0], vec![0.5])).unwrap();
        assert_eq!(report.fits.len(), 3);
        for (fit, r) in report.fits.iter().zip([-1.0, 0.0, 1.0]) {
            assert_eq!(fit.predicted, 2.0 + r);
            assert_eq!(fit.verdict, Verdict::Matches, "{fit:?}");
        }
        assert_eq!(report.exit_code(), 0);
        for a in &report.artifacts {
            assert!(dir.path().join(a).exists(), "{a:?}");
        }
    }

    #[test]
    fn report_is_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let first = run_experiment(&continuum(dir.path(), &[0.5], vec![0.0])).unwrap();
        let second = rebuild_report(dir.path()).unwrap();
        let strip = |r: &Report| Report {
            timestamp: String::new(),
            ..r.clone()
        };
        assert_eq!(strip(&first).to_json(), strip(&second).to_json());
        let stored = Report::read(&dir.path().join(super::super::REPORT_FILE)).unwrap();
        assert_eq!(stored, second);
    }

    #[test]
    fn empty_and_violating_reports() {
        let config = continuum(Path::new("unused"), &[0.0], vec![0.0]);
        let empty = Report::new(&config, Vec::new(), Vec::new());
        assert_eq!(empty.exit_code(), 0);
        let fit = PowerLawFit {
            beta: 0.2,
            r_squared: 1.0,
            window: [1.0, 2.0],
            samples: 10,
        };
        let bad = Report::new(
            &config,
            vec![FitResult::new("l2_sq", "x".into(), fit, 1.5, 0.15)],
            Vec::new(),
        );
        assert_eq!(bad.exit_code(), 1);
        let fast = PowerLawFit { beta: 3.0, ..fit };
        let ok = Report::new(
            &config,
            vec![FitResult::new("l2_sq", "x".into(), fast, 1.5, 0.15)],
            Vec::new(),
        );
        assert_eq!(ok.fits[0].verdict, Verdict::FasterThanBound);
        assert_eq!(ok.exit_code(), 0);
    }

    #[test]
    fn predicted_exponents() {
        let p = predictions(ExperimentKind::NsDecay, -1.5);
        assert_eq!(p, vec![("hhalf_sq", "critical", 0.5)]);
        let p = predictions(ExperimentKind::NscDecay, 0.0);
        assert_eq!(p[0].2, 1.0);
        assert_eq!(p[1], ("l2_sq", "h_half_data", 1.5));
        assert_eq!(p[2], ("hhalf_sq", "h_half_data", 2.0));
        assert_eq!(predictions(ExperimentKind::NscDecay, 2.0)[1].2, 2.5);
        let p = predictions(ExperimentKind::LinearLattice, -0.5);
        assert_eq!(
            p,
            vec![("l2_sq", "linear", 1.0), ("hhalf_sq", "linear", 1.5)]
        );
    }

    #[test]
    fn sweep_plans_share_seeds() {
        let mut c = continuum(Path::new("x"), &[0.0, 0.0], vec![0.0]);
        c.kind = ExperimentKind::NscOmegaSweep;
        c.omegas = vec![0.0, 10.0];
        let plans = plan_runs(&c);
        let labels: Vec<&str> = plans.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(
            labels,
            ["d0_omega0", "d0_omega10", "d1_omega0", "d1_omega10"]
        );
        assert_eq!(plans[0].seed, plans[1].seed);
        assert_ne!(plans[1].seed, plans[2].seed);
    }
}
