//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs as a plain binary so the lines are always printed; the process
//! fails if any criterion fails. Numeric arguments select criteria, e.g.
//! `cargo test --test acceptance -- 1 4`.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use decaylab::character::{
    continuum_linear_norm, estimate_decay_character, synthesize_with_character,
    synthesize_with_hhalf_character,
};
use decaylab::experiment::{
    run_experiment, DataSpec, ExperimentConfig, ExperimentKind, FitResult, Report, SyntheticSpec,
};
use decaylab::fit::Verdict;
use decaylab::profile::{ProfileSpec, RadialProfile};
use decaylab::propagator::{coriolis_term, semigroup_apply};
use decaylab::solver::{picard_solve, run_simulation, Integrator, RunMetadata, SolverConfig};
use decaylab::spectral::{dealias, leray_project, riesz_apply, sobolev_inner, sobolev_seminorm_sq};
use decaylab::splitting::{bilinear_ratio, empirical_ratio_sup};
use decaylab::{Grid, RealField, RotationParams, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("linear continuum rates", linear_continuum_rates),
        ("decay-character estimator", character_estimator),
        ("exact Coriolis semigroup", coriolis_semigroup),
        ("Coriolis orthogonality", coriolis_orthogonality),
        ("Lyapunov monotonicity", lyapunov),
        ("nonlinear decay bounds", nonlinear_decay),
        ("H^1/2 gain of one half", h_half_gain),
        ("Picard vs stepper", picard_vs_stepper),
        ("bilinear-estimate empirics", bilinear_empirics),
    ];
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failures = 0;
    let mut ran = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !selected.is_empty() && !selected.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} [{secs:.1} s] {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL {name} [{secs:.1} s] {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

/// `‖e^{tΔ}u₀‖²_{Ḣ^s}` for `a(ρ) = ρ^r e^{−ρ²}` in closed form:
/// `2π Γ(s + r + 3/2) (2(1+t))^{−(s+r+3/2)}`.
fn power_gauss_closed_form(r: f64, s: f64, t: f64) -> f64 {
    let p = s + r + 1.5;
    2.0 * PI * gamma(p) * (2.0 * (1.0 + t)).powf(-p)
}

fn linear_continuum_rates() -> Outcome {
    let start = Instant::now();
    let r_stars = [-1.0, -0.5, 0.0, 1.0];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = ExperimentConfig {
        kind: ExperimentKind::LinearContinuum,
        name: None,
        data: r_stars
            .iter()
            .map(|&r| DataSpec::Profile(ProfileSpec::PowerGauss { r_star: r }))
            .collect(),
        solver: None,
        grid: None,
        omegas: Vec::new(),
        orders: vec![0.0, 0.5],
        samples: 64,
        fit_window: Some([10.0, 1e4]),
        tolerance: Some(0.02),
        output_dir: dir.path().to_path_buf(),
        seed: 0,
    };
    let report = run_experiment(&config).map_err(|e| e.to_string())?;
    let mut oracle_err = 0.0f64;
    for &r in &r_stars {
        let profile = RadialProfile::power_gauss(r).map_err(|e| e.to_string())?;
        for s in [0.0, 0.5] {
            for t in [10.0, 300.0, 1e4] {
                let q = continuum_linear_norm(&profile, s, t).map_err(|e| e.to_string())?;
                let exact = power_gauss_closed_form(r, s, t);
                oracle_err = oracle_err.max((q - exact).abs() / exact);
            }
        }
    }
    let worst = report
        .fits
        .iter()
        .map(|f| (f.beta - f.predicted).abs())
        .fold(0.0, f64::max);
    let all_match =
        report.fits.len() == 8 && report.fits.iter().all(|f| f.verdict == Verdict::Matches);
    let elapsed = start.elapsed();
    check(
        all_match && oracle_err < 1e-6 && elapsed < Duration::from_secs(10),
        format!(
            "8 fits, max |β − predicted| = {worst:.2e}, quadrature vs Γ oracle {oracle_err:.1e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn character_estimator() -> Outcome {
    let start = Instant::now();
    let grid = Grid::new(64, 64.0 * PI).unwrap();
    let mut worst_trip = 0.0f64;
    let mut worst_shift = 0.0f64;
    let mut lines = Vec::new();
    for r in [-1.0, 0.0, 0.5, 1.0] {
        let u = synthesize_with_character(r, grid, 17, 1.0).map_err(|e| e.to_string())?;
        let est = estimate_decay_character(&u, None)
            .map_err(|e| e.to_string())?
            .r_star;
        let shifted = estimate_decay_character(&riesz_apply(&u, 0.5), None)
            .map_err(|e| e.to_string())?
            .r_star;
        worst_trip = worst_trip.max((est - r).abs());
        worst_shift = worst_shift.max((shifted - est - 0.5).abs());
        lines.push(format!("{r}→{est:.3}"));
    }
    let elapsed = start.elapsed();
    check(
        worst_trip <= 0.1 && worst_shift <= 0.1 && elapsed < Duration::from_secs(30),
        format!(
            "round trip {} (max err {worst_trip:.3}), shift-law max err {worst_shift:.3}, {:.1} s",
            lines.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn random_solenoidal(grid: Grid, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phys = RealField::from_fn(grid, |_| [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0)));
    leray_project(&phys.to_spectral())
}

fn coriolis_semigroup() -> Outcome {
    let grid = Grid::new(16, 5.0).unwrap();
    let (mut modulus, mut compose, mut heat) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..10 {
        let u = random_solenoidal(grid, seed);
        let p = RotationParams::new(37.0 * (seed as f64 + 1.0)).unwrap();
        let (t, s) = (0.013 * (seed as f64 + 1.0), 0.021);
        let ut = semigroup_apply(&u, t, p).unwrap();
        let heat_flow = semigroup_apply(&u, t, RotationParams::heat()).unwrap();
        for flat in 0..grid.len() {
            let idx = grid.unflat(flat);
            if grid.is_nyquist(idx) || flat == 0 {
                continue;
            }
            let xi = grid.wavevector(idx).unwrap();
            let k2 = xi.iter().map(|x| x * x).sum::<f64>();
            let norm =
                |v: [num_complex::Complex64; 3]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let before = norm(u.mode(flat));
            if before < 1e-300 {
                continue;
            }
            let expected = (-t * k2).exp() * before;
            modulus = modulus.max((norm(ut.mode(flat)) - expected).abs() / expected);
            let h = u.mode(flat).map(|c| c * (-t * k2).exp());
            let got = heat_flow.mode(flat);
            heat = heat.max(norm([0, 1, 2].map(|j| got[j] - h[j])) / norm(h));
        }
        let two = semigroup_apply(&semigroup_apply(&u, s, p).unwrap(), t, p).unwrap();
        let one = semigroup_apply(&u, s + t, p).unwrap();
        compose = compose.max(two.sub(&one).unwrap().max_abs() / one.max_abs());
    }
    check(
        modulus <= 1e-12 && compose <= 1e-12 && heat <= 1e-13,
        format!("modulus {modulus:.1e}, composition {compose:.1e}, Ω = 0 reduction {heat:.1e}"),
    )
}

fn coriolis_orthogonality() -> Outcome {
    let grid = Grid::new(16, 7.0).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let u = random_solenoidal(grid, 1000 + seed);
        let c = coriolis_term(&u);
        for s in [0.0, 0.5] {
            let ratio = sobolev_inner(&c, &u, s).unwrap().abs() / sobolev_seminorm_sq(&u, s);
            worst = worst.max(ratio);
        }
    }
    check(
        worst <= 1e-12,
        format!("100 fields, max |⟨ℙ(e₃×u),u⟩_Ḣˢ|/‖u‖²_Ḣˢ = {worst:.1e}"),
    )
}

fn lyapunov() -> Outcome {
    let grid = Grid::new(64, 16.0 * PI).unwrap();
    let mut details = Vec::new();
    let mut ok = true;
    for omega in [0.0, 10.0] {
        let u0 = synthesize_with_character(0.0, grid, 5, 0.05).unwrap();
        let config = SolverConfig {
            grid,
            omega,
            dt: 1e-3,
            t_final: 0.12,
            record_interval: 0.01,
            epsilon_budget: 0.05,
            dealias: true,
            nonlinear: true,
            splitting_alpha: 4.0,
        };
        let series = run_simulation(&config, &u0).map_err(|e| e.to_string())?;
        let worst_rise = series
            .records
            .windows(2)
            .map(|w| (w[1].hhalf_sq.sqrt() - w[0].hhalf_sq.sqrt()) / w[0].hhalf_sq.sqrt())
            .fold(f64::MIN, f64::max);
        let residual = series
            .records
            .iter()
            .map(|r| r.energy_residual.abs())
            .fold(0.0, f64::max);
        ok &= worst_rise <= 1e-8 && residual <= 1e-3;
        details.push(format!(
            "Ω={omega}: {} records, max relative rise {worst_rise:.1e}, energy residual {residual:.1e}",
            series.len()
        ));
    }
    check(ok, details.join("; "))
}

fn torus_solver(omega: f64) -> SolverConfig {
    SolverConfig {
        grid: Grid::new(64, 64.0 * PI).unwrap(),
        omega,
        dt: 0.16,
        t_final: 32.0,
        record_interval: 0.32,
        epsilon_budget: 0.05,
        dealias: true,
        nonlinear: true,
        splitting_alpha: 4.0,
    }
}

fn torus_experiment(
    kind: ExperimentKind,
    data: SyntheticSpec,
    omegas: Vec<f64>,
    dir: &Path,
) -> ExperimentConfig {
    let omega = if kind == ExperimentKind::NscDecay {
        omegas[0]
    } else {
        0.0
    };
    ExperimentConfig {
        kind,
        name: None,
        data: vec![DataSpec::Synthetic(data)],
        solver: Some(torus_solver(omega)),
        grid: None,
        omegas: if kind == ExperimentKind::NscOmegaSweep {
            omegas
        } else {
            Vec::new()
        },
        orders: vec![0.0, 0.5],
        samples: 64,
        fit_window: Some([2.0, 32.0]),
        tolerance: None,
        output_dir: dir.to_path_buf(),
        seed: 3,
    }
}

fn longest_run(report: &Report, dir: &Path) -> f64 {
    report
        .artifacts
        .iter()
        .filter(|a| {
            a.extension().is_some_and(|e| e == "json") && a.to_string_lossy().starts_with('d')
        })
        .filter_map(|a| std::fs::read_to_string(dir.join(a)).ok())
        .filter_map(|t| serde_json::from_str::<RunMetadata>(&t).ok())
        .map(|m| m.wall_time_seconds)
        .fold(0.0, f64::max)
}

fn critical(report: &Report) -> Vec<&FitResult> {
    report
        .fits
        .iter()
        .filter(|f| f.label.ends_with(":critical"))
        .collect()
}

fn nonlinear_decay() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for q in [-1.0, 0.0] {
        let data = SyntheticSpec {
            r_star: None,
            q_star: Some(q),
            amplitude: None,
        };
        let ns_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let sweep_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let ns = run_experiment(&torus_experiment(
            ExperimentKind::NsDecay,
            data,
            vec![0.0],
            ns_dir.path(),
        ))
        .map_err(|e| e.to_string())?;
        let sweep = run_experiment(&torus_experiment(
            ExperimentKind::NscOmegaSweep,
            data,
            vec![10.0, 100.0],
            sweep_dir.path(),
        ))
        .map_err(|e| e.to_string())?;
        let base = critical(&ns)[0];
        let rotating = critical(&sweep);
        ok &= base.beta >= base.predicted - 0.15;
        if q == -1.0 {
            ok &= (base.beta - 0.5).abs() <= 0.15;
        }
        ok &= rotating.len() == 2 && rotating.iter().all(|f| f.verdict == base.verdict);
        ok &= rotating.iter().all(|f| f.beta >= f.predicted - 0.15);
        let wall = longest_run(&ns, ns_dir.path()).max(longest_run(&sweep, sweep_dir.path()));
        ok &= wall <= 300.0;
        details.push(format!(
            "q*={q}: predicted {:.2}, β(Ω=0)={:.3} {}, β(Ω=10)={:.3} {}, β(Ω=100)={:.3} {}, longest run {wall:.0} s",
            base.predicted,
            base.beta,
            base.verdict,
            rotating[0].beta,
            rotating[0].verdict,
            rotating[1].beta,
            rotating[1].verdict,
        ));
    }
    check(ok, details.join("; "))
}

fn h_half_gain() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = SyntheticSpec {
        r_star: Some(0.0),
        q_star: None,
        amplitude: None,
    };
    let report = run_experiment(&torus_experiment(
        ExperimentKind::NscDecay,
        data,
        vec![10.0],
        dir.path(),
    ))
    .map_err(|e| e.to_string())?;
    let find = |norm: &str| {
        report
            .fits
            .iter()
            .find(|f| f.norm == norm && f.label.ends_with(":h_half_data"))
            .map(|f| f.beta)
            .unwrap_or(f64::NAN)
    };
    let (l2, hh) = (find("l2_sq"), find("hhalf_sq"));
    check(
        l2 >= 1.5 - 0.15 && hh >= 2.0 - 0.15,
        format!("NSC Ω=10, r*=0: β(L²)={l2:.3} (≥ 1.35), β(Ḣ^1/2)={hh:.3} (≥ 1.85)"),
    )
}

fn picard_vs_stepper() -> Outcome {
    let grid = Grid::new(32, 8.0 * PI).unwrap();
    let u0 = dealias(&synthesize_with_character(0.0, grid, 21, 0.05).unwrap());
    let p = RotationParams::new(10.0).unwrap();
    let picard = picard_solve(&u0, 0.25, 30, 32, p).map_err(|e| e.to_string())?;
    let stepper = Integrator::new(grid, 0.25 / 64.0, p, true, true).map_err(|e| e.to_string())?;
    let mut u = u0.clone();
    for _ in 0..64 {
        u = stepper.step(&u).map_err(|e| e.to_string())?;
    }
    let diff = (sobolev_seminorm_sq(&picard.solution.sub(&u).unwrap(), 0.5)
        / sobolev_seminorm_sq(&u, 0.5))
    .sqrt();
    check(
        diff <= 1e-6,
        format!(
            "n=32, T=0.25, Ω=10: relative Ḣ^1/2 difference {diff:.1e} after {} Picard sweeps",
            picard.iterations
        ),
    )
}

fn bilinear_empirics() -> Outcome {
    let grid = Grid::new(16, 4.0 * PI).unwrap();
    let u = dealias(&synthesize_with_hhalf_character(0.3, grid, 2, 1.0).unwrap());
    let base = bilinear_ratio(&u).unwrap();
    let scale_err = [1e-6, 0.37, 5.0, 1e4]
        .iter()
        .map(|&l| (bilinear_ratio(&u.scaled(l)).unwrap() - base).abs() / base.abs())
        .fold(0.0, f64::max);
    let triads = Grid::new(8, 2.0 * PI).unwrap();
    let a = empirical_ratio_sup(triads, 1000, 101).unwrap();
    let b = empirical_ratio_sup(triads, 1000, 202).unwrap();
    let drift = (a - b).abs() / a.max(b);
    check(
        scale_err <= 1e-12 && a.is_finite() && b.is_finite() && drift <= 0.05,
        format!("scaling error {scale_err:.1e}; sup over 1000 triad fields: {a:.4e} vs {b:.4e} (drift {:.2}%)", 100.0 * drift),
    )
}
