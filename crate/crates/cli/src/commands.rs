//! The four subcommands as library functions returning structured results.

use num_complex::Complex64 as C64;
use qsteer_core::propagator::to_adiabatic;
use qsteer_core::strategies::{ae_t_epsilon, lz_edge_leakage, lz_steps, lz_window, DEFAULT_S_MAX};
use qsteer_core::{
    analytic_sweep, error_probability, propagate_final, robustness_set, sweep, ErrorMap, ParameterBox,
    RobustnessReport, StrategyKind, StrategySpec, SweepOptions, TimeGrid,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::csv;
use crate::error::CliError;
use crate::fit::{log_uniform, ols, LinearFit};

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub s_start: f64,
    pub s_end: f64,
    pub steps: usize,
}

impl From<TimeGrid> for GridSummary {
    fn from(g: TimeGrid) -> Self {
        Self { s_start: g.s_start(), s_end: g.s_end(), steps: g.steps() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub strategy: String,
    pub parameter_names: [&'static str; 2],
    pub theta: [f64; 2],
    pub horizon: f64,
    pub grid: GridSummary,
    /// `[re, im]` per basis state.
    pub final_amplitudes: Vec<[f64; 2]>,
    pub perr: f64,
    pub analytic_perr: Option<f64>,
    /// Populations of the instantaneous eigenstates at the final grid point;
    /// absent where the Hamiltonian is degenerate.
    pub adiabatic_populations: Option<Vec<f64>>,
}

pub fn simulate(cfg: &RunConfig) -> Result<SimulateSummary, CliError> {
    let spec = &cfg.strategy;
    let theta = spec.theta();
    let grid = spec.grid();
    let last = propagate_final(&spec.plant(), &theta, &cfg.initial, &grid, spec.horizon())?;
    let perr = error_probability(&last, &cfg.target)?;
    let analytic_perr =
        if spec.kind().has_closed_form() && is_flip(cfg) { spec.analytic_perr(&theta).ok() } else { None };
    let adiabatic_populations = to_adiabatic(&spec.path(), grid.s_end(), &last).ok().map(|phi| phi.populations());
    Ok(SimulateSummary {
        strategy: spec.kind().to_string(),
        parameter_names: spec.parameter_names(),
        theta,
        horizon: spec.horizon(),
        grid: grid.into(),
        final_amplitudes: last.amplitudes().iter().map(|c: &C64| [c.re, c.im]).collect(),
        perr,
        analytic_perr,
        adiabatic_populations,
    })
}

/// The closed forms describe the flip from basis state 0 to basis state 1.
fn is_flip(cfg: &RunConfig) -> bool {
    let e = |k| qsteer_core::QuantumState::basis(2, k).expect("2-level basis");
    cfg.initial == e(0) && cfg.target == e(1)
}

fn require_box(cfg: &RunConfig, command: &str) -> Result<(ParameterBox, Vec<usize>), CliError> {
    let b = cfg.param_box.clone().ok_or_else(|| CliError::missing("box", command))?;
    let r = cfg.resolution.clone().ok_or_else(|| CliError::missing("resolution", command))?;
    Ok((b, r))
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub map: ErrorMap,
    pub report: RobustnessReport,
    pub csv: String,
}

impl SweepOutcome {
    /// 0 when robust, 1 otherwise (including failed cells).
    pub fn exit_code(&self) -> i32 {
        if self.report.is_robust {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    pub strategy: String,
    pub parameter_names: [&'static str; 2],
    pub epsilon: f64,
    pub inside_fraction: f64,
    pub is_robust: bool,
    pub worst_theta: Vec<f64>,
    pub p_max: f64,
    pub resolution: Vec<usize>,
    pub failed_cells: usize,
}

impl ReportSummary {
    pub fn new(spec: &StrategySpec, r: &RobustnessReport) -> Self {
        Self {
            strategy: spec.describe(),
            parameter_names: spec.parameter_names(),
            epsilon: r.epsilon,
            inside_fraction: r.inside_fraction,
            is_robust: r.is_robust,
            worst_theta: r.worst_theta.clone(),
            p_max: r.worst_perr,
            resolution: r.resolution.clone(),
            failed_cells: r.failed_cells,
        }
    }
}

pub fn sweep_cmd(cfg: &RunConfig, options: SweepOptions) -> Result<SweepOutcome, CliError> {
    let (param_box, resolution) = require_box(cfg, "sweep")?;
    let epsilon = cfg.epsilon.ok_or_else(|| CliError::missing("epsilon", "sweep"))?;
    let map = sweep(&cfg.strategy, &param_box, &resolution, &cfg.initial, &cfg.target, options)?;
    let (_, report) = robustness_set(&map, epsilon)?;
    let csv = csv::encode_map(&map);
    Ok(SweepOutcome { map, report, csv })
}

pub const COMPARE_HEADER: [&str; 5] = ["theta1", "theta2", "numeric", "analytic", "abs_diff"];

#[derive(Debug, Clone, Serialize)]
pub struct LzFitPoint {
    pub horizon: f64,
    pub s_max: f64,
    pub steps: usize,
    pub perr: f64,
    pub edge_leakage: f64,
    pub used: bool,
}

/// Decay of the numeric Landau-Zener error with the horizon.
#[derive(Debug, Clone, Serialize)]
pub struct LzFit {
    pub points: Vec<LzFitPoint>,
    /// OLS of `ln P` against `T`.
    pub fitted_slope: Option<LinearFit>,
    /// OLS of `ln P` against `T^2`.
    pub fitted_slope_t2: Option<LinearFit>,
    /// `-pi omega0^2 / delta0^2`, the exponent coefficient of the closed-form estimate.
    pub printed_slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareSummary {
    pub strategy: String,
    pub parameter_names: [&'static str; 2],
    pub rows: usize,
    pub max_abs_diff: f64,
    pub lz_fit: Option<LzFit>,
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub rows: Vec<[f64; 5]>,
    pub csv: String,
    pub summary: CompareSummary,
}

/// Numeric against closed-form error probabilities over the box (or at the
/// nominal point), plus the Landau-Zener decay fit.
pub fn compare(cfg: &RunConfig, options: SweepOptions) -> Result<CompareOutcome, CliError> {
    let spec = &cfg.strategy;
    if !spec.kind().has_closed_form() {
        return Err(CliError::Unsupported(format!("compare needs a built-in strategy, got {}", spec.kind())));
    }
    if !is_flip(cfg) {
        return Err(CliError::Config {
            path: "initial".into(),
            message: "compare evaluates the 0 -> 1 flip; initial and target must be basis states 0 and 1".into(),
        });
    }
    let rows: Vec<[f64; 5]> = match (&cfg.param_box, &cfg.resolution) {
        (Some(param_box), Some(resolution)) => {
            let numeric = sweep(spec, param_box, resolution, &cfg.initial, &cfg.target, options)?;
            let analytic = analytic_sweep(spec, param_box, resolution)?;
            numeric
                .cells()
                .zip(analytic.values())
                .map(|((theta, n), &a)| [theta[0], theta[1], n, a, (n - a).abs()])
                .collect()
        }
        _ => {
            let theta = spec.theta();
            let last = propagate_final(&spec.plant(), &theta, &cfg.initial, &spec.grid(), spec.horizon())?;
            let n = error_probability(&last, &cfg.target)?;
            let a = spec.analytic_perr(&theta)?;
            vec![[theta[0], theta[1], n, a, (n - a).abs()]]
        }
    };
    let max_abs_diff =
        rows.iter().map(|r| r[4]).fold(0.0, |m: f64, d| if m.is_nan() || d.is_nan() { f64::NAN } else { m.max(d) });
    let lz_fit = if spec.kind() == StrategyKind::LandauZener { Some(lz_decay_fit(cfg)?) } else { None };
    let csv = csv::encode(&COMPARE_HEADER, rows.iter().map(|r| r.to_vec()));
    let summary = CompareSummary {
        strategy: spec.describe(),
        parameter_names: spec.parameter_names(),
        rows: rows.len(),
        max_abs_diff,
        lz_fit,
    };
    Ok(CompareOutcome { rows, csv, summary })
}

/// Error probabilities below this are numeric noise.
pub const FIT_FLOOR: f64 = 1e-14;

/// Numeric LZ error over log-uniform horizons, each on a window wide enough
/// that the edge leakage stays small; points within a decade of the leakage
/// estimate (or below [`FIT_FLOOR`]) are not fitted.
pub fn lz_decay_fit(cfg: &RunConfig) -> Result<LzFit, CliError> {
    let spec = &cfg.strategy;
    let c = &cfg.compare;
    let (d0, o0) = (spec.delta0(), spec.omega0());
    let s_min = spec.grid().s_end().abs().max(spec.grid().s_start().abs()).max(DEFAULT_S_MAX);
    let mut points = Vec::with_capacity(c.t_points);
    for t in log_uniform(c.t_min, c.t_max, c.t_points) {
        let s_max = lz_window(d0, o0, t, c.window_factor, s_min)?;
        let grid = TimeGrid::symmetric(s_max, lz_steps(d0, s_max, c.max_step_phase, c.fit_steps))?;
        let run = spec.with_horizon(t)?.with_grid(grid)?;
        let last = propagate_final(&run.plant(), &run.theta(), &cfg.initial, &grid, t)?;
        let perr = error_probability(&last, &cfg.target)?;
        let edge_leakage = lz_edge_leakage(d0, o0, t, s_max);
        let used = perr > FIT_FLOOR.max(10.0 * edge_leakage);
        points.push(LzFitPoint { horizon: t, s_max, steps: grid.steps(), perr, edge_leakage, used });
    }
    let used: Vec<&LzFitPoint> = points.iter().filter(|p| p.used).collect();
    let ln_p: Vec<f64> = used.iter().map(|p| p.perr.ln()).collect();
    let t: Vec<f64> = used.iter().map(|p| p.horizon).collect();
    let t2: Vec<f64> = t.iter().map(|x| x * x).collect();
    Ok(LzFit {
        fitted_slope: ols(&t, &ln_p),
        fitted_slope_t2: ols(&t2, &ln_p),
        printed_slope: -std::f64::consts::PI * o0 * o0 / (d0 * d0),
        points,
    })
}

pub fn teps(epsilon: f64, delta0: f64, omega0: f64) -> Result<f64, CliError> {
    ae_t_epsilon(epsilon, delta0, omega0).map_err(|e| CliError::Config { path: "teps".into(), message: e.to_string() })
}
