//! Error probability, parameter-box sweeps and epsilon-robustness sets.
//!
//! A sweep evaluates `P_err(theta, T) = 1 - |<target|psi(T, theta)>|^2` on an
//! inclusive grid over a [`ParameterBox`]. The epsilon-robustness set is the
//! set of sampled cells with `P_err <= epsilon`; a strategy is reported
//! robust when every sampled cell is inside it. That verdict is only as good
//! as the grid: it can refute robustness over the box, never certify it.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::linalg::{overlap, QuantumState};
use crate::plant::{ParameterBox, Plant};
use crate::propagator::{propagate_final, TimeGrid};
use crate::strategies::StrategySpec;

/// `1 - |<target|final>|^2`, clamped to `[0, 1]`.
pub fn error_probability(final_state: &QuantumState, target: &QuantumState) -> Result<f64> {
    let p = overlap(target, final_state)?.norm_sqr();
    Ok((1.0 - p).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
}

/// A cell whose evaluation failed; its value is stored as NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub index: usize,
    pub theta: Vec<f64>,
    pub message: String,
}

/// `P_err` sampled on a grid over a parameter box.
///
/// Cells are stored row-major with the first axis outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMap {
    param_box: ParameterBox,
    resolution: Vec<usize>,
    axes: Vec<Vec<f64>>,
    values: Vec<f64>,
    horizon: f64,
    strategy: String,
    failures: Vec<CellFailure>,
}

impl ErrorMap {
    /// Wraps precomputed values. NaN values are recorded as failed cells.
    pub fn from_values(
        param_box: ParameterBox,
        resolution: Vec<usize>,
        values: Vec<f64>,
        horizon: f64,
        strategy: impl Into<String>,
    ) -> Result<Self> {
        let axes = grid_axes(&param_box, &resolution)?;
        let expected: usize = resolution.iter().product();
        if values.len() != expected {
            return invalid(format!("expected {expected} values, got {}", values.len()));
        }
        let mut map = Self {
            param_box,
            resolution,
            axes,
            values: Vec::new(),
            horizon,
            strategy: strategy.into(),
            failures: Vec::new(),
        };
        for (index, v) in values.iter().enumerate() {
            if v.is_nan() {
                map.failures.push(CellFailure { index, theta: map.theta(index), message: "missing value".into() });
            }
        }
        map.values = values.into_iter().map(|v| if v.is_nan() { v } else { v.clamp(0.0, 1.0) }).collect();
        Ok(map)
    }

    pub fn param_box(&self) -> &ParameterBox {
        &self.param_box
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn strategy(&self) -> &str {
        &self.strategy
    }

    pub fn failures(&self) -> &[CellFailure] {
        &self.failures
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Parameter vector of cell `index`.
    pub fn theta(&self, index: usize) -> Vec<f64> {
        cell_theta(&self.axes, &self.resolution, index)
    }

    /// `(theta, value)` for every cell in storage order.
    pub fn cells(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.theta(i), v))
    }
}

fn grid_axes(param_box: &ParameterBox, resolution: &[usize]) -> Result<Vec<Vec<f64>>> {
    if resolution.len() != param_box.dim() {
        return invalid(format!("resolution has {} axes, box has {}", resolution.len(), param_box.dim()));
    }
    if let Some(k) = resolution.iter().position(|&r| r == 0) {
        return invalid(format!("resolution along axis {k} must be positive"));
    }
    Ok((0..param_box.dim()).map(|k| param_box.axis(k, resolution[k])).collect())
}

fn cell_theta(axes: &[Vec<f64>], resolution: &[usize], mut index: usize) -> Vec<f64> {
    let mut theta = vec![0.0; axes.len()];
    for k in (0..axes.len()).rev() {
        theta[k] = axes[k][index % resolution[k]];
        index /= resolution[k];
    }
    theta
}

fn evaluate_cells<F>(
    axes: &[Vec<f64>],
    resolution: &[usize],
    options: SweepOptions,
    cell: F,
) -> Result<Vec<Result<f64>>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let count: usize = resolution.iter().product();
    let run = || (0..count).into_par_iter().map(|i| cell(&cell_theta(axes, resolution, i))).collect();
    if options.threads == 0 {
        Ok(run())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.threads)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot build thread pool: {e}")))?;
        Ok(pool.install(run))
    }
}

fn collect_map(
    param_box: &ParameterBox,
    resolution: &[usize],
    axes: Vec<Vec<f64>>,
    results: Vec<Result<f64>>,
    horizon: f64,
    strategy: String,
) -> ErrorMap {
    let mut failures = Vec::new();
    let values = results
        .into_iter()
        .enumerate()
        .map(|(index, r)| match r {
            Ok(v) if v.is_finite() => v.clamp(0.0, 1.0),
            Ok(v) => {
                failures.push(CellFailure {
                    index,
                    theta: cell_theta(&axes, resolution, index),
                    message: format!("non-finite error probability {v}"),
                });
                f64::NAN
            }
            Err(e) => {
                failures.push(CellFailure {
                    index,
                    theta: cell_theta(&axes, resolution, index),
                    message: e.to_string(),
                });
                f64::NAN
            }
        })
        .collect();
    ErrorMap {
        param_box: param_box.clone(),
        resolution: resolution.to_vec(),
        axes,
        values,
        horizon,
        strategy,
        failures,
    }
}

/// Propagates `plant` from `psi0` at every grid point of `param_box` and
/// records the error probability with respect to `target`.
#[allow(clippy::too_many_arguments)]
pub fn sweep_plant(
    plant: &Plant,
    param_box: &ParameterBox,
    resolution: &[usize],
    psi0: &QuantumState,
    target: &QuantumState,
    grid: &TimeGrid,
    horizon: f64,
    options: SweepOptions,
    descriptor: impl Into<String>,
) -> Result<ErrorMap> {
    if param_box.dim() != plant.parameter_count() {
        return invalid(format!("box has {} parameters, plant expects {}", param_box.dim(), plant.parameter_count()));
    }
    if psi0.dim() != plant.dim() || target.dim() != plant.dim() {
        return invalid(format!(
            "state dimensions ({}, {}) do not match plant dimension {}",
            psi0.dim(),
            target.dim(),
            plant.dim()
        ));
    }
    let axes = grid_axes(param_box, resolution)?;
    let results = evaluate_cells(&axes, resolution, options, |theta| {
        let last = propagate_final(plant, theta, psi0, grid, horizon)?;
        error_probability(&last, target)
    })?;
    Ok(collect_map(param_box, resolution, axes, results, horizon, descriptor.into()))
}

/// Numeric sweep of a built-in or custom two-level strategy.
pub fn sweep(
    spec: &StrategySpec,
    param_box: &ParameterBox,
    resolution: &[usize],
    psi0: &QuantumState,
    target: &QuantumState,
    options: SweepOptions,
) -> Result<ErrorMap> {
    sweep_plant(
        &spec.plant(),
        param_box,
        resolution,
        psi0,
        target,
        &spec.grid(),
        spec.horizon(),
        options,
        spec.describe(),
    )
}

/// Closed-form error probabilities on the same grid as [`sweep`].
pub fn analytic_sweep(spec: &StrategySpec, param_box: &ParameterBox, resolution: &[usize]) -> Result<ErrorMap> {
    if !spec.kind().has_closed_form() {
        return Err(Error::Unsupported(format!("{} strategy has no closed form", spec.kind())));
    }
    if param_box.dim() != 2 {
        return invalid(format!("box has {} parameters, strategy expects 2", param_box.dim()));
    }
    let axes = grid_axes(param_box, resolution)?;
    let count: usize = resolution.iter().product();
    let results = (0..count).map(|i| spec.analytic_perr(&cell_theta(&axes, resolution, i))).collect();
    Ok(collect_map(param_box, resolution, axes, results, spec.horizon(), format!("analytic {}", spec.describe())))
}

/// Summary of an epsilon-robustness evaluation over a sampled map.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub epsilon: f64,
    /// Fraction of cells with `P_err <= epsilon`; failed cells count as outside.
    pub inside_fraction: f64,
    /// True iff every sampled cell is inside and none failed.
    pub is_robust: bool,
    /// Argmax of `P_err` over the successful cells (empty if none succeeded).
    pub worst_theta: Vec<f64>,
    pub worst_perr: f64,
    pub resolution: Vec<usize>,
    pub failed_cells: usize,
}

fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some(b) if values[b] >= v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Indicator of `P_err <= epsilon` per cell, plus the summary report.
pub fn robustness_set(map: &ErrorMap, epsilon: f64) -> Result<(Vec<bool>, RobustnessReport)> {
    if !(0.0..1.0).contains(&epsilon) {
        return invalid(format!("epsilon must lie in [0, 1), got {epsilon}"));
    }
    let inside: Vec<bool> = map.values.iter().map(|&v| v <= epsilon).collect();
    let count = inside.iter().filter(|&&b| b).count();
    let failed_cells = map.values.iter().filter(|v| v.is_nan()).count();
    let (worst_theta, worst_perr) = match argmax(&map.values) {
        Some(i) => (map.theta(i), map.values[i]),
        None => (Vec::new(), f64::NAN),
    };
    let report = RobustnessReport {
        epsilon,
        inside_fraction: if inside.is_empty() { 0.0 } else { count as f64 / inside.len() as f64 },
        is_robust: !inside.is_empty() && count == inside.len() && failed_cells == 0,
        worst_theta,
        worst_perr,
        resolution: map.resolution.clone(),
        failed_cells,
    };
    Ok((inside, report))
}

/// Grid argmax of `P_err`, first in storage order on ties.
pub fn worst_case(map: &ErrorMap) -> Result<(Vec<f64>, f64)> {
    if map.is_empty() {
        return invalid("worst case of an empty map");
    }
    if let Some(f) = map.failures.first() {
        return invalid(format!("map has {} failed cells (first at {:?})", map.failures.len(), f.theta));
    }
    let i = argmax(&map.values).expect("non-empty map without failures");
    Ok((map.theta(i), map.values[i]))
}
