//! The bilinear control model `H(t) = H0 + sum_j u_j(theta, t) H_j`.
//!
//! A [`Plant`] pairs the drift `H0` and control operators `H_j` with the
//! parametrized control functions `u_j(theta, t)`. Parameter uncertainty can
//! be moved out of the controls and into the drift with
//! [`Plant::perturbed`]: the resulting plant has drift
//! `H0 + Delta H_u(theta, t)` and, driven at the nominal `theta*`, produces
//! exactly the Hamiltonian of the original plant at `theta`.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::linalg::HermitianOperator;

type ControlFn = dyn Fn(&[f64], f64) -> f64 + Send + Sync;

/// A deterministic real control signal `u(theta, t)`.
#[derive(Clone)]
pub struct ControlFunction {
    name: String,
    envelope: String,
    f: Arc<ControlFn>,
}

impl ControlFunction {
    pub fn new(
        name: impl Into<String>,
        envelope: impl Into<String>,
        f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), envelope: envelope.into(), f: Arc::new(f) }
    }

    /// The identically zero control.
    pub fn zero(name: impl Into<String>) -> Self {
        Self::new(name, "zero", |_, _| 0.0)
    }

    pub fn evaluate(&self, theta: &[f64], t: f64) -> f64 {
        (self.f)(theta, t)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn envelope(&self) -> &str {
        &self.envelope
    }
}

impl fmt::Debug for ControlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlFunction")
            .field("name", &self.name)
            .field("envelope", &self.envelope)
            .finish_non_exhaustive()
    }
}

/// Closed box approximating the parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ParameterBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return invalid(format!(
                "box bounds must be non-empty and of equal length, got {} and {}",
                lower.len(),
                upper.len()
            ));
        }
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return invalid(format!("box axis {k}: need finite lower < upper, got [{lo}, {hi}]"));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The box `[center - half_width, center + half_width]` on each axis.
    pub fn centered(center: &[f64], half_width: &[f64]) -> Result<Self> {
        if center.len() != half_width.len() {
            return invalid("center and half-width lengths differ");
        }
        Self::new(
            center.iter().zip(half_width).map(|(c, w)| c - w).collect(),
            center.iter().zip(half_width).map(|(c, w)| c + w).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim() && theta.iter().enumerate().all(|(k, &x)| self.lower[k] <= x && x <= self.upper[k])
    }

    /// Sample points along axis `k`: inclusive linspace for `resolution >= 2`,
    /// the axis midpoint for `resolution == 1`.
    pub fn axis(&self, k: usize, resolution: usize) -> Vec<f64> {
        let (lo, hi) = (self.lower[k], self.upper[k]);
        match resolution {
            0 => Vec::new(),
            1 => vec![0.5 * (lo + hi)],
            r => {
                let step = (hi - lo) / (r - 1) as f64;
                (0..r).map(|i| if i == r - 1 { hi } else { lo + step * i as f64 }).collect()
            }
        }
    }
}

/// `Delta H_u` folded into the drift: `sum_j H_j (u_j(theta, t) - u_j(theta*, t))`.
#[derive(Debug, Clone, PartialEq)]
struct UncertaintyShift {
    theta: Vec<f64>,
    theta_star: Vec<f64>,
}

/// A plant `(H0, H1..Hm)` together with its control functions.
#[derive(Debug, Clone)]
pub struct Plant {
    drift: HermitianOperator,
    shifts: Vec<UncertaintyShift>,
    control_ops: Vec<HermitianOperator>,
    control_fns: Vec<ControlFunction>,
    n_params: usize,
}

impl Plant {
    pub fn new(
        drift: HermitianOperator,
        control_ops: Vec<HermitianOperator>,
        control_fns: Vec<ControlFunction>,
        n_params: usize,
    ) -> Result<Self> {
        let n = drift.dim();
        if let Some((j, op)) = control_ops.iter().enumerate().find(|(_, op)| op.dim() != n) {
            return invalid(format!("control operator {j} has dimension {}, drift has {n}", op.dim()));
        }
        if control_ops.len() != control_fns.len() {
            return invalid(format!(
                "{} control operators but {} control functions",
                control_ops.len(),
                control_fns.len()
            ));
        }
        Ok(Self { drift, shifts: Vec::new(), control_ops, control_fns, n_params })
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    pub fn parameter_count(&self) -> usize {
        self.n_params
    }

    pub fn control_count(&self) -> usize {
        self.control_ops.len()
    }

    pub fn control_ops(&self) -> &[HermitianOperator] {
        &self.control_ops
    }

    pub fn control_fns(&self) -> &[ControlFunction] {
        &self.control_fns
    }

    /// The static part `H0` of the drift.
    pub fn base_drift(&self) -> &HermitianOperator {
        &self.drift
    }

    fn check_theta(&self, theta: &[f64], what: &str) -> Result<()> {
        if theta.len() != self.n_params {
            return invalid(format!("{what} has length {}, plant expects {}", theta.len(), self.n_params));
        }
        Ok(())
    }

    fn controls_at(&self, theta: &[f64], t: f64) -> Result<Vec<f64>> {
        self.control_fns
            .iter()
            .enumerate()
            .map(|(index, u)| {
                let value = u.evaluate(theta, t);
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::ControlEvaluation { index, t, value })
                }
            })
            .collect()
    }

    /// The drift at time `t`, including any transferred uncertainty.
    pub fn drift_at(&self, t: f64) -> Result<HermitianOperator> {
        let mut h = self.drift.clone();
        for shift in &self.shifts {
            let delta = self.uncertainty_term(&shift.theta, &shift.theta_star, t)?;
            h.add_scaled_in_place(&delta, 1.0)?;
        }
        Ok(h)
    }

    /// `H(t) = drift(t) + sum_j u_j(theta, t) H_j`.
    pub fn hamiltonian_at(&self, theta: &[f64], t: f64) -> Result<HermitianOperator> {
        self.check_theta(theta, "theta")?;
        let mut h = self.drift_at(t)?;
        for (op, u) in self.control_ops.iter().zip(self.controls_at(theta, t)?) {
            h.add_scaled_in_place(op, u)?;
        }
        Ok(h)
    }

    fn uncertainty_term(&self, theta: &[f64], theta_star: &[f64], t: f64) -> Result<HermitianOperator> {
        let actual = self.controls_at(theta, t)?;
        let nominal = self.controls_at(theta_star, t)?;
        let mut delta = HermitianOperator::zeros(self.dim());
        for ((op, u), u_star) in self.control_ops.iter().zip(actual).zip(nominal) {
            delta.add_scaled_in_place(op, u - u_star)?;
        }
        Ok(delta)
    }

    /// `Delta H_u(theta, t) = sum_j H_j (u_j(theta, t) - u_j(theta*, t))`.
    pub fn transfer_uncertainty(&self, theta: &[f64], theta_star: &[f64], t: f64) -> Result<HermitianOperator> {
        self.check_theta(theta, "theta")?;
        self.check_theta(theta_star, "theta*")?;
        self.uncertainty_term(theta, theta_star, t)
    }

    /// The plant with drift `H0 + Delta H_u(theta, t)`.
    ///
    /// Its control functions are unchanged, so evaluating it at `theta_star`
    /// reproduces the original plant at `theta`.
    pub fn perturbed(&self, theta: &[f64], theta_star: &[f64]) -> Result<Plant> {
        self.check_theta(theta, "theta")?;
        self.check_theta(theta_star, "theta*")?;
        let mut out = self.clone();
        if theta != theta_star {
            out.shifts.push(UncertaintyShift { theta: theta.to_vec(), theta_star: theta_star.to_vec() });
        }
        Ok(out)
    }
}
