//! Fixed pulse shapes `Phi(s)`, `Lambda(s)` with exact derivatives, and the
//! two-level control path `(Delta(s), Omega(s))` built from them.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// A fixed envelope in scaled time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Constant(f64),
    /// `sin(pi s)`
    SinePi,
    Gaussian {
        center: f64,
        width: f64,
    },
    Sech,
    Tanh,
    /// `slope * s`
    Linear {
        slope: f64,
    },
}

impl Envelope {
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            Envelope::Constant(c) => c,
            Envelope::SinePi => (PI * s).sin(),
            Envelope::Gaussian { center, width } => {
                let x = (s - center) / width;
                (-0.5 * x * x).exp()
            }
            Envelope::Sech => sech(s),
            Envelope::Tanh => s.tanh(),
            Envelope::Linear { slope } => slope * s,
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            Envelope::Constant(_) => 0.0,
            Envelope::SinePi => PI * (PI * s).cos(),
            Envelope::Gaussian { center, width } => {
                let x = (s - center) / width;
                -x / width * (-0.5 * x * x).exp()
            }
            Envelope::Sech => -sech(s) * s.tanh(),
            Envelope::Tanh => sech(s).powi(2),
            Envelope::Linear { slope } => slope,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Envelope::Constant(_) => "constant",
            Envelope::SinePi => "sine",
            Envelope::Gaussian { .. } => "gaussian",
            Envelope::Sech => "sech",
            Envelope::Tanh => "tanh",
            Envelope::Linear { .. } => "linear",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Envelope::Constant(c) if !c.is_finite() => invalid("constant envelope must be finite"),
            Envelope::Gaussian { center, width } if !center.is_finite() || !(width > 0.0 && width.is_finite()) => {
                invalid("gaussian envelope needs a finite center and a positive width")
            }
            Envelope::Linear { slope } if !slope.is_finite() => invalid("linear envelope slope must be finite"),
            _ => Ok(()),
        }
    }

    /// `int_{a}^{b} envelope(s) ds`.
    ///
    /// Closed forms where they exist; otherwise composite Simpson with
    /// doubling until successive estimates agree to 1e-13 (relative to the
    /// magnitude of the integral, floored at one).
    pub fn area(&self, a: f64, b: f64) -> f64 {
        match *self {
            Envelope::Constant(c) => c * (b - a),
            Envelope::SinePi => ((PI * a).cos() - (PI * b).cos()) / PI,
            Envelope::Sech => gd(b) - gd(a),
            Envelope::Tanh => ln_cosh(b) - ln_cosh(a),
            Envelope::Linear { slope } => 0.5 * slope * (b * b - a * a),
            Envelope::Gaussian { .. } => simpson_refined(|s| self.value(s), a, b, 1e-13),
        }
    }
}

/// Gudermannian function, the antiderivative of sech.
fn gd(x: f64) -> f64 {
    2.0 * (x * 0.5).tanh().atan()
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

pub(crate) fn sech(x: f64) -> f64 {
    // 1/cosh overflows gracefully to 0 for large |x|
    1.0 / x.cosh()
}

/// Composite Simpson on `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 1 { n + 1 } else { n.max(2) };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Simpson with panel doubling until two successive estimates agree.
pub fn simpson_refined(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut n = 64;
    let mut prev = simpson(&f, a, b, n);
    loop {
        n *= 2;
        let next = simpson(&f, a, b, n);
        if (next - prev).abs() <= tol * next.abs().max(1.0) || n >= 1 << 22 {
            return next;
        }
        prev = next;
    }
}

/// An envelope multiplied by an amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledEnvelope {
    pub amplitude: f64,
    pub envelope: Envelope,
}

impl ScaledEnvelope {
    pub fn new(amplitude: f64, envelope: Envelope) -> Self {
        Self { amplitude, envelope }
    }

    pub fn zero() -> Self {
        Self { amplitude: 0.0, envelope: Envelope::Constant(0.0) }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.amplitude * self.envelope.value(s)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        self.amplitude * self.envelope.derivative(s)
    }
}

/// Detuning and coupling of a two-level strategy as functions of scaled time,
/// for the Hamiltonian `[[-Delta, Omega], [Omega, Delta]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelPath {
    pub detuning: ScaledEnvelope,
    pub coupling: ScaledEnvelope,
}

impl TwoLevelPath {
    pub fn new(detuning: ScaledEnvelope, coupling: ScaledEnvelope) -> Self {
        Self { detuning, coupling }
    }

    /// `(Delta(s), Omega(s))`
    pub fn at(&self, s: f64) -> (f64, f64) {
        (self.detuning.value(s), self.coupling.value(s))
    }

    /// `(dDelta/ds, dOmega/ds)`
    pub fn derivative_at(&self, s: f64) -> (f64, f64) {
        (self.detuning.derivative(s), self.coupling.derivative(s))
    }

    /// Instantaneous eigenvalue `sqrt(Delta^2 + Omega^2)`.
    pub fn energy_at(&self, s: f64) -> f64 {
        let (d, o) = self.at(s);
        d.hypot(o)
    }
}
