//! Run configuration: a TOML file validated field by field.
//!
//! ```toml
//! resolution = [33, 33]        # sweep / compare grid
//! epsilon = 1e-3               # sweep threshold, teps target
//! initial = 0                  # basis index or [[re, im], ...]
//! target = 1
//! output = "map.csv"
//!
//! [strategy]
//! kind = "allen-eberly"        # resonance | landau-zener | allen-eberly | custom
//! delta0 = 1.0
//! omega0 = 1.0
//! horizon = 1.0
//! envelope = "constant"        # coupling envelope (resonance, custom)
//! detuning_envelope = "tanh"   # custom only
//!
//! [grid]                       # optional; defaults depend on the strategy
//! s_max = 8.0                  # or s_start / s_end
//! steps = 4000
//!
//! [box]
//! lower = [0.5, 0.5]
//! upper = [2.0, 2.0]
//!
//! [compare]                    # Landau-Zener decay fit
//! t_min = 0.1                  # default 0.1 * delta0 / omega0
//! t_max = 1.5                  # default 1.5 * delta0 / omega0
//! t_points = 8
//! window_factor = 64.0
//! fit_steps = 200000           # minimum steps per horizon
//! max_step_phase = 8.0
//! ```
//!
//! Envelopes are either a bare shape name or a table such as
//! `{ shape = "gaussian", center = 0.5, width = 0.1 }`.

use std::collections::BTreeSet;
use std::path::PathBuf;

use num_complex::Complex64 as C64;
use qsteer_core::{Envelope, ParameterBox, QuantumState, Strategy, StrategyKind, StrategySpec, TimeGrid};
use toml::{Table, Value};

use crate::error::CliError;

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub steps: Option<usize>,
    pub s_max: Option<f64>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareSettings {
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    /// Landau-Zener window half-width is at least `window_factor * T omega0 / delta0^2`.
    pub window_factor: f64,
    /// Minimum steps per fitted horizon.
    pub fit_steps: usize,
    /// Cap on the edge phase per step; wide windows get more steps.
    pub max_step_phase: f64,
}

impl CompareSettings {
    /// Horizons from `0.1` to `1.5` times `delta0 / omega0`, where the
    /// transition error falls from near 1 to about `1e-3`.
    pub fn for_amplitudes(delta0: f64, omega0: f64) -> Self {
        let scale = if delta0 > 0.0 && omega0 > 0.0 { delta0 / omega0 } else { 1.0 };
        Self {
            t_min: 0.1 * scale,
            t_max: 1.5 * scale,
            t_points: 8,
            window_factor: 64.0,
            fit_steps: 200_000,
            max_step_phase: 8.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub strategy: StrategySpec,
    pub param_box: Option<ParameterBox>,
    pub resolution: Option<Vec<usize>>,
    pub epsilon: Option<f64>,
    pub initial: QuantumState,
    pub target: QuantumState,
    pub output: Option<PathBuf>,
    pub compare: CompareSettings,
}

fn err<T>(path: &str, message: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config { path: path.to_string(), message: message.into() })
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

/// A TOML table with field-path aware accessors.
struct Fields<'a> {
    table: &'a Table,
    prefix: String,
    allowed: &'static [&'static str],
}

impl<'a> Fields<'a> {
    fn new(table: &'a Table, prefix: &str, allowed: &'static [&'static str]) -> Result<Self, CliError> {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                return err(&join(prefix, key), format!("unknown field (expected one of: {})", allowed.join(", ")));
            }
        }
        Ok(Self { table, prefix: prefix.to_string(), allowed })
    }

    fn path(&self, key: &str) -> String {
        debug_assert!(self.allowed.contains(&key));
        join(&self.prefix, key)
    }

    fn value(&self, key: &str) -> Option<&'a Value> {
        self.table.get(key)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.value(key) {
            None => Ok(None),
            Some(v) => as_f64(v, &self.path(key)).map(Some),
        }
    }

    fn finite(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.f64(key)? {
            Some(x) if !x.is_finite() => err(&self.path(key), format!("must be finite, got {x}")),
            other => Ok(other),
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.value(key) {
            None => Ok(None),
            Some(v) => as_usize(v, &self.path(key)).map(Some),
        }
    }

    fn str(&self, key: &str) -> Result<Option<&'a str>, CliError> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => err(&self.path(key), format!("expected a string, got {}", other.type_str())),
        }
    }

    fn table(&self, key: &str, allowed: &'static [&'static str]) -> Result<Option<Fields<'a>>, CliError> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::Table(t)) => Fields::new(t, &self.path(key), allowed).map(Some),
            Some(other) => err(&self.path(key), format!("expected a table, got {}", other.type_str())),
        }
    }

    fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let path = self.path(key);
        match self.value(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let x = as_f64(v, &format!("{path}[{i}]"))?;
                    if x.is_finite() {
                        Ok(x)
                    } else {
                        err(&format!("{path}[{i}]"), format!("must be finite, got {x}"))
                    }
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(other) => err(&path, format!("expected an array of numbers, got {}", other.type_str())),
        }
    }
}

fn as_f64(v: &Value, path: &str) -> Result<f64, CliError> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        other => err(path, format!("expected a number, got {}", other.type_str())),
    }
}

fn as_usize(v: &Value, path: &str) -> Result<usize, CliError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        Value::Integer(i) => err(path, format!("must be nonnegative, got {i}")),
        other => err(path, format!("expected an integer, got {}", other.type_str())),
    }
}

const TOP: &[&str] = &["strategy", "grid", "box", "compare", "resolution", "epsilon", "initial", "target", "output"];
const STRATEGY: &[&str] = &["kind", "delta0", "omega0", "horizon", "envelope", "detuning_envelope"];
const GRID: &[&str] = &["s_start", "s_end", "s_max", "steps"];
const BOX: &[&str] = &["lower", "upper"];
const COMPARE: &[&str] = &["t_min", "t_max", "t_points", "window_factor", "fit_steps", "max_step_phase"];
const ENVELOPE: &[&str] = &["shape", "value", "center", "width", "slope"];

fn parse_envelope(v: &Value, path: &str) -> Result<Envelope, CliError> {
    let (shape, fields) = match v {
        Value::String(s) => (s.as_str(), None),
        Value::Table(t) => {
            let f = Fields::new(t, path, ENVELOPE)?;
            let shape = f.str("shape")?.ok_or_else(|| CliError::Config {
                path: join(path, "shape"),
                message: "missing envelope shape".into(),
            })?;
            (shape, Some(f))
        }
        other => return err(path, format!("expected a shape name or table, got {}", other.type_str())),
    };
    let get = |key: &str, default: f64| -> Result<f64, CliError> {
        match &fields {
            Some(f) => Ok(f.finite(key)?.unwrap_or(default)),
            None => Ok(default),
        }
    };
    let env = match shape {
        "constant" => Envelope::Constant(get("value", 1.0)?),
        "sine" => Envelope::SinePi,
        "gaussian" => Envelope::Gaussian { center: get("center", 0.5)?, width: get("width", 0.15)? },
        "sech" => Envelope::Sech,
        "tanh" => Envelope::Tanh,
        "linear" => Envelope::Linear { slope: get("slope", 1.0)? },
        other => {
            return err(
                &join(path, "shape"),
                format!("unknown shape {other:?} (expected constant, sine, gaussian, sech, tanh or linear)"),
            )
        }
    };
    env.validate().or_else(|e| err(path, e.to_string()))?;
    Ok(env)
}

fn parse_state(v: Option<&Value>, path: &str, default_index: usize) -> Result<QuantumState, CliError> {
    let state = match v {
        None => QuantumState::basis(2, default_index),
        Some(Value::Integer(k)) if *k >= 0 => QuantumState::basis(2, *k as usize),
        Some(Value::Array(items)) => {
            let amps = items
                .iter()
                .enumerate()
                .map(|(i, item)| {
                    let p = format!("{path}[{i}]");
                    match item {
                        Value::Array(pair) if pair.len() == 2 => {
                            Ok(C64::new(as_f64(&pair[0], &p)?, as_f64(&pair[1], &p)?))
                        }
                        _ => err(&p, "expected a [re, im] pair"),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            QuantumState::new(amps)
        }
        Some(other) => return err(path, format!("expected a basis index or amplitude list, got {}", other.type_str())),
    };
    state.or_else(|e| err(path, e.to_string()))
}

fn parse_grid(fields: Option<&Fields>, kind: StrategyKind, overrides: &Overrides) -> Result<TimeGrid, CliError> {
    let default = kind.default_grid();
    let (mut start, mut end, mut steps) = (default.s_start(), default.s_end(), default.steps());
    if let Some(f) = fields {
        let s_max = f.finite("s_max")?;
        let s_start = f.finite("s_start")?;
        let s_end = f.finite("s_end")?;
        match (s_max, s_start, s_end) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return err(&f.path("s_max"), "give either s_max or s_start/s_end, not both")
            }
            (Some(m), None, None) => {
                if m <= 0.0 {
                    return err(&f.path("s_max"), format!("must be positive, got {m}"));
                }
                start = -m;
                end = m;
            }
            (None, a, b) => {
                start = a.unwrap_or(start);
                end = b.unwrap_or(end);
            }
        }
        if let Some(n) = f.usize("steps")? {
            steps = n;
        }
    }
    if let Some(m) = overrides.s_max {
        if !(m > 0.0 && m.is_finite()) {
            return err("--smax", format!("must be positive and finite, got {m}"));
        }
        start = -m;
        end = m;
    }
    if let Some(n) = overrides.steps {
        steps = n;
    }
    let path = if overrides.steps.is_some() || overrides.s_max.is_some() { "grid (with overrides)" } else { "grid" };
    TimeGrid::new(start, end, steps).or_else(|e| err(path, e.to_string()))
}

fn parse_strategy(f: &Fields, grid_fields: Option<&Fields>, overrides: &Overrides) -> Result<StrategySpec, CliError> {
    let kind_str = f
        .str("kind")?
        .ok_or_else(|| CliError::Config { path: f.path("kind"), message: "missing strategy kind".into() })?;
    let kind: StrategyKind = kind_str.parse().or_else(|e: qsteer_core::Error| err(&f.path("kind"), e.to_string()))?;
    let nonneg = |key: &str, required: bool| -> Result<f64, CliError> {
        match f.finite(key)? {
            Some(x) if x < 0.0 => err(&f.path(key), format!("must be nonnegative, got {x}")),
            Some(x) => Ok(x),
            None if required => err(&f.path(key), "missing"),
            None => Ok(0.0),
        }
    };
    let needs_delta = kind != StrategyKind::Resonance;
    let delta0 = nonneg("delta0", needs_delta)?;
    let omega0 = nonneg("omega0", true)?;
    let horizon = match f.finite("horizon")? {
        Some(t) if t > 0.0 => t,
        Some(t) => return err(&f.path("horizon"), format!("must be positive, got {t}")),
        None => return err(&f.path("horizon"), "missing"),
    };
    let envelope = |key: &str, default: Envelope| -> Result<Envelope, CliError> {
        match f.value(key) {
            Some(v) => parse_envelope(v, &f.path(key)),
            None => Ok(default),
        }
    };
    let strategy = match kind {
        StrategyKind::Resonance => Strategy::Resonance { envelope: envelope("envelope", Envelope::Constant(1.0))? },
        StrategyKind::LandauZener | StrategyKind::AllenEberly => {
            for key in ["envelope", "detuning_envelope"] {
                if f.value(key).is_some() {
                    return err(&f.path(key), format!("not used by the {kind} strategy"));
                }
            }
            if kind == StrategyKind::LandauZener {
                Strategy::LandauZener
            } else {
                Strategy::AllenEberly
            }
        }
        StrategyKind::Custom => Strategy::Custom {
            detuning: envelope("detuning_envelope", Envelope::Tanh)?,
            coupling: envelope("envelope", Envelope::Sech)?,
        },
    };
    if kind == StrategyKind::Resonance && f.value("detuning_envelope").is_some() {
        return err(&f.path("detuning_envelope"), "resonance has zero detuning");
    }
    let grid = parse_grid(grid_fields, kind, overrides)?;
    StrategySpec::new(strategy, delta0, omega0, horizon, grid).or_else(|e| err(&f.prefix, e.to_string()))
}

/// Parses and fully validates a configuration document.
pub fn parse(text: &str, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let table: Table = text.parse().or_else(|e: toml::de::Error| err("<document>", e.message().to_string()))?;
    let top = Fields::new(&table, "", TOP)?;
    let strategy_fields = top
        .table("strategy", STRATEGY)?
        .ok_or_else(|| CliError::Config { path: "strategy".into(), message: "missing [strategy] table".into() })?;
    let grid_fields = top.table("grid", GRID)?;
    let strategy = parse_strategy(&strategy_fields, grid_fields.as_ref(), overrides)?;

    let param_box = match top.table("box", BOX)? {
        None => None,
        Some(b) => {
            let lower = b
                .f64_list("lower")?
                .ok_or_else(|| CliError::Config { path: b.path("lower"), message: "missing".into() })?;
            let upper = b
                .f64_list("upper")?
                .ok_or_else(|| CliError::Config { path: b.path("upper"), message: "missing".into() })?;
            if lower.len() != 2 || upper.len() != 2 {
                return err("box", "two-level strategies take exactly 2 parameters per bound");
            }
            Some(ParameterBox::new(lower, upper).or_else(|e| err("box", e.to_string()))?)
        }
    };

    let resolution = match top.value("resolution") {
        None => None,
        Some(Value::Array(items)) => {
            let r = items
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let p = format!("resolution[{i}]");
                    match as_usize(v, &p)? {
                        0 => err(&p, "must be positive"),
                        n => Ok(n),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            if r.len() != 2 {
                return err("resolution", format!("expected 2 entries, got {}", r.len()));
            }
            Some(r)
        }
        Some(other) => return err("resolution", format!("expected an array of integers, got {}", other.type_str())),
    };
    if resolution.is_some() != param_box.is_some() {
        return err(
            if param_box.is_some() { "resolution" } else { "box" },
            "box and resolution must be given together",
        );
    }

    let epsilon = match top.f64("epsilon")? {
        Some(e) if !(0.0..1.0).contains(&e) => return err("epsilon", format!("must lie in [0, 1), got {e}")),
        other => other,
    };

    let initial = parse_state(top.value("initial"), "initial", 0)?;
    let target = parse_state(top.value("target"), "target", 1)?;
    if initial.dim() != 2 || target.dim() != 2 {
        return err(
            if initial.dim() != 2 { "initial" } else { "target" },
            "two-level strategies need 2-dimensional states",
        );
    }

    let output = match overrides.output.clone() {
        Some(p) => Some(p),
        None => top.str("output")?.map(PathBuf::from),
    };

    let mut compare = CompareSettings::for_amplitudes(strategy.delta0(), strategy.omega0());
    if let Some(c) = top.table("compare", COMPARE)? {
        compare.t_min = c.finite("t_min")?.unwrap_or(compare.t_min);
        compare.t_max = c.finite("t_max")?.unwrap_or(compare.t_max);
        compare.t_points = c.usize("t_points")?.unwrap_or(compare.t_points);
        compare.window_factor = c.finite("window_factor")?.unwrap_or(compare.window_factor);
        compare.fit_steps = c.usize("fit_steps")?.unwrap_or(compare.fit_steps);
        compare.max_step_phase = c.finite("max_step_phase")?.unwrap_or(compare.max_step_phase);
        if !(compare.t_min > 0.0) {
            return err(&c.path("t_min"), format!("must be positive, got {}", compare.t_min));
        }
        if compare.t_max <= compare.t_min {
            return err(&c.path("t_max"), format!("must exceed t_min = {}", compare.t_min));
        }
        if compare.t_points < 8 {
            return err(
                &c.path("t_points"),
                format!("the decay fit needs at least 8 points, got {}", compare.t_points),
            );
        }
        if !(compare.window_factor >= 0.0) {
            return err(&c.path("window_factor"), "must be nonnegative");
        }
        if compare.fit_steps == 0 {
            return err(&c.path("fit_steps"), "must be positive");
        }
        if !(compare.max_step_phase > 0.0) {
            return err(&c.path("max_step_phase"), "must be positive");
        }
    }

    Ok(RunConfig { strategy, param_box, resolution, epsilon, initial, target, output, compare })
}

/// Field paths recognised in a configuration file, for documentation.
pub fn known_fields() -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    out.extend(TOP.iter().map(|s| s.to_string()));
    out.extend(STRATEGY.iter().map(|s| format!("strategy.{s}")));
    out.extend(GRID.iter().map(|s| format!("grid.{s}")));
    out.extend(BOX.iter().map(|s| format!("box.{s}")));
    out.extend(COMPARE.iter().map(|s| format!("compare.{s}")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(e: CliError) -> String {
        match e {
            CliError::Config { path, .. } => path,
            other => panic!("expected config error, got {other}"),
        }
    }

    const AE: &str = r#"
        [strategy]
        kind = "allen-eberly"
        delta0 = 1.0
        omega0 = 1.0
        horizon = 1.0
    "#;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = parse(AE, &Overrides::default()).unwrap();
        assert_eq!(cfg.strategy.grid(), StrategyKind::AllenEberly.default_grid());
        assert_eq!(cfg.initial, QuantumState::basis(2, 0).unwrap());
        assert_eq!(cfg.target, QuantumState::basis(2, 1).unwrap());
        assert!(cfg.param_box.is_none());
    }

    #[test]
    fn overrides_replace_grid() {
        let o = Overrides { steps: Some(100), s_max: Some(12.0), output: None };
        let cfg = parse(AE, &o).unwrap();
        assert_eq!(cfg.strategy.grid(), TimeGrid::symmetric(12.0, 100).unwrap());
    }

    #[test]
    fn errors_carry_field_paths() {
        let cases = [
            (AE.replace("delta0 = 1.0", "delta0 = -1.0"), "strategy.delta0"),
            (AE.replace("horizon = 1.0", "horizon = \"long\""), "strategy.horizon"),
            (AE.replace("kind = \"allen-eberly\"", "kind = \"rap\""), "strategy.kind"),
            (AE.replace("omega0 = 1.0", "omgea0 = 1.0"), "strategy.omgea0"),
            (format!("epsilon = 1.5\n{AE}"), "epsilon"),
            (format!("resolution = [3, 0]\n{AE}\n[box]\nlower=[0,0]\nupper=[1,1]"), "resolution[1]"),
            (format!("{AE}\n[box]\nlower=[0,0]\nupper=[1,1]"), "resolution"),
            (format!("resolution = [3, 3]\n{AE}"), "box"),
            (format!("{AE}\n[grid]\nsteps = 0"), "grid"),
            (format!("{AE}\n[compare]\nt_points = 4"), "compare.t_points"),
            (format!("initial = [[1, 0], [0]]\n{AE}"), "initial[1]"),
            (
                "[strategy]\nkind = \"resonance\"\nomega0 = 1\nhorizon = 1\nenvelope = { shape = \"blob\" }".into(),
                "strategy.envelope.shape",
            ),
        ];
        for (text, expected) in cases {
            let e = parse(&text, &Overrides::default()).unwrap_err();
            assert_eq!(path_of(e), expected, "{text}");
        }
    }

    #[test]
    fn explicit_amplitude_states() {
        let text = format!("initial = [[1.0, 0.0], [1.0, 0.0]]\ntarget = 0\n{AE}");
        let cfg = parse(&text, &Overrides::default()).unwrap();
        assert!((cfg.initial.amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(cfg.target, QuantumState::basis(2, 0).unwrap());
    }

    #[test]
    fn resonance_with_gaussian_envelope() {
        let text = r#"
            [strategy]
            kind = "resonance"
            omega0 = 2.0
            horizon = 1.0
            envelope = { shape = "gaussian", center = 0.5, width = 0.1 }
        "#;
        let cfg = parse(text, &Overrides::default()).unwrap();
        let expected = (2.0 * std::f64::consts::PI).sqrt() * 0.1;
        assert!((cfg.strategy.pulse_area() - expected).abs() < 1e-6);
    }

    #[test]
    fn known_fields_lists_nested_paths() {
        let f = known_fields();
        assert!(f.contains("strategy.delta0") && f.contains("compare.window_factor") && f.contains("epsilon"));
    }
}
