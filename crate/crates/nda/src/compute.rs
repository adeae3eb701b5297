//! Runs the estimators behind one state's result rows.

use std::fmt;
use std::str::FromStr;

use nda_core::catalog::{ExactPair, ExactValue, NodeParametrization, StateSpec};
use nda_core::estimators::{
    estimate_kin_nda_shell_with, estimate_kin_nda_surface_with, estimate_pot_nda_with,
    estimate_standard_expectations_with, EstimateStatus, NdaEstimate, SamplerConfig,
};
use nda_core::exec::ChainExecutor;
use nda_core::quadrature::{integrals, Target};
use nda_core::{NdaError, Result};
use serde::{Deserialize, Serialize};

/// A reported quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    /// `int_node |grad Psi| dS / int |Psi|`
    Kin,
    /// `int V |Psi| / int |Psi|`
    Pot,
    /// `kin + pot`
    Sum,
    /// `<T>` over `Psi^2`
    KinStd,
    /// `<V>` over `Psi^2`
    PotStd,
}

impl Component {
    pub const ALL: [Component; 5] = [Component::Kin, Component::Pot, Component::Sum, Component::KinStd, Component::PotStd];

    pub fn name(self) -> &'static str {
        match self {
            Component::Kin => "kin",
            Component::Pot => "pot",
            Component::Sum => "sum",
            Component::KinStd => "kin_std",
            Component::PotStd => "pot_std",
        }
    }

    fn is_standard(self) -> bool {
        matches!(self, Component::KinStd | Component::PotStd)
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Component::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown component `{s}` (expected kin, pot, sum, kin_std or pot_std)"))
    }
}

/// How the nodal kinetic term is obtained. `Quadrature` also replaces the
/// potential walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KinMethod {
    /// Surface sampling where the node is known, otherwise the shell.
    Auto,
    Surface,
    Shell,
    Quadrature,
}

/// An exact reference as stored in results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRef {
    pub value: f64,
    /// `"p/q"` in units of `unit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rational: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
}

impl From<&ExactValue> for ExactRef {
    fn from(v: &ExactValue) -> Self {
        match v {
            ExactValue::Rational { unit, .. } => ExactRef {
                value: v.value(),
                rational: v.rational_string(),
                unit: Some(unit_name(*unit).to_string()),
                expr: None,
            },
            ExactValue::Closed { value, expr } => {
                ExactRef { value: *value, rational: None, unit: None, expr: Some(expr.to_string()) }
            }
        }
    }
}

pub fn unit_name(u: nda_core::catalog::Unit) -> &'static str {
    match u {
        nda_core::catalog::Unit::ZSquared => "Z^2",
        nda_core::catalog::Unit::Omega => "omega",
        nda_core::catalog::Unit::Hartree => "hartree",
    }
}

impl fmt::Display for ExactRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.rational, &self.unit) {
            (Some(r), Some(u)) if u != "hartree" => write!(f, "{r} {u} = {}", sig6(self.value)),
            (Some(r), _) => write!(f, "{r} = {}", sig6(self.value)),
            _ => f.write_str(&sig6(self.value)),
        }
    }
}

/// Six significant figures.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        format!("{:.*}", (5 - mag).max(0) as usize, v)
    } else {
        format!("{v:.5e}")
    }
}

/// One row of a result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentResult {
    pub component: Component,
    /// Estimator name; for `sum` the two contributing methods joined by `+`.
    pub method: String,
    pub estimate: NdaEstimate,
    #[serde(default)]
    pub exact: Option<ExactRef>,
    /// `(mean - exact) / stderr`; absent without a reference or a spread.
    #[serde(default)]
    pub sigma_deviation: Option<f64>,
}

impl ComponentResult {
    fn new(component: Component, method: String, estimate: NdaEstimate, exact: Option<ExactRef>) -> Self {
        let sigma_deviation = exact.as_ref().filter(|_| estimate.stderr > 0.0).map(|e| estimate.sigma_deviation(e.value));
        ComponentResult { component, method, estimate, exact, sigma_deviation }
    }

    pub fn unconverged(&self) -> bool {
        self.estimate.status == EstimateStatus::Unconverged
    }
}

fn exact_for(state: &StateSpec, c: Component) -> Option<ExactRef> {
    let pick = |p: &Option<ExactPair>, kin: bool| p.as_ref().map(|p| ExactRef::from(if kin { &p.kin } else { &p.pot }));
    match c {
        Component::Kin => pick(&state.exact_nda, true),
        Component::Pot => pick(&state.exact_nda, false),
        Component::Sum => state.exact_total.as_ref().map(ExactRef::from),
        Component::KinStd => pick(&state.exact_expectations, true),
        Component::PotStd => pick(&state.exact_expectations, false),
    }
}

/// Resolves `Auto` for a state.
pub fn resolve_method(state: &StateSpec, m: KinMethod) -> KinMethod {
    match (m, &state.node) {
        (KinMethod::Auto, NodeParametrization::Sheets(_)) => KinMethod::Surface,
        (KinMethod::Auto, NodeParametrization::Implicit) => KinMethod::Shell,
        (m, _) => m,
    }
}

/// Computes the requested components of `state`. Components that need an
/// estimator run it once; `sum` reuses `kin` and `pot`.
pub fn compute<E: ChainExecutor>(
    state: &StateSpec,
    components: &[Component],
    method: KinMethod,
    cfg: &SamplerConfig,
    exec: &E,
) -> Result<Vec<ComponentResult>> {
    let method = resolve_method(state, method);
    let wants = |c: Component| components.contains(&c);
    let need_nda = wants(Component::Kin) || wants(Component::Pot) || wants(Component::Sum);
    let h = &state.hamiltonian;

    let (mut kin, mut pot) = (None, None);
    if method == KinMethod::Quadrature {
        if components.iter().any(|c| c.is_standard()) {
            return Err(NdaError::Incompatible(String::from("quadrature covers kin, pot and sum only")));
        }
        let ints = integrals(state)?;
        kin = Some(NdaEstimate::quadrature(ints.target(Target::KinNda)));
        pot = Some(NdaEstimate::quadrature(ints.target(Target::PotNda)));
    } else if need_nda {
        if wants(Component::Kin) || wants(Component::Sum) {
            kin = Some(match method {
                KinMethod::Shell => estimate_kin_nda_shell_with(state, cfg, exec)?,
                _ => estimate_kin_nda_surface_with(state, cfg, exec)?,
            });
        }
        if wants(Component::Pot) || wants(Component::Sum) {
            pot = Some(estimate_pot_nda_with(state, h, cfg, exec)?);
        }
    }
    let std = if components.iter().any(|c| c.is_standard()) {
        Some(estimate_standard_expectations_with(state, h, cfg, exec)?)
    } else {
        None
    };

    let mut out = Vec::with_capacity(components.len());
    for &c in components {
        let est = match c {
            Component::Kin => kin.clone(),
            Component::Pot => pot.clone(),
            Component::Sum => {
                let (k, p) = (kin.as_ref().expect("kin computed"), pot.as_ref().expect("pot computed"));
                let mut s = p.clone();
                s.mean = k.mean + p.mean;
                s.stderr = k.stderr.hypot(p.stderr);
                s.n_samples = k.n_samples + p.n_samples;
                s.rejected = k.rejected + p.rejected;
                s.shell = None;
                if k.status != EstimateStatus::Ok {
                    s.status = k.status;
                }
                let name = if k.method == p.method {
                    k.method.name().to_string()
                } else {
                    format!("{}+{}", k.method.name(), p.method.name())
                };
                out.push(ComponentResult::new(c, name, s, exact_for(state, c)));
                continue;
            }
            Component::KinStd => std.as_ref().map(|s| s.kin.clone()),
            Component::PotStd => std.as_ref().map(|s| s.pot.clone()),
        }
        .expect("estimate computed");
        out.push(ComponentResult::new(c, est.method.name().to_string(), est, exact_for(state, c)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_figures() {
        assert_eq!(sig6(-0.1666666666), "-0.166667");
        assert_eq!(sig6(0.0416666666), "0.0416667");
        assert_eq!(sig6(1.25), "1.25000");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(3.2e-5), "3.20000e-5");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn components_parse() {
        for c in Component::ALL {
            assert_eq!(c.name().parse::<Component>().unwrap(), c);
        }
        assert!("energy".parse::<Component>().is_err());
    }
}
