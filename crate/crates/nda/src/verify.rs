//! Cell-by-cell comparison of catalog states with their references.

use nda_core::catalog::{catalog_list, lookup, StateParams, StateSpec};
use nda_core::estimators::SamplerConfig;
use nda_core::exec::ChainExecutor;
use nda_core::{NdaError, Result};
use serde::{Deserialize, Serialize};

use crate::compute::{compute, Component, ComponentResult, KinMethod};

pub const PASS_SIGMA: f64 = 3.0;
pub const FAIL_SIGMA: f64 = 4.0;
/// Absolute tolerance for deterministic cells.
pub const QUADRATURE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellVerdict {
    Pass,
    /// Between 3 and 4 standard errors.
    Marginal,
    Fail,
    Unconverged,
}

impl CellVerdict {
    pub fn label(self) -> &'static str {
        match self {
            CellVerdict::Pass => "PASS",
            CellVerdict::Marginal => "MARGINAL",
            CellVerdict::Fail => "FAIL",
            CellVerdict::Unconverged => "UNCONVERGED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub state: String,
    pub result: ComponentResult,
    pub verdict: CellVerdict,
}

pub fn judge(r: &ComponentResult) -> CellVerdict {
    if r.unconverged() {
        return CellVerdict::Unconverged;
    }
    let Some(exact) = &r.exact else { return CellVerdict::Fail };
    if r.estimate.stderr == 0.0 {
        return if (r.estimate.mean - exact.value).abs() <= QUADRATURE_TOL { CellVerdict::Pass } else { CellVerdict::Fail };
    }
    match r.sigma_deviation.map(f64::abs) {
        Some(d) if d <= PASS_SIGMA => CellVerdict::Pass,
        Some(d) if d <= FAIL_SIGMA => CellVerdict::Marginal,
        _ => CellVerdict::Fail,
    }
}

/// Components with references for `state` under `method`.
pub fn cells_for(state: &StateSpec, method: KinMethod) -> Vec<Component> {
    let mut c = Vec::new();
    if method == KinMethod::Quadrature {
        if state.reduction.is_some() && state.exact_nda.is_some() {
            c.extend([Component::Kin, Component::Pot]);
        }
        return c;
    }
    if state.exact_expectations.is_some() {
        c.extend([Component::KinStd, Component::PotStd]);
    }
    if state.exact_nda.is_some() {
        c.extend([Component::Kin, Component::Pot]);
    }
    c
}

/// States to verify: `only` if given, else the whole catalog at the
/// analytic point.
pub fn select_states(only: &[String], method: KinMethod) -> Result<Vec<StateSpec>> {
    let params = StateParams::default();
    if only.is_empty() {
        let all = catalog_list(&params)?;
        return Ok(all.into_iter().filter(|s| !cells_for(s, method).is_empty()).collect());
    }
    let mut out = Vec::new();
    for name in only {
        let s = lookup(name, &params)?;
        if cells_for(&s, method).is_empty() {
            return Err(NdaError::Incompatible(format!("{name} has no references checkable with this method")));
        }
        out.push(s);
    }
    Ok(out)
}

pub fn verify_state<E: ChainExecutor>(state: &StateSpec, method: KinMethod, cfg: &SamplerConfig, exec: &E) -> Result<Vec<Cell>> {
    let comps = cells_for(state, method);
    let results = compute(state, &comps, method, cfg, exec)?;
    Ok(results
        .into_iter()
        .map(|r| Cell { state: state.name.clone(), verdict: judge(&r), result: r })
        .collect())
}

/// Exit code of a finished verification: 1 on any failure, else 3 if any
/// cell is unconverged, else 0.
pub fn exit_code(cells: &[Cell]) -> i32 {
    if cells.iter().any(|c| c.verdict == CellVerdict::Fail) {
        1
    } else if cells.iter().any(|c| c.verdict == CellVerdict::Unconverged) {
        3
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compute::ExactRef;
    use nda_core::estimators::NdaEstimate;

    fn result(mean: f64, stderr: f64, exact: f64) -> ComponentResult {
        let mut e = NdaEstimate::quadrature(mean);
        e.stderr = stderr;
        ComponentResult {
            component: Component::Kin,
            method: "x".into(),
            sigma_deviation: (stderr > 0.0).then(|| (mean - exact) / stderr),
            estimate: e,
            exact: Some(ExactRef { value: exact, rational: None, unit: None, expr: None }),
        }
    }

    #[test]
    fn verdict_thresholds() {
        assert_eq!(judge(&result(1.0, 0.1, 1.29)), CellVerdict::Pass);
        assert_eq!(judge(&result(1.0, 0.1, 1.35)), CellVerdict::Marginal);
        assert_eq!(judge(&result(1.0, 0.1, 1.45)), CellVerdict::Fail);
        assert_eq!(judge(&result(1.0, 0.0, 1.0 + 1e-9)), CellVerdict::Pass);
        assert_eq!(judge(&result(1.0, 0.0, 1.0 + 1e-7)), CellVerdict::Fail);
    }

    #[test]
    fn cell_sets() {
        let s = lookup("3S_1s2s", &StateParams::default()).unwrap();
        assert_eq!(cells_for(&s, KinMethod::Auto).len(), 4);
        assert_eq!(cells_for(&s, KinMethod::Quadrature).len(), 2);
        let s = lookup("3P_1s2p", &StateParams::default()).unwrap();
        assert!(cells_for(&s, KinMethod::Quadrature).is_empty());
        assert!(select_states(&["3P_1s2p".into()], KinMethod::Quadrature).is_err());
    }
}
