//! Monte Carlo estimators of the nodal/domain averages and the ordinary
//! expectation values.
//!
//! Every estimator comes in two forms: a plain one that runs its chains on
//! the calling thread and a `_with` form taking a [`ChainExecutor`]. Chain
//! `c` always draws from stream `(seed, purpose, c)`, so results do not
//! depend on the executor.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::catalog::{explicit_node, StateSpec};
use crate::error::{NdaError, Result};
use crate::exec::{ChainExecutor, Sequential};
use crate::hamiltonian::{local_kinetic, HamiltonianSpec};
use crate::orbital::Decay;
use crate::sampling::{chain_rng, purpose, run_walker, ReferenceDensity, WalkerSettings};
use crate::stats::{self, Blocks, MeanError};
use crate::surface::SheetSampler;
use crate::wavefunction::WaveFunctionModel;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplerConfig {
    pub n_chains: usize,
    /// Metropolis sweeps per chain including burn-in, or independent draws
    /// per chain for the reference-density and surface estimators.
    pub steps_per_chain: usize,
    pub burn_in: usize,
    /// Side of the cube move in Bohr; `None` picks a default from the
    /// wave function's decay.
    pub proposal_step: Option<f64>,
    /// Adapt the step during burn-in.
    pub tune_step: bool,
    pub seed: u64,
    /// Shell half-widths (in distance to the node) for the delta-shell
    /// estimator; `None` derives them from `shell_fraction`.
    pub epsilon_ladder: Option<Vec<f64>>,
    /// Fraction of reference samples the widest shell should capture.
    pub shell_fraction: f64,
    pub n_blocks: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            n_chains: 8,
            steps_per_chain: 200_000,
            burn_in: 20_000,
            proposal_step: None,
            tune_step: true,
            seed: 0,
            epsilon_ladder: None,
            shell_fraction: 0.01,
            n_blocks: 50,
        }
    }
}

pub const MIN_BLOCKS: usize = 20;
pub const LADDER_LEN: usize = 4;
/// Hits in the narrowest shell below which the estimate is unconverged.
pub const MIN_SHELL_HITS: u64 = 100;
const PILOT_DRAWS: usize = 20_000;

impl SamplerConfig {
    /// Burn-in at 10% of the steps.
    pub fn with_steps(n_chains: usize, steps_per_chain: usize, seed: u64) -> Self {
        SamplerConfig { n_chains, steps_per_chain, burn_in: steps_per_chain / 10, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(NdaError::InvalidSampler(String::from(m)));
        if self.n_chains == 0 {
            return bad("n_chains must be positive");
        }
        if self.burn_in >= self.steps_per_chain {
            return bad("burn_in must be smaller than steps_per_chain");
        }
        if self.n_blocks < MIN_BLOCKS {
            return bad("at least 20 blocks are required");
        }
        if self.steps_per_chain - self.burn_in < self.n_blocks {
            return bad("fewer production steps than blocks");
        }
        if let Some(s) = self.proposal_step {
            if !(s > 0.0 && s.is_finite()) {
                return bad("proposal_step must be positive");
            }
        }
        if let Some(l) = &self.epsilon_ladder {
            if l.len() < 2 {
                return bad("epsilon_ladder needs at least two entries");
            }
            if l.iter().any(|e| !(*e > 0.0 && e.is_finite())) || l.windows(2).any(|w| w[1] >= w[0]) {
                return bad("epsilon_ladder must be positive and strictly decreasing");
            }
        }
        if !(self.shell_fraction > 0.0 && self.shell_fraction < 1.0) {
            return bad("shell_fraction must lie in (0, 1)");
        }
        Ok(())
    }

    fn production(&self) -> usize {
        self.steps_per_chain - self.burn_in
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    MetropolisAbsPsi,
    MetropolisPsiSquared,
    ReferenceRatio,
    SurfaceParam,
    DeltaShell,
    Quadrature,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::MetropolisAbsPsi => "metropolis_abs_psi",
            Method::MetropolisPsiSquared => "metropolis_psi_squared",
            Method::ReferenceRatio => "reference_ratio",
            Method::SurfaceParam => "surface_param",
            Method::DeltaShell => "delta_shell",
            Method::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EstimateStatus {
    Ok,
    /// Mean Metropolis acceptance outside `[0.1, 0.9]`.
    AcceptanceWarning,
    /// Too few samples reached the narrowest shell.
    Unconverged,
}

/// Per-width results of the delta-shell estimator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShellDetails {
    pub epsilons: Vec<f64>,
    /// `int |grad Psi| dS / int |Psi|` at each width before extrapolation.
    pub values: Vec<f64>,
    pub hits: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NdaEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub n_chains: usize,
    pub seed: u64,
    pub method: Method,
    pub status: EstimateStatus,
    /// Mean Metropolis acceptance over production sweeps.
    pub acceptance: Option<f64>,
    /// Samples dropped for a non-finite potential or node proximity.
    pub rejected: u64,
    pub shell: Option<ShellDetails>,
}

impl NdaEstimate {
    fn new(est: MeanError, n_samples: u64, cfg: &SamplerConfig, method: Method) -> Self {
        NdaEstimate {
            mean: est.mean,
            stderr: est.stderr,
            n_samples,
            n_chains: cfg.n_chains,
            seed: cfg.seed,
            method,
            status: EstimateStatus::Ok,
            acceptance: None,
            rejected: 0,
            shell: None,
        }
    }

    /// Deviation from `exact` in units of the standard error.
    pub fn sigma_deviation(&self, exact: f64) -> f64 {
        (self.mean - exact) / self.stderr
    }

    pub fn quadrature(value: f64) -> Self {
        NdaEstimate {
            mean: value,
            stderr: 0.0,
            n_samples: 0,
            n_chains: 0,
            seed: 0,
            method: Method::Quadrature,
            status: EstimateStatus::Ok,
            acceptance: None,
            rejected: 0,
            shell: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StandardExpectations {
    pub kin: NdaEstimate,
    pub pot: NdaEstimate,
}

pub fn default_step(decay: Decay) -> f64 {
    match decay {
        Decay::Exponential(a) => 0.25 / a,
        Decay::Gaussian(w) => 0.5 / w.sqrt(),
    }
}

fn check_compatible(model: &WaveFunctionModel, h: &HamiltonianSpec) -> Result<()> {
    match (model.decay(), h) {
        (Decay::Exponential(_), HamiltonianSpec::CoulombAtom { .. }) | (Decay::Gaussian(_), HamiltonianSpec::HarmonicPair { .. }) => {
            Ok(())
        }
        _ => Err(NdaError::Incompatible(String::from("wave function and Hamiltonian families differ"))),
    }
}

struct ChainOut {
    blocks: Vec<Vec<f64>>,
    count: u64,
    rejected: u64,
    acceptance: f64,
}

/// Runs one walker per chain and accumulates `K` observables per sweep.
/// `observe` returns `false` to reject a sample.
fn metropolis<const K: usize, E, F>(
    model: &WaveFunctionModel,
    cfg: &SamplerConfig,
    power: u32,
    stream: u32,
    exec: &E,
    observe: F,
) -> Result<Vec<ChainOut>>
where
    E: ChainExecutor,
    F: Fn(&[f64], f64, &mut [f64], &mut [f64; K]) -> bool + Sync,
{
    cfg.validate()?;
    let g = ReferenceDensity::for_model(model)?;
    let settings = WalkerSettings {
        power,
        step: cfg.proposal_step.unwrap_or_else(|| default_step(model.decay())),
        burn_in: cfg.burn_in,
        sweeps: cfg.production(),
        tune: cfg.tune_step,
    };
    let outs = exec.map_chains(cfg.n_chains, |c| {
        let mut rng = chain_rng(cfg.seed, stream, c);
        let mut blocks: [Blocks; K] = core::array::from_fn(|_| Blocks::new(cfg.n_blocks, settings.sweeps));
        let mut grad = vec![0.0; model.dim()];
        let (mut step, mut rejected) = (0usize, 0u64);
        let mut vals = [0.0; K];
        let summary = run_walker(model, &g, &settings, &mut rng, |x, psi| {
            if observe(x, psi, &mut grad, &mut vals) {
                for (b, v) in blocks.iter_mut().zip(&vals) {
                    b.push(step, *v);
                }
            } else {
                rejected += 1;
            }
            step += 1;
        })?;
        Ok(ChainOut {
            count: blocks[0].count(),
            blocks: blocks.iter().map(Blocks::means).collect(),
            rejected,
            acceptance: summary.acceptance,
        })
    });
    outs.into_iter().collect()
}

/// Mean over chains of the per-chain block means of observable `k`, with
/// its standard error.
fn combine(outs: &[ChainOut], k: usize) -> MeanError {
    let per_chain: Vec<Vec<f64>> = outs.iter().map(|o| o.blocks[k].clone()).collect();
    let units = stats::error_units(&per_chain);
    let chain_means: Vec<f64> = per_chain.iter().map(|b| stats::mean(b)).collect();
    MeanError { mean: stats::mean(&chain_means), stderr: stats::unit_mean(&units).stderr }
}

fn finish(mut est: NdaEstimate, outs: &[ChainOut]) -> NdaEstimate {
    est.n_samples = outs.iter().map(|o| o.count).sum();
    est.rejected = outs.iter().map(|o| o.rejected).sum();
    let acc = outs.iter().map(|o| o.acceptance).sum::<f64>() / outs.len() as f64;
    est.acceptance = Some(acc);
    if !(0.1..=0.9).contains(&acc) {
        est.status = EstimateStatus::AcceptanceWarning;
    }
    est
}

pub fn estimate_pot_nda(state: &StateSpec, h: &HamiltonianSpec, cfg: &SamplerConfig) -> Result<NdaEstimate> {
    estimate_pot_nda_with(state, h, cfg, &Sequential)
}

/// `int V |Psi| / int |Psi|` as the mean of `V` over a walk in `|Psi|`.
pub fn estimate_pot_nda_with<E: ChainExecutor>(
    state: &StateSpec,
    h: &HamiltonianSpec,
    cfg: &SamplerConfig,
    exec: &E,
) -> Result<NdaEstimate> {
    let model = state.model()?;
    check_compatible(model, h)?;
    let n = model.n_particles();
    let outs = metropolis::<1, _, _>(model, cfg, 1, purpose::METROPOLIS_ABS, exec, |x, _, _, out| {
        match h.potential_raw(x, n) {
            Ok(v) if v.is_finite() => {
                out[0] = v;
                true
            }
            _ => false,
        }
    })?;
    let est = NdaEstimate::new(combine(&outs, 0), 0, cfg, Method::MetropolisAbsPsi);
    Ok(finish(est, &outs))
}

pub fn estimate_standard_expectations(
    state: &StateSpec,
    h: &HamiltonianSpec,
    cfg: &SamplerConfig,
) -> Result<StandardExpectations> {
    estimate_standard_expectations_with(state, h, cfg, &Sequential)
}

/// `<T>` and `<V>` over `Psi^2`, the kinetic part from the local
/// `-lap Psi / (2 Psi)`. Node-proximal samples are rejected for both.
pub fn estimate_standard_expectations_with<E: ChainExecutor>(
    state: &StateSpec,
    h: &HamiltonianSpec,
    cfg: &SamplerConfig,
    exec: &E,
) -> Result<StandardExpectations> {
    let model = state.model()?;
    check_compatible(model, h)?;
    let n = model.n_particles();
    let outs = metropolis::<2, _, _>(model, cfg, 2, purpose::METROPOLIS_SQUARED, exec, |x, _, grad, out| {
        let Ok(t) = local_kinetic(model, x, grad) else { return false };
        match h.potential_raw(x, n) {
            Ok(v) if v.is_finite() && t.is_finite() => {
                *out = [t, v];
                true
            }
            _ => false,
        }
    })?;
    let kin = finish(NdaEstimate::new(combine(&outs, 0), 0, cfg, Method::MetropolisPsiSquared), &outs);
    let pot = finish(NdaEstimate::new(combine(&outs, 1), 0, cfg, Method::MetropolisPsiSquared), &outs);
    Ok(StandardExpectations { kin, pot })
}

/// Per-chain buffers for a configuration and a gradient.
struct Scratch {
    x: Vec<f64>,
    grad: Vec<f64>,
}

/// Independent draws, `K` observables per draw.
fn iid<const K: usize, E, F>(cfg: &SamplerConfig, dim: usize, stream: u32, exec: &E, draw: F) -> Result<Vec<[Vec<f64>; K]>>
where
    E: ChainExecutor,
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut Scratch, &mut [f64; K]) + Sync,
{
    cfg.validate()?;
    if cfg.steps_per_chain < cfg.n_blocks {
        return Err(NdaError::InvalidSampler(String::from("fewer draws than blocks")));
    }
    Ok(exec.map_chains(cfg.n_chains, |c| {
        let mut rng = chain_rng(cfg.seed, stream, c);
        let mut blocks: [Blocks; K] = core::array::from_fn(|_| Blocks::new(cfg.n_blocks, cfg.steps_per_chain));
        let mut vals = [0.0; K];
        let mut scratch = Scratch { x: vec![0.0; dim], grad: vec![0.0; dim] };
        for step in 0..cfg.steps_per_chain {
            draw(&mut rng, &mut scratch, &mut vals);
            for (b, v) in blocks.iter_mut().zip(&vals) {
                b.push(step, *v);
            }
        }
        core::array::from_fn(|k| blocks[k].means())
    }))
}

fn units_of<const K: usize>(chains: &[[Vec<f64>; K]], k: usize) -> Vec<f64> {
    let per_chain: Vec<Vec<f64>> = chains.iter().map(|c| c[k].clone()).collect();
    stats::error_units(&per_chain)
}

pub fn estimate_abs_norm(state: &StateSpec, cfg: &SamplerConfig) -> Result<NdaEstimate> {
    estimate_abs_norm_with(state, cfg, &Sequential)
}

/// `int |Psi|` as the mean of `|Psi| / g` over draws from `g`.
pub fn estimate_abs_norm_with<E: ChainExecutor>(state: &StateSpec, cfg: &SamplerConfig, exec: &E) -> Result<NdaEstimate> {
    let model = state.model()?;
    let g = ReferenceDensity::for_model(model)?;
    let chains = iid::<1, _, _>(cfg, model.dim(), purpose::ABS_NORM, exec, |rng, s, out| {
        g.sample(rng, &mut s.x);
        out[0] = model.value(&s.x).abs() / g.density(&s.x);
    })?;
    let units = units_of(&chains, 0);
    let n = (cfg.n_chains * cfg.steps_per_chain) as u64;
    Ok(NdaEstimate::new(stats::unit_mean(&units), n, cfg, Method::ReferenceRatio))
}

pub fn estimate_kin_nda_surface(state: &StateSpec, cfg: &SamplerConfig) -> Result<NdaEstimate> {
    estimate_kin_nda_surface_with(state, cfg, &Sequential)
}

/// Node integral from points drawn on each parametrized sheet, divided by
/// an independent [`estimate_abs_norm_with`].
pub fn estimate_kin_nda_surface_with<E: ChainExecutor>(
    state: &StateSpec,
    cfg: &SamplerConfig,
    exec: &E,
) -> Result<NdaEstimate> {
    let est = surface_integral_with(state, cfg, exec)?;
    let den = estimate_abs_norm_with(state, cfg, exec)?;
    if !(den.mean > 0.0) {
        return Err(NdaError::ZeroDenominator);
    }
    let r = stats::independent_ratio(
        MeanError { mean: est.mean, stderr: est.stderr },
        MeanError { mean: den.mean, stderr: den.stderr },
    );
    let mut out = NdaEstimate::new(r, est.n_samples + den.n_samples, cfg, Method::SurfaceParam);
    out.rejected = est.rejected;
    Ok(out)
}

/// `int_{node} |grad Psi| dS` alone.
pub fn surface_integral_with<E: ChainExecutor>(state: &StateSpec, cfg: &SamplerConfig, exec: &E) -> Result<NdaEstimate> {
    let sheets = explicit_node(state)?;
    let model = state.model()?;
    let g = ReferenceDensity::for_model(model)?;
    let samplers = sheets.iter().map(|s| SheetSampler::new(s, g)).collect::<Result<Vec<_>>>()?;
    let chains = iid::<1, _, _>(cfg, model.dim(), purpose::SURFACE, exec, |rng, s, out| {
        out[0] = samplers
            .iter()
            .map(|sheet| {
                let w = sheet.sample(rng, &mut s.x);
                model.value_grad(&s.x, &mut s.grad);
                s.grad.iter().map(|v| v * v).sum::<f64>().sqrt() * w
            })
            .sum();
    })?;
    let units = units_of(&chains, 0);
    let n = (cfg.n_chains * cfg.steps_per_chain) as u64;
    Ok(NdaEstimate::new(stats::unit_mean(&units), n, cfg, Method::SurfaceParam))
}

pub fn estimate_kin_nda_shell(state: &StateSpec, cfg: &SamplerConfig) -> Result<NdaEstimate> {
    estimate_kin_nda_shell_with(state, cfg, &Sequential)
}

/// Shell widths: the configured ladder, or `eps_0 / 2^k` with `eps_0` the
/// `shell_fraction` quantile of the distance-to-node proxy over a pilot run.
pub fn shell_ladder(model: &WaveFunctionModel, cfg: &SamplerConfig) -> Result<Vec<f64>> {
    if let Some(l) = &cfg.epsilon_ladder {
        return Ok(l.clone());
    }
    let g = ReferenceDensity::for_model(model)?;
    let mut rng = chain_rng(cfg.seed, purpose::SHELL_PILOT, 0);
    let mut x = vec![0.0; model.dim()];
    let mut grad = vec![0.0; model.dim()];
    let mut d: Vec<f64> = (0..PILOT_DRAWS)
        .map(|_| {
            g.sample(&mut rng, &mut x);
            let psi = model.value_grad(&x, &mut grad);
            psi.abs() / grad.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .filter(|v| v.is_finite())
        .collect();
    if d.is_empty() {
        return Err(NdaError::InvalidSampler(String::from("pilot run found no finite node distances")));
    }
    d.sort_by(f64::total_cmp);
    let idx = ((cfg.shell_fraction * d.len() as f64) as usize).min(d.len() - 1);
    let eps0 = d[idx];
    if !(eps0 > 0.0) {
        return Err(NdaError::InvalidSampler(String::from("degenerate shell width")));
    }
    Ok((0..LADDER_LEN).map(|k| eps0 / (1u32 << k) as f64).collect())
}

/// Thin-shell estimate of the node integral.
///
/// A sample from `g` lies in the shell of half-width `eps` when
/// `|Psi| < eps |grad Psi|`, i.e. within about `eps` of the node, and
/// contributes `|grad Psi| / (2 eps g)`. The bias is quadratic in `eps`;
/// the widths are combined into the least-squares intercept in `eps^2`
/// sample by sample, so the error bars account for the correlation between
/// widths and with the `int |Psi|` denominator from the same draws.
pub fn estimate_kin_nda_shell_with<E: ChainExecutor>(state: &StateSpec, cfg: &SamplerConfig, exec: &E) -> Result<NdaEstimate> {
    cfg.validate()?;
    let model = state.model()?;
    let g = ReferenceDensity::for_model(model)?;
    let eps = shell_ladder(model, cfg)?;
    let m = eps.len();
    let t: Vec<f64> = eps.iter().map(|e| e * e).collect();
    let c = stats::intercept_weights(&t);
    // Observables: extrapolated numerator, denominator, then one numerator
    // and one hit indicator per width.
    const K: usize = 2 + 2 * 8;
    if m > 8 {
        return Err(NdaError::InvalidSampler(String::from("at most eight shell widths")));
    }
    let chains = iid::<K, _, _>(cfg, model.dim(), purpose::SHELL, exec, |rng, s, out| {
        g.sample(rng, &mut s.x);
        let psi = model.value_grad(&s.x, &mut s.grad).abs();
        let gn = s.grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        let gx = g.density(&s.x);
        out.fill(0.0);
        out[1] = psi / gx;
        for k in 0..m {
            if psi < eps[k] * gn {
                let w = gn / (2.0 * eps[k] * gx);
                out[2 + k] = w;
                out[2 + 8 + k] = 1.0;
                out[0] += c[k] * w;
            }
        }
    })?;
    let num = units_of(&chains, 0);
    let den = units_of(&chains, 1);
    if !(stats::mean(&den) > 0.0) {
        return Err(NdaError::ZeroDenominator);
    }
    let r = stats::ratio(&num, &den);
    let n = (cfg.n_chains * cfg.steps_per_chain) as f64;
    let den_mean = stats::mean(&den);
    let values = (0..m).map(|k| stats::mean(&units_of(&chains, 2 + k)) / den_mean).collect();
    let hits: Vec<u64> = (0..m).map(|k| (stats::mean(&units_of(&chains, 2 + 8 + k)) * n).round() as u64).collect();
    let mut est = NdaEstimate::new(r, n as u64, cfg, Method::DeltaShell);
    if hits[m - 1] < MIN_SHELL_HITS {
        est.status = EstimateStatus::Unconverged;
    }
    est.shell = Some(ShellDetails { epsilons: eps, values, hits });
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, StateParams};

    fn state(name: &str) -> StateSpec {
        lookup(name, &StateParams::default()).unwrap()
    }

    fn within(est: &NdaEstimate, exact: f64, k: f64) {
        assert!(
            (est.mean - exact).abs() <= k * est.stderr,
            "{:?}: {} vs {} ({:.2} sigma)",
            est.method,
            est.mean,
            exact,
            est.sigma_deviation(exact)
        );
    }

    #[test]
    fn config_validation() {
        assert!(SamplerConfig::default().validate().is_ok());
        let bad = SamplerConfig { burn_in: 200_000, ..SamplerConfig::default() };
        assert!(bad.validate().is_err());
        let bad = SamplerConfig { epsilon_ladder: Some(vec![0.1]), ..SamplerConfig::default() };
        assert!(bad.validate().is_err());
        let bad = SamplerConfig { epsilon_ladder: Some(vec![0.1, 0.2]), ..SamplerConfig::default() };
        assert!(bad.validate().is_err());
        let bad = SamplerConfig { n_blocks: 10, ..SamplerConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn pot_nda_of_2p() {
        let s = state("2P_2p");
        let cfg = SamplerConfig::with_steps(8, 40_000, 1);
        let e = estimate_pot_nda(&s, &s.hamiltonian, &cfg).unwrap();
        within(&e, -1.0 / 6.0, 4.0);
        assert_eq!(e.status, EstimateStatus::Ok);
        assert!(e.stderr > 0.0 && e.stderr < 5e-3);
    }

    #[test]
    fn surface_and_shell_kinetic_of_2p() {
        let s = state("2P_2p");
        let cfg = SamplerConfig::with_steps(8, 50_000, 2);
        within(&estimate_kin_nda_surface(&s, &cfg).unwrap(), 1.0 / 24.0, 4.0);
        let cfg = SamplerConfig::with_steps(8, 200_000, 2);
        let e = estimate_kin_nda_shell(&s, &cfg).unwrap();
        within(&e, 1.0 / 24.0, 4.0);
        assert_eq!(e.status, EstimateStatus::Ok);
    }

    #[test]
    fn abs_norm_of_2p() {
        // int |z| e^{-r/2} d^3r = 2 pi * int r^3 e^{-r/2} dr * int |cos| sin = 2 pi * 96 * 1.
        let s = state("2P_2p");
        let e = estimate_abs_norm(&s, &SamplerConfig::with_steps(8, 50_000, 3)).unwrap();
        within(&e, 192.0 * core::f64::consts::PI, 4.0);
    }

    #[test]
    fn incompatible_hamiltonian_rejected() {
        let s = state("2P_2p");
        let h = HamiltonianSpec::harmonic(0.25, 0.0).unwrap();
        let cfg = SamplerConfig::with_steps(8, 1000, 1);
        assert!(matches!(estimate_pot_nda(&s, &h, &cfg), Err(NdaError::Incompatible(_))));
        let s = state("3P_1s2p");
        assert!(matches!(estimate_kin_nda_surface(&s, &cfg), Err(NdaError::NoKnownNode(_))));
    }

    #[test]
    fn standard_expectations_of_triplet() {
        let s = state("3S_1s2s");
        let e = estimate_standard_expectations(&s, &s.hamiltonian, &SamplerConfig::with_steps(8, 20_000, 4)).unwrap();
        within(&e.kin, 0.625, 4.0);
        within(&e.pot, -1.25, 4.0);
    }
}
