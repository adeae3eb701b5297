//! Random streams, reference densities and the Metropolis walker.

use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal, UnitSphere};

use crate::error::{NdaError, Result};
use crate::orbital::Decay;
use crate::wavefunction::WaveFunctionModel;

/// Stream purposes. A stream is identified by `(seed, purpose, chain)`, so
/// different estimators never share random numbers.
pub mod purpose {
    pub const METROPOLIS_ABS: u32 = 1;
    pub const METROPOLIS_SQUARED: u32 = 2;
    pub const ABS_NORM: u32 = 3;
    pub const SURFACE: u32 = 4;
    pub const SHELL: u32 = 5;
    pub const SHELL_PILOT: u32 = 6;
    pub const DOMAINS: u32 = 7;
    pub const EQUIVALENCE: u32 = 8;
}

pub fn chain_rng(seed: u64, purpose: u32, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(purpose) << 32) | chain as u64);
    rng
}

/// A normalized product density `g(R) = prod_i g1(r_i)` that dominates the
/// tails of `|Psi|`.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceDensity {
    single: SingleDensity,
    n: usize,
}

#[derive(Debug, Clone, Copy)]
enum SingleDensity {
    /// `a^3 / (8 pi) exp(-a r)`
    Exponential { a: f64, radius: Gamma<f64> },
    /// Isotropic normal with variance `1 / w` per coordinate.
    Gaussian { w: f64 },
}

impl ReferenceDensity {
    pub fn new(decay: Decay, n_particles: usize) -> Result<Self> {
        let single = match decay {
            Decay::Exponential(a) if a > 0.0 => SingleDensity::Exponential {
                a,
                radius: Gamma::new(3.0, 1.0 / a).map_err(|_| NdaError::InvalidSampler("bad decay".into()))?,
            },
            Decay::Gaussian(w) if w > 0.0 => SingleDensity::Gaussian { w },
            _ => return Err(NdaError::InvalidSampler("decay must be positive".into())),
        };
        Ok(ReferenceDensity { single, n: n_particles })
    }

    pub fn for_model(model: &WaveFunctionModel) -> Result<Self> {
        Self::new(model.decay(), model.n_particles())
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn decay(&self) -> Decay {
        match self.single {
            SingleDensity::Exponential { a, .. } => Decay::Exponential(a),
            SingleDensity::Gaussian { w } => Decay::Gaussian(w),
        }
    }

    pub fn sample_particle<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        match self.single {
            SingleDensity::Exponential { radius, .. } => {
                let r = radius.sample(rng);
                let u: [f64; 3] = UnitSphere.sample(rng);
                [r * u[0], r * u[1], r * u[2]]
            }
            SingleDensity::Gaussian { w } => {
                let s = 1.0 / w.sqrt();
                let mut p = [0.0; 3];
                for c in &mut p {
                    *c = s * rng.sample::<f64, _>(StandardNormal);
                }
                p
            }
        }
    }

    pub fn particle_density(&self, p: [f64; 3]) -> f64 {
        let r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        match self.single {
            SingleDensity::Exponential { a, .. } => a * a * a / (8.0 * PI) * (-a * r2.sqrt()).exp(),
            SingleDensity::Gaussian { w } => (w / (2.0 * PI)).powf(1.5) * (-0.5 * w * r2).exp(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, x: &mut [f64]) {
        debug_assert_eq!(x.len(), 3 * self.n);
        for p in x.chunks_exact_mut(3) {
            p.copy_from_slice(&self.sample_particle(rng));
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        x.chunks_exact(3).map(|p| self.particle_density([p[0], p[1], p[2]])).product()
    }
}

/// Settings of one Metropolis chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkerSettings {
    /// Target density `|Psi|^power`.
    pub power: u32,
    pub step: f64,
    pub burn_in: usize,
    pub sweeps: usize,
    /// Adapt each particle's step during burn-in towards
    /// [`TARGET_ACCEPTANCE`].
    pub tune: bool,
}

pub const TARGET_ACCEPTANCE: f64 = 0.5;
const TUNE_INTERVAL: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkerSummary {
    /// Acceptance over the production sweeps.
    pub acceptance: f64,
    /// Mean of the per-particle steps after burn-in.
    pub step: f64,
}

/// Runs a single-particle-move Metropolis chain sampling `|Psi|^power`.
/// `observe` is called once per production sweep with the configuration
/// and `Psi` there.
pub fn run_walker<R, F>(
    model: &WaveFunctionModel,
    g: &ReferenceDensity,
    settings: &WalkerSettings,
    rng: &mut R,
    mut observe: F,
) -> Result<WalkerSummary>
where
    R: Rng + ?Sized,
    F: FnMut(&[f64], f64),
{
    if settings.power == 0 || !(settings.step > 0.0) {
        return Err(NdaError::InvalidSampler("power and step must be positive".into()));
    }
    let n = model.n_particles();
    let mut x = alloc::vec![0.0; 3 * n];
    let mut psi = 0.0;
    for _ in 0..1000 {
        g.sample(rng, &mut x);
        psi = model.value(&x);
        if psi != 0.0 && psi.is_finite() {
            break;
        }
    }
    if psi == 0.0 || !psi.is_finite() {
        return Err(NdaError::InvalidSampler("could not start walker off the node".into()));
    }
    // Particles in tight and diffuse orbitals need very different steps,
    // and the node keeps each one in its role, so steps are tuned per
    // particle and frozen after burn-in.
    let mut step = alloc::vec![settings.step; n];
    let mut acc = alloc::vec![0usize; n];
    let mut prop = 0usize;
    for sweep in 0..settings.burn_in + settings.sweeps {
        if sweep == settings.burn_in {
            acc.fill(0);
            prop = 0;
        }
        for i in 0..n {
            let old = [x[3 * i], x[3 * i + 1], x[3 * i + 2]];
            for c in 0..3 {
                x[3 * i + c] = old[c] + step[i] * (rng.random::<f64>() - 0.5);
            }
            let new = model.value(&x);
            let q = (new / psi).abs();
            let ratio = if settings.power == 1 { q } else { q.powi(settings.power as i32) };
            let u: f64 = rng.random();
            if ratio.is_finite() && u < ratio {
                psi = new;
                acc[i] += 1;
            } else {
                x[3 * i..3 * i + 3].copy_from_slice(&old);
            }
        }
        prop += 1;
        if sweep < settings.burn_in {
            if settings.tune && (sweep + 1) % TUNE_INTERVAL == 0 {
                for (s, a) in step.iter_mut().zip(&mut acc) {
                    let rate = *a as f64 / prop as f64;
                    *s *= (rate / TARGET_ACCEPTANCE).clamp(0.7, 1.4);
                    *a = 0;
                }
                prop = 0;
            }
        } else {
            observe(&x, psi);
        }
    }
    let total: usize = acc.iter().sum();
    let acceptance = if prop > 0 { total as f64 / (prop * n) as f64 } else { f64::NAN };
    Ok(WalkerSummary { acceptance, step: step.iter().sum::<f64>() / n as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, StateParams};
    use alloc::vec::Vec;

    #[test]
    fn streams_differ_by_purpose_and_chain() {
        let a: u64 = chain_rng(7, 1, 0).random();
        let b: u64 = chain_rng(7, 1, 1).random();
        let c: u64 = chain_rng(7, 2, 0).random();
        let d: u64 = chain_rng(7, 1, 0).random();
        assert!(a != b && a != c && b != c);
        assert_eq!(a, d);
    }

    #[test]
    fn reference_density_moments() {
        // Exponential: <r> = 3 / a. Gaussian: <r^2> = 3 / w.
        let g = ReferenceDensity::new(Decay::Exponential(0.5), 1).unwrap();
        let mut rng = chain_rng(1, 99, 0);
        let m: f64 = (0..200_000).map(|_| {
            let p = g.sample_particle(&mut rng);
            (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
        }).sum::<f64>() / 2e5;
        assert!((m - 6.0).abs() < 0.05, "{m}");
        let g = ReferenceDensity::new(Decay::Gaussian(0.25), 1).unwrap();
        let m: f64 = (0..200_000).map(|_| {
            let p = g.sample_particle(&mut rng);
            p[0] * p[0] + p[1] * p[1] + p[2] * p[2]
        }).sum::<f64>() / 2e5;
        assert!((m - 12.0).abs() < 0.15, "{m}");
    }

    #[test]
    fn density_integrates_to_one_along_radius() {
        let g = ReferenceDensity::new(Decay::Exponential(1.3), 1).unwrap();
        let h = 1e-3;
        let s: f64 = (0..60_000).map(|k| {
            let r = (k as f64 + 0.5) * h;
            4.0 * PI * r * r * g.particle_density([0.0, r, 0.0]) * h
        }).sum();
        assert!((s - 1.0).abs() < 1e-6, "{s}");
    }

    #[test]
    fn walker_tunes_and_is_reproducible() {
        let s = lookup("3S_1s2s", &StateParams::default()).unwrap();
        let m = s.model.unwrap();
        let g = ReferenceDensity::for_model(&m).unwrap();
        let set = WalkerSettings { power: 1, step: 0.1, burn_in: 1000, sweeps: 2000, tune: true };
        let run = || {
            let mut v = Vec::new();
            let sum = run_walker(&m, &g, &set, &mut chain_rng(3, 1, 0), |x, _| v.push(x[0])).unwrap();
            (sum, v)
        };
        let (a, va) = run();
        let (b, vb) = run();
        assert_eq!(va, vb);
        assert_eq!(a, b);
        assert_eq!(va.len(), 2000);
        assert!((a.acceptance - 0.5).abs() < 0.1, "{a:?}");
    }
}
