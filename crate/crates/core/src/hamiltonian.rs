//! Potentials and local energies.


#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use crate::config::{check_coords, distance, norm3, pos};
use crate::error::{invalid, NdaError, Result};
use crate::wavefunction::WaveFunctionModel;

/// Distances below this are treated as sitting on a singularity.
pub const SINGULAR_DISTANCE: f64 = 1e-300;
/// Local energies are refused where `|Psi| < NODE_GUARD * |grad Psi|`.
pub const NODE_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum HamiltonianSpec {
    /// `-Z sum 1/r_i`, plus `sum 1/r_ij` when `electron_repulsion` is set.
    CoulombAtom { z: f64, electron_repulsion: bool },
    /// `w^2 sum r_i^2 / 2 + g0 sum 1/r_ij`.
    HarmonicPair { omega: f64, g0: f64 },
}

impl HamiltonianSpec {
    pub fn coulomb(z: f64, electron_repulsion: bool) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(invalid("Z must be positive"));
        }
        Ok(HamiltonianSpec::CoulombAtom { z, electron_repulsion })
    }

    pub fn harmonic(omega: f64, g0: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid("omega must be positive"));
        }
        if !(g0 >= 0.0 && g0.is_finite()) {
            return Err(invalid("g0 must be non-negative"));
        }
        Ok(HamiltonianSpec::HarmonicPair { omega, g0 })
    }

    /// `V(R)` on a raw coordinate slice of `n` particles.
    pub fn potential_raw(&self, x: &[f64], n: usize) -> Result<f64> {
        let mut v = 0.0;
        let pair_strength = match *self {
            HamiltonianSpec::CoulombAtom { z, electron_repulsion } => {
                for i in 0..n {
                    let r = norm3(pos(x, i));
                    if r < SINGULAR_DISTANCE {
                        return Err(NdaError::Singular(r));
                    }
                    v -= z / r;
                }
                if electron_repulsion { 1.0 } else { 0.0 }
            }
            HamiltonianSpec::HarmonicPair { omega, g0 } => {
                let r2: f64 = x.iter().map(|c| c * c).sum();
                v += 0.5 * omega * omega * r2;
                g0
            }
        };
        if pair_strength != 0.0 {
            for i in 0..n {
                for j in i + 1..n {
                    let r = distance(x, i, j);
                    if r < SINGULAR_DISTANCE {
                        return Err(NdaError::Singular(r));
                    }
                    v += pair_strength / r;
                }
            }
        }
        Ok(v)
    }

    pub fn potential(&self, r: &crate::config::Configuration) -> Result<f64> {
        self.potential_raw(r.coords(), r.n_particles())
    }

    /// `(-lap Psi / 2 + V Psi) / Psi`.
    pub fn local_energy(&self, model: &WaveFunctionModel, r: &crate::config::Configuration) -> Result<f64> {
        check_coords(model.n_particles(), r.coords())?;
        let mut grad = alloc::vec![0.0; model.dim()];
        let t = local_kinetic(model, r.coords(), &mut grad)?;
        Ok(t + self.potential_raw(r.coords(), model.n_particles())?)
    }
}

/// `-lap Psi / (2 Psi)` with the node guard applied; `grad` is scratch space.
pub fn local_kinetic(model: &WaveFunctionModel, x: &[f64], grad: &mut [f64]) -> Result<f64> {
    let (psi, lap) = model.value_grad_lap(x, grad);
    let g = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(psi.abs() >= NODE_GUARD * g) || psi == 0.0 {
        return Err(NdaError::NodeProximity { psi, grad: g });
    }
    Ok(-0.5 * lap / psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Configuration;
    use approx::assert_relative_eq;

    #[test]
    fn coulomb_single_electron() {
        let h = HamiltonianSpec::coulomb(2.0, false).unwrap();
        let r = Configuration::from_positions(&[[0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(h.potential(&r).unwrap(), -2.0);
        let origin = Configuration::from_positions(&[[0.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(h.potential(&origin), Err(NdaError::Singular(_))));
    }

    #[test]
    fn harmonic_pair_values() {
        let h = HamiltonianSpec::harmonic(0.25, 0.0).unwrap();
        let origin = Configuration::from_positions(&[[0.0; 3], [0.0; 3]]).unwrap();
        assert_eq!(h.potential(&origin).unwrap(), 0.0);
        let h = HamiltonianSpec::harmonic(0.25, 1.0).unwrap();
        let r = Configuration::from_positions(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap();
        assert_relative_eq!(h.potential(&r).unwrap(), 1.0 / 16.0 + 0.5, max_relative = 1e-15);
        assert!(h.potential(&origin).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(HamiltonianSpec::coulomb(0.0, false).is_err());
        assert!(HamiltonianSpec::harmonic(0.25, -1.0).is_err());
    }
}
