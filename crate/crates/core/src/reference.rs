//! Exact closed-form nodal/domain averages.
//!
//! Subshell results are kept as exact rationals (coefficients of `Z^2`), so
//! identities between them hold exactly; floats appear only when a value is
//! reported.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use core::f64::consts::PI;

use num_rational::Ratio;

use crate::error::{NdaError, Result};

pub type Rational = Ratio<i64>;

/// `k` electrons in the hydrogenic subshell `l = n - 1` of charge `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubshellParams {
    k: u32,
    l: u32,
    z: f64,
}

impl SubshellParams {
    pub fn new(k: u32, l: u32, z: f64) -> Result<Self> {
        let max = 2 * (2 * l + 1);
        if k == 0 || k > max {
            return Err(NdaError::Occupation { k, l, max });
        }
        if !(z > 0.0 && z.is_finite()) {
            return Err(crate::error::invalid("Z must be positive"));
        }
        Ok(SubshellParams { k, l, z })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Principal quantum number `n = l + 1`.
    pub fn n(&self) -> u32 {
        self.l + 1
    }

    fn z2(&self) -> f64 {
        self.z * self.z
    }
}

fn int(v: u32) -> i64 {
    i64::from(v)
}

/// `k l / (2 (l+1)^2 (l+2))`, the kinetic average in units of `Z^2`.
pub fn subshell_kin_nda_coeff(p: &SubshellParams) -> Rational {
    let l = int(p.l);
    Rational::new(int(p.k) * l, 2 * (l + 1) * (l + 1) * (l + 2))
}

/// `-k / ((l+1)(l+2))`, the potential average in units of `Z^2`.
pub fn subshell_pot_nda_coeff(p: &SubshellParams) -> Rational {
    let l = int(p.l);
    Rational::new(-int(p.k), (l + 1) * (l + 2))
}

/// `-k / (2 n^2)`, the total energy in units of `Z^2`.
pub fn subshell_total_coeff(p: &SubshellParams) -> Rational {
    let n = int(p.n());
    Rational::new(-int(p.k), 2 * n * n)
}

pub fn subshell_kin_nda(p: &SubshellParams) -> f64 {
    to_f64(subshell_kin_nda_coeff(p)) * p.z2()
}

pub fn subshell_pot_nda(p: &SubshellParams) -> f64 {
    to_f64(subshell_pot_nda_coeff(p)) * p.z2()
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Ratios of the nodal/domain averages to the ordinary expectation values
/// `<T> = k Z^2 / (2 n^2)` and `<V> = -k Z^2 / n^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiclassicalGap {
    pub kin_ratio: Rational,
    pub pot_ratio: Rational,
}

impl QuasiclassicalGap {
    pub fn kin(&self) -> f64 {
        to_f64(self.kin_ratio)
    }

    pub fn pot(&self) -> f64 {
        to_f64(self.pot_ratio)
    }
}

pub fn quasiclassical_gap(p: &SubshellParams) -> QuasiclassicalGap {
    let n = int(p.n());
    let kin_std = Rational::new(int(p.k), 2 * n * n);
    let pot_std = Rational::new(-int(p.k), n * n);
    QuasiclassicalGap {
        kin_ratio: subshell_kin_nda_coeff(p) / kin_std,
        pot_ratio: subshell_pot_nda_coeff(p) / pot_std,
    }
}

/// Hamiltonian / wave-function pairings for the harmonically confined pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HarmonicCase {
    /// Noninteracting Hamiltonian, noninteracting eigenstate.
    ANoninteracting,
    /// Interacting Hamiltonian at `w = 1/4, g0 = 1`, exact eigenstate.
    BExact,
    /// Interacting Hamiltonian, noninteracting wave function (same node).
    CMixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicNda {
    pub pot_nda: f64,
    pub kin_nda: f64,
    /// `kin_nda + pot_nda`; for case (c) this is not an eigenvalue.
    pub total: f64,
}

/// Frequency and coupling at which the interacting pair has the closed-form
/// eigenstate `Psi_0 (1 + r_12 / 4)`.
pub const ANALYTIC_OMEGA: f64 = 0.25;
pub const ANALYTIC_G0: f64 = 1.0;
/// Exact eigenvalue at the analytic point, `4 w + 1/4`.
pub const ANALYTIC_ENERGY: f64 = 1.25;

pub fn harmonic_reference(case: HarmonicCase, omega: f64, g0: f64) -> Result<HarmonicNda> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(crate::error::invalid("omega must be positive"));
    }
    match case {
        HarmonicCase::ANoninteracting => {
            if g0 != 0.0 {
                return Err(NdaError::OffAnalyticPoint(alloc::string::String::from(
                    "case (a) is the noninteracting Hamiltonian, g0 = 0",
                )));
            }
            let pot = 3.5 * omega;
            let kin = 0.5 * omega;
            Ok(HarmonicNda { pot_nda: pot, kin_nda: kin, total: pot + kin })
        }
        HarmonicCase::BExact | HarmonicCase::CMixed => {
            if omega != ANALYTIC_OMEGA || g0 != ANALYTIC_G0 {
                return Err(NdaError::OffAnalyticPoint(alloc::format!(
                    "cases (b) and (c) need omega = 1/4 and g0 = 1, got omega = {omega}, g0 = {g0}"
                )));
            }
            let sp = PI.sqrt();
            if case == HarmonicCase::BExact {
                let pot = 3.5 * omega + 0.375 * sp / (4.0 + 3.0 * sp) + (1.0 + 0.5 * sp) / (4.0 + 3.0 * sp);
                Ok(HarmonicNda { pot_nda: pot, kin_nda: ANALYTIC_ENERGY - pot, total: ANALYTIC_ENERGY })
            } else {
                let pot = 3.5 * omega + (PI * omega).sqrt() / 4.0;
                let kin = 0.5 * omega;
                Ok(HarmonicNda { pot_nda: pot, kin_nda: kin, total: pot + kin })
            }
        }
    }
}
