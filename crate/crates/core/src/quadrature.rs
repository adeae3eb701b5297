//! Deterministic quadrature for states that reduce to at most three
//! effective dimensions.

use core::f64::consts::{PI, SQRT_2};

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::catalog::{QuadratureReduction, StateSpec};
use crate::error::{NdaError, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::orbital::Radial;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Target {
    PotNda,
    KinNda,
    AbsNorm,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss-Legendre rule: `panels` equal panels on `[a, b]` with
/// `order` points each.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn composite(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
        Rule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

const ORDER: usize = 16;
const RADIAL_PANELS: usize = 40;
const ANGULAR_PANELS: usize = 8;

/// Radius beyond which `exp(-a r)` times any power used here is below
/// double precision.
fn cutoff_exp(a: f64) -> f64 {
    100.0 / a
}

fn radial_rule(r_max: f64) -> Rule {
    Rule::composite(0.0, r_max, RADIAL_PANELS, ORDER)
}

/// `theta` on `[0, pi]`, with a panel boundary at `pi / 2` where `|cos|`
/// has its kink.
fn polar_rule() -> Rule {
    Rule::composite(0.0, PI, ANGULAR_PANELS, ORDER)
}

/// The integrals `(int |Psi|, int V |Psi|, int_node |grad Psi| dS)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrals {
    pub abs_norm: f64,
    pub pot: f64,
    pub node: f64,
}

impl Integrals {
    pub fn target(&self, t: Target) -> f64 {
        match t {
            Target::AbsNorm => self.abs_norm,
            Target::PotNda => self.pot / self.abs_norm,
            Target::KinNda => self.node / self.abs_norm,
        }
    }
}

pub fn quadrature_oracle(state: &StateSpec, target: Target) -> Result<f64> {
    Ok(integrals(state)?.target(target))
}

pub fn integrals(state: &StateSpec) -> Result<Integrals> {
    let red = state.reduction.as_ref().ok_or_else(|| NdaError::NotReducible(state.name.clone()))?;
    if let HamiltonianSpec::CoulombAtom { electron_repulsion: true, .. } = state.hamiltonian {
        return Err(NdaError::NotReducible(state.name.clone()));
    }
    Ok(reduce(red))
}

fn reduce(red: &QuadratureReduction) -> Integrals {
    match *red {
        QuadratureReduction::AxialOrbital { a, z } => axial(a, z),
        QuadratureReduction::EqualRadiiPair { first, second, z } => equal_radii(first, second, z),
        QuadratureReduction::SpinPairProduct(ref inner) => {
            // |Psi| = |A(1,2)| |A(3,4)|: the norm squares, each half carries
            // its own potential, and each of the two node sheets carries one
            // factor of the other half's norm.
            let i = reduce(inner);
            Integrals { abs_norm: i.abs_norm * i.abs_norm, pot: 2.0 * i.pot * i.abs_norm, node: 2.0 * i.node * i.abs_norm }
        }
        QuadratureReduction::HarmonicRelative { omega, g0, corr } => harmonic(omega, g0, corr),
    }
}

/// `Psi = r cos(theta) exp(-a r)`, `V = -Z / r`, node `z = 0`.
fn axial(a: f64, z: f64) -> Integrals {
    let rr = radial_rule(cutoff_exp(a));
    let th = polar_rule();
    let ang = th.integrate(|t| t.cos().abs() * t.sin());
    let abs_norm = 2.0 * PI * ang * rr.integrate(|r| r * r * r * (-a * r).exp());
    let pot = 2.0 * PI * ang * rr.integrate(|r| -z * r * r * (-a * r).exp());
    // On the plane |grad Psi| = |d Psi / dz| = exp(-a rho).
    let node = 2.0 * PI * rr.integrate(|rho| rho * (-a * rho).exp());
    Integrals { abs_norm, pot, node }
}

fn slowest_exp(r: Radial) -> f64 {
    match r {
        Radial::Exp { a } | Radial::LinearExp { a, .. } => a,
        Radial::Gauss { w } => w.sqrt(),
    }
}

/// `Psi = A(r1) B(r2) - A(r2) B(r1)` for s orbitals, `V = -Z/r1 - Z/r2`.
/// The half `r1 < r2` is integrated in `(u, v) = (r1, r2 - r1)`, which
/// keeps the kink of `|Psi|` on a panel edge.
fn equal_radii(a: Radial, b: Radial, z: f64) -> Integrals {
    let k = slowest_exp(a).min(slowest_exp(b));
    let rr = radial_rule(cutoff_exp(2.0 * k));
    let vr = radial_rule(cutoff_exp(k));
    let four_pi2 = 16.0 * PI * PI;
    let (mut abs_norm, mut pot) = (0.0, 0.0);
    for (u, wu) in rr.nodes.iter().zip(&rr.weights) {
        let (au, bu) = (a.value(*u), b.value(*u));
        for (v, wv) in vr.nodes.iter().zip(&vr.weights) {
            let r2 = u + v;
            let psi = (au * b.value(r2) - a.value(r2) * bu).abs();
            let m = wu * wv * u * u * r2 * r2 * psi;
            abs_norm += m;
            if *u > 0.0 {
                pot -= z * m * (1.0 / u + 1.0 / r2);
            }
        }
    }
    // Both halves.
    abs_norm *= 2.0 * four_pi2;
    pot *= 2.0 * four_pi2;
    // On r1 = r2 = r: grad Psi = W (r1_hat, -r2_hat) with W = A'B - AB',
    // and dS = sqrt(2) r^4 dr dOmega1 dOmega2.
    let node = four_pi2 * 2.0 * rr.integrate(|r| {
        let (ea, eb) = (a.eval(r), b.eval(r));
        let w = r * (ea.d1_over_r * eb.value - ea.value * eb.d1_over_r);
        w.abs() * r.powi(4)
    });
    Integrals { abs_norm, pot, node }
}

/// `Psi = exp(-w (r1^2 + r2^2) / 2) (z1 - z2) (1 + c r12)` with
/// `V = w^2 (r1^2 + r2^2) / 2 + g0 / r12`, in centre-of-mass coordinates
/// `R = (r1 + r2) / sqrt 2`, `s = (r1 - r2) / sqrt 2`.
fn harmonic(w: f64, g0: f64, c: f64) -> Integrals {
    let n_r = (2.0 * PI / w).powf(1.5);
    // int R^2 exp(-w R^2 / 2) d^3R
    let m_r = 3.0 / w * n_r;
    let rr = radial_rule(cutoff_exp(w.sqrt()).sqrt() * 8.0);
    let th = polar_rule();
    let ang = th.integrate(|t| t.cos().abs() * t.sin());
    let shape = |s: f64| (-0.5 * w * s * s).exp() * SQRT_2 * s * (1.0 + c * SQRT_2 * s);
    let n_s = 2.0 * PI * ang * rr.integrate(|s| shape(s) * s * s);
    let m_s = 2.0 * PI * ang * rr.integrate(|s| shape(s) * s.powi(4));
    let coul = 2.0 * PI * ang * rr.integrate(|s| shape(s) * s / SQRT_2);
    let abs_norm = n_r * n_s;
    let pot = 0.5 * w * w * (m_r * n_s + n_r * m_s) + g0 * n_r * coul;
    // Node s_z = 0: |grad Psi| = exp(-w (R^2 + s^2) / 2) sqrt 2 (1 + c sqrt 2 s).
    let node = n_r * 2.0 * PI * rr.integrate(|s| (-0.5 * w * s * s).exp() * SQRT_2 * (1.0 + c * SQRT_2 * s) * s);
    Integrals { abs_norm, pot, node }
}
