//! One-particle orbitals: an angular polynomial times a radial function.
//!
//! Every orbital is stored unnormalized, in the form used for the closed-form
//! references (e.g. `2p_z = z exp(-Z r / 2)`). Normalization constants cancel
//! in every nodal/domain average, so none are carried.
//!
//! Orbitals are written as `A(r) R(|r|)` where `A` is a real solid harmonic
//! (harmonic and homogeneous of degree `l`) and `R` is one of a few radial
//! forms. Derivatives use the product rule with the radial derivative
//! expressed as `R'(r) / r`, so the Gaussian forms are regular at the origin.
//! For the exponential forms `R'/r` diverges at the nucleus; at exactly
//! `r = 0` that cusp term is dropped and the regular part is returned.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;


use crate::config::dot3;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn unit(self) -> [f64; 3] {
        let mut e = [0.0; 3];
        e[self.index()] = 1.0;
        e
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }
}

/// Which orbital, before the scale parameter is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrbitalKind {
    Hydrogenic1s,
    Hydrogenic2s,
    Hydrogenic2p(Axis),
    /// Hydrogen-like `(n, l = n - 1, m)` with a real solid harmonic;
    /// `m > 0` is the cosine type, `m < 0` the sine type.
    HydrogenicGeneral { n: u32, l: u32, m: i32 },
    /// Harmonic-oscillator ground orbital `exp(-w r^2 / 2)`.
    GaussianS,
    /// Harmonic-oscillator p orbital `x_a exp(-w r^2 / 2)`.
    GaussianP(Axis),
}

/// Radial factor `R(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radial {
    /// `exp(-a r)`
    Exp { a: f64 },
    /// `(1 - b r) exp(-a r)`
    LinearExp { b: f64, a: f64 },
    /// `exp(-w r^2 / 2)`
    Gauss { w: f64 },
}

/// `(R, R'/r, R'')` at radius `r`.
#[derive(Debug, Clone, Copy)]
pub struct RadialValue {
    pub value: f64,
    pub d1_over_r: f64,
    pub d2: f64,
}

impl Radial {
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Radial::Exp { a } => (-a * r).exp(),
            Radial::LinearExp { b, a } => (1.0 - b * r) * (-a * r).exp(),
            Radial::Gauss { w } => (-0.5 * w * r * r).exp(),
        }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> RadialValue {
        match *self {
            Radial::Exp { a } => {
                let e = (-a * r).exp();
                let d1 = -a * e;
                RadialValue {
                    value: e,
                    d1_over_r: if r > 0.0 { d1 / r } else { 0.0 },
                    d2: a * a * e,
                }
            }
            Radial::LinearExp { b, a } => {
                let e = (-a * r).exp();
                let p = 1.0 - b * r;
                let d1 = (-b - a * p) * e;
                RadialValue {
                    value: p * e,
                    d1_over_r: if r > 0.0 { d1 / r } else { 0.0 },
                    d2: (2.0 * a * b + a * a * p) * e,
                }
            }
            Radial::Gauss { w } => {
                let e = (-0.5 * w * r * r).exp();
                RadialValue {
                    value: e,
                    d1_over_r: -w * e,
                    d2: (w * w * r * r - w) * e,
                }
            }
        }
    }

    /// Asymptotic decay, used to pick reference densities.
    pub fn decay(&self) -> Decay {
        match *self {
            Radial::Exp { a } | Radial::LinearExp { a, .. } => Decay::Exponential(a),
            Radial::Gauss { w } => Decay::Gaussian(w),
        }
    }
}

/// Asymptotic decay class of an orbital or a whole wave function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `exp(-a r)`
    Exponential(f64),
    /// `exp(-w r^2 / 2)`
    Gaussian(f64),
}

impl Decay {
    /// The slower of two decays of the same class.
    pub fn slowest(self, other: Decay) -> Result<Decay> {
        match (self, other) {
            (Decay::Exponential(a), Decay::Exponential(b)) => Ok(Decay::Exponential(a.min(b))),
            (Decay::Gaussian(a), Decay::Gaussian(b)) => Ok(Decay::Gaussian(a.min(b))),
            _ => Err(invalid("cannot mix exponential and Gaussian orbitals")),
        }
    }
}

/// A homogeneous polynomial `sum c x^i y^j z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    terms: Vec<(f64, [u32; 3])>,
}

impl Polynomial {
    fn from_map(map: BTreeMap<[u32; 3], f64>) -> Self {
        Polynomial {
            terms: map.into_iter().filter(|(_, c)| *c != 0.0).map(|(e, c)| (c, e)).collect(),
        }
    }

    pub fn terms(&self) -> &[(f64, [u32; 3])] {
        &self.terms
    }

    fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut map = BTreeMap::new();
        for (ca, ea) in &self.terms {
            for (cb, eb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                *map.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        Polynomial::from_map(map)
    }

    fn eval(&self, p: [f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * p[0].powi(e[0] as i32) * p[1].powi(e[1] as i32) * p[2].powi(e[2] as i32))
            .sum()
    }

    /// Value, gradient and Laplacian.
    fn eval_full(&self, p: [f64; 3]) -> (f64, [f64; 3], f64) {
        let pw = |x: f64, n: u32| -> f64 { if n == 0 { 1.0 } else { x.powi(n as i32) } };
        let mut v = 0.0;
        let mut g = [0.0; 3];
        let mut lap = 0.0;
        for (c, e) in &self.terms {
            let f = [pw(p[0], e[0]), pw(p[1], e[1]), pw(p[2], e[2])];
            v += c * f[0] * f[1] * f[2];
            for a in 0..3 {
                if e[a] == 0 {
                    continue;
                }
                let d1 = e[a] as f64 * pw(p[a], e[a] - 1);
                let rest: f64 = (0..3).filter(|&b| b != a).map(|b| f[b]).product();
                g[a] += c * d1 * rest;
                if e[a] >= 2 {
                    lap += c * (e[a] * (e[a] - 1)) as f64 * pw(p[a], e[a] - 2) * rest;
                }
            }
        }
        (v, g, lap)
    }

    fn degree(&self) -> u32 {
        self.terms.first().map(|(_, e)| e[0] + e[1] + e[2]).unwrap_or(0)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64)
}

/// Unnormalized real regular solid harmonic of degree `l`, order `m`.
///
/// `m > 0` gives the `cos(m phi)` type, `m < 0` the `sin(|m| phi)` type.
pub fn real_solid_harmonic(l: u32, m: i32) -> Result<Polynomial> {
    let am = m.unsigned_abs();
    if am > l {
        return Err(invalid("|m| must not exceed l"));
    }
    // z-dependent factor: sum_k (-1)^k 2^-l C(l,k) C(2l-2k,l) (l-2k)!/(l-2k-m)! r^2k z^(l-2k-m)
    let mut pi_map: BTreeMap<[u32; 3], f64> = BTreeMap::new();
    for k in 0..=((l - am) / 2) {
        let coeff = if k % 2 == 0 { 1.0 } else { -1.0 }
            * binomial(l, k)
            * binomial(2 * l - 2 * k, l)
            * falling(l - 2 * k, am)
            / (1u64 << l) as f64;
        let zpow = l - 2 * k - am;
        // (x^2 + y^2 + z^2)^k by the multinomial theorem
        for i in 0..=k {
            for j in 0..=(k - i) {
                let kk = k - i - j;
                let multi = binomial(k, i) * binomial(k - i, j);
                *pi_map.entry([2 * i, 2 * j, 2 * kk + zpow]).or_insert(0.0) += coeff * multi;
            }
        }
    }
    let pi_poly = Polynomial::from_map(pi_map);
    // (x + i y)^|m| split into real (cos) and imaginary (sin) parts.
    let mut ab: BTreeMap<[u32; 3], f64> = BTreeMap::new();
    for p in 0..=am {
        let q = am - p;
        let phase = match (q % 4, m >= 0) {
            (0, true) => 1.0,
            (2, true) => -1.0,
            (1, false) => 1.0,
            (3, false) => -1.0,
            _ => 0.0,
        };
        if phase != 0.0 {
            *ab.entry([p, q, 0]).or_insert(0.0) += phase * binomial(am, p);
        }
    }
    Ok(pi_poly.mul(&Polynomial::from_map(ab)))
}

#[derive(Debug, Clone, PartialEq)]
enum Angular {
    Constant,
    Linear([f64; 3]),
    Poly(Polynomial),
}

impl Angular {
    #[inline]
    fn value(&self, p: [f64; 3]) -> f64 {
        match self {
            Angular::Constant => 1.0,
            Angular::Linear(c) => dot3(*c, p),
            Angular::Poly(poly) => poly.eval(p),
        }
    }

    #[inline]
    fn eval_full(&self, p: [f64; 3]) -> (f64, [f64; 3], f64) {
        match self {
            Angular::Constant => (1.0, [0.0; 3], 0.0),
            Angular::Linear(c) => (dot3(*c, p), *c, 0.0),
            Angular::Poly(poly) => poly.eval_full(p),
        }
    }
}

/// Value, gradient and Laplacian of an orbital at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OrbitalValue {
    pub value: f64,
    pub grad: [f64; 3],
    pub laplacian: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbital {
    kind: OrbitalKind,
    scale: f64,
    angular: Angular,
    radial: Radial,
}

impl Orbital {
    /// Builds an orbital; `scale` is `Z` for hydrogenic kinds and `w` for
    /// the Gaussian kinds.
    pub fn new(kind: OrbitalKind, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("orbital scale must be positive and finite"));
        }
        let (angular, radial) = match kind {
            OrbitalKind::Hydrogenic1s => (Angular::Constant, Radial::Exp { a: scale }),
            OrbitalKind::Hydrogenic2s => (
                Angular::Constant,
                Radial::LinearExp { b: scale / 2.0, a: scale / 2.0 },
            ),
            OrbitalKind::Hydrogenic2p(axis) => (Angular::Linear(axis.unit()), Radial::Exp { a: scale / 2.0 }),
            OrbitalKind::HydrogenicGeneral { n, l, m } => {
                if n == 0 || l + 1 != n {
                    return Err(invalid("general hydrogenic orbitals require l = n - 1"));
                }
                let poly = real_solid_harmonic(l, m)?;
                let angular = match l {
                    0 => Angular::Constant,
                    1 => {
                        let mut c = [0.0; 3];
                        for (coef, e) in poly.terms() {
                            let a = e.iter().position(|&x| x == 1).expect("degree-1 monomial");
                            c[a] = *coef;
                        }
                        Angular::Linear(c)
                    }
                    _ => Angular::Poly(poly),
                };
                (angular, Radial::Exp { a: scale / n as f64 })
            }
            OrbitalKind::GaussianS => (Angular::Constant, Radial::Gauss { w: scale }),
            OrbitalKind::GaussianP(axis) => (Angular::Linear(axis.unit()), Radial::Gauss { w: scale }),
        };
        Ok(Orbital { kind, scale, angular, radial })
    }

    pub fn kind(&self) -> OrbitalKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn radial(&self) -> Radial {
        self.radial
    }

    /// Angular momentum quantum number.
    pub fn l(&self) -> u32 {
        match &self.angular {
            Angular::Constant => 0,
            Angular::Linear(_) => 1,
            Angular::Poly(p) => p.degree(),
        }
    }

    #[inline]
    pub fn value(&self, p: [f64; 3]) -> f64 {
        let r = crate::config::norm3(p);
        self.angular.value(p) * self.radial.value(r)
    }

    #[inline]
    pub fn eval(&self, p: [f64; 3]) -> OrbitalValue {
        let r = crate::config::norm3(p);
        let rv = self.radial.eval(r);
        let (a, ga, lap_a) = self.angular.eval_full(p);
        // grad(A R) = R grad A + A (R'/r) p
        let mut grad = [0.0; 3];
        for k in 0..3 {
            grad[k] = rv.value * ga[k] + a * rv.d1_over_r * p[k];
        }
        // lap(A R) = R lap A + 2 (R'/r) (p . grad A) + A (R'' + 2 R'/r)
        let laplacian = rv.value * lap_a
            + 2.0 * rv.d1_over_r * dot3(p, ga)
            + a * (rv.d2 + 2.0 * rv.d1_over_r);
        OrbitalValue { value: a * rv.value, grad, laplacian }
    }
}
