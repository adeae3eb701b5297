//! Random points on parametrized node sheets with their surface weights.
//!
//! [`SheetSampler::sample`] fills a configuration on the sheet and returns
//! `J / q`: the surface-measure Jacobian over the proposal density of the
//! sheet parameters (free particles included). The node integral
//! `int |grad Psi| dS` is then the mean of `|grad Psi| J / q`.

use core::f64::consts::{PI, SQRT_2};

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal, UnitSphere};

use crate::catalog::NodeSheet;
use crate::config::{dot3, norm3};
use crate::error::{NdaError, Result};
use crate::orbital::Decay;
use crate::sampling::ReferenceDensity;
use crate::wavefunction::{mat_t_vec, mat_vec};

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn scale(v: [f64; 3], s: f64) -> [f64; 3] {
    [v[0] * s, v[1] * s, v[2] * s]
}

fn unit(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = norm3(v);
    (n > 0.0 && n.is_finite()).then(|| scale(v, 1.0 / n))
}

/// Orthonormal `(e1, e2)` spanning the plane perpendicular to unit `n`.
fn plane_basis(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let a = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = unit(cross(n, a)).expect("non-parallel helper axis");
    (e1, cross(n, e1))
}

/// Two-dimensional proposal within a plane, matched to the decay.
#[derive(Debug, Clone, Copy)]
enum PlaneProposal {
    /// `a^2 exp(-a rho) / (2 pi)`
    Exponential { a: f64, radius: Gamma<f64> },
    /// Normal with variance `1 / w` per coordinate.
    Gaussian { w: f64 },
}

impl PlaneProposal {
    fn new(decay: Decay) -> Self {
        match decay {
            Decay::Exponential(a) => PlaneProposal::Exponential { a, radius: Gamma::new(2.0, 1.0 / a).unwrap() },
            Decay::Gaussian(w) => PlaneProposal::Gaussian { w },
        }
    }

    /// In-plane coordinates and their density.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ([f64; 2], f64) {
        match *self {
            PlaneProposal::Exponential { a, radius } => {
                let rho = radius.sample(rng);
                let phi = 2.0 * PI * rng.random::<f64>();
                ([rho * phi.cos(), rho * phi.sin()], a * a * (-a * rho).exp() / (2.0 * PI))
            }
            PlaneProposal::Gaussian { w } => {
                let s = 1.0 / w.sqrt();
                let u = [s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal)];
                (u, w / (2.0 * PI) * (-0.5 * w * (u[0] * u[0] + u[1] * u[1])).exp())
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Plane { particle: usize, e1: [f64; 3], e2: [f64; 3] },
    EqualRadii { i: usize, j: usize, radius: Gamma<f64> },
    RelativePlane { i: usize, j: usize, axis: usize },
    /// `axis` spans the kernel of `M^T`, `(p1, p2)` completes the frame.
    BilinearPlane { i: usize, j: usize, m: [[f64; 3]; 3], axis: [f64; 3], p1: [f64; 3], p2: [f64; 3], radius: Radius },
}

/// Radius law of the `exp(-a r) / rho_perp` (or Gaussian) proposal.
#[derive(Debug, Clone, Copy)]
enum Radius {
    /// Density `a^2 r exp(-a r)`.
    Gamma2 { a: f64, law: Gamma<f64> },
    /// Density `w r exp(-w r^2 / 2)`.
    Rayleigh { w: f64 },
}

#[derive(Debug, Clone)]
pub struct SheetSampler {
    kind: Kind,
    g: ReferenceDensity,
    plane: PlaneProposal,
    free: alloc::vec::Vec<usize>,
}

impl SheetSampler {
    pub fn new(sheet: &NodeSheet, g: ReferenceDensity) -> Result<Self> {
        let n = g.n_particles();
        let bad = |m: &str| NdaError::InvalidSampler(alloc::string::String::from(m));
        let decay = g.decay();
        let kind = match *sheet {
            NodeSheet::Plane { particle, normal } => {
                let nrm = unit(normal).ok_or_else(|| bad("plane normal must be nonzero"))?;
                let (e1, e2) = plane_basis(nrm);
                Kind::Plane { particle, e1, e2 }
            }
            NodeSheet::EqualRadii { i, j } => {
                let radius = match decay {
                    Decay::Exponential(a) => Gamma::new(5.0, 1.0 / (2.0 * a)),
                    Decay::Gaussian(w) => Gamma::new(2.5, 1.0 / w),
                }
                .map_err(|_| bad("bad decay"))?;
                Kind::EqualRadii { i, j, radius }
            }
            NodeSheet::RelativePlane { i, j, axis } => Kind::RelativePlane { i, j, axis: axis.index() },
            NodeSheet::BilinearPlane { i, j, matrix } => {
                // The kernel of M^T is orthogonal to every column of M.
                let cols = [0, 1, 2].map(|c| [matrix[0][c], matrix[1][c], matrix[2][c]]);
                let axis = [(0, 1), (0, 2), (1, 2)]
                    .iter()
                    .map(|&(a, b)| cross(cols[a], cols[b]))
                    .max_by(|u, v| norm3(*u).total_cmp(&norm3(*v)))
                    .and_then(unit)
                    .ok_or_else(|| bad("bilinear node needs a matrix of rank at least two"))?;
                let (p1, p2) = plane_basis(axis);
                let radius = match decay {
                    Decay::Exponential(a) => {
                        Radius::Gamma2 { a, law: Gamma::new(2.0, 1.0 / a).map_err(|_| bad("bad decay"))? }
                    }
                    Decay::Gaussian(w) => Radius::Rayleigh { w },
                };
                Kind::BilinearPlane { i, j, m: matrix, axis, p1, p2, radius }
            }
        };
        let constrained = sheet.constrained_particles();
        if constrained.iter().any(|&p| p >= n) || (constrained.len() == 2 && constrained[0] == constrained[1]) {
            return Err(NdaError::Incompatible("sheet particles out of range".into()));
        }
        let free = (0..n).filter(|p| !constrained.contains(p)).collect();
        Ok(SheetSampler { kind, g, plane: PlaneProposal::new(decay), free })
    }

    /// Writes a point of the sheet into `x` and returns `J / q`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, x: &mut [f64]) -> f64 {
        let mut q = 1.0;
        for &p in &self.free {
            let r = self.g.sample_particle(rng);
            q *= self.g.particle_density(r);
            x[3 * p..3 * p + 3].copy_from_slice(&r);
        }
        let put = |x: &mut [f64], p: usize, r: [f64; 3]| x[3 * p..3 * p + 3].copy_from_slice(&r);
        let jac = match self.kind {
            Kind::Plane { particle, e1, e2 } => {
                let (u, qp) = self.plane.sample(rng);
                q *= qp;
                put(x, particle, add(scale(e1, u[0]), scale(e2, u[1])));
                1.0
            }
            Kind::EqualRadii { i, j, radius } => {
                let (r, qr) = match self.g.decay() {
                    Decay::Exponential(a) => {
                        let r = radius.sample(rng);
                        let b = 2.0 * a;
                        (r, b.powi(5) * r.powi(4) * (-b * r).exp() / 24.0)
                    }
                    Decay::Gaussian(w) => {
                        let r = radius.sample(rng).sqrt();
                        let gamma_5_2 = 0.75 * PI.sqrt();
                        (r, 2.0 * w.powf(2.5) * r.powi(4) * (-w * r * r).exp() / gamma_5_2)
                    }
                };
                let ui: [f64; 3] = UnitSphere.sample(rng);
                let uj: [f64; 3] = UnitSphere.sample(rng);
                put(x, i, scale(ui, r));
                put(x, j, scale(uj, r));
                q *= qr / (16.0 * PI * PI);
                SQRT_2 * r.powi(4)
            }
            Kind::RelativePlane { i, j, axis } => {
                let ri = self.g.sample_particle(rng);
                q *= self.g.particle_density(ri);
                let (u, qp) = self.plane.sample(rng);
                q *= qp;
                let mut rj = [0.0; 3];
                rj[axis] = ri[axis];
                rj[(axis + 1) % 3] = u[0];
                rj[(axis + 2) % 3] = u[1];
                put(x, i, ri);
                put(x, j, rj);
                SQRT_2
            }
            Kind::BilinearPlane { i, j, m, axis, p1, p2, radius } => {
                let (r, qr) = match radius {
                    Radius::Gamma2 { a, law } => {
                        let r = law.sample(rng);
                        (r, a * a * (-a * r).exp())
                    }
                    Radius::Rayleigh { w } => {
                        let r = (-2.0 * (1.0 - rng.random::<f64>()).ln() / w).sqrt();
                        (r, w * (-0.5 * w * r * r).exp())
                    }
                };
                let ct = (PI * rng.random::<f64>()).cos();
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                let phi = 2.0 * PI * rng.random::<f64>();
                let ri = add(add(scale(p1, r * st * phi.cos()), scale(p2, r * st * phi.sin())), scale(axis, r * ct));
                let rho_perp = r * st;
                q *= qr / (2.0 * PI * PI * rho_perp);
                let n = mat_t_vec(&m, ri);
                let nn = norm3(n);
                let (e1, e2) = plane_basis(scale(n, 1.0 / nn));
                let (u, qp) = self.plane.sample(rng);
                q *= qp;
                let rj = add(scale(e1, u[0]), scale(e2, u[1]));
                put(x, i, ri);
                put(x, j, rj);
                let mr = mat_vec(&m, rj);
                (dot3(mr, mr) + nn * nn).sqrt() / nn
            }
        };
        jac / q
    }
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{explicit_node, lookup, subshell_family, StateParams, STATE_NAMES};
    use crate::sampling::chain_rng;
    use alloc::vec;

    #[test]
    fn sampled_points_lie_on_the_node() {
        let mut states: alloc::vec::Vec<_> = STATE_NAMES
            .iter()
            .filter_map(|n| lookup(n, &StateParams::default()).ok())
            .collect();
        states.push(subshell_family(1, 3, 1.0).unwrap());
        for s in states {
            let Ok(sheets) = explicit_node(&s) else { continue };
            let m = s.model.as_ref().unwrap();
            let g = ReferenceDensity::for_model(m).unwrap();
            let mut rng = chain_rng(11, 0, 0);
            let mut x = vec![0.0; m.dim()];
            let mut grad = vec![0.0; m.dim()];
            for sheet in sheets {
                let smp = SheetSampler::new(sheet, g).unwrap();
                for _ in 0..2000 {
                    let w = smp.sample(&mut rng, &mut x);
                    assert!(w.is_finite() && w > 0.0);
                    let psi = m.value_grad(&x, &mut grad);
                    let gn = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
                    assert!(psi.abs() <= 1e-10 * gn.max(1e-300), "{} {psi} {gn}", s.name);
                }
            }
        }
    }

    #[test]
    fn rank_one_bilinear_is_rejected() {
        let m = [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let g = ReferenceDensity::new(Decay::Exponential(0.5), 2).unwrap();
        assert!(SheetSampler::new(&NodeSheet::BilinearPlane { i: 0, j: 1, matrix: m }, g).is_err());
    }
}
