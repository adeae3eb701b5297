//! Many-particle wave functions with analytic gradients and Laplacians.
//!
//! Three structures cover every state in the catalog:
//!
//! * [`SlaterExpansion`]: a fixed sum of products of spin-up and spin-down
//!   determinants. Derivatives use cofactors, so they stay well defined on
//!   the node where the orbital matrix is singular.
//! * [`ExplicitForm`]: closed forms written directly in Cartesian
//!   coordinates, here the two-electron `rho(r1) rho(r2) r1^T M r2` couplings.
//! * a base model times a positive [`PairFactor`].
//!
//! Models are immutable; every evaluation is a pure function of the
//! coordinates, so a model can be shared across sampling threads.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::boxed::Box;
use alloc::vec::Vec;


use crate::config::{check_coords, dot3, norm3, pos, Configuration};
use crate::error::{invalid, NdaError, Result};
use crate::orbital::{Decay, Orbital, OrbitalValue, Radial};

/// Largest supported particle count.
pub const MAX_PARTICLES: usize = 8;
const MAX_ORBITALS: usize = 8;
const MAX_DET: usize = 6;

/// `sum_t c_t det_up[orbitals_t,up] det_down[orbitals_t,down]`.
///
/// Particles `0..n_up` carry spin up, the rest spin down.
#[derive(Debug, Clone, PartialEq)]
pub struct SlaterExpansion {
    n_up: usize,
    n_down: usize,
    orbitals: Vec<Orbital>,
    terms: Vec<SlaterTerm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlaterTerm {
    pub coeff: f64,
    pub up: Vec<usize>,
    pub down: Vec<usize>,
}

impl SlaterExpansion {
    pub fn new(n_up: usize, n_down: usize) -> Result<Self> {
        if n_up + n_down == 0 || n_up + n_down > MAX_PARTICLES {
            return Err(invalid("particle count must be in 1..=8"));
        }
        if n_up > MAX_DET || n_down > MAX_DET {
            return Err(invalid("determinants larger than 6x6 are not supported"));
        }
        Ok(SlaterExpansion { n_up, n_down, orbitals: Vec::new(), terms: Vec::new() })
    }

    /// A single determinant product.
    pub fn single(up: Vec<Orbital>, down: Vec<Orbital>) -> Result<Self> {
        let mut s = SlaterExpansion::new(up.len(), down.len())?;
        s.add_term(1.0, up, down)?;
        Ok(s)
    }

    pub fn add_term(&mut self, coeff: f64, up: Vec<Orbital>, down: Vec<Orbital>) -> Result<()> {
        if up.len() != self.n_up || down.len() != self.n_down {
            return Err(invalid("term orbital counts must match the spin occupation"));
        }
        let up = up.into_iter().map(|o| self.intern(o)).collect::<Result<Vec<_>>>()?;
        let down = down.into_iter().map(|o| self.intern(o)).collect::<Result<Vec<_>>>()?;
        self.terms.push(SlaterTerm { coeff, up, down });
        Ok(())
    }

    fn intern(&mut self, o: Orbital) -> Result<usize> {
        if let Some(i) = self.orbitals.iter().position(|x| *x == o) {
            return Ok(i);
        }
        if self.orbitals.len() == MAX_ORBITALS {
            return Err(invalid("at most 8 distinct orbitals per expansion"));
        }
        self.orbitals.push(o);
        Ok(self.orbitals.len() - 1)
    }

    pub fn n_particles(&self) -> usize {
        self.n_up + self.n_down
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn orbitals(&self) -> &[Orbital] {
        &self.orbitals
    }

    pub fn terms(&self) -> &[SlaterTerm] {
        &self.terms
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = self.n_particles();
        let no = self.orbitals.len();
        let mut table = [0.0; MAX_PARTICLES * MAX_ORBITALS];
        for i in 0..n {
            let p = pos(x, i);
            for (o, orb) in self.orbitals.iter().enumerate() {
                table[i * no + o] = orb.value(p);
            }
        }
        let entry = |i: usize, o: usize| table[i * no + o];
        let mut psi = 0.0;
        for t in &self.terms {
            let du = channel_det(&entry, 0, &t.up);
            let dd = channel_det(&entry, self.n_up, &t.down);
            psi += t.coeff * du * dd;
        }
        psi
    }

    fn value_grad_lap(&self, x: &[f64], grad: &mut [f64], want_lap: bool) -> (f64, f64) {
        let n = self.n_particles();
        let no = self.orbitals.len();
        let mut table = [OrbitalValue::default(); MAX_PARTICLES * MAX_ORBITALS];
        for i in 0..n {
            let p = pos(x, i);
            for (o, orb) in self.orbitals.iter().enumerate() {
                table[i * no + o] = orb.eval(p);
            }
        }
        let entry = |i: usize, o: usize| table[i * no + o].value;
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut psi = 0.0;
        let mut lap = 0.0;
        let mut gu = [0.0; 3 * MAX_DET];
        let mut gd = [0.0; 3 * MAX_DET];
        for t in &self.terms {
            let (du, lu) = channel_derivs(&table, no, &entry, 0, &t.up, &mut gu, want_lap);
            let (dd, ld) = channel_derivs(&table, no, &entry, self.n_up, &t.down, &mut gd, want_lap);
            psi += t.coeff * du * dd;
            for k in 0..3 * self.n_up {
                grad[k] += t.coeff * dd * gu[k];
            }
            for k in 0..3 * self.n_down {
                grad[3 * self.n_up + k] += t.coeff * du * gd[k];
            }
            if want_lap {
                lap += t.coeff * (lu * dd + du * ld);
            }
        }
        (psi, lap)
    }
}

/// Determinant of `A[i][k] = phi_{orbs[k]}(r_{first + i})`.
#[inline]
fn channel_det(entry: &dyn Fn(usize, usize) -> f64, first: usize, orbs: &[usize]) -> f64 {
    match orbs.len() {
        0 => 1.0,
        1 => entry(first, orbs[0]),
        2 => {
            entry(first, orbs[0]) * entry(first + 1, orbs[1])
                - entry(first, orbs[1]) * entry(first + 1, orbs[0])
        }
        n => {
            let mut m = [0.0; MAX_DET * MAX_DET];
            for i in 0..n {
                for k in 0..n {
                    m[i * n + k] = entry(first + i, orbs[k]);
                }
            }
            lu_det(&mut m[..n * n], n)
        }
    }
}

/// Determinant, its gradient (written to `g`, 3 per channel particle) and
/// optionally its Laplacian, via cofactor expansion along each row.
fn channel_derivs(
    table: &[OrbitalValue],
    no: usize,
    entry: &dyn Fn(usize, usize) -> f64,
    first: usize,
    orbs: &[usize],
    g: &mut [f64],
    want_lap: bool,
) -> (f64, f64) {
    let n = orbs.len();
    if n == 0 {
        return (1.0, 0.0);
    }
    let det = channel_det(entry, first, orbs);
    let mut cof = [0.0; MAX_DET * MAX_DET];
    cofactors(entry, first, orbs, &mut cof[..n * n]);
    let mut lap = 0.0;
    for i in 0..n {
        let mut gi = [0.0; 3];
        for (k, &o) in orbs.iter().enumerate() {
            let ov = &table[(first + i) * no + o];
            let c = cof[i * n + k];
            for a in 0..3 {
                gi[a] += ov.grad[a] * c;
            }
            if want_lap {
                lap += ov.laplacian * c;
            }
        }
        g[3 * i..3 * i + 3].copy_from_slice(&gi);
    }
    (det, lap)
}

fn cofactors(entry: &dyn Fn(usize, usize) -> f64, first: usize, orbs: &[usize], out: &mut [f64]) {
    let n = orbs.len();
    match n {
        1 => out[0] = 1.0,
        2 => {
            out[0] = entry(first + 1, orbs[1]);
            out[1] = -entry(first + 1, orbs[0]);
            out[2] = -entry(first, orbs[1]);
            out[3] = entry(first, orbs[0]);
        }
        _ => {
            let m = n - 1;
            let mut minor = [0.0; MAX_DET * MAX_DET];
            for i in 0..n {
                for k in 0..n {
                    let mut idx = 0;
                    for ii in (0..n).filter(|&ii| ii != i) {
                        for kk in (0..n).filter(|&kk| kk != k) {
                            minor[idx] = entry(first + ii, orbs[kk]);
                            idx += 1;
                        }
                    }
                    let sign = if (i + k) % 2 == 0 { 1.0 } else { -1.0 };
                    out[i * n + k] = sign * lu_det(&mut minor[..m * m], m);
                }
            }
        }
    }
}

/// Determinant by Gaussian elimination with partial pivoting (destroys `m`).
pub(crate) fn lu_det(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let mut piv = c;
        for r in c + 1..n {
            if m[r * n + c].abs() > m[piv * n + c].abs() {
                piv = r;
            }
        }
        if m[piv * n + c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            for k in 0..n {
                m.swap(c * n + k, piv * n + k);
            }
            det = -det;
        }
        let d = m[c * n + c];
        det *= d;
        for r in c + 1..n {
            let f = m[r * n + c] / d;
            if f != 0.0 {
                for k in c..n {
                    m[r * n + k] -= f * m[c * n + k];
                }
            }
        }
    }
    det
}

/// Closed forms written directly in coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum ExplicitForm {
    /// `rho(|r_1|) rho(|r_2|) r_1^T M r_2` for two particles. The
    /// `same_spin` flag marks the pair as exchange-antisymmetric, which
    /// requires an antisymmetric `M`.
    BilinearPair { matrix: [[f64; 3]; 3], radial: Radial, same_spin: bool },
}

impl ExplicitForm {
    pub fn bilinear(matrix: [[f64; 3]; 3], radial: Radial, same_spin: bool) -> Result<Self> {
        if same_spin {
            for a in 0..3 {
                for b in 0..3 {
                    if matrix[a][b] != -matrix[b][a] {
                        return Err(invalid("a same-spin bilinear pair needs an antisymmetric matrix"));
                    }
                }
            }
        }
        Ok(ExplicitForm::BilinearPair { matrix, radial, same_spin })
    }

    pub fn n_particles(&self) -> usize {
        2
    }

    /// `r_1^T M r_2`, summed pairwise so that exchanging particles negates
    /// the result exactly when `M` is antisymmetric.
    #[inline]
    fn form(m: &[[f64; 3]; 3], r1: [f64; 3], r2: [f64; 3]) -> f64 {
        let mut s = m[0][0] * (r1[0] * r2[0]) + m[1][1] * (r1[1] * r2[1]) + m[2][2] * (r1[2] * r2[2]);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            s += m[a][b] * (r1[a] * r2[b]) + m[b][a] * (r1[b] * r2[a]);
        }
        s
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            ExplicitForm::BilinearPair { matrix, radial, .. } => {
                let (r1, r2) = (pos(x, 0), pos(x, 1));
                radial.value(norm3(r1)) * radial.value(norm3(r2)) * Self::form(matrix, r1, r2)
            }
        }
    }

    fn value_grad_lap(&self, x: &[f64], grad: &mut [f64]) -> (f64, f64) {
        match self {
            ExplicitForm::BilinearPair { matrix, radial, .. } => {
                let (r1, r2) = (pos(x, 0), pos(x, 1));
                let a = radial.eval(norm3(r1));
                let b = radial.eval(norm3(r2));
                let g = Self::form(matrix, r1, r2);
                let m_r2 = mat_vec(matrix, r2);
                let mt_r1 = mat_t_vec(matrix, r1);
                for k in 0..3 {
                    grad[k] = b.value * (g * a.d1_over_r * r1[k] + a.value * m_r2[k]);
                    grad[3 + k] = a.value * (g * b.d1_over_r * r2[k] + b.value * mt_r1[k]);
                }
                // r1 . M r2 = r2 . M^T r1 = g, and the form is harmonic in each r_i.
                let lap = b.value * g * (a.d2 + 4.0 * a.d1_over_r) + a.value * g * (b.d2 + 4.0 * b.d1_over_r);
                (a.value * b.value * g, lap)
            }
        }
    }
}

pub(crate) fn mat_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [dot3(m[0], v), dot3(m[1], v), dot3(m[2], v)]
}

pub(crate) fn mat_t_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for a in 0..3 {
        for b in 0..3 {
            out[b] += m[a][b] * v[a];
        }
    }
    out
}

/// Positive correlation factor multiplying a base model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairFactor {
    /// `1 + coeff * r_ij`
    Linear { i: usize, j: usize, coeff: f64 },
}

impl PairFactor {
    pub fn linear(i: usize, j: usize, coeff: f64) -> Result<Self> {
        if i == j || coeff < 0.0 || !coeff.is_finite() {
            return Err(invalid("a linear pair factor needs distinct particles and coeff >= 0"));
        }
        Ok(PairFactor::Linear { i, j, coeff })
    }

    fn value(&self, x: &[f64]) -> f64 {
        match *self {
            PairFactor::Linear { i, j, coeff } => 1.0 + coeff * crate::config::distance(x, i, j),
        }
    }
}

/// An evaluable trial or exact wave function.
#[derive(Debug, Clone, PartialEq)]
pub enum WaveFunctionModel {
    Antisymmetrized(SlaterExpansion),
    Explicit(ExplicitForm),
    Correlated { base: Box<WaveFunctionModel>, factor: PairFactor },
}

impl From<SlaterExpansion> for WaveFunctionModel {
    fn from(s: SlaterExpansion) -> Self {
        WaveFunctionModel::Antisymmetrized(s)
    }
}

impl From<ExplicitForm> for WaveFunctionModel {
    fn from(e: ExplicitForm) -> Self {
        WaveFunctionModel::Explicit(e)
    }
}

impl WaveFunctionModel {
    pub fn with_factor(self, factor: PairFactor) -> Result<Self> {
        let PairFactor::Linear { i, j, .. } = factor;
        if i >= self.n_particles() || j >= self.n_particles() {
            return Err(invalid("pair factor refers to a missing particle"));
        }
        Ok(WaveFunctionModel::Correlated { base: Box::new(self), factor })
    }

    pub fn n_particles(&self) -> usize {
        match self {
            WaveFunctionModel::Antisymmetrized(s) => s.n_particles(),
            WaveFunctionModel::Explicit(e) => e.n_particles(),
            WaveFunctionModel::Correlated { base, .. } => base.n_particles(),
        }
    }

    pub fn dim(&self) -> usize {
        3 * self.n_particles()
    }

    /// Pairs of particles whose exchange must flip the sign of the value.
    pub fn same_spin_pairs(&self) -> Vec<(usize, usize)> {
        match self {
            WaveFunctionModel::Antisymmetrized(s) => {
                let mut pairs = Vec::new();
                for (lo, hi) in [(0, s.n_up), (s.n_up, s.n_particles())] {
                    for i in lo..hi {
                        for j in i + 1..hi {
                            pairs.push((i, j));
                        }
                    }
                }
                pairs
            }
            WaveFunctionModel::Explicit(ExplicitForm::BilinearPair { same_spin, .. }) => {
                if *same_spin {
                    alloc::vec![(0, 1)]
                } else {
                    Vec::new()
                }
            }
            WaveFunctionModel::Correlated { base, .. } => base.same_spin_pairs(),
        }
    }

    /// Slowest asymptotic decay over all orbitals.
    pub fn decay(&self) -> Decay {
        match self {
            WaveFunctionModel::Antisymmetrized(s) => {
                let mut it = s.orbitals.iter().map(|o| o.radial().decay());
                let first = it.next().expect("expansion has orbitals");
                it.fold(first, |acc, d| acc.slowest(d).unwrap_or(acc))
            }
            WaveFunctionModel::Explicit(ExplicitForm::BilinearPair { radial, .. }) => radial.decay(),
            WaveFunctionModel::Correlated { base, .. } => base.decay(),
        }
    }

    /// The same model multiplied by a constant.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            WaveFunctionModel::Antisymmetrized(s) => {
                let mut s = s.clone();
                s.terms.iter_mut().for_each(|t| t.coeff *= c);
                WaveFunctionModel::Antisymmetrized(s)
            }
            WaveFunctionModel::Explicit(ExplicitForm::BilinearPair { matrix, radial, same_spin }) => {
                let mut m = *matrix;
                m.iter_mut().flatten().for_each(|v| *v *= c);
                WaveFunctionModel::Explicit(ExplicitForm::BilinearPair { matrix: m, radial: *radial, same_spin: *same_spin })
            }
            WaveFunctionModel::Correlated { base, factor } => {
                WaveFunctionModel::Correlated { base: Box::new(base.scaled(c)), factor: *factor }
            }
        }
    }

    /// `Psi(R)` on a raw coordinate slice. The slice length is only checked
    /// in debug builds; use [`WaveFunctionModel::evaluate`] for validated input.
    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            WaveFunctionModel::Antisymmetrized(s) => s.value(x),
            WaveFunctionModel::Explicit(e) => e.value(x),
            WaveFunctionModel::Correlated { base, factor } => base.value(x) * factor.value(x),
        }
    }

    /// `Psi(R)`, writing the gradient into `grad`.
    pub fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.eval_inner(x, grad, false).0
    }

    /// `(Psi(R), lap Psi(R))`, writing the gradient into `grad`.
    pub fn value_grad_lap(&self, x: &[f64], grad: &mut [f64]) -> (f64, f64) {
        self.eval_inner(x, grad, true)
    }

    fn eval_inner(&self, x: &[f64], grad: &mut [f64], want_lap: bool) -> (f64, f64) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(grad.len(), self.dim());
        match self {
            WaveFunctionModel::Antisymmetrized(s) => s.value_grad_lap(x, grad, want_lap),
            WaveFunctionModel::Explicit(e) => e.value_grad_lap(x, grad),
            WaveFunctionModel::Correlated { base, factor } => {
                let (psi, lap) = base.eval_inner(x, grad, want_lap);
                let PairFactor::Linear { i, j, coeff } = *factor;
                let (ri, rj) = (pos(x, i), pos(x, j));
                let d = [ri[0] - rj[0], ri[1] - rj[1], ri[2] - rj[2]];
                let r = norm3(d);
                let f = 1.0 + coeff * r;
                // grad_i F = c d / r, grad_j F = -grad_i F, lap F = 4 c / r
                let (gf, lap_f) = if r > 0.0 {
                    ([coeff * d[0] / r, coeff * d[1] / r, coeff * d[2] / r], 4.0 * coeff / r)
                } else {
                    ([0.0; 3], 0.0)
                };
                let mut cross = 0.0;
                for a in 0..3 {
                    cross += grad[3 * i + a] * gf[a] - grad[3 * j + a] * gf[a];
                }
                grad.iter_mut().for_each(|g| *g *= f);
                for a in 0..3 {
                    grad[3 * i + a] += psi * gf[a];
                    grad[3 * j + a] -= psi * gf[a];
                }
                (psi * f, f * lap + 2.0 * cross + psi * lap_f)
            }
        }
    }

    fn check(&self, r: &Configuration) -> Result<()> {
        if r.n_particles() != self.n_particles() {
            return Err(NdaError::DimensionMismatch { expected: self.dim(), got: r.coords().len() });
        }
        check_coords(self.n_particles(), r.coords())
    }

    /// `Psi(R)`; exact zero is a legal result on the node.
    pub fn evaluate(&self, r: &Configuration) -> Result<f64> {
        self.check(r)?;
        Ok(self.value(r.coords()))
    }

    pub fn gradient(&self, r: &Configuration) -> Result<Vec<f64>> {
        self.check(r)?;
        let mut g = alloc::vec![0.0; self.dim()];
        self.value_grad(r.coords(), &mut g);
        Ok(g)
    }

    pub fn laplacian(&self, r: &Configuration) -> Result<f64> {
        self.check(r)?;
        let mut g = alloc::vec![0.0; self.dim()];
        Ok(self.value_grad_lap(r.coords(), &mut g).1)
    }
}
