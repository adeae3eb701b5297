//! Nodal domain counts and node equivalence under orthogonal maps.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::catalog::StateSpec;
use crate::error::{NdaError, Result};
use crate::exec::{ChainExecutor, Sequential};
use crate::orbital::Axis;
use crate::sampling::{chain_rng, purpose, run_walker, ReferenceDensity, WalkerSettings};
use crate::wavefunction::WaveFunctionModel;
use crate::estimators::default_step;

/// Block-structured orthogonal map: `t(R)_i = B_i r_{perm[i]}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransformSpec {
    perm: Vec<usize>,
    blocks: Vec<[[f64; 3]; 3]>,
}

const IDENTITY3: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn transpose(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

fn det3(a: &[[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

impl TransformSpec {
    pub fn new(perm: Vec<usize>, blocks: Vec<[[f64; 3]; 3]>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || core::mem::replace(&mut seen[p], true) {
                return Err(NdaError::InvalidParameter(String::from("not a permutation")));
            }
        }
        if blocks.len() != n {
            return Err(NdaError::DimensionMismatch { expected: n, got: blocks.len() });
        }
        for b in &blocks {
            let p = mat3_mul(b, &transpose(b));
            for i in 0..3 {
                for j in 0..3 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    if (p[i][j] - e).abs() > 1e-12 {
                        return Err(NdaError::InvalidParameter(String::from("block is not orthogonal")));
                    }
                }
            }
        }
        Ok(TransformSpec { perm, blocks })
    }

    pub fn identity(n: usize) -> Self {
        TransformSpec { perm: (0..n).collect(), blocks: vec![IDENTITY3; n] }
    }

    /// Reflection of one coordinate of one particle.
    pub fn flip(n: usize, particle: usize, axis: Axis) -> Result<Self> {
        if particle >= n {
            return Err(NdaError::InvalidParameter(format!("particle {particle} out of range")));
        }
        let mut t = Self::identity(n);
        t.blocks[particle][axis.index()][axis.index()] = -1.0;
        Ok(t)
    }

    pub fn n_particles(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn blocks(&self) -> &[[[f64; 3]; 3]] {
        &self.blocks
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, (&p, b)) in self.perm.iter().zip(&self.blocks).enumerate() {
            let r = &x[3 * p..3 * p + 3];
            for a in 0..3 {
                out[3 * i + a] = b[a][0] * r[0] + b[a][1] * r[1] + b[a][2] * r[2];
            }
        }
    }

    /// `t^{-1}(R)_p = B_i^T r_i` with `p = perm[i]`.
    pub fn inverse(&self) -> Self {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut blocks = vec![IDENTITY3; n];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
            blocks[p] = transpose(&self.blocks[i]);
        }
        TransformSpec { perm, blocks }
    }

    /// The full `3N x 3N` matrix, row-major.
    pub fn matrix(&self) -> Vec<f64> {
        let d = 3 * self.perm.len();
        let mut m = vec![0.0; d * d];
        for (i, (&p, b)) in self.perm.iter().zip(&self.blocks).enumerate() {
            for a in 0..3 {
                for c in 0..3 {
                    m[(3 * i + a) * d + 3 * p + c] = b[a][c];
                }
            }
        }
        m
    }

    pub fn determinant(&self) -> f64 {
        let mut d: f64 = self.blocks.iter().map(det3).product();
        // A particle cycle moves three coordinate cycles of the same length;
        // the cubed sign equals the sign of one.
        let mut seen = vec![false; self.perm.len()];
        for s in 0..self.perm.len() {
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            if len > 0 && len % 2 == 0 {
                d = -d;
            }
        }
        d
    }
}

/// All 48 signed permutation matrices in three dimensions.
pub fn signed_permutations() -> Vec<[[f64; 3]; 3]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for p in PERMS {
        for signs in 0..8u32 {
            let mut m = [[0.0; 3]; 3];
            for r in 0..3 {
                m[r][p[r]] = if signs & (1 << r) != 0 { -1.0 } else { 1.0 };
            }
            out.push(m);
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            core::cmp::Ordering::Less => self.parent[a] = b,
            core::cmp::Ordering::Greater => self.parent[b] = a,
            core::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DomainReport {
    pub n_domains: usize,
    pub n_points: usize,
    pub n_edges_tested: usize,
    /// Component sizes, largest first.
    pub component_sizes: Vec<usize>,
    pub positive_fraction: f64,
    /// Fewer than 10% of the samples have one of the two signs.
    pub unbalanced: bool,
    pub confidence_note: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DomainSettings {
    pub n_points: usize,
    pub k_neighbors: usize,
    pub segment_checks: usize,
    pub seed: u64,
}

impl Default for DomainSettings {
    fn default() -> Self {
        DomainSettings { n_points: 20_000, k_neighbors: 12, segment_checks: 16, seed: 0 }
    }
}

pub const MIN_DOMAIN_POINTS: usize = 1000;
const SAMPLING_CHAINS: usize = 8;
const THIN: usize = 4;

/// `n` configurations from `|Psi|`, gathered from independent walkers.
pub fn sample_abs_psi<E: ChainExecutor>(
    model: &WaveFunctionModel,
    n: usize,
    seed: u64,
    stream: u32,
    exec: &E,
) -> Result<Vec<Vec<f64>>> {
    let g = ReferenceDensity::for_model(model)?;
    let per = n.div_ceil(SAMPLING_CHAINS);
    let chains = exec.map_chains(SAMPLING_CHAINS, |c| {
        let settings = WalkerSettings {
            power: 1,
            step: default_step(model.decay()),
            burn_in: 500,
            sweeps: per * THIN,
            tune: true,
        };
        let mut out = Vec::with_capacity(per);
        let mut k = 0;
        run_walker(model, &g, &settings, &mut chain_rng(seed, stream, c), |x, _| {
            k += 1;
            if k % THIN == 0 {
                out.push(x.to_vec());
            }
        })?;
        Ok(out)
    });
    let mut pts = Vec::with_capacity(n);
    for c in chains {
        pts.extend(c?);
    }
    pts.truncate(n);
    Ok(pts)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the `k` nearest other points to each point, by brute force.
fn knn<E: ChainExecutor>(pts: &[Vec<f64>], k: usize, exec: &E) -> Vec<Vec<usize>> {
    const CHUNK: usize = 256;
    let n = pts.len();
    let chunks = exec.map_chains(n.div_ceil(CHUNK), |c| {
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        (c * CHUNK..((c + 1) * CHUNK).min(n))
            .map(|i| {
                best.clear();
                for (j, p) in pts.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let d = dist2(&pts[i], p);
                    if best.len() < k || d < best[best.len() - 1].0 {
                        let pos = best.partition_point(|e| e.0 <= d);
                        best.insert(pos, (d, j));
                        best.truncate(k);
                    }
                }
                best.iter().map(|e| e.1).collect()
            })
            .collect::<Vec<Vec<usize>>>()
    });
    chunks.into_iter().flatten().collect()
}

pub fn count_nodal_domains(state: &StateSpec, settings: &DomainSettings) -> Result<DomainReport> {
    count_nodal_domains_with(state, settings, &Sequential)
}

/// Connected components of the sign-consistent nearest-neighbour graph of
/// points drawn from `|Psi|`.
///
/// An edge is kept only if `Psi` has the same sign at both ends and at
/// `segment_checks` evenly spaced interior points. Unresolved bridges
/// inside a domain can only split components, so the count is an upper
/// bound for smooth nodes.
pub fn count_nodal_domains_with<E: ChainExecutor>(
    state: &StateSpec,
    settings: &DomainSettings,
    exec: &E,
) -> Result<DomainReport> {
    if settings.n_points < MIN_DOMAIN_POINTS {
        return Err(NdaError::InvalidParameter(format!("n_points must be at least {MIN_DOMAIN_POINTS}")));
    }
    if settings.k_neighbors == 0 {
        return Err(NdaError::InvalidParameter(String::from("k_neighbors must be positive")));
    }
    let model = state.model()?;
    let pts = sample_abs_psi(model, settings.n_points, settings.seed, purpose::DOMAINS, exec)?;
    let n = pts.len();
    let sign: Vec<bool> = pts.iter().map(|x| model.value(x) > 0.0).collect();
    let nbrs = knn(&pts, settings.k_neighbors.min(n - 1), exec);
    let mut edges: Vec<(usize, usize)> = nbrs
        .iter()
        .enumerate()
        .flat_map(|(i, js)| js.iter().map(move |&j| (i.min(j), i.max(j))))
        .filter(|&(i, j)| sign[i] == sign[j])
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let m = settings.segment_checks;
    const CHUNK: usize = 4096;
    let keep: Vec<bool> = exec
        .map_chains(edges.len().div_ceil(CHUNK), |c| {
            let mut y = vec![0.0; model.dim()];
            edges[c * CHUNK..((c + 1) * CHUNK).min(edges.len())]
                .iter()
                .map(|&(i, j)| {
                    (1..=m).all(|s| {
                        let t = s as f64 / (m + 1) as f64;
                        for (k, v) in y.iter_mut().enumerate() {
                            *v = pts[i][k] + t * (pts[j][k] - pts[i][k]);
                        }
                        (model.value(&y) > 0.0) == sign[i]
                    })
                })
                .collect::<Vec<bool>>()
        })
        .into_iter()
        .flatten()
        .collect();
    let mut uf = UnionFind::new(n);
    for (&(i, j), &k) in edges.iter().zip(&keep) {
        if k {
            uf.union(i, j);
        }
    }
    let mut sizes = vec![0usize; n];
    for i in 0..n {
        let r = uf.find(i);
        sizes[r] += 1;
    }
    let mut component_sizes: Vec<usize> = sizes.into_iter().filter(|&s| s > 0).collect();
    component_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let positive = sign.iter().filter(|&&s| s).count() as f64 / n as f64;
    let unbalanced = positive.min(1.0 - positive) < 0.1;
    let confidence_note = format!(
        "upper bound from a {}-nearest-neighbour graph on {} points with {} interior sign checks per edge",
        settings.k_neighbors, n, m
    );
    Ok(DomainReport {
        n_domains: component_sizes.len(),
        n_points: n,
        n_edges_tested: edges.len(),
        component_sizes,
        positive_fraction: positive,
        unbalanced,
        confidence_note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Equivalent,
    Inequivalent,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    pub agreement_fraction: f64,
    pub n_points: usize,
    /// Samples replaced because they sat on either node.
    pub resampled: usize,
    /// More than 1% of the samples had to be replaced.
    pub degenerate: bool,
}

/// Points closer to a node than this (in the `|Psi| / |grad Psi|` sense)
/// are replaced.
pub const NODE_TOLERANCE: f64 = 1e-12;

fn near_node(model: &WaveFunctionModel, x: &[f64], grad: &mut [f64]) -> bool {
    let psi = model.value_grad(x, grad);
    let g = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
    !(psi.abs() > NODE_TOLERANCE * g)
}

/// Points from `|Psi_a|` away from both nodes, with their images under `t`
/// and the number of replaced draws.
fn equivalence_points<E: ChainExecutor>(
    a: &WaveFunctionModel,
    b: &WaveFunctionModel,
    t: &TransformSpec,
    n_points: usize,
    seed: u64,
    exec: &E,
) -> Result<(Vec<(f64, Vec<f64>)>, usize)> {
    if a.n_particles() != b.n_particles() || t.n_particles() != a.n_particles() {
        return Err(NdaError::Incompatible(String::from("particle counts differ")));
    }
    let mut out = Vec::with_capacity(n_points);
    let mut resampled = 0;
    let (mut ga, mut gb) = (vec![0.0; a.dim()], vec![0.0; a.dim()]);
    let mut y = vec![0.0; a.dim()];
    let mut round = 0u64;
    while out.len() < n_points {
        let want = (n_points - out.len()).max(SAMPLING_CHAINS);
        let pts = sample_abs_psi(a, want, seed.wrapping_add(round), purpose::EQUIVALENCE, exec)?;
        for x in pts {
            t.apply(&x, &mut y);
            if near_node(a, &x, &mut ga) || near_node(b, &y, &mut gb) {
                resampled += 1;
                continue;
            }
            if out.len() < n_points {
                out.push((a.value(&x), y.clone()));
            }
        }
        round += 1;
        if round > 100 {
            return Err(NdaError::InvalidSampler(String::from("could not draw points off the nodes")));
        }
    }
    Ok((out, resampled))
}

fn verdict(pairs: impl Iterator<Item = bool>, n: usize) -> (Verdict, f64) {
    let plus = pairs.filter(|&s| s).count();
    let frac = plus.max(n - plus) as f64 / n as f64;
    let v = if plus == 0 || plus == n { Verdict::Equivalent } else { Verdict::Inequivalent };
    (v, frac)
}

pub fn test_node_equivalence(
    a: &StateSpec,
    b: &StateSpec,
    t: &TransformSpec,
    n_points: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    test_node_equivalence_with(a, b, t, n_points, seed, &Sequential)
}

/// Compares `sign Psi_a(R)` with `sign Psi_b(t(R))` over points from
/// `|Psi_a|`; the nodes match iff the product has one sign everywhere.
pub fn test_node_equivalence_with<E: ChainExecutor>(
    a: &StateSpec,
    b: &StateSpec,
    t: &TransformSpec,
    n_points: usize,
    seed: u64,
    exec: &E,
) -> Result<EquivalenceReport> {
    if n_points == 0 {
        return Err(NdaError::InvalidParameter(String::from("n_points must be positive")));
    }
    let (ma, mb) = (a.model()?, b.model()?);
    let (pts, resampled) = equivalence_points(ma, mb, t, n_points, seed, exec)?;
    let (v, frac) = verdict(pts.iter().map(|(pa, y)| (*pa > 0.0) == (mb.value(y) > 0.0)), pts.len());
    Ok(EquivalenceReport {
        verdict: v,
        agreement_fraction: frac,
        n_points: pts.len(),
        resampled,
        degenerate: resampled * 100 > n_points,
    })
}

/// Searches per-particle signed permutations combined with particle
/// permutations for a map taking the node of `b` onto that of `a`.
/// Candidates are screened on `n_points` shared samples; the first that
/// survives is returned with its report.
pub fn search_equivalence(
    a: &StateSpec,
    b: &StateSpec,
    n_points: usize,
    seed: u64,
) -> Result<Option<(TransformSpec, EquivalenceReport)>> {
    let (ma, mb) = (a.model()?, b.model()?);
    let n = ma.n_particles();
    if n > 2 {
        return Err(NdaError::InvalidParameter(String::from("search is limited to two particles")));
    }
    let ident = TransformSpec::identity(n);
    let (pts, resampled) = equivalence_points(ma, ma, &ident, n_points, seed, &Sequential)?;
    let sp = signed_permutations();
    let perms: Vec<Vec<usize>> = if n == 1 { vec![vec![0]] } else { vec![vec![0, 1], vec![1, 0]] };
    let block_sets: Vec<Vec<[[f64; 3]; 3]>> = if n == 1 {
        sp.iter().map(|m| vec![*m]).collect()
    } else {
        sp.iter().flat_map(|m1| sp.iter().map(move |m2| vec![*m1, *m2])).collect()
    };
    let mut y = vec![0.0; ma.dim()];
    for perm in &perms {
        for blocks in &block_sets {
            let t = TransformSpec { perm: perm.clone(), blocks: blocks.clone() };
            let mut first = None;
            let ok = pts.iter().all(|(pa, x)| {
                t.apply(x, &mut y);
                let s = (*pa > 0.0) == (mb.value(&y) > 0.0);
                *first.get_or_insert(s) == s
            });
            if ok {
                let mut gb = vec![0.0; ma.dim()];
                let off = pts.iter().all(|(_, x)| {
                    t.apply(x, &mut y);
                    !near_node(mb, &y, &mut gb)
                });
                if off {
                    let report = EquivalenceReport {
                        verdict: Verdict::Equivalent,
                        agreement_fraction: 1.0,
                        n_points: pts.len(),
                        resampled,
                        degenerate: resampled * 100 > n_points,
                    };
                    return Ok(Some((t, report)));
                }
            }
        }
    }
    Ok(None)
}
