//! Named few-electron states with their exact reference values.
//!
//! All Coulomb states are noninteracting and paired with the Coulomb
//! Hamiltonian without electron repulsion. Reference values are stored as
//! rational multiples of `Z^2` (Coulomb) or `w` (harmonic) where they are
//! rational, and as closed-form decimals otherwise.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, NdaError, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::orbital::{Axis, Orbital, OrbitalKind, Radial};
use crate::reference::{self, HarmonicCase, Rational, SubshellParams};
use crate::wavefunction::{ExplicitForm, PairFactor, SlaterExpansion, WaveFunctionModel};

/// Names accepted by [`lookup`], in catalog order.
pub const STATE_NAMES: [&str; 11] = [
    "2P_2p",
    "3S_1s2s",
    "3P_1s2p",
    "1S_1s2_2s2",
    "1S_1s2_2p2",
    "3P_2p2",
    "1S_2p2",
    "1D_2p2",
    "harmonic_noninteracting",
    "harmonic_exact",
    "harmonic_mixed",
];

/// Bilinear matrices `M` of the two-electron `2p^2` couplings,
/// `Psi = rho(r1) rho(r2) r1^T M r2`.
pub const M_3P: [[f64; 3]; 3] = [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
pub const M_1D: [[f64; 3]; 3] = [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
pub const M_1S: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Unit {
    /// Multiple of `Z^2` Hartree.
    ZSquared,
    /// Multiple of `w` Hartree.
    Omega,
    Hartree,
}

/// An exact reference value evaluated at the state's parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactValue {
    Rational { coeff: Rational, unit: Unit, value: f64 },
    Closed { value: f64, expr: &'static str },
}

impl ExactValue {
    pub fn value(&self) -> f64 {
        match self {
            ExactValue::Rational { value, .. } | ExactValue::Closed { value, .. } => *value,
        }
    }

    /// `"p/q"` for rational references.
    pub fn rational_string(&self) -> Option<String> {
        match self {
            ExactValue::Rational { coeff, .. } => Some(alloc::format!("{}/{}", coeff.numer(), coeff.denom())),
            ExactValue::Closed { .. } => None,
        }
    }

    pub fn unit(&self) -> Unit {
        match self {
            ExactValue::Rational { unit, .. } => *unit,
            ExactValue::Closed { .. } => Unit::Hartree,
        }
    }
}

/// Kinetic/potential pair of references.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPair {
    pub kin: ExactValue,
    pub pot: ExactValue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StateParams {
    pub z: f64,
    pub omega: f64,
    pub g0: f64,
}

impl Default for StateParams {
    fn default() -> Self {
        StateParams { z: 1.0, omega: reference::ANALYTIC_OMEGA, g0: reference::ANALYTIC_G0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum Parameters {
    Coulomb { z: f64 },
    Harmonic { omega: f64, g0: f64 },
}

/// One smooth piece of a nodal hypersurface with an explicit parametrization.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeSheet {
    /// `r_i . n = 0` (unit normal `n`); the coordinate planes are the
    /// axis-aligned case.
    Plane { particle: usize, normal: [f64; 3] },
    /// `|r_i| = |r_j|`.
    EqualRadii { i: usize, j: usize },
    /// `r_i[axis] = r_j[axis]`.
    RelativePlane { i: usize, j: usize, axis: Axis },
    /// `r_i^T M r_j = 0`: for fixed `r_i`, `r_j` lies in the plane with
    /// normal `M^T r_i`. `M` must have rank at least two.
    BilinearPlane { i: usize, j: usize, matrix: [[f64; 3]; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NodeKind {
    CoordinatePlane,
    EqualRadii,
    RelativePlane,
    BilinearPlane,
    DeterminantZero,
}

impl NodeSheet {
    pub fn kind(&self) -> NodeKind {
        match self {
            NodeSheet::Plane { .. } => NodeKind::CoordinatePlane,
            NodeSheet::EqualRadii { .. } => NodeKind::EqualRadii,
            NodeSheet::RelativePlane { .. } => NodeKind::RelativePlane,
            NodeSheet::BilinearPlane { .. } => NodeKind::BilinearPlane,
        }
    }

    /// Dimension of the sheet's parameter space excluding free particles:
    /// always `3k - 1` for `k` constrained particles.
    pub fn constrained_particles(&self) -> Vec<usize> {
        match *self {
            NodeSheet::Plane { particle, .. } => vec![particle],
            NodeSheet::EqualRadii { i, j } | NodeSheet::RelativePlane { i, j, .. } | NodeSheet::BilinearPlane { i, j, .. } => {
                vec![i, j]
            }
        }
    }
}

/// How the node of a state can be traversed.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeParametrization {
    /// Union of sheets overlapping only on sets of lower dimension. An
    /// empty list means the state is nodeless.
    Sheets(Vec<NodeSheet>),
    /// Known only implicitly as `{Psi = 0}`.
    Implicit,
}

impl NodeParametrization {
    pub fn kinds(&self) -> Vec<NodeKind> {
        match self {
            NodeParametrization::Sheets(s) => s.iter().map(NodeSheet::kind).collect(),
            NodeParametrization::Implicit => vec![NodeKind::DeterminantZero],
        }
    }
}

/// Reductions that let the quadrature oracle integrate a state in at most
/// three dimensions.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadratureReduction {
    /// One electron in `z exp(-a r)` with potential `-Z / r`.
    AxialOrbital { a: f64, z: f64 },
    /// Two same-spin electrons `phi(r1) chi(r2) - phi(r2) chi(r1)` in s
    /// orbitals, node `r1 = r2`.
    EqualRadiiPair { first: Radial, second: Radial, z: f64 },
    /// Product of two independent copies (spin up times spin down).
    SpinPairProduct(Box<QuadratureReduction>),
    /// `exp(-w (r1^2 + r2^2) / 2) (z1 - z2) (1 + c r12)` with potential
    /// `w^2 (r1^2 + r2^2) / 2 + g0 / r12`.
    HarmonicRelative { omega: f64, g0: f64, corr: f64 },
}

/// A catalog entry.
#[derive(Debug, Clone)]
pub struct StateSpec {
    pub name: String,
    /// `None` for states represented only through closed forms.
    pub model: Option<WaveFunctionModel>,
    pub params: Parameters,
    /// Hamiltonian the reference values refer to.
    pub hamiltonian: HamiltonianSpec,
    pub exact_total: Option<ExactValue>,
    pub exact_nda: Option<ExactPair>,
    /// Ordinary expectation values over `Psi^2`.
    pub exact_expectations: Option<ExactPair>,
    /// Exact eigenvalue of `hamiltonian` to compare with when the state is
    /// not itself an eigenstate.
    pub reference_eigenvalue: Option<ExactValue>,
    pub node: NodeParametrization,
    pub reduction: Option<QuadratureReduction>,
}

impl StateSpec {
    pub fn model(&self) -> Result<&WaveFunctionModel> {
        self.model.as_ref().ok_or_else(|| NdaError::NotEvaluable(self.name.clone()))
    }

    pub fn is_eigenstate(&self) -> bool {
        self.exact_total.is_some()
    }

    pub fn n_particles(&self) -> Option<usize> {
        self.model.as_ref().map(WaveFunctionModel::n_particles)
    }
}

fn zval(coeff: Rational, z: f64) -> ExactValue {
    ExactValue::Rational { coeff, unit: Unit::ZSquared, value: reference::to_f64(coeff) * z * z }
}

fn wval(coeff: Rational, omega: f64) -> ExactValue {
    ExactValue::Rational { coeff, unit: Unit::Omega, value: reference::to_f64(coeff) * omega }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn orb(kind: OrbitalKind, scale: f64) -> Result<Orbital> {
    Orbital::new(kind, scale)
}

fn coulomb_state(
    name: &str,
    z: f64,
    model: WaveFunctionModel,
    total: Rational,
    nda: (Rational, Rational),
    node: NodeParametrization,
    reduction: Option<QuadratureReduction>,
) -> Result<StateSpec> {
    Ok(StateSpec {
        name: name.to_string(),
        model: Some(model),
        params: Parameters::Coulomb { z },
        hamiltonian: HamiltonianSpec::coulomb(z, false)?,
        exact_total: Some(zval(total, z)),
        exact_nda: Some(ExactPair { kin: zval(nda.0, z), pot: zval(nda.1, z) }),
        // Virial theorem for Coulomb eigenstates: <T> = -E, <V> = 2E.
        exact_expectations: Some(ExactPair { kin: zval(-total, z), pot: zval(total * 2, z) }),
        reference_eigenvalue: None,
        node,
        reduction,
    })
}

fn bilinear_state(name: &str, z: f64, matrix: [[f64; 3]; 3], same_spin: bool) -> Result<StateSpec> {
    let model = ExplicitForm::bilinear(matrix, Radial::Exp { a: z / 2.0 }, same_spin)?.into();
    let node = NodeParametrization::Sheets(vec![NodeSheet::BilinearPlane { i: 0, j: 1, matrix }]);
    coulomb_state(name, z, model, r(-1, 4), (r(1, 12), r(-1, 3)), node, None)
}

/// Looks up a named state at the given parameters.
pub fn lookup(name: &str, params: &StateParams) -> Result<StateSpec> {
    let z = params.z;
    let w = params.omega;
    if !(z > 0.0 && z.is_finite()) || !(w > 0.0 && w.is_finite()) {
        return Err(invalid("Z and omega must be positive"));
    }
    let s1 = || orb(OrbitalKind::Hydrogenic1s, z);
    let s2 = || orb(OrbitalKind::Hydrogenic2s, z);
    let p2 = |a: Axis| orb(OrbitalKind::Hydrogenic2p(a), z);
    let equal_radii = |i, j| NodeSheet::EqualRadii { i, j };
    match name {
        "2P_2p" => coulomb_state(
            name,
            z,
            SlaterExpansion::single(vec![p2(Axis::Z)?], vec![])?.into(),
            r(-1, 8),
            (r(1, 24), r(-1, 6)),
            NodeParametrization::Sheets(vec![NodeSheet::Plane { particle: 0, normal: Axis::Z.unit() }]),
            Some(QuadratureReduction::AxialOrbital { a: z / 2.0, z }),
        ),
        "3S_1s2s" => coulomb_state(
            name,
            z,
            SlaterExpansion::single(vec![s1()?, s2()?], vec![])?.into(),
            r(-5, 8),
            (r(10, 221), r(-1185, 1768)),
            NodeParametrization::Sheets(vec![equal_radii(0, 1)]),
            Some(QuadratureReduction::EqualRadiiPair {
                first: s1()?.radial(),
                second: s2()?.radial(),
                z,
            }),
        ),
        "3P_1s2p" => coulomb_state(
            name,
            z,
            SlaterExpansion::single(vec![s1()?, p2(Axis::Z)?], vec![])?.into(),
            r(-5, 8),
            (r(1, 20), r(-27, 40)),
            NodeParametrization::Implicit,
            None,
        ),
        "1S_1s2_2s2" => coulomb_state(
            name,
            z,
            SlaterExpansion::single(vec![s1()?, s2()?], vec![s1()?, s2()?])?.into(),
            r(-5, 4),
            (r(20, 221), r(-1185, 884)),
            NodeParametrization::Sheets(vec![equal_radii(0, 1), equal_radii(2, 3)]),
            Some(QuadratureReduction::SpinPairProduct(Box::new(QuadratureReduction::EqualRadiiPair {
                first: s1()?.radial(),
                second: s2()?.radial(),
                z,
            }))),
        ),
        "1S_1s2_2p2" => {
            let mut s = SlaterExpansion::new(2, 2)?;
            for a in Axis::ALL {
                s.add_term(1.0, vec![s1()?, p2(a)?], vec![s1()?, p2(a)?])?;
            }
            coulomb_state(name, z, s.into(), r(-5, 4), (r(1, 10), r(-27, 20)), NodeParametrization::Implicit, None)
        }
        "3P_2p2" => bilinear_state(name, z, M_3P, true),
        "1S_2p2" => bilinear_state(name, z, M_1S, false),
        "1D_2p2" => bilinear_state(name, z, M_1D, false),
        "harmonic_noninteracting" => {
            let model = harmonic_base(w)?;
            let case = reference::harmonic_reference(HarmonicCase::ANoninteracting, w, 0.0)?;
            debug_assert_eq!(case.total, 4.0 * w);
            Ok(StateSpec {
                name: name.to_string(),
                model: Some(model),
                params: Parameters::Harmonic { omega: w, g0: 0.0 },
                hamiltonian: HamiltonianSpec::harmonic(w, 0.0)?,
                exact_total: Some(wval(r(4, 1), w)),
                exact_nda: Some(ExactPair { kin: wval(r(1, 2), w), pot: wval(r(7, 2), w) }),
                exact_expectations: Some(ExactPair { kin: wval(r(2, 1), w), pot: wval(r(2, 1), w) }),
                reference_eigenvalue: None,
                node: relative_node(),
                reduction: Some(QuadratureReduction::HarmonicRelative { omega: w, g0: 0.0, corr: 0.0 }),
            })
        }
        "harmonic_exact" => {
            let g0 = params.g0;
            let case = reference::harmonic_reference(HarmonicCase::BExact, w, g0)?;
            let model = harmonic_base(w)?.with_factor(PairFactor::linear(0, 1, 0.25)?)?;
            Ok(StateSpec {
                name: name.to_string(),
                model: Some(model),
                params: Parameters::Harmonic { omega: w, g0 },
                hamiltonian: HamiltonianSpec::harmonic(w, g0)?,
                exact_total: Some(ExactValue::Rational { coeff: r(5, 4), unit: Unit::Hartree, value: case.total }),
                exact_nda: Some(ExactPair {
                    kin: ExactValue::Closed { value: case.kin_nda, expr: "5/4 - pot_nda" },
                    pot: ExactValue::Closed {
                        value: case.pot_nda,
                        expr: "7w/2 + (3/8) sqrt(pi)/(4+3 sqrt(pi)) + (1+sqrt(pi)/2)/(4+3 sqrt(pi))",
                    },
                }),
                exact_expectations: None,
                reference_eigenvalue: None,
                node: relative_node(),
                reduction: Some(QuadratureReduction::HarmonicRelative { omega: w, g0, corr: 0.25 }),
            })
        }
        "harmonic_mixed" => {
            let g0 = params.g0;
            let at_point = w == reference::ANALYTIC_OMEGA && g0 == reference::ANALYTIC_G0;
            let (nda, eig) = if at_point {
                let c = reference::harmonic_reference(HarmonicCase::CMixed, w, g0)?;
                (
                    Some(ExactPair {
                        kin: wval(r(1, 2), w),
                        pot: ExactValue::Closed { value: c.pot_nda, expr: "7w/2 + sqrt(pi w)/4" },
                    }),
                    Some(ExactValue::Rational { coeff: r(5, 4), unit: Unit::Hartree, value: reference::ANALYTIC_ENERGY }),
                )
            } else {
                (None, None)
            };
            Ok(StateSpec {
                name: name.to_string(),
                model: Some(harmonic_base(w)?),
                params: Parameters::Harmonic { omega: w, g0 },
                hamiltonian: HamiltonianSpec::harmonic(w, g0)?,
                exact_total: None,
                exact_nda: nda,
                exact_expectations: None,
                reference_eigenvalue: eig,
                node: relative_node(),
                reduction: Some(QuadratureReduction::HarmonicRelative { omega: w, g0, corr: 0.0 }),
            })
        }
        _ => Err(NdaError::UnknownState(name.to_string())),
    }
}

/// `exp(-w (r1^2 + r2^2) / 2) (z1 - z2)` as a same-spin determinant.
fn harmonic_base(w: f64) -> Result<WaveFunctionModel> {
    Ok(SlaterExpansion::single(
        vec![orb(OrbitalKind::GaussianP(Axis::Z), w)?, orb(OrbitalKind::GaussianS, w)?],
        vec![],
    )?
    .into())
}

fn relative_node() -> NodeParametrization {
    NodeParametrization::Sheets(vec![NodeSheet::RelativePlane { i: 0, j: 1, axis: Axis::Z }])
}

/// Every named state at the given parameters. The interacting harmonic
/// entries are skipped when the parameters are off the analytic point.
pub fn catalog_list(params: &StateParams) -> Result<Vec<StateSpec>> {
    let mut out = Vec::new();
    for name in STATE_NAMES {
        match lookup(name, params) {
            Ok(s) => out.push(s),
            Err(NdaError::OffAnalyticPoint(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// `k` electrons in the subshell `l = n - 1`.
///
/// Evaluable models exist for a single electron (a sectoral orbital
/// `Re (x + i y)^l exp(-Z r / n)`, whose node is `l` planes through the
/// z axis) and for the `2p^2` triplet; other members carry references only.
pub fn subshell_family(k: u32, l: u32, z: f64) -> Result<StateSpec> {
    let p = SubshellParams::new(k, l, z)?;
    let total = reference::subshell_total_coeff(&p);
    let kin = reference::subshell_kin_nda_coeff(&p);
    let pot = reference::subshell_pot_nda_coeff(&p);
    let n = i64::from(p.n());
    let name = alloc::format!("subshell_k{k}_l{l}");
    let (model, node): (Option<WaveFunctionModel>, NodeParametrization) = match (k, l) {
        (1, _) if l <= 6 => {
            let o = orb(OrbitalKind::HydrogenicGeneral { n: l + 1, l, m: l as i32 }, z)?;
            let sheets = (0..l)
                .map(|j| {
                    let phi = (2 * j + 1) as f64 * core::f64::consts::PI / (2 * l) as f64;
                    NodeSheet::Plane { particle: 0, normal: [-phi.sin(), phi.cos(), 0.0] }
                })
                .collect();
            (Some(SlaterExpansion::single(vec![o], vec![])?.into()), NodeParametrization::Sheets(sheets))
        }
        (2, 1) => {
            let s = bilinear_state(&name, z, M_3P, true)?;
            (s.model, s.node)
        }
        _ => (None, NodeParametrization::Implicit),
    };
    Ok(StateSpec {
        name,
        model,
        params: Parameters::Coulomb { z },
        hamiltonian: HamiltonianSpec::coulomb(z, false)?,
        exact_total: Some(zval(total, z)),
        exact_nda: Some(ExactPair { kin: zval(kin, z), pot: zval(pot, z) }),
        exact_expectations: Some(ExactPair {
            kin: zval(Rational::new(i64::from(k), 2 * n * n), z),
            pot: zval(Rational::new(-i64::from(k), n * n), z),
        }),
        reference_eigenvalue: None,
        node,
        reduction: None,
    })
}

/// The node parametrization of a state; implicit nodes are returned as
/// [`NodeParametrization::Implicit`].
pub fn node_parametrization(state: &StateSpec) -> &NodeParametrization {
    &state.node
}

/// Like [`node_parametrization`] but an error for implicit nodes.
pub fn explicit_node(state: &StateSpec) -> Result<&[NodeSheet]> {
    match &state.node {
        NodeParametrization::Sheets(s) => Ok(s),
        NodeParametrization::Implicit => Err(NdaError::NoKnownNode(state.name.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::subshell_kin_nda_coeff;

    fn get(name: &str) -> StateSpec {
        lookup(name, &StateParams::default()).unwrap()
    }

    fn coeff(v: &ExactValue) -> Rational {
        match v {
            ExactValue::Rational { coeff, .. } => *coeff,
            ExactValue::Closed { .. } => panic!("not rational"),
        }
    }

    #[test]
    fn table_two_lookups() {
        let s = get("3S_1s2s");
        let nda = s.exact_nda.as_ref().unwrap();
        assert_eq!(coeff(&nda.kin), r(10, 221));
        assert_eq!(coeff(&nda.pot), r(-1185, 1768));
        assert_eq!(coeff(s.exact_total.as_ref().unwrap()), r(-5, 8));
        let s = get("1S_1s2_2p2");
        let nda = s.exact_nda.as_ref().unwrap();
        assert_eq!((coeff(&nda.kin), coeff(&nda.pot)), (r(1, 10), r(-27, 20)));
        assert_eq!(get("harmonic_exact").exact_total.unwrap().value(), 1.25);
    }

    #[test]
    fn nda_components_sum_to_total() {
        for s in catalog_list(&StateParams::default()).unwrap() {
            if let (Some(t), Some(nda)) = (&s.exact_total, &s.exact_nda) {
                if let (ExactValue::Rational { coeff: a, .. }, ExactValue::Rational { coeff: b, .. }, ExactValue::Rational { coeff: c, .. }) =
                    (&nda.kin, &nda.pot, t)
                {
                    assert_eq!(*a + *b, *c, "{}", s.name);
                }
                assert!((nda.kin.value() + nda.pot.value() - t.value()).abs() <= 1e-12, "{}", s.name);
            }
        }
    }

    #[test]
    fn degenerate_pairs_share_totals() {
        let t = |n: &str| get(n).exact_total.unwrap();
        assert_eq!(t("3S_1s2s"), t("3P_1s2p"));
        assert_eq!(t("1S_1s2_2s2"), t("1S_1s2_2p2"));
    }

    #[test]
    fn subshell_references_match_catalog() {
        let p2 = get("2P_2p").exact_nda.unwrap();
        let fam = subshell_family(1, 1, 1.0).unwrap().exact_nda.unwrap();
        assert_eq!(p2, fam);
        for name in ["3P_2p2", "1S_2p2", "1D_2p2"] {
            let nda = get(name).exact_nda.unwrap();
            assert_eq!(coeff(&nda.kin), subshell_kin_nda_coeff(&SubshellParams::new(2, 1, 1.0).unwrap()));
            assert_eq!(nda, subshell_family(2, 1, 1.0).unwrap().exact_nda.unwrap());
        }
        assert!(subshell_family(3, 3, 1.0).unwrap().model.is_none());
        assert!(subshell_family(15, 3, 1.0).is_err());
    }

    #[test]
    fn node_kinds() {
        assert_eq!(get("2P_2p").node.kinds(), vec![NodeKind::CoordinatePlane]);
        assert_eq!(get("3S_1s2s").node.kinds(), vec![NodeKind::EqualRadii]);
        assert_eq!(get("harmonic_exact").node.kinds(), vec![NodeKind::RelativePlane]);
        assert_eq!(get("3P_1s2p").node.kinds(), vec![NodeKind::DeterminantZero]);
        assert!(matches!(explicit_node(&get("1S_1s2_2p2")), Err(NdaError::NoKnownNode(_))));
    }

    #[test]
    fn unknown_and_off_point() {
        assert!(matches!(lookup("4F_nope", &StateParams::default()), Err(NdaError::UnknownState(_))));
        let off = StateParams { omega: 0.3, ..StateParams::default() };
        assert!(matches!(lookup("harmonic_exact", &off), Err(NdaError::OffAnalyticPoint(_))));
        assert!(lookup("harmonic_mixed", &off).unwrap().exact_nda.is_none());
        assert_eq!(catalog_list(&off).unwrap().len(), STATE_NAMES.len() - 1);
    }
}
