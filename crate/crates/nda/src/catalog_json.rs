//! JSON export of the state catalog.

use nda_core::catalog::{catalog_list, NodeKind, Parameters, StateParams, StateSpec};
use nda_core::Result;
use serde::{Deserialize, Serialize};

use crate::compute::ExactRef;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactPairRef {
    pub kin: ExactRef,
    pub pot: ExactRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub parameters: Parameters,
    pub n_particles: Option<usize>,
    pub eigenstate: bool,
    pub exact_total: Option<ExactRef>,
    pub exact_nda: Option<ExactPairRef>,
    pub exact_expectations: Option<ExactPairRef>,
    pub reference_eigenvalue: Option<ExactRef>,
    /// Sheet kinds, or `determinant_zero` for an implicit node.
    pub node: Vec<NodeKind>,
    pub quadrature: bool,
}

impl From<&StateSpec> for CatalogEntry {
    fn from(s: &StateSpec) -> Self {
        let pair = |p: &Option<nda_core::catalog::ExactPair>| {
            p.as_ref().map(|p| ExactPairRef { kin: (&p.kin).into(), pot: (&p.pot).into() })
        };
        CatalogEntry {
            name: s.name.clone(),
            parameters: s.params,
            n_particles: s.n_particles(),
            eigenstate: s.is_eigenstate(),
            exact_total: s.exact_total.as_ref().map(Into::into),
            exact_nda: pair(&s.exact_nda),
            exact_expectations: pair(&s.exact_expectations),
            reference_eigenvalue: s.reference_eigenvalue.as_ref().map(Into::into),
            node: s.node.kinds(),
            quadrature: s.reduction.is_some(),
        }
    }
}

pub fn export(params: &StateParams) -> Result<Vec<CatalogEntry>> {
    Ok(catalog_list(params)?.iter().map(CatalogEntry::from).collect())
}
