use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::model::{Asn, LinkSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalComparison {
    pub ixp: String,
    pub common: BTreeSet<Asn>,
    pub only_external: BTreeSet<Asn>,
    pub only_union: BTreeSet<Asn>,
    pub jaccard: f64,
    /// Share of the external list found in the union.
    pub coverage: f64,
}

/// Splits an externally published member list against the union links of
/// one IXP.
pub fn compare_external_list(
    ixp: &str,
    external: &BTreeSet<Asn>,
    union_links: &LinkSet,
    known_ixps: &BTreeSet<String>,
) -> Result<ExternalComparison, AnalyticsError> {
    if !known_ixps.contains(ixp) {
        return Err(AnalyticsError::UnknownIxp(ixp.to_string()));
    }
    if external.is_empty() {
        return Err(AnalyticsError::EmptyExternalList(ixp.to_string()));
    }
    let ours = union_links.asns_at(ixp);
    let common: BTreeSet<Asn> = external.intersection(&ours).copied().collect();
    let union_size = external.union(&ours).count();
    Ok(ExternalComparison {
        ixp: ixp.to_string(),
        jaccard: common.len() as f64 / union_size as f64,
        coverage: common.len() as f64 / external.len() as f64,
        only_external: external.difference(&ours).copied().collect(),
        only_union: ours.difference(external).copied().collect(),
        common,
    })
}

/// Share of all external links found in the union, over several IXPs.
pub fn aggregate_coverage(results: &[ExternalComparison]) -> Option<f64> {
    let external: usize = results
        .iter()
        .map(|r| r.common.len() + r.only_external.len())
        .sum();
    let common: usize = results.iter().map(|r| r.common.len()).sum();
    (external > 0).then(|| common as f64 / external as f64)
}
