//! Sibling merging and cross-dataset linking.
//!
//! Candidates come from a cascade of name transformations gated on shared
//! countries; humans accept or reject them through the decision log, and
//! accepted pairs are merged transitively.

mod cascade;
mod dsu;
mod normalize;
mod resolve;
mod siblings;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{
    candidate_id, CandidateScope, CandidateState, CanonicalIxp, LocationEvidence, MappingCandidate,
    SourceId, SourcePair,
};

pub(crate) use cascade::manual_candidate;
pub use cascade::{run_cascade, CascadeConfig, CascadeState, PairProgress, StepSizes, WorkingSet};
pub use dsu::DisjointSets;
pub use normalize::{is_word_char, normalize_name, simple_lowercase, CombinedScheme, NameScheme};
pub use resolve::{
    mapping_exports, resolve_mappings, table2_for, MappingExport, Resolution, Table2,
};
pub use siblings::{merge_siblings, SiblingMerge};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkerError {
    #[error("name must be non-empty")]
    EmptyName,
    #[error("the manual scheme has no automatic transformation")]
    ManualScheme,
    #[error("sibling merge expects records of one source, found {0} and {1}")]
    MixedSources(SourceId, SourceId),
    #[error("decisions accept a merge of {left} and {right} although candidate {candidate_id} rejects it")]
    ConflictingDecisions {
        candidate_id: String,
        left: String,
        right: String,
    },
}

/// Emits candidates between two groups of IXPs whose transformed names are
/// equal and whose country sets intersect.
///
/// For the same group on both sides (`left == right` as slices of one
/// source) every unordered pair is considered once.
pub(crate) fn candidates_between(
    left: &[&CanonicalIxp],
    right: &[&CanonicalIxp],
    pair: SourcePair,
    scope: CandidateScope,
    step: u8,
    transform: impl Fn(&str) -> String,
) -> Vec<MappingCandidate> {
    let keys = |ixp: &CanonicalIxp| -> BTreeSet<String> {
        ixp.names()
            .filter(|n| !n.is_empty())
            .map(&transform)
            .filter(|k| !k.is_empty())
            .collect()
    };
    let mut index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (ri, r) in right.iter().enumerate() {
        for k in keys(r) {
            index.entry(k).or_default().push(ri);
        }
    }

    // (left id, right id) -> smallest matching key
    let mut found: BTreeMap<(String, String), (String, usize, usize)> = BTreeMap::new();
    for (li, l) in left.iter().enumerate() {
        for k in keys(l) {
            let Some(hits) = index.get(&k) else { continue };
            for &ri in hits {
                let r = right[ri];
                if l.canonical_id == r.canonical_id {
                    continue;
                }
                let (a, b) = match scope {
                    CandidateScope::Sibling if l.canonical_id > r.canonical_id => continue,
                    _ => (l.canonical_id.clone(), r.canonical_id.clone()),
                };
                if l.countries().is_disjoint(&r.countries()) {
                    continue;
                }
                found
                    .entry((a, b))
                    .and_modify(|e| {
                        if k < e.0 {
                            e.0 = k.clone();
                        }
                    })
                    .or_insert((k.clone(), li, ri));
            }
        }
    }

    let mut out: Vec<MappingCandidate> = found
        .into_iter()
        .map(|((a, b), (key, li, ri))| MappingCandidate {
            candidate_id: candidate_id(&a, &b),
            location_evidence: location_evidence(left[li], right[ri]),
            left: a,
            right: b,
            pair,
            scope,
            heuristic_step: step,
            transformed_name: key,
            state: CandidateState::Pending,
        })
        .collect();
    sort_candidates(&mut out);
    out
}

pub(crate) fn location_evidence(a: &CanonicalIxp, b: &CanonicalIxp) -> LocationEvidence {
    if !a.cities().is_disjoint(&b.cities()) {
        LocationEvidence::CityMatch
    } else if !a.countries().is_disjoint(&b.countries()) {
        LocationEvidence::CountryMatch
    } else {
        LocationEvidence::None
    }
}

pub(crate) fn sort_candidates(cands: &mut [MappingCandidate]) {
    cands.sort_by(|a, b| {
        (&a.transformed_name, &a.left, &a.right).cmp(&(&b.transformed_name, &b.left, &b.right))
    });
}

/// Candidates for one scheme between two working sets of different sources.
///
/// Orientation follows source order, so swapping the arguments yields the
/// same candidates.
pub fn generate_candidates(
    left: &[&CanonicalIxp],
    right: &[&CanonicalIxp],
    scheme: NameScheme,
) -> Result<Vec<MappingCandidate>, LinkerError> {
    if scheme == NameScheme::Manual {
        return Err(LinkerError::ManualScheme);
    }
    let (Some(ls), Some(rs)) = (single_source(left), single_source(right)) else {
        return Ok(Vec::new());
    };
    if ls == rs {
        return Err(LinkerError::MixedSources(ls, rs));
    }
    let (left, right) = if ls < rs {
        (left, right)
    } else {
        (right, left)
    };
    let pair = SourcePair::new(ls, rs);
    Ok(candidates_between(
        left,
        right,
        pair,
        CandidateScope::Cross,
        scheme.step(),
        |n| normalize_name(n, scheme).unwrap_or_default(),
    ))
}

fn single_source(ixps: &[&CanonicalIxp]) -> Option<SourceId> {
    ixps.first()
        .and_then(|i| i.members.first())
        .map(|m| m.source)
}
