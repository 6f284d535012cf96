use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{candidates_between, normalize_name, DisjointSets, LinkerError, NameScheme};
use crate::model::{
    effective_state, latest_decisions, CandidateScope, CandidateState, CanonicalIxp,
    MappingCandidate, MappingDecision, SourcePair, SourceRecord,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiblingMerge {
    /// Merged entities, sorted by canonical id.
    pub ixps: Vec<CanonicalIxp>,
    /// Every sibling candidate with its current state.
    pub candidates: Vec<MappingCandidate>,
    /// Singleton entities referenced by the candidates, for review display.
    pub singletons: Vec<CanonicalIxp>,
}

/// Merges same-source records that the decision log identifies as siblings.
///
/// Candidate pairs share a transformed name under some scheme (aliases
/// included) and a country; each pair is reported at the first step that
/// produces it.
pub fn merge_siblings(
    records: &[SourceRecord],
    decisions: &[MappingDecision],
) -> Result<SiblingMerge, LinkerError> {
    let Some(first) = records.first() else {
        return Ok(SiblingMerge {
            ixps: Vec::new(),
            candidates: Vec::new(),
            singletons: Vec::new(),
        });
    };
    let source = first.source;
    if let Some(r) = records.iter().find(|r| r.source != source) {
        return Err(LinkerError::MixedSources(source, r.source));
    }

    let singletons: Vec<CanonicalIxp> = records.iter().map(CanonicalIxp::from_record).collect();
    let refs: Vec<&CanonicalIxp> = singletons.iter().collect();
    let by_id: BTreeMap<&str, &SourceRecord> = singletons
        .iter()
        .zip(records)
        .map(|(s, r)| (s.canonical_id.as_str(), r))
        .collect();

    let pair = SourcePair::new(source, source);
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut candidates = Vec::new();
    for scheme in NameScheme::AUTOMATIC {
        let step = candidates_between(
            &refs,
            &refs,
            pair,
            CandidateScope::Sibling,
            scheme.step(),
            |n| normalize_name(n, scheme).unwrap_or_default(),
        );
        for c in step {
            if seen.insert((c.left.clone(), c.right.clone())) {
                candidates.push(c);
            }
        }
    }

    let latest = latest_decisions(decisions);
    let mut dsu = DisjointSets::new();
    for s in &singletons {
        dsu.add(&s.canonical_id);
    }
    for c in &mut candidates {
        c.state = effective_state(
            CandidateState::Pending,
            latest.get(c.candidate_id.as_str()).copied(),
        );
        if c.state.is_accepted() {
            dsu.union(&c.left, &c.right);
        }
    }
    if let Some(c) = candidates
        .iter()
        .find(|c| c.state == CandidateState::Rejected && dsu.same(&c.left, &c.right))
    {
        return Err(LinkerError::ConflictingDecisions {
            candidate_id: c.candidate_id.clone(),
            left: c.left.clone(),
            right: c.right.clone(),
        });
    }

    let mut ixps: Vec<CanonicalIxp> = dsu
        .components()
        .into_iter()
        .map(|ids| CanonicalIxp::from_records(ids.iter().map(|id| by_id[id.as_str()])))
        .collect();
    ixps.sort_by(|a, b| a.canonical_id.cmp(&b.canonical_id));

    let referenced: BTreeSet<&str> = candidates
        .iter()
        .flat_map(|c| [c.left.as_str(), c.right.as_str()])
        .collect();
    let mut shown: Vec<CanonicalIxp> = singletons
        .iter()
        .filter(|s| referenced.contains(s.canonical_id.as_str()))
        .cloned()
        .collect();
    shown.sort_by(|a, b| a.canonical_id.cmp(&b.canonical_id));

    Ok(SiblingMerge {
        ixps,
        candidates,
        singletons: shown,
    })
}
