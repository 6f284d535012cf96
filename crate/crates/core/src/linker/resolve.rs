use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{CascadeState, DisjointSets};
use crate::analytics::similarity::report_for_sets;
use crate::model::{
    latest_decisions, CandidateScope, CandidateState, CanonicalIxp, MappingCandidate,
    MappingDecision, SimilarityReport, SourceId, SourcePair,
};

/// Active-IXP intersections and unions across the three databases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2 {
    pub active_counts: BTreeMap<SourceId, usize>,
    pub all_counts: BTreeMap<SourceId, usize>,
    /// Triple row first, then the three pairs.
    pub rows: Vec<SimilarityReport>,
    pub union_active: usize,
    /// Growth of the union over PeeringDB's active IXPs; absent when
    /// PeeringDB has none.
    pub growth_over_peeringdb: Option<f64>,
}

impl Table2 {
    /// Builds the table from per-source sets of unified IXP ids.
    pub fn from_sets(
        active: &BTreeMap<SourceId, BTreeSet<String>>,
        all_counts: BTreeMap<SourceId, usize>,
    ) -> Table2 {
        let empty = BTreeSet::new();
        let get = |s: SourceId| active.get(&s).unwrap_or(&empty);
        let mut rows = Vec::new();
        rows.push(report_for_sets(
            "active-ixps",
            &[
                (SourceId::EuroIx.into(), get(SourceId::EuroIx)),
                (SourceId::PeeringDb.into(), get(SourceId::PeeringDb)),
                (SourceId::Pch.into(), get(SourceId::Pch)),
            ],
        ));
        for pair in SourcePair::CROSS {
            rows.push(report_for_sets(
                "active-ixps",
                &[
                    (pair.left.into(), get(pair.left)),
                    (pair.right.into(), get(pair.right)),
                ],
            ));
        }
        let union_active = rows[0].union_size;
        let pdb = get(SourceId::PeeringDb).len();
        Table2 {
            active_counts: SourceId::DATABASES
                .iter()
                .map(|s| (*s, get(*s).len()))
                .collect(),
            all_counts,
            rows,
            union_active,
            growth_over_peeringdb: (pdb > 0).then(|| union_active as f64 / pdb as f64 - 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    /// Unified entities sorted by canonical id.
    pub unified: Vec<CanonicalIxp>,
    pub mappings_by_pair: BTreeMap<String, usize>,
    pub table2: Table2,
    /// Rejected candidates whose endpoints were merged through other paths.
    pub conflicts: Vec<String>,
}

fn current_state(
    c: &MappingCandidate,
    latest: &BTreeMap<&str, &MappingDecision>,
) -> CandidateState {
    match latest.get(c.candidate_id.as_str()) {
        Some(d) => crate::model::effective_state(c.state, Some(d)),
        None => c.state,
    }
}

/// Merges accepted cross-dataset candidates into unified entities.
pub fn resolve_mappings(cascade: &CascadeState, decision_log: &[MappingDecision]) -> Resolution {
    let latest = latest_decisions(decision_log);
    let mut dsu = DisjointSets::new();
    let mut by_id: BTreeMap<&str, &CanonicalIxp> = BTreeMap::new();
    for ixp in cascade.ixps.values().flatten() {
        dsu.add(&ixp.canonical_id);
        by_id.insert(&ixp.canonical_id, ixp);
    }

    let mut mappings_by_pair: BTreeMap<String, usize> = SourcePair::CROSS
        .iter()
        .map(|p| (p.to_string(), 0))
        .collect();
    let mut rejected = Vec::new();
    for c in cascade
        .candidates
        .iter()
        .filter(|c| c.scope == CandidateScope::Cross)
    {
        if !by_id.contains_key(c.left.as_str()) || !by_id.contains_key(c.right.as_str()) {
            continue;
        }
        match current_state(c, &latest) {
            st if st.is_accepted() => {
                dsu.union(&c.left, &c.right);
                *mappings_by_pair.entry(c.pair.to_string()).or_default() += 1;
            }
            CandidateState::Rejected => rejected.push(c),
            _ => {}
        }
    }
    let conflicts = rejected
        .into_iter()
        .filter(|c| dsu.same(&c.left, &c.right))
        .map(|c| {
            format!(
                "candidate {} was rejected but {} and {} are linked through other mappings",
                c.candidate_id, c.left, c.right
            )
        })
        .collect();

    let mut unified: Vec<CanonicalIxp> = dsu
        .components()
        .into_iter()
        .map(|ids| {
            if ids.len() == 1 {
                by_id[ids[0].as_str()].clone()
            } else {
                CanonicalIxp::merge(ids.iter().map(|id| by_id[id.as_str()]))
            }
        })
        .collect();
    unified.sort_by(|a, b| a.canonical_id.cmp(&b.canonical_id));

    let table2 = table2_for(&unified);
    Resolution {
        unified,
        mappings_by_pair,
        table2,
        conflicts,
    }
}

/// Table of active-IXP overlaps over a unified dataset.
pub fn table2_for(unified: &[CanonicalIxp]) -> Table2 {
    let mut active: BTreeMap<SourceId, BTreeSet<String>> = BTreeMap::new();
    let mut all_counts: BTreeMap<SourceId, usize> = BTreeMap::new();
    for ixp in unified {
        for s in SourceId::DATABASES {
            if ixp.status_by_source.contains_key(&s) {
                *all_counts.entry(s).or_default() += 1;
            }
            if ixp.is_active_in(s) {
                active
                    .entry(s)
                    .or_default()
                    .insert(ixp.canonical_id.clone());
            }
        }
    }
    Table2::from_sets(&active, all_counts)
}

/// One accepted mapping in the published mapping file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingExport {
    pub left_source: SourceId,
    pub left_record_ids: Vec<String>,
    pub right_source: SourceId,
    pub right_record_ids: Vec<String>,
    pub heuristic_step: u8,
    pub decided_by: String,
    pub decided_at: Option<DateTime<Utc>>,
}

/// Accepted cross mappings, in cascade order.
pub fn mapping_exports(
    cascade: &CascadeState,
    decision_log: &[MappingDecision],
) -> Vec<MappingExport> {
    let latest = latest_decisions(decision_log);
    let records = |id: &str| -> Vec<String> {
        cascade
            .find_ixp(id)
            .map(|i| i.members.iter().map(|m| m.record_id.clone()).collect())
            .unwrap_or_default()
    };
    cascade
        .candidates
        .iter()
        .filter(|c| c.scope == CandidateScope::Cross)
        .filter(|c| current_state(c, &latest).is_accepted())
        .map(|c| {
            let decision = latest.get(c.candidate_id.as_str());
            MappingExport {
                left_source: c.pair.left,
                left_record_ids: records(&c.left),
                right_source: c.pair.right,
                right_record_ids: records(&c.right),
                heuristic_step: c.heuristic_step,
                decided_by: decision
                    .map(|d| d.reviewer.clone())
                    .unwrap_or_else(|| "auto".into()),
                decided_at: decision.map(|d| d.timestamp),
            }
        })
        .collect()
}
