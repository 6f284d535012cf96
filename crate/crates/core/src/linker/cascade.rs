use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{candidates_between, location_evidence, normalize_name, CombinedScheme, NameScheme};
use crate::model::{
    candidate_id, effective_state, latest_decisions, CandidateScope, CandidateState, CanonicalIxp,
    LocationEvidence, MappingCandidate, MappingDecision, SourceId, SourcePair,
};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeConfig {
    /// Steps whose city-matched candidates are accepted without review.
    /// Empty by default; only steps 1..=5 are honoured.
    #[serde(default)]
    pub auto_accept_steps: BTreeSet<u8>,
}

/// Canonical IXPs of one source not yet mapped within a source pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkingSet {
    pub source: SourceId,
    pub ids: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepSizes {
    pub step: u8,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairProgress {
    pub pair: SourcePair,
    /// Accepted mappings per step, keys 1..=6.
    pub accepted_by_step: BTreeMap<u8, usize>,
    /// Working-set sizes before step 1 (step 0) and after each step.
    pub sizes: Vec<StepSizes>,
    pub left: WorkingSet,
    pub right: WorkingSet,
}

impl PairProgress {
    pub fn accepted_total(&self) -> usize {
        self.accepted_by_step.values().sum()
    }
}

/// Result of one deterministic cascade run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeState {
    pub config: CascadeConfig,
    /// Post-sibling-merge IXPs per source.
    pub ixps: BTreeMap<SourceId, Vec<CanonicalIxp>>,
    pub pairs: Vec<PairProgress>,
    /// Every cross candidate, grouped by pair and step.
    pub candidates: Vec<MappingCandidate>,
    pub warnings: Vec<String>,
}

impl CascadeState {
    pub fn pending(&self) -> impl Iterator<Item = &MappingCandidate> {
        self.candidates
            .iter()
            .filter(|c| c.state == CandidateState::Pending)
    }

    pub fn find_ixp(&self, id: &str) -> Option<&CanonicalIxp> {
        self.ixps.values().flatten().find(|i| i.canonical_id == id)
    }
}

/// Runs the name cascade for the three source pairs.
///
/// `manual` holds curator-created step-6 candidates; entries whose
/// endpoints no longer exist are skipped with a warning.
pub fn run_cascade(
    datasets: &BTreeMap<SourceId, Vec<CanonicalIxp>>,
    decision_log: &[MappingDecision],
    manual: &[MappingCandidate],
    config: &CascadeConfig,
) -> CascadeState {
    let latest = latest_decisions(decision_log);
    let empty = Vec::new();
    let mut warnings = Vec::new();
    let mut pairs = Vec::new();
    let mut candidates = Vec::new();

    let all_ids: BTreeMap<&str, SourceId> = datasets
        .iter()
        .flat_map(|(s, v)| v.iter().map(move |i| (i.canonical_id.as_str(), *s)))
        .collect();
    for m in manual {
        if !all_ids.contains_key(m.left.as_str()) || !all_ids.contains_key(m.right.as_str()) {
            warnings.push(format!(
                "manual candidate {} refers to an IXP that no longer exists",
                m.candidate_id
            ));
        }
    }

    for pair in SourcePair::CROSS {
        let left_all = datasets.get(&pair.left).unwrap_or(&empty);
        let right_all = datasets.get(&pair.right).unwrap_or(&empty);
        let mut left: BTreeSet<String> = left_all.iter().map(|i| i.canonical_id.clone()).collect();
        let mut right: BTreeSet<String> =
            right_all.iter().map(|i| i.canonical_id.clone()).collect();
        let mut emitted: BTreeSet<(String, String)> = BTreeSet::new();
        let mut accepted_by_step = BTreeMap::new();
        let mut sizes = vec![StepSizes {
            step: 0,
            left: left.len(),
            right: right.len(),
        }];

        let mut settle = |mut step_cands: Vec<MappingCandidate>,
                          auto: bool,
                          left: &mut BTreeSet<String>,
                          right: &mut BTreeSet<String>,
                          emitted: &mut BTreeSet<(String, String)>|
         -> usize {
            step_cands.retain(|c| emitted.insert((c.left.clone(), c.right.clone())));
            let mut accepted = 0;
            let mut mapped_left = BTreeSet::new();
            let mut mapped_right = BTreeSet::new();
            for c in &mut step_cands {
                let base = if auto && c.location_evidence == LocationEvidence::CityMatch {
                    CandidateState::AutoAccepted
                } else {
                    CandidateState::Pending
                };
                c.state = effective_state(base, latest.get(c.candidate_id.as_str()).copied());
                if c.state.is_accepted() {
                    accepted += 1;
                    mapped_left.insert(c.left.clone());
                    mapped_right.insert(c.right.clone());
                }
            }
            left.retain(|id| !mapped_left.contains(id));
            right.retain(|id| !mapped_right.contains(id));
            candidates.extend(step_cands);
            accepted
        };

        for scheme in NameScheme::AUTOMATIC {
            let l: Vec<&CanonicalIxp> = left_all
                .iter()
                .filter(|i| left.contains(&i.canonical_id))
                .collect();
            let r: Vec<&CanonicalIxp> = right_all
                .iter()
                .filter(|i| right.contains(&i.canonical_id))
                .collect();
            let step = scheme.step();
            let cands = candidates_between(&l, &r, pair, CandidateScope::Cross, step, |n| {
                normalize_name(n, scheme).unwrap_or_default()
            });
            let auto = config.auto_accept_steps.contains(&step);
            let n = settle(cands, auto, &mut left, &mut right, &mut emitted);
            accepted_by_step.insert(step, n);
            sizes.push(StepSizes {
                step,
                left: left.len(),
                right: right.len(),
            });
        }

        // step 6: combined-scheme suggestions plus manual candidates, never auto-accepted
        let l: Vec<&CanonicalIxp> = left_all
            .iter()
            .filter(|i| left.contains(&i.canonical_id))
            .collect();
        let r: Vec<&CanonicalIxp> = right_all
            .iter()
            .filter(|i| right.contains(&i.canonical_id))
            .collect();
        let mut step6 = Vec::new();
        for combo in CombinedScheme::ALL {
            step6.extend(candidates_between(
                &l,
                &r,
                pair,
                CandidateScope::Cross,
                6,
                |n| combo.apply(n),
            ));
        }
        for m in manual {
            if let Some(c) = orient_manual(m, pair, left_all, right_all) {
                step6.push(c);
            }
        }
        let n = settle(step6, false, &mut left, &mut right, &mut emitted);
        accepted_by_step.insert(6, n);
        sizes.push(StepSizes {
            step: 6,
            left: left.len(),
            right: right.len(),
        });

        pairs.push(PairProgress {
            pair,
            accepted_by_step,
            sizes,
            left: WorkingSet {
                source: pair.left,
                ids: left,
            },
            right: WorkingSet {
                source: pair.right,
                ids: right,
            },
        });
    }

    CascadeState {
        config: config.clone(),
        ixps: datasets.clone(),
        pairs,
        candidates,
        warnings,
    }
}

/// Re-orients a manual candidate onto `pair` if both endpoints belong to it.
fn orient_manual(
    m: &MappingCandidate,
    pair: SourcePair,
    left_all: &[CanonicalIxp],
    right_all: &[CanonicalIxp],
) -> Option<MappingCandidate> {
    let find = |set: &'_ [CanonicalIxp], id: &str| set.iter().position(|i| i.canonical_id == id);
    let (li, ri) = match (find(left_all, &m.left), find(right_all, &m.right)) {
        (Some(l), Some(r)) => (l, r),
        _ => match (find(left_all, &m.right), find(right_all, &m.left)) {
            (Some(l), Some(r)) => (l, r),
            _ => return None,
        },
    };
    let (l, r) = (&left_all[li], &right_all[ri]);
    Some(manual_candidate(l, r, pair))
}

/// Builds a step-6 candidate between two IXPs chosen by a curator.
pub(crate) fn manual_candidate(
    l: &CanonicalIxp,
    r: &CanonicalIxp,
    pair: SourcePair,
) -> MappingCandidate {
    let scope = if pair.left == pair.right {
        CandidateScope::Sibling
    } else {
        CandidateScope::Cross
    };
    MappingCandidate {
        candidate_id: candidate_id(&l.canonical_id, &r.canonical_id),
        left: l.canonical_id.clone(),
        right: r.canonical_id.clone(),
        pair,
        scope,
        heuristic_step: NameScheme::Manual.step(),
        transformed_name: format!("{} | {}", l.display_name(), r.display_name()),
        location_evidence: location_evidence(l, r),
        state: CandidateState::Pending,
    }
}
