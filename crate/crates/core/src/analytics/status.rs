use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{CanonicalIxp, IxpStatus, SourceId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyCell {
    pub left: IxpStatus,
    pub right: IxpStatus,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatusConsistency {
    pub pairs: usize,
    pub consistent: usize,
    pub fraction: f64,
    /// Non-zero cells in status order.
    pub contingency: Vec<ContingencyCell>,
    /// Left active, right defunct.
    pub only_right_defunct: usize,
    /// Left defunct, right active.
    pub only_left_defunct: usize,
}

impl StatusConsistency {
    pub fn cell(&self, left: IxpStatus, right: IxpStatus) -> usize {
        self.contingency
            .iter()
            .find(|c| c.left == left && c.right == right)
            .map_or(0, |c| c.count)
    }
}

/// Fraction of linked pairs whose statuses agree; `None` without pairs.
pub fn status_consistency(pairs: &[(IxpStatus, IxpStatus)]) -> Option<StatusConsistency> {
    if pairs.is_empty() {
        return None;
    }
    let mut table: BTreeMap<(IxpStatus, IxpStatus), usize> = BTreeMap::new();
    for p in pairs {
        *table.entry(*p).or_default() += 1;
    }
    let consistent = pairs.iter().filter(|(a, b)| a == b).count();
    let get = |a, b| table.get(&(a, b)).copied().unwrap_or(0);
    Some(StatusConsistency {
        pairs: pairs.len(),
        consistent,
        fraction: consistent as f64 / pairs.len() as f64,
        only_right_defunct: get(IxpStatus::Active, IxpStatus::Defunct),
        only_left_defunct: get(IxpStatus::Defunct, IxpStatus::Active),
        contingency: table
            .into_iter()
            .map(|((left, right), count)| ContingencyCell { left, right, count })
            .collect(),
    })
}

/// Status pairs of unified IXPs reported by both sources.
pub fn status_pairs(
    unified: &[CanonicalIxp],
    left: SourceId,
    right: SourceId,
) -> Vec<(IxpStatus, IxpStatus)> {
    unified
        .iter()
        .filter_map(|u| {
            Some((
                *u.status_by_source.get(&left)?,
                *u.status_by_source.get(&right)?,
            ))
        })
        .collect()
}
