use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::similarity::report_for_sets;
use super::AnalyticsError;
use crate::model::{CanonicalIxp, Link, LinkSet, LinkSource, SimilarityReport, SourceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    Continent,
    SizeBucket,
    Total,
}

impl Grouping {
    pub const ALL: [Grouping; 3] = [Grouping::Continent, Grouping::SizeBucket, Grouping::Total];

    pub fn as_str(self) -> &'static str {
        match self {
            Grouping::Continent => "continent",
            Grouping::SizeBucket => "size",
            Grouping::Total => "total",
        }
    }
}

pub const SIZE_BUCKETS: [&str; 5] = [
    "Less than 30",
    "30 to 59",
    "60 to 119",
    "120 to 239",
    "240 or more",
];
pub const UNKNOWN_CONTINENT: &str = "Unknown";
pub const TOTAL: &str = "Total";

pub fn size_bucket(size: f64) -> &'static str {
    match size {
        s if s < 30.0 => SIZE_BUCKETS[0],
        s if s < 60.0 => SIZE_BUCKETS[1],
        s if s < 120.0 => SIZE_BUCKETS[2],
        s if s < 240.0 => SIZE_BUCKETS[3],
        _ => SIZE_BUCKETS[4],
    }
}

/// Mean participant count over the databases listing at least one
/// participant; 0 when none does.
pub fn ixp_size(ixp: &CanonicalIxp) -> f64 {
    let counts: Vec<usize> = SourceId::DATABASES
        .iter()
        .map(|s| ixp.link_asns(*s).len())
        .filter(|n| *n > 0)
        .collect();
    if counts.is_empty() {
        0.0
    } else {
        counts.iter().sum::<usize>() as f64 / counts.len() as f64
    }
}

fn group_of(ixp: &CanonicalIxp, grouping: Grouping) -> &'static str {
    match grouping {
        Grouping::Continent => ixp
            .continent()
            .map(|c| c.label())
            .unwrap_or(UNKNOWN_CONTINENT),
        Grouping::SizeBucket => size_bucket(ixp_size(ixp)),
        Grouping::Total => TOTAL,
    }
}

fn ordered_groups(grouping: Grouping) -> Vec<&'static str> {
    match grouping {
        Grouping::Continent => crate::model::Continent::ALL
            .iter()
            .map(|c| c.label())
            .chain([UNKNOWN_CONTINENT])
            .collect(),
        Grouping::SizeBucket => SIZE_BUCKETS.to_vec(),
        Grouping::Total => vec![TOTAL],
    }
}

/// Pairwise and k-way link similarity per group.
///
/// Emits, for every non-empty group in display order, one report for each
/// pair of link sets followed by one for all of them. The total is computed
/// separately from the per-group sets, and the per-group link counts must add
/// up to it.
pub fn group_similarity(
    link_sets: &[LinkSet],
    grouping: Grouping,
    ixps: &[CanonicalIxp],
) -> Result<Vec<SimilarityReport>, AnalyticsError> {
    let group_by_ixp: BTreeMap<&str, &'static str> = ixps
        .iter()
        .map(|i| (i.canonical_id.as_str(), group_of(i, grouping)))
        .collect();

    // group -> per-set links
    let mut split: BTreeMap<&'static str, Vec<BTreeSet<&Link>>> = BTreeMap::new();
    for (k, set) in link_sets.iter().enumerate() {
        let mut placed = 0usize;
        for link in &set.links {
            if let Some(g) = group_by_ixp.get(link.ixp.as_str()) {
                split
                    .entry(g)
                    .or_insert_with(|| vec![BTreeSet::new(); link_sets.len()])[k]
                    .insert(link);
                placed += 1;
            }
        }
        if placed != set.len() {
            return Err(AnalyticsError::PartitionMismatch {
                grouping: grouping.as_str().into(),
                set: set.source.to_string(),
                expected: set.len(),
                found: placed,
            });
        }
    }

    let mut out = Vec::new();
    for g in ordered_groups(grouping) {
        let Some(sets) = split.get(g) else { continue };
        let labelled: Vec<(LinkSource, &BTreeSet<&Link>)> = link_sets
            .iter()
            .map(|s| s.source)
            .zip(sets.iter())
            .collect();
        out.extend(reports_for(g, &labelled));
    }
    Ok(out)
}

/// Similarity of whole link sets, keyed "Total".
pub fn total_similarity(link_sets: &[LinkSet]) -> Vec<SimilarityReport> {
    let labelled: Vec<(LinkSource, &BTreeSet<Link>)> =
        link_sets.iter().map(|s| (s.source, &s.links)).collect();
    reports_for(TOTAL, &labelled)
}

fn reports_for<T: Ord>(group: &str, sets: &[(LinkSource, &BTreeSet<T>)]) -> Vec<SimilarityReport> {
    let mut out = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            out.push(report_for_sets(group, &[sets[i], sets[j]]));
        }
    }
    if sets.len() > 2 {
        out.push(report_for_sets(group, sets));
    }
    out
}
