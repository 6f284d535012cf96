use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{Asn, CanonicalIxp, SourceId};

/// Participant distribution of one database.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantStats {
    pub source: SourceId,
    /// IXPs listed by the source.
    pub ixp_count: usize,
    pub zero_participant_ixps: usize,
    /// Over IXPs with at least one participant; absent when there are none.
    pub mean: Option<f64>,
    pub median: Option<usize>,
    pub ixps_per_asn: BTreeMap<Asn, usize>,
    /// (participants, fraction of non-empty IXPs with at most that many).
    pub cdf_members_per_ixp: Vec<(usize, f64)>,
    /// (IXP count, fraction of ASNs present at most at that many IXPs).
    pub cdf_ixps_per_asn: Vec<(usize, f64)>,
}

/// Lower-middle median.
pub fn lower_median(sorted: &[usize]) -> Option<usize> {
    if sorted.is_empty() {
        None
    } else {
        Some(sorted[(sorted.len() - 1) / 2])
    }
}

/// Empirical CDF points at each distinct value.
pub fn cdf(values: &[usize]) -> Vec<(usize, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, v) in sorted.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *v => last.1 = frac,
            _ => out.push((*v, frac)),
        }
    }
    out
}

pub fn participant_stats(ixps: &[CanonicalIxp], source: SourceId) -> ParticipantStats {
    let mut counts = Vec::new();
    let mut zero = 0;
    let mut ixp_count = 0;
    let mut ixps_per_asn: BTreeMap<Asn, usize> = BTreeMap::new();
    for ixp in ixps
        .iter()
        .filter(|i| i.status_by_source.contains_key(&source))
    {
        ixp_count += 1;
        let asns = ixp.link_asns(source);
        if asns.is_empty() {
            zero += 1;
            continue;
        }
        counts.push(asns.len());
        for a in asns {
            *ixps_per_asn.entry(a).or_default() += 1;
        }
    }
    counts.sort_unstable();
    let mean =
        (!counts.is_empty()).then(|| counts.iter().sum::<usize>() as f64 / counts.len() as f64);
    let per_asn: Vec<usize> = ixps_per_asn.values().copied().collect();
    ParticipantStats {
        source,
        ixp_count,
        zero_participant_ixps: zero,
        mean,
        median: lower_median(&counts),
        cdf_members_per_ixp: cdf(&counts),
        cdf_ixps_per_asn: cdf(&per_asn),
        ixps_per_asn,
    }
}
