use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{Asn, LinkSet, LinkSource};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsnRank {
    pub asn: Asn,
    /// Distinct IXPs per link set, in the order the sets were given.
    pub counts: Vec<(LinkSource, usize)>,
    pub sum: usize,
}

/// ASNs ranked by the sum of their per-set IXP counts, descending, ties by
/// ASN ascending. Returns at most `n` rows.
pub fn top_asns(link_sets: &[LinkSet], n: usize) -> Vec<AsnRank> {
    let mut per_set: Vec<BTreeMap<Asn, BTreeSet<&str>>> = Vec::new();
    for set in link_sets {
        let mut m: BTreeMap<Asn, BTreeSet<&str>> = BTreeMap::new();
        for l in &set.links {
            m.entry(l.asn).or_default().insert(&l.ixp);
        }
        per_set.push(m);
    }
    let asns: BTreeSet<Asn> = per_set.iter().flat_map(|m| m.keys().copied()).collect();
    let mut rows: Vec<AsnRank> = asns
        .into_iter()
        .map(|asn| {
            let counts: Vec<(LinkSource, usize)> = link_sets
                .iter()
                .zip(&per_set)
                .map(|(s, m)| (s.source, m.get(&asn).map_or(0, BTreeSet::len)))
                .collect();
            AsnRank {
                asn,
                sum: counts.iter().map(|c| c.1).sum(),
                counts,
            }
        })
        .collect();
    rows.sort_by(|a, b| b.sum.cmp(&a.sum).then(a.asn.cmp(&b.asn)));
    rows.truncate(n);
    rows
}
