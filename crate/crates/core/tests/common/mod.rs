#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ixpunion::{CanonicalIxp, IxpStatus, Location, Participant, SourceId, SourceRecord};

pub fn record(
    source: SourceId,
    id: &str,
    names: &[&str],
    city: &str,
    country: &str,
) -> SourceRecord {
    SourceRecord {
        record_id: id.to_string(),
        source,
        names: names.iter().map(|s| s.to_string()).collect(),
        locations: vec![Location::new(city, country).0],
        status: IxpStatus::Active,
        prefixes: vec![],
        participants: vec![],
        facility_count: None,
        facility_ids: vec![],
        established: None,
        url: None,
    }
}

pub fn with_status(mut r: SourceRecord, status: IxpStatus) -> SourceRecord {
    r.status = status;
    r
}

pub fn with_asns(mut r: SourceRecord, asns: impl IntoIterator<Item = u32>) -> SourceRecord {
    r.participants = asns.into_iter().map(Participant::with_asn).collect();
    r
}

/// Connected components of an undirected graph by breadth-first search.
pub fn bfs_components(nodes: &[String], edges: &[(String, String)]) -> BTreeSet<BTreeSet<String>> {
    let mut adj: BTreeMap<&str, Vec<&str>> =
        nodes.iter().map(|n| (n.as_str(), Vec::new())).collect();
    for (a, b) in edges {
        adj.get_mut(a.as_str()).unwrap().push(b);
        adj.get_mut(b.as_str()).unwrap().push(a);
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut out = BTreeSet::new();
    for n in nodes {
        if !seen.insert(n) {
            continue;
        }
        let mut comp = BTreeSet::from([n.clone()]);
        let mut queue = VecDeque::from([n.as_str()]);
        while let Some(x) = queue.pop_front() {
            for y in &adj[x] {
                if seen.insert(y) {
                    comp.insert(y.to_string());
                    queue.push_back(y);
                }
            }
        }
        out.insert(comp);
    }
    out
}

/// Members of each unified entity as "source:record" strings.
pub fn member_partition(unified: &[CanonicalIxp]) -> BTreeSet<BTreeSet<String>> {
    unified
        .iter()
        .map(|u| {
            u.members
                .iter()
                .map(|m| format!("{}:{}", m.source, m.record_id))
                .collect()
        })
        .collect()
}
