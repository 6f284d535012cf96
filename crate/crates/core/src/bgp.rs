//! Route-collector summaries as ground truth for IXP membership.
//!
//! Collector files are JSON:
//!
//! ```json
//! {"collector_id": "route-collector.ams",
//!  "fabric_prefixes": ["80.249.208.0/21"],
//!  "sessions": [{"peer_ip": "80.249.208.5", "asn": 6939, "state": "established"}]}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use ipnet::IpNet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::similarity::{jaccard, set_counts};
use crate::model::{
    Asn, BgpCollectorSnapshot, BgpSession, CanonicalIxp, Link, LinkSet, LinkSource, SessionState,
    SourceId,
};

#[derive(Debug, Error)]
pub enum BgpError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed collector snapshot {path}: {message}")]
    MalformedSnapshot { path: PathBuf, message: String },
    #[error("invalid address or prefix {value:?} in {path}")]
    InvalidIp { path: PathBuf, value: String },
    #[error("collector {0} matches no IXP")]
    NoMatch(String),
    #[error("collector {collector} matches {first} and {second} equally well")]
    AmbiguousMatch {
        collector: String,
        first: String,
        second: String,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCollector {
    collector_id: String,
    #[serde(default)]
    fabric_prefixes: Vec<String>,
    #[serde(default)]
    sessions: Vec<RawSession>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSession {
    peer_ip: String,
    #[serde(default)]
    asn: Option<u32>,
    state: SessionState,
}

/// Trailing three-letter token of a collector name, uppercased.
pub fn airport_code(collector_id: &str) -> Option<String> {
    let last = collector_id
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
        .last()?;
    (last.len() == 3 && last.chars().all(|c| c.is_ascii_alphabetic()))
        .then(|| last.to_ascii_uppercase())
}

/// Sorts prefixes, truncates host bits and drops those covered by another.
pub fn normalize_prefixes(prefixes: impl IntoIterator<Item = IpNet>) -> Vec<IpNet> {
    let mut v: Vec<IpNet> = prefixes.into_iter().map(|p| p.trunc()).collect();
    v.sort();
    v.dedup();
    let keep: Vec<IpNet> = v
        .iter()
        .filter(|p| !v.iter().any(|q| q != *p && q.contains(*p)))
        .copied()
        .collect();
    keep
}

pub fn parse_bgp_summary_str(text: &str, path: &Path) -> Result<BgpCollectorSnapshot, BgpError> {
    let raw: RawCollector =
        serde_json::from_str(text).map_err(|e| BgpError::MalformedSnapshot {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    if raw.collector_id.trim().is_empty() {
        return Err(BgpError::MalformedSnapshot {
            path: path.to_path_buf(),
            message: "collector_id is empty".into(),
        });
    }
    let invalid = |value: &str| BgpError::InvalidIp {
        path: path.to_path_buf(),
        value: value.to_string(),
    };
    let mut prefixes = Vec::new();
    for p in &raw.fabric_prefixes {
        prefixes.push(p.trim().parse::<IpNet>().map_err(|_| invalid(p))?);
    }
    let mut sessions = Vec::new();
    for s in &raw.sessions {
        let ip: IpAddr = s.peer_ip.trim().parse().map_err(|_| invalid(&s.peer_ip))?;
        sessions.push(BgpSession {
            peer_ip: ip,
            asn: s.asn.map(Asn),
            state: s.state,
        });
    }
    Ok(BgpCollectorSnapshot {
        airport_code: airport_code(&raw.collector_id),
        collector_id: raw.collector_id,
        fabric_prefixes: normalize_prefixes(prefixes),
        sessions,
    })
}

pub fn parse_bgp_summary(path: &Path) -> Result<BgpCollectorSnapshot, BgpError> {
    let text = fs::read_to_string(path).map_err(|source| BgpError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_bgp_summary_str(&text, path)
}

/// Parses every `*.json` file in `dir`, in file-name order.
pub fn parse_collector_dir(dir: &Path) -> Result<Vec<BgpCollectorSnapshot>, BgpError> {
    let io = |source| BgpError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| parse_bgp_summary(p)).collect()
}

/// ASNs of established sessions whose peer address lies in a fabric prefix.
pub fn extract_fabric_peers(snapshot: &BgpCollectorSnapshot) -> BTreeSet<Asn> {
    snapshot
        .sessions
        .iter()
        .filter(|s| s.state == SessionState::Established)
        .filter(|s| {
            snapshot
                .fabric_prefixes
                .iter()
                .any(|p| p.contains(&s.peer_ip))
        })
        .filter_map(|s| s.asn)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkThresholds {
    /// Minimum membership Jaccard when no prefix overlaps.
    pub min_jaccard: f64,
    /// Top two candidates closer than this are ambiguous.
    pub ambiguity_margin: f64,
}

impl Default for LinkThresholds {
    fn default() -> Self {
        LinkThresholds {
            min_jaccard: 0.05,
            ambiguity_margin: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchKind {
    PrefixEqual,
    PrefixOverlap,
    Membership,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectorLink {
    pub collector_id: String,
    pub canonical_id: String,
    pub matched_by: MatchKind,
    pub jaccard: f64,
    pub airport_code: Option<String>,
    /// Whether the airport code names a city of the IXP; absent when the
    /// code is missing or not in the built-in table.
    pub airport_consistent: Option<bool>,
    pub peers: BTreeSet<Asn>,
}

const AIRPORTS: &[(&str, &str)] = &[
    ("AKL", "auckland"),
    ("AMS", "amsterdam"),
    ("ARN", "stockholm"),
    ("ATL", "atlanta"),
    ("BOM", "mumbai"),
    ("BRU", "brussels"),
    ("BTS", "bratislava"),
    ("CDG", "paris"),
    ("CPH", "copenhagen"),
    ("DFW", "dallas"),
    ("DUB", "dublin"),
    ("DXB", "dubai"),
    ("FRA", "frankfurt"),
    ("GRU", "sao paulo"),
    ("HEL", "helsinki"),
    ("HKG", "hong kong"),
    ("IAD", "ashburn"),
    ("ICN", "seoul"),
    ("JFK", "new york"),
    ("JNB", "johannesburg"),
    ("KIX", "osaka"),
    ("LAX", "los angeles"),
    ("LHR", "london"),
    ("LIS", "lisbon"),
    ("MAD", "madrid"),
    ("MEL", "melbourne"),
    ("MIA", "miami"),
    ("MUC", "munich"),
    ("MXP", "milan"),
    ("NBO", "nairobi"),
    ("NRT", "tokyo"),
    ("ORD", "chicago"),
    ("OSL", "oslo"),
    ("PRG", "prague"),
    ("SEA", "seattle"),
    ("SIN", "singapore"),
    ("SJC", "san jose"),
    ("SVG", "stavanger"),
    ("SYD", "sydney"),
    ("VIE", "vienna"),
    ("WAW", "warsaw"),
    ("YYZ", "toronto"),
    ("ZRH", "zurich"),
];

pub fn airport_city(code: &str) -> Option<&'static str> {
    AIRPORTS
        .binary_search_by(|(c, _)| (*c).cmp(code))
        .ok()
        .map(|i| AIRPORTS[i].1)
}

fn prefix_relation(fabric: &[IpNet], ixp: &CanonicalIxp) -> Option<MatchKind> {
    let mut best = None;
    for f in fabric {
        for p in ixp.prefixes.iter().map(|p| p.value) {
            if *f == p {
                return Some(MatchKind::PrefixEqual);
            }
            if f.contains(&p) || p.contains(f) {
                best = Some(MatchKind::PrefixOverlap);
            }
        }
    }
    best
}

/// Finds the unified IXP a collector peers at.
///
/// Prefix equality beats containment; within a prefix tier, and for
/// collectors overlapping no IXP prefix, membership Jaccard decides.
pub fn link_collector(
    snapshot: &BgpCollectorSnapshot,
    unified: &[CanonicalIxp],
    thresholds: &LinkThresholds,
) -> Result<CollectorLink, BgpError> {
    let peers = extract_fabric_peers(snapshot);
    let scored: Vec<(Option<MatchKind>, f64, &CanonicalIxp)> = unified
        .iter()
        .map(|u| {
            let members = u.union_asns();
            (
                prefix_relation(&snapshot.fabric_prefixes, u),
                jaccard(&[&peers, &members]),
                u,
            )
        })
        .collect();
    let tier = scored.iter().filter_map(|s| s.0).min();
    let mut pool: Vec<&(Option<MatchKind>, f64, &CanonicalIxp)> = match tier {
        Some(k) => scored.iter().filter(|s| s.0 == Some(k)).collect(),
        None => scored
            .iter()
            .filter(|s| s.1 >= thresholds.min_jaccard)
            .collect(),
    };
    pool.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(a.2.canonical_id.cmp(&b.2.canonical_id))
    });
    let Some(best) = pool.first() else {
        return Err(BgpError::NoMatch(snapshot.collector_id.clone()));
    };
    if let Some(second) = pool.get(1) {
        if best.1 - second.1 < thresholds.ambiguity_margin {
            return Err(BgpError::AmbiguousMatch {
                collector: snapshot.collector_id.clone(),
                first: best.2.canonical_id.clone(),
                second: second.2.canonical_id.clone(),
            });
        }
    }
    let ixp = best.2;
    let airport_consistent = snapshot
        .airport_code
        .as_deref()
        .and_then(airport_city)
        .map(|city| ixp.cities().contains(city));
    Ok(CollectorLink {
        collector_id: snapshot.collector_id.clone(),
        canonical_id: ixp.canonical_id.clone(),
        matched_by: tier.unwrap_or(MatchKind::Membership),
        jaccard: best.1,
        airport_code: snapshot.airport_code.clone(),
        airport_consistent,
        peers,
    })
}

/// Links observed by the collectors, minus excluded ASNs.
pub fn bgp_links(linked: &[CollectorLink], exclude: &BTreeSet<Asn>) -> LinkSet {
    let mut set = LinkSet::new(SourceId::BgpCollector);
    for c in linked {
        for a in c.peers.difference(exclude) {
            set.insert(Link::new(c.canonical_id.clone(), *a));
        }
    }
    set
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessRow {
    pub dataset: LinkSource,
    /// Dataset links at the collector-linked IXPs.
    pub dataset_links: usize,
    pub intersection: usize,
    /// Absent when the BGP link set is empty.
    pub jaccard: Option<f64>,
    pub overlap: Option<f64>,
    /// Share of the dataset's links seen in BGP.
    pub reverse_coverage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub linked_ixps: usize,
    pub bgp_links: usize,
    pub rows: Vec<CompletenessRow>,
}

/// Compares each dataset against the BGP links at the collector-linked IXPs.
pub fn completeness_report(bgp: &LinkSet, datasets: &[LinkSet]) -> CompletenessReport {
    let ixps: BTreeSet<String> = bgp.ixps().into_iter().map(str::to_string).collect();
    let rows = datasets
        .iter()
        .map(|d| {
            let restricted = d.restrict(|i| ixps.contains(i));
            let c = set_counts(&[&restricted.links, &bgp.links]);
            let some = !bgp.is_empty();
            CompletenessRow {
                dataset: d.source,
                dataset_links: restricted.len(),
                intersection: c.intersection,
                jaccard: some.then(|| c.jaccard()),
                overlap: some.then(|| c.overlap()),
                reverse_coverage: (some && !restricted.is_empty())
                    .then(|| c.intersection as f64 / restricted.len() as f64),
            }
        })
        .collect();
    CompletenessReport {
        linked_ixps: ixps.len(),
        bgp_links: bgp.len(),
        rows,
    }
}

/// Outcome of validating a set of collectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BgpValidation {
    pub linked: Vec<CollectorLink>,
    /// Collector id to error message.
    pub unlinked: BTreeMap<String, String>,
    pub report: CompletenessReport,
}

pub fn validate(
    snapshots: &[BgpCollectorSnapshot],
    unified: &[CanonicalIxp],
    datasets: &[LinkSet],
    thresholds: &LinkThresholds,
    exclude: &BTreeSet<Asn>,
) -> BgpValidation {
    let mut linked = Vec::new();
    let mut unlinked = BTreeMap::new();
    for s in snapshots {
        match link_collector(s, unified, thresholds) {
            Ok(l) => linked.push(l),
            Err(e) => {
                unlinked.insert(s.collector_id.clone(), e.to_string());
            }
        }
    }
    let bgp = bgp_links(&linked, exclude);
    BgpValidation {
        report: completeness_report(&bgp, datasets),
        linked,
        unlinked,
    }
}
