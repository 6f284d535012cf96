//! Snapshot ingestion and per-source sanitization.
//!
//! Each provider snapshot is one JSON document in the canonical layout:
//!
//! ```json
//! {"source": "pch", "acquired_at": "2014-09-19",
//!  "ixps": [{"record_id": "1", "names": ["SIX"], "locations": [{"city": "Seattle", "country": "US"}],
//!            "status": "active", "prefixes": ["206.81.80.0/22"],
//!            "participants": [{"asn": 6939, "ips": ["206.81.80.40"]}], "facility_ids": []}],
//!  "facilities": [],
//!  "networks": []}
//! ```
//!
//! `facilities` and `networks` are only accepted for PeeringDB. `networks`
//! carries the per-network IXP lists used to reconcile PeeringDB's two
//! membership views.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use ipnet::IpNet;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::model::{
    Asn, Coordinates, Facility, IxpStatus, Location, Participant, SourceId, SourceRecord,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed snapshot {path} at {locator}: {message}")]
    MalformedSnapshot {
        path: PathBuf,
        locator: String,
        message: String,
    },
    #[error("duplicate record id {record_id:?} in {path}")]
    DuplicateRecordId { path: PathBuf, record_id: String },
    #[error("invalid prefix {prefix:?} in record {record_id:?} of {path}")]
    InvalidPrefix {
        path: PathBuf,
        record_id: String,
        prefix: String,
    },
    #[error("{path} declares source {found} but {declared} was expected")]
    SourceMismatch {
        path: PathBuf,
        declared: SourceId,
        found: SourceId,
    },
    #[error("sanitizer for {expected} applied to a {found} record")]
    WrongSource { expected: SourceId, found: SourceId },
}

pub type Result<T, E = IngestError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotManifest {
    pub source: SourceId,
    pub acquired_at: NaiveDate,
    pub file_paths: Vec<PathBuf>,
    pub record_count: usize,
}

/// Everything extracted from one snapshot file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedSnapshot {
    pub manifest: SnapshotManifest,
    pub records: Vec<SourceRecord>,
    pub facilities: Vec<Facility>,
    /// PeeringDB only: each network's own list of IXP record ids.
    pub network_ixps: BTreeMap<Asn, Vec<String>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct RawSnapshot {
    source: SourceId,
    acquired_at: NaiveDate,
    ixps: Vec<RawIxp>,
    #[serde(default)]
    facilities: Vec<RawFacility>,
    #[serde(default)]
    networks: Vec<RawNetwork>,
}

#[derive(Debug, Deserialize)]
struct RawLocation {
    #[serde(default)]
    city: String,
    #[serde(default)]
    country: String,
    // Accepted for compatibility; the region is always derived from the country.
    #[serde(default)]
    #[allow(dead_code)]
    continent: Option<String>,
    #[serde(default)]
    lat: Option<f64>,
    #[serde(default)]
    lon: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct RawParticipant {
    #[serde(default)]
    asn: Option<u32>,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    ips: Vec<IpAddr>,
    #[serde(default)]
    ipv6: Option<bool>,
    #[serde(default)]
    updated: Option<DateTime<Utc>>,
    #[serde(default)]
    policy: Option<String>,
    #[serde(default)]
    network_type: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RawIxp {
    record_id: String,
    names: Vec<String>,
    locations: Vec<RawLocation>,
    #[serde(default)]
    status: Option<IxpStatus>,
    #[serde(default)]
    prefixes: Vec<String>,
    #[serde(default)]
    participants: Vec<RawParticipant>,
    #[serde(default)]
    facility_count: Option<u32>,
    #[serde(default)]
    facility_ids: Vec<String>,
    #[serde(default)]
    established: Option<NaiveDate>,
    #[serde(default)]
    url: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RawFacility {
    facility_id: String,
    name: String,
    location: RawLocation,
    #[serde(default)]
    ixp_record_ids: Vec<String>,
    #[serde(default)]
    network_asns: Vec<u32>,
}

#[derive(Debug, Deserialize)]
struct RawNetwork {
    asn: u32,
    #[serde(default)]
    ixp_record_ids: Vec<String>,
}

struct Ctx<'a> {
    path: &'a Path,
    warnings: Vec<String>,
}

impl Ctx<'_> {
    fn malformed(&self, locator: impl Into<String>, message: impl Into<String>) -> IngestError {
        IngestError::MalformedSnapshot {
            path: self.path.to_path_buf(),
            locator: locator.into(),
            message: message.into(),
        }
    }

    fn warn(&mut self, message: String) {
        warn!(path = %self.path.display(), "{message}");
        self.warnings.push(message);
    }

    fn location(&mut self, locator: &str, raw: &RawLocation) -> Result<Location> {
        let (loc, known) = Location::new(raw.city.as_str(), &raw.country);
        if !known {
            self.warn(format!(
                "{locator}: unknown country {:?}, using ZZ",
                raw.country
            ));
        }
        let coordinates = match (raw.lat, raw.lon) {
            (Some(lat), Some(lon)) => {
                let c = Coordinates { lat, lon };
                if !c.is_valid() {
                    return Err(
                        self.malformed(locator, format!("coordinates ({lat}, {lon}) out of range"))
                    );
                }
                Some(c)
            }
            (None, None) => None,
            _ => return Err(self.malformed(locator, "lat and lon must be given together")),
        };
        Ok(loc.with_coordinates(coordinates))
    }
}

/// Parses one canonical snapshot file.
pub fn parse_snapshot(path: &Path, source: SourceId) -> Result<ParsedSnapshot> {
    let text = fs::read_to_string(path).map_err(|e| IngestError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_snapshot_str(&text, path, source)
}

/// Parses snapshot text; `path` is only used in messages and the manifest.
pub fn parse_snapshot_str(text: &str, path: &Path, source: SourceId) -> Result<ParsedSnapshot> {
    let raw: RawSnapshot =
        serde_json::from_str(text).map_err(|e| IngestError::MalformedSnapshot {
            path: path.to_path_buf(),
            locator: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
    if raw.source != source {
        return Err(IngestError::SourceMismatch {
            path: path.to_path_buf(),
            declared: source,
            found: raw.source,
        });
    }
    if !SourceId::DATABASES.contains(&source) {
        return Err(IngestError::MalformedSnapshot {
            path: path.to_path_buf(),
            locator: "source".into(),
            message: format!("{source} is not an IXP database"),
        });
    }

    let mut ctx = Ctx {
        path,
        warnings: Vec::new(),
    };
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(raw.ixps.len());
    for (idx, ixp) in raw.ixps.iter().enumerate() {
        if !seen.insert(ixp.record_id.clone()) {
            return Err(IngestError::DuplicateRecordId {
                path: path.to_path_buf(),
                record_id: ixp.record_id.clone(),
            });
        }
        records.push(convert_ixp(&mut ctx, idx, ixp, source)?);
    }

    if source != SourceId::PeeringDb && (!raw.facilities.is_empty() || !raw.networks.is_empty()) {
        return Err(ctx.malformed(
            "facilities",
            "only PeeringDB snapshots carry facilities and networks",
        ));
    }

    let mut facilities = Vec::with_capacity(raw.facilities.len());
    let mut facility_ids = HashSet::new();
    for (idx, f) in raw.facilities.iter().enumerate() {
        let locator = format!("facilities[{idx}] ({})", f.facility_id);
        if !facility_ids.insert(f.facility_id.clone()) {
            return Err(ctx.malformed(locator, "duplicate facility id"));
        }
        let location = ctx.location(&locator, &f.location)?;
        if f.network_asns.contains(&0) {
            return Err(ctx.malformed(locator, "ASN 0 is reserved"));
        }
        facilities.push(Facility {
            facility_id: f.facility_id.clone(),
            name: f.name.clone(),
            location,
            ixp_record_ids: f.ixp_record_ids.clone(),
            network_asns: f.network_asns.iter().copied().map(Asn).collect(),
        });
    }

    let mut network_ixps: BTreeMap<Asn, Vec<String>> = BTreeMap::new();
    for (idx, n) in raw.networks.iter().enumerate() {
        if n.asn == 0 {
            return Err(ctx.malformed(format!("networks[{idx}]"), "ASN 0 is reserved"));
        }
        let entry = network_ixps.entry(Asn(n.asn)).or_default();
        for id in &n.ixp_record_ids {
            if !entry.contains(id) {
                entry.push(id.clone());
            }
        }
    }

    let warnings = ctx.warnings;
    Ok(ParsedSnapshot {
        manifest: SnapshotManifest {
            source,
            acquired_at: raw.acquired_at,
            file_paths: vec![path.to_path_buf()],
            record_count: records.len(),
        },
        records,
        facilities,
        network_ixps,
        warnings,
    })
}

fn convert_ixp(
    ctx: &mut Ctx<'_>,
    idx: usize,
    ixp: &RawIxp,
    source: SourceId,
) -> Result<SourceRecord> {
    let locator = format!("ixps[{idx}] ({})", ixp.record_id);
    if ixp.record_id.is_empty() {
        return Err(ctx.malformed(locator, "record_id must be non-empty"));
    }
    let names: Vec<String> = ixp
        .names
        .iter()
        .map(|n| n.trim().to_string())
        .filter(|n| !n.is_empty())
        .collect();
    if names.is_empty() {
        return Err(ctx.malformed(locator, "names must contain a non-empty name"));
    }
    if ixp.locations.is_empty() {
        return Err(ctx.malformed(locator, "locations must be non-empty"));
    }
    let mut locations = Vec::with_capacity(ixp.locations.len());
    for (li, l) in ixp.locations.iter().enumerate() {
        locations.push(ctx.location(&format!("{locator}.locations[{li}]"), l)?);
    }

    if source == SourceId::EuroIx && !ixp.prefixes.is_empty() {
        return Err(ctx.malformed(locator, "Euro-IX records carry no prefixes"));
    }
    let mut prefixes: Vec<IpNet> = Vec::with_capacity(ixp.prefixes.len());
    for p in &ixp.prefixes {
        let net: IpNet = p.trim().parse().map_err(|_| IngestError::InvalidPrefix {
            path: ctx.path.to_path_buf(),
            record_id: ixp.record_id.clone(),
            prefix: p.clone(),
        })?;
        let net = net.trunc();
        if prefixes.contains(&net) {
            ctx.warn(format!("{locator}: duplicate prefix {net} dropped"));
        } else {
            prefixes.push(net);
        }
    }

    let status = match (source, ixp.status) {
        (SourceId::PeeringDb, Some(st)) if st != IxpStatus::Unknown => {
            ctx.warn(format!(
                "{locator}: PeeringDB carries no status, ignoring {st}"
            ));
            IxpStatus::Unknown
        }
        (_, Some(st)) => st,
        (_, None) => IxpStatus::Unknown,
    };

    let mut participants = Vec::with_capacity(ixp.participants.len());
    for (pi, p) in ixp.participants.iter().enumerate() {
        let ploc = format!("{locator}.participants[{pi}]");
        match p.asn {
            None if source != SourceId::Pch => {
                return Err(ctx.malformed(ploc, "participant without ASN (only PCH may omit it)"));
            }
            Some(0) if source != SourceId::EuroIx => {
                return Err(ctx.malformed(ploc, "ASN 0 is reserved"));
            }
            _ => {}
        }
        participants.push(Participant {
            asn: p.asn.map(Asn),
            name: p.name.clone().unwrap_or_default(),
            ip_addresses: p.ips.clone(),
            ipv6_capable: p.ipv6,
            last_updated: p.updated,
            policy: p.policy.clone(),
            network_type: p.network_type.clone(),
            excluded_from_links: false,
        });
    }

    Ok(SourceRecord {
        record_id: ixp.record_id.clone(),
        source,
        names,
        locations,
        status,
        prefixes,
        participants,
        facility_count: ixp.facility_count,
        facility_ids: ixp.facility_ids.clone(),
        established: ixp.established,
        url: ixp.url.clone(),
    })
}

/// Per-IXP difference between PeeringDB's two membership views.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    /// ASNs on the IXP's participant list but absent from the networks' IXP lists.
    pub only_ixp_list: usize,
    /// ASNs whose network lists the IXP but which the IXP itself does not list.
    pub only_network_lists: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownRecordId {
    pub asn: Asn,
    pub record_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeeringDbSanitized {
    pub records: Vec<SourceRecord>,
    pub discrepancies: BTreeMap<String, Discrepancy>,
    pub unknown_record_ids: Vec<UnknownRecordId>,
}

impl PeeringDbSanitized {
    /// Number of IXPs where the two views differ.
    pub fn differing_ixps(&self) -> usize {
        self.discrepancies
            .values()
            .filter(|d| d.only_ixp_list + d.only_network_lists > 0)
            .count()
    }
}

/// Unions each IXP's own participant list with the reverse links from the
/// networks' IXP lists.
pub fn sanitize_peeringdb_participants(
    records: &[SourceRecord],
    network_ixps: &BTreeMap<Asn, Vec<String>>,
) -> Result<PeeringDbSanitized> {
    if let Some(r) = records.iter().find(|r| r.source != SourceId::PeeringDb) {
        return Err(IngestError::WrongSource {
            expected: SourceId::PeeringDb,
            found: r.source,
        });
    }
    let known: HashSet<&str> = records.iter().map(|r| r.record_id.as_str()).collect();
    let mut reverse: BTreeMap<&str, BTreeSet<Asn>> = BTreeMap::new();
    let mut unknown = Vec::new();
    for (asn, ids) in network_ixps {
        for id in ids {
            if known.contains(id.as_str()) {
                reverse.entry(id.as_str()).or_default().insert(*asn);
            } else {
                warn!(%asn, record_id = %id, "network lists an unknown PeeringDB IXP");
                unknown.push(UnknownRecordId {
                    asn: *asn,
                    record_id: id.clone(),
                });
            }
        }
    }

    let mut discrepancies = BTreeMap::new();
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        let own: BTreeSet<Asn> = r.participants.iter().filter_map(|p| p.asn).collect();
        let empty = BTreeSet::new();
        let theirs = reverse.get(r.record_id.as_str()).unwrap_or(&empty);
        discrepancies.insert(
            r.record_id.clone(),
            Discrepancy {
                only_ixp_list: own.difference(theirs).count(),
                only_network_lists: theirs.difference(&own).count(),
            },
        );
        let mut record = r.clone();
        for asn in theirs.difference(&own) {
            record.participants.push(Participant::with_asn(asn.0));
        }
        out.push(record);
    }
    Ok(PeeringDbSanitized {
        records: out,
        discrepancies,
        unknown_record_ids: unknown,
    })
}

/// Drops Euro-IX participants registered with the reserved ASN 0.
/// Returns the cleaned record and the number of removed entries.
pub fn sanitize_euroix_participants(record: &SourceRecord) -> Result<(SourceRecord, usize)> {
    if record.source != SourceId::EuroIx {
        return Err(IngestError::WrongSource {
            expected: SourceId::EuroIx,
            found: record.source,
        });
    }
    let mut out = record.clone();
    let before = out.participants.len();
    out.participants.retain(|p| p.asn != Some(Asn::RESERVED));
    let removed = before - out.participants.len();
    Ok((out, removed))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortDedup {
    /// Entries folded into an earlier entry with the same ASN.
    pub collapsed: usize,
    /// ASN-less entries marked as excluded from links.
    pub flagged: usize,
}

/// Collapses PCH per-port entries into one entry per ASN and flags
/// ASN-less entries as excluded from links.
pub fn sanitize_pch_ports(record: &SourceRecord) -> Result<(SourceRecord, PortDedup)> {
    if record.source != SourceId::Pch {
        return Err(IngestError::WrongSource {
            expected: SourceId::Pch,
            found: record.source,
        });
    }
    let mut stats = PortDedup::default();
    let mut out: Vec<Participant> = Vec::with_capacity(record.participants.len());
    let mut position: BTreeMap<Asn, usize> = BTreeMap::new();
    for p in &record.participants {
        match p.asn {
            Some(asn) => match position.get(&asn) {
                Some(&i) => {
                    out[i].absorb(p);
                    stats.collapsed += 1;
                }
                None => {
                    position.insert(asn, out.len());
                    out.push(p.clone());
                }
            },
            None => {
                let mut p = p.clone();
                if !p.excluded_from_links {
                    p.excluded_from_links = true;
                    stats.flagged += 1;
                }
                out.push(p);
            }
        }
    }
    let mut record = record.clone();
    record.participants = out;
    Ok((record, stats))
}

/// Aggregate counters of the sanitization pass over one source.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SanitizationReport {
    pub reserved_asn_removed: usize,
    pub ixps_with_reserved_asn: usize,
    pub ports_collapsed: usize,
    pub asnless_flagged: usize,
    pub peeringdb_differing_ixps: usize,
    pub peeringdb_discrepancies: BTreeMap<String, Discrepancy>,
    pub unknown_record_ids: Vec<UnknownRecordId>,
}

/// Applies the sanitizer matching the snapshot's source.
pub fn sanitize_snapshot(
    parsed: &ParsedSnapshot,
) -> Result<(Vec<SourceRecord>, SanitizationReport)> {
    let mut report = SanitizationReport::default();
    let records = match parsed.manifest.source {
        SourceId::EuroIx => {
            let mut out = Vec::with_capacity(parsed.records.len());
            for r in &parsed.records {
                let (clean, removed) = sanitize_euroix_participants(r)?;
                if removed > 0 {
                    report.ixps_with_reserved_asn += 1;
                }
                report.reserved_asn_removed += removed;
                out.push(clean);
            }
            out
        }
        SourceId::PeeringDb => {
            let s = sanitize_peeringdb_participants(&parsed.records, &parsed.network_ixps)?;
            report.peeringdb_differing_ixps = s.differing_ixps();
            report.peeringdb_discrepancies = s.discrepancies;
            report.unknown_record_ids = s.unknown_record_ids;
            s.records
        }
        SourceId::Pch => {
            let mut out = Vec::with_capacity(parsed.records.len());
            for r in &parsed.records {
                let (clean, stats) = sanitize_pch_ports(r)?;
                report.ports_collapsed += stats.collapsed;
                report.asnless_flagged += stats.flagged;
                out.push(clean);
            }
            out
        }
        other => {
            return Err(IngestError::WrongSource {
                expected: SourceId::Pch,
                found: other,
            })
        }
    };
    Ok((records, report))
}
