//! Domain types shared across the pipeline.

mod country;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::net::IpAddr;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use ipnet::IpNet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

pub use country::{continent_of, is_known_country, normalize_country, UNKNOWN_COUNTRY};

/// Origin of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SourceId {
    #[serde(rename = "euro-ix")]
    EuroIx,
    #[serde(rename = "peeringdb")]
    PeeringDb,
    #[serde(rename = "pch")]
    Pch,
    #[serde(rename = "bgp-collector")]
    BgpCollector,
    #[serde(rename = "external-list")]
    ExternalList,
}

impl SourceId {
    /// The three IXP databases, in canonical orientation order.
    pub const DATABASES: [SourceId; 3] = [SourceId::EuroIx, SourceId::PeeringDb, SourceId::Pch];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceId::EuroIx => "euro-ix",
            SourceId::PeeringDb => "peeringdb",
            SourceId::Pch => "pch",
            SourceId::BgpCollector => "bgp-collector",
            SourceId::ExternalList => "external-list",
        }
    }

    /// Human readable label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            SourceId::EuroIx => "Euro-IX",
            SourceId::PeeringDb => "PeeringDB",
            SourceId::Pch => "PCH",
            SourceId::BgpCollector => "BGP",
            SourceId::ExternalList => "External",
        }
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euro-ix" => Ok(SourceId::EuroIx),
            "peeringdb" => Ok(SourceId::PeeringDb),
            "pch" => Ok(SourceId::Pch),
            "bgp-collector" => Ok(SourceId::BgpCollector),
            "external-list" => Ok(SourceId::ExternalList),
            other => Err(format!("unknown source {other:?}")),
        }
    }
}

/// An ordered pair of sources; `left <= right` by source order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourcePair {
    pub left: SourceId,
    pub right: SourceId,
}

impl SourcePair {
    pub fn new(a: SourceId, b: SourceId) -> Self {
        if a <= b {
            SourcePair { left: a, right: b }
        } else {
            SourcePair { left: b, right: a }
        }
    }

    /// The three cross-database pairs in cascade order.
    pub const CROSS: [SourcePair; 3] = [
        SourcePair {
            left: SourceId::EuroIx,
            right: SourceId::PeeringDb,
        },
        SourcePair {
            left: SourceId::EuroIx,
            right: SourceId::Pch,
        },
        SourcePair {
            left: SourceId::PeeringDb,
            right: SourceId::Pch,
        },
    ];
}

impl fmt::Display for SourcePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.left, self.right)
    }
}

impl FromStr for SourcePair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| format!("source pair {s:?} must look like a/b"))?;
        Ok(SourcePair::new(a.parse()?, b.parse()?))
    }
}

/// Autonomous system number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Asn(pub u32);

impl Asn {
    pub const RESERVED: Asn = Asn(0);

    pub fn is_reserved(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Asn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AS{}", self.0)
    }
}

impl From<u32> for Asn {
    fn from(v: u32) -> Self {
        Asn(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Continent {
    Africa,
    AsiaPacific,
    Australia,
    Europe,
    MiddleEast,
    NorthAmerica,
    SouthAmerica,
}

impl Continent {
    pub const ALL: [Continent; 7] = [
        Continent::Africa,
        Continent::AsiaPacific,
        Continent::Australia,
        Continent::Europe,
        Continent::MiddleEast,
        Continent::NorthAmerica,
        Continent::SouthAmerica,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Continent::Africa => "Africa",
            Continent::AsiaPacific => "Asia Pacific",
            Continent::Australia => "Australia",
            Continent::Europe => "Europe",
            Continent::MiddleEast => "Middle East",
            Continent::NorthAmerica => "North America",
            Continent::SouthAmerica => "South America",
        }
    }
}

impl FromStr for Continent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_lowercase();
        Continent::ALL
            .into_iter()
            .find(|c| c.label().replace(' ', "").to_lowercase() == key)
            .ok_or_else(|| format!("unknown continent {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coordinates {
    pub lat: f64,
    pub lon: f64,
}

impl Coordinates {
    pub fn is_valid(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub city: String,
    /// Upper-case alpha-2 code, or "ZZ" when unknown.
    pub country: String,
    /// Derived from `country`; absent for "ZZ".
    pub continent: Option<Continent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Coordinates>,
}

impl Location {
    /// Builds a location, deriving the region from the country table.
    ///
    /// The flag is false when the country was not recognized and was
    /// replaced by "ZZ".
    pub fn new(city: impl Into<String>, country: &str) -> (Location, bool) {
        let (country, known) = match normalize_country(country) {
            Some(code) => {
                let known = code != UNKNOWN_COUNTRY;
                (code, known)
            }
            None => (UNKNOWN_COUNTRY.to_string(), false),
        };
        let continent = continent_of(&country);
        (
            Location {
                city: city.into().trim().to_string(),
                country,
                continent,
                coordinates: None,
            },
            known,
        )
    }

    pub fn with_coordinates(mut self, coordinates: Option<Coordinates>) -> Self {
        self.coordinates = coordinates;
        self
    }

    /// Case-insensitive (city, country) key used for dedup and matching.
    pub fn key(&self) -> (String, String) {
        (self.city.to_lowercase(), self.country.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IxpStatus {
    Active,
    Defunct,
    Planned,
    UnderConstruction,
    Deprecated,
    NotAnExchange,
    Unknown,
}

impl IxpStatus {
    pub const ALL: [IxpStatus; 7] = [
        IxpStatus::Active,
        IxpStatus::Defunct,
        IxpStatus::Planned,
        IxpStatus::UnderConstruction,
        IxpStatus::Deprecated,
        IxpStatus::NotAnExchange,
        IxpStatus::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IxpStatus::Active => "active",
            IxpStatus::Defunct => "defunct",
            IxpStatus::Planned => "planned",
            IxpStatus::UnderConstruction => "under-construction",
            IxpStatus::Deprecated => "deprecated",
            IxpStatus::NotAnExchange => "not-an-exchange",
            IxpStatus::Unknown => "unknown",
        }
    }

    /// Rank used when several records of one source collapse into one IXP:
    /// the most "alive" status wins.
    fn liveness(self) -> u8 {
        match self {
            IxpStatus::Active => 0,
            IxpStatus::UnderConstruction => 1,
            IxpStatus::Planned => 2,
            IxpStatus::Deprecated => 3,
            IxpStatus::Defunct => 4,
            IxpStatus::NotAnExchange => 5,
            IxpStatus::Unknown => 6,
        }
    }
}

impl fmt::Display for IxpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IxpStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IxpStatus::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| format!("unknown status {s:?}"))
    }
}

/// Whether an IXP as reported by `source` counts as active.
///
/// PeeringDB carries no status, so all of its IXPs count as active.
pub fn counts_as_active(source: SourceId, status: IxpStatus) -> bool {
    source == SourceId::PeeringDb || status == IxpStatus::Active
}

/// One membership entry at an IXP.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Participant {
    pub asn: Option<Asn>,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub ip_addresses: Vec<IpAddr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ipv6_capable: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_updated: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network_type: Option<String>,
    /// Set for entries that carry addresses but no ASN; they never enter link sets.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub excluded_from_links: bool,
}

impl Participant {
    pub fn with_asn(asn: u32) -> Self {
        Participant {
            asn: Some(Asn(asn)),
            name: String::new(),
            ip_addresses: Vec::new(),
            ipv6_capable: None,
            last_updated: None,
            policy: None,
            network_type: None,
            excluded_from_links: false,
        }
    }

    /// The ASN this entry contributes to link sets, if any.
    pub fn link_asn(&self) -> Option<Asn> {
        match self.asn {
            Some(asn) if !asn.is_reserved() && !self.excluded_from_links => Some(asn),
            _ => None,
        }
    }

    /// Folds another entry for the same AS into this one.
    pub fn absorb(&mut self, other: &Participant) {
        for ip in &other.ip_addresses {
            if !self.ip_addresses.contains(ip) {
                self.ip_addresses.push(*ip);
            }
        }
        if self.name.is_empty() {
            self.name = other.name.clone();
        }
        self.ipv6_capable = self.ipv6_capable.or(other.ipv6_capable);
        self.last_updated = match (self.last_updated, other.last_updated) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        if self.policy.is_none() {
            self.policy = other.policy.clone();
        }
        if self.network_type.is_none() {
            self.network_type = other.network_type.clone();
        }
    }
}

/// Merges participant lists: one entry per ASN (addresses unioned), ASN-less
/// entries kept once each. Output is sorted by ASN with ASN-less entries last.
pub fn merge_participants<'a>(
    lists: impl IntoIterator<Item = &'a Participant>,
) -> Vec<Participant> {
    let mut by_asn: BTreeMap<Asn, Participant> = BTreeMap::new();
    let mut anonymous: Vec<Participant> = Vec::new();
    for p in lists {
        match p.asn {
            Some(asn) => match by_asn.get_mut(&asn) {
                Some(existing) => existing.absorb(p),
                None => {
                    by_asn.insert(asn, p.clone());
                }
            },
            None => {
                if !anonymous.contains(p) {
                    anonymous.push(p.clone());
                }
            }
        }
    }
    anonymous.sort_by(|a, b| {
        a.ip_addresses
            .cmp(&b.ip_addresses)
            .then(a.name.cmp(&b.name))
    });
    by_asn.into_values().chain(anonymous).collect()
}

/// One IXP as reported by one source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRecord {
    pub record_id: String,
    pub source: SourceId,
    /// First entry is the canonical name, the rest are aliases.
    pub names: Vec<String>,
    pub locations: Vec<Location>,
    pub status: IxpStatus,
    #[serde(default)]
    pub prefixes: Vec<IpNet>,
    #[serde(default)]
    pub participants: Vec<Participant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facility_count: Option<u32>,
    #[serde(default)]
    pub facility_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub established: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
}

impl SourceRecord {
    pub fn member_ref(&self) -> MemberRef {
        MemberRef {
            source: self.source,
            record_id: self.record_id.clone(),
        }
    }

    pub fn countries(&self) -> BTreeSet<&str> {
        self.locations.iter().map(|l| l.country.as_str()).collect()
    }
}

/// A PeeringDB colocation facility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facility {
    pub facility_id: String,
    pub name: String,
    pub location: Location,
    #[serde(default)]
    pub ixp_record_ids: Vec<String>,
    #[serde(default)]
    pub network_asns: Vec<Asn>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MemberRef {
    pub source: SourceId,
    pub record_id: String,
}

/// A value together with the sources that reported it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sourced<T> {
    pub value: T,
    pub sources: BTreeSet<SourceId>,
}

/// Content-derived identifier for a set of member records.
pub fn canonical_id<'a>(members: impl IntoIterator<Item = &'a MemberRef>) -> String {
    let mut sorted: Vec<&MemberRef> = members.into_iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut hasher = Sha256::new();
    for m in sorted {
        hasher.update(m.source.as_str().as_bytes());
        hasher.update([0x1f]);
        hasher.update(m.record_id.as_bytes());
        hasher.update([0x1e]);
    }
    let digest = hasher.finalize();
    format!("cx-{}", &hex::encode(digest)[..16])
}

/// Identifier of the candidate linking two canonical IXPs. Orientation
/// does not matter.
pub fn candidate_id(a: &str, b: &str) -> String {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut hasher = Sha256::new();
    hasher.update(lo.as_bytes());
    hasher.update([0x1f]);
    hasher.update(hi.as_bytes());
    format!("cand-{}", &hex::encode(hasher.finalize())[..16])
}

/// An IXP after sibling merging and, later, cross-dataset linking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalIxp {
    pub canonical_id: String,
    pub members: Vec<MemberRef>,
    pub merged_names: Vec<Sourced<String>>,
    pub merged_locations: Vec<Sourced<Location>>,
    pub status_by_source: BTreeMap<SourceId, IxpStatus>,
    pub participants_by_source: BTreeMap<SourceId, Vec<Participant>>,
    #[serde(default)]
    pub prefixes: Vec<Sourced<IpNet>>,
    #[serde(default)]
    pub urls: Vec<Sourced<String>>,
}

impl CanonicalIxp {
    pub fn from_record(record: &SourceRecord) -> Self {
        Self::from_records([record])
    }

    /// Builds one entity from records in member order (sorted by source and id).
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a SourceRecord>) -> Self {
        let mut records: Vec<&SourceRecord> = records.into_iter().collect();
        records.sort_by(|a, b| (a.source, &a.record_id).cmp(&(b.source, &b.record_id)));
        let members: Vec<MemberRef> = records.iter().map(|r| r.member_ref()).collect();

        let mut names = Vec::new();
        let mut locations = Vec::new();
        let mut prefixes = Vec::new();
        let mut urls = Vec::new();
        let mut status_by_source: BTreeMap<SourceId, IxpStatus> = BTreeMap::new();
        let mut raw_participants: BTreeMap<SourceId, Vec<&Participant>> = BTreeMap::new();

        for r in &records {
            for n in &r.names {
                push_name(&mut names, n, r.source);
            }
            for l in &r.locations {
                push_location(&mut locations, l, r.source);
            }
            for p in &r.prefixes {
                push_sourced(&mut prefixes, *p, r.source);
            }
            if let Some(url) = &r.url {
                push_sourced(&mut urls, url.clone(), r.source);
            }
            merge_status(&mut status_by_source, r.source, r.status);
            raw_participants
                .entry(r.source)
                .or_default()
                .extend(r.participants.iter());
        }

        CanonicalIxp {
            canonical_id: canonical_id(&members),
            members,
            merged_names: names,
            merged_locations: locations,
            status_by_source,
            participants_by_source: raw_participants
                .into_iter()
                .map(|(s, ps)| (s, merge_participants(ps)))
                .collect(),
            prefixes,
            urls,
        }
    }

    /// Unions several entities into one; provenance is preserved.
    pub fn merge<'a>(parts: impl IntoIterator<Item = &'a CanonicalIxp>) -> Self {
        let mut parts: Vec<&CanonicalIxp> = parts.into_iter().collect();
        parts.sort_by(|a, b| a.members.cmp(&b.members));

        let mut members: Vec<MemberRef> = parts
            .iter()
            .flat_map(|p| p.members.iter().cloned())
            .collect();
        members.sort();
        members.dedup();

        let mut names = Vec::new();
        let mut locations = Vec::new();
        let mut prefixes = Vec::new();
        let mut urls = Vec::new();
        let mut status_by_source = BTreeMap::new();
        let mut raw_participants: BTreeMap<SourceId, Vec<&Participant>> = BTreeMap::new();

        for p in &parts {
            for n in &p.merged_names {
                for s in &n.sources {
                    push_name(&mut names, &n.value, *s);
                }
            }
            for l in &p.merged_locations {
                for s in &l.sources {
                    push_location(&mut locations, &l.value, *s);
                }
            }
            for pf in &p.prefixes {
                for s in &pf.sources {
                    push_sourced(&mut prefixes, pf.value, *s);
                }
            }
            for u in &p.urls {
                for s in &u.sources {
                    push_sourced(&mut urls, u.value.clone(), *s);
                }
            }
            for (s, st) in &p.status_by_source {
                merge_status(&mut status_by_source, *s, *st);
            }
            for (s, ps) in &p.participants_by_source {
                raw_participants.entry(*s).or_default().extend(ps.iter());
            }
        }

        CanonicalIxp {
            canonical_id: canonical_id(&members),
            members,
            merged_names: names,
            merged_locations: locations,
            status_by_source,
            participants_by_source: raw_participants
                .into_iter()
                .map(|(s, ps)| (s, merge_participants(ps)))
                .collect(),
            prefixes,
            urls,
        }
    }

    pub fn sources(&self) -> BTreeSet<SourceId> {
        self.members.iter().map(|m| m.source).collect()
    }

    pub fn display_name(&self) -> &str {
        self.merged_names
            .first()
            .map(|n| n.value.as_str())
            .unwrap_or("")
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.merged_names.iter().map(|n| n.value.as_str())
    }

    pub fn names_from(&self, source: SourceId) -> impl Iterator<Item = &str> {
        self.merged_names
            .iter()
            .filter(move |n| n.sources.contains(&source))
            .map(|n| n.value.as_str())
    }

    pub fn countries(&self) -> BTreeSet<&str> {
        self.merged_locations
            .iter()
            .map(|l| l.value.country.as_str())
            .collect()
    }

    pub fn cities(&self) -> BTreeSet<String> {
        self.merged_locations
            .iter()
            .filter(|l| !l.value.city.is_empty())
            .map(|l| l.value.city.to_lowercase())
            .collect()
    }

    pub fn primary_location(&self) -> Option<&Location> {
        self.merged_locations.first().map(|l| &l.value)
    }

    pub fn continent(&self) -> Option<Continent> {
        self.primary_location().and_then(|l| l.continent)
    }

    /// Distinct link ASNs reported by `source`.
    pub fn link_asns(&self, source: SourceId) -> BTreeSet<Asn> {
        self.participants_by_source
            .get(&source)
            .map(|ps| ps.iter().filter_map(Participant::link_asn).collect())
            .unwrap_or_default()
    }

    /// Distinct link ASNs over all sources.
    pub fn union_asns(&self) -> BTreeSet<Asn> {
        self.participants_by_source
            .values()
            .flatten()
            .filter_map(Participant::link_asn)
            .collect()
    }

    pub fn is_active_in(&self, source: SourceId) -> bool {
        self.status_by_source
            .get(&source)
            .is_some_and(|st| counts_as_active(source, *st))
    }
}

fn push_name(names: &mut Vec<Sourced<String>>, name: &str, source: SourceId) {
    let folded = name.to_lowercase();
    match names.iter_mut().find(|n| n.value.to_lowercase() == folded) {
        Some(existing) => {
            existing.sources.insert(source);
        }
        None => names.push(Sourced {
            value: name.to_string(),
            sources: BTreeSet::from([source]),
        }),
    }
}

fn push_location(locations: &mut Vec<Sourced<Location>>, loc: &Location, source: SourceId) {
    let key = loc.key();
    match locations.iter_mut().find(|l| l.value.key() == key) {
        Some(existing) => {
            if existing.value.coordinates.is_none() {
                existing.value.coordinates = loc.coordinates;
            }
            existing.sources.insert(source);
        }
        None => locations.push(Sourced {
            value: loc.clone(),
            sources: BTreeSet::from([source]),
        }),
    }
}

fn push_sourced<T: PartialEq>(items: &mut Vec<Sourced<T>>, value: T, source: SourceId) {
    match items.iter_mut().find(|i| i.value == value) {
        Some(existing) => {
            existing.sources.insert(source);
        }
        None => items.push(Sourced {
            value,
            sources: BTreeSet::from([source]),
        }),
    }
}

fn merge_status(map: &mut BTreeMap<SourceId, IxpStatus>, source: SourceId, status: IxpStatus) {
    map.entry(source)
        .and_modify(|cur| {
            if status.liveness() < cur.liveness() {
                *cur = status;
            }
        })
        .or_insert(status);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateScope {
    Sibling,
    Cross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocationEvidence {
    CityMatch,
    CountryMatch,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateState {
    Pending,
    Accepted,
    Rejected,
    AutoAccepted,
}

impl CandidateState {
    pub fn is_accepted(self) -> bool {
        matches!(
            self,
            CandidateState::Accepted | CandidateState::AutoAccepted
        )
    }
}

/// A proposed identity between two canonical IXPs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingCandidate {
    pub candidate_id: String,
    pub left: String,
    pub right: String,
    pub pair: SourcePair,
    pub scope: CandidateScope,
    /// 1..=6, see `NameScheme`.
    pub heuristic_step: u8,
    pub transformed_name: String,
    pub location_evidence: LocationEvidence,
    pub state: CandidateState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

/// A human verdict on a candidate. Decisions are only ever appended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingDecision {
    pub candidate_id: String,
    pub verdict: Verdict,
    pub reviewer: String,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Latest decision per candidate: last timestamp wins, ties go to the later
/// log entry.
pub fn latest_decisions(log: &[MappingDecision]) -> BTreeMap<&str, &MappingDecision> {
    let mut latest: BTreeMap<&str, (usize, &MappingDecision)> = BTreeMap::new();
    for (idx, d) in log.iter().enumerate() {
        match latest.get(d.candidate_id.as_str()) {
            Some((_, cur)) if cur.timestamp > d.timestamp => {}
            _ => {
                latest.insert(d.candidate_id.as_str(), (idx, d));
            }
        }
    }
    latest.into_iter().map(|(k, (_, d))| (k, d)).collect()
}

/// Effective state given the candidate's base state and the latest decision.
pub fn effective_state(base: CandidateState, decision: Option<&MappingDecision>) -> CandidateState {
    match decision.map(|d| d.verdict) {
        Some(Verdict::Accept) => CandidateState::Accepted,
        Some(Verdict::Reject) => CandidateState::Rejected,
        None => base,
    }
}

/// Label for a link set or a compared set: one source or the union.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkSource {
    Source(SourceId),
    Union,
}

impl LinkSource {
    pub fn label(self) -> &'static str {
        match self {
            LinkSource::Source(s) => s.label(),
            LinkSource::Union => "UNION",
        }
    }
}

impl fmt::Display for LinkSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkSource::Source(s) => f.write_str(s.as_str()),
            LinkSource::Union => f.write_str("union"),
        }
    }
}

impl FromStr for LinkSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "union" {
            Ok(LinkSource::Union)
        } else {
            s.parse().map(LinkSource::Source)
        }
    }
}

impl Serialize for LinkSource {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LinkSource {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<SourceId> for LinkSource {
    fn from(s: SourceId) -> Self {
        LinkSource::Source(s)
    }
}

/// An (IXP, ASN) membership.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Link {
    pub ixp: String,
    pub asn: Asn,
}

impl Link {
    pub fn new(ixp: impl Into<String>, asn: impl Into<Asn>) -> Self {
        Link {
            ixp: ixp.into(),
            asn: asn.into(),
        }
    }
}

/// Membership links of one source, or of the union.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkSet {
    pub source: LinkSource,
    pub links: BTreeSet<Link>,
}

impl LinkSet {
    pub fn new(source: impl Into<LinkSource>) -> Self {
        LinkSet {
            source: source.into(),
            links: BTreeSet::new(),
        }
    }

    pub fn from_links(
        source: impl Into<LinkSource>,
        links: impl IntoIterator<Item = Link>,
    ) -> Self {
        LinkSet {
            source: source.into(),
            links: links.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn insert(&mut self, link: Link) -> bool {
        self.links.insert(link)
    }

    /// Links restricted to IXPs accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&str) -> bool) -> LinkSet {
        LinkSet {
            source: self.source,
            links: self
                .links
                .iter()
                .filter(|l| keep(&l.ixp))
                .cloned()
                .collect(),
        }
    }

    pub fn ixps(&self) -> BTreeSet<&str> {
        self.links.iter().map(|l| l.ixp.as_str()).collect()
    }

    pub fn asns_at(&self, ixp: &str) -> BTreeSet<Asn> {
        self.links
            .iter()
            .filter(|l| l.ixp == ixp)
            .map(|l| l.asn)
            .collect()
    }
}

/// Cardinalities and similarity indices of two or more compared sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub group_key: String,
    pub sets_compared: Vec<LinkSource>,
    pub cardinalities: Vec<usize>,
    pub intersection: usize,
    pub union_size: usize,
    pub jaccard: f64,
    pub overlap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionState {
    Established,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BgpSession {
    pub peer_ip: IpAddr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asn: Option<Asn>,
    pub state: SessionState,
}

/// BGP summary of one route collector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BgpCollectorSnapshot {
    pub collector_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub airport_code: Option<String>,
    pub fabric_prefixes: Vec<IpNet>,
    pub sessions: Vec<BgpSession>,
}
