//! Stage functions and the artifacts passed between them.
//!
//! Every artifact is written as pretty JSON with sorted maps, so identical
//! inputs give identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ingest::{
    parse_snapshot, sanitize_snapshot, IngestError, SanitizationReport, SnapshotManifest,
};
use crate::linker::{
    mapping_exports, merge_siblings, run_cascade, CascadeConfig, CascadeState, LinkerError,
    MappingExport, SiblingMerge,
};
use crate::model::{
    CanonicalIxp, Facility, MappingCandidate, MappingDecision, SourceId, SourceRecord,
};

pub const INGESTED: &str = "ingested.json";
pub const SIBLINGS: &str = "siblings.json";
pub const CASCADE: &str = "cascade.json";
pub const UNIFIED: &str = "unified.json";
pub const MAPPINGS: &str = "mappings.jsonl";
pub const ANALYSIS: &str = "analysis.json";
pub const UNION: &str = "union.json";
pub const BGP_REPORT: &str = "bgp_report.json";
pub const RUN_MANIFEST: &str = "run_manifest.json";

/// Sanitized records of every ingested source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ingested {
    pub manifests: BTreeMap<SourceId, SnapshotManifest>,
    pub records: BTreeMap<SourceId, Vec<SourceRecord>>,
    pub facilities: Vec<Facility>,
    pub sanitization: BTreeMap<SourceId, SanitizationReport>,
    pub warnings: Vec<String>,
}

impl Ingested {
    pub fn all_records(&self) -> Vec<SourceRecord> {
        self.records.values().flatten().cloned().collect()
    }
}

pub fn ingest_sources(paths: &BTreeMap<SourceId, PathBuf>) -> Result<Ingested, IngestError> {
    let mut out = Ingested {
        manifests: BTreeMap::new(),
        records: BTreeMap::new(),
        facilities: Vec::new(),
        sanitization: BTreeMap::new(),
        warnings: Vec::new(),
    };
    for (source, path) in paths {
        let parsed = parse_snapshot(path, *source)?;
        let (records, report) = sanitize_snapshot(&parsed)?;
        out.warnings
            .extend(parsed.warnings.iter().map(|w| format!("{source}: {w}")));
        out.facilities.extend(parsed.facilities.iter().cloned());
        out.manifests.insert(*source, parsed.manifest);
        out.records.insert(*source, records);
        out.sanitization.insert(*source, report);
    }
    Ok(out)
}

pub fn merge_all_siblings(
    ingested: &Ingested,
    decisions: &[MappingDecision],
) -> Result<BTreeMap<SourceId, SiblingMerge>, LinkerError> {
    ingested
        .records
        .iter()
        .map(|(s, recs)| Ok((*s, merge_siblings(recs, decisions)?)))
        .collect()
}

pub fn link_sources(
    siblings: &BTreeMap<SourceId, SiblingMerge>,
    decisions: &[MappingDecision],
    manual: &[MappingCandidate],
    config: &CascadeConfig,
) -> CascadeState {
    let datasets: BTreeMap<SourceId, Vec<CanonicalIxp>> =
        siblings.iter().map(|(s, m)| (*s, m.ixps.clone())).collect();
    run_cascade(&datasets, decisions, manual, config)
}

/// Accepted mappings as JSON Lines.
pub fn mappings_jsonl(cascade: &CascadeState, decisions: &[MappingDecision]) -> String {
    let mut out = String::new();
    for m in mapping_exports(cascade, decisions) {
        out.push_str(&serde_json::to_string(&m).expect("mapping serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_mappings(text: &str) -> Result<Vec<MappingExport>, String> {
    crate::review::parse_jsonl(text)
}

/// Unified dataset in canonical-id order.
pub fn union_json(unified: &[CanonicalIxp]) -> String {
    let mut sorted: Vec<&CanonicalIxp> = unified.iter().collect();
    sorted.sort_by(|a, b| a.canonical_id.cmp(&b.canonical_id));
    let mut s = serde_json::to_string_pretty(&sorted).expect("unified dataset serializes");
    s.push('\n');
    s
}

pub fn export_union(unified: &[CanonicalIxp], out_path: &Path) -> std::io::Result<()> {
    fs::write(out_path, union_json(unified))
}

/// Record ids missing from, or repeated in, a unified dataset.
pub fn coverage_violations(records: &[SourceRecord], unified: &[CanonicalIxp]) -> Vec<String> {
    let mut seen: BTreeMap<(SourceId, &str), usize> = BTreeMap::new();
    for u in unified {
        for m in &u.members {
            *seen.entry((m.source, m.record_id.as_str())).or_default() += 1;
        }
    }
    let mut out = Vec::new();
    for r in records {
        match seen.get(&(r.source, r.record_id.as_str())) {
            Some(1) => {}
            Some(n) => out.push(format!("{}:{} appears {n} times", r.source, r.record_id)),
            None => out.push(format!("{}:{} is missing", r.source, r.record_id)),
        }
    }
    out
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    s.push('\n');
    fs::write(path, s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> std::io::Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let mut f = fs::File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = [0u8; 8192];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

/// Inputs, per-stage counts and tool versions of one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub inputs: BTreeMap<String, String>,
    pub stage_counts: BTreeMap<String, BTreeMap<String, usize>>,
    pub versions: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new() -> Self {
        RunManifest {
            versions: BTreeMap::from([(
                "ixpunion".to_string(),
                env!("CARGO_PKG_VERSION").to_string(),
            )]),
            ..Default::default()
        }
    }

    pub fn add_input(&mut self, path: &Path) -> std::io::Result<()> {
        self.inputs
            .insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    pub fn count(&mut self, stage: &str, key: &str, n: usize) {
        self.stage_counts
            .entry(stage.to_string())
            .or_default()
            .insert(key.to_string(), n);
    }
}

/// Counts of candidates by state, for the manifest.
pub fn candidate_counts(cands: &[MappingCandidate]) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for c in cands {
        let k = serde_json::to_value(c.state)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        *m.entry(k).or_default() += 1;
    }
    m
}

pub fn distinct_sources(unified: &[CanonicalIxp]) -> BTreeSet<SourceId> {
    unified.iter().flat_map(|u| u.sources()).collect()
}
