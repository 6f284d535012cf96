//! Candidate queue and decision log behind the review API.
//!
//! Decisions live in an append-only JSON Lines file, one `MappingDecision`
//! per line. Curator-created candidates go to a sidecar file next to it
//! (`<stem>.manual.jsonl`) so the decision log keeps a single record type.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linker::{manual_candidate, CascadeState, SiblingMerge};
use crate::model::{
    effective_state, latest_decisions, CandidateState, CanonicalIxp, Continent, LocationEvidence,
    MappingCandidate, MappingDecision, SourceId, SourcePair, Verdict,
};

#[derive(Debug, Error)]
pub enum ReviewError {
    #[error("unknown candidate {0}")]
    UnknownCandidate(String),
    #[error("unknown IXP {0}")]
    UnknownIxp(String),
    #[error("a candidate cannot pair {0} with itself")]
    SelfPair(String),
    #[error("{left} and {right} both come from {from}")]
    SameSource {
        left: String,
        right: String,
        from: SourceId,
    },
    #[error("candidate {0} already exists")]
    Duplicate(String),
    #[error("invalid cursor")]
    InvalidCursor,
    #[error("storage failure on {path}: {message}")]
    Storage { path: PathBuf, message: String },
}

fn storage(path: &Path, e: impl std::fmt::Display) -> ReviewError {
    ReviewError::Storage {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Append-only JSON Lines file.
#[derive(Debug, Clone)]
pub struct JsonlLog<T> {
    path: PathBuf,
    _marker: PhantomData<T>,
}

impl<T: Serialize + DeserializeOwned> JsonlLog<T> {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        JsonlLog {
            path: path.into(),
            _marker: PhantomData,
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Entries in append order. A missing file is empty; a final line
    /// without its newline is an interrupted append and is ignored.
    pub fn read(&self) -> Result<Vec<T>, ReviewError> {
        let bytes = match fs::read(&self.path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(storage(&self.path, e)),
        };
        // a torn tail may end inside a multi-byte character
        let complete = bytes.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
        let text = std::str::from_utf8(&bytes[..complete]).map_err(|e| storage(&self.path, e))?;
        parse_jsonl(text).map_err(|e| storage(&self.path, e))
    }

    /// Appends one entry and syncs it to disk before returning. On failure
    /// the file is cut back to its previous length.
    pub fn append(&self, entry: &T) -> Result<(), ReviewError> {
        let mut line = serde_json::to_vec(entry).map_err(|e| storage(&self.path, e))?;
        line.push(b'\n');
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| storage(&self.path, e))?;
        let before = file.metadata().map_err(|e| storage(&self.path, e))?.len();
        if let Err(e) = file.write_all(&line).and_then(|_| file.sync_data()) {
            let _ = file.set_len(before);
            return Err(storage(&self.path, e));
        }
        Ok(())
    }
}

/// Parses JSON Lines text, skipping blank lines and an unterminated tail.
pub fn parse_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, String> {
    let complete = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    let mut out = Vec::new();
    for (n, line) in complete.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line).map_err(|e| format!("line {}: {e}", n + 1))?);
    }
    Ok(out)
}

pub type DecisionLog = JsonlLog<MappingDecision>;

/// Sidecar path for curator-created candidates.
pub fn manual_path(decisions: &Path) -> PathBuf {
    let stem = decisions
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "decisions".into());
    decisions.with_file_name(format!("{stem}.manual.jsonl"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewQueueEntry {
    pub candidate: MappingCandidate,
    pub left_detail: CanonicalIxp,
    pub right_detail: CanonicalIxp,
    pub suggested_evidence: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueFilter {
    pub state: Option<CandidateState>,
    pub pair: Option<SourcePair>,
    pub step: Option<u8>,
    pub continent: Option<Continent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Page {
    pub entries: Vec<ReviewQueueEntry>,
    /// Pass back to continue after the last entry; absent on the last page.
    pub next_cursor: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub pair: SourcePair,
    pub pending: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub working_left: usize,
    pub working_right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub pairs: Vec<PairCounts>,
    pub pending: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub total: usize,
}

fn sort_key(c: &MappingCandidate) -> (u8, &str, &str) {
    (c.heuristic_step, &c.transformed_name, &c.candidate_id)
}

fn encode_cursor(c: &MappingCandidate) -> String {
    hex::encode(format!(
        "{}\u{1f}{}\u{1f}{}",
        c.heuristic_step, c.transformed_name, c.candidate_id
    ))
}

fn decode_cursor(s: &str) -> Result<(u8, String, String), ReviewError> {
    let bytes = hex::decode(s).map_err(|_| ReviewError::InvalidCursor)?;
    let text = String::from_utf8(bytes).map_err(|_| ReviewError::InvalidCursor)?;
    let mut parts = text.splitn(3, '\u{1f}');
    let step = parts
        .next()
        .and_then(|p| p.parse().ok())
        .ok_or(ReviewError::InvalidCursor)?;
    let name = parts.next().ok_or(ReviewError::InvalidCursor)?.to_string();
    let id = parts.next().ok_or(ReviewError::InvalidCursor)?.to_string();
    Ok((step, name, id))
}

/// What the review server works on: cross candidates from the cascade and,
/// optionally, the sibling candidates of each source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewState {
    pub cascade: CascadeState,
    #[serde(default)]
    pub siblings: BTreeMap<SourceId, SiblingMerge>,
}

impl From<CascadeState> for ReviewState {
    fn from(cascade: CascadeState) -> Self {
        ReviewState {
            cascade,
            siblings: BTreeMap::new(),
        }
    }
}

/// Candidates, their decisions and the IXP details they refer to.
#[derive(Debug)]
pub struct ReviewStore {
    cascade: CascadeState,
    ixps: BTreeMap<String, (SourceId, CanonicalIxp)>,
    candidates: Vec<MappingCandidate>,
    decisions: Vec<MappingDecision>,
    log: DecisionLog,
    manual_log: JsonlLog<MappingCandidate>,
}

impl ReviewStore {
    /// Loads the decision log and manual sidecar for a cascade state.
    pub fn open(state: impl Into<ReviewState>, decisions: &Path) -> Result<Self, ReviewError> {
        let ReviewState { cascade, siblings } = state.into();
        let log = DecisionLog::new(decisions);
        let manual_log = JsonlLog::new(manual_path(decisions));
        let mut ixps: BTreeMap<String, (SourceId, CanonicalIxp)> = cascade
            .ixps
            .iter()
            .flat_map(|(s, v)| {
                v.iter()
                    .map(move |i| (i.canonical_id.clone(), (*s, i.clone())))
            })
            .collect();
        let mut candidates = Vec::new();
        for (s, m) in &siblings {
            for i in m.singletons.iter().chain(&m.ixps) {
                ixps.entry(i.canonical_id.clone())
                    .or_insert_with(|| (*s, i.clone()));
            }
            candidates.extend(m.candidates.iter().cloned());
        }
        candidates.extend(cascade.candidates.iter().cloned());
        let mut store = ReviewStore {
            candidates,
            cascade,
            ixps,
            decisions: log.read()?,
            log,
            manual_log,
        };
        for m in store.manual_log.read()? {
            if !store
                .candidates
                .iter()
                .any(|c| c.candidate_id == m.candidate_id)
                && store.ixps.contains_key(&m.left)
                && store.ixps.contains_key(&m.right)
            {
                store.candidates.push(m);
            }
        }
        Ok(store)
    }

    pub fn decisions(&self) -> &[MappingDecision] {
        &self.decisions
    }

    pub fn candidates(&self) -> &[MappingCandidate] {
        &self.candidates
    }

    pub fn ixp(&self, id: &str) -> Option<&CanonicalIxp> {
        self.ixps.get(id).map(|(_, i)| i)
    }

    fn current(
        &self,
        latest: &BTreeMap<&str, &MappingDecision>,
        c: &MappingCandidate,
    ) -> MappingCandidate {
        let mut c = c.clone();
        if let Some(d) = latest.get(c.candidate_id.as_str()) {
            c.state = effective_state(c.state, Some(d));
        }
        c
    }

    fn entry(&self, c: MappingCandidate) -> ReviewQueueEntry {
        let mut evidence = vec![format!("name: {}", c.transformed_name)];
        evidence.push(
            match c.location_evidence {
                LocationEvidence::CityMatch => "location: same city",
                LocationEvidence::CountryMatch => "location: same country",
                LocationEvidence::None => "location: none",
            }
            .to_string(),
        );
        ReviewQueueEntry {
            left_detail: self.ixps[&c.left].1.clone(),
            right_detail: self.ixps[&c.right].1.clone(),
            suggested_evidence: evidence,
            candidate: c,
        }
    }

    pub fn get(&self, candidate_id: &str) -> Option<ReviewQueueEntry> {
        let latest = latest_decisions(&self.decisions);
        self.candidates
            .iter()
            .find(|c| c.candidate_id == candidate_id)
            .map(|c| self.entry(self.current(&latest, c)))
    }

    /// Matching candidates ordered by (step, transformed name, id).
    pub fn list(
        &self,
        filter: &QueueFilter,
        cursor: Option<&str>,
        limit: usize,
    ) -> Result<Page, ReviewError> {
        let after = cursor.map(decode_cursor).transpose()?;
        let latest = latest_decisions(&self.decisions);
        let mut matching: Vec<MappingCandidate> = self
            .candidates
            .iter()
            .map(|c| self.current(&latest, c))
            .filter(|c| filter.state.is_none_or(|s| c.state == s))
            .filter(|c| filter.pair.is_none_or(|p| c.pair == p))
            .filter(|c| filter.step.is_none_or(|s| c.heuristic_step == s))
            .filter(|c| {
                filter.continent.is_none_or(|k| {
                    [&c.left, &c.right]
                        .iter()
                        .any(|id| self.ixp(id).and_then(|i| i.continent()) == Some(k))
                })
            })
            .filter(|c| match &after {
                Some((s, n, id)) => sort_key(c) > (*s, n.as_str(), id.as_str()),
                None => true,
            })
            .collect();
        matching.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
        let more = matching.len() > limit;
        matching.truncate(limit);
        let next_cursor = if more {
            matching.last().map(encode_cursor)
        } else {
            None
        };
        Ok(Page {
            entries: matching.into_iter().map(|c| self.entry(c)).collect(),
            next_cursor,
        })
    }

    /// Pending candidates matching the filter, first page of `limit`.
    pub fn next_pending(&self, filter: &QueueFilter, limit: usize) -> Vec<ReviewQueueEntry> {
        let f = QueueFilter {
            state: Some(CandidateState::Pending),
            ..filter.clone()
        };
        self.list(&f, None, limit)
            .map(|p| p.entries)
            .unwrap_or_default()
    }

    /// Durably records a verdict, then makes it visible to readers.
    pub fn append_decision(
        &mut self,
        candidate_id: &str,
        verdict: Verdict,
        reviewer: &str,
        note: Option<String>,
        timestamp: DateTime<Utc>,
    ) -> Result<MappingDecision, ReviewError> {
        if !self
            .candidates
            .iter()
            .any(|c| c.candidate_id == candidate_id)
        {
            return Err(ReviewError::UnknownCandidate(candidate_id.to_string()));
        }
        let d = MappingDecision {
            candidate_id: candidate_id.to_string(),
            verdict,
            reviewer: reviewer.to_string(),
            timestamp,
            note,
        };
        self.log.append(&d)?;
        self.decisions.push(d.clone());
        Ok(d)
    }

    /// Creates a step-6 candidate between two IXPs of different sources.
    pub fn add_manual(&mut self, a: &str, b: &str) -> Result<MappingCandidate, ReviewError> {
        if a == b {
            return Err(ReviewError::SelfPair(a.to_string()));
        }
        let (sa, ia) = self
            .ixps
            .get(a)
            .ok_or_else(|| ReviewError::UnknownIxp(a.to_string()))?;
        let (sb, ib) = self
            .ixps
            .get(b)
            .ok_or_else(|| ReviewError::UnknownIxp(b.to_string()))?;
        if sa == sb {
            return Err(ReviewError::SameSource {
                left: a.to_string(),
                right: b.to_string(),
                from: *sa,
            });
        }
        let (l, r) = if sa < sb { (ia, ib) } else { (ib, ia) };
        let c = manual_candidate(l, r, SourcePair::new(*sa, *sb));
        if self
            .candidates
            .iter()
            .any(|x| x.candidate_id == c.candidate_id)
        {
            return Err(ReviewError::Duplicate(c.candidate_id));
        }
        self.manual_log.append(&c)?;
        self.candidates.push(c.clone());
        Ok(c)
    }

    pub fn progress(&self) -> Progress {
        let latest = latest_decisions(&self.decisions);
        let mut pairs = Vec::new();
        let sibling_pairs: BTreeSet<SourcePair> = self
            .candidates
            .iter()
            .filter(|c| c.pair.left == c.pair.right)
            .map(|c| c.pair)
            .collect();
        for pair in sibling_pairs.into_iter().chain(SourcePair::CROSS) {
            let ids = |s: SourceId| -> BTreeSet<&str> {
                if pair.left == pair.right {
                    // records taking part in sibling candidates
                    self.candidates
                        .iter()
                        .filter(|c| c.pair == pair)
                        .flat_map(|c| [c.left.as_str(), c.right.as_str()])
                        .collect()
                } else {
                    self.cascade
                        .ixps
                        .get(&s)
                        .map(|v| v.iter().map(|i| i.canonical_id.as_str()).collect())
                        .unwrap_or_default()
                }
            };
            let mut left = ids(pair.left);
            let mut right = ids(pair.right);
            let mut counts = PairCounts {
                pair,
                pending: 0,
                accepted: 0,
                rejected: 0,
                working_left: 0,
                working_right: 0,
            };
            for c in self.candidates.iter().filter(|c| c.pair == pair) {
                let c = self.current(&latest, c);
                match c.state {
                    CandidateState::Pending => counts.pending += 1,
                    CandidateState::Rejected => counts.rejected += 1,
                    CandidateState::Accepted | CandidateState::AutoAccepted => {
                        counts.accepted += 1;
                        left.remove(c.left.as_str());
                        right.remove(c.right.as_str());
                    }
                }
            }
            counts.working_left = left.len();
            counts.working_right = right.len();
            pairs.push(counts);
        }
        Progress {
            pending: pairs.iter().map(|p| p.pending).sum(),
            accepted: pairs.iter().map(|p| p.accepted).sum(),
            rejected: pairs.iter().map(|p| p.rejected).sum(),
            total: self.candidates.len(),
            pairs,
        }
    }
}
