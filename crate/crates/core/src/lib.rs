//! Linking and comparing Internet exchange point databases.
//!
//! Snapshots of Euro-IX, PeeringDB and PCH are ingested and sanitized,
//! sibling records are merged, IXPs are linked across databases through a
//! name cascade with human review, and the unified dataset is compared
//! against itself and against route-collector data.

pub mod analytics;
pub mod bgp;
pub mod ingest;
pub mod linker;
pub mod model;
pub mod pipeline;
pub mod review;

pub use model::{
    Asn, BgpCollectorSnapshot, BgpSession, CandidateScope, CandidateState, CanonicalIxp, Continent,
    Facility, IxpStatus, Link, LinkSet, LinkSource, Location, MappingCandidate, MappingDecision,
    MemberRef, Participant, SessionState, SimilarityReport, SourceId, SourcePair, SourceRecord,
    Verdict,
};
