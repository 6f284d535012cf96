//! Similarity indices and the comparison tables built on them.

pub mod external;
pub mod facilities;
pub mod geo;
pub mod groups;
pub mod links;
pub mod participants;
pub mod pct;
pub mod ranking;
pub mod report;
pub mod similarity;
pub mod status;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linker::{table2_for, Table2};
use crate::model::{CanonicalIxp, Facility, SimilarityReport, SourceId, SourceRecord};

pub use external::{aggregate_coverage, compare_external_list, ExternalComparison};
pub use facilities::{facility_stats, FacilityStats};
pub use geo::{geo_table, GeoTable};
pub use groups::{group_similarity, ixp_size, size_bucket, total_similarity, Grouping};
pub use links::{database_links, extract_links, union_links};
pub use participants::{participant_stats, ParticipantStats};
pub use pct::{format_pct, pct3, round_sig};
pub use ranking::{top_asns, AsnRank};
pub use similarity::{jaccard, overlap, report_for_sets, set_counts, SetCounts};
pub use status::{status_consistency, status_pairs, StatusConsistency};

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("{grouping} groups hold {found} of the {expected} links in {set}")]
    PartitionMismatch {
        grouping: String,
        set: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown IXP {0}")]
    UnknownIxp(String),
    #[error("external member list for {0} is empty")]
    EmptyExternalList(String),
    #[error("writing {path}: {message}")]
    Write { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub top_n: usize,
    pub city_threshold: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            top_n: 10,
            city_threshold: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReports {
    pub grouping: Grouping,
    pub reports: Vec<SimilarityReport>,
}

/// Every table computed from a unified dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub table2: Table2,
    pub top_asns: Vec<AsnRank>,
    pub groups: Vec<GroupReports>,
    pub geo: GeoTable,
    /// Euro-IX against PCH status over IXPs listed by both.
    pub status: Option<StatusConsistency>,
    pub participants: Vec<ParticipantStats>,
    pub facilities: FacilityStats,
}

pub fn analyze(
    unified: &[CanonicalIxp],
    raw_records: &[SourceRecord],
    facilities: &[Facility],
    options: &AnalysisOptions,
) -> Result<Analysis, AnalyticsError> {
    let sets = database_links(unified);
    let groups = Grouping::ALL
        .iter()
        .map(|g| {
            Ok(GroupReports {
                grouping: *g,
                reports: group_similarity(&sets, *g, unified)?,
            })
        })
        .collect::<Result<Vec<_>, AnalyticsError>>()?;
    let pdb: Vec<SourceRecord> = raw_records
        .iter()
        .filter(|r| r.source == SourceId::PeeringDb)
        .cloned()
        .collect();
    Ok(Analysis {
        table2: table2_for(unified),
        top_asns: top_asns(&sets, options.top_n),
        groups,
        geo: geo_table(raw_records, options.city_threshold),
        status: status_consistency(&status_pairs(unified, SourceId::EuroIx, SourceId::Pch)),
        participants: SourceId::DATABASES
            .iter()
            .map(|s| participant_stats(unified, *s))
            .collect(),
        facilities: facility_stats(facilities, &pdb),
    })
}
