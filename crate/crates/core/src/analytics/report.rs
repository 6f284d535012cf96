//! CSV output, one file per table. UTF-8 with LF line endings.
//!
//! Columns:
//! - `table2_intersections.csv`: sets, cardinalities, intersection, union, jaccard, overlap, jaccard_pct, overlap_pct
//! - `table3_top_asns.csv`: rank, asn, euro_ix, peeringdb, pch, sum
//! - `table4_group_similarity.csv`: grouping, group, sets, cardinalities, intersection, union, jaccard, overlap, jaccard_pct, overlap_pct
//! - `geo_table.csv`: level, continent, country, city, euro_ix, peeringdb, pch
//! - `status_contingency.csv`: euro_ix_status, pch_status, count
//! - `cdf_members_per_ixp.csv`: source, participants, cumulative_fraction
//! - `cdf_ixps_per_asn.csv`: source, ixps, cumulative_fraction

use std::path::{Path, PathBuf};

use csv::{Terminator, Writer, WriterBuilder};

use super::geo::Counts;
use super::{format_pct, Analysis, AnalyticsError};
use crate::model::{SimilarityReport, SourceId};

pub const FILES: [&str; 7] = [
    "table2_intersections.csv",
    "table3_top_asns.csv",
    "table4_group_similarity.csv",
    "geo_table.csv",
    "status_contingency.csv",
    "cdf_members_per_ixp.csv",
    "cdf_ixps_per_asn.csv",
];

type Rows = Vec<Vec<String>>;

fn err(path: &Path, e: impl std::fmt::Display) -> AnalyticsError {
    AnalyticsError::Write {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_csv(path: &Path, header: &[&str], rows: Rows) -> Result<(), AnalyticsError> {
    let mut w: Writer<std::fs::File> = WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| err(path, e))?;
    w.write_record(header).map_err(|e| err(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| err(path, e))?;
    }
    w.flush().map_err(|e| err(path, e))
}

fn sets_label(r: &SimilarityReport) -> String {
    r.sets_compared
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join("/")
}

fn similarity_cols(r: &SimilarityReport) -> Vec<String> {
    vec![
        sets_label(r),
        r.cardinalities
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";"),
        r.intersection.to_string(),
        r.union_size.to_string(),
        format!("{:.6}", r.jaccard),
        format!("{:.6}", r.overlap),
        format_pct(r.jaccard),
        format_pct(r.overlap),
    ]
}

fn count_cols(c: &Counts) -> Vec<String> {
    SourceId::DATABASES
        .iter()
        .map(|s| c.get(s).copied().unwrap_or(0).to_string())
        .collect()
}

/// Writes every table into `dir` and returns the written paths.
pub fn write_reports(analysis: &Analysis, dir: &Path) -> Result<Vec<PathBuf>, AnalyticsError> {
    std::fs::create_dir_all(dir).map_err(|e| err(dir, e))?;
    let p = |name: &str| dir.join(name);
    let sim_header = [
        "sets",
        "cardinalities",
        "intersection",
        "union",
        "jaccard",
        "overlap",
        "jaccard_pct",
        "overlap_pct",
    ];

    write_csv(
        &p(FILES[0]),
        &sim_header,
        analysis.table2.rows.iter().map(similarity_cols).collect(),
    )?;

    let rows = analysis
        .top_asns
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = vec![(i + 1).to_string(), r.asn.0.to_string()];
            row.extend(r.counts.iter().map(|c| c.1.to_string()));
            row.push(r.sum.to_string());
            row
        })
        .collect();
    write_csv(
        &p(FILES[1]),
        &["rank", "asn", "euro_ix", "peeringdb", "pch", "sum"],
        rows,
    )?;

    let mut rows = Vec::new();
    for g in &analysis.groups {
        for r in &g.reports {
            let mut row = vec![g.grouping.as_str().to_string(), r.group_key.clone()];
            row.extend(similarity_cols(r));
            rows.push(row);
        }
    }
    let mut header = vec!["grouping", "group"];
    header.extend(sim_header);
    write_csv(&p(FILES[2]), &header, rows)?;

    let mut rows = Vec::new();
    for c in &analysis.geo.continents {
        let mut row = vec![
            "continent".into(),
            c.label().into(),
            String::new(),
            String::new(),
        ];
        row.extend(count_cols(&c.counts));
        rows.push(row);
        for k in &c.countries {
            let mut row = vec![
                "country".into(),
                c.label().into(),
                k.country.clone(),
                String::new(),
            ];
            row.extend(count_cols(&k.counts));
            rows.push(row);
            for city in &k.cities {
                let mut row = vec![
                    "city".into(),
                    c.label().into(),
                    k.country.clone(),
                    city.city.clone(),
                ];
                row.extend(count_cols(&city.counts));
                rows.push(row);
            }
        }
    }
    let mut row = vec!["world".into(), String::new(), String::new(), String::new()];
    row.extend(count_cols(&analysis.geo.world));
    rows.push(row);
    write_csv(
        &p(FILES[3]),
        &[
            "level",
            "continent",
            "country",
            "city",
            "euro_ix",
            "peeringdb",
            "pch",
        ],
        rows,
    )?;

    let rows = analysis
        .status
        .iter()
        .flat_map(|s| &s.contingency)
        .map(|c| vec![c.left.to_string(), c.right.to_string(), c.count.to_string()])
        .collect();
    write_csv(
        &p(FILES[4]),
        &["euro_ix_status", "pch_status", "count"],
        rows,
    )?;

    let cdf_rows = |pick: fn(&super::ParticipantStats) -> &Vec<(usize, f64)>| -> Rows {
        analysis
            .participants
            .iter()
            .flat_map(|s| {
                pick(s)
                    .iter()
                    .map(move |(v, f)| vec![s.source.to_string(), v.to_string(), format!("{f:.6}")])
            })
            .collect()
    };
    write_csv(
        &p(FILES[5]),
        &["source", "participants", "cumulative_fraction"],
        cdf_rows(|s| &s.cdf_members_per_ixp),
    )?;
    write_csv(
        &p(FILES[6]),
        &["source", "ixps", "cumulative_fraction"],
        cdf_rows(|s| &s.cdf_ixps_per_asn),
    )?;

    Ok(FILES.iter().map(|f| p(f)).collect())
}
