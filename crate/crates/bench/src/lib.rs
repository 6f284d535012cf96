//! Synthetic inputs for the benchmarks.

use std::collections::BTreeMap;

use ixpunion::{CanonicalIxp, IxpStatus, Location, Participant, SourceId, SourceRecord};

const CITIES: [(&str, &str); 8] = [
    ("Amsterdam", "NL"),
    ("Frankfurt", "DE"),
    ("London", "GB"),
    ("Tokyo", "JP"),
    ("Seattle", "US"),
    ("Sao Paulo", "BR"),
    ("Sydney", "AU"),
    ("Nairobi", "KE"),
];

/// `n` records per source. Record `i` is named after exchange `i` in a
/// source-specific spelling, so every pair of sources links at some step.
pub fn records(source: SourceId, n: usize) -> Vec<SourceRecord> {
    (0..n)
        .map(|i| {
            let (city, country) = CITIES[i % CITIES.len()];
            let name = match source {
                SourceId::EuroIx => format!("IX{i} {city}"),
                SourceId::PeeringDb => format!("ix{i}-{}", city.to_lowercase()),
                _ => format!("IX{i}"),
            };
            SourceRecord {
                record_id: format!("{i}"),
                source,
                names: vec![name],
                locations: vec![Location::new(city, country).0],
                status: IxpStatus::Active,
                prefixes: vec![],
                participants: (0..(i % 50) as u32)
                    .map(|a| Participant::with_asn(64_512 + a * 7 + i as u32))
                    .collect(),
                facility_count: None,
                facility_ids: vec![],
                established: None,
                url: None,
            }
        })
        .collect()
}

pub fn datasets(n: usize) -> BTreeMap<SourceId, Vec<CanonicalIxp>> {
    SourceId::DATABASES
        .iter()
        .map(|s| {
            (
                *s,
                records(*s, n)
                    .iter()
                    .map(CanonicalIxp::from_record)
                    .collect(),
            )
        })
        .collect()
}
