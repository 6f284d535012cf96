use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{Facility, SourceRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacilityStats {
    pub facilities: usize,
    pub per_country: BTreeMap<String, usize>,
    pub ixps_per_facility: BTreeMap<String, usize>,
    pub facilities_per_ixp: BTreeMap<String, usize>,
    pub facilities_with_multiple_ixps: usize,
    pub ixps_at_more_than_one: usize,
    pub ixps_at_more_than_ten: usize,
    /// Facilities linked to neither an IXP nor a network.
    pub orphans: Vec<String>,
}

/// Facility statistics. IXP-facility links are taken from both the
/// facility and the IXP side.
pub fn facility_stats(facilities: &[Facility], ixps: &[SourceRecord]) -> FacilityStats {
    let mut links: BTreeSet<(&str, &str)> = BTreeSet::new();
    for f in facilities {
        for i in &f.ixp_record_ids {
            links.insert((f.facility_id.as_str(), i.as_str()));
        }
    }
    for r in ixps {
        for f in &r.facility_ids {
            links.insert((f.as_str(), r.record_id.as_str()));
        }
    }
    let mut ixps_per_facility: BTreeMap<String, usize> = facilities
        .iter()
        .map(|f| (f.facility_id.clone(), 0))
        .collect();
    let mut facilities_per_ixp: BTreeMap<String, usize> = BTreeMap::new();
    for (f, i) in &links {
        *ixps_per_facility.entry(f.to_string()).or_default() += 1;
        *facilities_per_ixp.entry(i.to_string()).or_default() += 1;
    }
    let mut per_country = BTreeMap::new();
    for f in facilities {
        *per_country.entry(f.location.country.clone()).or_default() += 1;
    }
    let orphans = facilities
        .iter()
        .filter(|f| ixps_per_facility.get(&f.facility_id) == Some(&0) && f.network_asns.is_empty())
        .map(|f| f.facility_id.clone())
        .collect();
    FacilityStats {
        facilities: facilities.len(),
        per_country,
        facilities_with_multiple_ixps: ixps_per_facility.values().filter(|n| **n > 1).count(),
        ixps_at_more_than_one: facilities_per_ixp.values().filter(|n| **n > 1).count(),
        ixps_at_more_than_ten: facilities_per_ixp.values().filter(|n| **n > 10).count(),
        ixps_per_facility,
        facilities_per_ixp,
        orphans,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Asn, Location};

    fn fac(id: &str, country: &str, ixps: &[&str], nets: &[u32]) -> Facility {
        Facility {
            facility_id: id.into(),
            name: id.into(),
            location: Location::new("", country).0,
            ixp_record_ids: ixps.iter().map(|s| s.to_string()).collect(),
            network_asns: nets.iter().map(|a| Asn(*a)).collect(),
        }
    }

    #[test]
    fn orphan_and_countries() {
        let fs = [
            fac("f1", "US", &["i1"], &[]),
            fac("f2", "US", &[], &[]),
            fac("f3", "DE", &[], &[3]),
        ];
        let s = facility_stats(&fs, &[]);
        assert_eq!(s.orphans, vec!["f2".to_string()]);
        assert_eq!(s.per_country["US"], 2);
        assert_eq!(s.per_country["DE"], 1);
    }

    #[test]
    fn more_than_ten() {
        let fs: Vec<Facility> = (0..13)
            .map(|n| fac(&format!("f{n}"), "NL", &["big"], &[]))
            .collect();
        let s = facility_stats(&fs, &[]);
        assert_eq!(s.facilities_per_ixp["big"], 13);
        assert_eq!(s.ixps_at_more_than_ten, 1);
        assert_eq!(s.ixps_at_more_than_one, 1);
        assert_eq!(s.facilities_with_multiple_ixps, 0);
    }
}
