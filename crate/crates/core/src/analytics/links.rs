use crate::model::{CanonicalIxp, Link, LinkSet, LinkSource, SourceId};

/// One link per distinct (canonical id, ASN) reported by `source`.
pub fn extract_links(ixps: &[CanonicalIxp], source: SourceId) -> LinkSet {
    let mut set = LinkSet::new(source);
    for ixp in ixps {
        for asn in ixp.link_asns(source) {
            set.insert(Link::new(ixp.canonical_id.clone(), asn));
        }
    }
    set
}

/// Links reported by any source.
pub fn union_links(ixps: &[CanonicalIxp]) -> LinkSet {
    let mut set = LinkSet::new(LinkSource::Union);
    for ixp in ixps {
        for asn in ixp.union_asns() {
            set.insert(Link::new(ixp.canonical_id.clone(), asn));
        }
    }
    set
}

/// The three per-database link sets, in source order.
pub fn database_links(ixps: &[CanonicalIxp]) -> Vec<LinkSet> {
    SourceId::DATABASES
        .iter()
        .map(|s| extract_links(ixps, *s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IxpStatus, Location, Participant, SourceRecord};

    fn rec(id: &str, source: SourceId, asns: &[u32]) -> SourceRecord {
        SourceRecord {
            record_id: id.into(),
            source,
            names: vec![id.into()],
            locations: vec![Location::new("Oslo", "NO").0],
            status: IxpStatus::Active,
            prefixes: vec![],
            participants: asns.iter().map(|a| Participant::with_asn(*a)).collect(),
            facility_count: None,
            facility_ids: vec![],
            established: None,
            url: None,
        }
    }

    #[test]
    fn duplicate_ports_give_one_link() {
        let x = CanonicalIxp::from_record(&rec("x", SourceId::Pch, &[1, 1, 2]));
        let links = extract_links(&[x.clone()], SourceId::Pch);
        assert_eq!(links.len(), 2);
        assert!(links.links.contains(&Link::new(x.canonical_id.clone(), 1)));
    }

    #[test]
    fn shared_asn_at_two_ixps() {
        let a = CanonicalIxp::from_record(&rec("a", SourceId::Pch, &[1]));
        let b = CanonicalIxp::from_record(&rec("b", SourceId::Pch, &[1]));
        assert_eq!(extract_links(&[a, b], SourceId::Pch).len(), 2);
    }

    #[test]
    fn empty_lists_and_other_sources() {
        let a = CanonicalIxp::from_record(&rec("a", SourceId::Pch, &[]));
        let b = CanonicalIxp::from_record(&rec("b", SourceId::EuroIx, &[5]));
        assert!(extract_links(&[a.clone(), b.clone()], SourceId::Pch).is_empty());
        assert_eq!(union_links(&[a, b]).len(), 1);
    }
}
