//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every expected value is recomputed by a test-side oracle from the fixture
//! construction before the library result is compared with it.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::net::IpAddr;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use chrono::{TimeZone, Utc};
use ipnet::IpNet;
use proptest::collection::{btree_set, vec};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use ixpunion::analytics::pct::{format_pct, pct3};
use ixpunion::analytics::ranking::top_asns;
use ixpunion::analytics::similarity::{jaccard, overlap};
use ixpunion::analytics::status::{status_consistency, status_pairs};
use ixpunion::analytics::{database_links, union_links};
use ixpunion::bgp::{extract_fabric_peers, validate, LinkThresholds};
use ixpunion::ingest::{
    sanitize_euroix_participants, sanitize_pch_ports, sanitize_peeringdb_participants,
};
use ixpunion::linker::{
    normalize_name, resolve_mappings, run_cascade, table2_for, CascadeConfig, NameScheme,
};
use ixpunion::model::candidate_id;
use ixpunion::{
    Asn, BgpCollectorSnapshot, BgpSession, CandidateScope, CandidateState, CanonicalIxp, IxpStatus,
    Link, LinkSet, LinkSource, MappingCandidate, MappingDecision, Participant, SessionState,
    SimilarityReport, SourceId, SourcePair, SourceRecord, Verdict,
};

use common::{bfs_components, member_partition, record, with_asns, with_status};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pct(x: f64) -> f64 {
    x * 100.0
}

fn near(actual_pct: f64, target: f64, tol: f64) -> bool {
    (actual_pct - target).abs() <= tol + 1e-9
}

// ---------------------------------------------------------------- fixtures

/// Unified IXPs covering Venn regions; each entry is the set of sources
/// reporting the IXP and how many such IXPs exist.
fn venn(regions: &[(&[SourceId], usize)]) -> Vec<CanonicalIxp> {
    let mut out = Vec::new();
    for (r, (sources, n)) in regions.iter().enumerate() {
        for i in 0..*n {
            let recs: Vec<SourceRecord> = sources
                .iter()
                .map(|s| record(*s, &format!("r{r}-{i}"), &[&format!("X{r}-{i}")], "", "DE"))
                .collect();
            out.push(CanonicalIxp::from_records(&recs));
        }
    }
    out
}

fn ids_by_source(unified: &[CanonicalIxp]) -> BTreeMap<SourceId, HashSet<String>> {
    let mut m: BTreeMap<SourceId, HashSet<String>> = BTreeMap::new();
    for u in unified {
        for s in u.status_by_source.keys() {
            m.entry(*s).or_default().insert(u.canonical_id.clone());
        }
    }
    m
}

fn row_for<'a>(rows: &'a [SimilarityReport], sets: &[SourceId]) -> Option<&'a SimilarityReport> {
    let want: Vec<LinkSource> = sets.iter().map(|s| LinkSource::Source(*s)).collect();
    rows.iter().find(|r| r.sets_compared == want)
}

use SourceId::{EuroIx as E, Pch as C, PeeringDb as P};

fn triple_fixture() -> Vec<CanonicalIxp> {
    venn(&[
        (&[E, P, C], 273),
        (&[E, P], 40),
        (&[E, C], 20),
        (&[P, C], 16),
        (&[E], 108),
        (&[P], 151),
        (&[C], 65),
    ])
}

// ------------------------------------------------------------- criterion 1

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();

    let unified = triple_fixture();
    let by = ids_by_source(&unified);
    let (e, p, c) = (&by[&E], &by[&P], &by[&C]);
    let inter = e
        .iter()
        .filter(|x| p.contains(*x) && c.contains(*x))
        .count();
    let uni: HashSet<&String> = e.iter().chain(p).chain(c).collect();
    check(
        (e.len(), p.len(), c.len(), inter, uni.len()) == (441, 480, 374, 273, 673),
        || {
            format!(
                "fixture sizes {:?}",
                (e.len(), p.len(), c.len(), inter, uni.len())
            )
        },
    )?;
    let t2 = table2_for(&unified);
    let triple = row_for(&t2.rows, &[E, P, C]).ok_or("no triple row")?;
    check(
        triple.cardinalities == vec![441, 480, 374]
            && triple.intersection == inter
            && triple.union_size == uni.len(),
        || format!("triple counts {:?}", triple),
    )?;
    let oracle_j = inter as f64 / uni.len() as f64;
    let oracle_o = inter as f64 / 374.0;
    check(
        (triple.jaccard - oracle_j).abs() < 1e-12 && (triple.overlap - oracle_o).abs() < 1e-12,
        || "triple indices differ from oracle".into(),
    )?;
    check(
        near(pct3(triple.jaccard), 40.6, 0.05) && near(pct3(triple.overlap), 73.0, 0.05),
        || {
            format!(
                "triple {:.3}/{:.3}",
                pct(triple.jaccard),
                pct(triple.overlap)
            )
        },
    )?;
    details.push(format!(
        "EPC {:.1}/{:.1}",
        pct(triple.jaccard),
        pct(triple.overlap)
    ));

    // pairwise rows, each from its own two-source fixture
    let pairs: [((SourceId, SourceId), usize, usize, usize, f64, f64); 3] = [
        ((E, P), 355, 86, 125, 62.7, 80.5),
        ((E, C), 303, 138, 71, 59.2, 81.0),
        ((P, C), 288, 192, 86, 50.9, 77.0),
    ];
    for ((a, b), both, a_only, b_only, tj, to) in pairs {
        let unified = venn(&[(&[a, b], both), (&[a], a_only), (&[b], b_only)]);
        let by = ids_by_source(&unified);
        let (sa, sb) = (&by[&a], &by[&b]);
        let inter = sa.intersection(sb).count();
        let uni = sa.union(sb).count();
        let oj = inter as f64 / uni as f64;
        let oo = inter as f64 / sa.len().min(sb.len()) as f64;
        let t2 = table2_for(&unified);
        let row = row_for(&t2.rows, &[a, b]).ok_or("missing pair row")?;
        check(row.intersection == inter && row.union_size == uni, || {
            format!("{a}/{b} counts {}/{}", row.intersection, row.union_size)
        })?;
        check(
            (row.jaccard - oj).abs() < 1e-12 && (row.overlap - oo).abs() < 1e-12,
            || format!("{a}/{b} indices differ from oracle"),
        )?;
        check(
            near(pct3(row.jaccard), tj, 0.05) && near(pct3(row.overlap), to, 0.05),
            || format!("{a}/{b} {:.3}/{:.3}", pct(row.jaccard), pct(row.overlap)),
        )?;
        details.push(format!(
            "{}/{} {:.1}/{:.1}",
            a.label(),
            b.label(),
            pct(row.jaccard),
            pct(row.overlap)
        ));
    }
    let elapsed = start.elapsed();
    check(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!("{} in {:?}", details.join(", "), elapsed))
}

// ------------------------------------------------------------- criterion 2

fn criterion_2() -> Outcome {
    let unified = triple_fixture();
    let by = ids_by_source(&unified);
    let union: HashSet<&String> = by.values().flatten().collect();
    let oracle = union.len() as f64 / by[&P].len() as f64 - 1.0;
    let t2 = table2_for(&unified);
    let growth = t2.growth_over_peeringdb.ok_or("no growth value")?;
    check(
        t2.union_active == 673 && t2.active_counts[&P] == 480,
        || {
            format!(
                "union {} peeringdb {}",
                t2.union_active, t2.active_counts[&P]
            )
        },
    )?;
    check(growth == oracle, || {
        format!("growth {growth} vs oracle {oracle}")
    })?;
    check(
        near(pct3(growth), 40.2, 1e-9) && format_pct(growth) == "40.2%",
        || format!("growth {:.4}%", pct(growth)),
    )?;
    Ok(format!("673/480 - 1 = {:.1}%", pct(growth)))
}

// ------------------------------------------------------------- criterion 3

fn criterion_3() -> Outcome {
    // (asn, Euro-IX, PeeringDB, PCH) in table order
    let table: [(u32, usize, usize, usize); 10] = [
        (20940, 61, 91, 31),
        (6939, 66, 84, 32),
        (15169, 60, 76, 24),
        (3856, 50, 74, 21),
        (42, 44, 75, 21),
        (8075, 37, 59, 22),
        (22822, 41, 39, 18),
        (15133, 25, 31, 18),
        (16509, 21, 44, 7),
        (10310, 27, 27, 14),
    ];
    // equal sums, opposite per-source profiles
    let tie: [(u32, usize, usize, usize); 2] = [(64512, 30, 10, 10), (64500, 10, 20, 20)];
    let filler: Vec<(u32, usize, usize, usize)> = (0..40)
        .map(|i| (65000 + i, 5, 5, (i % 7) as usize))
        .collect();

    let mut sets: Vec<LinkSet> = [E, P, C].into_iter().map(LinkSet::new).collect();
    for (asn, ce, cp, cc) in table.iter().chain(&tie).chain(&filler) {
        for (set, n) in sets.iter_mut().zip([ce, cp, cc]) {
            for k in 0..*n {
                set.insert(Link::new(format!("ixp-{k}"), *asn));
            }
        }
    }

    let mut oracle: Vec<(usize, u32)> = table
        .iter()
        .chain(&tie)
        .chain(&filler)
        .map(|(a, e, p, c)| (e + p + c, *a))
        .collect();
    oracle.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));

    let ranked = top_asns(&sets, 12);
    let got: Vec<u32> = ranked.iter().map(|r| r.asn.0).collect();
    let want: Vec<u32> = table.iter().map(|t| t.0).collect();
    check(got[..10] == want[..], || format!("order {:?}", &got[..10]))?;
    check(
        got == oracle[..12].iter().map(|o| o.1).collect::<Vec<_>>(),
        || format!("differs from oracle: {got:?}"),
    )?;
    for (r, (asn, e, p, c)) in ranked.iter().zip(&table) {
        let counts: Vec<usize> = r.counts.iter().map(|c| c.1).collect();
        check(
            r.asn == Asn(*asn) && counts == vec![*e, *p, *c] && r.sum == e + p + c,
            || format!("row for AS{asn}: {r:?}"),
        )?;
    }
    check(ranked[0].sum == 183 && ranked[1].sum == 182, || {
        "top sums".into()
    })?;
    check(
        got[10..12] == [64500, 64512] && ranked[10].sum == ranked[11].sum,
        || format!("tie order {:?}", &got[10..12]),
    )?;
    Ok("AS20940 (183) > AS6939 (182), ten rows in order, tie broken by lower ASN".into())
}

// ------------------------------------------------------------- criterion 4

const IXPS: usize = 77;

enum Elem {
    B(usize),
    U(usize),
}

fn elem_link(e: &Elem) -> (usize, u32) {
    match e {
        Elem::B(i) => (i % IXPS, 100_000 + *i as u32),
        Elem::U(j) => (j % IXPS, 200_000 + *j as u32),
    }
}

fn criterion_4() -> Outcome {
    let bgp: Vec<Elem> = (0..6425).map(Elem::B).collect();
    let euro: Vec<Elem> = (0..3713)
        .map(Elem::B)
        .chain((0..2374).map(Elem::U))
        .collect();
    let pdb: Vec<Elem> = (806..4590)
        .map(Elem::B)
        .chain((1566..3531).map(Elem::U))
        .collect();
    let pch: Vec<Elem> = (0..2602)
        .map(Elem::B)
        .chain((0..945).map(Elem::U))
        .collect();

    let as_set = |v: &[Elem]| -> HashSet<(usize, u32)> { v.iter().map(|e| elem_link(e)).collect() };
    let (ob, oe, op, oc) = (as_set(&bgp), as_set(&euro), as_set(&pdb), as_set(&pch));
    let ou: HashSet<(usize, u32)> = oe.iter().chain(&op).chain(&oc).copied().collect();
    check(
        (ob.len(), ou.len(), oe.len(), op.len(), oc.len()) == (6425, 8121, 6087, 5749, 3547),
        || "fixture cardinalities".into(),
    )?;

    // records per IXP and source, plus an IXP no collector sees
    let mut per: BTreeMap<(usize, SourceId), Vec<u32>> = BTreeMap::new();
    for (src, set) in [(E, &oe), (P, &op), (C, &oc)] {
        for (k, asn) in set {
            per.entry((*k, src)).or_default().push(*asn);
        }
    }
    let mut unified = Vec::new();
    for k in 0..=IXPS {
        let recs: Vec<SourceRecord> = [E, P, C]
            .into_iter()
            .map(|s| {
                let asns = if k == IXPS {
                    (300_000..300_050).collect()
                } else {
                    per.get(&(k, s)).cloned().unwrap_or_default()
                };
                let mut r = with_asns(
                    record(s, &format!("ixp{k}"), &[&format!("IX {k}")], "", "DE"),
                    asns,
                );
                if s == P {
                    r.prefixes = vec![format!("10.{}.0.0/16", k + 1).parse().unwrap()];
                }
                r
            })
            .collect();
        unified.push(CanonicalIxp::from_records(&recs));
    }

    let mut snapshots = Vec::new();
    for k in 0..IXPS {
        let mut sessions: Vec<BgpSession> = bgp
            .iter()
            .map(|e| elem_link(e))
            .filter(|(ik, _)| *ik == k)
            .enumerate()
            .map(|(j, (_, asn))| BgpSession {
                peer_ip: format!("10.{}.{}.{}", k + 1, j / 250, j % 250 + 1)
                    .parse()
                    .unwrap(),
                asn: Some(Asn(asn)),
                state: SessionState::Established,
            })
            .collect();
        sessions.push(BgpSession {
            peer_ip: format!("10.{}.9.9", k + 1).parse().unwrap(),
            asn: Some(Asn(65_000)),
            state: SessionState::Other,
        });
        sessions.push(BgpSession {
            peer_ip: "192.0.2.1".parse().unwrap(),
            asn: Some(Asn(65_001)),
            state: SessionState::Established,
        });
        snapshots.push(BgpCollectorSnapshot {
            collector_id: format!("rc{k}"),
            airport_code: None,
            fabric_prefixes: vec![format!("10.{}.0.0/16", k + 1).parse().unwrap()],
            sessions,
        });
    }

    let mut datasets = vec![union_links(&unified)];
    datasets.extend(database_links(&unified));
    let v = validate(
        &snapshots,
        &unified,
        &datasets,
        &LinkThresholds::default(),
        &BTreeSet::new(),
    );
    check(v.unlinked.is_empty() && v.linked.len() == IXPS, || {
        format!("unlinked {:?}", v.unlinked)
    })?;
    check(
        v.report.linked_ixps == IXPS && v.report.bgp_links == ob.len(),
        || format!("bgp links {}", v.report.bgp_links),
    )?;

    let targets = [
        (LinkSource::Union, &ou, 46.1, 71.5, 0.05, 0.1),
        (LinkSource::Source(E), &oe, 42.2, 61.0, 0.05, 0.05),
        (LinkSource::Source(P), &op, 45.1, 65.8, 0.05, 0.05),
        (LinkSource::Source(C), &oc, 35.3, 73.4, 0.05, 0.05),
    ];
    let mut details = Vec::new();
    for (label, oset, tj, to, jt, ot) in targets {
        let row = v
            .report
            .rows
            .iter()
            .find(|r| r.dataset == label)
            .ok_or("missing row")?;
        let inter = oset.intersection(&ob).count();
        let uni = oset.union(&ob).count();
        let oj = inter as f64 / uni as f64;
        let oo = inter as f64 / oset.len().min(ob.len()) as f64;
        check(
            row.dataset_links == oset.len() && row.intersection == inter,
            || {
                format!(
                    "{label}: {} links, {} common",
                    row.dataset_links, row.intersection
                )
            },
        )?;
        let (j, o) = (
            row.jaccard.ok_or("no jaccard")?,
            row.overlap.ok_or("no overlap")?,
        );
        check((j - oj).abs() < 1e-12 && (o - oo).abs() < 1e-12, || {
            format!("{label}: oracle mismatch")
        })?;
        check(near(pct(j), tj, jt) && near(pct(o), to, ot), || {
            format!("{label}: {:.3}/{:.3} vs {tj}/{to}", pct(j), pct(o))
        })?;
        details.push(format!("{} {:.2}/{:.2}", label.label(), pct(j), pct(o)));
    }
    Ok(details.join(", "))
}

// ------------------------------------------------------------- criterion 5

fn entity_of(ixp: &CanonicalIxp) -> &str {
    ixp.members[0].record_id.split('.').next().unwrap()
}

/// 20 records per source; the record id prefix names the true entity.
fn cascade_fixture() -> BTreeMap<SourceId, Vec<CanonicalIxp>> {
    let layout: &[(&str, &str, &str, &[(SourceId, &str)])] = &[
        (
            "linx",
            "London",
            "GB",
            &[(E, "LINX"), (P, "LINX"), (C, "LINX")],
        ),
        (
            "amsix",
            "Amsterdam",
            "NL",
            &[(E, "AMS-IX"), (P, "AMS-IX"), (C, "AMS-IX")],
        ),
        (
            "decix",
            "Frankfurt",
            "DE",
            &[
                (E, "DE-CIX Frankfurt"),
                (P, "DE-CIX Frankfurt"),
                (C, "DE-CIX Frankfurt"),
            ],
        ),
        (
            "nlix",
            "Amsterdam",
            "NL",
            &[(E, "NL-ix"), (P, "NL-ix"), (C, "NL-ix")],
        ),
        (
            "netnod",
            "Stockholm",
            "SE",
            &[
                (E, "Netnod Stockholm"),
                (P, "NETNOD Stockholm"),
                (C, "netnod stockholm"),
            ],
        ),
        (
            "franceix",
            "Paris",
            "FR",
            &[(E, "France-IX"), (P, "FRANCE-IX"), (C, "france-ix")],
        ),
        (
            "eqash",
            "Ashburn",
            "US",
            &[
                (E, "Equinix Ashburn Exchange"),
                (P, "Equinix Ashburn"),
                (C, "Equinix Ashburn IX"),
            ],
        ),
        (
            "any2",
            "Los Angeles",
            "US",
            &[
                (E, "Any2 Los Angeles"),
                (P, "Any2 Los-Angeles"),
                (C, "ANY2 LOS ANGELES"),
            ],
        ),
        (
            "torix",
            "Toronto",
            "CA",
            &[(E, "TorIX Toronto"), (P, "TORIX"), (C, "TorIX Canada")],
        ),
        (
            "mix",
            "Milan",
            "IT",
            &[(E, "MIX Milan"), (P, "MIX-IT"), (C, "MIX Milano")],
        ),
        (
            "six",
            "Bratislava",
            "SK",
            &[(E, "S-IX"), (P, "SIX"), (C, "S.IX")],
        ),
        (
            "catnix",
            "Barcelona",
            "ES",
            &[(E, "CATNIX"), (P, "CAT-NIX"), (C, "CAT NIX")],
        ),
        (
            "eqchi",
            "Chicago",
            "US",
            &[
                (E, "Equinix Chicago"),
                (P, "Equinix Chicago"),
                (C, "Equinix Chicago"),
            ],
        ),
        ("chi2", "Chicago", "US", &[(P, "Equinix Chicago")]),
        ("drus", "Dallas", "US", &[(E, "Digital Realty")]),
        ("drde", "Berlin", "DE", &[(P, "Digital Realty")]),
        (
            "sthix",
            "Stockholm",
            "SE",
            &[(E, "Stockholm Open Exchange"), (P, "STHIX"), (C, "STHIX")],
        ),
        ("alpha", "Oslo", "NO", &[(E, "Alpha Exchange")]),
        ("bravo", "Oslo", "NO", &[(E, "Bravo IX")]),
        ("kilo", "Oslo", "NO", &[(E, "Kilo Point")]),
        ("lima", "Oslo", "NO", &[(E, "Lima Hub")]),
        ("mike", "Oslo", "NO", &[(E, "Mike Peering")]),
        ("november", "Oslo", "NO", &[(P, "November IX")]),
        ("oscar", "Oslo", "NO", &[(P, "Oscar Exchange")]),
        ("papa", "Oslo", "NO", &[(P, "Papa Peering")]),
        ("quebec", "Oslo", "NO", &[(P, "Quebec IX")]),
        ("romeo", "Oslo", "NO", &[(C, "Romeo IX")]),
        ("sierra", "Oslo", "NO", &[(C, "Sierra Exchange")]),
        ("tango", "Oslo", "NO", &[(C, "Tango Point")]),
        ("uniform", "Oslo", "NO", &[(C, "Uniform IX")]),
        ("victor", "Oslo", "NO", &[(C, "Victor Hub")]),
        ("whiskey", "Oslo", "NO", &[(C, "Whiskey IX")]),
    ];
    let mut out: BTreeMap<SourceId, Vec<CanonicalIxp>> = BTreeMap::new();
    for (entity, city, country, names) in layout {
        for (src, name) in names.iter() {
            let r = record(*src, &format!("{entity}.{src}"), &[name], city, country);
            out.entry(*src)
                .or_default()
                .push(CanonicalIxp::from_record(&r));
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let data = cascade_fixture();
    let counts: Vec<usize> = data.values().map(Vec::len).collect();
    check(counts == vec![20, 20, 20], || {
        format!("fixture sizes {counts:?}")
    })?;

    let find = |id: &str| {
        data.values()
            .flatten()
            .find(|i| i.canonical_id == id)
            .unwrap()
    };
    let by_entity = |entity: &str, src: SourceId| {
        data[&src]
            .iter()
            .find(|i| entity_of(i) == entity)
            .unwrap()
            .canonical_id
            .clone()
    };
    let (ml, mr) = (by_entity("sthix", E), by_entity("sthix", P));
    let manual = vec![MappingCandidate {
        candidate_id: candidate_id(&ml, &mr),
        left: ml.clone(),
        right: mr.clone(),
        pair: SourcePair::new(E, P),
        scope: CandidateScope::Cross,
        heuristic_step: 6,
        transformed_name: "Stockholm Open Exchange | STHIX".into(),
        location_evidence: ixpunion::model::LocationEvidence::CityMatch,
        state: CandidateState::Pending,
    }];
    let config = CascadeConfig::default();

    // simulated review until nothing is pending
    let mut log: Vec<MappingDecision> = Vec::new();
    let mut states = Vec::new();
    for round in 0.. {
        check(round < 20, || "review did not converge".into())?;
        let st = run_cascade(&data, &log, &manual, &config);
        let pending: Vec<MappingCandidate> = st.pending().cloned().collect();
        states.push(st);
        if pending.is_empty() {
            break;
        }
        for c in pending {
            let same = entity_of(find(&c.left)) == entity_of(find(&c.right));
            log.push(MappingDecision {
                candidate_id: c.candidate_id,
                verdict: if same {
                    Verdict::Accept
                } else {
                    Verdict::Reject
                },
                reviewer: "oracle".into(),
                timestamp: Utc
                    .timestamp_opt(1_410_000_000 + log.len() as i64, 0)
                    .unwrap(),
                note: None,
            });
        }
    }
    let last = states.last().unwrap();
    let rejected = last
        .candidates
        .iter()
        .filter(|c| c.state == CandidateState::Rejected)
        .count();
    check(rejected > 0, || "fixture produced no rejections".into())?;
    let steps: BTreeSet<u8> = last
        .candidates
        .iter()
        .filter(|c| c.state.is_accepted())
        .map(|c| c.heuristic_step)
        .collect();
    check(steps == (1..=6).collect(), || {
        format!("accepted steps {steps:?}")
    })?;

    // (a) and (b), for every intermediate run
    for st in &states {
        for p in &st.pairs {
            let cands: Vec<&MappingCandidate> =
                st.candidates.iter().filter(|c| c.pair == p.pair).collect();
            for a in cands.iter().filter(|c| c.state.is_accepted()) {
                let resurfaced = cands.iter().any(|c| {
                    c.heuristic_step > a.heuristic_step && (c.left == a.left || c.right == a.right)
                });
                check(!resurfaced, || {
                    format!(
                        "{} resurfaced after step {}",
                        a.candidate_id, a.heuristic_step
                    )
                })?;
                check(
                    !p.left.ids.contains(&a.left) && !p.right.ids.contains(&a.right),
                    || format!("{} still in a working set", a.candidate_id),
                )?;
            }
            let monotone = p
                .sizes
                .windows(2)
                .all(|w| w[1].left <= w[0].left && w[1].right <= w[0].right);
            check(monotone, || format!("{} sizes {:?}", p.pair, p.sizes))?;
        }
    }

    // (c) byte-identical reruns
    let run = || {
        let st = run_cascade(&cascade_fixture(), &log, &manual, &config);
        let res = resolve_mappings(&st, &log);
        (
            serde_json::to_string(&st).unwrap(),
            serde_json::to_string(&res).unwrap(),
        )
    };
    let first = run();
    check((0..3).all(|_| run() == first), || "reruns differ".into())?;

    // (d) components against a BFS oracle and against the fixture truth
    let res = resolve_mappings(last, &log);
    let nodes: Vec<String> = data
        .values()
        .flatten()
        .map(|i| format!("{}:{}", i.members[0].source, i.members[0].record_id))
        .collect();
    let key = |id: &str| {
        let m = &find(id).members[0];
        format!("{}:{}", m.source, m.record_id)
    };
    let edges: Vec<(String, String)> = last
        .candidates
        .iter()
        .filter(|c| c.state.is_accepted())
        .map(|c| (key(&c.left), key(&c.right)))
        .collect();
    let oracle = bfs_components(&nodes, &edges);
    let got = member_partition(&res.unified);
    check(got == oracle, || {
        "resolved components differ from BFS oracle".into()
    })?;
    let mut truth: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for n in &nodes {
        let entity = n.split(':').nth(1).unwrap().split('.').next().unwrap();
        truth
            .entry(entity.to_string())
            .or_default()
            .insert(n.clone());
    }
    check(got == truth.into_values().collect(), || {
        "resolved components differ from truth".into()
    })?;

    // normalize_name properties
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        ..Config::default()
    });
    let names = prop_oneof![
        "[A-Za-z0-9 ._-]{1,24}",
        "\\PC{1,16}",
        vec(
            prop_oneof!["[A-Z][a-z]{0,6}", "[A-Z]{2,4}-IX", "[ÄÖÜßÉa-z]{1,5}"],
            1..5
        )
        .prop_map(|w| w.join(" ")),
    ];
    runner
        .run(&names, |name| {
            for scheme in [NameScheme::Lowercase, NameScheme::StripNonword] {
                let once = normalize_name(&name, scheme).unwrap();
                if !once.is_empty() {
                    prop_assert_eq!(normalize_name(&once, scheme).unwrap(), once.clone());
                }
            }
            let t1 = normalize_name(&name, NameScheme::Truncate1Word).unwrap();
            let t2 = normalize_name(&name, NameScheme::Truncate2Words).unwrap();
            prop_assert!(t2.starts_with(&t1), "{:?} vs {:?}", t2, t1);
            let lower = normalize_name(&name, NameScheme::Lowercase).unwrap();
            prop_assert!(t2.split(' ').all(|w| lower.contains(w)));
            Ok(())
        })
        .map_err(|e| format!("normalize_name property: {e}"))?;

    Ok(format!(
        "{} review rounds, {} unified entities, 1000 normalize_name cases",
        states.len(),
        res.unified.len()
    ))
}

// ------------------------------------------------------------- criterion 6

fn participants() -> impl Strategy<Value = Vec<Participant>> {
    let one = (
        prop::option::weighted(0.85, 0u32..12),
        vec(0u8..6, 0..3),
        any::<bool>(),
    )
        .prop_map(|(asn, ips, flagged)| {
            let mut p = match asn {
                Some(a) => Participant::with_asn(a),
                None => Participant::with_asn(0),
            };
            p.asn = asn.map(Asn);
            p.ip_addresses = ips
                .into_iter()
                .map(|o| IpAddr::from([192, 0, 2, o]))
                .collect();
            p.excluded_from_links = flagged && asn.is_none();
            p
        });
    vec(one, 0..16)
}

fn asns(r: &SourceRecord) -> BTreeSet<Asn> {
    r.participants.iter().filter_map(|p| p.asn).collect()
}

fn criterion_6() -> Outcome {
    let config = Config {
        cases: 1000,
        ..Config::default()
    };

    TestRunner::new(config.clone())
        .run(&participants(), |ps| {
            let r = with_status(record(E, "e1", &["X"], "", "DE"), IxpStatus::Active);
            let r = SourceRecord {
                participants: ps,
                ..r
            };
            let (once, _) = sanitize_euroix_participants(&r).unwrap();
            let (twice, removed) = sanitize_euroix_participants(&once).unwrap();
            prop_assert_eq!(&twice, &once);
            prop_assert_eq!(removed, 0);
            prop_assert!(asns(&once).is_subset(&asns(&r)));
            prop_assert!(!asns(&once).contains(&Asn(0)));
            let nonzero = r
                .participants
                .iter()
                .filter(|p| p.asn != Some(Asn(0)))
                .count();
            prop_assert_eq!(once.participants.len(), nonzero);
            Ok(())
        })
        .map_err(|e| format!("ASN-0 removal: {e}"))?;

    TestRunner::new(config.clone())
        .run(&participants(), |ps| {
            let r = SourceRecord {
                participants: ps,
                ..record(C, "c1", &["X"], "", "DE")
            };
            let (once, _) = sanitize_pch_ports(&r).unwrap();
            let (twice, stats) = sanitize_pch_ports(&once).unwrap();
            prop_assert_eq!(&twice, &once);
            prop_assert_eq!((stats.collapsed, stats.flagged), (0, 0));
            prop_assert_eq!(asns(&once), asns(&r));
            let with_asn: Vec<Asn> = once.participants.iter().filter_map(|p| p.asn).collect();
            prop_assert_eq!(with_asn.len(), asns(&r).len());
            // every input address survives on the entry for its ASN
            for p in &r.participants {
                if let Some(a) = p.asn {
                    let merged = once.participants.iter().find(|q| q.asn == Some(a)).unwrap();
                    prop_assert!(p
                        .ip_addresses
                        .iter()
                        .all(|ip| merged.ip_addresses.contains(ip)));
                }
            }
            prop_assert!(once
                .participants
                .iter()
                .all(|p| p.asn.is_some() || p.excluded_from_links));
            Ok(())
        })
        .map_err(|e| format!("PCH port dedup: {e}"))?;

    let pdb_case = (
        vec(participants(), 1..4),
        prop::collection::btree_map(0u32..12, vec(0usize..5, 0..4), 0..8),
    );
    TestRunner::new(config)
        .run(&pdb_case, |(lists, net)| {
            let records: Vec<SourceRecord> = lists
                .into_iter()
                .enumerate()
                .map(|(i, ps)| SourceRecord {
                    participants: ps,
                    ..record(P, &format!("p{i}"), &["X"], "", "DE")
                })
                .collect();
            // record ids p0..p4, some of which do not exist
            let network: BTreeMap<Asn, Vec<String>> = net
                .into_iter()
                .map(|(a, ids)| (Asn(a), ids.into_iter().map(|i| format!("p{i}")).collect()))
                .collect();
            let once = sanitize_peeringdb_participants(&records, &network).unwrap();
            let twice = sanitize_peeringdb_participants(&once.records, &network).unwrap();
            prop_assert_eq!(&twice.records, &once.records);
            for (before, after) in records.iter().zip(&once.records) {
                let listed: BTreeSet<Asn> = network
                    .iter()
                    .filter(|(_, ids)| ids.contains(&before.record_id))
                    .map(|(a, _)| *a)
                    .collect();
                let allowed: BTreeSet<Asn> = asns(before).union(&listed).copied().collect();
                prop_assert_eq!(asns(after), allowed);
            }
            Ok(())
        })
        .map_err(|e| format!("PeeringDB union: {e}"))?;

    Ok("3 sanitizers x 1000 generated participant lists".into())
}

// ------------------------------------------------------------- criterion 7

/// All addresses of a prefix with at most 16 of them, by counting up from
/// the network address.
fn enumerate(net: &IpNet) -> Vec<IpAddr> {
    let (base, bits, width) = match net {
        IpNet::V4(n) => (u32::from(n.network()) as u128, n.prefix_len() as u32, 32),
        IpNet::V6(n) => (u128::from(n.network()), n.prefix_len() as u32, 128),
    };
    let count = 1u128 << (width - bits);
    assert!(count <= 16);
    (0..count)
        .map(|i| match net {
            IpNet::V4(_) => IpAddr::from(std::net::Ipv4Addr::from((base + i) as u32)),
            IpNet::V6(_) => IpAddr::from(std::net::Ipv6Addr::from(base + i)),
        })
        .collect()
}

fn oracle_peers(s: &BgpCollectorSnapshot) -> BTreeSet<Asn> {
    let inside: HashSet<IpAddr> = s.fabric_prefixes.iter().flat_map(enumerate).collect();
    s.sessions
        .iter()
        .filter(|x| x.state == SessionState::Established && inside.contains(&x.peer_ip))
        .filter_map(|x| x.asn)
        .collect()
}

fn v4_net(seed: u32) -> IpNet {
    IpNet::new(IpAddr::from(std::net::Ipv4Addr::from(seed & !0xf)), 28).unwrap()
}

fn v6_net(seed: u128) -> IpNet {
    IpNet::new(IpAddr::from(std::net::Ipv6Addr::from(seed & !0xf)), 124).unwrap()
}

fn criterion_7() -> Outcome {
    let mut fixtures = 0usize;
    let mut compared = |s: &BgpCollectorSnapshot| -> Result<(), String> {
        fixtures += 1;
        let got = extract_fabric_peers(s);
        let want = oracle_peers(s);
        check(got == want, || {
            format!("{}: {got:?} vs {want:?}", s.collector_id)
        })
    };

    // exhaustive: every address of the surrounding /26 (/122) against a
    // /28 (/124) at each of its four positions
    for family in 0..2 {
        for pos in 0..4u32 {
            let (net, around): (IpNet, Vec<IpAddr>) = if family == 0 {
                let base = u32::from(std::net::Ipv4Addr::new(185, 1, 2, 0));
                let net = v4_net(base + pos * 16);
                (
                    net,
                    (0..64)
                        .map(|i| IpAddr::from(std::net::Ipv4Addr::from(base + i)))
                        .collect(),
                )
            } else {
                let base = u128::from("2001:7f8:1::a500:0".parse::<std::net::Ipv6Addr>().unwrap());
                let net = v6_net(base + pos as u128 * 16);
                (
                    net,
                    (0..64)
                        .map(|i| IpAddr::from(std::net::Ipv6Addr::from(base + i)))
                        .collect(),
                )
            };
            let sessions = around
                .iter()
                .enumerate()
                .map(|(i, ip)| BgpSession {
                    peer_ip: *ip,
                    asn: Some(Asn(64_000 + i as u32)),
                    state: if i % 5 == 4 {
                        SessionState::Other
                    } else {
                        SessionState::Established
                    },
                })
                .collect();
            compared(&BgpCollectorSnapshot {
                collector_id: format!("exhaustive-{family}-{pos}"),
                airport_code: None,
                fabric_prefixes: vec![net],
                sessions,
            })?;
        }
    }

    // random fixtures with one or two fabric prefixes
    let session = (
        any::<bool>(),
        0u128..64,
        prop::option::weighted(0.9, 1u32..40),
        prop::bool::weighted(0.8),
    );
    let case = (any::<u32>(), any::<u128>(), 0u8..3, vec(session, 0..24));
    let mut runner = TestRunner::new(Config {
        cases: 2000,
        ..Config::default()
    });
    runner
        .run(&case, |(s4, s6, which, raw)| {
            let base4 = s4 & !0x3f;
            let base6 = s6 & !0x3f;
            let mut prefixes = Vec::new();
            if which != 1 {
                prefixes.push(v4_net(base4 + 16));
            }
            if which != 0 {
                prefixes.push(v6_net(base6 + 32));
            }
            let sessions = raw
                .into_iter()
                .map(|(v6, off, asn, up)| BgpSession {
                    peer_ip: if v6 {
                        IpAddr::from(std::net::Ipv6Addr::from(base6.wrapping_add(off)))
                    } else {
                        IpAddr::from(std::net::Ipv4Addr::from(base4.wrapping_add(off as u32)))
                    },
                    asn: asn.map(Asn),
                    state: if up {
                        SessionState::Established
                    } else {
                        SessionState::Other
                    },
                })
                .collect();
            let s = BgpCollectorSnapshot {
                collector_id: "random".into(),
                airport_code: None,
                fabric_prefixes: prefixes,
                sessions,
            };
            let (got, want) = (extract_fabric_peers(&s), oracle_peers(&s));
            prop_assert_eq!(got, want);
            Ok(())
        })
        .map_err(|e: proptest::test_runner::TestError<_>| format!("random fixture: {e}"))?;
    Ok(format!(
        "{} exhaustive and {} random fixtures agree",
        fixtures,
        runner.config().cases
    ))
}

// ------------------------------------------------------------- criterion 8

fn criterion_8() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        ..Config::default()
    });
    let strategy = (2usize..=3, vec(btree_set(0u16..40, 0..30), 3));
    runner
        .run(&strategy, |(k, sets)| {
            let refs: Vec<&BTreeSet<u16>> = sets.iter().take(k).collect();
            let (j, o) = (jaccard(&refs), overlap(&refs));
            prop_assert!(j <= o + 1e-15, "jaccard {} > overlap {}", j, o);
            prop_assert!((0.0..=1.0).contains(&j) && (0.0..=1.0).contains(&o));
            Ok::<(), TestCaseError>(())
        })
        .map_err(|e| format!("{e}"))?;
    Ok(format!(
        "{} random pairs and triples",
        runner.config().cases
    ))
}

// ------------------------------------------------------------- criterion 9

fn criterion_9() -> Outcome {
    use IxpStatus::*;
    let cells: [((IxpStatus, IxpStatus), usize); 8] = [
        ((Active, Active), 303),
        ((Defunct, Defunct), 9),
        ((UnderConstruction, UnderConstruction), 2),
        ((Active, Defunct), 10),
        ((Defunct, Active), 4),
        ((Active, UnderConstruction), 20),
        ((Planned, Active), 15),
        ((Active, Unknown), 16),
    ];
    let mut unified = Vec::new();
    for ((se, sc), n) in cells {
        for i in 0..n {
            let id = format!("{}-{}-{i}", se.as_str(), sc.as_str());
            let e = with_status(record(E, &id, &["X"], "", "DE"), se);
            let c = with_status(record(C, &id, &["X"], "", "DE"), sc);
            unified.push(CanonicalIxp::from_records([&e, &c]));
        }
    }
    // IXPs without both sources are not pairs
    unified.push(CanonicalIxp::from_record(&record(
        E,
        "solo",
        &["Y"],
        "",
        "DE",
    )));
    let pairs = status_pairs(&unified, E, C);
    let oracle_consistent = pairs.iter().filter(|(a, b)| a == b).count();
    check(pairs.len() == 379 && oracle_consistent == 314, || {
        format!("{} pairs, {} consistent", pairs.len(), oracle_consistent)
    })?;
    let s = status_consistency(&pairs).ok_or("no pairs")?;
    check(s.pairs == 379 && s.consistent == oracle_consistent, || {
        format!("{s:?}")
    })?;
    check(s.fraction == 314.0 / 379.0, || {
        format!("fraction {}", s.fraction)
    })?;
    check(
        near(pct(s.fraction), 82.8, 0.05) && format_pct(s.fraction) == "82.8%",
        || format!("{:.3}%", pct(s.fraction)),
    )?;
    check(
        s.only_right_defunct == 10 && s.only_left_defunct == 4,
        || {
            format!(
                "defunct cells {} / {}",
                s.only_right_defunct, s.only_left_defunct
            )
        },
    )?;
    for ((a, b), n) in cells {
        check(s.cell(a, b) == n, || format!("cell {a:?}/{b:?}"))?;
    }
    check(
        s.contingency.iter().map(|c| c.count).sum::<usize>() == 379,
        || "table total".into(),
    )?;
    Ok(format!(
        "{}/{} = {:.3}%, PCH-only defunct {}, Euro-IX-only defunct {}",
        s.consistent,
        s.pairs,
        pct(s.fraction),
        s.only_right_defunct,
        s.only_left_defunct
    ))
}

fn main() {
    let criteria: [(u8, &str, fn() -> Outcome); 9] = [
        (1, "index arithmetic", criterion_1),
        (2, "union growth", criterion_2),
        (3, "top-ASN ranking", criterion_3),
        (4, "BGP completeness", criterion_4),
        (5, "cascade properties", criterion_5),
        (6, "sanitizer contracts", criterion_6),
        (7, "fabric-peer extraction", criterion_7),
        (8, "jaccard <= overlap", criterion_8),
        (9, "status consistency", criterion_9),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
