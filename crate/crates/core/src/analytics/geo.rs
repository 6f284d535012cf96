use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{Continent, SourceId, SourceRecord};

pub type Counts = BTreeMap<SourceId, usize>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityRow {
    pub city: String,
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryRow {
    pub country: String,
    pub counts: Counts,
    pub cities: Vec<CityRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinentRow {
    /// `None` for records whose country maps to no region.
    pub continent: Option<Continent>,
    pub counts: Counts,
    pub countries: Vec<CountryRow>,
}

impl ContinentRow {
    pub fn label(&self) -> &'static str {
        self.continent.map_or("Unknown", |c| c.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoTable {
    pub continents: Vec<ContinentRow>,
    pub world: Counts,
}

impl GeoTable {
    /// Per-source sums over continents equal the world totals.
    pub fn is_partition(&self) -> bool {
        let mut sum = Counts::new();
        for c in &self.continents {
            for (s, n) in &c.counts {
                *sum.entry(*s).or_default() += n;
            }
        }
        sum == self.world
    }
}

/// Raw record counts per region, country and city.
///
/// Each record counts once, at its first location, regardless of status.
/// City rows appear only where a city reaches `city_threshold` records over
/// all sources.
pub fn geo_table(records: &[SourceRecord], city_threshold: usize) -> GeoTable {
    type Key = (Option<Continent>, String, String);
    let mut cells: BTreeMap<Key, Counts> = BTreeMap::new();
    let mut world = Counts::new();
    for r in records {
        let Some(loc) = r.locations.first() else {
            continue;
        };
        let key = (
            loc.continent,
            loc.country.clone(),
            loc.city.trim().to_string(),
        );
        *cells.entry(key).or_default().entry(r.source).or_default() += 1;
        *world.entry(r.source).or_default() += 1;
    }

    let mut continents: Vec<ContinentRow> = Vec::new();
    for ((continent, country, city), counts) in cells {
        if continents.last().is_none_or(|c| c.continent != continent) {
            continents.push(ContinentRow {
                continent,
                counts: Counts::new(),
                countries: Vec::new(),
            });
        }
        let crow = continents.last_mut().unwrap();
        add(&mut crow.counts, &counts);
        if crow.countries.last().is_none_or(|c| c.country != country) {
            crow.countries.push(CountryRow {
                country,
                counts: Counts::new(),
                cities: Vec::new(),
            });
        }
        let row = crow.countries.last_mut().unwrap();
        add(&mut row.counts, &counts);
        if !city.is_empty() && counts.values().sum::<usize>() >= city_threshold {
            row.cities.push(CityRow { city, counts });
        }
    }
    // known regions first in display order, unknown last
    continents.sort_by_key(|c| {
        c.continent.map_or(usize::MAX, |k| {
            Continent::ALL.iter().position(|x| *x == k).unwrap()
        })
    });
    GeoTable { continents, world }
}

fn add(into: &mut Counts, from: &Counts) {
    for (s, n) in from {
        *into.entry(*s).or_default() += n;
    }
}
