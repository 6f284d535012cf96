//! Embedded country to region table.
//!
//! Regions follow the seven-way partition used by the geographic tables:
//! Russia sits in Europe, Turkey and the Gulf states in the Middle East,
//! Oceania under Australia, and Central America plus the Caribbean under
//! North America. A handful of valid codes (Antarctica and uninhabited
//! territories) have no region.

use super::Continent;

/// Country code used when the input cannot be mapped to a known code.
pub const UNKNOWN_COUNTRY: &str = "ZZ";

use Continent::*;

const TABLE: &[(&str, Option<Continent>)] = &[
    // Africa
    ("AO", Some(Africa)),
    ("BF", Some(Africa)),
    ("BI", Some(Africa)),
    ("BJ", Some(Africa)),
    ("BW", Some(Africa)),
    ("CD", Some(Africa)),
    ("CF", Some(Africa)),
    ("CG", Some(Africa)),
    ("CI", Some(Africa)),
    ("CM", Some(Africa)),
    ("CV", Some(Africa)),
    ("DJ", Some(Africa)),
    ("DZ", Some(Africa)),
    ("EG", Some(Africa)),
    ("EH", Some(Africa)),
    ("ER", Some(Africa)),
    ("ET", Some(Africa)),
    ("GA", Some(Africa)),
    ("GH", Some(Africa)),
    ("GM", Some(Africa)),
    ("GN", Some(Africa)),
    ("GQ", Some(Africa)),
    ("GW", Some(Africa)),
    ("KE", Some(Africa)),
    ("KM", Some(Africa)),
    ("LR", Some(Africa)),
    ("LS", Some(Africa)),
    ("LY", Some(Africa)),
    ("MA", Some(Africa)),
    ("MG", Some(Africa)),
    ("ML", Some(Africa)),
    ("MR", Some(Africa)),
    ("MU", Some(Africa)),
    ("MW", Some(Africa)),
    ("MZ", Some(Africa)),
    ("NA", Some(Africa)),
    ("NE", Some(Africa)),
    ("NG", Some(Africa)),
    ("RE", Some(Africa)),
    ("RW", Some(Africa)),
    ("SC", Some(Africa)),
    ("SD", Some(Africa)),
    ("SH", Some(Africa)),
    ("SL", Some(Africa)),
    ("SN", Some(Africa)),
    ("SO", Some(Africa)),
    ("SS", Some(Africa)),
    ("ST", Some(Africa)),
    ("SZ", Some(Africa)),
    ("TD", Some(Africa)),
    ("TG", Some(Africa)),
    ("TN", Some(Africa)),
    ("TZ", Some(Africa)),
    ("UG", Some(Africa)),
    ("YT", Some(Africa)),
    ("ZA", Some(Africa)),
    ("ZM", Some(Africa)),
    ("ZW", Some(Africa)),
    // Asia Pacific
    ("AF", Some(AsiaPacific)),
    ("BD", Some(AsiaPacific)),
    ("BN", Some(AsiaPacific)),
    ("BT", Some(AsiaPacific)),
    ("CN", Some(AsiaPacific)),
    ("HK", Some(AsiaPacific)),
    ("ID", Some(AsiaPacific)),
    ("IN", Some(AsiaPacific)),
    ("IO", Some(AsiaPacific)),
    ("JP", Some(AsiaPacific)),
    ("KG", Some(AsiaPacific)),
    ("KH", Some(AsiaPacific)),
    ("KP", Some(AsiaPacific)),
    ("KR", Some(AsiaPacific)),
    ("KZ", Some(AsiaPacific)),
    ("LA", Some(AsiaPacific)),
    ("LK", Some(AsiaPacific)),
    ("MM", Some(AsiaPacific)),
    ("MN", Some(AsiaPacific)),
    ("MO", Some(AsiaPacific)),
    ("MV", Some(AsiaPacific)),
    ("MY", Some(AsiaPacific)),
    ("NP", Some(AsiaPacific)),
    ("PH", Some(AsiaPacific)),
    ("PK", Some(AsiaPacific)),
    ("SG", Some(AsiaPacific)),
    ("TH", Some(AsiaPacific)),
    ("TJ", Some(AsiaPacific)),
    ("TL", Some(AsiaPacific)),
    ("TM", Some(AsiaPacific)),
    ("TW", Some(AsiaPacific)),
    ("UZ", Some(AsiaPacific)),
    ("VN", Some(AsiaPacific)),
    // Australia and Oceania
    ("AS", Some(Australia)),
    ("AU", Some(Australia)),
    ("CC", Some(Australia)),
    ("CK", Some(Australia)),
    ("CX", Some(Australia)),
    ("FJ", Some(Australia)),
    ("FM", Some(Australia)),
    ("GU", Some(Australia)),
    ("KI", Some(Australia)),
    ("MH", Some(Australia)),
    ("MP", Some(Australia)),
    ("NC", Some(Australia)),
    ("NF", Some(Australia)),
    ("NR", Some(Australia)),
    ("NU", Some(Australia)),
    ("NZ", Some(Australia)),
    ("PF", Some(Australia)),
    ("PG", Some(Australia)),
    ("PN", Some(Australia)),
    ("PW", Some(Australia)),
    ("SB", Some(Australia)),
    ("TK", Some(Australia)),
    ("TO", Some(Australia)),
    ("TV", Some(Australia)),
    ("VU", Some(Australia)),
    ("WF", Some(Australia)),
    ("WS", Some(Australia)),
    // Europe
    ("AD", Some(Europe)),
    ("AL", Some(Europe)),
    ("AM", Some(Europe)),
    ("AT", Some(Europe)),
    ("AX", Some(Europe)),
    ("AZ", Some(Europe)),
    ("BA", Some(Europe)),
    ("BE", Some(Europe)),
    ("BG", Some(Europe)),
    ("BY", Some(Europe)),
    ("CH", Some(Europe)),
    ("CY", Some(Europe)),
    ("CZ", Some(Europe)),
    ("DE", Some(Europe)),
    ("DK", Some(Europe)),
    ("EE", Some(Europe)),
    ("ES", Some(Europe)),
    ("FI", Some(Europe)),
    ("FO", Some(Europe)),
    ("FR", Some(Europe)),
    ("GB", Some(Europe)),
    ("GE", Some(Europe)),
    ("GG", Some(Europe)),
    ("GI", Some(Europe)),
    ("GR", Some(Europe)),
    ("HR", Some(Europe)),
    ("HU", Some(Europe)),
    ("IE", Some(Europe)),
    ("IM", Some(Europe)),
    ("IS", Some(Europe)),
    ("IT", Some(Europe)),
    ("JE", Some(Europe)),
    ("LI", Some(Europe)),
    ("LT", Some(Europe)),
    ("LU", Some(Europe)),
    ("LV", Some(Europe)),
    ("MC", Some(Europe)),
    ("MD", Some(Europe)),
    ("ME", Some(Europe)),
    ("MK", Some(Europe)),
    ("MT", Some(Europe)),
    ("NL", Some(Europe)),
    ("NO", Some(Europe)),
    ("PL", Some(Europe)),
    ("PT", Some(Europe)),
    ("RO", Some(Europe)),
    ("RS", Some(Europe)),
    ("RU", Some(Europe)),
    ("SE", Some(Europe)),
    ("SI", Some(Europe)),
    ("SJ", Some(Europe)),
    ("SK", Some(Europe)),
    ("SM", Some(Europe)),
    ("UA", Some(Europe)),
    ("VA", Some(Europe)),
    ("XK", Some(Europe)),
    // Middle East
    ("AE", Some(MiddleEast)),
    ("BH", Some(MiddleEast)),
    ("IL", Some(MiddleEast)),
    ("IQ", Some(MiddleEast)),
    ("IR", Some(MiddleEast)),
    ("JO", Some(MiddleEast)),
    ("KW", Some(MiddleEast)),
    ("LB", Some(MiddleEast)),
    ("OM", Some(MiddleEast)),
    ("PS", Some(MiddleEast)),
    ("QA", Some(MiddleEast)),
    ("SA", Some(MiddleEast)),
    ("SY", Some(MiddleEast)),
    ("TR", Some(MiddleEast)),
    ("YE", Some(MiddleEast)),
    // North America, Central America and the Caribbean
    ("AG", Some(NorthAmerica)),
    ("AI", Some(NorthAmerica)),
    ("AW", Some(NorthAmerica)),
    ("BB", Some(NorthAmerica)),
    ("BL", Some(NorthAmerica)),
    ("BM", Some(NorthAmerica)),
    ("BQ", Some(NorthAmerica)),
    ("BS", Some(NorthAmerica)),
    ("BZ", Some(NorthAmerica)),
    ("CA", Some(NorthAmerica)),
    ("CR", Some(NorthAmerica)),
    ("CU", Some(NorthAmerica)),
    ("CW", Some(NorthAmerica)),
    ("DM", Some(NorthAmerica)),
    ("DO", Some(NorthAmerica)),
    ("GD", Some(NorthAmerica)),
    ("GL", Some(NorthAmerica)),
    ("GP", Some(NorthAmerica)),
    ("GT", Some(NorthAmerica)),
    ("HN", Some(NorthAmerica)),
    ("HT", Some(NorthAmerica)),
    ("JM", Some(NorthAmerica)),
    ("KN", Some(NorthAmerica)),
    ("KY", Some(NorthAmerica)),
    ("LC", Some(NorthAmerica)),
    ("MF", Some(NorthAmerica)),
    ("MQ", Some(NorthAmerica)),
    ("MS", Some(NorthAmerica)),
    ("MX", Some(NorthAmerica)),
    ("NI", Some(NorthAmerica)),
    ("PA", Some(NorthAmerica)),
    ("PM", Some(NorthAmerica)),
    ("PR", Some(NorthAmerica)),
    ("SV", Some(NorthAmerica)),
    ("SX", Some(NorthAmerica)),
    ("TC", Some(NorthAmerica)),
    ("TT", Some(NorthAmerica)),
    ("UM", Some(NorthAmerica)),
    ("US", Some(NorthAmerica)),
    ("VC", Some(NorthAmerica)),
    ("VG", Some(NorthAmerica)),
    ("VI", Some(NorthAmerica)),
    // South America
    ("AR", Some(SouthAmerica)),
    ("BO", Some(SouthAmerica)),
    ("BR", Some(SouthAmerica)),
    ("CL", Some(SouthAmerica)),
    ("CO", Some(SouthAmerica)),
    ("EC", Some(SouthAmerica)),
    ("FK", Some(SouthAmerica)),
    ("GF", Some(SouthAmerica)),
    ("GS", Some(SouthAmerica)),
    ("GY", Some(SouthAmerica)),
    ("PE", Some(SouthAmerica)),
    ("PY", Some(SouthAmerica)),
    ("SR", Some(SouthAmerica)),
    ("UY", Some(SouthAmerica)),
    ("VE", Some(SouthAmerica)),
    // no region
    ("AQ", None),
    ("BV", None),
    ("HM", None),
    ("TF", None),
];

fn lookup(code: &str) -> Option<Option<Continent>> {
    TABLE
        .iter()
        .find(|(c, _)| *c == code)
        .map(|(_, continent)| *continent)
}

/// Normalizes a country string to an upper-case alpha-2 code.
///
/// Returns `None` when the input is not a known code. "UK" is accepted as
/// an alias for "GB" since several providers use it.
pub fn normalize_country(raw: &str) -> Option<String> {
    let code = raw.trim().to_ascii_uppercase();
    let code = if code == "UK" { "GB".to_string() } else { code };
    if code == UNKNOWN_COUNTRY {
        return Some(code);
    }
    lookup(&code).map(|_| code)
}

/// Region of a normalized country code; `None` for "ZZ" and region-less codes.
pub fn continent_of(code: &str) -> Option<Continent> {
    lookup(code).flatten()
}

pub fn is_known_country(code: &str) -> bool {
    lookup(code).is_some()
}
