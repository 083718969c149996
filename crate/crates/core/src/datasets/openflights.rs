//! Airport/route ingestion in the public OpenFlights column layout.
//!
//! `airports.dat`: id, name, city, country, IATA, ICAO, latitude, longitude,
//! altitude, UTC offset, DST, tz database name, and optionally type and source.
//! `routes.dat`: airline, airline id, source code, source id, destination code,
//! destination id, codeshare, stops, equipment. Missing values are `\N`.
//!
//! Routes are matched to airports by numeric id only. Every accepted route row
//! adds 1 to the weight of its undirected airport pair, so codeshares and
//! duplicates accumulate.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, NodeMetadata};

const NULL: &str = "\\N";
const AIRPORT_MIN_FIELDS: usize = 12;
const ROUTE_FIELDS: usize = 9;

static COUNTRY_TABLE: &str = include_str!("../../data/country_continents.csv");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AirportRecord {
    pub id: String,
    pub name: String,
    pub city: String,
    pub country: String,
    pub iata: Option<String>,
    pub icao: Option<String>,
    pub latitude: f64,
    pub longitude: f64,
    pub tz_database: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteRecord {
    pub source_airport_id: String,
    pub destination_airport_id: String,
    pub airline: Option<String>,
    pub codeshare: bool,
}

/// A row that could not be used, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedRow {
    pub source: String,
    pub line: usize,
    pub reason: String,
}

/// Counts gathered while building the route graph.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub airports_read: usize,
    pub duplicate_airport_ids: usize,
    pub airports_without_routes: usize,
    pub airports_kept: usize,
    pub routes_read: usize,
    pub routes_accepted: usize,
    pub routes_unknown_airport: usize,
    pub routes_self_loop: usize,
    /// Airports with at least one route back to themselves.
    pub self_loop_airports: usize,
    pub distinct_directed_pairs: usize,
    pub undirected_edges: usize,
    pub adjacency_nonzeros: usize,
    pub malformed_rows: Vec<SkippedRow>,
}

fn optional(field: &str) -> Option<String> {
    let field = field.trim();
    (!field.is_empty() && field != NULL).then(|| field.to_string())
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input)
}

/// Parses airport rows; malformed rows are appended to `skipped`.
pub fn parse_airports<R: Read>(
    input: R,
    source: &str,
    skipped: &mut Vec<SkippedRow>,
) -> Result<Vec<AirportRecord>> {
    let mut airports = Vec::new();
    for (index, row) in reader(input).records().enumerate() {
        let fallback_line = index + 1;
        let row = match row {
            Ok(row) => row,
            Err(err) => {
                let line = err.position().map_or(fallback_line, |p| p.line() as usize);
                skip(skipped, source, line, err.to_string());
                continue;
            }
        };
        let line = row.position().map_or(fallback_line, |p| p.line() as usize);
        match airport_from_row(&row) {
            Ok(airport) => airports.push(airport),
            Err(reason) => skip(skipped, source, line, reason),
        }
    }
    Ok(airports)
}

fn airport_from_row(row: &csv::StringRecord) -> std::result::Result<AirportRecord, String> {
    if row.len() < AIRPORT_MIN_FIELDS {
        return Err(format!(
            "expected at least {AIRPORT_MIN_FIELDS} fields, found {}",
            row.len()
        ));
    }
    let id = optional(&row[0]).ok_or("missing airport id")?;
    let coordinate = |index: usize, name: &str, bound: f64| {
        row[index]
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && v.abs() <= bound)
            .ok_or_else(|| format!("invalid {name} `{}`", &row[index]))
    };
    Ok(AirportRecord {
        id,
        name: row[1].to_string(),
        city: row[2].to_string(),
        country: row[3].to_string(),
        iata: optional(&row[4]),
        icao: optional(&row[5]),
        latitude: coordinate(6, "latitude", 90.0)?,
        longitude: coordinate(7, "longitude", 180.0)?,
        tz_database: optional(&row[11]),
    })
}

/// Parses route rows; malformed rows are appended to `skipped`.
pub fn parse_routes<R: Read>(
    input: R,
    source: &str,
    skipped: &mut Vec<SkippedRow>,
) -> Result<Vec<RouteRecord>> {
    let mut routes = Vec::new();
    for (index, row) in reader(input).records().enumerate() {
        let fallback_line = index + 1;
        let row = match row {
            Ok(row) => row,
            Err(err) => {
                let line = err.position().map_or(fallback_line, |p| p.line() as usize);
                skip(skipped, source, line, err.to_string());
                continue;
            }
        };
        let line = row.position().map_or(fallback_line, |p| p.line() as usize);
        if row.len() != ROUTE_FIELDS {
            let reason = format!("expected {ROUTE_FIELDS} fields, found {}", row.len());
            skip(skipped, source, line, reason);
            continue;
        }
        let (src, dst) = (row[3].trim(), row[5].trim());
        if src.is_empty() || dst.is_empty() {
            skip(skipped, source, line, "empty airport id".into());
            continue;
        }
        routes.push(RouteRecord {
            source_airport_id: src.to_string(),
            destination_airport_id: dst.to_string(),
            airline: optional(&row[0]),
            codeshare: row[6].trim() == "Y",
        });
    }
    Ok(routes)
}

fn skip(skipped: &mut Vec<SkippedRow>, source: &str, line: usize, reason: String) {
    log::warn!("{source}:{line}: skipped row: {reason}");
    skipped.push(SkippedRow {
        source: source.to_string(),
        line,
        reason,
    });
}

/// Continent for an airport from its tz database name, falling back to the
/// bundled country table when the zone is shared across continents
/// (`America/`, `Atlantic/`, `Indian/`) or missing.
pub fn continent_for(tz_database: Option<&str>, country: &str) -> Option<&'static str> {
    let by_zone = tz_database.and_then(|tz| match tz.split('/').next() {
        Some("Europe") | Some("Arctic") => Some("Europe"),
        Some("Africa") => Some("Africa"),
        Some("Asia") => Some("Asia"),
        Some("Australia") | Some("Pacific") => Some("Oceania"),
        Some("Antarctica") => Some("Antarctica"),
        _ => None,
    });
    by_zone.or_else(|| country_continents().get(country.trim()).copied())
}

fn country_continents() -> &'static HashMap<&'static str, &'static str> {
    static TABLE: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    TABLE.get_or_init(|| {
        COUNTRY_TABLE
            .lines()
            .skip(1)
            .filter_map(|line| line.rsplit_once(','))
            .collect()
    })
}

/// Builds the undirected route-count graph.
///
/// Node order follows the airport records; airports without accepted routes
/// are dropped. The first record wins when an id repeats.
pub fn ingest_routes(
    airports: &[AirportRecord],
    routes: &[RouteRecord],
) -> Result<(Graph, IngestReport)> {
    let mut report = IngestReport {
        airports_read: airports.len(),
        routes_read: routes.len(),
        ..IngestReport::default()
    };
    let mut by_id: HashMap<&str, usize> = HashMap::with_capacity(airports.len());
    for (index, airport) in airports.iter().enumerate() {
        match by_id.entry(airport.id.as_str()) {
            Entry::Occupied(_) => report.duplicate_airport_ids += 1,
            Entry::Vacant(slot) => {
                slot.insert(index);
            }
        }
    }

    let mut pair_counts: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut directed: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut looped: BTreeSet<usize> = BTreeSet::new();
    for route in routes {
        let endpoints = (
            by_id.get(route.source_airport_id.as_str()),
            by_id.get(route.destination_airport_id.as_str()),
        );
        let (Some(&a), Some(&b)) = endpoints else {
            report.routes_unknown_airport += 1;
            continue;
        };
        if a == b {
            report.routes_self_loop += 1;
            looped.insert(a);
            continue;
        }
        report.routes_accepted += 1;
        directed.insert((a, b));
        *pair_counts.entry((a.min(b), a.max(b))).or_insert(0.0) += 1.0;
    }
    if report.routes_unknown_airport > 0 {
        log::warn!(
            "skipped {} routes referencing unknown airports",
            report.routes_unknown_airport
        );
    }
    if report.routes_self_loop > 0 {
        log::warn!(
            "skipped {} routes starting and ending at the same airport",
            report.routes_self_loop
        );
    }

    let mut used = vec![false; airports.len()];
    for &(a, b) in pair_counts.keys() {
        used[a] = true;
        used[b] = true;
    }
    let mut compact = vec![usize::MAX; airports.len()];
    let mut kept = Vec::new();
    for (index, _) in used.iter().enumerate().filter(|(_, &u)| u) {
        compact[index] = kept.len();
        kept.push(index);
    }
    report.airports_kept = kept.len();
    report.airports_without_routes = airports.len() - report.duplicate_airport_ids - kept.len();
    report.self_loop_airports = looped.len();
    report.distinct_directed_pairs = directed.len();
    report.undirected_edges = pair_counts.len();
    report.adjacency_nonzeros = 2 * pair_counts.len();
    if kept.is_empty() {
        return Err(Error::InvalidDataset(
            "no route connects two known airports".into(),
        ));
    }

    let metadata = NodeMetadata {
        labels: Some(kept.iter().map(|&i| airport_label(&airports[i])).collect()),
        positions: Some(
            kept.iter()
                .map(|&i| vec![airports[i].longitude, airports[i].latitude])
                .collect(),
        ),
        attributes: Some(
            kept.iter()
                .map(|&i| airport_attributes(&airports[i]))
                .collect(),
        ),
    };
    let edges = pair_counts
        .into_iter()
        .map(|((a, b), w)| (compact[a], compact[b], w));
    let graph = build_graph(edges, kept.len(), metadata)?;
    log::info!(
        "ingested {} airports, {} routes, {} undirected edges",
        report.airports_kept,
        report.routes_accepted,
        report.undirected_edges
    );
    Ok((graph, report))
}

fn airport_label(airport: &AirportRecord) -> String {
    airport
        .iata
        .clone()
        .or_else(|| airport.icao.clone())
        .unwrap_or_else(|| airport.id.clone())
}

fn airport_attributes(airport: &AirportRecord) -> BTreeMap<String, String> {
    let mut attrs = BTreeMap::new();
    let continent = continent_for(airport.tz_database.as_deref(), &airport.country);
    attrs.insert("continent".into(), continent.unwrap_or("Unknown").into());
    attrs.insert("country".into(), airport.country.clone());
    attrs.insert("city".into(), airport.city.clone());
    attrs.insert("name".into(), airport.name.clone());
    attrs.insert("id".into(), airport.id.clone());
    for (key, value) in [
        ("iata", &airport.iata),
        ("icao", &airport.icao),
        ("tz", &airport.tz_database),
    ] {
        if let Some(value) = value {
            attrs.insert(key.into(), value.clone());
        }
    }
    attrs
}

/// Reads `airports_path` and `routes_path` and builds the route graph.
pub fn load_openflights(
    airports_path: impl AsRef<Path>,
    routes_path: impl AsRef<Path>,
) -> Result<(Graph, IngestReport)> {
    let (airports_path, routes_path) = (airports_path.as_ref(), routes_path.as_ref());
    let open = |path: &Path| File::open(path).map_err(|e| Error::io(path, e));
    let mut skipped = Vec::new();
    let airports = parse_airports(
        open(airports_path)?,
        &airports_path.display().to_string(),
        &mut skipped,
    )?;
    let routes = parse_routes(
        open(routes_path)?,
        &routes_path.display().to_string(),
        &mut skipped,
    )?;
    let (graph, mut report) = ingest_routes(&airports, &routes)?;
    report.malformed_rows = skipped;
    Ok((graph, report))
}

/// Loads `airports.dat` and `routes.dat` from one directory.
pub fn load_openflights_dir(dir: impl AsRef<Path>) -> Result<(Graph, IngestReport)> {
    let dir = dir.as_ref();
    load_openflights(dir.join("airports.dat"), dir.join("routes.dat"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const AIRPORTS: &str = "\
1,\"Alpha, Intl\",A,France,\"AAA\",\"LFAA\",48.0,2.0,100,1,\"E\",\"Europe/Paris\"
2,\"Beta\",B,Senegal,\"BBB\",\\N,14.0,-17.0,50,0,\"N\",\"Africa/Dakar\"
3,\"Gamma\",C,Nowhere,\\N,\\N,0.0,0.0,0,0,\"N\",\\N
";

    fn parsed() -> (Vec<AirportRecord>, Vec<SkippedRow>) {
        let mut skipped = Vec::new();
        let airports = parse_airports(AIRPORTS.as_bytes(), "airports", &mut skipped).unwrap();
        (airports, skipped)
    }

    fn route(a: &str, b: &str) -> RouteRecord {
        RouteRecord {
            source_airport_id: a.into(),
            destination_airport_id: b.into(),
            airline: None,
            codeshare: false,
        }
    }

    #[test]
    fn parses_quoted_fields_and_nulls() {
        let (airports, skipped) = parsed();
        assert!(skipped.is_empty());
        assert_eq!(airports[0].name, "Alpha, Intl");
        assert_eq!(airports[1].icao, None);
        assert_eq!(airports[2].tz_database, None);
    }

    #[test]
    fn both_directions_form_one_edge() {
        let (airports, _) = parsed();
        let (g, report) = ingest_routes(&airports, &[route("1", "2"), route("2", "1")]).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges()[0].weight, 2.0);
        assert_eq!(report.airports_without_routes, 1);
        assert_eq!(report.distinct_directed_pairs, 2);
    }

    #[test]
    fn unknown_and_self_loop_routes_are_counted() {
        let (airports, _) = parsed();
        let routes = [
            route("1", "2"),
            route("1", "9"),
            route("\\N", "1"),
            route("2", "2"),
        ];
        let (g, report) = ingest_routes(&airports, &routes).unwrap();
        assert_eq!(report.routes_accepted, 1);
        assert_eq!(report.routes_unknown_airport, 2);
        assert_eq!(report.routes_self_loop, 1);
        assert_eq!(report.self_loop_airports, 1);
        assert_eq!(g.total_weight(), 2.0);
    }

    #[test]
    fn malformed_rows_carry_line_numbers() {
        let data = "1,x\nBA,1355,SIN,3316,LHR,507,,0,744\n";
        let mut skipped = Vec::new();
        let routes = parse_routes(data.as_bytes(), "routes", &mut skipped).unwrap();
        assert_eq!(routes.len(), 1);
        assert_eq!(skipped.len(), 1);
        assert_eq!(skipped[0].line, 1);
    }

    #[test]
    fn continent_resolution() {
        assert_eq!(
            continent_for(Some("Europe/Paris"), "France"),
            Some("Europe")
        );
        assert_eq!(
            continent_for(Some("America/Lima"), "Peru"),
            Some("South America")
        );
        assert_eq!(
            continent_for(Some("America/Chicago"), "United States"),
            Some("North America")
        );
        assert_eq!(
            continent_for(Some("Atlantic/Azores"), "Portugal"),
            Some("Europe")
        );
        assert_eq!(
            continent_for(Some("Indian/Mauritius"), "Mauritius"),
            Some("Africa")
        );
        assert_eq!(continent_for(None, "Cote d'Ivoire"), Some("Africa"));
        assert_eq!(continent_for(None, "Atlantis"), None);
    }
}
