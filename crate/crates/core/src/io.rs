//! Input files: the county table with its edge lists, plus the
//! optional county geometry passed through to map clients.
//!
//! Tabular inputs are UTF-8, comma-delimited CSV with a mandatory header row.
//!
//! | file        | header                                                                              |
//! |-------------|-------------------------------------------------------------------------------------|
//! | counties    | `fips,name,pop_0_17,pop_18_64,pop_65plus,density_class,total_beds,lat,lon,has_airport` |
//! | adjacency   | `fips_a,fips_b`                                                                     |
//! | air routes  | `fips_a,fips_b`                                                                     |
//!
//! Loaders report every problem in a file at once, one diagnostic per defect,
//! each tagged with its line number.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::disease::PerGroup;
use crate::error::{Error, Result, RowDiagnostic};
use crate::spatial::{build_network, County, DensityClass, Edge, SpreadNetwork, SpreadSettings};

pub const COUNTY_HEADER: [&str; 10] = [
    "fips",
    "name",
    "pop_0_17",
    "pop_18_64",
    "pop_65plus",
    "density_class",
    "total_beds",
    "lat",
    "lon",
    "has_airport",
];

pub const EDGE_HEADER: [&str; 2] = ["fips_a", "fips_b"];

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        context: format!("opening {}", path.display()),
        source,
    })
}

fn check_header(
    reader: &mut csv::Reader<impl Read>,
    expected: &[&str],
    diagnostics: &mut Vec<RowDiagnostic>,
) -> Result<bool> {
    let header = reader.headers()?;
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        diagnostics.push(RowDiagnostic {
            line: 1,
            message: format!(
                "header must be `{}`, got `{}`",
                expected.join(","),
                got.join(",")
            ),
        });
        return Ok(false);
    }
    Ok(true)
}

fn fail(label: &Path, diagnostics: Vec<RowDiagnostic>) -> Error {
    Error::Input {
        path: label.to_path_buf(),
        diagnostics,
    }
}

pub fn load_counties(path: impl AsRef<Path>) -> Result<Vec<County>> {
    let path = path.as_ref();
    read_counties(open(path)?, path)
}

/// Parses a counties CSV. `label` names the source in diagnostics.
pub fn read_counties(input: impl Read, label: &Path) -> Result<Vec<County>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let mut diags = Vec::new();
    if !check_header(&mut reader, &COUNTY_HEADER, &mut diags)? {
        return Err(fail(label, diags));
    }

    let mut counties = Vec::new();
    let mut first_seen: HashMap<String, u64> = HashMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let mut problem = |message: String| diags.push(RowDiagnostic { line, message });
        if record.len() != COUNTY_HEADER.len() {
            problem(format!(
                "expected {} fields, found {}",
                COUNTY_HEADER.len(),
                record.len()
            ));
            continue;
        }
        let field = |i: usize| record[i].trim();

        let fips = field(0).to_string();
        if fips.is_empty() {
            problem("fips is empty".into());
        } else if let Some(prev) = first_seen.get(&fips) {
            problem(format!(
                "duplicate fips {fips} (first defined on line {prev})"
            ));
        } else {
            first_seen.insert(fips.clone(), line);
        }

        let mut population = PerGroup::<u64>::default();
        for (slot, col) in population.0.iter_mut().zip(2..5) {
            match field(col).parse::<u64>() {
                Ok(v) => *slot = v,
                Err(_) => problem(format!(
                    "{} must be a non-negative integer, got {:?}",
                    COUNTY_HEADER[col],
                    field(col)
                )),
            }
        }
        let pops_parsed = (2..5).all(|c| field(c).parse::<u64>().is_ok());
        if pops_parsed && population.total() == 0 {
            problem("population must be positive".into());
        }

        let density_class = field(5).parse::<DensityClass>().map_err(&mut problem).ok();
        let total_beds = field(6)
            .parse::<u64>()
            .map_err(|_| {
                problem(format!(
                    "total_beds must be a non-negative integer, got {:?}",
                    field(6)
                ))
            })
            .ok();
        let mut coord =
            |col: usize, range: std::ops::RangeInclusive<f64>| match field(col).parse::<f64>() {
                Ok(v) if range.contains(&v) => Some(v),
                _ => {
                    problem(format!(
                        "{} must be a number in [{}, {}], got {:?}",
                        COUNTY_HEADER[col],
                        range.start(),
                        range.end(),
                        field(col)
                    ));
                    None
                }
            };
        let lat = coord(7, -90.0..=90.0);
        let lon = coord(8, -180.0..=180.0);
        let has_airport = match field(9) {
            "true" | "1" => Some(true),
            "false" | "0" => Some(false),
            other => {
                problem(format!("has_airport must be true or false, got {other:?}"));
                None
            }
        };

        if let (Some(density_class), Some(total_beds), Some(lat), Some(lon), Some(has_airport)) =
            (density_class, total_beds, lat, lon, has_airport)
        {
            counties.push(County {
                fips,
                name: field(1).to_string(),
                population,
                density_class,
                total_beds,
                lat,
                lon,
                has_airport,
            });
        }
    }
    if diags.is_empty() {
        Ok(counties)
    } else {
        Err(fail(label, diags))
    }
}

/// Writes counties in the same schema [`load_counties`] reads.
pub fn write_counties(out: impl Write, counties: &[County]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COUNTY_HEADER)?;
    for c in counties {
        w.write_record([
            c.fips.clone(),
            c.name.clone(),
            c.population.0[0].to_string(),
            c.population.0[1].to_string(),
            c.population.0[2].to_string(),
            c.density_class.to_string(),
            c.total_beds.to_string(),
            c.lat.to_string(),
            c.lon.to_string(),
            c.has_airport.to_string(),
        ])?;
    }
    w.flush().map_err(|source| Error::Io {
        context: "writing counties".into(),
        source,
    })
}

pub fn load_adjacency(path: impl AsRef<Path>, counties: &[County]) -> Result<Vec<Edge>> {
    let path = path.as_ref();
    read_edges(open(path)?, path, counties, false)
}

pub fn load_air_routes(path: impl AsRef<Path>, counties: &[County]) -> Result<Vec<Edge>> {
    let path = path.as_ref();
    read_edges(open(path)?, path, counties, true)
}

/// Parses a two-column edge list, drops duplicate (including reversed) rows,
/// and checks every endpoint against `counties`.
pub fn read_edges(
    input: impl Read,
    label: &Path,
    counties: &[County],
    require_airports: bool,
) -> Result<Vec<Edge>> {
    let by_fips: HashMap<&str, &County> = counties.iter().map(|c| (c.fips.as_str(), c)).collect();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let mut diags = Vec::new();
    if !check_header(&mut reader, &EDGE_HEADER, &mut diags)? {
        return Err(fail(label, diags));
    }
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let mut problem = |message: String| diags.push(RowDiagnostic { line, message });
        if record.len() != 2 {
            problem(format!("expected 2 fields, found {}", record.len()));
            continue;
        }
        let (a, b) = (record[0].trim(), record[1].trim());
        let mut ok = true;
        if a == b {
            problem(format!("self-loop on {a}"));
            ok = false;
        }
        for f in [a, b] {
            match by_fips.get(f) {
                None => {
                    problem(format!("unknown county {f}"));
                    ok = false;
                }
                Some(c) if require_airports && !c.has_airport => {
                    problem(format!("county {f} has no airport"));
                    ok = false;
                }
                Some(_) => {}
            }
        }
        let key = if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        if ok && seen.insert(key.clone()) {
            edges.push(Edge::new(key.0, key.1));
        }
    }
    if diags.is_empty() {
        Ok(edges)
    } else {
        Err(fail(label, diags))
    }
}

/// File locations making up one set of inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InputPaths {
    pub counties: PathBuf,
    pub adjacency: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub air_routes: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<PathBuf>,
}

/// Loaded, cross-validated inputs. Immutable once built.
#[derive(Debug, Clone)]
pub struct InputBundle {
    pub counties: Vec<County>,
    pub adjacency: Vec<Edge>,
    pub air_routes: Option<Vec<Edge>>,
    /// GeoJSON, passed through untouched.
    pub geometry: Option<serde_json::Value>,
}

impl InputBundle {
    pub fn load(paths: &InputPaths) -> Result<Self> {
        let counties = load_counties(&paths.counties)?;
        let adjacency = load_adjacency(&paths.adjacency, &counties)?;
        let air_routes = paths
            .air_routes
            .as_ref()
            .map(|p| load_air_routes(p, &counties))
            .transpose()?;
        let geometry = paths
            .geometry
            .as_ref()
            .map(|p| -> Result<serde_json::Value> {
                let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                    context: format!("reading {}", p.display()),
                    source,
                })?;
                serde_json::from_str(&text).map_err(|source| Error::Json {
                    context: format!("parsing {}", p.display()),
                    source,
                })
            })
            .transpose()?;
        Ok(Self {
            counties,
            adjacency,
            air_routes,
            geometry,
        })
    }

    pub fn network(&self, settings: SpreadSettings) -> Result<SpreadNetwork> {
        build_network(
            self.counties.clone(),
            &self.adjacency,
            self.air_routes.as_deref(),
            settings,
        )
    }
}
