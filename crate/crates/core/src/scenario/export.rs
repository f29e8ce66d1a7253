//! Flat CSV views of a result.
//!
//! The frame export has one row per `(day, county)`, ordered by day then by
//! network county order, with `day,fips` followed by every [`Metric`] column
//! in declaration order. Reading an export back yields a result whose
//! summary matches the original.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result, RowDiagnostic};

use super::result::{CountyMeta, Metric, SimulationResult};
use super::summary::StateSummary;

pub fn export_header() -> Vec<&'static str> {
    let mut h = vec!["day", "fips"];
    h.extend(Metric::ALL.iter().map(|m| m.as_str()));
    h
}

pub fn write_export(out: impl Write, result: &SimulationResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(export_header())?;
    let mut row = Vec::with_capacity(Metric::ALL.len() + 2);
    for day in 0..result.days_recorded() {
        for (i, c) in result.counties.iter().enumerate() {
            row.clear();
            row.push(day.to_string());
            row.push(c.fips.clone());
            row.extend(
                Metric::ALL
                    .iter()
                    .map(|&m| result.value(m, day, i).to_string()),
            );
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|source| Error::Io {
        context: "writing export".into(),
        source,
    })?;
    Ok(())
}

pub const SUMMARY_HEADER: [&str; 8] = [
    "peak_sick_day",
    "peak_sick_count",
    "outbreak_duration",
    "first_case_day",
    "last_active_day",
    "total_sick",
    "total_hospitalizations",
    "total_deaths",
];

pub fn write_summary(out: impl Write, summary: &StateSummary) -> Result<()> {
    let opt = |d: Option<u32>| d.map(|d| d.to_string()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    w.write_record([
        summary.peak_sick_day.to_string(),
        summary.peak_sick_count.to_string(),
        summary.outbreak_duration.to_string(),
        opt(summary.first_case_day),
        opt(summary.last_active_day),
        summary.total_sick.to_string(),
        summary.total_hospitalizations.to_string(),
        summary.total_deaths.to_string(),
    ])?;
    w.flush().map_err(|source| Error::Io {
        context: "writing summary".into(),
        source,
    })?;
    Ok(())
}

/// Parses a frame export back into a result.
///
/// County names and bed capacities are not part of the export, so they come
/// back empty and zero. Populations are rebuilt from day 0 as susceptible
/// plus cumulative sick.
pub fn read_export(input: impl Read, label: &Path) -> Result<SimulationResult> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let expected = export_header();
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::Input {
            path: label.to_path_buf(),
            diagnostics: vec![RowDiagnostic {
                line: 1,
                message: format!("header must be {}", expected.join(",")),
            }],
        });
    }

    let mut counties: Vec<CountyMeta> = Vec::new();
    let mut columns = vec![Vec::new(); Metric::ALL.len()];
    let mut diagnostics = Vec::new();
    let mut rows = 0usize;
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut bad = |message: String| diagnostics.push(RowDiagnostic { line, message });

        let day: Option<u32> = rec[0].parse().ok();
        let fips = &rec[1];
        let n = counties.len();
        match day {
            Some(0) => counties.push(CountyMeta {
                fips: fips.to_string(),
                name: String::new(),
                population: 0,
                bed_capacity: 0,
            }),
            Some(d) if n > 0 => {
                let want = rows - d as usize * n;
                if rows / n != d as usize
                    || counties.get(want).map(|c| c.fips.as_str()) != Some(fips)
                {
                    bad(format!("row for day {d}, county {fips} is out of order"));
                }
            }
            _ => bad(format!("invalid day {:?}", &rec[0])),
        }
        for (k, col) in columns.iter_mut().enumerate() {
            match rec[k + 2].parse::<u64>() {
                Ok(v) => col.push(v),
                Err(_) => {
                    bad(format!("{} must be a non-negative integer", Metric::ALL[k]));
                    col.push(0);
                }
            }
        }
        rows += 1;
    }
    let n = counties.len();
    if n > 0 && !rows.is_multiple_of(n) {
        diagnostics.push(RowDiagnostic {
            line: rows as u64 + 1,
            message: format!("{rows} rows is not a whole number of days for {n} counties"),
        });
    }
    if !diagnostics.is_empty() {
        return Err(Error::Input {
            path: label.to_path_buf(),
            diagnostics,
        });
    }

    let horizon = rows.checked_div(n).unwrap_or(0) as u32;
    let mut result = SimulationResult::from_columns(String::new(), horizon, counties, columns);
    if horizon > 0 {
        let pops: Vec<u64> = (0..n)
            .map(|i| {
                [
                    Metric::SusceptibleChildren,
                    Metric::SusceptibleAdults,
                    Metric::SusceptibleSeniors,
                    Metric::CumulativeSick,
                ]
                .iter()
                .map(|&m| result.value(m, 0, i))
                .sum()
            })
            .collect();
        for (c, p) in result.counties.iter_mut().zip(pops) {
            c.population = p;
        }
    }
    Ok(result)
}
