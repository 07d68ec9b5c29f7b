//! CSV and JSON artifacts.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a file
//! parsed and re-emitted is byte-identical. Lines end in `\n`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use demc_core::ode::{OdeState, TimeSeries};
use demc_core::{ChainHistory, ChainState, ParameterVector};
use serde::Serialize;

use crate::error::{HarnessError, Result};

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// Appends one comma-separated row.
pub fn push_row<I, S>(out: &mut String, cells: I)
where
    I: IntoIterator<Item = S>,
    S: std::fmt::Display,
{
    for (i, cell) in cells.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{cell}").expect("write to String");
    }
    out.push('\n');
}

fn inconsistent(path_label: &str, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Inconsistent(format!("{path_label}: {msg}"))
}

fn parse_number(label: &str, line: usize, cell: &str) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| inconsistent(label, format!("line {line}: `{cell}` is not a number")))
}

fn read_records(label: &str, text: &str) -> Result<(Vec<String>, Vec<csv::StringRecord>)> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| inconsistent(label, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let records = reader
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| inconsistent(label, e))?;
    Ok((header, records))
}

pub fn chain_header(dimension: usize) -> Vec<String> {
    let mut h = vec!["iteration".to_string()];
    h.extend((1..=dimension).map(|i| format!("theta_{i}")));
    h.push("log_post".into());
    h
}

/// `iteration,theta_1..theta_d,log_post`, one row per stored state.
pub fn chain_to_csv(chain: &ChainHistory) -> String {
    let mut out = String::with_capacity(chain.len() * 24 * (chain.dimension() + 2));
    push_row(&mut out, chain_header(chain.dimension()));
    for (i, s) in chain.states().iter().enumerate() {
        write!(out, "{i}").expect("write to String");
        for v in s.theta.iter() {
            write!(out, ",{v}").expect("write to String");
        }
        writeln!(out, ",{}", s.log_density).expect("write to String");
    }
    out
}

pub fn chain_from_csv(label: &str, text: &str) -> Result<ChainHistory> {
    let (header, records) = read_records(label, text)?;
    if header.len() < 3 {
        return Err(inconsistent(
            label,
            "chain header needs iteration, theta and log_post columns",
        ));
    }
    let d = header.len() - 2;
    if header != chain_header(d) {
        return Err(inconsistent(label, format!("unexpected header {header:?}")));
    }
    let mut states = Vec::with_capacity(records.len());
    for (row, rec) in records.iter().enumerate() {
        let line = row + 2;
        let iteration = rec[0].trim().parse::<usize>().map_err(|_| {
            inconsistent(label, format!("line {line}: bad iteration `{}`", &rec[0]))
        })?;
        if iteration != row {
            return Err(inconsistent(
                label,
                format!("line {line}: iteration {iteration}, expected {row}"),
            ));
        }
        let theta = (1..=d)
            .map(|j| parse_number(label, line, &rec[j]))
            .collect::<Result<Vec<_>>>()?;
        let log_density = parse_number(label, line, &rec[d + 1])?;
        let theta = ParameterVector::new(theta)
            .map_err(|e| inconsistent(label, format!("line {line}: {e}")))?;
        states.push(ChainState { theta, log_density });
    }
    ChainHistory::from_states(states).map_err(|e| inconsistent(label, e))
}

pub fn read_chain(path: &Path) -> Result<ChainHistory> {
    chain_from_csv(&path.display().to_string(), &read_text(path)?)
}

/// `t,x,y` with one row per observation time.
pub fn observations_to_csv(series: &TimeSeries) -> String {
    let mut out = String::new();
    push_row(&mut out, ["t", "x", "y"]);
    for (t, o) in series.times.iter().zip(&series.observations) {
        writeln!(out, "{t},{},{}", o.x, o.y).expect("write to String");
    }
    out
}

pub fn observations_from_csv(label: &str, text: &str) -> Result<TimeSeries> {
    let (header, records) = read_records(label, text)?;
    if header != ["t", "x", "y"] {
        return Err(inconsistent(
            label,
            format!("expected header t,x,y, found {header:?}"),
        ));
    }
    let mut series = TimeSeries {
        times: Vec::with_capacity(records.len()),
        observations: Vec::with_capacity(records.len()),
    };
    for (row, rec) in records.iter().enumerate() {
        let line = row + 2;
        series.times.push(parse_number(label, line, &rec[0])?);
        series.observations.push(OdeState::new(
            parse_number(label, line, &rec[1])?,
            parse_number(label, line, &rec[2])?,
        ));
    }
    series.validate().map_err(|e| inconsistent(label, e))?;
    Ok(series)
}

pub fn read_observations(path: &Path) -> Result<TimeSeries> {
    observations_from_csv(&path.display().to_string(), &read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chain(rows: &[(Vec<f64>, f64)]) -> ChainHistory {
        ChainHistory::from_states(
            rows.iter()
                .map(|(t, lp)| ChainState {
                    theta: ParameterVector::new(t.clone()).unwrap(),
                    log_density: *lp,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn chain_layout() {
        let c = chain(&[(vec![0.5, -1.0], -1.25), (vec![0.1, 1e-20], -3.0)]);
        assert_eq!(
            chain_to_csv(&c),
            "iteration,theta_1,theta_2,log_post\n0,0.5,-1,-1.25\n1,0.1,0.00000000000000000001,-3\n"
        );
    }

    #[test]
    fn malformed_chains_are_inconsistent() {
        for text in [
            "iteration,theta_1,log_post\n1,0.5,-1\n",
            "iteration,x,log_post\n0,0.5,-1\n",
            "iteration,theta_1,log_post\n0,abc,-1\n",
            "iteration,theta_1,log_post\n0,0.5\n",
            "iteration,theta_1,log_post\n",
        ] {
            let err = chain_from_csv("t", text).unwrap_err();
            assert_eq!(err.exit_code(), 5, "{text}: {err}");
        }
    }

    #[test]
    fn observations_round_trip() {
        let s = TimeSeries {
            times: vec![0.0, 1.0, 2.0],
            observations: vec![
                OdeState::new(1.0, 2.0),
                OdeState::new(0.3, 4.5),
                OdeState::new(7.25, 0.1),
            ],
        };
        let text = observations_to_csv(&s);
        assert!(text.starts_with("t,x,y\n0,1,2\n"));
        let back = observations_from_csv("obs", &text).unwrap();
        assert_eq!(back, s);
        assert_eq!(observations_to_csv(&back), text);
        assert!(observations_from_csv("obs", "t,x,y\n0,0,1\n").is_err());
    }

    proptest! {
        #[test]
        fn chain_csv_round_trips_bytes(
            rows in prop::collection::vec(
                (prop::collection::vec(-1e300f64..1e300, 3), prop_oneof![Just(f64::NEG_INFINITY), -1e6f64..1e6]),
                1..20,
            )
        ) {
            let c = chain(&rows);
            let text = chain_to_csv(&c);
            let parsed = chain_from_csv("p", &text).unwrap();
            prop_assert_eq!(&parsed, &c);
            prop_assert_eq!(chain_to_csv(&parsed), text);
        }
    }
}
