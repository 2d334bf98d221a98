//! CSV and JSON serialization of simulation output.
//!
//! All CSV is UTF-8 with a header row and `\n` record terminators. Floats are
//! written in shortest round-trip form, so parsing a written file gives back
//! the exact values.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::chain::{SimulationReport, StepSummary};
use crate::Result;

/// One sampled state: the `(replicate, t, z)` schema shared by chain
/// trajectories and oracle samples (oracle samples carry `t = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub replicate: u64,
    pub t: u64,
    pub z: f64,
}

/// Recorded states of a report in `t`-major order; empty when none were kept.
pub fn state_records(report: &SimulationReport) -> Vec<StateRecord> {
    report
        .states
        .iter()
        .flatten()
        .enumerate()
        .flat_map(|(t, zs)| {
            zs.iter().enumerate().map(move |(i, &z)| StateRecord {
                replicate: i as u64,
                t: t as u64,
                z,
            })
        })
        .collect()
}

/// Oracle samples in the state schema.
pub fn sample_records(values: &[f64]) -> Vec<StateRecord> {
    values
        .iter()
        .enumerate()
        .map(|(i, &z)| StateRecord {
            replicate: i as u64,
            t: 0,
            z,
        })
        .collect()
}

pub fn write_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read, T: DeserializeOwned>(reader: R) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn write_states_csv<W: Write>(writer: W, records: &[StateRecord]) -> Result<()> {
    write_csv(writer, records)
}

pub fn read_states_csv<R: Read>(reader: R) -> Result<Vec<StateRecord>> {
    read_csv(reader)
}

pub fn write_summary_csv<W: Write>(writer: W, summary: &[StepSummary]) -> Result<()> {
    write_csv(writer, summary)
}

pub fn read_summary_csv<R: Read>(reader: R) -> Result<Vec<StepSummary>> {
    read_csv(reader)
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut writer: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value)?;
    writer.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{run_trajectories, ChainParams};
    use proptest::prelude::*;

    #[test]
    fn report_states_flatten_in_time_order() {
        let r = run_trajectories(ChainParams::new(1, 2).unwrap(), 0.5, 2, 3, 1, true).unwrap();
        let recs = state_records(&r);
        assert_eq!(recs.len(), 9);
        assert_eq!((recs[4].t, recs[4].replicate), (1, 1));
        assert_eq!(recs[0].z, 0.5);
    }

    #[test]
    fn csv_has_header_and_unix_newlines() {
        let mut buf = Vec::new();
        write_states_csv(&mut buf, &sample_records(&[0.25, 0.5])).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "replicate,t,z\n0,0,0.25\n1,0,0.5\n");
    }

    #[test]
    fn summary_round_trip() {
        let r = run_trajectories(ChainParams::new(2, 3).unwrap(), 0.0, 6, 50, 3, false).unwrap();
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &r.summary).unwrap();
        assert_eq!(read_summary_csv(buf.as_slice()).unwrap(), r.summary);
    }

    #[test]
    fn json_round_trip() {
        let r = run_trajectories(ChainParams::new(2, 3).unwrap(), 0.2, 3, 10, 3, true).unwrap();
        let mut buf = Vec::new();
        write_json(&mut buf, &r).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"spec_version\": 1"));
        let back: SimulationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    proptest! {
        #[test]
        fn state_csv_round_trip(rows in prop::collection::vec((0u64..1_000_000, 0u64..10_000, 0.0f64..=1.0), 0..64)) {
            let records: Vec<StateRecord> = rows
                .into_iter()
                .map(|(replicate, t, z)| StateRecord { replicate, t, z })
                .collect();
            let mut buf = Vec::new();
            write_states_csv(&mut buf, &records).unwrap();
            prop_assert_eq!(read_states_csv(buf.as_slice()).unwrap(), records);
        }
    }
}
