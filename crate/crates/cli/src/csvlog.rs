//! Per-seed trajectory CSVs.
//!
//! Columns: `step,x_0..,u_raw_0..,u_clip_0..,loss,lr,grad_norm`. Floats are
//! written as `{:.16e}` (17 significant digits), which round-trips every
//! `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use qimpc_core::control::{StepRecord, TrajectoryLog};

use crate::output::{write_atomic, OutputError};

pub fn csv_header(state_dim: usize, control_dim: usize) -> String {
    let mut cols = vec!["step".to_string()];
    cols.extend((0..state_dim).map(|i| format!("x_{i}")));
    cols.extend((0..control_dim).map(|i| format!("u_raw_{i}")));
    cols.extend((0..control_dim).map(|i| format!("u_clip_{i}")));
    cols.extend(["loss", "lr", "grad_norm"].map(String::from));
    cols.join(",")
}

pub fn format_csv(records: &[StepRecord], state_dim: usize, control_dim: usize) -> String {
    let mut out = csv_header(state_dim, control_dim);
    out.push('\n');
    for r in records {
        write!(out, "{}", r.step).unwrap();
        for v in r
            .state
            .iter()
            .chain(&r.raw_control)
            .chain(&r.clipped_control)
            .chain([&r.loss, &r.lr, &r.grad_norm])
        {
            write!(out, ",{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(log: &TrajectoryLog, state_dim: usize, control_dim: usize, path: &Path) -> Result<(), OutputError> {
    write_atomic(path, format_csv(&log.records, state_dim, control_dim).as_bytes())
}

/// Parsed trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTrajectory {
    pub state_dim: usize,
    pub control_dim: usize,
    pub records: Vec<StepRecord>,
}

pub fn parse_csv(text: &str) -> Result<CsvTrajectory, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let cols: Vec<&str> = header.split(',').collect();
    let count = |prefix: &str| cols.iter().filter(|c| c.starts_with(prefix)).count();
    let state_dim = count("x_");
    let control_dim = count("u_raw_");
    if count("u_clip_") != control_dim || csv_header(state_dim, control_dim) != header {
        return Err(format!("unexpected header `{header}`"));
    }
    let width = cols.len();
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(format!("row {} has {} fields, expected {width}", i + 1, fields.len()));
        }
        let step = fields[0]
            .parse::<usize>()
            .map_err(|e| format!("row {}: bad step `{}`: {e}", i + 1, fields[0]))?;
        let values = fields[1..]
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| format!("row {}: bad number `{f}`: {e}", i + 1))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let (state, rest) = values.split_at(state_dim);
        let (raw, rest) = rest.split_at(control_dim);
        let (clipped, rest) = rest.split_at(control_dim);
        records.push(StepRecord {
            step,
            state: state.to_vec(),
            raw_control: raw.to_vec(),
            clipped_control: clipped.to_vec(),
            loss: rest[0],
            lr: rest[1],
            grad_norm: rest[2],
        });
    }
    Ok(CsvTrajectory {
        state_dim,
        control_dim,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(step: usize, state: Vec<f64>, u: f64) -> StepRecord {
        StepRecord {
            step,
            state,
            raw_control: vec![u / 2.0],
            clipped_control: vec![u],
            loss: 0.1,
            lr: 0.3,
            grad_norm: 1.0 / 3.0,
        }
    }

    #[test]
    fn single_row_has_eight_columns() {
        let text = format_csv(&[record(0, vec![1.0, -2.0], 0.5)], 2, 1);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "step,x_0,x_1,u_raw_0,u_clip_0,loss,lr,grad_norm");
        assert_eq!(lines[1].split(',').count(), 8);
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }

    #[test]
    fn empty_log_is_header_only() {
        assert_eq!(format_csv(&[], 3, 2), format!("{}\n", csv_header(3, 2)));
        let parsed = parse_csv(&format_csv(&[], 3, 2)).unwrap();
        assert_eq!((parsed.state_dim, parsed.control_dim), (3, 2));
        assert!(parsed.records.is_empty());
    }

    #[test]
    fn float_format_has_seventeen_digits() {
        let text = format_csv(&[record(0, vec![0.1], 1.0)], 1, 1);
        let field = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
        assert_eq!(field, "1.0000000000000001e-1");
    }

    #[test]
    fn malformed_rows_rejected() {
        assert!(parse_csv("step,x_0,u_raw_0,u_clip_0,loss,lr,grad_norm\n0,1,2\n").is_err());
        assert!(parse_csv("bogus\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_bitwise(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 6)) {
            let rec = StepRecord {
                step: 7,
                state: vec![values[0], values[1]],
                raw_control: vec![values[2]],
                clipped_control: vec![values[3]],
                loss: values[4],
                lr: values[5],
                grad_norm: values[0].abs(),
            };
            let parsed = parse_csv(&format_csv(std::slice::from_ref(&rec), 2, 1)).unwrap();
            let back = &parsed.records[0];
            let bits = |r: &StepRecord| -> Vec<u64> {
                r.state.iter().chain(&r.raw_control).chain(&r.clipped_control)
                    .chain([&r.loss, &r.lr, &r.grad_norm]).map(|v| v.to_bits()).collect()
            };
            prop_assert_eq!(bits(back), bits(&rec));
        }
    }
}
