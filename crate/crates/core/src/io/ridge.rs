//! Digitized spectroscopy ridges.

use thiserror::Error;

use crate::fitting::{Dataset, RidgePoint};

pub const RIDGE_HEADER: [&str; 5] = ["dataset", "n_g", "freq_ghz", "weight", "branch_hint"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RidgeError {
    #[error("bad header: expected `{}`", RIDGE_HEADER.join(","))]
    Header,
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("malformed csv: {0}")]
    Csv(String),
}

/// Parses ridge points grouped by dataset label, in order of first
/// appearance. Rows are numbered from 1 after the header.
pub fn read_ridge_csv(text: &str) -> Result<Vec<Dataset>, RidgeError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|_| RidgeError::Header)?;
    if header.iter().ne(RIDGE_HEADER) {
        return Err(RidgeError::Header);
    }

    let mut datasets: Vec<Dataset> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| RidgeError::Row {
            row,
            reason: e.to_string(),
        })?;
        let err = |reason: String| RidgeError::Row { row, reason };
        let number = |idx: usize| -> Result<f64, RidgeError> {
            let field = &record[idx];
            field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("{}: not a number: `{field}`", RIDGE_HEADER[idx])))
        };

        let label = record[0].to_string();
        if label.is_empty() {
            return Err(err("empty dataset label".into()));
        }
        let n_g = number(1)?;
        if !(0.0..=2.0).contains(&n_g) {
            return Err(err(format!("n_g = {n_g} outside [0, 2]")));
        }
        let freq = number(2)?;
        if freq <= 0.0 {
            return Err(err(format!("freq_ghz = {freq} must be positive")));
        }
        let weight = if record[3].is_empty() { 1.0 } else { number(3)? };
        if weight < 0.0 {
            return Err(err(format!("weight = {weight} must be non-negative")));
        }
        let branch_hint = if record[4].is_empty() {
            None
        } else {
            Some(record[4].parse::<usize>().map_err(|_| {
                err(format!("branch_hint: not a non-negative integer: `{}`", &record[4]))
            })?)
        };

        let point = RidgePoint {
            n_g,
            freq,
            weight,
            branch_hint,
        };
        match datasets.iter_mut().find(|d| d.label == label) {
            Some(d) => d.points.push(point),
            None => datasets.push(Dataset {
                label,
                points: vec![point],
            }),
        }
    }
    Ok(datasets)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "dataset,n_g,freq_ghz,weight,branch_hint\n";

    #[test]
    fn single_row() {
        let d = read_ridge_csv(&format!("{HEADER}1,1.00,6.33,1,\n")).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].label, "1");
        assert_eq!(
            d[0].points,
            vec![RidgePoint {
                n_g: 1.0,
                freq: 6.33,
                weight: 1.0,
                branch_hint: None
            }]
        );
    }

    #[test]
    fn empty_weight_defaults_to_one() {
        let d = read_ridge_csv(&format!("{HEADER}a,0.95,7.1,,2\n")).unwrap();
        assert_eq!(d[0].points[0].weight, 1.0);
        assert_eq!(d[0].points[0].branch_hint, Some(2));
    }

    #[test]
    fn groups_by_label_in_file_order() {
        let text = format!("{HEADER}b,0.9,7,1,\na,0.9,6,1,\nb,1.0,7.2,0.5,\n");
        let d = read_ridge_csv(&text).unwrap();
        assert_eq!(
            d.iter().map(|d| d.label.as_str()).collect::<Vec<_>>(),
            ["b", "a"]
        );
        assert_eq!(d[0].points.len(), 2);
        assert_eq!(d[0].points[1].weight, 0.5);
    }

    #[test]
    fn range_errors_name_the_row() {
        let text = format!("{HEADER}1,1.0,6.3,1,\n1,2.5,6.33,1,\n");
        match read_ridge_csv(&text) {
            Err(RidgeError::Row { row: 2, reason }) => assert!(reason.contains("n_g")),
            other => panic!("unexpected {other:?}"),
        }
        let text = format!("{HEADER}1,1.0,0,1,\n");
        assert!(matches!(read_ridge_csv(&text), Err(RidgeError::Row { row: 1, .. })));
    }

    #[test]
    fn bad_header_and_fields() {
        assert_eq!(
            read_ridge_csv("dataset,ng,freq_ghz,weight,branch_hint\n"),
            Err(RidgeError::Header)
        );
        assert_eq!(read_ridge_csv(""), Err(RidgeError::Header));
        assert!(read_ridge_csv(&format!("{HEADER}1,x,6.3,1,\n")).is_err());
        assert!(read_ridge_csv(&format!("{HEADER}1,1.0,6.3,1,-1\n")).is_err());
        assert!(read_ridge_csv(&format!("{HEADER}1,1.0,6.3\n")).is_err());
    }

    #[test]
    fn header_only_is_empty() {
        assert_eq!(read_ridge_csv(HEADER).unwrap(), Vec::new());
    }
}
