//! Result rows and their CSV/JSON encodings.
//!
//! CSV columns, in order:
//!
//! ```text
//! network,K,quantity,mean,std_error,n_samples,seed
//! ```
//!
//! followed by `lower_bound,upper_bound,alpha` for theorem-suite runs.
//! Reals are written in scientific notation with 17 significant digits so
//! that parsing recovers them exactly.

use std::io::{Read, Write};

use interdiv_core::{Estimate, NetworkKind, Quantity};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Diversity-gain bounds attached to a theorem-suite row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub network: NetworkKind,
    #[serde(rename = "K")]
    pub users: usize,
    pub quantity: Quantity,
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Bounds>,
}

impl Row {
    pub fn estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean,
            std_error: self.std_error,
            n_samples: self.n_samples,
        }
    }
}

const BASE_HEADER: [&str; 7] = ["network", "K", "quantity", "mean", "std_error", "n_samples", "seed"];
const BOUND_HEADER: [&str; 3] = ["lower_bound", "upper_bound", "alpha"];

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Encode(e.to_string())
}

pub fn write_csv<W: Write>(rows: &[Row], with_bounds: bool, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = BASE_HEADER.to_vec();
    if with_bounds {
        header.extend(BOUND_HEADER);
    }
    w.write_record(&header).map_err(csv_error)?;
    for r in rows {
        let mut rec = vec![
            r.network.label().to_string(),
            r.users.to_string(),
            r.quantity.label().to_string(),
            real(r.mean),
            real(r.std_error),
            r.n_samples.to_string(),
            r.seed.to_string(),
        ];
        if with_bounds {
            let b = r
                .bounds
                .ok_or_else(|| CliError::Encode(format!("row {} K={} has no bounds", r.network, r.users)))?;
            rec.extend([real(b.lower_bound), real(b.upper_bound), real(b.alpha)]);
        }
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush().map_err(|e| CliError::Encode(e.to_string()))
}

pub fn write_json<W: Write>(rows: &[Row], mut out: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, rows).map_err(|e| CliError::Encode(e.to_string()))?;
    out.write_all(b"\n").map_err(|e| CliError::Encode(e.to_string()))
}

/// Reads rows back from CSV written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>, CliError> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let with_bounds = headers.len() == BASE_HEADER.len() + BOUND_HEADER.len();
    let expected: Vec<&str> = if with_bounds {
        BASE_HEADER.iter().chain(&BOUND_HEADER).copied().collect()
    } else {
        BASE_HEADER.to_vec()
    };
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::Encode(format!("unexpected CSV header: {headers:?}")));
    }
    let bad = |what: &str, v: &str| CliError::Encode(format!("bad {what} '{v}'"));
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let f = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(expected[i], &rec[i]));
        let u = |i: usize| rec[i].parse::<u64>().map_err(|_| bad(expected[i], &rec[i]));
        rows.push(Row {
            network: rec[0].parse().map_err(|_| bad("network", &rec[0]))?,
            users: u(1)? as usize,
            quantity: rec[2].parse().map_err(|_| bad("quantity", &rec[2]))?,
            mean: f(3)?,
            std_error: f(4)?,
            n_samples: u(5)?,
            seed: u(6)?,
            bounds: if with_bounds {
                Some(Bounds {
                    lower_bound: f(7)?,
                    upper_bound: f(8)?,
                    alpha: f(9)?,
                })
            } else {
                None
            },
        });
    }
    Ok(rows)
}
