use std::fs::File;
use std::io::BufWriter;

use interdiv_core::metrics::curve;
use interdiv_core::{mdg_bounds, RngSpec};

use crate::error::CliError;
use crate::output::{write_csv, write_json, Bounds, Row};
use crate::spec::{ExperimentSpec, OutputFormat, Preset};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub rows: Vec<Row>,
    /// One message per theorem-suite row outside `[lower − 3·SE, upper + 3·SE]`.
    pub violations: Vec<String>,
}

/// Estimates every `(network, K)` point of `spec`, then writes the output file.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunOutcome, CliError> {
    let path = spec.output_path.display().to_string();
    // fail on an unwritable path before the simulation
    let file = File::create(&spec.output_path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;

    let rows = compute_rows(spec)?;
    let with_bounds = spec.preset == Preset::TheoremSuite;
    let violations = if with_bounds {
        bound_violations(&rows)
    } else {
        Vec::new()
    };

    let out = BufWriter::new(file);
    match spec.output_format {
        OutputFormat::Csv => write_csv(&rows, with_bounds, out)?,
        OutputFormat::Json => write_json(&rows, out)?,
    }
    Ok(RunOutcome { rows, violations })
}

/// Estimates every `(network, K)` point of `spec` without writing anything.
pub fn compute_rows(spec: &ExperimentSpec) -> Result<Vec<Row>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.resolve())
        .build()?;
    let max_users = *spec.users.last().expect("validated nonempty");
    let template = spec.powers.template(max_users);
    let rng = RngSpec::new(spec.seed);
    let with_bounds = spec.preset == Preset::TheoremSuite;

    let mut rows = Vec::with_capacity(spec.networks.len() * spec.users.len());
    for &kind in &spec.networks {
        let points = pool.install(|| curve(&template, kind, &spec.users, spec.quantity, spec.n_samples, &rng))?;
        for p in points {
            let bounds = if with_bounds {
                let (lower_bound, upper_bound, alpha) =
                    mdg_bounds(&template.clone().with_kind(kind).with_users(p.users))?;
                Some(Bounds {
                    lower_bound,
                    upper_bound,
                    alpha,
                })
            } else {
                None
            };
            eprintln!(
                "{:>7} K={:<8} {} = {:.6} ± {:.2e} (n={})",
                kind, p.users, p.quantity, p.value.mean, p.value.std_error, p.value.n_samples
            );
            rows.push(Row {
                network: kind,
                users: p.users,
                quantity: p.quantity,
                mean: p.value.mean,
                std_error: p.value.std_error,
                n_samples: p.value.n_samples,
                seed: spec.seed,
                bounds,
            });
        }
    }
    Ok(rows)
}

fn bound_violations(rows: &[Row]) -> Vec<String> {
    rows.iter()
        .filter_map(|r| {
            let b = r.bounds?;
            let slack = 3.0 * r.std_error;
            (r.mean < b.lower_bound - slack || r.mean > b.upper_bound + slack).then(|| {
                format!(
                    "{} K={}: {} = {} ± {} outside [{}, {}]",
                    r.network, r.users, r.quantity, r.mean, r.std_error, b.lower_bound, b.upper_bound
                )
            })
        })
        .collect()
}
