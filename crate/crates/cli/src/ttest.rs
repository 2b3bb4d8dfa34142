use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use fnirs_core::evaluation::welch_t_test;
use fnirs_core::{SampleSummary, TTestResult};
use serde::Serialize;

use crate::output::{to_json, write_text};
use crate::Globals;

#[derive(Debug, Args)]
pub struct TtestArgs {
    /// Group A summary: mean, sample SD and size (n >= 2).
    #[arg(long, allow_hyphen_values = true, required_unless_present = "a_csv", requires_all = ["a_sd", "a_n"], conflicts_with = "a_csv")]
    a_mean: Option<f64>,
    #[arg(long, requires = "a_mean")]
    a_sd: Option<f64>,
    #[arg(long, requires = "a_mean", value_parser = clap::value_parser!(u64).range(2..))]
    a_n: Option<u64>,
    /// Accuracy samples for group A, separated by commas or newlines.
    #[arg(long)]
    a_csv: Option<PathBuf>,

    /// Group B summary, as for A.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "b_csv", requires_all = ["b_sd", "b_n"], conflicts_with = "b_csv")]
    b_mean: Option<f64>,
    #[arg(long, requires = "b_mean")]
    b_sd: Option<f64>,
    #[arg(long, requires = "b_mean", value_parser = clap::value_parser!(u64).range(2..))]
    b_n: Option<u64>,
    /// Accuracy samples for group B.
    #[arg(long)]
    b_csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct TtestReport {
    a: SampleSummary,
    b: SampleSummary,
    result: TTestResult,
}

/// Every number in the file; a non-numeric first line is taken as a header.
fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line
            .split([',', ' ', '\t', ';'])
            .map(str::trim)
            .filter(|f| !f.is_empty())
            .collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) => values.extend(v),
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(fnirs_core::Error::Malformed {
                    file: path.display().to_string(),
                    message: format!("line {} is not numeric", i + 1),
                }
                .into())
            }
        }
    }
    Ok(values)
}

fn summary(mean: Option<f64>, sd: Option<f64>, n: Option<u64>, csv: &Option<PathBuf>) -> Result<SampleSummary> {
    match (mean, sd, n, csv) {
        (Some(mean), Some(sd), Some(n), _) => Ok(SampleSummary { mean, sd, n: n as usize }),
        (_, _, _, Some(path)) => Ok(SampleSummary::from_samples(&read_samples(path)?)?),
        _ => unreachable!("clap enforces a complete summary or a sample file"),
    }
}

pub fn run(args: &TtestArgs, g: &Globals) -> Result<()> {
    let a = summary(args.a_mean, args.a_sd, args.a_n, &args.a_csv)?;
    let b = summary(args.b_mean, args.b_sd, args.b_n, &args.b_csv)?;
    let result = welch_t_test(&a, &b)?;
    let json = to_json(&TtestReport { a, b, result })?;
    print!("{json}");
    if let Some(out) = &g.out {
        write_text(&out.join("ttest.json"), &json)?;
    }
    Ok(())
}
