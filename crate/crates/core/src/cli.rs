// Copyright 2026 The Predtrans Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 on I/O
//! errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use crate::bench::{
    full_reducer_oracle_bounded, generate_dataset, render_report, run_experiment, write_dataset,
    DataGenConfig, ReportFormat,
};
use crate::costmodel::{inflation_approx, predict_pred_transfer, predict_yannakakis, CostParams};
use crate::error::{Error, Result};
use crate::filter::{FilterKind, DEFAULT_SEED};
use crate::joinexec::{Strategy, StrategyKind};
use crate::query::QuerySpec;

#[derive(Debug, Parser)]
#[command(name = "predtrans", version, about = "Predicate transfer join engine and benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FilterArg {
    Bloom,
    Exact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a dataset and its query from a generator config.
    Gen {
        /// Generator config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Execute a query under one or more strategies and report.
    Run {
        #[arg(long)]
        query: PathBuf,
        /// none, bloom_join, yannakakis or pred_trans. Repeatable.
        #[arg(long = "strategy", required = true, value_parser = parse_strategy)]
        strategies: Vec<StrategyKind>,
        #[arg(long, value_enum, default_value = "bloom")]
        filter: FilterArg,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Comma-separated left-deep order overriding the query's.
        #[arg(long, value_delimiter = ',')]
        join_order: Option<Vec<String>>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, value_enum, default_value = "markdown")]
        report: FormatArg,
        /// Report file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the rows of each table that contribute to the join result.
    Oracle {
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value_t = crate::bench::oracle::DEFAULT_ORACLE_BOUND)]
        bound: usize,
    },
    /// Print predicted phase costs for a cost parameter JSON.
    Cost {
        #[arg(long)]
        params: PathBuf,
    },
}

fn parse_strategy(s: &str) -> std::result::Result<StrategyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gen { config, out } => {
            let cfg: DataGenConfig = read_json(&config)?;
            let (catalog, query) = generate_dataset(&cfg)?;
            write_dataset(&catalog, &query, &out)?;
            println!("wrote {} tables to {}", catalog.len(), out.display());
            Ok(())
        }
        Command::Run {
            query,
            strategies,
            filter,
            epsilon,
            seed,
            join_order,
            repeats,
            report,
            out,
        } => {
            let (mut q, base) = QuerySpec::load(&query)?;
            if let Some(order) = join_order {
                q = q.with_join_order(order)?;
            }
            let catalog = q.load_catalog(&base)?;
            let filter_kind = match filter {
                FilterArg::Bloom => FilterKind::bloom(epsilon)?,
                FilterArg::Exact => FilterKind::Exact,
            };
            let strategies: Vec<Strategy> = strategies
                .into_iter()
                .map(|k| {
                    // Bloom joins always use a Bloom filter.
                    let fk = match (k, filter_kind) {
                        (StrategyKind::BloomJoin, FilterKind::Exact) => FilterKind::bloom(epsilon),
                        (_, fk) => Ok(fk),
                    }?;
                    Ok(Strategy::new(k, fk, seed))
                })
                .collect::<Result<_>>()?;
            let r = run_experiment(&catalog, &q, &strategies, repeats)?;
            let format = match report {
                FormatArg::Markdown => ReportFormat::Markdown,
                FormatArg::Csv => ReportFormat::Csv,
                FormatArg::Json => ReportFormat::Json,
            };
            write_out(out.as_deref(), &render_report(&r, format)?)
        }
        Command::Oracle { query, bound } => {
            let (q, base) = QuerySpec::load(&query)?;
            let catalog = q.load_catalog(&base)?;
            let o = full_reducer_oracle_bounded(&catalog, &q, bound)?;
            let mut text = String::new();
            for t in &q.tables {
                let _ = writeln!(text, "{}\t{}", t.name, o.participating[t.name.as_str()].cardinality());
            }
            let _ = writeln!(text, "result_rows\t{}", o.result_rows);
            write_out(None, &text)
        }
        Command::Cost { params } => {
            let p: CostParams = read_json(&params)?;
            let y = predict_yannakakis(&p)?;
            let t = predict_pred_transfer(&p)?;
            let i = inflation_approx(p.epsilon, p.t.round() as u32);
            let mut text = String::new();
            let _ = writeln!(text, "| method | prefilter phase | join phase | total |");
            let _ = writeln!(text, "|---|---:|---:|---:|");
            let _ = writeln!(
                text,
                "| yannakakis | {} | {} | {} |",
                y.semijoin_phase,
                y.join_phase,
                y.semijoin_phase + y.join_phase
            );
            let _ = writeln!(
                text,
                "| pred_trans | {} | {} | {} |",
                t.transfer_phase,
                t.join_phase,
                t.transfer_phase + t.join_phase
            );
            let _ = writeln!(
                text,
                "\n(1+eps)^t = {:.6}, 1+eps*t = {:.6}, relative gap {:.3e}",
                i.exact, i.linearized, i.relative_gap
            );
            write_out(None, &text)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
