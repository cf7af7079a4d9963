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

//! Report rendering.

use std::fmt::Write;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::experiment::ExperimentReport;
use crate::error::{Error, Result};
use crate::joinexec::BuildSide;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Markdown,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::InvalidConfig(format!("unknown report format '{s}'"))),
        }
    }
}

fn side(b: BuildSide) -> &'static str {
    match b {
        BuildSide::Auto => "auto",
        BuildSide::Left => "left",
        BuildSide::Right => "right",
    }
}

fn ms(ns: u64) -> String {
    format!("{:.3}", ns as f64 / 1e6)
}

pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report)
            .map(|s| s + "\n")
            .map_err(|e| Error::Json {
                path: "<report>".into(),
                source: e,
            }),
        ReportFormat::Csv => Ok(render_csv(report)),
        ReportFormat::Markdown => Ok(render_markdown(report)),
    }
}

fn render_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("strategy,step,table,build,ht_rows,pr_rows,out_rows\n");
    for s in &report.strategies {
        for j in &s.join_steps {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                s.strategy,
                j.step,
                j.table,
                side(j.build),
                j.ht_rows,
                j.pr_rows,
                j.out_rows
            );
        }
    }
    out
}

fn render_markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}\n", report.query);
    let _ = writeln!(out, "Join order: {}", report.join_order.join(" > "));
    let _ = writeln!(out, "Input rows: {}", report.input_rows);
    let _ = writeln!(out, "Timed repeats: {}\n", report.repeats);

    let _ = writeln!(out, "| strategy | result rows | checksum | HT+PR rows | max intermediate | prefilter ms | join ms |");
    let _ = writeln!(out, "|---|---:|---|---:|---:|---:|---:|");
    for s in &report.strategies {
        let (pre, join) = s
            .timings
            .map_or(("-".to_string(), "-".to_string()), |t| (ms(t.prefilter_ns), ms(t.join_ns)));
        let _ = writeln!(
            out,
            "| {} | {} | {:016x} | {} | {} | {pre} | {join} |",
            s.strategy, s.result_rows, s.checksum, s.join_input_rows, s.max_intermediate
        );
    }

    for s in &report.strategies {
        let _ = writeln!(out, "\n## {}\n", s.strategy);
        let _ = writeln!(out, "| step | table | build | HT | PR | out |");
        let _ = writeln!(out, "|---:|---|---|---:|---:|---:|");
        for j in &s.join_steps {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                j.step,
                j.table,
                side(j.build),
                j.ht_rows,
                j.pr_rows,
                j.out_rows
            );
        }
        let _ = writeln!(out, "\n| table | rows | after prefilter |");
        let _ = writeln!(out, "|---|---:|---:|");
        for t in &s.table_rows {
            let _ = writeln!(out, "| {} | {} | {} |", t.table, t.rows_before, t.rows_after_prefilter);
        }
        if let Some(stats) = &s.transfer_stats {
            let _ = writeln!(
                out,
                "\nPrefilter work: {} hash tables, {} hash ops, {} filters built, {} filter ops.",
                stats.hash_table_builds(),
                stats.hash_ops(),
                stats.filters_built(),
                stats.filter_ops()
            );
        }
        if let Some(c) = s.fitted.c_y {
            let _ = writeln!(out, "Fitted c_y: {c:.3}");
        }
        if let Some(c) = s.fitted.c_p {
            let _ = writeln!(out, "Fitted c_p: {c:.3}");
        }
    }
    out
}

/// Renders `report` and writes it to `path`.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = render_report(report, format)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
