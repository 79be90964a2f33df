//! Rendering experiment reports and single-pair metrics as JSON, CSV or a
//! Markdown table. PSNR is printed with 2 decimals and SSIM/F-measure with 4.

use std::fmt::Write as _;

use srbin_core::metrics::MetricReport;

use crate::error::Result;
use crate::experiment::ExperimentReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

fn fmt_psnr(v: Option<f64>) -> String {
    v.map_or_else(|| "inf".to_string(), |v| format!("{v:.2}"))
}

fn fmt_unit(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

fn opt_csv(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn render_report(report: &ExperimentReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(report.to_json() + "\n"),
        Format::Csv => report_csv(report),
        Format::Markdown => Ok(report_markdown(report)),
    }
}

fn report_markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "### {}", report.dataset_name);
    out.push('\n');
    out.push_str("| Method | PSNR | SSIM | FM |\n");
    out.push_str("|---|---:|---:|---:|\n");
    for (branch, agg) in &report.aggregates {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            branch.label(),
            fmt_psnr(agg.psnr_db),
            fmt_unit(Some(agg.ssim)),
            fmt_unit(agg.f_measure)
        );
    }
    if let Some(d) = &report.deltas {
        let psnr = d
            .psnr_db
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}"));
        let _ = writeln!(
            out,
            "| Δ (w/ SR − w/o SR) | {} | {} | {} |",
            psnr,
            fmt_unit(Some(d.ssim)),
            fmt_unit(d.f_measure)
        );
    }
    out.push('\n');
    for (branch, agg) in &report.aggregates {
        let excluded = report.excluded.get(branch).copied().unwrap_or(0);
        let _ = writeln!(
            out,
            "- {}: images {}, infinite PSNR {}, excluded {}",
            branch.label(),
            agg.images,
            agg.infinite_psnr,
            excluded
        );
    }
    let _ = writeln!(
        out,
        "- SR: {}; segmentation: {}",
        report.config.sr, report.config.seg
    );
    out
}

pub const CSV_HEADER: [&str; 7] = [
    "row",
    "psnr_db",
    "ssim",
    "f_measure",
    "images",
    "infinite_psnr",
    "excluded",
];

fn report_csv(report: &ExperimentReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for (branch, agg) in &report.aggregates {
        let excluded = report.excluded.get(branch).copied().unwrap_or(0);
        w.write_record([
            branch.name().to_string(),
            opt_csv(agg.psnr_db),
            agg.ssim.to_string(),
            opt_csv(agg.f_measure),
            agg.images.to_string(),
            agg.infinite_psnr.to_string(),
            excluded.to_string(),
        ])?;
    }
    if let Some(d) = &report.deltas {
        w.write_record([
            "delta".to_string(),
            opt_csv(d.psnr_db),
            d.ssim.to_string(),
            opt_csv(d.f_measure),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    Ok(finish_csv(w))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv output is UTF-8")
}

/// One prediction/ground-truth comparison, as printed by `eval`.
pub fn render_metrics(m: &MetricReport, format: Format) -> Result<String> {
    let fm = m.binary;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(m).expect("metrics serialize") + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "psnr_db", "mse", "ssim", "precision", "recall", "f_measure", "tp", "fp", "fn", "tn",
            ])?;
            let count = |f: fn(&srbin_core::FMeasure) -> u64| fm.map_or(String::new(), |b| f(&b).to_string());
            w.write_record([
                opt_csv(m.psnr_db),
                m.mse.to_string(),
                m.ssim.to_string(),
                opt_csv(fm.map(|b| b.precision)),
                opt_csv(fm.map(|b| b.recall)),
                opt_csv(fm.map(|b| b.f_measure)),
                count(|b| b.tp),
                count(|b| b.fp),
                count(|b| b.fn_),
                count(|b| b.tn),
            ])?;
            Ok(finish_csv(w))
        }
        Format::Markdown => Ok(format!(
            "| PSNR | SSIM | FM | Precision | Recall |\n|---:|---:|---:|---:|---:|\n| {} | {} | {} | {} | {} |\n",
            fmt_psnr(m.psnr_db),
            fmt_unit(Some(m.ssim)),
            fmt_unit(fm.map(|b| b.f_measure)),
            fmt_unit(fm.map(|b| b.precision)),
            fmt_unit(fm.map(|b| b.recall)),
        )),
    }
}
