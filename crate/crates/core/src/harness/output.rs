use std::io::Write;

use serde::Serialize;

use super::config::{ExperimentConfig, Format};
use super::experiments::ResultRow;
use super::HarnessError;

pub const CSV_COLUMNS: [&str; 12] = [
    "experiment", "input", "code_n", "code_m", "lost", "branch", "alpha", "fidelity", "sigma", "settings", "shots", "seed",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fixed(x: f64) -> String {
    // Avoid printing "-0.000000".
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn fields(r: &ResultRow) -> [String; 12] {
    [
        r.experiment.to_string(),
        r.input.clone(),
        opt(r.code.map(|c| c.0)),
        opt(r.code.map(|c| c.1)),
        r.lost.clone(),
        r.branch.clone(),
        r.alpha.map(fixed).unwrap_or_default(),
        fixed(r.fidelity),
        fixed(r.sigma),
        opt(r.settings),
        r.shots.to_string(),
        r.seed.to_string(),
    ]
}

/// CSV with a leading `# losskit config: {json}` comment line.
pub fn write_csv<W: Write>(rows: &[ResultRow], cfg: &ExperimentConfig, mut out: W) -> Result<(), HarnessError> {
    let io = |e: std::io::Error| HarnessError::Io(e.to_string());
    writeln!(out, "# losskit config: {}", cfg.echo()).map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| HarnessError::Io(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record(fields(r)).map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

#[derive(Serialize)]
struct JsonRow<'a> {
    experiment: String,
    input: &'a str,
    code_n: Option<usize>,
    code_m: Option<usize>,
    lost: &'a str,
    branch: &'a str,
    alpha: Option<f64>,
    fidelity: f64,
    sigma: f64,
    settings: Option<usize>,
    shots: u64,
    seed: u64,
    config: &'a serde_json::Value,
}

/// JSON array; every row carries the resolved config.
pub fn write_json<W: Write>(rows: &[ResultRow], cfg: &ExperimentConfig, mut out: W) -> Result<(), HarnessError> {
    let echo = cfg.echo();
    let json: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            experiment: r.experiment.to_string(),
            input: &r.input,
            code_n: r.code.map(|c| c.0),
            code_m: r.code.map(|c| c.1),
            lost: &r.lost,
            branch: &r.branch,
            alpha: r.alpha,
            fidelity: r.fidelity,
            sigma: r.sigma,
            settings: r.settings,
            shots: r.shots,
            seed: r.seed,
            config: &echo,
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &json).map_err(|e| HarnessError::Io(e.to_string()))?;
    writeln!(out).map_err(|e| HarnessError::Io(e.to_string()))
}

pub fn write_rows<W: Write>(rows: &[ResultRow], cfg: &ExperimentConfig, out: W) -> Result<(), HarnessError> {
    match cfg.format {
        Format::Csv => write_csv(rows, cfg, out),
        Format::Json => write_json(rows, cfg, out),
    }
}
