//! Config-driven experiments behind the `losskit` binary.

mod config;
mod experiments;
mod output;

pub use config::{Experiment, ExperimentConfig, Format, Overrides, Placement};
pub use experiments::{
    cmd_cluster_fidelity, cmd_encode, cmd_oneway, cmd_recover, default_alphas, run, BranchFilter, ResultRow,
};
pub use output::{write_csv, write_json, write_rows, CSV_COLUMNS};

/// Failure classes, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numeric(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    pub(crate) fn config(field: &str, msg: String) -> Self {
        HarnessError::Config(format!("{field}: {msg}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numeric(_) => 3,
            HarnessError::Io(_) => 4,
        }
    }
}

/// Loads, resolves, runs and writes one experiment.
pub fn execute(command: Experiment, config_path: &std::path::Path, overrides: Overrides) -> Result<(), HarnessError> {
    let cfg = ExperimentConfig::load(config_path)?.resolve(command, overrides)?;
    let rows = run(&cfg)?;
    match &cfg.out {
        Some(path) => {
            let mut buf = Vec::new();
            write_rows(&rows, &cfg, &mut buf)?;
            std::fs::write(path, buf).map_err(|e| HarnessError::Io(format!("{path}: {e}")))
        }
        None => write_rows(&rows, &cfg, std::io::stdout().lock()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn resolved(text: &str, command: Experiment) -> Result<ExperimentConfig, HarnessError> {
        ExperimentConfig::from_toml(text)?.resolve(command, Overrides::default())
    }

    #[test]
    fn branch_filters() {
        let f = BranchFilter::parse("2:01").unwrap();
        assert_eq!((f.lost.as_deref(), f.bits.as_str()), (Some("2"), "01"));
        assert!(BranchFilter::parse("11").unwrap().lost.is_none());
        for bad in ["", "2:", "0x1", "a:b"] {
            assert!(BranchFilter::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn defaults_and_aliases() {
        let cfg = resolved("input = \"r\"\n", Experiment::Recover).unwrap();
        assert_eq!(cfg.inputs, ["r"]);
        assert_eq!(cfg.logical_inputs().unwrap()[0].0, "R");
        assert_eq!((cfg.code_n, cfg.code_m, cfg.format), (2, 2, Format::Csv));
        assert!(cfg.noise().is_noiseless());
    }

    #[test]
    fn exit_codes() {
        let e = resolved("code_m = 1\n", Experiment::Recover).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("code_m"));
        assert_eq!(HarnessError::Io("x".into()).exit_code(), 4);
        assert_eq!(HarnessError::from(crate::Error::DiscardAll).exit_code(), 3);
    }

    #[test]
    fn encode_size_limit() {
        assert!(resolved("code_n = 3\ncode_m = 2\n", Experiment::Encode).is_ok());
        assert!(resolved("code_n = 4\ncode_m = 2\n", Experiment::Encode).is_err());
    }

    #[test]
    fn noiseless_runs_are_exact() {
        let cfg = resolved("inputs = [\"V\", \"S\"]\ncode_n = 3\n", Experiment::Recover).unwrap();
        let rows = run(&cfg).unwrap();
        // 6 single losses; correlated Z readouts leave 8 of 16 branches possible.
        assert_eq!(rows.len(), 2 * (6 * 8 + 1));
        assert!(rows.iter().all(|r| (r.fidelity - 1.0).abs() < 1e-9));
    }

    proptest! {
        #[test]
        fn echo_round_trips(v in 0.0..=1.0f64, d in 0.0..=1.0f64, seed: u64, shots in 0u64..1_000_000) {
            let text = format!("white_noise_v = {v:?}\npair_dephasing_d = {d:?}\nseed = {seed}\nshots = {shots}\n");
            let cfg = resolved(&text, Experiment::Encode).unwrap();
            let back: ExperimentConfig = serde_json::from_value(cfg.echo()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
