use std::fs;
use std::time::{Duration, Instant};

use crkit::Budget;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input { path: String, source: crkit::Error },
    #[error(transparent)]
    Core(#[from] crkit::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(crkit::Error::BudgetExceeded(_)) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Structured record of one invocation. Field order is part of the format.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 over the bytes of all input files, in argument order.
    pub input_digest: Option<String>,
    pub seed: u64,
    pub version: &'static str,
    pub verdicts: Map<String, Value>,
    pub details: Map<String, Value>,
    pub timings_ms: Map<String, Value>,
}

pub struct Run {
    pub report: RunReport,
    pub text: String,
    digest: Option<Sha256>,
    deadline: Option<Instant>,
}

impl Run {
    pub fn new(command: &str, seed: u64, budget_ms: Option<u64>) -> Self {
        Run {
            report: RunReport {
                command: command.to_string(),
                input_digest: None,
                seed,
                version: env!("CARGO_PKG_VERSION"),
                verdicts: Map::new(),
                details: Map::new(),
                timings_ms: Map::new(),
            },
            text: String::new(),
            digest: None,
            deadline: budget_ms.map(|ms| Instant::now() + Duration::from_millis(ms)),
        }
    }

    /// Reads an input file (`-` for stdin) and folds it into the digest.
    pub fn read(&mut self, path: &str) -> CliResult<String> {
        let bytes = if path == "-" {
            let mut buf = Vec::new();
            std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf).map(|_| buf)
        } else {
            fs::read(path)
        }
        .map_err(|source| CliError::Io {
            path: path.to_string(),
            source,
        })?;
        self.digest.get_or_insert_with(Sha256::new).update(&bytes);
        self.report.input_digest = self.digest.clone().map(|d| format!("{:x}", d.finalize()));
        String::from_utf8(bytes).map_err(|_| CliError::Usage(format!("{path}: not UTF-8 text")))
    }

    pub fn graph(&mut self, path: &str) -> CliResult<crkit::ColoredGraph> {
        let text = self.read(path)?;
        crkit::io::load(&text).map_err(|source| CliError::Input {
            path: path.to_string(),
            source,
        })
    }

    /// Oracle budget: the default step limit plus whatever wall-clock time
    /// remains of `--budget-ms`.
    pub fn budget(&self) -> Budget {
        match self.deadline {
            Some(d) => Budget::default().with_deadline(d.saturating_duration_since(Instant::now())),
            None => Budget::default(),
        }
    }

    pub fn timed<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        self.report
            .timings_ms
            .insert(phase.to_string(), Value::from(ms));
        out
    }

    pub fn verdict(&mut self, key: &str, value: impl Serialize) {
        self.report.verdicts.insert(key.to_string(), json(value));
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        self.report.details.insert(key.to_string(), json(value));
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn past_deadline(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() > d)
    }

    /// Text output: the command's own lines, then one line per verdict.
    pub fn render_text(&self) -> String {
        let mut out = self.text.clone();
        for (k, v) in &self.report.verdicts {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}: {v}\n"));
        }
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("report serializes") + "\n"
    }
}

pub fn json(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("value serializes")
}
