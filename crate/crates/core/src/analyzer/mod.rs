//! Runs a candidate test in a child process and classifies the outcome.
//!
//! The child is this crate's own binary invoked as `chekprop harness`. It
//! writes a JSON [`HarnessResult`] to a file in the scratch directory; the
//! exit code mirrors the class for callers that only look at the status:
//!
//! | code | class |
//! |------|-------|
//! | 0 | pass |
//! | 1 | assertion_failure |
//! | 2 | collection_error |
//! | 3 | syntax_error |
//! | 4 | runtime_exception |
//! | 5 | no_test_produced |

mod gpiozero;
pub mod harness;
mod pytest;
mod strategies;
pub(crate) mod subjects;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::llmclient::PbtSource;

pub use harness::{run_harness, HarnessOptions, HarnessResult};

pub const DEFAULT_TIMEOUT_SECS: f64 = 60.0;
pub const DEFAULT_OUTPUT_CAP: usize = 64 * 1024;

/// Subjects whose import surface the harness provides.
pub const SUBJECTS: &[&str] = &[
    "tcs",
    "pcs",
    "laser_tripwire",
    "line_following_robot",
    "ultrasonic_theremin",
    "presence_indicator",
    "input_device",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeClass {
    Pass,
    SyntaxError,
    CollectionError,
    RuntimeException,
    AssertionFailure,
    Timeout,
    NoTestProduced,
}

impl OutcomeClass {
    pub const ALL: [OutcomeClass; 7] = [
        OutcomeClass::Pass,
        OutcomeClass::SyntaxError,
        OutcomeClass::CollectionError,
        OutcomeClass::RuntimeException,
        OutcomeClass::AssertionFailure,
        OutcomeClass::Timeout,
        OutcomeClass::NoTestProduced,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeClass::Pass => "pass",
            OutcomeClass::SyntaxError => "syntax_error",
            OutcomeClass::CollectionError => "collection_error",
            OutcomeClass::RuntimeException => "runtime_exception",
            OutcomeClass::AssertionFailure => "assertion_failure",
            OutcomeClass::Timeout => "timeout",
            OutcomeClass::NoTestProduced => "no_test_produced",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            OutcomeClass::Pass => 0,
            OutcomeClass::AssertionFailure => 1,
            OutcomeClass::CollectionError => 2,
            OutcomeClass::SyntaxError => 3,
            OutcomeClass::RuntimeException => 4,
            OutcomeClass::NoTestProduced => 5,
            OutcomeClass::Timeout => 124,
        }
    }

    pub fn from_exit_code(code: i32) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.exit_code() == code)
    }
}

impl std::fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OutcomeClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown outcome class '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub class: OutcomeClass,
    pub message: String,
    /// Wall-clock seconds.
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PbtReport {
    pub pbt_id: String,
    pub subject_id: String,
    pub attempt: u32,
    pub outcome: TestOutcome,
}

impl PbtReport {
    pub fn passed(&self) -> bool {
        self.outcome.class == OutcomeClass::Pass
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AnalyzerError {
    #[error("unknown subject '{0}'")]
    UnknownSubject(String),
    #[error("timeout must be positive")]
    BadTimeout,
    #[error("cannot start harness {exe}: {source}")]
    Spawn { exe: PathBuf, source: std::io::Error },
    #[error("scratch directory: {0}")]
    Scratch(std::io::Error),
}

pub fn check_subject(subject_id: &str) -> Result<(), AnalyzerError> {
    if SUBJECTS.contains(&subject_id) {
        Ok(())
    } else {
        Err(AnalyzerError::UnknownSubject(subject_id.to_string()))
    }
}

/// Parent-side runner configuration.
#[derive(Debug, Clone)]
pub struct Analyzer {
    /// Binary that implements the `harness` subcommand.
    pub exe: PathBuf,
    pub timeout: Duration,
    pub output_cap: usize,
    pub seed: u64,
    pub max_examples: Option<u32>,
}

/// Extra harness behaviour used by effectiveness measurement.
#[derive(Debug, Clone, Default)]
pub struct RecordRequest {
    /// Receives one JSON line per generated example.
    pub path: PathBuf,
    /// Keep generating after a failing example.
    pub continue_on_failure: bool,
}

/// What the parent observed besides the classified outcome.
#[derive(Debug, Clone, Default)]
pub struct ChildOutput {
    pub stdout: String,
    pub stderr: String,
    pub truncated: bool,
}

impl Analyzer {
    pub fn new(exe: impl Into<PathBuf>) -> Self {
        Self {
            exe: exe.into(),
            timeout: Duration::from_secs_f64(DEFAULT_TIMEOUT_SECS),
            output_cap: DEFAULT_OUTPUT_CAP,
            seed: 0,
            max_examples: None,
        }
    }

    /// Uses the running executable, which must be the `chekprop` binary.
    pub fn current() -> std::io::Result<Self> {
        Ok(Self::new(std::env::current_exe()?))
    }

    pub fn with_timeout(mut self, secs: f64) -> Result<Self, AnalyzerError> {
        if !(secs > 0.0 && secs.is_finite()) {
            return Err(AnalyzerError::BadTimeout);
        }
        self.timeout = Duration::from_secs_f64(secs);
        Ok(self)
    }

    pub fn run_pbt(&self, source: &PbtSource, subject_id: &str, attempt: u32) -> Result<PbtReport, AnalyzerError> {
        self.run_pbt_recorded(source, subject_id, attempt, None).map(|(r, _)| r)
    }

    pub fn run_pbt_recorded(
        &self,
        source: &PbtSource,
        subject_id: &str,
        attempt: u32,
        record: Option<&RecordRequest>,
    ) -> Result<(PbtReport, ChildOutput), AnalyzerError> {
        check_subject(subject_id)?;
        let scratch = tempfile::Builder::new().prefix("chekprop-run-").tempdir().map_err(AnalyzerError::Scratch)?;
        let file = scratch.path().join(format!("{}.py", file_stem(&source.name)));
        std::fs::write(&file, &source.source).map_err(AnalyzerError::Scratch)?;
        let result_path = scratch.path().join("result.json");

        let mut cmd = Command::new(&self.exe);
        cmd.arg("harness")
            .arg("--subject")
            .arg(subject_id)
            .arg("--file")
            .arg(&file)
            .arg("--result")
            .arg(&result_path)
            .arg("--seed")
            .arg(self.seed.to_string())
            .current_dir(scratch.path())
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped());
        if let Some(n) = self.max_examples {
            cmd.arg("--max-examples").arg(n.to_string());
        }
        if let Some(r) = record {
            cmd.arg("--record").arg(&r.path);
            if r.continue_on_failure {
                cmd.arg("--measure");
            }
        }

        let start = Instant::now();
        let mut child = cmd.spawn().map_err(|source| AnalyzerError::Spawn { exe: self.exe.clone(), source })?;
        let cap = self.output_cap;
        let out_reader = child.stdout.take().map(|s| std::thread::spawn(move || read_capped(s, cap)));
        let err_reader = child.stderr.take().map(|s| std::thread::spawn(move || read_capped(s, cap)));

        let status = loop {
            match child.try_wait() {
                Ok(Some(st)) => break Some(st),
                Ok(None) if start.elapsed() >= self.timeout => {
                    let _ = child.kill();
                    let _ = child.wait();
                    break None;
                }
                Ok(None) => std::thread::sleep(Duration::from_millis(5)),
                Err(_) => {
                    let _ = child.kill();
                    let _ = child.wait();
                    break None;
                }
            }
        };
        let duration = start.elapsed().as_secs_f64();
        let join = |h: Option<std::thread::JoinHandle<(String, bool)>>| h.and_then(|h| h.join().ok()).unwrap_or_default();
        let (stdout, t1) = join(out_reader);
        let (stderr, t2) = join(err_reader);
        let output = ChildOutput { stdout, stderr, truncated: t1 || t2 };

        let (class, message) = match status {
            None => (OutcomeClass::Timeout, format!("timed out after {} s", fmt_secs(self.timeout.as_secs_f64()))),
            Some(st) => match read_result(&result_path) {
                Some(r) => (r.class, r.message),
                None => {
                    let tail = output.stderr.trim().to_string();
                    let msg = if tail.is_empty() { format!("harness exited with {st}") } else { tail };
                    let class = st
                        .code()
                        .and_then(OutcomeClass::from_exit_code)
                        .filter(|c| *c != OutcomeClass::Pass)
                        .unwrap_or(OutcomeClass::RuntimeException);
                    (class, msg)
                }
            },
        };
        let report = PbtReport {
            pbt_id: source.name.clone(),
            subject_id: subject_id.to_string(),
            attempt,
            outcome: TestOutcome { class, message, duration },
        };
        Ok((report, output))
    }
}

/// Outcome for a response from which nothing could be extracted.
pub fn no_test_report(pbt_id: &str, subject_id: &str, attempt: u32) -> PbtReport {
    PbtReport {
        pbt_id: pbt_id.to_string(),
        subject_id: subject_id.to_string(),
        attempt,
        outcome: TestOutcome {
            class: OutcomeClass::NoTestProduced,
            message: "response contains no test function".into(),
            duration: 0.0,
        },
    }
}

fn fmt_secs(s: f64) -> String {
    if s.fract() == 0.0 {
        format!("{s:.0}")
    } else {
        format!("{s}")
    }
}

fn file_stem(name: &str) -> String {
    let clean: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
    if clean.starts_with("test") {
        clean
    } else {
        format!("test_{clean}")
    }
}

fn read_result(path: &Path) -> Option<HarnessResult> {
    serde_json::from_str(&std::fs::read_to_string(path).ok()?).ok()
}

/// Reads the whole stream but keeps at most `cap` bytes.
fn read_capped(mut r: impl Read, cap: usize) -> (String, bool) {
    let mut kept = Vec::new();
    let mut buf = [0u8; 8192];
    let mut truncated = false;
    loop {
        match r.read(&mut buf) {
            Ok(0) | Err(_) => break,
            Ok(n) => {
                let room = cap.saturating_sub(kept.len());
                kept.extend_from_slice(&buf[..n.min(room)]);
                truncated |= n > room;
            }
        }
    }
    (String::from_utf8_lossy(&kept).into_owned(), truncated)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_names_and_codes_round_trip() {
        for c in OutcomeClass::ALL {
            assert_eq!(c.as_str().parse::<OutcomeClass>().unwrap(), c);
            assert_eq!(OutcomeClass::from_exit_code(c.exit_code()), Some(c));
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.as_str()));
        }
    }

    #[test]
    fn capped_reader_drains_everything() {
        let data = vec![b'x'; 100_000];
        let (s, t) = read_capped(&data[..], 1000);
        assert_eq!(s.len(), 1000);
        assert!(t);
        let (s, t) = read_capped(&b"ok"[..], 1000);
        assert_eq!((s.as_str(), t), ("ok", false));
    }

    #[test]
    fn subject_lookup() {
        assert!(check_subject("pcs").is_ok());
        assert!(matches!(check_subject("remote_buggy"), Err(AnalyzerError::UnknownSubject(_))));
        assert!(Analyzer::new("x").with_timeout(0.0).is_err());
    }
}
