//! Generation session: initial prompt, analysis, improvement rounds.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analyzer::{no_test_report, Analyzer, AnalyzerError, OutcomeClass, PbtReport, TestOutcome};
use crate::bundle::InputBundle;
use crate::llmclient::{extract_test_sources, LlmError, PbtSource, Provider, ProviderConfig};
use crate::promptkit::{build_improvement_message, build_initial_prompt, Conversation, Message, Role};

pub const DEFAULT_MAX_ATTEMPTS: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct LoopConfig {
    /// Improvement rounds after the initial one; 0 disables the loop.
    pub max_attempts: u32,
    /// Per-PBT analyzer timeout in seconds.
    pub timeout: f64,
    pub provider: ProviderConfig,
}

impl LoopConfig {
    pub fn new(provider: ProviderConfig) -> Self {
        Self { max_attempts: DEFAULT_MAX_ATTEMPTS, timeout: crate::analyzer::DEFAULT_TIMEOUT_SECS, provider }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PbtStatus {
    Verified,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedPbt {
    pub pbt_id: String,
    /// Test-function name; identity across improvement rounds.
    pub name: String,
    pub source: String,
    pub property_text: String,
    /// Set when the property comment was missing and the name stands in.
    pub property_flagged: bool,
    pub attempts_used: u32,
    pub final_report: PbtReport,
    pub status: PbtStatus,
}

impl GeneratedPbt {
    pub fn as_source(&self) -> PbtSource {
        PbtSource { name: self.name.clone(), source: self.source.clone(), property: Some(self.property_text.clone()) }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    pub subject_id: String,
    pub pbts: Vec<GeneratedPbt>,
    pub transcript: Conversation,
    pub llm_calls: u32,
    /// Present when no response ever yielded a test function.
    pub no_test: Option<PbtReport>,
}

impl Session {
    pub fn verified(&self) -> impl Iterator<Item = &GeneratedPbt> {
        self.pbts.iter().filter(|p| p.status == PbtStatus::Verified)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OrchestratorError {
    #[error("{source}")]
    Provider {
        source: LlmError,
        /// Everything exchanged before the failing call.
        transcript: Conversation,
    },
    #[error(transparent)]
    Analyzer(#[from] AnalyzerError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

struct Run<'a> {
    subject: &'a str,
    analyzer: Analyzer,
    ids: HashSet<String>,
}

impl Run<'_> {
    fn fresh_id(&mut self, name: &str) -> String {
        let base = format!("{}-{}", self.subject, name);
        let mut id = base.clone();
        let mut n = 2;
        while self.ids.contains(&id) {
            id = format!("{base}-{n}");
            n += 1;
        }
        self.ids.insert(id.clone());
        id
    }

    fn analyze(&self, pbt_id: &str, src: &PbtSource, attempt: u32) -> Result<PbtReport, AnalyzerError> {
        let mut report = self.analyzer.run_pbt(src, self.subject, attempt)?;
        report.pbt_id = pbt_id.to_string();
        Ok(report)
    }

    fn new_pbt(&mut self, src: PbtSource, attempt: u32) -> Result<GeneratedPbt, AnalyzerError> {
        let pbt_id = self.fresh_id(&src.name);
        let report = self.analyze(&pbt_id, &src, attempt)?;
        let (property_text, property_flagged) = match src.property {
            Some(p) => (p, false),
            None => (src.name.clone(), true),
        };
        Ok(GeneratedPbt {
            status: status_of(&report),
            pbt_id,
            name: src.name,
            source: src.source,
            property_text,
            property_flagged,
            attempts_used: attempt,
            final_report: report,
        })
    }
}

fn status_of(report: &PbtReport) -> PbtStatus {
    if report.passed() {
        PbtStatus::Verified
    } else {
        PbtStatus::Unresolved
    }
}

fn ask(provider: &Provider, transcript: &mut Conversation, calls: &mut u32) -> Result<String, OrchestratorError> {
    let resp = provider
        .complete(transcript)
        .map_err(|source| OrchestratorError::Provider { source, transcript: transcript.clone() })?;
    *calls += 1;
    // An empty reply still has to appear in the transcript to keep turns alternating.
    transcript.push(Message { role: Role::Assistant, text: resp.text.clone() });
    Ok(resp.text)
}

pub fn generate_pbts(
    bundle: &InputBundle,
    cfg: &LoopConfig,
    provider: &Provider,
    analyzer: &Analyzer,
) -> Result<Session, OrchestratorError> {
    let mut run = Run {
        subject: &bundle.subject_id,
        analyzer: analyzer.clone().with_timeout(cfg.timeout)?,
        ids: HashSet::new(),
    };
    let mut transcript = build_initial_prompt(bundle);
    let mut calls = 0;
    let mut pbts: Vec<GeneratedPbt> = Vec::new();

    let first = ask(provider, &mut transcript, &mut calls)?;
    // Raw response standing in for a test while nothing has been extracted.
    let mut pending: Option<(PbtSource, PbtReport)> = None;
    match extract_test_sources(&first) {
        Ok(srcs) => {
            for s in srcs {
                pbts.push(run.new_pbt(s, 0)?);
            }
        }
        Err(_) => pending = Some(no_test_pair(&bundle.subject_id, &first, 0)),
    }

    for attempt in 1..=cfg.max_attempts {
        let failing: Vec<usize> = (0..pbts.len()).filter(|&i| pbts[i].status != PbtStatus::Verified).collect();
        if failing.is_empty() && pending.is_none() {
            break;
        }
        let sources: Vec<PbtSource> = failing.iter().map(|&i| pbts[i].as_source()).collect();
        let mut pairs: Vec<(&PbtSource, &PbtReport)> = sources.iter().zip(failing.iter().map(|&i| &pbts[i].final_report)).collect();
        if let Some((s, r)) = &pending {
            pairs.push((s, r));
        }
        let msg = build_improvement_message(&pairs).expect("only failing tests are sent");
        transcript.push(msg);
        let reply = ask(provider, &mut transcript, &mut calls)?;
        let Ok(corrections) = extract_test_sources(&reply) else {
            if pending.is_some() {
                pending = Some(no_test_pair(&bundle.subject_id, &reply, attempt));
            }
            continue;
        };
        pending = None;
        let mut open: Vec<usize> = failing;
        for src in corrections {
            if let Some(k) = open.iter().position(|&i| pbts[i].name == src.name) {
                let i = open.remove(k);
                let p = &mut pbts[i];
                let report = run.analyze(&p.pbt_id, &src, attempt)?;
                if let Some(text) = src.property {
                    p.property_text = text;
                    p.property_flagged = false;
                }
                p.source = src.source;
                p.attempts_used = attempt;
                p.status = status_of(&report);
                p.final_report = report;
            } else {
                pbts.push(run.new_pbt(src, attempt)?);
            }
        }
    }

    let no_test = pending.map(|(_, r)| r);
    Ok(Session { subject_id: bundle.subject_id.clone(), pbts, transcript, llm_calls: calls, no_test })
}

fn no_test_pair(subject: &str, response: &str, attempt: u32) -> (PbtSource, PbtReport) {
    let src = PbtSource { name: "response".into(), source: response.to_string(), property: None };
    (src, no_test_report(&format!("{subject}-response"), subject, attempt))
}

/// Ledger row as written to disk. Durations are left out so replayed
/// sessions are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub pbt_id: String,
    pub name: String,
    pub file: String,
    pub property_text: String,
    pub property_flagged: bool,
    pub status: PbtStatus,
    pub attempts_used: u32,
    pub outcome: OutcomeClass,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    pub subject_id: String,
    pub llm_calls: u32,
    pub pbts: Vec<LedgerEntry>,
    #[serde(default)]
    pub no_test: Option<NoTestRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoTestRecord {
    pub attempt: u32,
    pub outcome: OutcomeClass,
    pub message: String,
}

impl Ledger {
    pub fn load(path: &Path) -> Result<Self, OrchestratorError> {
        let io = |source| OrchestratorError::Io { path: path.to_path_buf(), source };
        let text = std::fs::read_to_string(path).map_err(io)?;
        serde_json::from_str(&text).map_err(|e| io(std::io::Error::new(std::io::ErrorKind::InvalidData, e)))
    }
}

impl GeneratedPbt {
    /// Rebuilds a ledger row together with its source file.
    pub fn from_ledger(e: &LedgerEntry, subject_id: &str, source: String) -> Self {
        GeneratedPbt {
            pbt_id: e.pbt_id.clone(),
            name: e.name.clone(),
            source,
            property_text: e.property_text.clone(),
            property_flagged: e.property_flagged,
            attempts_used: e.attempts_used,
            final_report: PbtReport {
                pbt_id: e.pbt_id.clone(),
                subject_id: subject_id.to_string(),
                attempt: e.attempts_used,
                outcome: TestOutcome { class: e.outcome, message: e.message.clone(), duration: 0.0 },
            },
            status: e.status,
        }
    }
}

pub fn ledger_of(session: &Session) -> Ledger {
    Ledger {
        subject_id: session.subject_id.clone(),
        llm_calls: session.llm_calls,
        pbts: session
            .pbts
            .iter()
            .map(|p| LedgerEntry {
                pbt_id: p.pbt_id.clone(),
                name: p.name.clone(),
                file: format!("pbts/{}.py", p.pbt_id),
                property_text: p.property_text.clone(),
                property_flagged: p.property_flagged,
                status: p.status,
                attempts_used: p.attempts_used,
                outcome: p.final_report.outcome.class,
                message: p.final_report.outcome.message.clone(),
            })
            .collect(),
        no_test: session.no_test.as_ref().map(|r| NoTestRecord {
            attempt: r.attempt,
            outcome: r.outcome.class,
            message: r.outcome.message.clone(),
        }),
    }
}

/// Writes `pbts/<id>.py`, `ledger.json` and `transcript.json` under `out`.
pub fn write_session(session: &Session, out: &Path) -> Result<(), OrchestratorError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| OrchestratorError::Io { path, source }
    };
    let pbt_dir = out.join("pbts");
    std::fs::create_dir_all(&pbt_dir).map_err(io(&pbt_dir))?;
    for p in &session.pbts {
        let f = pbt_dir.join(format!("{}.py", p.pbt_id));
        std::fs::write(&f, &p.source).map_err(io(&f))?;
    }
    let ledger = out.join("ledger.json");
    let json = serde_json::to_string_pretty(&ledger_of(session)).expect("ledger serializes") + "\n";
    std::fs::write(&ledger, json).map_err(io(&ledger))?;
    let transcript = out.join("transcript.json");
    let json = serde_json::to_string_pretty(&session.transcript).expect("transcript serializes") + "\n";
    std::fs::write(&transcript, json).map_err(io(&transcript))?;
    Ok(())
}
