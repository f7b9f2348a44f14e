//! LLM provider backends (live, replay, scripted, recording) and reduction of
//! a response to runnable test sources.

use std::collections::{BTreeMap, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::promptkit::{Conversation, Message, Role};

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("no fixture for conversation digest {digest}")]
    FixtureMissing { digest: String },
    #[error("scripted provider has no responses left")]
    ScriptExhausted,
    #[error("provider error (status {status}): {msg}")]
    Provider { status: u16, msg: String },
    #[error("invalid provider configuration: {0}")]
    Config(String),
    #[error("cannot complete an empty conversation")]
    EmptyConversation,
    #[error("{path}: {msg}")]
    Fixture { path: PathBuf, msg: String },
}

impl LlmError {
    /// Exhausted scripts count as missing fixtures for callers that only
    /// distinguish "no recorded answer" from transport failures.
    pub fn is_fixture_missing(&self) -> bool {
        matches!(self, LlmError::FixtureMissing { .. } | LlmError::ScriptExhausted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Live,
    Replay,
    Scripted,
}

impl std::str::FromStr for ProviderKind {
    type Err = LlmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "live" => Ok(ProviderKind::Live),
            "replay" => Ok(ProviderKind::Replay),
            "scripted" => Ok(ProviderKind::Scripted),
            other => Err(LlmError::Config(format!("unknown provider '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub provider: ProviderKind,
    #[serde(default = "default_model")]
    pub model_name: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "one")]
    pub sample_count: u32,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default)]
    pub fixture_dir: Option<PathBuf>,
}

fn default_model() -> String {
    "gpt-4o".to_string()
}

fn one() -> u32 {
    1
}

impl ProviderConfig {
    pub fn replay(dir: impl Into<PathBuf>) -> Self {
        Self { fixture_dir: Some(dir.into()), ..Self::new(ProviderKind::Replay) }
    }

    pub fn new(provider: ProviderKind) -> Self {
        Self {
            provider,
            model_name: default_model(),
            temperature: 0.0,
            sample_count: 1,
            endpoint: None,
            api_key_env: None,
            fixture_dir: None,
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.sample_count != 1 {
            return Err(LlmError::Config("only a single sample per request is supported".into()));
        }
        match self.provider {
            ProviderKind::Replay if self.fixture_dir.is_none() => Err(LlmError::Config("replay requires fixture_dir".into())),
            ProviderKind::Live if self.endpoint.is_none() => Err(LlmError::Config("live requires endpoint".into())),
            ProviderKind::Live if self.api_key_env.is_none() => Err(LlmError::Config("live requires api_key_env".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LlmResponse {
    pub text: String,
    pub provider_meta: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct CanonicalMessage<'a> {
    role: Role,
    text: &'a str,
}

/// Compact JSON of `[{"role", "text"}, ...]`; the replay key is its SHA-256.
pub fn canonical_json(conv: &Conversation) -> String {
    let msgs: Vec<CanonicalMessage> = conv.messages().iter().map(|m| CanonicalMessage { role: m.role, text: &m.text }).collect();
    serde_json::to_string(&msgs).expect("messages serialize")
}

pub fn conversation_digest(conv: &Conversation) -> String {
    hex::encode(Sha256::digest(canonical_json(conv).as_bytes()))
}

/// One replay fixture file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub digest: String,
    pub conversation: Vec<Message>,
    pub response: String,
}

pub fn fixture_path(dir: &Path, digest: &str) -> PathBuf {
    dir.join(format!("{digest}.json"))
}

pub fn write_fixture(dir: &Path, conv: &Conversation, response: &str) -> Result<PathBuf, LlmError> {
    let digest = conversation_digest(conv);
    let rec = FixtureRecord { digest: digest.clone(), conversation: conv.messages().to_vec(), response: response.to_string() };
    let path = fixture_path(dir, &digest);
    let io = |e: std::io::Error| LlmError::Fixture { path: path.clone(), msg: e.to_string() };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut text = serde_json::to_string_pretty(&rec).expect("fixture serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(io)?;
    Ok(path)
}

pub fn read_fixture(dir: &Path, digest: &str) -> Result<FixtureRecord, LlmError> {
    let path = fixture_path(dir, digest);
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(LlmError::FixtureMissing { digest: digest.to_string() })
        }
        Err(e) => return Err(LlmError::Fixture { path, msg: e.to_string() }),
    };
    serde_json::from_str(&text).map_err(|e| LlmError::Fixture { path, msg: e.to_string() })
}

pub enum Provider {
    Live { config: ProviderConfig, client: reqwest::blocking::Client },
    Replay { dir: PathBuf },
    Scripted(Mutex<VecDeque<String>>),
    /// Forwards to `inner` and stores every exchange as a replay fixture.
    Recording { inner: Box<Provider>, dir: PathBuf },
}

impl Provider {
    pub fn from_config(config: &ProviderConfig) -> Result<Self, LlmError> {
        config.validate()?;
        Ok(match config.provider {
            ProviderKind::Live => {
                let client = reqwest::blocking::Client::builder()
                    .timeout(std::time::Duration::from_secs(300))
                    .build()
                    .map_err(|e| LlmError::Config(e.to_string()))?;
                Provider::Live { config: config.clone(), client }
            }
            ProviderKind::Replay => Provider::Replay { dir: config.fixture_dir.clone().expect("validated") },
            ProviderKind::Scripted => Provider::Scripted(Mutex::new(VecDeque::new())),
        })
    }

    pub fn scripted<I: IntoIterator<Item = S>, S: Into<String>>(responses: I) -> Self {
        Provider::Scripted(Mutex::new(responses.into_iter().map(Into::into).collect()))
    }

    pub fn complete(&self, conv: &Conversation) -> Result<LlmResponse, LlmError> {
        if conv.is_empty() {
            return Err(LlmError::EmptyConversation);
        }
        match self {
            Provider::Replay { dir } => {
                let digest = conversation_digest(conv);
                let rec = read_fixture(dir, &digest)?;
                let meta = BTreeMap::from([("digest".to_string(), digest)]);
                Ok(LlmResponse { text: rec.response, provider_meta: meta })
            }
            Provider::Scripted(queue) => {
                let text = queue.lock().expect("script queue lock").pop_front().ok_or(LlmError::ScriptExhausted)?;
                Ok(LlmResponse { text, provider_meta: BTreeMap::new() })
            }
            Provider::Live { config, client } => live_complete(config, client, conv),
            Provider::Recording { inner, dir } => {
                let resp = inner.complete(conv)?;
                write_fixture(dir, conv, &resp.text)?;
                Ok(resp)
            }
        }
    }
}

/// Chat-completions style request against an OpenAI-compatible endpoint.
fn live_complete(config: &ProviderConfig, client: &reqwest::blocking::Client, conv: &Conversation) -> Result<LlmResponse, LlmError> {
    let key_var = config.api_key_env.as_deref().expect("validated");
    let key = std::env::var(key_var).map_err(|_| LlmError::Config(format!("environment variable {key_var} is not set")))?;
    let messages: Vec<serde_json::Value> = conv
        .messages()
        .iter()
        .map(|m| serde_json::json!({ "role": m.role, "content": m.text }))
        .collect();
    let body = serde_json::json!({
        "model": config.model_name,
        "temperature": config.temperature,
        "n": config.sample_count,
        "messages": messages,
    });
    let url = format!("{}/chat/completions", config.endpoint.as_deref().expect("validated").trim_end_matches('/'));
    let resp = client
        .post(url)
        .bearer_auth(key)
        .json(&body)
        .send()
        .map_err(|e| LlmError::Provider { status: e.status().map_or(0, |s| s.as_u16()), msg: e.to_string() })?;
    let status = resp.status();
    let json: serde_json::Value = resp.json().map_err(|e| LlmError::Provider { status: status.as_u16(), msg: e.to_string() })?;
    if !status.is_success() {
        return Err(LlmError::Provider { status: status.as_u16(), msg: json.to_string() });
    }
    let text = json["choices"][0]["message"]["content"]
        .as_str()
        .ok_or_else(|| LlmError::Provider { status: status.as_u16(), msg: "response has no message content".into() })?
        .to_string();
    let mut meta = BTreeMap::new();
    if let Some(m) = json["model"].as_str() {
        meta.insert("model".to_string(), m.to_string());
    }
    Ok(LlmResponse { text, provider_meta: meta })
}

// ------------------------------------------------------------ extraction

/// One test function reduced to a standalone source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PbtSource {
    pub name: String,
    pub source: String,
    /// Text of the comment directly above the test, if any.
    pub property: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("response contains no test function")]
pub struct ExtractError;

fn fenced_blocks(text: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut cur: Option<Vec<&str>> = None;
    for line in text.lines() {
        let fence = line.trim_start().starts_with("```");
        match (&mut cur, fence) {
            (None, true) => cur = Some(Vec::new()),
            (Some(b), true) => {
                blocks.push(b.join("\n"));
                cur = None;
            }
            (Some(b), false) => b.push(line),
            (None, false) => {}
        }
    }
    blocks
}

/// Tracks string and bracket state so continuation lines can be told apart
/// from new top-level statements.
#[derive(Default)]
struct LineScanner {
    depth: i32,
    in_triple: Option<char>,
}

impl LineScanner {
    fn feed(&mut self, line: &str) {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if let Some(q) = self.in_triple {
                if c == q && chars.get(i + 1) == Some(&q) && chars.get(i + 2) == Some(&q) {
                    self.in_triple = None;
                    i += 3;
                } else {
                    i += 1;
                }
                continue;
            }
            match c {
                '#' => break,
                '"' | '\'' => {
                    if chars.get(i + 1) == Some(&c) && chars.get(i + 2) == Some(&c) {
                        self.in_triple = Some(c);
                        i += 3;
                        continue;
                    }
                    i += 1;
                    while i < chars.len() && chars[i] != c {
                        i += if chars[i] == '\\' { 2 } else { 1 };
                    }
                }
                '(' | '[' | '{' => self.depth += 1,
                ')' | ']' | '}' => self.depth -= 1,
                _ => {}
            }
            i += 1;
        }
    }

    fn open(&self) -> bool {
        self.depth > 0 || self.in_triple.is_some()
    }
}

#[derive(Debug)]
enum Item {
    Comment(String),
    Blank,
    Decorated { lines: Vec<String>, test: Option<String> },
    Other(Vec<String>),
}

fn test_name(def_line: &str) -> Option<String> {
    let rest = def_line.strip_prefix("def ")?;
    let name: String = rest.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
    name.starts_with("test").then_some(name)
}

/// Groups a block into top-level items: comment lines, blank lines, functions
/// with their decorators, and everything else.
fn top_level_items(block: &str) -> Vec<Item> {
    let mut items: Vec<Item> = Vec::new();
    let mut scanner = LineScanner::default();
    let mut pending_decorators: Vec<String> = Vec::new();
    // Blank lines are held back until we know whether a body continues.
    let mut blanks = 0usize;
    for line in block.lines() {
        let continuation = scanner.open();
        scanner.feed(line);
        let indented = line.starts_with([' ', '\t']);
        if continuation || (indented && !line.trim().is_empty()) {
            if !pending_decorators.is_empty() {
                pending_decorators.push(line.to_string());
                continue;
            }
            match items.last_mut() {
                Some(Item::Decorated { lines, .. }) | Some(Item::Other(lines)) => {
                    lines.extend(std::iter::repeat_n(String::new(), blanks));
                    lines.push(line.to_string());
                }
                _ => {
                    items.extend(std::iter::repeat_with(|| Item::Blank).take(blanks));
                    items.push(Item::Other(vec![line.to_string()]));
                }
            }
            blanks = 0;
            continue;
        }
        if line.trim().is_empty() {
            if pending_decorators.is_empty() {
                blanks += 1;
            }
            continue;
        }
        items.extend(std::iter::repeat_with(|| Item::Blank).take(blanks));
        blanks = 0;
        if line.starts_with('#') {
            items.push(Item::Comment(line.to_string()));
        } else if line.starts_with('@') {
            pending_decorators.push(line.to_string());
        } else if line.starts_with("def ") || line.starts_with("async def ") {
            let mut lines = std::mem::take(&mut pending_decorators);
            lines.push(line.to_string());
            items.push(Item::Decorated { lines, test: test_name(line) });
        } else {
            let mut lines = std::mem::take(&mut pending_decorators);
            lines.push(line.to_string());
            items.push(Item::Other(lines));
        }
    }
    if !pending_decorators.is_empty() {
        items.push(Item::Other(pending_decorators));
    }
    items
}

fn comment_text(line: &str) -> String {
    line.trim_start_matches('#').trim().to_string()
}

pub fn extract_test_sources(response: &str) -> Result<Vec<PbtSource>, ExtractError> {
    let mut out = Vec::new();
    for block in fenced_blocks(response) {
        let items = top_level_items(&block);
        // Comments directly above a test belong to it.
        let mut owned_by_test = vec![false; items.len()];
        for (i, item) in items.iter().enumerate() {
            if let Item::Decorated { test: Some(_), .. } = item {
                let mut j = i;
                while j > 0 && matches!(items[j - 1], Item::Comment(_)) {
                    j -= 1;
                    owned_by_test[j] = true;
                }
            }
        }
        let mut preamble: Vec<String> = Vec::new();
        for (i, item) in items.iter().enumerate() {
            match item {
                Item::Decorated { test: Some(_), .. } => {}
                _ if owned_by_test[i] => {}
                Item::Comment(l) => preamble.push(l.clone()),
                Item::Blank => preamble.push(String::new()),
                Item::Decorated { lines, .. } | Item::Other(lines) => preamble.extend(lines.iter().cloned()),
            }
        }
        let preamble = collapse_blank_runs(&preamble);
        for (i, item) in items.iter().enumerate() {
            let Item::Decorated { lines, test: Some(name) } = item else { continue };
            let mut j = i;
            let mut comments = Vec::new();
            while j > 0 {
                if let Item::Comment(c) = &items[j - 1] {
                    comments.push(c.clone());
                    j -= 1;
                } else {
                    break;
                }
            }
            comments.reverse();
            let property = (!comments.is_empty())
                .then(|| comments.iter().map(|c| comment_text(c)).collect::<Vec<_>>().join(" "))
                .filter(|p| !p.is_empty());
            let mut unit: Vec<String> = comments;
            unit.extend(lines.iter().cloned());
            while unit.last().is_some_and(|l| l.trim().is_empty()) {
                unit.pop();
            }
            let source = if preamble.is_empty() {
                format!("{}\n", unit.join("\n"))
            } else {
                format!("{}\n\n\n{}\n", preamble.join("\n"), unit.join("\n"))
            };
            out.push(PbtSource { name: name.clone(), source, property });
        }
    }
    if out.is_empty() {
        Err(ExtractError)
    } else {
        Ok(out)
    }
}

fn collapse_blank_runs(lines: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for l in lines {
        if l.trim().is_empty() && out.last().is_none_or(|p| p.trim().is_empty()) {
            continue;
        }
        out.push(l.clone());
    }
    while out.last().is_some_and(|l| l.trim().is_empty()) {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::promptkit::Message;

    const LISTING: &str = r#"Here are the tests.

```python
from hypothesis import given, strategies as st
from examples.gpiozero.apps.pcs.src.pcs import MockSystem


# Test that the cylinder locations remain within the bounds (0 and 2) at all times.
@given( # generator
    total_time=st.floats(min_value=1.0, max_value=100.0),
    cylinder_interval=st.floats(min_value=0.1, max_value=10.0),
)
def test_cylinder_location_in_bounds(total_time, cylinder_interval):
    system = MockSystem(total_time, cylinder_interval, 1.0, 1.0)
    collected_states = system.execute_scenario()

    for state in collected_states:
        assert 0 <= state.cylinder_a_loc <= 2, f"Cylinder A out of bounds: {state.cylinder_a_loc}"
```
"#;

    #[test]
    fn single_test_keeps_imports_and_comment() {
        let units = extract_test_sources(LISTING).unwrap();
        assert_eq!(units.len(), 1);
        let u = &units[0];
        assert_eq!(u.name, "test_cylinder_location_in_bounds");
        assert!(u.property.as_deref().unwrap().contains("cylinder locations remain within the bounds"));
        assert!(u.source.starts_with("from hypothesis import given"));
        assert!(u.source.contains("# Test that the cylinder"));
        assert!(u.source.contains("        assert 0 <= state.cylinder_a_loc <= 2"));
        assert!(pbtlang::parse_module(&u.source).is_ok(), "{}\n{:?}", u.source, pbtlang::parse_module(&u.source).err());
    }

    #[test]
    fn splits_per_test_function() {
        let text = "```python\nimport math\n\ndef helper():\n    return 1\n\n# first\ndef test_a():\n    assert helper() == 1\n\n\ndef test_b():\n    assert math.pi > 3\n```";
        let units = extract_test_sources(text).unwrap();
        // Oracle: count of top-level `def test` lines in the block.
        let expected = text.lines().filter(|l| l.starts_with("def test")).count();
        assert_eq!(units.len(), expected);
        assert_eq!(units[0].property.as_deref(), Some("first"));
        assert_eq!(units[1].property, None);
        assert!(units[1].source.contains("def helper()"));
        assert!(!units[1].source.contains("# first"));
        assert!(!units[0].source.contains("test_b"));
    }

    #[test]
    fn prose_only_is_an_error() {
        assert_eq!(extract_test_sources("I cannot help with that."), Err(ExtractError));
        assert_eq!(extract_test_sources("```python\nx = 1\n```"), Err(ExtractError));
    }

    #[test]
    fn broken_code_is_still_extracted() {
        let units = extract_test_sources("```python\n# p\ndef test_x(:\n    assert (1\n```").unwrap();
        assert_eq!(units[0].name, "test_x");
        assert!(units[0].source.contains("assert (1"));
    }

    #[test]
    fn digest_and_replay_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let conv = Conversation::from(vec![Message::new(Role::User, "hello \"world\"\n").unwrap()]);
        assert_eq!(canonical_json(&conv), r#"[{"role":"user","text":"hello \"world\"\n"}]"#);
        let replay = Provider::from_config(&ProviderConfig::replay(dir.path())).unwrap();
        let miss = replay.complete(&conv).unwrap_err();
        assert!(matches!(&miss, LlmError::FixtureMissing { digest } if *digest == conversation_digest(&conv)));

        let rec = Provider::Recording { inner: Box::new(Provider::scripted(["answer"])), dir: dir.path().to_path_buf() };
        assert_eq!(rec.complete(&conv).unwrap().text, "answer");
        assert_eq!(replay.complete(&conv).unwrap().text, "answer");
        assert_eq!(replay.complete(&conv).unwrap().text, "answer");
    }

    #[test]
    fn scripted_exhaustion() {
        let conv = Conversation::from(vec![Message::new(Role::User, "q").unwrap()]);
        let p = Provider::scripted(["a", "b"]);
        assert_eq!(p.complete(&conv).unwrap().text, "a");
        assert_eq!(p.complete(&conv).unwrap().text, "b");
        assert!(p.complete(&conv).unwrap_err().is_fixture_missing());
        assert!(matches!(p.complete(&Conversation::default()), Err(LlmError::EmptyConversation)));
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = ProviderConfig::new(ProviderKind::Replay);
        assert_eq!((c.temperature, c.sample_count), (0.0, 1));
        assert!(c.validate().is_err());
        assert!(ProviderConfig::new(ProviderKind::Live).validate().is_err());
        assert!(ProviderConfig::new(ProviderKind::Scripted).validate().is_ok());
    }
}
