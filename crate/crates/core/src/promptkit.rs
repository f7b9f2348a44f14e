//! Prompt synthesis from a versioned template.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analyzer::{OutcomeClass, PbtReport};
use crate::bundle::{InputBundle, SourceFile};
use crate::llmclient::PbtSource;

pub const DEFAULT_TEMPLATE: &str = include_str!("../../../templates/prompt_v1.toml");

#[derive(Debug, thiserror::Error)]
pub enum PromptError {
    #[error("improvement message needs at least one failed test")]
    NothingToImprove,
    #[error("{name} passed and cannot be sent for improvement")]
    NotAFailure { name: String },
    #[error("message text must not be empty")]
    EmptyMessage,
    #[error("invalid template: {0}")]
    Template(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub text: String,
}

impl Message {
    pub fn new(role: Role, text: impl Into<String>) -> Result<Self, PromptError> {
        let text = text.into();
        if text.is_empty() {
            return Err(PromptError::EmptyMessage);
        }
        Ok(Self { role, text })
    }
}

/// Append-only transcript.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Conversation {
    messages: Vec<Message>,
}

impl Conversation {
    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn push(&mut self, m: Message) {
        self.messages.push(m);
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }
}

impl From<Vec<Message>> for Conversation {
    fn from(messages: Vec<Message>) -> Self {
        Self { messages }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct SectionTemplate {
    pub title: String,
    pub body: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ImprovementTemplate {
    pub intro: String,
    pub block_header: String,
    pub source_label: String,
    pub error_label: String,
    pub outro: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Template {
    pub version: u32,
    pub section_header: String,
    pub file_header: String,
    pub sections: Vec<SectionTemplate>,
    pub improvement: ImprovementTemplate,
}

impl Template {
    pub fn parse(text: &str) -> Result<Self, PromptError> {
        let t: Template = toml::from_str(text).map_err(|e| PromptError::Template(e.message().to_string()))?;
        if t.sections.len() != 4 {
            return Err(PromptError::Template(format!("expected 4 sections, found {}", t.sections.len())));
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self, PromptError> {
        let text = std::fs::read_to_string(path).map_err(|e| PromptError::Template(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn header(&self, n: usize, title: &str) -> String {
        self.section_header.replace("{n}", &n.to_string()).replace("{title}", title)
    }

    fn files(&self, files: &[SourceFile]) -> String {
        files
            .iter()
            .map(|f| format!("{}\n{}", self.file_header.replace("{path}", &f.path), f.text))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl Default for Template {
    fn default() -> Self {
        Template::parse(DEFAULT_TEMPLATE).expect("shipped template parses")
    }
}

/// Replaces `{{slot}}` markers in one pass; unknown slots are kept as written.
fn fill(body: &str, slots: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(body.len());
    let mut rest = body;
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        match after.find("}}").and_then(|end| slots.iter().find(|(k, _)| *k == &after[..end]).map(|(_, v)| (end, v))) {
            Some((end, v)) => {
                out.push_str(v);
                rest = &after[end + 2..];
            }
            None => {
                out.push_str("{{");
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

pub fn build_initial_prompt(bundle: &InputBundle) -> Conversation {
    build_initial_prompt_with(&Template::default(), bundle)
}

pub fn build_initial_prompt_with(t: &Template, bundle: &InputBundle) -> Conversation {
    let code = t.files(&bundle.code_files);
    let tests = t.files(&bundle.unit_test_files);
    let slots = [("description", bundle.description.as_str()), ("code", code.as_str()), ("unit_tests", tests.as_str())];
    let text = t
        .sections
        .iter()
        .enumerate()
        .map(|(i, s)| format!("{}\n{}", t.header(i + 1, &s.title), fill(&s.body, &slots)))
        .collect::<Vec<_>>()
        .join("\n");
    Conversation::from(vec![Message { role: Role::User, text }])
}

/// Splits a rendered initial prompt back into `(title, body)` pairs.
pub fn split_sections(t: &Template, prompt: &str) -> Vec<(String, String)> {
    let headers: Vec<(usize, usize, String)> = t
        .sections
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let h = t.header(i + 1, &s.title);
            prompt.find(&format!("{h}\n")).map(|at| (at, at + h.len() + 1, s.title.clone()))
        })
        .collect();
    headers
        .iter()
        .enumerate()
        .map(|(i, (_, body_start, title))| {
            let end = headers.get(i + 1).map(|(next, _, _)| next - 1).unwrap_or(prompt.len());
            (title.clone(), prompt[*body_start..end].to_string())
        })
        .collect()
}

pub fn build_improvement_message(failures: &[(&PbtSource, &PbtReport)]) -> Result<Message, PromptError> {
    build_improvement_message_with(&Template::default(), failures)
}

pub fn build_improvement_message_with(t: &Template, failures: &[(&PbtSource, &PbtReport)]) -> Result<Message, PromptError> {
    if failures.is_empty() {
        return Err(PromptError::NothingToImprove);
    }
    let imp = &t.improvement;
    let mut text = imp.intro.clone();
    for (i, (src, report)) in failures.iter().enumerate() {
        if report.outcome.class == OutcomeClass::Pass {
            return Err(PromptError::NotAFailure { name: src.name.clone() });
        }
        let header = imp
            .block_header
            .replace("{n}", &(i + 1).to_string())
            .replace("{name}", &src.name)
            .replace("{outcome}", report.outcome.class.as_str());
        text.push_str(&format!(
            "\n\n{header}\n{}\n```python\n{}\n```\n{}\n```\n{}\n```",
            imp.source_label,
            src.source.trim_end_matches('\n'),
            imp.error_label,
            report.outcome.message.trim_end_matches('\n'),
        ));
    }
    text.push_str("\n\n");
    text.push_str(&imp.outro);
    Message::new(Role::User, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::TestOutcome;

    fn bundle() -> InputBundle {
        InputBundle {
            subject_id: "demo".into(),
            description: "Cylinders {{code}} move.\n\nTwice.".into(),
            code_files: vec![
                SourceFile { path: "src/b.py".into(), text: "b = 2\n".into() },
                SourceFile { path: "src/a.py".into(), text: "a = 1".into() },
            ],
            unit_test_files: vec![SourceFile { path: "tests/test_a.py".into(), text: "def test_a(): pass\n".into() }],
        }
    }

    #[test]
    fn four_sections_with_verbatim_bodies() {
        let t = Template::default();
        let conv = build_initial_prompt(&bundle());
        assert_eq!(conv.len(), 1);
        assert_eq!(conv.messages()[0].role, Role::User);
        let sections = split_sections(&t, &conv.messages()[0].text);
        let titles: Vec<_> = sections.iter().map(|s| s.0.as_str()).collect();
        assert_eq!(titles, ["SYSTEM DESCRIPTION", "SOURCE CODE", "EXAMPLE UNIT TESTS", "INSTRUCTIONS"]);
        assert_eq!(sections[0].1, bundle().description);
        assert_eq!(sections[1].1, "--- FILE: src/b.py ---\nb = 2\n\n--- FILE: src/a.py ---\na = 1");
        assert!(sections[3].1.contains("@given"));
        assert_eq!(conv, build_initial_prompt(&bundle()));
    }

    fn failure(name: &str, class: OutcomeClass, msg: &str) -> (PbtSource, PbtReport) {
        let src = PbtSource { name: name.into(), source: format!("def {name}():\n    assert False\n"), property: None };
        let report = PbtReport {
            pbt_id: name.into(),
            subject_id: "demo".into(),
            attempt: 0,
            outcome: TestOutcome { class, message: msg.into(), duration: 0.0 },
        };
        (src, report)
    }

    #[test]
    fn improvement_lists_failures_in_order() {
        let fs = [
            failure("test_one", OutcomeClass::AssertionFailure, "AssertionError: assert 3 <= 2"),
            failure("test_two", OutcomeClass::SyntaxError, "SyntaxError: invalid syntax (line 2, column 5)"),
            failure("test_three", OutcomeClass::Timeout, "timed out after 60 s"),
        ];
        let refs: Vec<_> = fs.iter().map(|(s, r)| (s, r)).collect();
        let m = build_improvement_message(&refs).unwrap();
        assert!(m.text.contains("AssertionError: assert 3 <= 2"));
        let one = m.text.find("--- FAILED TEST 1: test_one (assertion_failure) ---").unwrap();
        let two = m.text.find("--- FAILED TEST 2: test_two (syntax_error) ---").unwrap();
        let three = m.text.find("--- FAILED TEST 3: test_three (timeout) ---").unwrap();
        assert!(one < two && two < three);
    }

    #[test]
    fn improvement_preconditions() {
        assert!(matches!(build_improvement_message(&[]), Err(PromptError::NothingToImprove)));
        let (s, r) = failure("test_ok", OutcomeClass::Pass, "");
        assert!(matches!(build_improvement_message(&[(&s, &r)]), Err(PromptError::NotAFailure { .. })));
    }

    #[test]
    fn fill_is_single_pass() {
        assert_eq!(fill("<{{a}}|{{b}}|{{zz}}>", &[("a", "{{b}}"), ("b", "B")]), "<{{b}}|B|{{zz}}>");
    }
}
