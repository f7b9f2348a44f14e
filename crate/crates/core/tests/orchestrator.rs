use chekprop::analyzer::{Analyzer, OutcomeClass};
use chekprop::bundle::{InputBundle, SourceFile};
use chekprop::llmclient::{Provider, ProviderConfig, ProviderKind};
use chekprop::orchestrator::*;
use chekprop::promptkit::Role;

fn bundle() -> InputBundle {
    InputBundle {
        subject_id: "tcs".into(),
        description: "A room with a heater and a cooler.".into(),
        code_files: vec![SourceFile { path: "src/tcs.py".into(), text: "pass\n".into() }],
        unit_test_files: vec![SourceFile { path: "tests/test_tcs.py".into(), text: "def test_x():\n    pass\n".into() }],
    }
}

fn analyzer() -> Analyzer {
    Analyzer::new(env!("CARGO_BIN_EXE_chekprop"))
}

fn cfg(max_attempts: u32) -> LoopConfig {
    LoopConfig { max_attempts, timeout: 30.0, ..LoopConfig::new(ProviderConfig::new(ProviderKind::Scripted)) }
}

const GOOD: &str = "```python\n# two is two\ndef test_two():\n    assert 1 + 1 == 2\n```\n";
const BAD: &str = "```python\n# two is two\ndef test_two():\n    assert 1 + 1 == 3\n```\n";

#[test]
fn passing_first_round_uses_one_call() {
    let s = generate_pbts(&bundle(), &cfg(3), &Provider::scripted([GOOD]), &analyzer()).unwrap();
    assert_eq!(s.llm_calls, 1);
    assert_eq!(s.pbts.len(), 1);
    let p = &s.pbts[0];
    assert_eq!((p.pbt_id.as_str(), p.status, p.attempts_used), ("tcs-test_two", PbtStatus::Verified, 0));
    assert_eq!(p.property_text, "two is two");
}

#[test]
fn calls_bounded_and_roles_alternate() {
    let provider = Provider::scripted([BAD, BAD, BAD, BAD, BAD]);
    let s = generate_pbts(&bundle(), &cfg(2), &provider, &analyzer()).unwrap();
    assert_eq!(s.llm_calls, 3);
    assert_eq!(s.pbts[0].status, PbtStatus::Unresolved);
    assert_eq!(s.pbts[0].attempts_used, 2);
    let roles: Vec<Role> = s.transcript.messages().iter().map(|m| m.role).collect();
    for (i, r) in roles.iter().enumerate() {
        assert_eq!(*r, if i % 2 == 0 { Role::User } else { Role::Assistant });
    }
}

#[test]
fn verified_tests_are_not_resent() {
    let first = "```python\n# ok\ndef test_ok():\n    assert True\n\n# bad\ndef test_bad():\n    assert False\n```";
    let fix = "```python\n# bad\ndef test_bad():\n    assert True\n\n# extra\ndef test_new():\n    assert True\n```";
    let s = generate_pbts(&bundle(), &cfg(3), &Provider::scripted([first, fix]), &analyzer()).unwrap();
    let improvement = &s.transcript.messages()[2].text;
    assert!(improvement.contains("test_bad"));
    assert!(!improvement.contains("test_ok"));
    let names: Vec<_> = s.pbts.iter().map(|p| (p.name.as_str(), p.attempts_used, p.status)).collect();
    assert_eq!(
        names,
        [
            ("test_ok", 0, PbtStatus::Verified),
            ("test_bad", 1, PbtStatus::Verified),
            ("test_new", 1, PbtStatus::Verified)
        ]
    );
}

#[test]
fn no_extraction_without_loop() {
    let s = generate_pbts(&bundle(), &cfg(0), &Provider::scripted(["I cannot help."]), &analyzer()).unwrap();
    assert!(s.pbts.is_empty());
    assert_eq!(s.no_test.unwrap().outcome.class, OutcomeClass::NoTestProduced);
}

#[test]
fn provider_error_keeps_partial_transcript() {
    let err = generate_pbts(&bundle(), &cfg(3), &Provider::scripted([BAD]), &analyzer()).unwrap_err();
    let OrchestratorError::Provider { transcript, .. } = err else { panic!("{err}") };
    assert_eq!(transcript.len(), 3);
}

#[test]
fn missing_comment_is_flagged() {
    let s = generate_pbts(&bundle(), &cfg(0), &Provider::scripted(["```python\ndef test_a():\n    pass\n```"]), &analyzer())
        .unwrap();
    assert!(s.pbts[0].property_flagged);
    assert_eq!(s.pbts[0].property_text, "test_a");
}
