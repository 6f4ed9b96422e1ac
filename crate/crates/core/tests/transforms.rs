mod common;

use common::checks::{preservation_programs, preserves_semantics};
use common::*;
use goto_interval::absint::{compute_abs, StorageMode};
use goto_interval::domains::{DomainConfig, DomainKind};
use goto_interval::ir::emit_program;
use goto_interval::transform::{assertion_report, remove_dead_code, singleton_propagate, Verdict};

#[test]
fn rewrites_never_change_outcomes() {
    let t = preserves_semantics(&preservation_programs(40, 0x5eed));
    assert!(t.ok(), "{}", t.summary());
    assert!(t.checked > 0);
}

#[test]
fn fig5_assert_becomes_constant() {
    let p = corpus_program("fig5");
    let cfg = DomainConfig { arithmetic: true, ..DomainConfig::new(DomainKind::Integer) };
    let a = compute_abs(&p, &cfg, StorageMode::default()).unwrap();
    let (q, folded) = singleton_propagate(&p, &a.map, &cfg);
    assert_eq!(folded, 1);
    assert!(emit_program(&q).lines().any(|l| l == "assert 1"));
}

#[test]
fn dead_branch_is_removed() {
    let p = corpus_program("dead");
    let cfg = DomainConfig::precise(DomainKind::Integer);
    let a = compute_abs(&p, &cfg, StorageMode::default()).unwrap();
    let report = assertion_report(&p, &a.map, &cfg);
    assert!(report.iter().all(|v| v.verdict == Verdict::Proven));
    let (q, killed) = remove_dead_code(&p, &a.map);
    assert!(killed >= 3, "killed {killed}");
    assert!(!emit_program(&q).contains("flag := 0"));
}

#[test]
fn refuted_assert_in_corpus_really_fails() {
    let p = corpus_program("refuted");
    let cfg = DomainConfig::precise(DomainKind::Integer);
    let a = compute_abs(&p, &cfg, StorageMode::default()).unwrap();
    let report = assertion_report(&p, &a.map, &cfg);
    assert_eq!(report[0].verdict, Verdict::Refuted);
    for x in 0..=3 {
        assert_eq!(ref_run(&p, vec![x, 0], 100, |_, _| {}), RefVerdict::AssertFail(report[0].stmt));
    }
}
