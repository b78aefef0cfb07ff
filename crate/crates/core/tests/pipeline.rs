mod common;

use common::*;
use cpds_core::corpus::{generate, manifest, CorpusSpec, GenError};
use cpds_core::model::cpg::write_cpg;
use cpds_core::pipeline::{judge_sweep, verify_pipeline, PipelineOptions, Verdict};
use cpds_core::solver::Limits;
use cpds_core::{Game, Player};

fn opts() -> PipelineOptions {
    PipelineOptions { limits: limits(), sweep: 4, ..PipelineOptions::default() }
}

#[test]
fn even_loop_passes_with_e_everywhere() {
    let r = verify_pipeline(even_loop(), &opts());
    assert!(!r.failed(), "{r}");
    for s in &r.stages {
        assert_eq!(s.winner, Ok(Player::E), "{}", s.name);
    }
    let tags: Vec<char> = r.checks.iter().map(|c| c.tag).collect();
    assert_eq!(tags, ['a', 'b', 'c', 'd', 'e', 'f']);
    assert_eq!(r.b_star, Some(0));
}

#[test]
fn adversarial_report_shows_flip() {
    let r = verify_pipeline(adversarial(), &opts());
    assert!(!r.failed(), "{r}");
    assert_eq!(r.b_star, Some(2));
    assert!(r.render(false).contains("sweep: 0:A 1:A 2:E 3:E 4:E"));
}

#[test]
fn odd_pusher_report_flags_commutation() {
    let r = verify_pipeline(odd_pusher(), &opts());
    let d = r.checks.iter().find(|c| c.tag == 'd').unwrap();
    assert!(matches!(d.verdict, Verdict::Fail(_)), "{r}");
    assert!(r.checks.iter().filter(|c| c.tag != 'd').all(|c| c.verdict == Verdict::Pass), "{r}");
}

#[test]
fn unsolved_stages_are_skipped_not_failed() {
    let tight = PipelineOptions { limits: Limits { max_nodes: 3, ..Limits::default() }, ..opts() };
    let r = verify_pipeline(odd_pusher(), &tight);
    assert!(!r.failed(), "{r}");
    assert!(r.checks.iter().filter(|c| c.tag != 'f').all(|c| matches!(c.verdict, Verdict::Skipped(_))), "{r}");
}

#[test]
fn report_render_is_stable() {
    let a = verify_pipeline(adversarial(), &opts()).render(false);
    let b = verify_pipeline(adversarial(), &opts()).render(false);
    assert_eq!(a, b);
    assert!(!a.contains("ms="));
}

#[test]
fn judge_sweep_cases() {
    let s = |v: &[Player]| v.iter().enumerate().map(|(i, p)| (i as u32, Ok(*p))).collect::<Vec<_>>();
    use Player::{A, E};
    assert_eq!(judge_sweep(E, &s(&[A, A, E, E])), (Verdict::Pass, Some(2)));
    assert_eq!(judge_sweep(A, &s(&[A, A, A])), (Verdict::Pass, Some(0)));
    assert!(matches!(judge_sweep(E, &s(&[A, E, A])).0, Verdict::Fail(_)));
    assert!(matches!(judge_sweep(A, &s(&[A, E, E])).0, Verdict::Fail(_)));
    assert!(matches!(judge_sweep(E, &s(&[A, A])).0, Verdict::Fail(_)));
    assert!(matches!(judge_sweep(E, &[(0, Err("x".into()))]).0, Verdict::Skipped(_)));
}

#[test]
fn corpus_is_deterministic() {
    let spec = CorpusSpec { count: 5, ..CorpusSpec::default() };
    let a = generate(&spec).unwrap();
    let b = generate(&spec).unwrap();
    assert_eq!(manifest(&a), manifest(&b));
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(write_cpg(&x.game).unwrap(), write_cpg(&y.game).unwrap());
    }
    let other = generate(&CorpusSpec { seed: 7, ..spec }).unwrap();
    assert_ne!(manifest(&a), manifest(&other));
}

#[test]
fn corpus_respects_order_and_solvability() {
    for e in corpus(2, 8) {
        assert_eq!(e.game.order(), 2);
        assert_eq!(cpds_core::solver::winner_of(&e.game, limits()).unwrap(), e.winner);
    }
}

#[test]
fn empty_corpus_has_empty_manifest() {
    let spec = CorpusSpec { count: 0, ..CorpusSpec::default() };
    assert_eq!(manifest(&generate(&spec).unwrap()), "");
}

#[test]
fn bad_ranges_and_exhaustion_are_reported() {
    let spec = CorpusSpec { states: (3, 2), ..CorpusSpec::default() };
    assert_eq!(generate(&spec).unwrap_err(), GenError::EmptyRange("states"));
    let spec = CorpusSpec { min_nodes: 1_000_000, retries: 3, count: 1, ..CorpusSpec::default() };
    assert_eq!(generate(&spec).unwrap_err(), GenError::Exhausted { index: 0, retries: 3 });
}
