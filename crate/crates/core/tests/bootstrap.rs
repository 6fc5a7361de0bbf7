use std::collections::{BTreeMap, BTreeSet};

use rxnmine::bootstrap::*;
use rxnmine::corpus::{prepare_corpus, prepare_text, Document, Gazetteer, MaskItem, MaskedText, Source};
use rxnmine::extractor::{ExtractorModel, Hyper, RoleWeights};
use rxnmine::pattern::{parse_pattern, seed_patterns, MinedCandidate, Pattern, PatternItem};
use rxnmine::synth::{generate, SynthConfig};
use rxnmine::Role;

fn small_corpus() -> Vec<Document> {
    let config = SynthConfig {
        solo_per_template: 1,
        bridge_per_template: 2,
        seed_docs_per_role: 14,
        distractor_share: 0.0,
        heldout_docs: 0,
        ..Default::default()
    };
    generate(&config).train
}

fn workspace(docs: &[Document]) -> (tempfile::TempDir, Workspace) {
    let dir = tempfile::tempdir().unwrap();
    let ws = Workspace::open(dir.path());
    ws.ingest(docs).unwrap();
    ws.install_seeds(&seed_patterns()).unwrap();
    (dir, ws)
}

fn auto() -> BootstrapConfig {
    BootstrapConfig { review_mode: ReviewMode::Auto, ..Default::default() }
}

/// A product model that fires only on candidates followed by ".".
fn period_model() -> ExtractorModel {
    let mut model = ExtractorModel::new(Hyper::default());
    let weights = BTreeMap::from([("R1:.".to_string(), 10.0)]);
    model.insert_role(Role::Product, RoleWeights { bias: -5.0, weights });
    model
}

fn table(model: &ExtractorModel, masked: &[MaskedText]) -> ScoreTable {
    ScoreTable::build(model, masked, &BTreeSet::from([Role::Product])).unwrap()
}

fn masked(texts: &[&str]) -> Vec<MaskedText> {
    let gaz = Gazetteer::builtin();
    texts.iter().enumerate().map(|(i, t)| prepare_text(&format!("d{i}"), t, &gaz)).collect()
}

#[test]
fn interactive_iteration_queues_without_merging() {
    let docs = small_corpus();
    assert_eq!(docs.len(), 200);
    let (_dir, ws) = workspace(&docs);
    let it = run_iteration(&ws, &BootstrapConfig::default()).unwrap();
    assert_eq!(it.iteration, 1);
    assert!(it.counts.candidates > 0);
    assert_eq!(it.pattern_set_version_before, 0);
    assert_eq!(it.pattern_set_version_after, None);
    assert_eq!(ws.current_patterns().unwrap().version, 0);
    assert_eq!(ws.queue(1).unwrap().len(), it.counts.candidates);
    assert!(ws.path(&it.model_path).exists());
}

#[test]
fn three_auto_iterations_give_versions_one_to_three() {
    let (_dir, ws) = workspace(&small_corpus());
    let states = run(&ws, &auto()).unwrap();
    let after: Vec<Option<u32>> = states.iter().map(|s| s.pattern_set_version_after).collect();
    assert_eq!(after, vec![Some(1), Some(2), Some(3)]);
    for s in &states {
        assert_eq!(s.counts.accepted + s.counts.rejected, s.counts.candidates);
        assert!(ws.report_path(s.iteration).exists());
    }
    // finished runs are not extended
    assert!(run(&ws, &auto()).unwrap().is_empty());
}

#[test]
fn versions_only_grow_and_keep_earlier_patterns() {
    let (_dir, ws) = workspace(&small_corpus());
    run(&ws, &auto()).unwrap();
    for v in 0..3 {
        let older = ws.patterns(v).unwrap();
        let newer = ws.patterns(v + 1).unwrap();
        assert!(newer.len() > older.len());
        assert!(older.patterns().iter().all(|p| newer.contains(p.role, &p.items)));
    }
}

#[test]
fn later_queues_skip_accepted_and_rejected_candidates() {
    let (_dir, ws) = workspace(&small_corpus());
    run(&ws, &auto()).unwrap();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for k in 1..=3 {
        let queue = ws.queue(k).unwrap();
        for c in &queue {
            assert!(!seen.contains(&c.id), "{} re-proposed in iteration {k}", c.pattern);
        }
        seen.extend(queue.into_iter().map(|c| c.id));
    }
}

#[test]
fn rejected_candidates_are_not_re_mined() {
    let (_dir, ws) = workspace(&small_corpus());
    let config = BootstrapConfig::default();
    run_iteration(&ws, &config).unwrap();
    let service = ReviewService::new(ws.clone());
    let first = ws.queue(1).unwrap();
    for c in &first {
        service.record_decision(&c.id, Verdict::Reject).unwrap();
    }
    let outcome = service.finalize(1).unwrap();
    assert_eq!(outcome.version, 0, "nothing accepted, version unchanged");
    let second = run_iteration(&ws, &config).unwrap();
    assert_eq!(second.pattern_set_version_before, 0);
    let rejected: BTreeSet<&str> = first.iter().map(|c| c.id.as_str()).collect();
    assert!(ws.queue(2).unwrap().iter().all(|c| !rejected.contains(c.id.as_str())));
}

#[test]
fn replaying_the_same_run_gives_identical_pattern_files() {
    let docs = small_corpus();
    let (_a, wa) = workspace(&docs);
    let (_b, wb) = workspace(&docs);
    run(&wa, &auto()).unwrap();
    run(&wb, &auto()).unwrap();
    for v in 0..=3 {
        let a = std::fs::read(wa.patterns_path(v)).unwrap();
        let b = std::fs::read(wb.patterns_path(v)).unwrap();
        assert_eq!(a, b, "version {v}");
    }
    assert_eq!(std::fs::read(wa.path("models/3.json")).unwrap(), std::fs::read(wb.path("models/3.json")).unwrap());
}

#[test]
fn empty_corpus_and_missing_seeds_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let ws = Workspace::open(dir.path());
    ws.install_seeds(&seed_patterns()).unwrap();
    assert!(matches!(run_iteration(&ws, &auto()), Err(BootstrapError::EmptyCorpus)));
    ws.ingest(&[]).unwrap();
    assert!(matches!(run_iteration(&ws, &auto()), Err(BootstrapError::EmptyCorpus)));

    let dir = tempfile::tempdir().unwrap();
    let ws = Workspace::open(dir.path());
    ws.ingest(&[Document { id: "a".into(), text: "x".into(), source: Source::Fixture }]).unwrap();
    assert!(matches!(run_iteration(&ws, &auto()), Err(BootstrapError::NoPatterns)));
}

#[test]
fn next_iteration_waits_for_finalize() {
    let (_dir, ws) = workspace(&small_corpus());
    let config = BootstrapConfig::default();
    run_iteration(&ws, &config).unwrap();
    match run_iteration(&ws, &config) {
        Err(BootstrapError::PendingDecisions(ids)) => assert_eq!(ids.len(), ws.queue(1).unwrap().len()),
        other => panic!("{other:?}"),
    }
    let service = ReviewService::new(ws.clone());
    for c in ws.queue(1).unwrap() {
        service.record_decision(&c.id, Verdict::Accept).unwrap();
    }
    assert!(matches!(run_iteration(&ws, &config), Err(BootstrapError::NotFinalized(1))));
}

#[test]
fn proxy_is_one_when_every_match_is_positive() {
    let m = masked(&["benzamide gave phenol .", "toluene gave nitrophenol .", "THF gave benzamide ."]);
    let t = table(&period_model(), &m);
    let p = parse_pattern("product", "gave [Chem!]").unwrap();
    assert_eq!(precision_proxy(&p, &t, &m), (1.0, 3));
}

#[test]
fn proxy_counts_four_of_five() {
    let m = masked(&[
        "benzamide gave phenol .",
        "toluene gave nitrophenol .",
        "THF gave benzamide .",
        "DMF gave toluene .",
        "hexane gave phenol ;",
    ]);
    let t = table(&period_model(), &m);
    let p = parse_pattern("product", "gave [Chem!]").unwrap();
    let (proxy, n) = precision_proxy(&p, &t, &m);
    assert_eq!(n, 5);
    assert!((proxy - 0.8).abs() < 1e-12);
    assert_eq!(precision_proxy(&parse_pattern("product", "absent [Chem!]").unwrap(), &t, &m), (0.0, 0));
}

#[test]
fn ranking_truncates_per_role_and_orders_by_frequency() {
    let m = masked(&["benzamide gave phenol ."]);
    let t = table(&period_model(), &m);
    let mut cands = Vec::new();
    for i in 0..60 {
        let p = parse_pattern("product", &format!("w{i} [Chem!]")).unwrap();
        cands.push(MinedCandidate { role: Role::Product, items: p.items, frequency: 5 + i, sample_doc_ids: vec![] });
    }
    let y = parse_pattern("yield", "in [Num!] %").unwrap();
    cands.push(MinedCandidate { role: Role::Yield, items: y.items, frequency: 7, sample_doc_ids: vec![] });
    let queue = rank_with_scores(&cands, &t, &m, 50);
    assert_eq!(queue.iter().filter(|c| c.role == Role::Product).count(), 50);
    assert_eq!(queue.iter().filter(|c| c.role == Role::Yield).count(), 1);
    assert!(queue.windows(2).all(|w| w[0].frequency >= w[1].frequency));
    assert_eq!(queue[0].frequency, 64);
    assert!(queue.iter().all(|c| c.status == Status::Pending));
}

#[test]
fn snippets_highlight_the_matched_window() {
    let m = masked(&["benzamide gave phenol ."]);
    let t = table(&period_model(), &m);
    let p = parse_pattern("product", "gave [Chem!]").unwrap();
    let c = MinedCandidate { role: Role::Product, items: p.items, frequency: 1, sample_doc_ids: vec!["d0".into()] };
    let q = rank_with_scores(&[c], &t, &m, 50);
    let s = &q[0].snippets[0];
    assert_eq!(&s.text[s.highlight.0..s.highlight.1], "gave phenol");
}

fn row(id: &str, frequency: usize, proxy: f64) -> ReviewCandidate {
    ReviewCandidate {
        id: id.into(),
        role: Role::Product,
        pattern: "gave [Chem!]".into(),
        frequency,
        precision_proxy: proxy,
        matches: frequency,
        sample_doc_ids: vec![],
        snippets: vec![],
        status: Status::Pending,
    }
}

#[test]
fn auto_accept_rule() {
    let config = auto();
    let d = auto_accept(&[row("a", 7, 0.9), row("b", 7, 0.5), row("c", 4, 1.0), row("d", 5, 0.8)], &config);
    let v: Vec<Verdict> = d.iter().map(|d| d.verdict).collect();
    assert_eq!(v, vec![Verdict::Accept, Verdict::Reject, Verdict::Reject, Verdict::Accept]);
    assert!(d.iter().all(|d| d.decided_by == DecidedBy::Auto));
    assert!(auto_accept(&[], &config).is_empty());
}

/// Installs a hand-made pending iteration with `n` distinct candidates.
fn pending_iteration(n: usize) -> (tempfile::TempDir, Workspace, Vec<ReviewCandidate>) {
    let dir = tempfile::tempdir().unwrap();
    let ws = Workspace::open(dir.path());
    ws.install_seeds(&seed_patterns()).unwrap();
    let queue: Vec<ReviewCandidate> = (0..n)
        .map(|i| {
            let p = parse_pattern("product", &format!("w{i} [Chem!]")).unwrap();
            ReviewCandidate { id: p.id.clone(), pattern: p.to_string(), ..row("", 9, 1.0) }
        })
        .collect();
    ws.write_queue(1, &queue).unwrap();
    let mut state = ws.state().unwrap();
    state.iterations.push(IterationState {
        iteration: 1,
        pattern_set_version_before: 0,
        pattern_set_version_after: None,
        counts: Counts { candidates: n, ..Counts::default() },
        model_path: Workspace::model_rel(1),
    });
    ws.save_state(&state).unwrap();
    (dir, ws, queue)
}

#[test]
fn three_of_ten_accepted_grow_the_set_by_three() {
    let (_dir, ws, queue) = pending_iteration(10);
    let before = ws.current_patterns().unwrap().len();
    let service = ReviewService::new(ws.clone());
    for (i, c) in queue.iter().enumerate() {
        service.record_decision(&c.id, if i < 3 { Verdict::Accept } else { Verdict::Reject }).unwrap();
    }
    let set = apply_decisions(&ws, 1).unwrap();
    assert_eq!(set.len(), before + 3);
    assert_eq!(set.version, 1);
    let state = ws.state().unwrap();
    assert_eq!(state.pattern_version, Some(1));
    assert_eq!(state.rejected.len(), 7);
    let it = state.iteration(1).unwrap();
    assert_eq!((it.counts.accepted, it.counts.rejected), (3, 7));
    let enriched: Vec<&Pattern> = set.patterns().iter().filter(|p| p.origin.to_string() == "enriched:1").collect();
    assert_eq!(enriched.len(), 3);
}

#[test]
fn zero_accepted_leaves_the_version() {
    let (_dir, ws, queue) = pending_iteration(4);
    let service = ReviewService::new(ws.clone());
    for c in &queue {
        service.record_decision(&c.id, Verdict::Reject).unwrap();
    }
    let out = service.finalize(1).unwrap();
    assert_eq!(out.version, 0);
    assert_eq!(out.patterns, seed_patterns().len());
    assert_eq!(ws.state().unwrap().iteration(1).unwrap().pattern_set_version_after, Some(0));
}

#[test]
fn review_handlers_validate_decisions() {
    let (_dir, ws, queue) = pending_iteration(3);
    let service = ReviewService::new(ws.clone());
    assert!(matches!(service.record_decision("nope", Verdict::Accept), Err(BootstrapError::UnknownCandidate(_))));

    let a = &queue[0].id;
    assert_eq!(service.record_decision(a, Verdict::Accept).unwrap().status, Status::Accepted);
    // same verdict again is a no-op
    service.record_decision(a, Verdict::Accept).unwrap();
    assert_eq!(ws.decisions(1).unwrap().len(), 1);
    match service.record_decision(a, Verdict::Reject) {
        Err(BootstrapError::ConflictingDecision { existing, .. }) => assert_eq!(existing, Verdict::Accept),
        other => panic!("{other:?}"),
    }

    match service.finalize(1) {
        Err(BootstrapError::PendingDecisions(ids)) => assert_eq!(ids, vec![queue[1].id.clone(), queue[2].id.clone()]),
        other => panic!("{other:?}"),
    }
    let summary = &service.list_iterations().unwrap()[0];
    assert_eq!((summary.pending, summary.finalized), (2, false));

    service.record_decision(&queue[1].id, Verdict::Reject).unwrap();
    service.record_decision(&queue[2].id, Verdict::Reject).unwrap();
    let statuses: Vec<Status> = service.list_candidates(1, None).unwrap().iter().map(|c| c.status).collect();
    assert_eq!(statuses, vec![Status::Accepted, Status::Rejected, Status::Rejected]);
    assert!(service.list_candidates(1, Some(Role::Yield)).unwrap().is_empty());

    let out = service.finalize(1).unwrap();
    assert_eq!(out.version, 1);
    assert!(matches!(service.finalize(1), Err(BootstrapError::AlreadyFinalized(1))));
    assert!(matches!(service.record_decision(a, Verdict::Accept), Err(BootstrapError::AlreadyFinalized(1))));
    assert!(matches!(service.list_candidates(9, None), Err(BootstrapError::UnknownIteration(9))));
}

fn naive_matches(pattern: &Pattern, m: &MaskedText) -> Vec<usize> {
    let n = pattern.items.len();
    let mut out = Vec::new();
    for start in 0..m.items.len().saturating_sub(n - 1) {
        let mut arg = None;
        let ok = pattern.items.iter().zip(&m.items[start..start + n]).all(|(p, item)| match (p, item) {
            (PatternItem::Literal(w), MaskItem::Word(x)) => w == x,
            (PatternItem::Chem { argument }, MaskItem::Chem(e))
            | (PatternItem::Num { argument }, MaskItem::Num(e)) => {
                if *argument {
                    arg = Some(*e);
                }
                true
            }
            _ => false,
        });
        if ok {
            out.extend(arg);
        }
    }
    out
}

#[test]
fn proxy_matches_a_brute_force_recount() {
    let (_dir, ws) = workspace(&small_corpus());
    let config = BootstrapConfig::default();
    let it = run_iteration(&ws, &config).unwrap();
    let model = rxnmine::extractor::load_model(&ws.path(&it.model_path)).unwrap();
    let masked = prepare_corpus(&ws.corpus().unwrap(), &Gazetteer::builtin());
    let t = ScoreTable::build(&model, &masked, &config.linguistic_roles).unwrap();
    for c in ws.queue(1).unwrap() {
        let p = c.to_pattern(rxnmine::pattern::Origin::Seed).unwrap();
        let (mut hits, mut total) = (0, 0);
        for (d, m) in masked.iter().enumerate() {
            for e in naive_matches(&p, m) {
                total += 1;
                if t.score(d, p.role, e).is_some_and(|s| s >= model.threshold()) {
                    hits += 1;
                }
            }
        }
        assert_eq!(c.matches, total, "{}", c.pattern);
        let expect = if total == 0 { 0.0 } else { hits as f64 / total as f64 };
        assert_eq!(c.precision_proxy, expect, "{}", c.pattern);
        assert!((0.0..=1.0).contains(&c.precision_proxy));
    }
}
