//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured values. Everything runs against the bundled
//! fixture corpus and its recorded LLM cache; the randomized suites use
//! fixed seeds.
//!
//! ```text
//! cargo test -p semforge --test acceptance -- --nocapture
//! ```

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::time::Instant;

use semforge::config::parse_vocabulary;
use semforge::llm::{Cache, LlmClient, Mode, ScriptedTransport};
use semforge::pipeline::{self, Workspace};
use semforge_core::fnl;
use semforge_core::kgraph::{self, ScopeKind, TriplePattern};
use semforge_core::latex;
use semforge_core::prompt;
use semforge_core::semlayer;

fn pass(criterion: u32, detail: &str) {
    println!("[acceptance] criterion {criterion}: PASS - {detail}");
}

/// Criterion 1: structural round trips. At least 100 randomized graphs of
/// up to 1000 statements survive serialize/parse exactly; FNL documents
/// survive the canonical round trip. Budget: 10 seconds.
#[test]
fn criterion_1_round_trip_suite() {
    let started = Instant::now();
    let mut rng = testkit::rng(0x5eed_0001);
    let mut total_statements = 0usize;
    for round in 0..100 {
        let graph = testkit::random_graph(&mut rng, 1000);
        total_statements += graph.statements().len();
        let text = kgraph::serialize(&graph);
        let back = kgraph::parse(&text).unwrap_or_else(|e| panic!("round {round}: {e}"));
        assert_eq!(back, graph, "graph round trip, round {round}");
    }

    let vocab = fnl::PredicateVocabulary::default_set();
    for round in 0..100 {
        let doc = testkit::random_fnl_document(&mut rng, 6);
        let text = fnl::serialize_fnl(&doc);
        let outcome = fnl::parse_fnl(&text, &vocab);
        assert!(outcome.is_clean(), "round {round}: {:?}", outcome.diagnostics);
        assert_eq!(outcome.document, doc, "FNL round trip, round {round}");
        assert_eq!(
            fnl::serialize_fnl(&outcome.document),
            text,
            "canonical fixed point, round {round}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    pass(
        1,
        &format!(
            "100 graphs ({total_statements} statements) and 100 FNL documents round-tripped in {elapsed:?}"
        ),
    );
}

/// Criterion 2: the replay-mode pipeline is deterministic end to end; two
/// runs produce byte-identical artifacts. Budget: 5 seconds.
#[test]
fn criterion_2_deterministic_end_to_end() {
    let started = Instant::now();
    let out_a = tempfile::tempdir().unwrap();
    let out_b = tempfile::tempdir().unwrap();
    for out in [&out_a, &out_b] {
        let output = common::semforge_cmd(&["--mode", "replay", "pipeline"], out.path());
        assert!(
            output.status.success(),
            "pipeline failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
    let tree_a = common::read_tree(out_a.path());
    let tree_b = common::read_tree(out_b.path());
    assert!(!tree_a.is_empty());
    assert_eq!(
        tree_a.iter().map(|(p, _)| p).collect::<Vec<_>>(),
        tree_b.iter().map(|(p, _)| p).collect::<Vec<_>>()
    );
    let mut compared = 0usize;
    for ((path, bytes_a), (_, bytes_b)) in tree_a.iter().zip(&tree_b) {
        assert_eq!(bytes_a, bytes_b, "artifact differs between runs: {path}");
        compared += 1;
    }
    for required in ["fnl/snippet_001.fnl", "graph.kgt", "graph.kgb", "doc.html"] {
        assert!(
            tree_a.iter().any(|(p, _)| p == required),
            "missing artifact {required}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    pass(
        2,
        &format!("two pipeline runs produced {compared} byte-identical artifacts in {elapsed:?}"),
    );
}

/// Criterion 3: hidden complete redundancy. The tooltip count in the
/// rendered fixture equals the committed golden value derived by the
/// independent occurrence oracle, and the oracle agrees when recomputed.
#[test]
fn criterion_3_tooltip_completeness() {
    let out = tempfile::tempdir().unwrap();
    let output = common::semforge_cmd(&["--mode", "replay", "pipeline"], out.path());
    assert!(output.status.success());
    let html = fs::read_to_string(out.path().join("doc.html")).unwrap();
    let tooltip_count = html.matches("class=\"tooltip\"").count();

    let golden: usize = fs::read_to_string(common::fixtures_dir().join("golden/occurrence_count.txt"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();

    let ws = Workspace::load(common::fixture_config(out.path(), Mode::Replay)).unwrap();
    let graph = kgraph::parse(&fs::read_to_string(out.path().join("graph.kgt")).unwrap()).unwrap();
    let snippets: Vec<(u64, &str)> = ws
        .source
        .snippets
        .iter()
        .map(|s| (s.id, s.body.as_str()))
        .collect();
    let oracle = testkit::occurrence_oracle(&snippets, &testkit::oracle_entities(&graph));

    assert_eq!(tooltip_count, golden, "tooltip count vs committed golden");
    assert_eq!(oracle.len(), golden, "recomputed oracle vs committed golden");
    // The anchored spans are exactly the oracle's spans.
    let index = semlayer::index_occurrences(&ws.source, &graph);
    let impl_rows: Vec<(u64, usize, usize, kgraph::Uri)> = index
        .occurrences
        .iter()
        .map(|o| (o.snippet_id, o.span.0, o.span.1, o.entity.clone()))
        .collect();
    assert_eq!(impl_rows, oracle, "span-for-span agreement with the oracle");
    pass(3, &format!("{tooltip_count} tooltip elements match the oracle count"));
}

/// Criterion 4: the semantic layer is purely additive. Stripping every
/// anchor and tooltip from the fixture HTML equals rendering with an empty
/// occurrence list, byte for byte.
#[test]
fn criterion_4_non_intrusiveness() {
    let out = tempfile::tempdir().unwrap();
    let output = common::semforge_cmd(&["--mode", "replay", "pipeline"], out.path());
    assert!(output.status.success());
    let enriched = fs::read_to_string(out.path().join("doc.html")).unwrap();
    let stripped = testkit::strip_semantic_layer(&enriched).expect("well-formed layer markup");

    let ws = Workspace::load(common::fixture_config(out.path(), Mode::Replay)).unwrap();
    let graph = kgraph::parse(&fs::read_to_string(out.path().join("graph.kgt")).unwrap()).unwrap();
    let bare = semlayer::render(
        &ws.source,
        &graph,
        &[],
        &BTreeMap::new(),
        semlayer::DEFAULT_STYLESHEET,
        &ws.source.origin,
    )
    .unwrap();
    assert_eq!(stripped, bare.html, "stripped layer equals bare rendering");
    pass(4, "stripping the layer reproduces the bare rendering byte-identically");
}

/// Criterion 5: the fixture theorem compiles to exactly three scope items
/// with the right parent, and every scoped statement resolves.
#[test]
fn criterion_5_theorem_compound() {
    let out = tempfile::tempdir().unwrap();
    let output = common::semforge_cmd(&["--mode", "replay", "pipeline"], out.path());
    assert!(output.status.success());
    let graph = kgraph::parse(&fs::read_to_string(out.path().join("graph.kgt")).unwrap()).unwrap();

    let thm = graph
        .item_by_label("orthocomplement subspace theorem")
        .expect("theorem item")
        .clone();
    let mut scope_items = 0;
    for kind in ScopeKind::ALL {
        let scope_uri = graph.scope_of(&thm, kind).expect("scope item present");
        let scope = graph.scope_item(scope_uri).expect("stored as scope item");
        assert_eq!(scope.parent, thm, "{kind} scope parents the theorem");
        scope_items += 1;
    }
    assert_eq!(scope_items, 3);

    let mut scoped_statements = 0;
    for statement in graph.statements() {
        if let Some(scope) = &statement.scope {
            let scope_item = graph
                .scope_item(scope)
                .unwrap_or_else(|| panic!("{}: scope is not a scope item", statement.uri));
            assert!(
                graph.item(&scope_item.parent).is_some(),
                "{}: scope parent missing",
                statement.uri
            );
            scoped_statements += 1;
        }
    }
    assert_eq!(scoped_statements, 3, "one statement per fixture scope section");
    assert_eq!(graph.check_integrity(), Ok(()));
    pass(5, "3 scope items parent the theorem; all scoped statements resolve");
}

/// Criterion 6: for all eight bound/unbound pattern shapes, query output
/// equals the brute-force filter over the statement list.
#[test]
fn criterion_6_query_oracle_equivalence() {
    let out = tempfile::tempdir().unwrap();
    let output = common::semforge_cmd(&["--mode", "replay", "pipeline"], out.path());
    assert!(output.status.success());
    let graph = kgraph::parse(&fs::read_to_string(out.path().join("graph.kgt")).unwrap()).unwrap();

    // Instantiate every mask from real statements so bound terms exist.
    let sources: Vec<_> = graph.statements().to_vec();
    let mut checked = 0usize;
    let mut shapes_seen = [false; 8];
    for statement in sources.iter().take(12) {
        for mask in 0..8u32 {
            let pattern = TriplePattern {
                subject: (mask & 1 != 0).then(|| statement.subject.clone()),
                predicate: (mask & 2 != 0).then(|| statement.predicate.clone()),
                object: (mask & 4 != 0).then(|| statement.object.clone()),
            };
            let got = graph.query(&pattern).expect("bound terms exist");
            let expected = testkit::query_oracle(&graph, &pattern);
            assert_eq!(got, expected, "mask {mask:03b} on {}", statement.uri);
            assert!(!got.is_empty(), "the source statement itself matches");
            shapes_seen[mask as usize] = true;
            checked += 1;
        }
    }
    // Also patterns with no matches at all.
    let orthogonality = graph.item_by_label("orthogonality").unwrap().clone();
    let has_part = graph.relation_by_label("has_part").unwrap().clone();
    let empty = graph
        .query(&TriplePattern {
            subject: Some(orthogonality.clone()),
            predicate: Some(has_part.clone()),
            object: Some(kgraph::Node::Entity(orthogonality)),
        })
        .unwrap();
    assert!(empty.is_empty());
    assert!(shapes_seen.iter().all(|s| *s));
    pass(6, &format!("{checked} pattern instantiations across all 8 shapes match the oracle"));
}

/// Criterion 7: snippet splitting is lossless on the fixture and on fuzzed
/// inputs; duplicate and non-monotone ids are rejected.
#[test]
fn criterion_7_lossless_snippeting() {
    let fixture = fs::read_to_string(common::fixtures_dir().join("corpus.tex")).unwrap();
    let doc = latex::split_document(&fixture, "corpus.tex").unwrap();
    assert_eq!(doc.join(), fixture, "fixture reassembles byte-exactly");

    let mut rng = testkit::rng(0x5eed_0007);
    for round in 0..200 {
        let input = testkit::random_delimited_latex(&mut rng);
        let doc = latex::split_document(&input, "fuzz.tex")
            .unwrap_or_else(|e| panic!("round {round}: {e}: {input:?}"));
        assert_eq!(doc.join(), input, "round {round} reassembly");
    }

    assert!(matches!(
        latex::split_document("% !snippet 2\na.\n% !snippet 2\nb.\n", "x"),
        Err(latex::SplitError::DuplicateSnippetId { id: 2, .. })
    ));
    assert!(matches!(
        latex::split_document("% !snippet 5\na.\n% !snippet 3\nb.\n", "x"),
        Err(latex::SplitError::NonMonotoneIds { id: 3, .. })
    ));
    pass(7, "fixture and 200 fuzzed documents reassemble byte-exactly; bad ids rejected");
}

/// Criterion 8: replay safety. Cold-cache replay fails with a cache miss;
/// record-then-replay produces identical FNL; a one-character source change
/// changes the prompt hash.
#[test]
fn criterion_8_replay_safety() {
    // Cold cache: point the binary at an empty cache directory.
    let dir = tempfile::tempdir().unwrap();
    let fixtures = common::fixtures_dir();
    let config_path = dir.path().join("cold.toml");
    fs::write(
        &config_path,
        format!(
            "source = {:?}\ntemplate = {:?}\nvocabulary = {:?}\ncache_dir = \"cold-cache\"\noutput_dir = \"out\"\nmode = \"replay\"\n[llm]\nmodel = \"fixture-model\"\n",
            fixtures.join("corpus.tex"),
            fixtures.join("prompt_template.md"),
            fixtures.join("vocabulary.toml"),
        ),
    )
    .unwrap();
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_semforge"))
        .arg("--config")
        .arg(&config_path)
        .arg("extract")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "cold replay must fail");
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("cache miss"), "stderr: {err}");

    // Record-then-replay through the library: identical FNL files.
    let texts: Vec<String> = (1..=10)
        .map(|id| {
            fs::read_to_string(fixtures.join(format!("llm_script/snippet_{id:02}.txt"))).unwrap()
        })
        .collect();
    let cache_dir = dir.path().join("rr-cache");
    let record_out = tempfile::tempdir().unwrap();
    let mut record_config = common::fixture_config(record_out.path(), Mode::Record);
    record_config.cache_dir = cache_dir.clone();
    let ws = Workspace::load(record_config).unwrap();
    let recorder = LlmClient::new(
        "http://localhost:8750/v1/complete",
        Some("test-key".into()),
        Cache::new(&cache_dir),
        Box::new(ScriptedTransport::from_texts(&texts)),
    );
    let summary = pipeline::run_extract(&ws, &recorder, None, None).unwrap();
    assert_eq!(summary.accepted.len(), 10);
    assert_eq!(recorder.cache().entry_count().unwrap(), 10, "one entry per distinct prompt");

    let replay_out = tempfile::tempdir().unwrap();
    let mut replay_config = common::fixture_config(replay_out.path(), Mode::Replay);
    replay_config.cache_dir = cache_dir.clone();
    let ws2 = Workspace::load(replay_config).unwrap();
    let replayer = LlmClient::new(
        "http://localhost:8750/v1/complete",
        None,
        Cache::new(&cache_dir),
        Box::new(ScriptedTransport::new(vec![])),
    );
    let summary2 = pipeline::run_extract(&ws2, &replayer, None, None).unwrap();
    assert_eq!(summary2.accepted.len(), 10);
    for id in 1..=10 {
        let name = format!("fnl/snippet_{id:03}.fnl");
        let recorded = fs::read(record_out.path().join(&name)).unwrap();
        let replayed = fs::read(replay_out.path().join(&name)).unwrap();
        assert_eq!(recorded, replayed, "{name}");
    }

    // Hash sensitivity: one changed character in a snippet changes the key.
    let template = prompt::PromptTemplate::parse(
        &fs::read_to_string(fixtures.join("prompt_template.md")).unwrap(),
    )
    .unwrap();
    let vocab = parse_vocabulary(&fs::read_to_string(fixtures.join("vocabulary.toml")).unwrap())
        .unwrap();
    let original = fs::read_to_string(fixtures.join("corpus.tex")).unwrap();
    let mutated = original.replacen("vector space", "vektor space", 1);
    assert_ne!(original, mutated);
    let doc_a = latex::split_document(&original, "corpus.tex").unwrap();
    let doc_b = latex::split_document(&mutated, "corpus.tex").unwrap();
    let empty = fnl::FnlDocument::default();
    let bundle_a =
        prompt::assemble_prompt(&template, &vocab, &doc_a, &empty, 1, 24_000, "fixture-model")
            .unwrap();
    let bundle_b =
        prompt::assemble_prompt(&template, &vocab, &doc_b, &empty, 1, 24_000, "fixture-model")
            .unwrap();
    assert_ne!(bundle_a.content_hash, bundle_b.content_hash);
    pass(8, "cold replay fails with cache miss; record/replay agree; hashes track content");
}

/// Criterion 9: the intervention metric. The fixture review diff reports
/// the committed golden rate, and a constructed 10-statement case with two
/// edits reports exactly 0.2.
#[test]
fn criterion_9_intervention_metric() {
    let out = tempfile::tempdir().unwrap();
    let output = common::semforge_cmd(&["--mode", "replay", "extract"], out.path());
    assert!(output.status.success());

    let ws = Workspace::load(common::fixture_config(out.path(), Mode::Replay)).unwrap();
    let vocab = parse_vocabulary(&ws.config.vocabulary_text().unwrap()).unwrap();
    let raw = pipeline::load_fnl_path(&out.path().join("fnl"), &vocab).unwrap();
    let reviewed =
        pipeline::load_fnl_path(&common::fixtures_dir().join("reviewed"), &vocab).unwrap();
    let diff = fnl::diff_summary(&raw, &reviewed);

    let golden = fs::read_to_string(common::fixtures_dir().join("golden/intervention.txt")).unwrap();
    let field = |name: &str| -> usize {
        golden
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{name}=")))
            .and_then(|v| v.parse().ok())
            .unwrap_or_else(|| panic!("golden field {name}"))
    };
    assert_eq!(
        (diff.added, diff.removed, diff.modified),
        (field("added"), field("removed"), field("modified"))
    );
    let golden_rate = (field("added") + field("removed") + field("modified")) as f64
        / field("old_total") as f64;
    assert!((diff.intervention_rate - golden_rate).abs() < 1e-12);

    // Constructed case: ten statements, one modified, one added.
    let mut old_text = String::new();
    for i in 0..10 {
        old_text.push_str(&format!("- \"term {i}\" has_description: \"original {i}\"\n"));
    }
    let new_text = old_text.replace("original 3", "revised 3")
        + "- \"term extra\" has_description: \"added in review\"\n";
    let parse = |text: &str| {
        let outcome = fnl::parse_fnl(text, &vocab);
        assert!(outcome.is_clean());
        outcome.document
    };
    let constructed = fnl::diff_summary(&parse(&old_text), &parse(&new_text));
    assert_eq!(
        (constructed.added, constructed.removed, constructed.modified),
        (1, 0, 1)
    );
    assert_eq!(constructed.intervention_rate, 0.2, "exactly two edits over ten");
    pass(
        9,
        &format!(
            "fixture review rate {:.4} matches the golden; constructed case reports exactly 0.2",
            diff.intervention_rate
        ),
    );
}
