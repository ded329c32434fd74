//! Randomized property checks over the core invariants, with fixed seeds.

use semforge_core::fnl::{self, PredicateVocabulary};
use semforge_core::kgraph;

/// The parser returns diagnostics on arbitrary input instead of panicking,
/// and whatever it accepts survives the canonical round trip.
#[test]
fn fnl_parser_never_panics_on_noise() {
    let vocab = PredicateVocabulary::default_set();
    let mut rng = testkit::rng(0xfadefade);
    for round in 0..500 {
        let noise = testkit::random_fnl_noise(&mut rng);
        let outcome = fnl::parse_fnl(&noise, &vocab);
        let text = fnl::serialize_fnl(&outcome.document);
        let back = fnl::parse_fnl(&text, &vocab);
        assert!(back.is_clean(), "round {round}: emitted text must reparse");
        assert_eq!(back.document, outcome.document, "round {round}");
    }
    // Arbitrary bytes, decoded lossily.
    for round in 0..200 {
        use rand::RngCore;
        let mut bytes = vec![0u8; 256];
        rng.fill_bytes(&mut bytes);
        let text = String::from_utf8_lossy(&bytes);
        let _ = fnl::parse_fnl(&text, &vocab);
        let _ = round;
    }
}

/// Queries over randomized graphs agree with the brute-force filter for
/// every pattern shape, and indexes stay rebuildable.
#[test]
fn random_graphs_answer_queries_like_the_oracle() {
    let mut rng = testkit::rng(0xabcd_0042);
    for round in 0..30 {
        let graph = testkit::random_graph(&mut rng, 1000);
        assert_eq!(graph.check_integrity(), Ok(()), "round {round}");
        for _ in 0..25 {
            let pattern = testkit::random_pattern(&mut rng, &graph);
            let got = graph.query(&pattern).expect("terms drawn from the graph");
            let expected = testkit::query_oracle(&graph, &pattern);
            assert_eq!(got, expected, "round {round}, pattern {pattern:?}");
        }
    }
}

/// URI allocation is a pure function of the operation sequence.
#[test]
fn allocation_is_deterministic() {
    let build = |seed: u64| {
        let mut r = testkit::rng(seed);
        testkit::random_graph(&mut r, 200)
    };
    let a = build(7);
    let b = build(7);
    assert_eq!(a, b);
    assert_eq!(kgraph::serialize(&a), kgraph::serialize(&b));
    assert_eq!(
        kgraph::export_builder_script(&a),
        kgraph::export_builder_script(&b)
    );
}

/// Builder-script export stays byte-stable across graph round trips.
#[test]
fn builder_script_survives_round_trip() {
    let mut rng = testkit::rng(0x0b0e);
    for _ in 0..20 {
        let graph = testkit::random_graph(&mut rng, 300);
        let script = kgraph::export_builder_script(&graph);
        let back = kgraph::parse(&kgraph::serialize(&graph)).unwrap();
        assert_eq!(kgraph::export_builder_script(&back), script);
    }
}

/// Format parsers and the HTML converter never panic, whatever the input
/// looks like; corrupted graph files fail with a positioned error.
#[test]
fn text_surfaces_never_panic_on_noise() {
    use rand::Rng;
    let mut rng = testkit::rng(0x5eed_000a);
    let shrapnel = [
        "\\", "{", "}", "$", "$$", "%", "\n", "\t", "kgt 1", "E", "S", "lit:str:\"", "q:",
        "scope=", "\\textbf", "\\begin{itemize}", "\\end{align}", "\\item", "% !snippet ",
        "1", "42", "kb://main/I1", "\u{e4}\u{f6}\u{fc}", "\u{1F600}", " ", "\\(", "\\]", "##",
    ];
    let noise = |rng: &mut rand::rngs::StdRng| {
        let mut out = String::new();
        for _ in 0..rng.gen_range(0..150) {
            out.push_str(shrapnel[rng.gen_range(0..shrapnel.len())]);
        }
        out
    };
    for _ in 0..300 {
        let text = noise(&mut rng);
        let _ = kgraph::parse(&text);
        let _ = semforge_core::latex::split_document(&text, "noise.tex");
        let _ = semforge_core::semlayer::latex_to_html(&text);
        let _ = semforge_core::prompt::PromptTemplate::parse(&text);
    }
    // Corrupting any single line of a valid graph file is caught, with the
    // offending line number.
    let mut r = testkit::rng(3);
    let graph = testkit::random_graph(&mut r, 60);
    let good = kgraph::serialize(&graph);
    let lines: Vec<&str> = good.lines().collect();
    for corrupt_at in 1..lines.len().min(25) {
        let mut mutated: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
        mutated[corrupt_at] = mutated[corrupt_at].replace("kb://", "kb:/X");
        if mutated[corrupt_at] == lines[corrupt_at] {
            continue; // line had no uri
        }
        let err = kgraph::parse(&mutated.join("\n")).unwrap_err();
        assert_eq!(err.line, corrupt_at + 1);
    }
}
