use game_core::fixtures::{g1, g2, g2_with_choice};
use game_core::game::{GameError, Objective, Violation};
use game_core::{parse_game, parse_payoff_vector, rat, serialize_game};

#[test]
fn fixtures_round_trip() {
    for (game, initial) in [(g1(), None), (g2(), Some(2)), (g2_with_choice(), Some(2))] {
        let text = serialize_game(&game, initial);
        let parsed = parse_game(&text).expect("canonical text parses");
        assert_eq!(parsed.game, game);
        assert_eq!(parsed.initial, initial);
        assert!(parsed.warnings.is_empty());
        // Canonical serialization is idempotent byte for byte.
        assert_eq!(serialize_game(&parsed.game, parsed.initial), text);
    }
}

#[test]
fn parses_handwritten_document() {
    let text = r#"{
        "players": 2,
        "vertices": [
            {"id": "s", "owner": "chance"},
            {"id": "a", "owner": 0},
            {"id": "b", "owner": 1}
        ],
        "edges": [
            {"from": "s", "to": "a", "prob": "2/3"},
            {"from": "s", "to": "b", "prob": "1/3"},
            {"from": "a", "to": "s"},
            {"from": "b", "to": "b"}
        ],
        "objectives": [
            {"type": "buchi", "set": ["a"]},
            {"type": "parity", "priorities": {"s": 1, "a": 1, "b": 0}}
        ],
        "initial": "s"
    }"#;
    let parsed = parse_game(text).unwrap();
    let g = &parsed.game;
    assert_eq!(g.players(), 2);
    assert_eq!(g.vertex_count(), 3);
    // Ids follow lexicographic name order: a, b, s.
    assert_eq!(g.name(0), "a");
    assert_eq!(g.name(2), "s");
    assert_eq!(parsed.initial, Some(2));
    assert!(g.is_stochastic(2));
    assert_eq!(g.prob(2, 0), Some(&rat(2, 3)));
    assert_eq!(g.objective(0), &Objective::Buchi([0].into()));
    assert_eq!(g.objective(1), &Objective::Parity(vec![1, 0, 1]));
}

#[test]
fn syntax_errors_carry_position() {
    let err = parse_game("{\n  \"players\": 1,\n  oops\n}").unwrap_err();
    match err {
        GameError::Syntax(msg) => assert!(msg.contains("line 3"), "got: {msg}"),
        other => panic!("expected syntax error, got {other:?}"),
    }
}

#[test]
fn probability_on_controlled_edge_is_rejected() {
    let text = r#"{
        "players": 1,
        "vertices": [{"id": "a", "owner": 0}],
        "edges": [{"from": "a", "to": "a", "prob": "1/3"}],
        "objectives": [{"type": "buchi", "set": []}]
    }"#;
    match parse_game(text).unwrap_err() {
        GameError::Invalid(vs) => assert!(
            vs.iter().any(|v| matches!(v, Violation::ProbabilityOnControlledEdge { .. })),
            "got: {vs:?}"
        ),
        other => panic!("expected validation failure, got {other:?}"),
    }
}

#[test]
fn bad_probability_sum_is_reported_with_vertex() {
    let text = r#"{
        "players": 1,
        "vertices": [{"id": "a", "owner": 0}, {"id": "s", "owner": "chance"}],
        "edges": [
            {"from": "a", "to": "a"},
            {"from": "s", "to": "a", "prob": "1/2"},
            {"from": "s", "to": "s", "prob": "1/3"}
        ],
        "objectives": [{"type": "buchi", "set": ["a"]}]
    }"#;
    match parse_game(text).unwrap_err() {
        GameError::Invalid(vs) => {
            assert_eq!(
                vs,
                vec![Violation::ProbabilitySumNotOne { vertex: "s".into(), sum: "5/6".into() }]
            );
        }
        other => panic!("expected validation failure, got {other:?}"),
    }
}

#[test]
fn zero_probability_edges_are_dropped_with_warning() {
    let text = r#"{
        "players": 1,
        "vertices": [{"id": "a", "owner": 0}, {"id": "s", "owner": "chance"}],
        "edges": [
            {"from": "a", "to": "a"},
            {"from": "s", "to": "a", "prob": "1"},
            {"from": "s", "to": "s", "prob": "0"}
        ],
        "objectives": [{"type": "buchi", "set": ["a"]}]
    }"#;
    let parsed = parse_game(text).unwrap();
    assert_eq!(parsed.warnings.len(), 1);
    assert!(parsed.warnings[0].contains("s -> s"), "got: {:?}", parsed.warnings);
    assert!(!parsed.game.has_edge(1, 1));
}

#[test]
fn unknown_vertices_and_non_identity_colours_are_rejected() {
    let missing = r#"{
        "players": 1,
        "vertices": [{"id": "a", "owner": 0}],
        "edges": [{"from": "a", "to": "zzz"}],
        "objectives": [{"type": "buchi", "set": []}]
    }"#;
    assert!(matches!(parse_game(missing).unwrap_err(), GameError::UnknownVertex(v) if v == "zzz"));

    let colours = r#"{
        "players": 1,
        "vertices": [{"id": "a", "owner": 0}, {"id": "b", "owner": 0}],
        "edges": [{"from": "a", "to": "b"}, {"from": "b", "to": "a"}],
        "objectives": [{"type": "buchi", "set": []}],
        "colours": {"a": "b"}
    }"#;
    assert!(matches!(parse_game(colours).unwrap_err(), GameError::Syntax(_)));
}

#[test]
fn payoff_vector_accepts_both_notations() {
    assert_eq!(parse_payoff_vector("101", 3).unwrap(), vec![rat(1, 1), rat(0, 1), rat(1, 1)]);
    assert_eq!(parse_payoff_vector("1/2,1,0", 3).unwrap(), vec![rat(1, 2), rat(1, 1), rat(0, 1)]);
    assert_eq!(parse_payoff_vector("0", 1).unwrap(), vec![rat(0, 1)]);
    assert!(parse_payoff_vector("10", 3).is_err());
    assert!(parse_payoff_vector("1/0,1", 2).is_err());
}
