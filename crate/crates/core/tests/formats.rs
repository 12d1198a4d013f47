mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schelling_core::decomposition::{decompose, Strategy};
use schelling_core::formats::{
    parse_assignment, parse_edge_list, parse_instance, parse_sizes, parse_td, write_edge_list, write_instance,
    write_td, AssignmentFile, InstanceFile,
};
use schelling_core::reductions::random_assignment;
use schelling_core::{Error, Graph, Rational, SchellingInstance};

#[test]
fn named_vertices_resolve() {
    let text = r#"{"vertices":3,"edges":[[0,1],[1,2]],"type_counts":[2,1],"names":["a","b","c"]}"#;
    let (inst, names) = parse_instance(text).unwrap();
    let names = names.unwrap();
    let a = parse_assignment(r#"{"placement":{"a":0,"b":0,"c":1},"sw":"3/2"}"#, &inst, Some(&names)).unwrap();
    assert_eq!(a.placement(), &[Some(0), Some(0), Some(1)]);
    let err = parse_assignment(r#"{"placement":{"a":0,"z":0,"c":1},"sw":"3/2"}"#, &inst, Some(&names));
    assert!(matches!(err, Err(Error::Parse(_))));
    let mixed = parse_assignment(r#"{"placement":{"a":0,"0":0,"c":1},"sw":"3/2"}"#, &inst, Some(&names));
    assert!(matches!(mixed, Err(Error::Parse(_))));
}

#[test]
fn instance_errors() {
    for bad in [
        r#"{"vertices":2,"edges":[[0,2]],"type_counts":[1]}"#,
        r#"{"vertices":2,"edges":[[0,0]],"type_counts":[1]}"#,
        r#"{"vertices":2,"edges":[],"type_counts":[3]}"#,
        r#"{"vertices":2,"edges":[],"type_counts":[1],"extra":1}"#,
        r#"{"vertices":2,"edges":[],"type_counts":[1],"names":["a","a"]}"#,
        r#"{"vertices":2,"edges":[],"type_counts":[1],"names":["a"]}"#,
        r#"{"vertices":99999999999,"edges":[],"type_counts":[1]}"#,
        "[]",
    ] {
        assert!(parse_instance(bad).is_err(), "{bad}");
    }
}

#[test]
fn td_errors() {
    for bad in [
        "",
        "s td 1 1 1\n",
        "s td 1 1 1\nb 1 2\n",
        "s td 2 1 2\nb 1 1\nb 2 2\n",
        "s td 1 1 2\nb 1 1 2\n",
        "s td 2 2 2\nb 1 1 2\nb 2 1\n1 3\n",
        "b 1 1\n",
    ] {
        assert!(parse_td(bad).is_err(), "{bad:?}");
    }
    let ok = parse_td("c comment\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n").unwrap();
    assert_eq!(ok.vertex_count, 3);
    assert_eq!(ok.decomposition.width(), 1);
}

#[test]
fn edge_list_and_sizes() {
    let g = parse_edge_list("# triangle\n3\n0 1\n1 2\n\n2 0\n").unwrap();
    assert_eq!(g, Graph::complete(3));
    assert!(parse_edge_list("3\n0 1 2\n").is_err());
    assert!(parse_edge_list("").is_err());
    assert_eq!(parse_sizes("2, 2 4").unwrap(), vec![2, 2, 4]);
    assert!(parse_sizes("2,0").is_err());
    assert!(parse_sizes(" , ").is_err());
}

#[test]
fn assignment_sw_must_match() {
    let inst = SchellingInstance::two_types(Graph::path(4), 2, 2).unwrap();
    let good = r#"{"placement":{"0":0,"1":0,"2":1,"3":1},"sw":"3"}"#;
    assert!(parse_assignment(good, &inst, None).is_ok());
    let bad = r#"{"placement":{"0":0,"1":0,"2":1,"3":1},"sw":"2/1"}"#;
    assert!(matches!(parse_assignment(bad, &inst, None), Err(Error::InvalidAssignment(_))));
}

proptest! {
    #[test]
    fn instance_round_trip(inst in common::instance_strategy(10, 3), named in any::<bool>()) {
        let names: Option<Vec<String>> = named.then(|| (0..inst.vertex_count()).map(|i| format!("v{i}")).collect());
        let text = write_instance(&inst, names.as_deref());
        let (back, back_names) = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(&back_names, &names);
        prop_assert_eq!(write_instance(&back, back_names.as_deref()), text.clone());
        let file: InstanceFile = serde_json::from_str(&text).unwrap();
        prop_assert!(file.edges.iter().all(|[u, v]| u < v));
    }

    #[test]
    fn assignment_round_trip(inst in common::instance_strategy(10, 3), seed in any::<u64>()) {
        let a = random_assignment(&inst, &mut ChaCha8Rng::seed_from_u64(seed));
        let file = AssignmentFile::new(&inst, &a).unwrap();
        for text in [file.to_canonical_string(), file.to_pretty_string()] {
            prop_assert_eq!(&parse_assignment(&text, &inst, None).unwrap(), &a);
        }
        prop_assert_eq!(file.sw, common::welfare(inst.graph(), a.placement()));
    }

    #[test]
    fn edge_list_round_trip(g in common::graph_strategy(0, 10)) {
        prop_assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn td_round_trip(g in common::graph_strategy(1, 10)) {
        let td = decompose(&g, Strategy::MinFill).unwrap();
        let back = parse_td(&write_td(&td, g.vertex_count())).unwrap();
        back.decomposition.validate(&g).unwrap();
        prop_assert_eq!(back.decomposition.bags.len(), td.bags.len());
    }

    #[test]
    fn rational_text_round_trip(n in -1000i128..1000, d in 1i128..1000) {
        let r = Rational::new(n, d);
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn parsers_reject_garbage_without_panicking(text in "\\PC{0,64}") {
        let inst = SchellingInstance::two_types(Graph::path(3), 1, 1).unwrap();
        let _ = parse_instance(&text);
        let _ = parse_assignment(&text, &inst, None);
        let _ = parse_td(&text);
        let _ = parse_edge_list(&text);
        let _ = parse_sizes(&text);
        let _ = text.parse::<Rational>();
    }
}
