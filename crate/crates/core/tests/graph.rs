mod common;

use proptest::prelude::*;
use repind_core::fixtures;
use repind_core::transforms::Transformation;
use repind_core::{graph_equal, NodeType, TypedGraph};

const IMDB_FILE: &str = include_str!("fixtures/movie_fragment_imdb.tsv");
const FREEBASE_FILE: &str = include_str!("fixtures/movie_fragment_freebase.tsv");

fn strip_comments(s: &str) -> String {
    s.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn labels_of(g: &TypedGraph, key: &str, t: &str) -> Vec<String> {
    let t = NodeType::new(t).unwrap();
    g.neighbors(g.find_key(key).unwrap(), Some(&t))
        .unwrap()
        .into_iter()
        .map(|n| g.label(n).to_string())
        .collect()
}

#[test]
fn imdb_fixture_file_matches_builder() {
    let g = TypedGraph::from_tsv(IMDB_FILE).unwrap();
    assert_eq!((g.node_count(), g.edge_count()), (14, 20));
    assert!(graph_equal(&g, &fixtures::movie_fragment_imdb()));
    assert_eq!(g.to_tsv(), strip_comments(IMDB_FILE));
}

#[test]
fn freebase_fixture_file_matches_builder() {
    let g = TypedGraph::from_tsv(FREEBASE_FILE).unwrap();
    assert_eq!((g.node_count(), g.edge_count()), (21, 21));
    assert!(graph_equal(&g, &fixtures::movie_fragment_freebase()));
    assert_eq!(g.to_tsv(), strip_comments(FREEBASE_FILE));
}

#[test]
fn fixture_files_are_related_by_the_rewrite() {
    let imdb = TypedGraph::from_tsv(IMDB_FILE).unwrap();
    let freebase = TypedGraph::from_tsv(FREEBASE_FILE).unwrap();
    assert!(!graph_equal(&imdb, &freebase));
    let t = Transformation::freebase();
    assert!(graph_equal(&t.apply(&imdb).unwrap(), &freebase));
    assert!(graph_equal(&t.inverse().apply(&freebase).unwrap(), &imdb));
}

#[test]
fn film_neighbors_of_an_actor() {
    let imdb = fixtures::movie_fragment_imdb();
    assert_eq!(
        labels_of(&imdb, "A:H.Christensen", "F"),
        ["Jumper", "Star Wars III"]
    );
    let freebase = fixtures::movie_fragment_freebase();
    assert!(labels_of(&freebase, "A:H.Christensen", "F").is_empty());
    assert_eq!(labels_of(&freebase, "A:H.Christensen", "S").len(), 3);
}

proptest! {
    #[test]
    fn save_load_round_trip(parts in common::arb_parts(25, 4)) {
        let g = common::build(&parts);
        let back = TypedGraph::from_tsv(&g.to_tsv()).unwrap();
        prop_assert!(graph_equal(&g, &back));
        prop_assert_eq!(back.to_tsv(), g.to_tsv());
    }

    #[test]
    fn content_not_insertion_order(parts in common::arb_parts(20, 3), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let g = common::build(&parts);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..parts.types.len()).collect();
        order.shuffle(&mut rng);
        let mut edges = parts.edges.clone();
        edges.shuffle(&mut rng);
        let mut h = TypedGraph::new();
        let mut ids = vec![None; order.len()];
        for &i in &order {
            let t = NodeType::new(common::TYPE_NAMES[parts.types[i]]).unwrap();
            ids[i] = Some(h.add_node(&t, &format!("n{i:02}")).unwrap());
        }
        for &(u, v) in &edges {
            // reversed endpoints, and every edge inserted twice
            h.add_edge(ids[v].unwrap(), ids[u].unwrap()).unwrap();
            h.add_edge(ids[u].unwrap(), ids[v].unwrap()).unwrap();
        }

        prop_assert!(graph_equal(&g, &h));
        prop_assert_eq!(g.edge_count(), parts.edges.len());
        prop_assert_eq!(h.edge_count(), parts.edges.len());
        for n in g.node_ids() {
            let key = g.describe(n);
            let m = h.find_key(&key).unwrap();
            let a: Vec<String> = g.neighbors(n, None).unwrap().into_iter().map(|x| g.describe(x)).collect();
            let b: Vec<String> = h.neighbors(m, None).unwrap().into_iter().map(|x| h.describe(x)).collect();
            prop_assert_eq!(a, b);
        }
    }
}
