//! Small hand-built graphs: the IMDb and Freebase movie fragments and a
//! two-character casting.

use crate::graph::{NodeType, TypedGraph};

const FRAGMENT_NODES: [(&str, &str); 14] = [
    ("C", "Griffin"),
    ("F", "Jumper"),
    ("A", "H.Christensen"),
    ("C", "Darth Vader"),
    ("F", "Star Wars V"),
    ("A", "F.Oz"),
    ("A", "J.Bell"),
    ("C", "David Rice"),
    ("A", "H.Ford"),
    ("C", "Han Solo"),
    ("C", "Anakin Skywalker"),
    ("F", "Star Wars III"),
    ("A", "D.Prowse"),
    ("C", "Yoda"),
];

/// (film, actor, character) castings of the movie fragment, one per triangle.
pub const FRAGMENT_CASTINGS: [(&str, &str, &str); 7] = [
    ("Jumper", "H.Christensen", "David Rice"),
    ("Jumper", "J.Bell", "Griffin"),
    ("Star Wars III", "H.Christensen", "Anakin Skywalker"),
    ("Star Wars III", "H.Christensen", "Darth Vader"),
    ("Star Wars V", "D.Prowse", "Darth Vader"),
    ("Star Wars V", "F.Oz", "Yoda"),
    ("Star Wars V", "H.Ford", "Han Solo"),
];

fn ty(s: &str) -> NodeType {
    NodeType::new(s).expect("fixture type")
}

fn fragment_nodes() -> TypedGraph {
    let mut g = TypedGraph::new();
    for (t, l) in FRAGMENT_NODES {
        g.add_node(&ty(t), l).expect("fixture node");
    }
    g
}

fn link(g: &mut TypedGraph, a: (&str, &str), b: (&str, &str)) {
    let u = g.find(&ty(a.0), a.1).expect("fixture endpoint");
    let v = g.find(&ty(b.0), b.1).expect("fixture endpoint");
    g.add_edge(u, v).expect("fixture edge");
}

/// IMDb form: films, actors and characters linked pairwise.
pub fn movie_fragment_imdb() -> TypedGraph {
    let mut g = fragment_nodes();
    // transcribed edge by edge from the drawing
    let chains: [&[(&str, &str)]; 5] = [
        &[
            ("F", "Jumper"),
            ("A", "H.Christensen"),
            ("C", "Darth Vader"),
            ("F", "Star Wars V"),
            ("A", "F.Oz"),
            ("C", "Yoda"),
            ("F", "Star Wars V"),
        ],
        &[
            ("F", "Jumper"),
            ("C", "David Rice"),
            ("A", "H.Christensen"),
            ("F", "Star Wars III"),
        ],
        &[
            ("F", "Star Wars V"),
            ("A", "H.Ford"),
            ("C", "Han Solo"),
            ("F", "Star Wars V"),
        ],
        &[
            ("A", "H.Christensen"),
            ("C", "Anakin Skywalker"),
            ("F", "Star Wars III"),
            ("C", "Darth Vader"),
            ("A", "D.Prowse"),
            ("F", "Star Wars V"),
        ],
        &[
            ("F", "Jumper"),
            ("C", "Griffin"),
            ("A", "J.Bell"),
            ("F", "Jumper"),
        ],
    ];
    for chain in chains {
        for w in chain.windows(2) {
            link(&mut g, w[0], w[1]);
        }
    }
    g
}

/// Freebase form: every casting reified as a starring node `S`.
///
/// Starring labels follow the fresh-label scheme of the triangle-to-star
/// rewrite, which numbers castings in (film, actor, character) label order.
pub fn movie_fragment_freebase() -> TypedGraph {
    let mut g = fragment_nodes();
    let star = ty("S");
    for (i, (film, actor, character)) in FRAGMENT_CASTINGS.iter().enumerate() {
        let label = crate::transforms::fresh_label(i);
        g.add_node(&star, &label).expect("fixture star");
        for end in [("F", *film), ("A", *actor), ("C", *character)] {
            link(&mut g, ("S", &label), end);
        }
    }
    g
}

/// One actor playing two characters in one film.
pub fn two_character_casting() -> TypedGraph {
    let mut g = TypedGraph::new();
    for (t, l) in [
        ("A", "actor"),
        ("F", "film"),
        ("C", "role1"),
        ("C", "role2"),
    ] {
        g.add_node(&ty(t), l).expect("fixture node");
    }
    let a = ("A", "actor");
    let f = ("F", "film");
    for c in [("C", "role1"), ("C", "role2")] {
        link(&mut g, a, c);
        link(&mut g, f, c);
    }
    link(&mut g, a, f);
    g
}

/// [`two_character_casting`] plus a co-star who shares the second role,
/// so that the two actors are connected through the film.
pub fn two_character_with_costar() -> TypedGraph {
    let mut g = two_character_casting();
    g.add_node(&ty("A"), "costar").expect("fixture node");
    link(&mut g, ("A", "costar"), ("F", "film"));
    link(&mut g, ("A", "costar"), ("C", "role2"));
    g
}
