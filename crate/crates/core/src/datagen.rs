//! Seeded generators for IMDb-shaped and DBLP-shaped graphs.
//!
//! Popularity follows preferential attachment: an actor (author) is drawn
//! with weight `1 + castings (papers) so far`. Outputs always satisfy the
//! preconditions of the rewrites for their schema.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, NodeType, TypedGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatagenError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("unknown size preset {0:?}")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImdbParams {
    pub seed: u64,
    pub n_actors: usize,
    pub n_films: usize,
    /// Inclusive range of actors cast per film.
    pub cast_size: (usize, usize),
    /// Chance that a casting gets a second character for the same actor.
    pub multi_character_prob: f64,
}

impl Default for ImdbParams {
    fn default() -> Self {
        ImdbParams {
            seed: 1,
            n_actors: 200,
            n_films: 300,
            cast_size: (3, 8),
            multi_character_prob: 0.05,
        }
    }
}

impl ImdbParams {
    pub fn preset(name: &str, seed: u64) -> Result<Self, DatagenError> {
        let (n_actors, n_films) = match name {
            "tiny" => (12, 10),
            "small" => (200, 300),
            "medium" => (1000, 1500),
            other => return Err(DatagenError::UnknownPreset(other.to_string())),
        };
        Ok(ImdbParams {
            seed,
            n_actors,
            n_films,
            ..Default::default()
        })
    }

    pub fn validate(&self) -> Result<(), DatagenError> {
        check_count("n_actors", self.n_actors)?;
        check_count("n_films", self.n_films)?;
        check_range("cast_size", self.cast_size)?;
        check_prob("multi_character_prob", self.multi_character_prob)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DblpParams {
    pub seed: u64,
    pub n_authors: usize,
    pub n_papers: usize,
    pub n_confs: usize,
    pub n_years: usize,
    /// Inclusive range of authors per paper.
    pub authors_per_paper: (usize, usize),
    /// Each paper cites up to this many earlier papers.
    pub max_citations: usize,
}

impl Default for DblpParams {
    fn default() -> Self {
        DblpParams {
            seed: 1,
            n_authors: 800,
            n_papers: 2400,
            n_confs: 15,
            n_years: 10,
            authors_per_paper: (1, 4),
            max_citations: 2,
        }
    }
}

impl DblpParams {
    pub fn preset(name: &str, seed: u64) -> Result<Self, DatagenError> {
        let (n_authors, n_papers, n_confs) = match name {
            "tiny" => (20, 30, 3),
            "small" => (800, 2400, 15),
            "medium" => (2000, 5500, 50),
            other => return Err(DatagenError::UnknownPreset(other.to_string())),
        };
        Ok(DblpParams {
            seed,
            n_authors,
            n_papers,
            n_confs,
            ..Default::default()
        })
    }

    pub fn validate(&self) -> Result<(), DatagenError> {
        check_count("n_authors", self.n_authors)?;
        check_count("n_papers", self.n_papers)?;
        check_count("n_confs", self.n_confs)?;
        check_count("n_years", self.n_years)?;
        check_range("authors_per_paper", self.authors_per_paper)
    }
}

/// Generator parameters tagged by schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GenParams {
    Imdb(ImdbParams),
    Dblp(DblpParams),
}

impl GenParams {
    pub fn generate(&self) -> Result<TypedGraph, DatagenError> {
        match self {
            GenParams::Imdb(p) => gen_imdb(p),
            GenParams::Dblp(p) => gen_dblp(p),
        }
    }
}

fn check_count(name: &str, v: usize) -> Result<(), DatagenError> {
    if v == 0 {
        return Err(DatagenError::InvalidParams(format!(
            "{name} must be at least 1"
        )));
    }
    Ok(())
}

fn check_range(name: &str, (lo, hi): (usize, usize)) -> Result<(), DatagenError> {
    if lo == 0 || lo > hi {
        return Err(DatagenError::InvalidParams(format!(
            "{name} must satisfy 1 <= min <= max, got ({lo}, {hi})"
        )));
    }
    Ok(())
}

fn check_prob(name: &str, p: f64) -> Result<(), DatagenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(DatagenError::InvalidParams(format!(
            "{name} must lie in [0,1], got {p}"
        )));
    }
    Ok(())
}

fn ty(s: &str) -> NodeType {
    NodeType::new(s).expect("static type name")
}

fn add_nodes(
    g: &mut TypedGraph,
    t: &NodeType,
    labels: impl Iterator<Item = String>,
) -> Vec<NodeId> {
    labels
        .map(|l| g.add_node(t, &l).expect("generated labels are unique"))
        .collect()
}

/// Draws `count` distinct indices with weight `1 + popularity[i]`.
fn preferential_pick(rng: &mut ChaCha8Rng, popularity: &[usize], count: usize) -> Vec<usize> {
    let idx: Vec<usize> = (0..popularity.len()).collect();
    let mut picked: Vec<usize> = idx
        .choose_multiple_weighted(rng, count, |&i| (1 + popularity[i]) as f64)
        .expect("weights are positive and finite")
        .copied()
        .collect();
    picked.sort_unstable();
    picked
}

/// Films, actors and characters; every casting is an (F, A, C) triangle with
/// a fresh character node.
pub fn gen_imdb(p: &ImdbParams) -> Result<TypedGraph, DatagenError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (film, actor, character) = (ty("F"), ty("A"), ty("C"));
    let mut g = TypedGraph::new();
    let actors = add_nodes(
        &mut g,
        &actor,
        (0..p.n_actors).map(|i| format!("actor{i:05}")),
    );
    let films = add_nodes(&mut g, &film, (0..p.n_films).map(|i| format!("film{i:05}")));
    let mut castings = vec![0usize; p.n_actors];
    let mut next_char = 0usize;
    let (lo, hi) = (p.cast_size.0.min(p.n_actors), p.cast_size.1.min(p.n_actors));
    for &f in &films {
        let size = rng.gen_range(lo..=hi);
        for ai in preferential_pick(&mut rng, &castings, size) {
            castings[ai] += 1;
            let a = actors[ai];
            let roles = if rng.gen_bool(p.multi_character_prob) {
                2
            } else {
                1
            };
            for _ in 0..roles {
                let c = g
                    .add_node(&character, &format!("char{next_char:06}"))
                    .expect("fresh character");
                next_char += 1;
                g.add_edge(f, a).expect("valid");
                g.add_edge(f, c).expect("valid");
                g.add_edge(a, c).expect("valid");
            }
        }
    }
    Ok(g)
}

/// Authors, papers, conferences and years: each paper has one conference,
/// one year, a preferential-attachment author list and a few citations of
/// earlier papers.
pub fn gen_dblp(p: &DblpParams) -> Result<TypedGraph, DatagenError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (author, paper, conf, year) = (ty("A"), ty("P"), ty("C"), ty("Y"));
    let mut g = TypedGraph::new();
    let authors = add_nodes(
        &mut g,
        &author,
        (0..p.n_authors).map(|i| format!("author{i:05}")),
    );
    let confs = add_nodes(&mut g, &conf, (0..p.n_confs).map(|i| format!("conf{i:03}")));
    let years = add_nodes(
        &mut g,
        &year,
        (0..p.n_years).map(|i| (2005 + i).to_string()),
    );
    let papers = add_nodes(
        &mut g,
        &paper,
        (0..p.n_papers).map(|i| format!("paper{i:06}")),
    );
    let mut written = vec![0usize; p.n_authors];
    let (lo, hi) = (
        p.authors_per_paper.0.min(p.n_authors),
        p.authors_per_paper.1.min(p.n_authors),
    );
    for (i, &pp) in papers.iter().enumerate() {
        let c = *confs.choose(&mut rng).expect("at least one conference");
        let y = *years.choose(&mut rng).expect("at least one year");
        g.add_edge(pp, c).expect("valid");
        g.add_edge(pp, y).expect("valid");
        let size = rng.gen_range(lo..=hi);
        for ai in preferential_pick(&mut rng, &written, size) {
            written[ai] += 1;
            g.add_edge(pp, authors[ai]).expect("valid");
        }
        if i > 0 && p.max_citations > 0 {
            let n = rng.gen_range(0..=p.max_citations.min(i));
            for cited in rand::seq::index::sample(&mut rng, i, n) {
                g.add_edge(pp, papers[cited]).expect("valid");
            }
        }
    }
    Ok(g)
}
