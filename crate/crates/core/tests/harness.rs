use std::collections::BTreeMap;

use repind_core::datagen::{DblpParams, GenParams, ImdbParams};
use repind_core::harness::{
    render_report, run_experiment, AlgorithmKind, AlgorithmSpec, ExperimentConfig, GraphSource,
    ReportFormat, RowOutcome, TransformSpec, TSV_HEADER,
};
use repind_core::metrics::KendallParams;
use repind_core::similarity::AlgorithmParams;
use repind_core::transforms::TransformKind;

const REFERENCE: &str = include_str!("fixtures/reference_experiment.json");
const GOLDEN: &str = include_str!("fixtures/reference_report.tsv");

fn algo(name: AlgorithmKind, metapath: Option<&str>) -> AlgorithmSpec {
    AlgorithmSpec {
        name,
        params: AlgorithmParams::default(),
        metapath: metapath.map(str::to_string),
        metapath_overrides: BTreeMap::new(),
        closest_metapath: false,
    }
}

fn transform(name: TransformKind) -> TransformSpec {
    TransformSpec {
        name,
        inverse: false,
        types: BTreeMap::new(),
    }
}

fn config(
    graph: GenParams,
    transformations: Vec<TransformSpec>,
    algorithms: Vec<AlgorithmSpec>,
) -> ExperimentConfig {
    ExperimentConfig {
        graph: GraphSource::Generate(graph),
        transformations,
        algorithms,
        queries: Default::default(),
        k: vec![10, 50],
        kendall: KendallParams::default(),
        threads: None,
        record_timings: false,
        output: None,
        format: ReportFormat::Tsv,
    }
}

fn dblp(seed: u64) -> GenParams {
    GenParams::Dblp(DblpParams {
        seed,
        n_authors: 120,
        n_papers: 260,
        n_confs: 4,
        n_years: 4,
        ..Default::default()
    })
}

fn imdb(seed: u64) -> GenParams {
    GenParams::Imdb(ImdbParams {
        seed,
        n_actors: 80,
        n_films: 90,
        multi_character_prob: 0.2,
        ..Default::default()
    })
}

#[test]
fn reference_report_matches_golden_file() {
    let cfg = ExperimentConfig::from_json(REFERENCE).unwrap();
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(render_report(&report, ReportFormat::Tsv), GOLDEN);
}

#[test]
fn rows_cover_the_grid_in_config_order() {
    let cfg = config(
        dblp(2),
        vec![
            transform(TransformKind::L3s),
            transform(TransformKind::Sigmod),
        ],
        vec![
            algo(AlgorithmKind::Pathsim, Some("APCPA")),
            algo(AlgorithmKind::Rwr, None),
        ],
    );
    let report = run_experiment(&cfg).unwrap();
    let grid: Vec<(String, String, usize)> = report
        .rows
        .iter()
        .map(|r| (r.algorithm.clone(), r.transformation.clone(), r.k))
        .collect();
    let mut want = Vec::new();
    for a in ["pathsim:APCPA", "rwr"] {
        for t in ["l3s", "sigmod"] {
            for k in [10, 50] {
                want.push((a.to_string(), t.to_string(), k));
            }
        }
    }
    assert_eq!(grid, want);
    assert_eq!(report.queries.len(), 50);
    let names: Vec<&str> = report.sizes.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, ["original", "l3s", "sigmod"]);
    let tsv = render_report(&report, ReportFormat::Tsv);
    assert_eq!(tsv.lines().next(), Some(TSV_HEADER));
    assert_eq!(tsv.lines().count(), 1 + want.len());
}

#[test]
fn identity_gives_zero_for_every_algorithm() {
    for graph in [dblp(3), imdb(3)] {
        let mut algorithms = vec![
            algo(AlgorithmKind::Rwr, None),
            algo(AlgorithmKind::Simrank, None),
        ];
        if matches!(graph, GenParams::Dblp(_)) {
            algorithms.push(algo(AlgorithmKind::Pathsim, Some("APCPA")));
        } else {
            algorithms.push(algo(AlgorithmKind::Pathsim, Some("AFA")));
        }
        let mut cfg = config(graph, vec![transform(TransformKind::Identity)], algorithms);
        cfg.queries.count = 30;
        for row in run_experiment(&cfg).unwrap().rows {
            assert_eq!(row.mean(), Some(0.0), "{row:?}");
        }
    }
}

#[test]
fn pathsim_is_unchanged_by_sigmod_and_l3s() {
    let cfg = config(
        dblp(4),
        vec![
            transform(TransformKind::Sigmod),
            transform(TransformKind::L3s),
        ],
        vec![algo(AlgorithmKind::Pathsim, Some("APCPA"))],
    );
    let report = run_experiment(&cfg).unwrap();
    let paths: Vec<_> = report
        .rows
        .iter()
        .map(|r| r.translated_metapath.clone().unwrap())
        .collect();
    assert_eq!(paths, ["AGPCPGA", "AGPCPGA", "APRCRPA", "APRCRPA"]);
    for row in &report.rows {
        let RowOutcome::Compared(s) = &row.outcome else {
            panic!("{row:?}")
        };
        assert_eq!((s.mean, s.max), (0.0, 0.0), "{row:?}");
    }
}

#[test]
fn unrelated_metapath_gives_positive_difference() {
    let mut pathsim = algo(AlgorithmKind::Pathsim, Some("APCPA"));
    // co-authorship instead of shared venues
    pathsim
        .metapath_overrides
        .insert("sigmod".into(), "AGPGA".into());
    let cfg = config(
        dblp(5),
        vec![transform(TransformKind::Sigmod)],
        vec![pathsim],
    );
    for row in run_experiment(&cfg).unwrap().rows {
        assert!(row.mean().unwrap() > 0.0, "{row:?}");
    }
}

#[test]
fn freebase_pathsim_needs_an_opt_in() {
    let strict = algo(AlgorithmKind::Pathsim, Some("AFA"));
    let mut closest = strict.clone();
    closest.closest_metapath = true;
    let mut replaced = strict.clone();
    replaced
        .metapath_overrides
        .insert("freebase".into(), "ASFSA".into());
    let mut cfg = config(
        imdb(6),
        vec![transform(TransformKind::Freebase)],
        vec![strict, closest, replaced],
    );
    cfg.queries.count = 40;
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.rows.len(), 6);
    for row in &report.rows[..2] {
        let RowOutcome::NotComparable(reason) = &row.outcome else {
            panic!("{row:?}")
        };
        assert!(
            reason.contains("not comparable by exact meta-path"),
            "{reason}"
        );
        assert_eq!(row.time_trans_ms, None);
    }
    for row in &report.rows[2..] {
        assert!(matches!(row.outcome, RowOutcome::Compared(_)), "{row:?}");
        assert_eq!(row.translated_metapath.as_deref(), Some("ASFSA"));
    }
    assert_eq!(report.rows[2], report.rows[4]);
    let tsv = render_report(&report, ReportFormat::Tsv);
    assert!(tsv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("pathsim:AFA\tfreebase\t10\tNA\tNA\t"));
    let md = render_report(&report, ReportFormat::Markdown);
    assert!(md.contains("not comparable by exact meta-path"));
}

#[test]
fn timings_are_reported_when_requested() {
    let mut cfg = config(
        dblp(7),
        vec![transform(TransformKind::Sigmod)],
        vec![algo(AlgorithmKind::Rwr, None)],
    );
    cfg.record_timings = true;
    cfg.queries.count = 5;
    for row in run_experiment(&cfg).unwrap().rows {
        assert!(row.time_orig_ms.unwrap() >= 0.0);
        assert!(row.time_trans_ms.unwrap() >= 0.0);
    }
}

#[test]
fn validation_errors() {
    let base = config(
        dblp(8),
        vec![transform(TransformKind::Sigmod)],
        vec![algo(AlgorithmKind::Rwr, None)],
    );
    let mut cfg = base.clone();
    cfg.queries.count = 1000;
    assert!(run_experiment(&cfg).is_err());
    let mut cfg = base.clone();
    cfg.k.clear();
    assert!(run_experiment(&cfg).is_err());
    let mut cfg = base.clone();
    cfg.transformations[0]
        .types
        .insert("group".into(), "C".into());
    assert!(run_experiment(&cfg).is_err(), "conference type is taken");
    let mut cfg = base;
    cfg.transformations[0]
        .types
        .insert("bogus".into(), "Q".into());
    assert!(cfg.validate().is_err());
}
