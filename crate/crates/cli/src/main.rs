use std::fmt;
use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use repind_core::datagen::{DblpParams, GenParams, ImdbParams};
use repind_core::harness::{
    render_report, run_experiment, ExperimentConfig, GraphSource, ReportFormat,
};
use repind_core::metrics::{kendall_topk, KendallMode, KendallParams};
use repind_core::similarity::{
    pathsim_scores, rank_topk, rwr_scores, simrank_all, AlgorithmParams, MetaPath,
};
use repind_core::transforms::{verify_roundtrip, TransformKind, Transformation};
use repind_core::TypedGraph;

#[derive(Parser)]
#[command(
    name = "repind",
    version,
    about = "Compare similarity rankings across graph representations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic graph as TSV.
    Generate {
        #[arg(long, value_enum)]
        kind: Schema,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// A preset (tiny, small, medium) and/or `key=value` overrides,
        /// e.g. `small,n_authors=500,authors_per_paper=[1,3]`.
        #[arg(long, default_value = "small")]
        size: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rewrite a graph into another schema.
    Transform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        name: TransformKind,
        #[arg(long)]
        inverse: bool,
        /// Role bindings, e.g. `film=F,actor=A,character=C,star=S`.
        #[arg(long, default_value = "")]
        types: String,
    },
    /// Print the top-k most similar nodes to a query.
    Rank {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        alg: Alg,
        #[arg(long)]
        metapath: Option<String>,
        /// `type:label`
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Algorithm parameter, e.g. `c=0.2` or `simrank_iters=5`.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Kendall distance between two ranking files written by `rank`.
    Compare {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Mode::Topk)]
        mode: Mode,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
    /// Run an experiment described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `format`.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Overrides the config's `output`; `-` for stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that transformations round-trip, either every transformation
    /// of an experiment config or one named transformation on a graph file.
    Verify {
        #[arg(long, conflicts_with_all = ["graph", "name"])]
        config: Option<PathBuf>,
        #[arg(long, requires = "name")]
        graph: Option<PathBuf>,
        #[arg(long)]
        name: Option<TransformKind>,
        #[arg(long)]
        inverse: bool,
        #[arg(long, default_value = "")]
        types: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Schema {
    Imdb,
    Dblp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    Rwr,
    Simrank,
    Pathsim,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Topk,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Markdown,
}

/// Failure not caused by the user's input; exits with status 2.
struct Internal(anyhow::Error);

impl fmt::Debug for Internal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for Internal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl std::error::Error for Internal {}

fn internal(e: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(Internal(e.into()))
}

fn read_graph(path: &Path) -> anyhow::Result<TypedGraph> {
    let file = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    TypedGraph::load(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    let file = fs::File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(internal)?;
    let mut out = BufWriter::new(file);
    body(&mut out)?;
    out.flush()
        .with_context(|| format!("writing {}", path.display()))
        .map_err(internal)
}

fn write_graph(path: &Path, g: &TypedGraph) -> anyhow::Result<()> {
    write_file(path, |out| g.save(out).map_err(internal))
}

/// Splits on commas outside brackets.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
        .into_iter()
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect()
}

fn gen_params(kind: Schema, seed: u64, size: &str) -> anyhow::Result<GenParams> {
    let parts = split_top_level(size);
    let (preset, overrides) = match parts.first() {
        Some(p) if !p.contains('=') => (*p, &parts[1..]),
        _ => ("small", &parts[..]),
    };
    let base = match kind {
        Schema::Imdb => GenParams::Imdb(ImdbParams::preset(preset, seed)?),
        Schema::Dblp => GenParams::Dblp(DblpParams::preset(preset, seed)?),
    };
    let mut value = serde_json::to_value(&base).map_err(internal)?;
    let fields = value
        .as_object_mut()
        .expect("params serialize to an object");
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value in --size, got {item:?}"))?;
        let key = key.trim();
        if key == "kind" || !fields.contains_key(key) {
            bail!("unknown generator parameter {key:?}");
        }
        let v: serde_json::Value = serde_json::from_str(raw.trim())
            .with_context(|| format!("bad value for {key}: {raw:?}"))?;
        fields.insert(key.to_string(), v);
    }
    let params: GenParams =
        serde_json::from_value(value).context("invalid generator parameters")?;
    Ok(params)
}

fn build_transform(
    name: TransformKind,
    inverse: bool,
    types: &str,
) -> anyhow::Result<Transformation> {
    let t = Transformation::new(name).parse_bindings(types)?;
    Ok(if inverse { t.inverse() } else { t })
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped.
fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    } else {
        let m = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn read_ranking(path: &Path) -> anyhow::Result<Vec<String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            if cols.len() >= 2 { cols[1] } else { cols[0] }.to_string()
        })
        .collect())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Generate {
            kind,
            seed,
            size,
            out: path,
        } => {
            let g = gen_params(kind, seed, &size)?.generate()?;
            write_graph(&path, &g)?;
            eprintln!(
                "wrote {} nodes, {} edges to {}",
                g.node_count(),
                g.edge_count(),
                path.display()
            );
        }
        Command::Transform {
            input,
            out: path,
            name,
            inverse,
            types,
        } => {
            let t = build_transform(name, inverse, &types)?;
            let g = t.apply(&read_graph(&input)?)?;
            write_graph(&path, &g)?;
            eprintln!(
                "{}: {} nodes, {} edges",
                t.name(),
                g.node_count(),
                g.edge_count()
            );
        }
        Command::Rank {
            graph,
            alg,
            metapath,
            query,
            k,
            params,
        } => {
            let g = read_graph(&graph)?;
            let q = g.find_key(&query)?;
            let mut p = AlgorithmParams::default();
            for kv in &params {
                let (key, value) = kv
                    .split_once('=')
                    .ok_or_else(|| anyhow!("expected key=value, got {kv:?}"))?;
                p.set(key.trim(), value.trim())?;
            }
            p.validate()?;
            let scores = match alg {
                Alg::Rwr => rwr_scores(&g, q, &p)?,
                Alg::Simrank => simrank_all(&g, &p)?.scores(q),
                Alg::Pathsim => {
                    let mp: MetaPath = metapath
                        .as_deref()
                        .ok_or_else(|| anyhow!("pathsim requires --metapath"))?
                        .parse()?;
                    pathsim_scores(&g, &mp, q)?
                }
            };
            for (i, e) in rank_topk(&scores, &g, q, k).entries.iter().enumerate() {
                writeln!(out, "{}\t{}\t{}", i + 1, e.key, sig12(e.score)).map_err(internal)?;
            }
        }
        Command::Compare {
            left,
            right,
            k,
            mode,
            p,
        } => {
            let mut l = read_ranking(&left)?;
            let mut r = read_ranking(&right)?;
            l.truncate(k);
            r.truncate(k);
            let params = KendallParams {
                mode: match mode {
                    Mode::Topk => KendallMode::Topk,
                    Mode::Full => KendallMode::Full,
                },
                penalty: p,
            };
            let d = kendall_topk(&l, &r, &params)?;
            writeln!(out, "{d}").map_err(internal)?;
        }
        Command::Experiment {
            config,
            format,
            out: dest,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(f) = format {
                cfg.format = match f {
                    Format::Tsv => ReportFormat::Tsv,
                    Format::Markdown => ReportFormat::Markdown,
                };
            }
            if let Some(d) = dest {
                cfg.output = (d.as_os_str() != "-").then_some(d);
            }
            let report = run_experiment(&cfg)?;
            let text = render_report(&report, cfg.format);
            match &cfg.output {
                Some(path) => write_file(path, |w| w.write_all(text.as_bytes()).map_err(internal))?,
                None => out.write_all(text.as_bytes()).map_err(internal)?,
            }
        }
        Command::Verify {
            config,
            graph,
            name,
            inverse,
            types,
        } => {
            let (g, transforms) = match (config, graph, name) {
                (Some(path), _, _) => {
                    let cfg = ExperimentConfig::load(&path)?;
                    cfg.validate()?;
                    let g = match &cfg.graph {
                        GraphSource::File(p) => read_graph(p)?,
                        GraphSource::Generate(p) => p.generate()?,
                    };
                    let ts = cfg
                        .transformations
                        .iter()
                        .map(|s| s.build())
                        .collect::<Result<Vec<_>, _>>()?;
                    (g, ts)
                }
                (None, Some(path), Some(name)) => (
                    read_graph(&path)?,
                    vec![build_transform(name, inverse, &types)?],
                ),
                _ => bail!("verify needs --config, or --graph with --name"),
            };
            let mut failed = Vec::new();
            for t in &transforms {
                let ok = verify_roundtrip(&g, t)?;
                writeln!(out, "{}\t{}", t.name(), if ok { "ok" } else { "FAILED" })
                    .map_err(internal)?;
                if !ok {
                    failed.push(t.name());
                }
            }
            if !failed.is_empty() {
                return Err(internal(anyhow!(
                    "round-trip failed for {}",
                    failed.join(", ")
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Internal>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
        Err(_) => ExitCode::from(2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.25), "0.25");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0 / 3.0 * 1e-7), "6.66666666667e-08");
        assert_eq!(sig12(123456.789), "123456.789");
    }

    #[test]
    fn size_overrides() {
        let p = gen_params(Schema::Imdb, 4, "tiny,cast_size=[2,3],n_films=7").unwrap();
        let GenParams::Imdb(p) = p else { panic!() };
        assert_eq!(
            (p.seed, p.n_actors, p.n_films, p.cast_size),
            (4, 12, 7, (2, 3))
        );
        assert!(gen_params(Schema::Dblp, 1, "huge").is_err());
        assert!(gen_params(Schema::Dblp, 1, "bogus=3").is_err());
        assert!(gen_params(Schema::Dblp, 1, "n_confs=0")
            .unwrap()
            .generate()
            .is_err());
    }
}
