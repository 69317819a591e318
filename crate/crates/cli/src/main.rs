use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use omega_ktree::experiments::{
    replicate_rng, run_deficit_experiment, run_local_experiment, run_scaling_experiment, run_uniformity_suite,
    write_csv, Summary,
};
use omega_ktree::metrics::{algorithm1, block_decompose, check_dist_delta, gh_bruteforce, FiniteMetricSpace};
use omega_ktree::series::{closed_form_check, count_table, unlabeled_counts};
use omega_ktree::{
    phi, phi_inverse, CodingTree, ConditionedSampler, ExperimentConfig, KTreeGraph, ModelParams, OmegaSet, RootMode,
    Strategy,
};

#[derive(Parser)]
#[command(
    name = "omega-ktree",
    version,
    about = "Random Omega-k-trees: counting, sampling and distance statistics"
)]
struct Cli {
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Degree set, e.g. N0 or {0,1,2}.
    #[arg(long, default_value = "N0")]
    omega: OmegaSet,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams> {
        Ok(ModelParams::new(self.k, self.omega.clone())?)
    }
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat key = value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model as k:omega, e.g. 2:N0 or 2:{0,1,2}; repeatable.
    #[arg(long = "model")]
    models: Vec<String>,
    /// Sizes, comma separated.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    strategy: Option<String>,
    /// Statistics to emit, comma separated.
    #[arg(long)]
    stats: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tv_max: Option<f64>,
    #[arg(long)]
    heights: Option<String>,
    #[arg(long)]
    radii: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Also write the summary JSON here when emitting CSV rows.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Singularity, offspring constants and scaling factor of a model.
    Params {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Exact labelled counts b(n), c(n) and Par(n).
    Count {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        /// Add unlabeled counts (Omega = N0 only).
        #[arg(long)]
        unlabeled: bool,
        /// Compare against the closed forms for Omega = N0.
        #[arg(long)]
        closed_form: bool,
    },
    /// Uniform random trees of a given size.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "exact")]
        strategy: Strategy,
        /// Root white node with exactly one black child.
        #[arg(long)]
        reduced: bool,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Emit::Coding)]
        emit: Emit,
    },
    /// Distances to vertex 1 of a k-tree (edge list or coding-tree JSON).
    Distances {
        #[arg(long = "in")]
        input: PathBuf,
        /// Print the histogram of graph distance minus block distance.
        #[arg(long)]
        check_lemma: bool,
    },
    /// Gromov-Hausdorff distance between two tiny distance matrices.
    Gh {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        base_a: Option<usize>,
        #[arg(long)]
        base_b: Option<usize>,
    },
    /// Rescaled distance statistics of conditioned trees.
    Scaling(ExperimentArgs),
    /// Truncated trees and balls against the Kesten tree.
    Local(ExperimentArgs),
    /// Chi-square uniformity of both samplers against enumeration.
    Uniformity(ExperimentArgs),
    /// Deficit of the largest root component.
    Deficit(ExperimentArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Coding,
    Edges,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(io::BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    match &cli.command {
        Command::Params { model } => params(&cli, model, &mut out)?,
        Command::Count {
            model,
            max_n,
            unlabeled,
            closed_form,
        } => count(&cli, model, *max_n, *unlabeled, *closed_form, &mut out)?,
        Command::Sample {
            model,
            n,
            strategy,
            reduced,
            count,
            emit,
        } => sample(&cli, model, *n, *strategy, *reduced, *count, *emit, &mut out)?,
        Command::Distances { input, check_lemma } => distances(input, *check_lemma, &mut out)?,
        Command::Gh { a, b, base_a, base_b } => gh(a, b, *base_a, *base_b, &mut out)?,
        Command::Scaling(args) => {
            let cfg = experiment_config(&cli, args)?;
            let res = run_scaling_experiment(&cfg)?;
            let summary = Summary::new(
                "scaling",
                &cfg,
                serde_json::json!({ "stats": res.summary, "ks": res.ks }),
            );
            emit_experiment(&cli, args, &res.rows, &summary, &mut out)?;
        }
        Command::Local(args) => {
            let cfg = experiment_config(&cli, args)?;
            let res = run_local_experiment(&cfg)?;
            let summary = Summary::new("local", &cfg, &res.summary);
            emit_experiment(&cli, args, &res.rows, &summary, &mut out)?;
        }
        Command::Deficit(args) => {
            let cfg = experiment_config(&cli, args)?;
            let res = run_deficit_experiment(&cfg)?;
            let summary = Summary::new("deficit", &cfg, &res.summary);
            emit_experiment(&cli, args, &res.rows, &summary, &mut out)?;
        }
        Command::Uniformity(args) => {
            let cfg = experiment_config(&cli, args)?;
            let report = run_uniformity_suite(&cfg)?;
            match cli.format {
                Format::Json => writeln!(out, "{}", Summary::new("uniformity", &cfg, &report).to_json())?,
                Format::Csv => {
                    writeln!(out, "model,n,test,statistic,p_value,pass")?;
                    for r in &report.rows {
                        writeln!(
                            out,
                            "\"{}\",{},{},{},{},{}",
                            r.model, r.n, r.strategy, r.chi2, r.p_value, r.pass
                        )?;
                    }
                    for r in &report.consistency {
                        writeln!(
                            out,
                            "\"{}\",{},consistency,{},{},{}",
                            r.model, r.n, r.chi2, r.p_value, r.pass
                        )?;
                    }
                }
            }
            out.flush()?;
            if !report.passed {
                bail!("uniformity suite failed");
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn experiment_config(cli: &Cli, args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_kv_text(
            &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        )?,
        None => ExperimentConfig::default(),
    };
    if !args.models.is_empty() {
        cfg.set("models", &args.models.join(" "))?;
    }
    let pairs: [(&str, Option<String>); 9] = [
        ("n", args.n.clone()),
        ("replicates", args.replicates.map(|v| v.to_string())),
        ("strategy", args.strategy.clone()),
        ("stats", args.stats.clone()),
        ("alpha", args.alpha.map(|v| v.to_string())),
        ("tv_max", args.tv_max.map(|v| v.to_string())),
        ("heights", args.heights.clone()),
        ("radii", args.radii.clone()),
        ("epsilon", args.epsilon.map(|v| v.to_string())),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit_experiment<T: Serialize>(
    cli: &Cli,
    args: &ExperimentArgs,
    rows: &[omega_ktree::StatRow],
    summary: &Summary<T>,
    out: &mut dyn Write,
) -> Result<()> {
    match cli.format {
        Format::Csv => {
            write_csv(rows, &mut *out)?;
            if let Some(path) = &args.summary {
                fs::write(path, summary.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Format::Json => writeln!(out, "{}", summary.to_json())?,
    }
    Ok(())
}

fn params(cli: &Cli, model: &ModelArgs, out: &mut dyn Write) -> Result<()> {
    let p = model.params()?;
    let report = p.report();
    match cli.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        Format::Csv => {
            writeln!(out, "k,omega,rho,b_rho,sigma,m_k,span")?;
            writeln!(
                out,
                "{},\"{}\",{},{},{},{},{}",
                report.k, report.omega, report.rho, report.b_rho, report.sigma, report.m_k, report.span
            )?;
        }
    }
    Ok(())
}

fn count(cli: &Cli, model: &ModelArgs, max_n: usize, unlabeled: bool, closed: bool, out: &mut dyn Write) -> Result<()> {
    let rows = count_table(model.k, &model.omega, max_n)?;
    let shapes = if unlabeled {
        Some(unlabeled_counts(model.k, &model.omega, max_n)?)
    } else {
        None
    };
    let checks = if closed {
        if !model.omega.is_full() {
            bail!("closed forms are known only for omega = N0");
        }
        Some(closed_form_check(model.k, max_n))
    } else {
        None
    };
    #[derive(Serialize)]
    struct Row {
        n: usize,
        b: String,
        c: String,
        par: String,
        unlabeled_reduced: Option<String>,
        unlabeled_rooted: Option<String>,
        closed_form_ok: Option<bool>,
    }
    let table: Vec<Row> = rows
        .iter()
        .map(|r| Row {
            n: r.n,
            b: r.b.to_string(),
            c: r.c.to_string(),
            par: r.par.to_string(),
            unlabeled_reduced: shapes.as_ref().map(|s| s.reduced.coeffs[r.n].to_string()),
            unlabeled_rooted: shapes.as_ref().map(|s| s.rooted.coeffs[r.n].to_string()),
            closed_form_ok: checks.as_ref().map(|c| c[r.n - 1].passed()),
        })
        .collect();
    match cli.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&table)?)?,
        Format::Csv => {
            write!(out, "n,b,c,par")?;
            if unlabeled {
                write!(out, ",unlabeled_reduced,unlabeled_rooted")?;
            }
            if closed {
                write!(out, ",closed_form_ok")?;
            }
            writeln!(out)?;
            for r in &table {
                write!(out, "{},{},{},{}", r.n, r.b, r.c, r.par)?;
                if let (Some(a), Some(b)) = (&r.unlabeled_reduced, &r.unlabeled_rooted) {
                    write!(out, ",{a},{b}")?;
                }
                if let Some(ok) = r.closed_form_ok {
                    write!(out, ",{ok}")?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sample(
    cli: &Cli,
    model: &ModelArgs,
    n: usize,
    strategy: Strategy,
    reduced: bool,
    count: usize,
    emit: Emit,
    out: &mut dyn Write,
) -> Result<()> {
    let p = model.params()?;
    let mode = if reduced { RootMode::Reduced } else { RootMode::Free };
    let sampler = ConditionedSampler::new(&p, n, mode)?;
    let seed = cli.seed.unwrap_or(1);
    for rep in 0..count {
        let mut rng = replicate_rng(seed, 0, n, rep);
        let tree = sampler.sample(&mut rng, strategy)?;
        match emit {
            Emit::Coding => writeln!(out, "{}", tree.to_json())?,
            Emit::Edges => write!(out, "{}", phi_inverse(&tree)?.to_edge_list())?,
        }
    }
    Ok(())
}

fn read_tree(path: &PathBuf) -> Result<(CodingTree, KTreeGraph)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let c = CodingTree::from_json(&text)?;
        let g = phi_inverse(&c)?;
        Ok((c, g))
    } else {
        let g = KTreeGraph::from_edge_list(&text)?;
        let c = phi(&g)?;
        Ok((c, g))
    }
}

fn distances(input: &PathBuf, check_lemma: bool, out: &mut dyn Write) -> Result<()> {
    let (c, g) = read_tree(input)?;
    if !c.root_front().contains(&1) {
        bail!("vertex 1 must belong to the root front");
    }
    let dt = algorithm1(&c);
    let bfs = g.bfs_from(&[1]);
    if check_lemma {
        let bd = block_decompose(&c, &dt);
        let hist = check_dist_delta(&g, &c, &bd)?;
        writeln!(out, "i,pairs")?;
        for (i, count) in hist.counts.iter().enumerate() {
            writeln!(out, "{i},{count}")?;
        }
        return Ok(());
    }
    writeln!(out, "vertex,distance")?;
    for (v, &want) in bfs.iter().enumerate().skip(1) {
        let d = dt.vertex(v);
        if d as usize != want {
            bail!("front propagation and BFS disagree at vertex {v}");
        }
        writeln!(out, "{v},{d}")?;
    }
    Ok(())
}

fn read_matrix(path: &PathBuf) -> Result<FiniteMetricSpace> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().with_context(|| format!("bad entry '{s}'")))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(FiniteMetricSpace::new(rows)?)
}

fn gh(a: &PathBuf, b: &PathBuf, base_a: Option<usize>, base_b: Option<usize>, out: &mut dyn Write) -> Result<()> {
    let mut x = read_matrix(a)?;
    let mut y = read_matrix(b)?;
    if let (Some(ra), Some(rb)) = (base_a, base_b) {
        if ra >= x.len() || rb >= y.len() {
            bail!("base point out of range");
        }
        x = x.with_base(ra);
        y = y.with_base(rb);
    } else if base_a.is_some() || base_b.is_some() {
        bail!("give both base points or neither");
    }
    writeln!(out, "{}", gh_bruteforce(&x, &y)?)?;
    Ok(())
}
