use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use prs_core::cnf::{parse_dimacs, CnfFormula};
use prs_core::exact::{parse_decimal, Rational};
use prs_core::graph::{encode_as_instance, parse_edge_list, App, Graph};
use prs_core::model::instance_from_json;
use prs_core::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AppKind {
    SinkFree,
    SpanningTree,
    Hardcore,
}

/// At most one of `--instance`, `--cnf`, `--graph`.
#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(false).args(["instance", "cnf", "graph"]))]
pub struct InputArgs {
    /// JSON instance file.
    #[arg(long, value_name = "PATH")]
    pub instance: Option<PathBuf>,

    /// DIMACS CNF file.
    #[arg(long, value_name = "PATH")]
    pub cnf: Option<PathBuf>,

    /// Edge list, one `u v` pair per line (`#` comments).
    #[arg(long, value_name = "PATH", requires = "app")]
    pub graph: Option<PathBuf>,

    /// Model on the graph.
    #[arg(long, value_enum)]
    pub app: Option<AppKind>,

    /// Root label for spanning trees.
    #[arg(long, default_value_t = 0)]
    pub root: u64,

    /// Hard-core fugacity, as a decimal or `a/b`.
    #[arg(long, default_value = "1")]
    pub lambda: String,
}

impl InputArgs {
    pub fn has_source(&self) -> bool {
        self.instance.is_some() || self.cnf.is_some() || self.graph.is_some()
    }
}

#[derive(Debug, Clone)]
pub enum GraphApp {
    SinkFree,
    SpanningTree { root: usize },
    Hardcore { lambda: Rational },
}

impl GraphApp {
    pub fn name(&self) -> &'static str {
        match self {
            GraphApp::SinkFree => "sink-free",
            GraphApp::SpanningTree { .. } => "spanning-tree",
            GraphApp::Hardcore { .. } => "hardcore",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Input {
    Instance(Instance),
    Cnf(CnfFormula),
    Graph {
        graph: Graph,
        labels: Vec<u64>,
        app: GraphApp,
    },
}

impl Input {
    /// The instance the generic samplers and the analysis run on.
    pub fn to_instance(&self) -> Result<Instance> {
        Ok(match self {
            Input::Instance(i) => i.clone(),
            Input::Cnf(f) => f.to_instance(),
            Input::Graph { graph, app, .. } => {
                let app = match app {
                    GraphApp::SinkFree => App::SinkFree(graph),
                    GraphApp::SpanningTree { root } => App::SpanningTree { graph, root: *root },
                    GraphApp::Hardcore { lambda } => App::Hardcore { graph, lambda },
                };
                encode_as_instance(app).context("encoding the graph model as an instance")?
            }
        })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn parse_number(text: &str) -> Result<Rational> {
    parse_decimal(text).with_context(|| format!("{text:?} is not a number"))
}

pub fn load(args: &InputArgs) -> Result<Input> {
    if let Some(path) = &args.instance {
        let instance = instance_from_json(&read(path)?)
            .with_context(|| format!("parsing {}", path.display()))?;
        return Ok(Input::Instance(instance));
    }
    if let Some(path) = &args.cnf {
        let formula =
            parse_dimacs(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        return Ok(Input::Cnf(formula));
    }
    let Some(path) = &args.graph else {
        bail!("one of --instance, --cnf or --graph is required");
    };
    let (graph, labels) =
        parse_edge_list(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let app = match args.app.expect("clap enforces --app with --graph") {
        AppKind::SinkFree => GraphApp::SinkFree,
        AppKind::SpanningTree => {
            let root = labels
                .iter()
                .position(|&l| l == args.root)
                .with_context(|| format!("root {} is not a vertex of the graph", args.root))?;
            GraphApp::SpanningTree { root }
        }
        AppKind::Hardcore => {
            let lambda = parse_number(&args.lambda)?;
            if lambda <= Rational::from_integer(0.into()) {
                bail!("--lambda must be positive");
            }
            GraphApp::Hardcore { lambda }
        }
    };
    Ok(Input::Graph { graph, labels, app })
}
