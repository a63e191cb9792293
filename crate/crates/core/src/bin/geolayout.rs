//! Command line front end. Each subcommand parses flags, delegates to the
//! library and maps errors to exit codes: 0 ok, 2 usage, 3 invalid input,
//! 4 runtime failure. Results go to stdout or `--out`; logs go to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geolayout::bench::{self, BenchConfig, TimingMode};
use geolayout::config::ParamOverrides;
use geolayout::io::{self, to_canonical_json};
use geolayout::layout::{simulate, InitMode};
use geolayout::metrics;
use geolayout::service::{Registry, ServerConfig};
use geolayout::simgen::{self, ClusterSpec, DensityFamily, DensityGraphSpec};
use geolayout::Error;

#[derive(Parser)]
#[command(name = "geolayout", version, about = "Geo-constrained 3D force-directed graph layout")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic graph document.
    Generate {
        #[command(subcommand)]
        family: GenerateFamily,
        /// Output file [default: stdout].
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Lay out a graph and write a layout document with embedded metrics.
    Layout {
        /// Graph document.
        input: PathBuf,
        #[command(flatten)]
        params: ParamFlags,
        /// Output file [default: stdout].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the metrics of a layout as JSON.
    Metrics {
        /// Graph document.
        graph: PathBuf,
        /// Layout document.
        layout: PathBuf,
        /// Map width [default: from the layout document].
        #[arg(long)]
        map_width: Option<f64>,
        /// Map height, also the pole-to-pole distance [default: from the layout document].
        #[arg(long)]
        map_height: Option<f64>,
        /// Height of the anchor plane [default: from the layout document].
        #[arg(long)]
        anchor_height: Option<f64>,
    },
    /// Time layouts over a grid of graph sizes and density families; writes CSV.
    Bench(BenchArgs),
    /// Run the layout service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Graph to preload as a paused session; its id is printed on stdout.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Parameters for the preloaded session.
        #[command(flatten)]
        params: ParamFlags,
        /// Seconds before an unwatched, inactive session is dropped.
        #[arg(long, default_value_t = 1800)]
        idle_timeout: u64,
    },
}

#[derive(Subcommand)]
enum GenerateFamily {
    /// round(p·n(n−1)/2) edges chosen uniformly.
    Type1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// round(c·n/2) edges chosen uniformly.
    Type2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Planted clusters placed in US / Europe / Asia regions.
    Clustered {
        #[arg(long, default_value_t = 3)]
        clusters: usize,
        #[arg(long, default_value_t = 70)]
        nodes_per_cluster: usize,
        #[arg(long, default_value_t = 8)]
        outliers: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// The 41-node expert network fixture.
    Expert {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Random,
    AtAnchors,
}

/// Unset flags fall back to `--params`, then `GEOLAYOUT_*` variables, then
/// the defaults shown.
#[derive(Args)]
struct ParamFlags {
    /// JSON file with any subset of the layout parameters.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Optimal distance k [default: (map_height³/n)^(1/3)].
    #[arg(long)]
    k: Option<f64>,
    /// Geo force weight K [default: 5].
    #[arg(long)]
    geo_weight: Option<f64>,
    /// Initial temperature T0 [default: map_height/10].
    #[arg(long)]
    temperature: Option<f64>,
    /// Cooling rate α [default: 0.02].
    #[arg(long)]
    alpha: Option<f64>,
    /// Iteration budget [default: 300].
    #[arg(long)]
    iterations: Option<usize>,
    /// Seed for initial positions [default: 42].
    #[arg(long)]
    seed: Option<u64>,
    /// Scale attraction by edge weight [default: off].
    #[arg(long)]
    weighted_attraction: bool,
    /// Initial placement [default: random].
    #[arg(long, value_enum)]
    init: Option<InitArg>,
    /// [default: 360]
    #[arg(long)]
    map_width: Option<f64>,
    /// [default: 180]
    #[arg(long)]
    map_height: Option<f64>,
    /// [default: 20]
    #[arg(long)]
    anchor_height: Option<f64>,
}

impl ParamFlags {
    fn overrides(&self) -> geolayout::Result<ParamOverrides> {
        let flags = ParamOverrides {
            k: self.k,
            geo_weight: self.geo_weight,
            initial_temperature: self.temperature,
            cooling_alpha: self.alpha,
            n_iterations: self.iterations,
            seed: self.seed,
            weighted_attraction: self.weighted_attraction.then_some(true),
            init_mode: self.init.map(|i| match i {
                InitArg::Random => InitMode::Random,
                InitArg::AtAnchors => InitMode::AtAnchors,
            }),
            map_width: self.map_width,
            map_height: self.map_height,
            anchor_height: self.anchor_height,
        };
        let file = match &self.params {
            Some(p) => ParamOverrides::from_json(&read(p)?)?,
            None => ParamOverrides::default(),
        };
        Ok(flags.or(file.or(ParamOverrides::from_env()?)))
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated graph sizes.
    #[arg(long, value_delimiter = ',', default_value = "100,200,400,800,1600")]
    sizes: Vec<usize>,
    /// Type I edge probabilities, one family each.
    #[arg(long = "type1", value_delimiter = ',', default_value = "0.05,0.5")]
    type1: Vec<f64>,
    /// Type II mean degrees, one family each.
    #[arg(long = "type2", value_delimiter = ',', default_value = "50")]
    type2: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Iterations per layout.
    #[arg(long, default_value_t = geolayout::layout::DEFAULT_ITERATIONS)]
    iterations: usize,
    /// Also time serializing the layout.
    #[arg(long)]
    end_to_end: bool,
    /// Run cells concurrently (timings interfere).
    #[arg(long)]
    parallel: bool,
    /// CSV output; a `.meta.json` sidecar with fitted exponents is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> geolayout::Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn emit(bytes: &[u8], out: Option<&Path>) -> geolayout::Result<()> {
    match out {
        Some(p) => fs::write(p, bytes)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(bytes).and_then(|_| stdout.write_all(b"\n")) {
                // reader went away (`| head`); nothing left to report
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

fn generate(family: GenerateFamily, out: Option<&Path>) -> geolayout::Result<()> {
    let graph = match family {
        GenerateFamily::Type1 { n, p, seed } => simgen::gen_density_graph(&DensityGraphSpec::type1(n, p, seed))?,
        GenerateFamily::Type2 { n, c, seed } => simgen::gen_density_graph(&DensityGraphSpec::type2(n, c, seed))?,
        GenerateFamily::Clustered {
            clusters,
            nodes_per_cluster,
            outliers,
            seed,
        } => {
            let mut spec = ClusterSpec {
                nodes_per_cluster,
                outlier_count: outliers,
                seed,
                ..ClusterSpec::default()
            };
            if clusters != spec.cluster_count {
                let regions = spec.geo_regions.clone();
                spec.geo_regions = (0..clusters).map(|i| regions[i % regions.len()].clone()).collect();
                spec.cluster_count = clusters;
            }
            simgen::gen_clustered(&spec)?
        }
        GenerateFamily::Expert { seed } => simgen::gen_expert_network(seed)?,
    };
    log::info!("generated {} nodes, {} edges", graph.node_count(), graph.edge_count());
    emit(&io::save_graph(&graph)?, out)
}

fn layout(input: &Path, flags: &ParamFlags, out: Option<&Path>) -> geolayout::Result<()> {
    let overrides = flags.overrides()?;
    let graph = io::load_graph(&read(input)?)?;
    let params = overrides.resolve(graph.node_count())?;
    log::info!("laying out {} nodes, {} edges, K = {}", graph.node_count(), graph.edge_count(), params.geo_weight);
    let state = simulate(&graph, &params)?;
    let report = metrics::report(&graph, &state, &params.projection)?;
    emit(&io::save_layout(&state, &params, Some(&report))?, out)
}

fn metrics_cmd(
    graph: &Path,
    layout: &Path,
    width: Option<f64>,
    height: Option<f64>,
    anchor: Option<f64>,
) -> geolayout::Result<()> {
    let graph = io::load_graph(&read(graph)?)?;
    let doc = io::load_layout_document(&read(layout)?)?;
    let state = doc.to_state_for(&graph)?;
    let mut projection = doc.params.projection;
    projection.map_width = width.unwrap_or(projection.map_width);
    projection.map_height = height.unwrap_or(projection.map_height);
    projection.anchor_height = anchor.unwrap_or(projection.anchor_height);
    projection.validate()?;
    let report = metrics::report(&graph, &state, &projection)?;
    emit(&to_canonical_json(&report)?, None)
}

fn bench_cmd(args: &BenchArgs) -> geolayout::Result<()> {
    let mut config = BenchConfig::standard();
    config.sizes = args.sizes.clone();
    config.families = args
        .type1
        .iter()
        .map(|&p| DensityFamily::TypeI { p })
        .chain(args.type2.iter().map(|&c| DensityFamily::TypeII { c }))
        .collect();
    config.repetitions = args.repetitions;
    config.seed = args.seed;
    config.params.n_iterations = args.iterations;
    config.mode = if args.end_to_end {
        TimingMode::EndToEnd
    } else {
        TimingMode::EngineOnly
    };
    config.parallel = args.parallel;

    let rows = bench::run_benchmark(&config)?;
    for r in rows.iter().filter(|r| r.error.is_some()) {
        log::warn!("{} n={}: {}", r.family_key(), r.spec.n, r.error.as_deref().unwrap_or(""));
    }
    let mut csv = Vec::new();
    bench::write_csv(&rows, &mut csv)?;
    let exponents: serde_json::Map<String, serde_json::Value> = bench::fit_scaling_exponent(&rows)
        .into_iter()
        .map(|(family, fit)| {
            let v = match fit {
                Ok(e) => serde_json::json!({ "exponent": e }),
                Err(e) => serde_json::json!({ "error": e.to_string() }),
            };
            (family, v)
        })
        .collect();
    match &args.out {
        Some(path) => {
            emit(&csv, Some(path))?;
            let meta = serde_json::json!({
                "sizes": config.sizes,
                "families": config.families.iter().map(bench::family_key).collect::<Vec<_>>(),
                "repetitions": config.repetitions,
                "seed": config.seed,
                "mode": config.mode,
                "parallel": config.parallel,
                "n_iterations": config.params.n_iterations,
                "scaling_exponents": exponents,
                "threads": std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
                "os": std::env::consts::OS,
                "arch": std::env::consts::ARCH,
            });
            let mut sidecar = path.clone().into_os_string();
            sidecar.push(".meta.json");
            emit(&to_canonical_json(&meta)?, Some(Path::new(&sidecar)))
        }
        None => {
            for (family, v) in &exponents {
                log::info!("{family}: {v}");
            }
            use std::io::Write;
            std::io::stdout().write_all(&csv)?;
            Ok(())
        }
    }
}

fn serve_cmd(host: &str, port: u16, graph: Option<&Path>, flags: &ParamFlags, idle: u64) -> geolayout::Result<()> {
    let registry = Registry::new(ServerConfig {
        idle_timeout: Duration::from_secs(idle),
        ..ServerConfig::default()
    });
    if let Some(path) = graph {
        let graph = io::load_graph(&read(path)?)?;
        let params = flags.overrides()?.resolve(graph.node_count())?;
        let id = registry.create(graph, params)?;
        println!("{}", serde_json::json!({ "type": "created", "session_id": id }));
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port)).await?;
        log::info!("listening on {}", listener.local_addr()?);
        let server = geolayout::service::serve(listener, Arc::clone(&registry));
        tokio::select! {
            r = server => r,
            _ = tokio::signal::ctrl_c() => {
                log::info!("shutting down");
                registry.shutdown();
                Ok(())
            }
        }
    })
}

fn run(cli: Cli) -> geolayout::Result<()> {
    match cli.command {
        Command::Generate { family, out } => generate(family, out.as_deref()),
        Command::Layout { input, params, out } => layout(&input, &params, out.as_deref()),
        Command::Metrics {
            graph,
            layout,
            map_width,
            map_height,
            anchor_height,
        } => metrics_cmd(&graph, &layout, map_width, map_height, anchor_height),
        Command::Bench(args) => bench_cmd(&args),
        Command::Serve {
            host,
            port,
            graph,
            params,
            idle_timeout,
        } => serve_cmd(&host, port, graph.as_deref(), &params, idle_timeout),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    // clap exits with 2 on usage errors and 0 for --help / --version
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 3 } else { 4 })
        }
    }
}
