//! Command-line front end: condition checking, spectral certification, the
//! two construction pipelines, and walk simulation, with JSON reports.
//!
//! Exit codes: 0 all checks pass, 1 mathematical failure (condition, lemma
//! or bound), 2 input error, 3 numerical non-convergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cts_core::constructions::{
    conlon_pipeline, sample_sidon, three_product_pipeline, ThreeProductSpec,
};
use cts_core::error::Error;
use cts_core::graph::Graph;
use cts_core::group::{FiniteGroup, GroupDescriptor};
use cts_core::products::build_rep;
use cts_core::report::{LemmaTable, Report, SpectralTable};
use cts_core::triplet::{build_structure, check_all, TripleSet};
use cts_core::walk::{build_gwalk, certify_with, simulate_walk, verify_lift, WalkStart};

#[derive(Parser)]
#[command(name = "cts", version, about = "commutative triplet structures: build, check, certify")]
struct Cli {
    /// Worker threads for parallelizable sweeps (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StructureInput {
    /// Group descriptor JSON file.
    #[arg(long)]
    group: PathBuf,
    /// Triple-set JSON file.
    #[arg(long)]
    triples: PathBuf,
}

#[derive(Args)]
struct ReportOutput {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp so identical runs emit byte-identical reports.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the six structural condition checks.
    Check {
        #[command(flatten)]
        input: StructureInput,
        #[command(flatten)]
        output: ReportOutput,
    },
    /// Certify the spectral bounds and lemmas on a structure.
    Certify {
        #[command(flatten)]
        input: StructureInput,
        /// Spectral tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Corrupt the blue matching before lift verification (self-test).
        #[arg(long)]
        corrupt_blue: bool,
        #[command(flatten)]
        output: ReportOutput,
    },
    /// Sample a Sidon set over F_2^t and run the full pipeline.
    Conlon {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        size: usize,
        /// Sampling seed; drawn from the clock and recorded when absent.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        attempts: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: ReportOutput,
    },
    /// Run the 3-product pipeline from a spec file.
    ThreeProduct {
        /// 3-product spec JSON file.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: ReportOutput,
    },
    /// Simulate the edge random walk and write the mixing curve as CSV.
    Walk {
        /// Edge-list graph file to walk on directly.
        #[arg(long, conflicts_with_all = ["group", "triples"])]
        graph: Option<PathBuf>,
        #[arg(long, requires = "triples")]
        group: Option<PathBuf>,
        #[arg(long, requires = "group")]
        triples: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Number of Monte Carlo trials; 0 runs exact-mode matvecs.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Start vertex.
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::InvalidElement { .. } | Error::Domain(_) => 2,
        Error::Structural(_) | Error::Conditions(_) | Error::Sampling { .. } => 1,
        Error::Numerical { .. } => 3,
    }
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_group(path: &Path) -> Result<(GroupDescriptor, FiniteGroup), Error> {
    let text = read_file(path)?;
    let descriptor: GroupDescriptor =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("group JSON: {e}")))?;
    let group = FiniteGroup::from_descriptor(&descriptor)?;
    Ok((descriptor, group))
}

fn entropy_seed() -> u64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0x5EED)
        ^ ((std::process::id() as u64) << 32)
}

fn stamp(report: &mut Report, output: &ReportOutput) {
    if !output.deterministic {
        use std::time::{SystemTime, UNIX_EPOCH};
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        report.timestamp = Some(secs.to_string());
    }
}

fn emit(report: &Report, output: &ReportOutput) -> Result<(), Error> {
    let json = report.to_json();
    match &output.out {
        Some(path) => std::fs::write(path, json.as_bytes())
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn cmd_check(input: &StructureInput, output: &ReportOutput) -> Result<u8, Error> {
    let (descriptor, group) = load_group(&input.group)?;
    let triples = TripleSet::from_json(&group, &read_file(&input.triples)?)?;
    let mut report = Report::new(&format!(
        "check group={} triples={}",
        input.group.display(),
        input.triples.display()
    ));
    stamp(&mut report, output);
    report.input.group = Some(descriptor);
    report.input.triples = Some(triples.len());
    let (_, conditions) = check_all(&group, &triples);
    let pass = conditions.all_pass();
    report.conditions = Some(conditions);
    if pass {
        let h = build_structure(group, triples)?;
        report.sizes = Some(h.sizes());
    }
    report.pass = pass;
    emit(&report, output)?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_certify(
    input: &StructureInput,
    tol: f64,
    corrupt_blue: bool,
    output: &ReportOutput,
) -> Result<u8, Error> {
    let (descriptor, group) = load_group(&input.group)?;
    let triples = TripleSet::from_json(&group, &read_file(&input.triples)?)?;
    let mut report = Report::new(&format!(
        "certify group={} triples={}",
        input.group.display(),
        input.triples.display()
    ));
    stamp(&mut report, output);
    report.input.group = Some(descriptor);
    report.input.triples = Some(triples.len());

    let (_, conditions) = check_all(&group, &triples);
    if !conditions.all_pass() {
        report.conditions = Some(conditions);
        report.pass = false;
        emit(&report, output)?;
        return Ok(1);
    }
    let h = build_structure(group, triples)?;
    report.conditions = Some(h.condition_report().clone());
    report.sizes = Some(h.sizes());

    let mut rep = build_rep(&h)?;
    if corrupt_blue {
        rep.corrupt_blue();
    }
    let gwalk = build_gwalk(&h)?;
    let two_centers = h.verify_two_centers();
    let lift = verify_lift(&h, &rep, &gwalk);
    if !two_centers.is_pass() || !lift.is_pass() {
        report.lemmas = Some(LemmaTable {
            two_centers_pass: two_centers.is_pass(),
            lift_pass: lift.is_pass(),
            dual_construction_pass: true,
            lift_witness: lift
                .witness()
                .map(|w| serde_json::to_value(w).expect("serializable witness")),
        });
        report.pass = false;
        emit(&report, output)?;
        return Ok(1);
    }

    let cert = certify_with(&h, &rep, &gwalk, tol)?;
    report.spectral = Some(SpectralTable::from_certificate(&cert));
    report.bounds = cert.bounds.clone();
    report.lemmas = Some(LemmaTable {
        two_centers_pass: cert.two_centers_pass,
        lift_pass: cert.lift_pass,
        dual_construction_pass: cert.dual_construction_pass,
        lift_witness: None,
    });
    report.pass = cert.all_pass;
    emit(&report, output)?;
    Ok(if cert.all_pass { 0 } else { 1 })
}

fn cmd_conlon(
    t: u32,
    size: usize,
    seed: Option<u64>,
    attempts: u32,
    tol: f64,
    output: &ReportOutput,
) -> Result<u8, Error> {
    let seed = seed.unwrap_or_else(entropy_seed);
    let sidon = sample_sidon(t, size, seed, attempts)?;
    let pipeline = conlon_pipeline(&sidon, tol)?;
    let mut report = Report::new(&format!("conlon t={t} size={size}"));
    stamp(&mut report, output);
    report.seed = Some(seed);
    report.input.group = Some(GroupDescriptor::F2t { t });
    report.input.triples = Some(pipeline.sizes.triples);
    report.conditions = Some(pipeline.conditions.clone());
    report.sizes = Some(pipeline.sizes.clone());
    report.spectral = Some(SpectralTable::from_certificate(&pipeline.certificate));
    report.bounds = pipeline.certificate.bounds.clone();
    report.lemmas = Some(LemmaTable {
        two_centers_pass: pipeline.certificate.two_centers_pass,
        lift_pass: pipeline.certificate.lift_pass,
        dual_construction_pass: pipeline.certificate.dual_construction_pass,
        lift_witness: None,
    });
    let pass = pipeline.all_pass;
    report.conlon = Some(pipeline);
    report.pass = pass;
    emit(&report, output)?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_three_product(spec_path: &Path, tol: f64, output: &ReportOutput) -> Result<u8, Error> {
    let spec = ThreeProductSpec::from_json(&read_file(spec_path)?)?;
    let pipeline = three_product_pipeline(&spec, tol)?;
    let mut report = Report::new(&format!("three-product spec={}", spec_path.display()));
    stamp(&mut report, output);
    report.input.triples = Some(pipeline.sizes.triples);
    report.conditions = Some(pipeline.conditions.clone());
    report.sizes = Some(pipeline.sizes.clone());
    report.spectral = Some(SpectralTable::from_certificate(&pipeline.certificate));
    report.bounds = pipeline.certificate.bounds.clone();
    report.lemmas = Some(LemmaTable {
        two_centers_pass: pipeline.certificate.two_centers_pass,
        lift_pass: pipeline.certificate.lift_pass,
        dual_construction_pass: pipeline.certificate.dual_construction_pass,
        lift_witness: None,
    });
    let pass = pipeline.all_pass;
    report.three_product = Some(pipeline);
    report.pass = pass;
    emit(&report, output)?;
    Ok(if pass { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_walk(
    graph_path: Option<&Path>,
    group_path: Option<&Path>,
    triples_path: Option<&Path>,
    steps: usize,
    trials: u64,
    seed: Option<u64>,
    start: usize,
    csv: Option<&Path>,
    threads: usize,
) -> Result<u8, Error> {
    let graph: Graph = match (graph_path, group_path, triples_path) {
        (Some(p), None, None) => Graph::from_edge_list(&read_file(p)?)?,
        (None, Some(gp), Some(tp)) => {
            let (_, group) = load_group(gp)?;
            let triples = TripleSet::from_json(&group, &read_file(tp)?)?;
            let h = build_structure(group, triples)?;
            build_gwalk(&h)?.graph().clone()
        }
        _ => {
            return Err(Error::Config(
                "walk needs either --graph or both --group and --triples".into(),
            ))
        }
    };
    let seed = seed.unwrap_or_else(entropy_seed);
    let curve = simulate_walk(&graph, steps, trials, seed, &WalkStart::Vertex(start), threads)?;
    let text = curve.to_csv();
    match csv {
        Some(path) => std::fs::write(path, text.as_bytes())
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    match &cli.command {
        Command::Check { input, output } => cmd_check(input, output),
        Command::Certify {
            input,
            tol,
            corrupt_blue,
            output,
        } => cmd_certify(input, *tol, *corrupt_blue, output),
        Command::Conlon {
            t,
            size,
            seed,
            attempts,
            tol,
            output,
        } => cmd_conlon(*t, *size, *seed, *attempts, *tol, output),
        Command::ThreeProduct { spec, tol, output } => cmd_three_product(spec, *tol, output),
        Command::Walk {
            graph,
            group,
            triples,
            steps,
            trials,
            seed,
            start,
            csv,
        } => cmd_walk(
            graph.as_deref(),
            group.as_deref(),
            triples.as_deref(),
            *steps,
            *trials,
            *seed,
            *start,
            csv.as_deref(),
            threads,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
