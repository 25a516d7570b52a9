use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};

use grouped_ineq::intervals::{clamp_floor, intervals_to_csv, PLUG_IN_GRID};
use grouped_ineq::sim::centered_to_csv;
use grouped_ineq::{
    bootstrap_ci, diff_ci, fit, parse_grouped, plug_in, run_coverage, wald_qri_ci, BootstrapConfig, CenteredConfig,
    CiMethod, EstimatedDistribution, Family, FitMethod, FittedModel, GroupedData, GroupingScheme, InputFormat,
    IntervalResult, Measure, ParseOptions, RefDistribution, SimConfig,
};

mod table;

#[derive(Parser, Debug)]
#[command(name = "grouped-ineq", version, about = "Inequality measures and confidence intervals from grouped income data")]
struct Cli {
    /// Worker threads for bootstrap and simulation (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print an aligned table instead of CSV/compact JSON
    #[arg(long, global = true)]
    pretty: bool,

    /// Write results to this file instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Population Gini, Theil, Atkinson and QRI of a reference distribution
    TrueValues(TrueValuesArgs),
    /// Fit a distribution to grouped data and print the model as JSON
    Fit(FitArgs),
    /// Plug-in point estimates from grouped data or a saved model
    Estimate(EstimateArgs),
    /// Bootstrap and Wald confidence intervals
    Interval(IntervalArgs),
    /// Intervals for two samples and for their difference
    Compare(CompareArgs),
    /// Monte-Carlo coverage study, or the centered-estimate experiment
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct TrueValuesArgs {
    /// Distribution as family[:p1,p2,...], or "all" for the seven study distributions
    #[arg(long, value_name = "SPEC", required = true)]
    dist: Vec<String>,
    /// Atkinson inequality aversion
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// QRI grid size
    #[arg(long = "J", default_value_t = 100)]
    j: usize,
    /// Decimal places in the output
    #[arg(long, default_value_t = 3)]
    digits: usize,
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Input layout: bins (lower,upper,count[,mean]) or percentile-table (percentile,value)
    #[arg(long, default_value = "bins", value_parser = parse_format)]
    format: InputFormat,
    /// Upper bound for the open last bin
    #[arg(long, visible_alias = "top-value", value_name = "V")]
    top: Option<f64>,
    /// Lowest income for percentile tables
    #[arg(long, default_value_t = 0.0, value_name = "V")]
    lower_bound: f64,
    /// Total sample size behind a percentile table
    #[arg(long, value_name = "N")]
    total_n: Option<u64>,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Grouped data file
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Fit: gld (percentile matching) or li (linear interpolation, needs bin means)
    #[arg(long, value_parser = parse_method)]
    method: FitMethod,
    #[command(flatten)]
    data: InputArgs,
}

#[derive(Args, Debug)]
#[group(id = "source", required = true, multiple = false, args = ["input", "model"])]
struct SourceArgs {
    /// Grouped data file (needs --method)
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Model JSON written by `fit`
    #[arg(long, value_name = "PATH")]
    model: Option<PathBuf>,
    /// Fit: gld (percentile matching) or li (linear interpolation, needs bin means)
    #[arg(long, value_parser = parse_method, required_unless_present = "model")]
    method: Option<FitMethod>,
    #[command(flatten)]
    data: InputArgs,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    /// Atkinson inequality aversion
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// QRI grid size
    #[arg(long = "J", default_value_t = 100)]
    j: usize,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    measure: MeasureArgs,
}

#[derive(Args, Debug)]
struct CiArgs {
    /// Interval methods, comma separated
    #[arg(long, value_delimiter = ',', default_value = "bootstrap,wald", value_parser = parse_ci)]
    ci: Vec<CiMethod>,
    /// Measures, comma separated
    #[arg(long, value_delimiter = ',', default_value = "gini,theil,atkinson,qri", value_parser = parse_measure)]
    measures: Vec<Measure>,
    /// Confidence level
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Bootstrap replicates
    #[arg(long = "B", default_value_t = 500)]
    b: usize,
    /// Master seed; generated and echoed when absent
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    measure: MeasureArgs,
}

#[derive(Args, Debug)]
struct IntervalArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Bootstrap sample size (default: the grouped total)
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    ci: CiArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// First grouped data file
    #[arg(long, value_name = "PATH")]
    input1: PathBuf,
    /// Second grouped data file
    #[arg(long, value_name = "PATH")]
    input2: PathBuf,
    /// Fit: gld (percentile matching) or li (linear interpolation, needs bin means)
    #[arg(long, value_parser = parse_method)]
    method: FitMethod,
    #[command(flatten)]
    data: InputArgs,
    /// Sample size of the first input (default: its grouped total)
    #[arg(long)]
    n1: Option<usize>,
    /// Sample size of the second input (default: its grouped total)
    #[arg(long)]
    n2: Option<usize>,
    #[command(flatten)]
    ci: CiArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Population distribution as family[:p1,p2,...]
    #[arg(long, value_name = "SPEC", required_unless_present = "centered")]
    dist: Option<String>,
    /// Sample size per replicate (default 250 with --centered)
    #[arg(long, required_unless_present = "centered")]
    n: Option<usize>,
    /// Grouping of each simulated sample: quintiles or deciles
    #[arg(long, default_value = "quintiles", value_parser = parse_scheme)]
    scheme: GroupingScheme,
    /// Fit applied to each grouped sample
    #[arg(long, default_value = "li", value_parser = parse_method)]
    fit: FitMethod,
    /// Simulated samples per configuration (or per σ)
    #[arg(long, default_value_t = 300)]
    reps: usize,
    /// Bootstrap replicates per simulated sample
    #[arg(long = "B", default_value_t = 300)]
    b: usize,
    /// Confidence level
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Master seed; generated and echoed when absent
    #[arg(long)]
    seed: Option<u64>,
    /// Measures, comma separated
    #[arg(long, value_delimiter = ',', default_value = "gini,theil,atkinson,qri", value_parser = parse_measure)]
    measures: Vec<Measure>,
    /// Centered-estimate mode: lognormal(0, σ) for each listed σ
    #[arg(long, value_delimiter = ',', value_name = "SIGMAS")]
    centered: Option<Vec<f64>>,
    #[command(flatten)]
    measure: MeasureArgs,
}

fn parse_format(s: &str) -> Result<InputFormat, String> {
    s.parse().map_err(|e: grouped_ineq::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<FitMethod, String> {
    s.parse().map_err(|e: grouped_ineq::Error| e.to_string())
}

fn parse_ci(s: &str) -> Result<CiMethod, String> {
    s.parse().map_err(|e: grouped_ineq::Error| e.to_string())
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|e: grouped_ineq::Error| e.to_string())
}

fn parse_scheme(s: &str) -> Result<GroupingScheme, String> {
    s.parse().map_err(|e: grouped_ineq::Error| e.to_string())
}

enum Failure {
    /// Bad invocation: reported with usage text, exit status 2.
    Usage(String),
    /// Data or numerical failure in a named stage, exit status 1.
    Stage(&'static str, String),
}

type Run<T> = Result<T, Failure>;

fn stage<E: std::fmt::Display>(name: &'static str) -> impl FnOnce(E) -> Failure {
    move |e| Failure::Stage(name, e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            let mut cmd = Cli::command();
            let sub = subcommand_name(&cli.command);
            let err = match cmd.find_subcommand_mut(sub) {
                Some(s) => s.error(ErrorKind::MissingRequiredArgument, msg),
                None => cmd.error(ErrorKind::MissingRequiredArgument, msg),
            };
            err.exit()
        }
        Err(Failure::Stage(name, msg)) => {
            eprintln!("error: {name} failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::TrueValues(_) => "true-values",
        Command::Fit(_) => "fit",
        Command::Estimate(_) => "estimate",
        Command::Interval(_) => "interval",
        Command::Compare(_) => "compare",
        Command::Simulate(_) => "simulate",
    }
}

fn run(cli: &Cli) -> Run<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(stage("thread pool setup"))?;
    }
    let output = match &cli.command {
        Command::TrueValues(a) => true_values(a)?,
        Command::Fit(a) => fit_cmd(a, cli.pretty)?,
        Command::Estimate(a) => estimate(a)?,
        Command::Interval(a) => interval(a)?,
        Command::Compare(a) => compare(a)?,
        Command::Simulate(a) => simulate(a)?,
    };
    let text = match output {
        Output::Csv(csv) if cli.pretty => table::render(&csv).map_err(stage("formatting output"))?,
        Output::Csv(csv) | Output::Json(csv) => csv,
    };
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(stage("writing output")),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(stage("writing output")(e)),
                _ => Ok(()),
            }
        }
    }
}

enum Output {
    Csv(String),
    Json(String),
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn true_values(a: &TrueValuesArgs) -> Run<Output> {
    let mut dists: Vec<RefDistribution<f64>> = Vec::new();
    for spec in &a.dist {
        if spec.eq_ignore_ascii_case("all") {
            dists.extend(Family::ALL.iter().map(|&f| RefDistribution::with_defaults(f)));
        } else {
            dists.push(spec.parse().map_err(|e: grouped_ineq::Error| Failure::Usage(e.to_string()))?);
        }
    }
    let d = a.digits;
    let mut out = String::from("dist,epsilon,J,gini,theil,atkinson,qri\n");
    for dist in dists {
        let t = dist.true_measures(a.epsilon, a.j).map_err(stage("quadrature"))?;
        out.push_str(&format!(
            "\"{dist}\",{},{},{:.d$},{:.d$},{:.d$},{:.d$}\n",
            a.epsilon, a.j, t.gini, t.theil, t.atkinson, t.qri
        ));
    }
    Ok(Output::Csv(out))
}

fn load_grouped(path: &Path, data: &InputArgs) -> Run<GroupedData<f64>> {
    if data.format == InputFormat::PercentileTable && data.total_n.is_none() {
        return Err(Failure::Usage("--total-n is required with --format percentile-table".into()));
    }
    let text = fs::read_to_string(path).map_err(|e| Failure::Stage("reading input", format!("{}: {e}", path.display())))?;
    let opts = ParseOptions {
        lower_bound: data.lower_bound,
        top_value: data.top,
        total_n: data.total_n,
    };
    let g = parse_grouped(&text, data.format, &opts)
        .map_err(|e| Failure::Stage("parsing input", format!("{}: {e}", path.display())))?;
    if g.label().is_empty() {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(g.with_label(stem))
    } else {
        Ok(g)
    }
}

fn fit_grouped(g: &GroupedData<f64>, method: FitMethod) -> Run<grouped_ineq::Fitted<f64>> {
    if method == FitMethod::Li && g.means().is_none() {
        return Err(Failure::Usage(
            "--method li needs bin means (a 'mean' column in bins format)".into(),
        ));
    }
    let f = fit(g, method).map_err(stage("fitting"))?;
    if let EstimatedDistribution::Li(li) = &f.dist {
        if li.clamped_bins() > 0 {
            eprintln!("note: {} bin slope(s) clamped to keep the density nonnegative", li.clamped_bins());
        }
    }
    Ok(f)
}

fn fit_cmd(a: &FitArgs, pretty: bool) -> Run<Output> {
    let g = load_grouped(&a.input, &a.data)?;
    let f = fit_grouped(&g, a.method)?;
    let model = FittedModel::from_fitted(&f, Some(g.total()), g.label());
    let mut json = if pretty { model.to_json_pretty() } else { model.to_json() }.map_err(stage("serializing model"))?;
    json.push('\n');
    Ok(Output::Json(json))
}

struct Source {
    dist: EstimatedDistribution<f64>,
    total: Option<u64>,
}

fn load_source(s: &SourceArgs) -> Run<Source> {
    if let Some(path) = &s.model {
        let text = fs::read_to_string(path).map_err(|e| Failure::Stage("reading model", format!("{}: {e}", path.display())))?;
        let model = FittedModel::from_json(&text).map_err(stage("reading model"))?;
        let dist = model.to_distribution().map_err(stage("reading model"))?;
        return Ok(Source { dist, total: model.n });
    }
    let path = s.input.as_ref().expect("clap enforces --input or --model");
    let method = s.method.expect("clap enforces --method with --input");
    let g = load_grouped(path, &s.data)?;
    let f = fit_grouped(&g, method)?;
    Ok(Source {
        dist: f.dist,
        total: Some(g.total()),
    })
}

fn estimate(a: &EstimateArgs) -> Run<Output> {
    let src = load_source(&a.source)?;
    let m = plug_in(&src.dist, a.measure.epsilon, a.measure.j, PLUG_IN_GRID).map_err(stage("estimation"))?;
    let fit = src.dist.method();
    let mut out = String::from("fit,measure,point,epsilon,J\n");
    for measure in Measure::ALL {
        out.push_str(&format!("{fit},{measure},{},{},{}\n", m.get(measure), a.measure.epsilon, a.measure.j));
    }
    Ok(Output::Csv(out))
}

fn sample_size(explicit: Option<usize>, total: Option<u64>, flag: &str) -> Run<usize> {
    explicit
        .or(total.map(|t| t as usize))
        .ok_or_else(|| Failure::Usage(format!("{flag} is required when the model does not record a sample size")))
}

fn boot_config(ci: &CiArgs, seed: u64) -> BootstrapConfig<f64> {
    BootstrapConfig {
        replicates: ci.b,
        level: ci.level,
        seed,
        epsilon: ci.measure.epsilon,
        qri_grid: ci.measure.j,
        measures: ci.measures.clone(),
    }
}

fn check_ci(ci: &CiArgs) -> Run<()> {
    if ci.ci.is_empty() || ci.measures.is_empty() {
        return Err(Failure::Usage("--ci and --measures must not be empty".into()));
    }
    if ci.ci.contains(&CiMethod::Wald) && !ci.ci.contains(&CiMethod::BootstrapPercentile) && !ci.measures.contains(&Measure::Qri) {
        return Err(Failure::Usage("Wald intervals exist only for the QRI; add qri to --measures".into()));
    }
    Ok(())
}

/// Intervals for one fitted distribution, bootstrap rows first.
fn intervals_for(dist: &EstimatedDistribution<f64>, n: usize, ci: &CiArgs, seed: u64) -> Run<Vec<IntervalResult<f64>>> {
    let mut rows = Vec::new();
    if ci.ci.contains(&CiMethod::BootstrapPercentile) {
        let cfg = boot_config(ci, seed);
        rows.extend(bootstrap_ci(dist, n, &cfg).map_err(stage("bootstrap"))?);
        report_clamping(dist, n, &cfg);
    }
    if ci.ci.contains(&CiMethod::Wald) && ci.measures.contains(&Measure::Qri) {
        let mut w = wald_qri_ci(dist, n, ci.level, ci.measure.j).map_err(stage("Wald interval"))?;
        w.seed = Some(seed);
        rows.push(w);
    }
    Ok(rows)
}

/// Warns when the fitted quantile function reaches below the clamping floor.
fn report_clamping(dist: &EstimatedDistribution<f64>, n: usize, cfg: &BootstrapConfig<f64>) {
    let Ok(floor) = clamp_floor(dist) else { return };
    let share = dist.cdf(floor);
    if share > 0.0 {
        eprintln!(
            "note: about {:.3}% of bootstrap draws (n = {n}, B = {}) fall below {floor:.6} and are clamped to it",
            100.0 * share,
            cfg.replicates
        );
    }
}

fn with_config(csv: String, extra_header: &str, extra: &str) -> String {
    let mut lines = csv.lines();
    let mut out = format!("{},{extra_header}\n", lines.next().unwrap_or_default());
    for l in lines {
        out.push_str(&format!("{l},{extra}\n"));
    }
    out
}

fn interval(a: &IntervalArgs) -> Run<Output> {
    check_ci(&a.ci)?;
    let src = load_source(&a.source)?;
    let n = sample_size(a.n, src.total, "--n")?;
    let seed = resolve_seed(a.ci.seed);
    let rows = intervals_for(&src.dist, n, &a.ci, seed)?;
    let extra = format!("{},{n},{},{}", src.dist.method(), a.ci.measure.epsilon, a.ci.measure.j);
    Ok(Output::Csv(with_config(intervals_to_csv(&rows), "fit,n,epsilon,J", &extra)))
}

fn compare(a: &CompareArgs) -> Run<Output> {
    check_ci(&a.ci)?;
    let g1 = load_grouped(&a.input1, &a.data)?;
    let g2 = load_grouped(&a.input2, &a.data)?;
    let e1 = fit_grouped(&g1, a.method)?.dist;
    let e2 = fit_grouped(&g2, a.method)?.dist;
    let n1 = a.n1.unwrap_or(g1.total() as usize);
    let n2 = a.n2.unwrap_or(g2.total() as usize);
    let seed = resolve_seed(a.ci.seed);
    let cfg = boot_config(&a.ci, seed);

    let blocks = [
        ("input1", n1.to_string(), intervals_for(&e1, n1, &a.ci, seed)?),
        ("input2", n2.to_string(), intervals_for(&e2, n2, &a.ci, seed)?),
        ("difference", format!("{n1}|{n2}"), {
            let mut d = Vec::new();
            for &m in &a.ci.ci {
                if m == CiMethod::Wald && !a.ci.measures.contains(&Measure::Qri) {
                    continue;
                }
                let mut rows = diff_ci(&e1, n1, &e2, n2, m, &cfg).map_err(stage("difference interval"))?;
                for r in &mut rows {
                    r.seed = Some(seed);
                }
                d.extend(rows);
            }
            d
        }),
    ];
    let mut out = format!("sample,{},fit,n,epsilon,J\n", IntervalResult::<f64>::CSV_HEADER);
    for (label, n, rows) in blocks {
        for r in rows {
            out.push_str(&format!(
                "{label},{},{},{n},{},{}\n",
                r.to_csv_row(),
                a.method,
                a.ci.measure.epsilon,
                a.ci.measure.j
            ));
        }
    }
    Ok(Output::Csv(out))
}

fn simulate(a: &SimulateArgs) -> Run<Output> {
    let seed = resolve_seed(a.seed);
    if let Some(sigmas) = &a.centered {
        if sigmas.is_empty() || sigmas.iter().any(|&s| !(s > 0.0)) {
            return Err(Failure::Usage("--centered needs positive sigma values".into()));
        }
        let c = CenteredConfig {
            sigmas: sigmas.clone(),
            n: a.n.unwrap_or(250),
            scheme: a.scheme,
            fit_method: a.fit,
            reps: a.reps,
            seed,
            epsilon: a.measure.epsilon,
            qri_grid: a.measure.j,
        };
        let rows = grouped_ineq::centered_estimates(&c).map_err(stage("simulation"))?;
        return Ok(Output::Csv(centered_to_csv(&rows)));
    }
    let spec = a.dist.as_deref().expect("clap enforces --dist");
    let dist: RefDistribution<f64> = spec.parse().map_err(|e: grouped_ineq::Error| Failure::Usage(e.to_string()))?;
    let c = SimConfig {
        dist,
        n: a.n.expect("clap enforces --n"),
        scheme: a.scheme,
        fit_method: a.fit,
        reps: a.reps,
        replicates: a.b,
        level: a.level,
        seed,
        measures: a.measures.clone(),
        epsilon: a.measure.epsilon,
        qri_grid: a.measure.j,
    };
    let report = run_coverage(&c).map_err(stage("simulation"))?;
    let t = report.truths;
    eprintln!(
        "true values: gini {:.4}, theil {:.4}, atkinson {:.4}, qri {:.4}",
        t.gini, t.theil, t.atkinson, t.qri
    );
    Ok(Output::Csv(report.to_csv()))
}
