//! `oel`: run the operator inequality catalog from the command line.
//!
//! Exit codes: 0 all checks pass, 1 at least one failure, 2 usage error or
//! unknown case, 3 I/O or parse error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opineq::catalog::{self, evaluate};
use opineq::harness::{self, IntegralConfig, SuiteConfig, Summary};
use opineq::sampler::{self, SamplerConfig};
use opineq::scalar::{self, FnId, GridPoint, ProbeRow, RemarkId};
use opineq::{Error, MarginReport, Matrix, OperatorPair, Params, Result};

#[derive(Parser)]
#[command(
    name = "oel",
    version,
    about = "Check Loewner-order inequalities between operator means and entropies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample admissible pairs and check catalog cases.
    Verify(VerifyArgs),
    /// Recompute pinned reference values, or tabulate f − g on a grid.
    Probe(ProbeArgs),
    /// Compare the Gauss–Legendre integral of S_{pt} over [0,1] with T_p.
    Integral(IntegralArgs),
    /// Aggregate JSON-lines reports into a per-case summary.
    Report(ReportArgs),
    /// List catalog cases with their hypotheses.
    Cases(CasesArgs),
    /// Evaluate one case on a pair read from a matrix text file.
    Eval(EvalArgs),
    /// Draw a pair from a JSON sampler config and print it as text.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    /// Case id, group (e.g. T2), prefix glob (e.g. `T1*`) or `*`.
    #[arg(long = "case", default_value = "*")]
    case: String,
    #[arg(long, default_value_t = harness::DEFAULT_TRIALS)]
    trials: usize,
    /// Comma-separated matrix sizes, cycled over trials.
    #[arg(long, value_delimiter = ',', default_values_t = harness::DEFAULT_DIMS)]
    dims: Vec<usize>,
    /// Base seed; trial i uses seed XOR i.
    #[arg(long, env = "OEL_SEED", default_value_t = harness::DEFAULT_SEED)]
    seed: u64,
    /// Loewner tolerance relative to max(1, |lhs|, |rhs|).
    #[arg(long, default_value_t = opineq::spd::ORDER_TOL)]
    tol: f64,
    /// Report file; the summary goes next to it as `<stem>.summary.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report file format: JSON lines or CSV.
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct ProbeArgs {
    /// Reference group: 2.3i, 2.3ii or 2.5.
    remark: Option<String>,
    /// Scalar function to tabulate (see `--list`).
    #[arg(long, conflicts_with = "remark")]
    f: Option<String>,
    /// Function subtracted from `--f`.
    #[arg(long, requires = "f")]
    g: Option<String>,
    /// Comma-separated p values.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 0.75])]
    p: Vec<f64>,
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', default_values_t = vec![0.0])]
    q: Vec<f64>,
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', default_values_t = vec![0.0])]
    c: Vec<f64>,
    /// Comma-separated x values.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', default_values_t = vec![0.5, 1.5, 2.0, 3.0])]
    x: Vec<f64>,
    /// Print the scalar function ids and exit.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct IntegralArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Comma-separated p values in [-1, 1] \ {0}.
    #[arg(long = "p-grid", allow_hyphen_values = true, value_delimiter = ',', default_values_t = vec![-1.0, -0.5, -0.1, 0.1, 0.5, 1.0])]
    p_grid: Vec<f64>,
    #[arg(long, default_value_t = opineq::means::DEFAULT_NODES)]
    nodes: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, env = "OEL_SEED", default_value_t = harness::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = harness::DEFAULT_DIMS)]
    dims: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON-lines report files.
    inputs: Vec<PathBuf>,
    /// Where to write the summary JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CasesArgs {
    #[arg(long = "case", default_value = "*")]
    case: String,
}

#[derive(Args)]
struct EvalArgs {
    /// Pair file: two matrices in the text format.
    pair: PathBuf,
    #[arg(long = "case")]
    case: String,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    p: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    q: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    c: f64,
    #[arg(long, default_value_t = opineq::spd::ORDER_TOL)]
    tol: f64,
}

#[derive(Args)]
struct SampleArgs {
    /// JSON file with `seed`, `n`, optional `spectrum` and `sandwich`.
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Probe(a) => probe(a),
        Command::Integral(a) => integral(a),
        Command::Report(a) => report(a),
        Command::Cases(a) => cases(a),
        Command::Eval(a) => eval(a),
        Command::Sample(a) => sample(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("oel: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Parse { .. } => 3,
        Error::NumericalBreakdown(_) => 1,
        _ => 2,
    }
}

fn with_path(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<Box<dyn Write>> {
    Ok(Box::new(BufWriter::new(
        File::create(path).map_err(with_path(path))?,
    )))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(with_path(path))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => create(p),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn csv_error(e: impl std::error::Error + Send + Sync + 'static) -> Error {
    Error::Io(io::Error::other(e))
}

fn write_csv<T: serde::Serialize>(rows: &[T], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

fn write_json<T: serde::Serialize>(value: &T, mut w: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(csv_error)?;
    writeln!(w)?;
    Ok(())
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "oel".into());
    out.with_file_name(format!("{stem}.summary.json"))
}

enum Sink {
    None,
    Jsonl(Box<dyn Write>),
    Csv(Box<csv::Writer<Box<dyn Write>>>),
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let cases = catalog::select(&a.case)?;
    let cfg = SuiteConfig {
        trials: a.trials,
        dims: a.dims,
        seed: a.seed,
        order_tol: a.tol,
    };
    let mut results = Vec::with_capacity(cases.len());
    let mut sink = match (&a.out, a.format) {
        (None, _) => Sink::None,
        (Some(p), Format::Json) => Sink::Jsonl(create(p)?),
        (Some(p), Format::Csv) => Sink::Csv(Box::new(csv::Writer::from_writer(create(p)?))),
    };
    for case in &cases {
        let (result, reports) = harness::run_case(case, &cfg)?;
        match &mut sink {
            Sink::None => {}
            Sink::Jsonl(w) => harness::write_jsonl(&reports, w)?,
            Sink::Csv(w) => {
                for r in &reports {
                    w.serialize(r).map_err(csv_error)?;
                }
            }
        }
        results.push(result);
    }
    match &mut sink {
        Sink::None => {}
        Sink::Jsonl(w) => w.flush()?,
        Sink::Csv(w) => w.flush()?,
    }
    let summary = Summary::new(results);
    print!("{}", summary.table());
    if let Some(out) = &a.out {
        write_json(&summary, create(&summary_path(out))?)?;
    }
    Ok(summary.passed)
}

fn probe(a: ProbeArgs) -> Result<bool> {
    if a.list {
        for id in FnId::ALL {
            println!("{id}");
        }
        return Ok(true);
    }
    if let Some(name) = &a.remark {
        let outcomes = harness::probe_remark(name.parse::<RemarkId>()?)?;
        for o in &outcomes {
            println!(
                "{} {:<24} computed {:>13.8} expected {:>12} {}",
                o.remark,
                o.label,
                o.computed,
                o.expected,
                if o.pass { "PASS" } else { "FAIL" }
            );
        }
        if let Some(out) = &a.out {
            match a.format.unwrap_or(Format::Json) {
                Format::Json => write_json(&outcomes, create(out)?)?,
                Format::Csv => write_csv(&outcomes, create(out)?)?,
            }
        }
        return Ok(outcomes.iter().all(|o| o.pass));
    }
    let Some(f) = &a.f else {
        return Err(Error::InvalidInput(
            "give a reference group (2.3i, 2.3ii, 2.5) or --f".into(),
        ));
    };
    let f: FnId = f.parse()?;
    let g: Option<FnId> = a.g.as_deref().map(str::parse).transpose()?;
    let label = match g {
        Some(g) => format!("{f}-{g}"),
        None => f.to_string(),
    };
    let mut rows = Vec::new();
    for &p in &a.p {
        for &q in &a.q {
            for &c in &a.c {
                for &x in &a.x {
                    let pt = GridPoint { p, q, c, x };
                    let mut value = scalar::eval(f, pt.params(), x)?;
                    if let Some(g) = g {
                        value -= scalar::eval(g, pt.params(), x)?;
                    }
                    rows.push(ProbeRow {
                        fn_id: label.clone(),
                        p,
                        q,
                        c,
                        x,
                        value,
                    });
                }
            }
        }
    }
    let w = output(a.out.as_deref())?;
    match a.format.unwrap_or(Format::Csv) {
        Format::Csv => scalar::write_probe_csv(&rows, w)?,
        Format::Json => write_json(&rows, w)?,
    }
    Ok(true)
}

fn integral(a: IntegralArgs) -> Result<bool> {
    let cfg = IntegralConfig {
        trials: a.trials,
        p_grid: a.p_grid,
        nodes: a.nodes,
        tol: a.tol,
        seed: a.seed,
        dims: a.dims,
    };
    let rows = harness::run_integral(&cfg)?;
    let failures = rows.iter().filter(|r| !r.pass).count();
    let worst = rows
        .iter()
        .map(|r| r.residual / r.scale)
        .fold(0.0, f64::max);
    println!(
        "{} checks, {failures} failures, max residual/scale {worst:.3e} (nodes {}, tol {:e})",
        rows.len(),
        cfg.nodes,
        cfg.tol
    );
    if let Some(out) = &a.out {
        match a.format {
            Format::Json => write_json(&rows, create(out)?)?,
            Format::Csv => write_csv(&rows, create(out)?)?,
        }
    }
    Ok(failures == 0)
}

fn report(a: ReportArgs) -> Result<bool> {
    let mut all: Vec<MarginReport> = Vec::new();
    for path in &a.inputs {
        let file = File::open(path).map_err(with_path(path))?;
        let reports = harness::read_jsonl(BufReader::new(file)).map_err(|e| match e {
            Error::Parse { line, msg } => Error::Parse {
                line,
                msg: format!("{}: {msg}", path.display()),
            },
            e => e,
        })?;
        all.extend(reports);
    }
    let summary = Summary::new(harness::summarize(&all));
    print!("{}", summary.table());
    if let Some(out) = &a.out {
        write_json(&summary, create(out)?)?;
    }
    Ok(summary.passed)
}

fn cases(a: CasesArgs) -> Result<bool> {
    for c in catalog::select(&a.case)? {
        println!(
            "{:<16} {}\n{:<16} if {}",
            c.id, c.statement, "", c.hypothesis
        );
    }
    Ok(true)
}

fn eval(a: EvalArgs) -> Result<bool> {
    let text = read(&a.pair)?;
    let (m_a, m_b) = Matrix::parse_pair(&text)?;
    let pair = OperatorPair::from_matrices(m_a, m_b)?;
    let found = catalog::select(&a.case)?;
    let [case] = found.as_slice() else {
        return Err(Error::InvalidInput(format!(
            "`{}` matches {} cases; give one id",
            a.case,
            found.len()
        )));
    };
    let report = evaluate(
        case,
        &pair,
        &Params {
            p: a.p,
            q: a.q,
            c: a.c,
        },
        a.tol,
    )?;
    write_json(&report, io::stdout().lock())?;
    Ok(report.holds)
}

fn sample(a: SampleArgs) -> Result<bool> {
    let cfg = SamplerConfig::from_json(&read(&a.config)?)?;
    let pair = sampler::sandwich_pair(&cfg)?;
    let mut w = output(a.out.as_deref())?;
    write!(
        w,
        "{}\n{}",
        pair.a().matrix().to_text(),
        pair.b().matrix().to_text()
    )?;
    w.flush()?;
    Ok(true)
}
