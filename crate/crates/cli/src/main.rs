mod experiment;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use strongmax::engine::strong_max_field;
use strongmax::report::ExperimentReport;
use strongmax::suites;
use strongmax::{IntegerBox, LatticeFunction};

#[derive(Parser)]
#[command(name = "strongmax", version, about = "Multilinear strong maximal operators: evaluation, verification suites and experiments")]
struct Cli {
    /// Root seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format for fields and report tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the maximal field of one or m lattice functions on a query box.
    Eval {
        /// JSON document (or array of documents), or sparse CSV when the extension is `.csv`.
        input: PathBuf,
        /// Query box as `lo:hi` per axis, comma separated, e.g. `-3:3,-2:2`.
        #[arg(long, allow_hyphen_values = true)]
        query: String,
        /// Number of inputs; a single input is repeated `m` times.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Run a verification suite and write one report per check.
    Verify {
        /// One of lattice, engine, variation, continuum, all.
        suite: String,
    },
    /// Run an experiment described by a JSON config `{op, params, seed}`.
    Experiment { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Eval { input, query, m } => eval(cli, input, query, *m),
        Command::Verify { suite } => verify(cli, suite),
        Command::Experiment { config } => {
            let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
            let rep = experiment::run(&text, cli.seed)?;
            fs::create_dir_all(&cli.out)?;
            write_report(&cli.out, &rep, true)?;
            println!("{}: wrote {}", rep.name, cli.out.join(format!("{}.json", rep.name)).display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_query(s: &str) -> Result<IntegerBox> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let (a, b) = part.split_once(':').unwrap_or((part, part));
        lo.push(a.trim().parse::<i64>().with_context(|| format!("bad query bound {a:?}"))?);
        hi.push(b.trim().parse::<i64>().with_context(|| format!("bad query bound {b:?}"))?);
    }
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        bail!("empty query box {s:?}");
    }
    Ok(IntegerBox::new(lo, hi)?)
}

fn read_inputs(path: &Path) -> Result<Vec<LatticeFunction>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let fs = if path.extension().is_some_and(|e| e == "csv") {
        vec![LatticeFunction::read_sparse_csv(text.as_bytes(), None)?]
    } else {
        LatticeFunction::many_from_json(&text)?
    };
    if fs.is_empty() {
        bail!("{} holds no functions", path.display());
    }
    Ok(fs)
}

fn eval(cli: &Cli, input: &Path, query: &str, m: Option<usize>) -> Result<ExitCode> {
    let query = parse_query(query)?;
    let mut fs = read_inputs(input).with_context(|| format!("parsing {}", input.display()))?;
    match m {
        Some(0) => bail!("m must be positive"),
        Some(m) if fs.len() == 1 => fs = vec![fs[0].clone(); m],
        Some(m) if fs.len() != m => bail!("{} holds {} functions, expected 1 or {m}", input.display(), fs.len()),
        _ => {}
    }
    let field = strong_max_field(&fs, &query)?;
    fs::create_dir_all(&cli.out)?;
    let field_path = match cli.format {
        Format::Json => {
            let p = cli.out.join("field.json");
            fs::write(&p, field.values.to_json() + "\n")?;
            p
        }
        Format::Csv => {
            let p = cli.out.join("field.csv");
            fs::write(&p, field.values.to_sparse_csv())?;
            p
        }
    };
    let argmax_path = cli.out.join("argmax.csv");
    field.write_argmax_csv(fs::File::create(&argmax_path)?)?;
    println!("wrote {} and {}", field_path.display(), argmax_path.display());
    Ok(ExitCode::SUCCESS)
}

fn verify(cli: &Cli, suite: &str) -> Result<ExitCode> {
    let checks = suites::suite_checks(suite)?;
    let seed = cli.seed.unwrap_or(0);
    let reports: Vec<ExperimentReport> =
        checks.par_iter().map(|(_, check)| check(seed)).collect::<strongmax::Result<_>>()?;
    fs::create_dir_all(&cli.out)?;
    let mut all = true;
    for rep in &reports {
        write_report(&cli.out, rep, cli.format == Format::Csv)?;
        let failures = rep.failures();
        all &= failures.is_empty();
        if failures.is_empty() {
            println!("PASS {}", rep.name);
        } else {
            let detail: Vec<String> =
                failures.iter().map(|v| format!("{}={} (threshold {})", v.check, v.observed, v.threshold)).collect();
            println!("FAIL {}: {}", rep.name, detail.join(", "));
        }
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// `<name>.json`, plus `<name>.<table>.csv` per table when `tables` is set.
fn write_report(dir: &Path, rep: &ExperimentReport, tables: bool) -> Result<()> {
    fs::write(dir.join(format!("{}.json", rep.name)), rep.to_json() + "\n")?;
    if tables {
        for (name, table) in &rep.tables {
            table.write_csv(fs::File::create(dir.join(format!("{}.{name}.csv", rep.name)))?)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_parsing() {
        let q = parse_query("-3:3, -2:1").unwrap();
        assert_eq!(q.lo(), &[-3, -2]);
        assert_eq!(q.hi(), &[3, 1]);
        assert_eq!(parse_query("4").unwrap().count(), 1);
        assert!(parse_query("3:-3").is_err());
        assert!(parse_query("a:b").is_err());
        assert!(parse_query("").is_err());
    }
}
