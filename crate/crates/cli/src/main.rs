mod cache;
mod tensor_cmd;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use tensoria_core::coset_enum::{EnumLimits, Strategy};
use tensoria_core::error::Error;
use tensoria_core::presentation::{parse_presentation, Presentation};
use tensoria_core::tensor::BuildLimits;
use tensoria_core::verify::{run_suite, write_csv, write_json, Corpus, Suite, SuiteConfig, Summary, Verdict};

use cache::Cache;
use tensor_cmd::{TensorCommandReport, TensorOptions};

const EXIT_INPUT: u8 = 1;
const EXIT_LIMIT: u8 = 2;
const EXIT_CHECKS_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "tensoria", version, about = "Non-abelian tensor products of finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tensor powers of one group.
    Tensor(TensorArgs),
    /// Run the identity checks over a corpus.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Hlt,
    Felsch,
}

#[derive(Args)]
struct LimitArgs {
    /// Coset enumeration limit.
    #[arg(long, default_value_t = EnumLimits::default().max_cosets)]
    max_cosets: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Hlt)]
    strategy: StrategyArg,
}

impl LimitArgs {
    fn build_limits(&self) -> BuildLimits {
        let mut limits = BuildLimits::with_max_cosets(self.max_cosets);
        limits.enumeration.strategy = match self.strategy {
            StrategyArg::Hlt => Strategy::Hlt,
            StrategyArg::Felsch => Strategy::Felsch,
        };
        limits
    }
}

#[derive(Args)]
struct TensorArgs {
    /// A presentation such as "<a,b | a^2, b^2, [a,b]>" or a builtin corpus name.
    group: String,
    #[arg(long, default_value_t = 2)]
    power: usize,
    /// Also report the exterior square.
    #[arg(long)]
    exterior: bool,
    /// Also compute H2 by both routes.
    #[arg(long)]
    h2: bool,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long)]
    json: bool,
    /// Bypass the result cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identity,
    SchurBaer,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    /// `builtin` or a corpus file with one `name = <...>` per line.
    #[arg(long, default_value = "builtin")]
    corpus: String,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// JSON results path; a CSV summary is written next to it.
    #[arg(long, default_value = "tensoria-results.json")]
    out: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = SuiteConfig::default().max_power)]
    max_power: usize,
    #[command(flatten)]
    limits: LimitArgs,
}

enum Failure {
    Input(anyhow::Error),
    Limit(Error),
    ChecksFailed(usize),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn core_failure(e: Error) -> Failure {
    if e.is_limit() {
        Failure::Limit(e)
    } else {
        Failure::Input(e.into())
    }
}

fn resolve_group(text: &str) -> Result<(String, Presentation), Failure> {
    if text.trim_start().starts_with('<') {
        let p = parse_presentation(text).map_err(|e| Failure::Input(anyhow!("{e}")))?;
        return Ok((p.to_string(), p));
    }
    let corpus = Corpus::builtin();
    let entry = corpus.get(text).ok_or_else(|| {
        let names: Vec<&str> = corpus.entries.iter().map(|e| e.name.as_str()).collect();
        anyhow!("`{text}` is neither a presentation nor a builtin group ({})", names.join(", "))
    })?;
    Ok((entry.name.clone(), entry.presentation.clone()))
}

fn cmd_tensor(args: &TensorArgs) -> Result<(), Failure> {
    if args.power == 0 {
        return Err(anyhow!("--power must be at least 1").into());
    }
    let (name, p) = resolve_group(&args.group)?;
    let limits = args.limits.build_limits();
    let opts = TensorOptions { power: args.power, exterior: args.exterior, h2: args.h2 };
    let request = json!({
        "operation": "tensor",
        "presentation": p.to_string(),
        "name": name,
        "options": opts,
        "limits": limits,
    });
    let cache = if args.no_cache { None } else { Cache::from_env() };
    let cached: Option<TensorCommandReport> =
        cache.as_ref().and_then(|c| c.get(&request)).and_then(|v| serde_json::from_value(v).ok());
    let report = match cached {
        Some(r) => r,
        None => {
            let r = tensor_cmd::run(&name, &p, &opts, &limits).map_err(core_failure)?;
            if let Some(c) = &cache {
                c.put(&request, &serde_json::to_value(&r).context("serializing report")?);
            }
            r
        }
    };
    let text = if args.json {
        serde_json::to_string_pretty(&report).context("serializing report")? + "\n"
    } else {
        tensor_cmd::render(&report)
    };
    io::stdout().write_all(text.as_bytes()).context("writing to stdout")?;
    Ok(())
}

fn load_corpus(source: &str) -> Result<Corpus, Failure> {
    if source == "builtin" {
        return Ok(Corpus::builtin());
    }
    let text = fs::read_to_string(source).with_context(|| format!("reading corpus file {source}"))?;
    Corpus::from_file_text(&text).map_err(|e| Failure::Input(anyhow!("{source}: {e}")))
}

fn csv_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let corpus = load_corpus(&args.corpus)?;
    let suite = match args.suite {
        SuiteArg::Identity => Suite::Identity,
        SuiteArg::SchurBaer => Suite::SchurBaer,
        SuiteArg::All => Suite::All,
    };
    let config = SuiteConfig { limits: args.limits.build_limits(), max_power: args.max_power, ..SuiteConfig::default() };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(anyhow!("--jobs must be positive").into());
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().context("starting worker pool")?;
    let results = pool.install(|| run_suite(suite, &corpus, &config));

    let mut json_file = fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_json(&results, &mut json_file).with_context(|| format!("writing {}", args.out.display()))?;
    let csv_out = csv_path(&args.out);
    let csv_file = fs::File::create(&csv_out).with_context(|| format!("creating {}", csv_out.display()))?;
    write_csv(&results, csv_file).with_context(|| format!("writing {}", csv_out.display()))?;

    let mut table: BTreeMap<&str, Summary> = BTreeMap::new();
    for r in &results {
        let row = table.entry(r.check.as_str()).or_default();
        match r.verdict {
            Verdict::Pass => row.pass += 1,
            Verdict::Fail => row.fail += 1,
            Verdict::Skipped => row.skipped += 1,
        }
    }
    let mut out = String::new();
    out.push_str(&format!("{:<32} {:>6} {:>6} {:>8}\n", "check", "pass", "fail", "skipped"));
    for (check, s) in &table {
        out.push_str(&format!("{check:<32} {:>6} {:>6} {:>8}\n", s.pass, s.fail, s.skipped));
    }
    let total = Summary::of(&results);
    out.push_str(&format!("{:<32} {:>6} {:>6} {:>8}\n", "total", total.pass, total.fail, total.skipped));
    for r in results.iter().filter(|r| r.verdict == Verdict::Fail) {
        out.push_str(&format!("FAIL {} {} {:?}: {}\n", r.check, r.group, r.params, r.witness.as_deref().unwrap_or("")));
    }
    io::stdout().write_all(out.as_bytes()).context("writing to stdout")?;
    if total.fail > 0 {
        return Err(Failure::ChecksFailed(total.fail));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Tensor(a) => cmd_tensor(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Limit(e)) => {
            eprintln!("limit: {e}");
            ExitCode::from(EXIT_LIMIT)
        }
        Err(Failure::ChecksFailed(n)) => {
            eprintln!("{n} checks failed");
            ExitCode::from(EXIT_CHECKS_FAILED)
        }
    }
}
