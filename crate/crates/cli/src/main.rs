//! `nonlocal-ot`: list, run, verify and search reductions, and report CHSH
//! statistics.
//!
//! Exit codes: 0 pass, 1 a checked claim failed, 2 usage or structural
//! error.

mod demo;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use nonlocal_ot::nonlocality;
use nonlocal_ot::optimality::{self, SearchConfig, SearchSpace};
use nonlocal_ot::protocols::{self, ProtocolSpec};
use nonlocal_ot::verifier::{self, VerificationReport};
use nonlocal_ot::{Direction, Error};

use output::{emit, envelope};

#[derive(Parser)]
#[command(name = "nonlocal-ot", version, about = "Exact verification of OT, OK and PR reductions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Catalog protocols with resource, target and communication cost.
    List(ListArgs),
    /// Execute one world and print the trace.
    Run(RunArgs),
    /// Check correctness, privacy, deviations and communication.
    Verify(VerifyArgs),
    /// Exhaustive search over protocol templates.
    Search(SearchArgs),
    /// CHSH statistics of a named behavior.
    Chsh(ChshArgs),
}

#[derive(Args)]
struct Common {
    /// Write the JSON report here. `list` and `run` print text and write
    /// JSON only here; other commands print JSON to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; reports do not depend on it.
    #[arg(long, env = "NONLOCAL_OT_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args)]
struct ListArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    protocol: String,
    /// `label=bits` for inputs (e.g. `x0=1 c=0`), `tape_a`, `tape_b` and
    /// `res`; anything missing is drawn from the seeded generator.
    #[arg(long, num_args = 1..)]
    inputs: Vec<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    /// Catalog name, `<name>~<mutation>`, or `ok-from-ko/literal-roles`.
    #[arg(long, conflicts_with_all = ["all", "spec"])]
    protocol: Option<String>,
    /// Verify the whole catalog.
    #[arg(long)]
    all: bool,
    /// JSON file naming a catalog protocol and optional mutation.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = verifier::Config::default().max_tape_bits)]
    max_tape_bits: usize,
    #[arg(long, default_value_t = verifier::Config::default().max_strategies)]
    max_strategies: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SearchArgs {
    /// `<target>-from-<resource>`, e.g. `ot-from-ok`.
    #[arg(required_unless_present = "protocol")]
    space: Option<String>,
    #[arg(long, conflicts_with = "space")]
    protocol: Option<String>,
    /// Message budget. Below the registered lower bound every schedule up
    /// to this length is searched; at or above it, the catalog schedule.
    #[arg(long)]
    bits: Option<usize>,
    /// Only A→B messages.
    #[arg(long)]
    one_way: bool,
    /// Private tape bits per party. Defaults to 1 below the bound and 0
    /// at or above it.
    #[arg(long)]
    tape_budget: Option<u8>,
    /// Search exactly this schedule, e.g. `BA,AB,AB`.
    #[arg(long, conflicts_with_all = ["bits", "one_way"])]
    template: Option<String>,
    #[arg(long, default_value_t = SearchConfig::default().max_space_bits)]
    max_space_bits: u64,
    #[arg(long, default_value_t = SearchConfig::default().witness_cap)]
    witness_cap: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ChshArgs {
    /// `singlet`, `pr`, `pr-variant` or `local-<a0><a1><b0><b1>`.
    #[arg(default_value = "singlet")]
    behavior: String,
    /// Report every named behavior and the best local strategy.
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    common: Common,
}

/// A failed claim, as opposed to a usage or structural error.
struct ClaimFailed;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List(a) => list(a),
        Command::Run(a) => run(a),
        Command::Verify(a) => verify(a),
        Command::Search(a) => search(a),
        Command::Chsh(a) => chsh(a),
    };
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(ClaimFailed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

type Outcome = anyhow::Result<Result<(), ClaimFailed>>;

fn pass_if(ok: bool) -> Outcome {
    Ok(if ok { Ok(()) } else { Err(ClaimFailed) })
}

fn list(a: ListArgs) -> Outcome {
    let specs = protocols::catalog();
    let width = specs.iter().map(|s| s.name.len()).max().unwrap_or(0);
    let mut rows = Vec::new();
    for s in &specs {
        let bits = s.declared_comm_bits;
        let unit = if bits == 1 { "bit" } else { "bits" };
        let head = format!("{}: {bits} {unit}", s.name);
        println!("{head:<w$}  {} -> {}", s.resource.name(), s.target.name(), w = width + 9);
        rows.push(json!({
            "name": s.name,
            "resource": s.resource.name(),
            "target": s.target.name(),
            "comm_bits": bits,
        }));
    }
    if let Some(path) = &a.common.out {
        output::write(path, &envelope("list", json!({ "protocols": rows })))?;
    }
    pass_if(true)
}

fn run(a: RunArgs) -> Outcome {
    let spec = protocols::by_name(&a.protocol)?;
    let world = demo::world(&spec, &a.inputs, a.seed)?;
    let r = protocols::run_protocol(&spec, &world)?;
    print!("{}", demo::trace(&spec, &world, &r));
    let body = json!({
        "protocol": spec.name,
        "seed": a.seed,
        "world": world,
        "transcript": r.transcript,
        "view_a": r.view_a,
        "view_b": r.view_b,
        "output_a": r.output_a,
        "output_b": r.output_b,
    });
    if let Some(path) = &a.common.out {
        output::write(path, &envelope("run", body))?;
    }
    pass_if(true)
}

#[derive(Deserialize)]
struct SpecFile {
    protocol: String,
    #[serde(default)]
    mutation: Option<String>,
}

fn load_spec(path: &PathBuf) -> anyhow::Result<ProtocolSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let f: SpecFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let name = match f.mutation {
        Some(m) => format!("{}~{m}", f.protocol),
        None => f.protocol,
    };
    Ok(protocols::by_name(&name)?)
}

fn verify(a: VerifyArgs) -> Outcome {
    let config = verifier::Config {
        max_tape_bits: a.max_tape_bits,
        max_strategies: a.max_strategies,
        workers: a.common.workers,
    };
    let budgets = json!({ "max_tape_bits": a.max_tape_bits, "max_strategies": a.max_strategies });
    let specs = if a.all {
        protocols::catalog()
    } else if let Some(p) = &a.spec {
        vec![load_spec(p)?]
    } else if let Some(name) = &a.protocol {
        vec![protocols::by_name(name)?]
    } else {
        bail!("one of --protocol, --spec or --all is required");
    };
    let reports: Vec<VerificationReport> = specs
        .iter()
        .map(|s| verifier::verify(s, &config))
        .collect::<Result<_, _>>()?;
    for r in &reports {
        let verdict = if r.pass { "pass".to_string() } else { format!("FAIL {}", r.failures().join(",")) };
        eprintln!("{:<28} {:>3} bits  {:>6} worlds  {verdict}", r.protocol, r.comm_bits, r.worlds);
    }
    let pass = reports.iter().all(|r| r.pass);
    let doc = if a.all {
        envelope("verify-all", json!({ "budgets": budgets, "pass": pass, "reports": reports }))
    } else {
        let mut v = serde_json::to_value(&reports[0])?;
        v["budgets"] = budgets;
        envelope("verification-report", v)
    };
    emit(a.common.out.as_ref(), &doc)?;
    pass_if(pass)
}

fn parse_template(t: &str) -> anyhow::Result<Vec<Direction>> {
    t.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| match s.trim().to_ascii_uppercase().as_str() {
            "AB" | "A>B" | "A→B" => Ok(Direction::AToB),
            "BA" | "B>A" | "B→A" => Ok(Direction::BToA),
            other => Err(anyhow!("bad direction `{other}` (use AB or BA)")),
        })
        .collect()
}

fn search(a: SearchArgs) -> Outcome {
    let name = a.space.or(a.protocol).expect("clap requires a space");
    let config = SearchConfig {
        max_space_bits: a.max_space_bits,
        workers: a.common.workers,
        witness_cap: a.witness_cap,
        ..SearchConfig::default()
    };
    let bound = optimality::bound(&name).ok();
    let mut budgets = json!({ "max_space_bits": a.max_space_bits, "one_way": a.one_way });
    let (mode, body, pass) = if let Some(t) = &a.template {
        let template = parse_template(t)?;
        let tape = a.tape_budget.unwrap_or(0);
        budgets["bits"] = json!(template.len());
        budgets["tape_budget"] = json!(tape);
        let r = optimality::search(&SearchSpace::named(&name, template, tape)?, &config)?;
        ("template", serde_json::to_value(&r)?, true)
    } else {
        let bits = a.bits.or(bound.map(|b| b.bits)).context("--bits is required for spaces without a registered bound")?;
        let below = bound.is_none_or(|b| bits < b.bits || (a.one_way && b.one_way_only));
        let tape = a.tape_budget.unwrap_or(if below { 1 } else { 0 });
        budgets["bits"] = json!(bits);
        budgets["tape_budget"] = json!(tape);
        if below {
            let s = optimality::search_up_to(&name, bits, a.one_way, tape, &config)?;
            let pass = bound.is_none() || (s.correct_and_private == 0u8.into() && s.leak_certificate_holds());
            let mut v = serde_json::to_value(&s)?;
            v["leak_certificate_holds"] = json!(s.leak_certificate_holds());
            ("impossibility", v, pass)
        } else {
            let b = bound.expect("witness mode has a bound");
            let space = SearchSpace::named(&name, b.schedule.to_vec(), tape)?;
            let r = optimality::search(&space, &config)?;
            let spec = protocols::by_name(b.catalog_protocol)?;
            let member = tape == 0 && optimality::contains(&space, &spec, &config)?;
            let pass = !r.witnesses.is_empty() && (tape != 0 || member);
            let mut v = serde_json::to_value(&r)?;
            v["catalog_protocol"] = json!(b.catalog_protocol);
            v["catalog_member"] = json!(member);
            ("witness", v, pass)
        }
    };
    let mut body = body;
    body["mode"] = json!(mode);
    body["budgets"] = budgets;
    eprintln!(
        "{name} [{mode}]: correct {} correct-and-private {} ({} ms)",
        body["correct"], body["correct_and_private"], body["elapsed_ms"]
    );
    emit(a.common.out.as_ref(), &envelope("search", body))?;
    pass_if(pass)
}

fn chsh(a: ChshArgs) -> Outcome {
    if a.all {
        let mut names = vec!["singlet".to_string(), "pr".to_string(), "pr-variant".to_string()];
        names.extend(nonlocality::local_strategies().map(|s| format!("local-{}{}{}{}", s[0], s[1], s[2], s[3])));
        let reports = names.iter().map(|n| nonlocality::chsh_report(n)).collect::<Result<Vec<_>, Error>>()?;
        emit(a.common.out.as_ref(), &envelope("chsh-all", json!({ "behaviors": reports })))?;
    } else {
        let r = nonlocality::chsh_report(&a.behavior)?;
        emit(a.common.out.as_ref(), &envelope("chsh", serde_json::to_value(&r)?))?;
    }
    pass_if(true)
}
