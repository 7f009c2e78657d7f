//! `zerosum` command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use zerosum::bounds::{compare_report, reference_for_group, BoundReport, RefConstant};
use zerosum::engine::constants::compute_resumable;
use zerosum::engine::{BoundKind, ConstantKind, SearchConfig, Symmetry};
use zerosum::engine::random::sample_rng;
use zerosum::extraction::{
    elementary_params, greedy_extract, guarantee_cap, run_schedule, schedule_intermediate, schedule_p2,
    schedule_shortsums, thm_step_witness, ExtractionSchedule,
};
use zerosum::fourier::{density_threshold, fourier_bias};
use zerosum::group::groups_of_order;
use zerosum::sequence::SequenceRecord;
use zerosum::verifier::{
    verify_chevalley, verify_dav333d, verify_lindstrom, verify_p2count, verify_propb_structure, verify_section3_chain,
    verify_section5_chain, verify_step_extraction, verify_z7_lemma, LindstromMode, Sec3Grid, VerificationReport,
    Z7Flags,
};
use zerosum::witness::{load_checkpoint, store_checkpoint, store_witness, WitnessRecord};
use zerosum::{AbelianGroup, Error, Sequence};

const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "zerosum", version, about = "Zero-sum constants of finite abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args, Debug, Clone)]
struct Opts {
    /// Group such as `3^2`, `2x4` or `6x6`.
    #[arg(long, global = true)]
    group: Option<String>,
    /// D, eta, s, s_le:N, s_eq:N or d_k:K.
    #[arg(long, global = true, default_value = "D")]
    constant: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Node budget; each subcommand has its own default.
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<u64>,
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[arg(long, global = true)]
    length: Option<u64>,
    #[arg(long, global = true, value_enum)]
    schedule: Option<ScheduleName>,
    #[arg(long, global = true, value_enum)]
    suite: Option<Suite>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Witness and checkpoint directory.
    #[arg(long, global = true, default_value = "witnesses")]
    out: PathBuf,
    #[arg(long, global = true)]
    resume: Option<PathBuf>,
    /// Largest group order listed by `table`.
    #[arg(long, global = true, default_value_t = 27)]
    max_order: u64,
    /// Print the density-increment threshold (`fourier`).
    #[arg(long, global = true)]
    threshold: bool,
    /// JSON file with a sequence record whose Fourier bias is printed (`fourier`).
    #[arg(long, global = true)]
    bias: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Exact value of a zero-sum constant with a witness file.
    Exact,
    /// Closed-form bounds and reference values for one group.
    Bounds,
    /// Bound comparison for every group up to `--max-order`.
    Table,
    /// Extracts disjoint zero-sums from seeded random sequences.
    Extract,
    /// Fourier bias of a sequence or the density-increment threshold.
    Fourier,
    /// Runs a verification suite.
    Verify,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ScheduleName {
    Intermediate,
    Shortsums,
    P2,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Suite {
    #[value(name = "propB")]
    PropB,
    Z7,
    Dav333d,
    Lindstrom,
    Sec3,
    Sec5,
    P2count,
    Chevalley,
    Step,
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Validation(_) => 1,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type Outcome = Result<u8, Failure>;

fn group_arg(opts: &Opts) -> Result<AbelianGroup, Failure> {
    let spec = opts.group.as_deref().ok_or_else(|| usage("--group is required"))?;
    Ok(spec.parse()?)
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(Error::from)?;
    println!("{text}");
    Ok(())
}

fn exact(opts: &Opts) -> Outcome {
    let g = group_arg(opts)?;
    let constant: ConstantKind = opts.constant.parse()?;
    let cfg = SearchConfig {
        budget_nodes: opts.budget_nodes.unwrap_or(SearchConfig::default().budget_nodes),
        symmetry: Symmetry::Linear,
        ..SearchConfig::default()
    };
    let resume = opts.resume.as_deref().map(load_checkpoint).transpose()?;
    let cp_path = opts.out.join(format!("{g}_{}.checkpoint.json", constant.to_string().replace(':', "-")));
    let mut sink = |cp: &zerosum::engine::search::Checkpoint| store_checkpoint(&cp_path, cp);
    let r = compute_resumable(&g, constant, &cfg, resume.as_ref(), Some(&mut sink))?;
    let record = WitnessRecord::from_constant(&r);
    let path = store_witness(&opts.out, &record)?;
    let complete = r.certificate.bound_kind == BoundKind::Exact;
    if complete && cp_path.exists() {
        std::fs::remove_file(&cp_path)?;
    }
    match opts.format {
        Some(Format::Json) => print_json(&json!({
            "group": g.to_string(),
            "constant": constant.to_string(),
            "value": r.value,
            "certificate": r.certificate,
            "witness": r.witness.coords(),
            "witness_file": path,
        }))?,
        Some(Format::Csv) => {
            println!("group,constant,value,status,bound_kind,nodes");
            let cert = serde_json::to_value(r.certificate).map_err(Error::from)?;
            println!("{g},{constant},{},{},{},{}", r.value, cert["status"].as_str().unwrap_or(""),
                cert["bound_kind"].as_str().unwrap_or(""), r.certificate.nodes_explored);
        }
        None => {
            println!("{}", r.value);
            if !complete {
                eprintln!("budget exhausted: {} is a lower bound; checkpoint in {}", r.value, cp_path.display());
            }
        }
    }
    Ok(if complete { 0 } else { 2 })
}

fn emit_report(report: &BoundReport, format: Option<Format>) -> Result<(), Failure> {
    match format {
        Some(Format::Csv) => print!("{}", report.to_csv()),
        _ => print_json(report)?,
    }
    Ok(())
}

fn bounds(opts: &Opts) -> Outcome {
    let g = group_arg(opts)?;
    let report = compare_report(std::slice::from_ref(&g), &SearchConfig::default())?;
    if opts.format == Some(Format::Csv) {
        emit_report(&report, opts.format)?;
        return Ok(0);
    }
    let refs: Vec<_> = [RefConstant::D, RefConstant::Eta, RefConstant::S]
        .into_iter()
        .filter_map(|c| reference_for_group(c, &g))
        .collect();
    print_json(&json!({ "row": report.rows[0], "reference": refs }))?;
    Ok(0)
}

fn table(opts: &Opts) -> Outcome {
    let groups: Vec<AbelianGroup> = (1..=opts.max_order).flat_map(groups_of_order).collect();
    let report = compare_report(&groups, &SearchConfig::default())?;
    emit_report(&report, Some(opts.format.unwrap_or(Format::Csv)))?;
    Ok(0)
}

fn extract(opts: &Opts) -> Outcome {
    let g = group_arg(opts)?;
    let samples = opts.samples.unwrap_or(1);
    let length = match opts.length {
        Some(l) => l,
        None => {
            let (p, d) = elementary_params(&g)?;
            u64::try_from(&thm_step_witness(p, d)?.m).map_err(|_| usage("default length is too large; pass --length"))?
        }
    };
    let schedule: Option<ExtractionSchedule> = match opts.schedule {
        None => None,
        Some(name) => {
            let (p, d) = elementary_params(&g)?;
            Some(match name {
                ScheduleName::Intermediate => schedule_intermediate(p, d, length)?.schedule,
                ScheduleName::Shortsums => schedule_shortsums(p, d)?,
                ScheduleName::P2 if p == 2 => schedule_p2(d)?,
                ScheduleName::P2 => return Err(usage("the p2 schedule needs a group 2^d")),
            })
        }
    };
    let guaranteed = schedule.as_ref().map(|s| {
        let dav = g.as_elementary().map_or(0, |(p, d)| d as u64 * (p - 1) + 1);
        s.guaranteed_removals(length, dav)
    });
    let mut rows = Vec::new();
    let mut first: Option<WitnessRecord> = None;
    for i in 0..samples {
        let s = zerosum::engine::random::random_sequence_with(&g, length as usize, &mut sample_rng(opts.seed, i));
        let (system, per_stage) = match &schedule {
            Some(sch) => {
                let run = run_schedule(&s, sch);
                (run.system, Some(run.per_stage))
            }
            None => (greedy_extract(&s, opts.cap), None),
        };
        let cap = schedule.as_ref().map(|sch| sch.final_cap).or(opts.cap);
        let rec = WitnessRecord::from_system(&system, cap);
        rec.validate()?;
        first.get_or_insert(rec);
        rows.push(json!({
            "sample": i,
            "blocks": system.len(),
            "block_lengths": system.block_lengths(),
            "leftover": system.leftover().len(),
            "per_stage": per_stage,
        }));
    }
    if let Some(rec) = &first {
        store_witness(&opts.out, rec)?;
    }
    let cap_guarantee = match g.as_elementary() {
        Some((p, d)) => guarantee_cap(p, d as u32, length)?,
        None => None,
    };
    match opts.format {
        Some(Format::Csv) => {
            println!("sample,blocks,leftover,block_lengths");
            for r in &rows {
                let lens: Vec<String> = r["block_lengths"].as_array().into_iter().flatten().map(Value::to_string).collect();
                println!("{},{},{},{}", r["sample"], r["blocks"], r["leftover"], lens.join(" "));
            }
        }
        _ => print_json(&json!({
            "group": g.to_string(),
            "length": length,
            "seed": opts.seed,
            "schedule": schedule,
            "guaranteed_removals": guaranteed,
            "guarantee_cap": cap_guarantee,
            "samples": rows,
        }))?,
    }
    Ok(0)
}

fn fourier(opts: &Opts) -> Outcome {
    if let Some(path) = &opts.bias {
        let text = std::fs::read_to_string(path)?;
        let rec: SequenceRecord = serde_json::from_str(&text).map_err(Error::from)?;
        let s = Sequence::try_from(&rec)?;
        print_json(&fourier_bias(&s)?)?;
        return Ok(0);
    }
    if !opts.threshold {
        return Err(usage("fourier needs --threshold or --bias FILE"));
    }
    let g = group_arg(opts)?;
    let (p, d) = elementary_params(&g)?;
    let cap = opts.cap.ok_or_else(|| usage("--threshold needs --cap"))?;
    let t = density_threshold(p, d, cap)?;
    match opts.format {
        Some(Format::Json) => print_json(&json!({ "group": g.to_string(), "cap": cap, "threshold": t }))?,
        _ => println!("{t}"),
    }
    Ok(0)
}

fn verify(opts: &Opts) -> Outcome {
    let suite = opts.suite.ok_or_else(|| usage("--suite is required"))?;
    let samples = opts.samples;
    let report: VerificationReport = match suite {
        Suite::PropB => {
            let p = match &opts.group {
                Some(_) => elementary_params(&group_arg(opts)?)?.0,
                None => 3,
            };
            verify_propb_structure(p, opts.budget_nodes.unwrap_or(2_000_000_000), Symmetry::Linear)?
        }
        Suite::Z7 => {
            let resume = opts.resume.as_deref().map(load_checkpoint).transpose()?;
            let cp_path = opts.out.join("z7.checkpoint.json");
            let mut sink = |cp: &zerosum::engine::search::Checkpoint| store_checkpoint(&cp_path, cp);
            verify_z7_lemma(
                opts.budget_nodes.unwrap_or(u64::MAX),
                Z7Flags::default(),
                &[],
                resume.as_ref(),
                Some(&mut sink),
            )?
        }
        Suite::Dav333d => verify_dav333d(samples.unwrap_or(10_000), opts.seed, opts.budget_nodes.unwrap_or(u64::MAX))?,
        Suite::Lindstrom => {
            let d = match &opts.group {
                Some(_) => match group_arg(opts)?.as_elementary() {
                    Some((2, d)) => d as u32,
                    _ => return Err(usage("lindstrom needs a group 2^d")),
                },
                None => 3,
            };
            let mode = if d <= 4 && samples.is_none() {
                LindstromMode::Exhaustive
            } else {
                LindstromMode::Sampled { samples: samples.unwrap_or(10_000), seed: opts.seed }
            };
            verify_lindstrom(d, mode, opts.budget_nodes.unwrap_or(u64::MAX))?
        }
        Suite::Sec3 => verify_section3_chain(Sec3Grid::default())?,
        Suite::Sec5 => verify_section5_chain(200)?,
        Suite::P2count => verify_p2count(20)?,
        Suite::Chevalley => verify_chevalley(samples.unwrap_or(1000), opts.seed)?,
        Suite::Step => {
            let (p, d) = elementary_params(&group_arg(opts)?)?;
            verify_step_extraction(p, d, samples.unwrap_or(500), opts.seed, opts.budget_nodes.unwrap_or(u64::MAX))?
        }
    };
    if let Some(ce) = &report.counterexample {
        if !ce.revalidate()? {
            return Err(Failure { code: 1, message: "reported counterexample failed re-validation".into() });
        }
    }
    match opts.format {
        Some(Format::Csv) => {
            println!("suite,status,checks,nodes,samples,seed");
            let status = serde_json::to_value(report.status).map_err(Error::from)?;
            println!("{},{},{},{},{},{}", report.suite, status.as_str().unwrap_or(""), report.checks, report.nodes,
                report.samples, report.seed);
        }
        _ => print_json(&report)?,
    }
    Ok(report.exit_code() as u8)
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("ZEROSUM_THREADS") {
        let n: usize = v.parse().map_err(|_| usage(format!("ZEROSUM_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    let opts = &cli.opts;
    match cli.command {
        Command::Exact => exact(opts),
        Command::Bounds => bounds(opts),
        Command::Table => table(opts),
        Command::Extract => extract(opts),
        Command::Fourier => fourier(opts),
        Command::Verify => verify(opts),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
