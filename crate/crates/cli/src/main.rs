mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cotlar_core::cotlar::{
    counterexample_report, default_l_plus, verify_ank, verify_cotlar_with, verify_g0_invariance, verify_invariance,
    verify_kernel_structure, verify_lemma21_exact, verify_lemma21_float, verify_lemma23, verify_lemma32_exact,
    verify_lemma32_float, verify_lemma34_exact, verify_proof_terms, verify_psu2_invariance, verify_remark_formula,
};
use cotlar_core::ncfourier::norm_ratio_experiment;
use cotlar_core::psl2::enumerate;
use cotlar_core::quadring::{RingKind, RingParam};
use cotlar_core::replay::replay_document;
use cotlar_core::report::{CheckReport, ReportDocument};
use cotlar_core::symbol::{kernel_class, verify_theorem_b, KernelClass};
use cotlar_core::Error;

use output::{write_output, Format};

#[derive(Parser, Debug)]
#[command(name = "cotlar-lab", version, about = "Verification runs for the sign symbol on PSL2 lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Ring parameter n (default 2; 7 for counterexample-bianchi)
    #[arg(long, global = true)]
    n: Option<i64>,

    /// full = Z[sqrt(-n)], max = maximal order (default full; max for counterexample-bianchi)
    #[arg(long, global = true)]
    kind: Option<KindArg>,

    /// Half-coordinates of enumerated entries lie in [-2B, 2B]
    #[arg(long, global = true, default_value_t = 2)]
    bound: u32,

    #[arg(long, global = true, default_value_t = 1_000_000)]
    pair_budget: u64,

    #[arg(long, global = true, default_value_t = 100_000)]
    samples: u64,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads; results do not depend on it
    #[arg(long, global = true, env = "COTLAR_LAB_THREADS")]
    threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum KindArg {
    Full,
    Max,
}

impl From<KindArg> for RingKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Full => RingKind::Full,
            KindArg::Max => RingKind::MaximalOrder,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zero set of m against the shape classification on the box
    VerifyTheoremB,
    /// Cotlar residual on box pairs and random words
    VerifyCotlar {
        #[arg(long, default_value_t = cotlar_core::cotlar::DEFAULT_WORD_PAIRS)]
        word_pairs: u64,
    },
    /// Kernel invariance, character law, G0 and PSU(2) invariance
    VerifyInvariance,
    /// Supporting inequalities and identities, exact and float
    VerifyLemmas {
        /// Samples for the conditioned equivalence and the row-norm formula
        #[arg(long, default_value_t = 10_000)]
        conditioned: u64,
    },
    /// Signs of the three terms of the proof decomposition
    VerifyProofTerms {
        #[arg(long, default_value_t = 10_000)]
        pairs: u64,
    },
    /// Search a Bianchi group for a pair with nonzero Cotlar residual
    CounterexampleBianchi,
    /// ANK round trip and the kernel relation for Re t
    AnkRoundtrip,
    /// Ratios ||T_m x||_2k / ||x||_2k on random group-algebra elements
    NormExperiment {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        k: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 20)]
        support: usize,
    },
    /// List the box elements
    Enumerate,
    /// Re-evaluate every witness stored in a JSON report
    Replay { input: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyTheoremB => "verify-theorem-b",
            Command::VerifyCotlar { .. } => "verify-cotlar",
            Command::VerifyInvariance => "verify-invariance",
            Command::VerifyLemmas { .. } => "verify-lemmas",
            Command::VerifyProofTerms { .. } => "verify-proof-terms",
            Command::CounterexampleBianchi => "counterexample-bianchi",
            Command::AnkRoundtrip => "ank-roundtrip",
            Command::NormExperiment { .. } => "norm-experiment",
            Command::Enumerate => "enumerate",
            Command::Replay { .. } => "replay",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn ring(cli: &Cli) -> Result<RingParam, Failure> {
    let bianchi = matches!(cli.command, Command::CounterexampleBianchi);
    let n = cli.common.n.unwrap_or(if bianchi { 7 } else { 2 });
    let kind =
        cli.common.kind.map(RingKind::from).unwrap_or(if bianchi { RingKind::MaximalOrder } else { RingKind::Full });
    Ok(RingParam::new(n, kind)?)
}

fn config(cli: &Cli, ring: RingParam) -> Value {
    let c = &cli.common;
    let mut v = json!({
        "command": cli.command.name(),
        "n": ring.n(),
        "kind": ring.kind().as_str(),
        "bound": c.bound,
        "pair_budget": c.pair_budget,
        "samples": c.samples,
        "seed": c.seed,
        "tol": c.tol,
        "format": c.format.as_str(),
    });
    let extra = match &cli.command {
        Command::VerifyCotlar { word_pairs } => json!({ "word_pairs": word_pairs }),
        Command::VerifyLemmas { conditioned } => json!({ "conditioned": conditioned }),
        Command::VerifyProofTerms { pairs } => json!({ "pairs": pairs }),
        Command::NormExperiment { k, trials, support } => json!({ "k": k, "trials": trials, "support": support }),
        _ => json!({}),
    };
    if let (Some(obj), Value::Object(more)) = (v.as_object_mut(), extra) {
        obj.extend(more);
    }
    v
}

fn run_checks(cli: &Cli, ring: RingParam) -> Result<Vec<CheckReport>, Failure> {
    let c = &cli.common;
    let reports = match &cli.command {
        Command::VerifyTheoremB => vec![verify_theorem_b(ring, c.bound)],
        Command::VerifyCotlar { word_pairs } => {
            vec![verify_cotlar_with(ring, c.bound, c.pair_budget, *word_pairs, c.seed)?]
        }
        Command::VerifyInvariance => vec![
            verify_invariance(ring, c.bound)?,
            verify_kernel_structure(ring, c.bound)?,
            verify_g0_invariance(c.samples, c.seed, c.tol),
            verify_psu2_invariance(c.samples, c.seed, c.tol),
        ],
        Command::VerifyLemmas { conditioned } => {
            let mut out = vec![verify_lemma21_float(c.samples, c.seed, c.tol), verify_lemma21_exact(ring, c.bound)];
            out.push(verify_lemma32_float(c.samples, c.seed, c.tol));
            if ring.is_full() {
                out.push(verify_lemma32_exact(ring, c.bound)?);
                out.push(verify_lemma34_exact(ring, c.bound)?);
            }
            let elements = enumerate(ring, c.bound);
            let lattice: Vec<_> = elements
                .iter()
                .copied()
                .filter(|g| matches!(kernel_class(g), KernelClass::LPlus | KernelClass::LMinus))
                .collect();
            out.push(verify_lemma23(&lattice, *conditioned, c.seed, c.tol));
            let l =
                lattice.iter().copied().find(|g| kernel_class(g) == KernelClass::LPlus).unwrap_or_else(default_l_plus);
            out.push(verify_remark_formula(&l, *conditioned, c.seed, c.tol)?);
            out
        }
        Command::VerifyProofTerms { pairs } => vec![verify_proof_terms(ring, c.bound, *pairs, c.seed, c.tol)?],
        Command::CounterexampleBianchi => vec![counterexample_report(ring, c.bound)?],
        Command::AnkRoundtrip => vec![verify_ank(ring, c.bound, c.samples, c.seed, c.tol)],
        Command::NormExperiment { k, trials, support } => {
            vec![norm_ratio_experiment(ring, k, *trials, *support, c.seed)?.1]
        }
        Command::Enumerate | Command::Replay { .. } => unreachable!("handled separately"),
    };
    Ok(reports)
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    if let Some(t) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let out = cli.common.output.as_deref();
    let format = cli.common.format;

    if let Command::Replay { input } = &cli.command {
        let text = std::fs::read_to_string(input).map_err(|e| Failure::Io(format!("{}: {e}", input.display())))?;
        let docs: Vec<ReportDocument> = match serde_json::from_str::<Value>(&text) {
            Ok(Value::Array(items)) => items
                .into_iter()
                .map(serde_json::from_value)
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::Usage(format!("bad report: {e}")))?,
            Ok(v) => vec![serde_json::from_value(v).map_err(|e| Failure::Usage(format!("bad report: {e}")))?],
            Err(e) => return Err(Failure::Usage(format!("bad report: {e}"))),
        };
        let mut rows = Vec::new();
        let mut ok = true;
        for doc in &docs {
            for outcome in replay_document(doc) {
                let row = match outcome {
                    Ok(o) => {
                        ok &= o.matches();
                        output::ReplayRow {
                            check: doc.check.clone(),
                            inputs: o.inputs.clone(),
                            matches: o.matches(),
                            detail: if o.matches() {
                                None
                            } else {
                                Some(json!({ "stored": o.stored, "recomputed": o.recomputed }))
                            },
                        }
                    }
                    Err(e) => {
                        ok = false;
                        output::ReplayRow {
                            check: doc.check.clone(),
                            inputs: vec![],
                            matches: false,
                            detail: Some(json!(e.to_string())),
                        }
                    }
                };
                rows.push(row);
            }
        }
        write_output(out, &output::render_replay(&rows, format)).map_err(Failure::Io)?;
        return Ok(ok);
    }

    let ring = ring(cli)?;
    if let Command::Enumerate = cli.command {
        let elements = enumerate(ring, cli.common.bound);
        write_output(out, &output::render_enumeration(ring, cli.common.bound, &elements, format))
            .map_err(Failure::Io)?;
        return Ok(true);
    }

    let reports = run_checks(cli, ring)?;
    let cfg = config(cli, ring);
    let docs: Vec<ReportDocument> = reports.iter().map(|r| r.to_document(cfg.clone())).collect();
    write_output(out, &output::render_reports(&docs, format)).map_err(Failure::Io)?;
    Ok(docs.iter().all(ReportDocument::passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) | Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
