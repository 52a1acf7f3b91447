//! `psiperm`: expand continued fractions, query irrationality-measure
//! step functions, trace permutation dynamics, scan the main-lemma
//! conditions, and build/verify congruence-constructed tuples.
//!
//! Exit codes: 0 success, 1 internal, 2 configuration/usage, 3 tie or
//! undecidable comparison, 4 violation or ordering mismatch.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use psiperm::export;
use psiperm::spec::{load_number, load_pair, load_tuple};
use psiperm::state::{load_state, save_state};
use psiperm::{parse_fraction, write_atomic, CliError};
use psiperm_core::dynamics::{k_index_estimate, sigma_trace, sigma_trace_with, LabeledTuple};
use psiperm_core::forge::{verify_construction, ConstructionState, GrowthSchedule};
use psiperm_core::lemmas::{prefix_corpus, scan_corpus, scan_main_lemma};
use psiperm_core::psi::PsiFunction;
use psiperm_core::DEFAULT_MAX_DEPTH;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "psiperm",
    version,
    about = "exact continued-fraction dynamics toolkit"
)]
struct Cli {
    /// Refinement budget for interval comparisons
    /// (default: $PSIPERM_MAX_DEPTH, else 64).
    #[arg(long, global = true)]
    depth: Option<u64>,

    /// Largest index gap examined by lemma scans.
    #[arg(long = "d-max", global = true, default_value_t = 6)]
    d_max: u64,

    /// Burn-in fraction for ordering censuses, e.g. `0.5` or `1/2`.
    #[arg(long = "burn-in", global = true, default_value = "0.5")]
    burn_in: String,

    /// Write artifacts here instead of stdout (trace writes `<out>.json`
    /// and `<out>.csv`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Stdout artifact format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the first N convergents of a number spec.
    Expand { spec: PathBuf, n: u64 },

    /// Export the step function of a number over [t-min, t-max].
    Psi {
        spec: PathBuf,
        #[arg(long = "t-min", default_value = "1")]
        t_min: String,
        #[arg(long = "t-max")]
        t_max: String,
    },

    /// Trace the descending-error ordering of a tuple over a window.
    Trace {
        /// Tuple spec file (array of number specs).
        tuple: Option<PathBuf>,
        /// Use the members of a construction state instead.
        #[arg(long, conflicts_with = "tuple")]
        state: Option<PathBuf>,
        #[arg(long = "t-min")]
        t_min: String,
        #[arg(long = "t-max")]
        t_max: String,
    },

    /// Count distinct recurring orderings past the burn-in point.
    Kindex {
        tuple: Option<PathBuf>,
        #[arg(long, conflicts_with = "tuple")]
        state: Option<PathBuf>,
        #[arg(long = "t-min")]
        t_min: String,
        #[arg(long = "t-max")]
        t_max: String,
    },

    /// Run more construction rounds, creating or resuming a state file.
    Construct {
        #[arg(long)]
        k: u32,
        /// Number of additional rounds to run.
        #[arg(long)]
        rounds: u64,
        #[arg(long)]
        state: PathBuf,
        /// Growth factor base: solutions start at base^round times the
        /// modulus product.
        #[arg(long = "growth-base", default_value_t = 2)]
        growth_base: u64,
    },

    /// Verify the permutation dynamics of a constructed tuple.
    Verify {
        #[arg(long)]
        state: PathBuf,
        #[arg(long = "burn-in-rounds", default_value_t = 2)]
        burn_in_rounds: u64,
    },

    /// Scan the main-lemma conditions over a pair, or exhaustively over a
    /// prefix corpus.
    ScanLemma {
        /// Pair spec file (array of exactly two number specs).
        pair: Option<PathBuf>,
        /// Index depth of the scan.
        #[arg(long = "scan-depth", default_value_t = 15)]
        scan_depth: u64,
        /// Scan all prefixes of this length instead of a pair file.
        #[arg(long = "exhaustive-len", conflicts_with = "pair")]
        exhaustive_len: Option<u32>,
        /// Largest quotient of the exhaustive corpus.
        #[arg(long = "exhaustive-bound", default_value_t = 3)]
        exhaustive_bound: u64,
    },

    /// List the sign-change intervals of a pair's error difference.
    ScanSigns {
        pair: PathBuf,
        #[arg(long = "t-min")]
        t_min: String,
        #[arg(long = "t-max")]
        t_max: String,
    },
}

fn parse_t(s: &str) -> Result<BigUint, CliError> {
    BigUint::from_str(s).map_err(|_| CliError::Config(format!("invalid t value '{s}'")))
}

fn resolve_depth(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(d) = flag {
        return Ok(d);
    }
    match std::env::var("PSIPERM_MAX_DEPTH") {
        Ok(v) => v
            .parse()
            .map_err(|_| CliError::Config(format!("PSIPERM_MAX_DEPTH: bad value '{v}'"))),
        Err(_) => Ok(DEFAULT_MAX_DEPTH),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn window(t_min: &str, t_max: &str) -> Result<(BigUint, BigUint), CliError> {
    let lo = parse_t(t_min)?;
    let hi = parse_t(t_max)?;
    if lo >= hi {
        return Err(CliError::Config(format!(
            "t-min {lo} must be below t-max {hi}"
        )));
    }
    Ok((lo, hi))
}

fn load_members(
    tuple: &Option<PathBuf>,
    state: &Option<PathBuf>,
) -> Result<LabeledTuple, CliError> {
    match (tuple, state) {
        (Some(path), None) => Ok(LabeledTuple::new(load_tuple(path)?)?),
        (None, Some(path)) => Ok(load_state(path)?.emit_tuple()?),
        _ => Err(CliError::Config(
            "provide a tuple spec file or --state".into(),
        )),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let depth = resolve_depth(cli.depth)?;
    let burn_in = parse_fraction(&cli.burn_in)?;
    match cli.command {
        Command::Expand { spec, n } => {
            if n == 0 {
                return Err(CliError::Config("n must be at least 1".into()));
            }
            let cf = load_number(&spec)?;
            let convs = cf.convergents(n)?;
            let text = match cli.format {
                Format::Csv => export::convergents_csv(&convs),
                Format::Json => export::render_json(&export::convergents_json(&convs)),
            };
            emit(&cli.out, &text)
        }
        Command::Psi { spec, t_min, t_max } => {
            let lo = parse_t(&t_min)?;
            let hi = parse_t(&t_max)?;
            let cf = load_number(&spec)?;
            let mut f = PsiFunction::new(cf)?;
            let text = match cli.format {
                Format::Csv => export::psi_csv(&mut f, &lo, &hi)?,
                Format::Json => export::render_json(&export::psi_json(&mut f, &lo, &hi)?),
            };
            emit(&cli.out, &text)
        }
        Command::Trace {
            tuple,
            state,
            t_min,
            t_max,
        } => {
            let (lo, hi) = window(&t_min, &t_max)?;
            let members = load_members(&tuple, &state)?;
            let mut psis = members.psi_functions()?;
            let trace = sigma_trace_with(&mut psis, &lo, &hi, depth)?;
            let json_text = export::render_json(&export::trace_json(&trace));
            let csv_text = export::trace_csv(&mut psis, &lo, &hi)?;
            match &cli.out {
                Some(base) => {
                    write_atomic(&with_ext(base, "json"), &json_text)?;
                    write_atomic(&with_ext(base, "csv"), &csv_text)?;
                    println!(
                        "trace: {} events -> {}.{{json,csv}}",
                        trace.events.len(),
                        base.display()
                    );
                    Ok(())
                }
                None => {
                    let text = match cli.format {
                        Format::Json => json_text,
                        Format::Csv => csv_text,
                    };
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Kindex {
            tuple,
            state,
            t_min,
            t_max,
        } => {
            let (lo, hi) = window(&t_min, &t_max)?;
            let members = load_members(&tuple, &state)?;
            let trace = sigma_trace(&members, &lo, &hi, depth)?;
            let est = k_index_estimate(&trace, burn_in)?;
            emit(&cli.out, &export::render_json(&export::kindex_json(&est)))
        }
        Command::Construct {
            k,
            rounds,
            state,
            growth_base,
        } => {
            let mut st = if state.exists() {
                let loaded = load_state(&state)?;
                if loaded.k() != k {
                    return Err(CliError::Config(format!(
                        "state file has k = {}, asked for k = {k}",
                        loaded.k()
                    )));
                }
                if loaded.growth().base != growth_base {
                    return Err(CliError::Config(format!(
                        "state file has growth base {}, asked for {growth_base}",
                        loaded.growth().base
                    )));
                }
                loaded
            } else {
                ConstructionState::new(k, GrowthSchedule { base: growth_base })?
            };
            for _ in 0..rounds {
                let summary = st.construct_round()?;
                let sizes: Vec<String> = summary
                    .new_entries
                    .iter()
                    .map(|(s, digits)| format!("t_{s}: {digits} digits"))
                    .collect();
                println!("round {}: {}", summary.round, sizes.join(", "));
            }
            save_state(&state, &st)?;
            println!("state: {} rounds -> {}", st.rounds(), state.display());
            Ok(())
        }
        Command::Verify {
            state,
            burn_in_rounds,
        } => {
            let st = load_state(&state)?;
            st.verify_scaffold_identities()?;
            let report = verify_construction(&st, burn_in_rounds, depth)?;
            emit(
                &cli.out,
                &export::render_json(&export::verify_json(&report)),
            )
        }
        Command::ScanLemma {
            pair,
            scan_depth,
            exhaustive_len,
            exhaustive_bound,
        } => {
            if let Some(len) = exhaustive_len {
                let corpus = prefix_corpus(len, exhaustive_bound);
                let summary = scan_corpus(&corpus, cli.d_max);
                emit(
                    &cli.out,
                    &export::render_json(&export::corpus_summary_json(&summary)),
                )?;
                if summary.violations > 0 {
                    return Err(CliError::Violation(format!(
                        "{} violation cells in the corpus scan",
                        summary.violations
                    )));
                }
                return Ok(());
            }
            let path = pair.ok_or_else(|| {
                CliError::Config("provide a pair file or --exhaustive-len".into())
            })?;
            let (a, b) = load_pair(&path)?;
            let findings = scan_main_lemma(&a, &b, scan_depth, cli.d_max, depth)?;
            emit(&cli.out, &export::findings_jsonl(&findings))?;
            let violations = findings.iter().filter(|f| f.violation).count();
            if violations > 0 {
                return Err(CliError::Violation(format!(
                    "{violations} violation findings"
                )));
            }
            Ok(())
        }
        Command::ScanSigns { pair, t_min, t_max } => {
            let (lo, hi) = window(&t_min, &t_max)?;
            let (a, b) = load_pair(&pair)?;
            let crossings = psiperm_core::dynamics::sign_changes(&a, &b, &lo, &hi, depth)?;
            emit(
                &cli.out,
                &export::render_json(&export::crossings_json(&crossings)),
            )
        }
    }
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut name = base.as_os_str().to_os_string();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
