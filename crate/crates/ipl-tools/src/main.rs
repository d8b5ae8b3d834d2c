//! `ipl` — generate, prove, check, and benchmark intuitionistic
//! propositional logic theorems.
//!
//! Exit codes: 0 success, 1 domain failure (a proof does not exist or does
//! not check, a split region is too small, ...), 2 usage error (bad flags,
//! malformed input text, unreadable files).

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ipl_core::codec::{Codec, CodecParams, PropositionId};
use ipl_core::dataset::{
    build_record, quantile_split, region_capacities, sample_corpus_ids, verify_record,
    CorpusConfig, SplitSizes, SplitSpec, TheoremRecord,
};
use ipl_core::fps::{
    fps_search, strip, text_to_trace, trace_to_text, FpsConfig, SearchResult,
};
use ipl_core::harness::{
    aggregate, run_dfs, run_tae, DfsConfig, OracleGenerator, PerturbedOracleGenerator,
    RandomGenerator, ReplayGenerator, SearchOutcome, TacticGenerator, TaeConfig,
};
use ipl_core::kernel::{
    check_script, parse_tactic, render_lean, ScriptError, ScriptOutcome, Tactic,
};
use ipl_core::prop::Proposition;
use ipl_core::{dataset, seeds};
use ipl_tools::{csvout, jsonl, parallel::parallel_map};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ipl", version, about = "Intuitionistic propositional logic toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample propositions uniformly at a fixed internal-node count
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print decimal ids instead of rendered propositions
        #[arg(long)]
        ids: bool,
    },
    /// Map a proposition to its decimal id
    Encode {
        /// Internal-node count; inferred from the proposition when omitted
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: u32,
        /// Proposition text, e.g. "p1 → p1 ∨ p2"
        text: String,
    },
    /// Map a decimal id back to its proposition
    Decode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u32,
        id: String,
    },
    /// Run the focused proof search on one theorem
    Prove {
        #[arg(long)]
        theorem: String,
        /// Atom bound for rendering/validation; defaults to the largest atom
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_states: usize,
        /// Exit 1 when the theorem is unprovable
        #[arg(long)]
        require_proof: bool,
        #[arg(long, value_enum, default_value_t = ProveOutput::Trace)]
        output: ProveOutput,
    },
    /// Check a tactic script against a theorem
    Check {
        #[arg(long)]
        theorem: String,
        /// File with one tactic per line (blank lines and `--` comments skipped)
        #[arg(long)]
        script: PathBuf,
    },
    /// Build a corpus of theorems with proofs and trial-and-error traces
    Corpus {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u32,
        /// Trial-and-error traces per provable theorem
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_states: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output JSONL path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a corpus into train / in-distribution / OOD sets by word-length quantiles
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0.66)]
        train_q: f64,
        #[arg(long, default_value_t = 0.8)]
        ood_q: f64,
        /// Train-set size; 0 means everything left in the train region
        #[arg(long, default_value_t = 0)]
        train_size: usize,
        /// In-distribution test size; 0 picks min(1000, region/10)
        #[arg(long, default_value_t = 0)]
        in_dist_size: usize,
        /// OOD test size; 0 picks min(1000, region)
        #[arg(long, default_value_t = 0)]
        ood_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the depth-first-search regime over a corpus file
    RunDfs {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = DfsGeneratorKind::Oracle)]
        generator: DfsGeneratorKind,
        /// Substitution probability for the perturbed generator
        #[arg(long, default_value_t = 0.0)]
        error_rate: f64,
        #[arg(long, default_value_t = 5)]
        n_sampled: usize,
        #[arg(long, default_value_t = 65)]
        step_limit: u64,
        #[arg(long, default_value_t = 1500)]
        word_limit: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the greedy trial-and-error regime over a corpus file
    RunTae {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = TaeGeneratorKind::Replay)]
        generator: TaeGeneratorKind,
        #[arg(long, default_value_t = 1500)]
        word_limit: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a Lean 4 file for a checked script
    EmitLean {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        script: PathBuf,
        /// Atoms declared in the `variable` line; defaults to the largest atom
        #[arg(long)]
        p: Option<u32>,
    },
    /// Corpus statistics: counts and word-length quantiles
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        /// Re-verify every record (ids, statements, stored proofs)
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProveOutput {
    /// Full trial-and-error trace text
    Trace,
    /// Stripped proof, one tactic per line
    Script,
    /// Lean 4 source
    Lean,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DfsGeneratorKind {
    /// Replay the stored clean proof
    Oracle,
    /// Oracle with random substitutions at --error-rate
    Perturbed,
    /// Uniformly random applicable tactics
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TaeGeneratorKind {
    /// Replay the record's first trial-and-error trace
    Replay,
    /// Emit the stored clean proof one tactic at a time
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Text,
}

/// Domain failures exit 1; usage failures exit 2.
enum Failure {
    Domain(anyhow::Error),
    Usage(anyhow::Error),
}

fn domain(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Domain(e.into())
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Sample {
            n,
            p,
            count,
            seed,
            ids,
        } => {
            let codec = Codec::new(CodecParams::new(n, p));
            if ids {
                for id in codec.sample_ids(seed, count) {
                    println!("{id}");
                }
            } else {
                for prop in codec.sample_uniform(seed, count) {
                    println!("{prop}");
                }
            }
            Ok(())
        }
        Command::Encode { n, p, text } => {
            let prop = Proposition::parse_bounded(&text, p).map_err(usage)?;
            let n = n.unwrap_or_else(|| prop.internal_nodes());
            let codec = Codec::new(CodecParams::new(n, p));
            let id = codec.encode(&prop).map_err(usage)?;
            println!("{id}");
            Ok(())
        }
        Command::Decode { n, p, id } => {
            let id: PropositionId = id
                .parse()
                .map_err(|e| usage(anyhow!("id must be a decimal natural: {e}")))?;
            let codec = Codec::new(CodecParams::new(n, p));
            let prop = codec.decode(&id).map_err(usage)?;
            println!("{prop}");
            Ok(())
        }
        Command::Prove {
            theorem,
            p,
            seed,
            max_states,
            require_proof,
            output,
        } => {
            let theorem = parse_theorem(&theorem, p)?;
            let config = FpsConfig { max_states };
            match fps_search(&theorem, seed, &config) {
                SearchResult::Proved(trace) => {
                    match output {
                        ProveOutput::Trace => print!("{}", trace_to_text(&trace)),
                        ProveOutput::Script => {
                            for tactic in strip(&trace).map_err(domain)? {
                                println!("{tactic}");
                            }
                        }
                        ProveOutput::Lean => {
                            let clean = strip(&trace).map_err(domain)?;
                            let atoms = p.unwrap_or_else(|| theorem.max_atom());
                            print!("{}", render_lean(&theorem, &clean, atoms).map_err(domain)?);
                        }
                    }
                    Ok(())
                }
                SearchResult::Unprovable => {
                    println!("unprovable");
                    if require_proof {
                        Err(domain(anyhow!("theorem is unprovable")))
                    } else {
                        Ok(())
                    }
                }
                SearchResult::LimitExceeded => Err(domain(anyhow!(
                    "state limit ({max_states}) exceeded before the search finished"
                ))),
            }
        }
        Command::Check { theorem, script } => {
            let theorem = parse_theorem(&theorem, None)?;
            let tactics = read_script(&script)?;
            match check_script(&theorem, &tactics) {
                Ok(ScriptOutcome::Proved) => {
                    println!("ok: proof checks ({} tactics)", tactics.len());
                    Ok(())
                }
                Ok(ScriptOutcome::Incomplete(state)) => Err(domain(anyhow!(
                    "script leaves {} goal(s) open",
                    state.goals.len()
                ))),
                Err(e @ ScriptError::TacticFailed { .. }) => Err(domain(anyhow!("{e}"))),
                Err(e @ ScriptError::TacticAfterComplete { .. }) => Err(domain(anyhow!("{e}"))),
            }
        }
        Command::Corpus {
            count,
            n,
            p,
            k,
            seed,
            max_states,
            jobs,
            out,
        } => {
            let mut config = CorpusConfig::new(count, n, p, k, seed);
            config.max_states = max_states;
            let codec = Codec::new(config.params());
            let ids = sample_corpus_ids(&codec, &config);
            let records = parallel_map(&ids, jobs, |id| build_record(&codec, id, &config));
            let provable = records.iter().filter(|r| r.provable).count();
            let limited = records.iter().filter(|r| r.resource_limited).count();
            write_records(&records, out.as_deref())?;
            eprintln!(
                "corpus: {count} theorems (n={n}, p={p}, k={k}), {provable} provable, \
                 {limited} resource-limited"
            );
            Ok(())
        }
        Command::Split {
            input,
            out_dir,
            train_q,
            ood_q,
            train_size,
            in_dist_size,
            ood_size,
            seed,
        } => {
            let records = jsonl::import_jsonl(&input).map_err(usage)?;
            let (train_region, ood_region) =
                region_capacities(&records, train_q, ood_q).map_err(domain)?;
            let in_dist = if in_dist_size == 0 {
                (train_region / 10).clamp(1, 1000)
            } else {
                in_dist_size
            };
            let train = if train_size == 0 {
                train_region.saturating_sub(in_dist)
            } else {
                train_size
            };
            let ood = if ood_size == 0 {
                ood_region.min(1000)
            } else {
                ood_size
            };
            let spec = SplitSpec {
                train_quantile: train_q,
                ood_quantile: ood_q,
                sizes: SplitSizes {
                    train,
                    in_dist_test: in_dist,
                    ood_test: ood,
                },
                seed,
            };
            let split = quantile_split(&records, &spec).map_err(domain)?;
            std::fs::create_dir_all(&out_dir)
                .with_context(|| format!("cannot create {}", out_dir.display()))
                .map_err(usage)?;
            jsonl::export_jsonl(&split.train, &out_dir.join("train.jsonl")).map_err(domain)?;
            jsonl::export_jsonl(&split.in_dist_test, &out_dir.join("test_in_dist.jsonl"))
                .map_err(domain)?;
            jsonl::export_jsonl(&split.ood_test, &out_dir.join("test_ood.jsonl"))
                .map_err(domain)?;
            eprintln!(
                "split: train {}, in-dist test {}, ood test {} (regions: {} / {})",
                split.train.len(),
                split.in_dist_test.len(),
                split.ood_test.len(),
                train_region,
                ood_region
            );
            Ok(())
        }
        Command::RunDfs {
            input,
            generator,
            error_rate,
            n_sampled,
            step_limit,
            word_limit,
            seed,
            jobs,
            format,
            out,
        } => {
            let records = provable_records(&input)?;
            let config = DfsConfig {
                n_sampled,
                step_limit,
                word_limit,
            };
            let rows = parallel_map(&records, jobs, |record| {
                let theorem = Proposition::parse_bounded(&record.statement, record.p)
                    .expect("verified record");
                let record_seed = seeds::from_bytes(seed, record.id.as_bytes());
                let mut generator: Box<dyn TacticGenerator> = match generator {
                    DfsGeneratorKind::Oracle => {
                        Box::new(OracleGenerator::from_lines(record.stripped_proof.clone()))
                    }
                    DfsGeneratorKind::Perturbed => Box::new(PerturbedOracleGenerator::new(
                        &parse_stored_script(record),
                        error_rate,
                        record_seed,
                    )),
                    DfsGeneratorKind::Random => {
                        Box::new(RandomGenerator::with_seed(record_seed))
                    }
                };
                let outcome = run_dfs(&theorem, generator.as_mut(), &config);
                (record.id.clone(), outcome)
            });
            report_outcomes(&rows, format, out.as_deref())
        }
        Command::RunTae {
            input,
            generator,
            word_limit,
            seed,
            jobs,
            format,
            out,
        } => {
            let records = provable_records(&input)?;
            let config = TaeConfig { word_limit };
            let rows = parallel_map(&records, jobs, |record| {
                let theorem = Proposition::parse_bounded(&record.statement, record.p)
                    .expect("verified record");
                let mut generator: Box<dyn TacticGenerator> = match generator {
                    TaeGeneratorKind::Replay => {
                        // The seed picks which stored trace to replay.
                        let index = (seed % record.traces.len() as u64) as usize;
                        let trace = text_to_trace(&record.traces[index], &theorem)
                            .expect("stored trace replays");
                        Box::new(ReplayGenerator::from_trace(&trace))
                    }
                    TaeGeneratorKind::Oracle => {
                        Box::new(OracleGenerator::from_lines(record.stripped_proof.clone()))
                    }
                };
                let outcome = run_tae(&theorem, generator.as_mut(), &config);
                (record.id.clone(), outcome)
            });
            report_outcomes(&rows, format, out.as_deref())
        }
        Command::EmitLean { theorem, script, p } => {
            let theorem = parse_theorem(&theorem, p)?;
            let tactics = read_script(&script)?;
            let atoms = p.unwrap_or_else(|| theorem.max_atom());
            let text = render_lean(&theorem, &tactics, atoms).map_err(domain)?;
            print!("{text}");
            Ok(())
        }
        Command::Stats { input, verify } => {
            let records = jsonl::import_jsonl(&input).map_err(usage)?;
            print_stats(&records);
            if verify {
                for record in &records {
                    verify_record(record).map_err(domain)?;
                }
                println!("verify: all {} records check", records.len());
            }
            Ok(())
        }
    }
}

fn parse_theorem(text: &str, p: Option<u32>) -> Result<Proposition, Failure> {
    match p {
        Some(bound) => Proposition::parse_bounded(text, bound).map_err(usage),
        None => Proposition::parse(text).map_err(usage),
    }
}

/// Reads a tactic script: one tactic per line; blank lines and `--` comment
/// lines are ignored.
fn read_script(path: &Path) -> Result<Vec<Tactic>, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(usage)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("--"))
        .map(|l| parse_tactic(l).map_err(usage))
        .collect()
}

fn parse_stored_script(record: &TheoremRecord) -> Vec<Tactic> {
    record
        .stripped_proof
        .iter()
        .map(|l| parse_tactic(l).expect("stored script parses"))
        .collect()
}

/// Imports a corpus file and keeps the provable records, verified.
fn provable_records(path: &Path) -> Result<Vec<TheoremRecord>, Failure> {
    let records = jsonl::import_jsonl(path).map_err(usage)?;
    let total = records.len();
    for record in &records {
        verify_record(record).map_err(domain)?;
    }
    let provable: Vec<TheoremRecord> = records.into_iter().filter(|r| r.provable).collect();
    if provable.len() < total {
        eprintln!(
            "note: {} unprovable record(s) skipped",
            total - provable.len()
        );
    }
    if provable.is_empty() {
        return Err(domain(anyhow!("no provable records in the input")));
    }
    Ok(provable)
}

fn write_records(records: &[TheoremRecord], out: Option<&Path>) -> CliResult {
    match out {
        Some(path) => jsonl::export_jsonl(records, path).map_err(domain),
        None => {
            let text = jsonl::records_to_string(records).map_err(domain)?;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| domain(anyhow!(e)))
        }
    }
}

fn report_outcomes(
    rows: &[(String, SearchOutcome)],
    format: OutputFormat,
    out: Option<&Path>,
) -> CliResult {
    let outcomes: Vec<SearchOutcome> = rows.iter().map(|(_, o)| *o).collect();
    let metrics = aggregate(&outcomes);
    let body = match format {
        OutputFormat::Csv => csvout::outcomes_csv(rows),
        OutputFormat::Text => {
            let mut text = String::new();
            for (id, outcome) in rows {
                text.push_str(&format!(
                    "{id}: {} n_lean={} steps={}{}\n",
                    if outcome.success { "proved" } else { "failed" },
                    outcome.n_lean,
                    outcome.steps,
                    outcome
                        .failure_reason
                        .map(|r| format!(" ({r})"))
                        .unwrap_or_default()
                ));
            }
            text
        }
    };
    match out {
        Some(path) => std::fs::write(path, body)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(domain)?,
        None => print!("{body}"),
    }
    eprint!("{}", csvout::summary_text(&metrics));
    Ok(())
}

fn print_stats(records: &[TheoremRecord]) {
    let provable: Vec<&TheoremRecord> = records
        .iter()
        .filter(|r| r.provable && !r.resource_limited)
        .collect();
    println!("records: {}", records.len());
    println!("provable: {}", provable.len());
    println!(
        "resource-limited: {}",
        records.iter().filter(|r| r.resource_limited).count()
    );
    if provable.is_empty() {
        return;
    }
    let mut clean: Vec<u64> = provable.iter().map(|r| r.len_no_tae).collect();
    clean.sort_unstable();
    let mut tae: Vec<f64> = provable.iter().map(|r| r.len_tae_avg).collect();
    tae.sort_unstable_by(f64::total_cmp);
    let mean_clean = clean.iter().sum::<u64>() as f64 / clean.len() as f64;
    let mean_tae = tae.iter().sum::<f64>() / tae.len() as f64;
    println!(
        "len_no_tae: min {} mean {:.1} q66 {} q80 {} max {}",
        clean[0],
        mean_clean,
        dataset::nearest_rank(&clean, 0.66),
        dataset::nearest_rank(&clean, 0.8),
        clean[clean.len() - 1]
    );
    println!(
        "len_tae_avg: min {:.1} mean {:.1} q66 {:.1} q80 {:.1} max {:.1}",
        tae[0],
        mean_tae,
        dataset::nearest_rank(&tae, 0.66),
        dataset::nearest_rank(&tae, 0.8),
        tae[tae.len() - 1]
    );
    let avg_traces =
        provable.iter().map(|r| r.traces.len()).sum::<usize>() as f64 / provable.len() as f64;
    println!("traces per provable record: {avg_traces:.1}");
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
