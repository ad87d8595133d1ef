use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use lexvit::workbench::{self, VerifyOptions};
use lexvit::{
    build_dawg, build_trie, decode, Alphabet, FixedLog, HmmConfig, LetterModels, Lexicon,
    LexiconHmm, LogScore, PphCoding, Variant,
};

#[derive(Parser)]
#[command(
    name = "lexvit",
    version,
    about = "Lexicon-constrained Viterbi workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a trie or DAWG from a word list and write it with path-index annotations.
    Build {
        wordlist: PathBuf,
        out: PathBuf,
        #[arg(long, conflicts_with = "dawg")]
        trie: bool,
        /// The default.
        #[arg(long)]
        dawg: bool,
    },
    /// Decode every sequence of an observation file.
    Decode {
        automaton: PathBuf,
        config: PathBuf,
        observations: PathBuf,
        #[arg(long, default_value_t = 1)]
        nbest: usize,
        /// tabular, flipflop, inplace, nbest-naive or nbest-improved; the default
        /// is inplace for n = 1 and nbest-improved otherwise.
        #[arg(long)]
        variant: Option<String>,
        #[arg(long, value_enum, default_value_t = Scalar::F64)]
        scalar: Scalar,
    },
    /// Sample observation sequences from uniformly chosen words.
    Gen {
        wordlist: PathBuf,
        config: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the randomized equivalence suite against the brute-force oracle.
    Verify {
        wordlist: PathBuf,
        config: PathBuf,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        corrupt_pph: bool,
    },
    /// Compare trie and DAWG decoding on the same generated sequences (CSV).
    Bench {
        wordlist: PathBuf,
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        sequences: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a synthetic prefix x suffix word list.
    Synth {
        #[arg(long)]
        prefix_pool: usize,
        #[arg(long)]
        suffix_pool: usize,
        #[arg(long, default_value = "abcdefghijklmnopqrstuvwxyz")]
        alphabet: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List the expanded HMM states: index, node, letter, predecessor count.
    DumpStates { automaton: PathBuf, config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scalar {
    F64,
    F32,
    Exact,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_lexicon(path: &Path) -> Result<Lexicon> {
    Lexicon::parse(&read(path)?).with_context(|| format!("bad word list {}", path.display()))
}

fn read_config(path: &Path) -> Result<HmmConfig> {
    HmmConfig::parse(&read(path)?).with_context(|| format!("bad HMM config {}", path.display()))
}

fn read_coding(path: &Path) -> Result<PphCoding> {
    PphCoding::parse(&read(path)?).with_context(|| format!("bad automaton file {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn run_decode<F: LogScore>(
    coding: PphCoding,
    config: &HmmConfig,
    obs_text: &str,
    variant: Variant,
    n: usize,
) -> Result<()> {
    let models = LetterModels::<F>::new(config)?;
    let hmm = LexiconHmm::expand(coding, &models)?;
    let mut out = io::stdout().lock();
    for rec in workbench::parse_observations(obs_text, &config.alphabet) {
        match rec.sequence.and_then(|seq| decode(&hmm, &seq, variant, n)) {
            Ok(r) => out.write_all(r.to_text().as_bytes())?,
            Err(e) => writeln!(out, "error line {}: {e}", rec.line)?,
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Build {
            wordlist,
            out,
            trie,
            ..
        } => {
            let lexicon = read_lexicon(&wordlist)?;
            let automaton = if trie {
                build_trie(&lexicon)?
            } else {
                build_dawg(&lexicon)?
            };
            let coding = PphCoding::new(automaton)?;
            fs::write(&out, coding.to_text())
                .with_context(|| format!("cannot write {}", out.display()))?;
            let s = coding.automaton().stats();
            println!(
                "N={} arcs={} W={} p={:.4}",
                s.node_count,
                s.arc_count,
                coding.word_count(),
                s.mean_in_degree
            );
        }
        Command::Decode {
            automaton,
            config,
            observations,
            nbest,
            variant,
            scalar,
        } => {
            let coding = read_coding(&automaton)?;
            let config = read_config(&config)?;
            let obs = read(&observations)?;
            let variant = match variant {
                Some(v) => v.parse()?,
                None if nbest > 1 => Variant::NBestImproved,
                None => Variant::InPlace,
            };
            if nbest == 0 {
                anyhow::bail!("--nbest must be at least 1");
            }
            match scalar {
                Scalar::F64 => run_decode::<f64>(coding, &config, &obs, variant, nbest)?,
                Scalar::F32 => run_decode::<f32>(coding, &config, &obs, variant, nbest)?,
                Scalar::Exact => run_decode::<FixedLog>(coding, &config, &obs, variant, nbest)?,
            }
        }
        Command::Gen {
            wordlist,
            config,
            count,
            seed,
            output,
        } => {
            let lexicon = read_lexicon(&wordlist)?;
            let config = read_config(&config)?;
            let samples = workbench::generate(&lexicon, &config, count, seed)?;
            emit(
                output.as_deref(),
                &workbench::format_samples(&samples, &config.alphabet),
            )?;
        }
        Command::Verify {
            wordlist,
            config,
            instances,
            seed,
            corrupt_pph,
        } => {
            let lexicon = read_lexicon(&wordlist)?;
            let config = read_config(&config)?;
            if instances == 0 {
                eprintln!("warning: 0 instances requested, nothing was checked");
            }
            let report = workbench::verify(
                &lexicon,
                &config,
                &VerifyOptions {
                    instances,
                    seed,
                    corrupt_pph,
                },
            )?;
            match &report.failure {
                None => println!(
                    "PASS instances={} checks={}",
                    report.instances, report.checks
                ),
                Some(f) => {
                    println!("{f}");
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Bench {
            wordlist,
            config,
            sequences,
            seed,
            output,
        } => {
            let lexicon = read_lexicon(&wordlist)?;
            let config = read_config(&config)?;
            let report = workbench::bench(
                &lexicon,
                &config,
                sequences,
                seed,
                &[Variant::FlipFlop, Variant::InPlace],
            )?;
            emit(output.as_deref(), &report.to_csv())?;
        }
        Command::Synth {
            prefix_pool,
            suffix_pool,
            alphabet,
            seed,
            output,
        } => {
            let alphabet = Alphabet::new(alphabet.chars())?;
            let lexicon = workbench::synthetic_lexicon(prefix_pool, suffix_pool, &alphabet, seed)?;
            let mut text = String::new();
            for w in lexicon.iter() {
                text.push_str(w);
                text.push('\n');
            }
            emit(output.as_deref(), &text)?;
        }
        Command::DumpStates { automaton, config } => {
            let coding = read_coding(&automaton)?;
            let models = LetterModels::<f64>::new(&read_config(&config)?)?;
            print!("{}", LexiconHmm::expand(coding, &models)?.dump_states());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
