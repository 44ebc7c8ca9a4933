use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use casealt::entailment::{check_inference, InferenceError};
use casealt::exec::{parse_batch, Execution};
use casealt::lexicon::{builtin, load_lexicon, Lexicon};
use casealt::parser::{render_derivation, sentence_semantics, tokenize, ParseError};
use casealt::suite::{run_suite, suite_cases};
use casealt::terms::print_term;

const LEXICON_PATH_VAR: &str = "CASEALT_LEXICON_PATH";

#[derive(Parser)]
#[command(name = "casealt", version, about = "CCG derivations and entailment for Japanese passive and causative suffixes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse sentences and print their derivations.
    Parse {
        /// Pre-segmented sentence, morphemes separated by spaces.
        sentence: Option<String>,
        /// Built-in lexicon name, a lexicon file, or a name found on CASEALT_LEXICON_PATH.
        #[arg(long, default_value = "bekki")]
        lexicon: String,
        /// Print the closed logical form of each derivation.
        #[arg(long)]
        show_sem: bool,
        /// Print each derivation as an indented tree.
        #[arg(long)]
        show_tree: bool,
        /// Read one sentence per line from a file.
        #[arg(long, conflicts_with = "sentence")]
        file: Option<PathBuf>,
        /// Parse the sentences of a file one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Decide whether the premise entails the conclusion.
    Infer {
        premise: String,
        conclusion: String,
        #[arg(long, default_value = "bekki")]
        lexicon: String,
    },
    /// Run the built-in inference suite.
    Suite {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// `all`, or one lexicon.
        #[arg(long, default_value = "all")]
        lexicon: String,
        /// Run the cases one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Print a lexicon in its file format.
    LexiconDump {
        #[arg(default_value = "bekki")]
        lexicon: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn search_dirs() -> Vec<PathBuf> {
    std::env::var_os(LEXICON_PATH_VAR)
        .map(|v| std::env::split_paths(&v).filter(|p| !p.as_os_str().is_empty()).collect())
        .unwrap_or_default()
}

fn resolve_lexicon(name: &str) -> Result<Lexicon> {
    if let Some(lex) = builtin(name) {
        return Ok(lex);
    }
    let direct = Path::new(name);
    if direct.is_file() {
        return load_lexicon(direct).with_context(|| format!("loading {}", direct.display()));
    }
    for dir in search_dirs() {
        for candidate in [dir.join(name), dir.join(format!("{name}.lex"))] {
            if candidate.is_file() {
                return load_lexicon(&candidate).with_context(|| format!("loading {}", candidate.display()));
            }
        }
    }
    bail!("unknown lexicon {name:?}: not built in, not a file, and not found on {LEXICON_PATH_VAR}")
}

fn cmd_parse(
    sentence: Option<String>,
    lexicon: &str,
    show_sem: bool,
    show_tree: bool,
    file: Option<PathBuf>,
    sequential: bool,
    out: &mut String,
) -> Result<u8> {
    let lex = resolve_lexicon(lexicon)?;
    let sentences: Vec<String> = match (sentence, file) {
        (Some(s), None) => vec![s],
        (None, Some(path)) => std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect(),
        _ => bail!("give a sentence or --file"),
    };
    let tokens: Vec<Vec<String>> = sentences.iter().map(|s| tokenize(s)).collect();
    let results = parse_batch(&tokens, &lex, execution(sequential));
    let mut code = 0u8;
    for (sentence, result) in sentences.iter().zip(results) {
        if sentences.len() > 1 {
            let _ = writeln!(out, "# {sentence}");
        }
        let parsed = match result {
            Ok(p) => p,
            Err(e @ ParseError::UnknownToken(_)) => {
                let _ = writeln!(out, "{e}");
                code = 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        if parsed.derivations.is_empty() {
            let _ = writeln!(out, "no parse");
            if code == 0 {
                code = 2;
            }
            continue;
        }
        for (i, d) in parsed.derivations.iter().enumerate() {
            let _ = writeln!(out, "derivation {}: {}", i + 1, d.rule_tree());
            if show_tree {
                out.push_str(&render_derivation(d));
            }
            if show_sem {
                let lf = sentence_semantics(d, &lex)?;
                let _ = writeln!(out, "sem: {}", print_term(&lf, lex.closure.syntax()));
            }
        }
    }
    Ok(code)
}

fn cmd_infer(premise: &str, conclusion: &str, lexicon: &str, out: &mut String) -> Result<u8> {
    let lex = resolve_lexicon(lexicon)?;
    let syntax = lex.closure.syntax();
    match check_inference(&lex, &tokenize(premise), &tokenize(conclusion)) {
        Ok(inf) => {
            let _ = writeln!(out, "premise:    {}", print_term(&inf.premise.lf, syntax));
            let _ = writeln!(out, "conclusion: {}", print_term(&inf.conclusion.lf, syntax));
            for w in [&inf.premise.ambiguity_warning, &inf.conclusion.ambiguity_warning].into_iter().flatten() {
                let _ = writeln!(out, "warning: {w}");
            }
            if let Some(d) = &inf.verdict.diagnostic {
                let _ = writeln!(out, "note: {d}");
            }
            let _ = writeln!(out, "{}", if inf.verdict.holds { "YES" } else { "NO" });
            Ok(if inf.verdict.holds { 0 } else { 3 })
        }
        Err(e) => {
            let _ = writeln!(out, "{e}");
            Ok(match e {
                InferenceError::Parse { source: ParseError::UnknownToken(_), .. } => 1,
                InferenceError::Parse { .. } | InferenceError::NoParse { .. } | InferenceError::Shape { .. } => 2,
            })
        }
    }
}

fn cmd_suite(format: Format, lexicon: &str, sequential: bool, out: &mut String) -> Result<u8> {
    let lexicons = if lexicon == "all" {
        vec![resolve_lexicon("bekki")?, resolve_lexicon("ccgbank")?]
    } else {
        vec![resolve_lexicon(lexicon)?]
    };
    let report = run_suite(&suite_cases(), &lexicons, execution(sequential));
    match format {
        Format::Text => out.push_str(&report.to_text()),
        Format::Json => {
            out.push_str(&report.to_json());
            out.push('\n');
        }
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn run(cli: Cli, out: &mut String) -> Result<u8> {
    match cli.command {
        Command::Parse { sentence, lexicon, show_sem, show_tree, file, sequential } => {
            cmd_parse(sentence, &lexicon, show_sem, show_tree, file, sequential, out)
        }
        Command::Infer { premise, conclusion, lexicon } => cmd_infer(&premise, &conclusion, &lexicon, out),
        Command::Suite { format, lexicon, sequential } => cmd_suite(format, &lexicon, sequential, out),
        Command::LexiconDump { lexicon } => {
            out.push_str(&resolve_lexicon(&lexicon)?.to_text());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let mut out = String::new();
    let result = run(Cli::parse(), &mut out);
    // a reader that closed the pipe early is not an error
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
