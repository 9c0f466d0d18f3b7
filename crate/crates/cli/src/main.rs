use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use symcode::construct::ConstructError;
use symcode::workbench::{self, Bounds, CodeFilter, Property};
use symcode::{Code, ExponentMultiset, JsonTree, Tree};

/// Binary codes, symmetric ternary trees, and prefixification.
#[derive(Debug, Parser)]
#[command(name = "symcode", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decodability verdict, prefix-freeness, exact sums, and power profile.
    Check(Source),
    /// Symmetric tree of a prefix-free code.
    Tree {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = TreeFormat::Json)]
        format: TreeFormat,
    },
    /// Code of a symmetric tree given as JSON, one word per line.
    ToCode { file: PathBuf },
    /// Prefix-free code with the same power profile as a decodable code.
    Prefixify {
        #[command(flatten)]
        source: Source,
        /// Write the per-step construction trace as JSON lines.
        #[arg(long, value_name = "OUT")]
        trace: Option<PathBuf>,
        /// Re-check prefix-freeness and profile equality of the output.
        #[arg(long)]
        verify: bool,
    },
    /// List every small code passing a filter.
    Enumerate {
        #[arg(long)]
        max_words: usize,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value = "all")]
        filter: CodeFilter,
        #[arg(long)]
        count_only: bool,
    },
    /// Exhaustive property sweep; prints the report as JSON.
    Sweep {
        #[arg(long)]
        property: Property,
        #[arg(long)]
        max_words: usize,
        #[arg(long)]
        max_len: usize,
    },
    /// Sub-multiset of 2^n terms summing to exactly 2^target.
    SubsetSum {
        #[arg(long)]
        target: u32,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        exponents: Vec<u32>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Code file (`-` for stdin): one word per line, `#` comments.
    file: Option<PathBuf>,
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TreeFormat {
    Dot,
    Json,
}

/// Error carrying the process exit status.
struct Failure {
    status: u8,
    error: anyhow::Error,
}

/// Bad input or unmet precondition.
fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure { status: 2, error: error.into() }
}

/// Property or construction failure.
fn failed(error: impl Into<anyhow::Error>) -> Failure {
    Failure { status: 1, error: error.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure { status, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(status)
        }
    }
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        return Ok(text);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(source: &Source) -> Result<Code, Failure> {
    match (&source.file, &source.builtin) {
        (_, Some(name)) => Code::builtin(name).map_err(usage),
        (Some(path), None) => {
            let text = read_text(path).map_err(usage)?;
            Code::parse(&text).with_context(|| path.display().to_string()).map_err(usage)
        }
        (None, None) => Err(usage(anyhow!("give a code file or --builtin"))),
    }
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Check(source) => check(&load(&source)?),
        Command::Tree { file, format } => {
            let code = load(&Source { file: Some(file), builtin: None })?;
            let tree = symcode::correspondence::try_code_to_tree(&code).map_err(usage)?;
            Ok(match format {
                TreeFormat::Dot => workbench::export_labeled_dot(&tree),
                TreeFormat::Json => json_line(&tree.to_json())?,
            })
        }
        Command::ToCode { file } => {
            let text = read_text(&file).map_err(usage)?;
            let json: JsonTree =
                serde_json::from_str(&text).with_context(|| file.display().to_string()).map_err(usage)?;
            let tree = Tree::from_json(&json).map_err(usage)?;
            let code = symcode::tree_to_code(&tree).map_err(usage)?;
            Ok(code.to_text())
        }
        Command::Prefixify { source, trace, verify } => prefixify(&load(&source)?, trace.as_deref(), verify),
        Command::Enumerate { max_words, max_len, filter, count_only } => {
            if max_words == 0 || max_len == 0 {
                return Err(usage(anyhow!("--max-words and --max-len must be at least 1")));
            }
            let codes = workbench::enumerate_codes(max_words, max_len, filter);
            if count_only {
                return Ok(format!("{}\n", codes.count()));
            }
            Ok(codes.map(|c| format!("{c}\n")).collect())
        }
        Command::Sweep { property, max_words, max_len } => {
            let report = workbench::run_sweep(property, Bounds::new(max_words, max_len)).map_err(usage)?;
            let text = json_line(&report)?;
            if report.passed {
                Ok(text)
            } else {
                print!("{text}");
                Err(failed(anyhow!("{} failure(s) in {property}", report.failures.len())))
            }
        }
        Command::SubsetSum { target, exponents } => {
            let exponents = ExponentMultiset::new(exponents);
            match symcode::subset_sum_exact(&exponents, target) {
                Ok(pick) => Ok(format!("{pick}\n")),
                Err(
                    e @ (ConstructError::ExponentAboveTarget { .. } | ConstructError::SubsetSumShort { .. }),
                ) => Err(usage(e)),
                Err(e) => Err(failed(e)),
            }
        }
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string(value).map_err(failed)?;
    text.push('\n');
    Ok(text)
}

fn check(code: &Code) -> Result<String, Failure> {
    let verdict = symcode::sardinas_patterson(code);
    let mut out = String::new();
    writeln!(out, "decodable: {}", verdict.decodable).unwrap();
    if let Some(w) = &verdict.witness {
        let join =
            |parts: &[symcode::Word]| parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(".");
        writeln!(out, "witness: {} = {} = {}", w.word, join(&w.left), join(&w.right)).unwrap();
    }
    writeln!(out, "prefix_free: {}", code.is_prefix_free()).unwrap();
    writeln!(out, "kraft_sum: {}", code.kraft_sum()).unwrap();
    writeln!(out, "weighted_ternary_sum: {}", code.weighted_ternary_sum()).unwrap();
    writeln!(out, "power_profile: {}", code.power_profile()).unwrap();
    Ok(out)
}

fn prefixify(code: &Code, trace: Option<&Path>, verify: bool) -> Result<String, Failure> {
    let result = symcode::prefixify_traced(code).map_err(|e| match e {
        ConstructError::NotDecodable(_) => usage(e),
        other => failed(other),
    })?;
    if let Some(path) = trace {
        std::fs::write(path, result.trace_json_lines())
            .with_context(|| format!("writing {}", path.display()))
            .map_err(failed)?;
    }
    eprintln!("cardinality: {}", result.code.len());
    eprintln!("vacancy_shifts: {}", result.shifts());
    eprintln!("oracle_fallbacks: {}", result.fallbacks());
    if verify {
        if !result.code.is_prefix_free() {
            return Err(failed(anyhow!("output is not prefix-free")));
        }
        let (want, got) = (code.power_profile(), result.code.power_profile());
        if want != got {
            return Err(failed(anyhow!("profile mismatch: expected {want}, got {got}")));
        }
        eprintln!("verified: prefix-free, power profile {got}");
    }
    Ok(result.code.to_text())
}
