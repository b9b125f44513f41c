use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ns4::analysis::{measures, AnalysisReport};
use ns4::check::{check, CheckOptions, CheckReport, System};
use ns4::reduce::{default_budget, normalize, reduce_step, NormalizeError, TraceStep};
use ns4::text::{parse_derivation_spanned, Spanned};
use ns4::{render, RenderFormat};

const OK: u8 = 0;
const SEMANTIC: u8 = 1;
const INPUT: u8 = 2;
const BUDGET: u8 = 3;

/// Check, analyze and normalize NS4 natural deduction derivations.
#[derive(Parser)]
#[command(name = "ns4", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Rule system for check and analyze; normalize and reduce always
    /// require NS4.
    #[arg(long, default_value = "ns4")]
    system: System,
    /// Outer step budget for normalize; defaults to 10 * size^2.
    #[arg(long, env = "NS4_BUDGET")]
    budget: Option<usize>,
    /// Output format: canonical-sexpr, ascii-tree or latex-tree.
    #[arg(long, default_value = "ascii-tree")]
    format: RenderFormat,
    /// Print the measure trace to stdout as well.
    #[arg(long)]
    trace: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check derivations; one violation per line.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Print degree, index, normality and the maximal segments.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Normalize, writing `<stem>.normal.<ext>` and `<stem>.trace`.
    Normalize {
        #[command(flatten)]
        common: Common,
        /// Directory for the outputs; defaults to the input's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Apply exactly one reduction.
    Reduce {
        #[command(flatten)]
        common: Common,
        /// Write the reduct here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { common, inputs } => inputs.iter().map(|p| cmd_check(&common, p)).max(),
        Command::Analyze { common, inputs } => inputs.iter().map(|p| cmd_analyze(&common, p)).max(),
        Command::Normalize { common, out_dir, inputs } => inputs
            .iter()
            .map(|p| cmd_normalize(&common, out_dir.as_deref(), p))
            .max(),
        Command::Reduce { common, output, input } => Some(cmd_reduce(&common, output.as_deref(), &input)),
    };
    ExitCode::from(code.unwrap_or(OK))
}

fn load(path: &Path) -> Result<(String, Spanned), u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        INPUT
    })?;
    match parse_derivation_spanned(&text) {
        Ok(sp) => Ok((text, sp)),
        Err(e) => {
            let (line, col) = e.line_col(&text);
            eprintln!("{}:{line}:{col}: {e}", path.display());
            Err(INPUT)
        }
    }
}

fn print_violations(path: &Path, text: &str, sp: &Spanned, report: &CheckReport) {
    for v in &report.violations {
        let (line, col) = sp.span_of(&v.path).map_or((1, 1), |s| s.line_col(text));
        println!("{}:{line}:{col}: {}: {} (node {})", path.display(), v.rule, v.reason, v.path);
    }
}

/// Load and require validity in `system`; reports and returns the exit
/// code otherwise.
fn load_valid(path: &Path, system: System) -> Result<Spanned, u8> {
    let (text, sp) = load(path)?;
    let report = check(&sp.derivation, system, CheckOptions::default());
    if !report.valid() {
        print_violations(path, &text, &sp, &report);
        return Err(SEMANTIC);
    }
    Ok(sp)
}

fn cmd_check(common: &Common, path: &Path) -> u8 {
    let (text, sp) = match load(path) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let report = check(&sp.derivation, common.system, CheckOptions::default());
    if report.valid() {
        println!("{}: valid in {}", path.display(), common.system);
        OK
    } else {
        print_violations(path, &text, &sp, &report);
        SEMANTIC
    }
}

fn cmd_analyze(common: &Common, path: &Path) -> u8 {
    let sp = match load_valid(path, common.system) {
        Ok(sp) => sp,
        Err(code) => return code,
    };
    let report = AnalysisReport::unchecked(&sp.derivation);
    println!("{}", path.display());
    print!("{report}");
    OK
}

fn extension(format: RenderFormat) -> &'static str {
    match format {
        RenderFormat::CanonicalSexpr => "nd",
        RenderFormat::AsciiTree => "txt",
        RenderFormat::LatexTree => "tex",
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn write(path: &Path, contents: String) -> Result<(), u8> {
    fs::write(path, with_newline(contents)).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        INPUT
    })
}

fn cmd_normalize(common: &Common, out_dir: Option<&Path>, path: &Path) -> u8 {
    let sp = match load_valid(path, System::Ns4) {
        Ok(sp) => sp,
        Err(code) => return code,
    };
    let d = &sp.derivation;
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| path.parent().map(Path::to_path_buf))
        .unwrap_or_default();
    let stem = path.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    let trace_path = dir.join(format!("{stem}.trace"));
    let budget = common.budget.unwrap_or_else(|| default_budget(d));
    let (code, trace, output) = match normalize(d, budget) {
        Ok((n, trace)) => (OK, trace, Some(n)),
        Err(NormalizeError::BudgetExhausted { trace, .. }) => {
            eprintln!("{}: step budget of {budget} exhausted", path.display());
            (BUDGET, trace, None)
        }
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            (SEMANTIC, e.trace().cloned().unwrap_or_default(), None)
        }
    };
    if let Err(c) = write(&trace_path, trace.to_string()) {
        return c;
    }
    if common.trace {
        print!("{trace}");
    }
    if let Some(n) = output {
        let out = dir.join(format!("{stem}.normal.{}", extension(common.format)));
        if let Err(c) = write(&out, render(&n, common.format)) {
            return c;
        }
        println!("{}: normal after {} step(s) -> {}", path.display(), trace.len(), out.display());
    }
    code
}

fn cmd_reduce(common: &Common, output: Option<&Path>, path: &Path) -> u8 {
    let sp = match load_valid(path, System::Ns4) {
        Ok(sp) => sp,
        Err(code) => return code,
    };
    let d = &sp.derivation;
    let (r, case) = match reduce_step(d) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return SEMANTIC;
        }
    };
    let step = TraceStep {
        case,
        before: measures(d),
        after: measures(&r),
    };
    let text = render(&r, common.format);
    match output {
        Some(out) => {
            if let Err(c) = write(out, text) {
                return c;
            }
            println!("{step}");
        }
        None => {
            println!("{step}");
            print!("{}", with_newline(text));
        }
    }
    OK
}
