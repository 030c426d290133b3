//! The `mls` command line: run scripts, an interactive REPL, and the purity
//! analyzer.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use mls::error::MlsError;
use mls::purity::{self, PurityTable, Status};
use mls::reader::parse_program;
use mls::{par, Interpreter, ModuleUnit, Strategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NONFUNCTIONAL: i32 = 3;
pub const EXIT_UNCERTIFIABLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "mls", version, about = "Run, explore and analyze MLS programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a script, printing the value of each top-level expression.
    Run {
        file: PathBuf,
        /// Seed the random generator before running.
        #[arg(long)]
        seed: Option<i64>,
    },
    /// Interactive read-eval-print loop.
    Repl,
    /// Certify functions as functional, nonfunctional or uncertifiable.
    Analyze {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn exit_code_for(status: Status) -> i32 {
    match status {
        Status::Functional => EXIT_OK,
        Status::Nonfunctional => EXIT_NONFUNCTIONAL,
        Status::Uncertifiable => EXIT_UNCERTIFIABLE,
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cli.command {
        Command::Run { file, seed } => run(&file, seed, err),
        Command::Repl => {
            let stdin = std::io::stdin();
            let mut interp = Interpreter::new();
            repl(stdin.lock(), &mut interp, out, err);
            EXIT_OK
        }
        Command::Analyze { paths, format } => analyze(&paths, format, out, err),
    }
}

fn report_warnings(warnings: &[String], err: &mut dyn Write) {
    match warnings {
        [] => {}
        [w] => {
            let _ = writeln!(err, "Warning message:\n{w}");
        }
        ws => {
            let _ = writeln!(err, "Warning messages:");
            for (i, w) in ws.iter().enumerate() {
                let _ = writeln!(err, "{}: {w}", i + 1);
            }
        }
    }
}

/// `mls run`: evaluates `file` in a fresh interpreter printing to stdout.
pub fn run(file: &Path, seed: Option<i64>, err: &mut dyn Write) -> i32 {
    let source = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "cannot read {}: {e}", file.display());
            return EXIT_INPUT;
        }
    };
    let mut interp = Interpreter::new();
    if let Some(s) = seed {
        interp.set_seed(s);
    }
    let r = mls::sweep::run_with_imports(&mut interp, &source, file.parent());
    report_warnings(&interp.take_warnings(), err);
    match r {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", file.display());
            match e {
                MlsError::Eval(_) => EXIT_RUNTIME,
                MlsError::Syntax(_) | MlsError::Input(_) => EXIT_INPUT,
            }
        }
    }
}

/// Reads expressions from `input` until end of input or `:quit`. Values
/// print through the interpreter's own output; prompts and `:env` listings
/// go to `out`, errors and warnings to `err`.
pub fn repl<R: BufRead>(input: R, interp: &mut Interpreter, out: &mut dyn Write, err: &mut dyn Write) {
    let mut pending = String::new();
    let mut lines = input.lines();
    loop {
        interp.flush();
        let _ = write!(out, "{}", if pending.is_empty() { "> " } else { "+ " });
        let _ = out.flush();
        let Some(Ok(line)) = lines.next() else { break };
        if pending.is_empty() {
            match line.trim() {
                ":quit" | ":q" => break,
                ":env" => {
                    for name in interp.global().names().into_iter().filter(|n| !n.starts_with('.')) {
                        let _ = writeln!(out, "{name}");
                    }
                    continue;
                }
                _ => {}
            }
        }
        pending.push_str(&line);
        pending.push('\n');
        let exprs = match parse_program(&pending) {
            Ok(e) => e,
            Err(e) if e.incomplete => continue,
            Err(e) => {
                let _ = writeln!(err, "{e}");
                pending.clear();
                continue;
            }
        };
        pending.clear();
        for e in &exprs {
            let r = interp.eval_and_print(e);
            interp.flush();
            report_warnings(&interp.take_warnings(), err);
            if let Err(e) = r {
                let _ = writeln!(err, "{e}");
                break;
            }
        }
    }
    let _ = writeln!(out);
}

/// All `.mls` files named by `paths`, directories searched recursively,
/// in a stable order.
pub fn collect_sources(paths: &[PathBuf]) -> Result<Vec<PathBuf>, String> {
    let mut out = BTreeSet::new();
    for p in paths {
        if p.is_dir() {
            for entry in walkdir::WalkDir::new(p).sort_by_file_name() {
                let entry = entry.map_err(|e| e.to_string())?;
                if entry.file_type().is_file() && entry.path().extension().is_some_and(|x| x == "mls") {
                    out.insert(entry.into_path());
                }
            }
        } else if p.is_file() {
            out.insert(p.clone());
        } else {
            return Err(format!("cannot read {}: no such file or directory", p.display()));
        }
    }
    Ok(out.into_iter().collect())
}

fn module_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn load(path: &Path) -> Result<ModuleUnit, String> {
    let source = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    ModuleUnit::parse(&module_name(path), &source).map_err(|e| format!("{}:{}:{}: {}", path.display(), e.loc.line, e.loc.column, e.message))
}

/// Parses every module under `paths`, plus sibling modules they import.
pub fn load_modules(paths: &[PathBuf]) -> Result<Vec<ModuleUnit>, String> {
    let mut files = collect_sources(paths)?;
    let mut modules: Vec<ModuleUnit> = Vec::new();
    let mut origin: HashMap<String, PathBuf> = HashMap::new();
    while !files.is_empty() {
        let parsed = par::map(Strategy::Parallel, &files, |p| load(p));
        let mut next = Vec::new();
        for (path, m) in files.iter().zip(parsed) {
            let m = m?;
            if let Some(prev) = origin.get(&m.name) {
                return Err(format!("module '{}' is defined by both {} and {}", m.name, prev.display(), path.display()));
            }
            origin.insert(m.name.clone(), path.clone());
            for imp in &m.imports {
                let sibling = path.with_file_name(format!("{}.mls", imp.module));
                if !origin.contains_key(&imp.module) && sibling.is_file() && !next.contains(&sibling) && !files.contains(&sibling) {
                    next.push(sibling);
                }
            }
            modules.push(m);
        }
        next.retain(|p| !origin.contains_key(&module_name(p)));
        files = next;
    }
    Ok(modules)
}

/// `mls analyze`: prints the report and returns the worst status's exit code.
pub fn analyze(paths: &[PathBuf], format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let modules = match load_modules(paths) {
        Ok(m) => m,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_INPUT;
        }
    };
    let report = purity::analyze(&modules, &PurityTable::standard(), Strategy::Parallel);
    let text = match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json_string(),
    };
    let _ = out.write_all(text.as_bytes());
    exit_code_for(report.worst())
}
