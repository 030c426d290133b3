//! Running whole programs: import loading, and batches of independent
//! programs spread over threads.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::error::MlsError;
use crate::eval::Interpreter;
use crate::module::split_imports;
use crate::par::{self, Strategy};
use crate::reader::parse_program;

/// Evaluates the modules `source` imports (found as `<module>.mls` in `dir`),
/// then runs `source` itself, printing top-level values. Imported modules
/// are evaluated once each and print nothing.
pub fn run_with_imports(interp: &mut Interpreter, source: &str, dir: Option<&Path>) -> Result<(), MlsError> {
    let mut loaded = HashSet::new();
    let (imports, body) = split_imports(source)?;
    for imp in &imports {
        load_module(interp, &imp.module, dir, &mut loaded)?;
    }
    let r = parse_program(&body).map_err(MlsError::from).and_then(|exprs| {
        exprs.iter().try_for_each(|e| interp.eval_and_print(e)).map_err(MlsError::from)
    });
    interp.flush();
    r
}

fn load_module(
    interp: &mut Interpreter,
    name: &str,
    dir: Option<&Path>,
    loaded: &mut HashSet<String>,
) -> Result<(), MlsError> {
    if !loaded.insert(name.to_string()) {
        return Ok(());
    }
    let path: PathBuf = dir.unwrap_or(Path::new(".")).join(format!("{name}.mls"));
    let source = std::fs::read_to_string(&path)
        .map_err(|e| MlsError::Input(format!("cannot load module '{name}' from {}: {e}", path.display())))?;
    let (imports, body) = split_imports(&source)?;
    for imp in &imports {
        load_module(interp, &imp.module, dir, loaded)?;
    }
    for e in parse_program(&body)? {
        interp.eval_top(&e)?;
    }
    Ok(())
}

/// Everything a program run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub output: String,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

/// Runs one program in a fresh interpreter, capturing its output.
pub fn run_program(source: &str, seed: Option<i64>, dir: Option<&Path>) -> RunOutcome {
    let (mut interp, buf) = Interpreter::capturing();
    if let Some(s) = seed {
        interp.set_seed(s);
    }
    let r = run_with_imports(&mut interp, source, dir);
    RunOutcome { output: buf.take(), warnings: interp.take_warnings(), error: r.err().map(|e| e.to_string()) }
}

/// Runs every program independently; outcomes are in input order.
pub fn sweep(strategy: Strategy, sources: &[String], seed: Option<i64>) -> Vec<RunOutcome> {
    par::map(strategy, sources, |s| run_program(s, seed, None))
}
