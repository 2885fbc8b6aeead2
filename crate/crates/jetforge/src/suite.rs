//! Running every check of a manifest, possibly on several threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::checks::{self, CheckResult, Options};
use crate::dsl::parse::Diagnostic;
use crate::report::Report;
use crate::workspace::Workspace;

/// Normalization recurses on expression depth.
pub const STACK: usize = 256 << 20;

/// Validate the manifest up front so that a bad reference aborts before any work.
pub fn validate(ws: &Workspace) -> Result<(), Vec<Diagnostic>> {
    let errs: Vec<Diagnostic> = ws.checks.iter().filter_map(|c| checks::validate(ws, c).err()).collect();
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// Checks are pulled from a shared counter; the report is sorted by name afterwards,
/// so the output does not depend on `jobs`.
pub fn run(ws: &Workspace, manifest: &str, opts: &Options, jobs: usize) -> Result<Report, Vec<Diagnostic>> {
    validate(ws)?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<CheckResult>> = Mutex::new(Vec::with_capacity(ws.checks.len()));
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1).min(ws.checks.len().max(1)) {
            std::thread::Builder::new()
                .stack_size(STACK)
                .spawn_scoped(s, || loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(c) = ws.checks.get(i) else { break };
                    let r = checks::run(ws, c, opts);
                    results.lock().unwrap().push(r);
                })
                .expect("spawn worker");
        }
    });
    Ok(Report::new(manifest, opts, results.into_inner().unwrap()))
}
