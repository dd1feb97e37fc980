pub mod constants;
pub mod pvar;
pub mod simulate;
pub mod smallball;
pub mod verify;

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;
use crate::manifest::Run;

/// Runs `body` inside a manifest-tracked run directory.
pub(crate) fn tracked<P: Serialize, T>(
    command: &str,
    params: &P,
    seed: Option<u64>,
    out: Option<&Path>,
    body: impl FnOnce(&mut Run) -> CliResult<T>,
) -> CliResult<T> {
    let value: Value = serde_json::to_value(params).expect("parameters serialize");
    let mut run = Run::start(command, value, seed, out)?;
    let outcome = body(&mut run);
    run.finish(&outcome)?;
    outcome
}
