//! Command-line front end for `repmap-core`.
//!
//! Every subcommand calls one library operation and emits its result as CSV
//! (with a `# config:` provenance line) or as JSON. Exit status is 0 on
//! success, 1 for rejected input or a failed precondition, 2 when a numerical
//! method fails to converge.

pub mod args;
mod commands;
pub mod report;

use std::fs;

use anyhow::{Context, Result};
use repmap_core::Error as CoreError;

pub use args::{Cli, Command, Format};
pub use report::Report;

/// Computes the document for `cli`.
///
/// A failed precondition that still yields a document (an invalid horseshoe
/// certificate) is returned alongside it.
pub fn render(cli: &Cli) -> Result<(String, Option<CoreError>)> {
    let outcome = commands::execute(cli)?;
    Ok((outcome.report.render(cli.format)?, outcome.failure))
}

/// Renders and writes the document, then reports any deferred failure.
pub fn run(cli: &Cli) -> Result<()> {
    let (document, failure) = render(cli)?;
    match &cli.out {
        Some(path) => fs::write(path, &document).with_context(|| format!("writing {}", path.display()))?,
        None => {
            use std::io::Write;
            std::io::stdout()
                .lock()
                .write_all(document.as_bytes())
                .context("writing standard output")?
        }
    }
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

/// 2 for convergence failures, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let convergence = err
        .chain()
        .filter_map(|e| e.downcast_ref::<CoreError>())
        .any(CoreError::is_convergence);
    if convergence {
        2
    } else {
        1
    }
}
