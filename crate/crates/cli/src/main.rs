// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! `shallowpocket` command-line front end.
//!
//! Exit status: 0 on success, 2 for invalid input, 3 when a numerical
//! method fails (partial output and a `*.failure.toml` manifest are
//! written), 1 for I/O errors.

use std::process::ExitCode;

use clap::Parser;
use shallowpocket_cli::commands::{self, Run};
use shallowpocket_cli::{output, Cli};

fn write(run: &Run) -> std::io::Result<()> {
    for (path, contents) in &run.files {
        output::write_atomic(path, contents)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.execute() {
        Ok(run) => run,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = write(&run) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    match &run.failure {
        None => {
            // A manifest left over from an earlier failed run no longer applies.
            if let Some((main_out, _)) = run.files.first() {
                let stale = commands::manifest_path(main_out);
                if stale.exists() {
                    let _ = std::fs::remove_file(stale);
                }
            }
            for (path, _) in &run.files {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Some(m) => {
            if let Err(e) = output::write_atomic(&m.path, &m.contents) {
                eprintln!("error: cannot write failure manifest: {e}");
            }
            eprintln!("numerical failure: {}", m.message);
            eprintln!("partial output written; see {}", m.path.display());
            ExitCode::from(3)
        }
    }
}
