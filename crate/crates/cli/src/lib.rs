// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Command implementations behind the `shallowpocket` binary. Each command
//! resolves its configuration, runs the computation and returns the
//! rendered files without touching the filesystem.

pub mod commands;
pub mod config;
pub mod expr;
pub mod output;

use clap::{Parser, Subcommand};

use commands::{PotentialArgs, PwArgs, ReducedArgs, Run, SurvivalArgs};

#[derive(Debug, Parser)]
#[command(
    name = "shallowpocket",
    version,
    about = "Exact dephasing, survival amplitudes and decay diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Survival amplitude a(t) of a spectral density.
    Survival(SurvivalArgs),
    /// Reduced spin state under the exact dynamics.
    Reduced(ReducedArgs),
    /// Exact reduced dynamics against both dephasing semigroups.
    GklsCompare(ReducedArgs),
    /// Paley–Wiener sweep, growth class and exponential fit.
    Pw(PwArgs),
    /// Transported state and dephasing factor for a monotone potential.
    Potential(PotentialArgs),
}

impl Cli {
    /// Run the selected command. `Err` carries an input error message.
    pub fn execute(&self) -> Result<Run, String> {
        match &self.command {
            Command::Survival(a) => commands::survival(a),
            Command::Reduced(a) => commands::reduced(a),
            Command::GklsCompare(a) => commands::gkls_compare(a),
            Command::Pw(a) => commands::pw(a),
            Command::Potential(a) => commands::potential(a),
        }
    }
}
