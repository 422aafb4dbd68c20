mod args;
mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use args::Cli;
use output::{artifact, write_atomic, Failure};

/// What a command produced, before anything is written.
pub enum Artifact {
    Json(Value),
    Text(String),
}

/// Per-invocation state shared by the commands.
pub struct Context {
    argv: Vec<String>,
    config_file: Option<PathBuf>,
    generated_seed: Option<u64>,
    /// Side files written before the main artifact.
    side_files: Vec<(PathBuf, String)>,
}

impl Context {
    /// The explicit seed, or a fresh one that is recorded in the artifact.
    pub fn seed(&mut self, given: Option<u64>) -> u64 {
        given.unwrap_or_else(|| *self.generated_seed.get_or_insert_with(rand::random))
    }

    /// Arguments that reproduce this run, with the config file expanded and
    /// any generated seed appended.
    pub fn replay_argv(&self) -> Vec<String> {
        let mut argv = self.argv.clone();
        if let Some(seed) = self.generated_seed {
            argv.extend(["--seed".to_string(), seed.to_string()]);
        }
        argv
    }

    pub fn invocation(&self) -> Value {
        serde_json::json!({
            "argv": self.replay_argv(),
            "config_file": self.config_file.as_ref().map(|p| p.display().to_string()),
            "seed_generated": self.generated_seed.is_some(),
        })
    }

    pub fn side_file(&mut self, path: PathBuf, contents: String) {
        self.side_files.push((path, contents));
    }
}

fn run(raw: Vec<String>) -> Result<(), Failure> {
    let (argv, config_file) = config::effective_args(&raw)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return Ok(());
        }
        Err(e) => return Err(Failure::usage(e.render().to_string().trim_end())),
    };
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::usage(format!("--threads: {e}")))?;
    }
    let mut ctx = Context {
        argv,
        config_file,
        generated_seed: None,
        side_files: Vec::new(),
    };
    let produced = commands::dispatch(&cli.command, &mut ctx)?;
    let bytes = match produced {
        Artifact::Json(payload) => {
            let v = artifact(ctx.invocation(), payload);
            let mut s = serde_json::to_string_pretty(&v).expect("json");
            s.push('\n');
            s.into_bytes()
        }
        Artifact::Text(text) => text.into_bytes(),
    };
    for (path, contents) in &ctx.side_files {
        write_atomic(path, contents.as_bytes())?;
    }
    match &cli.output {
        Some(path) => write_atomic(path, &bytes),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::io(format!("stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.record());
            ExitCode::from(failure.code)
        }
    }
}
