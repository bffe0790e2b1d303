#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use crate::cli::Cli;
use crate::commands::Artifacts;
use crate::config::ExperimentConfig;

const EXIT_RUN: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn render(cfg: &ExperimentConfig, result: &serde_json::Value) -> String {
    // serde_json's default map is ordered, so keys come out sorted
    let doc = json!({
        "config": cfg,
        "version": energy_core::VERSION,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Writes every file or none: on any failure the files already written are removed.
fn write_all(dir: &Path, files: &[(String, Vec<u8>)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| {
        for (name, bytes) in files {
            let path = dir.join(name);
            let tmp = dir.join(format!(".{name}.partial"));
            std::fs::write(&tmp, bytes)?;
            written.push(tmp.clone());
            std::fs::rename(&tmp, &path)?;
            written.pop();
            written.push(path);
        }
        Ok(())
    })();
    if result.is_err() {
        for p in &written {
            let _ = std::fs::remove_file(p);
        }
    }
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config::resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("edist: configuration error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("edist: cannot start thread pool: {e}");
            return ExitCode::from(EXIT_RUN);
        }
    }
    let Artifacts { result, files } = match commands::run(&cfg) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("edist: {e}");
            return ExitCode::from(EXIT_RUN);
        }
    };
    let summary = render(&cfg, &result);
    match &cfg.output_dir {
        Some(dir) => {
            let mut all = files;
            all.push(("summary.json".to_string(), summary.into_bytes()));
            if let Err(e) = write_all(dir, &all) {
                eprintln!("edist: cannot write outputs to {}: {e}", dir.display());
                return ExitCode::from(EXIT_RUN);
            }
        }
        None => print!("{summary}"),
    }
    ExitCode::SUCCESS
}
