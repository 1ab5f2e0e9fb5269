mod args;
mod commands;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, ConfigOverride, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hecke_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        use hecke_core::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Json(_) => "json",
            CliError::Core(e) => match e {
                E::Singular => "singular",
                E::Dimension(_) => "dimension",
                E::Parse(_) => "parse",
                E::NotPrime(_) => "not_prime",
                E::Guard { .. } => "guard",
                E::Invalid(_) => "invalid",
                E::Inadmissible(_) => "inadmissible",
                E::ZeroFunction => "zero_function",
                E::Quadrature { .. } => "quadrature",
                E::EigenIdentity(_) => "eigen_identity",
                E::Io(_) => "io",
                E::Json(_) => "json",
            },
        }
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    let doc = json!({ "error": { "kind": kind, "message": message } });
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    eprintln!("hecke-lab: {kind}: {message}");
    ExitCode::from(2)
}

fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig { seed: cli.seed, output: cli.output, command: cli.command };
    if let Some(path) = cli.config {
        let o: ConfigOverride = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if let Some(s) = o.seed {
            cfg.seed = s;
        }
        if o.output.is_some() {
            cfg.output = o.output;
        }
        if let Some(c) = o.command {
            cfg.command = c;
        }
    }
    Ok(cfg)
}

fn limit_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("MASS_LAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Usage(format!("MASS_LAB_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Usage("MASS_LAB_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.render().to_string().lines().next().unwrap_or("invalid arguments")),
    };
    let timings = cli.timings;
    let result = limit_threads().and_then(|_| resolve(cli)).and_then(|cfg| {
        let start = Instant::now();
        let result = commands::run(&cfg)?;
        let mut doc = json!({
            "tool": "hecke-lab",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": cfg.seed,
            "config": cfg,
            "result": result,
        });
        if timings {
            doc["timings"] = json!({ "seconds": start.elapsed().as_secs_f64() });
        }
        let text = serde_json::to_string_pretty(&doc)? + "\n";
        match &cfg.output {
            Some(path) => std::fs::write(path, &text)?,
            None => print!("{text}"),
        }
        Ok(cfg)
    });
    match result {
        Ok(cfg) => {
            let name = serde_json::to_value(&cfg.command)
                .ok()
                .and_then(|v| v.as_object().and_then(|o| o.keys().next().cloned()));
            eprintln!("hecke-lab {}: done", name.unwrap_or_default());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
