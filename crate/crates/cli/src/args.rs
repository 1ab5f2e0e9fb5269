use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "hecke-lab", version, about = "Hecke operator, amplifier and covering-lemma experiments")]
pub struct Cli {
    /// JSON file whose fields override the command line.
    #[arg(long, global = true)]
    pub config: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<String>,
    /// Record wall-clock timings; the output is then no longer reproducible byte for byte.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Single cosets of K a K.
    Cosets(CosetsArgs),
    /// Satake transform of a basis element.
    Satake(SatakeArgs),
    /// Plancherel norms of basis elements and the total mass.
    PlancherelCheck(PlancherelArgs),
    /// Amplifier at one parameter or a sweep of random tempered ones.
    Amplify(AmplifyArgs),
    /// Diophantine demonstrations.
    Dioph(DiophArgs),
    /// Covering lemmas and mass bounds on finite models.
    MassLab(MassLabArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CosetsArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    /// Cocharacter, e.g. "1,0".
    #[arg(long, default_value = "1,0")]
    pub a: String,
    /// Include the coset representatives.
    #[arg(long)]
    pub reps: bool,
}

impl Default for CosetsArgs {
    fn default() -> Self {
        Self { d: 2, p: 2, a: "1,0".into(), reps: false }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SatakeArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value = "1,0")]
    pub a: String,
    /// Optional Satake parameter at which to evaluate, e.g. "1,1" or "0.6+0.8i,0.6-0.8i".
    #[arg(long)]
    pub nu: Option<String>,
}

impl Default for SatakeArgs {
    fn default() -> Self {
        Self { d: 2, p: 2, a: "1,0".into(), nu: None }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PlancherelArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    #[arg(long, default_value_t = 3.0)]
    pub rmax: f64,
}

impl Default for PlancherelArgs {
    fn default() -> Self {
        Self { d: 2, p: 5, rmax: 3.0 }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AmplifyArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    /// Satake parameter; a random tempered one is drawn from the seed when absent.
    #[arg(long)]
    pub nu: Option<String>,
    /// "tempered:N" runs N random tempered parameters.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Primes below this are tagged untrusted.
    #[arg(long, default_value_t = 5)]
    pub p0: u64,
    #[arg(long, default_value_t = 0.05)]
    pub floor: f64,
    /// Include per-coset contributions.
    #[arg(long)]
    pub contributions: bool,
}

impl Default for AmplifyArgs {
    fn default() -> Self {
        Self { d: 2, p: 5, nu: None, sweep: None, p0: 5, floor: 0.05, contributions: false }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Demo {
    Colinear,
    Nearsub,
    Badprimes,
    Lift,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DiophArgs {
    /// Algebra JSON; defaults to M_2(Q) with M_2(Z).
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long, value_enum, default_value = "colinear")]
    pub demo: Demo,
    /// Denominator bound.
    #[arg(long, default_value_t = 2)]
    pub m: u64,
    /// Instances or samples.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Element for the lift demo, as comma-separated rationals in algebra coordinates.
    #[arg(long)]
    pub alpha: Option<String>,
}

impl Default for DiophArgs {
    fn default() -> Self {
        Self { spec: None, demo: Demo::Colinear, m: 2, trials: 100, alpha: None }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Cov1,
    Cov2,
    Cover,
    Decay,
    Profile,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MassLabArgs {
    #[arg(long, value_enum, default_value = "cov2")]
    pub check: Check,
    /// Model JSON; built-in models are used when absent.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Base radius, a rational such as "1" or "1/24".
    #[arg(long, default_value = "1")]
    pub r0: String,
}

impl Default for MassLabArgs {
    fn default() -> Self {
        Self { check: Check::Cov2, model: None, trials: 1000, r0: "1".into() }
    }
}

/// Everything that determines a run; echoed in the output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub output: Option<String>,
    pub command: Command,
}

/// Shape of a `--config` file: every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverride {
    pub seed: Option<u64>,
    pub output: Option<String>,
    pub command: Option<Command>,
}
