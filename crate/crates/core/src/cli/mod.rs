//! The `abc` command line.
//!
//! Every run writes `manifest.json` into the output directory before any
//! computation and rewrites it at the end with the status and the list of
//! artifacts. Exit codes: 0 on success, 2 for configuration errors, 3 for
//! numerical failures (with `error.json` beside the manifest).

mod commands;
mod report;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use report::render_report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "abc", version, about = "Rigidity experiments for ABC actions on the torus")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Directory receiving the manifest and all artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Base seed; `ABC_SEED` overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 means one per logical core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Solutions of `Aρ − ρB = C`.
    Classify {
        #[arg(long = "A")]
        a: String,
        #[arg(long = "B")]
        b: String,
        #[arg(long = "C", default_value = "0")]
        c: String,
    },
    /// Density of the translation orbit of an affine action.
    Faithful {
        #[arg(long)]
        action: PathBuf,
    },
    /// Rotation set of a lift homotopic to the identity.
    Rotset {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// Expected direction `x,y` of a segment.
        #[arg(long)]
        direction: Option<String>,
    },
    /// Joint rotation pairs of two commuting lifts.
    Jointrot {
        #[arg(long)]
        f1: PathBuf,
        #[arg(long)]
        f2: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        boxes: Vec<usize>,
        #[arg(long, default_value_t = 16)]
        initials: usize,
        /// With `--B`, checks the difference hull under `Aⁿ · B⁻ⁿ`.
        #[arg(long = "A")]
        a: Option<String>,
        #[arg(long = "B")]
        b: Option<String>,
        #[arg(long, default_value_t = 5)]
        n_max: u32,
    },
    /// Grid conjugacy to the linear part.
    Franks {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// File name of the `.grid` output inside the output directory.
        #[arg(long, default_value = "h.grid")]
        out: String,
    },
    /// Stable and unstable directions on a grid.
    Splitting {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 32)]
        resolution: usize,
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    /// Periodic points of a given period.
    Periodic {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        period: usize,
    },
    /// Angles between the image and target foliations.
    Transversality {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = 30)]
        depth: usize,
    },
    /// Ping-pong certificate for `f^N` and `h f^N h⁻¹`.
    Pingpong {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long = "L", default_value_t = 3)]
        word_length: usize,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 1024)]
        n_max: usize,
        /// Positive words only, for the semigroup certificate.
        #[arg(long)]
        positive_only: bool,
        #[arg(long, default_value = "cert.json")]
        out: String,
    },
    /// Rotation number and optional KAM conjugacy of a circle lift.
    Rotnum {
        #[arg(long)]
        circle: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        /// Linearise towards this rotation number.
        #[arg(long)]
        conjugate_to: Option<f64>,
        #[arg(long, default_value_t = 128)]
        modes: usize,
        #[arg(long, default_value_t = 30)]
        kam_iters: usize,
    },
    /// Flow through two commuting leaf maps.
    Flow {
        #[arg(long)]
        f1: PathBuf,
        #[arg(long)]
        f2: PathBuf,
        #[arg(long = "B")]
        b: String,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        /// Interval searched for fixed points of `f1`.
        #[arg(long, value_delimiter = ',', default_value = "-10,10")]
        interval: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 128)]
        modes: usize,
    },
    /// Lyapunov exponent and the entropy inequality.
    Lyapunov {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 32)]
        orbits: usize,
        #[arg(long, default_value_t = 10_000)]
        length: usize,
    },
    /// Cesàro average of pushforwards along `Bⁿ e₁`.
    SrbAverage {
        #[arg(long)]
        action: PathBuf,
        #[arg(long = "B")]
        b: String,
        #[arg(long = "N")]
        n: usize,
        /// Start from a Dirac mass at `x,y`.
        #[arg(long, conflicts_with = "birkhoff")]
        dirac: Option<String>,
        /// Start from a forward orbit of this map.
        #[arg(long)]
        birkhoff: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 16)]
        bins: usize,
    },
    /// Derivative bound and distortion scans.
    Scans {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        action: PathBuf,
        #[arg(long = "B")]
        b: String,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.8,1.0")]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 32)]
        pairs: usize,
    },
    /// Collates a finished run directory into `report.md`.
    Report {
        /// Run directory holding `manifest.json`.
        dir: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Faithful { .. } => "faithful",
            Command::Rotset { .. } => "rotset",
            Command::Jointrot { .. } => "jointrot",
            Command::Franks { .. } => "franks",
            Command::Splitting { .. } => "splitting",
            Command::Periodic { .. } => "periodic",
            Command::Transversality { .. } => "transversality",
            Command::Pingpong { .. } => "pingpong",
            Command::Rotnum { .. } => "rotnum",
            Command::Flow { .. } => "flow",
            Command::Lyapunov { .. } => "lyapunov",
            Command::SrbAverage { .. } => "srb-average",
            Command::Scans { .. } => "scans",
            Command::Report { .. } => "report",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical { kind: String, message: String },
}

impl CliError {
    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn numerical(e: impl std::fmt::Debug + std::fmt::Display) -> Self {
        let kind = format!("{e:?}").split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        CliError::Numerical { kind, message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical { .. } => EXIT_NUMERICAL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub file: String,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config: Value,
    pub seed: u64,
    pub seed_from_env: bool,
    pub workers: usize,
    pub status: String,
    pub outputs: Vec<OutputEntry>,
}

/// Output directory plus manifest bookkeeping.
pub struct Run {
    pub dir: PathBuf,
    pub seed: u64,
    pub manifest: Manifest,
}

impl Run {
    fn manifest_path(&self) -> PathBuf {
        self.dir.join("manifest.json")
    }

    fn save_manifest(&self) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(&self.manifest).map_err(CliError::config)?;
        fs::write(self.manifest_path(), text + "\n").map_err(CliError::config)
    }

    /// Writes an artifact and records it in the manifest.
    pub fn write(&mut self, file: &str, kind: &str, content: &str) -> Result<(), CliError> {
        fs::write(self.dir.join(file), content).map_err(|e| CliError::Config(format!("writing {file}: {e}")))?;
        if !self.manifest.outputs.iter().any(|o| o.file == file) {
            self.manifest.outputs.push(OutputEntry { file: file.into(), kind: kind.into() });
        }
        Ok(())
    }

    pub fn write_json(&mut self, file: &str, kind: &str, value: &impl Serialize) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).map_err(CliError::config)?;
        self.write(file, kind, &(text + "\n"))
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Parses argv (including the program name) and runs; returns the exit code.
pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            match &e {
                CliError::Config(m) => eprintln!("config error: {m}"),
                CliError::Numerical { kind, message } => eprintln!("numerical failure ({kind}): {message}"),
            }
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Command::Report { dir } = &cli.command {
        let text = render_report(dir)?;
        fs::write(dir.join("report.md"), &text).map_err(CliError::config)?;
        print!("{text}");
        return Ok(());
    }
    let seed = crate::numeric::seed_from_env(cli.common.seed);
    fs::create_dir_all(&cli.common.out_dir).map_err(|e| CliError::Config(format!("{}: {e}", cli.common.out_dir.display())))?;
    let mut run = Run {
        dir: cli.common.out_dir.clone(),
        seed,
        manifest: Manifest {
            tool: "abc".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: cli.command.name().into(),
            config: serde_json::to_value(&cli.command).map_err(CliError::config)?,
            seed,
            seed_from_env: seed != cli.common.seed || std::env::var_os("ABC_SEED").is_some(),
            workers: cli.common.workers,
            status: "running".into(),
            outputs: Vec::new(),
        },
    };
    run.save_manifest()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.common.workers).build().map_err(CliError::config)?;
    let result = pool.install(|| commands::dispatch(&cli.command, &mut run));
    match &result {
        Ok(()) => run.manifest.status = "ok".into(),
        Err(CliError::Config(m)) => {
            run.manifest.status = "config_error".into();
            run.write_json("error.json", "error", &serde_json::json!({"kind": "ConfigError", "message": m}))?;
        }
        Err(CliError::Numerical { kind, message }) => {
            run.manifest.status = "numerical_failure".into();
            run.write_json("error.json", "error", &serde_json::json!({"kind": kind, "message": message}))?;
        }
    }
    run.save_manifest()?;
    result
}
