use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chebias::density::FourierConfig;
use chebias::experiments::{
    check_zero_set, run, ExperimentConfig, ExperimentError, ExperimentId, ExperimentReport,
    Methods, ZeroSourceConfig,
};
use chebias::group::Family;
use chebias::zeros::{ZeroCountModel, ZeroSet};

#[derive(Parser)]
#[command(
    name = "chebias",
    version,
    about = "Prime races in dihedral and generalized quaternion extensions"
)]
struct Cli {
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample count
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON experiment configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableId {
    H8,
    EspQ,
    EspD,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Dihedral,
    Quaternion,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Dihedral => Family::Dihedral,
            FamilyArg::Quaternion => Family::Quaternion,
        }
    }
}

#[derive(Args, Default)]
struct Common {
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    n: Option<u32>,
    /// root number, +1 or -1
    #[arg(long, allow_hyphen_values = true)]
    w: Option<i8>,
    /// read zeros from `<dir>/<character>.txt` instead of sampling them
    #[arg(long)]
    zeros_dir: Option<PathBuf>,
    /// height for synthetic zeros
    #[arg(long)]
    t_max: Option<f64>,
    /// skip the Monte Carlo estimate
    #[arg(long)]
    no_mc: bool,
    /// skip the Fourier estimate
    #[arg(long)]
    no_fourier: bool,
    /// fixed upper limit of the Fourier integral
    #[arg(long)]
    fourier_t_max: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Mean and variance tables next to the printed closed forms
    Table {
        #[arg(long, value_enum)]
        id: TableId,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        level: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        w: Option<i8>,
    },
    /// Ad hoc races, e.g. `--pair 1,-1 --pair x^3,xy`
    Race {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        level: Option<u32>,
        #[arg(long = "pair", value_parser = parse_pair)]
        pairs: Vec<(String, String)>,
        /// explicit scenario file
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// `δ(C1, C-1)` along the horizontal H8 family
    Horizontal {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        f: Option<Vec<f64>>,
        #[arg(long)]
        d_index: Option<usize>,
    },
    /// Every class pair of one tower, compared with the declared behaviour
    Tower {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// `δ(C1, C-1)` across levels and the level-ordering verdict
    Monotonicity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Zero files
    Zeros {
        #[command(subcommand)]
        action: ZerosCommand,
    },
}

#[derive(Subcommand)]
enum ZerosCommand {
    /// Sample synthetic ordinates from the counting main term
    Gen {
        #[arg(long)]
        log_conductor: f64,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
        #[arg(long, default_value = "chi")]
        id: String,
    },
    /// Validate a zero file, optionally against the counting main term
    Check {
        file: PathBuf,
        #[arg(long)]
        log_conductor: Option<f64>,
        #[arg(long)]
        degree: Option<u32>,
    },
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `C1,C2`, got `{s}`"))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

struct Failure {
    code: u8,
    message: String,
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn base_config(path: Option<&Path>, id: ExperimentId) -> Result<ExperimentConfig, Failure> {
    match path {
        None => Ok(ExperimentConfig::new(id)),
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| config_error(format!("{}: {e}", p.display())))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let compatible = cfg.experiment == id
                || matches!(
                    (cfg.experiment, id),
                    (ExperimentId::TabQ, ExperimentId::TabD)
                        | (ExperimentId::TabD, ExperimentId::TabQ)
                );
            if !compatible {
                return Err(config_error(format!(
                    "config is for {:?}, command is {:?}",
                    cfg.experiment, id
                )));
            }
            Ok(cfg)
        }
    }
}

fn apply_common(cfg: &mut ExperimentConfig, c: &Common) {
    if let Some(f) = c.family {
        cfg.family = Some(f.into());
    }
    if c.n.is_some() {
        cfg.n = c.n;
    }
    if let Some(w) = c.w {
        cfg.w = w;
    }
    if let Some(dir) = &c.zeros_dir {
        cfg.zeros = ZeroSourceConfig::Files { dir: dir.clone() };
    } else if let Some(t) = c.t_max {
        cfg.zeros = ZeroSourceConfig::Synthetic { t_max: t };
    }
    if c.no_mc || c.no_fourier {
        cfg.methods = Methods {
            montecarlo: !c.no_mc && cfg.methods.montecarlo,
            fourier: !c.no_fourier && cfg.methods.fourier,
        };
    }
    if c.fourier_t_max.is_some() {
        cfg.fourier = FourierConfig {
            t_max: c.fourier_t_max,
            ..cfg.fourier
        };
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    let cfg_path = cli.config.as_deref();
    let mut cfg = match &cli.command {
        Command::Zeros { action } => return zeros(action, cli),
        Command::Table { id, n, level, w } => {
            let eid = match id {
                TableId::H8 => ExperimentId::H8Table,
                TableId::EspQ => ExperimentId::EspQ,
                TableId::EspD => ExperimentId::EspD,
            };
            let mut cfg = base_config(cfg_path, eid)?;
            if n.is_some() {
                cfg.n = *n;
            }
            if eid == ExperimentId::H8Table {
                cfg.n = Some(3);
            }
            if level.is_some() {
                cfg.level = *level;
            }
            if let Some(w) = w {
                cfg.w = *w;
            }
            cfg
        }
        Command::Race {
            common,
            level,
            pairs,
            scenario,
        } => {
            let mut cfg = base_config(cfg_path, ExperimentId::Race)?;
            apply_common(&mut cfg, common);
            if level.is_some() {
                cfg.level = *level;
            }
            if !pairs.is_empty() {
                cfg.pairs = pairs.clone();
            }
            if scenario.is_some() {
                cfg.scenario = scenario.clone();
            }
            cfg
        }
        Command::Horizontal { common, f, d_index } => {
            let mut cfg = base_config(cfg_path, ExperimentId::Horizontal)?;
            apply_common(&mut cfg, common);
            if let Some(f) = f {
                cfg.f_values = f.clone();
            }
            if let Some(d) = d_index {
                cfg.d_index = *d;
            }
            cfg
        }
        Command::Tower { common, scenario } => {
            let family = common.family.map(Family::from);
            let id = match family {
                Some(Family::Dihedral) => ExperimentId::TabD,
                Some(Family::Quaternion) => ExperimentId::TabQ,
                None => base_config(cfg_path, ExperimentId::TabQ)
                    .map(|c| c.experiment)
                    .unwrap_or(ExperimentId::TabQ),
            };
            let mut cfg = base_config(cfg_path, id)?;
            cfg.experiment = id;
            apply_common(&mut cfg, common);
            if scenario.is_some() {
                cfg.scenario = scenario.clone();
            }
            cfg
        }
        Command::Monotonicity { common, epsilon } => {
            let mut cfg = base_config(cfg_path, ExperimentId::Monotonicity)?;
            apply_common(&mut cfg, common);
            if let Some(e) = epsilon {
                cfg.epsilon = *e;
            }
            cfg
        }
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(s) = cli.samples {
        cfg.samples = s;
    }
    let report = run(&cfg)?;
    let default = match report {
        ExperimentReport::Table(_) => Format::Csv,
        _ => Format::Json,
    };
    match cli.format.unwrap_or(default) {
        Format::Json => Ok(report.to_json() + "\n"),
        Format::Csv => Ok(report.to_csv()?),
    }
}

fn zeros(action: &ZerosCommand, cli: &Cli) -> Result<String, Failure> {
    match action {
        ZerosCommand::Gen {
            log_conductor,
            degree,
            t_max,
            id,
        } => {
            let model = ZeroCountModel::new(*log_conductor, *degree)
                .map_err(|e| config_error(e.to_string()))?;
            let zs = model
                .sample(*t_max, cli.seed.unwrap_or(1), id.clone())
                .map_err(|e| config_error(e.to_string()))?;
            Ok(zs.to_text())
        }
        ZerosCommand::Check {
            file,
            log_conductor,
            degree,
        } => {
            let zs = ZeroSet::<f64>::load(file).map_err(|e| config_error(e.to_string()))?;
            let model = match (log_conductor, degree) {
                (Some(a), d) => Some(
                    ZeroCountModel::new(*a, d.unwrap_or(1))
                        .map_err(|e| config_error(e.to_string()))?,
                ),
                (None, Some(_)) => return Err(config_error("--degree needs --log-conductor")),
                (None, None) => None,
            };
            let check = check_zero_set(&zs, model.as_ref())?;
            if !check.ok {
                let text = serde_json::to_string_pretty(&check).expect("serializable");
                return Err(Failure {
                    code: 3,
                    message: format!("zero file disagrees with the counting main term\n{text}"),
                });
            }
            Ok(serde_json::to_string_pretty(&check).expect("serializable") + "\n")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(text) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
