use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "planecal", version, about = "Calibrators and area densities for polyhedral norms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Section of the unit ball by a plane, with side weights and supporting facets.
    Section(Common),
    /// Busemann-Hausdorff and Holmes-Thompson densities of a 2-vector.
    Density(DensityArgs),
    /// Build the calibrator of a plane and check it on random 2-vectors.
    Calibrate(CalibrateArgs),
    /// Polygon identities and the main inequality on random polygons.
    PropCheck(PropCheckArgs),
    /// Compare competitor surfaces with a planar disc.
    SemiElliptic(SemiEllipticArgs),
    /// Search for a calibrator by linear programming on sampled 2-vectors.
    LpSearch(LpSearchArgs),
    /// Search for coefficients of the k-dimensional criterion.
    KdimSearch(KdimArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// `linf`, `l1`, `random`, or a path to a polytope JSON file.
    #[arg(long, default_value = "linf")]
    pub norm: String,
    /// Ambient dimension for builtin norms.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Facet pairs of a random norm.
    #[arg(long, default_value_t = 6)]
    pub facets: usize,
    /// Seed of a random norm.
    #[arg(long, default_value_t = 0)]
    pub norm_seed: u64,
    /// `e1,e2` style basis names or vectors such as `1,0,0;0,1,1`.
    #[arg(long, default_value = "e1,e2")]
    pub plane: String,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here (atomically) instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityKind {
    Bh,
    Ht,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub common: Common,
    /// The 2-vector, in the same syntax as `--plane`.
    #[arg(long)]
    pub sigma: String,
    #[arg(long, value_enum, default_value_t = DensityKind::Bh)]
    pub kind: DensityKind,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Per-sample values for plotting.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PropCheckArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 100)]
    pub random_polygons: usize,
    /// Largest number of side pairs of a random polygon.
    #[arg(long, default_value_t = 8)]
    pub max_pairs: usize,
    /// Check this polygon, the hull of `±` the given points `x,y;x,y;…`, instead.
    #[arg(long)]
    pub polygon: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RingArg {
    #[value(name = "Z")]
    Z,
    #[value(name = "Z2")]
    Z2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorArg {
    Tent,
    Displace,
    Mixed,
}

#[derive(Debug, Clone, Args)]
pub struct SemiEllipticArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = RingArg::Z)]
    pub ring: RingArg,
    #[arg(long, value_enum, default_value_t = GeneratorArg::Mixed)]
    pub generator: GeneratorArg,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Tent height.
    #[arg(long, default_value = "1")]
    pub height: String,
    /// Largest displacement coordinate.
    #[arg(long, default_value_t = 2)]
    pub magnitude: i64,
    /// Disc boundary in plane coordinates `x,y;x,y;…`; random when absent.
    #[arg(long)]
    pub disc: Option<String>,
    /// Also measure this mesh (JSON).
    #[arg(long)]
    pub mesh: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LpSearchArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = LpDensity::Bh)]
    pub density: LpDensity,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LpDensity {
    Bh,
    Ht,
}

#[derive(Debug, Clone, Args)]
pub struct KdimArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 10_000)]
    pub revalidate: usize,
}

/// Expands `--config FILE` into flags. The file is a JSON object whose keys
/// are flag names (plus `command`); flags given on the command line win.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let mut args = args;
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(pos);
        p
    } else {
        if pos + 1 >= args.len() {
            return Err(CliError::Input("--config needs a file".into()));
        }
        let p = args.remove(pos + 1);
        args.remove(pos);
        p
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Input(format!("cannot read config {path}: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("config {path}: {e}")))?;
    let Value::Object(map) = value else {
        return Err(CliError::Input("config must be a JSON object".into()));
    };
    let mut tokens = Vec::new();
    let mut command = None;
    for (key, v) in map {
        if key == "command" {
            command = v.as_str().map(str::to_string);
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let given = args.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match v {
            Value::Bool(true) => tokens.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => tokens.extend([flag, s]),
            Value::Number(n) => tokens.extend([flag, n.to_string()]),
            other => return Err(CliError::Input(format!("config key `{key}` has unsupported value {other}"))),
        }
    }
    let subcommands = ["section", "density", "calibrate", "prop-check", "semi-elliptic", "lp-search", "kdim-search"];
    let (prog, rest) = args.split_first().ok_or_else(|| CliError::Input("empty argument list".into()))?;
    let mut out = vec![prog.clone()];
    match rest.first() {
        Some(c) if subcommands.contains(&c.as_str()) => {
            out.push(c.clone());
            out.extend(tokens);
            out.extend(rest[1..].iter().cloned());
        }
        _ => {
            let c = command.ok_or_else(|| CliError::Input("no subcommand given and config has no `command`".into()))?;
            out.push(c);
            out.extend(tokens);
            out.extend(rest.iter().cloned());
        }
    }
    Ok(out)
}
